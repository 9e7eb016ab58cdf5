//! Assembles lab and field results into a long-format report table.

use serde::Serialize;

use super::{
    cop, daily_points, energy_balance_check, fit_poly, welch_t_test, DailyPoint, FieldSample,
    PolyFit, SteadyStateTestRecord, Supply, WelchResult, DEFAULT_BALANCE_OFFSET_C,
    DEFAULT_BALANCE_TOLERANCE, DEFAULT_SETPOINT_C, MIN_SAMPLES_PER_DAY,
};
use crate::error::Result;
use crate::io::format_number;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSettings {
    pub setpoint_c: f64,
    pub balance_offset_c: f64,
    pub balance_tolerance: f64,
    pub min_samples_per_day: usize,
    /// Number of abscissae at which fit bands are tabulated.
    pub band_points: usize,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            setpoint_c: DEFAULT_SETPOINT_C,
            balance_offset_c: DEFAULT_BALANCE_OFFSET_C,
            balance_tolerance: DEFAULT_BALANCE_TOLERANCE,
            min_samples_per_day: MIN_SAMPLES_PER_DAY,
            band_points: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub section: String,
    pub label: String,
    pub supply: String,
    pub metric: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub cops: Vec<(String, Supply, f64)>,
    pub daily: Vec<DailyPoint>,
    pub welch: Option<WelchResult>,
    pub hourly_fits: Vec<(Supply, PolyFit)>,
    pub daily_fits: Vec<(Supply, PolyFit)>,
}

impl Report {
    fn push(
        &mut self,
        section: &str,
        label: &str,
        supply: Option<Supply>,
        metric: &str,
        value: String,
    ) {
        self.rows.push(ReportRow {
            section: section.into(),
            label: label.into(),
            supply: supply.map(|s| s.to_string()).unwrap_or_default(),
            metric: metric.into(),
            value,
        });
    }

    fn push_num(
        &mut self,
        section: &str,
        label: &str,
        supply: Option<Supply>,
        metric: &str,
        v: f64,
    ) {
        self.push(section, label, supply, metric, format_number(v));
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.into_inner()
            .map_err(|e| crate::error::Error::io("<memory>", e.into_error()))
    }

    fn push_fit(
        &mut self,
        section: &str,
        supply: Supply,
        fit: &PolyFit,
        xs: &[f64],
        points: usize,
    ) {
        let label = format!("degree_{}", fit.degree());
        for (power, c) in (0..=fit.degree()).rev().zip(&fit.coefficients) {
            self.push_num(section, &label, Some(supply), &format!("coef_x{power}"), *c);
        }
        self.push_num(section, &label, Some(supply), "r_squared", fit.r_squared);
        self.push_num(
            section,
            &label,
            Some(supply),
            "residual_sigma",
            fit.residual_sigma,
        );
        self.push_num(section, &label, Some(supply), "n", fit.n as f64);
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let band_section = format!("{section}_band");
        for i in 0..points.max(2) {
            let x = lo + (hi - lo) * i as f64 / (points.max(2) - 1) as f64;
            let (low, high) = fit.band(x);
            let label = format_number(x);
            self.push_num(
                &band_section,
                &label,
                Some(supply),
                "prediction",
                fit.predict(x),
            );
            self.push_num(&band_section, &label, Some(supply), "lower", low);
            self.push_num(&band_section, &label, Some(supply), "upper", high);
        }
    }
}

/// Runs every reduction the inputs allow.
pub fn analyze(
    lab: &[SteadyStateTestRecord],
    field: &[FieldSample],
    settings: &AnalysisSettings,
) -> Result<Report> {
    let mut report = Report::default();

    for r in lab {
        let value = cop(r)?;
        report.cops.push((r.test_label.clone(), r.supply, value));
        report.push_num("cop", &r.test_label, Some(r.supply), "cop", value);
        if let (Some(air), Some(refr)) = (r.air_side_kw, r.refrigerant_side_kw) {
            let check = energy_balance_check(air, refr, settings.balance_tolerance)?;
            report.push_num(
                "energy_balance",
                &r.test_label,
                Some(r.supply),
                "relative_error",
                check.relative_error,
            );
            let verdict = if check.pass { "pass" } else { "fail" };
            report.push(
                "energy_balance",
                &r.test_label,
                Some(r.supply),
                "verdict",
                verdict.into(),
            );
        }
    }

    if field.is_empty() {
        return Ok(report);
    }

    let days = daily_points(
        field,
        settings.setpoint_c,
        settings.balance_offset_c,
        settings.min_samples_per_day,
    )?;
    for d in &days {
        let label = d.date.to_string();
        report.push_num(
            "daily",
            &label,
            Some(d.supply),
            "mean_power_kw",
            d.mean_power_kw,
        );
        report.push_num("daily", &label, Some(d.supply), "delta_t_c", d.delta_t_c);
        match d.normalized_kw_per_c {
            Some(x) => report.push_num("daily", &label, Some(d.supply), "normalized_kw_per_c", x),
            None => report.push(
                "daily",
                &label,
                Some(d.supply),
                "normalized_kw_per_c",
                "excluded".into(),
            ),
        }
    }

    let normalized = |supply: Supply| -> Vec<f64> {
        days.iter()
            .filter(|d| d.supply == supply)
            .filter_map(|d| d.normalized_kw_per_c)
            .collect()
    };
    let (xa, xd) = (normalized(Supply::Ac), normalized(Supply::Dc));
    if xa.len() >= 2 && xd.len() >= 2 {
        let w = welch_t_test(&xa, &xd)?;
        let label = "ac_vs_dc";
        report.push_num("welch", label, None, "mean_a", w.mean_a);
        report.push_num("welch", label, None, "mean_d", w.mean_d);
        report.push_num("welch", label, None, "var_a", w.var_a);
        report.push_num("welch", label, None, "var_d", w.var_d);
        report.push_num("welch", label, None, "n_a", w.n_a as f64);
        report.push_num("welch", label, None, "n_d", w.n_d as f64);
        report.push_num("welch", label, None, "t_statistic", w.t_statistic);
        report.push_num(
            "welch",
            label,
            None,
            "degrees_of_freedom",
            w.degrees_of_freedom,
        );
        report.push_num("welch", label, None, "p_value", w.p_value);
        report.welch = Some(w);
    } else {
        report.push(
            "welch",
            "ac_vs_dc",
            None,
            "status",
            format!(
                "skipped: {} ac and {} dc normalised days",
                xa.len(),
                xd.len()
            ),
        );
    }

    for supply in [Supply::Ac, Supply::Dc] {
        let (hx, hy): (Vec<f64>, Vec<f64>) = field
            .iter()
            .filter(|s| s.supply == supply)
            .map(|s| ((settings.setpoint_c - s.t_out_c).max(0.0), s.power_kw))
            .unzip();
        if hx.len() >= 4 {
            if let Ok(fit) = fit_poly(&hx, &hy, 2) {
                report.push_fit("fit_hourly", supply, &fit, &hx, settings.band_points);
                report.hourly_fits.push((supply, fit));
            }
        }
        let (dx, dy): (Vec<f64>, Vec<f64>) = days
            .iter()
            .filter(|d| d.supply == supply)
            .map(|d| (d.delta_t_c, d.mean_power_kw))
            .unzip();
        if dx.len() >= 3 {
            if let Ok(fit) = fit_poly(&dx, &dy, 1) {
                report.push_fit("fit_daily", supply, &fit, &dx, settings.band_points);
                report.daily_fits.push((supply, fit));
            }
        }
    }
    report.daily = days;
    Ok(report)
}
