//! Reduction of laboratory and field heat-pump measurements.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod fit;
pub mod report;
pub mod stats;

pub use fit::{fit_poly, PolyFit, Z90};
pub use stats::{welch_t_test, WelchResult};

/// Thermostat setpoint used in the field campaign (°C).
pub const DEFAULT_SETPOINT_C: f64 = 20.5;
/// Indoor-outdoor difference at which heat demand vanishes (°C).
pub const DEFAULT_BALANCE_OFFSET_C: f64 = 8.0;
pub const DEFAULT_BALANCE_TOLERANCE: f64 = 0.06;
/// Days with fewer hourly samples are dropped from daily aggregates.
pub const MIN_SAMPLES_PER_DAY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Supply {
    Ac = 0,
    Dc = 1,
}

impl fmt::Display for Supply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Supply::Ac => "ac",
            Supply::Dc => "dc",
        })
    }
}

impl FromStr for Supply {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ac" => Ok(Supply::Ac),
            "dc" => Ok(Supply::Dc),
            other => Err(Error::invalid(format!("unknown supply '{other}'"))),
        }
    }
}

/// One steady-state laboratory test point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateTestRecord {
    pub test_label: String,
    pub supply: Supply,
    /// |Q̇_indoor + Q̇_in,fan| (kW).
    pub thermal_capacity_kw: f64,
    pub indoor_power_kw: f64,
    /// Outdoor fan plus compressor (kW).
    pub outdoor_power_kw: f64,
    pub total_power_kw: f64,
    pub air_side_kw: Option<f64>,
    pub refrigerant_side_kw: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub timestamp: DateTime<FixedOffset>,
    pub supply: Supply,
    pub power_kw: f64,
    pub t_out_c: f64,
}

/// Coefficient of performance: delivered capacity over total electrical input.
pub fn cop(record: &SteadyStateTestRecord) -> Result<f64> {
    if record.total_power_kw.is_nan() || record.total_power_kw <= 0.0 {
        return Err(Error::invalid(format!(
            "test {}: total power must be positive to compute COP",
            record.test_label
        )));
    }
    Ok(record.thermal_capacity_kw / record.total_power_kw)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceCheck {
    pub relative_error: f64,
    pub pass: bool,
}

/// Air-side vs refrigerant-side capacity agreement.
pub fn energy_balance_check(
    air_side_kw: f64,
    refrigerant_side_kw: f64,
    tolerance: f64,
) -> Result<BalanceCheck> {
    if refrigerant_side_kw.is_nan() || refrigerant_side_kw <= 0.0 || !air_side_kw.is_finite() {
        return Err(Error::invalid(format!(
            "energy balance needs a positive refrigerant-side capacity (air {air_side_kw}, refrigerant {refrigerant_side_kw})"
        )));
    }
    let relative_error = (air_side_kw - refrigerant_side_kw).abs() / refrigerant_side_kw;
    Ok(BalanceCheck {
        relative_error,
        pass: relative_error <= tolerance,
    })
}

/// Mean of `max(0, setpoint - T_out)` over one day's samples.
pub fn hdh(t_out_c: &[f64], setpoint_c: f64) -> Result<f64> {
    if t_out_c.is_empty() {
        return Err(Error::invalid(
            "temperature difference needs at least one sample",
        ));
    }
    Ok(t_out_c
        .iter()
        .map(|t| (setpoint_c - t).max(0.0))
        .sum::<f64>()
        / t_out_c.len() as f64)
}

/// Weather-normalised power `P / (ΔT - c)`, or `None` when `ΔT <= c` and the
/// sample must be excluded.
pub fn normalize(power_kw: f64, delta_t_c: f64, offset_c: f64) -> Option<f64> {
    (delta_t_c > offset_c).then(|| power_kw / (delta_t_c - offset_c))
}

/// Daily aggregate of one supply's field samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DailyPoint {
    pub date: NaiveDate,
    pub supply: Supply,
    pub samples: usize,
    pub mean_power_kw: f64,
    /// Daily mean indoor-outdoor temperature difference (°C).
    pub delta_t_c: f64,
    /// `None` when the day is excluded from normalisation.
    pub normalized_kw_per_c: Option<f64>,
}

/// Groups samples by local calendar day and supply, dropping incomplete days.
pub fn daily_points(
    samples: &[FieldSample],
    setpoint_c: f64,
    offset_c: f64,
    min_samples: usize,
) -> Result<Vec<DailyPoint>> {
    let mut groups: BTreeMap<(Supply, NaiveDate), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for s in samples {
        let entry = groups
            .entry((s.supply, s.timestamp.date_naive()))
            .or_default();
        entry.0.push(s.power_kw);
        entry.1.push(s.t_out_c);
    }
    groups
        .into_iter()
        .filter(|(_, (p, _))| p.len() >= min_samples)
        .map(|((supply, date), (power, temps))| {
            let mean_power_kw = power.iter().sum::<f64>() / power.len() as f64;
            let delta_t_c = hdh(&temps, setpoint_c)?;
            Ok(DailyPoint {
                date,
                supply,
                samples: power.len(),
                mean_power_kw,
                delta_t_c,
                normalized_kw_per_c: normalize(mean_power_kw, delta_t_c, offset_c),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use chrono::{Duration, TimeZone};

    fn rec(label: &str, supply: Supply, cap: f64, total: f64) -> SteadyStateTestRecord {
        SteadyStateTestRecord {
            test_label: label.into(),
            supply,
            thermal_capacity_kw: cap,
            indoor_power_kw: 0.0,
            outdoor_power_kw: total,
            total_power_kw: total,
            air_side_kw: None,
            refrigerant_side_kw: None,
        }
    }

    #[test]
    fn cop_examples() {
        let round2 = |v: f64| (v * 100.0).round() / 100.0;
        assert_eq!(
            round2(cop(&rec("A2", Supply::Ac, 12.75, 3.746)).unwrap()),
            3.40
        );
        assert_eq!(
            round2(cop(&rec("H32", Supply::Ac, 10.32, 4.865)).unwrap()),
            2.12
        );
        assert_eq!(
            round2(cop(&rec("A2", Supply::Dc, 12.44, 3.565)).unwrap()),
            3.49
        );
        assert!(cop(&rec("X", Supply::Dc, 1.0, 0.0)).is_err());
    }

    #[test]
    fn cop_is_scale_invariant() {
        let base = cop(&rec("B2", Supply::Dc, 13.60, 3.044)).unwrap();
        let scaled = cop(&rec("B2", Supply::Dc, 13.60 * 7.5, 3.044 * 7.5)).unwrap();
        assert_abs_diff_eq!(base, scaled, epsilon = 1e-12);
    }

    #[test]
    fn energy_balance_examples() {
        let c = energy_balance_check(12.5, 12.75, DEFAULT_BALANCE_TOLERANCE).unwrap();
        assert_abs_diff_eq!(c.relative_error, 0.25 / 12.75, epsilon = 1e-15);
        assert!(c.pass);
        let c = energy_balance_check(4.2, 4.2, DEFAULT_BALANCE_TOLERANCE).unwrap();
        assert_eq!(c.relative_error, 0.0);
        assert!(c.pass);
        let c = energy_balance_check(10.0, 9.0, DEFAULT_BALANCE_TOLERANCE).unwrap();
        assert_abs_diff_eq!(c.relative_error, 1.0 / 9.0, epsilon = 1e-15);
        assert!(!c.pass);
        assert!(energy_balance_check(1.0, 0.0, 0.06).is_err());
    }

    #[test]
    fn hdh_examples() {
        assert_eq!(hdh(&[20.5; 24], 20.5).unwrap(), 0.0);
        assert_eq!(hdh(&[0.0; 24], 20.5).unwrap(), 20.5);
        let mut temps = vec![10.5; 12];
        temps.extend([30.5; 12]);
        assert_eq!(hdh(&temps, 20.5).unwrap(), 5.0);
        assert!(hdh(&[], 20.5).is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(2.0, 18.0, 8.0), Some(0.2));
        assert_eq!(normalize(0.0, 12.0, 8.0), Some(0.0));
        assert_eq!(normalize(1.0, 8.0, 8.0), None);
        assert_eq!(normalize(1.0, 3.0, 8.0), None);
    }

    #[test]
    fn daily_points_drop_incomplete_days() {
        let tz = FixedOffset::west_opt(5 * 3600).unwrap();
        let start = tz.with_ymd_and_hms(2024, 12, 18, 0, 0, 0).unwrap();
        // One full day at -4.5 °C, then 10 samples of the next day.
        let samples: Vec<_> = (0..34)
            .map(|k| FieldSample {
                timestamp: start + Duration::hours(k),
                supply: Supply::Dc,
                power_kw: 1.5,
                t_out_c: -4.5,
            })
            .collect();
        let days = daily_points(&samples, 20.5, 8.0, MIN_SAMPLES_PER_DAY).unwrap();
        assert_eq!(days.len(), 1);
        let d = days[0];
        assert_eq!(d.samples, 24);
        assert_eq!(d.delta_t_c, 25.0);
        assert_abs_diff_eq!(d.normalized_kw_per_c.unwrap(), 1.5 / 17.0, epsilon = 1e-15);
    }

    #[test]
    fn supply_parsing() {
        assert_eq!("AC".parse::<Supply>().unwrap(), Supply::Ac);
        assert_eq!("dc".parse::<Supply>().unwrap(), Supply::Dc);
        assert!("hvdc".parse::<Supply>().is_err());
    }
}
