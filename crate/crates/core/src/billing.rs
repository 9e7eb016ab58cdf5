//! Flat-rate net-metering bills.

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::dispatch::StepFlows;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tariff {
    pub volumetric_price_usd_per_kwh: f64,
    pub export_credit_usd_per_kwh: f64,
}

impl Default for Tariff {
    fn default() -> Self {
        Self {
            volumetric_price_usd_per_kwh: 0.14,
            export_credit_usd_per_kwh: 0.14,
        }
    }
}

impl Tariff {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            self.volumetric_price_usd_per_kwh,
            self.export_credit_usd_per_kwh,
        ];
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::invalid(format!(
                "tariff rates must be non-negative: {rates:?}"
            )));
        }
        Ok(())
    }

    pub fn amount(&self, import_kwh: f64, export_kwh: f64) -> f64 {
        import_kwh * self.volumetric_price_usd_per_kwh - export_kwh * self.export_credit_usd_per_kwh
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BillStatement {
    /// Calendar month, `YYYY-MM`.
    pub period: String,
    pub import_kwh: f64,
    pub export_kwh: f64,
    /// Negative when the utility pays the household.
    pub amount_usd: f64,
}

/// Bills each calendar month of the flows. Net grid draw per step is the
/// house load minus what the nanogrid delivers to the house wiring.
pub fn monthly_bills(
    flows: &[StepFlows],
    house_load_kw: &[f64],
    tariff: &Tariff,
    timestep_h: f64,
) -> Result<Vec<BillStatement>> {
    tariff.validate()?;
    if flows.len() != house_load_kw.len() {
        return Err(Error::Misaligned(format!(
            "{} flow steps but {} house-load samples",
            flows.len(),
            house_load_kw.len()
        )));
    }
    let mut bills: Vec<BillStatement> = Vec::new();
    let mut current: Option<(i32, u32)> = None;
    for (f, &house) in flows.iter().zip(house_load_kw) {
        let month = (f.timestamp.year(), f.timestamp.month());
        if current != Some(month) {
            current = Some(month);
            bills.push(BillStatement {
                period: format!("{:04}-{:02}", month.0, month.1),
                import_kwh: 0.0,
                export_kwh: 0.0,
                amount_usd: 0.0,
            });
        }
        let bill = bills.last_mut().expect("pushed above");
        let grid_kw = house - f.house_side_export();
        if grid_kw > 0.0 {
            bill.import_kwh += grid_kw * timestep_h;
        } else {
            bill.export_kwh -= grid_kw * timestep_h;
        }
    }
    for b in &mut bills {
        b.amount_usd = tariff.amount(b.import_kwh, b.export_kwh);
    }
    Ok(bills)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSummary {
    pub annual_usd: f64,
    pub import_kwh: f64,
    pub export_kwh: f64,
    pub by_month: Vec<BillStatement>,
}

pub fn annual_summary(bills: &[BillStatement]) -> AnnualSummary {
    AnnualSummary {
        annual_usd: bills.iter().map(|b| b.amount_usd).sum(),
        import_kwh: bills.iter().map(|b| b.import_kwh).sum(),
        export_kwh: bills.iter().map(|b| b.export_kwh).sum(),
        by_month: bills.to_vec(),
    }
}

/// Percentage saved by `variant` relative to `baseline`.
pub fn savings_percent(baseline_usd: f64, variant_usd: f64) -> Result<f64> {
    if baseline_usd == 0.0 {
        return Err(Error::UndefinedBaseline);
    }
    Ok(100.0 * (baseline_usd - variant_usd) / baseline_usd)
}
