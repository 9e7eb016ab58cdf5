//! PV output from irradiance by isotropic-sky transposition onto each
//! sub-array of the roof.
//!
//! Azimuths are degrees clockwise from north: 90 = east, 180 = south,
//! 270 = west. Solar position comes from the input data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GROUND_ALBEDO: f64 = 0.2;
pub const DEFAULT_DERATE: f64 = 0.86;

/// 14.3 kW over the 42 modules of the default roof.
pub const DEFAULT_MODULE_POWER_W: f64 = 14_300.0 / 42.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubArray {
    pub tilt_deg: f64,
    pub azimuth_deg: f64,
    pub module_count: u32,
    #[serde(default = "default_module_power")]
    pub module_power_w: f64,
}

fn default_module_power() -> f64 {
    DEFAULT_MODULE_POWER_W
}

impl SubArray {
    pub fn new(
        tilt_deg: f64,
        azimuth_deg: f64,
        module_count: u32,
        module_power_w: f64,
    ) -> Result<Self> {
        let s = Self {
            tilt_deg,
            azimuth_deg,
            module_count,
            module_power_w,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=90.0).contains(&self.tilt_deg) {
            return Err(Error::invalid(format!(
                "tilt {} outside [0, 90]",
                self.tilt_deg
            )));
        }
        if !(0.0..360.0).contains(&self.azimuth_deg) {
            return Err(Error::invalid(format!(
                "azimuth {} outside [0, 360)",
                self.azimuth_deg
            )));
        }
        if self.module_count == 0 {
            return Err(Error::invalid("sub-array needs at least one module"));
        }
        if !(self.module_power_w.is_finite() && self.module_power_w > 0.0) {
            return Err(Error::invalid(format!(
                "module power must be positive, got {}",
                self.module_power_w
            )));
        }
        Ok(())
    }

    pub fn nameplate_kw(&self) -> f64 {
        self.module_count as f64 * self.module_power_w / 1000.0
    }
}

/// The four sub-arrays of the test house roof.
pub fn default_arrays() -> Vec<SubArray> {
    [
        (32.0, 90.0, 3),
        (50.0, 180.0, 3),
        (32.0, 90.0, 6),
        (30.0, 270.0, 30),
    ]
    .into_iter()
    .map(|(tilt_deg, azimuth_deg, module_count)| SubArray {
        tilt_deg,
        azimuth_deg,
        module_count,
        module_power_w: DEFAULT_MODULE_POWER_W,
    })
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IrradianceRecord {
    pub ghi_w_m2: f64,
    pub dni_w_m2: f64,
    pub dhi_w_m2: f64,
    pub solar_zenith_deg: f64,
    pub solar_azimuth_deg: f64,
}

impl IrradianceRecord {
    pub fn validate(&self) -> Result<()> {
        let irr = [self.ghi_w_m2, self.dni_w_m2, self.dhi_w_m2];
        if irr.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(format!(
                "irradiance must be non-negative: {irr:?}"
            )));
        }
        if !(0.0..=180.0).contains(&self.solar_zenith_deg) || !self.solar_azimuth_deg.is_finite() {
            return Err(Error::invalid(format!(
                "solar position out of range (zenith {}, azimuth {})",
                self.solar_zenith_deg, self.solar_azimuth_deg
            )));
        }
        Ok(())
    }
}

/// Cosine of the angle between the sun and the panel normal.
pub fn cos_incidence(rec: &IrradianceRecord, sub: &SubArray) -> f64 {
    let (z, tilt) = (rec.solar_zenith_deg.to_radians(), sub.tilt_deg.to_radians());
    let daz = (rec.solar_azimuth_deg - sub.azimuth_deg).to_radians();
    z.cos() * tilt.cos() + z.sin() * tilt.sin() * daz.cos()
}

/// Plane-of-array irradiance (W/m²): beam + isotropic sky diffuse + ground
/// reflection.
pub fn poa_irradiance(rec: &IrradianceRecord, sub: &SubArray) -> f64 {
    let cos_tilt = sub.tilt_deg.to_radians().cos();
    let beam = rec.dni_w_m2 * cos_incidence(rec, sub).max(0.0);
    let diffuse = rec.dhi_w_m2 * (1.0 + cos_tilt) / 2.0;
    let ground = rec.ghi_w_m2 * GROUND_ALBEDO * (1.0 - cos_tilt) / 2.0;
    (beam + diffuse + ground).max(0.0)
}

/// DC output (kW) of all sub-arrays for one record, clipped at nameplate.
pub fn array_power_kw(rec: &IrradianceRecord, arrays: &[SubArray], derate: f64) -> f64 {
    let nameplate: f64 = arrays.iter().map(SubArray::nameplate_kw).sum();
    let raw: f64 = arrays
        .iter()
        .map(|a| a.nameplate_kw() * poa_irradiance(rec, a) / 1000.0 * derate)
        .sum();
    raw.clamp(0.0, nameplate)
}

pub fn pv_power(
    records: &[IrradianceRecord],
    arrays: &[SubArray],
    derate: f64,
) -> Result<Vec<f64>> {
    for a in arrays {
        a.validate()?;
    }
    if !(derate > 0.0 && derate <= 1.0) {
        return Err(Error::invalid(format!(
            "derate must lie in (0, 1], got {derate}"
        )));
    }
    records
        .iter()
        .map(|r| {
            r.validate()?;
            Ok(array_power_kw(r, arrays, derate))
        })
        .collect()
}

/// Reads the irradiance columns of an aligned series into records.
pub fn records_from_series(series: &crate::io::AlignedSeries) -> Result<Vec<IrradianceRecord>> {
    use crate::io::columns::*;
    let (ghi, dni, dhi) = (
        series.require(GHI)?,
        series.require(DNI)?,
        series.require(DHI)?,
    );
    let (zen, az) = (series.require(ZENITH)?, series.require(AZIMUTH)?);
    Ok((0..series.len())
        .map(|k| IrradianceRecord {
            ghi_w_m2: ghi[k],
            dni_w_m2: dni[k],
            dhi_w_m2: dhi[k],
            solar_zenith_deg: zen[k],
            solar_azimuth_deg: az[k],
        })
        .collect())
}
