//! Power converters with part-load efficiency and the conversion chains of
//! the three nanogrid configurations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConverterKind {
    Inverter,
    Rectifier,
    Mppt,
    DcDc,
    HpInverter,
    None,
}

impl ConverterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConverterKind::Inverter => "inverter",
            ConverterKind::Rectifier => "rectifier",
            ConverterKind::Mppt => "mppt",
            ConverterKind::DcDc => "dc_dc",
            ConverterKind::HpInverter => "hp_inverter",
            ConverterKind::None => "none",
        }
    }
}

/// Shape of the part-load curve: `g(l) = l / (l + a0 + a1·l²)`, normalised so
/// that `g(1)` maps to the peak efficiency and capped there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartLoadCurve {
    pub a0: f64,
    pub a1: f64,
    /// Load fractions below this use the efficiency at this fraction.
    pub min_load_fraction: f64,
}

impl Default for PartLoadCurve {
    fn default() -> Self {
        Self {
            a0: 0.01,
            a1: 0.05,
            min_load_fraction: 0.01,
        }
    }
}

impl PartLoadCurve {
    fn shape(&self, l: f64) -> f64 {
        l / (l + self.a0 + self.a1 * l * l)
    }

    /// Relative efficiency in `(0, 1]` at load fraction `l`.
    pub fn relative(&self, l: f64) -> f64 {
        let l = l.clamp(self.min_load_fraction, 1.0);
        (self.shape(l) / self.shape(1.0)).min(1.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.a0.is_finite() && self.a0 >= 0.0 && self.a1.is_finite() && self.a1 >= 0.0) {
            return Err(Error::invalid(format!(
                "part-load constants must be non-negative (a0 = {}, a1 = {})",
                self.a0, self.a1
            )));
        }
        if !(self.min_load_fraction > 0.0 && self.min_load_fraction <= 1.0) {
            return Err(Error::invalid(format!(
                "min_load_fraction must lie in (0, 1], got {}",
                self.min_load_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverterSpec {
    pub kind: ConverterKind,
    pub peak_efficiency: f64,
    pub rated_power_kw: f64,
    pub curve: PartLoadCurve,
}

impl ConverterSpec {
    pub fn new(kind: ConverterKind, peak_efficiency: f64, rated_power_kw: f64) -> Result<Self> {
        Self::with_curve(
            kind,
            peak_efficiency,
            rated_power_kw,
            PartLoadCurve::default(),
        )
    }

    pub fn with_curve(
        kind: ConverterKind,
        peak_efficiency: f64,
        rated_power_kw: f64,
        curve: PartLoadCurve,
    ) -> Result<Self> {
        if !(peak_efficiency > 0.0 && peak_efficiency <= 1.0) {
            return Err(Error::invalid(format!(
                "{} peak efficiency must lie in (0, 1], got {peak_efficiency}",
                kind.as_str()
            )));
        }
        if !(rated_power_kw.is_finite() && rated_power_kw > 0.0) {
            return Err(Error::invalid(format!(
                "{} rated power must be positive, got {rated_power_kw}",
                kind.as_str()
            )));
        }
        curve.validate()?;
        Ok(Self {
            kind,
            peak_efficiency,
            rated_power_kw,
            curve,
        })
    }

    /// Efficiency at the given throughput. Zero throughput reports the peak;
    /// callers multiply by zero anyway.
    pub fn efficiency_at(&self, throughput_kw: f64) -> Result<f64> {
        if throughput_kw.is_nan() || throughput_kw < 0.0 {
            return Err(Error::invalid(format!(
                "converter throughput must be non-negative, got {throughput_kw}"
            )));
        }
        Ok(self.efficiency_unchecked(throughput_kw))
    }

    fn efficiency_unchecked(&self, throughput_kw: f64) -> f64 {
        if self.kind == ConverterKind::None || throughput_kw == 0.0 {
            return self.peak_efficiency;
        }
        self.peak_efficiency * self.curve.relative(throughput_kw / self.rated_power_kw)
    }

    fn output(&self, input_kw: f64) -> f64 {
        input_kw * self.efficiency_unchecked(input_kw)
    }

    /// Input that produces `output_kw`. `output(y)` is continuous and strictly
    /// increasing, so bisection on `[output, output/η_floor]` converges.
    fn input_for(&self, output_kw: f64) -> f64 {
        if output_kw == 0.0 {
            return 0.0;
        }
        let floor = self.peak_efficiency * self.curve.relative(0.0);
        let mut lo = output_kw;
        let mut hi = output_kw / floor;
        if self.output(hi) <= output_kw {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.output(mid) < output_kw {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Result of pushing power through a conversion chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conversion {
    pub output_kw: f64,
    pub loss_kw: f64,
}

/// An ordered conversion chain. The empty chain is the identity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Path(pub Vec<ConverterSpec>);

impl Path {
    pub fn identity() -> Self {
        Path(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0
            .iter()
            .all(|c| c.kind == ConverterKind::None && c.peak_efficiency == 1.0)
    }

    pub fn stages(&self) -> &[ConverterSpec] {
        &self.0
    }

    pub fn apply(&self, input_kw: f64) -> Result<Conversion> {
        if !input_kw.is_finite() || input_kw < 0.0 {
            return Err(Error::invalid(format!(
                "path input must be finite and non-negative, got {input_kw}"
            )));
        }
        let output_kw = self.0.iter().fold(input_kw, |p, stage| stage.output(p));
        Ok(Conversion {
            output_kw,
            loss_kw: input_kw - output_kw,
        })
    }

    /// Largest deliverable output: the first stage driven at its rating.
    pub fn capacity_kw(&self) -> f64 {
        match self.0.first() {
            None => f64::INFINITY,
            Some(first) => self
                .apply(first.rated_power_kw)
                .map(|c| c.output_kw)
                .unwrap_or(f64::INFINITY),
        }
    }

    /// Input power needed to deliver `output_kw` at the end of the chain.
    pub fn required_input(&self, output_kw: f64) -> Result<f64> {
        if !output_kw.is_finite() || output_kw < 0.0 {
            return Err(Error::invalid(format!(
                "path output must be finite and non-negative, got {output_kw}"
            )));
        }
        let capacity_kw = self.capacity_kw();
        if output_kw > capacity_kw * (1.0 + 1e-12) {
            return Err(Error::InfeasibleDemand {
                at: String::from("path"),
                demand_kw: output_kw,
                capacity_kw,
            });
        }
        Ok(self
            .0
            .iter()
            .rev()
            .fold(output_kw, |p, stage| stage.input_for(p)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyName {
    AcBaseline,
    DcRetrofit,
    DcIdeal,
}

impl TopologyName {
    pub const ALL: [TopologyName; 3] = [
        TopologyName::AcBaseline,
        TopologyName::DcRetrofit,
        TopologyName::DcIdeal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TopologyName::AcBaseline => "ac_baseline",
            TopologyName::DcRetrofit => "dc_retrofit",
            TopologyName::DcIdeal => "dc_ideal",
        }
    }
}

impl fmt::Display for TopologyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TopologyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TopologyName::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown topology '{s}' (expected ac_baseline, dc_retrofit or dc_ideal)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub name: TopologyName,
    pub path_pv_to_bus: Path,
    /// Used in both directions: bus to battery when charging, battery to
    /// bus when discharging.
    pub path_battery_to_bus: Path,
    pub path_bus_to_heatpump: Path,
    /// Used in both directions: export to the house, import from it.
    pub path_bus_to_house: Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeakEfficiencies {
    pub inverter: f64,
    pub rectifier: f64,
    pub mppt: f64,
    pub dc_dc: f64,
    pub hp_inverter: f64,
}

impl Default for PeakEfficiencies {
    fn default() -> Self {
        Self {
            inverter: 0.95,
            rectifier: 0.95,
            mppt: 0.98,
            dc_dc: 0.98,
            hp_inverter: 0.97,
        }
    }
}

impl PeakEfficiencies {
    pub fn get(&self, kind: ConverterKind) -> f64 {
        match kind {
            ConverterKind::Inverter => self.inverter,
            ConverterKind::Rectifier => self.rectifier,
            ConverterKind::Mppt => self.mppt,
            ConverterKind::DcDc => self.dc_dc,
            ConverterKind::HpInverter => self.hp_inverter,
            ConverterKind::None => 1.0,
        }
    }
}

/// Rated power (kW) of every converter on each path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathRatings {
    pub pv_kw: f64,
    pub battery_kw: f64,
    pub heat_pump_kw: f64,
    pub house_kw: f64,
}

impl Default for PathRatings {
    fn default() -> Self {
        Self {
            pv_kw: 14.3,
            battery_kw: 12.5,
            heat_pump_kw: 5.0,
            house_kw: 10.0,
        }
    }
}

/// Everything needed to build the three topologies.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConverterSettings {
    pub peak: PeakEfficiencies,
    pub curve: PartLoadCurve,
    /// Per-kind replacements for `curve`.
    pub curves: BTreeMap<ConverterKind, PartLoadCurve>,
    pub rated: PathRatings,
}

impl ConverterSettings {
    fn spec(&self, kind: ConverterKind, rated_kw: f64) -> Result<ConverterSpec> {
        let curve = self.curves.get(&kind).copied().unwrap_or(self.curve);
        ConverterSpec::with_curve(kind, self.peak.get(kind), rated_kw, curve)
    }

    fn path(&self, kinds: &[ConverterKind], rated_kw: f64) -> Result<Path> {
        kinds
            .iter()
            .map(|&k| self.spec(k, rated_kw))
            .collect::<Result<Vec<_>>>()
            .map(Path)
    }

    pub fn topology(&self, name: TopologyName) -> Result<Topology> {
        use ConverterKind::*;
        let r = &self.rated;
        let topology = match name {
            TopologyName::AcBaseline => Topology {
                name,
                path_pv_to_bus: self.path(&[Mppt, Inverter], r.pv_kw)?,
                path_battery_to_bus: self.path(&[Inverter], r.battery_kw)?,
                path_bus_to_heatpump: self.path(&[Rectifier, HpInverter], r.heat_pump_kw)?,
                path_bus_to_house: Path::identity(),
            },
            TopologyName::DcRetrofit => Topology {
                name,
                path_pv_to_bus: self.path(&[Mppt, DcDc], r.pv_kw)?,
                path_battery_to_bus: self.path(&[DcDc], r.battery_kw)?,
                path_bus_to_heatpump: self.path(&[HpInverter], r.heat_pump_kw)?,
                path_bus_to_house: self.path(&[Inverter], r.house_kw)?,
            },
            TopologyName::DcIdeal => Topology {
                path_bus_to_heatpump: Path::identity(),
                ..self.topology(TopologyName::DcRetrofit)?
            },
        };
        Ok(Topology { name, ..topology })
    }

    pub fn topologies(&self) -> Result<Vec<Topology>> {
        TopologyName::ALL
            .into_iter()
            .map(|n| self.topology(n))
            .collect()
    }
}

/// The three configurations with default peaks, curve and ratings.
pub fn builtin_topologies() -> Vec<Topology> {
    ConverterSettings::default()
        .topologies()
        .expect("default converter settings are valid")
}
