//! Scenario configuration file (TOML).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nanogrid_core::analysis::report::AnalysisSettings;
use nanogrid_core::battery::BatteryParams;
use nanogrid_core::billing::Tariff;
use nanogrid_core::converters::{ConverterSettings, TopologyName};
use nanogrid_core::dispatch::DispatchOptions;
use nanogrid_core::pvsolar::{default_arrays, SubArray, DEFAULT_DERATE};
use serde::{Deserialize, Deserializer};

use crate::error::CliError;

/// The configuration shipped with the repository; every value equals the
/// library default.
pub const DEFAULT_CONFIG: &str = include_str!("../../../config/default.toml");

/// Input files. Relative paths are resolved against the config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// `hp_power_kw`, `house_power_kw` and optionally `indoor_power_kw`.
    pub loads: Option<PathBuf>,
    /// `pv_dc_kw`.
    pub pv: Option<PathBuf>,
    /// Irradiance and sun position, converted to PV power when `pv` is absent.
    pub irradiance: Option<PathBuf>,
    pub lab: Option<PathBuf>,
    pub field: Option<PathBuf>,
    /// Longest run of missing steps filled by interpolation; 0 rejects gaps.
    pub max_gap_steps: usize,
}

impl Inputs {
    fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.loads,
            &mut self.pv,
            &mut self.irradiance,
            &mut self.lab,
            &mut self.field,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    /// Every configured path, for existence checks.
    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        [
            &self.loads,
            &self.pv,
            &self.irradiance,
            &self.lab,
            &self.field,
        ]
        .into_iter()
        .flatten()
        .map(PathBuf::as_path)
    }
}

/// Which topologies to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopologySelection {
    #[default]
    All,
    One(TopologyName),
}

impl TopologySelection {
    pub fn names(self) -> Vec<TopologyName> {
        match self {
            TopologySelection::All => TopologyName::ALL.to_vec(),
            TopologySelection::One(n) => vec![n],
        }
    }
}

impl FromStr for TopologySelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(TopologySelection::All);
        }
        s.parse()
            .map(TopologySelection::One)
            .map_err(|e| e.to_string())
    }
}

impl fmt::Display for TopologySelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySelection::All => f.write_str("all"),
            TopologySelection::One(n) => n.fmt(f),
        }
    }
}

impl<'de> Deserialize<'de> for TopologySelection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Where the indoor unit's measured power is booked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndoorUnit {
    /// Added to the heat-pump demand behind the nanogrid.
    #[default]
    HeatPump,
    /// Added to the rest-of-house load.
    House,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvSettings {
    pub derate: f64,
    pub arrays: Vec<SubArray>,
}

impl Default for PvSettings {
    fn default() -> Self {
        Self {
            derate: DEFAULT_DERATE,
            arrays: default_arrays(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub topology: TopologySelection,
    pub out: PathBuf,
    pub seed: u64,
    pub days: u32,
    pub indoor_unit: IndoorUnit,
    pub inputs: Inputs,
    pub battery: BatteryParams,
    pub converters: ConverterSettings,
    pub tariff: Tariff,
    pub dispatch: DispatchOptions,
    pub pv: PvSettings,
    pub analysis: AnalysisSettings,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            topology: TopologySelection::All,
            out: PathBuf::from("out"),
            seed: 0,
            days: 365,
            indoor_unit: IndoorUnit::default(),
            inputs: Inputs {
                max_gap_steps: 3,
                ..Inputs::default()
            },
            battery: BatteryParams::default(),
            converters: ConverterSettings::default(),
            tariff: Tariff::default(),
            dispatch: DispatchOptions::default(),
            pv: PvSettings::default(),
            analysis: AnalysisSettings::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Reads a config file; relative input and output paths are taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::MissingInput {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut config = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.inputs.resolve(base);
        if config.out.is_relative() {
            config.out = base.join(&config.out);
        }
        Ok(config)
    }

    /// Range and type checks that serde cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        let check = |r: nanogrid_core::Result<()>| r.map_err(|e| CliError::Invalid(e.to_string()));
        check(self.battery.validate())?;
        check(self.tariff.validate())?;
        check(self.converters.topologies().map(drop))?;
        if !(self.pv.derate > 0.0 && self.pv.derate <= 1.0) {
            return Err(CliError::Invalid(format!(
                "pv derate must be in (0, 1], got {}",
                self.pv.derate
            )));
        }
        for a in &self.pv.arrays {
            check(a.validate())?;
        }
        if self.days == 0 {
            return Err(CliError::Invalid("days must be at least 1".into()));
        }
        Ok(())
    }

    /// Fails with exit code 2 on the first configured input that is missing.
    pub fn check_inputs_exist(&self) -> Result<(), CliError> {
        match self.inputs.paths().find(|p| !p.is_file()) {
            Some(p) => Err(CliError::MissingInput {
                path: p.to_path_buf(),
                message: "no such file".into(),
            }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_config_equals_defaults() {
        let parsed = ScenarioConfig::parse(DEFAULT_CONFIG, Path::new("default.toml")).unwrap();
        assert_eq!(parsed, ScenarioConfig::default());
    }

    #[test]
    fn empty_config_is_default() {
        assert_eq!(
            ScenarioConfig::parse("", Path::new("x.toml")).unwrap(),
            ScenarioConfig::default()
        );
    }

    #[test]
    fn overrides_and_typos() {
        let c = ScenarioConfig::parse(
            "topology = \"dc_ideal\"\n[battery]\nenergy_capacity_kwh = 10.0\n[converters.peak]\ninverter = 0.9\n[dispatch]\ncontrol_law = \"printed\"\n",
            Path::new("x.toml"),
        )
        .unwrap();
        assert_eq!(c.topology, TopologySelection::One(TopologyName::DcIdeal));
        assert_eq!(c.battery.energy_capacity_kwh, 10.0);
        assert_eq!(c.battery.power_capacity_kw, 12.5);
        assert_eq!(c.converters.peak.inverter, 0.9);
        assert!(ScenarioConfig::parse("[battery]\ncapacity = 3.0\n", Path::new("x.toml")).is_err());
        assert!(ScenarioConfig::parse("topology = \"hvdc\"\n", Path::new("x.toml")).is_err());
        assert!(
            ScenarioConfig::parse("[battery]\nefficiency = \"high\"\n", Path::new("x.toml"))
                .is_err()
        );
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let mut c = ScenarioConfig::default();
        c.battery.efficiency = 1.2;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::default();
        c.converters.peak.dc_dc = 0.0;
        assert!(c.validate().is_err());
        assert!(ScenarioConfig::default().validate().is_ok());
    }
}
