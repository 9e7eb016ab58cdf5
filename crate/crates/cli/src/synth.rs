use std::io::Write;

use nanogrid_core::io::{
    columns, field_to_csv, series_to_csv, synth_field, synth_scenario, AlignedSeries,
};

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::output::OutputSet;

/// Days in each of the synthetic AC and DC field campaigns.
pub const FIELD_DAYS: u32 = 30;

fn pick(series: &AlignedSeries, names: &[&str]) -> Result<AlignedSeries, CliError> {
    let mut out = AlignedSeries::new(series.start, series.timestep_h);
    for name in names {
        out.push_column(name, series.require(name)?.to_vec())?;
    }
    Ok(out)
}

/// Writes `loads.csv`, `pv.csv`, `field.csv` and a `scenario.toml` that
/// points at them.
pub fn cmd_synth(config: &ScenarioConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.validate()?;
    let series = synth_scenario(config.seed, config.days);
    let loads = pick(
        &series,
        &[
            columns::HP_POWER_KW,
            columns::HOUSE_POWER_KW,
            columns::T_OUT_C,
        ],
    )?;
    let pv = pick(&series, &[columns::PV_DC_KW])?;
    let field = synth_field(config.seed, FIELD_DAYS);

    let scenario = format!(
        "# Synthetic scenario: seed {}, {} days.\n\nout = \"results\"\n\n[inputs]\nloads = \"loads.csv\"\npv = \"pv.csv\"\nfield = \"field.csv\"\n",
        config.seed, config.days
    );
    let mut outputs = OutputSet::new();
    outputs.write(&config.out.join("loads.csv"), &series_to_csv(&loads)?)?;
    outputs.write(&config.out.join("pv.csv"), &series_to_csv(&pv)?)?;
    outputs.write(&config.out.join("field.csv"), &field_to_csv(&field)?)?;
    outputs.write(&config.out.join("scenario.toml"), scenario.as_bytes())?;
    let mut text = String::new();
    for f in outputs.files() {
        text.push_str(&format!("wrote {}\n", f.display()));
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Invalid(format!("writing summary: {e}")))?;
    outputs.commit();
    Ok(())
}
