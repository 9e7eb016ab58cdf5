use std::io::Write;

use nanogrid_core::analysis::report::analyze;
use nanogrid_core::io::{read_field, read_lab};

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::output::OutputSet;

pub fn cmd_analyze(config: &ScenarioConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.validate()?;
    config.check_inputs_exist()?;
    let (lab_path, field_path) = (&config.inputs.lab, &config.inputs.field);
    if lab_path.is_none() && field_path.is_none() {
        return Err(CliError::Invalid(
            "nothing to analyze: set inputs.lab and/or inputs.field (or pass --lab/--field)".into(),
        ));
    }
    let lab = lab_path
        .as_ref()
        .map(read_lab)
        .transpose()?
        .unwrap_or_default();
    let field = field_path
        .as_ref()
        .map(read_field)
        .transpose()?
        .unwrap_or_default();
    log::info!("{} lab records, {} field samples", lab.len(), field.len());

    let report = analyze(&lab, &field, &config.analysis)?;
    let mut outputs = OutputSet::new();
    let path = config.out.join("report.csv");
    outputs.write(&path, &report.to_csv()?)?;

    let mut text = String::new();
    for (label, supply, cop) in &report.cops {
        text.push_str(&format!("cop {label:<6} {supply}  {cop:.4}\n"));
    }
    let kept = report
        .daily
        .iter()
        .filter(|d| d.normalized_kw_per_c.is_some())
        .count();
    if !report.daily.is_empty() {
        text.push_str(&format!(
            "daily: {} days, {} normalised, {} excluded\n",
            report.daily.len(),
            kept,
            report.daily.len() - kept
        ));
    }
    if let Some(w) = &report.welch {
        text.push_str(&format!(
            "welch ac vs dc: t = {:.4}, df = {:.2}, p = {:.4}\n",
            w.t_statistic, w.degrees_of_freedom, w.p_value
        ));
    }
    for (label, fits) in [
        ("hourly", &report.hourly_fits),
        ("daily", &report.daily_fits),
    ] {
        for (supply, fit) in fits {
            text.push_str(&format!(
                "fit {label} {supply}: degree {}, R^2 = {:.4}, n = {}\n",
                fit.degree(),
                fit.r_squared,
                fit.n
            ));
        }
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Invalid(format!("writing summary: {e}")))?;
    outputs.commit();
    eprintln!("wrote {}", path.display());
    Ok(())
}
