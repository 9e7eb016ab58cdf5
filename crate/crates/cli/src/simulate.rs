use std::io::Write;
use std::time::Instant;

use nanogrid_core::billing::{
    annual_summary, monthly_bills, savings_percent, AnnualSummary, BillStatement,
};
use nanogrid_core::converters::TopologyName;
use nanogrid_core::dispatch::{simulate_topologies, StepFlows};
use nanogrid_core::io::{
    bills_to_csv, columns, flows_to_csv, format_number, read_series, synth_scenario, AlignedSeries,
    GapPolicy, SeriesSchema,
};
use nanogrid_core::pvsolar::{pv_power, records_from_series};

use crate::config::{IndoorUnit, ScenarioConfig};
use crate::error::CliError;
use crate::output::OutputSet;

#[derive(Debug, Clone)]
pub struct TopologyRun {
    pub name: TopologyName,
    pub flows: Vec<StepFlows>,
    pub bills: Vec<BillStatement>,
    pub summary: AnnualSummary,
}

fn gap_policy(config: &ScenarioConfig) -> GapPolicy {
    match config.inputs.max_gap_steps {
        0 => GapPolicy::Fail,
        max_steps => GapPolicy::Interpolate { max_steps },
    }
}

/// Books the optional indoor-unit column onto the heat pump or the house and
/// drops it.
fn fold_indoor_unit(series: &mut AlignedSeries, unit: IndoorUnit) {
    let Some(indoor) = series.take_column(columns::INDOOR_POWER_KW) else {
        return;
    };
    let target = match unit {
        IndoorUnit::HeatPump => columns::HP_POWER_KW,
        IndoorUnit::House => columns::HOUSE_POWER_KW,
    };
    let values = series
        .column_mut(target)
        .expect("loads schema requires both load columns");
    for (v, i) in values.iter_mut().zip(indoor) {
        *v += i;
    }
}

/// Builds the aligned PV / heat-pump / house series the dispatch runs on,
/// either from the configured files or from the synthetic generator.
pub fn load_series(config: &ScenarioConfig, synth: bool) -> Result<AlignedSeries, CliError> {
    if synth {
        log::info!(
            "generating {} synthetic days from seed {}",
            config.days,
            config.seed
        );
        return Ok(synth_scenario(config.seed, config.days));
    }
    config.check_inputs_exist()?;
    let loads_path = config.inputs.loads.as_ref().ok_or_else(|| {
        CliError::Invalid("no loads file configured: set inputs.loads or pass --synth".into())
    })?;
    let gaps = gap_policy(config);
    let mut series = read_series(loads_path, &SeriesSchema::loads(), gaps)?;
    fold_indoor_unit(&mut series, config.indoor_unit);

    let pv = if let Some(path) = &config.inputs.pv {
        read_series(path, &SeriesSchema::pv(), gaps)?
    } else if let Some(path) = &config.inputs.irradiance {
        let irr = read_series(path, &SeriesSchema::irradiance(), gaps)?;
        let power = pv_power(
            &records_from_series(&irr)?,
            &config.pv.arrays,
            config.pv.derate,
        )?;
        AlignedSeries::new(irr.start, irr.timestep_h).with_column(columns::PV_DC_KW, power)?
    } else {
        return Err(CliError::Invalid(
            "no PV input configured: set inputs.pv or inputs.irradiance".into(),
        ));
    };
    series.merge(&pv)?;
    Ok(series)
}

/// Simulates and bills the requested topologies plus the AC baseline that
/// savings are measured against. Results come back in canonical order.
pub fn run(config: &ScenarioConfig, series: &AlignedSeries) -> Result<Vec<TopologyRun>, CliError> {
    let mut names = config.topology.names();
    if !names.contains(&TopologyName::AcBaseline) {
        names.insert(0, TopologyName::AcBaseline);
    }
    let topologies = names
        .iter()
        .map(|&n| config.converters.topology(n))
        .collect::<nanogrid_core::Result<Vec<_>>>()?;
    let house = series.require(columns::HOUSE_POWER_KW)?;
    let runs = simulate_topologies(series, &topologies, &config.battery, &config.dispatch)?;
    runs.into_iter()
        .map(|(name, flows)| {
            let bills = monthly_bills(&flows, house, &config.tariff, series.timestep_h)?;
            let summary = annual_summary(&bills);
            Ok(TopologyRun {
                name,
                flows,
                bills,
                summary,
            })
        })
        .collect()
}

/// Annual bill per topology and savings against the AC baseline, both
/// unrounded and to one decimal.
pub fn summary_table(runs: &[TopologyRun]) -> Result<String, CliError> {
    let baseline = runs
        .iter()
        .find(|r| r.name == TopologyName::AcBaseline)
        .map(|r| r.summary.annual_usd)
        .ok_or_else(|| CliError::Invalid("summary needs the ac_baseline run".into()))?;
    let mut out = format!(
        "{:<12} {:>14} {:>14} {:>14} {:>22} {:>8}\n",
        "topology", "annual_usd", "import_kwh", "export_kwh", "savings_pct", "rounded"
    );
    for r in runs {
        let pct = savings_percent(baseline, r.summary.annual_usd)?;
        out.push_str(&format!(
            "{:<12} {:>14} {:>14} {:>14} {:>22} {:>7.1}%\n",
            r.name.as_str(),
            format_number(r.summary.annual_usd),
            format_number(r.summary.import_kwh),
            format_number(r.summary.export_kwh),
            pct,
            pct
        ));
    }
    Ok(out)
}

pub fn cmd_simulate(
    config: &ScenarioConfig,
    synth: bool,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    config.validate()?;
    let series = load_series(config, synth)?;
    log::info!(
        "{} steps of {} h from {}",
        series.len(),
        series.timestep_h,
        series.start
    );

    let started = Instant::now();
    let runs = run(config, &series)?;
    let elapsed = started.elapsed();

    let selected = config.topology.names();
    let mut outputs = OutputSet::new();
    for r in runs.iter().filter(|r| selected.contains(&r.name)) {
        let dir = config.out.join(r.name.as_str());
        outputs.write(&dir.join("flows.csv"), &flows_to_csv(&r.flows)?)?;
        outputs.write(&dir.join("bills.csv"), &bills_to_csv(&r.bills)?)?;
    }
    let table = summary_table(&runs)?;
    stdout
        .write_all(table.as_bytes())
        .map_err(|e| CliError::Invalid(format!("writing summary: {e}")))?;
    let files = outputs.commit();
    eprintln!(
        "simulated {} steps x {} topologies in {:.3} s; wrote {} files under {}",
        series.len(),
        runs.len(),
        elapsed.as_secs_f64(),
        files.len(),
        config.out.display()
    );
    Ok(())
}
