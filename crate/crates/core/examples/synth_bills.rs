//! Annual energy and bills of the three topologies on synthetic years.
//!
//! `cargo run --release -p nanogrid-core --example synth_bills -- [seeds]`

use nanogrid_core::battery::BatteryParams;
use nanogrid_core::billing::{annual_summary, monthly_bills, savings_percent, Tariff};
use nanogrid_core::converters::builtin_topologies;
use nanogrid_core::dispatch::{simulate_topologies, DispatchOptions};
use nanogrid_core::io::{columns, synth_scenario};

fn main() -> nanogrid_core::Result<()> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5);
    let params = BatteryParams::default();
    let topologies = builtin_topologies();
    for seed in 0..seeds {
        let series = synth_scenario(seed, 365);
        let sum = |c: &str| series.column(c).unwrap().iter().sum::<f64>();
        print!(
            "seed {seed:>3}: pv {:>7.0} hp {:>6.0} house {:>6.0} kWh |",
            sum(columns::PV_DC_KW),
            sum(columns::HP_POWER_KW),
            sum(columns::HOUSE_POWER_KW)
        );
        let house = series.column(columns::HOUSE_POWER_KW).unwrap();
        let runs = simulate_topologies(&series, &topologies, &params, &DispatchOptions::default())?;
        let mut annual = Vec::new();
        for (name, flows) in &runs {
            let bills = monthly_bills(flows, house, &Tariff::default(), 1.0)?;
            let s = annual_summary(&bills);
            print!(" {name} {:>8.2}", s.annual_usd);
            annual.push(s.annual_usd);
        }
        println!(
            " | retrofit {:>5.1}% ideal {:>5.1}%",
            savings_percent(annual[0], annual[1])?,
            savings_percent(annual[0], annual[2])?
        );
    }
    Ok(())
}
