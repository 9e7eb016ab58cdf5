use std::io::Write;
use std::path::Path;

use nanogrid_core::billing::{annual_summary, savings_percent};
use nanogrid_core::io::{format_number, read_bills};

use crate::error::CliError;

/// Prints both annual totals, the absolute saving and the percentage saved
/// by `variant` relative to `baseline`. Both files must bill the same months.
pub fn cmd_compare(
    baseline: &Path,
    variant: &Path,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    for p in [baseline, variant] {
        if !p.is_file() {
            return Err(CliError::MissingInput {
                path: p.to_path_buf(),
                message: "no such file".into(),
            });
        }
    }
    let a = read_bills(baseline)?;
    let b = read_bills(variant)?;
    let periods = |bills: &[nanogrid_core::billing::BillStatement]| {
        let mut p: Vec<String> = bills.iter().map(|x| x.period.clone()).collect();
        p.sort();
        p
    };
    let (pa, pb) = (periods(&a), periods(&b));
    if pa != pb {
        let only_a: Vec<_> = pa.iter().filter(|p| !pb.contains(p)).cloned().collect();
        let only_b: Vec<_> = pb.iter().filter(|p| !pa.contains(p)).cloned().collect();
        return Err(CliError::Invalid(format!(
            "billing periods differ: only in {}: [{}]; only in {}: [{}]",
            baseline.display(),
            only_a.join(", "),
            variant.display(),
            only_b.join(", ")
        )));
    }
    let (sa, sb) = (annual_summary(&a), annual_summary(&b));
    let pct = savings_percent(sa.annual_usd, sb.annual_usd)?;
    let text = format!(
        "baseline {}: {} USD over {} months\n\
         variant  {}: {} USD over {} months\n\
         saving: {:.1} USD ({} USD)\n\
         savings: {:.1}% ({}%)\n",
        baseline.display(),
        format_number(sa.annual_usd),
        a.len(),
        variant.display(),
        format_number(sb.annual_usd),
        b.len(),
        sa.annual_usd - sb.annual_usd,
        sa.annual_usd - sb.annual_usd,
        pct,
        pct
    );
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Invalid(format!("writing summary: {e}")))
}
