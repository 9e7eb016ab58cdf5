//! CSV ingestion and output, uniform-grid alignment and synthetic scenarios.
//!
//! Timestamps are ISO-8601 with an explicit UTC offset. A series keeps the
//! offset of its first row; calendar months and days are computed in it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, FixedOffset, SecondsFormat};

use crate::analysis::{FieldSample, SteadyStateTestRecord, Supply};
use crate::billing::BillStatement;
use crate::dispatch::StepFlows;
use crate::error::{Error, Result};

mod synth;

pub use synth::{synth_field, synth_scenario};

/// Column names used across the input and output files.
pub mod columns {
    pub const TIMESTAMP: &str = "timestamp";
    pub const HP_POWER_KW: &str = "hp_power_kw";
    pub const HOUSE_POWER_KW: &str = "house_power_kw";
    pub const INDOOR_POWER_KW: &str = "indoor_power_kw";
    pub const PV_DC_KW: &str = "pv_dc_kw";
    pub const T_OUT_C: &str = "t_out_c";
    pub const GHI: &str = "ghi_w_m2";
    pub const DNI: &str = "dni_w_m2";
    pub const DHI: &str = "dhi_w_m2";
    pub const ZENITH: &str = "zenith_deg";
    pub const AZIMUTH: &str = "azimuth_deg";
}

/// Equal-length named columns on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSeries {
    pub start: DateTime<FixedOffset>,
    pub timestep_h: f64,
    columns: Vec<(String, Vec<f64>)>,
}

impl AlignedSeries {
    pub fn new(start: DateTime<FixedOffset>, timestep_h: f64) -> Self {
        Self {
            start,
            timestep_h,
            columns: Vec::new(),
        }
    }

    pub fn with_column(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        self.push_column(name, values)?;
        Ok(self)
    }

    pub fn push_column(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if self.columns.iter().any(|(n, _)| n == name) {
            return Err(Error::Misaligned(format!("duplicate column '{name}'")));
        }
        if let Some((first, v)) = self.columns.first() {
            if v.len() != values.len() {
                return Err(Error::Misaligned(format!(
                    "column '{name}' has {} rows but '{first}' has {}",
                    values.len(),
                    v.len()
                )));
            }
        }
        self.columns.push((name.to_string(), values));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |(_, v)| v.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn column_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        self.columns
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_mut_slice())
    }

    /// Removes a column and returns its values.
    pub fn take_column(&mut self, name: &str) -> Option<Vec<f64>> {
        let pos = self.columns.iter().position(|(n, _)| n == name)?;
        Some(self.columns.remove(pos).1)
    }

    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.column(name)
            .ok_or_else(|| Error::Misaligned(format!("series has no '{name}' column")))
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn timestep(&self) -> Duration {
        Duration::milliseconds((self.timestep_h * 3_600_000.0).round() as i64)
    }

    pub fn timestamp(&self, k: usize) -> DateTime<FixedOffset> {
        self.start + self.timestep() * k as i32
    }

    pub fn timestamps(&self) -> impl Iterator<Item = DateTime<FixedOffset>> + '_ {
        (0..self.len()).map(|k| self.timestamp(k))
    }

    /// Copies the columns of `other` into `self`. Both must share the grid.
    pub fn merge(&mut self, other: &AlignedSeries) -> Result<()> {
        if other.start != self.start
            || other.len() != self.len()
            || (other.timestep_h - self.timestep_h).abs() > 1e-12
        {
            return Err(Error::Misaligned(format!(
                "grids differ: {} x {} @ {} h vs {} x {} @ {} h",
                self.start,
                self.len(),
                self.timestep_h,
                other.start,
                other.len(),
                other.timestep_h
            )));
        }
        for (name, values) in &other.columns {
            self.push_column(name, values.clone())?;
        }
        Ok(())
    }
}

/// What to do with missing steps in a time series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapPolicy {
    /// Linearly fill runs of at most `max_steps` missing steps; fail on longer.
    Interpolate {
        max_steps: usize,
    },
    Fail,
}

impl Default for GapPolicy {
    fn default() -> Self {
        GapPolicy::Interpolate { max_steps: 3 }
    }
}

/// Expected columns of a time-series file.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSchema {
    pub name: &'static str,
    pub required: Vec<&'static str>,
    pub optional: Vec<&'static str>,
    /// Accept any extra numeric column.
    pub open: bool,
}

impl SeriesSchema {
    pub fn loads() -> Self {
        Self {
            name: "loads",
            required: vec![columns::HP_POWER_KW, columns::HOUSE_POWER_KW],
            optional: vec![columns::INDOOR_POWER_KW, columns::T_OUT_C],
            open: false,
        }
    }

    pub fn irradiance() -> Self {
        Self {
            name: "irradiance",
            required: vec![
                columns::GHI,
                columns::DNI,
                columns::DHI,
                columns::ZENITH,
                columns::AZIMUTH,
            ],
            optional: vec![],
            open: false,
        }
    }

    pub fn pv() -> Self {
        Self {
            name: "pv",
            required: vec![columns::PV_DC_KW],
            optional: vec![],
            open: false,
        }
    }

    /// Any set of numeric columns after the timestamp.
    pub fn any() -> Self {
        Self {
            name: "series",
            required: vec![],
            optional: vec![],
            open: true,
        }
    }
}

/// Which dataset a file holds.
#[derive(Debug, Clone, PartialEq)]
pub enum Schema {
    Series(SeriesSchema),
    Lab,
    Field,
    Bills,
}

/// Parsed contents of a file.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Series(AlignedSeries),
    Lab(Vec<SteadyStateTestRecord>),
    Field(Vec<FieldSample>),
    Bills(Vec<BillStatement>),
}

pub fn read_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    Ok(match schema {
        Schema::Series(s) => Dataset::Series(read_series(path, s, GapPolicy::default())?),
        Schema::Lab => Dataset::Lab(read_lab(path)?),
        Schema::Field => Dataset::Field(read_field(path)?),
        Schema::Bills => Dataset::Bills(read_bills(path)?),
    })
}

fn schema_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn open(path: &Path) -> Result<Self> {
        let data = fs::read(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(data.as_slice());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| schema_err(path, 1, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                schema_err(path, line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, rec));
        }
        Ok(Self {
            path: path.to_path_buf(),
            header,
            rows,
        })
    }

    /// Checks the header against required/optional names and returns the
    /// index of every column present.
    fn check_header(&self, required: &[&str], optional: &[&str], open: bool) -> Result<()> {
        let mut seen = BTreeSet::new();
        for name in &self.header {
            if !seen.insert(name.as_str()) {
                return Err(schema_err(
                    &self.path,
                    1,
                    format!("duplicate column '{name}'"),
                ));
            }
            if !open && !required.contains(&name.as_str()) && !optional.contains(&name.as_str()) {
                return Err(schema_err(
                    &self.path,
                    1,
                    format!("unknown column '{name}'"),
                ));
            }
        }
        for name in required {
            if !seen.contains(name) {
                return Err(schema_err(
                    &self.path,
                    1,
                    format!("missing column '{name}'"),
                ));
            }
        }
        Ok(())
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn err(&self, line: u64, message: impl Into<String>) -> Error {
        schema_err(&self.path, line, message)
    }

    fn number(&self, line: u64, rec: &csv::StringRecord, idx: usize) -> Result<f64> {
        let raw = rec.get(idx).unwrap_or("");
        let v: f64 = raw.parse().map_err(|_| {
            self.err(
                line,
                format!("column '{}': cannot parse '{raw}'", self.header[idx]),
            )
        })?;
        if !v.is_finite() {
            return Err(self.err(
                line,
                format!("column '{}': non-finite value", self.header[idx]),
            ));
        }
        Ok(v)
    }

    /// Like `number` but an empty cell is a missing value.
    fn maybe_number(&self, line: u64, rec: &csv::StringRecord, idx: usize) -> Result<f64> {
        if rec.get(idx).unwrap_or("").is_empty() {
            Ok(f64::NAN)
        } else {
            self.number(line, rec, idx)
        }
    }

    fn timestamp(
        &self,
        line: u64,
        rec: &csv::StringRecord,
        idx: usize,
    ) -> Result<DateTime<FixedOffset>> {
        let raw = rec.get(idx).unwrap_or("");
        DateTime::parse_from_rfc3339(raw).map_err(|e| {
            self.err(
                line,
                format!("timestamp '{raw}' is not ISO-8601 with an offset: {e}"),
            )
        })
    }
}

/// Power and irradiance columns that cannot go below zero.
const NON_NEGATIVE: [&str; 7] = [
    columns::HP_POWER_KW,
    columns::HOUSE_POWER_KW,
    columns::INDOOR_POWER_KW,
    columns::PV_DC_KW,
    columns::GHI,
    columns::DNI,
    columns::DHI,
];

/// Reads a time-series file onto a uniform grid, applying the gap policy.
pub fn read_series(
    path: impl AsRef<Path>,
    schema: &SeriesSchema,
    gaps: GapPolicy,
) -> Result<AlignedSeries> {
    let table = Table::open(path.as_ref())?;
    let mut required = vec![columns::TIMESTAMP];
    required.extend(&schema.required);
    table.check_header(&required, &schema.optional, schema.open)?;
    let ts_idx = table.index(columns::TIMESTAMP).expect("checked");
    let value_cols: Vec<(usize, &str)> = table
        .header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != ts_idx)
        .map(|(i, n)| (i, n.as_str()))
        .collect();
    if table.rows.is_empty() {
        return Err(table.err(1, "no data rows"));
    }

    let mut stamps = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let ts = table.timestamp(*line, rec, ts_idx)?;
        if let Some((prev_line, prev)) = stamps.last() {
            if ts == *prev {
                return Err(table.err(
                    *line,
                    format!("duplicate timestamp {ts} (first seen on line {prev_line})"),
                ));
            }
            if ts < *prev {
                return Err(table.err(*line, format!("timestamp {ts} goes backwards")));
            }
        }
        stamps.push((*line, ts));
    }

    // The grid step is the most common interval (the smaller one on ties),
    // so isolated gaps and stray rows cannot redefine it.
    let mut counts: BTreeMap<Duration, usize> = BTreeMap::new();
    for w in stamps.windows(2) {
        *counts.entry(w[1].1 - w[0].1).or_default() += 1;
    }
    let step = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map_or_else(|| Duration::hours(1), |(d, _)| *d);
    let step_ms = step.num_milliseconds();
    if step_ms <= 0 {
        return Err(table.err(stamps[0].0, "timestep below one millisecond"));
    }
    let start = stamps[0].1;
    let offset = *start.offset();

    // Slot index of every row on the uniform grid.
    let mut slots = Vec::with_capacity(stamps.len());
    for (line, ts) in &stamps {
        let ms = (*ts - start).num_milliseconds();
        if ms % step_ms != 0 {
            return Err(table.err(
                *line,
                format!("timestamp {ts} is off the {} ms grid", step_ms),
            ));
        }
        slots.push((ms / step_ms) as usize);
    }
    let len = slots.last().copied().unwrap_or(0) + 1;

    let mut series = AlignedSeries::new(start.with_timezone(&offset), step_ms as f64 / 3_600_000.0);
    for (idx, name) in value_cols {
        let mut values = vec![f64::NAN; len];
        for ((line, rec), &slot) in table.rows.iter().zip(&slots) {
            let v = table.maybe_number(*line, rec, idx)?;
            if v < 0.0 && NON_NEGATIVE.contains(&name) {
                return Err(table.err(*line, format!("column '{name}': negative value {v}")));
            }
            values[slot] = v;
        }
        fill_gaps(&mut values, gaps, |slot| {
            let line = slots
                .iter()
                .position(|&s| s >= slot)
                .map_or(0, |i| table.rows[i].0);
            (line, name.to_string())
        })
        .map_err(|(line, msg)| table.err(line, msg))?;
        series.push_column(name, values)?;
    }
    Ok(series)
}

fn fill_gaps(
    values: &mut [f64],
    policy: GapPolicy,
    locate: impl Fn(usize) -> (u64, String),
) -> std::result::Result<(), (u64, String)> {
    let max_steps = match policy {
        GapPolicy::Interpolate { max_steps } => max_steps,
        GapPolicy::Fail => 0,
    };
    let mut k = 0;
    while k < values.len() {
        if !values[k].is_nan() {
            k += 1;
            continue;
        }
        let begin = k;
        while k < values.len() && values[k].is_nan() {
            k += 1;
        }
        let run = k - begin;
        let (line, column) = locate(begin);
        if begin == 0 || k == values.len() {
            return Err((
                line,
                format!("column '{column}': missing value at the series edge"),
            ));
        }
        if run > max_steps {
            return Err((
                line,
                format!("column '{column}': gap of {run} steps exceeds the limit of {max_steps}"),
            ));
        }
        let (left, right) = (values[begin - 1], values[k]);
        for (j, v) in values[begin..k].iter_mut().enumerate() {
            let w = (j + 1) as f64 / (run + 1) as f64;
            *v = left + (right - left) * w;
        }
    }
    Ok(())
}

fn parse_supply(table: &Table, line: u64, raw: &str) -> Result<Supply> {
    raw.parse()
        .map_err(|_| table.err(line, format!("supply must be 'ac' or 'dc', got '{raw}'")))
}

const LAB_REQUIRED: [&str; 6] = [
    "test_label",
    "supply",
    "thermal_capacity_kw",
    "indoor_power_kw",
    "outdoor_power_kw",
    "total_power_kw",
];
const LAB_OPTIONAL: [&str; 2] = ["air_side_kw", "refrigerant_side_kw"];

pub fn read_lab(path: impl AsRef<Path>) -> Result<Vec<SteadyStateTestRecord>> {
    let table = Table::open(path.as_ref())?;
    table.check_header(&LAB_REQUIRED, &LAB_OPTIONAL, false)?;
    let idx = |n: &str| table.index(n);
    let [label, supply, cap, indoor, outdoor, total] =
        LAB_REQUIRED.map(|n| idx(n).expect("checked"));
    let (air, refr) = (idx(LAB_OPTIONAL[0]), idx(LAB_OPTIONAL[1]));
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let line = *line;
        let opt = |i: Option<usize>| -> Result<Option<f64>> {
            match i {
                Some(i) if !rec.get(i).unwrap_or("").is_empty() => {
                    table.number(line, rec, i).map(Some)
                }
                _ => Ok(None),
            }
        };
        let record = SteadyStateTestRecord {
            test_label: rec.get(label).unwrap_or("").to_string(),
            supply: parse_supply(&table, line, rec.get(supply).unwrap_or(""))?,
            thermal_capacity_kw: table.number(line, rec, cap)?,
            indoor_power_kw: table.number(line, rec, indoor)?,
            outdoor_power_kw: table.number(line, rec, outdoor)?,
            total_power_kw: table.number(line, rec, total)?,
            air_side_kw: opt(air)?,
            refrigerant_side_kw: opt(refr)?,
        };
        if record.test_label.is_empty() {
            return Err(table.err(line, "empty test_label"));
        }
        if [
            record.thermal_capacity_kw,
            record.indoor_power_kw,
            record.outdoor_power_kw,
            record.total_power_kw,
        ]
        .iter()
        .any(|v| *v < 0.0)
        {
            return Err(table.err(line, "lab powers and capacity must be non-negative"));
        }
        out.push(record);
    }
    Ok(out)
}

const FIELD_COLUMNS: [&str; 4] = ["timestamp", "supply", "power_kw", "t_out_c"];

/// Field samples. Rows of one supply must be strictly increasing in time;
/// the AC and DC campaigns may interleave or overlap.
pub fn read_field(path: impl AsRef<Path>) -> Result<Vec<FieldSample>> {
    let table = Table::open(path.as_ref())?;
    table.check_header(&FIELD_COLUMNS, &[], false)?;
    let [ts, supply, power, t_out] = FIELD_COLUMNS.map(|n| table.index(n).expect("checked"));
    let mut last: [Option<DateTime<FixedOffset>>; 2] = [None, None];
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let line = *line;
        let timestamp = table.timestamp(line, rec, ts)?;
        let supply = parse_supply(&table, line, rec.get(supply).unwrap_or(""))?;
        let slot = &mut last[supply as usize];
        if let Some(prev) = slot {
            if timestamp == *prev {
                return Err(table.err(line, format!("duplicate timestamp {timestamp}")));
            }
            if timestamp < *prev {
                return Err(table.err(line, format!("timestamp {timestamp} goes backwards")));
            }
        }
        *slot = Some(timestamp);
        out.push(FieldSample {
            timestamp,
            supply,
            power_kw: table.number(line, rec, power)?,
            t_out_c: table.number(line, rec, t_out)?,
        });
    }
    Ok(out)
}

const BILL_COLUMNS: [&str; 4] = ["period", "import_kwh", "export_kwh", "amount_usd"];

pub fn read_bills(path: impl AsRef<Path>) -> Result<Vec<BillStatement>> {
    let table = Table::open(path.as_ref())?;
    table.check_header(&BILL_COLUMNS, &[], false)?;
    let [period, imp, exp, amount] = BILL_COLUMNS.map(|n| table.index(n).expect("checked"));
    let mut out: Vec<BillStatement> = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let line = *line;
        let label = rec.get(period).unwrap_or("").to_string();
        if label.is_empty() {
            return Err(table.err(line, "empty period"));
        }
        if out.iter().any(|b| b.period == label) {
            return Err(table.err(line, format!("duplicate period '{label}'")));
        }
        let bill = BillStatement {
            period: label,
            import_kwh: table.number(line, rec, imp)?,
            export_kwh: table.number(line, rec, exp)?,
            amount_usd: table.number(line, rec, amount)?,
        };
        if bill.import_kwh < 0.0 || bill.export_kwh < 0.0 {
            return Err(table.err(line, "import/export energy must be non-negative"));
        }
        out.push(bill);
    }
    Ok(out)
}

/// Formats `v` rounded to 9 significant digits, in the shortest decimal
/// form that parses back to the same double.
pub fn format_number(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() {
            "0".into()
        } else {
            v.to_string()
        };
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

pub fn format_timestamp(ts: &DateTime<FixedOffset>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, false)
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename,
/// so an interrupted write never leaves a truncated output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::io("<memory>", e.into_error()))
}

pub fn series_to_csv(series: &AlignedSeries) -> Result<Vec<u8>> {
    let mut header = vec![columns::TIMESTAMP];
    header.extend(series.column_names());
    let rows = (0..series.len()).map(|k| {
        let mut row = vec![format_timestamp(&series.timestamp(k))];
        row.extend(series.columns.iter().map(|(_, v)| format_number(v[k])));
        row
    });
    csv_bytes(&header, rows)
}

pub fn write_series(path: impl AsRef<Path>, series: &AlignedSeries) -> Result<()> {
    write_atomic(path.as_ref(), &series_to_csv(series)?)
}

pub const FLOW_COLUMNS: [&str; 11] = [
    "timestamp",
    "s",
    "d",
    "u",
    "b",
    "x",
    "p",
    "loss_pv",
    "loss_batt",
    "loss_hp",
    "loss_house",
];

pub fn flows_to_csv(flows: &[StepFlows]) -> Result<Vec<u8>> {
    let rows = flows.iter().map(|f| {
        let mut row = vec![format_timestamp(&f.timestamp)];
        row.extend(
            [
                f.s,
                f.d,
                f.u,
                f.b,
                f.x_next,
                f.p,
                f.losses.pv,
                f.losses.battery,
                f.losses.heat_pump,
                f.losses.house,
            ]
            .map(format_number),
        );
        row
    });
    csv_bytes(&FLOW_COLUMNS, rows)
}

pub fn write_flows(path: impl AsRef<Path>, flows: &[StepFlows]) -> Result<()> {
    write_atomic(path.as_ref(), &flows_to_csv(flows)?)
}

pub fn bills_to_csv(bills: &[BillStatement]) -> Result<Vec<u8>> {
    let rows = bills.iter().map(|b| {
        vec![
            b.period.clone(),
            format_number(b.import_kwh),
            format_number(b.export_kwh),
            format_number(b.amount_usd),
        ]
    });
    csv_bytes(&BILL_COLUMNS, rows)
}

pub fn write_bills(path: impl AsRef<Path>, bills: &[BillStatement]) -> Result<()> {
    write_atomic(path.as_ref(), &bills_to_csv(bills)?)
}

pub fn lab_to_csv(records: &[SteadyStateTestRecord]) -> Result<Vec<u8>> {
    let with_balance = records
        .iter()
        .any(|r| r.air_side_kw.is_some() || r.refrigerant_side_kw.is_some());
    let mut header = LAB_REQUIRED.to_vec();
    if with_balance {
        header.extend(LAB_OPTIONAL);
    }
    let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    let rows = records.iter().map(|r| {
        let mut row = vec![
            r.test_label.clone(),
            r.supply.to_string(),
            format_number(r.thermal_capacity_kw),
            format_number(r.indoor_power_kw),
            format_number(r.outdoor_power_kw),
            format_number(r.total_power_kw),
        ];
        if with_balance {
            row.push(opt(r.air_side_kw));
            row.push(opt(r.refrigerant_side_kw));
        }
        row
    });
    csv_bytes(&header, rows)
}

pub fn field_to_csv(samples: &[FieldSample]) -> Result<Vec<u8>> {
    let rows = samples.iter().map(|s| {
        vec![
            format_timestamp(&s.timestamp),
            s.supply.to_string(),
            format_number(s.power_kw),
            format_number(s.t_out_c),
        ]
    });
    csv_bytes(&FIELD_COLUMNS, rows)
}
