use std::path::{Path, PathBuf};

use chrono::{Duration, FixedOffset, TimeZone};
use nanogrid_core::billing::BillStatement;
use nanogrid_core::io::{
    bills_to_csv, columns, field_to_csv, format_number, read_bills, read_field, read_lab,
    read_series, series_to_csv, synth_field, AlignedSeries, GapPolicy, SeriesSchema,
};
use nanogrid_core::Error;
use proptest::prelude::*;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn read_by_prefix(path: &Path) -> nanogrid_core::Result<()> {
    let name = path.file_name().unwrap().to_str().unwrap();
    match name.split("__").next().unwrap() {
        "loads" => read_series(path, &SeriesSchema::loads(), GapPolicy::default()).map(drop),
        "lab" => read_lab(path).map(drop),
        "field" => read_field(path).map(drop),
        "bills" => read_bills(path).map(drop),
        other => panic!("fixture {name}: unknown reader '{other}'"),
    }
}

#[test]
fn invalid_corpus_is_rejected_with_a_location() {
    let mut entries: Vec<_> = std::fs::read_dir(fixtures().join("invalid"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    assert!(entries.len() >= 20);
    for path in entries {
        match read_by_prefix(&path) {
            Err(Error::Schema {
                path: p,
                line,
                message,
            }) => {
                assert!(
                    p.ends_with(path.file_name().unwrap().to_str().unwrap()),
                    "{p}"
                );
                assert!(line >= 1, "{}: no line for '{message}'", path.display());
            }
            Err(other) => panic!("{}: unexpected error kind {other}", path.display()),
            Ok(()) => panic!("{} was accepted", path.display()),
        }
    }
}

#[test]
fn missing_file_names_the_path() {
    let err = read_lab("/definitely/not/here.csv").unwrap_err();
    assert!(err.to_string().contains("/definitely/not/here.csv"));
}

#[test]
fn short_gaps_are_interpolated() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("loads.csv");
    std::fs::write(
        &path,
        "timestamp,hp_power_kw,house_power_kw\n\
         2024-01-01T00:00:00-05:00,1.0,0.5\n\
         2024-01-01T01:00:00-05:00,,0.5\n\
         2024-01-01T04:00:00-05:00,4.0,2.0\n",
    )
    .unwrap();
    let s = read_series(&path, &SeriesSchema::loads(), GapPolicy::default()).unwrap();
    assert_eq!(s.len(), 5);
    assert_eq!(
        s.column(columns::HP_POWER_KW).unwrap(),
        [1.0, 1.75, 2.5, 3.25, 4.0]
    );
    assert_eq!(
        s.column(columns::HOUSE_POWER_KW).unwrap(),
        [0.5, 0.5, 1.0, 1.5, 2.0]
    );
    assert!(read_series(&path, &SeriesSchema::loads(), GapPolicy::Fail).is_err());
}

#[test]
fn number_format_is_stable() {
    assert_eq!(format_number(0.0), "0");
    assert_eq!(format_number(-0.0), "0");
    assert_eq!(format_number(1.5), "1.5");
    assert_eq!(format_number(0.1 + 0.2), "0.3");
    assert_eq!(format_number(2168.244212345), "2168.24421");
    assert_eq!(format_number(-1.0e-7), "-0.0000001");
}

#[test]
fn field_and_bills_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let field = synth_field(3, 2);
    let path = tmp.path().join("field.csv");
    std::fs::write(&path, field_to_csv(&field).unwrap()).unwrap();
    let back = read_field(&path).unwrap();
    assert_eq!(back.len(), field.len());
    for (a, b) in field.iter().zip(&back) {
        assert_eq!(a.timestamp, b.timestamp);
        assert_eq!(a.supply, b.supply);
        assert!((a.power_kw - b.power_kw).abs() <= 1e-8 * (1.0 + a.power_kw.abs()));
    }

    let bills = vec![
        BillStatement {
            period: "2024-01".into(),
            import_kwh: 100.0,
            export_kwh: 0.0,
            amount_usd: 14.0,
        },
        BillStatement {
            period: "2024-02".into(),
            import_kwh: 0.0,
            export_kwh: 50.0,
            amount_usd: -7.0,
        },
    ];
    let path = tmp.path().join("bills.csv");
    std::fs::write(&path, bills_to_csv(&bills).unwrap()).unwrap();
    assert_eq!(read_bills(&path).unwrap(), bills);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_round_trips_through_csv(
        rows in prop::collection::vec((0.0..20.0f64, 0.0..10.0f64, -30.0..40.0f64), 1..100),
        offset_h in -12i32..=12,
        step_min in prop::sample::select(vec![15i64, 30, 60]),
    ) {
        let tz = FixedOffset::east_opt(offset_h * 3600).unwrap();
        let start = tz.with_ymd_and_hms(2024, 3, 9, 22, 0, 0).unwrap();
        let (hp, rest): (Vec<f64>, Vec<(f64, f64)>) = rows.into_iter().map(|(a, b, c)| (a, (b, c))).unzip();
        let (house, t): (Vec<f64>, Vec<f64>) = rest.into_iter().unzip();
        let series = AlignedSeries::new(start, step_min as f64 / 60.0)
            .with_column(columns::HP_POWER_KW, hp)
            .and_then(|s| s.with_column(columns::HOUSE_POWER_KW, house))
            .and_then(|s| s.with_column(columns::T_OUT_C, t))
            .unwrap();
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("loads.csv");
        let bytes = series_to_csv(&series).unwrap();
        std::fs::write(&path, &bytes).unwrap();
        let back = read_series(&path, &SeriesSchema::loads(), GapPolicy::Fail).unwrap();
        prop_assert_eq!(back.start, series.start);
        prop_assert_eq!(back.len(), series.len());
        if series.len() > 1 {
            prop_assert_eq!(back.timestep(), Duration::minutes(step_min));
        }
        for name in [columns::HP_POWER_KW, columns::HOUSE_POWER_KW, columns::T_OUT_C] {
            for (a, b) in series.column(name).unwrap().iter().zip(back.column(name).unwrap()) {
                prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()));
            }
        }
        // Writing what was read reproduces the file byte for byte.
        prop_assert_eq!(series_to_csv(&back).unwrap(), bytes);
    }
}
