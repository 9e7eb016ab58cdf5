use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_nanogrid");

fn nanogrid(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("NANOGRID_LOG")
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Hourly field samples for `days` days, both supplies, at a fixed outdoor
/// temperature per day.
fn field_csv(
    days: &[f64],
    ac_kw: impl Fn(usize, usize) -> f64,
    dc_kw: impl Fn(usize, usize) -> f64,
) -> String {
    let mut out = String::from("timestamp,supply,power_kw,t_out_c\n");
    for (supply, kw) in [
        ("ac", &ac_kw as &dyn Fn(usize, usize) -> f64),
        ("dc", &dc_kw),
    ] {
        for (day, t) in days.iter().enumerate() {
            for hour in 0..24 {
                out.push_str(&format!(
                    "2024-01-{:02}T{hour:02}:00:00-05:00,{supply},{},{t}\n",
                    day + 1,
                    kw(day, hour)
                ));
            }
        }
    }
    out
}

#[test]
fn missing_input_exits_2_and_names_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("scenario.toml");
    std::fs::write(
        &config,
        "[inputs]\nloads = \"nowhere/loads.csv\"\npv = \"nowhere/pv.csv\"\n",
    )
    .unwrap();
    let o = nanogrid(&[
        "simulate",
        "--config",
        s(&config),
        "--out",
        s(&tmp.path().join("out")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        text(&o.stderr).contains("nowhere/loads.csv"),
        "{}",
        text(&o.stderr)
    );
    assert!(!tmp.path().join("out").exists());

    let o = nanogrid(&["analyze", "--lab", "/no/such/lab.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("/no/such/lab.csv"));

    let o = nanogrid(&["simulate", "--config", s(&tmp.path().join("absent.toml"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(
        nanogrid(&["simulate", "--synth", "--topology", "dc_magic"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nanogrid(&["frobnicate"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    std::fs::write(&config, "[battery]\nefficiency = 1.5\n").unwrap();
    let o = nanogrid(&[
        "simulate",
        "--synth",
        "--config",
        s(&config),
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o.stderr));
}

#[test]
fn synthetic_year_reports_runtime_and_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = nanogrid(&[
        "simulate",
        "--synth",
        "--seed",
        "7",
        "--days",
        "365",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let stderr = text(&o.stderr);
    assert!(
        stderr.contains("simulated 8760 steps x 3 topologies in"),
        "{stderr}"
    );
    for topology in ["ac_baseline", "dc_retrofit", "dc_ideal"] {
        let flows = std::fs::read_to_string(out.join(topology).join("flows.csv")).unwrap();
        assert_eq!(flows.lines().count(), 8761);
        let bills = std::fs::read_to_string(out.join(topology).join("bills.csv")).unwrap();
        assert_eq!(bills.lines().count(), 13);
    }
}

#[test]
fn scenario_config_prints_ordered_bills() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("scenario");
    assert!(
        nanogrid(&["synth", "--seed", "4", "--days", "365", "--out", s(&dir)])
            .status
            .success()
    );
    let o = nanogrid(&[
        "simulate",
        "--config",
        s(&dir.join("scenario.toml")),
        "--topology",
        "all",
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let stdout = text(&o.stdout);
    let rows: Vec<(String, f64)> = stdout
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split_whitespace();
            (
                f.next().unwrap().to_string(),
                f.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    let names: Vec<&str> = rows.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["ac_baseline", "dc_retrofit", "dc_ideal"]);
    assert!(rows[0].1 >= rows[1].1 && rows[1].1 >= rows[2].1, "{stdout}");
    // Relative output directory resolves against the config file.
    assert!(dir.join("results/dc_ideal/bills.csv").is_file());

    let o = nanogrid(&[
        "simulate",
        "--config",
        s(&dir.join("scenario.toml")),
        "--topology",
        "dc_retrofit",
    ]);
    assert!(o.status.success());
    assert!(text(&o.stdout)
        .lines()
        .any(|l| l.starts_with("dc_retrofit")));
}

#[test]
fn mild_days_are_excluded_from_normalisation() {
    let tmp = tempfile::tempdir().unwrap();
    let field = tmp.path().join("field.csv");
    // 20.5 - 14 = 6.5 °C and 20.5 - 13 = 7.5 °C are at most 8; the rest are cold.
    let temps = [14.0, 13.0, 0.0, -5.0, 2.0, 5.0];
    std::fs::write(
        &field,
        field_csv(
            &temps,
            |d, h| 1.0 + 0.1 * d as f64 + 0.01 * h as f64,
            |d, h| 0.9 + 0.1 * d as f64 + 0.02 * h as f64,
        ),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = nanogrid(&["analyze", "--field", s(&field), "--out", s(&out)]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert!(
        text(&o.stdout).contains("daily: 12 days, 8 normalised, 4 excluded"),
        "{}",
        text(&o.stdout)
    );
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    let excluded = report.lines().filter(|l| l.ends_with(",excluded")).count();
    assert_eq!(excluded, 4, "{report}");
}

#[test]
fn identical_supplies_give_p_equal_one() {
    let tmp = tempfile::tempdir().unwrap();
    let field = tmp.path().join("field.csv");
    let power = |d: usize, h: usize| 0.8 + 0.05 * d as f64 + 0.03 * (h % 5) as f64;
    std::fs::write(
        &field,
        field_csv(&[0.0, -3.0, 4.0, 1.0, -8.0], power, power),
    )
    .unwrap();
    let o = nanogrid(&[
        "analyze",
        "--field",
        s(&field),
        "--out",
        s(&tmp.path().join("out")),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert!(
        text(&o.stdout).contains("t = 0.0000, df = 8.00, p = 1.0000"),
        "{}",
        text(&o.stdout)
    );
}

#[test]
fn compare_identical_and_mismatched_bills() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    std::fs::write(
        &a,
        "period,import_kwh,export_kwh,amount_usd\n2024-01,100,0,14\n2024-02,80,10,10.6\n",
    )
    .unwrap();
    std::fs::write(
        &b,
        "period,import_kwh,export_kwh,amount_usd\n2024-01,100,0,14\n2024-03,80,10,10.6\n",
    )
    .unwrap();

    let o = nanogrid(&["compare", s(&a), s(&a)]);
    assert!(o.status.success());
    assert!(
        text(&o.stdout).contains("savings: 0.0%"),
        "{}",
        text(&o.stdout)
    );

    let o = nanogrid(&["compare", s(&a), s(&b)]);
    assert_eq!(o.status.code(), Some(2));
    let stderr = text(&o.stderr);
    assert!(
        stderr.contains("2024-02") && stderr.contains("2024-03"),
        "{stderr}"
    );

    let o = nanogrid(&["compare", s(&a), s(&tmp.path().join("gone.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("gone.csv"));
}
