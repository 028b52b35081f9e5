use std::path::Path;
use std::process::{Command, Output};

use medrx::output::parse_csv;

fn medrx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medrx"))
        .args(args)
        .env_remove("MEDRX_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let t = parse_csv(text).unwrap();
    let i = t.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    t.rows.iter().map(|r| r[i].clone()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(medrx(&["--help"]).status.code(), Some(0));
    assert_eq!(medrx(&["--version"]).status.code(), Some(0));
    assert_eq!(medrx(&["nosuch"]).status.code(), Some(2));
    assert_eq!(medrx(&["link-budget", "--freq", "abc"]).status.code(), Some(2));
    let bad = medrx(&["link-budget", "--dist", "-3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("distance"));
    assert_eq!(medrx(&["lna", "--bias", "0.3"]).status.code(), Some(1));
    assert_eq!(medrx(&["npath-sim", "--samples-per-lo", "8"]).status.code(), Some(1));
}

#[test]
fn link_budget_path_loss() {
    let o = medrx(&["link-budget"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let l = num(&column(&text, "fspl_db")[0]);
    assert!((l - 34.11).abs() < 0.05);
    let o = medrx(&["link-budget", "--rate", "300e3", "--nf", "23.2", "--detector", "coherent-threshold"]);
    let text = stdout(&o);
    let s = num(&column(&text, "sensitivity_dbm")[0]);
    assert!((s - (-174.0 + 10.0 * 300e3f64.log10() + 12.810122525649541 + 23.2)).abs() < 1e-9);
}

#[test]
fn provenance_header() {
    let text = stdout(&medrx(&["--seed", "42", "mixer", "--preset", "eq4"]));
    let t = parse_csv(&text).unwrap();
    let joined = t.comments.join("\n");
    assert!(joined.contains("tool: medrx"));
    assert!(joined.contains("seed: 42"));
    assert!(joined.contains("schema: mixer-eq4/1"));
    let hash = t.comments.iter().find_map(|c| c.strip_prefix("config_hash: ")).unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
}

#[test]
fn every_subcommand_emits_parseable_csv() {
    let runs: &[&[&str]] = &[
        &["link-budget"],
        &["lna"],
        &["lna", "--preset", "fig3"],
        &["lna", "--preset", "fig4"],
        &["mixer", "--preset", "eq4"],
        &["mixer", "--preset", "fig7"],
        &["mixer", "--preset", "fig8"],
        &["npath-sim", "--paths", "4", "--duration", "100e-6"],
        &["ber", "--bits", "10000", "--snr-start", "8", "--snr-stop", "10"],
        &["explore", "--preset", "fig11"],
        &["explore", "--preset", "fig12"],
        &["explore", "--preset", "fig13"],
        &["explore", "--mode", "pareto"],
        &["explore", "--mode", "optimize"],
        &["report", "--preset", "high-rate"],
    ];
    for args in runs {
        let o = medrx(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let t = parse_csv(&stdout(&o)).unwrap();
        assert!(!t.rows.is_empty(), "{args:?}");
        assert!(t.rows.iter().all(|r| r.len() == t.columns.len()), "{args:?}");
    }
}

#[test]
fn json_format() {
    let o = medrx(&["--format", "json", "report"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["provenance"]["schema"], "report/1");
    assert!(v["config"]["calibration"].is_object());
    assert_eq!(v["rows"][0].as_array().unwrap().len(), v["columns"].as_array().unwrap().len());
}

#[test]
fn compliant_report_budget() {
    let text = stdout(&medrx(&["report", "--preset", "medradio-compliant"]));
    assert_eq!(column(&text, "status")[0], "feasible");
    let p = num(&column(&text, "total_power")[0]);
    let e = num(&column(&text, "energy_per_bit")[0]);
    let s = num(&column(&text, "sensitivity")[0]);
    assert!(p < 50e-6, "{p}");
    assert!(e < 100e-12, "{e}");
    assert!(s <= -83.0);
    let parts: f64 = ["lna_power", "divider_power", "mixer_drive_power"]
        .iter()
        .map(|c| num(&column(&text, c)[0]))
        .sum();
    assert!((parts - p).abs() < 1e-15);
}

#[test]
fn ber_sweep_columns() {
    let text = stdout(&medrx(&["--seed", "5", "ber", "--bits", "20000", "--snr-start", "6", "--snr-stop", "8"]));
    let t = parse_csv(&text).unwrap();
    assert_eq!(t.columns, ["snr_db", "bits", "errors", "ber", "ci_low", "ci_high", "detector", "seed"]);
    assert_eq!(t.rows.len(), 3);
    for r in &t.rows {
        let (lo, p, hi) = (num(&r[4]), num(&r[3]), num(&r[5]));
        assert!(lo <= p && p <= hi);
        assert_eq!(r[7], "5");
    }
}

#[test]
fn waveform_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wave.csv");
    let o = medrx(&[
        "npath-sim",
        "--waveform",
        path.to_str().unwrap(),
        "--paths",
        "2",
        "--offset",
        "50e6",
        "--duration",
        "400e-9",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(t.columns, ["t", "phase0", "phase1", "cap0", "cap1", "bb"]);
    for r in &t.rows {
        let on = [num(&r[1]), num(&r[2])].iter().filter(|&&v| v == 1.0).count();
        assert!(on <= 1);
    }
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("medrx.toml");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[defaults.link]\ndistance = 30.0\n");
    let via_flag = stdout(&medrx(&["--config", &cfg, "link-budget"]));
    let l = num(&column(&via_flag, "fspl_db")[0]);
    assert!((l - 54.107).abs() < 1e-3, "{l}");

    let o = Command::new(env!("CARGO_BIN_EXE_medrx"))
        .arg("link-budget")
        .env("MEDRX_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(stdout(&o), via_flag);

    let default = stdout(&medrx(&["link-budget"]));
    let hash = |t: &str| parse_csv(t).unwrap().comments.iter().find(|c| c.starts_with("config_hash")).cloned();
    assert_ne!(hash(&default), hash(&via_flag));

    let bad = write_config(dir.path(), "[defaults.link]\ndistanse = 3.0\n");
    assert_eq!(medrx(&["--config", &bad, "link-budget"]).status.code(), Some(1));
}

#[test]
fn config_axes_drive_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[[explorer.axes]]\npath = \"mixer.switch_width\"\nvalues = [5e-6, 10e-6, 20e-6]\n",
    );
    let text = stdout(&medrx(&["--config", &cfg, "explore", "--mode", "sweep"]));
    assert_eq!(parse_csv(&text).unwrap().rows.len(), 3);
}
