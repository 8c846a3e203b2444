use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gc_twin::io::{data_rows, read_header};

const MESH: &str = "12:96:240";

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gc-twin"))
        .args(args)
        .env("GC_TWIN_WORKERS", "1")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn text(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn header_value(text: &str, key: &str) -> Option<String> {
    read_header(text).into_iter().find(|(k, _)| k == key).map(|(_, v)| v)
}

#[test]
fn sweep_rows_match_grid_and_reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&["sweep", "--grid", "log:10e3:1e6:40", "--mesh", MESH, "--out", d.to_str().unwrap()]);
    }
    for f in ["sweep_link.csv", "sweep_metrics.csv"] {
        let t = text(&a, f);
        assert_eq!(t, text(&b, f), "{f} differs between runs");
        assert_eq!(data_rows(&t, f).unwrap().1.len(), 40);
        assert_eq!(header_value(&t, "placement").as_deref(), Some("Longitudinal"));
        assert_eq!(header_value(&t, "partial").as_deref(), Some("false"));
        assert!(header_value(&t, "scenario_sha256").is_some());
    }
}

#[test]
fn radial_sweep_is_tagged() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    ok(&["sweep", "--placement", "radial", "--grid", "lin:1e5:2e5:3", "--mesh", MESH, "--out", out]);
    let t = text(tmp.path(), "sweep_link.csv");
    assert_eq!(header_value(&t, "placement").as_deref(), Some("Radial"));
    assert_eq!(header_value(&t, "label").as_deref(), Some("Rad-AgCl-FoamGel"));
}

#[test]
fn failed_rows_give_nonzero_exit_and_flag_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    // too few axial cells across the discs: every frequency fails
    let o = run(&["sweep", "--grid", "lin:1e5:2e5:2", "--mesh", "12:96:120", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed"));
    let t = text(tmp.path(), "sweep_link.csv");
    assert_eq!(header_value(&t, "partial").as_deref(), Some("true"));
    assert_eq!(header_value(&t, "failed_rows").as_deref(), Some("2"));
}

#[test]
fn narrowband_table_has_one_row_per_configuration() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    ok(&["narrowband", "--grid", "log:1e4:1e6:5", "--mesh", MESH, "--out", out]);
    let t = text(tmp.path(), "narrowband.csv");
    let (header, rows) = data_rows(&t, "narrowband").unwrap();
    assert_eq!(header.len(), 7);
    assert_eq!(rows.len(), 8);
    let names: Vec<&str> = rows.iter().map(|(_, r)| r[0].as_str()).collect();
    assert_eq!(names.iter().filter(|n| n.starts_with("Long-") && n.ends_with("(d=10.0 cm)")).count(), 4);
    assert_eq!(names.iter().filter(|n| n.starts_with("Rad-") && n.ends_with("(d=7.0 cm)")).count(), 4);

    // a scenario file gives a single row
    let scen = tmp.path().join("s.toml");
    let exported = ok(&["scenario", "--placement", "radial"]);
    fs::write(&scen, &exported.stdout).unwrap();
    let one = tmp.path().join("one");
    ok(&[
        "narrowband",
        "--scenario",
        scen.to_str().unwrap(),
        "--grid",
        "log:1e4:1e6:5",
        "--mesh",
        MESH,
        "--out",
        one.to_str().unwrap(),
    ]);
    let t = text(&one, "narrowband.csv");
    assert_eq!(data_rows(&t, "narrowband").unwrap().1.len(), 1);
}

#[test]
fn wideband_reports_uncovered_bands_per_row() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "wideband",
        "--bands",
        "100e3,400e3,1.2e6",
        "--interfaces",
        "bare,foam-gel",
        "--grid",
        "log:1e4:1e6:24",
        "--mesh",
        MESH,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.matches("B=1200000").count(), 2, "{err}");
    let t = text(tmp.path(), "wideband.csv");
    let (_, rows) = data_rows(&t, "wideband").unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(header_value(&t, "fc_Hz").as_deref(), Some("500000"));
}

#[test]
fn sounding_is_reproducible_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = fixture("fixture_dt_longitudinal.csv");
    let run_seed = |dir: &str, seed: &str| {
        let d = tmp.path().join(dir);
        ok(&[
            "sound",
            "--channel",
            ch.to_str().unwrap(),
            "--repetitions",
            "2",
            "--seed",
            seed,
            "--out",
            d.to_str().unwrap(),
        ]);
        d
    };
    let (a, b, c) = (run_seed("a", "9"), run_seed("b", "9"), run_seed("c", "10"));
    for f in ["sound_trace.csv", "sound_cir.csv", "sound_tf.csv"] {
        assert_eq!(text(&a, f), text(&b, f), "{f}");
    }
    assert_ne!(text(&a, "sound_trace.csv"), text(&c, "sound_trace.csv"));
    let trace = text(&a, "sound_trace.csv");
    assert_eq!(data_rows(&trace, "trace").unwrap().1.len(), (1 << 14) - 1);
    assert_eq!(header_value(&trace, "seed").as_deref(), Some("9"));
}

#[test]
fn compare_with_itself_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let dt = fixture("fixture_dt_longitudinal.csv");
    let dt = dt.to_str().unwrap();
    ok(&["compare", "--twin", dt, "--measured", dt, "--out", tmp.path().to_str().unwrap()]);
    let t = text(tmp.path(), "compare.csv");
    let (_, rows) = data_rows(&t, "compare").unwrap();
    assert_eq!(rows.len(), 3);
    for (_, r) in rows {
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0, "{r:?}");
        assert!((r[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn calibrate_reports_a_known_gain_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dt_path = fixture("fixture_dt_longitudinal.csv");
    let dt = gc_twin::io::parse_response_csv(&fs::read_to_string(&dt_path).unwrap(), "dt").unwrap();
    let doubled = tmp.path().join("doubled.csv");
    fs::write(&doubled, gc_twin::sounding::response_csv(&dt.map(|v| v * 2.0))).unwrap();
    let o = ok(&[
        "calibrate",
        "--twin",
        dt_path.to_str().unwrap(),
        "--measured",
        doubled.to_str().unwrap(),
        "--calib-band",
        "20e3:60e3",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let t = text(tmp.path(), "calibrate.csv");
    let g: f64 = header_value(&t, "gain_error").unwrap().parse().unwrap();
    assert!((g - 2.0).abs() < 1e-12, "{g}");
    assert_eq!(header_value(&t, "calib_band_Hz").as_deref(), Some("20000:60000"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("gain error 2.000000"));
    assert_eq!(data_rows(&t, "calibrate").unwrap().1.len(), dt.len());
}

#[test]
fn compare_reproduces_the_fixture_attenuation_rmse() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&[
        "compare",
        "--twin",
        fixture("fixture_dt_longitudinal.csv").to_str().unwrap(),
        "--measured",
        fixture("fixture_measured_longitudinal.csv").to_str().unwrap(),
        "--label",
        "Longitudinal",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let t = text(tmp.path(), "compare.csv");
    assert_eq!(header_value(&t, "replicates").as_deref(), Some("40"));
    let (_, rows) = data_rows(&t, "compare").unwrap();
    let rmse: f64 = rows[0].1[2].parse().unwrap();
    assert!((rmse - 5.8497).abs() < 1e-3, "{rmse}");
}

#[test]
fn exports_round_trip() {
    let tissues = ok(&["tissues"]);
    let table = gc_twin::load_tissue_table(&String::from_utf8(tissues.stdout).unwrap()).unwrap();
    assert_eq!(table, gc_twin::TissueTable::builtin());

    let s = ok(&["scenario", "--placement", "radial"]);
    let text = String::from_utf8(s.stdout).unwrap();
    let parsed = gc_twin::parse_scenario(&text).unwrap();
    assert_eq!(parsed, gc_twin::Scenario::default_for(gc_twin::Placement::Radial));
}

#[test]
fn bad_inputs_fail_with_context() {
    let o = run(&["sweep", "--grid", "log:1e4:1e6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid spec"));

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "f_Hz,ReH,ImH\n1000,1,0\n2000,x,0\n").unwrap();
    let o = run(&["compare", "--twin", bad.to_str().unwrap(), "--measured", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.csv line 3"));

    let o = Command::new(env!("CARGO_BIN_EXE_gc-twin"))
        .arg("tissues")
        .env("GC_TWIN_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
