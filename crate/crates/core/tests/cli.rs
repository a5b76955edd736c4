use std::path::{Path, PathBuf};
use std::process::Command;

use oamlink::cli::{self, EXIT_BOUNDARY, EXIT_CONFIG, EXIT_OK};
use oamlink::config::RunConfig;

const BIN: &str = env!("CARGO_BIN_EXE_oamlink");

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("oamlink-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn oamlink(dir: &Path, args: &[&str], workers: Option<&str>) -> (i32, String) {
    let mut c = Command::new(BIN);
    c.current_dir(dir).args(args).env_remove("OAMLINK_WORKERS");
    if let Some(w) = workers {
        c.env("OAMLINK_WORKERS", w);
    }
    let out = c.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn curve_has_schema_header_and_manifest() {
    let d = scratch("schema");
    let (code, _) = oamlink(&d, &["crosstalk-curve", "-s", "curve.r_ch_m=2,10", "-o", "c.csv"], None);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(d.join("c.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schema oamlink.crosstalk-curve/1 r_ch_m[m]"));
    assert_eq!(lines.next().unwrap(), "r_ch_m,ell_n,ell_j,method,C_watts,C_dBm,status");
    // 2 offsets x 3 methods x 4 pairs
    assert_eq!(lines.count(), 24);
    let manifest = std::fs::read_to_string(d.join("c.csv.manifest")).unwrap();
    for key in ["curve.r_ch_m = 2,10", "run.command = crosstalk-curve", "run.tool_version", "run.workers", "run.wall_time_s"] {
        assert!(manifest.contains(key), "missing {key}");
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let d = scratch("workers");
    let args = |out: &'static str| ["ber-curve", "--monte-carlo", "-s", "sweep.values=0.015,0.03", "-s", "mc.trials=20000", "-o", out];
    assert_eq!(oamlink(&d, &args("one.csv"), Some("1")).0, EXIT_OK);
    assert_eq!(oamlink(&d, &args("four.csv"), Some("4")).0, EXIT_OK);
    assert_eq!(std::fs::read(d.join("one.csv")).unwrap(), std::fs::read(d.join("four.csv")).unwrap());
    let m = std::fs::read_to_string(d.join("four.csv.manifest")).unwrap();
    assert!(m.contains("run.workers = 4") && m.contains("run.workers_source = OAMLINK_WORKERS"));
}

#[test]
fn manifest_replays_byte_identically() {
    let d = scratch("replay");
    assert_eq!(oamlink(&d, &["rank-modes", "-s", "rank.candidates=-2,1;-1,1;-4,-2|1,3", "-o", "a.csv"], None).0, EXIT_OK);
    assert_eq!(oamlink(&d, &["rank-modes", "-c", "a.csv.manifest", "-o", "b.csv"], None).0, EXIT_OK);
    assert_eq!(std::fs::read(d.join("a.csv")).unwrap(), std::fs::read(d.join("b.csv")).unwrap());
}

#[test]
fn exit_codes() {
    let d = scratch("exit");
    let (code, err) = oamlink(&d, &["optimize", "-s", "geometry.w0_mm=3"], None);
    assert_eq!(code, EXIT_CONFIG, "{err}");
    assert!(err.contains("unknown key"));
    assert_eq!(oamlink(&d, &["monte-carlo", "-s", "pointing.r_ch_m=4"], None).0, EXIT_CONFIG);
    assert_eq!(oamlink(&d, &["optimize", "-s", "geometry.w0_m=-1"], None).0, EXIT_CONFIG);
    assert_eq!(oamlink(&d, &["optimize"], Some("lots")).0, EXIT_CONFIG);
    assert_eq!(oamlink(&d, &["optimize", "-c", "missing.conf"], None).0, EXIT_CONFIG);
    // the 20 urad optimum sits near 1.76 cm, above this range
    let (code, _) = oamlink(&d, &["optimize", "-s", "optimize.w0_hi_m=0.014", "-o", "b.csv"], None);
    assert_eq!(code, EXIT_BOUNDARY);
    let text = std::fs::read_to_string(d.join("b.csv")).unwrap();
    assert!(text.lines().nth(2).unwrap().contains(",upper,"));
}

#[test]
fn library_run_matches_binary() {
    let d = scratch("lib");
    let mut cfg = RunConfig::parse(include_str!("../configs/default.conf")).unwrap();
    cfg.set_pair("sweep.values=0.02,0.03").unwrap();
    assert_eq!(cli::run(cli::Command::BerCurve { monte_carlo: false }, &cfg, &d.join("lib.csv")).unwrap(), EXIT_OK);
    assert_eq!(oamlink(&d, &["ber-curve", "-s", "sweep.values=0.02,0.03", "-o", "bin.csv"], None).0, EXIT_OK);
    assert_eq!(std::fs::read(d.join("lib.csv")).unwrap(), std::fs::read(d.join("bin.csv")).unwrap());
}

#[test]
fn ber_curve_over_offset_reports_conditional_values() {
    let mut cfg = RunConfig::parse(include_str!("../configs/default.conf")).unwrap();
    cfg.set_pair("sweep.axis=r_ch").unwrap();
    cfg.set_pair("sweep.values=2,5,10").unwrap();
    let t = cli::build(cli::Command::BerCurve { monte_carlo: false }, &cfg).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert!(t.notes.iter().any(|(k, v)| k == "quantity" && v == "ber_conditional"));
    let raw = t.column("ber_avg_raw").unwrap();
    let clamped = t.column("ber_avg_clamped").unwrap();
    for r in &t.rows {
        let v: f64 = r[raw].parse().unwrap();
        let c: f64 = r[clamped].parse().unwrap();
        assert!((0.0..=1.5).contains(&v) && c == v.min(0.5));
    }
}
