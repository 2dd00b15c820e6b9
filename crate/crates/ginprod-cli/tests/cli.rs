//! End-to-end CLI checks: CSV shape, exit codes, determinism, and the
//! documented numeric anchors.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ginprod"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("ginprod-cli-test-{}-{name}", std::process::id()));
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn ginprod")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"))
}

/// Data rows of a CSV (everything after the `#` manifest and the header).
fn data_rows(contents: &str) -> Vec<Vec<String>> {
    contents
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn manifest_lines(contents: &str) -> Vec<&str> {
    contents.lines().take_while(|l| l.starts_with('#')).collect()
}

#[test]
fn theory_two_steps_and_anchor_value() {
    let out = tmp("theory.csv");
    let st = run(&[
        "theory",
        "--alpha-min",
        "0.5",
        "--alpha-max",
        "2.0",
        "--steps",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success(), "{st:?}");
    let contents = read(&out);
    assert!(manifest_lines(&contents)
        .iter()
        .any(|l| l.starts_with("# command: theory")));
    let rows = data_rows(&contents);
    assert_eq!(rows.len(), 3);
    // middle row is alpha = 1: r close to 0.45
    let r: f64 = rows[1][3].parse().unwrap();
    assert!((r - 0.45).abs() < 0.01, "r(1) = {r}");
    // c column strictly increasing
    let cs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(cs.windows(2).all(|w| w[0] < w[1]));
    // endpoints exact
    assert_eq!(rows[0][0], "0.5");
    assert_eq!(rows[2][0], "2");
    std::fs::remove_file(&out).ok();
}

#[test]
fn theory_minimal_steps() {
    let out = tmp("theory2.csv");
    let st = run(&[
        "theory",
        "--alpha-min",
        "0.2",
        "--alpha-max",
        "5.0",
        "--steps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    assert_eq!(data_rows(&read(&out)).len(), 2);
    std::fs::remove_file(&out).ok();
}

#[test]
fn density_shape_and_mass() {
    let out = tmp("density.csv");
    let st = run(&[
        "density",
        "--alpha",
        "1.0",
        "--grid-points",
        "2001",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let rows = data_rows(&read(&out));
    assert_eq!(rows.len(), 2001);
    let lam: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let rho: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    // center row is lambda = 0 with rho = 0
    assert_eq!(lam[1000], 0.0);
    assert_eq!(rho[1000], 0.0);
    // symmetric rows match
    assert_eq!(rho[900], rho[1100]);
    assert_eq!(rho[0], rho[2000]);
    // trapezoid mass ~ 1
    let mass: f64 = (0..2000)
        .map(|i| 0.5 * (lam[i + 1] - lam[i]) * (rho[i] + rho[i + 1]))
        .sum();
    assert!((mass - 1.0).abs() < 1e-6, "mass = {mass}");
    std::fs::remove_file(&out).ok();
}

#[test]
fn exact_report_rows() {
    let out = tmp("exact.csv");
    let st = run(&[
        "exact", "--n", "2", "--m", "1", "--max-moment", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let contents = read(&out);
    let rows = data_rows(&contents);
    let get = |name: &str| -> f64 {
        rows.iter()
            .find(|r| r[0] == name)
            .unwrap_or_else(|| panic!("row {name}"))[1]
            .parse()
            .unwrap()
    };
    assert!((get("E") - std::f64::consts::SQRT_2).abs() < 1e-4);
    assert_eq!(get("M_0"), get("E"));
    assert_eq!(get("M_1"), 0.0);
    assert!((get("V_over_E") - (2.0 - 2.0f64.sqrt())).abs() < 1e-9);
    std::fs::remove_file(&out).ok();
}

#[test]
fn exact_deep_product() {
    let out = tmp("exact500.csv");
    let st = run(&[
        "exact", "--n", "4", "--m", "500", "--max-moment", "0", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let rows = data_rows(&read(&out));
    let e: f64 = rows[0][1].parse().unwrap();
    assert!((e - 4.0).abs() < 1e-3, "E = {e}");
    std::fs::remove_file(&out).ok();
}

#[test]
fn simulate_counts_even_and_deterministic() {
    let counts1 = tmp("c1.csv");
    let hist1 = tmp("h1.csv");
    let counts2 = tmp("c2.csv");
    let hist2 = tmp("h2.csv");
    let base = [
        "simulate", "--n", "10", "--m", "5", "--samples", "40", "--seed", "9",
    ];
    let st = bin()
        .args(base)
        .args(["--out-counts", counts1.to_str().unwrap()])
        .args(["--out-hist", hist1.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(st.status.success(), "{st:?}");
    // repeat with a different thread count: byte-identical files
    let st = bin()
        .args(base)
        .args(["--threads", "3"])
        .args(["--out-counts", counts2.to_str().unwrap()])
        .args(["--out-hist", hist2.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(st.status.success());
    let c1 = read(&counts1);
    let c2 = read(&counts2);
    // manifests differ in the threads parameter; data must not
    assert_eq!(data_rows(&c1), data_rows(&c2));
    assert_eq!(data_rows(&read(&hist1)), data_rows(&read(&hist2)));

    for row in data_rows(&c1) {
        let count: u64 = row[1].parse().unwrap();
        assert_eq!(count % 2, 0, "odd count in {row:?}");
    }
    // histogram density integrates to 1 over retained mass
    let hrows = data_rows(&read(&hist1));
    let mass: f64 = hrows
        .iter()
        .map(|r| {
            let lo: f64 = r[0].parse().unwrap();
            let hi: f64 = r[1].parse().unwrap();
            let d: f64 = r[3].parse().unwrap();
            (hi - lo) * d
        })
        .sum();
    assert!((mass - 1.0).abs() < 1e-9, "mass = {mass}");
    for f in [&counts1, &hist1, &counts2, &hist2] {
        std::fs::remove_file(f).ok();
    }
}

#[test]
fn simulate_same_seed_byte_identical() {
    let a = tmp("ca.csv");
    let ha = tmp("ha.csv");
    let b = tmp("cb.csv");
    let hb = tmp("hb.csv");
    for (c, h) in [(&a, &ha), (&b, &hb)] {
        let st = run(&[
            "simulate",
            "--n",
            "4",
            "--alpha",
            "1.0",
            "--samples",
            "25",
            "--seed",
            "123",
            "--out-counts",
            c.to_str().unwrap(),
            "--out-hist",
            h.to_str().unwrap(),
        ]);
        assert!(st.status.success());
    }
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&ha), read(&hb));
    // realized m recorded in the manifest
    assert!(read(&a).contains("# m: 4"));
    for f in [&a, &ha, &b, &hb] {
        std::fs::remove_file(f).ok();
    }
}

#[test]
fn compare_report_contents() {
    let out = tmp("compare.csv");
    let st = run(&[
        "compare", "--n", "10", "--alpha", "1.0", "--samples", "60", "--seed", "4", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success(), "{st:?}");
    let contents = read(&out);
    let rows = data_rows(&contents);
    let get = |name: &str| -> f64 {
        rows.iter().find(|r| r[0] == name).unwrap()[1].parse().unwrap()
    };
    // theory_c is a passthrough of the closed form at alpha = 1
    assert!((get("theory_c") - 0.5807214799493322).abs() < 1e-12);
    assert!(get("exact_E") > 0.0 && get("exact_V") > 0.0);
    assert!(get("z_mean").is_finite() && get("z_var").is_finite());
    // healthy run: the z-score of the mean is small
    assert!(get("z_mean").abs() < 4.0, "z_mean = {}", get("z_mean"));
    std::fs::remove_file(&out).ok();
}

#[test]
fn argument_errors_exit_one() {
    // unknown flag
    let st = run(&["theory", "--bogus", "1"]);
    assert_eq!(st.status.code(), Some(1));
    // inverted range
    let st = run(&[
        "theory", "--alpha-min", "10", "--alpha-max", "1", "--out", "/tmp/x.csv",
    ]);
    assert_eq!(st.status.code(), Some(1));
    // both alpha and m
    let st = run(&[
        "simulate", "--n", "4", "--alpha", "1", "--m", "2", "--out-counts", "/tmp/a.csv",
        "--out-hist", "/tmp/b.csv",
    ]);
    assert_eq!(st.status.code(), Some(1));
    // neither alpha nor m
    let st = run(&[
        "simulate", "--n", "4", "--out-counts", "/tmp/a.csv", "--out-hist", "/tmp/b.csv",
    ]);
    assert_eq!(st.status.code(), Some(1));
    // odd n
    let st = run(&["exact", "--n", "3", "--m", "1", "--out", "/tmp/x.csv"]);
    assert_eq!(st.status.code(), Some(1));
    // even grid
    let st = run(&["density", "--alpha", "1", "--grid-points", "10", "--out", "/tmp/x.csv"]);
    assert_eq!(st.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_two_without_partial_file() {
    let out = "/nonexistent-dir-ginprod/out.csv";
    let st = run(&[
        "theory", "--alpha-min", "0.5", "--alpha-max", "2.0", "--steps", "2", "--out", out,
    ]);
    assert_eq!(st.status.code(), Some(2));
    assert!(!Path::new(out).exists());
}

#[test]
fn threads_env_variable_is_default() {
    let out_c = tmp("env-c.csv");
    let out_h = tmp("env-h.csv");
    let st = bin()
        .env("GINPROD_THREADS", "2")
        .args([
            "simulate",
            "--n",
            "4",
            "--m",
            "1",
            "--samples",
            "10",
            "--seed",
            "1",
            "--out-counts",
            out_c.to_str().unwrap(),
            "--out-hist",
            out_h.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(st.status.success());
    assert!(read(&out_c).contains("# threads: 2"));
    // invalid env value is an argument error
    let st = bin()
        .env("GINPROD_THREADS", "soup")
        .args([
            "simulate",
            "--n",
            "4",
            "--m",
            "1",
            "--samples",
            "10",
            "--seed",
            "1",
            "--out-counts",
            out_c.to_str().unwrap(),
            "--out-hist",
            out_h.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(1));
    for f in [&out_c, &out_h] {
        std::fs::remove_file(f).ok();
    }
}

#[test]
fn simulate_histogram_tracks_limit_density() {
    // N = m = 50 with 200 samples, 25 bins: the histogram from the CSV must
    // sit within sup-norm 0.12 of the limiting density at alpha = 1
    let out_c = tmp("fig-c.csv");
    let out_h = tmp("fig-h.csv");
    let st = run(&[
        "simulate",
        "--n",
        "50",
        "--alpha",
        "1.0",
        "--samples",
        "200",
        "--seed",
        "1",
        "--bins",
        "25",
        "--out-counts",
        out_c.to_str().unwrap(),
        "--out-hist",
        out_h.to_str().unwrap(),
    ]);
    assert!(st.status.success(), "{st:?}");
    let mut sup = 0.0f64;
    for row in data_rows(&read(&out_h)) {
        let lo: f64 = row[0].parse().unwrap();
        let hi: f64 = row[1].parse().unwrap();
        let density: f64 = row[3].parse().unwrap();
        let center = 0.5 * (lo + hi);
        sup = sup.max((density - ginprod::theory::density_limit(center, 1.0)).abs());
    }
    assert!(sup <= 0.12, "sup-norm = {sup}");
    for f in [&out_c, &out_h] {
        std::fs::remove_file(f).ok();
    }
}

#[test]
fn csv_layout_manifest_then_header_then_data() {
    let out = tmp("layout.csv");
    let st = run(&[
        "theory", "--alpha-min", "1", "--alpha-max", "2", "--steps", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let contents = read(&out);
    let lines: Vec<&str> = contents.lines().collect();
    let n_manifest = manifest_lines(&contents).len();
    assert!(n_manifest >= 4);
    assert_eq!(lines[n_manifest], "alpha,c,s,r");
    assert!(!contents.contains('\r'), "LF endings only");
    assert!(lines.len() == n_manifest + 3);
    std::fs::remove_file(&out).ok();
}
