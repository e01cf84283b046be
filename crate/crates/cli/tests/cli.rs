use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn resum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resum"))
        .args(args)
        .env_remove("RESUM_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in report"))
        .parse()
        .unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn seq_reports_growth_index() {
    let dir = tempfile::tempdir().unwrap();
    let o = resum(&[
        "seq",
        fixture("gevrey1.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!((field(&report, "omega") - 1.0).abs() < 0.05);
    let table = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert!(table.starts_with("p,logM_p,m_p\n"));
    // m_p = p + 1 for p!
    let rows = csv_rows(&table);
    assert_eq!(rows.len(), 400);
    assert!(rows
        .iter()
        .all(|r| (r[2] - (r[0] + 1.0)).abs() < 1e-9 * r[2]));
    for name in ["diagnostics.csv", "growth_maps.csv"] {
        assert!(dir.path().join(name).is_file());
    }
}

#[test]
fn seq_surfaces_moderate_growth_failure() {
    let o = resum(&["seq", fixture("qpower2.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let out = stdout(&o);
    let mu = out.split("[axiom mu]").nth(1).unwrap();
    assert!(mu
        .lines()
        .nth(1)
        .unwrap()
        .contains("holds_to_depth = false"));
}

#[test]
fn malformed_spec_is_an_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "family = \"gevrey\"\nparams = [1.0\n").unwrap();
    let o = resum(&["seq", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = resum(&["seq", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn kernel_moments_match_factorials() {
    let dir = tempfile::tempdir().unwrap();
    let o = resum(&[
        "kernel",
        fixture("kernel_gevrey1.toml").to_str().unwrap(),
        "--depth",
        "12",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let moments = std::fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert!(moments.starts_with("p,m_p,quad_error\n"));
    let mut fact = 1.0;
    for (p, r) in csv_rows(&moments).iter().enumerate() {
        if p > 0 {
            fact *= p as f64;
        }
        assert_eq!(r[1], fact);
    }
    let report = std::fs::read_to_string(dir.path().join("validation.txt")).unwrap();
    assert!(report.contains("passed = true"));
}

#[test]
fn sum_euler_series() {
    let series = fixture("euler.csv");
    let args = [
        "sum",
        "--series",
        series.to_str().unwrap(),
        "--kernel",
        "gevrey:1",
        "--points",
        "0.05,0.1,0.2",
    ];
    let o = resum(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let csv = out
        .split("# report.txt")
        .next()
        .unwrap()
        .trim_start_matches("# sum.csv\n");
    assert!(csv.starts_with("z_re,z_im,sum_re,sum_im,err_est\n"));
    let rows = csv_rows(csv);
    assert!((rows[1][2] - 0.915633).abs() < 1e-6);
    assert!(out.contains("verdict: summable-in-d"));
    assert_eq!(resum(&args).stdout, o.stdout, "outputs differ between runs");

    let closed = resum(&[&args[..], &["--method", "closed:recip-1p"]].concat());
    assert_eq!(code(&closed), 0);
    let closed_rows = csv_rows(
        stdout(&closed)
            .split("# report.txt")
            .next()
            .unwrap()
            .trim_start_matches("# sum.csv\n"),
    );
    for (a, b) in rows.iter().zip(&closed_rows) {
        assert!((a[2] - b[2]).abs() < 1e-10);
    }
}

#[test]
fn sum_factorial_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("euler_fact.csv");
    // f_p = p!·a_p = (−1)^p p!²
    let mut text = String::from("p,re_a,im_a\n");
    let mut fact = 1.0f64;
    for p in 0..=20 {
        if p > 0 {
            fact *= p as f64;
        }
        text.push_str(&format!(
            "{p},{:e},0\n",
            if p % 2 == 0 { 1.0 } else { -1.0 } * fact * fact
        ));
    }
    std::fs::write(&file, text).unwrap();
    let out = dir.path().join("out");
    let o = resum(&[
        "sum",
        "--series",
        file.to_str().unwrap(),
        "--kernel",
        "classical:1",
        "--points",
        "0.1",
        "--normalization",
        "factorial",
        "--method",
        "pade:5,5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&std::fs::read_to_string(out.join("sum.csv")).unwrap());
    assert!((rows[0][2] - 0.915633).abs() < 1e-6);
}

#[test]
fn sum_failures_and_errors() {
    let series = fixture("euler.csv");
    let s = series.to_str().unwrap();
    let pole = resum(&[
        "sum",
        "--series",
        s,
        "--kernel",
        "gevrey:1",
        "--points",
        "-0.1",
        "--direction",
        "3.141592653589793",
    ]);
    assert_eq!(code(&pole), 2);
    let report = stdout(&pole);
    assert!(
        report.contains("verdict: not-certified") && report.contains("stage: continuation"),
        "{report}"
    );
    assert_eq!(
        code(&resum(&[
            "sum", "--series", s, "--kernel", "gevrey:1", "--points", "x"
        ])),
        1
    );
    assert_eq!(
        code(&resum(&[
            "sum", "--series", s, "--kernel", "bogus:1", "--points", "0.1"
        ])),
        1
    );
    assert_eq!(
        code(&resum(&[
            "sum", "--series", s, "--kernel", "gevrey:1", "--points", "0.1", "--method", "pade:3"
        ])),
        1
    );
    assert_eq!(
        code(&resum(&[
            "sum", "--series", s, "--kernel", "gevrey:1", "--points", "0.1", "--tol", "-1"
        ])),
        1
    );
}

#[test]
fn mpde_heat_problem() {
    let dir = tempfile::tempdir().unwrap();
    let heat = fixture("heat.toml");
    let o = resum(&[
        "mpde",
        heat.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("classification.txt")).unwrap();
    assert!(report.starts_with("verdict: divergent-summability-candidate\n"));
    let evidence = std::fs::read_to_string(dir.path().join("evidence.csv")).unwrap();
    assert!(evidence.starts_with("j,ratio_root,ineq27_slack,ineq28_slack\n"));
    let rows = csv_rows(&evidence);
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r[2] >= 0.0 && r[3] >= 0.0));

    let along = resum(&["mpde", heat.to_str().unwrap(), "--direction", "0"]);
    assert_eq!(code(&along), 2);
    assert!(stdout(&along).contains("solution not-certified, data fails"));
    let across = resum(&[
        "mpde",
        heat.to_str().unwrap(),
        "--direction",
        "1.5707963267948966",
    ]);
    assert_eq!(code(&across), 0);
    assert!(stdout(&across).contains("solution certified, data holds"));

    let transport = resum(&["mpde", fixture("transport.toml").to_str().unwrap()]);
    assert_eq!(code(&transport), 0);
    assert!(stdout(&transport).contains("verdict: convergent"));
}

#[test]
fn verify_suite_and_injected_moments() {
    let o = resum(&["verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("fail"));
    let bad = resum(&["verify", "--inject-wrong-moments"]);
    assert_eq!(code(&bad), 2);
    assert!(stdout(&bad).contains("fail formal-round-trip"));
}

#[test]
fn worker_count_from_environment() {
    let series = fixture("euler.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_resum"))
        .args([
            "sum",
            "--series",
            series.to_str().unwrap(),
            "--kernel",
            "gevrey:1",
            "--points",
            "0.1,0.2",
        ])
        .env("RESUM_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let bad = Command::new(env!("CARGO_BIN_EXE_resum"))
        .args(["verify"])
        .env("RESUM_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);
}
