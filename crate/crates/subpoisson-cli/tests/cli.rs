//! End-to-end CLI behavior: output formats, exit codes, report files.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subpoisson"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn subpoisson")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn moment_examples() {
    let out = run(&["moment", "--poisson", "1", "-k", "4"]);
    assert_eq!(code(&out), 0);
    let lines: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines[0], "15");
    assert_eq!(lines[1], "1.50000000000000000000000000000e1");

    let out = run(&["moment", "--binomial", "2", "0.5", "-k", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().next().unwrap(), "3/2");

    let out = run(&["moment", "--poisson", "2", "-k", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().next().unwrap(), "1");

    let out = run(&["moment", "--bernoulli-sum", "1/2,1/2", "-k", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().next().unwrap(), "3/2");
}

#[test]
fn bound_values() {
    let out = run(&["bound", "theorem1", "-k", "1", "--mu", "1"]);
    assert_eq!(code(&out), 0);
    assert!(
        stdout(&out).contains("value=1.44269504088896340735992468100e0"),
        "{}",
        stdout(&out)
    );

    let out = run(&["bound", "corollary", "-k", "2", "--mu", "8"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("corollary_poly"), "{text}");
    assert!(text.contains("value=1.26562500000000000000000000000e0"), "{text}");
    assert!(text.contains("corollary_exp"), "{text}");

    let out = run(&["bound", "theorem1", "-k", "3", "--mu", "2", "--raw"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("raw_log_value="), "{}", stdout(&out));

    // overflow marker for huge k
    let out = run(&["bound", "corollary", "-k", "10000", "--mu", "0.01"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("value=overflow"), "{}", stdout(&out));

    // vacuous binomial lower bound is flagged
    let out = run(&[
        "bound", "binomial-lower", "-k", "4", "--mu", "1.5", "--n", "3", "--p", "1/2",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("[vacuous"), "{}", stdout(&out));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["bound", "latala", "-k", "3", "--mu", "1"])), 2);
    assert_eq!(code(&run(&["bound", "nonsense", "-k", "1", "--mu", "1"])), 2);
    assert_eq!(code(&run(&["verify", "nonsense"])), 2);
    assert_eq!(code(&run(&["--nonsense"])), 2);
    assert_eq!(
        code(&run(&["sweep", "--k", "1:2:4:lin", "--mu", "1", "--bounds", ""])),
        2
    );
    assert_eq!(code(&run(&["moment", "-k", "2"])), 2);
}

#[test]
fn domain_errors_exit_1() {
    assert_eq!(code(&run(&["moment", "--poisson", "0", "-k", "2"])), 1);
    assert_eq!(code(&run(&["moment", "--binomial", "5", "1.5", "-k", "2"])), 1);
    assert_eq!(
        code(&run(&["bound", "latala", "-k", "3", "--mu", "1", "-c", "2", "-C", "3"])),
        1
    );
    // integer-only bound with fractional k
    assert_eq!(
        code(&run(&["bound", "poisson-lower", "-k", "2.5", "--mu", "1"])),
        1
    );
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "logs",
        "--grid",
        "1e-3:1e3:50:log",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("log_sandwich: PASS"));
    let json = std::fs::read_to_string(dir.path().join("log_sandwich.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in [
        "check_name",
        "grid",
        "tolerance",
        "worst_margin",
        "worst_point",
        "passed",
    ] {
        assert!(parsed.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(parsed["passed"], serde_json::Value::Bool(true));
    // margins carry 30 significant digits
    let margin = parsed["worst_margin"].as_str().unwrap();
    let digits: usize = margin
        .trim_start_matches('-')
        .split('e')
        .next()
        .unwrap()
        .chars()
        .filter(|c| c.is_ascii_digit())
        .count();
    assert!(digits >= 30, "margin {margin} carries {digits} digits");
    let csv = std::fs::read_to_string(dir.path().join("log_sandwich.csv")).unwrap();
    assert!(csv.starts_with("schema_version,check,"), "{csv}");
    assert_eq!(csv.lines().count(), 51); // header + 50 points
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn verify_out_dir_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", "logs", "--grid", "1e-2:1e2:20:log"])
        .env("SUBPOISSON_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("log_sandwich.json").exists());
}

#[test]
fn verify_conjecture_is_report_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "conjecture",
        "--grid",
        "0.5:4:4:lin",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("conjecture_sweep: PASS"));
}

#[test]
fn sweep_exact_overlay_matches_bell_numbers() {
    let out = run(&[
        "sweep",
        "--k",
        "1:8:8:lin",
        "--mu",
        "1",
        "--bounds",
        "theorem1,berend-tassa",
        "--dist",
        "poisson:1",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "schema_version,check,k,mu,ratio,exact_log,theorem1_log,theorem1_margin,berend-tassa_log,berend-tassa_margin"
    );
    let bells = [1f64, 2.0, 5.0, 15.0, 52.0, 203.0, 877.0, 4140.0];
    for (row, bell) in lines.zip(bells) {
        let fields: Vec<&str> = row.split(',').collect();
        let exact_log: f64 = fields[5].parse().unwrap();
        assert!(
            (exact_log - bell.ln()).abs() < 1e-12,
            "{row} vs bell {bell}"
        );
        // berend-tassa at mu = 1 is tight: margin ~ 0
        let margin: f64 = fields[9].parse().unwrap();
        assert!(margin.abs() < 1e-30, "{row}");
    }
}

#[test]
fn sweep_svg_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("plot.svg");
    let out = run(&[
        "sweep",
        "--k",
        "1:20:20:lin",
        "--mu",
        "1",
        "--bounds",
        "theorem1,corollary-poly,corollary-exp",
        "--dist",
        "poisson:1",
        "--out",
        dir.path().join("sweep.csv").to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<?xml version=\"1.0\""));
    assert!(svg.contains("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.trim_end().ends_with("</svg>"));
    // one polyline per series: exact + 3 bounds
    assert_eq!(svg.matches("<polyline").count(), 4);
    // angle brackets balance
    assert_eq!(svg.matches('<').count(), svg.matches('>').count());
}

#[test]
fn sweep_binomial_lower_requires_binomial_dist() {
    let out = run(&["sweep", "--k", "1:4:4:lin", "--mu", "1", "--bounds", "binomial-lower"]);
    assert_eq!(code(&out), 2);
    // with the distribution, the classic chain example appears in the rows
    let out = run(&[
        "sweep",
        "--k",
        "2",
        "--mu",
        "5",
        "--bounds",
        "binomial-lower",
        "--dist",
        "binomial:10:1/2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let log: f64 = fields[6].parse().unwrap();
    assert!((log - 1.09f64.ln()).abs() < 1e-14, "{row}");
}

#[test]
fn dobinski_cap_requires_explicit_bits() {
    let out = run(&["bound", "conjecture", "-k", "20000", "--mu", "1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}
