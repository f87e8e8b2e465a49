//! Acceptance: determinism of the full verification run. Running
//! `verify all` twice with identical configuration (precision, workers,
//! seed, samples) must produce byte-identical JSON and CSV outputs.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn run_verify_all(out_dir: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_subpoisson"))
        .args([
            "verify",
            "all",
            "--workers",
            "4",
            "--seed",
            "12345",
            "--bits",
            "113",
            "--samples",
            "1000000",
            "--out",
        ])
        .arg(out_dir)
        .status()
        .expect("spawn subpoisson");
    assert!(status.success(), "verify all failed");
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut map = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name().into_string().unwrap();
        map.insert(name, std::fs::read(entry.path()).unwrap());
    }
    map
}

#[test]
fn criterion_13_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run1 = dir.path().join("run1");
    let run2 = dir.path().join("run2");
    run_verify_all(&run1);
    run_verify_all(&run2);
    let a = dir_contents(&run1);
    let b = dir_contents(&run2);
    assert_eq!(
        a.keys().collect::<Vec<_>>(),
        b.keys().collect::<Vec<_>>(),
        "file sets differ"
    );
    let mut identical = true;
    for (name, bytes) in &a {
        if b[name] != *bytes {
            identical = false;
            eprintln!("file {name} differs between runs");
        }
    }
    let json_count = a.keys().filter(|k| k.ends_with(".json")).count();
    let csv_count = a.keys().filter(|k| k.ends_with(".csv")).count();
    println!(
        "ACCEPTANCE 13 determinism: {} ({json_count} JSON + {csv_count} CSV files byte-identical \
         across two `verify all` runs; {:.2}s)",
        if identical { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    assert!(identical);
    assert!(json_count >= 10 && csv_count >= 10, "suite looks truncated");
}
