//! Acceptance criterion 10: every stochastic subcommand reproduces
//! byte-identical artifacts under a fixed seed at thread counts 1, 4 and 8.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rfgeom")
}

fn run_with_threads(threads: usize, dir: &Path, args: &[&str], out_name: &str) -> Vec<u8> {
    let out = dir.join(out_name);
    let mut cmd = Command::new(bin());
    cmd.arg("--threads").arg(threads.to_string());
    cmd.args(args);
    cmd.arg("--out").arg(&out);
    let status = cmd.output().expect("spawn rfgeom");
    assert!(
        status.status.success(),
        "rfgeom {args:?} failed: {}",
        String::from_utf8_lossy(&status.stderr)
    );
    std::fs::read(&out).expect("artifact written")
}

#[test]
fn criterion_10_determinism_across_thread_counts() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut detail = String::new();

    // each stochastic subcommand with a fixed seed
    let cases: Vec<(&str, Vec<&str>)> = vec![
        (
            "simulate",
            vec![
                "simulate", "--kernel", "gaussian", "--N", "1", "--T", "6", "--sigma", "0.5,1.5",
                "--u", "2,2.5,3", "--reps", "300", "--seed", "42",
            ],
        ),
        (
            "lkc-rotation-mc",
            vec![
                "lkc", "rotation", "--N", "3", "--kernel", "gaussian", "--sigma", "1,2",
                "--domain", "rect:1,1,1", "--r-samples", "600", "--seed", "7",
            ],
        ),
        (
            "verify-domain",
            vec!["verify", "--suite", "domain", "--seed", "11"],
        ),
    ];
    for (name, args) in &cases {
        let one = run_with_threads(1, dir.path(), args, &format!("{name}-1.json"));
        let four = run_with_threads(4, dir.path(), args, &format!("{name}-4.json"));
        let eight = run_with_threads(8, dir.path(), args, &format!("{name}-8.json"));
        let identical = one == four && one == eight;
        pass &= identical;
        detail.push_str(&format!(
            "{name}: {}; ",
            if identical { "identical" } else { "DIVERGED" }
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "ACCEPTANCE 10 {}: {detail}[{elapsed:.2}s / budget 600s]",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{detail}");
}
