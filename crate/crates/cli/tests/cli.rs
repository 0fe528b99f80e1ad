//! End-to-end tests of the command line interface: exit codes, printed
//! summaries, artifact structure, and reproducibility.

use assert_cmd::Command;
use predicates::prelude::*;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cli() -> Command {
    Command::cargo_bin("lca-tiling").unwrap()
}

#[test]
fn verify_tiling_reports_k() {
    cli()
        .args(["verify-tiling", "--region", &fixture("omega2.json"), "--lattice", &fixture("lattice_z.json")])
        .assert()
        .success()
        .stdout(predicate::str::contains("k=2"));
}

#[test]
fn verify_tiling_non_tiling_exits_2_with_profile() {
    cli()
        .args(["verify-tiling", "--region", &fixture("omega_three_halves.json"), "--lattice", &fixture("lattice_z.json")])
        .assert()
        .code(2)
        .stdout(predicate::str::contains("multiplicity 1: measure 1/2"))
        .stdout(predicate::str::contains("multiplicity 2: measure 1/2"));
}

#[test]
fn converse_impossible_exits_2() {
    cli()
        .args(["converse", "--region", &fixture("omega_three_halves.json"), "--lattice", &fixture("lattice_z.json"), "-k", "2"])
        .assert()
        .code(2)
        .stdout(predicate::str::contains("impossible"));
}

#[test]
fn converse_possible_exits_0() {
    cli()
        .args(["converse", "--region", &fixture("omega2.json"), "--lattice", &fixture("lattice_z.json"), "-k", "2"])
        .assert()
        .success()
        .stdout(predicate::str::contains("possible"));
}

#[test]
fn frame_bounds_orthogonal_pair_is_tight() {
    let dir = tempdir();
    let out = dir.join("cert.json");
    cli()
        .args([
            "frame-bounds",
            "--region", &fixture("omega2.json"),
            "--lattice", &fixture("lattice_z.json"),
            "--tuple", &fixture("tuple_half.json"),
            "--out", out.to_str().unwrap(),
        ])
        .assert()
        .success();
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let a = doc["result"]["A"].as_f64().unwrap();
    let b = doc["result"]["B"].as_f64().unwrap();
    assert!((a - 2.0).abs() < 1e-12, "A = {a}");
    assert!((b - 2.0).abs() < 1e-12, "B = {b}");
    // the manifest is echoed into the artifact
    assert_eq!(doc["manifest"]["subcommand"], "frame-bounds");
}

#[test]
fn counterexample_csv_has_zero_row_at_n_2() {
    let assert = cli()
        .args(["counterexample", "--nmax", "6", "--gap", "1/2"])
        .assert()
        .success();
    let out = String::from_utf8(assert.get_output().stdout.clone()).unwrap();
    assert!(out.contains("n,sigma_min_sq"));
    assert!(out.lines().any(|l| l == "2,0"), "no exact-zero row at n=2:\n{out}");
    assert!(out.starts_with("running minimum") || out.contains("# manifest"));
}

#[test]
fn missing_input_exits_1() {
    cli()
        .args(["verify-tiling", "--region", "/nonexistent/omega.json", "--lattice", &fixture("lattice_z.json")])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("cannot read"));
}

#[test]
fn malformed_json_exits_1() {
    let dir = tempdir();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    cli()
        .args(["verify-tiling", "--region", bad.to_str().unwrap(), "--lattice", &fixture("lattice_z.json")])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("malformed JSON"));
}

#[test]
fn find_tuple_exhaustion_exits_3() {
    // no tuple can push the lower fiber bound above k, so tol = 5 must fail
    cli()
        .args([
            "find-tuple",
            "--lattice", &fixture("lattice_z.json"),
            "--region", &fixture("omega2.json"),
            "--tol", "5.0",
            "--max-tries", "5",
        ])
        .assert()
        .code(3)
        .stderr(predicate::str::contains("exhausted"));
}

#[test]
fn find_tuple_universal_over_two_regions() {
    cli()
        .args([
            "find-tuple",
            "--lattice", &fixture("lattice_z.json"),
            "--region", &fixture("omega2.json"),
            "--region", &fixture("omega_split.json"),
            "--seed", "7",
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("found a universal 2-tuple"));
}

#[test]
fn density_of_half_integer_cosets_is_2() {
    cli()
        .args(["density", "--lattice", &fixture("lattice_z.json"), "--tuple", &fixture("tuple_half.json")])
        .assert()
        .success()
        .stdout(predicate::str::contains("density = 2"));
}

#[test]
fn lift_doubles_the_character_count() {
    cli()
        .args([
            "lift",
            "--region", &fixture("quotient_region.json"),
            "--tuple", &fixture("base_tuple.json"),
            "--kernel", &fixture("kernel_t2.json"),
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("lifted 2 base characters to 4 characters"));
}

#[test]
fn sampling_set_density_within_epsilon() {
    cli()
        .args(["build-sampling-set", "--region", &fixture("omega1.json"), "--epsilon", "1/4"])
        .assert()
        .success()
        .stdout(predicate::str::contains("density = 5/4"));
}

#[test]
fn identical_runs_produce_byte_identical_artifacts() {
    let dir = tempdir();
    let out1 = dir.join("run1.json");
    let out2 = dir.join("run2.json");
    for out in [&out1, &out2] {
        cli()
            .args([
                "build-sampling-set",
                "--region", &fixture("omega1.json"),
                "--epsilon", "1/4",
                "--seed", "11",
                "--out", out.to_str().unwrap(),
            ])
            .assert()
            .success();
    }
    let a = std::fs::read(&out1).unwrap();
    let mut b = std::fs::read(&out2).unwrap();
    // the artifacts embed their own output path, which differs; normalize it
    let b_text = String::from_utf8(b.clone()).unwrap().replace("run2.json", "run1.json");
    b = b_text.into_bytes();
    assert_eq!(a, b);
}

#[test]
fn oracle_check_small_batch_passes() {
    cli()
        .args(["oracle-check", "--count", "10", "--seed", "5"])
        .assert()
        .success()
        .stdout(predicate::str::contains("worst deviation"));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("lca-tiling-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
