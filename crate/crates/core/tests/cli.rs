use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sato_tate::report::{sha256_hex, validate_report};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sato-tate"));
    cmd.env_remove("SATO_TATE_CACHE");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn coeffs_prints_delta_head() {
    let o = run(&["coeffs", "--preset", "c", "--n-max", "10", "--show", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("cache: disabled"));
    for line in ["a_1 = 1", "a_2 = -24", "a_6 = -6048", "a_10 = -115920"] {
        assert!(text.lines().any(|l| l == line), "missing {line}\n{text}");
    }
}

#[test]
fn coeffs_cache_hit_on_second_call() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = [
        "coeffs", "--preset", "a", "--n-max", "2000", "--cache", cache,
    ];
    let first = run(&args);
    assert!(first.status.success());
    assert!(stdout(&first).contains("cache: computed"));
    let second = run(&args);
    assert!(stdout(&second).contains("cache: hit"));
    let strip = |s: String| {
        s.lines()
            .filter(|l| !l.starts_with("cache:"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(stdout(&first)), strip(stdout(&second)));
}

#[test]
fn cache_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = bin()
        .args(["coeffs", "--preset", "b", "--n-max", "300"])
        .env("SATO_TATE_CACHE", dir.path())
        .output()
        .unwrap();
    assert!(stdout(&o).contains("cache: computed"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn zero_n_max_is_a_config_error() {
    let o = run(&["coeffs", "--preset", "c", "--n-max", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn unknown_preset_is_a_config_error() {
    let o = run(&["preset", "z"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_presets_pass() {
    for p in ["a", "b"] {
        let o = run(&["verify", "--preset", p, "--n-max", "3000"]);
        assert_eq!(o.status.code(), Some(0), "{p}: {}", stdout(&o));
        let json = stdout(&o).lines().last().unwrap().to_string();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(
            v["multiplicativity"]["violations"]
                .as_array()
                .unwrap()
                .len(),
            0
        );
        assert_eq!(v["a_1_is_one"], true);
    }
}

#[test]
fn verify_wrong_curve_exits_two() {
    let o = run(&[
        "verify",
        "--eta",
        "1^2,11^2",
        "--bad-primes",
        "11",
        "--curve",
        "0,1,0,-1,0",
        "--conductor",
        "20",
        "--n-max",
        "200",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("\"prime\":3"));
}

#[test]
fn single_prime_sample_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "preset",
        "a",
        "--num-primes",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("insufficient sample"), "{}", stderr(&o));
}

#[test]
fn conflicting_sample_flags_are_rejected() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "preset",
        "a",
        "--num-primes",
        "100",
        "--prime-limit",
        "1000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn strict_stats_fails_on_cm_curve() {
    // y^2 = x^3 - x has a_p = 0 for every p = 3 mod 4, so half the angles sit at pi/2.
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "run",
        "--curve",
        "0,0,0,-1,0",
        "--conductor",
        "32",
        "--num-primes",
        "500",
        "--strict-stats",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("acceptance: FAIL"));

    let lax = TempDir::new().unwrap();
    let o = run(&[
        "run",
        "--curve",
        "0,0,0,-1,0",
        "--conductor",
        "32",
        "--num-primes",
        "500",
        "--out",
        lax.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let o = run(&[
            "preset",
            "b",
            "--num-primes",
            "800",
            "--pair-correlation",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let fa = artifacts(a.path());
    let fb = artifacts(b.path());
    assert_eq!(fa, fb);
    let names: Vec<_> = fa.iter().map(|(n, _)| n.as_str()).collect();
    for want in [
        "angles.csv",
        "density_hist.csv",
        "unfolded.csv",
        "spacing_k0.csv",
        "spacing_k1.csv",
        "spacing_k2.csv",
        "pair_correlation.csv",
        "report.json",
    ] {
        assert!(names.contains(&want), "missing {want}");
    }

    let report: serde_json::Value =
        serde_json::from_slice(&fa.iter().find(|(n, _)| n == "report.json").unwrap().1).unwrap();
    validate_report(&report).unwrap();
    for (name, bytes) in &fa {
        if name != "report.json" {
            assert_eq!(report["artifacts"][name], sha256_hex(bytes), "{name}");
        }
    }
    assert_eq!(report["sample_size"], 800);
}

#[test]
fn config_file_matches_flags() {
    let work = TempDir::new().unwrap();
    let out_cfg = work.path().join("cfg");
    let out_flags = work.path().join("flags");
    let cfg = work.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "eta = \"1^2,11^2\"\nbad_primes = [11]\ncurve = [0, -1, 1, 0, 0]\nconductor = 11\nnum_primes = 600\nk = [0, 1]\nbins = 30\nout = {:?}\n",
            out_cfg.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("cross-check: "));

    let o = run(&[
        "run",
        "--eta",
        "1^2,11^2",
        "--bad-primes",
        "11",
        "--curve",
        "0,-1,1,0,0",
        "--conductor",
        "11",
        "--num-primes",
        "600",
        "--k",
        "0,1",
        "--bins",
        "30",
        "--out",
        out_flags.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(artifacts(&out_cfg), artifacts(&out_flags));
    assert!(!out_cfg.join("spacing_k2.csv").exists());
}

#[test]
fn flags_override_config_file() {
    let work = TempDir::new().unwrap();
    let cfg = work.path().join("run.toml");
    fs::write(&cfg, "preset = \"a\"\nnum_primes = 300\n").unwrap();
    let out = work.path().join("out");
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--num-primes",
        "400",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["sample_size"], 400);
}

#[test]
fn unknown_config_key_is_rejected() {
    let work = TempDir::new().unwrap();
    let cfg = work.path().join("run.toml");
    fs::write(&cfg, "preset = \"a\"\nnum_prime = 300\n").unwrap();
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
