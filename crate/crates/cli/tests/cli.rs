use std::path::Path;
use std::process::{Command, Output};

fn dmfbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmfbm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn sidecar(csv: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn invalid_parameters_exit_with_domain_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    for args in [
        vec!["solve", "--h1", "0.8", "--h2", "0.9"],
        vec!["solve", "--h1", "0.7", "--h2", "0.6"],
        vec!["solve", "--T", "-1"],
        vec!["solve", "--N", "1"],
        vec!["solve", "--T", "1,2"],
        vec!["montecarlo", "--M", "1"],
        vec!["kernel-surface", "--R", "1"],
    ] {
        let mut full = args.clone();
        full.extend(["--out", s(&out)]);
        let r = dmfbm(&full);
        assert_eq!(
            r.status.code(),
            Some(3),
            "{args:?}: {}",
            String::from_utf8_lossy(&r.stderr)
        );
    }
    assert_eq!(dmfbm(&["solve", "--bogus"]).status.code(), Some(2));
    assert_eq!(dmfbm(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let r = dmfbm(&["solve", "--config", "/nonexistent/dmfbm.json"]);
    assert_eq!(r.status.code(), Some(5));
}

#[test]
fn kernel_surface_writes_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("surface.csv");
    ok(&dmfbm(&[
        "kernel-surface",
        "--R",
        "2",
        "--T",
        "2",
        "--out",
        s(&out),
    ]));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["u", "s", "K", "L"]);
    let rows: Vec<[f64; 4]> = reader.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    let (a, b) = (2.0 / 3.0, 4.0 / 3.0);
    assert!((rows[0][0] - a).abs() < 1e-15 && (rows[0][1] - b).abs() < 1e-15);
    for r in &rows {
        assert!(r[2].is_finite() && r[3] > 0.0);
    }
    let meta = sidecar(&out);
    assert_eq!(meta["rows"], 2);
    assert_eq!(meta["config"]["R"], 2);
}

#[test]
fn solve_is_reproducible_and_tilde_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let base = [
        "solve", "--h1", "0.65", "--h2", "0.8", "--T", "2", "--N", "60",
    ];
    ok(&dmfbm(&[&base[..], &["--out", s(&a)]].concat()));
    ok(&dmfbm(&[&base[..], &["--out", s(&b)]].concat()));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ok(&dmfbm(
        &[&base[..], &["--formulation", "tilde", "--out", s(&c)]].concat(),
    ));

    let read = |p: &Path| -> Vec<(f64, f64)> {
        csv::Reader::from_path(p)
            .unwrap()
            .deserialize()
            .map(|r| r.unwrap())
            .collect()
    };
    let (direct, tilde) = (read(&a), read(&c));
    assert_eq!(direct.len(), 61);
    for ((t, x), (_, y)) in direct.iter().zip(&tilde).skip(1).take(59) {
        assert!((x - y).abs() <= 1e-4, "h({t}): {x} vs {y}");
    }
    let meta = sidecar(&a);
    assert_eq!(meta["n_intervals"], 60);
    assert_eq!(meta["config"]["formulation"], "direct");
    assert_eq!(sidecar(&c)["config"]["formulation"], "tilde");
}

#[test]
fn flags_override_config_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"h1": 0.55, "h2": 0.9, "N": 12, "T": [3.0], "seed": 4}"#,
    )
    .unwrap();
    let out = dir.path().join("h.csv");
    ok(&dmfbm(&[
        "solve",
        "--config",
        s(&cfg),
        "--N",
        "16",
        "--out",
        s(&out),
    ]));
    let c = &sidecar(&out)["config"];
    assert_eq!(c["N"], 16);
    assert_eq!(c["h1"], 0.55);
    assert_eq!(c["h2"], 0.9);
    assert_eq!(c["T"], serde_json::json!([3.0]));
    assert_eq!(c["n"], 16);
    assert_eq!(c["seed"], 4);
    assert_eq!(c["theta"], 1.0);
    assert_eq!(c["tables"], true);

    std::fs::write(&cfg, r#"{"h1": 0.6, "colour": "blue"}"#).unwrap();
    let r = dmfbm(&["solve", "--config", s(&cfg), "--out", s(&out)]);
    assert_ne!(r.status.code(), Some(0));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let run = |name: &str, seed: &str| {
        ok(&dmfbm(&[
            "simulate",
            "--T",
            "2",
            "--N",
            "50",
            "--theta",
            "-0.5",
            "--seed",
            seed,
            "--out",
            s(&path(name)),
        ]))
    };
    run("a.csv", "9");
    run("b.csv", "9");
    run("c.csv", "10");
    let a = std::fs::read(path("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(path("b.csv")).unwrap());
    assert_ne!(a, std::fs::read(path("c.csv")).unwrap());
    let meta = sidecar(&path("a.csv"));
    assert_eq!(meta["theta"], -0.5);
    assert_eq!(meta["n_intervals"], 50);
}

#[test]
fn montecarlo_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mc.csv");
    let cache = dir.path().join("cache");
    let args = [
        "montecarlo",
        "--T",
        "1,2",
        "--N",
        "40",
        "--M",
        "50",
        "--theta",
        "0",
        "--seed",
        "3",
        "--cache",
        s(&cache),
        "--out",
        s(&out),
    ];
    ok(&dmfbm(&args));
    let rows: Vec<serde_json::Map<String, serde_json::Value>> = csv::Reader::from_path(&out)
        .unwrap()
        .deserialize()
        .map(|r| r.unwrap())
        .collect();
    assert_eq!(rows.len(), 2);
    let summaries = sidecar(&out)["summaries"].as_array().unwrap().clone();
    for sm in &summaries {
        let mean = sm["mean"].as_f64().unwrap();
        let se = sm["std_error"].as_f64().unwrap();
        assert!(mean.abs() <= 4.0 * se, "{sm}");
        assert_eq!(sm["replications"], 50);
    }
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 2);

    // A second run reuses the cached solutions and appends identical rows.
    ok(&dmfbm(&args));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    let strip = |l: &str| l.split(',').take(14).collect::<Vec<_>>().join(",");
    assert_eq!(strip(lines[1]), strip(lines[3]));
}

#[test]
fn validate_with_kernel_off_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    ok(&dmfbm(&[
        "validate",
        "--N",
        "20",
        "--kernel-scale",
        "0",
        "--out",
        s(&out),
    ]));
    let meta = sidecar(&out);
    assert!(meta["max_abs_error"].as_f64().unwrap() <= 1e-14, "{meta}");
    assert_eq!(meta["config"]["kernel_scale"], 0.0);
}
