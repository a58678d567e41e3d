use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixest"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gen_then_oracle_on_the_two_state_chain() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = run(
        p,
        &[
            "gen",
            "--family",
            "two-state",
            "--d",
            "2",
            "--params",
            "0.25",
            "0.25",
            "--out",
            "k.json",
        ],
    );
    assert!(out.status.success());
    let kernel = std::fs::read_to_string(p.join("k.json")).unwrap();
    assert_eq!(kernel.trim(), r#"{"d":2,"rows":[[0.75,0.25],[0.25,0.75]]}"#);

    let v = json(&run(p, &["oracle", "--kernel", "k.json"]));
    assert_eq!(v["kappa_gen"], 0.5);
    assert_eq!(v["k_gen"], 1);
    assert_eq!(v["tmix"], 2);
    assert_eq!(v["bracket_lower"], 1.0);
    for key in ["pimin", "beta", "bracket_upper"] {
        assert!(v[key].is_number(), "{key}");
    }
}

#[test]
fn sample_estimate_and_interval() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(run(
        p,
        &[
            "gen",
            "--family",
            "three-state-funnel",
            "--d",
            "3",
            "--out",
            "k.json"
        ]
    )
    .status
    .success());
    assert!(run(
        p,
        &[
            "sample", "--kernel", "k.json", "--m", "50000", "--seed", "4", "--mu", "point:0",
            "--out", "t.txt"
        ]
    )
    .status
    .success());
    let traj = std::fs::read_to_string(p.join("t.txt")).unwrap();
    assert!(traj.starts_with("d=3 m=50000\n0 1 2"));

    let v = json(&run(p, &["estimate", "--traj", "t.txt", "--adaptive"]));
    assert!((v["kappa_hat"].as_f64().unwrap() - 0.8125).abs() < 0.05);
    assert!(v["t_hat"]["real"].is_number());
    assert!(v["S"].as_u64().unwrap() >= 4);

    let v = json(&run(p, &["estimate", "--traj", "t.txt", "--S", "2"]));
    assert_eq!(v["kappa_hat"], 1.0);
    assert!(v["t_hat"].is_null());

    let v = json(&run(
        p,
        &["ci", "--traj", "t.txt", "--S", "8", "--delta", "0.1"],
    ));
    assert!(v["lower"].as_f64().unwrap() <= 0.8125 && 0.8125 <= v["upper"].as_f64().unwrap());
    assert_eq!(v["per_s_terms"].as_array().unwrap().len(), 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    // Unknown flag and missing file are argument errors.
    assert_eq!(run(p, &["oracle", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(p, &["oracle", "--kernel", "missing.json"])
            .status
            .code(),
        Some(2)
    );
    std::fs::write(
        p.join("bad.json"),
        r#"{"d":2,"rows":[[0.5,0.6],[0.5,0.5]]}"#,
    )
    .unwrap();
    assert_eq!(
        run(p, &["oracle", "--kernel", "bad.json"]).status.code(),
        Some(2)
    );
    std::fs::write(p.join("t.txt"), "d=2 m=3\n0 1\n").unwrap();
    assert_eq!(
        run(p, &["estimate", "--traj", "t.txt", "--S", "1"])
            .status
            .code(),
        Some(2)
    );
    // Only one way of choosing the scan bound at a time.
    assert_eq!(
        run(
            p,
            &["estimate", "--traj", "t.txt", "--S", "1", "--adaptive"]
        )
        .status
        .code(),
        Some(2)
    );

    // A periodic kernel has no mixing time.
    std::fs::write(p.join("flip.json"), r#"{"d":2,"rows":[[0,1],[1,0]]}"#).unwrap();
    assert_eq!(
        run(p, &["oracle", "--kernel", "flip.json"]).status.code(),
        Some(3)
    );
    // The deterministic flip is periodic and cannot be generated.
    assert_eq!(
        run(
            p,
            &[
                "gen",
                "--family",
                "two-state",
                "--d",
                "2",
                "--params",
                "1",
                "1",
                "--out",
                "c.json"
            ]
        )
        .status
        .code(),
        Some(3)
    );
    // Out-of-range family parameters are argument errors.
    assert_eq!(
        run(
            p,
            &[
                "gen",
                "--family",
                "biased-cycle",
                "--d",
                "4",
                "--params",
                "0.75",
                "0",
                "--out",
                "c.json"
            ]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn bench_writes_csv_and_prints_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("cfg.json"),
        r#"{"spec": {"family": "two-state", "d": 2, "params": [0.25, 0.25]},
            "m": 20000, "replicates": 5, "master_seed": 1, "S_mode": "heuristic",
            "m_grid": [1000, 10000], "s_list": [1, 2, 3]}"#,
    )
    .unwrap();
    let v = json(&run(
        p,
        &[
            "bench", "coverage", "--config", "cfg.json", "--out", "cov.csv",
        ],
    ));
    assert_eq!(v["replicates"], 5);
    assert_eq!(v["truth"]["kappa_gen"], 0.5);
    let csv = std::fs::read_to_string(p.join("cov.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);

    let v = json(&run(
        p,
        &[
            "bench",
            "error-curve",
            "--config",
            "cfg.json",
            "--out",
            "curve.csv",
        ],
    ));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let v = json(&run(
        p,
        &[
            "bench",
            "visits",
            "--config",
            "cfg.json",
            "--out",
            "visits.csv",
        ],
    ));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);

    std::fs::write(p.join("broken.json"), "{").unwrap();
    assert_eq!(
        run(
            p,
            &[
                "bench",
                "coverage",
                "--config",
                "broken.json",
                "--out",
                "x.csv"
            ]
        )
        .status
        .code(),
        Some(2)
    );
}
