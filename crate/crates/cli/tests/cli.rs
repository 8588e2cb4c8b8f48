use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn polarfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarfc"))
        .args(args)
        .output()
        .expect("spawn polarfc")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polarfc-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

const QUICK: &[&str] = &[
    "simulate",
    "--n",
    "5",
    "--k",
    "12",
    "--trials",
    "300",
    "--p-grid",
    "0.3:0.4:0.1",
];

#[test]
fn simulate_prints_csv_with_header() {
    let out = polarfc(&[QUICK, &["--decoder", "bpscc-sbj", "--seed", "9"]].concat());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("p,bler,stderr,avg_visits,avg_iters,trials,errors")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("0.3,"));
}

#[test]
fn same_seed_gives_identical_output() {
    let dir = scratch("determinism");
    let run = |name: &str| {
        let path = dir.join(name);
        let out = polarfc(
            &[
                QUICK,
                &[
                    "--decoder",
                    "bpscc",
                    "--seed",
                    "4",
                    "--out",
                    path.to_str().unwrap(),
                ],
            ]
            .concat(),
        );
        assert!(out.status.success());
        assert!(path.with_extension("json").exists());
        fs::read(&path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let other = polarfc(&[QUICK, &["--decoder", "bpscc", "--seed", "5"]].concat());
    assert_ne!(stdout(&other).into_bytes(), run("c.csv"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn flags_override_config_file() {
    let dir = scratch("config");
    let cfg = dir.join("run.toml");
    fs::write(
        &cfg,
        "n = 5\nk = 12\ntrials = 50\ndecoder = \"sc\"\np-grid = \"0.2\"\n",
    )
    .unwrap();
    let out = polarfc(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "80",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("0.2,"));
    assert_eq!(row.split(',').nth(5), Some("80"));

    fs::write(&cfg, "unknown-key = 3\n").unwrap();
    assert!(!polarfc(&["simulate", "--config", cfg.to_str().unwrap()])
        .status
        .success());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_arguments_fail_with_nonzero_exit() {
    for args in [
        &["simulate", "--decoder", "turbo"][..],
        &["simulate", "--p-grid", "0.5:1.5:0.5"],
        &["simulate", "--imax", "0", "--decoder", "bpscc"],
        &["bounds", "--n", "4", "--k", "40"],
        &["dump-fc", "--example1", "--i", "99"],
        &["no-such-command"],
    ] {
        let out = polarfc(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn toy_code_inspection() {
    let out = polarfc(&["build-code", "--example1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("N = 8, K = 3"));
    assert!(text.contains("hash "));

    let out = polarfc(&["dump-matrices", "--example1", "--dump", "h"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("# H\n"));
}

#[test]
fn analytic_commands_emit_csv() {
    let out = polarfc(&[
        "bounds",
        "--n",
        "5",
        "--k",
        "16",
        "--p-grid",
        "0.25:0.5:0.25",
    ]);
    assert_eq!(stdout(&out).lines().count(), 3);
    assert!(stdout(&out).starts_with("p,dt,mc\n"));

    let out = polarfc(&[
        "de",
        "--n",
        "5",
        "--k",
        "12",
        "--decoder",
        "sc",
        "--p-grid",
        "0.3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("p,bler,pb_"));
    assert_eq!(header.split(',').count(), 2 + 12);
}
