use std::path::Path;
use std::process::{Command, Output};

use superdense::circuit::parse_qasm;
use superdense::experiment::read_report_file;

fn superdense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superdense"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn encode_prints_encoder_and_counts() {
    let out = superdense(&["encode", "--n", "4", "--message", "0000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("raw gates: total=0"), "{text}");
    assert!(text.contains("raw depth: 0"), "{text}");

    let out = superdense(&["encode", "--n", "4", "--message", "1111"]);
    let text = stdout(&out);
    assert!(text.contains("z q0"), "{text}");
    assert!(text.contains("raw gates: total=6"), "{text}");
}

#[test]
fn encode_full_qasm_embeds_six_encoder_gates() {
    let out = superdense(&[
        "encode",
        "--n",
        "4",
        "--message",
        "1111",
        "--full",
        "--format",
        "qasm",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("OPENQASM 3.0;"));
    assert!(text.contains("c = measure q;"));
    let circuit = parse_qasm(&text).unwrap();
    // GHZ and decoder contribute one h and three cx each
    assert_eq!(circuit.len(), 8 + 6);
    let encoder_lines = text
        .lines()
        .filter(|l| l.starts_with("x ") || l.starts_with("z "))
        .count();
    assert_eq!(encoder_lines, 6);
}

#[test]
fn encode_rejects_bad_messages() {
    for args in [
        ["encode", "--n", "4", "--message", "201"],
        ["encode", "--n", "5", "--message", "1010"],
        ["encode", "--n", "1", "--message", "1"],
    ] {
        let out = superdense(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn verify_all_lengths() {
    let out = superdense(&["verify", "--max-n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("n=10: 1024/1024 passed"), "{text}");
    assert!(text.lines().last().unwrap() == "2044/2044 passed", "{text}");

    let out = superdense(&["verify", "--max-n", "2"]);
    assert!(stdout(&out).ends_with("4/4 passed\n"));
    assert_eq!(
        superdense(&["verify", "--max-n", "11"]).status.code(),
        Some(2)
    );
}

#[test]
fn run_is_deterministic() {
    let args = [
        "run",
        "--n",
        "4",
        "--message",
        "0110",
        "--shots",
        "4096",
        "--seed",
        "7",
    ];
    let (a, b) = (superdense(&args), superdense(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("shots: 4096"), "{text}");

    let csv = superdense(&[&args[..], &["--format", "csv"]].concat());
    let text = stdout(&csv);
    assert_eq!(text.lines().count(), 2);
    assert!(
        text.lines().nth(1).unwrap().starts_with("4,0110,6,"),
        "{text}"
    );
}

#[test]
fn noiseless_config_gives_perfect_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noise.json");
    std::fs::write(&cfg, r#"{"p_1q": 0, "p_2q": 0, "p_readout": 0}"#).unwrap();
    let out = superdense(&["run", "--message", "1001", "--noise", path_arg(&cfg)]);
    assert!(stdout(&out).contains("success rate: 1.000000"));

    std::fs::write(&cfg, r#"{"p_1q": 2}"#).unwrap();
    let out = superdense(&["run", "--message", "1001", "--noise", path_arg(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s4.csv");
    let out = superdense(&[
        "sweep",
        "--n",
        "4",
        "--shots",
        "4096",
        "--seed",
        "1",
        "--out",
        path_arg(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let records = read_report_file(&csv).unwrap();
    assert_eq!(records.len(), 16);
    assert!(records
        .iter()
        .enumerate()
        .all(|(i, r)| r.decimal_value() == i as u64));

    let out = superdense(&["report", "--in", path_arg(&csv), "--by", "zero-fraction"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let classes: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(classes, ["100%", "50%", "0%"]);
    assert!(text.contains("4,50%,6,"), "{text}");

    for by in ["gate-count", "depth"] {
        let out = superdense(&["report", "--in", path_arg(&csv), "--by", by]);
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).starts_with("n,group_key,num_messages,"));
    }

    let out = superdense(&["report", "--in", path_arg(&csv), "--by", "color"]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("absent.csv");
    let out = superdense(&["report", "--in", path_arg(&missing), "--by", "depth"]);
    assert_eq!(out.status.code(), Some(2));
}
