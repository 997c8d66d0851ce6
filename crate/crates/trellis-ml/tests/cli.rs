use std::process::{Command, Output};

use trellis_ml_core::{ConvCode, Message};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trellis-ml"))
        .args(args)
        .env_remove("TRELLIS_ML_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn encode_matches_library() {
    let out = cli(&["encode", "--octal", "7,5", "--q", "2", "--msg", "1,0,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let code = ConvCode::from_octal(&[0o7, 0o5]).unwrap();
    let cw = code.encode(&Message::new(1, vec![1, 0, 1, 1]).unwrap()).unwrap();
    let expected: Vec<String> = cw
        .symbols()
        .map(|s| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines, expected);
}

#[test]
fn encode_ternary_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("msg.txt");
    std::fs::write(&path, "2\n0\n1\n").unwrap();
    let out = cli(&[
        "encode", "--q", "3", "--n", "2", "--nu", "2", "--taps", "1,1,1,2", "--file", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn missing_q_is_a_usage_error() {
    let out = cli(&["encode", "--octal", "7,5", "--msg", "1,0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--q"), "{err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = cli(&["sweep", "--kind", "opt-prob", "--colour", "red"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("--colour"));
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "[code]\nq = 2\nocta = 7,5\n").unwrap();
    let out = cli(&["encode", "--config", path.to_str().unwrap(), "--msg", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("code.octa"));
}

#[test]
fn contract_violation_exits_two() {
    let out = cli(&["decode", "--q", "2", "--octal", "7,5", "--rx", "1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decoders_agree_on_noiseless_input() {
    // codeword of 1,0,1,1 under BPSK
    let rx = "-1,-1,-1,1,1,1,1,-1,1,-1,-1,-1";
    for decoder in ["viterbi", "brute", "sll-augmented", "three-step"] {
        let out = cli(&["decode", "--q", "2", "--octal", "7,5", "--rx", rx, "--decoder", decoder]);
        assert_eq!(out.status.code(), Some(0), "{decoder}");
        let text = stdout(&out);
        assert!(text.contains("message: 1,0,1,1\n"), "{decoder}: {text}");
        assert!(text.contains("metric: 0.00000000\n"), "{decoder}: {text}");
    }
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "[code]\nq = 2\noctal = 7,5\n\n[sweep]\nkind = complexity\nsnr = 4\nlen = 8\ntrials = 5\nseed = 3\n").unwrap();
    let out = cli(&["sweep", "--config", path.to_str().unwrap(), "--snr", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    for row in text.lines().skip(1) {
        assert!(row.contains(",16.0000000,8,5,"), "{row}");
        assert!(row.ends_with(",3"), "{row}");
    }
}

#[test]
fn hmm_decode_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hmm.cfg");
    std::fs::write(
        &path,
        "[hmm]\ntransitions = 0.9,0.1; 0.2,0.8\nprocess = 0,1\npoints = 1,-1\ndim = 1\nsnr = 4\n",
    )
    .unwrap();
    let out = cli(&["decode", "--config", path.to_str().unwrap(), "--decoder", "hmm-viterbi", "--rx", "0.9,-1.1,-0.8,1.2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("states: 0,1,1,0\n"));
}

#[test]
fn simulate_prints_a_record() {
    let out = cli(&["simulate", "--len", "40", "--snr", "64", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("viterbi: "));
    assert!(text.contains("three-step: "));
}

#[test]
fn sweep_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "2")] {
        let out = cli(&[
            "sweep", "--kind", "sll-ineff", "--snr", "2,4", "--len", "8,32", "--trials", "40", "--seed", "11",
            "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn one_cell_gives_two_lines() {
    let out = cli(&["sweep", "--kind", "opt-prob", "--snr", "64", "--len", "400", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], trellis_ml::csv::HEADER);
    assert!(lines[1].starts_with("nll-test,64.0000000,400,20,,,,,"));
}

#[test]
fn threads_fall_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_trellis-ml"))
        .args(["sweep", "--kind", "complexity", "--len", "8", "--trials", "2"])
        .env("TRELLIS_ML_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("TRELLIS_ML_THREADS"));
}
