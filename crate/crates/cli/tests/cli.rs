use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccfilter")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const GOLDEN: &str = include_str!("golden/bp_1e3_1e5_ppd8.csv");

#[test]
fn design_reports_reference_point() {
    let out = run(&["design"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("14142.1356 rad/s (2250.79079 Hz)"), "{text}");
    assert!(text.contains("1.97989899"), "{text}");
    assert!(text.contains("sensitivity of omega0") && text.contains("sensitivity of Q"));
}

#[test]
fn sens_lists_every_parameter() {
    let out = run(&["sens", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("omega0,") || l.starts_with("Q,")).count(), 20);
    assert!(text.contains("Q,R3,1.00000000e0,"));
}

#[test]
fn sweep_csv_is_byte_identical_to_golden() {
    for engine in ["closed-form", "mna"] {
        let out = run(&["sweep", "bp", "--wmin", "1e3", "--wmax", "1e5", "--ppd", "8", "--engine", engine]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), GOLDEN, "{engine}");
    }
    assert!(!GOLDEN.contains('\r'));
    assert_eq!(GOLDEN.lines().next(), Some("omega_rad_s,freq_hz,mag,mag_db,phase_deg"));
    assert_eq!(GOLDEN.lines().count(), 18);
}

#[test]
fn sweep_writes_file_and_checks_engines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.csv");
    let out = run(&["sweep", "notch", "--check", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(&path).unwrap();
    // default sweep: three decades at 200 points per decade
    assert_eq!(csv.lines().count(), 602);
    let deepest = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(deepest < -60.0, "{deepest}");
}

#[test]
fn netlist_then_simulate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (mode, kind) in [("lp", "LowPass"), ("hp", "HighPass"), ("bp", "BandPass"), ("notch", "Notch")] {
        let path = dir.path().join(format!("{mode}.cir"));
        let out = run(&["netlist", mode, "-o", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        let csv = dir.path().join(format!("{mode}.csv"));
        let out = run(&["simulate", path.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let summary = stdout(&out);
        assert!(summary.starts_with(kind), "{summary}");
        assert!(summary.contains("omega0 = 1414"), "{summary}");
    }
}

#[test]
fn simulate_rc_lowpass() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "rc.cir", "V1 in 0 1 vin\nR1 in out 1k\nC1 out 0 100n\n.out out\n");
    let out = run(&["simulate", &file]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).starts_with("omega_rad_s,"));
    let summary = stderr(&out);
    assert!(summary.starts_with("LowPass, omega0 = 10000.0 rad/s"), "{summary}");
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "garbage.cir", "this is not\na netlist\x01\n");
    let looped = write(dir.path(), "loop.cir", "V1 in 0 1 a\nV2 in 0 2 b\nR1 in out 1k\nC1 out 0 1n\n.out out\n");

    let cases: [(&[&str], i32, &str); 10] = [
        (&["design", "--r3", "20k"], 0, ""),
        (&["design", "--r1", "-5"], 2, "r1 must be positive"),
        (&["design", "--c2", "10q"], 2, ""),
        (&["sweep", "xy"], 2, "unknown mode"),
        (&["sweep", "bp", "--wmin", "2e4", "--wmax", "1e4"], 2, ""),
        (&["simulate", &garbage], 2, "garbage.cir:1:"),
        (&["simulate", "/nonexistent/file.cir"], 2, ""),
        (&["tune", "--omega0", "0"], 2, ""),
        (&["tune", "--omega0", "1e-200"], 3, "infeasible"),
        (&["simulate", &looped], 4, "singular"),
    ];
    for (args, want, needle) in cases {
        let out = run(args);
        assert_eq!(code(&out), want, "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn tune_hits_targets() {
    let out = run(&["tune", "--bw", "7071.0678"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("R3  14142.1356 ohm"), "{text}");
    assert!(text.contains("C5  1.00000000e-8 F"), "{text}");
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["sweep", "bp", "--wmin", "1e3", "--wmax", "1e5", "--ppd", "8", "--engine", "mna"];
    for threads in ["0", "1", "3"] {
        let out = Command::new(env!("CARGO_BIN_EXE_ccfilter")).args(args).env("CCFILTER_THREADS", threads).output().unwrap();
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), GOLDEN);
    }
}
