use std::path::Path;
use std::process::{Command, Output};

fn jcrev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jcrev")).args(args).output().expect("spawn jcrev")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn synthesize_worked_example() {
    let o = jcrev(&["synthesize", "--t", "1/2", "--rho", "2", "--n", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("alpha^2 = 28/9"), "{text}");
    assert!(text.contains("F = (11/8, 1/8)"), "{text}");
    assert!(text.contains("T = 6*pi"), "{text}");
    assert!(text.contains("18.8495559"), "{text}");

    let o = jcrev(&["synthesize", "--t", "1/2", "--rho", "2", "--format", "csv"]);
    let text = stdout(&o);
    for line in ["alpha2=28/9", "F_plus=11/8", "F_minus=1/8", "ratios=1,8/5,3", "K1=5", "delta=1/3", "T=6*pi"] {
        assert!(text.lines().any(|l| l == line), "missing {line} in {text}");
    }
}

#[test]
fn resonance_has_no_certificate() {
    let o = jcrev(&["check-revival", "--alpha", "0", "--beta", "1", "--n", "1"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("no certificate (resonance)"));

    let o = jcrev(&["check-revival", "--alpha", "0", "--beta", "-2", "--n", "7", "--format", "csv"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout(&o), "revival=0\nreason=resonance\n");
}

#[test]
fn check_revival_accepts_every_parameter_form() {
    let forms: [&[&str]; 4] = [
        &["--alpha", "2*sqrt(7)/3", "--rho", "2"],
        &["--alpha2", "28/9", "--rho", "2"],
        &["--alpha", "2*sqrt(7)/3", "--beta", "2 - 2/3*sqrt(7)"],
        &["--t", "1/2", "--rho", "2"],
    ];
    for form in forms {
        let mut args = vec!["check-revival", "--format", "csv"];
        args.extend_from_slice(form);
        let o = jcrev(&args);
        assert_eq!(code(&o), 0, "{form:?}");
        assert!(stdout(&o).contains("K1=5\n"), "{form:?}");
        assert!(stdout(&o).contains("T=6*pi\n"), "{form:?}");
    }
}

#[test]
fn irrational_ratio_is_absent_not_error() {
    let o = jcrev(&["check-revival", "--alpha", "1", "--beta", "3"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("no certificate"));
}

#[test]
fn parameter_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("params.txt");
    std::fs::write(&path, "# synthesized\nt = 1/2\nrho = 2\nn = 1\ny_hz = 1e6\n").unwrap();
    let o = jcrev(&["check-revival", "--params", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("T=6*pi\n"));
    let seconds: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("T_seconds="))
        .expect("T_seconds")
        .parse()
        .unwrap();
    assert!((seconds - 6.0 * std::f64::consts::PI / 1e6).abs() < 1e-15);

    std::fs::write(&path, "alpha = 1\nbogus = 2\n").unwrap();
    assert_eq!(code(&jcrev(&["spectrum", "--params", path.to_str().unwrap()])), 1);
}

#[test]
fn verify_revival_and_determinism() {
    let base = ["verify", "--t", "1/2", "--rho", "2", "--seed", "11", "--format", "csv"];
    let one = jcrev(&[&base[..], &["--workers", "1"]].concat());
    let four = jcrev(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert!(stdout(&one).ends_with("revival=1\n"));

    // half the period is not a revival
    let half = 3.0 * std::f64::consts::PI;
    let o = jcrev(&["verify", "--t", "1/2", "--rho", "2", "--time", &half.to_string()]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("no revival"));

    let o = jcrev(&["verify", "--alpha", "0", "--beta", "1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_with_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    std::fs::write(&path, "1,0\n0,1\n0.5,-0.5\n2,0\n").unwrap();
    let o = jcrev(&["verify", "--t", "1/2", "--rho", "2", "--states", "5", "--state", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let f: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("state_fidelity="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(f >= 1.0 - 1e-6);

    std::fs::write(&path, "1,0\n").unwrap();
    let o = jcrev(&["verify", "--t", "1/2", "--rho", "2", "--state", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

fn lcm_of_row(csv: &str, n: usize) -> String {
    let row = csv.lines().nth(n).unwrap();
    row.split(',').nth(2).unwrap().to_string()
}

#[test]
fn scan_lcm_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let hist = dir.path().join("hist.csv");
    let o = jcrev(&[
        "scan-lcm", "--d", "1/10000", "--count", "30000", "--out", out.to_str().unwrap(), "--hist",
        hist.to_str().unwrap(), "--workers", "3",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("30000 points, 1 skipped"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 30_001);
    assert!(csv.starts_with("n,t,lcm,skipped\n1,1/10000,99999999,0\n"));
    assert_eq!(lcm_of_row(&csv, 5000), "3");
    assert_eq!(csv.lines().nth(10_000).unwrap(), "10000,1,,1");

    let h = std::fs::read_to_string(&hist).unwrap();
    assert!(h.starts_with("bin_lower_log10,count\n0,"));
    let total: u64 = h.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 29_999);

    let serial = jcrev(&["scan-lcm", "--d", "1/10000", "--count", "30000", "--format", "csv", "--workers", "1"]);
    assert_eq!(serial.stdout, csv.as_bytes());
}

#[test]
fn solvers() {
    let o = jcrev(&["solve-k", "--k", "15", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "kind,X,Y\nrational,8,7\ninteger,8,7\ninteger,4,1\n");

    let o = jcrev(&["solve-k", "--k", "-3/4", "--s", "1/2", "--format", "csv"]);
    assert_eq!(stdout(&o), "kind,X,Y\nrational,-1/2,-1\n");

    assert_eq!(code(&jcrev(&["solve-k", "--k", "0"])), 2);

    let o = jcrev(&["solve-chain", "--ks", "64,144", "--bound", "50", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "X0,X1,X2\n17,15,9\n");

    let o = jcrev(&["solve-chain", "--ks", "2", "--bound", "100", "--format", "csv"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout(&o), "X0,X1\n");

    let o = jcrev(&["middles", "--bound", "10", "--format", "csv"]);
    assert_eq!(stdout(&o), "Y\n5\n10\n");
    assert_eq!(code(&jcrev(&["middles", "--bound", "4"])), 3);
}

#[test]
fn out_flag_redirects_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.csv");
    let o = jcrev(&["spectrum", "--alpha", "0", "--beta", "1", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], "level,block,branch,energy,energy_float");
    assert_eq!(rows[1], "0,1,lower,0,0");
    assert!(rows[2].starts_with("1,2,lower,2 - sqrt(2),0.585786"));
    assert_eq!(rows[3], "2,1,upper,2,2");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&jcrev(&["nonsense"])), 1);
    assert_eq!(code(&jcrev(&["spectrum", "--alpha", "1/0", "--beta", "1"])), 1);
    assert_eq!(code(&jcrev(&["spectrum", "--alpha", "1", "--beta", "1", "--frobnicate"])), 1);
    assert_eq!(code(&jcrev(&["spectrum", "--alpha", "1"])), 1);
    assert_eq!(code(&jcrev(&["scan-lcm", "--d", "1/2", "--count", "0"])), 1);
    assert_eq!(code(&jcrev(&["--help"])), 0);
}

#[test]
fn domain_errors_exit_two() {
    assert_eq!(code(&jcrev(&["synthesize", "--t", "1", "--rho", "2"])), 2);
    // Y^2 = 16/9 < n = 2
    assert_eq!(code(&jcrev(&["synthesize", "--t", "1/2", "--rho", "2", "--n", "2"])), 2);
    assert_eq!(code(&jcrev(&["spectrum", "--alpha", "1", "--beta", "1", "--n", "0"])), 2);
    assert_eq!(code(&jcrev(&["spectrum", "--alpha2", "-1", "--beta", "1"])), 2);
    assert_eq!(code(&jcrev(&["scan-lcm", "--d", "0", "--count", "3"])), 2);
}
