use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno-scissors"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_to_file(args: &[&str], path: &Path) -> String {
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--out", p]);
    let out = cli(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(path).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

#[test]
fn fig2_reproduces_asymptotes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to_file(&["fig2", "--N-range", "1:400"], &dir.path().join("a.csv"));
    let b = run_to_file(&["fig2", "--N-range", "1:400"], &dir.path().join("b.csv"));
    assert_eq!(a, b);
    assert!(a.contains("# mode=fig2 n=2 kappa=0.2"));
    assert!(a.contains("# probe fock:1: mean=1.000000"));
    assert!(a.contains("# probe coherent:1.0: mean=1.000000"));
    assert!(a.contains("# probe squeezed:-0.5,0.853498: mean=0.999999"));
    assert!(a.lines().any(|l| l == "N,probe,P_n,P_postselect,fidelity"));

    let rows = data_rows(&a);
    assert_eq!(rows.len(), 400 * 3);
    assert!(rows.iter().all(|r| r.len() == 5));
    assert_eq!(rows[2][1], "squeezed:-0.5,0.853498");
    for r in &rows {
        let (pn, p0) = (num(&r[2]), num(&r[3]));
        assert!((0.0..=1.0).contains(&pn) && (0.0..=1.0).contains(&p0));
        assert!((pn + p0 - 1.0).abs() <= 1e-9);
    }
    let last = |probe: &str| num(&rows.iter().rev().find(|r| r[1] == probe).unwrap()[2]);
    assert!((last("coherent:1.0") - 0.36788).abs() < 0.01);
    assert!(last("fock:1") < 0.01);
}

#[test]
fn fig2_default_range_is_one_to_two_hundred() {
    let out = cli(&["fig2"]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 600);
    assert_eq!(rows.last().unwrap()[0], "200");
}

#[test]
fn verify_passes_on_default_grid() {
    let out = cli(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("# overall=pass"));
    let unitarity = text.lines().find(|l| l.starts_with("unitarity,")).unwrap();
    assert!(num(unitarity.split(',').nth(1).unwrap()) <= 1e-10);
    let paths = text.lines().find(|l| l.starts_with("closed_form_vs_oracle,")).unwrap();
    assert!(num(paths.split(',').nth(1).unwrap()) <= 1e-9);
}

#[test]
fn verify_flags_corrupted_kappa() {
    let out = cli(&["verify", "--corrupt-kappa", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("closed_form_vs_oracle"), "{err}");
    assert!(err.contains("n=") && err.contains("kappa="), "{err}");
}

#[test]
fn truncate_coherent_converges() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to_file(&["truncate", "--probe", "coherent:1.0"], &dir.path().join("t.csv"));
    assert!(csv.lines().any(|l| l == "N,P_postselect,fidelity,one_minus_F"));
    let rows = data_rows(&csv);
    for r in &rows {
        let f = num(&r[2]);
        assert!(f > 0.0 && f <= 1.0);
    }
    let last = rows.last().unwrap();
    assert_eq!(last[0], "800");
    assert!(num(&last[2]) >= 0.999);
    assert!((num(&last[1]) - (1.0 - (-1.0f64).exp())).abs() < 0.01);
    let slope_line = csv.lines().last().unwrap();
    let slope = num(slope_line.split('=').nth(1).unwrap());
    assert!((slope + 2.0).abs() < 0.2, "{slope_line}");
}

#[test]
fn truncate_fock_fidelity_is_one() {
    let out = cli(&["truncate", "--probe", "fock:1", "--N-range", "2:60:2"]);
    assert!(out.status.success());
    for r in data_rows(&String::from_utf8(out.stdout).unwrap()) {
        assert!((num(&r[2]) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn truncate_vacuum_is_no_outcome() {
    let out = cli(&["truncate", "--probe", "fock:0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("no outcome"));
}

#[test]
fn usage_errors_exit_two() {
    let bad_probe = cli(&["sweep", "--probe", "thermal:1"]);
    assert_eq!(bad_probe.status.code(), Some(2));
    assert!(String::from_utf8(bad_probe.stderr).unwrap().contains("fock:M"));

    assert_eq!(cli(&["bogus"]).status.code(), Some(2));
    assert_eq!(cli(&["sweep", "--N-range", "5:1"]).status.code(), Some(2));
    assert_eq!(cli(&["sweep", "--a-cutoff", "3"]).status.code(), Some(2));

    let unwritable = cli(&["sweep", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(unwritable.status.code(), Some(2));
    assert!(String::from_utf8(unwritable.stderr).unwrap().contains("/nonexistent-dir/x.csv"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "n = 1\nkappa = 0.5\nprobe = \"fock:2\"\nN_range = \"1:10\"\n").unwrap();
    let out = cli(&["sweep", "--config", cfg.to_str().unwrap(), "--kappa", "0.3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# mode=sweep n=1 kappa=0.3 N_range=1:10:1"), "{text}");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[1] == "fock:2"));
}

#[test]
fn custom_probe_file() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("phi.txt");
    fs::write(&coeffs, "0.6 0.0\n0.0 0.8\n").unwrap();
    let spec = format!("custom:@{}", coeffs.display());
    let out = cli(&["sweep", "--probe", &spec, "--N-range", "400:400"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert!((num(&rows[0][2]) - 0.36).abs() < 0.01);
}
