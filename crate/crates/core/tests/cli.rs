use std::path::Path;
use std::process::{Command, Output};

fn permsync(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permsync"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(out: &Path, model: &[&str], seed: &str) -> Output {
    let mut args = vec!["generate"];
    args.extend_from_slice(model);
    args.extend_from_slice(&["--seed", seed, "--out", out.to_str().unwrap()]);
    permsync(&args)
}

const LAC: [&str; 12] = ["--model", "lac", "--n", "100", "--m", "10", "--p", "1.0", "--nc", "3", "--mc", "60"];

#[test]
fn generate_is_deterministic_and_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.psync"), dir.path().join("b.psync"));
    let oa = generate(&a, &LAC, "7");
    let ob = generate(&b, &LAC, "7");
    assert!(oa.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(stdout(&oa), stdout(&ob));
    let bad: usize = stdout(&oa).split_whitespace().last().unwrap().parse().unwrap();
    assert!(bad > 0 && bad <= 180, "{}", stdout(&oa));

    let c = dir.path().join("c.psync");
    generate(&c, &LAC, "8");
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn uniform_without_corruption_has_no_bad_edges() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("u.psync");
    let o = generate(&f, &["--model", "uniform", "--n", "15", "--m", "4", "--q", "0"], "1");
    assert!(o.status.success());
    assert!(stdout(&o).trim_end().ends_with("bad 0"), "{}", stdout(&o));
    for algo in ["spectral", "ppm", "irls-l1", "irls-cauchy-s", "irls-cauchy-p", "irgcl-init", "irgcl-s", "irgcl-p"] {
        let o = permsync(&["solve", "--input", f.to_str().unwrap(), "--algo", algo]);
        assert!(o.status.success(), "{algo}");
        assert!(stdout(&o).contains("error 0.000000"), "{algo}: {}", stdout(&o));
    }
}

#[test]
fn irgcl_solves_lac_and_writes_a_solution() {
    let dir = tempfile::tempdir().unwrap();
    let (f, sol) = (dir.path().join("a.psync"), dir.path().join("a.sol"));
    generate(&f, &LAC, "7");
    let o = permsync(&["solve", "--input", f.to_str().unwrap(), "--algo", "irgcl-p", "--out", sol.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("error 0.000000"), "{}", stdout(&o));
    let text = std::fs::read_to_string(sol).unwrap();
    assert!(text.starts_with("PSYNC 1"));
    assert!(text.contains("SOLUTION"));
}

#[test]
fn cemp_init_writes_affinity_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (f, csv) = (dir.path().join("s.psync"), dir.path().join("a.csv"));
    generate(&f, &["--model", "lac", "--n", "12", "--m", "5", "--nc", "1", "--mc", "6"], "3");
    let o = permsync(&["solve", "--input", f.to_str().unwrap(), "--algo", "cemp-init", "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,affinity"));
    let rows: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(rows.len(), 66);
    assert!(rows.iter().all(|a| (0.0..=1.0).contains(a)));
}

#[test]
fn benchmark_writes_both_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = permsync(&[
        "benchmark", "--model", "lbc", "--n", "20", "--m", "5", "--nc", "1", "--mc", "10", "--algos", "spectral,irgcl-s",
        "--trials", "3", "--sweep-param", "nc", "--sweep-values", "1,2", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let raw = std::fs::read_to_string(&out).unwrap();
    assert_eq!(raw.lines().count(), 1 + 2 * 2 * 3);
    let agg = std::fs::read_to_string(dir.path().join("run.aggregate.csv")).unwrap();
    assert_eq!(agg.lines().count(), 1 + 2 * 2);
}

#[test]
fn verify_exit_codes() {
    let o = permsync(&["verify", "--suite", "prop42", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("prop42: pass"));
    let o = permsync(&["verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn usage_and_runtime_errors() {
    assert_eq!(permsync(&[]).status.code(), Some(64));
    assert_eq!(permsync(&["solve", "--algo", "bogus", "--input", "x"]).status.code(), Some(64));
    // Missing model parameter.
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.psync");
    let o = permsync(&["generate", "--model", "uniform", "--n", "5", "--m", "3", "--out", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
    // Unreadable input.
    let o = permsync(&["solve", "--input", dir.path().join("missing").to_str().unwrap(), "--algo", "ppm"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_problem_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.psync");
    std::fs::write(&f, "PSYNC 2\n").unwrap();
    let o = permsync(&["solve", "--input", f.to_str().unwrap(), "--algo", "spectral"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!o.stderr.is_empty());
}
