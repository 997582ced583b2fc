use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tsrsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsrsr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, out: &Path) -> String {
    let cfg = dir.join("exp.toml");
    fs::write(
        &cfg,
        format!(
            r#"objective.name = "bird"
candidates.count = 150
run.m = 2
run.T = 3
run.n_init = 4
run.trials = 2
algos = ["tsrsr", "ucbpe"]
theory.rho_subsets = 10
out.dir = "{}"
"#,
            out.display()
        ),
    )
    .unwrap();
    cfg.to_string_lossy().into_owned()
}

fn trial_files(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("trial_"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn run_summarize_plot_and_audit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("results");
    let cfg = write_config(tmp.path(), &out);
    let o = tsrsr(&["run", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(trial_files(&out).len(), 4);
    let dir = out.to_string_lossy();

    let s = tsrsr(&["summarize", &dir]);
    assert_eq!(code(&s), 0);
    let text = stdout(&s);
    assert!(text.starts_with("algo,trials,mean,std_error,rank,ratio\n"));
    assert_eq!(text.lines().count(), 3);
    assert_eq!(code(&tsrsr(&["summarize", &dir, "--at-iter", "2"])), 0);
    assert_eq!(code(&tsrsr(&["summarize", &dir, "--at-iter", "9"])), 1);

    let plots = tmp.path().join("plots");
    let p = tsrsr(&["plotdata", &dir, "--out", &plots.to_string_lossy()]);
    assert_eq!(code(&p), 0);
    assert!(plots.join("curve_tsrsr.csv").exists());
    assert!(plots.join("curve_ucbpe.csv").exists());

    let v = tsrsr(&["verify-theory", &dir, "--delta", "0.05"]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).starts_with("trial,rho_hat,bound,slots,violation_fraction\n"));
    assert_eq!(code(&tsrsr(&["verify-theory", &dir, "--delta", "1.5"])), 1);
}

#[test]
fn manifest_replay_matches_original() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    let cfg = write_config(tmp.path(), &first);
    assert_eq!(code(&tsrsr(&["run", &cfg, "--serial"])), 0);
    let manifest = first.join("manifest.txt");
    let o = tsrsr(&["run", &manifest.to_string_lossy(), "--out", &second.to_string_lossy()]);
    assert_eq!(code(&o), 0);
    assert_eq!(trial_files(&first), trial_files(&second));
}

#[test]
fn lemma_checks_print_a_table() {
    let o = tsrsr(&["check-lemmas", "--d", "10", "--draws", "500", "--delta", "0.1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lemma,d,draws,statistic,std_error,bound,pass");
    assert!(lines[1].starts_with("max_ratio,10,500,"));
    assert!(lines[2].starts_with("max_square,10,500,"));
    let one = tsrsr(&["check-lemmas", "--d", "1", "--draws", "100", "--cov", "independent"]);
    assert_eq!(stdout(&one).lines().count(), 2);
    assert_eq!(code(&tsrsr(&["check-lemmas", "--d", "5", "--delta", "2"])), 1);
}

#[test]
fn failures_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&tsrsr(&["frobnicate"])), 1);
    assert_eq!(code(&tsrsr(&["--help"])), 0);
    assert_eq!(code(&tsrsr(&["run", "/nonexistent/exp.toml"])), 3);
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "objective.name = \"bird\"\nrun.nonsense = 3\n").unwrap();
    assert_eq!(code(&tsrsr(&["run", &bad.to_string_lossy()])), 1);
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(code(&tsrsr(&["summarize", &empty.to_string_lossy()])), 1);
    assert_eq!(code(&tsrsr(&["summarize", "/nonexistent/results"])), 3);
}

#[test]
fn shipped_configs_parse_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = tsrsr::bench::ExperimentConfig::from_file(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap();
        n += 1;
    }
    assert!(n >= 5);
}
