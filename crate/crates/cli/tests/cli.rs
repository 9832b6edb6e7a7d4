use std::process::{Command, Output};

fn qnbt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnbt")).args(args).env_remove("QNBT_SEED").output().expect("binary runs")
}

/// Drops the timing column so two runs can be compared.
fn without_time(csv: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(csv)
        .lines()
        .map(|l| {
            let mut fields: Vec<&str> = l.split(',').collect();
            fields.remove(5);
            fields.join(",")
        })
        .collect()
}

#[test]
fn run_all_is_reproducible_apart_from_timings() {
    let a = qnbt(&["run", "all", "--seed", "7"]);
    let b = qnbt(&["run", "all", "--seed", "7"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let (ta, tb) = (without_time(&a.stdout), without_time(&b.stdout));
    assert!(ta.len() > 50);
    assert_eq!(ta[0], "experiment,algorithm,iterations,f_final,grad_norm_final,f_evals,termination");
    assert_eq!(ta, tb);
}

#[test]
fn seed_can_come_from_the_environment() {
    let args = ["run", "griewank-stochastic-n10-var1", "--max-iters", "5"];
    let flag = qnbt(&[&args[..], &["--seed", "3"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_qnbt")).args(args).env("QNBT_SEED", "3").output().unwrap();
    let other = qnbt(&[&args[..], &["--seed", "4"]].concat());
    assert_eq!(without_time(&flag.stdout), without_time(&env.stdout));
    assert_ne!(without_time(&flag.stdout), without_time(&other.stdout));
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["run", "saddle-f9", "--format", "xml"][..],
        &["run", "no-such-experiment"],
        &["run", "saddle-f9", "--algos", "V1,BOGUS"],
    ] {
        let out = qnbt(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn list_shows_registered_experiments() {
    let out = qnbt(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("protein-10mer\tdim=8\tV1,V2,Newton,NQN,UTB_GD")));
    assert!(text.contains("(heavy)"));
}

#[test]
fn out_writes_a_file_in_the_requested_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f9.jsonl");
    let out = qnbt(&["run", "saddle-f9", "--algos", "V1,Newton", "--format", "jsonlines", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("\"algorithm\":\"V1\"") && lines[1].contains("\"algorithm\":\"Newton\""));
}

#[test]
fn markdown_table() {
    let out = qnbt(&["run", "bench-f6", "--format", "md", "--algos", "V2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().starts_with("| bench-f6 | V2 |"));
}

#[test]
fn check_runs_selected_criteria() {
    let out = qnbt(&["check", "--only", "8,9"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS]  8 ") && text.contains("[PASS]  9 "), "{text}");
    assert_eq!(qnbt(&["check", "--only", "99"]).status.code(), Some(1));
}
