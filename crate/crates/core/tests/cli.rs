use std::fs;
use std::process::{Command, Output};

fn cblocks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cblocks"))
        .args(args)
        .env_remove("CBLOCKS_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn counts_b2_level_two() {
    let o = cblocks(&["enum", "--graph", "b2", "--level", "2", "--count-only"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "8");
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let o = cblocks(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn missing_graph_is_usage_error() {
    let o = cblocks(&["graph", "build", "--g", "1", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_member_is_verification_failure() {
    let o = cblocks(&["wt", "check", "--graph", "b1", "--weighting", "0,2@1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cblocks(&["wt", "check", "--graph", "b1", "--weighting", "1,2@2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn budget_exhaustion_exits_two() {
    let o = cblocks(&["--budget", "5", "enum", "--graph", "gamma:0,6", "--level", "3", "--count-only"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn out_files_are_not_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let path = out.to_str().unwrap();
    let build = |extra: &[&str]| {
        let mut args = vec!["graph", "build", "--g", "2", "--n", "1", "--out", path];
        args.extend_from_slice(extra);
        cblocks(&args)
    };
    assert_eq!(build(&[]).status.code(), Some(0));
    assert_eq!(build(&[]).status.code(), Some(2));
    assert_eq!(build(&["--force"]).status.code(), Some(0));
    // the written file is a usable graph
    let o = cblocks(&["enum", "--graph", path, "--level", "2", "--count-only"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn weighting_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let prod = dir.path().join("p.json");
    fs::write(&a, r#"{"graph":"B2","level":2,"w":{"0":0,"1":1,"2":1,"3":2}}"#).unwrap();
    let o = cblocks(&[
        "wt", "mul", "--graph", "b2", "--a", a.to_str().unwrap(), "--b", "2,1,1,0@2", "--out",
        prod.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = cblocks(&["factor", "--graph", "b2", "--weighting", prod.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let f: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(f["validated"], true);
    assert_eq!(f["target"]["level"], 4);
}

#[test]
fn reports_do_not_depend_on_threads() {
    let run = |threads: &str| {
        stdout(&cblocks(&[
            "--threads", threads, "verify", "rel", "--graph", "gamma:2,1", "--dmax", "5",
        ]))
    };
    let one = run("1");
    assert!(one.contains("\"status\": \"pass\""));
    assert_eq!(one, run("4"));
    let gen = |threads: &str| {
        stdout(&cblocks(&[
            "--threads", threads, "--format", "csv", "verify", "gen", "--graph", "gamma:1,2",
            "--lmax", "4",
        ]))
    };
    assert_eq!(gen("1"), gen("3"));
}

#[test]
fn hilbert_uses_the_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cblocks"))
            .args(["hilbert", "--graph", "b2", "--lmax", "3"])
            .env("CBLOCKS_CACHE", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    // brute force over (2a, x, y, 2b): 1, 2, 8, 14
    assert_eq!(stdout(&first), "level,count\n0,1\n1,2\n2,8\n3,14\n");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 4);
    assert_eq!(stdout(&run()), stdout(&first));
}

#[test]
fn config_file_sets_format() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "format = csv\n").unwrap();
    let o = cblocks(&[
        "--config", conf.to_str().unwrap(), "verify", "rel", "--graph", "b1", "--dmax", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("level,elements,pass,fail,budget\n"));
    fs::write(&conf, "colour = blue\n").unwrap();
    let o = cblocks(&["--config", conf.to_str().unwrap(), "b2", "analyze"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repro_all_passes() {
    let o = cblocks(&["repro", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert_eq!(table.lines().count(), 10);
    assert!(table.lines().skip(1).all(|l| l.contains(",pass,")));
}
