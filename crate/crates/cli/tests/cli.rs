use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dynexplore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynexplore"))
        .args(args)
        .env_remove("DYNEXPLORE_TRACE_DIR")
        .output()
        .expect("binary runs")
}

fn dynexplore_line(line: &str) -> Output {
    dynexplore(&line.split_whitespace().collect::<Vec<_>>())
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn row<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find(|l| l.starts_with(key)).map(|l| l[key.len()..].trim()).unwrap_or("")
}

fn record_run(dir: &Path, extra: &[&str]) -> String {
    let path = dir.join("run.trace");
    let p = path.to_str().unwrap();
    let mut args = vec!["run", "--n", "6", "--T", "2", "--seed", "4", "--rounds", "40", "--trace", p];
    args.extend_from_slice(extra);
    let out = dynexplore(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(&path).unwrap()
}

#[test]
fn ct_impossibility_example_never_reaches_target() {
    let out = dynexplore_line(
        "run --n 10 --T 3 --placement C0 --adversary ct-impossibility --algorithm exp-algo --rounds 20000",
    );
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(row(&text, "target visited"), "false");
    assert_eq!(row(&text, "unvisited"), "9");
    assert_eq!(row(&text, "rounds run"), "20000");
}

#[test]
fn random_ct_example_reports_coverage() {
    let out =
        dynexplore_line("run --n 10 --T 3 --agents 37 --placement C0-prime --adversary random-ct --algorithm exp-algo");
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(row(&text, "covered at").parse::<u64>().is_ok(), "{text}");
    assert_eq!(row(&text, "unvisited"), "");
    assert!(text.contains("coverage       pass"));
}

#[test]
fn interval_flip_example_stays_undispersed() {
    let out = dynexplore_line("run --n 9 --p 6 --adversary interval-flip --algorithm exp-algo --ell_v 1 --ell_c 0");
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(!row(&text, "unvisited").is_empty(), "{text}");
    assert!(text.contains("undispersed    pass"));
    assert!(text.contains("diameter       pass   checks=1000 failures=0 max=6"));
}

#[test]
fn incompatible_pairing_exits_2() {
    let out = dynexplore(&["run", "--n", "10", "--adversary", "ct-portflip", "--ell_v", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ell_v = 0"));
    let out = dynexplore(&["run", "--n", "10", "--agents", "5", "--placement", "C0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dynexplore(&["run", "--n", "10", "--algorithm", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replay_of_fresh_run_matches() {
    let dir = tempfile::tempdir().unwrap();
    record_run(dir.path(), &[]);
    let path = dir.path().join("run.trace");
    let out = dynexplore(&["replay", path.to_str().unwrap()]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(row(&text, "divergences"), "0");
    let out = dynexplore(&["verify", path.to_str().unwrap()]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(row(&text, "re-simulation").starts_with("identical"));
}

#[test]
fn same_seed_gives_same_trace() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(record_run(a.path(), &[]), record_run(b.path(), &[]));
    assert_ne!(record_run(a.path(), &[]), record_run(b.path(), &["--seed", "5"]));
}

fn corrupt(dir: &Path, trace: &str, pick: &str, edit: impl Fn(&str) -> String) -> Output {
    let mut done = false;
    let lines: Vec<String> = trace
        .lines()
        .map(|l| {
            if !done && l.starts_with(pick) {
                done = true;
                edit(l)
            } else {
                l.to_string()
            }
        })
        .collect();
    assert!(done, "no {pick} line");
    let path = dir.join("bad.trace");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    dynexplore(&["replay", path.to_str().unwrap()])
}

#[test]
fn corrupted_move_is_a_conservation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let trace = record_run(dir.path(), &[]);
    let out = corrupt(dir.path(), &trace, "MOVE|", |l| {
        let mut f: Vec<String> = l.split(',').map(String::from).collect();
        let to: usize = f[3].parse().unwrap();
        f[3] = ((to + 1) % 6).to_string();
        f.join(",")
    });
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(1), "{text}");
    assert!(text.contains("conservation   FAIL"), "{text}");
}

#[test]
fn corrupted_port_is_a_snapshot_failure() {
    let dir = tempfile::tempdir().unwrap();
    let trace = record_run(dir.path(), &[]);
    let out = corrupt(dir.path(), &trace, "SNAP|", |l| {
        let (head, rest) = l.split_once(':').unwrap();
        let (_, tail) = rest.split_once(',').unwrap();
        format!("{head}:9,{tail}")
    });
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(1), "{text}");
    assert!(text.contains("snapshot       FAIL"), "{text}");
}

#[test]
fn malformed_trace_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let trace = record_run(dir.path(), &[]);
    for bad in ["", "not a trace\n"] {
        let path = dir.path().join("m.trace");
        fs::write(&path, bad).unwrap();
        assert_eq!(dynexplore(&["replay", path.to_str().unwrap()]).status.code(), Some(2));
    }
    let out = corrupt(dir.path(), &trace, "CONF|", |l| format!("{l};;;"));
    assert_eq!(out.status.code(), Some(2));
    let out = corrupt(dir.path(), &trace, "SNAP|", |_| "SNAP|x|0-1".into());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(dynexplore(&["replay", "/nonexistent/trace"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# demo\nn=6\nT=2\nrounds=30\nadversary=random-ct\nseed=1\nkeep_going=true\n").unwrap();
    let c = cfg.to_str().unwrap();
    let text = stdout(&dynexplore(&["run", "--config", c]));
    assert_eq!(row(&text, "rounds run"), "30");
    assert!(row(&text, "run").ends_with("n=6 T=2 seed=1"), "{text}");
    let text = stdout(&dynexplore(&["run", "--config", c, "--rounds", "12", "--seed", "2"]));
    assert_eq!(row(&text, "rounds run"), "12");
    assert!(row(&text, "run").ends_with("seed=2"), "{text}");
}

#[test]
fn trace_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dynexplore"))
        .args(["run", "--n", "6", "--T", "2", "--rounds", "10", "--seed", "3"])
        .env("DYNEXPLORE_TRACE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = dir.path().join("random-ct-exp-algo-n6-T2-s3.trace");
    assert!(fs::read_to_string(written).unwrap().starts_with("HEADER|0|"));
}

#[test]
fn adversary_schedule_replays_as_file_adversary() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("s.trace");
    let s = sched.to_str().unwrap();
    let out = dynexplore(&["adversary", "--n", "6", "--T", "2", "--rounds", "25", "--seed", "9", "--trace", s]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&sched).unwrap();
    assert!(text.lines().all(|l| l.starts_with("HEADER|") || l.starts_with("SNAP|")));
    assert_eq!(text.lines().filter(|l| l.starts_with("SNAP|")).count(), 25);

    let a = dir.path().join("a.trace");
    let b = dir.path().join("b.trace");
    let direct = ["run", "--n", "6", "--T", "2", "--rounds", "25", "--seed", "9", "--trace", a.to_str().unwrap()];
    assert_eq!(dynexplore(&direct).status.code(), Some(0));
    let replayed = [
        "run",
        "--n",
        "6",
        "--T",
        "2",
        "--rounds",
        "25",
        "--adversary",
        "replay-file",
        "--schedule",
        s,
        "--trace",
        b.to_str().unwrap(),
    ];
    assert_eq!(dynexplore(&replayed).status.code(), Some(0));
    let snaps = |p: &Path| -> Vec<String> {
        fs::read_to_string(p).unwrap().lines().filter(|l| l.starts_with("SNAP|")).map(String::from).collect()
    };
    assert_eq!(snaps(&a), snaps(&b));
    assert_eq!(dynexplore(&["verify", b.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn sweep_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let traces = dir.path().join("traces");
    let (c, t) = (csv.to_str().unwrap(), traces.to_str().unwrap());
    let out =
        dynexplore_line(&format!("sweep --n 6,8 --T 2,3 --seeds 0..3 --rounds 50 --jobs 2 --csv {c} --trace-dir {t}"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[0].starts_with("n,T,seed,"));
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 14));
    assert_eq!(fs::read_dir(&traces).unwrap().count(), 12);
}
