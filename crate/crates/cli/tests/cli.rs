use std::path::Path;
use std::process::{Command, Output};

fn wcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_sorted_rows_with_bounds() {
    let o = wcg(&["run", "--strategy", "pm-complete", "--n", "40,24..32:8", "--seeds", "2,0", "--strict"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "schema,strategy,client,n,b,seed,real_rounds,fake_rounds,certificate_valid,probes_failed,bound,error"
    );
    let keys: Vec<(usize, u64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[8], "true");
            let n: usize = f[3].parse().unwrap();
            assert!(f[6].parse::<usize>().unwrap() <= n / 2 + 1);
            assert_eq!(f[10].parse::<f64>().unwrap(), (n / 2 + 1) as f64);
            (n, f[5].parse().unwrap())
        })
        .collect();
    assert_eq!(keys, vec![(24, 0), (24, 2), (32, 0), (32, 2), (40, 0), (40, 2)]);
}

#[test]
fn same_seed_gives_identical_output() {
    let args = ["run", "--strategy", "ham-unbiased", "--client", "anti-structure", "--n", "40..60:10", "--seeds", "0..3"];
    assert_eq!(wcg(&args).stdout, wcg(&args).stdout);
}

#[test]
fn json_table_is_versioned() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.json");
    let o = wcg(&["run", "--strategy", "path-factor:3", "--n", "30", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rows"][0]["real_rounds"], 20);
}

#[test]
fn strict_mode_fails_on_forfeits() {
    let args = ["run", "--strategy", "random-offers", "--n", "6", "--seeds", "0"];
    assert!(wcg(&args).status.success());
    let mut strict = args.to_vec();
    strict.push("--strict");
    let o = wcg(&strict);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_ids_are_rejected() {
    assert_eq!(wcg(&["run", "--strategy", "nope", "--n", "10"]).status.code(), Some(2));
    assert_eq!(wcg(&["run", "--strategy", "pm-complete", "--client", "nope", "--n", "10"]).status.code(), Some(2));
    let o = wcg(&["run", "--strategy", "triangle-factor", "--oracle", "exact-solver", "--n", "150"]);
    assert_eq!(o.status.code(), Some(2));
}

fn transcript(dir: &Path) -> std::path::PathBuf {
    let o = wcg(&[
        "run",
        "--strategy",
        "ham-unbiased",
        "--n",
        "40",
        "--seeds",
        "3",
        "--transcripts",
        dir.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let entry = std::fs::read_dir(dir).unwrap().next().unwrap().unwrap();
    entry.path()
}

#[test]
fn verify_accepts_fresh_and_rejects_tampered_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let path = transcript(dir.path());
    let o = wcg(&["verify", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("clean"));

    let mut t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let pick = &mut t["rounds"][4]["pick"];
    *pick = serde_json::json!(1 - pick.as_u64().unwrap());
    let bad = dir.path().join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&t).unwrap()).unwrap();
    let o = wcg(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("divergence"));
}

#[test]
fn replay_prints_rounds_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = transcript(dir.path());
    let o = wcg(&["replay", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("certificate: hamilton-cycle (valid)"), "{text}");
    assert!(text.lines().count() > 40);
}

#[test]
fn solve_named_and_file_games() {
    assert!(stdout(&wcg(&["solve", "single"])).starts_with("tau: 1\n"));
    assert!(stdout(&wcg(&["solve", "connectivity:3"])).starts_with("tau: 2\n"));
    assert!(stdout(&wcg(&["solve", "matching:4"])).starts_with("tau: unwinnable\n"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("game.json");
    std::fs::write(&file, r#"{"universe": 3, "bias": 1, "sets": [[0, 1], [1, 2], [0, 2]]}"#).unwrap();
    let o = wcg(&["solve", file.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tau"]["rounds"], 2);
    assert!(v["states_visited"].as_u64().unwrap() > 0);
}
