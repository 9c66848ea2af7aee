use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sceneeval_cli::report::read_scene_reports;
use sceneeval_cli::{aggregate, AggregateReport};
use sceneeval_core::metrics::MetricSummary;

fn suite() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/suite")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sceneeval"))
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap() {
        let p = e.unwrap().path();
        let dest = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_dir(&p, &dest);
        } else {
            std::fs::copy(&p, &dest).unwrap();
        }
    }
}

fn evaluate(extra: &[&str]) -> Output {
    let s = suite();
    let mut cmd = bin();
    cmd.arg("evaluate")
        .args(["--dataset", s.join("dataset").to_str().unwrap()])
        .args(["--scenes", s.join("scenes").to_str().unwrap()])
        .args(["--judge", "mock", "--judge-table", s.join("judge.tsv").to_str().unwrap()])
        .args(["--relation-samples", "200", "--oob-samples", "200"])
        .args(extra);
    cmd.output().unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn aggregate_of(dir: &Path) -> AggregateReport {
    serde_json::from_str(&read(&dir.join("aggregate.json"))).unwrap()
}

fn report_files(dir: &Path) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(dir.join("scenes"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), read(&p))
        })
        .collect();
    out.sort();
    out
}

#[test]
fn mock_run_writes_all_outputs_with_two_scenes_per_difficulty() {
    let out = tempfile::tempdir().unwrap();
    let o = evaluate(&["--out", out.path().to_str().unwrap(), "--run-name", "a", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = out.path().join("a");
    for f in ["aggregate.json", "aggregate.csv", "resources.csv", "config.json"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let agg = aggregate_of(&dir);
    let groups: Vec<(&str, usize)> = agg.rows.iter().map(|r| (r.group.as_str(), r.scenes)).collect();
    assert_eq!(groups, [("easy", 2), ("medium", 2), ("hard", 2), ("overall", 6)]);
    assert_eq!(agg.seed, 5);
    assert!(agg.skipped.is_empty() && agg.failed.is_empty());
    assert_eq!(report_files(&dir).len(), 6);
    let csv = read(&dir.join("aggregate.csv"));
    assert!(csv.starts_with("group,scenes,cnt,atr,oor,oar,col_ob,col_sc,sup,nav,acc,oob,seed\n"));
    assert_eq!(String::from_utf8_lossy(&o.stdout), csv);
    assert_eq!(read(&dir.join("resources.csv")).lines().count(), 7);
    assert!(!read(&dir.join("config.json")).contains("api_key"));
}

#[test]
fn repeated_runs_are_byte_identical_at_any_width() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    assert_eq!(evaluate(&["--out", o, "--run-name", "one", "--jobs", "1"]).status.code(), Some(0));
    assert_eq!(evaluate(&["--out", o, "--run-name", "four", "--jobs", "4"]).status.code(), Some(0));
    let (a, b) = (out.path().join("one"), out.path().join("four"));
    for f in ["aggregate.json", "aggregate.csv"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
    assert_eq!(report_files(&a), report_files(&b));
}

#[test]
fn aggregate_matches_means_recomputed_from_scene_files() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(evaluate(&["--out", out.path().to_str().unwrap(), "--run-name", "r"]).status.code(), Some(0));
    let dir = out.path().join("r");
    let agg = aggregate_of(&dir);
    let reports = read_scene_reports(&dir).unwrap();
    for row in &agg.rows {
        let members: Vec<_> =
            reports.iter().filter(|r| row.group == "overall" || r.difficulty.as_str() == row.group).collect();
        for (i, col) in MetricSummary::COLUMNS.iter().enumerate() {
            let vals: Vec<f64> = members.iter().filter_map(|r| r.summary().values()[i]).collect();
            let expect = (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64);
            match (expect, row.means.values()[i]) {
                (Some(e), Some(g)) => assert!((e - g).abs() <= 1e-9, "{} {col}: {e} vs {g}", row.group),
                (e, g) => assert_eq!(e, g, "{} {col}", row.group),
            }
        }
    }
    // overall equals the scene-count weighted mean of the difficulty means
    let overall = agg.row("overall").unwrap();
    for i in 0..10 {
        let (mut acc, mut n) = (0.0, 0usize);
        for r in agg.rows.iter().filter(|r| r.group != "overall") {
            if let Some(m) = r.means.values()[i] {
                acc += m * r.scenes_per_metric[i] as f64;
                n += r.scenes_per_metric[i];
            }
        }
        if let Some(g) = overall.means.values()[i] {
            assert!((acc / n as f64 - g).abs() <= 1e-9);
        }
    }

    let o = bin().args(["report", dir.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout), read(&dir.join("aggregate.csv")));
    let o = bin().args(["report", dir.to_str().unwrap(), "--format", "json"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&o.stdout), read(&dir.join("aggregate.json")));
}

#[test]
fn replaying_a_recorded_transcript_reproduces_the_run() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let transcript = out.path().join("t.jsonl");
    let t = transcript.to_str().unwrap();
    assert_eq!(evaluate(&["--out", o, "--run-name", "rec", "--transcript", t]).status.code(), Some(0));
    assert!(transcript.is_file());
    let s = suite();
    let replay = bin()
        .arg("evaluate")
        .args(["--dataset", s.join("dataset").to_str().unwrap()])
        .args(["--scenes", s.join("scenes").to_str().unwrap()])
        .args(["--judge", "replay", "--transcript", t])
        .args(["--relation-samples", "200", "--oob-samples", "200"])
        .args(["--out", o, "--run-name", "rep"])
        .output()
        .unwrap();
    assert_eq!(replay.status.code(), Some(0), "{}", String::from_utf8_lossy(&replay.stderr));
    let (a, b) = (aggregate_of(&out.path().join("rec")), aggregate_of(&out.path().join("rep")));
    assert_eq!((a.judge.as_str(), b.judge.as_str()), ("mock", "replay"));
    assert_eq!(a.rows, b.rows);
    assert_eq!(read(&out.path().join("rec/aggregate.csv")), read(&out.path().join("rep/aggregate.csv")));
    assert_eq!(report_files(&out.path().join("rec")), report_files(&out.path().join("rep")));
}

#[test]
fn replay_with_missing_answers_is_a_partial_failure() {
    let out = tempfile::tempdir().unwrap();
    let t = out.path().join("empty.jsonl");
    std::fs::write(&t, "").unwrap();
    let s = suite();
    let o = bin()
        .arg("evaluate")
        .args(["--dataset", s.join("dataset").to_str().unwrap()])
        .args(["--scenes", s.join("scenes").to_str().unwrap()])
        .args(["--judge", "replay", "--transcript", t.to_str().unwrap()])
        .args(["--relation-samples", "50", "--oob-samples", "50"])
        .args(["--out", out.path().to_str().unwrap(), "--run-name", "r"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let agg = aggregate_of(&out.path().join("r"));
    assert!(agg.scenes.iter().all(|s| s.errors > 0));
}

#[test]
fn missing_and_broken_scenes() {
    let work = tempfile::tempdir().unwrap();
    copy_dir(&suite(), work.path());
    std::fs::remove_dir_all(work.path().join("scenes/living_01")).unwrap();
    std::fs::write(work.path().join("scenes/office_01/scene.json"), "{not json").unwrap();
    let w = work.path();
    let o = bin()
        .arg("evaluate")
        .args(["--dataset", w.join("dataset").to_str().unwrap()])
        .args(["--scenes", w.join("scenes").to_str().unwrap()])
        .args(["--judge", "mock", "--judge-table", w.join("judge.tsv").to_str().unwrap()])
        .args(["--relation-samples", "50", "--oob-samples", "50"])
        .args(["--out", w.join("runs").to_str().unwrap(), "--run-name", "r"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let agg = aggregate_of(&w.join("runs/r"));
    let skipped: Vec<&str> = agg.skipped.iter().map(|s| s.entry_id.as_str()).collect();
    let failed: Vec<&str> = agg.failed.iter().map(|s| s.entry_id.as_str()).collect();
    assert_eq!(skipped, ["living_01"]);
    assert_eq!(failed, ["office_01"]);
    assert_eq!(agg.scenes.len(), 4);
    assert_eq!(agg.row("overall").unwrap().scenes, 4);
}

#[test]
fn config_file_and_skip_list() {
    let work = tempfile::tempdir().unwrap();
    let s = suite();
    let cfg = work.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "# fixture run\ndataset = {}\nscenes = {}\njudge = mock\njudge_table = {}\nseed = 11\nrelation_samples = 50\noob_samples = 50\nskip = kids_01, studio_01\nout = {}\nrun_name = c\n",
            s.join("dataset").display(),
            s.join("scenes").display(),
            s.join("judge.tsv").display(),
            work.path().display()
        ),
    )
    .unwrap();
    let o = bin().args(["evaluate", "--config", cfg.to_str().unwrap(), "--seed", "12"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let agg = aggregate_of(&work.path().join("c"));
    assert_eq!(agg.seed, 12);
    assert_eq!(agg.skipped.len(), 2);
    assert!(agg.row("hard").is_none());
    assert!(read(&work.path().join("c/scenes/bedroom_01.json")).contains("\"seed\": 12"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let work = tempfile::tempdir().unwrap();
    let w = work.path().to_str().unwrap();
    let s = suite();
    let ds = s.join("dataset");
    let sc = s.join("scenes");
    let cases: Vec<Vec<String>> = vec![
        vec!["--scenes".into(), sc.display().to_string()],
        vec!["--dataset".into(), format!("{w}/nope"), "--scenes".into(), sc.display().to_string()],
        vec![
            "--dataset".into(),
            ds.display().to_string(),
            "--scenes".into(),
            sc.display().to_string(),
            "--judge".into(),
            "oracle".into(),
        ],
        vec![
            "--dataset".into(),
            ds.display().to_string(),
            "--scenes".into(),
            sc.display().to_string(),
            "--judge".into(),
            "mock".into(),
        ],
        vec![
            "--dataset".into(),
            ds.display().to_string(),
            "--scenes".into(),
            sc.display().to_string(),
            "--judge".into(),
            "replay".into(),
            "--transcript".into(),
            format!("{w}/none.jsonl"),
        ],
        vec!["--config".into(), format!("{w}/missing.cfg")],
        vec!["--bogus-flag".into()],
    ];
    for args in cases {
        let o = bin().arg("evaluate").args(&args).args(["--out", w]).output().unwrap();
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = bin()
        .arg("evaluate")
        .args(["--dataset", ds.to_str().unwrap(), "--scenes", sc.to_str().unwrap(), "--judge", "remote"])
        .env_remove(sceneeval_core::judge::API_KEY_ENV)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(sceneeval_core::judge::API_KEY_ENV));
}

#[test]
fn validate_dataset_reports_counts_and_round_trip() {
    let o = bin().args(["validate-dataset", suite().join("dataset").to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout), "easy\t2\nmedium\t2\nhard\t2\ntotal\t6\n");

    let work = tempfile::tempdir().unwrap();
    copy_dir(&suite().join("dataset"), work.path());
    std::fs::write(work.path().join("easy/bedroom_01/counts.csv"), "eq,1,bed\neq, 1,lamp\n").unwrap();
    let o = bin().args(["validate-dataset", work.path().to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("counts.csv:2"));

    std::fs::write(work.path().join("easy/bedroom_01/counts.csv"), "approximately,1,bed\n").unwrap();
    let o = bin().args(["validate-dataset", work.path().to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_aggregate_has_header_only_csv() {
    let agg = aggregate(0, "mock", &[], vec![], vec![]);
    assert_eq!(agg.to_csv().lines().count(), 1);
    assert_eq!(agg.to_json(), aggregate(0, "mock", &[], vec![], vec![]).to_json());
}
