use std::path::Path;
use std::process::{Command, Output};

fn immigrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_immigrate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn line_count(p: &Path) -> usize {
    std::fs::read_to_string(p).unwrap().lines().count()
}

#[test]
fn synth_writes_two_hundred_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("synth.csv");
    let o = immigrate(&["synth", "--n", "100", "--noise", "0.10", "--seed", "7", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(line_count(&out), 201);
}

#[test]
fn train_then_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("synth.csv");
    let model = dir.path().join("model.json");
    let preds = dir.path().join("preds.csv");
    assert!(immigrate(&["synth", "--n", "30", "--out", path(&data)]).status.success());
    let o = immigrate(&[
        "train", "--data", path(&data), "--label", "class", "--learner", "immigrate", "--sigma", "1", "--out",
        path(&model),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("training accuracy"));
    let o = immigrate(&["predict", "--model", path(&model), "--data", path(&data), "--out", path(&preds)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(line_count(&preds), line_count(&data));

    let heat = dir.path().join("w.csv");
    assert!(immigrate(&["heatmap", "--model", path(&model), "--out", path(&heat)]).status.success());
    assert_eq!(line_count(&heat), 3);
}

#[test]
fn cv_report_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("synth.csv");
    assert!(immigrate(&["synth", "--n", "20", "--seed", "3", "--out", path(&data)]).status.success());
    let ra = dir.path().join("a.json");
    let rb = dir.path().join("b.json");
    for (learner, out) in [("immigrate", &ra), ("relief", &rb)] {
        let o = immigrate(&[
            "cv", "--data", path(&data), "--learner", learner, "--k", "5", "--repeats", "2", "--seed", "1", "--out",
            path(out), "--jobs", "1",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&ra).unwrap()).unwrap();
    assert_eq!(report["per_trial_accuracies"].as_array().unwrap().len(), 10);

    let verdict = |a: &Path, b: &Path| {
        let o = immigrate(&["compare", "--a", path(a), "--b", path(b)]);
        assert!(o.status.success());
        String::from_utf8_lossy(&o.stdout).split_whitespace().next().unwrap().to_string()
    };
    let ab = verdict(&ra, &rb);
    let ba = verdict(&rb, &ra);
    let mirrored = match ab.as_str() {
        "win" => "loss",
        "loss" => "win",
        _ => "tie",
    };
    assert_eq!(ba, mirrored);
}

#[test]
fn same_flags_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    immigrate(&["synth", "--seed", "5", "--out", path(&a)]);
    immigrate(&["synth", "--seed", "5", "--out", path(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_two_and_data_errors_exit_one() {
    assert_eq!(immigrate(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(immigrate(&["synth", "--bogus"]).status.code(), Some(2));
    let o = immigrate(&["train", "--data", "/nonexistent.csv", "--out", "/tmp/x.json"]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert_eq!(stderr.trim().lines().count(), 1);
}

#[test]
fn version_flag_prints_semver() {
    let o = immigrate(&["--version"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
}
