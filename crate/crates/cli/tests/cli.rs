use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/mini_corpus/manifest.json")
}

fn interview(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interview")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const LABELS: [&str; 9] = [
    "EyeContact", "SpeakingRate", "Engaged", "Pauses", "Calmness", "NotStressed", "Focused", "Authentic", "NotAwkward",
];

#[test]
fn extract_writes_three_tables_of_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("features");
    let run = interview(&["extract", "--manifest", p(&fixture()), "--out", p(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    for name in ["audio.csv", "video.csv", "lexical.csv"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert_eq!(text.lines().count(), 1 + 6, "{name}");
    }
    assert!(out.join("cache.json").exists());
}

#[test]
fn predict_with_wrong_feature_width_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let models = dir.path().join("models");
    let train = interview(&[
        "train", "--manifest", p(&fixture()), "--out", p(&models), "--label", "SpeakingRate", "--selector", "kbest",
    ]);
    assert!(train.status.success(), "{}", String::from_utf8_lossy(&train.stderr));
    assert!(models.join("SpeakingRate.model.json").exists());

    let cfg = dir.path().join("wide.json");
    fs::write(&cfg, r#"{"features": {"audio": {"include_std": true}}}"#).unwrap();
    let wide = dir.path().join("wide");
    let ex = interview(&["extract", "--manifest", p(&fixture()), "--out", p(&wide), "--config", p(&cfg)]);
    assert!(ex.status.success(), "{}", String::from_utf8_lossy(&ex.stderr));

    let run = interview(&["predict", "--models", p(&models), "--record", "rec_01", "--features", p(&wide)]);
    assert_eq!(run.status.code(), Some(2));
    let err = String::from_utf8_lossy(&run.stderr);
    let narrow = interview(&["extract", "--manifest", p(&fixture()), "--out", p(&dir.path().join("narrow"))]);
    assert!(narrow.status.success());
    let width = |d: &Path| {
        ["audio.csv", "video.csv", "lexical.csv"]
            .iter()
            .map(|f| fs::read_to_string(d.join(f)).unwrap().lines().next().unwrap().split(',').count() - 1)
            .sum::<usize>()
    };
    let (want, got) = (width(&dir.path().join("narrow")), width(&wide));
    assert!(err.contains(&format!("expected {want}")) && err.contains(&format!("got {got}")), "{err}");

    let ok = interview(&[
        "predict", "--models", p(&models), "--record", "rec_02", "--manifest", p(&fixture()),
        "--out", p(&dir.path().join("pred.json")),
    ]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let pred: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("pred.json")).unwrap()).unwrap();
    assert_eq!(pred["record_id"], "rec_02");
}

#[test]
fn report_on_all_sevens_is_all_strong() {
    let dir = tempfile::tempdir().unwrap();
    let labels: serde_json::Map<String, serde_json::Value> = LABELS
        .iter()
        .map(|l| (l.to_string(), serde_json::json!({"class": 7, "features": [{"name": "pitch_hz_mean", "z": 1.5}]})))
        .collect();
    let preds = serde_json::json!({"record_id": "rec_01", "labels": labels});
    let path = dir.path().join("pred.json");
    fs::write(&path, preds.to_string()).unwrap();
    let out = dir.path().join("report");
    let run = interview(&["report", "--predictions", p(&path), "--out", p(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let entries = report["labels"].as_array().unwrap();
    assert_eq!(entries.len(), 9);
    assert!(entries.iter().all(|e| e["band"] == "strong"), "{report}");
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("strong"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(interview(&["extract", "--bogus"]).status.code(), Some(1));
    assert_eq!(interview(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(interview(&["evaluate", "--manifest", "m.json", "--out", "o", "--model", "knn"]).status.code(), Some(1));
    assert_eq!(interview(&["--help"]).status.code(), Some(0));
    let missing = interview(&["extract", "--manifest", "/nonexistent/manifest.json", "--out", "/tmp/x"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn evaluate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture();
    let mut outputs = Vec::new();
    for (i, extra) in [[""; 0].as_slice(), ["--sequential"].as_slice()].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let mut args = vec![
            "evaluate", "--manifest", p(&manifest), "--out", p(&out), "--model", "rf", "--selector", "kbest",
            "--modalities", "audio,video", "--label", "all", "--seed", "11",
        ];
        args.extend(extra.iter());
        let run = interview(&args);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        outputs.push(out);
    }
    for f in [
        "results.csv", "run_manifest.json", "table1_best_per_model.csv", "table2_modality_combinations_rf.csv",
        "table3_single_modalities_rf.csv", "table4_selectors.csv",
    ] {
        assert_eq!(fs::read(outputs[0].join(f)).unwrap(), fs::read(outputs[1].join(f)).unwrap(), "{f}");
    }
    let t1 = fs::read_to_string(outputs[0].join("table1_best_per_model.csv")).unwrap();
    assert_eq!(t1.lines().count(), 10);
}
