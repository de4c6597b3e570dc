//! End-to-end runs of the command layer against temporary files.

use std::path::Path;

use stre::cli::{
    cmd_eval, cmd_finetune, cmd_ingest, cmd_label, cmd_predict, cmd_sweep, cmd_train,
    manifest_path, read_examples, write_examples, CliError, ConfigArgs, InputFormat,
};
use stre::corpus::write_histories_jsonl;
use stre::quality::{DistanceMode, LabeledEdit};
use stre::synth::{revert_history, separable_examples};

const EXPORT: &str = r#"<mediawiki>
  <page>
    <title>Two Edits</title>
    <id>1</id>
    <revision><timestamp>2004-01-01T00:00:00Z</timestamp><text>One sentence.</text></revision>
    <revision><timestamp>2004-01-02T00:00:00Z</timestamp><text>One sentence. Two now.</text></revision>
    <revision><timestamp>2004-01-03T00:00:00Z</timestamp><text>One sentence. Two again.</text></revision>
  </page>
  <page>
    <title>One Edit</title>
    <id>2</id>
    <revision><timestamp>2004-02-01T00:00:00Z</timestamp><text>Alpha.</text></revision>
    <revision><timestamp>2004-02-02T00:00:00Z</timestamp><text>Alpha beta.</text></revision>
  </page>
</mediawiki>"#;

fn micro_overrides(extra: &[&str], seed: u64) -> ConfigArgs {
    let mut set: Vec<String> = vec![
        "epochs=3".into(),
        "batch_size=16".into(),
        "hidden=4".into(),
        "word_embed_dim=8".into(),
        "char_embed_dim=8".into(),
        "attn_context_dim=4".into(),
        "dense_dims=8,4".into(),
        "dropout=0.0".into(),
        "max_words=24".into(),
        "max_chars=48".into(),
    ];
    set.extend(extra.iter().map(|s| s.to_string()));
    ConfigArgs { config: None, set, seed: Some(seed) }
}

#[test]
fn ingest_filters_by_min_edits_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("dump.xml");
    std::fs::write(&input, EXPORT).unwrap();
    let out = dir.path().join("histories.jsonl");

    cmd_ingest(&input, InputFormat::Xml, &out, 2).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "only the 2-edit page passes --min-edits 2");
    assert!(lines[0].contains("Two Edits"));
    assert!(manifest_path(&out).exists());

    // No filter keeps both pages.
    cmd_ingest(&input, InputFormat::Xml, &out, 0).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);
}

#[test]
fn label_emits_edits_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (history, _) = revert_history(9, 10, 3);
    let histories_path = dir.path().join("histories.jsonl");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&histories_path).unwrap());
    write_histories_jsonl(&mut w, &[history]).unwrap();
    drop(w);

    let out = dir.path().join("labeled.jsonl");
    let report = dir.path().join("report.csv");
    cmd_label(&histories_path, &out, Some(&report), DistanceMode::Char).unwrap();

    let labeled: Vec<LabeledEdit> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!labeled.is_empty());
    assert!(labeled.iter().any(|e| e.label == 1));
    assert!(labeled.iter().any(|e| e.label == -1));

    let report_text = std::fs::read_to_string(&report).unwrap();
    assert!(report_text.starts_with("bin_low,bin_high,count_reverted,count_unreverted"));
    assert_eq!(report_text.lines().count(), 21);

    // The labeled output feeds straight back in as training examples.
    assert_eq!(read_examples(&out).unwrap().len(), labeled.len());
}

#[test]
fn train_eval_predict_finetune_sweep_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data_path = dir.path().join("data.jsonl");
    write_examples(&data_path, &separable_examples(120, 12)).unwrap();

    let ckpt = dir.path().join("model.ckpt");
    cmd_train(&data_path, &ckpt, &micro_overrides(&[], 7)).unwrap();
    assert!(ckpt.exists());
    assert!(manifest_path(&ckpt).exists());
    assert!(dir.path().join("model.history.csv").exists());
    let history = std::fs::read_to_string(dir.path().join("model.history.csv")).unwrap();
    assert!(history.starts_with("epoch,train_loss,val_auprc,seconds_per_epoch"));
    assert_eq!(history.lines().count(), 4);

    cmd_eval(&ckpt, &data_path).unwrap();
    cmd_predict(&ckpt, "the river flows north.", "the river vandalx.").unwrap();

    let tuned = dir.path().join("tuned.ckpt");
    cmd_finetune(&ckpt, &data_path, 0.2, &tuned, &micro_overrides(&[], 7)).unwrap();
    assert!(tuned.exists());
    assert!(manifest_path(&tuned).exists());

    let sweep_out = dir.path().join("sweep.csv");
    cmd_sweep(&ckpt, &data_path, &sweep_out, &[0.2, 0.4], &micro_overrides(&["epochs=2"], 7))
        .unwrap();
    let sweep = std::fs::read_to_string(&sweep_out).unwrap();
    assert!(sweep.starts_with("fraction,test_auprc"));
    assert_eq!(sweep.lines().count(), 3);
}

#[test]
fn zeroed_output_head_predicts_exactly_half() {
    use stre::model::{Stre, StreConfig};
    use stre::synth::{build_vocab, separable_examples};

    let data = separable_examples(10, 2);
    let model = Stre::new(StreConfig::micro(), build_vocab(&data), 2).unwrap();
    for p in model.params.all() {
        if p.name().starts_with("out.") {
            p.set_values(vec![0.0; p.len()]).unwrap();
        }
    }
    let prediction = model.predict("some sentence here.", "another sentence.").unwrap();
    assert_eq!(prediction.p_damaging, 0.5);
    assert_eq!(prediction.p_good, 0.5);
}

#[test]
fn missing_input_reports_exit_code_2() {
    let err =
        cmd_eval(Path::new("/nonexistent/model.ckpt"), Path::new("/nonexistent/data.jsonl"))
            .unwrap_err();
    assert_eq!(err.exit_code(), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "this is not json\n").unwrap();
    let err = cmd_train(&bad, &dir.path().join("m.ckpt"), &micro_overrides(&[], 1)).unwrap_err();
    assert!(matches!(err, CliError::Input(_)));
}

#[test]
fn unscorable_tail_edit_is_skipped() {
    // [A, B, A]: edit 1 is scored (and damaging), edit 2 has no future.
    let dir = tempfile::tempdir().unwrap();
    let history = {
        use stre::corpus::{Revision, RevisionHistory};
        RevisionHistory {
            page_id: "p".into(),
            title: "p".into(),
            category: None,
            revisions: vec![
                Revision::new(0, 0, "Alpha beta gamma.".into()),
                Revision::new(1, 1, "Something else entirely!".into()),
                Revision::new(2, 2, "Alpha beta gamma.".into()),
            ],
        }
    };
    let histories_path = dir.path().join("h.jsonl");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&histories_path).unwrap());
    write_histories_jsonl(&mut w, &[history]).unwrap();
    drop(w);

    let out = dir.path().join("labeled.jsonl");
    cmd_label(&histories_path, &out, None, DistanceMode::Char).unwrap();
    let labeled: Vec<LabeledEdit> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(labeled.iter().all(|e| e.rev_index == 1));
    assert!(labeled.iter().all(|e| e.label == 1 && e.quality == -1.0));
}
