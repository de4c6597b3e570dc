//! Train on a separable synthetic task (damaging edits carry marker
//! tokens) and report test AUPRC.

use stre::model::{Stre, StreConfig};
use stre::synth::{build_vocab, separable_examples};
use stre::train::{evaluate, split_dataset, train, TrainConfig};

fn main() -> anyhow::Result<()> {
    let data = separable_examples(400, 21);
    let config = TrainConfig { epochs: 30, batch_size: 32, lr: 0.005, seed: 21, ..TrainConfig::default() };
    let (train_set, val_set, test_set) = split_dataset(&data, config.split, config.seed)?;

    let vocab = build_vocab(&train_set);
    let model_cfg = StreConfig::small();
    let mut model = Stre::new(model_cfg, vocab, config.seed)?;

    let outcome = train(&mut model, &train_set, Some(&val_set), &config)?;
    for stats in &outcome.history {
        println!(
            "epoch {:>2}  loss {:.4}  val AUPRC {}  ({:.2}s)",
            stats.epoch,
            stats.train_loss,
            stats.val_auprc.map_or("-".to_string(), |v| format!("{v:.4}")),
            stats.seconds
        );
    }
    let report = evaluate(&model, &test_set)?;
    println!("\nbest epoch {}  test AUPRC {:.4}", outcome.best_epoch, report.auprc);
    Ok(())
}
