//! Pretrain on one synthetic page, then fine-tune only the dense head on a
//! second page. The encoder weights come out bit for bit unchanged.

use stre::model::{Stre, StreConfig, StreParams};
use stre::synth::{build_vocab, separable_examples};
use stre::train::{finetune, train, TrainConfig};

fn main() -> anyhow::Result<()> {
    let source = separable_examples(240, 5);
    let target = separable_examples(160, 6);

    let config = TrainConfig { epochs: 25, batch_size: 32, lr: 0.005, seed: 5, ..TrainConfig::default() };
    let vocab = build_vocab(&source);
    let model_cfg = StreConfig::small();
    let mut model = Stre::new(model_cfg, vocab, config.seed)?;
    train(&mut model, &source, None, &config)?;

    let encoder_before: Vec<Vec<f64>> = model
        .params
        .all()
        .iter()
        .filter(|p| !StreParams::is_head_param(p.name()))
        .map(|p| p.values())
        .collect();

    let outcome = finetune(&mut model, &target, 0.2, &config)?;
    println!(
        "finetuned the head on {} examples, test AUPRC {:.4} on {}",
        outcome.train_size, outcome.report.auprc, outcome.test_size
    );

    let unchanged = model
        .params
        .all()
        .iter()
        .filter(|p| !StreParams::is_head_param(p.name()))
        .map(|p| p.values())
        .eq(encoder_before);
    println!("encoder parameters unchanged: {unchanged}");
    Ok(())
}
