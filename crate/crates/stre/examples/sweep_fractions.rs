//! Fine-tune a pretrained model at increasing fractions of a new page's
//! edits and tabulate the resulting test AUPRC.

use stre::model::{Stre, StreConfig};
use stre::synth::{build_vocab, separable_examples};
use stre::train::{retrain_sweep, train, TrainConfig};

fn main() -> anyhow::Result<()> {
    let source = separable_examples(240, 31);
    let target = separable_examples(200, 32);

    let config = TrainConfig { epochs: 20, batch_size: 32, lr: 0.005, seed: 31, ..TrainConfig::default() };
    let vocab = build_vocab(&source);
    let model_cfg = StreConfig::small();
    let mut model = Stre::new(model_cfg, vocab, config.seed)?;
    train(&mut model, &source, None, &config)?;

    let fractions = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
    let rows = retrain_sweep(&mut model, &target, &fractions, &config)?;
    println!("fraction  test AUPRC");
    for (fraction, score) in rows {
        println!("  {fraction:>5.2}   {score:.4}");
    }
    Ok(())
}
