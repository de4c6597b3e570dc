//! Train briefly on the separable task, then show which words and
//! characters the model attends to when judging an edit.

use stre::model::{Stre, StreConfig};
use stre::synth::{build_vocab, separable_examples, DAMAGE_MARKERS};
use stre::train::{train, TrainConfig};

fn main() -> anyhow::Result<()> {
    let data = separable_examples(300, 17);
    let config = TrainConfig { epochs: 25, batch_size: 32, lr: 0.005, seed: 17, ..TrainConfig::default() };
    let vocab = build_vocab(&data);
    let model_cfg = StreConfig::small();
    let mut model = Stre::new(model_cfg, vocab, config.seed)?;
    train(&mut model, &data, None, &config)?;

    let before = "the river flows north through old stone bridges.";
    let after = format!("the river flows north {}.", DAMAGE_MARKERS[0]);
    let prediction = model.predict(before, &after)?;
    println!("edit: {before:?} -> {after:?}");
    println!("p_damaging {:.4}  p_good {:.4}", prediction.p_damaging, prediction.p_good);

    let mut words = prediction.word_attention.clone();
    words.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("\nmost attended words:");
    for (word, weight) in words.iter().take(5) {
        println!("  {word:>12}  {weight:.4}");
    }

    let mut chars = prediction.char_attention.clone();
    chars.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("\nmost attended characters:");
    for (c, weight) in chars.iter().take(5) {
        println!("  {:>12}  {weight:.4}", format!("{c:?}"));
    }
    Ok(())
}
