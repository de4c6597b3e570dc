//! Save a model, reload it, and confirm predictions match bit for bit.
//! Also seeds the word embedding table from a pretrained vector file.

use std::io::Write;

use stre::model::{EmbeddingKind, Stre, StreConfig};
use stre::synth::{build_vocab, separable_examples};

fn main() -> anyhow::Result<()> {
    let data = separable_examples(40, 13);
    let vocab = build_vocab(&data);
    let model = Stre::new(StreConfig::micro(), vocab, 13)?;

    let dir = tempfile::tempdir()?;

    // Pretrained vectors: token followed by one value per embedding dim.
    let vectors = dir.path().join("vectors.txt");
    {
        let mut f = std::fs::File::create(&vectors)?;
        let dim = model.config.word_embed_dim;
        for token in ["the", "river", "vandalx"] {
            write!(f, "{token}")?;
            for i in 0..dim {
                write!(f, " {}", 0.01 * i as f64)?;
            }
            writeln!(f)?;
        }
    }
    let coverage = model.load_pretrained_embeddings(&vectors, EmbeddingKind::Word)?;
    println!("embedding coverage: {:.1}% of the vocabulary", coverage * 100.0);

    let ckpt = dir.path().join("model.ckpt");
    model.save(&ckpt)?;
    let reloaded = Stre::load(&ckpt)?;

    let before = "the river flows north.";
    let after = "the river vandalx.";
    let a = model.predict(before, after)?;
    let b = reloaded.predict(before, after)?;
    println!("p_damaging original {:.6}, reloaded {:.6}", a.p_damaging, b.p_damaging);
    println!("bitwise identical: {}", a.p_damaging.to_bits() == b.p_damaging.to_bits());
    Ok(())
}
