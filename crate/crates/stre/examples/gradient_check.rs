//! Verify the analytic gradients of the full model loss against central
//! finite differences on a tiny configuration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stre::model::{Example, Stre, StreConfig};
use stre::nn::grad_check;
use stre::synth::{build_vocab, separable_examples};

fn main() -> anyhow::Result<()> {
    let data = separable_examples(4, 3);
    let vocab = build_vocab(&data);
    // Dropout off so the loss is a deterministic function of the weights.
    let config = StreConfig { dropout: 0.0, ..StreConfig::micro() };
    let model = Stre::new(config, vocab, 11)?;

    let batch: Vec<Example> = data.clone();
    let loss = || {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        model.batch_loss(&batch, false, &mut rng).map_err(|e| match e {
            stre::model::ModelError::Nn(nn) => nn,
            other => stre::nn::NnError::InvalidArg { op: "loss", message: other.to_string() },
        })
    };

    let params = model.params.all();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let report = grad_check(loss, &params, 1e-5, 1e-4, 2, &mut rng)?;
    println!(
        "checked {} coordinates, max relative error {:.3e} (tolerance {:.0e})",
        report.coords_checked, report.max_rel_err, report.tol
    );
    println!("{}", if report.pass() { "PASS" } else { "FAIL" });
    Ok(())
}
