//! Dataset splitting, the training loop, the frozen-encoder fine-tune
//! protocol, and the retraining-fraction sweep.
//!
//! When every encoder parameter is frozen (dense-only fine-tuning) the
//! dropout-free encoders are deterministic, so each example's E_p is
//! computed once up front and every epoch backpropagates through the dense
//! head alone. That is where the per-epoch wall-clock win comes from.

mod metrics;

pub use metrics::{auprc, pr_report, EvalReport};

use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{class_index, Example, FreezeMode, ModelError, Stre};
use crate::nn::{AdamConfig, AdamState, NnError, Tensor};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("split fractions {0:?} do not sum to 1")]
    BadFractions([f64; 3]),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("evaluation needs both classes present")]
    SingleClass,
    #[error("fraction {fraction} of {total} examples yields an empty side")]
    FractionTooSmall { fraction: f64, total: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub seed: u64,
    pub split: [f64; 3],
    pub finetune_fraction: f64,
    pub decoupled_decay: bool,
    /// Loss weight for damaging (+1) examples; 1.0 means no reweighting.
    pub damaging_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 250,
            lr: 0.01,
            weight_decay: 1e-4,
            epochs: 10,
            seed: 0,
            split: [0.8, 0.1, 0.1],
            finetune_fraction: 0.2,
            decoupled_decay: false,
            damaging_weight: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            weight_decay: self.weight_decay,
            decoupled_decay: self.decoupled_decay,
            ..AdamConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(TrainError::Invalid("batch_size and epochs must be positive".into()));
        }
        if !(0.0 < self.finetune_fraction && self.finetune_fraction < 1.0) {
            return Err(TrainError::Invalid(format!(
                "finetune_fraction must be in (0, 1), got {}",
                self.finetune_fraction
            )));
        }
        if !(self.damaging_weight > 0.0 && self.damaging_weight.is_finite()) {
            return Err(TrainError::Invalid(format!(
                "damaging_weight must be positive and finite, got {}",
                self.damaging_weight
            )));
        }
        check_fractions(self.split)?;
        Ok(())
    }
}

fn check_fractions(fractions: [f64; 3]) -> Result<(), TrainError> {
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || fractions.iter().any(|&f| f < 0.0) {
        return Err(TrainError::BadFractions(fractions));
    }
    Ok(())
}

/// Seeded shuffle, then disjoint exhaustive train/val/test slices.
pub fn split_dataset<T: Clone>(
    examples: &[T],
    fractions: [f64; 3],
    seed: u64,
) -> Result<(Vec<T>, Vec<T>, Vec<T>), TrainError> {
    check_fractions(fractions)?;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n = examples.len();
    let n_train = (n as f64 * fractions[0]).floor() as usize;
    let n_val = (n as f64 * fractions[1]).floor() as usize;
    let pick = |range: std::ops::Range<usize>| -> Vec<T> {
        order[range].iter().map(|&i| examples[i].clone()).collect()
    };
    Ok((pick(0..n_train), pick(n_train..n_train + n_val), pick(n_train + n_val..n)))
}

#[derive(Debug, Clone, Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    /// Absent when no validation set was provided or it is single-class.
    pub val_auprc: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub history: Vec<EpochStats>,
    /// Epoch whose parameters the model now carries.
    pub best_epoch: usize,
}

/// Damaging-class probability for every example, eval mode.
pub fn score_dataset(model: &Stre, examples: &[Example]) -> Result<Vec<f64>, TrainError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut scores = Vec::with_capacity(examples.len());
    for ex in examples {
        scores.push(model.example_probs(ex, false, &mut rng)?.to_vec()[1]);
    }
    Ok(scores)
}

pub fn evaluate(model: &Stre, examples: &[Example]) -> Result<EvalReport, TrainError> {
    let scores = score_dataset(model, examples)?;
    let labels: Vec<i8> = examples.iter().map(|e| e.label).collect();
    pr_report(&scores, &labels)
}

/// True when only the dense head can learn; enables encoding caching.
fn head_only(model: &Stre) -> bool {
    model
        .params
        .all()
        .iter()
        .all(|p| p.trainable() == crate::model::StreParams::is_head_param(p.name()))
        && model.params.all().iter().any(|p| p.trainable())
}

/// Epoch loop: shuffle, batch, forward with dropout, backward, Adam step.
/// With a validation set, the best-validation-AUPRC parameters are restored
/// before returning; otherwise the last epoch stands.
pub fn train(
    model: &mut Stre,
    train_set: &[Example],
    val_set: Option<&[Example]>,
    config: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut adam = AdamState::new(config.adam());
    let cached = if head_only(model) { Some(precompute_encodings(model, train_set)?) } else { None };
    let cached_val = match (head_only(model), val_set) {
        (true, Some(vs)) => Some(precompute_encodings(model, vs)?),
        _ => None,
    };

    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, Vec<Vec<f64>>)> = None;
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 0..config.epochs {
        let start = Instant::now();
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for batch_idx in order.chunks(config.batch_size) {
            let loss = match &cached {
                Some(eps) => head_batch_loss(
                    model,
                    eps,
                    train_set,
                    batch_idx,
                    config.damaging_weight,
                    &mut rng,
                )?,
                None => full_batch_loss(model, train_set, batch_idx, config.damaging_weight, &mut rng)?,
            };
            loss.backward()?;
            adam.step(&model.params.all())?;
            loss_sum += loss.item();
            batches += 1;
        }
        let train_loss = loss_sum / batches as f64;
        let val_auprc = match (val_set, &cached_val) {
            (Some(vs), None) => evaluate(model, vs).ok().map(|r| r.auprc),
            (Some(vs), Some(eps)) => {
                let labels: Vec<i8> = vs.iter().map(|e| e.label).collect();
                let mut scores = Vec::with_capacity(vs.len());
                let mut eval_rng = ChaCha8Rng::seed_from_u64(0);
                for ep in eps {
                    scores.push(model.classify(ep, false, &mut eval_rng)?.to_vec()[1]);
                }
                auprc(&scores, &labels).ok()
            }
            (None, _) => None,
        };
        if let Some(score) = val_auprc {
            let improved = best.as_ref().map_or(true, |(b, _, _)| score > *b);
            if improved {
                let snapshot = model.params.all().iter().map(|p| p.values()).collect();
                best = Some((score, epoch, snapshot));
            }
        }
        history.push(EpochStats {
            epoch,
            train_loss,
            val_auprc,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let best_epoch = match best {
        Some((_, epoch, snapshot)) => {
            for (param, values) in model.params.all().iter().zip(snapshot) {
                param.set_values(values)?;
            }
            epoch
        }
        None => config.epochs - 1,
    };
    Ok(TrainOutcome { history, best_epoch })
}

/// Detached E_p for every example; valid only while encoders are frozen.
fn precompute_encodings(model: &Stre, examples: &[Example]) -> Result<Vec<Tensor>, TrainError> {
    examples
        .iter()
        .map(|ex| Ok(model.encode(&ex.s_initial, &ex.s_final)?.e_p.detach()))
        .collect()
}

fn head_batch_loss<R: Rng>(
    model: &Stre,
    encodings: &[Tensor],
    examples: &[Example],
    batch: &[usize],
    damaging_weight: f64,
    rng: &mut R,
) -> Result<Tensor, TrainError> {
    let mut losses = Vec::with_capacity(batch.len());
    let mut weights = Vec::with_capacity(batch.len());
    for &i in batch {
        let probs = model.classify(&encodings[i], true, rng)?;
        losses.push(probs.cross_entropy(class_index(examples[i].label))?);
        weights.push(class_weight(examples[i].label, damaging_weight));
    }
    weighted_mean(&losses, &weights)
}

fn full_batch_loss<R: Rng>(
    model: &Stre,
    examples: &[Example],
    batch: &[usize],
    damaging_weight: f64,
    rng: &mut R,
) -> Result<Tensor, TrainError> {
    let mut losses = Vec::with_capacity(batch.len());
    let mut weights = Vec::with_capacity(batch.len());
    for &i in batch {
        let probs = model.example_probs(&examples[i], true, rng)?;
        losses.push(probs.cross_entropy(class_index(examples[i].label))?);
        weights.push(class_weight(examples[i].label, damaging_weight));
    }
    weighted_mean(&losses, &weights)
}

fn class_weight(label: i8, damaging_weight: f64) -> f64 {
    if label == 1 { damaging_weight } else { 1.0 }
}

/// Mean of per-example losses; with non-unit weights, the weighted mean.
fn weighted_mean(losses: &[Tensor], weights: &[f64]) -> Result<Tensor, TrainError> {
    if weights.iter().all(|&w| w == 1.0) {
        return Ok(Tensor::concat(losses, 0)?.mean());
    }
    let total: f64 = weights.iter().sum();
    let scaled: Vec<Tensor> =
        losses.iter().zip(weights).map(|(l, &w)| l.scale(w / total)).collect();
    Ok(Tensor::concat(&scaled, 0)?.mean().scale(scaled.len() as f64))
}

#[derive(Debug)]
pub struct FinetuneOutcome {
    pub history: Vec<EpochStats>,
    pub report: EvalReport,
    pub train_size: usize,
    pub test_size: usize,
}

/// Transfer-learning protocol: freeze everything but the dense head, train
/// on a `fraction` sample of the page's edits, evaluate on the remainder.
/// Encoder parameters come out bit-identical.
pub fn finetune(
    model: &mut Stre,
    examples: &[Example],
    fraction: f64,
    config: &TrainConfig,
) -> Result<FinetuneOutcome, TrainError> {
    if !(0.0 < fraction && fraction < 1.0) {
        return Err(TrainError::Invalid(format!("fraction must be in (0, 1), got {fraction}")));
    }
    let n_train = (examples.len() as f64 * fraction).round() as usize;
    if n_train == 0 || n_train == examples.len() {
        return Err(TrainError::FractionTooSmall { fraction, total: examples.len() });
    }
    let mut order: Vec<usize> = (0..examples.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let train_set: Vec<Example> = order[..n_train].iter().map(|&i| examples[i].clone()).collect();
    let test_set: Vec<Example> = order[n_train..].iter().map(|&i| examples[i].clone()).collect();

    model.set_freeze(FreezeMode::DenseOnly);
    let outcome = train(model, &train_set, None, config)?;
    let report = evaluate(model, &test_set)?;
    Ok(FinetuneOutcome {
        history: outcome.history,
        report,
        train_size: train_set.len(),
        test_size: test_set.len(),
    })
}

/// One fine-tune run per fraction, each starting from the same pretrained
/// parameters and seed. Returns (fraction, test AUPRC) rows.
pub fn retrain_sweep(
    model: &mut Stre,
    examples: &[Example],
    fractions: &[f64],
    config: &TrainConfig,
) -> Result<Vec<(f64, f64)>, TrainError> {
    let pristine: Vec<Vec<f64>> = model.params.all().iter().map(|p| p.values()).collect();
    let mut rows = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        for (param, values) in model.params.all().iter().zip(pristine.iter()) {
            param.set_values(values.clone())?;
        }
        let outcome = finetune(model, examples, fraction, config)?;
        rows.push((fraction, outcome.report.auprc));
    }
    Ok(rows)
}

/// Default sweep grid: 5% to 50% in 5-point steps.
pub fn default_sweep_fractions() -> Vec<f64> {
    (1..=10).map(|i| i as f64 * 0.05).collect()
}

pub fn write_history_csv<W: Write>(writer: &mut W, history: &[EpochStats]) -> std::io::Result<()> {
    writeln!(writer, "epoch,train_loss,val_auprc,seconds_per_epoch")?;
    for row in history {
        let val = row.val_auprc.map_or(String::new(), |v| format!("{v}"));
        writeln!(writer, "{},{},{},{}", row.epoch, row.train_loss, val, row.seconds)?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(writer: &mut W, rows: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(writer, "fraction,test_auprc")?;
    for (fraction, score) in rows {
        writeln!(writer, "{fraction},{score}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{StreConfig, Vocab};

    #[test]
    fn split_sizes_follow_fractions() {
        let data: Vec<u32> = (0..10).collect();
        let (train, val, test) = split_dataset(&data, [0.8, 0.1, 0.1], 7).unwrap();
        assert_eq!((train.len(), val.len(), test.len()), (8, 1, 1));
    }

    #[test]
    fn split_is_deterministic_and_exhaustive() {
        let data: Vec<u32> = (0..1000).collect();
        let a = split_dataset(&data, [0.8, 0.1, 0.1], 42).unwrap();
        let b = split_dataset(&data, [0.8, 0.1, 0.1], 42).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.2, b.2);
        let mut all: Vec<u32> = a.0.iter().chain(&a.1).chain(&a.2).copied().collect();
        all.sort_unstable();
        assert_eq!(all, data);
    }

    #[test]
    fn bad_fractions_are_rejected() {
        let data = vec![1, 2, 3];
        assert!(matches!(
            split_dataset(&data, [0.5, 0.1, 0.1], 0),
            Err(TrainError::BadFractions(_))
        ));
    }

    fn tiny_dataset() -> Vec<Example> {
        let mut out = Vec::new();
        for i in 0..12 {
            let damaging = i % 2 == 0;
            out.push(Example {
                s_initial: format!("sentence number {i}."),
                s_final: if damaging {
                    format!("sentence garbagetoken {i}!")
                } else {
                    format!("sentence number {i} improved.")
                },
                label: if damaging { 1 } else { -1 },
            });
        }
        out
    }

    fn tiny_model(examples: &[Example], seed: u64) -> Stre {
        let mut tokens: Vec<String> = Vec::new();
        for ex in examples {
            tokens.extend(crate::model::word_tokens(&ex.s_initial));
            tokens.extend(crate::model::word_tokens(&ex.s_final));
        }
        let vocab = Vocab::build(tokens.iter().map(|s| s.as_str()));
        // Dropout off: with a 4-wide head the mask noise would swamp the
        // signal these tests assert on.
        let config = StreConfig {
            max_words: 24,
            max_chars: 48,
            dropout: 0.0,
            ..StreConfig::micro()
        };
        Stre::new(config, vocab, seed).unwrap()
    }

    #[test]
    fn zero_lr_leaves_parameters_and_loss_flat() {
        let data = tiny_dataset();
        let mut model = tiny_model(&data, 1);
        let before: Vec<Vec<f64>> = model.params.all().iter().map(|p| p.values()).collect();
        let config = TrainConfig {
            lr: 0.0,
            weight_decay: 0.0,
            epochs: 3,
            batch_size: 4,
            ..TrainConfig::default()
        };
        let outcome = train(&mut model, &data, None, &config).unwrap();
        for (param, old) in model.params.all().iter().zip(before) {
            assert_eq!(param.values(), old);
        }
        assert!(outcome.history.iter().all(|h| h.train_loss.is_finite()));
    }

    #[test]
    fn unit_damaging_weight_matches_default_and_zero_is_rejected() {
        let data = tiny_dataset();
        let base = TrainConfig {
            epochs: 2,
            batch_size: 4,
            weight_decay: 0.0,
            ..TrainConfig::default()
        };

        let mut a = tiny_model(&data, 5);
        let out_a = train(&mut a, &data, None, &base).unwrap();
        let mut b = tiny_model(&data, 5);
        let out_b =
            train(&mut b, &data, None, &TrainConfig { damaging_weight: 1.0, ..base.clone() })
                .unwrap();
        for (pa, pb) in a.params.all().iter().zip(b.params.all()) {
            assert_eq!(pa.values(), pb.values());
        }
        assert_eq!(out_a.history[0].train_loss, out_b.history[0].train_loss);

        // Upweighting the damaging class changes the objective.
        let mut c = tiny_model(&data, 5);
        let out_c =
            train(&mut c, &data, None, &TrainConfig { damaging_weight: 5.0, ..base.clone() })
                .unwrap();
        assert_ne!(out_a.history[0].train_loss, out_c.history[0].train_loss);

        let invalid = TrainConfig { damaging_weight: 0.0, ..base };
        assert!(matches!(invalid.validate(), Err(TrainError::Invalid(_))));
    }

    #[test]
    fn empty_training_set_is_an_error() {
        let mut model = tiny_model(&tiny_dataset(), 2);
        assert!(matches!(
            train(&mut model, &[], None, &TrainConfig::default()),
            Err(TrainError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn training_reduces_loss_on_tiny_separable_data() {
        let data = tiny_dataset();
        let mut model = tiny_model(&data, 3);
        let config = TrainConfig {
            epochs: 30,
            batch_size: 12,
            lr: 0.02,
            weight_decay: 0.0,
            ..TrainConfig::default()
        };
        let outcome = train(&mut model, &data, None, &config).unwrap();
        let first = outcome.history.first().unwrap().train_loss;
        let last = outcome.history.last().unwrap().train_loss;
        assert!(last < first, "loss did not drop: {first} -> {last}");
    }

    #[test]
    fn finetune_keeps_encoders_bit_identical_and_splits_by_fraction() {
        let data = tiny_dataset();
        let mut model = tiny_model(&data, 4);
        let encoder_before: Vec<Vec<f64>> = model
            .params
            .all()
            .iter()
            .filter(|p| !crate::model::StreParams::is_head_param(p.name()))
            .map(|p| p.values())
            .collect();
        let config = TrainConfig { epochs: 2, batch_size: 4, ..TrainConfig::default() };
        let outcome = finetune(&mut model, &data, 0.25, &config).unwrap();
        assert_eq!(outcome.train_size, 3);
        assert_eq!(outcome.test_size, 9);
        let encoder_after: Vec<Vec<f64>> = model
            .params
            .all()
            .iter()
            .filter(|p| !crate::model::StreParams::is_head_param(p.name()))
            .map(|p| p.values())
            .collect();
        assert_eq!(encoder_before, encoder_after);
    }

    #[test]
    fn finetune_fraction_too_small_errors() {
        let data = tiny_dataset();
        let mut model = tiny_model(&data, 5);
        let err = finetune(&mut model, &data, 0.01, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, TrainError::FractionTooSmall { .. }));
    }

    #[test]
    fn sweep_emits_one_row_per_fraction() {
        let data = tiny_dataset();
        let mut model = tiny_model(&data, 6);
        let config = TrainConfig { epochs: 1, batch_size: 6, ..TrainConfig::default() };
        let rows = retrain_sweep(&mut model, &data, &[0.25, 0.5], &config).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].0, 0.25);
        let empty = retrain_sweep(&mut model, &data, &[], &config).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn single_batch_overfit_converges_and_never_regresses_for_long() {
        let data = tiny_dataset();
        let mut model = tiny_model(&data, 7);
        let config = TrainConfig {
            epochs: 120,
            batch_size: data.len(),
            lr: 0.01,
            weight_decay: 0.0,
            ..TrainConfig::default()
        };
        let outcome = train(&mut model, &data, None, &config).unwrap();
        let losses: Vec<f64> = outcome.history.iter().map(|h| h.train_loss).collect();
        assert!(*losses.last().unwrap() < 0.05, "final loss {}", losses.last().unwrap());
        for window in losses.windows(11) {
            assert!(
                window[10] <= window[0] + 1e-3,
                "loss rose over a 10-epoch window: {} -> {}",
                window[0],
                window[10]
            );
        }
    }

    #[test]
    fn identical_seeds_give_identical_training() {
        let data = tiny_dataset();
        let config = TrainConfig { epochs: 2, batch_size: 4, ..TrainConfig::default() };
        let mut m1 = tiny_model(&data, 9);
        let mut m2 = tiny_model(&data, 9);
        train(&mut m1, &data, None, &config).unwrap();
        train(&mut m2, &data, None, &config).unwrap();
        for (a, b) in m1.params.all().iter().zip(m2.params.all()) {
            assert_eq!(a.values(), b.values(), "parameter {} diverged", a.name());
        }
    }
}
