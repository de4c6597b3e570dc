//! The dual character/word attentive encoder.
//!
//! An edit (original sentence, edited sentence) is encoded twice: a word
//! path (pretrained-style embeddings -> BiLSTM -> additive attention -> R_w)
//! and a character path (embedding table -> MLP -> BiLSTM -> attention ->
//! R_c). The concatenation E_p = [R_c, R_w] feeds a dense stack ending in a
//! two-way softmax over (good-faith, damaging).

mod params;
mod vocab;

pub use params::{Activation, FreezeMode, StreConfig, StreParams};
pub use vocab::{
    char_id, tokenize_chars, tokenize_words, word_tokens, Vocab, CHAR_TABLE_SIZE, DELIM_TOKEN,
    DELIM_WORD, UNK_CHAR, UNK_WORD,
};

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nn::{bilstm, LstmDirection, NnError, Parameter, Tensor};
use crate::quality::LabeledEdit;

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Config(String),
    #[error("embedding file line {line}: {message}")]
    Embedding { line: usize, message: String },
    #[error("checkpoint mismatch: {0}")]
    Checkpoint(String),
}

/// One training or evaluation datapoint: the triplet (s_initial, s_final,
/// label) with -1 good-faith and +1 damaging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub s_initial: String,
    pub s_final: String,
    pub label: i8,
}

impl From<&LabeledEdit> for Example {
    fn from(edit: &LabeledEdit) -> Example {
        Example {
            s_initial: edit.s_initial.clone(),
            s_final: edit.s_final.clone(),
            label: edit.label,
        }
    }
}

/// Softmax index for a label: good-faith (-1) is 0, damaging (+1) is 1.
pub fn class_index(label: i8) -> usize {
    usize::from(label > 0)
}

/// Per-edit encoder outputs, with attention weights kept for inspection.
pub struct EncodedEdit {
    /// `[R_c, R_w]`, shape `1×4h`.
    pub e_p: Tensor,
    pub r_w: Tensor,
    pub r_c: Tensor,
    /// Char attention weights.
    pub alpha: Vec<f64>,
    /// Word attention weights.
    pub beta: Vec<f64>,
}

pub struct Prediction {
    pub p_good: f64,
    pub p_damaging: f64,
    /// Word tokens (delimiter included) with their attention weights.
    pub word_attention: Vec<(String, f64)>,
    /// Characters with their attention weights.
    pub char_attention: Vec<(char, f64)>,
}

pub struct Stre {
    pub config: StreConfig,
    pub vocab: Vocab,
    pub params: StreParams,
}

impl Stre {
    pub fn new(config: StreConfig, vocab: Vocab, seed: u64) -> Result<Stre> {
        config.validate().map_err(ModelError::Config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = StreParams::init(&config, vocab.len(), &mut rng)?;
        Ok(Stre { config, vocab, params })
    }

    pub fn set_freeze(&mut self, mode: FreezeMode) {
        self.params.set_freeze(mode);
    }

    // ---- encoders ----------------------------------------------------

    fn activate(&self, t: &Tensor) -> Tensor {
        match self.config.attn_activation {
            Activation::Tanh => t.tanh(),
            Activation::Sigmoid => t.sigmoid(),
        }
    }

    /// Additive attention: project states, score against a context vector,
    /// softmax, and aggregate. Returns the summary and the weights.
    fn attention(
        &self,
        states: &[Tensor],
        w: &Parameter,
        b: &Parameter,
        ctx: &Parameter,
        mask: Option<&[bool]>,
    ) -> Result<(Tensor, Vec<f64>)> {
        let stacked = Tensor::concat(states, 0)?; // T×2h
        let projected = self.activate(&stacked.matmul(&w.leaf())?.add(&b.leaf())?);
        let scores = projected.matmul(&ctx.leaf())?.flatten(); // T
        let weights = match mask {
            Some(mask) => scores.masked_softmax(mask)?,
            None => scores.softmax(0)?,
        };
        let summary = weights.reshape(vec![1, states.len()])?.matmul(&stacked)?;
        Ok((summary, weights.to_vec()))
    }

    /// Word path: embeddings, BiLSTM, attention. Returns (R_w, beta).
    pub fn encode_words(&self, ids: &[usize]) -> Result<(Tensor, Vec<f64>)> {
        if ids.is_empty() {
            return Err(NnError::EmptySequence { op: "encode_words" }.into());
        }
        let embed = self.params.word_embed.leaf();
        let xs: Vec<Tensor> =
            ids.iter().map(|&i| embed.row(i)).collect::<crate::nn::Result<_>>()?;
        let fwd = LstmDirection::from_params(&self.params.word_fwd, self.config.hidden);
        let bwd = LstmDirection::from_params(&self.params.word_bwd, self.config.hidden);
        let states = bilstm(&xs, &fwd, &bwd)?;
        self.attention(
            &states,
            &self.params.word_attn_w,
            &self.params.word_attn_b,
            &self.params.word_ctx,
            None,
        )
        .map_err(Into::into)
    }

    /// Char path: table lookup, embedding MLP, BiLSTM, attention.
    pub fn encode_chars(&self, ids: &[usize]) -> Result<(Tensor, Vec<f64>)> {
        if ids.is_empty() {
            return Err(NnError::EmptySequence { op: "encode_chars" }.into());
        }
        let table = self.params.char_embed.leaf();
        let mlp_w = self.params.char_mlp_w.leaf();
        let mlp_b = self.params.char_mlp_b.leaf();
        let mut xs = Vec::with_capacity(ids.len());
        for &i in ids {
            let raw = table.row(i)?;
            xs.push(self.activate(&raw.matmul(&mlp_w)?.add(&mlp_b)?));
        }
        let fwd = LstmDirection::from_params(&self.params.char_fwd, self.config.hidden);
        let bwd = LstmDirection::from_params(&self.params.char_bwd, self.config.hidden);
        let states = bilstm(&xs, &fwd, &bwd)?;
        self.attention(
            &states,
            &self.params.char_attn_w,
            &self.params.char_attn_b,
            &self.params.char_ctx,
            None,
        )
        .map_err(Into::into)
    }

    /// Full encoder: E_p = [R_c, R_w].
    pub fn encode(&self, s_initial: &str, s_final: &str) -> Result<EncodedEdit> {
        let word_ids = tokenize_words(&self.vocab, s_initial, s_final, self.config.max_words);
        let char_ids = tokenize_chars(s_initial, s_final, self.config.max_chars);
        let (r_w, beta) = self.encode_words(&word_ids)?;
        let (r_c, alpha) = self.encode_chars(&char_ids)?;
        let e_p = Tensor::concat(&[r_c.clone(), r_w.clone()], 1)?;
        Ok(EncodedEdit { e_p, r_w, r_c, alpha, beta })
    }

    /// Dense head over E_p; returns rank-1 class probabilities (good, damaging).
    pub fn classify<R: Rng>(&self, e_p: &Tensor, train: bool, rng: &mut R) -> Result<Tensor> {
        let mut x = e_p.clone();
        let n_dense = self.params.dense.len();
        for (i, (w, b)) in self.params.dense.iter().enumerate() {
            x = x.matmul(&w.leaf())?.add(&b.leaf())?.relu();
            if i + 1 < n_dense {
                x = x.dropout(self.config.dropout, train, rng)?;
            }
        }
        let logits = x.matmul(&self.params.out_w.leaf())?.add(&self.params.out_b.leaf())?;
        Ok(logits.flatten().softmax(0)?)
    }

    /// Probabilities for one edit.
    pub fn example_probs<R: Rng>(
        &self,
        example: &Example,
        train: bool,
        rng: &mut R,
    ) -> Result<Tensor> {
        let encoded = self.encode(&example.s_initial, &example.s_final)?;
        self.classify(&encoded.e_p, train, rng)
    }

    /// Mean binary cross entropy over a batch.
    pub fn batch_loss<R: Rng>(
        &self,
        batch: &[Example],
        train: bool,
        rng: &mut R,
    ) -> Result<Tensor> {
        if batch.is_empty() {
            return Err(NnError::EmptySequence { op: "batch_loss" }.into());
        }
        let mut losses = Vec::with_capacity(batch.len());
        for example in batch {
            let probs = self.example_probs(example, train, rng)?;
            losses.push(probs.cross_entropy(class_index(example.label))?);
        }
        Ok(Tensor::concat(&losses, 0)?.mean())
    }

    /// Eval-mode prediction with attention diagnostics.
    pub fn predict(&self, s_initial: &str, s_final: &str) -> Result<Prediction> {
        let mut rng = ChaCha8Rng::seed_from_u64(0); // unused: dropout off in eval
        let encoded = self.encode(s_initial, s_final)?;
        let probs = self.classify(&encoded.e_p, false, &mut rng)?;
        let p = probs.to_vec();
        let tokens = word_token_strings(s_initial, s_final, self.config.max_words);
        let chars = char_token_chars(s_initial, s_final, self.config.max_chars);
        Ok(Prediction {
            p_good: p[0],
            p_damaging: p[1],
            word_attention: tokens.into_iter().zip(encoded.beta).collect(),
            char_attention: chars.into_iter().zip(encoded.alpha).collect(),
        })
    }

    // ---- persistence -------------------------------------------------

    /// Write the binary parameter checkpoint plus a JSON sidecar carrying
    /// the configuration and vocabulary.
    pub fn save(&self, path: &Path) -> Result<()> {
        crate::nn::save_params(path, &self.params.all())?;
        let meta = ModelMeta {
            config: self.config.clone(),
            vocab_words: self.vocab.words().to_vec(),
        };
        let sidecar = sidecar_path(path);
        let file = File::create(&sidecar)?;
        serde_json::to_writer_pretty(file, &meta)
            .map_err(|e| ModelError::Checkpoint(e.to_string()))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Stre> {
        let sidecar = sidecar_path(path);
        let meta: ModelMeta = serde_json::from_reader(BufReader::new(File::open(&sidecar)?))
            .map_err(|e| ModelError::Checkpoint(format!("{}: {e}", sidecar.display())))?;
        let vocab = Vocab::from_words(meta.vocab_words);
        let mut model = Stre::new(meta.config, vocab, 0)?;
        let sections = crate::nn::load_params(path)?;
        let mut by_name: std::collections::HashMap<String, (Vec<usize>, Vec<f64>)> =
            sections.into_iter().map(|(n, s, v)| (n, (s, v))).collect();
        for param in model.params.all_mut() {
            let Some((shape, values)) = by_name.remove(param.name()) else {
                return Err(ModelError::Checkpoint(format!("missing section {}", param.name())));
            };
            if shape != param.shape() {
                return Err(ModelError::Checkpoint(format!(
                    "section {} has shape {:?}, expected {:?}",
                    param.name(),
                    shape,
                    param.shape()
                )));
            }
            param.set_values(values)?;
        }
        Ok(model)
    }

    /// Overwrite embedding rows from a text file of `token v1 .. vD` lines.
    /// Returns the covered fraction of the target table.
    pub fn load_pretrained_embeddings(&self, path: &Path, kind: EmbeddingKind) -> Result<f64> {
        let (param, dim, total_rows) = match kind {
            EmbeddingKind::Word => {
                (&self.params.word_embed, self.config.word_embed_dim, self.vocab.len())
            }
            EmbeddingKind::Char => {
                (&self.params.char_embed, self.config.char_embed_dim, CHAR_TABLE_SIZE)
            }
        };
        let mut matched = std::collections::HashSet::new();
        let reader = BufReader::new(File::open(path)?);
        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("nonblank line has a token");
            let values: Vec<f64> = fields
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| ModelError::Embedding { line: lineno, message: e.to_string() })?;
            if values.len() != dim {
                return Err(ModelError::Embedding {
                    line: lineno,
                    message: format!("expected {dim} values, got {}", values.len()),
                });
            }
            let row = match kind {
                EmbeddingKind::Word => {
                    if !self.vocab.contains(token) {
                        continue;
                    }
                    self.vocab.id(token)
                }
                EmbeddingKind::Char => {
                    let mut chars = token.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) if c.is_ascii() => char_id(c),
                        _ => continue,
                    }
                }
            };
            param.values_storage().borrow_mut()[row * dim..(row + 1) * dim]
                .copy_from_slice(&values);
            matched.insert(row);
        }
        Ok(matched.len() as f64 / total_rows as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingKind {
    Word,
    Char,
}

impl std::str::FromStr for EmbeddingKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "word" => Ok(EmbeddingKind::Word),
            "char" => Ok(EmbeddingKind::Char),
            other => Err(format!("unknown embedding kind {other:?} (word|char)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelMeta {
    config: StreConfig,
    vocab_words: Vec<String>,
}

pub fn sidecar_path(checkpoint: &Path) -> PathBuf {
    let mut name = checkpoint.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    checkpoint.with_file_name(name)
}

/// Token strings in the same order as `tokenize_words` ids.
pub fn word_token_strings(s_initial: &str, s_final: &str, max_words: usize) -> Vec<String> {
    let mut tokens = word_tokens(s_initial);
    tokens.push(DELIM_TOKEN.to_string());
    tokens.extend(word_tokens(s_final));
    tokens.truncate(max_words);
    tokens
}

fn char_token_chars(s_initial: &str, s_final: &str, max_chars: usize) -> Vec<char> {
    let mut chars: Vec<char> = s_initial.chars().collect();
    chars.push('|');
    chars.push('|');
    chars.extend(s_final.chars());
    chars.truncate(max_chars);
    chars
}

#[cfg(test)]
mod tests {
    use super::*;

    fn micro_model() -> Stre {
        let vocab = Vocab::build(["a", "cat", "dog", ".", "bad", "word"]);
        Stre::new(StreConfig::micro(), vocab, 42).unwrap()
    }

    #[test]
    fn single_token_attention_is_one() {
        let model = micro_model();
        let (_, beta) = model.encode_words(&[2]).unwrap();
        assert_eq!(beta.len(), 1);
        assert!((beta[0] - 1.0).abs() < 1e-12);
        let (_, alpha) = model.encode_chars(&[5]).unwrap();
        assert!((alpha[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_hidden_states_get_uniform_attention() {
        // Zeroed char encoder weights make every hidden state identical, so
        // the softmax has nothing to distinguish and must be uniform.
        let model = micro_model();
        for p in model.params.char_fwd.iter().chain(model.params.char_bwd.iter()) {
            p.set_values(vec![0.0; p.len()]).unwrap();
        }
        let (_, alpha) = model.encode_chars(&[7, 7, 7, 7]).unwrap();
        for w in &alpha {
            assert!((w - 0.25).abs() < 1e-9, "expected uniform, got {alpha:?}");
        }
    }

    #[test]
    fn attention_weights_form_a_distribution() {
        let model = micro_model();
        let encoded = model.encode("A cat.", "A bad dog.").unwrap();
        let sum_b: f64 = encoded.beta.iter().sum();
        let sum_a: f64 = encoded.alpha.iter().sum();
        assert!((sum_b - 1.0).abs() < 1e-10);
        assert!((sum_a - 1.0).abs() < 1e-10);
        assert!(encoded.beta.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn e_p_is_char_then_word_concat() {
        let model = micro_model();
        let encoded = model.encode("A cat.", "A dog.").unwrap();
        let h2 = 2 * model.config.hidden;
        assert_eq!(encoded.e_p.shape(), &[1, 2 * h2]);
        let ep = encoded.e_p.to_vec();
        assert_eq!(&ep[..h2], &encoded.r_c.to_vec()[..]);
        assert_eq!(&ep[h2..], &encoded.r_w.to_vec()[..]);
    }

    #[test]
    fn beta_matches_independent_scalar_recomputation() {
        // Recompute the attention softmax from the projected scores with
        // plain scalar code and compare.
        let model = micro_model();
        let ids = [2usize, 3, 4, 2, 5];
        let embed = model.params.word_embed.leaf();
        let xs: Vec<Tensor> = ids.iter().map(|&i| embed.row(i).unwrap()).collect();
        let fwd = LstmDirection::from_params(&model.params.word_fwd, model.config.hidden);
        let bwd = LstmDirection::from_params(&model.params.word_bwd, model.config.hidden);
        let states = bilstm(&xs, &fwd, &bwd).unwrap();
        let w = model.params.word_attn_w.values();
        let b = model.params.word_attn_b.values();
        let ctx = model.params.word_ctx.values();
        let attn = model.config.attn_context_dim;
        let h2 = 2 * model.config.hidden;
        let mut scores = Vec::new();
        for state in &states {
            let v = state.to_vec();
            let mut score = 0.0;
            for j in 0..attn {
                let mut pre = b[j];
                for k in 0..h2 {
                    pre += v[k] * w[k * attn + j];
                }
                score += pre.tanh() * ctx[j];
            }
            scores.push(score);
        }
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let denom: f64 = exps.iter().sum();
        let expect: Vec<f64> = exps.iter().map(|e| e / denom).collect();
        let (_, beta) = model.encode_words(&ids).unwrap();
        for (got, want) in beta.iter().zip(expect) {
            assert!((got - want).abs() < 1e-10, "beta mismatch: {got} vs {want}");
        }
    }

    #[test]
    fn zeroed_head_predicts_half_half() {
        let model = micro_model();
        for (w, b) in &model.params.dense {
            w.set_values(vec![0.0; w.len()]).unwrap();
            b.set_values(vec![0.0; b.len()]).unwrap();
        }
        model.params.out_w.set_values(vec![0.0; model.params.out_w.len()]).unwrap();
        let pred = model.predict("A cat.", "A dog.").unwrap();
        assert!((pred.p_good - 0.5).abs() < 1e-12);
        assert!((pred.p_damaging - 0.5).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let model = micro_model();
        let pred = model.predict("Some words here.", "Other words there!").unwrap();
        assert!((pred.p_good + pred.p_damaging - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_matches_straight_line_recomputation() {
        // Frozen random head on a fixed E_p, recomputed with a plain
        // matrix-chain implementation.
        let model = micro_model();
        let h4 = 4 * model.config.hidden;
        let ep_values: Vec<f64> = (0..h4).map(|i| (i as f64 * 0.37).sin()).collect();
        let ep = Tensor::constant(vec![1, h4], ep_values.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let probs = model.classify(&ep, false, &mut rng).unwrap().to_vec();

        let mut x = ep_values;
        for (w, b) in &model.params.dense {
            let (rows, cols) = (w.shape()[0], w.shape()[1]);
            let wv = w.values();
            let bv = b.values();
            let mut next = vec![0.0; cols];
            for j in 0..cols {
                let mut s = bv[j];
                for i in 0..rows {
                    s += x[i] * wv[i * cols + j];
                }
                next[j] = s.max(0.0);
            }
            x = next;
        }
        let wv = model.params.out_w.values();
        let bv = model.params.out_b.values();
        let rows = model.params.out_w.shape()[0];
        let logits: Vec<f64> = (0..2)
            .map(|j| bv[j] + (0..rows).map(|i| x[i] * wv[i * 2 + j]).sum::<f64>())
            .collect();
        let max = logits[0].max(logits[1]);
        let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let denom = exps[0] + exps[1];
        for (got, want) in probs.iter().zip(exps.iter().map(|e| e / denom)) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn batch_loss_is_mean_of_per_example_losses() {
        let model = micro_model();
        let examples: Vec<Example> = [("A cat.", "A dog.", -1), ("bad word", "", 1), ("", "x", -1)]
            .iter()
            .map(|(a, b, l)| Example {
                s_initial: a.to_string(),
                s_final: b.to_string(),
                label: *l,
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let batch = model.batch_loss(&examples, false, &mut rng).unwrap().item();
        let mut sum = 0.0;
        for ex in &examples {
            let p = model.example_probs(ex, false, &mut rng).unwrap().to_vec();
            sum += -p[class_index(ex.label)].max(1e-12).ln();
        }
        assert!((batch - sum / 3.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_probs_give_ln2_loss() {
        let model = micro_model();
        for (w, b) in &model.params.dense {
            w.set_values(vec![0.0; w.len()]).unwrap();
            b.set_values(vec![0.0; b.len()]).unwrap();
        }
        let examples = vec![Example {
            s_initial: "a".into(),
            s_final: "b".into(),
            label: 1,
        }];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let loss = model.batch_loss(&examples, false, &mut rng).unwrap().item();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn save_load_roundtrip_preserves_predictions_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let model = micro_model();
        model.save(&path).unwrap();
        let loaded = Stre::load(&path).unwrap();
        let a = model.predict("A cat.", "A bad cat.").unwrap();
        let b = loaded.predict("A cat.", "A bad cat.").unwrap();
        assert_eq!(a.p_damaging.to_bits(), b.p_damaging.to_bits());
        assert_eq!(loaded.vocab.words(), model.vocab.words());
    }

    #[test]
    fn truncation_is_deterministic() {
        let model = micro_model();
        let long: String = "word ".repeat(100);
        let p1 = model.predict(&long, "short").unwrap();
        let p2 = model.predict(&long, "short").unwrap();
        assert_eq!(p1.p_damaging.to_bits(), p2.p_damaging.to_bits());
        assert_eq!(p1.word_attention.len(), model.config.max_words);
    }

    #[test]
    fn pretrained_word_embeddings_cover_matching_rows_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vectors.txt");
        let model = micro_model();
        let dim = model.config.word_embed_dim;
        let mut lines = String::new();
        for (token, base) in [("cat", 1.0f64), ("dog", 2.0), ("absent", 9.0)] {
            let vals: Vec<String> = (0..dim).map(|i| format!("{}", base + i as f64)).collect();
            lines.push_str(&format!("{token} {}\n", vals.join(" ")));
        }
        std::fs::write(&path, lines).unwrap();
        let coverage = model.load_pretrained_embeddings(&path, EmbeddingKind::Word).unwrap();
        assert!((coverage - 2.0 / model.vocab.len() as f64).abs() < 1e-12);
        let id = model.vocab.id("cat");
        let row =
            model.params.word_embed.values()[id * dim..(id + 1) * dim].to_vec();
        let expect: Vec<f64> = (0..dim).map(|i| 1.0 + i as f64).collect();
        assert_eq!(row, expect);
    }

    #[test]
    fn empty_embedding_file_changes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        std::fs::write(&path, "").unwrap();
        let model = micro_model();
        let before = model.params.word_embed.values();
        let coverage = model.load_pretrained_embeddings(&path, EmbeddingKind::Word).unwrap();
        assert_eq!(coverage, 0.0);
        assert_eq!(model.params.word_embed.values(), before);
    }

    #[test]
    fn wrong_vector_width_errors_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "cat 1.0 2.0\n").unwrap();
        let model = micro_model();
        let err = model.load_pretrained_embeddings(&path, EmbeddingKind::Word).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frozen_encoder_is_untouched_by_training_step() {
        use crate::nn::{AdamConfig, AdamState};
        let mut model = micro_model();
        model.set_freeze(FreezeMode::DenseOnly);
        let before = model.params.word_fwd[0].values();
        let examples = vec![Example {
            s_initial: "A cat.".into(),
            s_final: "bad".into(),
            label: 1,
        }];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let loss = model.batch_loss(&examples, true, &mut rng).unwrap();
        loss.backward().unwrap();
        let mut adam = AdamState::new(AdamConfig::default());
        adam.step(&model.params.all()).unwrap();
        assert_eq!(model.params.word_fwd[0].values(), before);
    }
}
