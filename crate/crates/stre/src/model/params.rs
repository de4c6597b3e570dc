//! Model configuration and the full learnable parameter set.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::nn::{lstm_params, Parameter, Result};

use super::vocab::CHAR_TABLE_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
    Sigmoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreConfig {
    pub word_embed_dim: usize,
    pub char_embed_dim: usize,
    /// Hidden size per LSTM direction; position representations are `2*hidden`.
    pub hidden: usize,
    pub attn_context_dim: usize,
    pub dense_dims: Vec<usize>,
    pub dropout: f64,
    pub max_words: usize,
    pub max_chars: usize,
    /// Squashing used for attention projections and the char embedding MLP.
    pub attn_activation: Activation,
}

impl Default for StreConfig {
    fn default() -> Self {
        StreConfig {
            word_embed_dim: 300,
            char_embed_dim: 300,
            hidden: 64,
            attn_context_dim: 64,
            dense_dims: vec![256, 64, 16],
            dropout: 0.5,
            max_words: 256,
            max_chars: 1024,
            attn_activation: Activation::Tanh,
        }
    }
}

impl StreConfig {
    /// Tiny configuration for tests and gradient checking. Dropout is off:
    /// masking half of a 4-wide layer is mostly noise.
    pub fn micro() -> Self {
        StreConfig {
            word_embed_dim: 8,
            char_embed_dim: 8,
            hidden: 4,
            attn_context_dim: 4,
            dense_dims: vec![8, 4, 2],
            dropout: 0.0,
            max_words: 32,
            max_chars: 64,
            attn_activation: Activation::Tanh,
        }
    }

    /// Compact configuration that still trains reliably on small synthetic
    /// tasks. The micro head's 2-unit bottleneck can die under relu; this
    /// one cannot.
    pub fn small() -> Self {
        StreConfig {
            word_embed_dim: 16,
            char_embed_dim: 16,
            hidden: 8,
            attn_context_dim: 8,
            dense_dims: vec![16, 8],
            dropout: 0.0,
            max_words: 32,
            max_chars: 96,
            attn_activation: Activation::Tanh,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.word_embed_dim == 0
            || self.char_embed_dim == 0
            || self.hidden == 0
            || self.attn_context_dim == 0
            || self.dense_dims.iter().any(|&d| d == 0)
            || self.max_words == 0
            || self.max_chars == 0
        {
            return Err("all dimensions must be positive".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(format!("dropout must be in [0, 1), got {}", self.dropout));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreezeMode {
    /// Every parameter trainable.
    Full,
    /// Only the dense stack and the output projection train; embeddings,
    /// recurrent weights, and attention stay frozen.
    DenseOnly,
}

impl std::str::FromStr for FreezeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" => Ok(FreezeMode::Full),
            "dense_only" => Ok(FreezeMode::DenseOnly),
            other => Err(format!("unknown freeze mode {other:?} (full|dense_only)")),
        }
    }
}

pub struct StreParams {
    /// Word embedding matrix, `vocab × word_embed_dim`.
    pub word_embed: Parameter,
    /// Character embedding table, `129 × char_embed_dim`.
    pub char_embed: Parameter,
    /// Char embedding MLP.
    pub char_mlp_w: Parameter,
    pub char_mlp_b: Parameter,
    pub word_fwd: [Parameter; 12],
    pub word_bwd: [Parameter; 12],
    pub char_fwd: [Parameter; 12],
    pub char_bwd: [Parameter; 12],
    /// Word attention projection (`2h × attn`), bias, and context vector.
    pub word_attn_w: Parameter,
    pub word_attn_b: Parameter,
    pub word_ctx: Parameter,
    pub char_attn_w: Parameter,
    pub char_attn_b: Parameter,
    pub char_ctx: Parameter,
    /// Dense stack weight/bias pairs, widths `4h -> dense_dims...`.
    pub dense: Vec<(Parameter, Parameter)>,
    pub out_w: Parameter,
    pub out_b: Parameter,
}

impl StreParams {
    pub fn init<R: Rng>(config: &StreConfig, vocab_size: usize, rng: &mut R) -> Result<StreParams> {
        let h = config.hidden;
        let we = config.word_embed_dim;
        let ce = config.char_embed_dim;
        let attn = config.attn_context_dim;
        let uni = |name: &str, shape: Vec<usize>, fanin: usize, rng: &mut R| {
            Parameter::uniform(name, shape, 1.0 / (fanin as f64).sqrt(), rng)
        };
        let word_embed = uni("word_embed", vec![vocab_size, we], we, rng)?;
        let char_embed = uni("char_embed", vec![CHAR_TABLE_SIZE, ce], ce, rng)?;
        let char_mlp_w = uni("char_mlp.w", vec![ce, ce], ce, rng)?;
        let char_mlp_b = Parameter::zeros("char_mlp.b", vec![ce])?;
        let word_fwd = lstm_params("word_fwd", we, h, rng)?;
        let word_bwd = lstm_params("word_bwd", we, h, rng)?;
        let char_fwd = lstm_params("char_fwd", ce, h, rng)?;
        let char_bwd = lstm_params("char_bwd", ce, h, rng)?;
        let word_attn_w = uni("word_attn.w", vec![2 * h, attn], 2 * h, rng)?;
        let word_attn_b = Parameter::zeros("word_attn.b", vec![attn])?;
        let word_ctx = uni("word_attn.ctx", vec![attn, 1], attn, rng)?;
        let char_attn_w = uni("char_attn.w", vec![2 * h, attn], 2 * h, rng)?;
        let char_attn_b = Parameter::zeros("char_attn.b", vec![attn])?;
        let char_ctx = uni("char_attn.ctx", vec![attn, 1], attn, rng)?;
        let mut dense = Vec::new();
        let mut width = 4 * h;
        for (i, &dim) in config.dense_dims.iter().enumerate() {
            let w = uni(&format!("dense.{i}.w"), vec![width, dim], width, rng)?;
            // Small positive bias keeps relu units alive at init.
            let b = Parameter::new(format!("dense.{i}.b"), vec![dim], vec![0.1; dim])?;
            dense.push((w, b));
            width = dim;
        }
        let out_w = uni("out.w", vec![width, 2], width, rng)?;
        let out_b = Parameter::zeros("out.b", vec![2])?;
        Ok(StreParams {
            word_embed,
            char_embed,
            char_mlp_w,
            char_mlp_b,
            word_fwd,
            word_bwd,
            char_fwd,
            char_bwd,
            word_attn_w,
            word_attn_b,
            word_ctx,
            char_attn_w,
            char_attn_b,
            char_ctx,
            dense,
            out_w,
            out_b,
        })
    }

    /// Every parameter, in a fixed declaration order.
    pub fn all(&self) -> Vec<&Parameter> {
        let mut out: Vec<&Parameter> = vec![
            &self.word_embed,
            &self.char_embed,
            &self.char_mlp_w,
            &self.char_mlp_b,
        ];
        out.extend(self.word_fwd.iter());
        out.extend(self.word_bwd.iter());
        out.extend(self.char_fwd.iter());
        out.extend(self.char_bwd.iter());
        out.extend([
            &self.word_attn_w,
            &self.word_attn_b,
            &self.word_ctx,
            &self.char_attn_w,
            &self.char_attn_b,
            &self.char_ctx,
        ]);
        for (w, b) in &self.dense {
            out.push(w);
            out.push(b);
        }
        out.push(&self.out_w);
        out.push(&self.out_b);
        out
    }

    pub fn all_mut(&mut self) -> Vec<&mut Parameter> {
        let mut out: Vec<&mut Parameter> = vec![
            &mut self.word_embed,
            &mut self.char_embed,
            &mut self.char_mlp_w,
            &mut self.char_mlp_b,
        ];
        out.extend(self.word_fwd.iter_mut());
        out.extend(self.word_bwd.iter_mut());
        out.extend(self.char_fwd.iter_mut());
        out.extend(self.char_bwd.iter_mut());
        out.push(&mut self.word_attn_w);
        out.push(&mut self.word_attn_b);
        out.push(&mut self.word_ctx);
        out.push(&mut self.char_attn_w);
        out.push(&mut self.char_attn_b);
        out.push(&mut self.char_ctx);
        for (w, b) in &mut self.dense {
            out.push(w);
            out.push(b);
        }
        out.push(&mut self.out_w);
        out.push(&mut self.out_b);
        out
    }

    pub fn is_head_param(name: &str) -> bool {
        name.starts_with("dense.") || name.starts_with("out.")
    }

    pub fn set_freeze(&mut self, mode: FreezeMode) {
        for p in self.all_mut() {
            let trainable = match mode {
                FreezeMode::Full => true,
                FreezeMode::DenseOnly => Self::is_head_param(p.name()),
            };
            p.set_trainable(trainable);
        }
    }

    pub fn trainable_count(&self) -> usize {
        self.all().iter().filter(|p| p.trainable()).map(|p| p.len()).sum()
    }
}
