//! Minimal dense-tensor engine: reverse-mode differentiation, the LSTM and
//! attention building blocks, Adam with weight decay, a finite-difference
//! gradient checker, and a binary parameter checkpoint format.

mod adam;
mod checkpoint;
mod gradcheck;
mod lstm;
mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{checkpoint_file_hash, load_params, save_params, Section};
pub use gradcheck::{grad_check, GradCheckReport};
pub use lstm::{bilstm, lstm_cell, lstm_params, LstmDirection};
pub use tensor::{Parameter, Tensor};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, NnError>;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("{op}: shape mismatch {lhs:?} vs {rhs:?}")]
    ShapeMismatch { op: &'static str, lhs: Vec<usize>, rhs: Vec<usize> },
    #[error("{op}: {message}")]
    InvalidArg { op: &'static str, message: String },
    #[error("{op}: empty sequence")]
    EmptySequence { op: &'static str },
    #[error("non-finite gradient in parameter {name}")]
    NonFiniteGradient { name: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
