//! Standard LSTM cell and a bidirectional wrapper.
//!
//! Gate order throughout: input, forget, candidate, output. Inputs and
//! states are `1×d` row vectors.

use super::tensor::{Parameter, Tensor};
use super::{NnError, Result};
use rand::Rng;

/// Weights for one direction, as graph leaves.
pub struct LstmDirection {
    /// Input projections, `input_dim × hidden`.
    pub wx: [Tensor; 4],
    /// Recurrent projections, `hidden × hidden`.
    pub wh: [Tensor; 4],
    /// Gate biases, rank-1 `hidden`.
    pub b: [Tensor; 4],
    pub hidden: usize,
}

impl LstmDirection {
    pub fn from_params(params: &[Parameter; 12], hidden: usize) -> LstmDirection {
        LstmDirection {
            wx: std::array::from_fn(|i| params[i].leaf()),
            wh: std::array::from_fn(|i| params[4 + i].leaf()),
            b: std::array::from_fn(|i| params[8 + i].leaf()),
            hidden,
        }
    }
}

/// Allocate the 12 parameters of one LSTM direction.
///
/// Weights are uniform(-1/sqrt(fanin), 1/sqrt(fanin)); biases start at zero
/// except the forget gate, which starts at 1.
pub fn lstm_params<R: Rng>(
    prefix: &str,
    input_dim: usize,
    hidden: usize,
    rng: &mut R,
) -> Result<[Parameter; 12]> {
    const GATES: [&str; 4] = ["i", "f", "g", "o"];
    let wx_bound = 1.0 / (input_dim as f64).sqrt();
    let wh_bound = 1.0 / (hidden as f64).sqrt();
    let mut out: Vec<Parameter> = Vec::with_capacity(12);
    for gate in GATES {
        out.push(Parameter::uniform(
            format!("{prefix}.wx_{gate}"),
            vec![input_dim, hidden],
            wx_bound,
            rng,
        )?);
    }
    for gate in GATES {
        out.push(Parameter::uniform(
            format!("{prefix}.wh_{gate}"),
            vec![hidden, hidden],
            wh_bound,
            rng,
        )?);
    }
    for gate in GATES {
        let init = if gate == "f" { 1.0 } else { 0.0 };
        out.push(Parameter::new(format!("{prefix}.b_{gate}"), vec![hidden], vec![init; hidden])?);
    }
    Ok(out.try_into().expect("12 parameters"))
}

/// One step of the standard recurrence:
///   i = sig(xWxi + hWhi + bi)   f = sig(xWxf + hWhf + bf)
///   g = tanh(xWxg + hWhg + bg)  o = sig(xWxo + hWho + bo)
///   c' = f*c + i*g              h' = o * tanh(c')
pub fn lstm_cell(
    x: &Tensor,
    h_prev: &Tensor,
    c_prev: &Tensor,
    w: &LstmDirection,
) -> Result<(Tensor, Tensor)> {
    let pre = |gate: usize| -> Result<Tensor> {
        x.matmul(&w.wx[gate])?.add(&h_prev.matmul(&w.wh[gate])?)?.add(&w.b[gate])
    };
    let i = pre(0)?.sigmoid();
    let f = pre(1)?.sigmoid();
    let g = pre(2)?.tanh();
    let o = pre(3)?.sigmoid();
    let c = f.mul(c_prev)?.add(&i.mul(&g)?)?;
    let h = o.mul(&c.tanh())?;
    Ok((h, c))
}

/// Run forward and backward directions over a sequence; output t is the
/// concatenation `[fwd_h_t ; bwd_h_t]`, dimension `2*hidden`.
pub fn bilstm(xs: &[Tensor], fwd: &LstmDirection, bwd: &LstmDirection) -> Result<Vec<Tensor>> {
    if xs.is_empty() {
        return Err(NnError::EmptySequence { op: "bilstm" });
    }
    let run = |dir: &LstmDirection, order: Box<dyn Iterator<Item = usize>>| -> Result<Vec<Tensor>> {
        let mut h = Tensor::constant(vec![1, dir.hidden], vec![0.0; dir.hidden])?;
        let mut c = h.clone();
        let mut out = vec![h.clone(); xs.len()];
        for t in order {
            let (nh, nc) = lstm_cell(&xs[t], &h, &c, dir)?;
            out[t] = nh.clone();
            h = nh;
            c = nc;
        }
        Ok(out)
    };
    let fwd_states = run(fwd, Box::new(0..xs.len()))?;
    let bwd_states = run(bwd, Box::new((0..xs.len()).rev()))?;
    fwd_states
        .into_iter()
        .zip(bwd_states)
        .map(|(f, b)| Tensor::concat(&[f, b], 1))
        .collect()
}
