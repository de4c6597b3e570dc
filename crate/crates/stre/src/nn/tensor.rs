//! Dense f64 tensors with reverse-mode differentiation.
//!
//! Graphs are built dynamically: every op allocates a fresh node holding its
//! forward values, handles to its parents, and a closure that scatters the
//! node's gradient into the parents' gradient buffers. `backward()` walks
//! reachable nodes in reverse creation order, which is a valid topological
//! order because parents are always created before children.
//!
//! Graphs are confined to one thread; model replicas may run in parallel.

use std::cell::{Cell, Ref, RefCell};
use std::collections::HashSet;
use std::rc::Rc;

use rand::Rng;

use super::{NnError, Result};

pub type Storage = Rc<RefCell<Vec<f64>>>;

pub fn storage(values: Vec<f64>) -> Storage {
    Rc::new(RefCell::new(values))
}

thread_local! {
    static NEXT_ID: Cell<u64> = const { Cell::new(1) };
}

fn next_id() -> u64 {
    NEXT_ID.with(|c| {
        let id = c.get();
        c.set(id + 1);
        id
    })
}

struct Node {
    id: u64,
    shape: Vec<usize>,
    values: Storage,
    grad: Option<Storage>,
    parents: Vec<Tensor>,
    backward: Option<Box<dyn Fn(&[f64])>>,
}

#[derive(Clone)]
pub struct Tensor {
    node: Rc<Node>,
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tensor")
            .field("shape", &self.node.shape)
            .field("requires_grad", &self.requires_grad())
            .finish()
    }
}

fn accum(grad: &Option<Storage>, f: impl FnOnce(&mut [f64])) {
    if let Some(g) = grad {
        f(&mut g.borrow_mut());
    }
}

impl Tensor {
    /// Leaf without gradient tracking.
    pub fn constant(shape: Vec<usize>, values: Vec<f64>) -> Result<Tensor> {
        Self::check_len(&shape, values.len())?;
        Ok(Tensor {
            node: Rc::new(Node {
                id: next_id(),
                shape,
                values: storage(values),
                grad: None,
                parents: Vec::new(),
                backward: None,
            }),
        })
    }

    pub fn scalar(v: f64) -> Tensor {
        Tensor::constant(vec![1], vec![v]).expect("scalar")
    }

    /// Leaf over shared storage; used by `Parameter` so that gradients
    /// accumulate into the parameter's own buffer.
    pub(crate) fn shared_leaf(shape: Vec<usize>, values: Storage, grad: Option<Storage>) -> Tensor {
        Tensor {
            node: Rc::new(Node {
                id: next_id(),
                shape,
                values,
                grad,
                parents: Vec::new(),
                backward: None,
            }),
        }
    }

    fn check_len(shape: &[usize], len: usize) -> Result<()> {
        let expect: usize = shape.iter().product();
        if expect != len || shape.iter().any(|&d| d == 0) {
            return Err(NnError::InvalidArg {
                op: "tensor",
                message: format!("shape {shape:?} does not fit {len} values"),
            });
        }
        Ok(())
    }

    fn make(
        shape: Vec<usize>,
        values: Vec<f64>,
        parents: Vec<Tensor>,
        backward: impl Fn(&[f64]) + 'static,
    ) -> Tensor {
        let requires = parents.iter().any(|p| p.requires_grad());
        let len = values.len();
        if requires {
            Tensor {
                node: Rc::new(Node {
                    id: next_id(),
                    shape,
                    values: storage(values),
                    grad: Some(storage(vec![0.0; len])),
                    parents,
                    backward: Some(Box::new(backward)),
                }),
            }
        } else {
            Tensor::constant(shape, values).expect("op output shape")
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.node.shape
    }

    pub fn rank(&self) -> usize {
        self.node.shape.len()
    }

    pub fn len(&self) -> usize {
        self.node.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn requires_grad(&self) -> bool {
        self.node.grad.is_some()
    }

    pub fn values(&self) -> Ref<'_, Vec<f64>> {
        self.node.values.borrow()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.node.values.borrow().clone()
    }

    pub fn grad_vec(&self) -> Option<Vec<f64>> {
        self.node.grad.as_ref().map(|g| g.borrow().clone())
    }

    /// Value of a scalar (single-element) tensor.
    pub fn item(&self) -> f64 {
        debug_assert_eq!(self.len(), 1);
        self.node.values.borrow()[0]
    }

    /// Cut the graph: same values, no gradient history.
    pub fn detach(&self) -> Tensor {
        Tensor::constant(self.node.shape.clone(), self.to_vec()).expect("detach")
    }

    fn rows(&self) -> usize {
        self.node.shape[0]
    }

    fn cols(&self) -> usize {
        *self.node.shape.last().unwrap()
    }

    // ---- backward ----------------------------------------------------

    /// Reverse-mode sweep from a scalar output. Gradients accumulate into
    /// every reachable grad buffer (parameters keep theirs across calls
    /// until the optimizer clears them).
    pub fn backward(&self) -> Result<()> {
        if self.len() != 1 {
            return Err(NnError::InvalidArg {
                op: "backward",
                message: format!("expected scalar output, got shape {:?}", self.node.shape),
            });
        }
        let Some(grad) = &self.node.grad else {
            return Ok(()); // nothing requires grad
        };
        grad.borrow_mut()[0] += 1.0;

        // Collect reachable grad-requiring nodes, then run in reverse id order.
        let mut stack = vec![self.clone()];
        let mut seen: HashSet<u64> = HashSet::new();
        let mut order: Vec<Tensor> = Vec::new();
        while let Some(t) = stack.pop() {
            if !t.requires_grad() || !seen.insert(t.node.id) {
                continue;
            }
            for p in &t.node.parents {
                stack.push(p.clone());
            }
            order.push(t);
        }
        order.sort_by(|a, b| b.node.id.cmp(&a.node.id));
        for t in order {
            if let (Some(f), Some(g)) = (&t.node.backward, &t.node.grad) {
                let g = g.borrow().clone();
                f(&g);
            }
        }
        Ok(())
    }

    // ---- ops ---------------------------------------------------------

    /// Matrix product of an `m×k` and a `k×n` tensor.
    pub fn matmul(&self, rhs: &Tensor) -> Result<Tensor> {
        if self.rank() != 2 || rhs.rank() != 2 || self.cols() != rhs.rows() {
            return Err(NnError::ShapeMismatch {
                op: "matmul",
                lhs: self.node.shape.clone(),
                rhs: rhs.node.shape.clone(),
            });
        }
        let (m, k, n) = (self.rows(), self.cols(), rhs.cols());
        let a = self.node.values.borrow();
        let b = rhs.node.values.borrow();
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for p in 0..k {
                let av = a[i * k + p];
                if av == 0.0 {
                    continue;
                }
                let brow = &b[p * n..(p + 1) * n];
                let orow = &mut out[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] += av * brow[j];
                }
            }
        }
        drop(a);
        drop(b);
        let a_vals = self.node.values.clone();
        let b_vals = rhs.node.values.clone();
        let a_grad = self.node.grad.clone();
        let b_grad = rhs.node.grad.clone();
        Ok(Tensor::make(
            vec![m, n],
            out,
            vec![self.clone(), rhs.clone()],
            move |g| {
                accum(&a_grad, |da| {
                    let b = b_vals.borrow();
                    for i in 0..m {
                        for p in 0..k {
                            let mut s = 0.0;
                            for j in 0..n {
                                s += g[i * n + j] * b[p * n + j];
                            }
                            da[i * k + p] += s;
                        }
                    }
                });
                accum(&b_grad, |db| {
                    let a = a_vals.borrow();
                    for p in 0..k {
                        for i in 0..m {
                            let av = a[i * k + p];
                            if av == 0.0 {
                                continue;
                            }
                            for j in 0..n {
                                db[p * n + j] += av * g[i * n + j];
                            }
                        }
                    }
                });
            },
        ))
    }

    /// Elementwise sum, or bias broadcast when `rhs` is rank-1 with length
    /// equal to the number of columns of `self`.
    pub fn add(&self, rhs: &Tensor) -> Result<Tensor> {
        if self.node.shape == rhs.node.shape {
            let out: Vec<f64> = self
                .values()
                .iter()
                .zip(rhs.values().iter())
                .map(|(a, b)| a + b)
                .collect();
            let a_grad = self.node.grad.clone();
            let b_grad = rhs.node.grad.clone();
            return Ok(Tensor::make(
                self.node.shape.clone(),
                out,
                vec![self.clone(), rhs.clone()],
                move |g| {
                    accum(&a_grad, |da| {
                        for (d, gv) in da.iter_mut().zip(g) {
                            *d += gv;
                        }
                    });
                    accum(&b_grad, |db| {
                        for (d, gv) in db.iter_mut().zip(g) {
                            *d += gv;
                        }
                    });
                },
            ));
        }
        if self.rank() == 2 && rhs.rank() == 1 && self.cols() == rhs.len() {
            let (m, n) = (self.rows(), self.cols());
            let b = rhs.values();
            let out: Vec<f64> = self
                .values()
                .iter()
                .enumerate()
                .map(|(idx, a)| a + b[idx % n])
                .collect();
            drop(b);
            let a_grad = self.node.grad.clone();
            let b_grad = rhs.node.grad.clone();
            return Ok(Tensor::make(
                vec![m, n],
                out,
                vec![self.clone(), rhs.clone()],
                move |g| {
                    accum(&a_grad, |da| {
                        for (d, gv) in da.iter_mut().zip(g) {
                            *d += gv;
                        }
                    });
                    accum(&b_grad, |db| {
                        for (idx, gv) in g.iter().enumerate() {
                            db[idx % n] += gv;
                        }
                    });
                },
            ));
        }
        Err(NnError::ShapeMismatch {
            op: "add",
            lhs: self.node.shape.clone(),
            rhs: rhs.node.shape.clone(),
        })
    }

    /// Elementwise product, same shapes only.
    pub fn mul(&self, rhs: &Tensor) -> Result<Tensor> {
        if self.node.shape != rhs.node.shape {
            return Err(NnError::ShapeMismatch {
                op: "mul",
                lhs: self.node.shape.clone(),
                rhs: rhs.node.shape.clone(),
            });
        }
        let out: Vec<f64> = self
            .values()
            .iter()
            .zip(rhs.values().iter())
            .map(|(a, b)| a * b)
            .collect();
        let a_vals = self.node.values.clone();
        let b_vals = rhs.node.values.clone();
        let a_grad = self.node.grad.clone();
        let b_grad = rhs.node.grad.clone();
        Ok(Tensor::make(
            self.node.shape.clone(),
            out,
            vec![self.clone(), rhs.clone()],
            move |g| {
                accum(&a_grad, |da| {
                    let b = b_vals.borrow();
                    for i in 0..g.len() {
                        da[i] += g[i] * b[i];
                    }
                });
                accum(&b_grad, |db| {
                    let a = a_vals.borrow();
                    for i in 0..g.len() {
                        db[i] += g[i] * a[i];
                    }
                });
            },
        ))
    }

    pub fn scale(&self, c: f64) -> Tensor {
        let out: Vec<f64> = self.values().iter().map(|v| v * c).collect();
        let grad = self.node.grad.clone();
        Tensor::make(self.node.shape.clone(), out, vec![self.clone()], move |g| {
            accum(&grad, |d| {
                for (dv, gv) in d.iter_mut().zip(g) {
                    *dv += c * gv;
                }
            });
        })
    }

    fn unary(&self, fwd: impl Fn(f64) -> f64, dfdy: impl Fn(f64, f64) -> f64 + 'static) -> Tensor {
        let input: Vec<f64> = self.to_vec();
        let out: Vec<f64> = input.iter().map(|&v| fwd(v)).collect();
        let out_copy = out.clone();
        let grad = self.node.grad.clone();
        Tensor::make(self.node.shape.clone(), out, vec![self.clone()], move |g| {
            accum(&grad, |d| {
                for i in 0..g.len() {
                    d[i] += g[i] * dfdy(input[i], out_copy[i]);
                }
            });
        })
    }

    pub fn tanh(&self) -> Tensor {
        self.unary(f64::tanh, |_, y| 1.0 - y * y)
    }

    pub fn sigmoid(&self) -> Tensor {
        self.unary(|x| 1.0 / (1.0 + (-x).exp()), |_, y| y * (1.0 - y))
    }

    pub fn relu(&self) -> Tensor {
        self.unary(|x| x.max(0.0), |x, _| if x > 0.0 { 1.0 } else { 0.0 })
    }

    /// Inverted dropout: keeps with probability `1-p` and rescales at train
    /// time; identity in eval mode.
    pub fn dropout<R: Rng>(&self, p: f64, train: bool, rng: &mut R) -> Result<Tensor> {
        if !(0.0..1.0).contains(&p) {
            return Err(NnError::InvalidArg {
                op: "dropout",
                message: format!("p must be in [0, 1), got {p}"),
            });
        }
        if !train || p == 0.0 {
            return Ok(self.clone());
        }
        let keep = 1.0 - p;
        let mask: Vec<f64> = (0..self.len())
            .map(|_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 })
            .collect();
        let out: Vec<f64> = self.values().iter().zip(&mask).map(|(v, m)| v * m).collect();
        let grad = self.node.grad.clone();
        Ok(Tensor::make(self.node.shape.clone(), out, vec![self.clone()], move |g| {
            accum(&grad, |d| {
                for i in 0..g.len() {
                    d[i] += g[i] * mask[i];
                }
            });
        }))
    }

    /// Softmax along `axis` (rank-1 tensors ignore the axis).
    pub fn softmax(&self, axis: usize) -> Result<Tensor> {
        let lanes = self.lanes(axis)?;
        let vals = self.to_vec();
        let mut out = vals.clone();
        for lane in &lanes {
            softmax_lane(&mut out, lane);
        }
        let out_copy = out.clone();
        let grad = self.node.grad.clone();
        Ok(Tensor::make(self.node.shape.clone(), out, vec![self.clone()], move |g| {
            accum(&grad, |d| {
                for lane in &lanes {
                    let dot: f64 = lane.iter().map(|&i| g[i] * out_copy[i]).sum();
                    for &i in lane {
                        d[i] += out_copy[i] * (g[i] - dot);
                    }
                }
            });
        }))
    }

    /// Rank-1 softmax with masked positions assigned exactly zero weight;
    /// the rest renormalize among themselves.
    pub fn masked_softmax(&self, mask: &[bool]) -> Result<Tensor> {
        if self.rank() != 1 || mask.len() != self.len() {
            return Err(NnError::InvalidArg {
                op: "masked_softmax",
                message: format!("mask length {} vs tensor shape {:?}", mask.len(), self.node.shape),
            });
        }
        let live: Vec<usize> = (0..mask.len()).filter(|&i| !mask[i]).collect();
        if live.is_empty() {
            return Err(NnError::InvalidArg {
                op: "masked_softmax",
                message: "all positions masked".into(),
            });
        }
        let vals = self.to_vec();
        let mut out = vec![0.0; vals.len()];
        let max = live.iter().map(|&i| vals[i]).fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for &i in &live {
            out[i] = (vals[i] - max).exp();
            denom += out[i];
        }
        for &i in &live {
            out[i] /= denom;
        }
        let out_copy = out.clone();
        let grad = self.node.grad.clone();
        Ok(Tensor::make(self.node.shape.clone(), out, vec![self.clone()], move |g| {
            accum(&grad, |d| {
                let dot: f64 = live.iter().map(|&i| g[i] * out_copy[i]).sum();
                for &i in &live {
                    d[i] += out_copy[i] * (g[i] - dot);
                }
            });
        }))
    }

    fn lanes(&self, axis: usize) -> Result<Vec<Vec<usize>>> {
        match (self.rank(), axis) {
            (1, 0) => Ok(vec![(0..self.len()).collect()]),
            (2, 1) => {
                let (m, n) = (self.rows(), self.cols());
                Ok((0..m).map(|i| (i * n..(i + 1) * n).collect()).collect())
            }
            (2, 0) => {
                let (m, n) = (self.rows(), self.cols());
                Ok((0..n).map(|j| (0..m).map(|i| i * n + j).collect()).collect())
            }
            _ => Err(NnError::InvalidArg {
                op: "softmax",
                message: format!("axis {axis} invalid for shape {:?}", self.node.shape),
            }),
        }
    }

    /// Concatenate along `axis`. Rank-1 tensors concatenate end to end;
    /// rank-2 tensors stack rows (axis 0) or columns (axis 1).
    pub fn concat(tensors: &[Tensor], axis: usize) -> Result<Tensor> {
        if tensors.is_empty() {
            return Err(NnError::EmptySequence { op: "concat" });
        }
        let rank = tensors[0].rank();
        for t in tensors {
            if t.rank() != rank {
                return Err(NnError::ShapeMismatch {
                    op: "concat",
                    lhs: tensors[0].shape().to_vec(),
                    rhs: t.shape().to_vec(),
                });
            }
        }
        match (rank, axis) {
            (1, 0) => {
                let mut out = Vec::new();
                let mut spans = Vec::new();
                for t in tensors {
                    let start = out.len();
                    out.extend_from_slice(&t.values());
                    spans.push((start, t.len(), t.node.grad.clone()));
                }
                let total = out.len();
                Ok(Tensor::make(vec![total], out, tensors.to_vec(), move |g| {
                    for (start, len, grad) in &spans {
                        accum(grad, |d| {
                            for i in 0..*len {
                                d[i] += g[start + i];
                            }
                        });
                    }
                }))
            }
            (2, 0) => {
                let n = tensors[0].cols();
                for t in tensors {
                    if t.cols() != n {
                        return Err(NnError::ShapeMismatch {
                            op: "concat",
                            lhs: tensors[0].shape().to_vec(),
                            rhs: t.shape().to_vec(),
                        });
                    }
                }
                let mut out = Vec::new();
                let mut spans = Vec::new();
                for t in tensors {
                    let start = out.len();
                    out.extend_from_slice(&t.values());
                    spans.push((start, t.len(), t.node.grad.clone()));
                }
                let m = out.len() / n;
                Ok(Tensor::make(vec![m, n], out, tensors.to_vec(), move |g| {
                    for (start, len, grad) in &spans {
                        accum(grad, |d| {
                            for i in 0..*len {
                                d[i] += g[start + i];
                            }
                        });
                    }
                }))
            }
            (2, 1) => {
                let m = tensors[0].rows();
                for t in tensors {
                    if t.rows() != m {
                        return Err(NnError::ShapeMismatch {
                            op: "concat",
                            lhs: tensors[0].shape().to_vec(),
                            rhs: t.shape().to_vec(),
                        });
                    }
                }
                let n_total: usize = tensors.iter().map(|t| t.cols()).sum();
                let mut out = vec![0.0; m * n_total];
                let mut spans = Vec::new();
                let mut col = 0;
                for t in tensors {
                    let n = t.cols();
                    let vals = t.values();
                    for i in 0..m {
                        out[i * n_total + col..i * n_total + col + n]
                            .copy_from_slice(&vals[i * n..(i + 1) * n]);
                    }
                    spans.push((col, n, t.node.grad.clone()));
                    col += n;
                }
                Ok(Tensor::make(vec![m, n_total], out, tensors.to_vec(), move |g| {
                    for (col, n, grad) in &spans {
                        accum(grad, |d| {
                            for i in 0..m {
                                for j in 0..*n {
                                    d[i * n + j] += g[i * n_total + col + j];
                                }
                            }
                        });
                    }
                }))
            }
            _ => Err(NnError::InvalidArg {
                op: "concat",
                message: format!("axis {axis} invalid for rank {rank}"),
            }),
        }
    }

    pub fn transpose(&self) -> Result<Tensor> {
        if self.rank() != 2 {
            return Err(NnError::InvalidArg {
                op: "transpose",
                message: format!("rank-2 required, got shape {:?}", self.node.shape),
            });
        }
        let (m, n) = (self.rows(), self.cols());
        let vals = self.values();
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                out[j * m + i] = vals[i * n + j];
            }
        }
        drop(vals);
        let grad = self.node.grad.clone();
        Ok(Tensor::make(vec![n, m], out, vec![self.clone()], move |g| {
            accum(&grad, |d| {
                for i in 0..m {
                    for j in 0..n {
                        d[i * n + j] += g[j * m + i];
                    }
                }
            });
        }))
    }

    /// Row `i` of a rank-2 tensor as a `1×n` tensor; the embedding lookup.
    pub fn row(&self, i: usize) -> Result<Tensor> {
        if self.rank() != 2 || i >= self.rows() {
            return Err(NnError::InvalidArg {
                op: "row",
                message: format!("row {i} of shape {:?}", self.node.shape),
            });
        }
        let n = self.cols();
        let out = self.values()[i * n..(i + 1) * n].to_vec();
        let grad = self.node.grad.clone();
        Ok(Tensor::make(vec![1, n], out, vec![self.clone()], move |g| {
            accum(&grad, |d| {
                for j in 0..n {
                    d[i * n + j] += g[j];
                }
            });
        }))
    }

    /// Reinterpret a `1×n` or `n×1` tensor as rank-1.
    pub fn flatten(&self) -> Tensor {
        self.reshape(vec![self.len()]).expect("flatten")
    }

    /// Same data, different shape; gradients pass straight through.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Tensor> {
        Self::check_len(&shape, self.len())?;
        let len = self.len();
        let out = self.to_vec();
        let grad = self.node.grad.clone();
        Ok(Tensor::make(shape, out, vec![self.clone()], move |g| {
            accum(&grad, |d| {
                for i in 0..len {
                    d[i] += g[i];
                }
            });
        }))
    }

    pub fn sum(&self) -> Tensor {
        let s: f64 = self.values().iter().sum();
        let grad = self.node.grad.clone();
        Tensor::make(vec![1], vec![s], vec![self.clone()], move |g| {
            accum(&grad, |d| {
                for dv in d.iter_mut() {
                    *dv += g[0];
                }
            });
        })
    }

    pub fn mean(&self) -> Tensor {
        let n = self.len() as f64;
        self.sum().scale(1.0 / n)
    }

    /// Negative log of the probability at `class`, clamped at 1e-12.
    pub fn cross_entropy(&self, class: usize) -> Result<Tensor> {
        const EPS: f64 = 1e-12;
        if class >= self.len() {
            return Err(NnError::InvalidArg {
                op: "cross_entropy",
                message: format!("class {class} out of range for {} outputs", self.len()),
            });
        }
        let p = self.values()[class];
        let clamped = p.max(EPS);
        let grad = self.node.grad.clone();
        Ok(Tensor::make(vec![1], vec![-clamped.ln()], vec![self.clone()], move |g| {
            accum(&grad, |d| {
                if p >= EPS {
                    d[class] += -g[0] / p;
                }
            });
        }))
    }
}

fn softmax_lane(out: &mut [f64], lane: &[usize]) {
    let max = lane.iter().map(|&i| out[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut denom = 0.0;
    for &i in lane {
        out[i] = (out[i] - max).exp();
        denom += out[i];
    }
    for &i in lane {
        out[i] /= denom;
    }
}

/// A named, optionally trainable tensor with persistent value and gradient
/// buffers shared with the leaves it spawns.
#[derive(Clone)]
pub struct Parameter {
    name: String,
    shape: Vec<usize>,
    values: Storage,
    grad: Storage,
    trainable: bool,
}

impl Parameter {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, values: Vec<f64>) -> Result<Parameter> {
        Tensor::check_len(&shape, values.len())?;
        let len = values.len();
        Ok(Parameter {
            name: name.into(),
            shape,
            values: storage(values),
            grad: storage(vec![0.0; len]),
            trainable: true,
        })
    }

    /// Uniform(-bound, bound) initialization.
    pub fn uniform<R: Rng>(
        name: impl Into<String>,
        shape: Vec<usize>,
        bound: f64,
        rng: &mut R,
    ) -> Result<Parameter> {
        let len: usize = shape.iter().product();
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-bound..bound)).collect();
        Parameter::new(name, shape, values)
    }

    pub fn zeros(name: impl Into<String>, shape: Vec<usize>) -> Result<Parameter> {
        let len: usize = shape.iter().product();
        Parameter::new(name, shape, vec![0.0; len])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn trainable(&self) -> bool {
        self.trainable
    }

    pub fn set_trainable(&mut self, trainable: bool) {
        self.trainable = trainable;
    }

    /// A graph leaf over this parameter's storage. Gradients flow back into
    /// the parameter only while it is trainable.
    pub fn leaf(&self) -> Tensor {
        let grad = if self.trainable { Some(self.grad.clone()) } else { None };
        Tensor::shared_leaf(self.shape.clone(), self.values.clone(), grad)
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.borrow().clone()
    }

    pub fn set_values(&self, values: Vec<f64>) -> Result<()> {
        if values.len() != self.len() {
            return Err(NnError::InvalidArg {
                op: "set_values",
                message: format!(
                    "parameter {} expects {} values, got {}",
                    self.name,
                    self.len(),
                    values.len()
                ),
            });
        }
        *self.values.borrow_mut() = values;
        Ok(())
    }

    pub fn grad(&self) -> Vec<f64> {
        self.grad.borrow().clone()
    }

    pub fn zero_grad(&self) {
        for g in self.grad.borrow_mut().iter_mut() {
            *g = 0.0;
        }
    }

    pub(crate) fn values_storage(&self) -> &Storage {
        &self.values
    }

    pub(crate) fn grad_storage(&self) -> &Storage {
        &self.grad
    }

    /// In-place nudge of one coordinate; used by the gradient checker.
    pub fn nudge(&self, index: usize, delta: f64) {
        self.values.borrow_mut()[index] += delta;
    }
}

impl std::fmt::Debug for Parameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Parameter")
            .field("name", &self.name)
            .field("shape", &self.shape)
            .field("trainable", &self.trainable)
            .finish()
    }
}
