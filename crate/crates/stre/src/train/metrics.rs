//! Precision-recall evaluation. AUPRC is step-wise average precision with
//! the damaging class (+1) as positive: rank by descending score (stable on
//! ties) and average the precision at each positive hit.

use serde::Serialize;

use super::TrainError;

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub auprc: f64,
    /// (recall, precision) at each rank, recall non-decreasing.
    pub curve: Vec<(f64, f64)>,
    pub positives: usize,
    pub negatives: usize,
}

/// Step-wise average precision of damaging-class scores against labels.
pub fn auprc(scores: &[f64], labels: &[i8]) -> Result<f64, TrainError> {
    pr_report(scores, labels).map(|r| r.auprc)
}

pub fn pr_report(scores: &[f64], labels: &[i8]) -> Result<EvalReport, TrainError> {
    if scores.len() != labels.len() {
        return Err(TrainError::Invalid(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&l| l > 0).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(TrainError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut hits = 0usize;
    let mut ap = 0.0;
    let mut curve = Vec::with_capacity(order.len());
    for (rank, &idx) in order.iter().enumerate() {
        if labels[idx] > 0 {
            hits += 1;
            ap += hits as f64 / (rank + 1) as f64;
        }
        curve.push((hits as f64 / positives as f64, hits as f64 / (rank + 1) as f64));
    }
    Ok(EvalReport { auprc: ap / positives as f64, curve, positives, negatives })
}
