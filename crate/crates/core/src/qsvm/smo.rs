//! Pairwise coordinate-ascent solver for the soft-margin dual
//!
//!     max  Σα_i − ½ Σ_ij α_i α_j y_i y_j K_ij
//!     s.t. 0 ≤ α_i ≤ C,  Σα_i y_i = 0
//!
//! Working pairs are chosen by maximal KKT violation (the most-violating
//! pair over the up/down index sets), the two-variable subproblem is solved
//! in closed form and clipped to the box, and the gradient is maintained
//! incrementally. Terminates when the violation gap drops to 1e-6; gives up
//! with a numeric error after 10⁴·M iterations.

use serde::{Deserialize, Serialize};

use super::KernelMatrix;
use crate::dataset::Label;
use crate::error::{Error, Result};

const KKT_TOL: f64 = 1e-6;
const TAU: f64 = 1e-12;

/// Trained dual-form SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmDualModel {
    pub alphas: Vec<f64>,
    pub bias: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Indices with α_i > 0.
    pub support_indices: Vec<usize>,
    /// Training labels, needed to evaluate the decision function.
    pub labels: Vec<Label>,
}

impl SvmDualModel {
    /// Decision value Σ α_i y_i k(x_i, x₀) + b for a row of kernel values
    /// against the training points.
    pub fn decision_value(&self, k_row: &[f64]) -> Result<f64> {
        if k_row.len() != self.alphas.len() {
            return Err(Error::Shape(format!(
                "kernel row of length {}, model trained on {} points",
                k_row.len(),
                self.alphas.len()
            )));
        }
        let mut v = self.bias;
        for ((&a, &y), &k) in self.alphas.iter().zip(&self.labels).zip(k_row) {
            v += a * f64::from(y) * k;
        }
        Ok(v)
    }

    /// sign of the decision value; exact zero resolves to +1.
    pub fn predict(&self, k_row: &[f64]) -> Result<Label> {
        Ok(if self.decision_value(k_row)? >= 0.0 { 1 } else { -1 })
    }
}

/// Dual objective Σα − ½ αᵀQα with Q_ij = y_i y_j K_ij.
pub fn dual_objective(k: &KernelMatrix, y: &[Label], alphas: &[f64]) -> f64 {
    let m = alphas.len();
    let mut quad = 0.0;
    for i in 0..m {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..m {
            quad += alphas[i] * alphas[j] * f64::from(y[i]) * f64::from(y[j]) * k.get(i, j);
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// Solve the dual to KKT tolerance 1e-6 and recover the bias from the free
/// support vectors (midpoint of the feasible interval if none are free).
pub fn train_svm_dual(k: &KernelMatrix, y: &[Label], c: f64) -> Result<SvmDualModel> {
    let m = k.size();
    if y.len() != m {
        return Err(Error::Shape(format!(
            "{} labels for a {m}-point kernel matrix",
            y.len()
        )));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Config(format!("C must be positive and finite, got {c}")));
    }
    if y.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::Argument("labels must be +1 or -1".into()));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::Argument(
            "degenerate problem: all training labels identical".into(),
        ));
    }

    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let q = |i: usize, j: usize| yf[i] * yf[j] * k.get(i, j);

    let mut alphas = vec![0.0f64; m];
    // gradient of ½αᵀQα − Σα
    let mut grad = vec![-1.0f64; m];

    let max_iters = 10_000usize.saturating_mul(m);
    let mut converged = false;
    for _ in 0..max_iters {
        // maximal-violating pair: i from the "up" set, j from the "down" set
        let mut i_up: Option<usize> = None;
        let mut m_up = f64::NEG_INFINITY;
        let mut j_low: Option<usize> = None;
        let mut m_low = f64::INFINITY;
        for t in 0..m {
            let v = -yf[t] * grad[t];
            let in_up = (y[t] == 1 && alphas[t] < c) || (y[t] == -1 && alphas[t] > 0.0);
            let in_low = (y[t] == -1 && alphas[t] < c) || (y[t] == 1 && alphas[t] > 0.0);
            if in_up && v > m_up {
                m_up = v;
                i_up = Some(t);
            }
            if in_low && v < m_low {
                m_low = v;
                j_low = Some(t);
            }
        }
        let (i, j) = match (i_up, j_low) {
            (Some(i), Some(j)) => (i, j),
            _ => {
                converged = true;
                break;
            }
        };
        if m_up - m_low <= KKT_TOL {
            converged = true;
            break;
        }

        let old_i = alphas[i];
        let old_j = alphas[j];
        let quad = (k.get(i, i) + k.get(j, j) - 2.0 * k.get(i, j)).max(TAU);

        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = old_i - old_j;
            alphas[i] += delta;
            alphas[j] += delta;
            if diff > 0.0 {
                if alphas[j] < 0.0 {
                    alphas[j] = 0.0;
                    alphas[i] = diff;
                }
            } else if alphas[i] < 0.0 {
                alphas[i] = 0.0;
                alphas[j] = -diff;
            }
            if diff > 0.0 {
                if alphas[i] > c {
                    alphas[i] = c;
                    alphas[j] = c - diff;
                }
            } else if alphas[j] > c {
                alphas[j] = c;
                alphas[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = old_i + old_j;
            alphas[i] -= delta;
            alphas[j] += delta;
            if sum > c {
                if alphas[i] > c {
                    alphas[i] = c;
                    alphas[j] = sum - c;
                }
            } else if alphas[j] < 0.0 {
                alphas[j] = 0.0;
                alphas[i] = sum;
            }
            if sum > c {
                if alphas[j] > c {
                    alphas[j] = c;
                    alphas[i] = sum - c;
                }
            } else if alphas[i] < 0.0 {
                alphas[i] = 0.0;
                alphas[j] = sum;
            }
        }

        let di = alphas[i] - old_i;
        let dj = alphas[j] - old_j;
        if di == 0.0 && dj == 0.0 {
            // numerically stuck pair; the violation gap is already ≈ tol
            converged = true;
            break;
        }
        for t in 0..m {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    if !converged {
        return Err(Error::Numeric(format!(
            "SMO did not reach KKT tolerance {KKT_TOL} within {max_iters} iterations"
        )));
    }

    // bias: average over free support vectors, else feasible-interval midpoint
    let free: Vec<usize> = (0..m)
        .filter(|&t| alphas[t] > 0.0 && alphas[t] < c)
        .collect();
    let bias = if free.is_empty() {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for t in 0..m {
            let v = -yf[t] * grad[t];
            let in_up = (y[t] == 1 && alphas[t] < c) || (y[t] == -1 && alphas[t] > 0.0);
            let in_low = (y[t] == -1 && alphas[t] < c) || (y[t] == 1 && alphas[t] > 0.0);
            if in_up {
                lo = lo.max(v);
            }
            if in_low {
                hi = hi.min(v);
            }
        }
        (lo + hi) / 2.0
    } else {
        free.iter().map(|&t| -yf[t] * grad[t]).sum::<f64>() / free.len() as f64
    };

    let support_indices: Vec<usize> = (0..m).filter(|&t| alphas[t] > 0.0).collect();
    Ok(SvmDualModel {
        alphas,
        bias,
        c,
        support_indices,
        labels: y.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_kernel(m: usize) -> KernelMatrix {
        let rows = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        KernelMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn two_point_identity_kernel() {
        let k = identity_kernel(2);
        let model = train_svm_dual(&k, &[1, -1], 10.0).unwrap();
        assert!((model.alphas[0] - 1.0).abs() < 1e-8);
        assert!((model.alphas[1] - 1.0).abs() < 1e-8);
        assert!(model.bias.abs() < 1e-8);
        assert_eq!(model.support_indices, vec![0, 1]);
    }

    #[test]
    fn two_point_prediction() {
        let k = identity_kernel(2);
        let model = train_svm_dual(&k, &[1, -1], 10.0).unwrap();
        assert_eq!(model.predict(&[1.0, 0.0]).unwrap(), 1);
        assert_eq!(model.predict(&[0.0, 1.0]).unwrap(), -1);
        // decision value exactly zero resolves to +1
        assert_eq!(model.predict(&[0.5, 0.5]).unwrap(), 1);
    }

    #[test]
    fn rejects_bad_config() {
        let k = identity_kernel(2);
        assert!(matches!(
            train_svm_dual(&k, &[1, -1], 0.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            train_svm_dual(&k, &[1, -1], -1.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            train_svm_dual(&k, &[1, 1], 1.0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            train_svm_dual(&k, &[1], 1.0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn equality_constraint_holds() {
        // unbalanced labels force bound hits; Σ α_i y_i must stay 0
        let rows = vec![
            vec![1.0, 0.8, 0.1, 0.2],
            vec![0.8, 1.0, 0.15, 0.1],
            vec![0.1, 0.15, 1.0, 0.7],
            vec![0.2, 0.1, 0.7, 1.0],
        ];
        let k = KernelMatrix::from_rows(rows).unwrap();
        let y = [1, 1, 1, -1];
        let model = train_svm_dual(&k, &y, 1.0).unwrap();
        let balance: f64 = model
            .alphas
            .iter()
            .zip(&y)
            .map(|(&a, &yy)| a * f64::from(yy))
            .sum();
        assert!(balance.abs() < 1e-8, "Σ α y = {balance}");
        for &a in &model.alphas {
            assert!((-1e-12..=1.0 + 1e-12).contains(&a));
        }
    }

    #[test]
    fn json_schema() {
        let k = identity_kernel(2);
        let model = train_svm_dual(&k, &[1, -1], 10.0).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        assert!(json.contains("\"alphas\""));
        assert!(json.contains("\"C\":10.0"));
        assert!(json.contains("\"support_indices\""));
        let back: SvmDualModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);
    }
}
