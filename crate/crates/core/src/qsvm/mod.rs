//! Fidelity-kernel machinery and the two kernel SVM formulations.
//!
//! The kernel of two scaled feature vectors is the squared overlap of their
//! embedded states, k(x, y) = |⟨Φ(x)|Φ(y)⟩|². In exact mode it is computed
//! from the two statevectors directly; in shot mode it is estimated with the
//! inversion test: run U_Φ(x) followed by U_Φ(y)† on |0…0⟩ and report the
//! empirical frequency of the all-zeros outcome, which needs no ancilla and
//! no register doubling.
//!
//! [`smo`] solves the soft-margin dual by pairwise coordinate ascent;
//! [`lssvm`] assembles and solves the least-squares SVM linear system.

mod lssvm;
mod smo;

pub use lssvm::{train_ls_svm, LsSvmModel, RidgeGamma};
pub use smo::{dual_objective, train_svm_dual, SvmDualModel};

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::featuremap::{self, FeatureMapConfig, FeatureVector};
use crate::rng::mix;
use crate::statevector::StateVector;
use crate::vqc::ShotMode;

/// Symmetric Gram matrix of fidelity-kernel values.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    size: usize,
    data: Vec<f64>, // row-major
}

impl KernelMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for row in &rows {
            if row.len() != size {
                return Err(Error::Shape(format!(
                    "kernel matrix must be square, found row of length {} in a {size}-row matrix",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(KernelMatrix { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.size + j] = v;
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    /// Check the Gram-matrix contract: symmetric within 1e-10, unit diagonal
    /// within 1e-10, entries inside [−1e-10, 1 + 1e-10].
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.size {
            if (self.get(i, i) - 1.0).abs() > 1e-10 {
                return Err(Error::Numeric(format!(
                    "kernel diagonal entry ({i},{i}) = {} is not 1",
                    self.get(i, i)
                )));
            }
            for j in 0..self.size {
                let v = self.get(i, j);
                if !(-1e-10..=1.0 + 1e-10).contains(&v) {
                    return Err(Error::Numeric(format!(
                        "kernel entry ({i},{j}) = {v} outside [0, 1]"
                    )));
                }
                if (v - self.get(j, i)).abs() > 1e-10 {
                    return Err(Error::Numeric(format!(
                        "kernel entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Smallest eigenvalue (symmetric eigen-decomposition); a Gram matrix is
    /// positive semidefinite up to roundoff, so this should be ≥ −1e-8.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = nalgebra::DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j));
        m.symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Write as plain CSV, one matrix row per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.size {
            let line = self
                .row(i)
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Read back a square CSV matrix.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (ln, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|_| {
                        Error::Data(format!("bad kernel value {tok:?} on line {}", ln + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(rows)
    }
}

/// One fidelity-kernel value.
///
/// Exact mode computes |⟨Φ(x)|Φ(y)⟩|² from the two embedded statevectors.
/// Shot mode runs the inversion-test circuit U_Φ(y)† U_Φ(x) on |0…0⟩ and
/// returns the all-zeros frequency over `r` shots, deterministic in `seed`.
pub fn kernel_entry(
    x: &FeatureVector,
    y: &FeatureVector,
    cfg: &FeatureMapConfig,
    mode: ShotMode,
    seed: u64,
) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::Shape(format!(
            "kernel arguments of dimension {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    match mode {
        ShotMode::Exact => {
            let sx = featuremap::embed(x, cfg)?;
            let sy = featuremap::embed(y, cfg)?;
            Ok(exact_fidelity(&sx, &sy))
        }
        ShotMode::Shots(r) => {
            let mut circuit = featuremap::build_feature_map_circuit(x, cfg)?;
            circuit.extend(&featuremap::build_feature_map_circuit(y, cfg)?.inverted())?;
            let mut state = StateVector::new_zero_state(cfg.n_qubits)?;
            state.apply_circuit(&circuit)?;
            let zeros = "0".repeat(cfg.n_qubits);
            let counts = state.sample(u64::from(r), seed)?;
            Ok(*counts.get(&zeros).unwrap_or(&0) as f64 / f64::from(r))
        }
    }
}

fn exact_fidelity(a: &StateVector, b: &StateVector) -> f64 {
    a.inner_product(b)
        .expect("embedded states share the register width")
        .norm_sqr()
        .min(1.0)
}

/// Full Gram matrix over `xs`. Entries are computed for i ≤ j and mirrored;
/// exact mode pins the diagonal to exactly 1, shot mode estimates it like
/// any other entry. Per-pair shot seeds are mix(seed, [i, j]) so the result
/// does not depend on evaluation order.
pub fn kernel_matrix(
    xs: &[FeatureVector],
    cfg: &FeatureMapConfig,
    mode: ShotMode,
    seed: u64,
) -> Result<KernelMatrix> {
    let m = xs.len();
    if m == 0 {
        return Err(Error::Argument("kernel matrix over zero points".into()));
    }
    let mut k = KernelMatrix { size: m, data: vec![0.0; m * m] };
    match mode {
        ShotMode::Exact => {
            let embedded = xs
                .iter()
                .map(|x| featuremap::embed(x, cfg))
                .collect::<Result<Vec<_>>>()?;
            for i in 0..m {
                k.set(i, i, 1.0);
                for j in (i + 1)..m {
                    let v = exact_fidelity(&embedded[i], &embedded[j]);
                    k.set(i, j, v);
                    k.set(j, i, v);
                }
            }
        }
        ShotMode::Shots(_) => {
            for i in 0..m {
                for j in i..m {
                    let v = kernel_entry(&xs[i], &xs[j], cfg, mode, mix(seed, &[i as u64, j as u64]))?;
                    k.set(i, j, v);
                    k.set(j, i, v);
                }
            }
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;
    use std::f64::consts::PI;

    fn fv(vals: &[f64]) -> FeatureVector {
        FeatureVector::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn kernel_self_is_one() {
        let cfg = FeatureMapConfig::new(2).unwrap();
        let x = fv(&[0.7, 2.9]);
        let k = kernel_entry(&x, &x, &cfg, ShotMode::Exact, 0).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_closed_form_values() {
        let cfg = FeatureMapConfig::new(1).unwrap();
        let zero = fv(&[0.0]);
        let k = kernel_entry(&fv(&[PI / 2.0]), &zero, &cfg, ShotMode::Exact, 0).unwrap();
        assert!(k.abs() < 1e-12);
        let k = kernel_entry(&fv(&[PI / 4.0]), &zero, &cfg, ShotMode::Exact, 0).unwrap();
        assert!((k - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kernel_dimension_mismatch() {
        let cfg = FeatureMapConfig::new(2).unwrap();
        assert!(matches!(
            kernel_entry(&fv(&[0.1]), &fv(&[0.1, 0.2]), &cfg, ShotMode::Exact, 0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn single_point_matrix() {
        let cfg = FeatureMapConfig::new(1).unwrap();
        let k = kernel_matrix(&[fv(&[1.0])], &cfg, ShotMode::Exact, 0).unwrap();
        assert_eq!(k.size(), 1);
        assert_eq!(k.get(0, 0), 1.0);
    }

    #[test]
    fn matrix_exactly_symmetric() {
        let cfg = FeatureMapConfig::new(2).unwrap();
        let xs: Vec<FeatureVector> = (0..5)
            .map(|i| fv(&[0.3 * i as f64, 0.9 * i as f64 % (2.0 * PI)]))
            .collect();
        let k = kernel_matrix(&xs, &cfg, ShotMode::Exact, 0).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(k.get(i, j), k.get(j, i));
            }
        }
        k.validate().unwrap();
    }

    #[test]
    fn exact_gram_is_psd() {
        let cfg = FeatureMapConfig::new(2).unwrap();
        let mut rng = rng_from_seed(77);
        let xs: Vec<FeatureVector> = (0..6)
            .map(|_| fv(&[rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)]))
            .collect();
        let k = kernel_matrix(&xs, &cfg, ShotMode::Exact, 0).unwrap();
        assert!(k.min_eigenvalue() >= -1e-8, "min eigenvalue {}", k.min_eigenvalue());
    }

    #[test]
    fn inversion_test_on_identical_points() {
        let cfg = FeatureMapConfig::new(2).unwrap();
        let x = fv(&[1.1, 4.0]);
        // U†U = 1 exactly, so every shot lands on all-zeros
        let k = kernel_entry(&x, &x, &cfg, ShotMode::Shots(500), 42).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn shot_estimates_converge_to_exact() {
        let cfg = FeatureMapConfig::new(2).unwrap();
        let x = fv(&[0.9, 2.0]);
        let y = fv(&[1.7, 4.4]);
        let exact = kernel_entry(&x, &y, &cfg, ShotMode::Exact, 0).unwrap();
        let mut last_mae = f64::INFINITY;
        for r in [100u32, 1_000, 10_000] {
            let mae: f64 = (0..20)
                .map(|s| {
                    let est = kernel_entry(&x, &y, &cfg, ShotMode::Shots(r), s).unwrap();
                    (est - exact).abs()
                })
                .sum::<f64>()
                / 20.0;
            assert!(mae < last_mae, "MAE at R={r} is {mae}, previous {last_mae}");
            last_mae = mae;
        }
        assert!(last_mae <= 0.02);
    }

    #[test]
    fn shot_matrix_order_independent_seeding() {
        let cfg = FeatureMapConfig::new(2).unwrap();
        let xs: Vec<FeatureVector> = (0..4).map(|i| fv(&[0.5 * i as f64, 1.1])).collect();
        let k1 = kernel_matrix(&xs, &cfg, ShotMode::Shots(200), 9).unwrap();
        let k2 = kernel_matrix(&xs, &cfg, ShotMode::Shots(200), 9).unwrap();
        assert_eq!(k1, k2);
    }

    #[test]
    fn csv_round_trip() {
        let k = KernelMatrix::from_rows(vec![
            vec![1.0, 0.25],
            vec![0.25, 1.0],
        ])
        .unwrap();
        let mut buf = Vec::new();
        k.write_csv(&mut buf).unwrap();
        let back = KernelMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn csv_rejects_garbage() {
        let res = KernelMatrix::read_csv("1.0,b\n0.0,1.0\n".as_bytes());
        assert!(matches!(res, Err(Error::Data(_))));
    }
}
