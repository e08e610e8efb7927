//! Variational quantum classifier.
//!
//! Pipeline per sample: scale the raw row, run the encoding circuit, run the
//! trainable ansatz W(θ), then read out the parity of the measured bitstring,
//! f(b) = +1 iff b has an even number of ones. The class-probability estimate
//! p̂(+1) is either the exact Born sum over even-parity bitstrings or the
//! empirical fraction over a finite number of shots.
//!
//! The ansatz is `l` layers of [RY on every qubit, CZ nearest-neighbour
//! chain] followed by one closing RY layer, hence n·(l+1) parameters.
//!
//! Training is SPSA: two loss evaluations per iteration at θ ± c_k·Δ with
//! Rademacher Δ, step a_k = a/(k+1)^α, perturbation c_k = c/(k+1)^γ. The
//! loss is mean binary cross-entropy with probabilities clipped to
//! [1e-9, 1 − 1e-9]. After the θ loop a 1-D sweep fits the readout bias.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::featuremap::{self, FeatureMapConfig, FeatureVector, ScalingParams};
use crate::rng::{mix, rng_from_seed};
use crate::statevector::{Circuit, GateOp, StateVector};

const CLIP: f64 = 1e-9;

// stream labels for sub-seed derivation
const STREAM_PERTURB: u64 = 0x01;
const STREAM_LOSS_PLUS: u64 = 0x02;
const STREAM_LOSS_MINUS: u64 = 0x03;
const STREAM_LOSS_TRACK: u64 = 0x04;
const STREAM_BIAS: u64 = 0x05;
const STREAM_INIT: u64 = 0x06;

/// How outcome probabilities are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShotMode {
    /// Exact Born-rule sums from the statevector.
    Exact,
    /// Finite-shot sampling with the given repetition count.
    Shots(u32),
}

/// Measurement readout rule mapping bitstrings to ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    Parity,
}

/// +1 if the bitstring has an even number of ones, −1 otherwise.
pub fn parity(bits: &str) -> Label {
    if bits.bytes().filter(|&b| b == b'1').count() % 2 == 0 {
        1
    } else {
        -1
    }
}

fn parity_of_index(i: usize) -> Label {
    if i.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Build the l-layer ansatz: per layer RY(θ) on every qubit then a CZ chain,
/// plus a closing RY layer. `theta.len()` must equal n·(l+1).
pub fn build_variational_circuit(theta: &[f64], n: usize, l: usize) -> Result<Circuit> {
    if theta.len() != n * (l + 1) {
        return Err(Error::Shape(format!(
            "ansatz on {n} qubits with {l} layers needs {} parameters, got {}",
            n * (l + 1),
            theta.len()
        )));
    }
    let mut c = Circuit::new(n);
    for layer in 0..l {
        for q in 0..n {
            c.push(GateOp::RY(q, theta[layer * n + q]));
        }
        for q in 0..n.saturating_sub(1) {
            c.push(GateOp::CZ(q, q + 1));
        }
    }
    for q in 0..n {
        c.push(GateOp::RY(q, theta[l * n + q]));
    }
    Ok(c)
}

/// Exact p(+1) = Σ_{even-parity b} |amp_b|², clamped against roundoff so the
/// result is always a probability.
pub fn parity_probability(state: &StateVector) -> f64 {
    let sum: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| parity_of_index(*i) == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    sum.min(1.0)
}

/// Shot-based estimate of p(+1): fraction of sampled bitstrings with even
/// parity. Deterministic given `seed`.
pub fn parity_probability_sampled(state: &StateVector, shots: u32, seed: u64) -> Result<f64> {
    let counts = state.sample(u64::from(shots), seed)?;
    let even: u64 = counts
        .iter()
        .filter(|(b, _)| parity(b) == 1)
        .map(|(_, &c)| c)
        .sum();
    Ok(even as f64 / f64::from(shots))
}

/// A trained variational classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqcModel {
    pub feature_map: FeatureMapConfig,
    pub scaling: ScalingParams,
    pub theta: Vec<f64>,
    pub bias: f64,
    #[serde(rename = "l")]
    pub layers: usize,
    pub n_qubits: usize,
    pub readout: Readout,
}

impl VqcModel {
    /// p̂(+1) for one raw feature row.
    pub fn predict_proba(&self, x_raw: &[f64], mode: ShotMode, seed: u64) -> Result<f64> {
        let x = featuremap::scale_row(x_raw, &self.scaling)?;
        let state = self.final_state(&x)?;
        match mode {
            ShotMode::Exact => Ok(parity_probability(&state)),
            ShotMode::Shots(r) => parity_probability_sampled(&state, r, seed),
        }
    }

    /// Decide ±1 for one raw feature row. The decision value is
    /// p̂ − (1 − p̂) + bias; an exact zero resolves to +1.
    pub fn classify(&self, x_raw: &[f64], mode: ShotMode, seed: u64) -> Result<Label> {
        let p = self.predict_proba(x_raw, mode, seed)?;
        Ok(decide(p, self.bias))
    }

    fn final_state(&self, x: &FeatureVector) -> Result<StateVector> {
        let mut state = featuremap::embed(x, &self.feature_map)?;
        let ansatz = build_variational_circuit(&self.theta, self.n_qubits, self.layers)?;
        state.apply_circuit(&ansatz)?;
        Ok(state)
    }
}

/// Decision rule shared by training and inference: sign of p̂ − (1−p̂) + b
/// with zero resolving to +1.
fn decide(p_plus: f64, bias: f64) -> Label {
    if 2.0 * p_plus - 1.0 + bias >= 0.0 {
        1
    } else {
        -1
    }
}

/// SPSA hyperparameters and evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_iters: usize,
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub shots: ShotMode,
    pub seed: u64,
    /// Start from seeded uniform angles in (−π, π) instead of all zeros.
    pub random_init: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_iters: 200,
            a: 0.1,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            shots: ShotMode::Exact,
            seed: 0,
            random_init: false,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.a <= 0.0 || self.c <= 0.0 {
            return Err(Error::Config("SPSA gains a and c must be positive".into()));
        }
        if !self.alpha.is_finite() || !self.gamma.is_finite() {
            return Err(Error::Config("SPSA exponents must be finite".into()));
        }
        if let ShotMode::Shots(0) = self.shots {
            return Err(Error::Config("shot count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Mean binary cross-entropy of the model on `data`, p clipped to
/// [1e-9, 1 − 1e-9]. Per-sample shot seeds are derived as mix(seed, [i]).
pub fn loss(model: &VqcModel, data: &Dataset, mode: ShotMode, seed: u64) -> Result<f64> {
    if data.n_rows() == 0 {
        return Err(Error::Argument("loss over an empty dataset".into()));
    }
    let mut total = 0.0;
    for (i, (row, &y)) in data.rows.iter().zip(&data.labels).enumerate() {
        let p = model.predict_proba(row, mode, mix(seed, &[i as u64]))?;
        total += bce(p, y);
    }
    Ok(total / data.n_rows() as f64)
}

fn bce(p_plus: f64, y: Label) -> f64 {
    let p = if y == 1 { p_plus } else { 1.0 - p_plus };
    -p.clamp(CLIP, 1.0 - CLIP).ln()
}

/// Evaluation context caching the embedded (feature-map) states so SPSA only
/// re-runs the ansatz.
struct TrainContext {
    embedded: Vec<StateVector>,
    labels: Vec<Label>,
    n: usize,
    layers: usize,
    shots: ShotMode,
}

impl TrainContext {
    fn proba(&self, i: usize, ansatz: &Circuit, seed: u64) -> Result<f64> {
        let mut state = self.embedded[i].clone();
        state.apply_circuit(ansatz)?;
        match self.shots {
            ShotMode::Exact => Ok(parity_probability(&state)),
            ShotMode::Shots(r) => parity_probability_sampled(&state, r, seed),
        }
    }

    fn loss_at(&self, theta: &[f64], eval_seed: u64) -> Result<f64> {
        let ansatz = build_variational_circuit(theta, self.n, self.layers)?;
        let mut total = 0.0;
        for i in 0..self.embedded.len() {
            let p = self.proba(i, &ansatz, mix(eval_seed, &[i as u64]))?;
            total += bce(p, self.labels[i]);
        }
        Ok(total / self.embedded.len() as f64)
    }

    fn probas_at(&self, theta: &[f64], eval_seed: u64) -> Result<Vec<f64>> {
        let ansatz = build_variational_circuit(theta, self.n, self.layers)?;
        (0..self.embedded.len())
            .map(|i| self.proba(i, &ansatz, mix(eval_seed, &[i as u64])))
            .collect()
    }
}

/// Train a VQC on raw-scale data: fits the feature scaling, runs SPSA from a
/// deterministic initial point, keeps the θ with the best observed training
/// loss, then fits the bias by a 1-D accuracy sweep over [−1, 1].
///
/// `max_iters = 0` is a no-op that returns the initial parameters.
pub fn train_vqc(
    data: &Dataset,
    fm: &FeatureMapConfig,
    layers: usize,
    cfg: &TrainConfig,
) -> Result<VqcModel> {
    cfg.validate()?;
    if data.n_rows() == 0 {
        return Err(Error::Argument("cannot train on an empty dataset".into()));
    }
    if data.n_features() != fm.n_qubits {
        return Err(Error::Shape(format!(
            "data has {} features, feature map expects {}",
            data.n_features(),
            fm.n_qubits
        )));
    }

    let scaling = featuremap::fit_scaling(&data.rows)?;
    let scaled = featuremap::scale_features(&data.rows, &scaling)?;
    let embedded = scaled
        .iter()
        .map(|x| featuremap::embed(x, fm))
        .collect::<Result<Vec<_>>>()?;
    let ctx = TrainContext {
        embedded,
        labels: data.labels.clone(),
        n: fm.n_qubits,
        layers,
        shots: cfg.shots,
    };

    let n_params = fm.n_qubits * (layers + 1);
    let mut theta: Vec<f64> = if cfg.random_init {
        let mut rng = rng_from_seed(mix(cfg.seed, &[STREAM_INIT]));
        (0..n_params)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect()
    } else {
        vec![0.0; n_params]
    };

    let mut best_theta = theta.clone();
    let mut best_loss = ctx.loss_at(&theta, mix(cfg.seed, &[0, STREAM_LOSS_TRACK]))?;

    let mut perturb_rng = rng_from_seed(mix(cfg.seed, &[STREAM_PERTURB]));
    for k in 0..cfg.max_iters {
        let step = k as f64 + 1.0;
        let a_k = cfg.a / step.powf(cfg.alpha);
        let c_k = cfg.c / step.powf(cfg.gamma);

        let delta: Vec<f64> = (0..n_params)
            .map(|_| if perturb_rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();

        let theta_plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + c_k * d).collect();
        let theta_minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - c_k * d).collect();
        let k64 = k as u64;
        let l_plus = ctx.loss_at(&theta_plus, mix(cfg.seed, &[k64, STREAM_LOSS_PLUS]))?;
        let l_minus = ctx.loss_at(&theta_minus, mix(cfg.seed, &[k64, STREAM_LOSS_MINUS]))?;

        let scale = (l_plus - l_minus) / (2.0 * c_k);
        for (t, d) in theta.iter_mut().zip(&delta) {
            *t -= a_k * scale * d;
        }

        let l_now = ctx.loss_at(&theta, mix(cfg.seed, &[k64 + 1, STREAM_LOSS_TRACK]))?;
        if l_now < best_loss {
            best_loss = l_now;
            best_theta = theta.clone();
        }
    }

    let probas = ctx.probas_at(&best_theta, mix(cfg.seed, &[STREAM_BIAS]))?;
    let bias = fit_bias(&probas, &ctx.labels);

    Ok(VqcModel {
        feature_map: fm.clone(),
        scaling,
        theta: best_theta,
        bias,
        layers,
        n_qubits: fm.n_qubits,
        readout: Readout::Parity,
    })
}

/// Sweep bias candidates 0, ±0.01, …, ±1.00 (ordered by |b|, positive first)
/// and keep the first strict accuracy improvement, so the smallest workable
/// magnitude wins.
fn fit_bias(probas: &[f64], labels: &[Label]) -> f64 {
    let mut candidates = vec![0.0];
    for i in 1..=100 {
        let b = f64::from(i) * 0.01;
        candidates.push(b);
        candidates.push(-b);
    }
    let mut best_bias = 0.0;
    let mut best_acc = -1.0;
    for &b in &candidates {
        let correct = probas
            .iter()
            .zip(labels)
            .filter(|(&p, &y)| decide(p, b) == y)
            .count();
        let acc = correct as f64 / labels.len() as f64;
        if acc > best_acc {
            best_acc = acc;
            best_bias = b;
        }
    }
    best_bias
}
