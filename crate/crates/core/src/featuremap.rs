//! Non-linear data-encoding circuits and feature scaling.
//!
//! A scaled feature vector x ∈ [0, 2π]^n is embedded as
//!
//! ```text
//! |Φ(x)⟩ = ( U_{Φ(x)} · H^⊗n )^r |0…0⟩        (r = repetitions, default 2)
//! U_{Φ(x)} = exp( i Σ_S φ_S(x) Π_{i∈S} Z_i )
//! ```
//!
//! with phase functions restricted to singletons and pairs:
//! φ_{i}(x) = x_i and φ_{i,j}(x) = (π − x_i)(π − x_j). Each repetition
//! therefore emits H on every qubit, then `ZPhase(x_i)` on every qubit, then
//! `ZZPhase(φ_{i,j})` on every configured entangler pair, in that order.
//!
//! The interval is realized as the closed [0, 2π]: phases are 2π-periodic,
//! so 0 and 2π encode the same state and no boundary epsilon is needed.

use std::f64::consts::PI;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::statevector::{Circuit, GateOp, StateVector};

const TWO_PI: f64 = 2.0 * PI;

/// A feature vector already scaled into [0, 2π].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || !(0.0..=TWO_PI + 1e-12).contains(&v) {
                return Err(Error::Argument(format!(
                    "feature {i} = {v} outside [0, 2π]"
                )));
            }
        }
        Ok(FeatureVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// A subset S of qubits carrying one phase term (|S| ≤ 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PhaseTerm {
    Single(usize),
    Pair(usize, usize),
}

/// Layout of the encoding circuit: one qubit per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMapConfig {
    pub n_qubits: usize,
    pub repetitions: usize,
    /// (i, j) with i < j, applied in list order within each repetition.
    pub entangler_pairs: Vec<(usize, usize)>,
}

impl FeatureMapConfig {
    /// Default layout: two repetitions; all pairs (lexicographic) for
    /// n ≤ 4, nearest-neighbour chain for wider registers to bound depth.
    pub fn new(n_qubits: usize) -> Result<Self> {
        let pairs = if n_qubits <= 4 {
            Self::all_pairs(n_qubits)
        } else {
            Self::chain_pairs(n_qubits)
        };
        Self::with_pairs(n_qubits, 2, pairs)
    }

    pub fn with_pairs(
        n_qubits: usize,
        repetitions: usize,
        entangler_pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Config("feature map needs at least one qubit".into()));
        }
        if repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j) in &entangler_pairs {
            if i >= j {
                return Err(Error::Config(format!(
                    "entangler pair ({i}, {j}) must satisfy i < j"
                )));
            }
            if j >= n_qubits {
                return Err(Error::Config(format!(
                    "entangler pair ({i}, {j}) out of range for {n_qubits} qubits"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Config(format!("duplicate entangler pair ({i}, {j})")));
            }
        }
        Ok(FeatureMapConfig { n_qubits, repetitions, entangler_pairs })
    }

    /// All (i, j) with i < j in lexicographic order.
    pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
        pairs
    }

    /// Nearest-neighbour chain (0,1), (1,2), …
    pub fn chain_pairs(n: usize) -> Vec<(usize, usize)> {
        (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()
    }
}

/// Columnwise min/max recorded on training data, mapping raw features onto
/// [0, 2π].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingParams {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl ScalingParams {
    pub fn n_features(&self) -> usize {
        self.mins.len()
    }

    pub fn min(&self, feature: usize) -> f64 {
        self.mins[feature]
    }

    pub fn max(&self, feature: usize) -> f64 {
        self.maxs[feature]
    }
}

// JSON form fixed as {"0": {"min": …, "max": …}, …} keyed by feature index.
impl Serialize for ScalingParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        #[derive(Serialize)]
        struct MinMax {
            min: f64,
            max: f64,
        }
        let mut map = serializer.serialize_map(Some(self.mins.len()))?;
        for (i, (&min, &max)) in self.mins.iter().zip(&self.maxs).enumerate() {
            map.serialize_entry(&i.to_string(), &MinMax { min, max })?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ScalingParams {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct MinMax {
            min: f64,
            max: f64,
        }
        let raw: std::collections::BTreeMap<String, MinMax> =
            Deserialize::deserialize(deserializer)?;
        let mut indexed: Vec<(usize, MinMax)> = raw
            .into_iter()
            .map(|(k, v)| {
                k.parse::<usize>()
                    .map(|i| (i, v))
                    .map_err(|_| D::Error::custom(format!("non-numeric feature index {k:?}")))
            })
            .collect::<std::result::Result<_, _>>()?;
        indexed.sort_by_key(|(i, _)| *i);
        for (pos, (i, _)) in indexed.iter().enumerate() {
            if *i != pos {
                return Err(D::Error::custom("feature indices must be contiguous from 0"));
            }
        }
        let mins = indexed.iter().map(|(_, mm)| mm.min).collect();
        let maxs = indexed.iter().map(|(_, mm)| mm.max).collect();
        Ok(ScalingParams { mins, maxs })
    }
}

/// Record per-column min/max of the training matrix.
pub fn fit_scaling(raw: &[Vec<f64>]) -> Result<ScalingParams> {
    let first = raw
        .first()
        .ok_or_else(|| Error::Argument("cannot fit scaling on an empty matrix".into()))?;
    let d = first.len();
    let mut mins = vec![f64::INFINITY; d];
    let mut maxs = vec![f64::NEG_INFINITY; d];
    for row in raw {
        if row.len() != d {
            return Err(Error::Shape(format!(
                "ragged matrix: expected {d} columns, found {}",
                row.len()
            )));
        }
        for (c, &v) in row.iter().enumerate() {
            mins[c] = mins[c].min(v);
            maxs[c] = maxs[c].max(v);
        }
    }
    Ok(ScalingParams { mins, maxs })
}

/// Map raw rows onto [0, 2π] per feature: x' = 2π(x − min)/(max − min),
/// clamped; a zero-variance column maps to the constant π.
pub fn scale_features(raw: &[Vec<f64>], params: &ScalingParams) -> Result<Vec<FeatureVector>> {
    raw.iter().map(|row| scale_row(row, params)).collect()
}

/// Scale a single raw row.
pub fn scale_row(row: &[f64], params: &ScalingParams) -> Result<FeatureVector> {
    if row.len() != params.n_features() {
        return Err(Error::Shape(format!(
            "row has {} features, scaling params cover {}",
            row.len(),
            params.n_features()
        )));
    }
    let values = row
        .iter()
        .enumerate()
        .map(|(c, &v)| {
            let (min, max) = (params.mins[c], params.maxs[c]);
            if min == max {
                PI
            } else {
                (TWO_PI * (v - min) / (max - min)).clamp(0.0, TWO_PI)
            }
        })
        .collect();
    FeatureVector::new(values)
}

/// Evaluate every phase term: φ_{i} = x_i and φ_{i,j} = (π − x_i)(π − x_j)
/// for the configured pairs.
pub fn phase_functions(x: &FeatureVector, cfg: &FeatureMapConfig) -> Vec<(PhaseTerm, f64)> {
    let v = x.values();
    let mut out = Vec::with_capacity(v.len() + cfg.entangler_pairs.len());
    for (i, &xi) in v.iter().enumerate() {
        out.push((PhaseTerm::Single(i), xi));
    }
    for &(i, j) in &cfg.entangler_pairs {
        out.push((PhaseTerm::Pair(i, j), (PI - v[i]) * (PI - v[j])));
    }
    out
}

/// Build the encoding circuit for one scaled feature vector.
pub fn build_feature_map_circuit(x: &FeatureVector, cfg: &FeatureMapConfig) -> Result<Circuit> {
    if x.dim() != cfg.n_qubits {
        return Err(Error::Shape(format!(
            "feature vector has {} entries, feature map expects {}",
            x.dim(),
            cfg.n_qubits
        )));
    }
    let v = x.values();
    let mut circuit = Circuit::new(cfg.n_qubits);
    for _ in 0..cfg.repetitions {
        for q in 0..cfg.n_qubits {
            circuit.push(GateOp::H(q));
        }
        for (q, &xq) in v.iter().enumerate() {
            circuit.push(GateOp::ZPhase(q, xq));
        }
        for &(i, j) in &cfg.entangler_pairs {
            circuit.push(GateOp::ZZPhase(i, j, (PI - v[i]) * (PI - v[j])));
        }
    }
    Ok(circuit)
}

/// Run the encoding circuit on |0…0⟩.
pub fn embed(x: &FeatureVector, cfg: &FeatureMapConfig) -> Result<StateVector> {
    let circuit = build_feature_map_circuit(x, cfg)?;
    let mut state = StateVector::new_zero_state(cfg.n_qubits)?;
    state.apply_circuit(&circuit)?;
    Ok(state)
}
