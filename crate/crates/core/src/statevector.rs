//! Dense statevector simulation of few-qubit circuits.
//!
//! A state over `n` qubits is the full vector of `2^n` complex amplitudes.
//! Amplitude index `i` corresponds to the basis bitstring of `i` with
//! **qubit 0 as the least-significant bit**; rendered bitstrings therefore
//! read `q_{n-1} … q_1 q_0` left to right, i.e. index 1 on two qubits is
//! `"01"`.
//!
//! Gate matrices (basis order |0⟩, |1⟩):
//!
//! ```text
//! H          = (1/√2) [[1, 1], [1, -1]]
//! RY(θ)      = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]
//! ZPhase(φ)  = exp(+iφZ)        = diag(e^{iφ}, e^{-iφ})
//! ZZPhase(φ) = exp(+iφ Z⊗Z)     = diag(e^{iφ}, e^{-iφ}, e^{-iφ}, e^{iφ})
//! ```
//!
//! Sampling uses the seeded ChaCha8 stream from [`crate::rng`].

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Complex amplitude of a basis state.
pub type Amplitude = Complex64;

/// Hard cap on the register width; 2^24 amplitudes is the dense-array limit
/// this crate is willing to allocate.
pub const MAX_QUBITS: usize = 24;

/// A single gate, with angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    H(usize),
    RY(usize, f64),
    /// exp(+iφ Z_q): phase e^{iφ} on |0⟩, e^{-iφ} on |1⟩.
    ZPhase(usize, f64),
    /// exp(+iφ Z_{q1} Z_{q2}): phase e^{iφ} where the two bits agree,
    /// e^{-iφ} where they differ.
    ZZPhase(usize, usize, f64),
    CNOT { control: usize, target: usize },
    CZ(usize, usize),
}

impl GateOp {
    /// Qubit indices the gate touches.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::H(q) | GateOp::RY(q, _) | GateOp::ZPhase(q, _) => vec![q],
            GateOp::ZZPhase(a, b, _) | GateOp::CZ(a, b) => vec![a, b],
            GateOp::CNOT { control, target } => vec![control, target],
        }
    }

    /// The gate implementing the inverse unitary.
    pub fn inverse(&self) -> GateOp {
        match *self {
            GateOp::RY(q, theta) => GateOp::RY(q, -theta),
            GateOp::ZPhase(q, phi) => GateOp::ZPhase(q, -phi),
            GateOp::ZZPhase(a, b, phi) => GateOp::ZZPhase(a, b, -phi),
            ref g => g.clone(),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n_qubits {
                return Err(Error::Index(format!(
                    "gate {self} references qubit {q} on a {n_qubits}-qubit state"
                )));
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Index(format!(
                "two-qubit gate {self} needs distinct qubits"
            )));
        }
        if let GateOp::RY(_, a) | GateOp::ZPhase(_, a) | GateOp::ZZPhase(_, _, a) = *self {
            if !a.is_finite() {
                return Err(Error::Argument(format!("non-finite gate angle in {self}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::H(q) => write!(f, "H q{q}"),
            GateOp::RY(q, t) => write!(f, "RY({t:.6}) q{q}"),
            GateOp::ZPhase(q, p) => write!(f, "ZPhase({p:.6}) q{q}"),
            GateOp::ZZPhase(a, b, p) => write!(f, "ZZPhase({p:.6}) q{a},q{b}"),
            GateOp::CNOT { control, target } => write!(f, "CNOT q{control} -> q{target}"),
            GateOp::CZ(a, b) => write!(f, "CZ q{a},q{b}"),
        }
    }
}

/// An ordered gate sequence on a fixed register width.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: GateOp) {
        self.gates.push(gate);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Circuit implementing the inverse unitary: gates reversed, each inverted.
    pub fn inverted(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(GateOp::inverse).collect(),
        }
    }

    /// Append all gates of `other` (same register width required).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Shape(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }
}

impl fmt::Display for Circuit {
    /// One gate per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Render amplitude index `i` as a bitstring, qubit n-1 leftmost.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0width$b}", width = n_qubits)
}

/// Dense n-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// The all-zeros register |0…0⟩.
    pub fn new_zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Build a state from explicit amplitudes; must have length 2^n and unit
    /// norm within 1e-10.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Amplitude>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::Shape(format!(
                "expected {} amplitudes for {n_qubits} qubits, got {}",
                1usize << n_qubits,
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Argument("non-finite amplitude".into()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!("state not normalized: Σ|amp|² = {norm}")));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    /// Σ|amp|², which stays within 1e-10 of 1 under gate application.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply one gate in place.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            GateOp::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_one_qubit(q, [
                    Complex64::new(s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(-s, 0.0),
                ]);
            }
            GateOp::RY(q, theta) => {
                let (sin, cos) = (theta / 2.0).sin_cos();
                self.apply_one_qubit(q, [
                    Complex64::new(cos, 0.0),
                    Complex64::new(-sin, 0.0),
                    Complex64::new(sin, 0.0),
                    Complex64::new(cos, 0.0),
                ]);
            }
            GateOp::ZPhase(q, phi) => {
                let plus = Complex64::from_polar(1.0, phi);
                let minus = Complex64::from_polar(1.0, -phi);
                let mask = 1usize << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & mask == 0 { plus } else { minus };
                }
            }
            GateOp::ZZPhase(q1, q2, phi) => {
                let plus = Complex64::from_polar(1.0, phi);
                let minus = Complex64::from_polar(1.0, -phi);
                let m1 = 1usize << q1;
                let m2 = 1usize << q2;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    let agree = (i & m1 == 0) == (i & m2 == 0);
                    *a *= if agree { plus } else { minus };
                }
            }
            GateOp::CNOT { control, target } => {
                let cm = 1usize << control;
                let tm = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            GateOp::CZ(q1, q2) => {
                let m = (1usize << q1) | (1usize << q2);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *a = -*a;
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_one_qubit(&mut self, q: usize, u: [Complex64; 4]) {
        let mask = 1usize << q;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = u[0] * a0 + u[1] * a1;
                self.amps[j] = u[2] * a0 + u[3] * a1;
            }
        }
    }

    /// Apply a whole circuit, gates in list order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::Shape(format!(
                "circuit is on {} qubits, state on {}",
                circuit.n_qubits, self.n_qubits
            )));
        }
        for gate in &circuit.gates {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// Born-rule outcome probabilities, keyed by bitstring. Basis states with
    /// exactly zero amplitude are omitted.
    pub fn probabilities(&self) -> BTreeMap<String, f64> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| (bitstring(i, self.n_qubits), a.norm_sqr()))
            .collect()
    }

    /// Dense probability vector indexed like the amplitudes.
    pub fn probability_vector(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draw `shots` measurement outcomes i.i.d. from the Born distribution.
    /// Deterministic given `seed`.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::Argument("shots must be >= 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = rng_from_seed(seed);
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = match cdf.binary_search_by(|p| p.partial_cmp(&u).unwrap()) {
                Ok(i) | Err(i) => i.min(self.amps.len() - 1),
            };
            *counts.entry(bitstring(idx, self.n_qubits)).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// Expectation of a ±1-valued function of the measured bitstring:
    /// Σ_b f(b)·p(b).
    pub fn expectation_pm1<F: Fn(&str) -> i8>(&self, f: F) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| f64::from(f(&bitstring(i, self.n_qubits))) * a.norm_sqr())
            .sum()
    }

    /// ⟨self|other⟩ = Σ_i conj(self_i)·other_i.
    pub fn inner_product(&self, other: &StateVector) -> Result<Amplitude> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Shape(format!(
                "inner product between {}- and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Debug dump: JSON array of [re, im] pairs in index order.
    pub fn amplitudes_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.amps.iter().map(|a| [a.re, a.im]).collect();
        serde_json::to_string(&pairs).expect("serializing f64 pairs cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn zero_state_layout() {
        let s = StateVector::new_zero_state(1).unwrap();
        assert!(close(s.amps[0], Complex64::new(1.0, 0.0)));
        assert!(close(s.amps[1], Complex64::new(0.0, 0.0)));
        let s = StateVector::new_zero_state(2).unwrap();
        assert_eq!(s.amps.len(), 4);
        assert!(close(s.amps[0], Complex64::new(1.0, 0.0)));
        assert!(s.amps[1..].iter().all(|a| a.norm_sqr() == 0.0));
    }

    #[test]
    fn zero_state_bounds() {
        assert!(matches!(StateVector::new_zero_state(25), Err(Error::Config(_))));
        assert!(matches!(StateVector::new_zero_state(0), Err(Error::Config(_))));
        assert!(StateVector::new_zero_state(24).is_ok());
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amps[0], Complex64::new(r, 0.0)));
        assert!(close(s.amps[1], Complex64::new(r, 0.0)));
    }

    #[test]
    fn hadamard_involution() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        assert!(close(s.amps[0], Complex64::new(1.0, 0.0)));
        assert!(close(s.amps[1], Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn cnot_truth_table() {
        // |01⟩ means index 1: qubit 0 set, qubit 1 clear.
        let mut s = StateVector::new_zero_state(2).unwrap();
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[1] = Complex64::new(1.0, 0.0);
        s.apply_gate(&GateOp::CNOT { control: 0, target: 1 }).unwrap();
        // expect |11⟩ = index 3
        assert!(close(s.amps[3], Complex64::new(1.0, 0.0)));
        assert!(close(s.amps[1], Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn zphase_is_diagonal() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        s.apply_gate(&GateOp::ZPhase(0, std::f64::consts::PI / 3.0)).unwrap();
        let expect = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        assert!(close(s.amps[0], expect));
        assert!((s.probabilities()["0"] - 1.0).abs() < EPS);
    }

    #[test]
    fn zzphase_inverse_restores() {
        let mut s = StateVector::new_zero_state(2).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        s.apply_gate(&GateOp::H(1)).unwrap();
        let before = s.clone();
        s.apply_gate(&GateOp::ZZPhase(0, 1, 0.7)).unwrap();
        s.apply_gate(&GateOp::ZZPhase(0, 1, -0.7)).unwrap();
        for (a, b) in s.amps.iter().zip(&before.amps) {
            assert!((a - b).norm() < EPS);
        }
    }

    #[test]
    fn empty_circuit_identity() {
        let mut s = StateVector::new_zero_state(2).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        let before = s.clone();
        s.apply_circuit(&Circuit::new(2)).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn circuit_qubit_mismatch() {
        let mut s = StateVector::new_zero_state(2).unwrap();
        let c = Circuit::new(3);
        assert!(matches!(s.apply_circuit(&c), Err(Error::Shape(_))));
    }

    #[test]
    fn gate_index_out_of_range() {
        let mut s = StateVector::new_zero_state(2).unwrap();
        assert!(matches!(s.apply_gate(&GateOp::H(2)), Err(Error::Index(_))));
        assert!(matches!(
            s.apply_gate(&GateOp::CZ(1, 1)),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn probabilities_bell_state() {
        let mut s = StateVector::new_zero_state(2).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        s.apply_gate(&GateOp::CNOT { control: 0, target: 1 }).unwrap();
        let p = s.probabilities();
        assert_eq!(p.len(), 2);
        assert!((p["00"] - 0.5).abs() < EPS);
        assert!((p["11"] - 0.5).abs() < EPS);
    }

    #[test]
    fn probabilities_plus_state() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        let p = s.probabilities();
        assert!((p["0"] - 0.5).abs() < EPS);
        assert!((p["1"] - 0.5).abs() < EPS);
    }

    #[test]
    fn sample_deterministic_outcome() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        // prepare |1⟩ via RY(π)
        s.apply_gate(&GateOp::RY(0, std::f64::consts::PI)).unwrap();
        let counts = s.sample(100, 7).unwrap();
        assert_eq!(counts["1"], 100);
    }

    #[test]
    fn sample_same_seed_same_counts() {
        let mut s = StateVector::new_zero_state(2).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        s.apply_gate(&GateOp::H(1)).unwrap();
        assert_eq!(s.sample(1000, 13).unwrap(), s.sample(1000, 13).unwrap());
    }

    #[test]
    fn sample_rejects_zero_shots() {
        let s = StateVector::new_zero_state(1).unwrap();
        assert!(matches!(s.sample(0, 1), Err(Error::Argument(_))));
    }

    #[test]
    fn sample_concentration() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        let counts = s.sample(100_000, 99).unwrap();
        let f = counts["0"] as f64 / 100_000.0;
        assert!((0.49..=0.51).contains(&f), "frequency {f} outside [0.49, 0.51]");
    }

    fn parity(b: &str) -> i8 {
        if b.bytes().filter(|&c| c == b'1').count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn expectation_parity_cases() {
        let mut plus = StateVector::new_zero_state(1).unwrap();
        plus.apply_gate(&GateOp::H(0)).unwrap();
        assert!(plus.expectation_pm1(parity).abs() < EPS);

        let mut s11 = StateVector::new_zero_state(2).unwrap();
        s11.amps[0] = Complex64::new(0.0, 0.0);
        s11.amps[3] = Complex64::new(1.0, 0.0);
        assert!((s11.expectation_pm1(parity) - 1.0).abs() < EPS);

        let mut half = StateVector::new_zero_state(2).unwrap();
        half.apply_gate(&GateOp::H(0)).unwrap();
        assert!(half.expectation_pm1(parity).abs() < EPS);
    }

    #[test]
    fn inner_product_cases() {
        let mut s = StateVector::new_zero_state(2).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        s.apply_gate(&GateOp::ZZPhase(0, 1, 0.3)).unwrap();
        let ip = s.inner_product(&s).unwrap();
        assert!(close(ip, Complex64::new(1.0, 0.0)));

        let zero = StateVector::new_zero_state(1).unwrap();
        let mut one = StateVector::new_zero_state(1).unwrap();
        one.amps.swap(0, 1);
        assert!(close(zero.inner_product(&one).unwrap(), Complex64::new(0.0, 0.0)));

        let mut plus = StateVector::new_zero_state(1).unwrap();
        plus.apply_gate(&GateOp::H(0)).unwrap();
        let ip = zero.inner_product(&plus).unwrap();
        assert!(close(ip, Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn inner_product_shape_error() {
        let a = StateVector::new_zero_state(1).unwrap();
        let b = StateVector::new_zero_state(2).unwrap();
        assert!(matches!(a.inner_product(&b), Err(Error::Shape(_))));
    }

    #[test]
    fn circuit_inversion_round_trip() {
        let mut c = Circuit::new(3);
        c.push(GateOp::H(0));
        c.push(GateOp::RY(1, 0.4));
        c.push(GateOp::ZZPhase(0, 2, 1.1));
        c.push(GateOp::CNOT { control: 2, target: 1 });
        c.push(GateOp::ZPhase(2, -0.9));
        let mut s = StateVector::new_zero_state(3).unwrap();
        s.apply_circuit(&c).unwrap();
        s.apply_circuit(&c.inverted()).unwrap();
        assert!(close(s.amps[0], Complex64::new(1.0, 0.0)));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn amplitudes_json_dump() {
        let s = StateVector::new_zero_state(1).unwrap();
        assert_eq!(s.amplitudes_json(), "[[1.0,0.0],[0.0,0.0]]");
    }

    #[test]
    fn gate_display() {
        assert_eq!(GateOp::H(0).to_string(), "H q0");
        assert_eq!(GateOp::CNOT { control: 0, target: 1 }.to_string(), "CNOT q0 -> q1");
        assert_eq!(GateOp::ZZPhase(0, 1, 1.0).to_string(), "ZZPhase(1.000000) q0,q1");
    }
}
