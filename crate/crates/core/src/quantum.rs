//! Exact small-register state-vector engine.
//!
//! Register convention: bit `k` of an amplitude index addresses qubit `k`, and
//! [`tensor`] assigns qubit indices left to right, so the first part occupies
//! the lowest qubits. A two-qubit ket `|ab⟩` therefore lives at index `a + 2b`.
//!
//! Bell states are labeled by two bits `(i, j)`:
//!
//! | label | name | state |
//! |-------|------|-------|
//! | (0,0) | ζ⁺ | (\|00⟩ + \|11⟩)/√2 |
//! | (0,1) | η⁺ | (\|01⟩ + \|10⟩)/√2 |
//! | (1,0) | ζ⁻ | (\|00⟩ − \|11⟩)/√2 |
//! | (1,1) | η⁻ | (\|01⟩ − \|10⟩)/√2 |
//!
//! Every Bell state equals `(I ⊗ σ_z^i σ_x^j)` applied to ζ⁺ up to a global
//! phase, which is why label arithmetic reduces to XOR.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Branches lighter than this are dropped from every [`BranchSet`].
pub const PROB_EPS: f64 = 1e-12;

/// Default tolerance for state comparisons.
pub const STATE_TOL: f64 = 1e-9;

pub type Bit = u8;

/// Two-bit name of one of the four Bell states; `i` is the phase (z) bit and
/// `j` the parity (x) bit. Doubles as the committed string `d₁d₂`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawLabel")]
pub struct BellLabel {
    i: u8,
    j: u8,
}

#[derive(Deserialize)]
struct RawLabel {
    i: u8,
    j: u8,
}

impl TryFrom<RawLabel> for BellLabel {
    type Error = Error;

    fn try_from(raw: RawLabel) -> Result<Self> {
        BellLabel::new(raw.i, raw.j)
    }
}

impl BellLabel {
    pub const ZETA_PLUS: BellLabel = BellLabel { i: 0, j: 0 };
    pub const ETA_PLUS: BellLabel = BellLabel { i: 0, j: 1 };
    pub const ZETA_MINUS: BellLabel = BellLabel { i: 1, j: 0 };
    pub const ETA_MINUS: BellLabel = BellLabel { i: 1, j: 1 };

    /// All four labels in lexicographic `(i, j)` order.
    pub const ALL: [BellLabel; 4] = [
        Self::ZETA_PLUS,
        Self::ETA_PLUS,
        Self::ZETA_MINUS,
        Self::ETA_MINUS,
    ];

    pub fn new(i: u8, j: u8) -> Result<Self> {
        if i > 1 || j > 1 {
            return Err(Error::InvalidParams(format!(
                "Bell label bits must be 0 or 1, got ({i},{j})"
            )));
        }
        Ok(BellLabel { i, j })
    }

    pub fn i(self) -> Bit {
        self.i
    }

    pub fn j(self) -> Bit {
        self.j
    }

    /// Position in [`BellLabel::ALL`].
    pub fn index(self) -> usize {
        (2 * self.i + self.j) as usize
    }

    pub fn from_index(index: usize) -> Self {
        Self::ALL[index & 3]
    }

    pub fn is_identity(self) -> bool {
        self == Self::ZETA_PLUS
    }

    pub fn name(self) -> &'static str {
        match (self.i, self.j) {
            (0, 0) => "ζ⁺",
            (0, 1) => "η⁺",
            (1, 0) => "ζ⁻",
            _ => "η⁻",
        }
    }

    /// The Pauli `σ_z^i σ_x^j` carrying the same two bits.
    pub fn pauli(self) -> PauliOp {
        PauliOp::from_bits(self.i, self.j)
    }
}

impl BitXor for BellLabel {
    type Output = BellLabel;

    fn bitxor(self, rhs: BellLabel) -> BellLabel {
        BellLabel {
            i: self.i ^ rhs.i,
            j: self.j ^ rhs.j,
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "00" | "zeta+" | "ζ⁺" => Ok(Self::ZETA_PLUS),
            "01" | "eta+" | "η⁺" => Ok(Self::ETA_PLUS),
            "10" | "zeta-" | "ζ⁻" => Ok(Self::ZETA_MINUS),
            "11" | "eta-" | "η⁻" => Ok(Self::ETA_MINUS),
            other => Err(Error::InvalidParams(format!("unknown Bell label `{other}`"))),
        }
    }
}

/// Single-qubit Pauli modulo global phase. `ZX` means `σ_z σ_x`; `σ_x σ_z`
/// differs only by a sign and is the same element here.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Z,
    ZX,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::I, PauliOp::X, PauliOp::Z, PauliOp::ZX];

    pub fn from_bits(z: Bit, x: Bit) -> Self {
        match (z & 1, x & 1) {
            (0, 0) => PauliOp::I,
            (0, 1) => PauliOp::X,
            (1, 0) => PauliOp::Z,
            _ => PauliOp::ZX,
        }
    }

    pub fn z_bit(self) -> Bit {
        matches!(self, PauliOp::Z | PauliOp::ZX) as Bit
    }

    pub fn x_bit(self) -> Bit {
        matches!(self, PauliOp::X | PauliOp::ZX) as Bit
    }

    pub fn label(self) -> BellLabel {
        BellLabel {
            i: self.z_bit(),
            j: self.x_bit(),
        }
    }

    /// Every Pauli is its own inverse up to phase.
    pub fn inverse(self) -> Self {
        self
    }

    /// 2×2 matrix in the computational basis (`ZX` is the product `σ_z·σ_x`).
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        match self {
            PauliOp::I => [[l, o], [o, l]],
            PauliOp::X => [[o, l], [l, o]],
            PauliOp::Z => [[l, o], [o, -l]],
            PauliOp::ZX => [[o, l], [-l, o]],
        }
    }
}

/// Product `a·b` with the phase discarded.
pub fn compose_pauli(a: PauliOp, b: PauliOp) -> PauliOp {
    PauliOp::from_bits(a.z_bit() ^ b.z_bit(), a.x_bit() ^ b.x_bit())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Z" => Ok(Basis::Z),
            "X" => Ok(Basis::X),
            other => Err(Error::InvalidParams(format!("unknown basis `{other}`"))),
        }
    }
}

/// One of |0⟩, |1⟩ (Z family) or |+⟩, |−⟩ (X family).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BasisStateSpec {
    pub basis: Basis,
    pub value: Bit,
}

impl BasisStateSpec {
    pub const Z0: BasisStateSpec = BasisStateSpec { basis: Basis::Z, value: 0 };
    pub const Z1: BasisStateSpec = BasisStateSpec { basis: Basis::Z, value: 1 };
    pub const X0: BasisStateSpec = BasisStateSpec { basis: Basis::X, value: 0 };
    pub const X1: BasisStateSpec = BasisStateSpec { basis: Basis::X, value: 1 };

    pub const ALL: [BasisStateSpec; 4] = [Self::Z0, Self::Z1, Self::X0, Self::X1];
    pub const Z_FAMILY: [BasisStateSpec; 2] = [Self::Z0, Self::Z1];
}

impl fmt::Display for BasisStateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.basis {
            Basis::Z => 'Z',
            Basis::X => 'X',
        };
        write!(f, "{b}{}", self.value)
    }
}

impl FromStr for BasisStateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z0" | "0" => Ok(Self::Z0),
            "Z1" | "1" => Ok(Self::Z1),
            "X0" | "+" => Ok(Self::X0),
            "X1" | "-" => Ok(Self::X1),
            other => Err(Error::InvalidParams(format!("unknown basis state `{other}`"))),
        }
    }
}

impl From<BasisStateSpec> for String {
    fn from(spec: BasisStateSpec) -> String {
        spec.to_string()
    }
}

impl TryFrom<String> for BasisStateSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let sv = StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > PROB_EPS {
            return Err(Error::InvalidParams(format!("state has squared norm {norm}")));
        }
        Ok(sv)
    }

    /// Computational basis state `|index⟩` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_same_size(&self, other: &StateVector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_pauli(&self, qubit: usize, op: PauliOp) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_pauli_in_place(qubit, op)?;
        Ok(out)
    }

    /// Applies `σ_x` first, then `σ_z`, matching `σ_z^i σ_x^j`.
    pub fn apply_pauli_in_place(&mut self, qubit: usize, op: PauliOp) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        if op.x_bit() == 1 {
            for idx in 0..self.amps.len() {
                if idx & mask == 0 {
                    self.amps.swap(idx, idx | mask);
                }
            }
        }
        if op.z_bit() == 1 {
            for (idx, a) in self.amps.iter_mut().enumerate() {
                if idx & mask != 0 {
                    *a = -*a;
                }
            }
        }
        Ok(())
    }

    /// Projective Bell measurement on `(qa, qb)`, with `qa` playing the role of
    /// the first qubit of the Bell kets.
    pub fn bell_measure(&self, qa: usize, qb: usize) -> Result<BranchSet<BellLabel>> {
        self.check_qubit(qa)?;
        self.check_qubit(qb)?;
        if qa == qb {
            return Err(Error::SameQubit(qa));
        }
        let (ma, mb) = (1usize << qa, 1usize << qb);
        let offsets = [0, ma, mb, ma | mb];
        let mut branches = Vec::with_capacity(4);
        for label in BellLabel::ALL {
            let bell = bell_amplitudes(label);
            let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
            let mut prob = 0.0;
            for rest in (0..self.amps.len()).filter(|r| r & (ma | mb) == 0) {
                let overlap: Complex64 = offsets
                    .iter()
                    .zip(bell.iter())
                    .map(|(&off, &b)| self.amps[rest | off] * b)
                    .sum();
                prob += overlap.norm_sqr();
                for (&off, &b) in offsets.iter().zip(bell.iter()) {
                    amps[rest | off] = overlap * b;
                }
            }
            if prob > PROB_EPS {
                let scale = 1.0 / prob.sqrt();
                amps.iter_mut().for_each(|a| *a *= scale);
                branches.push(Branch {
                    outcome: label,
                    probability: prob,
                    state: StateVector {
                        n_qubits: self.n_qubits,
                        amps,
                    },
                });
            }
        }
        Ok(BranchSet { branches })
    }

    /// Projective single-qubit measurement; outcome 0 is |0⟩ or |+⟩.
    pub fn basis_measure(&self, q: usize, basis: Basis) -> Result<BranchSet<Bit>> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        let h = FRAC_1_SQRT_2;
        // Outcome vectors expressed as (coefficient on |0⟩, coefficient on |1⟩).
        let kets: [(f64, f64); 2] = match basis {
            Basis::Z => [(1.0, 0.0), (0.0, 1.0)],
            Basis::X => [(h, h), (h, -h)],
        };
        let mut branches = Vec::with_capacity(2);
        for (bit, &(k0, k1)) in kets.iter().enumerate() {
            let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
            let mut prob = 0.0;
            for rest in (0..self.amps.len()).filter(|r| r & mask == 0) {
                let overlap = self.amps[rest] * k0 + self.amps[rest | mask] * k1;
                prob += overlap.norm_sqr();
                amps[rest] = overlap * k0;
                amps[rest | mask] = overlap * k1;
            }
            if prob > PROB_EPS {
                let scale = 1.0 / prob.sqrt();
                amps.iter_mut().for_each(|a| *a *= scale);
                branches.push(Branch {
                    outcome: bit as Bit,
                    probability: prob,
                    state: StateVector {
                        n_qubits: self.n_qubits,
                        amps,
                    },
                });
            }
        }
        Ok(BranchSet { branches })
    }

    /// Pure state of the qubits in `keep` (in that order), provided the
    /// register factors as `|kept⟩ ⊗ |rest⟩`.
    pub fn factor(&self, keep: &[usize]) -> Result<StateVector> {
        for &q in keep {
            self.check_qubit(q)?;
        }
        let keep_mask: usize = keep.iter().map(|q| 1usize << q).sum();
        if keep.is_empty() || keep_mask.count_ones() as usize != keep.len() {
            return Err(Error::InvalidParams("factor needs distinct qubits".into()));
        }
        let sub_dim = 1usize << keep.len();
        let spread = |k: usize| -> usize {
            keep.iter()
                .enumerate()
                .filter(|(bit, _)| k >> bit & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        };
        let rests: Vec<usize> = (0..self.amps.len())
            .filter(|r| r & keep_mask == 0)
            .collect();
        let weight = |r: usize| -> f64 { (0..sub_dim).map(|k| self.amps[r | spread(k)].norm_sqr()).sum() };
        let best = rests
            .iter()
            .copied()
            .max_by(|&a, &b| weight(a).total_cmp(&weight(b)))
            .unwrap_or(0);
        let w = weight(best).sqrt();
        let sub: Vec<Complex64> = (0..sub_dim).map(|k| self.amps[best | spread(k)] / w).collect();
        // Product check: the projection onto `sub` must carry all the weight.
        let captured: f64 = rests
            .iter()
            .map(|&r| {
                (0..sub_dim)
                    .map(|k| sub[k].conj() * self.amps[r | spread(k)])
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum();
        if (captured - 1.0).abs() > 1e-9 {
            return Err(Error::NotAProductState);
        }
        Ok(StateVector {
            n_qubits: keep.len(),
            amps: sub,
        })
    }
}

fn bell_amplitudes(label: BellLabel) -> [f64; 4] {
    let h = FRAC_1_SQRT_2;
    // index = a + 2b for |ab⟩
    match (label.i, label.j) {
        (0, 0) => [h, 0.0, 0.0, h],
        (0, 1) => [0.0, h, h, 0.0],
        (1, 0) => [h, 0.0, 0.0, -h],
        _ => [0.0, -h, h, 0.0],
    }
}

pub fn make_bell(label: BellLabel) -> StateVector {
    StateVector {
        n_qubits: 2,
        amps: bell_amplitudes(label)
            .iter()
            .map(|&a| Complex64::new(a, 0.0))
            .collect(),
    }
}

pub fn make_basis_state(spec: BasisStateSpec) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let (a0, a1) = match (spec.basis, spec.value) {
        (Basis::Z, 0) => (1.0, 0.0),
        (Basis::Z, _) => (0.0, 1.0),
        (Basis::X, 0) => (h, h),
        (Basis::X, _) => (h, -h),
    };
    StateVector {
        n_qubits: 1,
        amps: vec![Complex64::new(a0, 0.0), Complex64::new(a1, 0.0)],
    }
}

/// Kronecker product; `parts[0]` occupies the lowest qubit indices.
pub fn tensor(parts: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = parts.split_first().ok_or(Error::EmptyTensor)?;
    let mut acc = first.clone();
    for part in rest {
        let low = acc.amps.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); low * part.amps.len()];
        for (hi, b) in part.amps.iter().enumerate() {
            for (lo, a) in acc.amps.iter().enumerate() {
                amps[lo + hi * low] = a * b;
            }
        }
        acc = StateVector {
            n_qubits: acc.n_qubits + part.n_qubits,
            amps,
        };
    }
    Ok(acc)
}

/// True iff some unit phase `c` gives `‖s1 − c·s2‖ ≤ tol`.
pub fn states_equal_up_to_phase(s1: &StateVector, s2: &StateVector, tol: f64) -> Result<bool> {
    let overlap = s2.inner(s1)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let dist: f64 = s1
        .amps
        .iter()
        .zip(&s2.amps)
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(dist <= tol)
}

#[derive(Clone, Debug)]
pub struct Branch<O> {
    pub outcome: O,
    pub probability: f64,
    pub state: StateVector,
}

/// All nonzero-probability outcomes of one measurement, in canonical outcome order.
#[derive(Clone, Debug)]
pub struct BranchSet<O> {
    branches: Vec<Branch<O>>,
}

impl<O: Copy + PartialEq> BranchSet<O> {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Branch<O>> {
        self.branches.iter()
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn probability_of(&self, outcome: O) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.outcome == outcome)
            .map(|b| b.probability)
            .sum()
    }

    /// The outcome if the measurement is certain.
    pub fn deterministic(&self) -> Result<O> {
        match self.branches.as_slice() {
            [only] => Ok(only.outcome),
            other => Err(Error::NonDeterministic(other.len())),
        }
    }
}

impl<O> IntoIterator for BranchSet<O> {
    type Item = Branch<O>;
    type IntoIter = std::vec::IntoIter<Branch<O>>;

    fn into_iter(self) -> Self::IntoIter {
        self.branches.into_iter()
    }
}

/// Pauli the receiver's half carries after teleporting over a pair in state
/// `shared` when the sender's Bell measurement reads `outcome`.
pub fn teleport_correction(shared: BellLabel, outcome: BellLabel) -> PauliOp {
    (shared ^ outcome).pauli()
}

/// Bell label of the outer pair after a swapping measurement on the inner
/// halves of pairs `a` and `b` returns `outcome`.
pub fn swapped_label(a: BellLabel, b: BellLabel, outcome: BellLabel) -> BellLabel {
    a ^ b ^ outcome
}
