//! Executable single-party, multiparty and string commitment schemes.
//!
//! Every run drives the state-vector engine through Phases I–III and records
//! one [`Transcript`] per classical branch. Register layout for one
//! commitment instance is `[α, α₀, β₀, β, src]`; the multiparty scheme appends
//! Bob's confirmation qubit φ′ as qubit 5.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    make_basis_state, make_bell, swapped_label, teleport_correction, tensor, Basis, BasisStateSpec,
    BellLabel, Bit, PauliOp, StateVector,
};
use crate::spacetime::{standard_schedule, Schedule};

pub use crate::spacetime::Scheme;

const ALPHA: usize = 0;
const ALPHA0: usize = 1;
const BETA0: usize = 2;
const BETA: usize = 3;
const SRC: usize = 4;
const PHI_PRIME: usize = 5;

/// How the verifier reconstructs the teleportation Pauli at reveal time.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub enum ValidationMode {
    /// From the announced label only.
    R1,
    /// From the true swapped Bell state; only the Pauli frame uses the
    /// announcement.
    #[default]
    R2,
}

impl fmt::Display for ValidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationMode::R1 => "R1",
            ValidationMode::R2 => "R2",
        })
    }
}

impl FromStr for ValidationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "R1" => Ok(ValidationMode::R1),
            "R2" => Ok(ValidationMode::R2),
            other => Err(Error::InvalidParams(format!("unknown validation mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiPolicy {
    Fixed(BasisStateSpec),
    /// Uniform over {|0⟩, |1⟩}.
    UniformZ,
    /// Uniform over {|0⟩, |1⟩, |+⟩, |−⟩}.
    UniformAll,
}

impl PhiPolicy {
    pub fn options(self) -> Vec<(BasisStateSpec, f64)> {
        match self {
            PhiPolicy::Fixed(spec) => vec![(spec, 1.0)],
            PhiPolicy::UniformZ => BasisStateSpec::Z_FAMILY.iter().map(|&s| (s, 0.5)).collect(),
            PhiPolicy::UniformAll => BasisStateSpec::ALL.iter().map(|&s| (s, 0.25)).collect(),
        }
    }

    fn z_family_only(self) -> bool {
        match self {
            PhiPolicy::Fixed(spec) => spec.basis == Basis::Z,
            PhiPolicy::UniformZ => true,
            PhiPolicy::UniformAll => false,
        }
    }
}

impl FromStr for PhiPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform-z" | "uniform_z" | "z" => Ok(PhiPolicy::UniformZ),
            "uniform" | "uniform-all" | "uniform_all" | "all" => Ok(PhiPolicy::UniformAll),
            _ => Ok(PhiPolicy::Fixed(s.parse()?)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelPolicy {
    Fixed(BellLabel),
    Uniform,
}

impl LabelPolicy {
    pub fn options(self) -> Vec<(BellLabel, f64)> {
        match self {
            LabelPolicy::Fixed(label) => vec![(label, 1.0)],
            LabelPolicy::Uniform => BellLabel::ALL.iter().map(|&l| (l, 0.25)).collect(),
        }
    }
}

impl FromStr for LabelPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(LabelPolicy::Uniform),
            other => Ok(LabelPolicy::Fixed(other.parse()?)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub scheme: Scheme,
    pub x: f64,
    pub c: f64,
    pub reveal_time: f64,
    pub phi_policy: PhiPolicy,
    /// Bob's secret pair in the single-party and string schemes.
    pub bob_label: LabelPolicy,
    pub n_pairs: usize,
    pub validation_mode: ValidationMode,
}

impl SchemeParams {
    fn base(scheme: Scheme, phi_policy: PhiPolicy) -> Self {
        SchemeParams {
            scheme,
            x: 1.0,
            c: 1.0,
            reveal_time: 10.0,
            phi_policy,
            bob_label: LabelPolicy::Uniform,
            n_pairs: 1,
            validation_mode: ValidationMode::R2,
        }
    }

    pub fn single() -> Self {
        Self::base(Scheme::Single, PhiPolicy::UniformZ)
    }

    pub fn multi() -> Self {
        Self::base(Scheme::Multi, PhiPolicy::UniformZ)
    }

    pub fn string(n_pairs: usize) -> Self {
        SchemeParams {
            n_pairs,
            ..Self::base(Scheme::String, PhiPolicy::UniformAll)
        }
    }

    pub fn with_phi(mut self, phi_policy: PhiPolicy) -> Self {
        self.phi_policy = phi_policy;
        self
    }

    pub fn with_bob_label(mut self, bob_label: LabelPolicy) -> Self {
        self.bob_label = bob_label;
        self
    }

    pub fn with_mode(mut self, mode: ValidationMode) -> Self {
        self.validation_mode = mode;
        self
    }

    /// Geometry with the reveal defaulting to `10·x/c`.
    pub fn with_geometry(mut self, x: f64, c: f64, reveal_time: Option<f64>) -> Self {
        self.x = x;
        self.c = c;
        self.reveal_time = reveal_time.unwrap_or(10.0 * x / c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !(self.x >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "need x ≥ 0 and c > 0, got x={} c={}",
                self.x, self.c
            )));
        }
        if self.scheme != Scheme::String && !self.phi_policy.z_family_only() {
            return Err(Error::InvalidParams(format!(
                "{} scheme teleports a computational-basis state only",
                self.scheme
            )));
        }
        if self.scheme == Scheme::String && self.n_pairs == 0 {
            return Err(Error::InvalidParams("string scheme needs at least one pair".into()));
        }
        Ok(())
    }

    fn expect(&self, scheme: Scheme) -> Result<()> {
        if self.scheme != scheme {
            return Err(Error::InvalidParams(format!(
                "expected {scheme} parameters, got {}",
                self.scheme
            )));
        }
        self.validate()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RunMode {
    Enumerate,
    Sample(u64),
}

/// Order of the two commuting Phase-II Bell measurements.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum BsmOrder {
    #[default]
    SwapFirst,
    TeleportFirst,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Pauli Alice applies to α before Phase II, re-choosing her commitment.
    pub rechoice: Option<BellLabel>,
    pub order: BsmOrder,
    pub attach_schedule: bool,
}

/// Maps a committer's Bell label to the committed data.
pub struct CodeMap;

impl CodeMap {
    /// Two-bit string `d₁d₂`.
    pub fn string(label: BellLabel) -> [Bit; 2] {
        [label.i(), label.j()]
    }

    pub fn bit(label: BellLabel) -> Bit {
        committed_bit(label)
    }
}

/// ζ labels commit to 0, η labels to 1.
pub fn committed_bit(label: BellLabel) -> Bit {
    label.j()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Committer,
    Receiver,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Mismatch {
    pub check: Check,
    pub pair: Option<usize>,
    pub expected: Bit,
    pub stored: Bit,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let who = match self.check {
            Check::Committer => "committer",
            Check::Receiver => "receiver",
        };
        if let Some(k) = self.pair {
            write!(f, "pair {k}: ")?;
        }
        write!(f, "{who} check expected {} but stored {}", self.expected, self.stored)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Abort { reason: Mismatch },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept => f.write_str("accept"),
            Verdict::Abort { reason } => write!(f, "abort ({reason})"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Announcements {
    pub alice: BellLabel,
    pub bob: Option<BellLabel>,
    pub bob_teleport: Option<BellLabel>,
}

/// Classical record of one branch of one protocol execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub scheme: Scheme,
    pub pair_index: Option<usize>,
    /// Committer's effective label; sealed until reveal.
    pub alice_label: BellLabel,
    pub bob_label: BellLabel,
    /// b₀b₀′ (single/string) or cc′ (multiparty).
    pub swap_outcome: BellLabel,
    /// bb′.
    pub teleport_outcome: BellLabel,
    pub phi: BasisStateSpec,
    pub stored_psi_prime: Bit,
    pub stored_phi_prime: Option<Bit>,
    pub alice_mid_measurement: Option<Bit>,
    pub announcements: Option<Announcements>,
    pub schedule: Option<Schedule>,
    pub probability: f64,
    pub verdict: Option<Verdict>,
}

impl Transcript {
    /// Records the reveal phase in the transcript.
    pub fn with_reveal(mut self, announcements: Announcements, verdict: Verdict) -> Self {
        self.announcements = Some(announcements);
        self.verdict = Some(verdict);
        self
    }
}

/// Source of branch choices: either keep every branch or draw one.
pub(crate) trait Chooser {
    fn pick<T>(&mut self, options: Vec<(T, f64)>) -> Vec<(T, f64)>;
}

pub(crate) struct EnumerateAll;

impl Chooser for EnumerateAll {
    fn pick<T>(&mut self, options: Vec<(T, f64)>) -> Vec<(T, f64)> {
        options
    }
}

pub(crate) struct Sampler<R: Rng> {
    rng: R,
}

impl<R: Rng> Sampler<R> {
    pub(crate) fn new(rng: R) -> Self {
        Sampler { rng }
    }
}

impl<R: Rng> Chooser for Sampler<R> {
    fn pick<T>(&mut self, options: Vec<(T, f64)>) -> Vec<(T, f64)> {
        let total: f64 = options.iter().map(|(_, w)| w).sum();
        let mut u = self.rng.random::<f64>() * total;
        let last = options.len().saturating_sub(1);
        for (k, opt) in options.into_iter().enumerate() {
            if u < opt.1 || k == last {
                return vec![opt];
            }
            u -= opt.1;
        }
        Vec::new()
    }
}

fn sampler(seed: u64) -> Sampler<ChaCha8Rng> {
    Sampler::new(ChaCha8Rng::seed_from_u64(seed))
}

fn branches<O>(set: crate::quantum::BranchSet<O>) -> Vec<((O, StateVector), f64)> {
    set.into_iter()
        .map(|b| ((b.outcome, b.state), b.probability))
        .collect()
}

/// Both Phase-II Bell measurements, in the requested order. Yields
/// `(swap_outcome, teleport_outcome, state, weight)`.
fn phase_two<C: Chooser>(
    register: &StateVector,
    order: BsmOrder,
    chooser: &mut C,
) -> Result<Vec<(BellLabel, BellLabel, StateVector, f64)>> {
    let swap = |s: &StateVector| s.bell_measure(ALPHA0, BETA0);
    let teleport = |s: &StateVector| s.bell_measure(SRC, BETA);
    let mut out = Vec::new();
    match order {
        BsmOrder::SwapFirst => {
            for ((s, st), ws) in chooser.pick(branches(swap(register)?)) {
                for ((t, st2), wt) in chooser.pick(branches(teleport(&st)?)) {
                    out.push((s, t, st2, ws * wt));
                }
            }
        }
        BsmOrder::TeleportFirst => {
            for ((t, st), wt) in chooser.pick(branches(teleport(register)?)) {
                for ((s, st2), ws) in chooser.pick(branches(swap(&st)?)) {
                    out.push((s, t, st2, ws * wt));
                }
            }
        }
    }
    Ok(out)
}

fn initial_register(alice: BellLabel, bob: BellLabel, phi: BasisStateSpec) -> Result<StateVector> {
    tensor(&[make_bell(alice), make_bell(bob), make_basis_state(phi)])
}

fn schedule_for(params: &SchemeParams, opts: &RunOptions) -> Result<Option<Schedule>> {
    if !opts.attach_schedule {
        return Ok(None);
    }
    standard_schedule(params.x, params.c, params.reveal_time, params.scheme).map(Some)
}

/// One single-party (or string-pair) instance; `alice` is the label Alice
/// prepares at t = 0.
pub(crate) fn single_instance<C: Chooser>(
    params: &SchemeParams,
    alice: BellLabel,
    pair_index: Option<usize>,
    opts: &RunOptions,
    chooser: &mut C,
) -> Result<Vec<Transcript>> {
    let schedule = schedule_for(params, opts)?;
    let effective = alice ^ opts.rechoice.unwrap_or(BellLabel::ZETA_PLUS);
    let mut out = Vec::new();
    for (bob, wb) in chooser.pick(params.bob_label.options()) {
        for (phi, wp) in chooser.pick(params.phi_policy.options()) {
            let mut register = initial_register(alice, bob, phi)?;
            if let Some(delta) = opts.rechoice {
                register.apply_pauli_in_place(ALPHA, delta.pauli())?;
            }
            for (swap, tele, mut state, w2) in phase_two(&register, opts.order, chooser)? {
                // Alice's confirmation frame σ_z^i σ_x^j on α.
                state.apply_pauli_in_place(ALPHA, effective.pauli())?;
                let stored = state.basis_measure(ALPHA, phi.basis)?;
                for (psi, w3) in chooser.pick(stored.iter().map(|b| (b.outcome, b.probability)).collect()) {
                    out.push(Transcript {
                        scheme: params.scheme,
                        pair_index,
                        alice_label: effective,
                        bob_label: bob,
                        swap_outcome: swap,
                        teleport_outcome: tele,
                        phi,
                        stored_psi_prime: psi,
                        stored_phi_prime: None,
                        alice_mid_measurement: None,
                        announcements: None,
                        schedule: schedule.clone(),
                        probability: wb * wp * w2 * w3,
                        verdict: None,
                    });
                }
            }
        }
    }
    Ok(out)
}

pub fn run_single(params: &SchemeParams, alice_label: BellLabel, mode: RunMode) -> Result<Vec<Transcript>> {
    let opts = RunOptions {
        attach_schedule: true,
        ..RunOptions::default()
    };
    run_single_with(params, alice_label, &opts, mode)
}

pub fn run_single_with(
    params: &SchemeParams,
    alice_label: BellLabel,
    opts: &RunOptions,
    mode: RunMode,
) -> Result<Vec<Transcript>> {
    params.expect(Scheme::Single)?;
    match mode {
        RunMode::Enumerate => single_instance(params, alice_label, None, opts, &mut EnumerateAll),
        RunMode::Sample(seed) => single_instance(params, alice_label, None, opts, &mut sampler(seed)),
    }
}

pub(crate) fn multi_instance<C: Chooser>(
    params: &SchemeParams,
    alice: BellLabel,
    bob: BellLabel,
    opts: &RunOptions,
    chooser: &mut C,
) -> Result<Vec<Transcript>> {
    let schedule = schedule_for(params, opts)?;
    let effective = alice ^ opts.rechoice.unwrap_or(BellLabel::ZETA_PLUS);
    let mut out = Vec::new();
    for (phi, wp) in chooser.pick(params.phi_policy.options()) {
        let mut register = initial_register(alice, bob, phi)?;
        if let Some(delta) = opts.rechoice {
            register.apply_pauli_in_place(ALPHA, delta.pauli())?;
        }
        for (swap, tele, state, w2) in phase_two(&register, opts.order, chooser)? {
            // Alice measures α, then applies her frame to the collapsed qubit.
            for ((mid, mut after), wm) in chooser.pick(branches(state.basis_measure(ALPHA, Basis::Z)?)) {
                after.apply_pauli_in_place(ALPHA, effective.pauli())?;
                let bob_qubit = make_basis_state(phi)
                    .apply_pauli(0, bob.pauli())?
                    .apply_pauli(0, tele.pauli())?;
                let full = tensor(&[after, bob_qubit])?;
                for ((psi, s1), w4) in chooser.pick(branches(full.basis_measure(ALPHA, Basis::Z)?)) {
                    for ((phi_prime, _), w5) in chooser.pick(branches(s1.basis_measure(PHI_PRIME, Basis::Z)?)) {
                        out.push(Transcript {
                            scheme: Scheme::Multi,
                            pair_index: None,
                            alice_label: effective,
                            bob_label: bob,
                            swap_outcome: swap,
                            teleport_outcome: tele,
                            phi,
                            stored_psi_prime: psi,
                            stored_phi_prime: Some(phi_prime),
                            alice_mid_measurement: Some(mid),
                            announcements: None,
                            schedule: schedule.clone(),
                            probability: wp * w2 * wm * w4 * w5,
                            verdict: None,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn run_multiparty(
    params: &SchemeParams,
    alice_label: BellLabel,
    bob_label: BellLabel,
    mode: RunMode,
) -> Result<Vec<Transcript>> {
    let opts = RunOptions {
        attach_schedule: true,
        ..RunOptions::default()
    };
    run_multiparty_with(params, alice_label, bob_label, &opts, mode)
}

pub fn run_multiparty_with(
    params: &SchemeParams,
    alice_label: BellLabel,
    bob_label: BellLabel,
    opts: &RunOptions,
    mode: RunMode,
) -> Result<Vec<Transcript>> {
    params.expect(Scheme::Multi)?;
    match mode {
        RunMode::Enumerate => multi_instance(params, alice_label, bob_label, opts, &mut EnumerateAll),
        RunMode::Sample(seed) => multi_instance(params, alice_label, bob_label, opts, &mut sampler(seed)),
    }
}

/// Per-pair branch lists of one string commitment. Enumerated runs hold every
/// branch of every pair; sampled runs hold exactly one branch per pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringRun {
    pub per_pair: Vec<Vec<Transcript>>,
}

/// One joint execution of a string commitment: one transcript per pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringBundle {
    pub pairs: Vec<Transcript>,
}

impl StringBundle {
    pub fn probability(&self) -> f64 {
        self.pairs.iter().map(|t| t.probability).product()
    }
}

impl StringRun {
    /// Joint acceptance probability; pairs are independent so it factorizes.
    pub fn acceptance_probability(&self, announced: &[BellLabel], mode: ValidationMode) -> Result<f64> {
        check_len(self.per_pair.len(), announced.len())?;
        let mut joint = 1.0;
        for (branches, &label) in self.per_pair.iter().zip(announced) {
            let total: f64 = branches.iter().map(|t| t.probability).sum();
            let mut accepted = 0.0;
            for t in branches {
                if validate_single(t, label, mode)?.is_accept() {
                    accepted += t.probability;
                }
            }
            joint *= accepted / total;
        }
        Ok(joint)
    }

    /// Every joint branch (the Cartesian product over pairs).
    pub fn joint_bundles(&self) -> Vec<StringBundle> {
        let mut acc: Vec<Vec<Transcript>> = vec![Vec::new()];
        for branches in &self.per_pair {
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    branches.iter().map(move |t| {
                        let mut next = prefix.clone();
                        next.push(t.clone());
                        next
                    })
                })
                .collect();
        }
        acc.into_iter().map(|pairs| StringBundle { pairs }).collect()
    }

    pub fn into_bundle(self) -> Result<StringBundle> {
        let mut pairs = Vec::with_capacity(self.per_pair.len());
        for mut branches in self.per_pair {
            if branches.len() != 1 {
                return Err(Error::NonDeterministic(branches.len()));
            }
            pairs.push(branches.remove(0));
        }
        Ok(StringBundle { pairs })
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

pub fn run_string(params: &SchemeParams, alice_labels: &[BellLabel], mode: RunMode) -> Result<StringRun> {
    let opts = RunOptions {
        attach_schedule: true,
        ..RunOptions::default()
    };
    run_string_with(params, alice_labels, &opts, mode)
}

pub fn run_string_with(
    params: &SchemeParams,
    alice_labels: &[BellLabel],
    opts: &RunOptions,
    mode: RunMode,
) -> Result<StringRun> {
    params.expect(Scheme::String)?;
    check_len(params.n_pairs, alice_labels.len())?;
    let per_pair = match mode {
        RunMode::Enumerate => alice_labels
            .iter()
            .enumerate()
            .map(|(k, &a)| single_instance(params, a, Some(k), opts, &mut EnumerateAll))
            .collect::<Result<Vec<_>>>()?,
        RunMode::Sample(seed) => {
            let mut chooser = sampler(seed);
            alice_labels
                .iter()
                .enumerate()
                .map(|(k, &a)| single_instance(params, a, Some(k), opts, &mut chooser))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(StringRun { per_pair })
}

/// Bit obtained by measuring `frame · correction |φ⟩` in φ's basis family.
pub fn expected_stored_bit(phi: BasisStateSpec, frame: BellLabel, correction: PauliOp) -> Result<Bit> {
    make_basis_state(phi)
        .apply_pauli(0, correction)?
        .apply_pauli(0, frame.pauli())?
        .basis_measure(0, phi.basis)?
        .deterministic()
}

fn committer_check(
    t: &Transcript,
    announced: BellLabel,
    bob_label: BellLabel,
    teleport: BellLabel,
    mode: ValidationMode,
) -> Result<Option<Mismatch>> {
    let sealed = match mode {
        ValidationMode::R1 => announced,
        ValidationMode::R2 => t.alice_label,
    };
    let swapped = swapped_label(sealed, bob_label, t.swap_outcome);
    let correction = teleport_correction(swapped, teleport);
    let expected = expected_stored_bit(t.phi, announced, correction)?;
    Ok((expected != t.stored_psi_prime).then_some(Mismatch {
        check: Check::Committer,
        pair: t.pair_index,
        expected,
        stored: t.stored_psi_prime,
    }))
}

/// Reveal-phase check at B₀ for the single-party scheme (and one string pair).
pub fn validate_single(t: &Transcript, announced: BellLabel, mode: ValidationMode) -> Result<Verdict> {
    Ok(match committer_check(t, announced, t.bob_label, t.teleport_outcome, mode)? {
        None => Verdict::Accept,
        Some(reason) => Verdict::Abort { reason },
    })
}

/// Reveal-phase check at the center: Bob's φ′ against his announced
/// `(ββ₀, bb′)`, then Alice's ψ′ as in the single-party check with cc′.
pub fn validate_multiparty(
    t: &Transcript,
    alice_announced: BellLabel,
    bob_announced: (BellLabel, BellLabel),
    mode: ValidationMode,
) -> Result<Verdict> {
    let stored_phi = t.stored_phi_prime.ok_or(Error::MissingField("stored_phi_prime"))?;
    let (bob_label, bob_teleport) = bob_announced;
    let expected_phi = make_basis_state(t.phi)
        .apply_pauli(0, bob_label.pauli())?
        .apply_pauli(0, bob_teleport.pauli())?
        .basis_measure(0, t.phi.basis)?
        .deterministic()?;

    let (frame_bob, frame_tele) = match mode {
        ValidationMode::R1 => (bob_label, bob_teleport),
        ValidationMode::R2 => (t.bob_label, t.teleport_outcome),
    };
    if let Some(reason) = committer_check(t, alice_announced, frame_bob, frame_tele, mode)? {
        return Ok(Verdict::Abort { reason });
    }
    if expected_phi != stored_phi {
        return Ok(Verdict::Abort {
            reason: Mismatch {
                check: Check::Receiver,
                pair: None,
                expected: expected_phi,
                stored: stored_phi,
            },
        });
    }
    Ok(Verdict::Accept)
}

/// Accept iff every pair passes the single-party check in its own basis family.
pub fn validate_string(bundle: &StringBundle, announced: &[BellLabel], mode: ValidationMode) -> Result<Verdict> {
    check_len(bundle.pairs.len(), announced.len())?;
    for (t, &label) in bundle.pairs.iter().zip(announced) {
        let verdict = validate_single(t, label, mode)?;
        if !verdict.is_accept() {
            return Ok(verdict);
        }
    }
    Ok(Verdict::Accept)
}
