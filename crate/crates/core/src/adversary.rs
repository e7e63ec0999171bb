//! Cheating strategies and exact security figures.
//!
//! Every acceptance probability is computed twice: by full state-vector branch
//! enumeration through [`crate::protocol`], and by walking the same random
//! choices with XOR rules over Bell labels only. Committer label priors are
//! uniform; per-label worst cases are reported alongside.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{
    committed_bit, multi_instance, single_instance, validate_multiparty, validate_single,
    EnumerateAll, LabelPolicy, PhiPolicy, RunOptions, SchemeParams, ValidationMode,
};
use crate::quantum::{make_basis_state, make_bell, tensor, Basis, BasisStateSpec, BellLabel, Bit, BranchSet};
use crate::spacetime::Scheme;

/// Agreement threshold between computed figures and reference values.
pub const AGREE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Committer,
    Receiver,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractMeasurement {
    Z,
    X,
    /// Bell measurement on α₀ and the returned confirmation qubit.
    BellOnPair,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    Honest,
    /// Announce the committed label XOR `delta`.
    RelabelAnnounce { delta: BellLabel },
    /// Apply `delta` to α before confirmation and announce the new label.
    DelayedRechoice { delta: BellLabel },
    /// B₀ performs no swap and Bob no teleport; B₀ then measures what it holds.
    ReceiverSkip { measurement: ExtractMeasurement },
    /// Receiver measures as early as possible: α₀ alone for Z/X, or α₀ with
    /// the returned qubit (swap withheld) for the Bell variant.
    EarlyExtract { measurement: ExtractMeasurement },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "StrategyKind", into = "StrategyKind")]
pub struct Strategy {
    kind: StrategyKind,
}

impl TryFrom<StrategyKind> for Strategy {
    type Error = Error;

    fn try_from(kind: StrategyKind) -> Result<Self> {
        if let StrategyKind::RelabelAnnounce { delta } = kind {
            if delta.is_identity() {
                return Err(Error::InvalidStrategy("relabel delta must be nonzero".into()));
            }
        }
        Ok(Strategy { kind })
    }
}

impl From<Strategy> for StrategyKind {
    fn from(s: Strategy) -> Self {
        s.kind
    }
}

impl Strategy {
    pub fn honest() -> Self {
        Strategy { kind: StrategyKind::Honest }
    }

    pub fn relabel(delta: BellLabel) -> Result<Self> {
        StrategyKind::RelabelAnnounce { delta }.try_into()
    }

    pub fn delayed_rechoice(delta: BellLabel) -> Self {
        Strategy {
            kind: StrategyKind::DelayedRechoice { delta },
        }
    }

    pub fn receiver_skip(measurement: ExtractMeasurement) -> Self {
        Strategy {
            kind: StrategyKind::ReceiverSkip { measurement },
        }
    }

    pub fn early_extract(measurement: ExtractMeasurement) -> Self {
        Strategy {
            kind: StrategyKind::EarlyExtract { measurement },
        }
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn role(&self) -> Role {
        match self.kind {
            StrategyKind::ReceiverSkip { .. } | StrategyKind::EarlyExtract { .. } => Role::Receiver,
            _ => Role::Committer,
        }
    }

    /// Pauli applied to α before confirmation, and XOR applied to the
    /// announcement relative to the effective label.
    fn committer_moves(&self) -> Result<(Option<BellLabel>, BellLabel)> {
        match self.kind {
            StrategyKind::Honest => Ok((None, BellLabel::ZETA_PLUS)),
            StrategyKind::RelabelAnnounce { delta } => Ok((None, delta)),
            StrategyKind::DelayedRechoice { delta } => Ok((Some(delta), BellLabel::ZETA_PLUS)),
            _ => Err(Error::InvalidStrategy(format!("{self} is not a committer strategy"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = |m: ExtractMeasurement| match m {
            ExtractMeasurement::Z => "z",
            ExtractMeasurement::X => "x",
            ExtractMeasurement::BellOnPair => "bell",
        };
        match self.kind {
            StrategyKind::Honest => f.write_str("honest"),
            StrategyKind::RelabelAnnounce { delta } => write!(f, "relabel:{delta}"),
            StrategyKind::DelayedRechoice { delta } => write!(f, "rechoice:{delta}"),
            StrategyKind::ReceiverSkip { measurement } => write!(f, "skip:{}", m(measurement)),
            StrategyKind::EarlyExtract { measurement } => write!(f, "extract:{}", m(measurement)),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    /// `honest`, `relabel:10`, `rechoice:01`, `skip:bell`, `extract:z`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (head, arg) = s.split_once(':').unwrap_or((s.as_str(), ""));
        let measurement = |arg: &str| match arg {
            "z" => Ok(ExtractMeasurement::Z),
            "x" => Ok(ExtractMeasurement::X),
            "bell" => Ok(ExtractMeasurement::BellOnPair),
            other => Err(Error::InvalidStrategy(format!("unknown measurement `{other}`"))),
        };
        match head {
            "honest" => Ok(Strategy::honest()),
            "relabel" => Strategy::relabel(arg.parse()?),
            "rechoice" => Ok(Strategy::delayed_rechoice(arg.parse()?)),
            "skip" => Ok(Strategy::receiver_skip(measurement(arg)?)),
            "extract" => Ok(Strategy::early_extract(measurement(arg)?)),
            other => Err(Error::InvalidStrategy(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Every strategy the analyzer knows, in report order.
pub fn default_strategy_menu() -> Vec<Strategy> {
    let mut menu = vec![Strategy::honest()];
    for delta in &BellLabel::ALL[1..] {
        menu.push(Strategy { kind: StrategyKind::RelabelAnnounce { delta: *delta } });
    }
    for delta in &BellLabel::ALL[1..] {
        menu.push(Strategy::delayed_rechoice(*delta));
    }
    menu.extend(receiver_menu());
    menu
}

fn receiver_menu() -> Vec<Strategy> {
    let ms = [ExtractMeasurement::Z, ExtractMeasurement::X, ExtractMeasurement::BellOnPair];
    ms.iter()
        .map(|&m| Strategy::early_extract(m))
        .chain(ms.iter().map(|&m| Strategy::receiver_skip(m)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceFigures {
    /// Averaged over a uniform committer label.
    pub average: f64,
    /// Highest acceptance over the committer's true label.
    pub worst_case: f64,
    pub per_label: [f64; 4],
}

impl AcceptanceFigures {
    fn from_per_label(per_label: [f64; 4]) -> Self {
        let per_label = per_label.map(|p| p.clamp(0.0, 1.0));
        AcceptanceFigures {
            average: (per_label.iter().sum::<f64>() / 4.0).clamp(0.0, 1.0),
            worst_case: per_label.iter().copied().fold(0.0, f64::max),
            per_label,
        }
    }

    fn powi(self, n: usize) -> Self {
        let per_label = self.per_label.map(|p| p.powi(n as i32));
        AcceptanceFigures {
            average: self.average.powi(n as i32),
            worst_case: self.worst_case.powi(n as i32),
            per_label,
        }
    }
}

fn check_committer(params: &SchemeParams, strategy: &Strategy) -> Result<(Option<BellLabel>, BellLabel)> {
    params.validate()?;
    if strategy.role() != Role::Committer {
        return Err(Error::InvalidStrategy(format!("{strategy} is a receiver strategy")));
    }
    strategy.committer_moves()
}

/// Acceptance of one instance (one pair for the string scheme) for a fixed
/// committer label, by state-vector enumeration.
fn instance_acceptance(
    params: &SchemeParams,
    alice: BellLabel,
    rechoice: Option<BellLabel>,
    delta: BellLabel,
    mode: ValidationMode,
) -> Result<f64> {
    let opts = RunOptions {
        rechoice,
        ..RunOptions::default()
    };
    let mut accepted = 0.0;
    match params.scheme {
        Scheme::Single | Scheme::String => {
            let per_pair = SchemeParams { n_pairs: 1, ..*params };
            let pair = (params.scheme == Scheme::String).then_some(0);
            for t in single_instance(&per_pair, alice, pair, &opts, &mut EnumerateAll)? {
                if validate_single(&t, t.alice_label ^ delta, mode)?.is_accept() {
                    accepted += t.probability;
                }
            }
        }
        Scheme::Multi => {
            for (bob, wb) in LabelPolicy::Uniform.options() {
                for t in multi_instance(params, alice, bob, &opts, &mut EnumerateAll)? {
                    let bob_ann = (t.bob_label, t.teleport_outcome);
                    if validate_multiparty(&t, t.alice_label ^ delta, bob_ann, mode)?.is_accept() {
                        accepted += wb * t.probability;
                    }
                }
            }
        }
    }
    Ok(accepted)
}

/// Exact acceptance figures by state-vector enumeration. In the string scheme
/// the strategy is applied to every pair.
pub fn acceptance_figures(params: &SchemeParams, strategy: &Strategy, mode: ValidationMode) -> Result<AcceptanceFigures> {
    let (rechoice, delta) = check_committer(params, strategy)?;
    let mut per_label = [0.0; 4];
    for (k, a) in BellLabel::ALL.iter().enumerate() {
        per_label[k] = instance_acceptance(params, *a, rechoice, delta, mode)?;
    }
    let figures = AcceptanceFigures::from_per_label(per_label);
    Ok(match params.scheme {
        Scheme::String => figures.powi(params.n_pairs),
        _ => figures,
    })
}

pub fn detection_probability(params: &SchemeParams, strategy: &Strategy, mode: ValidationMode) -> Result<f64> {
    Ok(1.0 - acceptance_figures(params, strategy, mode)?.average)
}

/// Stored bit predicted by label algebra: a Pauli `σ_z^i σ_x^j` flips a
/// Z-family state by `j` and an X-family state by `i`.
fn flip_bit(phi: BasisStateSpec, pauli: BellLabel) -> Bit {
    match phi.basis {
        Basis::Z => pauli.j(),
        Basis::X => pauli.i(),
    }
}

/// Same figure as [`acceptance_figures`], computed only from XOR rules over
/// labels with uniform Bell-measurement outcomes; no state vectors involved.
pub fn label_algebra_acceptance(
    params: &SchemeParams,
    strategy: &Strategy,
    mode: ValidationMode,
) -> Result<AcceptanceFigures> {
    let (rechoice, delta) = check_committer(params, strategy)?;
    let rechoice = rechoice.unwrap_or(BellLabel::ZETA_PLUS);
    let bob_policy = match params.scheme {
        Scheme::Multi => LabelPolicy::Uniform,
        _ => params.bob_label,
    };
    let mut per_label = [0.0; 4];
    for (k, &prepared) in BellLabel::ALL.iter().enumerate() {
        let effective = prepared ^ rechoice;
        let announced = effective ^ delta;
        for (bob, wb) in bob_policy.options() {
            for (phi, wp) in params.phi_policy.options() {
                for swap in BellLabel::ALL {
                    for tele in BellLabel::ALL {
                        let w = wb * wp / 16.0;
                        let sigma = effective ^ bob ^ swap ^ tele;
                        let stored = phi.value ^ flip_bit(phi, effective) ^ flip_bit(phi, sigma);
                        let sigma_hat = match mode {
                            ValidationMode::R1 => announced ^ bob ^ swap ^ tele,
                            ValidationMode::R2 => sigma,
                        };
                        let expected = phi.value ^ flip_bit(phi, announced) ^ flip_bit(phi, sigma_hat);
                        // Bob is honest in the multiparty figures, so his φ′ check passes.
                        if stored == expected {
                            per_label[k] += w;
                        }
                    }
                }
            }
        }
    }
    let figures = AcceptanceFigures::from_per_label(per_label);
    Ok(match params.scheme {
        Scheme::String => figures.powi(params.n_pairs),
        _ => figures,
    })
}

/// Joint acceptance of an N-pair string commitment where pair `k` is announced
/// with XOR `deltas[k]`; φ_k is uniform over all four states.
pub fn string_cheat_acceptance(n: usize, deltas: &[BellLabel], mode: ValidationMode) -> Result<f64> {
    string_cheat_acceptance_with(&SchemeParams::string(n), deltas, mode)
}

pub fn string_cheat_acceptance_with(params: &SchemeParams, deltas: &[BellLabel], mode: ValidationMode) -> Result<f64> {
    params.validate()?;
    if params.scheme != Scheme::String {
        return Err(Error::InvalidParams("string acceptance needs string parameters".into()));
    }
    if deltas.len() != params.n_pairs {
        return Err(Error::LengthMismatch {
            expected: params.n_pairs,
            got: deltas.len(),
        });
    }
    let per_pair = SchemeParams { n_pairs: 1, ..*params };
    let mut memo: BTreeMap<BellLabel, f64> = BTreeMap::new();
    let mut joint = 1.0;
    for &delta in deltas {
        let p = match memo.get(&delta) {
            Some(&p) => p,
            None => {
                let mut avg = 0.0;
                for a in BellLabel::ALL {
                    avg += 0.25 * instance_acceptance(&per_pair, a, None, delta, mode)?;
                }
                memo.insert(delta, avg);
                avg
            }
        };
        joint *= p;
    }
    Ok(joint)
}

/// What the receiver side holds before the reveal.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewHorizon {
    /// After Phase II: swap outcome, bb′, Bob's pair, φ.
    Confirmation,
    /// After Phase III: additionally the stored ψ′ (and φ′).
    Storage,
}

type View = Vec<u8>;

fn tv_distance(views: &BTreeMap<View, [f64; 2]>) -> f64 {
    0.5 * views.values().map(|[p0, p1]| (p0 - p1).abs()).sum::<f64>()
}

/// Total-variation distance between the receiver's pre-reveal views for
/// `d_c = 0` and `d_c = 1`, committer label uniform within each class. For the
/// string scheme the figure is per pair (pairs are independent).
pub fn concealment_tv(params: &SchemeParams, upto: ViewHorizon) -> Result<f64> {
    params.validate()?;
    let opts = RunOptions::default();
    let mut views: BTreeMap<View, [f64; 2]> = BTreeMap::new();
    for a in BellLabel::ALL {
        let dc = committed_bit(a) as usize;
        let transcripts = match params.scheme {
            Scheme::Single | Scheme::String => {
                let per_pair = SchemeParams { n_pairs: 1, ..*params };
                single_instance(&per_pair, a, None, &opts, &mut EnumerateAll)?
            }
            Scheme::Multi => {
                let mut all = Vec::new();
                for (bob, wb) in params.bob_label.options() {
                    for mut t in multi_instance(params, a, bob, &opts, &mut EnumerateAll)? {
                        t.probability *= wb;
                        all.push(t);
                    }
                }
                all
            }
        };
        for t in transcripts {
            let mut view = vec![
                t.bob_label.index() as u8,
                t.phi.value + 2 * (t.phi.basis == Basis::X) as u8,
                t.swap_outcome.index() as u8,
                t.teleport_outcome.index() as u8,
            ];
            if upto == ViewHorizon::Storage {
                view.push(t.stored_psi_prime);
                view.extend(t.stored_phi_prime);
            }
            views.entry(view).or_insert([0.0; 2])[dc] += 0.5 * t.probability;
        }
    }
    Ok(tv_distance(&views))
}

/// Label-algebra counterpart of [`concealment_tv`] at storage time: the view
/// is `(ββ₀, φ, b₀b₀′, bb′, ψ′)` with ψ′ predicted by XOR rules.
pub fn label_algebra_concealment_tv(params: &SchemeParams) -> Result<f64> {
    params.validate()?;
    let mut views: BTreeMap<View, [f64; 2]> = BTreeMap::new();
    for a in BellLabel::ALL {
        let dc = committed_bit(a) as usize;
        for (bob, wb) in params.bob_label.options() {
            for (phi, wp) in params.phi_policy.options() {
                for swap in BellLabel::ALL {
                    for tele in BellLabel::ALL {
                        let sigma = a ^ bob ^ swap ^ tele;
                        let psi = phi.value ^ flip_bit(phi, a) ^ flip_bit(phi, sigma);
                        let mut view = vec![bob.index() as u8, phi.value, phi.basis as u8, swap.index() as u8, tele.index() as u8, psi];
                        if params.scheme == Scheme::Multi {
                            view.push(phi.value ^ tele.j() ^ bob.j());
                        }
                        views.entry(view).or_insert([0.0; 2])[dc] += 0.5 * wb * wp / 16.0;
                    }
                }
            }
        }
    }
    Ok(tv_distance(&views))
}

fn record_branches<O: Copy + PartialEq>(set: BranchSet<O>) -> Vec<(O, crate::quantum::StateVector, f64)> {
    set.into_iter().map(|b| (b.outcome, b.state, b.probability)).collect()
}

/// Best probability of guessing `d_c` from the receiver strategy's records
/// (MAP over the enumerated outcome distribution, uniform committer label).
pub fn extraction_guess_probability(strategy: &Strategy, params: &SchemeParams) -> Result<f64> {
    params.validate()?;
    let measurement = match strategy.kind() {
        StrategyKind::ReceiverSkip { measurement } | StrategyKind::EarlyExtract { measurement } => measurement,
        _ => return Err(Error::InvalidStrategy(format!("{strategy} is not a receiver strategy"))),
    };
    let skip = matches!(strategy.kind(), StrategyKind::ReceiverSkip { .. });
    let mut records: BTreeMap<View, [f64; 2]> = BTreeMap::new();
    for a in BellLabel::ALL {
        let dc = committed_bit(a) as usize;
        for (record, p) in receiver_records(a, measurement, skip, params)? {
            records.entry(record).or_insert([0.0; 2])[dc] += 0.25 * p;
        }
    }
    Ok(records.values().map(|[p0, p1]| p0.max(*p1)).sum())
}

fn basis_of(m: ExtractMeasurement) -> Basis {
    match m {
        ExtractMeasurement::X => Basis::X,
        _ => Basis::Z,
    }
}

/// Outcome distribution of the receiver's measurements for committer label `a`.
fn receiver_records(a: BellLabel, m: ExtractMeasurement, skip: bool, params: &SchemeParams) -> Result<Vec<(View, f64)>> {
    let mut out = Vec::new();
    if skip {
        // No swap, no teleport: B₀ holds α₀ and gets back σ_z^i σ_x^j α.
        let pair = make_bell(a).apply_pauli(0, a.pauli())?;
        match m {
            ExtractMeasurement::BellOnPair => {
                for (o, _, p) in record_branches(pair.bell_measure(1, 0)?) {
                    out.push((vec![o.index() as u8], p));
                }
            }
            _ => {
                for (b1, s, p1) in record_branches(pair.basis_measure(1, basis_of(m))?) {
                    for (b0, _, p0) in record_branches(s.basis_measure(0, basis_of(m))?) {
                        out.push((vec![b1, b0], p1 * p0));
                    }
                }
            }
        }
        return Ok(out);
    }
    match m {
        ExtractMeasurement::Z | ExtractMeasurement::X => {
            for (bit, _, p) in record_branches(make_bell(a).basis_measure(1, basis_of(m))?) {
                out.push((vec![bit], p));
            }
        }
        ExtractMeasurement::BellOnPair => {
            // Swap withheld, Bob teleports honestly into β₀, Alice confirms;
            // B₀ Bell-measures α₀ with the returned qubit.
            for (bob, wb) in params.bob_label.options() {
                for (phi, wp) in params.phi_policy.options() {
                    let register = tensor(&[make_bell(a), make_bell(bob), make_basis_state(phi)])?;
                    for (tele, s, pt) in record_branches(register.bell_measure(4, 3)?) {
                        let returned = s.apply_pauli(0, a.pauli())?;
                        for (o, _, po) in record_branches(returned.bell_measure(1, 0)?) {
                            let record = vec![bob.index() as u8, phi.value, phi.basis as u8, tele.index() as u8, o.index() as u8];
                            out.push((record, wb * wp * pt * po));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub value: f64,
    pub statement: String,
}

fn claim(value: f64, statement: &str) -> Option<Claim> {
    Some(Claim {
        value,
        statement: statement.to_string(),
    })
}

/// Reference value the protocol's security argument asserts for a row.
pub fn claimed_acceptance(params: &SchemeParams, strategy: &Strategy) -> Option<Claim> {
    match strategy.kind() {
        StrategyKind::Honest => claim(1.0, "honest commitments always validate"),
        StrategyKind::DelayedRechoice { .. } => claim(1.0, "re-choosing the pair before confirmation is a fresh commitment"),
        StrategyKind::RelabelAnnounce { delta } => match (params.scheme, params.phi_policy) {
            (Scheme::String, _) => claim(0.5, "a false pair announcement passes with probability 1/2 per pair")
                .map(|c| Claim { value: c.value.powi(params.n_pairs as i32), ..c }),
            _ if delta.j() == 0 => claim(1.0, "relabeling within the ζ or η class is undetectable and harmless"),
            _ => claim(0.0, "switching between the ζ and η classes is always detected"),
        },
        _ => None,
    }
}

pub const CLAIMED_GUESS: f64 = 0.5;
pub const CLAIMED_TV: f64 = 0.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: Strategy,
    pub acceptance_probability: f64,
    pub detection_probability: f64,
    pub worst_case_acceptance: f64,
    pub label_algebra_acceptance: f64,
    pub oracles_agree: bool,
    pub claim: Option<Claim>,
    pub agrees: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRow {
    pub strategy: Strategy,
    pub guess_probability: f64,
    pub claimed: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub scheme: Scheme,
    pub mode: ValidationMode,
    pub phi_policy: PhiPolicy,
    pub n_pairs: usize,
    pub rows: Vec<StrategyRow>,
    pub extraction_rows: Vec<ExtractionRow>,
    pub concealment_tv: f64,
    pub label_algebra_concealment_tv: f64,
    pub concealment_agrees: bool,
    pub extraction_guess_probability: f64,
}

impl SecurityReport {
    /// Every row matches its reference value and both oracles agree.
    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(|r| r.oracles_agree && r.agrees.unwrap_or(true))
            && self.extraction_rows.iter().all(|r| r.agrees)
            && self.concealment_agrees
    }

    /// Plain-text table.
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "scheme={} mode={} phi={:?} pairs={}",
            self.scheme, self.mode, self.phi_policy, self.n_pairs
        );
        let _ = writeln!(
            s,
            "{:<14} {:>10} {:>10} {:>10} {:>10} {:>8}  {}",
            "strategy", "accept", "detect", "worst", "claimed", "agrees", "note"
        );
        for r in &self.rows {
            let (claimed, note) = match &r.claim {
                Some(c) => (format!("{:.6}", c.value), c.statement.as_str()),
                None => ("-".to_string(), ""),
            };
            let agrees = match r.agrees {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "-",
            };
            let _ = writeln!(
                s,
                "{:<14} {:>10.6} {:>10.6} {:>10.6} {:>10} {:>8}  {}{}",
                r.strategy.to_string(),
                r.acceptance_probability,
                r.detection_probability,
                r.worst_case_acceptance,
                claimed,
                agrees,
                note,
                if r.oracles_agree { "" } else { " [oracle mismatch]" }
            );
        }
        for r in &self.extraction_rows {
            let _ = writeln!(
                s,
                "{:<14} guess={:.6} claimed={:.6} agrees={}",
                r.strategy.to_string(),
                r.guess_probability,
                r.claimed,
                if r.agrees { "yes" } else { "NO" }
            );
        }
        let _ = writeln!(
            s,
            "concealment tv={:.3e} (label algebra {:.3e}) agrees={}",
            self.concealment_tv,
            self.label_algebra_concealment_tv,
            if self.concealment_agrees { "yes" } else { "NO" }
        );
        let _ = writeln!(s, "best extraction guess={:.6}", self.extraction_guess_probability);
        s
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= AGREE_TOL
}

pub fn build_report(params: &SchemeParams, strategies: &[Strategy], mode: ValidationMode) -> Result<SecurityReport> {
    params.validate()?;
    let mut rows = Vec::new();
    let mut receivers = Vec::new();
    for s in strategies {
        match s.role() {
            Role::Receiver => receivers.push(*s),
            Role::Committer => {
                let figs = acceptance_figures(params, s, mode)?;
                let algebra = label_algebra_acceptance(params, s, mode)?;
                let claim = claimed_acceptance(params, s);
                rows.push(StrategyRow {
                    strategy: *s,
                    acceptance_probability: figs.average,
                    detection_probability: 1.0 - figs.average,
                    worst_case_acceptance: figs.worst_case,
                    label_algebra_acceptance: algebra.average,
                    oracles_agree: close(figs.average, algebra.average) && close(figs.worst_case, algebra.worst_case),
                    agrees: claim.as_ref().map(|c| close(figs.average, c.value)),
                    claim,
                });
            }
        }
    }
    if receivers.is_empty() {
        receivers = receiver_menu();
    }
    let extraction_rows = receivers
        .iter()
        .map(|s| {
            let g = extraction_guess_probability(s, params)?;
            Ok(ExtractionRow {
                strategy: *s,
                guess_probability: g,
                claimed: CLAIMED_GUESS,
                agrees: close(g, CLAIMED_GUESS),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tv = concealment_tv(params, ViewHorizon::Storage)?;
    let tv_algebra = label_algebra_concealment_tv(params)?;
    Ok(SecurityReport {
        scheme: params.scheme,
        mode,
        phi_policy: params.phi_policy,
        n_pairs: params.n_pairs,
        concealment_agrees: close(tv, CLAIMED_TV) && close(tv_algebra, CLAIMED_TV),
        extraction_guess_probability: extraction_rows.iter().map(|r| r.guess_probability).fold(0.0, f64::max),
        rows,
        extraction_rows,
        concealment_tv: tv,
        label_algebra_concealment_tv: tv_algebra,
    })
}

/// Parameters for the scheme with the phi policy reports are built on.
pub fn scan_params(scheme: Scheme, phi: Option<PhiPolicy>, n_pairs: usize) -> SchemeParams {
    let base = match scheme {
        Scheme::Single => SchemeParams::single(),
        Scheme::Multi => SchemeParams::multi(),
        Scheme::String => SchemeParams::string(n_pairs.max(1)),
    };
    match phi {
        Some(p) => base.with_phi(p),
        None => base,
    }
}
