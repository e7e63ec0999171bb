//! Run configuration, seeded Monte Carlo, enumeration driver and transcript
//! persistence.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{Role, Strategy, StrategyKind};
use crate::error::{Error, Result};
use crate::protocol::{
    multi_instance, single_instance, validate_multiparty, validate_single, Announcements, Chooser, EnumerateAll,
    LabelPolicy, RunOptions, Sampler, SchemeParams, Transcript, ValidationMode,
};
use crate::quantum::BellLabel;
use crate::spacetime::Scheme;

/// |z| bound for empirical frequencies to count as agreeing with the exact value.
pub const Z_BOUND: f64 = 5.0;

/// Settings shared by the command-line subcommands. Field names match the
/// command-line flags so a JSON file can stand in for them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub x: f64,
    pub c: f64,
    /// Reveal time; `10·x/c` when absent.
    #[serde(rename = "T")]
    pub reveal_time: Option<f64>,
    pub n_pairs: usize,
    /// `Z0`, `uniform-z`, `uniform`, ...; scheme default when absent.
    pub phi: Option<String>,
    /// Committer label; uniform when absent.
    pub alice_label: Option<String>,
    /// Bob's label; uniform when absent.
    pub bob_label: Option<String>,
    pub mode: ValidationMode,
    pub strategy: String,
    pub seed: u64,
    pub trials: u64,
    pub output: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheme: Scheme::Single,
            x: 1.0,
            c: 1.0,
            reveal_time: None,
            n_pairs: 1,
            phi: None,
            alice_label: None,
            bob_label: None,
            mode: ValidationMode::R2,
            strategy: "honest".into(),
            seed: 0,
            trials: 1000,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn params(&self) -> Result<SchemeParams> {
        if !(self.x > 0.0) || !(self.c > 0.0) {
            return Err(Error::InvalidParams(format!(
                "x and c must be positive, got x={} c={}",
                self.x, self.c
            )));
        }
        if let Some(t) = self.reveal_time {
            if !(t > 0.0) {
                return Err(Error::InvalidParams(format!("T must be positive, got {t}")));
            }
        }
        let base = match self.scheme {
            Scheme::Single => SchemeParams::single(),
            Scheme::Multi => SchemeParams::multi(),
            Scheme::String => SchemeParams::string(self.n_pairs),
        };
        let mut params = base
            .with_geometry(self.x, self.c, self.reveal_time)
            .with_mode(self.mode)
            .with_bob_label(self.bob_policy()?);
        if let Some(phi) = &self.phi {
            params = params.with_phi(phi.parse()?);
        }
        params.validate()?;
        Ok(params)
    }

    pub fn alice_policy(&self) -> Result<LabelPolicy> {
        parse_label_policy(self.alice_label.as_deref())
    }

    pub fn bob_policy(&self) -> Result<LabelPolicy> {
        parse_label_policy(self.bob_label.as_deref())
    }

    pub fn parsed_strategy(&self) -> Result<Strategy> {
        self.strategy.parse()
    }

    /// Committer moves: rechoice Pauli and announcement XOR.
    fn committer(&self) -> Result<(Option<BellLabel>, BellLabel)> {
        let s = self.parsed_strategy()?;
        if s.role() != Role::Committer {
            return Err(Error::InvalidStrategy(format!(
                "{s} is a receiver strategy; runs simulate committer behavior"
            )));
        }
        Ok(match s.kind() {
            StrategyKind::RelabelAnnounce { delta } => (None, delta),
            StrategyKind::DelayedRechoice { delta } => (Some(delta), BellLabel::ZETA_PLUS),
            _ => (None, BellLabel::ZETA_PLUS),
        })
    }
}

fn parse_label_policy(s: Option<&str>) -> Result<LabelPolicy> {
    match s {
        None => Ok(LabelPolicy::Uniform),
        Some(s) => s.parse(),
    }
}

/// Per-trial seed: SplitMix64 applied to `seed + (index + 1)·γ` with
/// γ = 0x9E3779B97F4A7C15. Pure integer arithmetic, identical on every platform.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_rng(seed: u64, index: u64) -> Sampler<ChaCha8Rng> {
    Sampler::new(ChaCha8Rng::seed_from_u64(derive_seed(seed, index)))
}

/// Validated transcripts of one trial: one per pair, the first pair first.
/// With `stop_at_abort`, pairs after the first abort are not simulated.
fn trial<C: Chooser>(
    params: &SchemeParams,
    alice: LabelPolicy,
    committer: (Option<BellLabel>, BellLabel),
    attach_schedule: bool,
    stop_at_abort: bool,
    chooser: &mut C,
) -> Result<Vec<Vec<Transcript>>> {
    let (rechoice, delta) = committer;
    let opts = RunOptions {
        rechoice,
        attach_schedule,
        ..RunOptions::default()
    };
    let pairs = if params.scheme == Scheme::String { params.n_pairs } else { 1 };
    let mut out = Vec::with_capacity(pairs);
    for k in 0..pairs {
        let mut branches = Vec::new();
        for (a, wa) in chooser.pick(alice.options()) {
            let ts = match params.scheme {
                Scheme::Single => single_instance(params, a, None, &opts, chooser)?,
                Scheme::String => single_instance(params, a, Some(k), &opts, chooser)?,
                Scheme::Multi => {
                    let mut all = Vec::new();
                    for (b, wb) in chooser.pick(params.bob_label.options()) {
                        for mut t in multi_instance(params, a, b, &opts, chooser)? {
                            t.probability *= wb;
                            all.push(t);
                        }
                    }
                    all
                }
            };
            for mut t in ts {
                t.probability *= wa;
                let announced = t.alice_label ^ delta;
                let (verdict, ann) = match params.scheme {
                    Scheme::Multi => {
                        let bob = (t.bob_label, t.teleport_outcome);
                        let v = validate_multiparty(&t, announced, bob, params.validation_mode)?;
                        (
                            v,
                            Announcements {
                                alice: announced,
                                bob: Some(bob.0),
                                bob_teleport: Some(bob.1),
                            },
                        )
                    }
                    _ => (
                        validate_single(&t, announced, params.validation_mode)?,
                        Announcements {
                            alice: announced,
                            bob: None,
                            bob_teleport: None,
                        },
                    ),
                };
                branches.push(t.with_reveal(ann, verdict));
            }
        }
        let rejected = branches.iter().all(|t| !t.verdict.is_some_and(|v| v.is_accept()));
        out.push(branches);
        if stop_at_abort && rejected {
            break;
        }
    }
    Ok(out)
}

/// Observables tallied per trial: name → category.
fn observe(first_pair: &Transcript, accepted: bool) -> Vec<(&'static str, String)> {
    let mut obs = vec![
        ("swap_outcome", first_pair.swap_outcome.to_string()),
        ("teleport_outcome", first_pair.teleport_outcome.to_string()),
        ("stored_psi_prime", first_pair.stored_psi_prime.to_string()),
    ];
    if let Some(p) = first_pair.stored_phi_prime {
        obs.push(("stored_phi_prime", p.to_string()));
    }
    obs.push(("verdict", if accepted { "accept" } else { "abort" }.to_string()));
    obs
}

type Table = BTreeMap<(&'static str, String), f64>;

/// Exact distribution of every observable by enumeration. For the string
/// scheme the first pair is enumerated and joint acceptance is its per-pair
/// acceptance raised to the number of pairs (pairs are i.i.d.).
fn exact_table(params: &SchemeParams, alice: LabelPolicy, committer: (Option<BellLabel>, BellLabel)) -> Result<Table> {
    let one = SchemeParams { n_pairs: 1, ..*params };
    let branches = trial(&one, alice, committer, false, false, &mut EnumerateAll)?.remove(0);
    let mut table = Table::new();
    let mut pair_accept = 0.0;
    for t in &branches {
        let accepted = t.verdict.is_some_and(|v| v.is_accept());
        if accepted {
            pair_accept += t.probability;
        }
        for (name, cat) in observe(t, accepted) {
            if name != "verdict" {
                *table.entry((name, cat)).or_insert(0.0) += t.probability;
            }
        }
    }
    let n = if params.scheme == Scheme::String { params.n_pairs } else { 1 };
    let joint = pair_accept.powi(n as i32).clamp(0.0, 1.0);
    table.insert(("verdict", "accept".into()), joint);
    table.insert(("verdict", "abort".into()), 1.0 - joint);
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeStat {
    pub observable: String,
    pub outcome: String,
    pub count: u64,
    pub frequency: f64,
    pub exact: f64,
    /// `sqrt(p(1−p)/n)` at the exact probability `p`.
    pub std_error: f64,
    /// Absent when the standard error is zero.
    pub z_score: Option<f64>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub scheme: Scheme,
    pub mode: ValidationMode,
    pub strategy: String,
    pub seed: u64,
    pub trials: u64,
    pub stats: Vec<OutcomeStat>,
    pub all_agree: bool,
}

impl StatsSummary {
    pub fn stat(&self, observable: &str, outcome: &str) -> Option<&OutcomeStat> {
        self.stats
            .iter()
            .find(|s| s.observable == observable && s.outcome == outcome)
    }

    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "scheme={} mode={} strategy={} seed={} trials={}",
            self.scheme, self.mode, self.strategy, self.seed, self.trials
        );
        let _ = writeln!(
            s,
            "{:<18} {:<8} {:>10} {:>12} {:>12} {:>8}",
            "observable", "outcome", "count", "frequency", "exact", "z"
        );
        for st in &self.stats {
            let z = st.z_score.map_or("-".to_string(), |z| format!("{z:.2}"));
            let _ = writeln!(
                s,
                "{:<18} {:<8} {:>10} {:>12.6e} {:>12.6e} {:>8}{}",
                st.observable,
                st.outcome,
                st.count,
                st.frequency,
                st.exact,
                z,
                if st.agrees { "" } else { "  !" }
            );
        }
        s
    }
}

/// Sampled trials with per-trial streams from [`derive_seed`], compared
/// against exact enumeration. String trials stop simulating pairs after the
/// first rejected one; the verdict is already decided.
pub fn monte_carlo(config: &RunConfig) -> Result<StatsSummary> {
    if config.trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let params = config.params()?;
    let alice = config.alice_policy()?;
    let committer = config.committer()?;
    let exact = exact_table(&params, alice, committer)?;

    let mut counts: BTreeMap<(&'static str, String), u64> = exact.keys().map(|k| (k.clone(), 0)).collect();
    for index in 0..config.trials {
        let pairs = trial(&params, alice, committer, false, true, &mut trial_rng(config.seed, index))?;
        let accepted = pairs.len() == pairs_in(&params)
            && pairs.iter().all(|p| p[0].verdict.is_some_and(|v| v.is_accept()));
        for key in observe(&pairs[0][0], accepted) {
            *counts.entry(key).or_insert(0) += 1;
        }
    }

    let n = config.trials as f64;
    let stats: Vec<OutcomeStat> = counts
        .into_iter()
        .map(|((name, outcome), count)| {
            let p = exact.get(&(name, outcome.clone())).copied().unwrap_or(0.0).clamp(0.0, 1.0);
            let frequency = count as f64 / n;
            let std_error = (p * (1.0 - p) / n).sqrt();
            let z_score = (std_error > 0.0).then(|| (frequency - p) / std_error);
            let agrees = match z_score {
                Some(z) => z.abs() <= Z_BOUND,
                None => (frequency - p).abs() <= 1e-12,
            };
            OutcomeStat {
                observable: name.to_string(),
                outcome,
                count,
                frequency,
                exact: p,
                std_error,
                z_score,
                agrees,
            }
        })
        .collect();
    Ok(StatsSummary {
        scheme: params.scheme,
        mode: params.validation_mode,
        strategy: config.parsed_strategy()?.to_string(),
        seed: config.seed,
        trials: config.trials,
        all_agree: stats.iter().all(|s| s.agrees),
        stats,
    })
}

fn pairs_in(params: &SchemeParams) -> usize {
    if params.scheme == Scheme::String {
        params.n_pairs
    } else {
        1
    }
}

/// Sampled, validated transcripts with schedules: one per pair per trial.
pub fn sample_transcripts(config: &RunConfig) -> Result<Vec<Transcript>> {
    if config.trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let params = config.params()?;
    let alice = config.alice_policy()?;
    let committer = config.committer()?;
    let mut out = Vec::new();
    for index in 0..config.trials {
        let pairs = trial(&params, alice, committer, true, false, &mut trial_rng(config.seed, index))?;
        out.extend(pairs.into_iter().flatten());
    }
    Ok(out)
}

/// Exact branch list of one execution with the reveal applied. Unset labels
/// default to ζ⁺ so a single instance is enumerated. For the string scheme
/// each pair's branches are listed with its `pair_index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub scheme: Scheme,
    pub mode: ValidationMode,
    pub strategy: String,
    pub branches: Vec<Transcript>,
    pub total_probability: f64,
    pub acceptance_probability: f64,
}

pub fn enumerate(config: &RunConfig) -> Result<Enumeration> {
    let fixed = RunConfig {
        alice_label: Some(config.alice_label.clone().unwrap_or_else(|| "00".into())),
        bob_label: Some(config.bob_label.clone().unwrap_or_else(|| "00".into())),
        ..config.clone()
    };
    let params = fixed.params()?;
    let pairs = trial(
        &params,
        fixed.alice_policy()?,
        fixed.committer()?,
        true,
        false,
        &mut EnumerateAll,
    )?;
    let mut acceptance = 1.0;
    for p in &pairs {
        acceptance *= p
            .iter()
            .filter(|t| t.verdict.is_some_and(|v| v.is_accept()))
            .map(|t| t.probability)
            .sum::<f64>();
    }
    let branches: Vec<Transcript> = pairs.into_iter().flatten().collect();
    let first_pair = branches.iter().filter(|t| t.pair_index.unwrap_or(0) == 0);
    Ok(Enumeration {
        scheme: params.scheme,
        mode: params.validation_mode,
        strategy: fixed.parsed_strategy()?.to_string(),
        total_probability: first_pair.map(|t| t.probability).sum(),
        acceptance_probability: acceptance,
        branches,
    })
}

/// Compact JSON with keys in sorted order; byte-stable for equal inputs.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(v.to_string())
}

/// Pretty JSON with keys in sorted order.
pub fn to_sorted_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    serde_json::to_string_pretty(&v).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}

pub fn serialize_transcript(t: &Transcript) -> Result<String> {
    to_sorted_json(t)
}

pub fn parse_transcript(text: &str) -> Result<Transcript> {
    parse_at(text, 1)
}

fn parse_at(text: &str, line: usize) -> Result<Transcript> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line,
        message: format!("column {}: {e}", e.column()),
    })
}

pub fn write_jsonl(transcripts: &[Transcript]) -> Result<String> {
    let mut out = String::new();
    for t in transcripts {
        out.push_str(&serialize_transcript(t)?);
        out.push('\n');
    }
    Ok(out)
}

/// One transcript per non-blank line; errors carry the 1-based line number.
pub fn parse_jsonl(text: &str) -> Result<Vec<Transcript>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| parse_at(l, k + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(scheme: Scheme) -> RunConfig {
        RunConfig {
            scheme,
            trials: 2000,
            seed: 7,
            ..RunConfig::default()
        }
    }

    #[test]
    fn derived_seeds_are_fixed() {
        assert_eq!(derive_seed(0, 0), derive_seed(0, 0));
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(0, 0));
        // SplitMix64 reference outputs for state 0 stepped once and twice.
        assert_eq!(derive_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(derive_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn monte_carlo_agrees_and_is_deterministic() {
        for scheme in [Scheme::Single, Scheme::Multi, Scheme::String] {
            let a = monte_carlo(&cfg(scheme)).unwrap();
            assert!(a.all_agree, "{}", a.render());
            let total: u64 = a.stats.iter().filter(|s| s.observable == "verdict").map(|s| s.count).sum();
            assert_eq!(total, 2000);
            assert_eq!(a, monte_carlo(&cfg(scheme)).unwrap());
        }
    }

    #[test]
    fn cheating_rates() {
        let c = RunConfig {
            scheme: Scheme::String,
            strategy: "relabel:10".into(),
            ..cfg(Scheme::String)
        };
        let s = monte_carlo(&c).unwrap();
        assert!((s.stat("verdict", "accept").unwrap().exact - 0.5).abs() < 1e-12);
        assert!(s.all_agree, "{}", s.render());
    }

    #[test]
    fn enumerate_single_z0() {
        let c = RunConfig {
            phi: Some("Z0".into()),
            ..RunConfig::default()
        };
        let e = enumerate(&c).unwrap();
        assert_eq!(e.branches.len(), 16);
        assert!((e.total_probability - 1.0).abs() < 1e-12);
        assert!((e.acceptance_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jsonl_round_trip_and_diagnostics() {
        let c = RunConfig {
            trials: 3,
            ..cfg(Scheme::Multi)
        };
        let ts = sample_transcripts(&c).unwrap();
        let text = write_jsonl(&ts).unwrap();
        assert_eq!(parse_jsonl(&text).unwrap(), ts);
        assert_eq!(text, write_jsonl(&sample_transcripts(&c).unwrap()).unwrap());

        let mut v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("swap_outcome");
        let bad = format!("{}\n\n{}\n", text.lines().next().unwrap(), v);
        match parse_jsonl(&bad) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("swap_outcome"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_parsing() {
        let c = RunConfig::from_json(r#"{"scheme":"string","n_pairs":3,"T":5.0,"mode":"R1","strategy":"rechoice:01"}"#)
            .unwrap();
        let p = c.params().unwrap();
        assert_eq!(p.n_pairs, 3);
        assert_eq!(p.reveal_time, 5.0);
        assert_eq!(p.validation_mode, ValidationMode::R1);
        assert!(RunConfig::from_json(r#"{"bogus":1}"#).is_err());
        let bad = RunConfig {
            strategy: "skip:z".into(),
            ..RunConfig::default()
        };
        assert!(monte_carlo(&bad).is_err());
        let zero = RunConfig {
            trials: 0,
            ..RunConfig::default()
        };
        assert!(monte_carlo(&zero).is_err());
    }
}
