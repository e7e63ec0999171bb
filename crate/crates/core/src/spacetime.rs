//! 1+1D Minkowski bookkeeping for the commitment schemes: actor placement,
//! the canonical phase timetable, and a light-cone audit of schedules.
//!
//! Laboratories are points on a line; processing inside a laboratory takes
//! zero time. Actors sit at `0`, `x` and `2x`, with the verifier (B₀ or the
//! center C) in the middle.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ALICE: &str = "alice";
pub const BOB: &str = "bob";
/// Bob's agent in the single-party and string schemes.
pub const AGENT: &str = "b0";
/// Joint center in the multiparty scheme.
pub const CENTER: &str = "c";

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Single,
    Multi,
    String,
}

impl Scheme {
    /// Actor that receives the flying qubits and validates at reveal time.
    pub fn verifier(self) -> &'static str {
        match self {
            Scheme::Multi => CENTER,
            _ => AGENT,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Single => "single",
            Scheme::Multi => "multi",
            Scheme::String => "string",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" => Ok(Scheme::Single),
            "multi" | "multiparty" => Ok(Scheme::Multi),
            "string" => Ok(Scheme::String),
            other => Err(Error::InvalidParams(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Actor {
    pub id: String,
    pub position: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub actors: Vec<Actor>,
    pub c: f64,
    pub x: f64,
}

impl Topology {
    /// Canonical placement: single/string put Bob, B₀, Alice at 0, x, 2x;
    /// multiparty puts Alice, C, Bob at 0, x, 2x.
    pub fn standard(scheme: Scheme, x: f64, c: f64) -> Result<Self> {
        check_speed(c)?;
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidSchedule(format!("separation must be ≥ 0, got {x}")));
        }
        let order = match scheme {
            Scheme::Multi => [ALICE, CENTER, BOB],
            _ => [BOB, AGENT, ALICE],
        };
        let actors = order
            .iter()
            .enumerate()
            .map(|(k, id)| Actor {
                id: id.to_string(),
                position: k as f64 * x,
            })
            .collect();
        Ok(Topology { actors, c, x })
    }

    pub fn position(&self, actor: &str) -> Result<f64> {
        self.actors
            .iter()
            .find(|a| a.id == actor)
            .map(|a| a.position)
            .ok_or_else(|| Error::UnknownActor(actor.to_string()))
    }

    /// Slack allowed in timing comparisons.
    fn tolerance(&self, magnitude: f64) -> f64 {
        1e-9 * (self.x / self.c) + 8.0 * f64::EPSILON * magnitude.abs()
    }
}

fn check_speed(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositiveSpeed(c));
    }
    Ok(())
}

pub fn light_travel_time(p: f64, q: f64, c: f64) -> Result<f64> {
    check_speed(c)?;
    Ok((p - q).abs() / c)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Prepare,
    Send,
    Receive,
    Bsm,
    Measure,
    Announce,
    Validate,
}

impl EventKind {
    /// Send and receive only move a payload; every other kind creates the
    /// record named by its `payload_ref`.
    fn produces(self) -> bool {
        !matches!(self, EventKind::Send | EventKind::Receive)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub actor: String,
    pub time: f64,
    pub kind: EventKind,
    pub payload_ref: String,
    #[serde(default)]
    pub consumes: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Quantum,
    Classical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub sender: String,
    pub receiver: String,
    pub send_time: f64,
    pub arrival_time: f64,
    pub channel: Channel,
    pub payload_ref: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub commit: f64,
    pub confirm: f64,
    pub store: f64,
    pub reveal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub scheme: Scheme,
    pub phase_times: PhaseTimes,
    pub events: Vec<SpacetimeEvent>,
    pub messages: Vec<Message>,
}

struct Builder {
    events: Vec<SpacetimeEvent>,
    messages: Vec<Message>,
}

impl Builder {
    fn event(&mut self, actor: &str, time: f64, kind: EventKind, payload: &str, consumes: &[&str]) {
        self.events.push(SpacetimeEvent {
            actor: actor.to_string(),
            time,
            kind,
            payload_ref: payload.to_string(),
            consumes: consumes.iter().map(|s| s.to_string()).collect(),
        });
    }

    /// Send event, message, and receive event for one payload.
    fn transmit(&mut self, from: &str, to: &str, sent: f64, arrives: f64, channel: Channel, payload: &str) {
        self.event(from, sent, EventKind::Send, payload, &[]);
        self.messages.push(Message {
            sender: from.to_string(),
            receiver: to.to_string(),
            send_time: sent,
            arrival_time: arrives,
            channel,
            payload_ref: payload.to_string(),
        });
        self.event(to, arrives, EventKind::Receive, payload, &[]);
    }
}

/// Canonical timetable: commit at 0, confirm at x/c, store at 2x/c, reveal
/// at `reveal_time`; the verifier validates once the announcements arrive.
pub fn standard_schedule(x: f64, c: f64, reveal_time: f64, scheme: Scheme) -> Result<Schedule> {
    check_speed(c)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidSchedule(format!("separation must be ≥ 0, got {x}")));
    }
    let d = light_travel_time(0.0, x, c)?;
    let store = 2.0 * d;
    if !(reveal_time.is_finite() && reveal_time >= store) {
        return Err(Error::InvalidSchedule(format!(
            "reveal time {reveal_time} precedes confirmation receipt at {store}"
        )));
    }
    Ok(build_schedule(d, reveal_time, scheme))
}

/// Timetable without the reveal-time check, for auditing deliberately bad
/// parameter choices.
pub fn unchecked_schedule(x: f64, c: f64, reveal_time: f64, scheme: Scheme) -> Result<Schedule> {
    let d = light_travel_time(0.0, x, c)?;
    Ok(build_schedule(d, reveal_time, scheme))
}

fn build_schedule(d: f64, reveal: f64, scheme: Scheme) -> Schedule {
    use Channel::{Classical, Quantum};
    use EventKind::*;

    let mut b = Builder {
        events: Vec::new(),
        messages: Vec::new(),
    };
    let v = scheme.verifier();
    let (t0, t1, t2) = (0.0, d, 2.0 * d);

    b.event(ALICE, t0, Prepare, "alice_pair", &[]);
    b.event(BOB, t0, Prepare, "bob_pair", &[]);
    b.transmit(ALICE, v, t0, t1, Quantum, "alpha0");
    b.transmit(BOB, v, t0, t1, Quantum, "beta0");

    b.event(v, t1, Bsm, "swap_outcome", &["alice_pair", "bob_pair"]);
    b.event(BOB, t1, Bsm, "teleport_outcome", &["bob_pair"]);
    match scheme {
        Scheme::Multi => {
            b.transmit(v, ALICE, t1, t2, Classical, "swap_outcome");
            b.transmit(v, BOB, t1, t2, Classical, "swap_outcome");
            b.event(ALICE, t1, Measure, "alice_mid_measurement", &["alice_pair"]);
            b.event(ALICE, t1, Prepare, "psi_prime", &["alice_pair", "alice_mid_measurement"]);
            b.transmit(ALICE, v, t1, t2, Quantum, "psi_prime");
            b.event(BOB, t1, Prepare, "phi_prime", &["bob_pair", "teleport_outcome"]);
            b.transmit(BOB, v, t1, t2, Quantum, "phi_prime");
            b.event(v, t2, Measure, "stored_psi_prime", &["psi_prime"]);
            b.event(v, t2, Measure, "stored_phi_prime", &["phi_prime"]);

            b.event(ALICE, reveal, Announce, "alice_announcement", &["alice_pair"]);
            b.event(BOB, reveal, Announce, "bob_announcement", &["bob_pair", "teleport_outcome"]);
            b.transmit(ALICE, v, reveal, reveal + d, Classical, "alice_announcement");
            b.transmit(BOB, v, reveal, reveal + d, Classical, "bob_announcement");
            b.event(
                v,
                reveal + d,
                Validate,
                "verdict",
                &[
                    "alice_announcement",
                    "bob_announcement",
                    "stored_psi_prime",
                    "stored_phi_prime",
                    "swap_outcome",
                ],
            );
        }
        Scheme::Single | Scheme::String => {
            b.event(ALICE, t1, Prepare, "psi_prime", &["alice_pair"]);
            b.transmit(ALICE, v, t1, t2, Quantum, "psi_prime");
            b.transmit(BOB, v, t1, t2, Classical, "teleport_outcome");
            b.event(v, t2, Measure, "stored_psi_prime", &["psi_prime"]);

            b.event(ALICE, reveal, Announce, "alice_announcement", &["alice_pair"]);
            b.transmit(ALICE, v, reveal, reveal + d, Classical, "alice_announcement");
            b.event(
                v,
                reveal + d,
                Validate,
                "verdict",
                &[
                    "alice_announcement",
                    "stored_psi_prime",
                    "swap_outcome",
                    "teleport_outcome",
                ],
            );
        }
    }

    Schedule {
        scheme,
        phase_times: PhaseTimes {
            commit: t0,
            confirm: t1,
            store: t2,
            reveal,
        },
        events: b.events,
        messages: b.messages,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Message arrives before light could cover the distance.
    SuperluminalMessage {
        index: usize,
        payload: String,
        arrival_time: f64,
        earliest_arrival: f64,
    },
    /// An event uses a record produced outside its past light cone.
    OutsideLightCone {
        event: usize,
        payload: String,
        time: f64,
        earliest: f64,
    },
    /// An event uses a record that no event produces.
    MissingProducer { event: usize, payload: String },
    /// Reveal scheduled before the confirmation qubit is stored.
    RevealBeforeStore { reveal: f64, store: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SuperluminalMessage {
                index,
                payload,
                arrival_time,
                earliest_arrival,
            } => write!(
                f,
                "message #{index} ({payload}) arrives at {arrival_time}, light bound {earliest_arrival}"
            ),
            Violation::OutsideLightCone {
                event,
                payload,
                time,
                earliest,
            } => write!(
                f,
                "event #{event} uses {payload} at {time}, earliest causal time {earliest}"
            ),
            Violation::MissingProducer { event, payload } => {
                write!(f, "event #{event} uses {payload}, which is never produced")
            }
            Violation::RevealBeforeStore { reveal, store } => {
                write!(f, "reveal at {reveal} precedes storage at {store}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Light-cone check of every message and every payload dependency.
pub fn audit(schedule: &Schedule, topology: &Topology) -> Result<AuditReport> {
    check_speed(topology.c)?;
    let mut violations = Vec::new();

    let pt = &schedule.phase_times;
    if pt.reveal < pt.store - topology.tolerance(pt.store) {
        violations.push(Violation::RevealBeforeStore {
            reveal: pt.reveal,
            store: pt.store,
        });
    }

    for (index, m) in schedule.messages.iter().enumerate() {
        let from = topology.position(&m.sender)?;
        let to = topology.position(&m.receiver)?;
        let earliest = m.send_time + light_travel_time(from, to, topology.c)?;
        if m.arrival_time < earliest - topology.tolerance(earliest) {
            violations.push(Violation::SuperluminalMessage {
                index,
                payload: m.payload_ref.clone(),
                arrival_time: m.arrival_time,
                earliest_arrival: earliest,
            });
        }
    }

    let mut producers: HashMap<&str, (f64, f64)> = HashMap::new();
    for e in &schedule.events {
        let pos = topology.position(&e.actor)?;
        if e.kind.produces() {
            producers.entry(e.payload_ref.as_str()).or_insert((pos, e.time));
        }
    }
    for (index, e) in schedule.events.iter().enumerate() {
        let pos = topology.position(&e.actor)?;
        for payload in &e.consumes {
            match producers.get(payload.as_str()) {
                None => violations.push(Violation::MissingProducer {
                    event: index,
                    payload: payload.clone(),
                }),
                Some(&(src, produced_at)) => {
                    let earliest = produced_at + light_travel_time(src, pos, topology.c)?;
                    if e.time < earliest - topology.tolerance(earliest) {
                        violations.push(Violation::OutsideLightCone {
                            event: index,
                            payload: payload.clone(),
                            time: e.time,
                            earliest,
                        });
                    }
                }
            }
        }
    }

    Ok(AuditReport { violations })
}
