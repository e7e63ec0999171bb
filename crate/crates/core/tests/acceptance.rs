//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rqbc_core::adversary::{
    acceptance_figures, build_report, concealment_tv, default_strategy_menu, extraction_guess_probability,
    label_algebra_acceptance, label_algebra_concealment_tv, string_cheat_acceptance, Role, Strategy, ViewHorizon,
};
use rqbc_core::harness::{monte_carlo, RunConfig};
use rqbc_core::protocol::{run_multiparty, run_single, run_string, LabelPolicy, PhiPolicy, RunMode, StringBundle};
use rqbc_core::quantum::{
    make_basis_state, make_bell, states_equal_up_to_phase, swapped_label, teleport_correction, tensor,
    BasisStateSpec, BellLabel,
};
use rqbc_core::spacetime::{audit, standard_schedule, unchecked_schedule, Topology, Violation};
use rqbc_core::{validate_multiparty, validate_single, validate_string, Scheme, SchemeParams, ValidationMode};

const TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn criterion_1() -> Outcome {
    let h = FRAC_1_SQRT_2;
    // Amplitude index = a + 2b for ket |ab⟩.
    let table: [(BellLabel, [f64; 4]); 4] = [
        (BellLabel::ZETA_PLUS, [h, 0.0, 0.0, h]),
        (BellLabel::ETA_PLUS, [0.0, h, h, 0.0]),
        (BellLabel::ZETA_MINUS, [h, 0.0, 0.0, -h]),
        (BellLabel::ETA_MINUS, [0.0, -h, h, 0.0]),
    ];
    let mut worst: f64 = 0.0;
    for (label, amps) in table {
        for (got, want) in make_bell(label).amplitudes().iter().zip(amps) {
            worst = worst.max((got - Complex64::new(want, 0.0)).norm());
        }
    }
    ensure(worst <= TOL, || format!("max amplitude error {worst:e}"))?;
    Ok(format!("4 Bell states, max amplitude error {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for a in BellLabel::ALL {
        for b in BellLabel::ALL {
            let register = tensor(&[make_bell(a), make_bell(b)]).map_err(e)?;
            let set = register.bell_measure(1, 2).map_err(e)?;
            for o in BellLabel::ALL {
                let p = set.probability_of(o);
                ensure((p - 0.25).abs() <= TOL, || format!("P({o}|{a},{b}) = {p}"))?;
            }
            for branch in set.iter() {
                let left = branch.state.factor(&[0, 3]).map_err(e)?;
                let want = make_bell(swapped_label(a, b, branch.outcome));
                let same = states_equal_up_to_phase(&left, &want, TOL).map_err(e)?;
                ensure(same, || format!("swap ({a},{b},{}) mismatch", branch.outcome))?;
                checked += 1;
            }
        }
    }
    ensure(checked == 64, || format!("{checked} triples"))?;
    Ok("16 input pairs uniform, 64 swapped states match".into())
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for shared in BellLabel::ALL {
        for outcome in BellLabel::ALL {
            for phi in BasisStateSpec::ALL {
                let register = tensor(&[make_bell(shared), make_basis_state(phi)]).map_err(e)?;
                let set = register.bell_measure(2, 1).map_err(e)?;
                let p = set.probability_of(outcome);
                ensure((p - 0.25).abs() <= TOL, || format!("P({outcome}) = {p}"))?;
                let branch = set.iter().find(|b| b.outcome == outcome).ok_or("missing branch")?;
                let received = branch.state.factor(&[0]).map_err(e)?;
                let fixed = received
                    .apply_pauli(0, teleport_correction(shared, outcome).inverse())
                    .map_err(e)?;
                let f = fixed.fidelity(&make_basis_state(phi)).map_err(e)?;
                worst = worst.max((f - 1.0).abs());
            }
        }
    }
    ensure(worst <= TOL, || format!("fidelity error {worst:e}"))?;
    Ok(format!("64 combinations, max fidelity error {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let mut runs = 0;
    for mode in [ValidationMode::R1, ValidationMode::R2] {
        for a in BellLabel::ALL {
            for b in BellLabel::ALL {
                for phi in [BasisStateSpec::Z0, BasisStateSpec::Z1] {
                    let fixed = PhiPolicy::Fixed(phi);
                    let single = SchemeParams::single().with_phi(fixed).with_bob_label(LabelPolicy::Fixed(b));
                    let mut acc = 0.0;
                    for t in run_single(&single, a, RunMode::Enumerate).map_err(e)? {
                        if validate_single(&t, a, mode).map_err(e)?.is_accept() {
                            acc += t.probability;
                        }
                    }
                    ensure((acc - 1.0).abs() <= TOL, || format!("single {a},{b},{phi:?},{mode}: {acc}"))?;

                    let multi = SchemeParams::multi().with_phi(fixed);
                    let mut acc = 0.0;
                    for t in run_multiparty(&multi, a, b, RunMode::Enumerate).map_err(e)? {
                        let v = validate_multiparty(&t, a, (b, t.teleport_outcome), mode).map_err(e)?;
                        if v.is_accept() {
                            acc += t.probability;
                        }
                    }
                    ensure((acc - 1.0).abs() <= TOL, || format!("multi {a},{b},{phi:?},{mode}: {acc}"))?;
                    runs += 2;
                }
                for phi in [
                    PhiPolicy::UniformAll,
                    PhiPolicy::Fixed(BasisStateSpec::X0),
                    PhiPolicy::Fixed(BasisStateSpec::X1),
                ] {
                    let params = SchemeParams::string(2).with_phi(phi).with_bob_label(LabelPolicy::Fixed(b));
                    let run = run_string(&params, &[a, a ^ b], RunMode::Enumerate).map_err(e)?;
                    let acc = run.acceptance_probability(&[a, a ^ b], mode).map_err(e)?;
                    ensure((acc - 1.0).abs() <= TOL, || format!("string {a},{b},{phi:?},{mode}: {acc}"))?;
                    for (t0, t1) in run.per_pair[0].iter().zip(&run.per_pair[1]) {
                        let bundle = StringBundle {
                            pairs: vec![t0.clone(), t1.clone()],
                        };
                        ensure(validate_string(&bundle, &[a, a ^ b], mode).map_err(e)?.is_accept(), || {
                            "string bundle rejected".into()
                        })?;
                    }
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{runs} honest enumerations, acceptance 1 in every one"))
}

fn relabel_or_honest(delta: BellLabel) -> Strategy {
    if delta.is_identity() {
        Strategy::honest()
    } else {
        Strategy::relabel(delta).unwrap()
    }
}

fn criterion_5() -> Outcome {
    let r2 = ValidationMode::R2;
    let uniform = SchemeParams::string(1);
    let mut got = Vec::new();
    for (delta, want) in BellLabel::ALL.iter().zip([1.0, 0.5, 0.5, 0.0]) {
        let s = relabel_or_honest(*delta);
        let p = acceptance_figures(&uniform, &s, r2).map_err(e)?.average;
        let alg = label_algebra_acceptance(&uniform, &s, r2).map_err(e)?.average;
        ensure((p - want).abs() <= TOL && (alg - want).abs() <= TOL, || {
            format!("uniform φ, δ={delta}: {p} / {alg}, want {want}")
        })?;
        got.push(format!("{p:.6}"));
    }
    for phi in [BasisStateSpec::Z0, BasisStateSpec::Z1] {
        let params = SchemeParams::single().with_phi(PhiPolicy::Fixed(phi));
        let benign = acceptance_figures(&params, &Strategy::relabel(BellLabel::ZETA_MINUS).unwrap(), r2)
            .map_err(e)?;
        let flip = acceptance_figures(&params, &Strategy::relabel(BellLabel::ETA_PLUS).unwrap(), r2).map_err(e)?;
        ensure(
            (benign.average - 1.0).abs() <= TOL && (benign.worst_case - 1.0).abs() <= TOL,
            || format!("{phi:?} δ=10 acceptance {}", benign.average),
        )?;
        ensure(flip.average.abs() <= TOL && flip.worst_case.abs() <= TOL, || {
            format!("{phi:?} δ=01 acceptance {}", flip.average)
        })?;
    }
    Ok(format!("uniform φ: [{}]; fixed Z φ: δ=10 → 1, δ=01 → 0", got.join(", ")))
}

fn criterion_6() -> Outcome {
    let n = 20;
    let exact = string_cheat_acceptance(n, &[BellLabel::ZETA_MINUS; 20], ValidationMode::R2).map_err(e)?;
    let want = 0.5f64.powi(20);
    ensure((exact - want).abs() <= TOL * want, || format!("exact {exact:e}, want {want:e}"))?;
    let config = RunConfig {
        scheme: Scheme::String,
        n_pairs: n,
        strategy: "relabel:10".into(),
        trials: 10_000_000,
        seed: 20,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let summary = monte_carlo(&config).map_err(e)?;
    let stat = summary.stat("verdict", "accept").ok_or("no verdict stat")?;
    ensure((stat.exact - want).abs() <= TOL * want, || format!("reference {}", stat.exact))?;
    let z = stat.z_score.ok_or("zero standard error")?;
    ensure(z.abs() <= 5.0, || format!("{} accepts in 1e7, z = {z:.2}", stat.count))?;
    Ok(format!(
        "exact {exact:.6e}; Monte Carlo {} / 1e7 accepted, z = {z:.2} ({:.1} s)",
        stat.count,
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_7() -> Outcome {
    let schemes = [
        SchemeParams::single(),
        SchemeParams::single().with_phi(PhiPolicy::Fixed(BasisStateSpec::Z1)),
        SchemeParams::multi(),
        SchemeParams::multi().with_bob_label(LabelPolicy::Fixed(BellLabel::ETA_MINUS)),
        SchemeParams::string(1),
    ];
    let mut worst: f64 = 0.0;
    for params in &schemes {
        for h in [ViewHorizon::Confirmation, ViewHorizon::Storage] {
            worst = worst.max(concealment_tv(params, h).map_err(e)?);
        }
        worst = worst.max(label_algebra_concealment_tv(params).map_err(e)?);
    }
    ensure(worst <= TOL, || format!("max TV {worst:e}"))?;
    let mut guesses = 0;
    for s in default_strategy_menu().into_iter().filter(|s| s.role() == Role::Receiver) {
        for params in &schemes {
            let g = extraction_guess_probability(&s, params).map_err(e)?;
            ensure((g - 0.5).abs() <= TOL, || format!("{s}: guess {g}"))?;
            guesses += 1;
        }
    }
    Ok(format!("max TV {worst:.1e}; {guesses} extraction figures equal 0.5"))
}

fn criterion_8() -> Outcome {
    let r1 = ValidationMode::R1;
    let params = [
        SchemeParams::single(),
        SchemeParams::single().with_phi(PhiPolicy::Fixed(BasisStateSpec::Z0)),
        SchemeParams::multi(),
        SchemeParams::string(1),
        SchemeParams::string(3),
    ];
    let mut rows = 0;
    for p in &params {
        for delta in &BellLabel::ALL[1..] {
            let s = Strategy::relabel(*delta).unwrap();
            let sv = acceptance_figures(p, &s, r1).map_err(e)?;
            let la = label_algebra_acceptance(p, &s, r1).map_err(e)?;
            ensure((sv.average - 1.0).abs() <= TOL && (sv.worst_case - 1.0).abs() <= TOL, || {
                format!("{} δ={delta}: {}", p.scheme, sv.average)
            })?;
            ensure((sv.average - la.average).abs() <= TOL, || format!("oracles differ for δ={delta}"))?;
            rows += 1;
        }
    }
    let report = build_report(&params[1], &default_strategy_menu(), r1).map_err(e)?;
    let flagged: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.agrees == Some(false))
        .map(|r| r.strategy.to_string())
        .collect();
    ensure(report.rows.iter().all(|r| r.oracles_agree), || "report oracle mismatch".into())?;
    ensure(!flagged.is_empty(), || "no disagreement flagged".into())?;
    Ok(format!("{rows} relabel rows accepted with probability 1; report flags {}", flagged.join(", ")))
}

fn criterion_9() -> Outcome {
    let mut audited = 0;
    for scheme in [Scheme::Single, Scheme::Multi, Scheme::String] {
        for (x, c) in [(1.0, 1.0), (3.0e5, 3.0e8), (0.25, 7.0)] {
            let topo = Topology::standard(scheme, x, c).map_err(e)?;
            let d = x / c;
            for t in [2.0 * d, 1e3 * d, 1e9 * d] {
                let schedule = standard_schedule(x, c, t, scheme).map_err(e)?;
                let report = audit(&schedule, &topo).map_err(e)?;
                ensure(report.is_valid(), || format!("{scheme} x={x} c={c} T={t}: {:?}", report.violations))?;
                audited += 1;
            }
            let base = standard_schedule(x, c, 10.0 * d, scheme).map_err(e)?;
            for k in 0..base.messages.len() {
                let m = &base.messages[k];
                let dist = (topo.position(&m.sender).map_err(e)? - topo.position(&m.receiver).map_err(e)?).abs();
                if dist == 0.0 {
                    continue;
                }
                let mut bad = base.clone();
                bad.messages[k].arrival_time = m.send_time + 0.99 * dist / c;
                let report = audit(&bad, &topo).map_err(e)?;
                let hit = report
                    .violations
                    .iter()
                    .any(|v| matches!(v, Violation::SuperluminalMessage { index, .. } if *index == k));
                ensure(hit, || format!("{scheme}: early arrival of {} not flagged", m.payload_ref))?;
                audited += 1;
            }
            let early = 1.5 * d;
            ensure(standard_schedule(x, c, early, scheme).is_err(), || "T < 2x/c accepted".into())?;
            let report = audit(&unchecked_schedule(x, c, early, scheme).map_err(e)?, &topo).map_err(e)?;
            ensure(
                report
                    .violations
                    .iter()
                    .any(|v| matches!(v, Violation::RevealBeforeStore { .. })),
                || "T < 2x/c not flagged".into(),
            )?;
        }
    }
    Ok(format!("{audited} audits: standard schedules valid, every early arrival flagged, T < 2x/c rejected"))
}

fn criterion_10() -> Outcome {
    let params = SchemeParams::single()
        .with_phi(PhiPolicy::Fixed(BasisStateSpec::Z0))
        .with_bob_label(LabelPolicy::Fixed(BellLabel::ZETA_PLUS));
    let reps = 100;
    let start = Instant::now();
    for _ in 0..reps {
        let ts = run_single(&params, BellLabel::ETA_MINUS, RunMode::Enumerate).map_err(e)?;
        ensure(ts.len() == 16, || "branch count".into())?;
    }
    let per_enum = start.elapsed() / reps;

    let config = RunConfig {
        trials: 1_000_000,
        seed: 10,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let summary = monte_carlo(&config).map_err(e)?;
    let sampling = start.elapsed();
    ensure(summary.all_agree, || summary.render())?;

    let start = Instant::now();
    for mode in [ValidationMode::R1, ValidationMode::R2] {
        for p in [
            SchemeParams::single().with_phi(PhiPolicy::Fixed(BasisStateSpec::Z0)),
            SchemeParams::single(),
            SchemeParams::string(1),
        ] {
            build_report(&p, &default_strategy_menu(), mode).map_err(e)?;
        }
    }
    let scan = start.elapsed();

    ensure(per_enum < Duration::from_millis(10), || format!("enumeration {per_enum:?}"))?;
    ensure(sampling < Duration::from_secs(10), || format!("1e6 trials {sampling:?}"))?;
    ensure(scan < Duration::from_secs(1), || format!("attack-scan {scan:?}"))?;
    Ok(format!(
        "enumeration {:.3} ms, 1e6 trials {:.2} s (all |z| ≤ 5), attack-scan {:.0} ms",
        per_enum.as_secs_f64() * 1e3,
        sampling.as_secs_f64(),
        scan.as_secs_f64() * 1e3
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Bell construction", criterion_1),
        ("swapping uniformity", criterion_2),
        ("teleportation table", criterion_3),
        ("honest completeness", criterion_4),
        ("binding table (R2)", criterion_5),
        ("string scaling", criterion_6),
        ("concealment", criterion_7),
        ("R1 finding", criterion_8),
        ("causality audit", criterion_9),
        ("performance", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
