use proptest::prelude::*;
use rqbc_core::adversary::{
    acceptance_figures, build_report, default_strategy_menu, detection_probability, label_algebra_acceptance,
    string_cheat_acceptance, Strategy as Attack,
};
use rqbc_core::protocol::{LabelPolicy, PhiPolicy};
use rqbc_core::quantum::{BasisStateSpec, BellLabel};
use rqbc_core::{SchemeParams, ValidationMode};

fn label() -> impl Strategy<Value = BellLabel> {
    (0usize..4).prop_map(BellLabel::from_index)
}

fn params() -> impl Strategy<Value = SchemeParams> {
    prop_oneof![
        Just(SchemeParams::single()),
        Just(SchemeParams::single().with_phi(PhiPolicy::Fixed(BasisStateSpec::Z1))),
        Just(SchemeParams::single().with_bob_label(LabelPolicy::Fixed(BellLabel::ETA_PLUS))),
        Just(SchemeParams::multi()),
        (1usize..4).prop_map(SchemeParams::string),
    ]
}

fn mode() -> impl Strategy<Value = ValidationMode> {
    prop_oneof![Just(ValidationMode::R1), Just(ValidationMode::R2)]
}

fn committer() -> impl Strategy<Value = Attack> {
    prop_oneof![
        Just(Attack::honest()),
        (1usize..4).prop_map(|k| Attack::relabel(BellLabel::from_index(k)).unwrap()),
        label().prop_map(Attack::delayed_rechoice),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracles_agree(p in params(), s in committer(), m in mode()) {
        let sv = acceptance_figures(&p, &s, m).unwrap();
        let la = label_algebra_acceptance(&p, &s, m).unwrap();
        prop_assert!((sv.average - la.average).abs() < 1e-12);
        prop_assert!((sv.worst_case - la.worst_case).abs() < 1e-12);
        for k in 0..4 {
            prop_assert!((sv.per_label[k] - la.per_label[k]).abs() < 1e-12);
        }
        let d = detection_probability(&p, &s, m).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d + sv.average, 1.0);
    }

    #[test]
    fn string_product(deltas in proptest::collection::vec(label(), 1..6)) {
        let p = string_cheat_acceptance(deltas.len(), &deltas, ValidationMode::R2).unwrap();
        let per = |d: BellLabel| match (d.i(), d.j()) {
            (0, 0) => 1.0,
            (1, 1) => 0.0,
            _ => 0.5,
        };
        let want: f64 = deltas.iter().map(|&d| per(d)).product();
        prop_assert!((p - want).abs() < 1e-12);
    }
}

#[test]
fn report_examples() {
    let z0 = SchemeParams::single().with_phi(PhiPolicy::Fixed(BasisStateSpec::Z0));
    let report = build_report(&z0, &default_strategy_menu(), ValidationMode::R2).unwrap();
    let row = report
        .rows
        .iter()
        .find(|r| r.strategy == Attack::relabel(BellLabel::ETA_PLUS).unwrap())
        .unwrap();
    assert_eq!(row.detection_probability, 1.0);
    assert!(report.all_agree());
    assert!(report.concealment_tv.abs() < 1e-12);
    assert!((report.extraction_guess_probability - 0.5).abs() < 1e-12);

    let string = build_report(&SchemeParams::string(1), &default_strategy_menu(), ValidationMode::R2).unwrap();
    let flagged: Vec<String> = string
        .rows
        .iter()
        .filter(|r| r.agrees == Some(false))
        .map(|r| r.strategy.to_string())
        .collect();
    assert_eq!(flagged, vec!["relabel:11"]);
}
