mod common;

use std::sync::Arc;

use common::{clamp_atoms, formula, kb_text, names, oracle_models, prop_universe, F};
use proptest::prelude::*;
use semanc_core::fidelity::{
    distance_interpretations, fid_fuzzy_interpretations, fid_prob, fidelity_sets, hausdorff, BaseDistance,
    FidelityConfig, SatAgg,
};
use semanc_core::logic::{parse_kb, Interpretation, InterpretationSet, KbKind, TNorm};

fn graded(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, n)
}

fn nonempty_set(n: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..1u64 << n, 1..6)
}

fn oracle_wmc(p: &[f64], models: &[u64]) -> f64 {
    models
        .iter()
        .map(|&m| (0..p.len()).map(|i| if m >> i & 1 == 1 { p[i] } else { 1.0 - p[i] }).product::<f64>())
        .sum()
}

proptest! {
    #[test]
    fn atom_distance_is_a_metric(n in 1usize..=4, a in graded(4), b in graded(4), c in graded(4)) {
        let u = prop_universe(n);
        let mk = |v: &[f64]| Interpretation::new(u.clone(), v[..n].to_vec()).unwrap();
        let (a, b, c) = (mk(&a), mk(&b), mk(&c));
        let d = |x: &Interpretation<f64>, y: &Interpretation<f64>| distance_interpretations(x, y).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        prop_assert!((0.0..=1.0).contains(&d(&a, &b)));
        if a.values() != b.values() {
            prop_assert!(d(&a, &b) > 0.0);
        }
    }

    #[test]
    fn hausdorff_distance_is_a_metric(n in 1usize..=4, a in nonempty_set(4), b in nonempty_set(4), c in nonempty_set(4), discrete in any::<bool>()) {
        let u = prop_universe(n);
        let mask = (1u64 << n) - 1;
        let mk = |v: &[u64]| InterpretationSet::from_masks(u.clone(), v.iter().map(|m| m & mask)).unwrap();
        let (a, b, c) = (mk(&a), mk(&b), mk(&c));
        let base = if discrete { BaseDistance::Discrete } else { BaseDistance::Eq1Fraction };
        let d = |x: &InterpretationSet, y: &InterpretationSet| hausdorff(x, y, base).unwrap().0;
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        prop_assert_eq!(d(&a, &b) == 0.0, a.set_eq(&b).unwrap());
    }

    #[test]
    fn hausdorff_fidelity_is_one_exactly_on_equal_model_sets(
        n in 1usize..=4,
        m_n in nonempty_set(4),
        fs in prop::collection::vec(formula(4, 3), 1..3),
        discrete in any::<bool>(),
    ) {
        let fs: Vec<F> = fs.into_iter().map(|f| clamp_atoms(f, n)).collect();
        let models = oracle_models(n, &fs);
        prop_assume!(!models.is_empty());
        let u = prop_universe(n);
        let mask = (1u64 << n) - 1;
        let set = InterpretationSet::from_masks(u.clone(), m_n.iter().map(|m| m & mask)).unwrap();
        let l = parse_kb(&kb_text(n, &fs), KbKind::Prop).unwrap();
        let cfg = FidelityConfig {
            base: if discrete { BaseDistance::Discrete } else { BaseDistance::Eq1Fraction },
            ..FidelityConfig::default()
        };
        let r = fidelity_sets(&set, &l, &cfg).unwrap();
        let got = set.masks().unwrap();
        prop_assert_eq!(r.value == 1.0, got == models);
        prop_assert!((0.0..=1.0).contains(&r.value));
        prop_assert_eq!(r.neural_model, Some(got.iter().all(|m| models.contains(m))));
    }

    #[test]
    fn probability_fidelity_is_the_model_weight(n in 1usize..=6, p in graded(6), fs in prop::collection::vec(formula(6, 3), 1..3), g in formula(6, 3)) {
        let fs: Vec<F> = fs.into_iter().map(|f| clamp_atoms(f, n)).collect();
        let probs = Interpretation::new(prop_universe(n), p[..n].to_vec()).unwrap();
        let l = parse_kb(&kb_text(n, &fs), KbKind::Prop).unwrap();
        let want = oracle_wmc(&p[..n], &oracle_models(n, &fs));
        let got = fid_prob(&probs, &l).unwrap().value;
        prop_assert!((got - want).abs() <= 1e-12, "{} vs {}", got, want);
        let mut stronger = fs.clone();
        stronger.push(clamp_atoms(g, n));
        let l2 = parse_kb(&kb_text(n, &stronger), KbKind::Prop).unwrap();
        prop_assert!(fid_prob(&probs, &l2).unwrap().value <= got + 1e-12);
    }

    #[test]
    fn fuzzy_fidelity_is_one_iff_every_interval_holds(
        ms in prop::collection::vec(prop::collection::vec(0i32..=10, 3), 1..4),
        items in prop::collection::vec((formula(3, 3), 0usize..12, 0usize..12), 1..4),
    ) {
        // Interval ends sit between grid points (or at 0 and 1), so no
        // value lands on a boundary.
        let ends = [0.0, 0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95, 1.0];
        let mut text = format!("atoms {};\n", names(3).join(" "));
        let mut bounds = Vec::new();
        for (f, i, j) in &items {
            let (lo, hi) = (ends[*i.min(j)], ends[*i.max(j)]);
            text += &format!("[{lo}, {hi}]: {}.\n", f.text());
            bounds.push((lo, hi));
        }
        let l = parse_kb(&text, KbKind::Fuzzy).unwrap();
        let u = prop_universe(3);
        let interps: Vec<Interpretation<f64>> = ms
            .iter()
            .map(|v| Interpretation::new(u.clone(), v.iter().map(|&t| t as f64 / 10.0).collect()).unwrap())
            .collect();
        let cfg = FidelityConfig { tnorm: TNorm::Min, sat_agg: SatAgg::Min, ..FidelityConfig::default() };
        let r = fid_fuzzy_interpretations(&interps, &l, &cfg).unwrap();
        let mut want = 1.0f64;
        for v in &ms {
            for ((f, _, _), &(lo, hi)) in items.iter().zip(&bounds) {
                let t = f.eval_tenths(v) as f64 / 10.0;
                want = want.min(1.0 - (lo - t).max(t - hi).max(0.0));
            }
        }
        prop_assert!((r.value - want).abs() <= 1e-9, "{} vs {}", r.value, want);
        prop_assert_eq!(r.value == 1.0, want == 1.0);
    }
}

#[test]
fn universes_must_match() {
    let a = InterpretationSet::from_masks(prop_universe(2), [0]).unwrap();
    let b = InterpretationSet::from_masks(Arc::new(semanc_core::logic::Universe::propositional(&["x", "y"])), [0]).unwrap();
    assert!(hausdorff(&a, &b, BaseDistance::Discrete).is_err());
}
