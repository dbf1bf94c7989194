mod common;

use std::collections::BTreeSet;

use common::{clamp_atoms, formula, kb_text, oracle_models, prop_universe, F};
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use semanc_core::logic::{models_of, parse_kb, Interpretation, KbKind, KnowledgeBase};
use semanc_core::soft::TrainConfig;
use semanc_core::theory::{
    complexity_k, empirical_model_dist, property1_check, synthetic_model_dist, total_variation, ClassificationTask,
    ComplexityConfig, EmpiricalConfig, WeightFn,
};

fn kb(n: usize, fs: &[F]) -> KnowledgeBase {
    parse_kb(&kb_text(n, fs), KbKind::Prop).unwrap()
}

fn consistent(n: usize, raw: Vec<F>) -> Option<Vec<F>> {
    let fs: Vec<F> = raw.into_iter().map(|f| clamp_atoms(f, n)).collect();
    (!oracle_models(n, &fs).is_empty()).then_some(fs)
}

fn k_of(n: usize, mask: u64) -> (usize, semanc_core::logic::Formula, bool) {
    let m = Interpretation::<f64>::from_mask(prop_universe(n), mask);
    let c = complexity_k(&m, &ComplexityConfig::default()).unwrap();
    (c.k, c.witness, c.exact)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn the_witness_has_exactly_one_model(n in 1usize..=4, mask in any::<u64>()) {
        let mask = mask & ((1 << n) - 1);
        let (k, witness, exact) = k_of(n, mask);
        prop_assert!(exact);
        prop_assert_eq!(witness.symbol_cost(), k);
        prop_assert_eq!(models_of(&witness, &prop_universe(n)).unwrap().masks().unwrap(), vec![mask]);
        let negs = n - mask.count_ones() as usize;
        prop_assert!(k <= 2 * n - 1 + negs);
    }

    #[test]
    fn complexity_ignores_atom_names(
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
        mask in 0u64..8,
    ) {
        let moved = (0..3).fold(0u64, |acc, i| acc | (mask >> i & 1) << perm[i]);
        prop_assert_eq!(k_of(3, mask).0, k_of(3, moved).0);
    }

    #[test]
    fn synthetic_distributions_are_normalized_and_prefer_simple_models(
        n in 1usize..=4,
        fs in prop::collection::vec(formula(4, 3), 1..3),
        exp in any::<bool>(),
    ) {
        let Some(fs) = consistent(n, fs) else { return Ok(()) };
        let l = kb(n, &fs);
        let u = prop_universe(n);
        let cfg = ComplexityConfig { f: if exp { WeightFn::Exp } else { WeightFn::Pow2 }, ..ComplexityConfig::default() };
        let d = synthetic_model_dist::<f64>(&l, &u, &cfg).unwrap();
        prop_assert!((d.total() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(&d.support, &oracle_models(n, &fs));
        let ks = d.ks.clone().unwrap();
        for i in 0..ks.len() {
            for j in 0..ks.len() {
                if ks[i] < ks[j] {
                    prop_assert!(d.probs[i] > d.probs[j]);
                }
            }
        }
        let exact = synthetic_model_dist::<BigRational>(&l, &u, &ComplexityConfig::default()).unwrap();
        prop_assert!(exact.total().is_one());
    }

    #[test]
    fn total_variation_is_a_bounded_metric(
        n in 1usize..=4,
        a in prop::collection::vec(formula(4, 3), 1..3),
        b in prop::collection::vec(formula(4, 3), 1..3),
    ) {
        let (Some(a), Some(b)) = (consistent(n, a), consistent(n, b)) else { return Ok(()) };
        let u = prop_universe(n);
        let cfg = ComplexityConfig::default();
        let p = synthetic_model_dist::<f64>(&kb(n, &a), &u, &cfg).unwrap();
        let q = synthetic_model_dist::<f64>(&kb(n, &b), &u, &cfg).unwrap();
        let tv = total_variation(&p, &q);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&tv));
        prop_assert_eq!(tv, total_variation(&q, &p));
        prop_assert_eq!(total_variation(&p, &p), 0.0);
        let disjoint = p.support.iter().all(|m| !q.support.contains(m));
        prop_assert_eq!((tv - 1.0).abs() <= 1e-12, disjoint);
    }

    #[test]
    fn conditioning_matches_the_joint_prior(
        n in 1usize..=4,
        a in prop::collection::vec(formula(4, 3), 1..3),
        b in prop::collection::vec(formula(4, 3), 1..2),
    ) {
        let Some(a) = consistent(n, a) else { return Ok(()) };
        let b: Vec<F> = b.into_iter().map(|f| clamp_atoms(f, n)).collect();
        let mut joint = a.clone();
        joint.extend(b.iter().cloned());
        prop_assume!(!oracle_models(n, &joint).is_empty());
        let u = prop_universe(n);
        let cfg = ComplexityConfig::default();
        let base = synthetic_model_dist::<BigRational>(&kb(n, &a), &u, &cfg).unwrap();
        let want = synthetic_model_dist::<BigRational>(&kb(n, &joint), &u, &cfg).unwrap();
        let r = property1_check(&base, &kb(n, &b), None, Some(&want)).unwrap();
        prop_assert_eq!(&r.conditional.support, &want.support);
        prop_assert_eq!(&r.conditional.probs, &want.probs);
        prop_assert_eq!(r.tv, Some(0.0));
    }
}

fn small_task() -> ClassificationTask {
    let inputs = vec![vec![0.0], vec![1.0], vec![2.0]];
    let truth = vec![BTreeSet::from([0, 1]), BTreeSet::from([1]), BTreeSet::from([0, 1])];
    ClassificationTask::new(inputs, vec!["cat".into(), "animal".into()], truth, vec![0, 1], vec![2]).unwrap()
}

#[test]
fn empirical_runs_do_not_depend_on_the_worker_count() {
    let task = small_task();
    let cfg = EmpiricalConfig {
        train: TrainConfig {
            epochs: 40,
            lambda_kb: 0.0,
            seed: 9,
            init: Some(2.0),
            ..TrainConfig::default()
        },
        trials: 12,
        hidden: 2,
        closed_world: true,
    };
    let extra = KnowledgeBase::default();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| empirical_model_dist(&task, &extra, &cfg).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.support, four.support);
    assert_eq!(one.counts, four.counts);
    assert_eq!(one.counts.iter().flatten().sum::<u64>(), 12);
}
