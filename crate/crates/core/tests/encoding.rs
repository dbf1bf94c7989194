mod common;

use std::sync::Arc;

use common::{formula, F};
use proptest::prelude::*;
use semanc_core::encoding::{aggregate, check_semantic_encoding, compute_m_n, Agg, EncodingSpec};
use semanc_core::logic::{entails, models_of, parse_kb, Cube, InterpretationSet, KbKind, Universe};
use semanc_core::network::{Activation, NetworkBuilder, Role, UpdateMode};
use semanc_core::programs::{compile_cilp, LogicProgram};
use semanc_core::Network64;

fn fixture(name: &str) -> String {
    let p = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn sets(n: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(0..1u64 << n, 0..6), 0..5)
}

fn as_sets(u: &Arc<Universe>, raw: &[Vec<u64>]) -> Vec<InterpretationSet> {
    raw.iter()
        .map(|ms| InterpretationSet::from_masks(u.clone(), ms.iter().copied()).unwrap())
        .collect()
}

/// Renames `p0, p1` to the atoms `A, B` of the fixture network.
fn ab_text(f: &F) -> String {
    format!("atoms A B;\n{}.\n", f.text().replace("p0", "A").replace("p1", "B"))
}

proptest! {
    #[test]
    fn union_grows_and_intersection_shrinks_with_the_family(
        small in sets(3),
        extra in sets(3),
    ) {
        let u = common::prop_universe(3);
        let s = as_sets(&u, &small);
        let mut t = s.clone();
        t.extend(as_sets(&u, &extra));
        let union = |f: &[InterpretationSet]| aggregate(Agg::Union, &u, f).unwrap();
        let inter = |f: &[InterpretationSet]| aggregate(Agg::Intersection, &u, f).unwrap();
        prop_assert!(union(&s).is_subset(&union(&t)).unwrap());
        prop_assert!(inter(&t).is_subset(&inter(&s)).unwrap());
        let want_union: Vec<u64> = (0..8).filter(|m| small.iter().chain(&extra).any(|ms| ms.contains(m))).collect();
        prop_assert_eq!(union(&t).masks().unwrap(), want_union);
        let want_inter: Vec<u64> = (0..8).filter(|m| small.iter().chain(&extra).all(|ms| ms.contains(m))).collect();
        prop_assert_eq!(inter(&t).masks().unwrap(), want_inter);
    }

    #[test]
    fn stable_neural_models_of_compiled_programs_are_fixed_points(
        n in 1usize..=5,
        rules in prop::collection::vec((0usize..5, prop::collection::vec((0usize..5, any::<bool>()), 0..=3)), 1..=8),
    ) {
        let text: String = rules
            .iter()
            .map(|(h, body)| {
                let lits: Vec<String> = body.iter().map(|&(a, pos)| format!("{}p{}", if pos { "" } else { "~" }, a % n)).collect();
                if lits.is_empty() {
                    format!("p{}.\n", h % n)
                } else {
                    format!("p{} :- {}.\n", h % n, lits.join(", "))
                }
            })
            .collect();
        let p = LogicProgram::parse(&text).unwrap();
        let net = compile_cilp::<f64>(&p);
        let mut spec = EncodingSpec::nat_from_roles(&net, Agg::Union).unwrap();
        spec.stable_only = true;
        let m_n = compute_m_n(&net, &spec).unwrap().m_n.reindex(p.universe()).unwrap();
        let u = p.universe();
        let tp = |m: u64| -> u64 {
            p.rules()
                .iter()
                .filter(|r| r.body.iter().all(|l| (m >> l.atom & 1 == 1) == l.positive))
                .fold(0, |acc, r| acc | 1 << r.head)
        };
        for m in m_n.masks().unwrap() {
            prop_assert_eq!(tp(m), m, "{} in {}", m, text);
        }
        prop_assert!(u.len() <= n);
    }

    #[test]
    fn semantic_encodings_decide_entailment(q in formula(2, 4)) {
        let net = Network64::from_json(&fixture("two_cycle.net.json")).unwrap();
        let l = parse_kb(&fixture("two_cycle.l"), KbKind::Prop).unwrap();
        let spec = EncodingSpec::nat_from_roles(&net, Agg::Union).unwrap();
        prop_assert!(check_semantic_encoding(&net, &spec, &l).unwrap().is_semantic_encoding);
        let q = parse_kb(&ab_text(&q), KbKind::Prop).unwrap();
        let u = spec.universe().clone();
        let m_n = compute_m_n(&net, &spec).unwrap().m_n;
        let in_q = models_of(&q.as_single_formula(), &u).unwrap();
        prop_assert_eq!(entails(&l, &q, &u).unwrap(), m_n.is_subset(&in_q).unwrap());
    }
}

fn two_atom_table(a: Vec<Cube>, b: Vec<Cube>) -> EncodingSpec {
    let mut nb = NetworkBuilder::new();
    nb.neuron(0.0, Activation::StepGeq0, Role::atom("A"));
    nb.neuron(0.0, Activation::StepGeq0, Role::atom("B"));
    let net = nb.build(UpdateMode::Synchronous).unwrap();
    let u = Universe::propositional(&["A", "B"]);
    EncodingSpec::table(&net, u, vec![0, 1], vec![(vec![0.0, 0.0], a), (vec![1.0, 1.0], b)], Agg::Union).unwrap()
}

#[test]
fn constant_tables_are_flagged() {
    let both = vec![Cube::new().fix(0, true)];
    assert_eq!(two_atom_table(both.clone(), both).warnings().len(), 1);
    let spec = two_atom_table(vec![Cube::new().fix(0, false)], vec![Cube::new().fix(0, true)]);
    assert!(spec.warnings().is_empty());
}
