//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the verdict lines are always shown.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semanc_core::encoding::{
    check_neural_model, check_semantic_encoding, compute_m_n, softmax_kb, Agg, EncodingMap, EncodingSpec,
};
use semanc_core::fidelity::fid_prob;
use semanc_core::logic::{
    entails, enumerate_models, evaluate, models_of, parse_formula, parse_kb, Interpretation, KbKind, KnowledgeBase,
    Signature, TNorm, Universe, VariableAssignment,
};
use semanc_core::network::{
    compute_x_inf, hopfield_energy, is_async_stable, is_local_minimum, Activation, Network, NetworkBuilder, Role,
    UpdateMode,
};
use semanc_core::programs::{atom_neurons, compile_cilp, tp_step, verify_tp_equivalence, LogicProgram};
use semanc_core::soft::{
    compile_loss, grad_check, output_probs, semantic_reg_loss, train_soft, CircuitConfig, LossForm, QuantMode,
    TrainConfig,
};
use semanc_core::theory::{
    complexity_k, empirical_model_dist, hierarchy_kb, property1_check, property2_ratio, synthetic_model_dist,
    task_network, total_variation, ClassificationTask, ComplexityConfig, EmpiricalConfig,
};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

type Criterion = (u32, &'static str, Duration, fn() -> Verdict);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "two-cycle limit set and semantic encoding", Duration::from_secs(1), c1_limit_set),
        (2, "T_P step and CILP equivalence", Duration::from_secs(1), c2_tp_step),
        (3, "probability fidelity 0.192 +- 1e-12", Duration::from_secs(5), c3_prob),
        (4, "t-norm axioms on a 21-point grid, violation <= 1e-12", Duration::from_secs(5), c4_tnorms),
        (5, "entailment and T_P oracle equivalence", Duration::from_secs(60), c5_oracles),
        (6, "100 gradient checks at rel tol 1e-5, h = 1e-5", Duration::from_secs(30), c6_gradients),
        (7, "softmax KB training reaches fid_prob >= 0.95", Duration::from_secs(60), c7_training),
        (8, "ratio after adding L' <= 1e-12, exact conditioning", Duration::from_secs(60), c8_properties),
        (9, "empirical conditioning, 2000 trials, TV reported", Duration::from_secs(600), c9_empirical),
        (10, "complexity oracle against exhaustive search", Duration::from_secs(60), c10_complexity),
        (11, "async-stable Hopfield states are local minima", Duration::from_secs(30), c11_hopfield),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| *f == n.to_string()) {
            continue;
        }
        let start = Instant::now();
        let v = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let in_time = took <= budget;
        let ok = v.ok && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n:>2}: {} {name} [{:.2}s / {}s] {}{}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            v.detail,
            if in_time { "" } else { " (over time budget)" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn c1_limit_set() -> Verdict {
    let net = Network::<f64>::from_json(&fixture("two_cycle.net.json")).unwrap();
    let limit = compute_x_inf(&net).unwrap();
    let states_ok = limit.states == vec![vec![0.0, 0.0], vec![1.0, 1.0]];
    let kb = parse_kb(&fixture("two_cycle.l"), KbKind::Prop).unwrap();
    let spec = EncodingSpec::nat_from_roles(&net, Agg::Union).unwrap();
    let mn = compute_m_n(&net, &spec).unwrap().m_n;
    let ml = enumerate_models(&kb, mn.universe()).unwrap();
    let eq = mn.set_eq(&ml).unwrap();
    let nm = check_neural_model(&net, &spec, &kb).unwrap().is_neural_model;
    let se = check_semantic_encoding(&net, &spec, &kb).unwrap().is_semantic_encoding;
    verdict(
        states_ok && eq && nm && se,
        format!("X_inf={:?} M_N=M_L:{eq} neural_model:{nm} semantic_encoding:{se}", limit.states),
    )
}

fn c2_tp_step() -> Verdict {
    let p = LogicProgram::parse(&fixture("small_program.l")).unwrap();
    let u = p.universe().clone();
    let m = Interpretation::from_pairs(u.clone(), &[("A", 1.0), ("B", 0.0), ("C", 0.0)]).unwrap();
    let want = Interpretation::from_pairs(u.clone(), &[("A", 1.0), ("B", 0.0), ("C", 1.0)]).unwrap();
    let s1 = tp_step(&p, &m).unwrap();
    let s2 = tp_step(&p, &s1).unwrap();
    let net = compile_cilp::<f64>(&p);
    let v = verify_tp_equivalence(&p, &net).unwrap();
    verdict(
        s1 == want && s2 == s1 && v.holds && v.states_checked == 8,
        format!("T_P(A)={s1} idempotent:{} cilp:{} over {} states", s2 == s1, v.holds, v.states_checked),
    )
}

fn c3_prob() -> Verdict {
    let u = Arc::new(Universe::propositional(&["Y1", "Y2", "Y3"]));
    let probs = Interpretation::new(u, vec![0.4, 0.6, 0.2]).unwrap();
    let kb = parse_kb(&fixture("kb.l"), KbKind::Prop).unwrap();
    let r = fid_prob(&probs, &kb).unwrap();
    let (_, p, _) = semantic_reg_loss(&probs, &kb).unwrap();
    let expected = 0.4 * 0.6 * (1.0 - 0.2);
    let ok = (r.value - 0.192).abs() <= 1e-12 && (p - r.value).abs() <= 1e-12 && (expected - 0.192f64).abs() <= 1e-12;
    verdict(ok, format!("fid_prob={} semantic_loss P={p}", r.value))
}

fn c4_tnorms() -> Verdict {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let mut worst = [0.0f64; 4];
    for t in TNorm::ALL {
        for &a in &grid {
            worst[2] = worst[2].max((t.and(a, 1.0) - a).abs());
            for &b in &grid {
                worst[0] = worst[0].max((t.and(a, b) - t.and(b, a)).abs());
                for &c in &grid {
                    worst[1] = worst[1].max((t.and(a, t.and(b, c)) - t.and(t.and(a, b), c)).abs());
                    if b <= c {
                        worst[3] = worst[3].max(t.and(a, b) - t.and(a, c));
                    }
                }
            }
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    verdict(
        max <= 1e-12,
        format!(
            "max violation comm={:.1e} assoc={:.1e} identity={:.1e} monotone={:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

/// Test-side propositional formulas with their own evaluator.
#[derive(Clone, Debug)]
enum F {
    Atom(usize),
    Not(Box<F>),
    Bin(u8, Box<F>, Box<F>),
}

impl F {
    fn random(rng: &mut ChaCha8Rng, n: usize, depth: u32) -> F {
        if depth == 0 || rng.random_bool(0.3) {
            return F::Atom(rng.random_range(0..n));
        }
        if rng.random_bool(0.2) {
            return F::Not(Box::new(F::random(rng, n, depth - 1)));
        }
        F::Bin(
            rng.random_range(0..4),
            Box::new(F::random(rng, n, depth - 1)),
            Box::new(F::random(rng, n, depth - 1)),
        )
    }

    fn eval(&self, m: u64) -> bool {
        match self {
            F::Atom(i) => m >> i & 1 == 1,
            F::Not(a) => !a.eval(m),
            F::Bin(op, a, b) => {
                let (x, y) = (a.eval(m), b.eval(m));
                match op {
                    0 => x && y,
                    1 => x || y,
                    2 => !x || y,
                    _ => x == y,
                }
            }
        }
    }

    fn text(&self) -> String {
        match self {
            F::Atom(i) => format!("p{i}"),
            F::Not(a) => format!("~({})", a.text()),
            F::Bin(op, a, b) => {
                let sym = ["&", "|", "->", "<->"][*op as usize];
                format!("({}) {sym} ({})", a.text(), b.text())
            }
        }
    }
}

fn kb_text(n: usize, fs: &[F]) -> String {
    let atoms: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut s = format!("atoms {};\n", atoms.join(" "));
    for f in fs {
        s += &format!("{}.\n", f.text());
    }
    s
}

fn c5_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    let mut entailed = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let l: Vec<F> = (0..rng.random_range(1..=3)).map(|_| F::random(&mut rng, n, 3)).collect();
        let mut q: Vec<F> = (0..rng.random_range(1..=2)).map(|_| F::random(&mut rng, n, 3)).collect();
        if rng.random_bool(0.5) {
            // Weakening one of L's sentences guarantees some positive cases.
            let i = rng.random_range(0..l.len());
            q[0] = F::Bin(1, Box::new(l[i].clone()), Box::new(q[0].clone()));
        }
        let u = Arc::new(Universe::propositional(&(0..n).map(|i| format!("p{i}")).collect::<Vec<_>>()));
        let lk = parse_kb(&kb_text(n, &l), KbKind::Prop).unwrap();
        let qk = parse_kb(&kb_text(n, &q), KbKind::Prop).unwrap();
        let got = entails(&lk, &qk, &u).unwrap();
        let want = (0..1u64 << n).all(|m| !l.iter().all(|f| f.eval(m)) || q.iter().all(|f| f.eval(m)));
        entailed += want as usize;
        mismatches += (got != want) as usize;
    }
    let mut prog_mismatch = 0;
    let mut fixed_total = 0;
    for _ in 0..50 {
        let n = rng.random_range(1..=8);
        let mut rules: Vec<(usize, Vec<(usize, bool)>)> = Vec::new();
        for _ in 0..rng.random_range(1..=2 * n) {
            let body = (0..rng.random_range(0..=3))
                .map(|_| (rng.random_range(0..n), rng.random_bool(0.7)))
                .collect();
            rules.push((rng.random_range(0..n), body));
        }
        let text: String = rules
            .iter()
            .map(|(h, body)| {
                if body.is_empty() {
                    format!("p{h}.\n")
                } else {
                    let lits: Vec<String> = body
                        .iter()
                        .map(|&(a, pos)| format!("{}p{a}", if pos { "" } else { "~" }))
                        .collect();
                    format!("p{h} :- {}.\n", lits.join(", "))
                }
            })
            .collect();
        let p = LogicProgram::parse(&text).unwrap();
        let u = p.universe().clone();
        let name_idx: Vec<usize> = (0..n).map(|i| u.index_of_name(&format!("p{i}")).unwrap_or(usize::MAX)).collect();
        let k = u.len();
        // Oracle T_P on masks over the program's universe.
        let tp = |m: u64| -> u64 {
            let bit = |a: usize| m >> name_idx[a] & 1 == 1;
            rules
                .iter()
                .filter(|(_, body)| body.iter().all(|&(a, pos)| bit(a) == pos))
                .fold(0, |acc, (h, _)| acc | 1 << name_idx[*h])
        };
        let want: BTreeSet<u64> = (0..1u64 << k).filter(|&m| tp(m) == m).collect();
        let net = compile_cilp::<f64>(&p);
        let pairs = atom_neurons(&p, &net).unwrap();
        let mut got = BTreeSet::new();
        for m in 0..1u64 << k {
            let mut x = vec![0.0; net.len()];
            for (a, &(inp, _)) in pairs.iter().enumerate() {
                x[inp] = (m >> a & 1) as f64;
            }
            let mut cand = net.update(&x).unwrap();
            for (a, &(inp, _)) in pairs.iter().enumerate() {
                cand[inp] = (m >> a & 1) as f64;
            }
            if net.update(&cand).unwrap() == cand {
                got.insert(m);
            }
        }
        fixed_total += want.len();
        prog_mismatch += (got != want) as usize;
    }
    verdict(
        mismatches == 0 && prog_mismatch == 0,
        format!(
            "entails mismatches {mismatches}/200 ({entailed} entailed), program mismatches {prog_mismatch}/50 ({fixed_total} fixed points)"
        ),
    )
}

fn random_dat_net(rng: &mut ChaCha8Rng) -> (Network<f64>, semanc_core::encoding::DatLayout) {
    let mut b = NetworkBuilder::new();
    let d = rng.random_range(1..=2);
    let xs: Vec<usize> = (0..d)
        .map(|i| b.neuron(0.0, Activation::Identity, Role::Var { arg: "x".into(), index: i }))
        .collect();
    let hidden = rng.random_range(0..=3);
    let mut feed = xs.clone();
    if hidden > 0 {
        let hs: Vec<usize> = (0..hidden)
            .map(|_| {
                let act = [Activation::Sigmoid, Activation::Identity, Activation::Relu][rng.random_range(0..3)];
                b.neuron(0.0, act, Role::Hidden)
            })
            .collect();
        for &h in &hs {
            for &x in &xs {
                b.edge(x, h, 0.0);
            }
        }
        feed = hs;
    }
    for name in ["P", "Q"] {
        let o = b.neuron(
            0.0,
            Activation::Sigmoid,
            Role::Pred {
                name: name.into(),
                args: vec!["x".into()],
            },
        );
        for &h in &feed {
            b.edge(h, o, 0.0);
        }
    }
    let net = b.build(UpdateMode::Feedforward).unwrap();
    let params: Vec<f64> = (0..net.param_count()).map(|_| rng.random_range(-2.0..2.0)).collect();
    let net = net.with_params(&params).unwrap();
    let domain: IndexMap<String, Vec<f64>> = ["a", "b", "c"]
        .iter()
        .map(|e| (e.to_string(), (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()))
        .collect();
    let inputs = domain.values().cloned().collect();
    let spec = EncodingSpec::dat(&net, &["x"], &["P", "Q"], Some(domain), inputs, Agg::Intersection).unwrap();
    match spec.map {
        EncodingMap::Dat(l) => (net, l),
        _ => unreachable!(),
    }
}

fn random_fol(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        let p = ["P", "Q"][rng.random_range(0..2)];
        let t = if rng.random_bool(0.8) {
            vars[rng.random_range(0..vars.len())].to_string()
        } else {
            ["a", "b", "c"][rng.random_range(0..3)].to_string()
        };
        return format!("{p}({t})");
    }
    match rng.random_range(0..7) {
        0 => format!("~({})", random_fol(rng, vars, depth - 1)),
        5 | 6 if vars.len() < 2 => {
            let q = if rng.random_bool(0.5) { "forall" } else { "exists" };
            let mut inner = vars.to_vec();
            inner.push("y");
            format!("{q} y. ({})", random_fol(rng, &inner, depth - 1))
        }
        k => {
            let sym = ["&", "|", "->", "<->", "&", "|", "->"][k % 7];
            format!(
                "({}) {sym} ({})",
                random_fol(rng, vars, depth - 1),
                random_fol(rng, vars, depth - 1)
            )
        }
    }
}

fn fol_sig() -> Signature {
    let mut s = Signature {
        domain: vec!["a".into(), "b".into(), "c".into()],
        ..Signature::default()
    };
    s.predicates.insert("P".into(), 1);
    s.predicates.insert("Q".into(), 1);
    s
}

fn c6_gradients() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sig = fol_sig();
    let batch: Vec<VariableAssignment> = ["a", "b", "c"].iter().map(|e| VariableAssignment::new().with("x", e)).collect();
    let (mut checked, mut excluded, mut failed, mut worst) = (0, 0, 0, 0.0f64);
    while checked < 100 {
        let (net, layout) = random_dat_net(&mut rng);
        let text = format!("forall x. ({})", random_fol(&mut rng, &["x"], 3));
        let f = parse_formula(&text, &sig).unwrap();
        let cfg = CircuitConfig {
            tnorm: TNorm::ALL[rng.random_range(0..3)],
            quant: if rng.random_bool(0.8) {
                QuantMode::Softmin {
                    temperature: rng.random_range(0.2..1.0),
                }
            } else {
                QuantMode::HardMin
            },
            loss: if rng.random_bool(0.5) { LossForm::NegLog } else { LossForm::OneMinus },
        };
        let c = compile_loss(&f, &batch, &net, &layout, &cfg).unwrap();
        let g = grad_check(&c, &net, 1e-5, 1e-5);
        if g.nondifferentiable {
            excluded += 1;
            continue;
        }
        checked += 1;
        worst = worst.max(g.max_rel_err);
        failed += (!g.passed) as usize;
    }
    verdict(
        failed == 0,
        format!("{checked} checked, {failed} failed, {excluded} excluded at kinks, worst rel err {worst:.2e}"),
    )
}

fn toy_task() -> ClassificationTask {
    let inputs = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
    let truth = vec![
        BTreeSet::from([0]),
        BTreeSet::from([1]),
        BTreeSet::from([0]),
        BTreeSet::from([1]),
    ];
    ClassificationTask::new(inputs, vec!["Y1".into(), "Y2".into()], truth, vec![0, 1, 2, 3], vec![]).unwrap()
}

fn c7_training() -> Verdict {
    let task = toy_task();
    let (net, layout) = task_network(&task, 3).unwrap();
    let sig = task.signature();
    let data = semanc_core::theory::task_to_kb(&task, false);
    let kb = KnowledgeBase::new(
        sig.clone(),
        vec![parse_formula("forall x. (Y1(x) <-> ~Y2(x)) & (Y2(x) <-> ~Y1(x))", &sig).unwrap()],
    );
    let groundings: Vec<VariableAssignment> = (0..4)
        .map(|i| VariableAssignment::new().with("x", &ClassificationTask::constant(i)))
        .collect();
    let cfg = TrainConfig {
        seed: 0,
        epochs: 2000,
        init: Some(1.0),
        ..TrainConfig::default()
    };
    let (a, hist) = train_soft(&net, &data, &kb, &groundings, &layout, &cfg).unwrap();
    let (b, _) = train_soft(&net, &data, &kb, &groundings, &layout, &cfg).unwrap();
    let deterministic = a.params() == b.params();
    let soft = softmax_kb(2).unwrap();
    let fids: Vec<f64> = (0..4)
        .map(|i| {
            let c = ClassificationTask::constant(i);
            let probs = output_probs(&a, &layout, &[c.as_str()]).unwrap();
            fid_prob(&probs, &soft).unwrap().value
        })
        .collect();
    let mean = fids.iter().sum::<f64>() / 4.0;
    verdict(
        mean >= 0.95 && deterministic,
        format!(
            "mean fid_prob {mean:.4} (min {:.4}) after {} epochs, deterministic:{deterministic}",
            fids.iter().cloned().fold(1.0, f64::min),
            hist.len() - 1
        ),
    )
}

fn c8_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = ComplexityConfig::default();
    let (mut pairs, mut worst, mut exact_fail, mut checked_models) = (0, 0.0f64, 0, 0);
    while pairs < 50 {
        let n = rng.random_range(1..=4);
        let l: Vec<F> = (0..rng.random_range(1..=2)).map(|_| F::random(&mut rng, n, 2)).collect();
        let l2: Vec<F> = vec![F::random(&mut rng, n, 2)];
        let lk = parse_kb(&kb_text(n, &l), KbKind::Prop).unwrap();
        let l2k = parse_kb(&kb_text(n, &l2), KbKind::Prop).unwrap();
        let u = Arc::new(Universe::propositional(&(0..n).map(|i| format!("p{i}")).collect::<Vec<_>>()));
        let joint_models = enumerate_models(&lk.union(&l2k), &u).unwrap();
        if joint_models.is_empty() {
            continue;
        }
        pairs += 1;
        let base = synthetic_model_dist::<f64>(&lk, &u, &cfg).unwrap();
        let joint = synthetic_model_dist::<f64>(&lk.union(&l2k), &u, &cfg).unwrap();
        for &m in &joint.support {
            let r: f64 = property2_ratio(&lk, &l2k, m, &u, &cfg).unwrap();
            worst = worst.max((r - joint.prob_of(m) / base.prob_of(m)).abs());
            checked_models += 1;
        }
        let base_q = synthetic_model_dist::<BigRational>(&lk, &u, &cfg).unwrap();
        let joint_q = synthetic_model_dist::<BigRational>(&lk.union(&l2k), &u, &cfg).unwrap();
        let rep = property1_check(&base_q, &l2k, None, None).unwrap();
        let same = rep.conditional.support == joint_q.support && rep.conditional.probs == joint_q.probs;
        exact_fail += (!same) as usize;
    }
    verdict(
        worst <= 1e-12 && exact_fail == 0,
        format!(
            "{pairs} pairs, {checked_models} surviving models, max ratio error {worst:.2e}, exact conditional mismatches {exact_fail}"
        ),
    )
}

fn hierarchy_task() -> ClassificationTask {
    let inputs = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
    let labels = vec!["cat".to_string(), "animal".to_string()];
    let truth = vec![
        BTreeSet::from([0, 1]),
        BTreeSet::from([1]),
        BTreeSet::from([0, 1]),
        BTreeSet::from([1]),
    ];
    ClassificationTask::new(inputs, labels, truth, vec![0, 3], vec![1, 2]).unwrap()
}

fn c9_empirical() -> Verdict {
    let task = hierarchy_task();
    let l_prime = hierarchy_kb(&task, &[(0, 1)]).unwrap();
    let train = TrainConfig {
        seed: 0,
        epochs: 100,
        init: Some(3.0),
        lr: 0.5,
        ..TrainConfig::default()
    };
    let observed_cfg = EmpiricalConfig {
        train,
        trials: 2000,
        hidden: 2,
        closed_world: true,
    };
    let base_cfg = EmpiricalConfig {
        train: TrainConfig { lambda_kb: 0.0, ..train },
        ..observed_cfg.clone()
    };
    let base = empirical_model_dist(&task, &KnowledgeBase::default(), &base_cfg).unwrap();
    let observed = empirical_model_dist(&task, &l_prime, &observed_cfg).unwrap();
    let again = empirical_model_dist(&task, &l_prime, &observed_cfg).unwrap();
    let reproducible = observed == again;
    let rep = property1_check(&base, &l_prime, Some(task.true_model().to_mask().unwrap()), Some(&observed));
    match rep {
        Ok(r) => {
            let tv = r.tv.unwrap();
            let base_tv = total_variation(&base, &observed);
            verdict(
                reproducible && tv.is_finite(),
                format!(
                    "TV(predicted, observed)={tv:.4} (base vs observed {base_tv:.4}), P(M |= L')={:.4}, support {}/{} models, reproducible:{reproducible}",
                    r.mass,
                    base.support.len(),
                    observed.support.len()
                ),
            )
        }
        Err(e) => verdict(reproducible, format!("no prediction: {e}; reproducible:{reproducible}")),
    }
}

/// Minimal cost over all sentences built from `n` atoms, by exhaustive
/// bottom-up enumeration of truth tables (bit `m` = value under mask `m`).
fn min_costs(n: usize, max_cost: usize) -> HashMap<u64, usize> {
    let full: u64 = if 1 << n == 64 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    let mut levels: Vec<Vec<u64>> = vec![Vec::new(); max_cost + 1];
    let mut best: HashMap<u64, usize> = HashMap::new();
    let add = |levels: &mut Vec<Vec<u64>>, best: &mut HashMap<u64, usize>, c: usize, t: u64| {
        if !best.contains_key(&t) {
            best.insert(t, c);
            levels[c].push(t);
        }
    };
    for a in 0..n {
        let t = (0..1u64 << n).filter(|m| m >> a & 1 == 1).fold(0, |acc, m| acc | 1 << m);
        add(&mut levels, &mut best, 1, t);
    }
    for c in 2..=max_cost {
        let mut new = Vec::new();
        for &t in &levels[c - 1] {
            new.push(!t & full);
        }
        for i in 1..c - 1 {
            let j = c - 1 - i;
            for &x in &levels[i] {
                for &y in &levels[j] {
                    new.push(x & y);
                    new.push(x | y);
                    new.push((!x | y) & full);
                    new.push(!(x ^ y) & full);
                }
            }
        }
        for t in new {
            add(&mut levels, &mut best, c, t);
        }
    }
    best
}

fn c10_complexity() -> Verdict {
    let cfg = ComplexityConfig::default();
    let mut mismatches = Vec::new();
    let mut bad_witness = 0;
    let mut checked = 0;
    for n in [2usize, 4] {
        let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let u = Arc::new(Universe::propositional(&names));
        let oracle = min_costs(n, if n == 2 { 6 } else { 9 });
        for m in 0..1u64 << n {
            let interp = Interpretation::from_mask(u.clone(), m);
            let c = complexity_k(&interp, &cfg).unwrap();
            let want = oracle.get(&(1u64 << m)).copied();
            if !c.exact || Some(c.k) != want {
                mismatches.push(format!("n={n} m={m}: k={} oracle={want:?}", c.k));
            }
            let ms = models_of(&c.witness, &u).unwrap().masks().unwrap();
            let holds = evaluate(&c.witness, &interp).unwrap() == 1.0;
            if ms != vec![m] || !holds {
                bad_witness += 1;
            }
            checked += 1;
        }
    }
    verdict(
        mismatches.is_empty() && bad_witness == 0,
        format!(
            "{checked} interpretations, {} k mismatches, {bad_witness} bad witnesses{}",
            mismatches.len(),
            mismatches.first().map(|s| format!(" (first: {s})")).unwrap_or_default()
        ),
    )
}

fn c11_hopfield() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut stable_total, mut violations, mut lib_disagree) = (0, 0, 0);
    for _ in 0..100 {
        let n = rng.random_range(1..=10);
        let mut b = NetworkBuilder::new();
        let bias: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        for &bi in &bias {
            b.neuron(bi, Activation::StepGeq0, Role::Hidden);
        }
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v: f64 = rng.random_range(-2.0..2.0);
                w[i][j] = v;
                w[j][i] = v;
                b.edge(i, j, v).edge(j, i, v);
            }
        }
        let net = b.build(UpdateMode::Synchronous).unwrap();
        let energy = |x: &[f64]| -> f64 {
            let mut e = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    e -= w[i][j] * x[i] * x[j];
                }
                e -= bias[i] * x[i];
            }
            e
        };
        for mask in 0..1u64 << n {
            let x: Vec<f64> = (0..n).map(|i| (mask >> i & 1) as f64).collect();
            let oracle_stable = (0..n).all(|i| {
                let z: f64 = bias[i] + (0..n).map(|j| w[j][i] * x[j]).sum::<f64>();
                (x[i] == 1.0) == (z >= 0.0)
            });
            if oracle_stable != is_async_stable(&net, &x).unwrap() {
                lib_disagree += 1;
            }
            if !oracle_stable {
                continue;
            }
            stable_total += 1;
            let e = energy(&x);
            let minimum = (0..n).all(|i| {
                let mut y = x.clone();
                y[i] = 1.0 - y[i];
                energy(&y) >= e
            });
            let lib_e = hopfield_energy(&net, &x).unwrap();
            if (lib_e - e).abs() > 1e-9 || is_local_minimum(&net, &x).unwrap() != minimum {
                lib_disagree += 1;
            }
            violations += (!minimum) as usize;
        }
    }
    verdict(
        violations == 0 && lib_disagree == 0,
        format!("{stable_total} stable states, {violations} not local minima, {lib_disagree} library disagreements"),
    )
}
