mod common;

use common::{clamp_atoms, fol, fol_sig, formula, kb_text, oracle_models, prop_universe, Tables, F, G, DOMAIN};
use indexmap::IndexMap;
use proptest::prelude::*;
use semanc_core::encoding::{Agg, DatLayout, EncodingMap, EncodingSpec};
use semanc_core::logic::{parse_formula, parse_kb, Formula, Interpretation, KbKind, TNorm, VariableAssignment};
use semanc_core::network::{Activation, Network, NetworkBuilder, Role, UpdateMode};
use semanc_core::soft::{
    compile_loss, eval_loss, eval_loss_and_grad, grad_check, semantic_reg_loss, CircuitConfig, LossCircuit, LossForm,
    QuantMode,
};

/// Two input slots, two sigmoid hidden units, sigmoid outputs `P` and `Q`.
fn dat_net(params: &[f64], domain: &[f64]) -> (Network<f64>, DatLayout) {
    let mut b = NetworkBuilder::new();
    let xs: Vec<usize> = (0..2)
        .map(|i| b.neuron(0.0, Activation::Identity, Role::Var { arg: "v0".into(), index: i }))
        .collect();
    let hs: Vec<usize> = (0..2).map(|_| b.neuron(0.0, Activation::Sigmoid, Role::Hidden)).collect();
    for &h in &hs {
        for &x in &xs {
            b.edge(x, h, 0.0);
        }
    }
    for name in ["P", "Q"] {
        let o = b.neuron(0.0, Activation::Sigmoid, Role::Pred { name: name.into(), args: vec!["v0".into()] });
        for &h in &hs {
            b.edge(h, o, 0.0);
        }
    }
    let net = b.build(UpdateMode::Feedforward).unwrap();
    let net = net.with_params(&params[..net.param_count()]).unwrap();
    layout(net, domain)
}

fn layout(net: Network<f64>, domain: &[f64]) -> (Network<f64>, DatLayout) {
    let dom: IndexMap<String, Vec<f64>> =
        DOMAIN.iter().enumerate().map(|(i, d)| (d.to_string(), domain[2 * i..2 * i + 2].to_vec())).collect();
    let inputs = dom.values().cloned().collect();
    let spec = EncodingSpec::dat(&net, &["v0"], &["P", "Q"], Some(dom), inputs, Agg::Intersection).unwrap();
    match spec.map {
        EncodingMap::Dat(l) => (net, l),
        _ => unreachable!(),
    }
}

fn batch() -> Vec<VariableAssignment> {
    DOMAIN.iter().map(|d| VariableAssignment::new().with("v0", d)).collect()
}

fn sentence(g: &G) -> Formula {
    parse_formula(&format!("forall v0. ({})", g.text(1)), &fol_sig()).unwrap()
}

fn config(t: usize, soft: Option<f64>, neglog: bool) -> CircuitConfig {
    CircuitConfig {
        tnorm: TNorm::ALL[t],
        quant: soft.map_or(QuantMode::HardMin, |temperature| QuantMode::Softmin { temperature }),
        loss: if neglog { LossForm::NegLog } else { LossForm::OneMinus },
    }
}

fn circuit(g: &G, net: &Network<f64>, l: &DatLayout, cfg: &CircuitConfig) -> LossCircuit {
    compile_loss(&sentence(g), &batch(), net, l, cfg).unwrap()
}

fn oracle_wmc(p: &[f64], models: &[u64]) -> f64 {
    models
        .iter()
        .map(|&m| (0..p.len()).map(|i| if m >> i & 1 == 1 { p[i] } else { 1.0 - p[i] }).product::<f64>())
        .sum()
}

proptest! {
    #[test]
    fn node_values_stay_in_the_unit_interval(
        g in fol(4),
        t in 0usize..3,
        soft in prop::option::of(0.05f64..2.0),
        leaves in prop::collection::vec(0.0f64..=1.0, 64),
        params in prop::collection::vec(-2.0f64..2.0, 16),
        domain in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let (net, l) = dat_net(&params, &domain);
        let c = circuit(&g, &net, &l, &config(t, soft, true));
        let fw = c.forward_with(|i| leaves[i % leaves.len()], 0.0);
        for v in &fw.values {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(v), "{}", v);
        }
    }

    #[test]
    fn hard_min_on_crisp_outputs_is_classical(g in fol(4), t in 0usize..3, p_on in any::<bool>(), q_on in any::<bool>()) {
        let mut b = NetworkBuilder::new();
        for i in 0..2 {
            b.neuron(0.0, Activation::Identity, Role::Var { arg: "v0".into(), index: i });
        }
        for (name, on) in [("P", p_on), ("Q", q_on)] {
            let o = b.neuron(on as u8 as f64, Activation::Identity, Role::Pred { name: name.into(), args: vec!["v0".into()] });
            b.edge(0, o, 0.0).edge(1, o, 0.0);
        }
        let (net, l) = layout(b.build(UpdateMode::Feedforward).unwrap(), &[0.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        let c = circuit(&g, &net, &l, &config(t, None, false));
        let truth = 1.0 - eval_loss(&c, &net);
        let tables = Tables { p: if p_on { 0b111 } else { 0 }, q: if q_on { 0b111 } else { 0 } };
        let want = (0..DOMAIN.len()).all(|e| g.eval(tables, &mut vec![e]));
        prop_assert_eq!(truth, want as u8 as f64);
    }

    #[test]
    fn a_small_step_against_the_gradient_lowers_the_loss(
        g in fol(3),
        t in 0usize..3,
        soft in 0.2f64..1.0,
        neglog in any::<bool>(),
        params in prop::collection::vec(-2.0f64..2.0, 16),
        domain in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let (net, l) = dat_net(&params, &domain);
        let c = circuit(&g, &net, &l, &config(t, Some(soft), neglog));
        prop_assume!(!grad_check(&c, &net, 1e-5, 1e-5).nondifferentiable);
        let lg = eval_loss_and_grad(&c, &net);
        let norm = lg.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let lowered = [1e-2, 1e-3, 1e-4, 1e-5].iter().any(|&h| {
            let moved: Vec<f64> = net.params().iter().zip(&lg.grad).map(|(p, g)| p - h * g / norm).collect();
            eval_loss(&c, &net.with_params(&moved).unwrap()) < lg.loss
        });
        prop_assert!(lowered);
    }

    #[test]
    fn semantic_loss_is_negative_log_model_weight(
        n in 1usize..=5,
        p in prop::collection::vec(0.05f64..0.95, 5),
        fs in prop::collection::vec(formula(5, 3), 1..3),
    ) {
        let fs: Vec<F> = fs.into_iter().map(|f| clamp_atoms(f, n)).collect();
        let models = oracle_models(n, &fs);
        prop_assume!(!models.is_empty());
        let p = &p[..n];
        let kb = parse_kb(&kb_text(n, &fs), KbKind::Prop).unwrap();
        let probs = Interpretation::new(prop_universe(n), p.to_vec()).unwrap();
        let (loss, prob, grad) = semantic_reg_loss(&probs, &kb).unwrap();
        let want = oracle_wmc(p, &models);
        prop_assert!((prob - want).abs() <= 1e-12);
        prop_assert!((loss + want.ln()).abs() <= 1e-9);
        let h = 1e-6;
        for i in 0..n {
            let mut up = p.to_vec();
            let mut down = p.to_vec();
            up[i] += h;
            down[i] -= h;
            let fd = (-oracle_wmc(&up, &models).ln() + oracle_wmc(&down, &models).ln()) / (2.0 * h);
            prop_assert!((grad[i] - fd).abs() <= 1e-5 * (1.0 + fd.abs()), "atom {}: {} vs {}", i, grad[i], fd);
        }
    }
}
