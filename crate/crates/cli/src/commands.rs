//! One function per subcommand.

use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use semanc_core::encoding::{compare_with_kb, compute_m_n, EncodingMap, EncodingSpec};
use semanc_core::fidelity::{
    fid_fuzzy, fid_prob, fid_prob_network, fidelity_hausdorff, BaseDistance, FidelityConfig, SatAgg,
};
use semanc_core::logic::{
    enumerate_models, kb_universe, mask_string, penalty_models, Interpretation, InterpretationSet, KbKind,
    KnowledgeBase, TNorm, Universe,
};
use semanc_core::network::{compute_x_inf, trajectory};
use semanc_core::programs::{compile_cilp, is_acyclic, tp_fixpoint, tp_step, verify_tp_equivalence};
use semanc_core::soft::{train_soft, CircuitConfig, TrainConfig};
use semanc_core::theory::{
    complexity_with, empirical_model_dist, hierarchy_kb, property1_check, property2_ratio, synthetic_model_dist,
    ClassificationTask, ComplexityConfig, ComplexityOracle, EmpiricalConfig, ModelDistribution, WeightFn,
};
use serde_json::{json, Value};

use crate::input;
use crate::{Cmd, Ctx, Experiment, Failure, Outcome, Table, TrainFlags};

pub fn run(cmd: &Cmd, ctx: &mut Ctx) -> Result<Outcome, Failure> {
    match cmd {
        Cmd::Parse(a) => parse(ctx, &a.file, a.kind.as_deref()),
        Cmd::Models(a) => models(ctx, &a.kb.file, a.kb.kind.as_deref(), a.limit),
        Cmd::Entail(a) => entail(ctx, &a.kb, &a.query, a.kind.as_deref()),
        Cmd::Tp(a) => tp(ctx, &a.program, a.state.as_deref(), a.max_iter),
        Cmd::Compile(a) => compile(ctx, &a.program, a.out.as_deref()),
        Cmd::Simulate(a) => simulate(ctx, &a.net, &a.init, a.steps),
        Cmd::Xinf(a) => xinf(ctx, &a.net, a.stable_only),
        Cmd::Verify(a) => verify(ctx, a),
        Cmd::Fidelity(a) => fidelity(ctx, a),
        Cmd::Train(a) => train(ctx, a),
        Cmd::Complexity(a) => complexity(ctx, a),
        Cmd::Experiment(e) => match &e.which {
            Experiment::Prop1(a) => prop1(ctx, a),
            Experiment::Prop2(a) => prop2(ctx, a),
            Experiment::Kdist(a) => kdist(ctx, a),
        },
    }
}

fn kind_name(k: KbKind) -> &'static str {
    match k {
        KbKind::Prop => "prop",
        KbKind::Fol => "fol",
        KbKind::Program => "program",
        KbKind::Penalty => "penalty",
        KbKind::Fuzzy => "fuzzy",
    }
}

fn interp_json(m: &Interpretation<f64>) -> Value {
    let map: IndexMap<String, f64> = m.universe().names().into_iter().zip(m.values().iter().copied()).collect();
    json!(map)
}

fn mask_json(u: &Arc<Universe>, mask: u64) -> Value {
    let map: IndexMap<String, u8> = u.names().into_iter().enumerate().map(|(i, n)| (n, (mask >> i & 1) as u8)).collect();
    json!(map)
}

fn set_json(s: &InterpretationSet) -> Value {
    match s.masks() {
        Ok(ms) => Value::Array(ms.iter().map(|&m| mask_json(s.universe(), m)).collect()),
        Err(_) => json!({ "dnf": s.to_dnf().to_string() }),
    }
}

fn mask_rows(u: &Universe, masks: &[u64]) -> Table {
    Table {
        header: u.names(),
        rows: masks
            .iter()
            .map(|&m| mask_string(m, u.len()).chars().map(|c| c.to_string()).collect())
            .collect(),
    }
}

fn state_str(x: &[f64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse(ctx: &mut Ctx, file: &Path, kind: Option<&str>) -> Result<Outcome, Failure> {
    let text = input::read(ctx, file)?;
    let kind = input::kind_of(&text, kind)?;
    let kb = semanc_core::logic::parse_kb(&text, kind)?;
    let u = kb_universe(&kb);
    let sentences: Vec<String> = kb.formulas().map(|f| f.to_string()).collect();
    let result = json!({
        "kind": kind_name(kind),
        "atoms": u.names(),
        "domain": kb.signature.domain,
        "predicates": kb.signature.predicates,
        "sentences": sentences,
        "normalized": kb.to_string(),
    });
    let table = Table {
        header: vec!["index".into(), "sentence".into()],
        rows: sentences.iter().enumerate().map(|(i, s)| vec![i.to_string(), s.clone()]).collect(),
    };
    Ok(Outcome {
        config: json!({ "kind": kind_name(kind) }),
        result,
        table: Some(table),
    })
}

fn models(ctx: &mut Ctx, file: &Path, kind: Option<&str>, limit: usize) -> Result<Outcome, Failure> {
    let (kb, kind) = input::kb(ctx, file, kind)?;
    let u = Arc::new(kb_universe(&kb));
    let (set, extra) = if kind == KbKind::Penalty {
        let r = penalty_models(&kb, &u)?;
        (r.models, json!({ "min_penalty": r.min_penalty.to_string() }))
    } else {
        (enumerate_models(&kb, &u)?, json!({}))
    };
    let mut result = json!({ "atoms": u.names(), "satisfiable": !set.is_empty() });
    let mut table = None;
    match set.masks() {
        Ok(ms) => {
            result["count"] = ms.len().into();
            result["truncated"] = (ms.len() > limit).into();
            let shown = &ms[..ms.len().min(limit)];
            result["models"] = Value::Array(shown.iter().map(|&m| mask_json(&u, m)).collect());
            table = Some(mask_rows(&u, shown));
        }
        Err(_) => result["models"] = set_json(&set),
    }
    if let Value::Object(o) = extra {
        result.as_object_mut().expect("object").extend(o);
    }
    Ok(Outcome {
        config: json!({ "kind": kind_name(kind), "limit": limit }),
        result,
        table,
    })
}

fn entail(ctx: &mut Ctx, kb: &Path, query: &Path, kind: Option<&str>) -> Result<Outcome, Failure> {
    let (l, _) = input::kb(ctx, kb, kind)?;
    let (q, _) = input::kb(ctx, query, kind)?;
    let u = Arc::new(kb_universe(&l).merged(&kb_universe(&q)));
    let diff = enumerate_models(&l, &u)?.difference(&enumerate_models(&q, &u)?)?;
    let counterexample = match diff.masks() {
        Ok(ms) => ms.first().map(|&m| mask_json(&u, m)),
        Err(_) => diff.cubes().and_then(|c| c.first()).map(|c| json!(c.to_formula(&u).to_string())),
    };
    Ok(Outcome {
        config: json!({}),
        result: json!({ "result": diff.is_empty(), "counterexample": counterexample }),
        table: None,
    })
}

fn tp(ctx: &mut Ctx, file: &Path, state: Option<&str>, max_iter: usize) -> Result<Outcome, Failure> {
    let p = input::program(ctx, file)?;
    let u = p.universe().clone();
    let result = match state {
        Some(s) => {
            let mut values = vec![0.0; u.len()];
            for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
                let i = u
                    .index_of_name(name)
                    .ok_or_else(|| Failure::Usage(format!("atom `{name}` is not in the program")))?;
                values[i] = 1.0;
            }
            let m = Interpretation::new(u.clone(), values)?;
            let step = tp_step(&p, &m)?;
            let fix = tp_fixpoint(&p, &m, max_iter)?;
            json!({
                "state": interp_json(&m),
                "step": interp_json(&step),
                "fixpoint": {
                    "kind": fix.kind,
                    "states": fix.states.iter().map(interp_json).collect::<Vec<_>>(),
                    "iterations": fix.iterations,
                },
            })
        }
        None => {
            u.check_explicit()?;
            let fixed: Vec<u64> = (0..1u64 << u.len())
                .filter(|&mask| {
                    let m = Interpretation::<f64>::from_mask(u.clone(), mask);
                    tp_step(&p, &m).is_ok_and(|s| s == m)
                })
                .collect();
            let table = mask_rows(&u, &fixed);
            return Ok(Outcome {
                config: json!({ "max_iter": max_iter }),
                result: json!({
                    "atoms": u.names(),
                    "acyclic": is_acyclic(&p),
                    "fixed_points": fixed.iter().map(|&m| mask_json(&u, m)).collect::<Vec<_>>(),
                }),
                table: Some(table),
            });
        }
    };
    Ok(Outcome {
        config: json!({ "max_iter": max_iter, "state": state }),
        result,
        table: None,
    })
}

fn compile(ctx: &mut Ctx, file: &Path, out: Option<&Path>) -> Result<Outcome, Failure> {
    let p = input::program(ctx, file)?;
    let net = compile_cilp::<f64>(&p);
    let verdict = verify_tp_equivalence(&p, &net)?;
    if let Some(path) = out {
        std::fs::write(path, net.to_json()).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    }
    Ok(Outcome {
        config: json!({ "out": out.map(|p| p.display().to_string()) }),
        result: json!({
            "network": net.to_json_value(),
            "verification": verdict,
        }),
        table: None,
    })
}

fn parse_state(text: &str) -> Result<Vec<f64>, Failure> {
    let t = text.trim();
    if !t.contains(',') && !t.is_empty() && t.chars().all(|c| c == '0' || c == '1') {
        return Ok(t.chars().map(|c| if c == '1' { 1.0 } else { 0.0 }).collect());
    }
    t.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad state value `{v}`"))))
        .collect()
}

fn simulate(ctx: &mut Ctx, file: &Path, init: &str, steps: usize) -> Result<Outcome, Failure> {
    let net = input::network(ctx, file)?;
    let x0 = parse_state(init)?;
    let tr = trajectory(&net, &x0, steps)?;
    let table = Table {
        header: vec!["step".into(), "state".into()],
        rows: tr.states.iter().enumerate().map(|(i, s)| vec![i.to_string(), state_str(s)]).collect(),
    };
    Ok(Outcome {
        config: json!({ "init": x0, "steps": steps }),
        result: json!({
            "states": tr.states,
            "cycle": tr.cycle.map(|(start, period)| json!({ "start": start, "period": period })),
        }),
        table: Some(table),
    })
}

fn xinf(ctx: &mut Ctx, file: &Path, stable_only: bool) -> Result<Outcome, Failure> {
    let net = input::network(ctx, file)?;
    let mut ls = compute_x_inf(&net)?;
    if stable_only {
        ls = ls.stable_only();
    }
    let stable: Vec<&Vec<f64>> = ls.stable_states();
    let mut cycle_of = vec![0; ls.states.len()];
    for (c, members) in ls.cycles.iter().enumerate() {
        for &s in members {
            cycle_of[s] = c;
        }
    }
    let table = Table {
        header: vec!["state".into(), "cycle".into()],
        rows: ls
            .states
            .iter()
            .zip(&cycle_of)
            .map(|(s, c)| vec![state_str(s), c.to_string()])
            .collect(),
    };
    Ok(Outcome {
        config: json!({ "stable_only": stable_only }),
        result: json!({
            "states": ls.states,
            "cycles": ls.cycles,
            "stable": stable,
            "initial_states": ls.basins.len(),
        }),
        table: Some(table),
    })
}

fn verify(ctx: &mut Ctx, a: &crate::VerifyArgs) -> Result<Outcome, Failure> {
    let net = input::network(ctx, &a.net)?;
    let (kb, _) = input::kb(ctx, &a.kb, a.kind.as_deref())?;
    let spec = input::encoding(ctx, &net, &a.encoding, input::agg(a.agg.as_deref())?, a.stable_only)?;
    let mn = compute_m_n(&net, &spec)?;
    let v = compare_with_kb(&mn.m_n, &kb)?;
    Ok(Outcome {
        config: json!({ "encoding": a.encoding, "agg": spec.agg, "stable_only": spec.stable_only }),
        result: json!({
            "result": v.is_neural_model,
            "is_neural_model": v.is_neural_model,
            "is_semantic_encoding": v.is_semantic_encoding,
            "m_n": set_json(&v.m_n),
            "m_l": set_json(&v.m_l),
            "counterexample": v.counterexample.as_ref().map(interp_json),
            "missing": v.missing.as_ref().map(interp_json),
            "limit_states": mn.limit.states,
        }),
        table: None,
    })
}

fn fidelity(ctx: &mut Ctx, a: &crate::FidelityArgs) -> Result<Outcome, Failure> {
    let cfg = FidelityConfig {
        base: match a.base.as_str() {
            "discrete" => BaseDistance::Discrete,
            "eq1" | "eq1_fraction" => BaseDistance::Eq1Fraction,
            other => return Err(Failure::Usage(format!("unknown base distance `{other}`"))),
        },
        d_max: a.d_max,
        sat_agg: match a.sat_agg.as_str() {
            "min" => SatAgg::Min,
            "product" => SatAgg::Product,
            other => return Err(Failure::Usage(format!("unknown satisfaction aggregate `{other}`"))),
        },
        tnorm: a.tnorm.parse::<TNorm>().map_err(Failure::Usage)?,
    };
    cfg.validate()?;
    let report = match (&a.prob, &a.net) {
        (Some(probs), None) => {
            if a.measure.as_deref().is_some_and(|m| m != "prob") {
                return Err(Failure::Usage("--prob only supports the prob measure".into()));
            }
            let p = input::probabilities(ctx, probs)?;
            let (kb, _) = input::kb(ctx, &a.kb, a.kind.as_deref())?;
            fid_prob(&p, &kb)?
        }
        (None, Some(net)) => {
            let net = input::network(ctx, net)?;
            let (kb, _) = input::kb(ctx, &a.kb, a.kind.as_deref())?;
            let spec = input::encoding(ctx, &net, &a.encoding, input::agg(a.agg.as_deref())?, a.stable_only)?;
            match a.measure.as_deref().unwrap_or("hausdorff") {
                "hausdorff" => fidelity_hausdorff(&net, &spec, &kb, &cfg)?,
                "fuzzy" => fid_fuzzy(&net, &spec, &kb, &cfg)?,
                "prob" => fid_prob_network(&net, &spec, &kb)?,
                other => return Err(Failure::Usage(format!("unknown measure `{other}`"))),
            }
        }
        _ => return Err(Failure::Usage("give exactly one of --prob or --net".into())),
    };
    Ok(Outcome {
        config: json!({ "fidelity": cfg, "encoding": a.net.as_ref().map(|_| &a.encoding) }),
        result: serde_json::to_value(&report).expect("report serializes"),
        table: None,
    })
}

fn train_config(f: &TrainFlags, seed: u64) -> Result<TrainConfig, Failure> {
    let cfg = TrainConfig {
        lr: f.lr,
        epochs: f.epochs,
        seed,
        lambda_data: f.lambda_data,
        lambda_kb: f.lambda_kb,
        circuit: CircuitConfig {
            tnorm: f.tnorm.parse().map_err(Failure::Usage)?,
            quant: f.quant.parse().map_err(Failure::Usage)?,
            loss: f.loss.parse().map_err(Failure::Usage)?,
        },
        tol: f.tol,
        init: f.init,
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn train(ctx: &mut Ctx, a: &crate::TrainArgs) -> Result<Outcome, Failure> {
    let cfg = train_config(&a.train, ctx.seed)?;
    let net = input::network(ctx, &a.net)?;
    let (data, _) = input::kb(ctx, &a.data, Some("fol"))?;
    let (kb, _) = input::kb(ctx, &a.kb, Some("fol"))?;
    let groundings = input::groundings(ctx, &a.groundings)?;
    let text = input::read(ctx, &a.encoding)?;
    let layout = match EncodingSpec::from_json(&net, &text)?.map {
        EncodingMap::Dat(l) => l,
        _ => return Err(Failure::Usage("training needs a distributed-atoms (dat) encoding".into())),
    };
    let (trained, history) = train_soft(&net, &data, &kb, &groundings, &layout, &cfg)?;
    let write = |path: &Path, body: String| {
        std::fs::write(path, body).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
    };
    if let Some(p) = &a.out {
        write(p, trained.to_json())?;
    }
    let table = Table {
        header: ["epoch", "data_loss", "kb_loss", "fidelity"].map(String::from).to_vec(),
        rows: history
            .iter()
            .map(|r| vec![r.epoch.to_string(), r.data_loss.to_string(), r.kb_loss.to_string(), r.fidelity.to_string()])
            .collect(),
    };
    if let Some(p) = &a.history {
        let mut body = table.header.join(",") + "\n";
        for r in &table.rows {
            body += &(r.join(",") + "\n");
        }
        write(p, body)?;
    }
    let last = history.last().copied();
    let network = match &a.out {
        Some(p) => json!(p.display().to_string()),
        None => serde_json::to_value(trained.to_json_value()).expect("network serializes"),
    };
    Ok(Outcome {
        config: serde_json::to_value(cfg).expect("config serializes"),
        result: json!({
            "epochs_run": history.len().saturating_sub(1),
            "final": last,
            "network": network,
            "history": a.history.as_ref().map_or_else(|| json!(history), |p| json!(p.display().to_string())),
        }),
        table: Some(table),
    })
}

fn complexity(ctx: &mut Ctx, a: &crate::ComplexityArgs) -> Result<Outcome, Failure> {
    let (kb, _) = input::kb(ctx, &a.kb.file, a.kb.kind.as_deref())?;
    let u = Arc::new(kb_universe(&kb));
    let ms = enumerate_models(&kb, &u)?.masks()?;
    let n = u.len();
    let mut oracle = (n > 0 && n <= a.max_exact.min(8)).then(|| ComplexityOracle::new(n, a.budget));
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for &m in &ms {
        let c = complexity_with(&Interpretation::from_mask(u.clone(), m), oracle.as_mut())?;
        table.push(vec![mask_string(m, n), c.k.to_string(), c.exact.to_string(), c.witness.to_string()]);
        rows.push(json!({
            "model": mask_json(&u, m),
            "k": c.k,
            "exact": c.exact,
            "witness": c.witness.to_string(),
        }));
    }
    Ok(Outcome {
        config: json!({ "budget": a.budget, "max_exact": a.max_exact }),
        result: json!({ "atoms": u.names(), "models": rows }),
        table: Some(Table {
            header: ["model", "k", "exact", "witness"].map(String::from).to_vec(),
            rows: table,
        }),
    })
}

fn dist_table(d: &ModelDistribution<f64>) -> Table {
    let n = d.universe.len();
    Table {
        header: ["model", "k", "count", "p"].map(String::from).to_vec(),
        rows: d
            .support
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                vec![
                    mask_string(m, n),
                    d.ks.as_ref().map_or(String::new(), |k| k[i].to_string()),
                    d.counts.as_ref().map_or(String::new(), |c| c[i].to_string()),
                    d.probs[i].to_string(),
                ]
            })
            .collect(),
    }
}

fn weight_fn(s: &str) -> Result<ComplexityConfig, Failure> {
    let f: WeightFn = s.parse().map_err(Failure::Usage)?;
    Ok(ComplexityConfig { f, ..ComplexityConfig::default() })
}

fn kdist(ctx: &mut Ctx, a: &crate::KdistArgs) -> Result<Outcome, Failure> {
    let cfg = weight_fn(&a.f)?;
    let (kb, _) = input::kb(ctx, &a.kb, None)?;
    let u = Arc::new(kb_universe(&kb));
    let d = synthetic_model_dist::<f64>(&kb, &u, &cfg)?;
    Ok(Outcome {
        config: json!({ "f": cfg.f }),
        result: d.to_json(),
        table: Some(dist_table(&d)),
    })
}

fn prop2(ctx: &mut Ctx, a: &crate::Prop2Args) -> Result<Outcome, Failure> {
    let cfg = weight_fn(&a.f)?;
    let (l, _) = input::kb(ctx, &a.kb, None)?;
    let (l2, _) = input::kb(ctx, &a.extra, None)?;
    let u = Arc::new(kb_universe(&l).merged(&kb_universe(&l2)));
    let base = synthetic_model_dist::<f64>(&l, &u, &cfg)?;
    let joint = synthetic_model_dist::<f64>(&l.union(&l2), &u, &cfg)?;
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut worst: f64 = 0.0;
    for &m in &joint.support {
        let ratio: f64 = property2_ratio(&l, &l2, m, &u, &cfg)?;
        let direct = joint.prob_of(m) / base.prob_of(m);
        worst = worst.max((ratio - direct).abs());
        table.push(vec![mask_string(m, u.len()), ratio.to_string(), direct.to_string()]);
        rows.push(json!({ "model": mask_json(&u, m), "ratio": ratio, "direct": direct }));
    }
    Ok(Outcome {
        config: json!({ "f": cfg.f }),
        result: json!({ "atoms": u.names(), "models": rows, "max_abs_diff": worst }),
        table: Some(Table {
            header: ["model", "ratio", "direct"].map(String::from).to_vec(),
            rows: table,
        }),
    })
}

fn label_order(task: &ClassificationTask, spec: &str) -> Result<Vec<(usize, usize)>, Failure> {
    let idx = |name: &str| {
        task.labels
            .iter()
            .position(|l| l == name.trim())
            .ok_or_else(|| Failure::Usage(format!("unknown label `{}`", name.trim())))
    };
    spec.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once('<')
                .ok_or_else(|| Failure::Usage(format!("order pair `{p}` needs the form a<b")))?;
            Ok((idx(a)?, idx(b)?))
        })
        .collect()
}

fn prop1(ctx: &mut Ctx, a: &crate::Prop1Args) -> Result<Outcome, Failure> {
    let synthetic = a.task.extension().is_some_and(|e| e != "csv");
    if synthetic {
        let cfg = weight_fn(&a.f)?;
        let extra = a
            .extra
            .as_ref()
            .ok_or_else(|| Failure::Usage("the synthetic check needs a second knowledge base".into()))?;
        let (l, _) = input::kb(ctx, &a.task, None)?;
        let (l2, _) = input::kb(ctx, extra, None)?;
        let u = Arc::new(kb_universe(&l).merged(&kb_universe(&l2)));
        let base = synthetic_model_dist::<f64>(&l, &u, &cfg)?;
        let observed = synthetic_model_dist::<f64>(&l.union(&l2), &u, &cfg)?;
        let rep = property1_check(&base, &l2, None, Some(&observed))?;
        return Ok(Outcome {
            config: json!({ "mode": "synthetic", "f": cfg.f }),
            result: json!({
                "base": base.to_json(),
                "predicted": rep.conditional.to_json(),
                "observed": observed.to_json(),
                "mass": rep.mass,
                "tv": rep.tv,
            }),
            table: Some(dist_table(&rep.conditional)),
        });
    }
    let task = input::task(ctx, &a.task)?;
    let l_prime = match (&a.order, &a.extra) {
        (Some(o), None) => hierarchy_kb(&task, &label_order(&task, o)?)?,
        (None, Some(p)) => input::kb(ctx, p, None)?.0,
        _ => return Err(Failure::Usage("give exactly one of --order or an extra knowledge base".into())),
    };
    let train = train_config(&a.train, ctx.seed)?;
    let observed_cfg = EmpiricalConfig {
        train,
        trials: a.trials,
        hidden: a.hidden,
        closed_world: a.closed_world,
    };
    let base_cfg = EmpiricalConfig {
        train: TrainConfig { lambda_kb: 0.0, ..train },
        ..observed_cfg.clone()
    };
    let base = empirical_model_dist(&task, &KnowledgeBase::default(), &base_cfg)?;
    let observed = empirical_model_dist(&task, &l_prime, &observed_cfg)?;
    let truth = task.true_model().to_mask()?;
    let rep = property1_check(&base, &l_prime, Some(truth), Some(&observed))?;
    Ok(Outcome {
        config: json!({ "mode": "empirical", "experiment": observed_cfg, "l_prime": l_prime.to_string() }),
        result: json!({
            "base": base.to_json(),
            "predicted": rep.conditional.to_json(),
            "observed": observed.to_json(),
            "mass": rep.mass,
            "true_model": rep.true_model.map(|(p, up)| json!({ "p": p, "uplift": up })),
            "observed_true_model_p": observed.prob_of(truth),
            "tv": rep.tv,
        }),
        table: Some(dist_table(&observed)),
    })
}
