//! Reading input files and recording their digests.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use semanc_core::encoding::{Agg, EncodingSpec};
use semanc_core::logic::{parse_kb, Interpretation, KbKind, KnowledgeBase, Universe, VariableAssignment};
use semanc_core::programs::LogicProgram;
use semanc_core::theory::ClassificationTask;
use semanc_core::Network64;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::{Ctx, Failure};

pub fn read(ctx: &mut Ctx, path: &Path) -> Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    ctx.inputs.push(json!({ "path": path.display().to_string(), "sha256": hex }));
    String::from_utf8(bytes).map_err(|_| Failure::Usage(format!("{}: not UTF-8", path.display())))
}

/// Guesses the knowledge-base kind from its text: penalty weights (`::`),
/// fuzzy intervals (`]:`), rules (`:-`), otherwise first-order.
pub fn guess_kind(text: &str) -> KbKind {
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    if body.contains("::") {
        KbKind::Penalty
    } else if body.contains("]:") || body.contains("] :") {
        KbKind::Fuzzy
    } else if body.contains(":-") {
        KbKind::Program
    } else {
        KbKind::Fol
    }
}

pub fn kind_of(text: &str, flag: Option<&str>) -> Result<KbKind, Failure> {
    match flag {
        Some(k) => k.parse().map_err(Failure::Usage),
        None => Ok(guess_kind(text)),
    }
}

pub fn kb(ctx: &mut Ctx, path: &Path, kind: Option<&str>) -> Result<(KnowledgeBase, KbKind), Failure> {
    let text = read(ctx, path)?;
    let kind = kind_of(&text, kind)?;
    Ok((parse_kb(&text, kind)?, kind))
}

pub fn program(ctx: &mut Ctx, path: &Path) -> Result<LogicProgram, Failure> {
    let text = read(ctx, path)?;
    Ok(LogicProgram::parse(&text)?)
}

pub fn network(ctx: &mut Ctx, path: &Path) -> Result<Network64, Failure> {
    let text = read(ctx, path)?;
    Ok(Network64::from_json(&text)?)
}

pub fn agg(flag: Option<&str>) -> Result<Option<Agg>, Failure> {
    flag.map(|a| a.parse().map_err(Failure::Usage)).transpose()
}

/// `nat` builds a neurons-as-atoms map from the network's atom roles;
/// anything else names an encoding JSON file.
pub fn encoding(
    ctx: &mut Ctx,
    net: &Network64,
    which: &str,
    agg: Option<Agg>,
    stable_only: bool,
) -> Result<EncodingSpec, Failure> {
    let mut spec = if which == "nat" {
        EncodingSpec::nat_from_roles(net, agg.unwrap_or_default())?
    } else {
        let text = read(ctx, Path::new(which))?;
        EncodingSpec::from_json(net, &text)?
    };
    if let Some(a) = agg {
        spec.agg = a;
    }
    spec.stable_only |= stable_only;
    for w in spec.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(spec)
}

/// A JSON object `{"atom": probability, ...}` read in file order.
pub fn probabilities(ctx: &mut Ctx, path: &Path) -> Result<Interpretation<f64>, Failure> {
    let text = read(ctx, path)?;
    let map: IndexMap<String, f64> =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let names: Vec<&String> = map.keys().collect();
    let u = Arc::new(Universe::propositional(&names));
    Ok(Interpretation::new(u, map.values().copied().collect())?)
}

/// Grounding CSV: the header names variables, each row binds them.
pub fn groundings(ctx: &mut Ctx, path: &Path) -> Result<Vec<VariableAssignment>, Failure> {
    let text = read(ctx, path)?;
    let bad = |e: csv::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let vars: Vec<String> = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(bad)?;
        let mut g = VariableAssignment::new();
        for (v, e) in vars.iter().zip(rec.iter()) {
            g = g.with(v, e);
        }
        out.push(g);
    }
    Ok(out)
}

/// Task CSV: feature columns, then `labels` (`|`-separated) and an optional
/// `split` column (`train`, `test`, or blank). Without a split column every
/// row is a training row.
pub fn task(ctx: &mut Ctx, path: &Path) -> Result<ClassificationTask, Failure> {
    let text = read(ctx, path)?;
    let usage = |m: String| Failure::Usage(format!("{}: {m}", path.display()));
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(|e| usage(e.to_string()))?.iter().map(str::to_string).collect();
    let label_col = header
        .iter()
        .position(|h| h == "labels")
        .ok_or_else(|| usage("missing `labels` column".into()))?;
    let split_col = header.iter().position(|h| h == "split");
    let mut inputs = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut truth = Vec::new();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| usage(e.to_string()))?;
        let mut x = Vec::new();
        for (c, v) in rec.iter().enumerate() {
            if c != label_col && Some(c) != split_col {
                x.push(v.parse::<f64>().map_err(|_| usage(format!("row {}: bad number `{v}`", i + 1)))?);
            }
        }
        inputs.push(x);
        let mut set = BTreeSet::new();
        for l in rec.get(label_col).unwrap_or("").split('|').map(str::trim).filter(|l| !l.is_empty()) {
            let idx = match labels.iter().position(|k| k == l) {
                Some(j) => j,
                None => {
                    labels.push(l.to_string());
                    labels.len() - 1
                }
            };
            set.insert(idx);
        }
        truth.push(set);
        match split_col.map(|c| rec.get(c).unwrap_or("")) {
            None | Some("train") => train.push(i),
            Some("test") => test.push(i),
            Some("") => {}
            Some(other) => return Err(usage(format!("row {}: unknown split `{other}`", i + 1))),
        }
    }
    Ok(ClassificationTask::new(inputs, labels, truth, train, test)?)
}
