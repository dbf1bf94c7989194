//! Finite classification tasks as knowledge bases, the complexity k(M) of an
//! interpretation, low-complexity model distributions and the two
//! learning-theory properties.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use petgraph::graphmap::DiGraphMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{Agg, DatLayout, EncodingMap, EncodingSpec};
use crate::fidelity::distance_to_kb;
use crate::logic::models::atom_formula;
use crate::logic::{
    enumerate_models, Formula, GroundAtom, Interpretation, KnowledgeBase, Signature, Universe,
    VariableAssignment,
};
use crate::network::{Activation, Network, NetworkBuilder, Role, UpdateMode};
use crate::soft::{output_probs, train_soft, TrainConfig};
use crate::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoryError {
    #[error("invalid task: {0}")]
    Task(String),

    #[error("label order is not a strict partial order: {0}")]
    Order(String),

    #[error("knowledge base has no models")]
    NoModels,

    #[error("conditioning event has probability 0")]
    ZeroMass,

    #[error("interpretation does not satisfy both knowledge bases")]
    NotAModel,

    #[error("weight function: {0}")]
    Weight(String),

    #[error("{0} trials requested")]
    Trials(usize),
}

/// Inputs, labels, the ground-truth labelling and a train/test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationTask {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// `truth[i]`: indices of the labels of input `i`.
    pub truth: Vec<BTreeSet<usize>>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl ClassificationTask {
    pub fn new(
        inputs: Vec<Vec<f64>>,
        labels: Vec<String>,
        truth: Vec<BTreeSet<usize>>,
        train: Vec<usize>,
        test: Vec<usize>,
    ) -> Result<Self, TheoryError> {
        let bad = |m: String| Err(TheoryError::Task(m));
        if truth.len() != inputs.len() {
            return bad(format!("{} inputs but {} label sets", inputs.len(), truth.len()));
        }
        if truth.iter().flatten().any(|&y| y >= labels.len()) {
            return bad("label index out of range".into());
        }
        if train.iter().chain(&test).any(|&i| i >= inputs.len()) {
            return bad("split index out of range".into());
        }
        if train.iter().any(|i| test.contains(i)) {
            return bad("train and test indices overlap".into());
        }
        let mut uniq: Vec<&String> = labels.iter().collect();
        uniq.sort();
        uniq.dedup();
        if uniq.len() != labels.len() {
            return bad("duplicate label".into());
        }
        Ok(ClassificationTask {
            inputs,
            labels,
            truth,
            train,
            test,
        })
    }

    /// Constant naming input `i`.
    pub fn constant(i: usize) -> String {
        format!("c{i}")
    }

    /// One unary predicate per label over the constants `c0, c1, ...`.
    pub fn signature(&self) -> Signature {
        let mut s = Signature {
            domain: (0..self.inputs.len()).map(Self::constant).collect(),
            ..Signature::default()
        };
        for y in &self.labels {
            s.predicates.insert(y.clone(), 1);
        }
        s
    }

    /// `At = { y(c_x) }`, label-major.
    pub fn universe(&self) -> Universe {
        Universe::from_signature(&self.signature())
    }

    fn atom(&self, x: usize, y: usize) -> Formula {
        atom_formula(&GroundAtom {
            pred: self.labels[y].clone(),
            args: vec![Self::constant(x)],
        })
    }

    /// The interpretation `f` defines over the whole of `X`.
    pub fn true_model(&self) -> Interpretation<f64> {
        let u = Arc::new(self.universe());
        let values = u
            .atoms()
            .map(|a| {
                let y = self.labels.iter().position(|l| *l == a.pred).expect("label");
                let x: usize = a.args[0][1..].parse().expect("constant");
                if self.truth[x].contains(&y) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Interpretation::new(u, values).expect("crisp values")
    }
}

/// `L_train`: `y(c_x)` for every training input and each of its labels;
/// with `closed_world`, also `~y(c_x)` for the labels it lacks.
pub fn task_to_kb(task: &ClassificationTask, closed_world: bool) -> KnowledgeBase {
    let mut formulas = Vec::new();
    for &x in &task.train {
        for y in 0..task.labels.len() {
            if task.truth[x].contains(&y) {
                formulas.push(task.atom(x, y));
            } else if closed_world {
                formulas.push(task.atom(x, y).not());
            }
        }
    }
    KnowledgeBase::new(task.signature(), formulas)
}

/// `L_<`: `y(c_x) -> y'(c_x)` for every input and every pair `y < y'`
/// (given as label indices).
pub fn hierarchy_kb(task: &ClassificationTask, order: &[(usize, usize)]) -> Result<KnowledgeBase, TheoryError> {
    let mut g = DiGraphMap::<usize, ()>::new();
    for &(a, b) in order {
        if a >= task.labels.len() || b >= task.labels.len() {
            return Err(TheoryError::Order("label index out of range".into()));
        }
        if a == b {
            return Err(TheoryError::Order(format!("`{}` < `{}`", task.labels[a], task.labels[a])));
        }
        g.add_edge(a, b, ());
    }
    if petgraph::algo::is_cyclic_directed(&g) {
        return Err(TheoryError::Order("cycle".into()));
    }
    let mut formulas = Vec::new();
    for x in 0..task.inputs.len() {
        for &(a, b) in order {
            formulas.push(task.atom(x, a).implies(task.atom(x, b)));
        }
    }
    Ok(KnowledgeBase::new(task.signature(), formulas))
}

/// Numbers that model probabilities can be kept in: `f64` or exact
/// rationals.
pub trait Weight:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn pow2_neg(k: usize) -> Self;
    fn exp_neg(k: usize) -> Option<Self>;
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
}

impl Weight for f64 {
    fn pow2_neg(k: usize) -> Self {
        0.5f64.powi(k as i32)
    }
    fn exp_neg(k: usize) -> Option<Self> {
        Some((-(k as f64)).exp())
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    fn pow2_neg(k: usize) -> Self {
        BigRational::new(BigInt::one(), BigInt::one() << k)
    }
    fn exp_neg(_: usize) -> Option<Self> {
        None
    }
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// The strictly decreasing `f` of the low-complexity prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightFn {
    /// `2^-k`
    #[default]
    Pow2,
    /// `e^-k`
    Exp,
    /// `table[k]`
    Table(Vec<f64>),
}

impl WeightFn {
    pub fn validate(&self) -> Result<(), TheoryError> {
        if let WeightFn::Table(t) = self {
            if t.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(TheoryError::Weight("table values must be positive".into()));
            }
            if t.windows(2).any(|w| w[1] >= w[0]) {
                return Err(TheoryError::Weight("table must be strictly decreasing".into()));
            }
        }
        Ok(())
    }

    pub fn eval<W: Weight>(&self, k: usize) -> Result<W, TheoryError> {
        match self {
            WeightFn::Pow2 => Ok(W::pow2_neg(k)),
            WeightFn::Exp => W::exp_neg(k).ok_or_else(|| TheoryError::Weight("e^-k has no exact rational value".into())),
            WeightFn::Table(t) => t
                .get(k)
                .and_then(|&v| W::from_f64(v))
                .ok_or_else(|| TheoryError::Weight(format!("table has no entry for k = {k}"))),
        }
    }
}

impl std::str::FromStr for WeightFn {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pow2" => Ok(WeightFn::Pow2),
            "exp" => Ok(WeightFn::Exp),
            _ => {
                let t = s
                    .strip_prefix("custom:")
                    .ok_or_else(|| format!("unknown weight function `{s}`"))?;
                let vals = t
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad table value `{v}`")))
                    .collect::<Result<Vec<_>, _>>()?;
                let f = WeightFn::Table(vals);
                f.validate().map_err(|e| e.to_string())?;
                Ok(f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityConfig {
    /// Exact search is attempted up to this many atoms.
    pub max_exact_atoms: usize,
    /// Work budget (candidate combinations) for one exact search.
    pub budget: u64,
    pub f: WeightFn,
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        ComplexityConfig {
            max_exact_atoms: 8,
            budget: 50_000_000,
            f: WeightFn::Pow2,
        }
    }
}

/// Truth table over at most 8 atoms: bit `m` is the value under mask `m`.
type Tt = [u64; 4];

#[derive(Debug, Clone, Copy)]
enum How {
    Atom(usize),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Implies(u32, u32),
    Iff(u32, u32),
}

/// Shortest-sentence search over truth tables by increasing symbol cost
/// (atoms and connectives cost 1). Sentences with equal truth tables are
/// merged, so commutative reorderings are never explored twice.
pub struct ComplexityOracle {
    n: usize,
    full: Tt,
    entries: Vec<(Tt, How)>,
    cost: HashMap<Tt, (usize, u32)>,
    levels: Vec<Vec<u32>>,
    work: u64,
    budget: u64,
    done: bool,
}

fn tt_not(a: &Tt, full: &Tt) -> Tt {
    std::array::from_fn(|i| !a[i] & full[i])
}

fn tt_bin(a: &Tt, b: &Tt, full: &Tt, f: impl Fn(u64, u64) -> u64) -> Tt {
    std::array::from_fn(|i| f(a[i], b[i]) & full[i])
}

impl ComplexityOracle {
    pub fn new(n: usize, budget: u64) -> Self {
        assert!(n <= 8, "truth tables hold at most 8 atoms");
        let worlds = 1usize << n;
        let mut full = [0u64; 4];
        for m in 0..worlds {
            full[m / 64] |= 1 << (m % 64);
        }
        ComplexityOracle {
            n,
            full,
            entries: Vec::new(),
            cost: HashMap::new(),
            levels: vec![Vec::new()],
            work: 0,
            budget,
            done: false,
        }
    }

    fn table_of_mask(&self, mask: u64) -> Tt {
        let mut t = [0u64; 4];
        t[(mask / 64) as usize] |= 1 << (mask % 64);
        t
    }

    fn add(&mut self, level: usize, t: Tt, how: How, out: &mut Vec<u32>) {
        if !self.cost.contains_key(&t) {
            let id = self.entries.len() as u32;
            self.entries.push((t, how));
            self.cost.insert(t, (level, id));
            out.push(id);
        }
    }

    /// Builds the next cost level. False once the budget is spent or every
    /// function has been found.
    fn grow(&mut self) -> bool {
        if self.done {
            return false;
        }
        let c = self.levels.len();
        let mut out = Vec::new();
        if c == 1 {
            for i in 0..self.n {
                let mut t = [0u64; 4];
                for m in 0..(1usize << self.n) {
                    if m >> i & 1 == 1 {
                        t[m / 64] |= 1 << (m % 64);
                    }
                }
                self.add(1, t, How::Atom(i), &mut out);
            }
        } else {
            let full = self.full;
            for k in 0..self.levels[c - 1].len() {
                let id = self.levels[c - 1][k];
                let t = tt_not(&self.entries[id as usize].0, &full);
                self.add(c, t, How::Not(id), &mut out);
            }
            for a in 1..c - 1 {
                let b = c - 1 - a;
                let (la, lb) = (self.levels[a].clone(), self.levels[b].clone());
                self.work += (la.len() * lb.len()) as u64;
                if self.work > self.budget {
                    self.done = true;
                    return false;
                }
                for &x in &la {
                    for &y in &lb {
                        let (tx, ty) = (self.entries[x as usize].0, self.entries[y as usize].0);
                        self.add(c, tt_bin(&tx, &ty, &full, |p, q| !p | q), How::Implies(x, y), &mut out);
                        if a > b || (a == b && x > y) {
                            continue;
                        }
                        self.add(c, tt_bin(&tx, &ty, &full, |p, q| p & q), How::And(x, y), &mut out);
                        self.add(c, tt_bin(&tx, &ty, &full, |p, q| p | q), How::Or(x, y), &mut out);
                        self.add(c, tt_bin(&tx, &ty, &full, |p, q| !(p ^ q)), How::Iff(x, y), &mut out);
                    }
                }
            }
        }
        self.levels.push(out);
        if self.cost.len() as f64 >= 2f64.powi(1 << self.n) {
            self.done = true;
        }
        true
    }

    fn formula(&self, id: u32, names: &[Formula]) -> Formula {
        let f = |i: u32| self.formula(i, names);
        match self.entries[id as usize].1 {
            How::Atom(i) => names[i].clone(),
            How::Not(a) => f(a).not(),
            How::And(a, b) => f(a).and(f(b)),
            How::Or(a, b) => f(a).or(f(b)),
            How::Implies(a, b) => f(a).implies(f(b)),
            How::Iff(a, b) => f(a).iff(f(b)),
        }
    }

    /// Least cost of a sentence whose only model is `mask`, with one such
    /// sentence over `names`; `None` when the budget runs out first.
    pub fn k_of_mask(&mut self, mask: u64, names: &[Formula]) -> Option<(usize, Formula)> {
        let t = self.table_of_mask(mask);
        loop {
            if let Some(&(k, id)) = self.cost.get(&t) {
                return Some((k, self.formula(id, names)));
            }
            if !self.grow() {
                return None;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Complexity {
    pub k: usize,
    pub witness: Formula,
    /// False when `k` is only the literal-conjunction upper bound.
    pub exact: bool,
}

fn literal_conjunction(m: &Interpretation<f64>) -> Result<Complexity, Error> {
    let bits = m.to_bools()?;
    let lits: Vec<Formula> = m
        .universe()
        .atoms()
        .zip(&bits)
        .map(|(a, &b)| if b { atom_formula(a) } else { atom_formula(a).not() })
        .collect();
    let n = lits.len();
    let negs = bits.iter().filter(|b| !**b).count();
    Ok(Complexity {
        k: (2 * n).saturating_sub(1) + negs,
        witness: Formula::conjunction(lits),
        exact: false,
    })
}

/// Complexity of a crisp interpretation using a shared oracle.
pub fn complexity_with(m: &Interpretation<f64>, oracle: Option<&mut ComplexityOracle>) -> Result<Complexity, Error> {
    let mask = m.to_mask()?;
    if let Some(o) = oracle {
        let names: Vec<Formula> = m.universe().atoms().map(atom_formula).collect();
        if let Some((k, witness)) = o.k_of_mask(mask, &names) {
            return Ok(Complexity { k, witness, exact: true });
        }
    }
    literal_conjunction(m)
}

/// `k(M)`: the cost of the shortest sentence whose unique model is `M`.
pub fn complexity_k(m: &Interpretation<f64>, cfg: &ComplexityConfig) -> Result<Complexity, Error> {
    let n = m.universe().len();
    if n == 0 {
        return Ok(Complexity {
            k: 0,
            witness: Formula::True,
            exact: true,
        });
    }
    if n > cfg.max_exact_atoms.min(8) {
        return literal_conjunction(m);
    }
    let mut o = ComplexityOracle::new(n, cfg.budget);
    complexity_with(m, Some(&mut o))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Synthetic { f: WeightFn, exact_k: bool },
    Empirical { trials: usize, seed: u64, failures: usize },
    Conditional,
}

/// Probabilities over models, listed by assignment mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDistribution<W> {
    pub universe: Arc<Universe>,
    pub support: Vec<u64>,
    pub probs: Vec<W>,
    /// Complexity per support member, when known.
    pub ks: Option<Vec<usize>>,
    /// Raw counts for empirical distributions.
    pub counts: Option<Vec<u64>>,
    pub provenance: Provenance,
}

impl<W: Weight> ModelDistribution<W> {
    pub fn prob_of(&self, mask: u64) -> W {
        self.support
            .iter()
            .position(|&m| m == mask)
            .map_or_else(W::zero, |i| self.probs[i].clone())
    }

    pub fn total(&self) -> W {
        self.probs.iter().cloned().fold(W::zero(), |a, b| a + b)
    }

    pub fn as_map(&self) -> BTreeMap<u64, f64> {
        self.support.iter().zip(&self.probs).map(|(&m, p)| (m, p.to_f64())).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let names = self.universe.names();
        let rows: Vec<serde_json::Value> = self
            .support
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let model: Vec<&String> = names.iter().enumerate().filter(|(j, _)| m >> j & 1 == 1).map(|(_, n)| n).collect();
                let mut row = serde_json::json!({
                    "mask": m,
                    "true_atoms": model,
                    "p": self.probs[i].to_f64(),
                });
                if let Some(ks) = &self.ks {
                    row["k"] = ks[i].into();
                }
                if let Some(cs) = &self.counts {
                    row["count"] = cs[i].into();
                }
                row
            })
            .collect();
        serde_json::json!({
            "atoms": names,
            "provenance": self.provenance,
            "models": rows,
        })
    }
}

/// Total-variation distance between two distributions over one universe.
pub fn total_variation<W: Weight>(p: &ModelDistribution<W>, q: &ModelDistribution<W>) -> f64 {
    let mut keys: BTreeSet<u64> = p.support.iter().copied().collect();
    keys.extend(q.support.iter().copied());
    keys.iter()
        .map(|&m| (p.prob_of(m).to_f64() - q.prob_of(m).to_f64()).abs())
        .sum::<f64>()
        / 2.0
}

/// Complexities of every model of `l` over `universe`, sharing one search.
fn model_ks(models: &[u64], universe: &Arc<Universe>, cfg: &ComplexityConfig) -> Result<(Vec<usize>, bool), Error> {
    let n = universe.len();
    let mut oracle = (n > 0 && n <= cfg.max_exact_atoms.min(8)).then(|| ComplexityOracle::new(n, cfg.budget));
    let mut exact = true;
    let mut ks = Vec::with_capacity(models.len());
    for &m in models {
        let interp = Interpretation::from_mask(universe.clone(), m);
        let c = if n == 0 {
            Complexity {
                k: 0,
                witness: Formula::True,
                exact: true,
            }
        } else {
            complexity_with(&interp, oracle.as_mut())?
        };
        exact &= c.exact;
        ks.push(c.k);
    }
    Ok((ks, exact))
}

/// `P_L(M) = f(k(M)) / Σ_{M' ⊨ L} f(k(M'))`.
pub fn synthetic_model_dist<W: Weight>(
    l: &KnowledgeBase,
    universe: &Arc<Universe>,
    cfg: &ComplexityConfig,
) -> Result<ModelDistribution<W>, Error> {
    cfg.f.validate()?;
    let models = enumerate_models(l, universe)?.masks()?;
    if models.is_empty() {
        return Err(TheoryError::NoModels.into());
    }
    let (ks, exact) = model_ks(&models, universe, cfg)?;
    let weights = ks.iter().map(|&k| cfg.f.eval::<W>(k)).collect::<Result<Vec<_>, _>>()?;
    let z = weights.iter().cloned().fold(W::zero(), |a, b| a + b);
    Ok(ModelDistribution {
        universe: universe.clone(),
        support: models,
        probs: weights.into_iter().map(|w| w / z.clone()).collect(),
        ks: Some(ks),
        counts: None,
        provenance: Provenance::Synthetic { f: cfg.f.clone(), exact_k: exact },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property1Report<W> {
    /// `P(M | M ⊨ L')`
    pub conditional: ModelDistribution<W>,
    /// `P(M ⊨ L')`
    pub mass: W,
    /// Predicted probability of the true model after adding `L'`, and the
    /// uplift factor `1 / P(M ⊨ L')` when it survives.
    pub true_model: Option<(W, W)>,
    /// Total variation between the prediction and an observed distribution.
    pub tv: Option<f64>,
}

/// Conditions `base` on the models of `l2`.
pub fn property1_check<W: Weight>(
    base: &ModelDistribution<W>,
    l2: &KnowledgeBase,
    m_true: Option<u64>,
    observed: Option<&ModelDistribution<W>>,
) -> Result<Property1Report<W>, Error> {
    let keep = enumerate_models(l2, &base.universe)?;
    let mut support = Vec::new();
    let mut kept = Vec::new();
    let mut ks = Vec::new();
    for (i, &m) in base.support.iter().enumerate() {
        if keep.contains_mask(m) {
            support.push(m);
            kept.push(base.probs[i].clone());
            if let Some(k) = &base.ks {
                ks.push(k[i]);
            }
        }
    }
    let mass = kept.iter().cloned().fold(W::zero(), |a, b| a + b);
    if mass <= W::zero() {
        return Err(TheoryError::ZeroMass.into());
    }
    let conditional = ModelDistribution {
        universe: base.universe.clone(),
        support,
        probs: kept.into_iter().map(|p| p / mass.clone()).collect(),
        ks: base.ks.as_ref().map(|_| ks),
        counts: None,
        provenance: Provenance::Conditional,
    };
    let true_model = m_true
        .filter(|&m| keep.contains_mask(m))
        .map(|m| (conditional.prob_of(m), W::one() / mass.clone()));
    let tv = observed.map(|o| total_variation(&conditional, o));
    Ok(Property1Report {
        conditional,
        mass,
        true_model,
        tv,
    })
}

/// `P_{L∪L'}(M) / P_L(M) = 1 + Z_{L−L'} / (Z_L − Z_{L−L'})`.
pub fn property2_ratio<W: Weight>(
    l: &KnowledgeBase,
    l2: &KnowledgeBase,
    m: u64,
    universe: &Arc<Universe>,
    cfg: &ComplexityConfig,
) -> Result<W, Error> {
    cfg.f.validate()?;
    let ml = enumerate_models(l, universe)?;
    let ml2 = enumerate_models(l2, universe)?;
    if !ml.contains_mask(m) || !ml2.contains_mask(m) {
        return Err(TheoryError::NotAModel.into());
    }
    let models = ml.masks()?;
    let (ks, _) = model_ks(&models, universe, cfg)?;
    let mut z = W::zero();
    let mut removed = W::zero();
    for (&mm, &k) in models.iter().zip(&ks) {
        let w = cfg.f.eval::<W>(k)?;
        if !ml2.contains_mask(mm) {
            removed = removed + w.clone();
        }
        z = z + w;
    }
    let denom = z - removed.clone();
    assert!(denom > W::zero(), "a surviving model keeps the denominator positive");
    Ok(W::one() + removed / denom)
}

/// Hidden-layer network for a task: input slots `x[0..d]`, a sigmoid hidden
/// layer, one sigmoid output `y(x)` per label. Parameters start at zero.
pub fn task_network(task: &ClassificationTask, hidden: usize) -> Result<(Network<f64>, DatLayout), Error> {
    let d = task.inputs.first().map_or(0, |v| v.len());
    if task.inputs.iter().any(|v| v.len() != d) {
        return Err(TheoryError::Task("inputs have different lengths".into()).into());
    }
    let mut b = NetworkBuilder::new();
    let xs: Vec<usize> = (0..d)
        .map(|i| b.neuron(0.0, Activation::Identity, Role::Var { arg: "x".into(), index: i }))
        .collect();
    let hs: Vec<usize> = (0..hidden).map(|_| b.neuron(0.0, Activation::Sigmoid, Role::Hidden)).collect();
    for &h in &hs {
        for &x in &xs {
            b.edge(x, h, 0.0);
        }
    }
    let feed = if hidden == 0 { &xs } else { &hs };
    for y in &task.labels {
        let o = b.neuron(
            0.0,
            Activation::Sigmoid,
            Role::Pred {
                name: y.clone(),
                args: vec!["x".into()],
            },
        );
        for &h in feed {
            b.edge(h, o, 0.0);
        }
    }
    let net = b.build(UpdateMode::Feedforward)?;
    let domain: IndexMap<String, Vec<f64>> = task
        .inputs
        .iter()
        .enumerate()
        .map(|(i, v)| (ClassificationTask::constant(i), v.clone()))
        .collect();
    for (i, v) in task.inputs.iter().enumerate() {
        if task.inputs[..i].contains(v) {
            return Err(TheoryError::Task(format!("input {i} repeats an earlier input")).into());
        }
    }
    let preds: Vec<&str> = task.labels.iter().map(|s| s.as_str()).collect();
    let spec = EncodingSpec::dat(&net, &["x"], &preds, Some(domain), task.inputs.clone(), Agg::Intersection)?;
    match spec.map {
        EncodingMap::Dat(layout) => Ok((net, layout)),
        _ => unreachable!("dat spec"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConfig {
    pub train: TrainConfig,
    pub trials: usize,
    pub hidden: usize,
    pub closed_world: bool,
}

/// The crisp interpretation a trained network defines on the task's
/// inputs, rounded at 0.5.
pub fn network_interpretation(net: &Network<f64>, layout: &DatLayout, task: &ClassificationTask) -> Result<Interpretation<f64>, Error> {
    let u = Arc::new(task.universe());
    let mut values = vec![0.0; u.len()];
    for x in 0..task.inputs.len() {
        let c = ClassificationTask::constant(x);
        let out = output_probs(net, layout, &[c.as_str()])?;
        for (y, label) in task.labels.iter().enumerate() {
            let atom = GroundAtom {
                pred: label.clone(),
                args: vec![c.clone()],
            };
            let idx = u.index_of(&atom).expect("task atom");
            values[idx] = if out.get(y) >= 0.5 { 1.0 } else { 0.0 };
        }
    }
    Ok(Interpretation::new(u, values)?)
}

/// Histogram of the models trained networks land nearest to. Trial `t`
/// draws its initial weights from seed `seed + t`; the nearest model is
/// taken among the models of the knowledge the trainer actually weighs
/// (`L_train`, plus `L_extra` when its weight is positive).
pub fn empirical_model_dist(
    task: &ClassificationTask,
    l_extra: &KnowledgeBase,
    cfg: &EmpiricalConfig,
) -> Result<ModelDistribution<f64>, Error> {
    if cfg.trials == 0 {
        return Err(TheoryError::Trials(0).into());
    }
    let (net, layout) = task_network(task, cfg.hidden)?;
    let l_train = task_to_kb(task, cfg.closed_world);
    let target = if cfg.train.lambda_kb > 0.0 {
        l_train.union(l_extra)
    } else {
        l_train.clone()
    };
    let u = Arc::new(task.universe());
    if enumerate_models(&target, &u)?.is_empty() {
        return Err(TheoryError::NoModels.into());
    }
    let groundings: Vec<VariableAssignment> = (0..task.inputs.len())
        .map(|i| VariableAssignment::new().with("x", &ClassificationTask::constant(i)))
        .collect();
    let init = cfg.train.init.unwrap_or(1.0);
    let outcomes: Vec<Option<u64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Option<u64>, Error> {
            let tc = TrainConfig {
                seed: cfg.train.seed.wrapping_add(t as u64),
                init: Some(init),
                ..cfg.train
            };
            let trained = match train_soft(&net, &l_train, l_extra, &groundings, &layout, &tc) {
                Ok((n, _)) => n,
                Err(Error::Soft(crate::soft::SoftError::Diverged { .. })) => return Ok(None),
                Err(e) => return Err(e),
            };
            let m = network_interpretation(&trained, &layout, task)?;
            let (_, nearest) = distance_to_kb(&m, &target)?;
            Ok(Some(nearest.to_mask()?))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut failures = 0;
    for o in outcomes {
        match o {
            Some(m) => *hist.entry(m).or_default() += 1,
            None => failures += 1,
        }
    }
    let ok = (cfg.trials - failures) as f64;
    Ok(ModelDistribution {
        universe: u,
        support: hist.keys().copied().collect(),
        probs: hist.values().map(|&c| c as f64 / ok).collect(),
        ks: None,
        counts: Some(hist.values().copied().collect()),
        provenance: Provenance::Empirical {
            trials: cfg.trials,
            seed: cfg.train.seed,
            failures,
        },
    })
}
