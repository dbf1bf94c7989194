//! Encoding maps from network states to sets of interpretations, the
//! represented set M_N, and the neural-model / semantic-encoding checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::logic::universe::tuples;
use crate::logic::{
    enumerate_models, kb_universe, Cube, Formula, GroundAtom, Interpretation, InterpretationSet, KnowledgeBase,
    Universe,
};
use crate::network::{compute_x_inf, compute_x_inf_with, LimitSet, Network, Role, UpdateMode};
use crate::scalar::{self, Scalar};
use crate::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EncodingError {
    #[error("invalid encoding: {0}")]
    Invalid(String),

    #[error("neuron {neuron} has non-binary value {value}")]
    NonBinary { neuron: usize, value: f64 },

    #[error("inputs of variable `{var}` ({values:?}) encode no domain element")]
    Undecodable { var: String, values: Vec<f64> },

    #[error("state {0} is not listed in the encoding table")]
    NotInTable(String),

    #[error("fuzzy reading needs {0}")]
    Fuzzy(String),

    #[error("encoding JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Agg {
    #[default]
    Union,
    Intersection,
}

impl std::str::FromStr for Agg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "union" => Ok(Agg::Union),
            "intersection" => Ok(Agg::Intersection),
            other => Err(format!("unknown aggregation `{other}`")),
        }
    }
}

/// Distributed-atoms layout: variable slots on the inputs, predicate truth
/// values on the outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DatLayout {
    pub vars: Vec<String>,
    pub preds: Vec<String>,
    /// Element name to its encoding on a variable's input neurons.
    pub domain: IndexMap<String, Vec<f64>>,
    /// Input rows, one value per input neuron in id order.
    pub inputs: Vec<Vec<f64>>,
    var_neurons: Vec<Vec<usize>>,
    /// `(neuron, predicate, argument variable indices)`
    pred_neurons: Vec<(usize, String, Vec<usize>)>,
}

impl DatLayout {
    pub fn var_neurons(&self) -> &[Vec<usize>] {
        &self.var_neurons
    }

    pub fn pred_neurons(&self) -> &[(usize, String, Vec<usize>)] {
        &self.pred_neurons
    }

    /// Domain element whose encoding matches the var's input values.
    pub fn decode<T: Scalar>(&self, var: usize, x: &[T]) -> Result<usize, EncodingError> {
        let vals: Vec<f64> = self.var_neurons[var].iter().map(|&i| x[i].as_f64()).collect();
        self.domain
            .values()
            .position(|enc| enc.iter().zip(&vals).all(|(a, b)| (a - b).abs() <= 1e-9))
            .ok_or_else(|| EncodingError::Undecodable {
                var: self.vars[var].clone(),
                values: vals,
            })
    }

    /// Ground atom named by output neuron `k` of `pred_neurons` under the
    /// decoded variable elements.
    fn ground_atom(&self, k: usize, elems: &[usize]) -> GroundAtom {
        let (_, pred, args) = &self.pred_neurons[k];
        let names: Vec<&String> = self.domain.keys().collect();
        GroundAtom {
            pred: pred.clone(),
            args: args.iter().map(|&v| names[elems[v]].clone()).collect(),
        }
    }
}

/// Explicit state-to-set table over the visible neurons.
#[derive(Debug, Clone, PartialEq)]
pub struct TableMap {
    pub visible: Vec<usize>,
    pub entries: Vec<(Vec<f64>, Vec<Cube>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EncodingMap {
    /// Neurons-as-atoms: `(neuron, atom index)` pairs.
    Nat(Vec<(usize, usize)>),
    Dat(DatLayout),
    Table(TableMap),
}

/// An encoding map together with its aggregation function and the atom
/// universe it speaks about.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingSpec {
    pub map: EncodingMap,
    pub agg: Agg,
    universe: Arc<Universe>,
    /// Keep only period-1 limit states.
    pub stable_only: bool,
    /// Values at or above this count as true (crisp reading of graded units).
    pub threshold: Option<f64>,
}

impl EncodingSpec {
    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    /// NAT over explicit `(neuron, atom name)` pairs.
    pub fn nat<T: Scalar>(net: &Network<T>, atoms: &[(usize, &str)], agg: Agg) -> Result<Self, EncodingError> {
        let mut names: Vec<&str> = Vec::new();
        let mut pairs = Vec::new();
        let mut sorted = atoms.to_vec();
        sorted.sort_by_key(|(n, _)| *n);
        for (neuron, name) in sorted {
            if neuron >= net.len() {
                return Err(EncodingError::Invalid(format!("neuron {neuron} does not exist")));
            }
            if !net.neuron(neuron).role.is_visible() {
                return Err(EncodingError::Invalid(format!("neuron {neuron} is hidden")));
            }
            if pairs.iter().any(|&(n, _)| n == neuron) {
                return Err(EncodingError::Invalid(format!("neuron {neuron} is mapped twice")));
            }
            if names.contains(&name) {
                return Err(EncodingError::Invalid(format!("atom `{name}` is mapped from two neurons")));
            }
            pairs.push((neuron, names.len()));
            names.push(name);
        }
        Ok(EncodingSpec {
            map: EncodingMap::Nat(pairs),
            agg,
            universe: Arc::new(Universe::propositional(&names)),
            stable_only: false,
            threshold: None,
        })
    }

    /// NAT read off the `Atom` roles. When an atom labels several neurons
    /// (inputs and outputs of a compiled program) the non-input one is used.
    pub fn nat_from_roles<T: Scalar>(net: &Network<T>, agg: Agg) -> Result<Self, EncodingError> {
        let mut chosen: IndexMap<String, usize> = IndexMap::new();
        for (i, n) in net.neurons().iter().enumerate() {
            if let Role::Atom { name } = &n.role {
                match chosen.get(name) {
                    Some(&prev) if !net.is_input(prev) => {}
                    _ => {
                        chosen.insert(name.clone(), i);
                    }
                }
            }
        }
        let pairs: Vec<(usize, &str)> = chosen.iter().map(|(a, &n)| (n, a.as_str())).collect();
        EncodingSpec::nat(net, &pairs, agg)
    }

    /// DAT from the `Var`/`Pred` roles. Without an explicit domain the
    /// distinct encodings seen in `inputs` become elements `d0, d1, ...`.
    pub fn dat<T: Scalar>(
        net: &Network<T>,
        vars: &[&str],
        preds: &[&str],
        domain: Option<IndexMap<String, Vec<f64>>>,
        inputs: Vec<Vec<f64>>,
        agg: Agg,
    ) -> Result<Self, EncodingError> {
        if net.update_mode() != UpdateMode::Feedforward {
            return Err(EncodingError::Invalid("distributed atoms need a feedforward network".into()));
        }
        let mut var_neurons = Vec::new();
        for v in vars {
            let mut slots: Vec<(usize, usize)> = net
                .neurons()
                .iter()
                .filter_map(|n| match &n.role {
                    Role::Var { arg, index } if arg == v => Some((*index, n.id)),
                    _ => None,
                })
                .collect();
            slots.sort();
            if slots.is_empty() || slots.iter().enumerate().any(|(k, &(idx, _))| idx != k) {
                return Err(EncodingError::Invalid(format!(
                    "variable `{v}` needs input neurons with indices 0, 1, ..."
                )));
            }
            var_neurons.push(slots.into_iter().map(|(_, id)| id).collect::<Vec<_>>());
        }
        let inputs_ids = net.inputs();
        let mut var_ids: Vec<usize> = var_neurons.iter().flatten().copied().collect();
        var_ids.sort();
        if var_ids != inputs_ids {
            return Err(EncodingError::Invalid(
                "the network's input neurons must be exactly the variable slots".into(),
            ));
        }
        let mut pred_neurons = Vec::new();
        let mut arity: IndexMap<String, usize> = IndexMap::new();
        for n in net.neurons() {
            if let Role::Pred { name, args } = &n.role {
                if !preds.contains(&name.as_str()) {
                    continue;
                }
                let idx = args
                    .iter()
                    .map(|a| {
                        vars.iter()
                            .position(|v| v == a)
                            .ok_or_else(|| EncodingError::Invalid(format!("`{name}` uses unknown variable `{a}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if *arity.entry(name.clone()).or_insert(idx.len()) != idx.len() {
                    return Err(EncodingError::Invalid(format!("predicate `{name}` used with two arities")));
                }
                if net.is_input(n.id) {
                    return Err(EncodingError::Invalid(format!("predicate neuron {} is an input", n.id)));
                }
                pred_neurons.push((n.id, name.clone(), idx));
            }
        }
        for p in preds {
            if !arity.contains_key(*p) {
                return Err(EncodingError::Invalid(format!("no output neuron for predicate `{p}`")));
            }
        }
        let dims: Vec<usize> = var_neurons.iter().map(|v| v.len()).collect();
        let domain = match domain {
            Some(d) => d,
            None => {
                let mut d: IndexMap<String, Vec<f64>> = IndexMap::new();
                for row in &inputs {
                    let mut at = 0;
                    for &k in &dims {
                        let enc = row.get(at..at + k).map(|s| s.to_vec()).unwrap_or_default();
                        at += k;
                        if !d.values().any(|e| *e == enc) {
                            let name = format!("d{}", d.len());
                            d.insert(name, enc);
                        }
                    }
                }
                d
            }
        };
        if domain.is_empty() {
            return Err(EncodingError::Invalid("empty domain".into()));
        }
        for (e, enc) in &domain {
            if dims.iter().any(|&k| k != enc.len()) {
                return Err(EncodingError::Invalid(format!("encoding of `{e}` has the wrong length")));
            }
        }
        for row in &inputs {
            if row.len() != inputs_ids.len() {
                return Err(EncodingError::Invalid(format!(
                    "input row has {} values, network has {} inputs",
                    row.len(),
                    inputs_ids.len()
                )));
            }
        }
        let names: Vec<String> = domain.keys().cloned().collect();
        let mut atoms = Vec::new();
        for (p, &k) in &arity {
            for t in tuples(names.len(), k) {
                atoms.push(GroundAtom {
                    pred: p.clone(),
                    args: t.iter().map(|&i| names[i].clone()).collect(),
                });
            }
        }
        let universe = Arc::new(Universe::new(atoms, names));
        Ok(EncodingSpec {
            map: EncodingMap::Dat(DatLayout {
                vars: vars.iter().map(|v| v.to_string()).collect(),
                preds: preds.iter().map(|p| p.to_string()).collect(),
                domain,
                inputs,
                var_neurons,
                pred_neurons,
            }),
            agg,
            universe,
            stable_only: false,
            threshold: None,
        })
    }

    pub fn table<T: Scalar>(
        net: &Network<T>,
        universe: Universe,
        visible: Vec<usize>,
        entries: Vec<(Vec<f64>, Vec<Cube>)>,
        agg: Agg,
    ) -> Result<Self, EncodingError> {
        for &v in &visible {
            if v >= net.len() || !net.neuron(v).role.is_visible() {
                return Err(EncodingError::Invalid(format!("neuron {v} is not a visible neuron")));
            }
        }
        for (state, cubes) in &entries {
            if state.len() != visible.len() {
                return Err(EncodingError::Invalid("table state has the wrong length".into()));
            }
            if cubes.iter().flat_map(|c| c.0.keys()).any(|&a| a >= universe.len()) {
                return Err(EncodingError::Invalid("table entry names an atom outside its universe".into()));
            }
        }
        Ok(EncodingSpec {
            map: EncodingMap::Table(TableMap { visible, entries }),
            agg,
            universe: Arc::new(universe),
            stable_only: false,
            threshold: None,
        })
    }

    /// Admissibility warnings: a table whose image ignores the visible
    /// values represents nothing about the network.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let EncodingMap::Table(t) = &self.map {
            let mut states: Vec<&Vec<f64>> = t.entries.iter().map(|(s, _)| s).collect();
            states.dedup();
            let first = t.entries.first().map(|(_, c)| {
                let mut c = c.clone();
                c.sort();
                c
            });
            let constant = t.entries.iter().all(|(_, c)| {
                let mut c = c.clone();
                c.sort();
                Some(c) == first
            });
            if t.entries.len() > 1 && states.len() > 1 && constant {
                out.push("table encoding maps every listed state to the same set; it ignores the visible values".into());
            }
        }
        out
    }

    fn read<T: Scalar>(&self, neuron: usize, v: T) -> Result<bool, EncodingError> {
        if let Some(th) = self.threshold {
            return Ok(v.as_f64() >= th);
        }
        if scalar::is_crisp(v) {
            Ok(v == T::one())
        } else {
            Err(EncodingError::NonBinary {
                neuron,
                value: v.as_f64(),
            })
        }
    }
}

/// `i(x)`: the interpretations a single network state stands for.
pub fn apply_encoding<T: Scalar>(spec: &EncodingSpec, x: &[T]) -> Result<InterpretationSet, EncodingError> {
    let cube = match &spec.map {
        EncodingMap::Nat(pairs) => {
            let mut c = Cube::new();
            for &(neuron, atom) in pairs {
                let v = *x
                    .get(neuron)
                    .ok_or_else(|| EncodingError::Invalid(format!("state lacks neuron {neuron}")))?;
                c = c.fix(atom, spec.read(neuron, v)?);
            }
            Some(c)
        }
        EncodingMap::Dat(layout) => {
            let elems = (0..layout.vars.len())
                .map(|v| layout.decode(v, x))
                .collect::<Result<Vec<_>, _>>()?;
            let mut c = Some(Cube::new());
            for (k, &(neuron, _, _)) in layout.pred_neurons.iter().enumerate() {
                let atom = layout.ground_atom(k, &elems);
                let idx = spec.universe.index_of(&atom).expect("layout atoms are in the universe");
                let v = spec.read(neuron, x[neuron])?;
                c = c.and_then(|c| c.intersect(&Cube::new().fix(idx, v)));
            }
            c
        }
        EncodingMap::Table(t) => {
            let key: Vec<f64> = t.visible.iter().map(|&i| x[i].as_f64()).collect();
            let (_, cubes) = t
                .entries
                .iter()
                .find(|(s, _)| *s == key)
                .ok_or_else(|| EncodingError::NotInTable(format!("{key:?}")))?;
            return Ok(InterpretationSet::from_cubes(spec.universe.clone(), cubes.clone()));
        }
    };
    Ok(InterpretationSet::from_cubes(spec.universe.clone(), cube.into_iter().collect()))
}

/// Union or intersection of a family of sets over one universe. The empty
/// union is empty, the empty intersection is everything.
pub fn aggregate(
    agg: Agg,
    universe: &Arc<Universe>,
    sets: &[InterpretationSet],
) -> Result<InterpretationSet, Error> {
    let mut acc = match agg {
        Agg::Union => InterpretationSet::empty(universe.clone()),
        Agg::Intersection => InterpretationSet::all(universe.clone()),
    };
    for s in sets {
        acc = match agg {
            Agg::Union => acc.union(s)?,
            Agg::Intersection => acc.intersection(s)?,
        };
    }
    if universe.len() <= crate::logic::MAX_EXPLICIT_ATOMS {
        acc = acc.to_explicit()?;
    }
    Ok(acc)
}

/// The limit states an encoding is evaluated on.
pub fn limit_states<T: Scalar>(net: &Network<T>, spec: &EncodingSpec) -> Result<LimitSet<T>, Error> {
    let x = match &spec.map {
        EncodingMap::Dat(layout) => {
            let rows: Vec<Vec<T>> = layout
                .inputs
                .iter()
                .map(|r| r.iter().map(|&v| T::lit(v)).collect())
                .collect();
            compute_x_inf_with(net, &rows)?
        }
        _ => compute_x_inf(net)?,
    };
    Ok(if spec.stable_only { x.stable_only() } else { x })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MnResult<T> {
    pub m_n: InterpretationSet,
    pub limit: LimitSet<T>,
}

/// `M_N = Agg({ i(x) | x in X_inf })`.
pub fn compute_m_n<T: Scalar>(net: &Network<T>, spec: &EncodingSpec) -> Result<MnResult<T>, Error> {
    let limit = limit_states(net, spec)?;
    let sets = limit
        .states
        .iter()
        .map(|x| apply_encoding(spec, x))
        .collect::<Result<Vec<_>, _>>()?;
    let m_n = aggregate(spec.agg, &spec.universe, &sets)?;
    Ok(MnResult { m_n, limit })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingVerdict {
    pub m_n: InterpretationSet,
    pub m_l: InterpretationSet,
    /// `∅ ⊂ M_N ⊆ M_L`
    pub is_neural_model: bool,
    /// `M_N = M_L` (and non-empty)
    pub is_semantic_encoding: bool,
    /// A member of `M_N` outside `M_L`.
    pub counterexample: Option<Interpretation<f64>>,
    /// A model of `L` missing from `M_N`.
    pub missing: Option<Interpretation<f64>>,
}

/// Compares `M_N` and `M_L` over the union of the two universes (the KB's
/// atoms first).
pub fn compare_with_kb(m_n: &InterpretationSet, l: &KnowledgeBase) -> Result<EncodingVerdict, Error> {
    let u = Arc::new(kb_universe(l).merged(m_n.universe()));
    let m_n = m_n.reindex(&u)?.to_explicit()?;
    let m_l = enumerate_models(l, &u)?;
    let extra = m_n.difference(&m_l)?.masks()?;
    let missing = m_l.difference(&m_n)?.masks()?;
    let pick = |ms: &[u64]| ms.first().map(|&m| Interpretation::from_mask(u.clone(), m));
    let subset = extra.is_empty();
    let nonempty = !m_n.is_empty();
    Ok(EncodingVerdict {
        is_neural_model: nonempty && subset,
        is_semantic_encoding: nonempty && subset && missing.is_empty(),
        counterexample: pick(&extra),
        missing: pick(&missing),
        m_n,
        m_l,
    })
}

pub fn check_neural_model<T: Scalar>(
    net: &Network<T>,
    spec: &EncodingSpec,
    l: &KnowledgeBase,
) -> Result<EncodingVerdict, Error> {
    compare_with_kb(&compute_m_n(net, spec)?.m_n, l)
}

/// Same verdict as [`check_neural_model`]; `is_semantic_encoding` is the
/// practical criterion `M_N = M_L`.
pub fn check_semantic_encoding<T: Scalar>(
    net: &Network<T>,
    spec: &EncodingSpec,
    l: &KnowledgeBase,
) -> Result<EncodingVerdict, Error> {
    check_neural_model(net, spec, l)
}

/// Graded reading of the limit states: one fuzzy interpretation per state
/// under NAT; under DAT with intersection, the single interpretation
/// assembled from all input rows.
pub fn fuzzy_interpretations<T: Scalar>(net: &Network<T>, spec: &EncodingSpec) -> Result<Vec<Interpretation<T>>, Error> {
    let limit = limit_states(net, spec)?;
    match &spec.map {
        EncodingMap::Nat(pairs) => limit
            .states
            .iter()
            .map(|x| {
                let mut values = vec![T::zero(); spec.universe.len()];
                for &(neuron, atom) in pairs {
                    values[atom] = x[neuron];
                }
                Ok(Interpretation::new(spec.universe.clone(), values)?)
            })
            .collect(),
        EncodingMap::Dat(layout) => {
            if spec.agg != Agg::Intersection {
                return Err(EncodingError::Fuzzy("intersection aggregation for distributed atoms".into()).into());
            }
            let mut values: Vec<Option<T>> = vec![None; spec.universe.len()];
            for x in &limit.states {
                let elems = (0..layout.vars.len())
                    .map(|v| layout.decode(v, x))
                    .collect::<Result<Vec<_>, _>>()?;
                for (k, &(neuron, _, _)) in layout.pred_neurons.iter().enumerate() {
                    let idx = spec.universe.index_of(&layout.ground_atom(k, &elems)).expect("in universe");
                    match values[idx] {
                        Some(v) if (v - x[neuron]).abs() > T::lit(1e-12) => {
                            return Err(EncodingError::Fuzzy(format!(
                                "consistent values; `{}` is read twice with different values",
                                spec.universe.atom(idx)
                            ))
                            .into())
                        }
                        _ => values[idx] = Some(x[neuron]),
                    }
                }
            }
            let values = values
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    v.ok_or_else(|| {
                        EncodingError::Fuzzy(format!("an input row grounding `{}`", spec.universe.atom(i)))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(vec![Interpretation::new(spec.universe.clone(), values)?])
        }
        EncodingMap::Table(_) => Err(EncodingError::Fuzzy("a NAT or DAT encoding".into()).into()),
    }
}

/// `Y_i <-> ~Y_1 & ... & ~Y_n` (without `~Y_i`) for each `i`: exactly one
/// `Y_i` holds.
pub fn softmax_kb(n: usize) -> Result<KnowledgeBase, EncodingError> {
    if n < 2 {
        return Err(EncodingError::Invalid("softmax knowledge base needs n >= 2".into()));
    }
    let y = |i: usize| Formula::atom(&format!("Y{i}"));
    let formulas = (1..=n)
        .map(|i| y(i).iff(Formula::conjunction((1..=n).filter(|&j| j != i).map(|j| y(j).not()))))
        .collect();
    Ok(KnowledgeBase::from_formulas(formulas))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SpecJson {
    Nat {
        atoms: BTreeMap<String, String>,
        #[serde(default)]
        agg: Agg,
        #[serde(default)]
        stable_only: bool,
        #[serde(default)]
        threshold: Option<f64>,
    },
    Dat {
        vars: Vec<String>,
        preds: Vec<String>,
        #[serde(default)]
        domain: Option<IndexMap<String, Vec<f64>>>,
        inputs: Vec<Vec<f64>>,
        #[serde(default = "intersection")]
        agg: Agg,
        #[serde(default)]
        threshold: Option<f64>,
    },
    Table {
        universe: Vec<String>,
        visible: Vec<usize>,
        entries: Vec<TableEntryJson>,
        #[serde(default)]
        agg: Agg,
    },
}

fn intersection() -> Agg {
    Agg::Intersection
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableEntryJson {
    state: Vec<f64>,
    set: Vec<BTreeMap<String, u8>>,
}

impl EncodingSpec {
    /// Reads the encoding JSON format against the network it describes.
    pub fn from_json<T: Scalar>(net: &Network<T>, text: &str) -> Result<Self, EncodingError> {
        let doc: SpecJson = serde_json::from_str(text).map_err(|e| EncodingError::Json(e.to_string()))?;
        match doc {
            SpecJson::Nat {
                atoms,
                agg,
                stable_only,
                threshold,
            } => {
                let pairs = atoms
                    .iter()
                    .map(|(k, v)| {
                        k.parse::<usize>()
                            .map(|n| (n, v.as_str()))
                            .map_err(|_| EncodingError::Json(format!("`{k}` is not a neuron id")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let mut s = EncodingSpec::nat(net, &pairs, agg)?;
                s.stable_only = stable_only;
                s.threshold = threshold;
                Ok(s)
            }
            SpecJson::Dat {
                vars,
                preds,
                domain,
                inputs,
                agg,
                threshold,
            } => {
                let vars: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
                let preds: Vec<&str> = preds.iter().map(|s| s.as_str()).collect();
                let mut s = EncodingSpec::dat(net, &vars, &preds, domain, inputs, agg)?;
                s.threshold = threshold;
                Ok(s)
            }
            SpecJson::Table {
                universe,
                visible,
                entries,
                agg,
            } => {
                let u = Universe::new(
                    universe.iter().map(|a| GroundAtom::parse(a).unwrap_or_else(|| GroundAtom::prop(a))),
                    Vec::new(),
                );
                let entries = entries
                    .into_iter()
                    .map(|e| {
                        let cubes = e
                            .set
                            .iter()
                            .map(|c| {
                                let mut cube = Cube::new();
                                for (a, &v) in c {
                                    let i = u
                                        .index_of_name(a)
                                        .ok_or_else(|| EncodingError::Invalid(format!("unknown atom `{a}`")))?;
                                    cube = cube.fix(i, v != 0);
                                }
                                Ok(cube)
                            })
                            .collect::<Result<Vec<_>, EncodingError>>()?;
                        Ok((e.state, cubes))
                    })
                    .collect::<Result<Vec<_>, EncodingError>>()?;
                EncodingSpec::table(net, u, visible, entries, agg)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_kb, KbKind};
    use crate::network::{Activation, NetworkBuilder};
    use crate::programs::{compile_cilp, LogicProgram};

    fn two_cycle() -> Network<f64> {
        let mut b = NetworkBuilder::new();
        let a = b.neuron(2.0, Activation::StepGeq0, Role::atom("A"));
        let c = b.neuron(2.0, Activation::StepGeq0, Role::atom("B"));
        b.edge(a, a, -1.0).edge(c, c, -1.0).edge(a, c, -1.5).edge(c, a, -1.5);
        b.build(UpdateMode::Synchronous).unwrap()
    }

    fn kb(text: &str) -> KnowledgeBase {
        parse_kb(text, KbKind::Prop).unwrap()
    }

    #[test]
    fn nat_state_denotes_a_cube() {
        let n = two_cycle();
        let spec = EncodingSpec::nat_from_roles(&n, Agg::Union).unwrap();
        let s = apply_encoding(&spec, &[0.0, 1.0]).unwrap();
        assert_eq!(s.to_explicit().unwrap().masks().unwrap(), vec![0b10]);
    }

    #[test]
    fn two_cycle_is_a_semantic_encoding() {
        let n = two_cycle();
        let spec = EncodingSpec::nat_from_roles(&n, Agg::Union).unwrap();
        let v = check_semantic_encoding(&n, &spec, &kb("(A & B) | (~A & ~B).")).unwrap();
        assert!(v.is_neural_model && v.is_semantic_encoding);
    }

    #[test]
    fn two_cycle_against_conjunction() {
        let n = two_cycle();
        let spec = EncodingSpec::nat_from_roles(&n, Agg::Union).unwrap();
        let v = check_neural_model(&n, &spec, &kb("A & B.")).unwrap();
        assert!(!v.is_neural_model);
        assert_eq!(v.counterexample.unwrap().to_mask().unwrap(), 0);
    }

    #[test]
    fn two_cycle_against_tautology() {
        let n = two_cycle();
        let spec = EncodingSpec::nat_from_roles(&n, Agg::Union).unwrap();
        let v = check_neural_model(&n, &spec, &kb("atoms A B;\nA | ~A.")).unwrap();
        assert!(v.is_neural_model);
        assert!(!v.is_semantic_encoding);
    }

    #[test]
    fn intersection_of_contradictory_states_is_empty() {
        let n = two_cycle();
        let spec = EncodingSpec::nat_from_roles(&n, Agg::Intersection).unwrap();
        let v = check_neural_model(&n, &spec, &kb("A | ~A.")).unwrap();
        assert!(v.m_n.is_empty());
        assert!(!v.is_neural_model);
    }

    #[test]
    fn hidden_only_network_is_unconstrained() {
        let mut b = NetworkBuilder::<f64>::new();
        b.neuron(0.0, Activation::StepGeq0, Role::Hidden);
        let n = b.build(UpdateMode::Synchronous).unwrap();
        let spec = EncodingSpec::nat(&n, &[], Agg::Union).unwrap();
        let s = apply_encoding(&spec, &[1.0]).unwrap();
        assert_eq!(s.cubes().unwrap(), &[Cube::new()]);
    }

    #[test]
    fn hidden_neurons_cannot_be_named() {
        let mut b = NetworkBuilder::<f64>::new();
        b.neuron(0.0, Activation::StepGeq0, Role::Hidden);
        let n = b.build(UpdateMode::Synchronous).unwrap();
        assert!(EncodingSpec::nat(&n, &[(0, "A")], Agg::Union).is_err());
    }

    #[test]
    fn compiled_program_stable_state() {
        let p = LogicProgram::from_clauses(&["A", "B", "C"], &[("C", &["A"]), ("C", &["B"]), ("A", &[])]).unwrap();
        let net = compile_cilp::<f64>(&p);
        let mut spec = EncodingSpec::nat_from_roles(&net, Agg::Union).unwrap();
        spec.stable_only = true;
        let r = compute_m_n(&net, &spec).unwrap();
        assert_eq!(r.m_n.masks().unwrap(), vec![0b101]);
    }

    #[test]
    fn softmax_kb_models() {
        let l = softmax_kb(3).unwrap();
        let u = Arc::new(kb_universe(&l));
        assert_eq!(enumerate_models(&l, &u).unwrap().masks().unwrap(), vec![1, 2, 4]);
        assert_eq!(softmax_kb(2).unwrap().sentences[0].formula.to_string(), "Y1 <-> ~Y2");
        assert!(softmax_kb(1).is_err());
    }

    fn dat_net() -> Network<f64> {
        // P(x) holds for the element encoded as 1
        let mut b = NetworkBuilder::new();
        let x = b.neuron(0.0, Activation::Identity, Role::Var { arg: "x".into(), index: 0 });
        let p = b.neuron(-0.5, Activation::StepGeq0, Role::Pred { name: "P".into(), args: vec!["x".into()] });
        b.edge(x, p, 1.0);
        b.build(UpdateMode::Feedforward).unwrap()
    }

    #[test]
    fn dat_grounds_by_input_values() {
        let n = dat_net();
        let domain = IndexMap::from([("a".to_string(), vec![0.0]), ("b".to_string(), vec![1.0])]);
        let spec = EncodingSpec::dat(&n, &["x"], &["P"], Some(domain), vec![vec![0.0], vec![1.0]], Agg::Intersection).unwrap();
        let one = apply_encoding(&spec, &[1.0, 1.0]).unwrap();
        assert_eq!(one.to_explicit().unwrap().masks().unwrap(), vec![0b10, 0b11]);
        let r = compute_m_n(&n, &spec).unwrap();
        assert_eq!(r.m_n.masks().unwrap(), vec![0b10]);
    }

    #[test]
    fn constant_table_is_flagged() {
        let n = two_cycle();
        let u = Universe::propositional(&["A"]);
        let cube = vec![Cube::new().fix(0, true)];
        let spec = EncodingSpec::table(
            &n,
            u,
            vec![0, 1],
            vec![(vec![0.0, 0.0], cube.clone()), (vec![1.0, 1.0], cube)],
            Agg::Union,
        )
        .unwrap();
        assert_eq!(spec.warnings().len(), 1);
    }

    #[test]
    fn spec_json_forms() {
        let n = two_cycle();
        let s = EncodingSpec::from_json(&n, r#"{"kind":"nat","atoms":{"0":"A","1":"B"},"agg":"union"}"#).unwrap();
        assert_eq!(s.universe().names(), vec!["A", "B"]);
        let d = dat_net();
        let s = EncodingSpec::from_json(&d, r#"{"kind":"dat","vars":["x"],"preds":["P"],"inputs":[[0.0],[1.0]],"agg":"intersection"}"#).unwrap();
        assert_eq!(s.universe().names(), vec!["P(d0)", "P(d1)"]);
    }
}
