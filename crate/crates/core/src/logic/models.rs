//! Model enumeration over finite universes, interpretation sets, entailment
//! and penalty logic.

use std::collections::BTreeMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;

use super::ground::ground;
use super::syntax::{Annotation, Formula, KnowledgeBase, Signature, Term};
use super::universe::{GroundAtom, Interpretation, Universe, MAX_EXPLICIT_ATOMS};
use super::LogicError;
use crate::scalar::Scalar;

/// Index-based compiled form of a ground, quantifier-free formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropExpr {
    Const(bool),
    Var(usize),
    Not(Box<PropExpr>),
    And(Box<PropExpr>, Box<PropExpr>),
    Or(Box<PropExpr>, Box<PropExpr>),
    Implies(Box<PropExpr>, Box<PropExpr>),
    Iff(Box<PropExpr>, Box<PropExpr>),
}

/// Bit `j` of `VAR_WORDS[i]` is bit `i` of `j` (for `j < 64`).
const VAR_WORDS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl PropExpr {
    /// Compiles `f` against `universe`. Constants are resolved through `sig`
    /// when given, otherwise taken as element names.
    pub fn compile(f: &Formula, universe: &Universe, sig: Option<&Signature>) -> Result<PropExpr, LogicError> {
        let b = |f: &Formula| PropExpr::compile(f, universe, sig).map(Box::new);
        Ok(match f {
            Formula::True => PropExpr::Const(true),
            Formula::False => PropExpr::Const(false),
            Formula::Atom(a) => PropExpr::Var(
                universe
                    .index_of(&GroundAtom::prop(a))
                    .ok_or_else(|| LogicError::UnknownAtom(a.clone()))?,
            ),
            Formula::Pred(p, args) => {
                let args = args
                    .iter()
                    .map(|t| match t {
                        Term::Const(c) => Ok(sig
                            .and_then(|s| s.resolve_constant(c))
                            .unwrap_or(c)
                            .to_string()),
                        other => Err(LogicError::NotGround(other.to_string())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let atom = GroundAtom { pred: p.clone(), args };
                PropExpr::Var(
                    universe
                        .index_of(&atom)
                        .ok_or_else(|| LogicError::UnknownAtom(atom.to_string()))?,
                )
            }
            Formula::Not(a) => PropExpr::Not(b(a)?),
            Formula::And(x, y) => PropExpr::And(b(x)?, b(y)?),
            Formula::Or(x, y) => PropExpr::Or(b(x)?, b(y)?),
            Formula::Implies(x, y) => PropExpr::Implies(b(x)?, b(y)?),
            Formula::Iff(x, y) => PropExpr::Iff(b(x)?, b(y)?),
            Formula::Forall(..) | Formula::Exists(..) => return Err(LogicError::NotGround(f.to_string())),
        })
    }

    /// Truth value under the crisp assignment `bits[i]`.
    pub fn eval(&self, bits: &dyn Fn(usize) -> bool) -> bool {
        match self {
            PropExpr::Const(c) => *c,
            PropExpr::Var(i) => bits(*i),
            PropExpr::Not(a) => !a.eval(bits),
            PropExpr::And(a, b) => a.eval(bits) && b.eval(bits),
            PropExpr::Or(a, b) => a.eval(bits) || b.eval(bits),
            PropExpr::Implies(a, b) => !a.eval(bits) || b.eval(bits),
            PropExpr::Iff(a, b) => a.eval(bits) == b.eval(bits),
        }
    }

    pub fn eval_mask(&self, mask: u64) -> bool {
        self.eval(&|i| mask >> i & 1 == 1)
    }

    /// Truth values on the 64 assignments `64*word .. 64*word + 63` at once.
    pub fn eval_word(&self, word: u64) -> u64 {
        match self {
            PropExpr::Const(true) => u64::MAX,
            PropExpr::Const(false) => 0,
            PropExpr::Var(i) => {
                if *i < 6 {
                    VAR_WORDS[*i]
                } else if word >> (i - 6) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                }
            }
            PropExpr::Not(a) => !a.eval_word(word),
            PropExpr::And(a, b) => a.eval_word(word) & b.eval_word(word),
            PropExpr::Or(a, b) => a.eval_word(word) | b.eval_word(word),
            PropExpr::Implies(a, b) => !a.eval_word(word) | b.eval_word(word),
            PropExpr::Iff(a, b) => !(a.eval_word(word) ^ b.eval_word(word)),
        }
    }

    /// Conjunction of several expressions (`Const(true)` when empty).
    pub fn all(items: Vec<PropExpr>) -> PropExpr {
        items
            .into_iter()
            .reduce(|a, b| PropExpr::And(Box::new(a), Box::new(b)))
            .unwrap_or(PropExpr::Const(true))
    }
}

/// Partial assignment; denotes the set of its total completions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cube(pub BTreeMap<usize, bool>);

impl Cube {
    pub fn new() -> Self {
        Cube::default()
    }

    pub fn fix(mut self, atom: usize, value: bool) -> Self {
        self.0.insert(atom, value);
        self
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        self.0.iter().all(|(&i, &v)| (mask >> i & 1 == 1) == v)
    }

    pub fn contains_bits(&self, bits: &[bool]) -> bool {
        self.0.iter().all(|(&i, &v)| bits[i] == v)
    }

    /// `None` when the two cubes conflict.
    pub fn intersect(&self, other: &Cube) -> Option<Cube> {
        let mut out = self.0.clone();
        for (&i, &v) in &other.0 {
            if let Some(&w) = out.get(&i) {
                if w != v {
                    return None;
                }
            }
            out.insert(i, v);
        }
        Some(Cube(out))
    }

    /// Conjunction of the fixed literals (`True` for the empty cube).
    pub fn to_formula(&self, universe: &Universe) -> Formula {
        Formula::conjunction(self.0.iter().map(|(&i, &v)| {
            let a = atom_formula(universe.atom(i));
            if v {
                a
            } else {
                a.not()
            }
        }))
    }

    fn for_each_completion(&self, n: usize, mut f: impl FnMut(u64)) {
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut care = 0u64;
        let mut base = 0u64;
        for (&i, &v) in &self.0 {
            care |= 1 << i;
            if v {
                base |= 1 << i;
            }
        }
        let free = full & !care;
        let mut sub = free;
        loop {
            f(base | sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }
}

pub(crate) fn atom_formula(a: &GroundAtom) -> Formula {
    if a.args.is_empty() {
        Formula::atom(&a.pred)
    } else {
        Formula::Pred(a.pred.clone(), a.args.iter().map(|c| Term::Const(c.clone())).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Explicit(FixedBitSet),
    Symbolic(Vec<Cube>),
}

/// A set of total interpretations over a universe, stored either as a
/// bitset indexed by assignment masks (at most 24 atoms) or as a union of
/// cubes.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpretationSet {
    universe: Arc<Universe>,
    repr: Repr,
}

fn same_universe(a: &Arc<Universe>, b: &Arc<Universe>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl InterpretationSet {
    pub fn empty(universe: Arc<Universe>) -> Self {
        InterpretationSet {
            universe,
            repr: Repr::Symbolic(Vec::new()),
        }
    }

    /// Every interpretation over the universe.
    pub fn all(universe: Arc<Universe>) -> Self {
        InterpretationSet::from_cubes(universe, vec![Cube::new()])
    }

    pub fn from_cubes(universe: Arc<Universe>, cubes: Vec<Cube>) -> Self {
        InterpretationSet {
            universe,
            repr: Repr::Symbolic(cubes),
        }
    }

    pub fn from_masks(universe: Arc<Universe>, masks: impl IntoIterator<Item = u64>) -> Result<Self, LogicError> {
        universe.check_explicit()?;
        let mut bits = FixedBitSet::with_capacity(1 << universe.len());
        for m in masks {
            if m >> universe.len() != 0 {
                return Err(LogicError::DimensionMismatch {
                    expected: universe.len(),
                    found: 64 - m.leading_zeros() as usize,
                });
            }
            bits.insert(m as usize);
        }
        Ok(InterpretationSet {
            universe,
            repr: Repr::Explicit(bits),
        })
    }

    pub fn from_interpretations<T: Scalar>(
        universe: Arc<Universe>,
        items: &[Interpretation<T>],
    ) -> Result<Self, LogicError> {
        let masks = items.iter().map(|m| m.to_mask()).collect::<Result<Vec<_>, _>>()?;
        InterpretationSet::from_masks(universe, masks)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.repr, Repr::Explicit(_))
    }

    /// The cube list of a symbolic set.
    pub fn cubes(&self) -> Option<&[Cube]> {
        match &self.repr {
            Repr::Symbolic(c) => Some(c),
            Repr::Explicit(_) => None,
        }
    }

    pub fn to_explicit(&self) -> Result<Self, LogicError> {
        match &self.repr {
            Repr::Explicit(_) => Ok(self.clone()),
            Repr::Symbolic(cubes) => {
                self.universe.check_explicit()?;
                let n = self.universe.len();
                let mut bits = FixedBitSet::with_capacity(1 << n);
                for c in cubes {
                    c.for_each_completion(n, |m| bits.insert(m as usize));
                }
                Ok(InterpretationSet {
                    universe: self.universe.clone(),
                    repr: Repr::Explicit(bits),
                })
            }
        }
    }

    /// Symbolic form; explicit members become total cubes.
    pub fn to_symbolic(&self) -> Self {
        match &self.repr {
            Repr::Symbolic(_) => self.clone(),
            Repr::Explicit(bits) => {
                let n = self.universe.len();
                let cubes = bits
                    .ones()
                    .map(|m| Cube((0..n).map(|i| (i, m >> i & 1 == 1)).collect()))
                    .collect();
                InterpretationSet::from_cubes(self.universe.clone(), cubes)
            }
        }
    }

    fn bits(&self) -> Result<FixedBitSet, LogicError> {
        match self.to_explicit()?.repr {
            Repr::Explicit(b) => Ok(b),
            Repr::Symbolic(_) => unreachable!(),
        }
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        match &self.repr {
            Repr::Explicit(bits) => bits.contains(mask as usize),
            Repr::Symbolic(cubes) => cubes.iter().any(|c| c.contains_mask(mask)),
        }
    }

    pub fn contains<T: Scalar>(&self, m: &Interpretation<T>) -> Result<bool, LogicError> {
        if !same_universe(&self.universe, m.universe()) {
            return Err(LogicError::UniverseMismatch);
        }
        let bits = m.to_bools()?;
        Ok(match &self.repr {
            Repr::Explicit(set) => {
                let mask = bits.iter().enumerate().fold(0usize, |acc, (i, &b)| acc | (b as usize) << i);
                set.contains(mask)
            }
            Repr::Symbolic(cubes) => cubes.iter().any(|c| c.contains_bits(&bits)),
        })
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            Repr::Explicit(bits) => bits.is_clear(),
            // cubes are consistent by construction, so each is non-empty
            Repr::Symbolic(cubes) => cubes.is_empty(),
        }
    }

    pub fn len(&self) -> Result<usize, LogicError> {
        Ok(self.bits()?.count_ones(..))
    }

    /// Members as assignment masks in increasing order.
    pub fn masks(&self) -> Result<Vec<u64>, LogicError> {
        Ok(self.bits()?.ones().map(|m| m as u64).collect())
    }

    pub fn interpretations<T: Scalar>(&self) -> Result<Vec<Interpretation<T>>, LogicError> {
        Ok(self
            .masks()?
            .into_iter()
            .map(|m| Interpretation::from_mask(self.universe.clone(), m))
            .collect())
    }

    fn check(&self, other: &Self) -> Result<(), LogicError> {
        if same_universe(&self.universe, &other.universe) {
            Ok(())
        } else {
            Err(LogicError::UniverseMismatch)
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self, LogicError> {
        self.check(other)?;
        if let (Repr::Symbolic(a), Repr::Symbolic(b)) = (&self.repr, &other.repr) {
            let mut cubes = a.clone();
            cubes.extend(b.iter().cloned());
            return Ok(InterpretationSet::from_cubes(self.universe.clone(), cubes));
        }
        let mut bits = self.bits()?;
        bits.union_with(&other.bits()?);
        Ok(self.with_bits(bits))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, LogicError> {
        self.check(other)?;
        if let (Repr::Symbolic(a), Repr::Symbolic(b)) = (&self.repr, &other.repr) {
            let small = self.universe.len() <= MAX_EXPLICIT_ATOMS;
            if !small || a.len().saturating_mul(b.len()) <= 4096 {
                let mut cubes: Vec<Cube> = a.iter().flat_map(|x| b.iter().filter_map(|y| x.intersect(y))).collect();
                cubes.sort();
                cubes.dedup();
                return Ok(InterpretationSet::from_cubes(self.universe.clone(), cubes));
            }
        }
        let mut bits = self.bits()?;
        bits.intersect_with(&other.bits()?);
        Ok(self.with_bits(bits))
    }

    pub fn difference(&self, other: &Self) -> Result<Self, LogicError> {
        self.check(other)?;
        let mut bits = self.bits()?;
        bits.difference_with(&other.bits()?);
        Ok(self.with_bits(bits))
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, LogicError> {
        self.check(other)?;
        Ok(self.bits()?.is_subset(&other.bits()?))
    }

    pub fn set_eq(&self, other: &Self) -> Result<bool, LogicError> {
        self.check(other)?;
        Ok(self.bits()? == other.bits()?)
    }

    fn with_bits(&self, bits: FixedBitSet) -> Self {
        InterpretationSet {
            universe: self.universe.clone(),
            repr: Repr::Explicit(bits),
        }
    }

    /// The same set over a larger universe containing every atom of this
    /// one; atoms new to `target` are unconstrained.
    pub fn reindex(&self, target: &Arc<Universe>) -> Result<Self, LogicError> {
        if same_universe(&self.universe, target) {
            return Ok(self.clone());
        }
        let map = self
            .universe
            .atoms()
            .map(|a| target.index_of(a).ok_or_else(|| LogicError::UnknownAtom(a.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let cubes = match &self.to_symbolic().repr {
            Repr::Symbolic(c) => c
                .iter()
                .map(|c| Cube(c.0.iter().map(|(&i, &v)| (map[i], v)).collect()))
                .collect(),
            Repr::Explicit(_) => unreachable!(),
        };
        let out = InterpretationSet::from_cubes(target.clone(), cubes);
        if self.is_explicit() && target.len() <= MAX_EXPLICIT_ATOMS {
            out.to_explicit()
        } else {
            Ok(out)
        }
    }

    /// Disjunction of cubes describing the set.
    pub fn to_dnf(&self) -> Formula {
        let sym = self.to_symbolic();
        Formula::disjunction(sym.cubes().unwrap_or(&[]).iter().map(|c| c.to_formula(&self.universe)))
    }
}

/// The universe of a knowledge base: every ground atom of its signature,
/// then any further atoms its sentences mention.
pub fn kb_universe(kb: &KnowledgeBase) -> Universe {
    let mut atoms: Vec<GroundAtom> = Universe::from_signature(&kb.signature).atoms().cloned().collect();
    for f in kb.formulas() {
        f.visit(&mut |g| {
            let atom = match g {
                Formula::Atom(a) => Some(GroundAtom::prop(a)),
                Formula::Pred(p, args) => args
                    .iter()
                    .map(|t| match t {
                        Term::Const(c) => Some(kb.signature.resolve_constant(c).unwrap_or(c).to_string()),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()
                    .map(|args| GroundAtom { pred: p.clone(), args }),
                _ => None,
            };
            if let Some(a) = atom {
                if !atoms.contains(&a) {
                    atoms.push(a);
                }
            }
        });
    }
    Universe::new(atoms, kb.signature.domain.clone())
}

fn needs_grounding(f: &Formula) -> bool {
    let mut need = false;
    f.visit(&mut |g| match g {
        Formula::Forall(..) | Formula::Exists(..) => need = true,
        Formula::Pred(_, args) if args.iter().any(|t| !matches!(t, Term::Const(_))) => need = true,
        _ => {}
    });
    need
}

/// Compiles each sentence of `kb` over `universe`, grounding first-order
/// sentences through the KB's signature.
pub(crate) fn compile_sentences(kb: &KnowledgeBase, universe: &Universe) -> Result<Vec<PropExpr>, LogicError> {
    let grounded;
    let kb = if kb.formulas().any(needs_grounding) {
        grounded = ground(kb, &kb.signature)?.kb;
        &grounded
    } else {
        kb
    };
    kb.formulas()
        .map(|f| PropExpr::compile(f, universe, Some(&kb.signature)))
        .collect()
}

fn words(n: usize) -> u64 {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn valid_bits(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

fn models_of_expr(expr: &PropExpr, universe: &Arc<Universe>) -> Result<InterpretationSet, LogicError> {
    universe.check_explicit()?;
    let n = universe.len();
    let valid = valid_bits(n);
    let blocks: Vec<u64> = (0..words(n)).into_par_iter().map(|w| expr.eval_word(w) & valid).collect();
    let mut bits = FixedBitSet::with_capacity(1 << n);
    for (w, block) in blocks.into_iter().enumerate() {
        let mut b = block;
        while b != 0 {
            let j = b.trailing_zeros() as usize;
            bits.insert(w * 64 + j);
            b &= b - 1;
        }
    }
    Ok(InterpretationSet {
        universe: universe.clone(),
        repr: Repr::Explicit(bits),
    })
}

/// All interpretations over `universe` satisfying every sentence of `kb`
/// (annotations are ignored). Brute force over `2^|universe|` assignments.
pub fn enumerate_models(kb: &KnowledgeBase, universe: &Arc<Universe>) -> Result<InterpretationSet, LogicError> {
    universe.check_explicit()?;
    let exprs = compile_sentences(kb, universe)?;
    models_of_expr(&PropExpr::all(exprs), universe)
}

pub fn models_of(f: &Formula, universe: &Arc<Universe>) -> Result<InterpretationSet, LogicError> {
    universe.check_explicit()?;
    models_of_expr(&PropExpr::compile(f, universe, None)?, universe)
}

/// `models(l) ⊆ models(l2)`.
pub fn entails(l: &KnowledgeBase, l2: &KnowledgeBase, universe: &Arc<Universe>) -> Result<bool, LogicError> {
    enumerate_models(l, universe)?.is_subset(&enumerate_models(l2, universe)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyResult {
    /// Every interpretation attaining the minimum penalty.
    pub models: InterpretationSet,
    pub min_penalty: Rational64,
}

/// Penalty-logic models: the interpretations minimizing the summed weight
/// of violated sentences.
pub fn penalty_models(kb: &KnowledgeBase, universe: &Arc<Universe>) -> Result<PenaltyResult, LogicError> {
    universe.check_explicit()?;
    let weights = kb
        .sentences
        .iter()
        .map(|s| match s.annotation {
            Annotation::Penalty(w) => Ok(w),
            _ => Err(LogicError::Annotation(format!(
                "sentence `{}` has no penalty weight",
                s.formula
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let denom = weights.iter().fold(1i64, |acc, w| acc.lcm(w.denom()));
    let scaled: Vec<i128> = weights
        .iter()
        .map(|w| *w.numer() as i128 * (denom / *w.denom()) as i128)
        .collect();
    let exprs = compile_sentences(kb, universe)?;
    let n = universe.len();
    let valid = valid_bits(n);
    let per_word: Vec<(i128, Vec<u64>)> = (0..words(n))
        .into_par_iter()
        .map(|w| {
            let mut cost = [0i128; 64];
            let viol: Vec<u64> = exprs.iter().map(|e| !e.eval_word(w) & valid).collect();
            for (v, &wt) in viol.iter().zip(&scaled) {
                let mut b = *v;
                while b != 0 {
                    cost[b.trailing_zeros() as usize] += wt;
                    b &= b - 1;
                }
            }
            let count = if n >= 6 { 64 } else { 1 << n };
            let min = cost[..count].iter().copied().min().unwrap_or(0);
            let members = (0..count)
                .filter(|&j| cost[j] == min)
                .map(|j| w * 64 + j as u64)
                .collect();
            (min, members)
        })
        .collect();
    let min = per_word.iter().map(|(m, _)| *m).min().unwrap_or(0);
    let masks = per_word
        .into_iter()
        .filter(|(m, _)| *m == min)
        .flat_map(|(_, ms)| ms);
    let models = InterpretationSet::from_masks(universe.clone(), masks)?;
    let min_penalty = Rational64::new(
        i64::try_from(min).map_err(|_| LogicError::Annotation("penalty sum overflows".into()))?,
        denom,
    );
    Ok(PenaltyResult { models, min_penalty })
}
