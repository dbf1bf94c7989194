//! Crisp and fuzzy evaluation of formulas.
//!
//! Truth values are numbers in both modes, so a single evaluator serves the
//! crisp (exact 0/1) and the fuzzy (t-norm) semantics. Crisp conjunction is
//! the minimum, which agrees with every t-norm on {0,1}.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;

use super::syntax::{Formula, Signature, Term};
use super::universe::{GroundAtom, Interpretation, Universe};
use super::LogicError;
use crate::scalar::{self, Scalar};

/// Fuzzy conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TNorm {
    /// Gödel: `min(a, b)`
    Min,
    /// `a * b`
    #[default]
    Product,
    /// `max(0, a + b - 1)`
    Lukasiewicz,
}

impl TNorm {
    pub const ALL: [TNorm; 3] = [TNorm::Min, TNorm::Product, TNorm::Lukasiewicz];

    #[inline]
    pub fn and<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            TNorm::Min => a.min(b),
            TNorm::Product => a * b,
            TNorm::Lukasiewicz => (a + b - T::one()).max(T::zero()),
        }
    }

    /// `a | b = ~(~a & ~b)`
    #[inline]
    pub fn or<T: Scalar>(self, a: T, b: T) -> T {
        T::one() - self.and(T::one() - a, T::one() - b)
    }

    /// `a -> b = ~a | b`
    #[inline]
    pub fn implies<T: Scalar>(self, a: T, b: T) -> T {
        self.or(T::one() - a, b)
    }

    /// Partial derivatives of `and` at `(a, b)`. The flag is set when the
    /// point sits within `margin` of a kink.
    pub fn and_grad<T: Scalar>(self, a: T, b: T, margin: T) -> (T, T, bool) {
        match self {
            TNorm::Min => {
                let kink = (a - b).abs() <= margin;
                if a < b {
                    (T::one(), T::zero(), kink)
                } else if b < a {
                    (T::zero(), T::one(), kink)
                } else {
                    let half = T::lit(0.5);
                    (half, half, true)
                }
            }
            TNorm::Product => (b, a, false),
            TNorm::Lukasiewicz => {
                let s = a + b - T::one();
                let kink = s.abs() <= margin;
                if s > T::zero() {
                    (T::one(), T::one(), kink)
                } else {
                    (T::zero(), T::zero(), kink)
                }
            }
        }
    }
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TNorm::Min => "min",
            TNorm::Product => "product",
            TNorm::Lukasiewicz => "lukasiewicz",
        })
    }
}

impl std::str::FromStr for TNorm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "min" | "godel" => Ok(TNorm::Min),
            "product" => Ok(TNorm::Product),
            "lukasiewicz" | "luk" => Ok(TNorm::Lukasiewicz),
            other => Err(format!("unknown t-norm `{other}`")),
        }
    }
}

/// Fuzzy semantics: a t-norm, `1 - x` negation, derived disjunction and
/// implication, infimum/supremum quantifiers. Equivalence is expanded into
/// two implications joined by the t-norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FuzzyConfig {
    pub tnorm: TNorm,
}

impl FuzzyConfig {
    pub fn new(tnorm: TNorm) -> Self {
        FuzzyConfig { tnorm }
    }
}

/// Assignment of variables to domain elements (by name).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VariableAssignment(pub BTreeMap<String, String>);

impl VariableAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, element: &str) -> Self {
        self.0.insert(var.to_string(), element.to_string());
        self
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(|s| s.as_str())
    }
}

/// A first-order structure over a finite domain. Predicate tables may hold
/// crisp or fuzzy values.
#[derive(Debug, Clone, PartialEq)]
pub struct Structure<T> {
    domain: Vec<String>,
    constants: IndexMap<String, usize>,
    functions: IndexMap<String, (usize, Vec<usize>)>,
    predicates: IndexMap<String, (usize, Vec<T>)>,
    props: IndexMap<String, T>,
}

impl<T: Scalar> Structure<T> {
    /// All-false structure for a signature. Function tables are taken from
    /// the signature; symbols without a table are left uninterpreted.
    pub fn new(sig: &Signature) -> Result<Self, LogicError> {
        let n = sig.domain.len();
        let elem = |name: &str| -> Result<usize, LogicError> {
            sig.domain
                .iter()
                .position(|d| d == name)
                .ok_or_else(|| LogicError::UnknownElement(name.to_string()))
        };
        let mut constants = IndexMap::new();
        for d in sig.domain.iter() {
            constants.insert(d.clone(), elem(d)?);
        }
        for c in sig.constants.keys() {
            let target = sig
                .resolve_constant(c)
                .ok_or_else(|| LogicError::UnknownElement(c.clone()))?;
            constants.insert(c.clone(), elem(target)?);
        }
        let mut functions = IndexMap::new();
        for (name, decl) in &sig.functions {
            if let Some(table) = &decl.table {
                let mut values = vec![usize::MAX; n.pow(decl.arity as u32)];
                for (args, out) in table {
                    let mut idx = 0;
                    for a in args {
                        idx = idx * n + elem(a)?;
                    }
                    values[idx] = elem(out)?;
                }
                if values.contains(&usize::MAX) {
                    return Err(LogicError::UnreducibleTerm(format!(
                        "function table for `{name}` is not total"
                    )));
                }
                functions.insert(name.clone(), (decl.arity, values));
            }
        }
        let predicates = sig
            .predicates
            .iter()
            .map(|(p, &k)| (p.clone(), (k, vec![T::zero(); n.pow(k as u32)])))
            .collect();
        let props = sig.prop_atoms.iter().map(|a| (a.clone(), T::zero())).collect();
        Ok(Structure {
            domain: sig.domain.clone(),
            constants,
            functions,
            predicates,
            props,
        })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    fn element(&self, name: &str) -> Result<usize, LogicError> {
        self.domain
            .iter()
            .position(|d| d == name)
            .ok_or_else(|| LogicError::UnknownElement(name.to_string()))
    }

    fn table_index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.domain.len() + a)
    }

    pub fn set_pred(&mut self, name: &str, args: &[&str], value: T) -> Result<(), LogicError> {
        let idx: Vec<usize> = args.iter().map(|a| self.element(a)).collect::<Result<_, _>>()?;
        let slot = self.table_index(&idx);
        let (arity, table) = self
            .predicates
            .get_mut(name)
            .ok_or_else(|| LogicError::UnknownAtom(name.to_string()))?;
        if *arity != idx.len() {
            return Err(LogicError::Arity {
                symbol: name.to_string(),
                expected: *arity,
                found: idx.len(),
            });
        }
        table[slot] = value;
        Ok(())
    }

    pub fn set_prop(&mut self, name: &str, value: T) -> Result<(), LogicError> {
        *self
            .props
            .get_mut(name)
            .ok_or_else(|| LogicError::UnknownAtom(name.to_string()))? = value;
        Ok(())
    }

    /// Reads every ground atom of `universe` off this structure.
    pub fn to_interpretation(&self, universe: std::sync::Arc<Universe>) -> Result<Interpretation<T>, LogicError> {
        let values = universe
            .atoms()
            .map(|a| self.ground_value(a))
            .collect::<Result<Vec<_>, _>>()?;
        Interpretation::new(universe, values)
    }

    /// Structure whose predicate tables agree with `interp`.
    pub fn from_interpretation(sig: &Signature, interp: &Interpretation<T>) -> Result<Self, LogicError> {
        let mut s = Structure::new(sig)?;
        for (i, atom) in interp.universe().atoms().enumerate() {
            if atom.args.is_empty() && s.props.contains_key(&atom.pred) {
                s.set_prop(&atom.pred, interp.get(i))?;
            } else {
                let args: Vec<&str> = atom.args.iter().map(|a| a.as_str()).collect();
                s.set_pred(&atom.pred, &args, interp.get(i))?;
            }
        }
        Ok(s)
    }

    fn ground_value(&self, atom: &GroundAtom) -> Result<T, LogicError> {
        if atom.args.is_empty() {
            if let Some(v) = self.props.get(&atom.pred) {
                return Ok(*v);
            }
        }
        let idx: Vec<usize> = atom.args.iter().map(|a| self.element(a)).collect::<Result<_, _>>()?;
        self.pred(&atom.pred, &idx)
    }

    /// Every structure over `sig` with crisp predicate tables, in the order of
    /// the bitmasks of `Universe::from_signature(sig)`.
    pub fn enumerate_crisp(sig: &Signature) -> Result<Vec<Self>, LogicError> {
        let universe = std::sync::Arc::new(Universe::from_signature(sig));
        universe.check_explicit()?;
        (0..1u64 << universe.len())
            .map(|m| Structure::from_interpretation(sig, &Interpretation::from_mask(universe.clone(), m)))
            .collect()
    }
}

/// Source of atomic truth values and term denotations.
trait World<T> {
    fn domain_len(&self) -> usize;
    fn atom(&self, name: &str) -> Result<T, LogicError>;
    fn pred(&self, name: &str, args: &[usize]) -> Result<T, LogicError>;
    fn constant(&self, name: &str) -> Result<usize, LogicError>;
    fn func(&self, name: &str, args: &[usize]) -> Result<usize, LogicError>;
}

impl<T: Scalar> World<T> for Structure<T> {
    fn domain_len(&self) -> usize {
        self.domain.len()
    }

    fn atom(&self, name: &str) -> Result<T, LogicError> {
        if let Some(v) = self.props.get(name) {
            return Ok(*v);
        }
        self.pred(name, &[])
    }

    fn pred(&self, name: &str, args: &[usize]) -> Result<T, LogicError> {
        let (arity, table) = self
            .predicates
            .get(name)
            .ok_or_else(|| LogicError::UnknownAtom(name.to_string()))?;
        if *arity != args.len() {
            return Err(LogicError::Arity {
                symbol: name.to_string(),
                expected: *arity,
                found: args.len(),
            });
        }
        Ok(table[self.table_index(args)])
    }

    fn constant(&self, name: &str) -> Result<usize, LogicError> {
        self.constants
            .get(name)
            .copied()
            .ok_or_else(|| LogicError::UnknownElement(name.to_string()))
    }

    fn func(&self, name: &str, args: &[usize]) -> Result<usize, LogicError> {
        let (arity, table) = self
            .functions
            .get(name)
            .ok_or_else(|| LogicError::UnreducibleTerm(format!("no table for function `{name}`")))?;
        if *arity != args.len() {
            return Err(LogicError::Arity {
                symbol: name.to_string(),
                expected: *arity,
                found: args.len(),
            });
        }
        Ok(table[self.table_index(args)])
    }
}

impl<T: Scalar> World<T> for Interpretation<T> {
    fn domain_len(&self) -> usize {
        self.universe().domain().len()
    }

    fn atom(&self, name: &str) -> Result<T, LogicError> {
        self.value_of(&GroundAtom::prop(name))
    }

    fn pred(&self, name: &str, args: &[usize]) -> Result<T, LogicError> {
        let dom = self.universe().domain();
        self.value_of(&GroundAtom {
            pred: name.to_string(),
            args: args.iter().map(|&i| dom[i].clone()).collect(),
        })
    }

    fn constant(&self, name: &str) -> Result<usize, LogicError> {
        self.universe()
            .domain()
            .iter()
            .position(|d| d == name)
            .ok_or_else(|| LogicError::UnknownElement(name.to_string()))
    }

    fn func(&self, name: &str, _args: &[usize]) -> Result<usize, LogicError> {
        Err(LogicError::UnreducibleTerm(format!(
            "function `{name}` has no table in a propositional interpretation"
        )))
    }
}

#[derive(Clone, Copy)]
enum Mode {
    Crisp,
    Fuzzy(TNorm),
}

struct Evaluator<'w, T, W: ?Sized> {
    world: &'w W,
    mode: Mode,
    env: Vec<(String, usize)>,
    _t: std::marker::PhantomData<T>,
}

impl<'w, T: Scalar, W: World<T> + ?Sized> Evaluator<'w, T, W> {
    fn check(&self, name: &str, v: T) -> Result<T, LogicError> {
        match self.mode {
            Mode::Crisp if !scalar::is_crisp(v) => Err(LogicError::NotCrisp {
                atom: name.to_string(),
                value: v.as_f64(),
            }),
            Mode::Fuzzy(_) if !scalar::in_unit(v) => Err(LogicError::OutOfRange {
                atom: name.to_string(),
                value: v.as_f64(),
            }),
            _ => Ok(v),
        }
    }

    fn term(&self, t: &Term) -> Result<usize, LogicError> {
        match t {
            Term::Var(v) => self
                .env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, d)| *d)
                .ok_or_else(|| LogicError::UnboundVariable(v.clone())),
            Term::Const(c) => self.world.constant(c),
            Term::Func(f, args) => {
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                self.world.func(f, &args)
            }
        }
    }

    fn and(&self, a: T, b: T) -> T {
        match self.mode {
            Mode::Crisp => a.min(b),
            Mode::Fuzzy(t) => t.and(a, b),
        }
    }

    fn eval(&mut self, f: &Formula) -> Result<T, LogicError> {
        let one = T::one();
        Ok(match f {
            Formula::True => one,
            Formula::False => T::zero(),
            Formula::Atom(a) => {
                let v = self.world.atom(a)?;
                self.check(a, v)?
            }
            Formula::Pred(p, args) => {
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                let v = self.world.pred(p, &args)?;
                self.check(p, v)?
            }
            Formula::Not(a) => one - self.eval(a)?,
            Formula::And(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.and(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                one - self.and(one - a, one - b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                one - self.and(a, one - b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                match self.mode {
                    Mode::Crisp => {
                        if a == b {
                            one
                        } else {
                            T::zero()
                        }
                    }
                    Mode::Fuzzy(t) => t.and(t.implies(a, b), t.implies(b, a)),
                }
            }
            Formula::Forall(v, body) => self.quantify(v, body, true)?,
            Formula::Exists(v, body) => self.quantify(v, body, false)?,
        })
    }

    fn quantify(&mut self, var: &str, body: &Formula, universal: bool) -> Result<T, LogicError> {
        let n = self.world.domain_len();
        if n == 0 {
            return Err(LogicError::EmptyDomain);
        }
        let mut acc = if universal { T::one() } else { T::zero() };
        for d in 0..n {
            self.env.push((var.to_string(), d));
            let v = self.eval(body);
            self.env.pop();
            let v = v?;
            acc = if universal { acc.min(v) } else { acc.max(v) };
        }
        Ok(acc)
    }
}

fn run<T: Scalar, W: World<T> + ?Sized>(
    f: &Formula,
    world: &W,
    mode: Mode,
    env: Vec<(String, usize)>,
) -> Result<T, LogicError> {
    Evaluator {
        world,
        mode,
        env,
        _t: std::marker::PhantomData,
    }
    .eval(f)
}

/// Classical truth value (0 or 1) of `f` under a crisp interpretation.
/// Quantifiers range over the universe's domain.
pub fn evaluate<T: Scalar>(f: &Formula, m: &Interpretation<T>) -> Result<T, LogicError> {
    run(f, m, Mode::Crisp, Vec::new())
}

/// Classical truth value under a first-order structure and assignment.
pub fn evaluate_in<T: Scalar>(
    f: &Formula,
    s: &Structure<T>,
    mu: &VariableAssignment,
) -> Result<T, LogicError> {
    run(f, s, Mode::Crisp, env_of(s, mu)?)
}

pub fn evaluate_fuzzy<T: Scalar>(f: &Formula, m: &Interpretation<T>, cfg: &FuzzyConfig) -> Result<T, LogicError> {
    run(f, m, Mode::Fuzzy(cfg.tnorm), Vec::new())
}

pub fn evaluate_fuzzy_in<T: Scalar>(
    f: &Formula,
    s: &Structure<T>,
    mu: &VariableAssignment,
    cfg: &FuzzyConfig,
) -> Result<T, LogicError> {
    run(f, s, Mode::Fuzzy(cfg.tnorm), env_of(s, mu)?)
}

fn env_of<T: Scalar>(s: &Structure<T>, mu: &VariableAssignment) -> Result<Vec<(String, usize)>, LogicError> {
    mu.0.iter()
        .map(|(v, d)| Ok((v.clone(), s.element(d)?)))
        .collect()
}

/// Whether `s` satisfies every formula (crisp).
pub fn satisfies_all<T: Scalar>(s: &Structure<T>, formulas: &[Formula]) -> Result<bool, LogicError> {
    for f in formulas {
        if evaluate_in(f, s, &VariableAssignment::new())? != T::one() {
            return Ok(false);
        }
    }
    Ok(true)
}
