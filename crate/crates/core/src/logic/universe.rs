//! Ordered atom universes and total interpretations over them.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;

use super::syntax::Signature;
use super::LogicError;
use crate::scalar::{self, Scalar};

/// A ground atom: a propositional atom (no arguments) or a predicate
/// applied to domain elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn prop(name: &str) -> Self {
        GroundAtom {
            pred: name.to_string(),
            args: Vec::new(),
        }
    }

    pub fn new(pred: &str, args: &[&str]) -> Self {
        GroundAtom {
            pred: pred.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    /// Parses `A` or `P(a,b)`.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.find('(') {
            None => Some(GroundAtom::prop(text)),
            Some(i) => {
                let rest = text[i + 1..].strip_suffix(')')?;
                let args = rest
                    .split(',')
                    .map(|a| a.trim().to_string())
                    .filter(|a| !a.is_empty())
                    .collect();
                Some(GroundAtom {
                    pred: text[..i].trim().to_string(),
                    args,
                })
            }
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            f.write_str(&self.pred)
        } else {
            write!(f, "{}({})", self.pred, self.args.join(","))
        }
    }
}

/// An ordered, duplicate-free list of ground atoms, plus the finite domain
/// the atoms were grounded over (empty for purely propositional universes).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Universe {
    atoms: IndexSet<GroundAtom>,
    domain: Vec<String>,
}

/// Largest universe for which interpretation sets are stored explicitly.
pub const MAX_EXPLICIT_ATOMS: usize = 24;

impl Universe {
    pub fn new(atoms: impl IntoIterator<Item = GroundAtom>, domain: Vec<String>) -> Self {
        Universe {
            atoms: atoms.into_iter().collect(),
            domain,
        }
    }

    pub fn propositional<S: AsRef<str>>(names: &[S]) -> Self {
        Universe::new(names.iter().map(|n| GroundAtom::prop(n.as_ref())), Vec::new())
    }

    /// Every ground atom of the signature: propositional atoms first, then
    /// each predicate over all argument tuples in lexicographic domain order.
    pub fn from_signature(sig: &Signature) -> Self {
        let mut atoms: Vec<GroundAtom> = sig.prop_atoms.iter().map(|a| GroundAtom::prop(a)).collect();
        for (pred, &arity) in &sig.predicates {
            for tuple in tuples(sig.domain.len(), arity) {
                atoms.push(GroundAtom {
                    pred: pred.clone(),
                    args: tuple.iter().map(|&i| sig.domain[i].clone()).collect(),
                });
            }
        }
        Universe::new(atoms, sig.domain.clone())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, i: usize) -> &GroundAtom {
        &self.atoms[i]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.atoms.iter()
    }

    pub fn index_of(&self, atom: &GroundAtom) -> Option<usize> {
        self.atoms.get_index_of(atom)
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        GroundAtom::parse(name).and_then(|a| self.index_of(&a))
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn names(&self) -> Vec<String> {
        self.atoms.iter().map(|a| a.to_string()).collect()
    }

    /// This universe followed by the atoms of `other` it lacks.
    pub fn merged(&self, other: &Universe) -> Universe {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut domain = self.domain.clone();
        for d in &other.domain {
            if !domain.contains(d) {
                domain.push(d.clone());
            }
        }
        Universe { atoms, domain }
    }

    pub fn check_explicit(&self) -> Result<(), LogicError> {
        if self.len() > MAX_EXPLICIT_ATOMS {
            Err(LogicError::UniverseTooLarge {
                atoms: self.len(),
                max: MAX_EXPLICIT_ATOMS,
            })
        } else {
            Ok(())
        }
    }
}

/// All `arity`-tuples over `0..n` in lexicographic order.
pub(crate) fn tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * n);
        for prefix in &out {
            for i in 0..n {
                let mut t = prefix.clone();
                t.push(i);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// A total truth assignment over a universe. Crisp interpretations carry
/// exactly 0/1, fuzzy or probabilistic ones any value in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation<T> {
    universe: Arc<Universe>,
    values: Vec<T>,
}

impl<T: Scalar> Interpretation<T> {
    pub fn new(universe: Arc<Universe>, values: Vec<T>) -> Result<Self, LogicError> {
        if values.len() != universe.len() {
            return Err(LogicError::DimensionMismatch {
                expected: universe.len(),
                found: values.len(),
            });
        }
        Ok(Interpretation { universe, values })
    }

    /// Crisp interpretation whose bit `i` gives atom `i`.
    pub fn from_mask(universe: Arc<Universe>, mask: u64) -> Self {
        let values = (0..universe.len())
            .map(|i| if mask >> i & 1 == 1 { T::one() } else { T::zero() })
            .collect();
        Interpretation { universe, values }
    }

    pub fn from_bools(universe: Arc<Universe>, bits: &[bool]) -> Result<Self, LogicError> {
        let values = bits.iter().map(|&b| if b { T::one() } else { T::zero() }).collect();
        Interpretation::new(universe, values)
    }

    /// Builds an interpretation from `name=value` pairs; unnamed atoms are 0.
    pub fn from_pairs(universe: Arc<Universe>, pairs: &[(&str, T)]) -> Result<Self, LogicError> {
        let mut values = vec![T::zero(); universe.len()];
        for (name, v) in pairs {
            let i = universe
                .index_of_name(name)
                .ok_or_else(|| LogicError::UnknownAtom(name.to_string()))?;
            values[i] = *v;
        }
        Interpretation::new(universe, values)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn value_of(&self, atom: &GroundAtom) -> Result<T, LogicError> {
        self.universe
            .index_of(atom)
            .map(|i| self.values[i])
            .ok_or_else(|| LogicError::UnknownAtom(atom.to_string()))
    }

    pub fn is_crisp(&self) -> bool {
        self.values.iter().all(|&v| scalar::is_crisp(v))
    }

    /// Bitmask form of a crisp interpretation over at most 64 atoms.
    pub fn to_mask(&self) -> Result<u64, LogicError> {
        if self.values.len() > 64 {
            return Err(LogicError::UniverseTooLarge {
                atoms: self.values.len(),
                max: 64,
            });
        }
        let mut mask = 0u64;
        for (i, &v) in self.values.iter().enumerate() {
            if v == T::one() {
                mask |= 1 << i;
            } else if v != T::zero() {
                return Err(LogicError::NotCrisp {
                    atom: self.universe.atom(i).to_string(),
                    value: v.as_f64(),
                });
            }
        }
        Ok(mask)
    }

    pub fn to_bools(&self) -> Result<Vec<bool>, LogicError> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == T::one() {
                    Ok(true)
                } else if v == T::zero() {
                    Ok(false)
                } else {
                    Err(LogicError::NotCrisp {
                        atom: self.universe.atom(i).to_string(),
                        value: v.as_f64(),
                    })
                }
            })
            .collect()
    }

    /// Rounds every value at 0.5 (ties go to 1).
    pub fn rounded(&self) -> Self {
        let half = T::lit(0.5);
        Interpretation {
            universe: self.universe.clone(),
            values: self
                .values
                .iter()
                .map(|&v| if v >= half { T::one() } else { T::zero() })
                .collect(),
        }
    }
}

impl<T: Scalar> fmt::Display for Interpretation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", self.universe.atom(i), v)?;
        }
        Ok(())
    }
}

/// Renders a crisp mask as a string of 0/1 in universe order (`"101"`).
pub fn mask_string(mask: u64, n: usize) -> String {
    (0..n).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}
