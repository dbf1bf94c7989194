//! Propositional logic programs: the immediate-consequence operator T_P,
//! acyclicity, and compilation into recurrent threshold networks.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde::Serialize;

use crate::logic::{parse_rules, GroundAtom, Interpretation, LogicError, Pos, Universe};
use crate::network::{Activation, Network, NetworkBuilder, NetworkError, Role, UpdateMode};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: usize,
    pub positive: bool,
}

/// `head <- body_1 & ... & body_n`; a fact has an empty body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: usize,
    pub body: Vec<Literal>,
    pub pos: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicProgram {
    universe: Arc<Universe>,
    rules: Vec<Rule>,
}

impl LogicProgram {
    pub fn new(universe: Arc<Universe>, rules: Vec<Rule>) -> Result<Self, LogicError> {
        let n = universe.len();
        for r in &rules {
            if r.head >= n || r.body.iter().any(|l| l.atom >= n) {
                return Err(LogicError::DimensionMismatch {
                    expected: n,
                    found: r.body.iter().map(|l| l.atom).chain([r.head]).max().unwrap_or(0) + 1,
                });
            }
        }
        Ok(LogicProgram { universe, rules })
    }

    /// Parses `H :- L1, ~L2.` rules and `H.` facts. The universe lists the
    /// atoms in order of declaration or first use.
    pub fn parse(text: &str) -> Result<Self, LogicError> {
        let (sig, asts) = parse_rules(text)?;
        let universe = Arc::new(Universe::propositional(&sig.prop_atoms));
        let idx = |a: &str| universe.index_of(&GroundAtom::prop(a)).expect("atom registered by the parser");
        let rules = asts
            .iter()
            .map(|r| Rule {
                head: idx(&r.head),
                body: r
                    .body
                    .iter()
                    .map(|(a, positive)| Literal {
                        atom: idx(a),
                        positive: *positive,
                    })
                    .collect(),
                pos: Some(r.pos),
            })
            .collect();
        LogicProgram::new(universe, rules)
    }

    /// Builds a program over named atoms; body literals are written `A` or `~A`.
    pub fn from_clauses(atoms: &[&str], clauses: &[(&str, &[&str])]) -> Result<Self, LogicError> {
        let universe = Arc::new(Universe::propositional(atoms));
        let idx = |a: &str| {
            universe
                .index_of(&GroundAtom::prop(a))
                .ok_or_else(|| LogicError::UnknownAtom(a.to_string()))
        };
        let rules = clauses
            .iter()
            .map(|(h, body)| {
                Ok(Rule {
                    head: idx(h)?,
                    body: body
                        .iter()
                        .map(|l| match l.strip_prefix('~') {
                            Some(a) => Ok(Literal {
                                atom: idx(a)?,
                                positive: false,
                            }),
                            None => Ok(Literal {
                                atom: idx(l)?,
                                positive: true,
                            }),
                        })
                        .collect::<Result<_, LogicError>>()?,
                    pos: None,
                })
            })
            .collect::<Result<_, LogicError>>()?;
        LogicProgram::new(universe, rules)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

impl fmt::Display for LogicProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |i: usize| self.universe.atom(i).to_string();
        writeln!(f, "atoms {};", self.universe.names().join(" "))?;
        for r in &self.rules {
            if r.body.is_empty() {
                writeln!(f, "{}.", name(r.head))?;
            } else {
                let body: Vec<String> = r
                    .body
                    .iter()
                    .map(|l| format!("{}{}", if l.positive { "" } else { "~" }, name(l.atom)))
                    .collect();
                writeln!(f, "{} :- {}.", name(r.head), body.join(", "))?;
            }
        }
        Ok(())
    }
}

/// `T_P` on a bitset state.
pub fn tp_step_bits(p: &LogicProgram, m: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(p.universe.len());
    for r in &p.rules {
        if r.body.iter().all(|l| m.contains(l.atom) == l.positive) {
            out.insert(r.head);
        }
    }
    out
}

fn to_bits<T: Scalar>(p: &LogicProgram, m: &Interpretation<T>) -> Result<FixedBitSet, LogicError> {
    if m.universe().len() != p.universe.len() {
        return Err(LogicError::DimensionMismatch {
            expected: p.universe.len(),
            found: m.universe().len(),
        });
    }
    let mut bits = FixedBitSet::with_capacity(p.universe.len());
    for (i, b) in m.to_bools()?.into_iter().enumerate() {
        bits.set(i, b);
    }
    Ok(bits)
}

fn from_bits<T: Scalar>(p: &LogicProgram, bits: &FixedBitSet) -> Interpretation<T> {
    let values = (0..p.universe.len())
        .map(|i| if bits.contains(i) { T::one() } else { T::zero() })
        .collect();
    Interpretation::new(p.universe.clone(), values).expect("sized to the universe")
}

/// `T_P(M)`: an atom is true iff some rule with that head has a true body.
pub fn tp_step<T: Scalar>(p: &LogicProgram, m: &Interpretation<T>) -> Result<Interpretation<T>, LogicError> {
    Ok(from_bits(p, &tp_step_bits(p, &to_bits(p, m)?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixpointKind {
    FixedPoint,
    Cycle { period: usize },
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixpointResult<T> {
    pub kind: FixpointKind,
    /// The fixed point, the cycle's states in order, or the last state.
    pub states: Vec<Interpretation<T>>,
    /// Applications of `T_P` performed.
    pub iterations: usize,
}

/// Iterates `T_P` from `m0` until a state repeats or `max_iter` steps.
pub fn tp_fixpoint<T: Scalar>(
    p: &LogicProgram,
    m0: &Interpretation<T>,
    max_iter: usize,
) -> Result<FixpointResult<T>, LogicError> {
    let mut trace = vec![to_bits(p, m0)?];
    let mut seen: HashMap<FixedBitSet, usize> = HashMap::from([(trace[0].clone(), 0)]);
    for it in 1..=max_iter.max(1) {
        let next = tp_step_bits(p, trace.last().unwrap());
        if let Some(&start) = seen.get(&next) {
            let period = trace.len() - start;
            let kind = if period == 1 {
                FixpointKind::FixedPoint
            } else {
                FixpointKind::Cycle { period }
            };
            return Ok(FixpointResult {
                kind,
                states: trace[start..].iter().map(|b| from_bits(p, b)).collect(),
                iterations: it,
            });
        }
        seen.insert(next.clone(), trace.len());
        trace.push(next);
    }
    Ok(FixpointResult {
        kind: FixpointKind::MaxIter,
        states: vec![from_bits(p, trace.last().unwrap())],
        iterations: max_iter.max(1),
    })
}

/// No atom depends on itself through the head-to-body dependency graph
/// (signs ignored, self-loops count).
pub fn is_acyclic(p: &LogicProgram) -> bool {
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..p.universe.len()).map(|_| g.add_node(())).collect();
    for r in &p.rules {
        for l in &r.body {
            g.add_edge(nodes[r.head], nodes[l.atom], ());
        }
    }
    !is_cyclic_directed(&g)
}

/// Compiles `P` into a feedforward threshold network with recurrent links:
/// one input and one output neuron per atom, one hidden neuron per rule.
///
/// Neuron ids: inputs `0..n`, hidden `n..n+r`, outputs `n+r..2n+r`.
pub fn compile_cilp<T: Scalar>(p: &LogicProgram) -> Network<T> {
    let n = p.universe.len();
    let mut b = NetworkBuilder::<T>::new();
    let inputs: Vec<usize> = (0..n)
        .map(|i| b.neuron(T::zero(), Activation::Identity, Role::atom(&p.universe.atom(i).to_string())))
        .collect();
    let hidden: Vec<usize> = p
        .rules
        .iter()
        .map(|r| {
            let k = r.body.iter().filter(|l| l.positive).count();
            b.neuron(-T::lit(k as f64), Activation::StepGeq0, Role::Hidden)
        })
        .collect();
    let outputs: Vec<usize> = (0..n)
        .map(|i| b.neuron(-T::one(), Activation::StepGeq0, Role::atom(&p.universe.atom(i).to_string())))
        .collect();
    for (r, &h) in p.rules.iter().zip(&hidden) {
        for l in &r.body {
            b.edge(inputs[l.atom], h, if l.positive { T::one() } else { -T::one() });
        }
        b.edge(h, outputs[r.head], T::one());
    }
    for i in 0..n {
        b.edge(outputs[i], inputs[i], T::one());
    }
    b.build(UpdateMode::Feedforward).expect("compiled network is well formed")
}

/// Input and output neuron of every atom of `p` in a compiled-style network.
pub fn atom_neurons<T: Scalar>(p: &LogicProgram, n: &Network<T>) -> Result<Vec<(usize, usize)>, NetworkError> {
    p.universe
        .atoms()
        .map(|a| {
            let name = a.to_string();
            let input = n.find_atom(&name, |i| n.is_input(i));
            let output = n.find_atom(&name, |i| !n.is_input(i));
            match (input, output) {
                (Some(i), Some(o)) => Ok((i, o)),
                _ => Err(NetworkError::Invalid(format!("no input/output neuron pair for atom `{name}`"))),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TpCounterexample {
    pub state: String,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TpVerdict {
    pub holds: bool,
    pub states_checked: u64,
    pub counterexample: Option<TpCounterexample>,
}

/// Largest program verified exhaustively.
pub const MAX_VERIFY_ATOMS: usize = 20;

/// Checks on every state `M` that one sweep of `net` with inputs clamped to
/// `M` produces `T_P(M)` on the output neurons.
pub fn verify_tp_equivalence<T: Scalar>(p: &LogicProgram, net: &Network<T>) -> Result<TpVerdict, crate::Error> {
    let n = p.universe.len();
    if n > MAX_VERIFY_ATOMS {
        return Err(LogicError::UniverseTooLarge {
            atoms: n,
            max: MAX_VERIFY_ATOMS,
        }
        .into());
    }
    let pairs = atom_neurons(p, net)?;
    let fmt = |bits: &dyn Fn(usize) -> bool| (0..n).map(|i| if bits(i) { '1' } else { '0' }).collect::<String>();
    let failure = (0..1u64 << n).into_par_iter().find_first(|&m| {
        let mut state = FixedBitSet::with_capacity(n);
        let mut x = vec![T::zero(); net.len()];
        for (i, &(inp, _)) in pairs.iter().enumerate() {
            if m >> i & 1 == 1 {
                state.insert(i);
                x[inp] = T::one();
            }
        }
        let expected = tp_step_bits(p, &state);
        let (y, _) = net.sweep(&x);
        pairs
            .iter()
            .enumerate()
            .any(|(i, &(_, out))| (y[out] == T::one()) != expected.contains(i) || !crate::scalar::is_crisp(y[out]))
    });
    let counterexample = failure.map(|m| {
        let mut state = FixedBitSet::with_capacity(n);
        let mut x = vec![T::zero(); net.len()];
        for (i, &(inp, _)) in pairs.iter().enumerate() {
            if m >> i & 1 == 1 {
                state.insert(i);
                x[inp] = T::one();
            }
        }
        let expected = tp_step_bits(p, &state);
        let (y, _) = net.sweep(&x);
        TpCounterexample {
            state: fmt(&|i| m >> i & 1 == 1),
            expected: fmt(&|i| expected.contains(i)),
            found: fmt(&|i| y[pairs[i].1] == T::one()),
        }
    });
    Ok(TpVerdict {
        holds: counterexample.is_none(),
        states_checked: 1 << n,
        counterexample,
    })
}
