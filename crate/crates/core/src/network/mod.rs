//! Neural networks with threshold, sigmoid, ReLU and identity units, under
//! synchronous or feedforward update.
//!
//! Feedforward mode orders neurons by id: an edge `from -> to` is forward
//! when `from < to`. A sweep recomputes every non-input neuron in ascending id
//! order, then copies recurrent (backward) edges into the inputs that have
//! them, which is how compiled logic programs feed outputs back.
//!
//! Input neurons are the visible neurons without an incoming forward edge
//! whose activation is the identity (or whose role is a variable slot).

mod dynamics;
mod hopfield;
mod json;

pub use dynamics::{compute_x_inf, compute_x_inf_with, trajectory, Basin, LimitSet, Trajectory, MAX_SYNC_NEURONS};
pub use hopfield::{hopfield_energy, is_async_stable, is_local_minimum};
pub use json::NetworkJson;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("state has {found} values, network has {expected} neurons")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid network: {0}")]
    Invalid(String),

    #[error("neuron {neuron} takes non-binary value {value}")]
    NonBinary { neuron: usize, value: f64 },

    #[error("state space of {neurons} neurons exceeds the limit of {max}")]
    StateSpaceTooLarge { neurons: usize, max: usize },

    #[error("weights are not symmetric between neurons {0} and {1}")]
    Asymmetric(usize, usize),

    #[error("neuron {0} has a self-connection")]
    SelfWeight(usize),

    #[error("no limit cycle within {0} steps")]
    NoLimit(usize),

    #[error("network JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    /// 1 when the net input is at least 0, else 0.
    StepGeq0,
    Sigmoid,
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply<T: Scalar>(self, z: T) -> T {
        match self {
            Activation::StepGeq0 => {
                if z >= T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Sigmoid => T::one() / (T::one() + (-z).exp()),
            Activation::Relu => z.max(T::zero()),
            Activation::Identity => z,
        }
    }

    /// Derivative at net input `z`, given the output `y`. `None` for the step.
    #[inline]
    pub fn derivative<T: Scalar>(self, z: T, y: T) -> Option<T> {
        match self {
            Activation::StepGeq0 => None,
            Activation::Sigmoid => Some(y * (T::one() - y)),
            Activation::Relu => Some(if z > T::zero() { T::one() } else { T::zero() }),
            Activation::Identity => Some(T::one()),
        }
    }
}

/// What a neuron stands for, if anything.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Role {
    /// Neurons-as-atoms: the neuron is the truth value of a propositional atom.
    Atom { name: String },
    /// Component `index` of the encoding of variable `arg`.
    Var { arg: String, index: usize },
    /// Truth value of predicate `name` applied to the variables `args`.
    Pred { name: String, args: Vec<String> },
    Hidden,
}

impl Role {
    pub fn atom(name: &str) -> Self {
        Role::Atom { name: name.to_string() }
    }

    pub fn is_visible(&self) -> bool {
        !matches!(self, Role::Hidden)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neuron<T> {
    pub id: usize,
    pub bias: T,
    pub activation: Activation,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub from: usize,
    pub to: usize,
    pub w: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateMode {
    Synchronous,
    Feedforward,
}

/// A weighted directed graph of neurons. Immutable once built; derived
/// adjacency is computed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    neurons: Vec<Neuron<T>>,
    edges: Vec<Edge<T>>,
    update: UpdateMode,
    softmax_groups: Vec<Vec<usize>>,
    /// Per neuron: `(edge index, source)` of incoming edges, in edge order.
    incoming: Vec<Vec<(usize, usize)>>,
    is_input: Vec<bool>,
}

impl<T: Scalar> Network<T> {
    pub fn new(
        neurons: Vec<Neuron<T>>,
        edges: Vec<Edge<T>>,
        update: UpdateMode,
        softmax_groups: Vec<Vec<usize>>,
    ) -> Result<Self, NetworkError> {
        let n = neurons.len();
        for (i, nr) in neurons.iter().enumerate() {
            if nr.id != i {
                return Err(NetworkError::Invalid(format!("neuron at position {i} has id {}", nr.id)));
            }
            if !nr.bias.is_finite() {
                return Err(NetworkError::Invalid(format!("neuron {i} has a non-finite bias")));
            }
        }
        let mut incoming = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.from >= n || e.to >= n {
                return Err(NetworkError::Invalid(format!("edge {} -> {} leaves the network", e.from, e.to)));
            }
            if !e.w.is_finite() {
                return Err(NetworkError::Invalid(format!("edge {} -> {} has a non-finite weight", e.from, e.to)));
            }
            incoming[e.to].push((k, e.from));
        }
        let is_input: Vec<bool> = (0..n)
            .map(|i| {
                update == UpdateMode::Feedforward
                    && neurons[i].role.is_visible()
                    && (neurons[i].activation == Activation::Identity || matches!(neurons[i].role, Role::Var { .. }))
                    && incoming[i].iter().all(|&(_, from)| from >= i)
            })
            .collect();
        if update == UpdateMode::Feedforward {
            for e in &edges {
                if !is_input[e.to] && e.from >= e.to {
                    return Err(NetworkError::Invalid(format!(
                        "feedforward edge {} -> {} points backwards into a non-input neuron",
                        e.from, e.to
                    )));
                }
            }
        }
        let mut seen = vec![false; n];
        for g in &softmax_groups {
            if g.len() < 2 {
                return Err(NetworkError::Invalid("softmax groups need at least two neurons".into()));
            }
            for &i in g {
                if i >= n || seen[i] {
                    return Err(NetworkError::Invalid(format!("softmax group member {i} is out of range or repeated")));
                }
                if !neurons[i].role.is_visible() || is_input[i] {
                    return Err(NetworkError::Invalid(format!("softmax group member {i} is not an output neuron")));
                }
                seen[i] = true;
            }
        }
        Ok(Network {
            neurons,
            edges,
            update,
            softmax_groups,
            incoming,
            is_input,
        })
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }

    pub fn neurons(&self) -> &[Neuron<T>] {
        &self.neurons
    }

    pub fn neuron(&self, i: usize) -> &Neuron<T> {
        &self.neurons[i]
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn update_mode(&self) -> UpdateMode {
        self.update
    }

    pub fn softmax_groups(&self) -> &[Vec<usize>] {
        &self.softmax_groups
    }

    /// `(edge index, source neuron)` for every edge into `i`.
    pub fn incoming(&self, i: usize) -> &[(usize, usize)] {
        &self.incoming[i]
    }

    /// Feedforward input neurons (always false in synchronous mode).
    pub fn is_input(&self, i: usize) -> bool {
        self.is_input[i]
    }

    pub fn inputs(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_input[i]).collect()
    }

    pub fn visible(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.neurons[i].role.is_visible()).collect()
    }

    /// First neuron with role `Atom(name)` satisfying `pred`.
    pub fn find_atom(&self, name: &str, pred: impl Fn(usize) -> bool) -> Option<usize> {
        (0..self.len()).find(|&i| matches!(&self.neurons[i].role, Role::Atom { name: n } if n == name) && pred(i))
    }

    /// Net input `b_i + Σ w x_from` of neuron `i`.
    #[inline]
    pub fn net_input(&self, i: usize, x: &[T]) -> T {
        let mut z = self.neurons[i].bias;
        for &(k, from) in &self.incoming[i] {
            z = z + self.edges[k].w * x[from];
        }
        z
    }

    fn check_dim(&self, x: &[T]) -> Result<(), NetworkError> {
        if x.len() != self.len() {
            Err(NetworkError::DimensionMismatch {
                expected: self.len(),
                found: x.len(),
            })
        } else {
            Ok(())
        }
    }

    /// One update step.
    pub fn update(&self, x: &[T]) -> Result<Vec<T>, NetworkError> {
        self.check_dim(x)?;
        let (y, _) = self.sweep(x);
        Ok(y)
    }

    /// One update; also returns every neuron's net input (as used by the
    /// softmax post-processing and by backpropagation).
    pub(crate) fn sweep(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        let n = self.len();
        let mut z = vec![T::zero(); n];
        let mut y;
        match self.update {
            UpdateMode::Synchronous => {
                y = vec![T::zero(); n];
                for i in 0..n {
                    z[i] = self.net_input(i, x);
                    y[i] = self.neurons[i].activation.apply(z[i]);
                }
                self.apply_softmax(&z, &mut y);
            }
            UpdateMode::Feedforward => {
                y = x.to_vec();
                for i in 0..n {
                    if !self.is_input[i] {
                        z[i] = self.net_input(i, &y);
                        y[i] = self.neurons[i].activation.apply(z[i]);
                    }
                }
                self.apply_softmax(&z, &mut y);
                let settled = y.clone();
                for i in 0..n {
                    if self.is_input[i] && !self.incoming[i].is_empty() {
                        z[i] = self.net_input(i, &settled);
                        y[i] = self.neurons[i].activation.apply(z[i]);
                    }
                }
            }
        }
        (y, z)
    }

    fn apply_softmax(&self, z: &[T], y: &mut [T]) {
        for g in &self.softmax_groups {
            let mut best = g[0];
            for &i in &g[1..] {
                if z[i] > z[best] {
                    best = i;
                }
            }
            for &i in g {
                y[i] = if i == best { T::one() } else { T::zero() };
            }
        }
    }

    /// Trainable parameters: edge weights in edge order, then biases in
    /// neuron order.
    pub fn params(&self) -> Vec<T> {
        self.edges
            .iter()
            .map(|e| e.w)
            .chain(self.neurons.iter().map(|n| n.bias))
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.edges.len() + self.neurons.len()
    }

    pub fn with_params(&self, params: &[T]) -> Result<Self, NetworkError> {
        if params.len() != self.param_count() {
            return Err(NetworkError::DimensionMismatch {
                expected: self.param_count(),
                found: params.len(),
            });
        }
        let mut out = self.clone();
        let m = self.edges.len();
        for (e, &w) in out.edges.iter_mut().zip(&params[..m]) {
            e.w = w;
        }
        for (nr, &b) in out.neurons.iter_mut().zip(&params[m..]) {
            nr.bias = b;
        }
        Ok(out)
    }

    /// Same structure over another scalar type.
    pub fn cast<U: Scalar>(&self) -> Network<U> {
        Network {
            neurons: self
                .neurons
                .iter()
                .map(|n| Neuron {
                    id: n.id,
                    bias: U::lit(n.bias.as_f64()),
                    activation: n.activation,
                    role: n.role.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    from: e.from,
                    to: e.to,
                    w: U::lit(e.w.as_f64()),
                })
                .collect(),
            update: self.update,
            softmax_groups: self.softmax_groups.clone(),
            incoming: self.incoming.clone(),
            is_input: self.is_input.clone(),
        }
    }
}

/// Incremental construction of a [`Network`].
#[derive(Debug, Clone)]
pub struct NetworkBuilder<T> {
    neurons: Vec<Neuron<T>>,
    edges: Vec<Edge<T>>,
    softmax_groups: Vec<Vec<usize>>,
}

impl<T: Scalar> Default for NetworkBuilder<T> {
    fn default() -> Self {
        NetworkBuilder {
            neurons: Vec::new(),
            edges: Vec::new(),
            softmax_groups: Vec::new(),
        }
    }
}

impl<T: Scalar> NetworkBuilder<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn neuron(&mut self, bias: T, activation: Activation, role: Role) -> usize {
        let id = self.neurons.len();
        self.neurons.push(Neuron {
            id,
            bias,
            activation,
            role,
        });
        id
    }

    pub fn edge(&mut self, from: usize, to: usize, w: T) -> &mut Self {
        self.edges.push(Edge { from, to, w });
        self
    }

    pub fn softmax_group(&mut self, ids: Vec<usize>) -> &mut Self {
        self.softmax_groups.push(ids);
        self
    }

    pub fn build(self, update: UpdateMode) -> Result<Network<T>, NetworkError> {
        Network::new(self.neurons, self.edges, update, self.softmax_groups)
    }
}

/// Binary state as a bitmask (bit `i` = neuron `i`).
pub fn state_mask<T: Scalar>(x: &[T]) -> Result<u64, NetworkError> {
    let mut m = 0u64;
    for (i, &v) in x.iter().enumerate() {
        if v == T::one() {
            m |= 1 << i;
        } else if v != T::zero() {
            return Err(NetworkError::NonBinary { neuron: i, value: v.as_f64() });
        }
    }
    Ok(m)
}

pub fn mask_state<T: Scalar>(mask: u64, n: usize) -> Vec<T> {
    (0..n).map(|i| if mask >> i & 1 == 1 { T::one() } else { T::zero() }).collect()
}

/// `(v0,v1,...)` rendering of a state.
pub struct StateDisplay<'a, T>(pub &'a [T]);

impl<T: Scalar> fmt::Display for StateDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The two-neuron recurrent network of the running example.
    pub fn two_cycle() -> Network<f64> {
        let mut b = NetworkBuilder::new();
        let a = b.neuron(2.0, Activation::StepGeq0, Role::atom("A"));
        let c = b.neuron(2.0, Activation::StepGeq0, Role::atom("B"));
        b.edge(a, a, -1.0).edge(c, c, -1.0).edge(a, c, -1.5).edge(c, a, -1.5);
        b.build(UpdateMode::Synchronous).unwrap()
    }

    #[test]
    fn two_cycle_updates() {
        let n = two_cycle();
        assert_eq!(n.update(&[0.0, 0.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(n.update(&[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(n.update(&[1.0, 0.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn identity_with_zero_weights_yields_biases() {
        let mut b = NetworkBuilder::new();
        let i = b.neuron(0.25, Activation::Identity, Role::Hidden);
        let j = b.neuron(-3.0, Activation::Identity, Role::Hidden);
        b.edge(i, j, 0.0);
        let n = b.build(UpdateMode::Synchronous).unwrap();
        assert_eq!(n.update(&[7.0, 9.0]).unwrap(), vec![0.25, -3.0]);
    }

    #[test]
    fn dimension_is_checked() {
        assert!(matches!(
            two_cycle().update(&[0.0]),
            Err(NetworkError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn softmax_ties_go_to_lowest_index() {
        let mut b = NetworkBuilder::new();
        let y1 = b.neuron(0.5, Activation::Sigmoid, Role::atom("Y1"));
        let y2 = b.neuron(0.5, Activation::Sigmoid, Role::atom("Y2"));
        b.softmax_group(vec![y1, y2]);
        let n = b.build(UpdateMode::Synchronous).unwrap();
        assert_eq!(n.update(&[0.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn feedforward_rejects_backward_edges_into_hidden() {
        let mut b = NetworkBuilder::<f64>::new();
        let x = b.neuron(0.0, Activation::Identity, Role::atom("X"));
        let h = b.neuron(0.0, Activation::Sigmoid, Role::Hidden);
        let o = b.neuron(0.0, Activation::Sigmoid, Role::atom("Y"));
        b.edge(x, h, 1.0).edge(h, o, 1.0).edge(o, h, 1.0);
        assert!(b.build(UpdateMode::Feedforward).is_err());
    }

    #[test]
    fn params_round_trip() {
        let n = two_cycle();
        let p = n.params();
        assert_eq!(p, vec![-1.0, -1.0, -1.5, -1.5, 2.0, 2.0]);
        assert_eq!(n.with_params(&p).unwrap(), n);
    }
}
