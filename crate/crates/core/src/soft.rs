//! Differentiable loss circuits compiled from fuzzy first-order sentences,
//! evaluated on the outputs of a feedforward network.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::DatLayout;
use crate::fidelity::{wmc, FidelityError};
use crate::logic::{Formula, Interpretation, KnowledgeBase, TNorm, Term, VariableAssignment};
use crate::network::{Activation, Network, Role, UpdateMode};
use crate::scalar::{pairwise_sum, Scalar};
use crate::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SoftError {
    #[error("no network output for `{0}`")]
    Unmapped(String),

    #[error("empty grounding batch for a quantified sentence")]
    EmptyBatch,

    #[error("variable `{0}` is not bound by the grounding")]
    Unbound(String),

    #[error("`{0}` is not a domain element")]
    UnknownElement(String),

    #[error("function terms cannot be grounded on a network: {0}")]
    FunctionTerm(String),

    #[error("neuron {0} has a step activation on a differentiable path")]
    StepOnPath(usize),

    #[error("network is not trainable: {0}")]
    Untrainable(String),

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("invalid training configuration: {0}")]
    Config(String),
}

/// How quantifiers over a batch are aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum QuantMode {
    HardMin,
    /// Softmax-weighted average with weights `exp(-v / temperature)`
    /// (`exp(v / temperature)` for the existential).
    Softmin { temperature: f64 },
}

impl Default for QuantMode {
    fn default() -> Self {
        QuantMode::Softmin { temperature: 0.1 }
    }
}

impl fmt::Display for QuantMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantMode::HardMin => f.write_str("min"),
            QuantMode::Softmin { temperature } => write!(f, "softmin:{temperature}"),
        }
    }
}

impl std::str::FromStr for QuantMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "min" => Ok(QuantMode::HardMin),
            Some(("softmin", t)) => {
                let temperature: f64 = t.parse().map_err(|_| format!("bad temperature `{t}`"))?;
                if temperature > 0.0 {
                    Ok(QuantMode::Softmin { temperature })
                } else {
                    Err("temperature must be positive".into())
                }
            }
            _ => Err(format!("unknown quantifier mode `{s}` (use min or softmin:T)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LossForm {
    /// `-ln(truth)`
    #[default]
    NegLog,
    /// `1 - truth`
    OneMinus,
}

impl std::str::FromStr for LossForm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "neglog" | "neg_log" => Ok(LossForm::NegLog),
            "oneminus" | "one_minus" => Ok(LossForm::OneMinus),
            other => Err(format!("unknown loss form `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CircuitConfig {
    pub tnorm: TNorm,
    pub quant: QuantMode,
    pub loss: LossForm,
}

/// Truth values below this are clamped before taking the logarithm.
const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Output of `neuron` on input row `row`.
    Leaf { row: usize, neuron: usize, atom: String },
    Const(f64),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Forall(Vec<usize>),
    Exists(Vec<usize>),
}

impl Node {
    pub fn kind(&self) -> &'static str {
        match self {
            Node::Leaf { .. } => "leaf",
            Node::Const(_) => "const",
            Node::Not(_) => "not",
            Node::And(..) => "and",
            Node::Or(..) => "or",
            Node::Implies(..) => "implies",
            Node::Forall(_) => "forall",
            Node::Exists(_) => "exists",
        }
    }
}

/// A scalar DAG in topological order: every node's operands precede it.
/// The root's value is the truth of the compiled sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCircuit {
    pub nodes: Vec<Node>,
    pub root: usize,
    /// Distinct network input rows the leaves refer to.
    pub rows: Vec<Vec<f64>>,
    pub cfg: CircuitConfig,
}

/// Values of every node, plus whether some node sits at a kink.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward<T> {
    pub values: Vec<T>,
    pub kink: bool,
}

impl LossCircuit {
    pub fn leaves(&self) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes.iter().enumerate().filter(|(_, n)| matches!(n, Node::Leaf { .. }))
    }

    /// Structure of the subcircuit at `node`, e.g. `implies(and(R1, not(R2)), R2)`.
    pub fn shape(&self, node: usize) -> String {
        match &self.nodes[node] {
            Node::Leaf { atom, .. } => atom.split('(').next().unwrap_or(atom).to_string(),
            Node::Const(v) => format!("{v}"),
            Node::Not(a) => format!("not({})", self.shape(*a)),
            Node::And(a, b) => format!("and({}, {})", self.shape(*a), self.shape(*b)),
            Node::Or(a, b) => format!("or({}, {})", self.shape(*a), self.shape(*b)),
            Node::Implies(a, b) => format!("implies({}, {})", self.shape(*a), self.shape(*b)),
            Node::Forall(cs) => format!("forall[{}]({})", cs.len(), cs.first().map_or(String::new(), |&c| self.shape(c))),
            Node::Exists(cs) => format!("exists[{}]({})", cs.len(), cs.first().map_or(String::new(), |&c| self.shape(c))),
        }
    }

    /// Evaluates the circuit with the given leaf values (indexed by node).
    /// `margin` is how close to a kink counts as being on it.
    pub fn forward_with<T: Scalar>(&self, leaf: impl Fn(usize) -> T, margin: T) -> Forward<T> {
        let mut values = Vec::with_capacity(self.nodes.len());
        let mut kink = false;
        let tn = self.cfg.tnorm;
        let one = T::one();
        for (i, node) in self.nodes.iter().enumerate() {
            let v = match node {
                Node::Leaf { .. } => leaf(i),
                Node::Const(c) => T::lit(*c),
                Node::Not(a) => one - values[*a],
                Node::And(a, b) => {
                    kink |= tn.and_grad(values[*a], values[*b], margin).2;
                    tn.and(values[*a], values[*b])
                }
                Node::Or(a, b) => {
                    kink |= tn.and_grad(one - values[*a], one - values[*b], margin).2;
                    tn.or(values[*a], values[*b])
                }
                Node::Implies(a, b) => {
                    kink |= tn.and_grad(values[*a], one - values[*b], margin).2;
                    tn.implies(values[*a], values[*b])
                }
                Node::Forall(cs) | Node::Exists(cs) => {
                    let sign = if matches!(node, Node::Forall(_)) { -one } else { one };
                    let vs: Vec<T> = cs.iter().map(|&c| values[c]).collect();
                    let (v, k) = quantify(self.cfg.quant, &vs, sign, margin);
                    kink |= k;
                    v
                }
            };
            values.push(v);
        }
        Forward { values, kink }
    }

    /// Reverse pass: adjoint of every node given the root adjoint.
    pub fn backward<T: Scalar>(&self, values: &[T], seed: T) -> Vec<T> {
        let mut adj = vec![T::zero(); self.nodes.len()];
        adj[self.root] = seed;
        let tn = self.cfg.tnorm;
        let one = T::one();
        let m = T::zero();
        for i in (0..self.nodes.len()).rev() {
            let g = adj[i];
            if g == T::zero() {
                continue;
            }
            match &self.nodes[i] {
                Node::Leaf { .. } | Node::Const(_) => {}
                Node::Not(a) => adj[*a] = adj[*a] - g,
                Node::And(a, b) => {
                    let (da, db, _) = tn.and_grad(values[*a], values[*b], m);
                    adj[*a] = adj[*a] + g * da;
                    adj[*b] = adj[*b] + g * db;
                }
                Node::Or(a, b) => {
                    let (da, db, _) = tn.and_grad(one - values[*a], one - values[*b], m);
                    adj[*a] = adj[*a] + g * da;
                    adj[*b] = adj[*b] + g * db;
                }
                Node::Implies(a, b) => {
                    // a -> b = 1 - and(a, 1 - b)
                    let (da, db, _) = tn.and_grad(values[*a], one - values[*b], m);
                    adj[*a] = adj[*a] - g * da;
                    adj[*b] = adj[*b] + g * db;
                }
                Node::Forall(cs) | Node::Exists(cs) => {
                    let sign = if matches!(self.nodes[i], Node::Forall(_)) { -one } else { one };
                    let vs: Vec<T> = cs.iter().map(|&c| values[c]).collect();
                    for (&c, d) in cs.iter().zip(quantify_grad(self.cfg.quant, &vs, sign, values[i])) {
                        adj[c] = adj[c] + g * d;
                    }
                }
            }
        }
        adj
    }

    pub fn loss_of<T: Scalar>(&self, truth: T) -> T {
        match self.cfg.loss {
            LossForm::NegLog => -truth.max(T::lit(LOG_FLOOR)).ln(),
            LossForm::OneMinus => T::one() - truth,
        }
    }

    fn dloss<T: Scalar>(&self, truth: T) -> T {
        match self.cfg.loss {
            LossForm::NegLog => {
                if truth > T::lit(LOG_FLOOR) {
                    -truth.recip()
                } else {
                    T::zero()
                }
            }
            LossForm::OneMinus => -T::one(),
        }
    }
}

/// Hard min/max or softmax-weighted average. `sign` is `-1` for the
/// universal and `+1` for the existential.
fn quantify<T: Scalar>(mode: QuantMode, vs: &[T], sign: T, margin: T) -> (T, bool) {
    if vs.is_empty() {
        // empty conjunction is true, empty disjunction false
        return (if sign < T::zero() { T::one() } else { T::zero() }, false);
    }
    match mode {
        QuantMode::HardMin => {
            let best = extreme(vs, sign);
            let ties = vs.iter().filter(|&&v| (v - best).abs() <= margin).count();
            (best, ties > 1)
        }
        QuantMode::Softmin { temperature } => {
            let w = soft_weights(vs, sign, T::lit(temperature));
            let terms: Vec<T> = w.iter().zip(vs).map(|(w, v)| *w * *v).collect();
            (pairwise_sum(&terms).max(T::zero()).min(T::one()), false)
        }
    }
}

fn extreme<T: Scalar>(vs: &[T], sign: T) -> T {
    vs.iter()
        .copied()
        .fold(vs[0], |a, b| if sign < T::zero() { a.min(b) } else { a.max(b) })
}

fn soft_weights<T: Scalar>(vs: &[T], sign: T, tau: T) -> Vec<T> {
    let top = extreme(vs, sign);
    let e: Vec<T> = vs.iter().map(|&v| (sign * (v - top) / tau).exp()).collect();
    let z = pairwise_sum(&e);
    e.into_iter().map(|x| x / z).collect()
}

fn quantify_grad<T: Scalar>(mode: QuantMode, vs: &[T], sign: T, value: T) -> Vec<T> {
    match mode {
        QuantMode::HardMin => {
            let best = extreme(vs, sign);
            let k = vs.iter().position(|&v| v == best).unwrap_or(0);
            (0..vs.len()).map(|i| if i == k { T::one() } else { T::zero() }).collect()
        }
        QuantMode::Softmin { temperature } => {
            let tau = T::lit(temperature);
            let w = soft_weights(vs, sign, tau);
            w.iter()
                .zip(vs)
                .map(|(&w, &v)| w * (T::one() + sign * (v - value) / tau))
                .collect()
        }
    }
}

struct Compiler<'a, T> {
    net: &'a Network<T>,
    layout: &'a DatLayout,
    nodes: Vec<Node>,
    rows: Vec<Vec<f64>>,
    cache: BTreeMap<(usize, usize), usize>,
}

impl<T: Scalar> Compiler<'_, T> {
    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn element(&self, name: &str) -> Result<usize, SoftError> {
        self.layout
            .domain
            .get_index_of(name)
            .ok_or_else(|| SoftError::UnknownElement(name.to_string()))
    }

    fn term(&self, t: &Term, env: &BTreeMap<String, usize>) -> Result<usize, SoftError> {
        match t {
            Term::Var(v) => env.get(v).copied().ok_or_else(|| SoftError::Unbound(v.clone())),
            Term::Const(c) => self.element(c),
            Term::Func(..) => Err(SoftError::FunctionTerm(t.to_string())),
        }
    }

    fn leaf(&mut self, pred: &str, args: Vec<usize>, env: &BTreeMap<String, usize>) -> Result<usize, SoftError> {
        let names: Vec<&String> = self.layout.domain.keys().collect();
        let atom = if args.is_empty() {
            pred.to_string()
        } else {
            let a: Vec<&str> = args.iter().map(|&e| names[e].as_str()).collect();
            format!("{pred}({})", a.join(", "))
        };
        let neuron = self
            .net
            .neurons()
            .iter()
            .find(|n| {
                !self.net.is_input(n.id)
                    && match &n.role {
                        Role::Pred { name, args: a } => name == pred && a.len() == args.len(),
                        Role::Atom { name } => args.is_empty() && name == pred,
                        _ => false,
                    }
            })
            .ok_or_else(|| SoftError::Unmapped(atom.clone()))?;
        // each variable slot takes the element of the matching argument,
        // else the element its namesake is bound to, else the first element
        let slot_args: &[String] = match &neuron.role {
            Role::Pred { args, .. } => args,
            _ => &[],
        };
        let mut row = Vec::new();
        for v in &self.layout.vars {
            let mut chosen: Option<usize> = None;
            for (k, a) in slot_args.iter().enumerate() {
                if a == v {
                    if chosen.is_some_and(|c| c != args[k]) {
                        return Err(SoftError::Unmapped(format!("{atom} (repeated slot `{v}`)")));
                    }
                    chosen = Some(args[k]);
                }
            }
            let e = chosen.or_else(|| env.get(v).copied()).unwrap_or(0);
            row.extend_from_slice(&self.layout.domain[e]);
        }
        let row_id = match self.rows.iter().position(|r| *r == row) {
            Some(r) => r,
            None => {
                self.rows.push(row);
                self.rows.len() - 1
            }
        };
        let key = (neuron.id, row_id);
        if let Some(&id) = self.cache.get(&key) {
            return Ok(id);
        }
        let id = self.push(Node::Leaf {
            row: row_id,
            neuron: neuron.id,
            atom,
        });
        self.cache.insert(key, id);
        Ok(id)
    }

    fn formula(&mut self, f: &Formula, env: &mut BTreeMap<String, usize>) -> Result<usize, SoftError> {
        Ok(match f {
            Formula::True => self.push(Node::Const(1.0)),
            Formula::False => self.push(Node::Const(0.0)),
            Formula::Atom(a) => self.leaf(a, Vec::new(), env)?,
            Formula::Pred(p, ts) => {
                let args = ts.iter().map(|t| self.term(t, env)).collect::<Result<Vec<_>, _>>()?;
                self.leaf(p, args, env)?
            }
            Formula::Not(a) => {
                let a = self.formula(a, env)?;
                self.push(Node::Not(a))
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                let x = self.formula(a, env)?;
                let y = self.formula(b, env)?;
                match f {
                    Formula::And(..) => self.push(Node::And(x, y)),
                    Formula::Or(..) => self.push(Node::Or(x, y)),
                    Formula::Implies(..) => self.push(Node::Implies(x, y)),
                    _ => {
                        let l = self.push(Node::Implies(x, y));
                        let r = self.push(Node::Implies(y, x));
                        self.push(Node::And(l, r))
                    }
                }
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let saved = env.get(v).copied();
                let mut cs = Vec::new();
                for e in 0..self.layout.domain.len() {
                    env.insert(v.clone(), e);
                    cs.push(self.formula(body, env)?);
                }
                match saved {
                    Some(s) => env.insert(v.clone(), s),
                    None => env.remove(v),
                };
                if matches!(f, Formula::Forall(..)) {
                    self.push(Node::Forall(cs))
                } else {
                    self.push(Node::Exists(cs))
                }
            }
        })
    }
}

fn check_differentiable<T: Scalar>(net: &Network<T>, leaves: &[usize]) -> Result<(), SoftError> {
    let mut seen = vec![false; net.len()];
    let mut stack: Vec<usize> = leaves.to_vec();
    while let Some(i) = stack.pop() {
        if std::mem::replace(&mut seen[i], true) || net.is_input(i) {
            continue;
        }
        if net.neuron(i).activation == Activation::StepGeq0 {
            return Err(SoftError::StepOnPath(i));
        }
        stack.extend(net.incoming(i).iter().map(|&(_, from)| from));
    }
    Ok(())
}

fn check_trainable<T: Scalar>(net: &Network<T>) -> Result<(), SoftError> {
    if net.update_mode() != UpdateMode::Feedforward {
        return Err(SoftError::Untrainable("update mode must be feedforward".into()));
    }
    if !net.softmax_groups().is_empty() {
        return Err(SoftError::Untrainable("hard softmax groups have no gradient".into()));
    }
    if net.edges().iter().any(|e| e.from >= e.to) {
        return Err(SoftError::Untrainable("recurrent edges".into()));
    }
    Ok(())
}

/// Compiles `sentence` into a circuit over the network's outputs. Leading
/// universal quantifiers bound by every grounding, and free variables, range
/// over the grounding batch; other quantifiers range over the whole domain.
pub fn compile_loss<T: Scalar>(
    sentence: &Formula,
    groundings: &[VariableAssignment],
    net: &Network<T>,
    layout: &DatLayout,
    cfg: &CircuitConfig,
) -> Result<LossCircuit, SoftError> {
    check_trainable(net)?;
    let mut batch_vars = Vec::new();
    let mut body = sentence;
    // a leading universal the batch does not bind ranges over the domain
    while let Formula::Forall(v, b) = body {
        if groundings.is_empty() || groundings.iter().any(|g| g.get(v).is_none()) {
            break;
        }
        batch_vars.push(v.clone());
        body = b;
    }
    for v in body.free_vars() {
        if !batch_vars.contains(&v) {
            batch_vars.push(v);
        }
    }
    let mut c = Compiler {
        net,
        layout,
        nodes: Vec::new(),
        rows: Vec::new(),
        cache: BTreeMap::new(),
    };
    let root = if batch_vars.is_empty() {
        c.formula(body, &mut BTreeMap::new())?
    } else {
        if groundings.is_empty() {
            return Err(SoftError::EmptyBatch);
        }
        let mut seen: Vec<BTreeMap<String, usize>> = Vec::new();
        for g in groundings {
            let mut env = BTreeMap::new();
            for v in &batch_vars {
                let e = g.get(v).ok_or_else(|| SoftError::Unbound(v.clone()))?;
                env.insert(v.clone(), c.element(e)?);
            }
            if !seen.contains(&env) {
                seen.push(env);
            }
        }
        let mut cs = Vec::new();
        for mut env in seen {
            cs.push(c.formula(body, &mut env)?);
        }
        c.push(Node::Forall(cs))
    };
    let leaves: Vec<usize> = c
        .nodes
        .iter()
        .filter_map(|n| match n {
            Node::Leaf { neuron, .. } => Some(*neuron),
            _ => None,
        })
        .collect();
    check_differentiable(net, &leaves)?;
    Ok(LossCircuit {
        nodes: c.nodes,
        root,
        rows: c.rows,
        cfg: *cfg,
    })
}

/// One forward pass of a feedforward net: `(y, z)` with inputs clamped.
fn forward_net<T: Scalar>(net: &Network<T>, row: &[f64]) -> (Vec<T>, Vec<T>) {
    let n = net.len();
    let mut y = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    for (&i, &v) in net.inputs().iter().zip(row) {
        y[i] = T::lit(v);
    }
    for i in 0..n {
        if !net.is_input(i) {
            z[i] = net.net_input(i, &y);
            y[i] = net.neuron(i).activation.apply(z[i]);
        }
    }
    (y, z)
}

/// Loss, gradient with respect to `net.params()`, truth value, and whether
/// the point is (within `margin` of) a kink.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad<T> {
    pub loss: T,
    pub truth: T,
    pub grad: Vec<T>,
    pub kink: bool,
}

fn eval_with_margin<T: Scalar>(c: &LossCircuit, net: &Network<T>, margin: T) -> LossGrad<T> {
    let passes: Vec<(Vec<T>, Vec<T>)> = c.rows.iter().map(|r| forward_net(net, r)).collect();
    let fw = c.forward_with(
        |i| match &c.nodes[i] {
            Node::Leaf { row, neuron, .. } => passes[*row].0[*neuron],
            _ => unreachable!("only leaves are looked up"),
        },
        margin,
    );
    let mut kink = fw.kink;
    let truth = fw.values[c.root];
    let loss = c.loss_of(truth);
    let adj = c.backward(&fw.values, c.dloss(truth));
    let mut dy: Vec<Vec<T>> = vec![vec![T::zero(); net.len()]; c.rows.len()];
    for (i, node) in c.nodes.iter().enumerate() {
        if let Node::Leaf { row, neuron, .. } = node {
            dy[*row][*neuron] = dy[*row][*neuron] + adj[i];
        }
    }
    let ne = net.edges().len();
    let mut grad = vec![T::zero(); net.param_count()];
    for (r, (y, z)) in passes.iter().enumerate() {
        let d = &mut dy[r];
        for i in (0..net.len()).rev() {
            if net.is_input(i) || d[i] == T::zero() {
                continue;
            }
            let act = net.neuron(i).activation;
            if act == Activation::Relu && z[i].abs() <= margin {
                kink = true;
            }
            let delta = d[i] * act.derivative(z[i], y[i]).unwrap_or(T::zero());
            grad[ne + i] = grad[ne + i] + delta;
            for &(k, from) in net.incoming(i) {
                grad[k] = grad[k] + delta * y[from];
                d[from] = d[from] + delta * net.edges()[k].w;
            }
        }
    }
    LossGrad { loss, truth, grad, kink }
}

/// Reverse-mode loss and gradient of one circuit.
pub fn eval_loss_and_grad<T: Scalar>(c: &LossCircuit, net: &Network<T>) -> LossGrad<T> {
    eval_with_margin(c, net, T::zero())
}

/// Loss only, for finite differences.
pub fn eval_loss<T: Scalar>(c: &LossCircuit, net: &Network<T>) -> T {
    let passes: Vec<Vec<T>> = c.rows.iter().map(|r| forward_net(net, r).0).collect();
    let fw = c.forward_with(
        |i| match &c.nodes[i] {
            Node::Leaf { row, neuron, .. } => passes[*row][*neuron],
            _ => unreachable!(),
        },
        T::zero(),
    );
    c.loss_of(fw.values[c.root])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheck {
    /// Largest relative error over parameters whose gradients are not both ~0.
    pub max_rel_err: f64,
    pub max_abs_err: f64,
    pub passed: bool,
    /// The point sits at a kink; the comparison was skipped.
    pub nondifferentiable: bool,
    pub params: usize,
}

/// Absolute error accepted where gradients vanish.
pub const ZERO_GRAD_ABS_TOL: f64 = 1e-8;

/// Compares the analytic gradient with central differences of step `h`.
/// A parameter passes when its relative error is at most `tol` or its
/// absolute error at most [`ZERO_GRAD_ABS_TOL`].
pub fn grad_check(c: &LossCircuit, net: &Network<f64>, h: f64, tol: f64) -> GradCheck {
    let margin = (h * 100.0).max(1e-9);
    let lg = eval_with_margin(c, net, margin);
    let params = net.params();
    if lg.kink {
        return GradCheck {
            max_rel_err: 0.0,
            max_abs_err: 0.0,
            passed: true,
            nondifferentiable: true,
            params: params.len(),
        };
    }
    let mut max_rel: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut passed = true;
    let mut p = params.clone();
    for k in 0..params.len() {
        p[k] = params[k] + h;
        let up = eval_loss(c, &net.with_params(&p).expect("same shape"));
        p[k] = params[k] - h;
        let down = eval_loss(c, &net.with_params(&p).expect("same shape"));
        p[k] = params[k];
        let numeric = (up - down) / (2.0 * h);
        let abs = (numeric - lg.grad[k]).abs();
        let scale = numeric.abs().max(lg.grad[k].abs());
        max_abs = max_abs.max(abs);
        if scale > ZERO_GRAD_ABS_TOL {
            max_rel = max_rel.max(abs / scale);
        }
        if abs > ZERO_GRAD_ABS_TOL && abs > tol * scale {
            passed = false;
        }
    }
    GradCheck {
        max_rel_err: max_rel,
        max_abs_err: max_abs,
        passed,
        nondifferentiable: false,
        params: params.len(),
    }
}

/// Semantic loss `-ln P(constraint)` with its gradient with respect to the
/// probabilities, from the same exact model count as probability fidelity.
pub fn semantic_reg_loss<T: Scalar>(probs: &Interpretation<T>, constraint: &KnowledgeBase) -> Result<(T, T, Vec<T>), Error> {
    let r = wmc(probs, constraint)?;
    if r.p <= T::zero() {
        return Err(FidelityError::ZeroProbability.into());
    }
    let grad = r.grad.iter().map(|&g| -g / r.p).collect();
    Ok((-r.p.ln(), r.p, grad))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    pub lambda_data: f64,
    pub lambda_kb: f64,
    pub circuit: CircuitConfig,
    /// Stop once the total loss falls below this.
    pub tol: f64,
    /// Redraw all parameters uniformly from `[-init, init]` before training.
    pub init: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 0.5,
            epochs: 2000,
            seed: 0,
            lambda_data: 1.0,
            lambda_kb: 1.0,
            circuit: CircuitConfig::default(),
            tol: 1e-6,
            init: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), SoftError> {
        let bad = |m: &str| Err(SoftError::Config(m.to_string()));
        if !(self.lr > 0.0) {
            return bad("learning rate must be positive");
        }
        if !(self.tol > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.lambda_data >= 0.0 && self.lambda_kb >= 0.0) {
            return bad("weights must be non-negative");
        }
        if let QuantMode::Softmin { temperature } = self.circuit.quant {
            if !(temperature > 0.0) {
                return bad("temperature must be positive");
            }
        }
        if self.init.is_some_and(|s| !(s > 0.0)) {
            return bad("initial weight scale must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub data_loss: f64,
    pub kb_loss: f64,
    /// Smallest truth value among the knowledge-base sentences.
    pub fidelity: f64,
}

/// Parameters redrawn uniformly from `[-scale, scale]`.
pub fn randomize<T: Scalar>(net: &Network<T>, scale: f64, rng: &mut impl Rng) -> Network<T> {
    let p: Vec<T> = (0..net.param_count())
        .map(|_| T::lit(rng.random_range(-scale..=scale)))
        .collect();
    net.with_params(&p).expect("same shape")
}

/// Compiles every sentence of a knowledge base.
pub fn compile_kb<T: Scalar>(
    l: &KnowledgeBase,
    groundings: &[VariableAssignment],
    net: &Network<T>,
    layout: &DatLayout,
    cfg: &CircuitConfig,
) -> Result<Vec<LossCircuit>, SoftError> {
    l.formulas().map(|f| compile_loss(f, groundings, net, layout, cfg)).collect()
}

struct Objective<T> {
    loss: T,
    data: T,
    kb: T,
    fidelity: T,
    grad: Vec<T>,
}

fn objective<T: Scalar>(data: &[LossCircuit], kb: &[LossCircuit], net: &Network<T>, cfg: &TrainConfig) -> Objective<T> {
    let mut grad = vec![T::zero(); net.param_count()];
    let mut sum = |cs: &[LossCircuit], lambda: T| {
        let mut losses = Vec::new();
        let mut fid = T::one();
        for c in cs {
            let lg = eval_loss_and_grad(c, net);
            losses.push(lg.loss);
            fid = fid.min(lg.truth);
            if lambda != T::zero() {
                for (g, d) in grad.iter_mut().zip(&lg.grad) {
                    *g = *g + lambda * *d;
                }
            }
        }
        (pairwise_sum(&losses), fid)
    };
    let (ld, lk) = (T::lit(cfg.lambda_data), T::lit(cfg.lambda_kb));
    let (data_loss, _) = sum(data, ld);
    let (kb_loss, fidelity) = sum(kb, lk);
    Objective {
        loss: ld * data_loss + lk * kb_loss,
        data: data_loss,
        kb: kb_loss,
        fidelity,
        grad,
    }
}

/// Full-batch gradient descent on `λ_data·loss(L_data) + λ_kb·loss(L_kb)`.
/// The history has one record per completed epoch plus the final state.
pub fn train_soft<T: Scalar>(
    net: &Network<T>,
    l_data: &KnowledgeBase,
    l_kb: &KnowledgeBase,
    groundings: &[VariableAssignment],
    layout: &DatLayout,
    cfg: &TrainConfig,
) -> Result<(Network<T>, Vec<EpochRecord>), Error> {
    cfg.validate()?;
    let mut net = match cfg.init {
        Some(scale) => randomize(net, scale, &mut ChaCha8Rng::seed_from_u64(cfg.seed)),
        None => net.clone(),
    };
    let data = compile_kb(l_data, groundings, &net, layout, &cfg.circuit)?;
    let kb = compile_kb(l_kb, groundings, &net, layout, &cfg.circuit)?;
    let lr = T::lit(cfg.lr);
    let mut history = Vec::new();
    for epoch in 0..=cfg.epochs {
        let o = objective(&data, &kb, &net, cfg);
        if !o.loss.is_finite() {
            return Err(SoftError::Diverged {
                epoch,
                loss: o.loss.as_f64(),
            }
            .into());
        }
        history.push(EpochRecord {
            epoch,
            data_loss: o.data.as_f64(),
            kb_loss: o.kb.as_f64(),
            fidelity: o.fidelity.as_f64(),
        });
        if epoch == cfg.epochs || o.loss.as_f64() < cfg.tol {
            break;
        }
        let p: Vec<T> = net.params().iter().zip(&o.grad).map(|(&p, &g)| p - lr * g).collect();
        net = net.with_params(&p)?;
    }
    Ok((net, history))
}

/// Total training objective at the current parameters.
pub fn objective_value<T: Scalar>(
    net: &Network<T>,
    data: &[LossCircuit],
    kb: &[LossCircuit],
    cfg: &TrainConfig,
) -> (T, Vec<T>) {
    let o = objective(data, kb, net, cfg);
    (o.loss, o.grad)
}

/// Output values of the predicate neurons on the input row encoding
/// `elements` (one per layout variable), named by predicate only.
pub fn output_probs<T: Scalar>(
    net: &Network<T>,
    layout: &DatLayout,
    elements: &[&str],
) -> Result<Interpretation<T>, Error> {
    let mut row = Vec::new();
    for e in elements {
        let enc = layout
            .domain
            .get(*e)
            .ok_or_else(|| SoftError::UnknownElement(e.to_string()))?;
        row.extend_from_slice(enc);
    }
    let (y, _) = forward_net(net, &row);
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (id, name, _) in layout.pred_neurons() {
        if !names.contains(name) {
            names.push(name.clone());
            values.push(y[*id]);
        }
    }
    let u = std::sync::Arc::new(crate::logic::Universe::propositional(&names));
    Ok(Interpretation::new(u, values)?)
}
