//! Test-side formula generators with their own evaluators.

#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use semanc_core::logic::{GroundAtom, Signature, Universe};

/// Propositional formulas over atoms `p0..pn`.
#[derive(Clone, Debug)]
pub enum F {
    Atom(usize),
    Not(Box<F>),
    /// 0 `&`, 1 `|`, 2 `->`, 3 `<->`
    Bin(u8, Box<F>, Box<F>),
}

impl F {
    pub fn eval(&self, m: u64) -> bool {
        match self {
            F::Atom(i) => m >> i & 1 == 1,
            F::Not(a) => !a.eval(m),
            F::Bin(op, a, b) => {
                let (x, y) = (a.eval(m), b.eval(m));
                match op {
                    0 => x && y,
                    1 => x || y,
                    2 => !x || y,
                    _ => x == y,
                }
            }
        }
    }

    /// Gödel semantics on integer tenths: `~v = 10 - v`, min, max.
    pub fn eval_tenths(&self, v: &[i32]) -> i32 {
        match self {
            F::Atom(i) => v[*i],
            F::Not(a) => 10 - a.eval_tenths(v),
            F::Bin(op, a, b) => {
                let (x, y) = (a.eval_tenths(v), b.eval_tenths(v));
                match op {
                    0 => x.min(y),
                    1 => x.max(y),
                    2 => (10 - x).max(y),
                    _ => (10 - x).max(y).min((10 - y).max(x)),
                }
            }
        }
    }

    pub fn text(&self) -> String {
        match self {
            F::Atom(i) => format!("p{i}"),
            F::Not(a) => format!("~({})", a.text()),
            F::Bin(op, a, b) => {
                let sym = ["&", "|", "->", "<->"][*op as usize];
                format!("({}) {sym} ({})", a.text(), b.text())
            }
        }
    }
}

/// Folds atom indices into `0..n`.
pub fn clamp_atoms(f: F, n: usize) -> F {
    match f {
        F::Atom(i) => F::Atom(i % n),
        F::Not(a) => F::Not(Box::new(clamp_atoms(*a, n))),
        F::Bin(op, a, b) => F::Bin(op, Box::new(clamp_atoms(*a, n)), Box::new(clamp_atoms(*b, n))),
    }
}

pub fn formula(n: usize, depth: u32) -> impl Strategy<Value = F> {
    let leaf = (0..n).prop_map(F::Atom);
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            1 => inner.clone().prop_map(|a| F::Not(Box::new(a))),
            4 => (0u8..4, inner.clone(), inner).prop_map(|(op, a, b)| F::Bin(op, Box::new(a), Box::new(b))),
        ]
    })
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

pub fn prop_universe(n: usize) -> Arc<Universe> {
    Arc::new(Universe::propositional(&names(n)))
}

pub fn kb_text(n: usize, fs: &[F]) -> String {
    let mut s = format!("atoms {};\n", names(n).join(" "));
    for f in fs {
        s += &format!("{}.\n", f.text());
    }
    s
}

pub fn oracle_models(n: usize, fs: &[F]) -> Vec<u64> {
    (0..1u64 << n).filter(|&m| fs.iter().all(|f| f.eval(m))).collect()
}

pub const DOMAIN: [&str; 3] = ["a", "b", "c"];

/// First-order formulas over unary `P`, `Q` and the domain `a, b, c`.
/// Quantifiers bind `v{depth}`; an atom's term picks a bound variable or a
/// constant.
#[derive(Clone, Debug)]
pub enum G {
    Atom(bool, u8),
    Not(Box<G>),
    Bin(u8, Box<G>, Box<G>),
    Quant(bool, Box<G>),
}

/// Crisp unary tables: bit `e` of `p` is `P(DOMAIN[e])`.
#[derive(Clone, Copy, Debug)]
pub struct Tables {
    pub p: u8,
    pub q: u8,
}

impl G {
    fn term(t: u8, scope: &[usize]) -> Result<usize, usize> {
        let k = t as usize % (scope.len() + DOMAIN.len());
        if k < scope.len() {
            Ok(k)
        } else {
            Err(k - scope.len())
        }
    }

    pub fn text(&self, scope: usize) -> String {
        let vars: Vec<usize> = (0..scope).collect();
        self.text_in(&vars)
    }

    fn text_in(&self, scope: &[usize]) -> String {
        match self {
            G::Atom(p, t) => {
                let arg = match G::term(*t, scope) {
                    Ok(v) => format!("v{v}"),
                    Err(c) => DOMAIN[c].to_string(),
                };
                format!("{}({arg})", if *p { "P" } else { "Q" })
            }
            G::Not(a) => format!("~({})", a.text_in(scope)),
            G::Bin(op, a, b) => {
                let sym = ["&", "|", "->", "<->"][*op as usize];
                format!("({}) {sym} ({})", a.text_in(scope), b.text_in(scope))
            }
            G::Quant(all, body) => {
                let mut inner = scope.to_vec();
                inner.push(scope.len());
                let q = if *all { "forall" } else { "exists" };
                format!("{q} v{}. ({})", scope.len(), body.text_in(&inner))
            }
        }
    }

    /// Truth under `tables` with `env[v]` the element bound to `v{v}`.
    pub fn eval(&self, tables: Tables, env: &mut Vec<usize>) -> bool {
        match self {
            G::Atom(p, t) => {
                let scope: Vec<usize> = (0..env.len()).collect();
                let e = match G::term(*t, &scope) {
                    Ok(v) => env[v],
                    Err(c) => c,
                };
                let table = if *p { tables.p } else { tables.q };
                table >> e & 1 == 1
            }
            G::Not(a) => !a.eval(tables, env),
            G::Bin(op, a, b) => {
                let (x, y) = (a.eval(tables, env), b.eval(tables, env));
                match op {
                    0 => x && y,
                    1 => x || y,
                    2 => !x || y,
                    _ => x == y,
                }
            }
            G::Quant(all, body) => {
                let mut hits = 0;
                for e in 0..DOMAIN.len() {
                    env.push(e);
                    hits += body.eval(tables, env) as usize;
                    env.pop();
                }
                if *all {
                    hits == DOMAIN.len()
                } else {
                    hits > 0
                }
            }
        }
    }
}

pub fn fol(depth: u32) -> impl Strategy<Value = G> {
    let leaf = (any::<bool>(), any::<u8>()).prop_map(|(p, t)| G::Atom(p, t));
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            1 => inner.clone().prop_map(|a| G::Not(Box::new(a))),
            3 => (0u8..4, inner.clone(), inner.clone()).prop_map(|(op, a, b)| G::Bin(op, Box::new(a), Box::new(b))),
            2 => (any::<bool>(), inner).prop_map(|(all, b)| G::Quant(all, Box::new(b))),
        ]
    })
}

pub fn fol_sig() -> Signature {
    let mut s = Signature {
        domain: DOMAIN.iter().map(|d| d.to_string()).collect(),
        ..Signature::default()
    };
    s.predicates.insert("P".into(), 1);
    s.predicates.insert("Q".into(), 1);
    s
}

/// Reads the unary tables off a mask over `u`.
pub fn tables_of(u: &Universe, mask: u64) -> Tables {
    let mut t = Tables { p: 0, q: 0 };
    for (e, d) in DOMAIN.iter().enumerate() {
        let bit = |pred: &str| {
            let i = u.index_of(&GroundAtom::new(pred, &[d])).expect("atom in universe");
            (mask >> i & 1) as u8
        };
        t.p |= bit("P") << e;
        t.q |= bit("Q") << e;
    }
    t
}
