//! Abstract syntax for propositional and finite-domain first-order sentences.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use num_rational::Rational64;

/// Line/column of a construct in its source text (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Func(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(name.to_string())
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Func(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n) | Term::Const(n) => f.write_str(n),
            Term::Func(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A propositional or first-order formula.
///
/// `True` and `False` are the nullary connectives; everything else follows
/// the usual recursive construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Pred(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(name.to_string())
    }

    pub fn pred(name: &str, args: Vec<Term>) -> Self {
        Formula::Pred(name.to_string(), args)
    }

    /// Ground predicate application `name(c1, ..., ck)`.
    pub fn ground(name: &str, consts: &[&str]) -> Self {
        Formula::Pred(
            name.to_string(),
            consts.iter().map(|c| Term::constant(c)).collect(),
        )
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Formula) -> Self {
        Formula::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn forall(var: &str, body: Formula) -> Self {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Self {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; `True` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(|a, b| a.and(b))
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` for an empty iterator.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(|a, b| a.or(b))
            .unwrap_or(Formula::False)
    }

    /// Variables occurring outside the scope of a binding quantifier.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Pred(_, args) => {
                let mut vs = BTreeSet::new();
                args.iter().for_each(|t| t.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Pred(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    /// Propositional atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Symbol count: one per atom, predicate, constant truth value,
    /// connective and quantifier. Parentheses, variables and predicate
    /// arguments are free.
    pub fn symbol_cost(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Pred(..) => 1,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.symbol_cost(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.symbol_cost() + b.symbol_cost(),
        }
    }

    /// Rewrites `a <-> b` into `(a -> b) & (b -> a)` everywhere.
    pub fn expand_iff(&self) -> Formula {
        match self {
            Formula::Iff(a, b) => {
                let (a, b) = (a.expand_iff(), b.expand_iff());
                a.clone().implies(b.clone()).and(b.implies(a))
            }
            Formula::Not(a) => a.expand_iff().not(),
            Formula::And(a, b) => a.expand_iff().and(b.expand_iff()),
            Formula::Or(a, b) => a.expand_iff().or(b.expand_iff()),
            Formula::Implies(a, b) => a.expand_iff().implies(b.expand_iff()),
            Formula::Forall(v, a) => Formula::forall(v, a.expand_iff()),
            Formula::Exists(v, a) => Formula::exists(v, a.expand_iff()),
            other => other.clone(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Forall(..) | Formula::Exists(..) => 0,
            _ => 5,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, c: &Formula, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        let p = self.precedence();
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => f.write_str(a),
            Formula::Pred(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Formula::Not(a) => {
                f.write_str("~")?;
                child(f, a, a.precedence() < 5)
            }
            Formula::Forall(v, body) => write!(f, "forall {v}. {body}"),
            Formula::Exists(v, body) => write!(f, "exists {v}. {body}"),
            Formula::Implies(a, b) => {
                child(f, a, a.precedence() <= p)?;
                f.write_str(" -> ")?;
                child(f, b, b.precedence() < p)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                let op = match self {
                    Formula::And(..) => " & ",
                    Formula::Or(..) => " | ",
                    _ => " <-> ",
                };
                child(f, a, a.precedence() < p)?;
                f.write_str(op)?;
                child(f, b, b.precedence() <= p)
            }
        }
    }
}

/// Sentence annotation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Annotation {
    #[default]
    None,
    /// `[lo, hi]: phi`: the fuzzy truth value must lie in the interval.
    Fuzzy { lo: f64, hi: f64 },
    /// `w :: phi`: violating the sentence costs `w`.
    Penalty(Rational64),
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::None => Ok(()),
            Annotation::Fuzzy { lo, hi } => write!(f, "[{lo:?}, {hi:?}]: "),
            Annotation::Penalty(w) => write!(f, "{} :: ", format_rational(w)),
        }
    }
}

/// Renders a rational with a terminating decimal expansion as a decimal,
/// otherwise as `n/d`.
pub(crate) fn format_rational(r: &Rational64) -> String {
    let mut d = *r.denom();
    let mut scale = 0u32;
    while d % 10 == 0 {
        d /= 10;
        scale += 1;
    }
    let mut twos = 0;
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    let mut fives = 0;
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = scale + twos.max(fives);
    let factor = 10i128.pow(digits);
    let scaled = *r.numer() as i128 * factor / *r.denom() as i128;
    if digits == 0 {
        return scaled.to_string();
    }
    let neg = scaled < 0;
    let s = scaled.unsigned_abs().to_string();
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub annotation: Annotation,
    pub formula: Formula,
    pub pos: Option<Pos>,
}

impl Sentence {
    pub fn plain(formula: Formula) -> Self {
        Sentence {
            annotation: Annotation::None,
            formula,
            pos: None,
        }
    }

    pub fn with(annotation: Annotation, formula: Formula) -> Self {
        Sentence {
            annotation,
            formula,
            pos: None,
        }
    }
}

/// Function symbol declaration with an optional interpretation table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FunctionDecl {
    pub arity: usize,
    /// Argument tuple (domain element names) to result element.
    pub table: Option<IndexMap<Vec<String>, String>>,
}

/// Vocabulary of a knowledge base.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Signature {
    pub prop_atoms: Vec<String>,
    pub predicates: IndexMap<String, usize>,
    pub functions: IndexMap<String, FunctionDecl>,
    /// Constant name to the domain element it denotes (`None`: the element
    /// with the same name).
    pub constants: IndexMap<String, Option<String>>,
    pub domain: Vec<String>,
}

impl Signature {
    pub fn propositional<S: AsRef<str>>(atoms: &[S]) -> Self {
        Signature {
            prop_atoms: atoms.iter().map(|a| a.as_ref().to_string()).collect(),
            ..Default::default()
        }
    }

    /// Domain element denoted by a constant or element name.
    pub fn resolve_constant<'a>(&'a self, name: &'a str) -> Option<&'a str> {
        match self.constants.get(name) {
            Some(Some(target)) => Some(target.as_str()),
            Some(None) if self.domain.iter().any(|d| d == name) => Some(name),
            Some(None) => None,
            None => self.domain.iter().find(|d| *d == name).map(|d| d.as_str()),
        }
    }

    pub fn is_first_order(&self) -> bool {
        !self.predicates.is_empty() || !self.domain.is_empty()
    }
}

/// Which flavour of sentence annotations a knowledge base carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KbKind {
    Prop,
    Fol,
    Program,
    Penalty,
    Fuzzy,
}

impl std::str::FromStr for KbKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "prop" => KbKind::Prop,
            "fol" => KbKind::Fol,
            "program" => KbKind::Program,
            "penalty" => KbKind::Penalty,
            "fuzzy" => KbKind::Fuzzy,
            other => return Err(format!("unknown knowledge-base kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KnowledgeBase {
    pub signature: Signature,
    pub sentences: Vec<Sentence>,
}

impl KnowledgeBase {
    pub fn new(signature: Signature, formulas: Vec<Formula>) -> Self {
        KnowledgeBase {
            signature,
            sentences: formulas.into_iter().map(Sentence::plain).collect(),
        }
    }

    /// Propositional KB whose signature lists the atoms of `formulas` in
    /// order of first occurrence.
    pub fn from_formulas(formulas: Vec<Formula>) -> Self {
        let mut atoms: Vec<String> = Vec::new();
        for f in &formulas {
            for a in f.atoms() {
                if !atoms.contains(&a) {
                    atoms.push(a);
                }
            }
        }
        KnowledgeBase::new(Signature::propositional(&atoms), formulas)
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.sentences.iter().map(|s| &s.formula)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Union of two knowledge bases over a merged signature.
    pub fn union(&self, other: &KnowledgeBase) -> KnowledgeBase {
        let mut sig = self.signature.clone();
        merge_signature(&mut sig, &other.signature);
        let mut sentences = self.sentences.clone();
        sentences.extend(other.sentences.iter().cloned());
        KnowledgeBase {
            signature: sig,
            sentences,
        }
    }

    pub fn push(&mut self, formula: Formula) {
        self.sentences.push(Sentence::plain(formula));
    }

    /// The conjunction of all sentences, ignoring annotations.
    pub fn as_single_formula(&self) -> Formula {
        Formula::conjunction(self.formulas().cloned())
    }
}

pub(crate) fn merge_signature(into: &mut Signature, from: &Signature) {
    for a in &from.prop_atoms {
        if !into.prop_atoms.contains(a) {
            into.prop_atoms.push(a.clone());
        }
    }
    for (p, k) in &from.predicates {
        into.predicates.entry(p.clone()).or_insert(*k);
    }
    for (f, d) in &from.functions {
        into.functions.entry(f.clone()).or_insert_with(|| d.clone());
    }
    for (c, d) in &from.constants {
        into.constants.entry(c.clone()).or_insert_with(|| d.clone());
    }
    for d in &from.domain {
        if !into.domain.contains(d) {
            into.domain.push(d.clone());
        }
    }
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = &self.signature;
        if !sig.prop_atoms.is_empty() {
            writeln!(f, "atoms {};", sig.prop_atoms.join(" "))?;
        }
        if !sig.domain.is_empty() {
            writeln!(f, "domain D = {{{}}};", sig.domain.join(", "))?;
        }
        for (p, k) in &sig.predicates {
            writeln!(f, "pred {p}/{k};")?;
        }
        for (name, decl) in &sig.functions {
            write!(f, "func {name}/{}", decl.arity)?;
            if let Some(table) = &decl.table {
                f.write_str(" = {")?;
                for (i, (args, out)) in table.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    if args.len() == 1 {
                        write!(f, "{} -> {out}", args[0])?;
                    } else {
                        write!(f, "({}) -> {out}", args.join(", "))?;
                    }
                }
                f.write_str("}")?;
            }
            writeln!(f, ";")?;
        }
        for (c, target) in &sig.constants {
            match target {
                Some(t) => writeln!(f, "const {c} = {t};")?,
                None => writeln!(f, "const {c};")?,
            }
        }
        for s in &self.sentences {
            writeln!(f, "{}{}.", s.annotation, s.formula)?;
        }
        Ok(())
    }
}
