//! Hand-written lexer and recursive-descent parser for the knowledge-base
//! text format.
//!
//! ```text
//! atoms A B C;            domain D = {a, b};      pred P/1;
//! func f/1 = {a -> b, b -> b};                    const c = a;
//! A & B -> C.             [0.6, 0.8]: P(a).       2.5 :: ~A.
//! C :- A, ~B.             forall x. P(x) -> Q(f(x)).
//! ```
//!
//! Precedence from loosest to tightest: `<->` (left), `->` (right), `|`,
//! `&`, then `~` and quantifiers. A quantifier body extends as far right as
//! possible.

use indexmap::IndexMap;
use num_rational::Rational64;

use super::syntax::{Annotation, Formula, FunctionDecl, KbKind, KnowledgeBase, Pos, Sentence, Signature, Term};
use super::LogicError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Semi,
    Dot,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Colon,
    ColonColon,
    Turnstile,
    Not,
    And,
    Or,
    Arrow,
    DArrow,
    Eq,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Colon => ":",
            Tok::ColonColon => "::",
            Tok::Turnstile => ":-",
            Tok::Not => "~",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::Eq => "=",
            Tok::Slash => "/",
            _ => "?",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, LogicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            Tok::Num(chars[start..i].iter().collect())
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('<', Some('-')) if chars.get(i + 2) == Some(&'>') => (Tok::DArrow, 3),
                ('-', Some('>')) => (Tok::Arrow, 2),
                (':', Some('-')) => (Tok::Turnstile, 2),
                (':', Some(':')) => (Tok::ColonColon, 2),
                (':', _) => (Tok::Colon, 1),
                (';', _) => (Tok::Semi, 1),
                ('.', _) => (Tok::Dot, 1),
                (',', _) => (Tok::Comma, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('[', _) => (Tok::LBrack, 1),
                (']', _) => (Tok::RBrack, 1),
                ('~', _) | ('!', _) => (Tok::Not, 1),
                ('&', _) => (Tok::And, 1),
                ('|', _) => (Tok::Or, 1),
                ('=', _) => (Tok::Eq, 1),
                ('/', _) => (Tok::Slash, 1),
                _ => {
                    return Err(LogicError::Syntax {
                        pos,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            i += len;
            tok
        };
        col += i - start;
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// A parsed logic-program clause `head :- body.` (a fact has an empty body).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleAst {
    pub head: String,
    /// `(atom, positive)`
    pub body: Vec<(String, bool)>,
    pub pos: Pos,
}

enum Item {
    Sentence(Sentence),
    Rule(RuleAst),
}

const KEYWORDS: [&str; 9] = ["atoms", "domain", "pred", "func", "const", "forall", "exists", "true", "false"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    sig: Signature,
    bound: Vec<String>,
    /// Unresolved term identifiers become free variables instead of errors.
    open: bool,
    /// Whether a `domain` declaration has been seen.
    declared_domain: bool,
}

impl Parser {
    fn new(text: &str) -> Result<Self, LogicError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            sig: Signature::default(),
            bound: Vec::new(),
            open: false,
            declared_domain: false,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, LogicError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.err(format!("expected `{}`, found {}", tok.symbol(), self.peek().describe()))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), LogicError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let p = self.bump().1;
                Ok((s, p))
            }
            other => self.err(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn number(&mut self) -> Result<(String, Pos), LogicError> {
        match self.peek().clone() {
            Tok::Num(s) => {
                let p = self.bump().1;
                Ok((s, p))
            }
            other => self.err(format!("expected number, found {}", other.describe())),
        }
    }

    fn items(&mut self) -> Result<Vec<Item>, LogicError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            if let Tok::Ident(kw) = self.peek().clone() {
                let is_decl = matches!(kw.as_str(), "atoms" | "domain" | "pred" | "func" | "const")
                    && matches!(self.peek_at(1), Tok::Ident(_));
                if is_decl {
                    self.bump();
                    self.declaration(&kw)?;
                    continue;
                }
            }
            out.push(self.item()?);
        }
        Ok(out)
    }

    fn declaration(&mut self, kw: &str) -> Result<(), LogicError> {
        match kw {
            "atoms" => {
                while *self.peek() != Tok::Semi {
                    let (name, _) = self.ident()?;
                    self.add_prop(&name);
                    self.eat(&Tok::Comma);
                }
            }
            "domain" => {
                self.ident()?;
                self.expect(Tok::Eq)?;
                self.expect(Tok::LBrace)?;
                while *self.peek() != Tok::RBrace {
                    let (e, _) = self.ident()?;
                    if !self.sig.domain.contains(&e) {
                        self.sig.domain.push(e);
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
                self.declared_domain = true;
            }
            "pred" | "func" => loop {
                let (name, pos) = self.ident()?;
                self.expect(Tok::Slash)?;
                let (k, kpos) = self.number()?;
                let arity: usize = k.parse().map_err(|_| LogicError::Syntax {
                    pos: kpos,
                    message: format!("bad arity `{k}`"),
                })?;
                if arity == 0 {
                    return Err(LogicError::Syntax {
                        pos: kpos,
                        message: "arity must be at least 1".into(),
                    });
                }
                if kw == "pred" {
                    self.declare_pred(&name, arity, pos)?;
                } else {
                    self.declare_func(&name, arity, pos)?;
                    if self.eat(&Tok::Eq) {
                        let table = self.func_table(arity)?;
                        self.sig.functions[&name].table = Some(table);
                    }
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            },
            "const" => {
                while *self.peek() != Tok::Semi {
                    let (name, _) = self.ident()?;
                    let target = if self.eat(&Tok::Eq) {
                        Some(self.ident()?.0)
                    } else {
                        None
                    };
                    self.sig.constants.insert(name, target);
                    self.eat(&Tok::Comma);
                }
            }
            _ => unreachable!(),
        }
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn func_table(&mut self, arity: usize) -> Result<IndexMap<Vec<String>, String>, LogicError> {
        let mut table = IndexMap::new();
        self.expect(Tok::LBrace)?;
        while *self.peek() != Tok::RBrace {
            let pos = self.pos();
            let args = if self.eat(&Tok::LParen) {
                let mut args = vec![self.ident()?.0];
                while self.eat(&Tok::Comma) {
                    args.push(self.ident()?.0);
                }
                self.expect(Tok::RParen)?;
                args
            } else {
                vec![self.ident()?.0]
            };
            if args.len() != arity {
                return Err(LogicError::Syntax {
                    pos,
                    message: format!("table row has {} argument(s), expected {arity}", args.len()),
                });
            }
            self.expect(Tok::Arrow)?;
            let out = self.ident()?.0;
            table.insert(args, out);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(table)
    }

    fn add_prop(&mut self, name: &str) {
        if !self.sig.prop_atoms.iter().any(|a| a == name) {
            self.sig.prop_atoms.push(name.to_string());
        }
    }

    fn declare_pred(&mut self, name: &str, arity: usize, pos: Pos) -> Result<(), LogicError> {
        match self.sig.predicates.get(name) {
            Some(&k) if k != arity => Err(LogicError::ArityMismatch {
                pos,
                symbol: name.to_string(),
                expected: k,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.sig.predicates.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    fn declare_func(&mut self, name: &str, arity: usize, pos: Pos) -> Result<(), LogicError> {
        match self.sig.functions.get(name) {
            Some(d) if d.arity != arity => Err(LogicError::ArityMismatch {
                pos,
                symbol: name.to_string(),
                expected: d.arity,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.sig.functions.insert(
                    name.to_string(),
                    FunctionDecl {
                        arity,
                        table: None,
                    },
                );
                Ok(())
            }
        }
    }

    fn item(&mut self) -> Result<Item, LogicError> {
        let pos = self.pos();
        let annotation = if self.eat(&Tok::LBrack) {
            let lo = self.fuzzy_bound()?;
            self.expect(Tok::Comma)?;
            let hi = self.fuzzy_bound()?;
            self.expect(Tok::RBrack)?;
            self.expect(Tok::Colon)?;
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(LogicError::Syntax {
                    pos,
                    message: format!("fuzzy interval [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1"),
                });
            }
            Annotation::Fuzzy { lo, hi }
        } else if matches!(self.peek(), Tok::Num(_)) && *self.peek_at(1) == Tok::ColonColon {
            let (w, wpos) = self.number()?;
            self.bump();
            let w = parse_decimal(&w).ok_or_else(|| LogicError::Syntax {
                pos: wpos,
                message: format!("penalty weight `{w}` is not a decimal"),
            })?;
            if w <= Rational64::from_integer(0) {
                return Err(LogicError::Syntax {
                    pos: wpos,
                    message: "penalty weight must be positive".into(),
                });
            }
            Annotation::Penalty(w)
        } else {
            Annotation::None
        };

        // rule `H :- body.`
        if annotation == Annotation::None {
            if let (Tok::Ident(h), Tok::Turnstile) = (self.peek().clone(), self.peek_at(1).clone()) {
                if !KEYWORDS.contains(&h.as_str()) {
                    self.bump();
                    self.bump();
                    self.check_prop_use(&h, pos)?;
                    self.add_prop(&h);
                    let mut body = Vec::new();
                    loop {
                        let positive = !self.eat(&Tok::Not);
                        let (a, apos) = self.ident()?;
                        self.check_prop_use(&a, apos)?;
                        self.add_prop(&a);
                        body.push((a, positive));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::Dot)?;
                    return Ok(Item::Rule(RuleAst { head: h, body, pos }));
                }
            }
        }

        let formula = self.formula()?;
        self.expect(Tok::Dot)?;
        Ok(Item::Sentence(Sentence {
            annotation,
            formula,
            pos: Some(pos),
        }))
    }

    fn fuzzy_bound(&mut self) -> Result<f64, LogicError> {
        let (s, pos) = self.number()?;
        s.parse().map_err(|_| LogicError::Syntax {
            pos,
            message: format!("bad number `{s}`"),
        })
    }

    fn check_prop_use(&self, name: &str, pos: Pos) -> Result<(), LogicError> {
        if let Some(&k) = self.sig.predicates.get(name) {
            return Err(LogicError::ArityMismatch {
                pos,
                symbol: name.to_string(),
                expected: k,
                found: 0,
            });
        }
        Ok(())
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::DArrow) {
            let rhs = self.implication()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let mut vars = vec![self.ident()?.0];
                while let Tok::Ident(_) = self.peek() {
                    vars.push(self.ident()?.0);
                }
                self.expect(Tok::Dot)?;
                let depth = self.bound.len();
                self.bound.extend(vars.iter().cloned());
                let body = self.formula();
                self.bound.truncate(depth);
                let mut f = body?;
                for v in vars.iter().rev() {
                    f = if kw == "forall" {
                        Formula::forall(v, f)
                    } else {
                        Formula::exists(v, f)
                    };
                }
                Ok(f)
            }
            Tok::Ident(kw) if kw == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(kw) if kw == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(_) => {
                let (name, _) = self.ident()?;
                if self.eat(&Tok::LParen) {
                    let args = self.term_list()?;
                    self.declare_pred(&name, args.len(), pos)?;
                    Ok(Formula::Pred(name, args))
                } else {
                    self.check_prop_use(&name, pos)?;
                    self.add_prop(&name);
                    Ok(Formula::Atom(name))
                }
            }
            other => self.err(format!("expected a formula, found {}", other.describe())),
        }
    }

    /// Arguments after an opening parenthesis, through the closing one.
    fn term_list(&mut self) -> Result<Vec<Term>, LogicError> {
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        let (name, pos) = self.ident()?;
        if self.eat(&Tok::LParen) {
            let args = self.term_list()?;
            self.declare_func(&name, args.len(), pos)?;
            return Ok(Term::Func(name, args));
        }
        if self.bound.contains(&name) {
            return Ok(Term::Var(name));
        }
        if self.sig.constants.contains_key(&name) || self.sig.domain.contains(&name) {
            return Ok(Term::Const(name));
        }
        if self.open {
            return Ok(Term::Var(name));
        }
        if self.declared_domain {
            return Err(LogicError::Unbound { pos, var: name });
        }
        // no declared domain: the constants mentioned make up the domain
        self.sig.domain.push(name.clone());
        Ok(Term::Const(name))
    }
}

/// Parses a terminating decimal (`2`, `0.25`) into an exact rational.
fn parse_decimal(s: &str) -> Option<Rational64> {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let denom = 10i64.checked_pow(frac.len() as u32)?;
    let numer: i64 = format!("{int}{frac}").parse().ok()?;
    Some(Rational64::new(numer, denom))
}

fn check_kind(kb: &KnowledgeBase, rules: &[RuleAst], kind: KbKind) -> Result<(), LogicError> {
    let first_order = |f: &Formula| {
        let mut fo = false;
        f.visit(&mut |g| {
            if matches!(g, Formula::Pred(..) | Formula::Forall(..) | Formula::Exists(..)) {
                fo = true;
            }
        });
        fo
    };
    let bad = |s: &Sentence, msg: &str| LogicError::Syntax {
        pos: s.pos.unwrap_or_default(),
        message: msg.to_string(),
    };
    for s in &kb.sentences {
        match kind {
            KbKind::Prop => {
                if s.annotation != Annotation::None {
                    return Err(bad(s, "annotations are not allowed in a propositional knowledge base"));
                }
                if first_order(&s.formula) {
                    return Err(bad(s, "first-order construct in a propositional knowledge base"));
                }
            }
            KbKind::Fol => {
                if s.annotation != Annotation::None {
                    return Err(bad(s, "annotations are not allowed in a first-order knowledge base"));
                }
            }
            KbKind::Program => {
                if !matches!(s.formula, Formula::Atom(_)) || s.annotation != Annotation::None {
                    return Err(bad(s, "a logic program contains only rules `H :- L1, ..., Ln.` and facts `H.`"));
                }
            }
            KbKind::Penalty => {
                if !matches!(s.annotation, Annotation::Penalty(_)) {
                    return Err(bad(s, "every sentence of a penalty knowledge base needs a weight `w ::`"));
                }
            }
            KbKind::Fuzzy => {
                if !matches!(s.annotation, Annotation::Fuzzy { .. }) {
                    return Err(bad(s, "every sentence of a fuzzy knowledge base needs an interval `[a, b]:`"));
                }
            }
        }
    }
    if !rules.is_empty() && matches!(kind, KbKind::Penalty | KbKind::Fuzzy) {
        return Err(LogicError::Syntax {
            pos: rules[0].pos,
            message: "rules need no annotation but this file kind requires one".into(),
        });
    }
    Ok(())
}

fn rule_formula(r: &RuleAst) -> Formula {
    let head = Formula::atom(&r.head);
    if r.body.is_empty() {
        return head;
    }
    let body = Formula::conjunction(r.body.iter().map(|(a, pos)| {
        let f = Formula::atom(a);
        if *pos {
            f
        } else {
            f.not()
        }
    }));
    body.implies(head)
}

fn parse_items(text: &str) -> Result<(Signature, Vec<Item>), LogicError> {
    let mut p = Parser::new(text)?;
    let items = p.items()?;
    Ok((p.sig, items))
}

/// Parses a knowledge base of the given kind. Rules `H :- B.` become the
/// implication `B -> H`; use [`parse_rules`] to keep the clause structure.
pub fn parse_kb(text: &str, kind: KbKind) -> Result<KnowledgeBase, LogicError> {
    let (signature, items) = parse_items(text)?;
    let mut sentences = Vec::new();
    let mut rules = Vec::new();
    for item in items {
        match item {
            Item::Sentence(s) => sentences.push(s),
            Item::Rule(r) => {
                sentences.push(Sentence {
                    annotation: Annotation::None,
                    formula: rule_formula(&r),
                    pos: Some(r.pos),
                });
                rules.push(r);
            }
        }
    }
    let kb = KnowledgeBase { signature, sentences };
    if kind == KbKind::Program {
        // facts are the only plain sentences allowed next to rules
        let facts = KnowledgeBase {
            signature: kb.signature.clone(),
            sentences: kb
                .sentences
                .iter()
                .filter(|s| !rules.iter().any(|r| Some(r.pos) == s.pos))
                .cloned()
                .collect(),
        };
        check_kind(&facts, &rules, kind)?;
    } else {
        check_kind(&kb, &rules, kind)?;
    }
    Ok(kb)
}

/// Parses a logic program into its clauses; plain atoms are facts.
pub fn parse_rules(text: &str) -> Result<(Signature, Vec<RuleAst>), LogicError> {
    let (signature, items) = parse_items(text)?;
    let mut rules = Vec::new();
    for item in items {
        match item {
            Item::Rule(r) => rules.push(r),
            Item::Sentence(s) => match (&s.formula, s.annotation) {
                (Formula::Atom(a), Annotation::None) => rules.push(RuleAst {
                    head: a.clone(),
                    body: Vec::new(),
                    pos: s.pos.unwrap_or_default(),
                }),
                _ => {
                    return Err(LogicError::Syntax {
                        pos: s.pos.unwrap_or_default(),
                        message: "a logic program contains only rules `H :- L1, ..., Ln.` and facts `H.`".into(),
                    })
                }
            },
        }
    }
    Ok((signature, rules))
}

/// Parses a single closed formula (no trailing dot needed) against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, LogicError> {
    formula_with(text, sig, false)
}

/// Like [`parse_formula`] but identifiers that are neither bound, constants
/// nor domain elements become free variables.
pub fn parse_open_formula(text: &str, sig: &Signature) -> Result<Formula, LogicError> {
    formula_with(text, sig, true)
}

fn formula_with(text: &str, sig: &Signature, open: bool) -> Result<Formula, LogicError> {
    let mut p = Parser::new(text)?;
    p.sig = sig.clone();
    p.open = open;
    p.declared_domain = !sig.domain.is_empty();
    let f = p.formula()?;
    p.eat(&Tok::Dot);
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {} after formula", p.peek().describe()));
    }
    Ok(f)
}
