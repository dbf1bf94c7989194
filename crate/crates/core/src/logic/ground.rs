//! Grounding of finite-domain first-order knowledge bases.

use std::sync::Arc;

use super::syntax::{Formula, KnowledgeBase, Sentence, Signature, Term};
use super::universe::Universe;
use super::LogicError;

/// A quantifier-free knowledge base over every ground atom of a signature.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundedKb {
    pub kb: KnowledgeBase,
    pub universe: Arc<Universe>,
}

/// Replaces quantifiers by finite conjunctions/disjunctions over the domain
/// (in domain order) and reduces every term to a domain element. One output
/// sentence per input sentence, annotations kept.
pub fn ground(kb: &KnowledgeBase, sig: &Signature) -> Result<GroundedKb, LogicError> {
    let g = Grounder { sig };
    let sentences = kb
        .sentences
        .iter()
        .map(|s| {
            Ok(Sentence {
                annotation: s.annotation,
                formula: g.formula(&s.formula, &mut Vec::new())?,
                pos: s.pos,
            })
        })
        .collect::<Result<Vec<_>, LogicError>>()?;
    Ok(GroundedKb {
        kb: KnowledgeBase {
            signature: sig.clone(),
            sentences,
        },
        universe: Arc::new(Universe::from_signature(sig)),
    })
}

struct Grounder<'a> {
    sig: &'a Signature,
}

impl Grounder<'_> {
    fn formula(&self, f: &Formula, env: &mut Vec<(String, String)>) -> Result<Formula, LogicError> {
        Ok(match f {
            Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
            Formula::Pred(p, args) => {
                if let Some(&k) = self.sig.predicates.get(p) {
                    if k != args.len() {
                        return Err(LogicError::Arity {
                            symbol: p.clone(),
                            expected: k,
                            found: args.len(),
                        });
                    }
                }
                let args = args
                    .iter()
                    .map(|t| self.term(t, env).map(Term::Const))
                    .collect::<Result<Vec<_>, _>>()?;
                Formula::Pred(p.clone(), args)
            }
            Formula::Not(a) => self.formula(a, env)?.not(),
            Formula::And(a, b) => self.formula(a, env)?.and(self.formula(b, env)?),
            Formula::Or(a, b) => self.formula(a, env)?.or(self.formula(b, env)?),
            Formula::Implies(a, b) => self.formula(a, env)?.implies(self.formula(b, env)?),
            Formula::Iff(a, b) => self.formula(a, env)?.iff(self.formula(b, env)?),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                if self.sig.domain.is_empty() {
                    return Err(LogicError::EmptyDomain);
                }
                let mut parts = Vec::with_capacity(self.sig.domain.len());
                for d in &self.sig.domain {
                    env.push((v.clone(), d.clone()));
                    let part = self.formula(body, env);
                    env.pop();
                    parts.push(part?);
                }
                if matches!(f, Formula::Forall(..)) {
                    Formula::conjunction(parts)
                } else {
                    Formula::disjunction(parts)
                }
            }
        })
    }

    fn term(&self, t: &Term, env: &[(String, String)]) -> Result<String, LogicError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, d)| d.clone())
                .ok_or_else(|| LogicError::UnboundVariable(v.clone())),
            Term::Const(c) => self
                .sig
                .resolve_constant(c)
                .map(str::to_string)
                .ok_or_else(|| LogicError::UnknownElement(c.clone())),
            Term::Func(name, args) => {
                let decl = self
                    .sig
                    .functions
                    .get(name)
                    .ok_or_else(|| LogicError::UnreducibleTerm(format!("undeclared function `{name}`")))?;
                if decl.arity != args.len() {
                    return Err(LogicError::Arity {
                        symbol: name.clone(),
                        expected: decl.arity,
                        found: args.len(),
                    });
                }
                let table = decl
                    .table
                    .as_ref()
                    .ok_or_else(|| LogicError::UnreducibleTerm(format!("no table for function `{name}`")))?;
                let args = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                table.get(&args).cloned().ok_or_else(|| {
                    LogicError::UnreducibleTerm(format!("`{name}({})` is missing from its table", args.join(", ")))
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parser::parse_kb;
    use crate::logic::syntax::KbKind;

    #[test]
    fn universal_becomes_conjunction() {
        let kb = parse_kb("domain D = {a, b};\nforall x. P(x).", KbKind::Fol).unwrap();
        let g = ground(&kb, &kb.signature).unwrap();
        assert_eq!(
            g.kb.sentences[0].formula,
            Formula::ground("P", &["a"]).and(Formula::ground("P", &["b"]))
        );
    }

    #[test]
    fn existential_becomes_disjunction() {
        let kb = parse_kb("domain D = {a, b};\nexists x. P(x).", KbKind::Fol).unwrap();
        let g = ground(&kb, &kb.signature).unwrap();
        assert_eq!(
            g.kb.sentences[0].formula,
            Formula::ground("P", &["a"]).or(Formula::ground("P", &["b"]))
        );
    }

    #[test]
    fn terms_reduce_through_tables() {
        let kb = parse_kb(
            "domain D = {a, b};\nfunc f/1 = {a -> b, b -> b};\nforall x. P(x) -> Q(f(x)).",
            KbKind::Fol,
        )
        .unwrap();
        let g = ground(&kb, &kb.signature).unwrap();
        let pa = Formula::ground("P", &["a"]).implies(Formula::ground("Q", &["b"]));
        let pb = Formula::ground("P", &["b"]).implies(Formula::ground("Q", &["b"]));
        assert_eq!(g.kb.sentences[0].formula, pa.and(pb));
    }

    #[test]
    fn missing_table_is_unreducible() {
        let kb = parse_kb("domain D = {a};\nfunc f/1;\nforall x. P(f(x)).", KbKind::Fol).unwrap();
        assert!(matches!(
            ground(&kb, &kb.signature),
            Err(LogicError::UnreducibleTerm(_))
        ));
    }

    #[test]
    fn constants_resolve_to_elements() {
        let kb = parse_kb("domain D = {a, b};\nconst c = b;\nP(c).", KbKind::Fol).unwrap();
        let g = ground(&kb, &kb.signature).unwrap();
        assert_eq!(g.kb.sentences[0].formula, Formula::ground("P", &["b"]));
    }
}
