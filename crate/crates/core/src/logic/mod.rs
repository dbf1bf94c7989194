//! Propositional and finite-domain first-order logic: syntax, parsing,
//! crisp and fuzzy semantics, grounding and brute-force model enumeration.

pub mod ground;
pub mod models;
pub mod parser;
pub mod semantics;
pub mod syntax;
pub mod universe;

pub use ground::{ground, GroundedKb};
pub use models::{
    enumerate_models, entails, kb_universe, models_of, penalty_models, Cube, InterpretationSet,
    PenaltyResult, PropExpr,
};
pub use parser::{parse_formula, parse_kb, parse_open_formula, parse_rules, RuleAst};
pub use semantics::{
    evaluate, evaluate_fuzzy, evaluate_fuzzy_in, evaluate_in, satisfies_all, FuzzyConfig, Structure, TNorm,
    VariableAssignment,
};
pub use syntax::{
    Annotation, Formula, FunctionDecl, KbKind, KnowledgeBase, Pos, Sentence, Signature, Term,
};
pub use universe::{mask_string, GroundAtom, Interpretation, Universe, MAX_EXPLICIT_ATOMS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogicError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },

    #[error("{pos}: `{symbol}` used with {found} argument(s), declared with {expected}")]
    ArityMismatch {
        pos: Pos,
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("{pos}: unbound variable `{var}`")]
    Unbound { pos: Pos, var: String },

    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("universe has {atoms} atoms; at most {max} supported here")]
    UniverseTooLarge { atoms: usize, max: usize },

    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("atom `{0}` is not in the universe")]
    UnknownAtom(String),

    #[error("`{0}` is not a domain element or constant")]
    UnknownElement(String),

    #[error("value {value} of `{atom}` is not crisp")]
    NotCrisp { atom: String, value: f64 },

    #[error("value {value} of `{atom}` lies outside [0,1]")]
    OutOfRange { atom: String, value: f64 },

    #[error("unreducible term: {0}")]
    UnreducibleTerm(String),

    #[error("quantifier over an empty domain")]
    EmptyDomain,

    #[error("formula is not ground: {0}")]
    NotGround(String),

    #[error("annotation mismatch: {0}")]
    Annotation(String),

    #[error("interpretation sets live over different universes")]
    UniverseMismatch,
}
