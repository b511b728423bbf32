//! Herbrand interpretations over variant classes of atoms and the
//! satisfaction relation.

mod enumerate;
mod eval;
mod interpretation;
mod matching;

use thiserror::Error;

pub use enumerate::{enumerate_atoms, enumerate_expressions, Universe};
pub use eval::{
    check_program, satisfies_bounded, satisfies_exact, CheckReport, Evaluation, Evaluator, ExpressionReport, Mode,
    Statistics,
};
pub use interpretation::{interp_from_atoms, member, Interpretation, RangePolicy, Signature};
pub use matching::{match_leaf, skeleton_leaves, support_candidates, UnsupportedCorner};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HerbrandError {
    #[error("line {line}: `{expr}` is not an atom")]
    NotAnAtom { line: usize, expr: String },
    #[error("a signature needs at least one symbol")]
    EmptySignature,
    #[error("the maximal arity must be at least 1")]
    ZeroMaxArity,
}
