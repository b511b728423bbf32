//! Reflective predicate logic: a single category of expressions covering
//! terms and formulas, rectification and variance, Herbrand-style
//! satisfaction over variant classes of atoms, and the first-order fragment.

pub mod fragment;
pub mod herbrand;
pub mod parser;
pub mod rectify;
pub mod syntax;
pub mod verdict;

pub use parser::{parse, parse_lines, print_canonical, ParseError, ParseErrorKind, SourceSpan};
pub use rectify::{canonical_key, is_variant, rect, rect_set, substitute, RectOutcome, RectVariable, VariantKey};
pub use syntax::{Connective, Constructor, Expression, Quantifier, Symbol};
pub use verdict::Verdict;
