//! Expression data model: one syntactic category covering what first-order
//! logic splits into terms and formulas.
//!
//! There is no variable alternative. A symbol or compound expression becomes
//! a variable only by being quantified, so every expression is closed.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Keywords that can never be symbols.
pub const KEYWORDS: [&str; 2] = ["forall", "exists"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("empty symbol")]
    Empty,
    #[error("symbol `{0}` contains a character outside [A-Za-z0-9_]")]
    InvalidChar(String),
    #[error("`{0}` is a keyword")]
    Keyword(String),
    #[error("`{0}` is in a reserved namespace (v<n> and g<n> are minted internally)")]
    Reserved(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("application of `{0}` has no arguments")]
    ZeroArityApplication(String),
    #[error("`{0}` is in a reserved namespace")]
    ReservedSymbol(String),
    #[error(transparent)]
    InvalidSymbol(#[from] SymbolError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Origin {
    User,
    Minted,
}

/// A non-logical symbol.
///
/// Equality, ordering and hashing look at the name only; the origin flag only
/// records whether a name in a reserved namespace was produced internally.
#[derive(Clone)]
pub struct Symbol {
    name: Arc<str>,
    origin: Origin,
}

fn reserved_index(name: &str, prefix: char) -> Option<u32> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// True for names in the `v<n>` / `g<n>` namespaces (n a positive numeral without leading zeros).
pub fn is_reserved_name(name: &str) -> bool {
    reserved_index(name, 'v').is_some() || reserved_index(name, 'g').is_some()
}

fn check_name(name: &str) -> Result<(), SymbolError> {
    if name.is_empty() {
        return Err(SymbolError::Empty);
    }
    if !name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
        return Err(SymbolError::InvalidChar(name.to_string()));
    }
    if KEYWORDS.contains(&name) {
        return Err(SymbolError::Keyword(name.to_string()));
    }
    Ok(())
}

impl Symbol {
    /// A user symbol. Rejects malformed names, keywords and reserved names.
    pub fn new(name: &str) -> Result<Self, SymbolError> {
        check_name(name)?;
        if is_reserved_name(name) {
            return Err(SymbolError::Reserved(name.to_string()));
        }
        Ok(Symbol { name: name.into(), origin: Origin::User })
    }

    /// Builds a symbol without any check. [`Expression::validate`] re-checks
    /// trees built this way.
    pub fn unchecked(name: &str) -> Self {
        Symbol { name: name.into(), origin: Origin::User }
    }

    /// The rectification variable `v<index>`.
    pub fn rect_var(index: u32) -> Self {
        assert!(index >= 1, "rectification variables start at v1");
        Symbol { name: format!("v{index}").into(), origin: Origin::Minted }
    }

    /// The generic atom symbol `g<index>`.
    pub fn generic(index: u32) -> Self {
        assert!(index >= 1, "generic atoms start at g1");
        Symbol { name: format!("g{index}").into(), origin: Origin::Minted }
    }

    /// Placeholder used while re-rectifying expressions that already contain
    /// rectification variables. Never printed in a finished result.
    pub(crate) fn placeholder(index: u32) -> Self {
        Symbol { name: format!("$p{index}").into(), origin: Origin::Minted }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_minted(&self) -> bool {
        self.origin == Origin::Minted
    }

    /// Index `i` if this is the rectification variable `v<i>`.
    pub fn rect_index(&self) -> Option<u32> {
        reserved_index(&self.name, 'v')
    }

    /// Index `n` if this is the generic atom `g<n>`.
    pub fn generic_index(&self) -> Option<u32> {
        reserved_index(&self.name, 'g')
    }

    pub(crate) fn placeholder_index(&self) -> Option<u32> {
        self.name.strip_prefix("$p")?.parse().ok()
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Implies,
}

impl Connective {
    pub const ALL: [Connective; 3] = [Connective::And, Connective::Or, Connective::Implies];

    pub fn token(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Implies => "=>",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub const ALL: [Quantifier; 2] = [Quantifier::Forall, Quantifier::Exists];

    pub fn token(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// An expression. Terms and formulas share this one type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expression {
    Sym(Symbol),
    Apply(Box<Expression>, Vec<Expression>),
    Neg(Box<Expression>),
    Conn(Connective, Box<Expression>, Box<Expression>),
    /// Quantifier, quantified (variable) expression, body.
    Quant(Quantifier, Box<Expression>, Box<Expression>),
}

/// The outermost constructor of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constructor<'a> {
    Expr(&'a Expression),
    Neg,
    Conn(Connective),
    Quant(Quantifier),
}

impl Expression {
    pub fn sym(symbol: Symbol) -> Self {
        Expression::Sym(symbol)
    }

    /// Applies `constructor` to `args`; at least one argument is required.
    pub fn apply(constructor: Expression, args: Vec<Expression>) -> Result<Self, SyntaxError> {
        if args.is_empty() {
            return Err(SyntaxError::ZeroArityApplication(constructor.to_string()));
        }
        Ok(Expression::Apply(Box::new(constructor), args))
    }

    pub fn neg(body: Expression) -> Self {
        Expression::Neg(Box::new(body))
    }

    pub fn conn(op: Connective, left: Expression, right: Expression) -> Self {
        Expression::Conn(op, Box::new(left), Box::new(right))
    }

    pub fn quant(q: Quantifier, var: Expression, body: Expression) -> Self {
        Expression::Quant(q, Box::new(var), Box::new(body))
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self {
            Expression::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// Re-checks a tree built outside the parser: every application has an
    /// argument and every user symbol is well formed and outside the reserved
    /// namespaces.
    pub fn validate(self) -> Result<Self, SyntaxError> {
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<(), SyntaxError> {
        match self {
            Expression::Sym(s) => {
                if s.is_minted() {
                    return Ok(());
                }
                check_name(s.name())?;
                if is_reserved_name(s.name()) {
                    return Err(SyntaxError::ReservedSymbol(s.name().to_string()));
                }
                Ok(())
            }
            Expression::Apply(c, args) => {
                if args.is_empty() {
                    return Err(SyntaxError::ZeroArityApplication(c.to_string()));
                }
                c.check()?;
                args.iter().try_for_each(Expression::check)
            }
            Expression::Neg(b) => b.check(),
            Expression::Conn(_, l, r) | Expression::Quant(_, l, r) => {
                l.check()?;
                r.check()
            }
        }
    }

    /// Atoms are symbols and applications, whatever their constructor or arguments.
    pub fn is_atom(&self) -> bool {
        matches!(self, Expression::Sym(_) | Expression::Apply(..))
    }

    pub fn outermost_constructor(&self) -> Constructor<'_> {
        match self {
            Expression::Sym(_) => Constructor::Expr(self),
            Expression::Apply(c, _) => Constructor::Expr(c),
            Expression::Neg(_) => Constructor::Neg,
            Expression::Conn(op, ..) => Constructor::Conn(*op),
            Expression::Quant(q, ..) => Constructor::Quant(*q),
        }
    }

    /// Replaces every subexpression equal to `target` by `replacement`.
    ///
    /// Occurrences are those of `self`; inserted replacements are not scanned
    /// again.
    pub fn replace_all(&self, target: &Expression, replacement: &Expression) -> Expression {
        if self == target {
            return replacement.clone();
        }
        match self {
            Expression::Sym(_) => self.clone(),
            Expression::Apply(c, args) => Expression::Apply(
                Box::new(c.replace_all(target, replacement)),
                args.iter().map(|a| a.replace_all(target, replacement)).collect(),
            ),
            Expression::Neg(b) => Expression::neg(b.replace_all(target, replacement)),
            Expression::Conn(op, l, r) => Expression::conn(
                *op,
                l.replace_all(target, replacement),
                r.replace_all(target, replacement),
            ),
            Expression::Quant(q, v, b) => Expression::quant(
                *q,
                v.replace_all(target, replacement),
                b.replace_all(target, replacement),
            ),
        }
    }

    /// True if `target` is a subexpression of `self` (including `self`).
    pub fn contains(&self, target: &Expression) -> bool {
        if self == target {
            return true;
        }
        self.children().any(|c| c.contains(target))
    }

    pub fn contains_symbol(&self, symbol: &Symbol) -> bool {
        match self {
            Expression::Sym(s) => s == symbol,
            _ => self.children().any(|c| c.contains_symbol(symbol)),
        }
    }

    /// Quantifier nodes outside quantified-expression positions: the ones
    /// rectification numbers. A quantifier inside `E1` of `(q E1 E2)` is
    /// replaced along with `E1` and never gets an index.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Expression::Quant(_, _, body) => 1 + body.quantifier_count(),
            _ => self.children().map(Expression::quantifier_count).sum(),
        }
    }

    /// Tree height: symbols have height 0.
    pub fn height(&self) -> usize {
        self.children().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().map(Expression::size).sum::<usize>()
    }

    /// Immediate subexpressions, left to right (constructor first, quantified
    /// expression before body).
    pub fn children(&self) -> Children<'_> {
        Children { expr: self, pos: 0 }
    }

    /// All subexpressions in pre-order, `self` first.
    pub fn subexpressions(&self) -> Vec<&Expression> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            out.push(e);
            let kids: Vec<_> = e.children().collect();
            stack.extend(kids.into_iter().rev());
        }
        out
    }

    /// Every symbol occurring in the expression.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    pub(crate) fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expression::Sym(s) => {
                out.insert(s.clone());
            }
            _ => self.children().for_each(|c| c.collect_symbols(out)),
        }
    }

    /// Largest `i` such that the symbol `v<i>` occurs, or 0.
    pub fn max_rect_index(&self) -> u32 {
        match self {
            Expression::Sym(s) => s.rect_index().unwrap_or(0),
            _ => self.children().map(Expression::max_rect_index).max().unwrap_or(0),
        }
    }

    /// Largest `n` such that the generic symbol `g<n>` occurs, or 0.
    pub fn max_generic_index(&self) -> u32 {
        match self {
            Expression::Sym(s) => s.generic_index().unwrap_or(0),
            _ => self.children().map(Expression::max_generic_index).max().unwrap_or(0),
        }
    }
}

pub struct Children<'a> {
    expr: &'a Expression,
    pos: usize,
}

impl<'a> Iterator for Children<'a> {
    type Item = &'a Expression;

    fn next(&mut self) -> Option<&'a Expression> {
        let pos = self.pos;
        self.pos += 1;
        match self.expr {
            Expression::Sym(_) => None,
            Expression::Apply(c, args) => {
                if pos == 0 {
                    Some(c)
                } else {
                    args.get(pos - 1)
                }
            }
            Expression::Neg(b) => (pos == 0).then_some(&**b),
            Expression::Conn(_, l, r) | Expression::Quant(_, l, r) => match pos {
                0 => Some(l),
                1 => Some(r),
                _ => None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    fn p(s: &str) -> Expression {
        parse(s).unwrap()
    }

    #[test]
    fn negated_constructor_is_an_atom() {
        let e = p("(~ a)(b)").validate().unwrap();
        assert!(e.is_atom());
        assert_eq!(e.outermost_constructor(), Constructor::Expr(&p("(~ a)")));
        assert!(!p("(~ a(b))").is_atom());
    }

    #[test]
    fn zero_arity_application_is_rejected() {
        let bad = Expression::Apply(Box::new(p("p")), vec![]);
        assert_eq!(bad.validate(), Err(SyntaxError::ZeroArityApplication("p".into())));
        assert!(Expression::apply(p("p"), vec![]).is_err());
    }

    #[test]
    fn reserved_user_symbols_fail_validation() {
        let bad = Expression::Sym(Symbol::unchecked("v3"));
        assert_eq!(bad.validate(), Err(SyntaxError::ReservedSymbol("v3".into())));
        let bad = Expression::Sym(Symbol::unchecked("g1"));
        assert!(bad.validate().is_err());
        // minted ones are fine
        assert!(Expression::Sym(Symbol::rect_var(3)).validate().is_ok());
        // v0, v01 and vx are ordinary names
        for ok in ["v0", "v01", "vx", "v", "g0"] {
            assert!(Symbol::new(ok).is_ok(), "{ok}");
        }
        assert!(matches!(Symbol::new("forall"), Err(SymbolError::Keyword(_))));
        assert!(matches!(Symbol::new("a-b"), Err(SymbolError::InvalidChar(_))));
    }

    #[test]
    fn compound_quantified_variable_is_valid() {
        assert!(p("(forall f(a) (forall f p(f(a), f)))").validate().is_ok());
    }

    #[test]
    fn atomhood() {
        assert!(p("believes(ann, (itRains & itIsWet))").is_atom());
        assert!(p("believes(ann, (forall X believes(bill, X)))").is_atom());
        assert!(p("(believes & trusts)(ann, bill)").is_atom());
        assert!(p("(forall T (trust(T) => T))(ann, bill)").is_atom());
        assert!(!p("(exists X believes(ann, X))").is_atom());
        assert!(!p("(believes(ann, itRains) & believes(ann, itIsWet))").is_atom());
        assert!(p("a").is_atom());
    }

    #[test]
    fn outermost_constructors() {
        let e = p("(forall T (trust(T) => T))(ann, bill)");
        assert_eq!(
            e.outermost_constructor(),
            Constructor::Expr(&p("(forall T (trust(T) => T))"))
        );
        assert_eq!(p("(p & q)").outermost_constructor(), Constructor::Conn(Connective::And));
        assert_eq!(p("(~ p)").outermost_constructor(), Constructor::Neg);
        assert_eq!(
            p("(exists x p)").outermost_constructor(),
            Constructor::Quant(Quantifier::Exists)
        );
        let a = p("a");
        assert_eq!(a.outermost_constructor(), Constructor::Expr(&a));
    }

    #[test]
    fn replace_all_reaches_symbols_inside_applications() {
        let v1 = Expression::Sym(Symbol::rect_var(1));
        let e = p("p(f(a), f)");
        let once = e.replace_all(&p("f"), &v1);
        assert_eq!(once.to_string(), "p(v1(a), v1)");
        assert_eq!(once.replace_all(&p("f(a)"), &Expression::Sym(Symbol::rect_var(2))), once);
        assert_eq!(p("a").replace_all(&p("a"), &p("b")), p("b"));
    }

    #[test]
    fn replace_all_is_simultaneous() {
        // the replacement contains the target; it must not be rewritten again
        let e = p("p(a, b)");
        assert_eq!(e.replace_all(&p("a"), &p("f(a)")), p("p(f(a), b)"));
    }

    #[test]
    fn quantifier_counts() {
        assert_eq!(p("a").quantifier_count(), 0);
        assert_eq!(p("(forall X (p(X) & (exists X q(X))))").quantifier_count(), 2);
        assert_eq!(p("believes(ann, (forall x believes(bill, x)))").quantifier_count(), 1);
        assert_eq!(p("(exists a((exists q a)) (forall q b))").quantifier_count(), 2);
    }

    #[test]
    fn heights() {
        assert_eq!(p("a").height(), 0);
        assert_eq!(p("a(a)").height(), 1);
        assert_eq!(p("(forall x p(x))").height(), 2);
        assert_eq!(p("(forall x p(x))(a)").height(), 3);
    }
}
