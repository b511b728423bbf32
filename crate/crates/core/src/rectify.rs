//! Rectification, the variant relation and instantiation of rectified
//! expressions.
//!
//! `rect(e, i)` renames every quantified expression of `e` to a fresh
//! variable `v<j>` drawn from `i` upwards. Applications, negations and binary
//! connectives are traversed left to right, threading the next free index;
//! a quantified expression is rectified inside-out: its body first, then the
//! quantifier binds the next index and all occurrences of the quantified
//! expression in the rectified body are replaced by that variable.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Connective, Expression, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RectError {
    #[error("`{0}` is not an atom")]
    NotAnAtom(String),
}

/// A variable `v<index>` of the rectification supply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RectVariable(u32);

impl RectVariable {
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "rectification variables start at v1");
        RectVariable(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn symbol(self) -> Symbol {
        Symbol::rect_var(self.0)
    }

    pub fn expr(self) -> Expression {
        Expression::Sym(self.symbol())
    }

    /// The variable a symbol stands for, if it is one.
    pub fn of(expr: &Expression) -> Option<Self> {
        expr.as_symbol().and_then(Symbol::rect_index).map(RectVariable)
    }
}

impl fmt::Display for RectVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectOutcome {
    pub rectified: Expression,
    /// One past the highest variable index used, or the initial index when
    /// no variable was needed.
    pub final_index: u32,
}

/// Canonical text of an expression's rectification at index 1. Two
/// expressions are variants iff their keys are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariantKey(String);

impl VariantKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn rect(e: &Expression, start_index: u32) -> RectOutcome {
    assert!(start_index >= 1, "the initial variable index is at least 1");
    let (rectified, final_index) = rect_from(e, start_index);
    RectOutcome { rectified, final_index }
}

fn rect_from(e: &Expression, i: u32) -> (Expression, u32) {
    match e {
        Expression::Sym(_) => (e.clone(), i),
        Expression::Apply(c, args) => {
            let (rc, mut next) = rect_from(c, i);
            let rargs = args
                .iter()
                .map(|a| {
                    let (ra, j) = rect_from(a, next);
                    next = j;
                    ra
                })
                .collect();
            (Expression::Apply(Box::new(rc), rargs), next)
        }
        Expression::Neg(b) => {
            let (rb, j) = rect_from(b, i);
            (Expression::neg(rb), j)
        }
        Expression::Conn(op, l, r) => {
            let (rl, i1) = rect_from(l, i);
            let (rr, i2) = rect_from(r, i1);
            (Expression::conn(*op, rl, rr), i2)
        }
        Expression::Quant(q, var, body) => {
            let (rbody, j) = rect_from(body, i);
            let v = RectVariable(j).expr();
            let renamed = rbody.replace_all(var, &v);
            (Expression::quant(*q, v, renamed), j + 1)
        }
    }
}

/// Rectifies an expression that may already contain rectification
/// variables, e.g. a piece of a rectified expression or an element of an
/// interpretation.
///
/// Variables bound inside `e` are first moved to placeholder symbols so that
/// freshly minted indices cannot collide with them. For expressions without
/// rectification variables this is exactly [`rect`].
pub fn rectify_apart(e: &Expression, start_index: u32) -> RectOutcome {
    let mut bound = BTreeMap::new();
    collect_bound_vars(e, &mut bound);
    if bound.is_empty() {
        return rect(e, start_index);
    }
    let neutral = rename_symbols(e, &|s| {
        s.rect_index().and_then(|i| bound.get(&i)).map(|&k| Symbol::placeholder(k))
    });
    let out = rect(&neutral, start_index);
    debug_assert!(!out.rectified.symbols().iter().any(|s| s.placeholder_index().is_some()));
    out
}

fn collect_bound_vars(e: &Expression, out: &mut BTreeMap<u32, u32>) {
    if let Expression::Quant(_, var, _) = e {
        if let Some(i) = var.as_symbol().and_then(Symbol::rect_index) {
            let next = out.len() as u32 + 1;
            out.entry(i).or_insert(next);
        }
    }
    for c in e.children() {
        collect_bound_vars(c, out);
    }
}

pub(crate) fn rename_symbols(e: &Expression, f: &dyn Fn(&Symbol) -> Option<Symbol>) -> Expression {
    match e {
        Expression::Sym(s) => Expression::Sym(f(s).unwrap_or_else(|| s.clone())),
        Expression::Apply(c, args) => Expression::Apply(
            Box::new(rename_symbols(c, f)),
            args.iter().map(|a| rename_symbols(a, f)).collect(),
        ),
        Expression::Neg(b) => Expression::neg(rename_symbols(b, f)),
        Expression::Conn(op, l, r) => Expression::conn(*op, rename_symbols(l, f), rename_symbols(r, f)),
        Expression::Quant(q, v, b) => Expression::quant(*q, rename_symbols(v, f), rename_symbols(b, f)),
    }
}

/// Rectifies a finite sequence of expressions as one right-nested
/// conjunction, so that the results are standardised apart.
pub fn rect_set(es: &[Expression]) -> Vec<Expression> {
    let Some((last, init)) = es.split_last() else {
        return Vec::new();
    };
    let conj = init
        .iter()
        .rev()
        .fold(last.clone(), |acc, e| Expression::conn(Connective::And, e.clone(), acc));
    let mut rectified = rect(&conj, 1).rectified;
    let mut out = Vec::with_capacity(es.len());
    for _ in 1..es.len() {
        match rectified {
            Expression::Conn(Connective::And, l, r) => {
                out.push(*l);
                rectified = *r;
            }
            _ => unreachable!("rectification preserves the conjunction spine"),
        }
    }
    out.push(rectified);
    out
}

pub fn canonical_key(e: &Expression) -> VariantKey {
    VariantKey(rectify_apart(e, 1).rectified.to_string())
}

pub fn is_variant(e1: &Expression, e2: &Expression) -> bool {
    canonical_key(e1) == canonical_key(e2)
}

/// `r[a/v]`: replaces `v` in the rectified `r` by a rectified variant of the
/// atom `a` that shares no variable with `r`.
pub fn substitute(r: &Expression, v: RectVariable, a: &Expression) -> Result<Expression, RectError> {
    if !a.is_atom() {
        return Err(RectError::NotAnAtom(a.to_string()));
    }
    Ok(instantiate(r, v, a))
}

/// [`substitute`] without the atom check; used when quantifiers range over
/// all expressions.
pub fn instantiate(r: &Expression, v: RectVariable, a: &Expression) -> Expression {
    let start = r.max_rect_index() + 1;
    let apart = rectify_apart(a, start).rectified;
    r.replace_all(&v.expr(), &apart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    fn p(s: &str) -> Expression {
        parse(s).unwrap()
    }

    fn rect_text(s: &str, i: u32) -> (String, u32) {
        let out = rect(&p(s), i);
        (out.rectified.to_string(), out.final_index)
    }

    #[test]
    fn trust_atom_golden() {
        assert_eq!(
            rect_text("(forall T (trust(T) => T))(ann, bill)", 1),
            ("(forall v1 (trust(v1) => v1))(ann, bill)".to_string(), 2)
        );
    }

    #[test]
    fn symbol_keeps_its_index() {
        assert_eq!(rect_text("a", 5), ("a".to_string(), 5));
    }

    #[test]
    fn nested_quantifiers_number_inside_out() {
        assert_eq!(
            rect_text("(forall X (forall Y p(X, Y)))", 1),
            ("(forall v2 (forall v1 p(v2, v1)))".to_string(), 3)
        );
    }

    #[test]
    fn conjunction_threads_left_then_right() {
        assert_eq!(
            rect_text("((forall X p(X)) & (exists X q(X)))", 1),
            ("((forall v1 p(v1)) & (exists v2 q(v2)))".to_string(), 3)
        );
    }

    #[test]
    fn scope_examples() {
        // the inner quantification is not in the scope of the outer one
        assert_eq!(
            rect_text("(forall f(a) (forall f p(f(a), f)))", 1).0,
            "(forall v2 (forall v1 p(v1(a), v1)))"
        );
        assert_eq!(
            rect_text("(forall x (forall x p(f(x), x)))", 1).0,
            "(forall v2 (forall v1 p(f(v1), v1)))"
        );
        // here it is
        assert_eq!(
            rect_text("(forall f (forall f(a) p(f(a), f)))", 1).0,
            "(forall v2 (forall v1 p(v1, v2)))"
        );
        assert!(is_variant(
            &p("(forall f (forall x p(x, f)))"),
            &p("(forall f (forall f(a) p(f(a), f)))")
        ));
    }

    #[test]
    fn rect_set_standardises_apart() {
        let out = rect_set(&[p("(forall X p(X))"), p("(forall X q(X))")]);
        let texts: Vec<_> = out.iter().map(ToString::to_string).collect();
        assert_eq!(texts, ["(forall v1 p(v1))", "(forall v2 q(v2))"]);
        assert_eq!(rect_set(&[p("a")]), vec![p("a")]);
        assert!(rect_set(&[]).is_empty());
    }

    #[test]
    fn variant_pairs() {
        assert!(is_variant(
            &p("believes(ann, (forall X believes(bill, X)))"),
            &p("believes(ann, (forall Y believes(bill, Y)))")
        ));
        assert!(!is_variant(&p("p(X, Y)"), &p("p(Z, Z)")));
        assert!(is_variant(
            &p("believes(ann, (forall y (believes(ann, y) => believes(bill, y))))"),
            &p("believes(ann, (forall t(a) (believes(ann, t(a)) => believes(bill, t(a)))))")
        ));
        assert!(is_variant(
            &p("(forall X (p(X) & (exists Y q(Y))))"),
            &p("(forall X (p(X) & (exists X q(X))))")
        ));
        assert!(!is_variant(
            &p("(forall X (forall Y p(X, Y)))"),
            &p("(forall Z (forall Z p(Z, Z)))")
        ));
        assert_eq!(rect_text("(forall Z (forall Z p(Z, Z)))", 1).0, "(forall v2 (forall v1 p(v1, v1)))");
    }

    #[test]
    fn substitution() {
        let v1 = RectVariable::new(1);
        let r = rect(&p("believes(ann, X)"), 1).rectified.replace_all(&p("X"), &v1.expr());
        assert_eq!(substitute(&r, v1, &p("itRains")).unwrap().to_string(), "believes(ann, itRains)");

        let body = match rect(&p("(forall T (trust(T) => T(ann, bill)))"), 1).rectified {
            Expression::Quant(_, _, b) => *b,
            _ => unreachable!(),
        };
        assert_eq!(body.to_string(), "(trust(v1) => v1(ann, bill))");
        assert_eq!(
            substitute(&body, v1, &p("t1")).unwrap().to_string(),
            "(trust(t1) => t1(ann, bill))"
        );
        assert_eq!(
            substitute(&body, v1, &p("(forall X q(X))")),
            Err(RectError::NotAnAtom("(forall X q(X))".into()))
        );
    }

    #[test]
    fn substituted_atom_is_standardised_apart() {
        let r = rect(&p("(forall Y (forall X p(X, Y)))"), 1).rectified;
        // body of the outer quantifier: (forall v1 p(v1, v2))
        let Expression::Quant(_, _, body) = r else { unreachable!() };
        let out = substitute(&body, RectVariable::new(2), &p("q((forall Z r(Z)))")).unwrap();
        assert_eq!(out.to_string(), "(forall v1 p(v1, q((forall v3 r(v3)))))");
        assert!(!out.contains_symbol(&Symbol::rect_var(2)));
        assert_eq!(canonical_key(&out).as_str(), "(forall v2 p(v2, q((forall v1 r(v1)))))");
    }

    #[test]
    fn rectify_apart_avoids_capture() {
        // raw rect would rename the inner v5 to v1 and capture the outer v1
        let e = Expression::quant(
            crate::Quantifier::Forall,
            RectVariable::new(1).expr(),
            Expression::quant(
                crate::Quantifier::Forall,
                RectVariable::new(5).expr(),
                p("p(a, b)")
                    .replace_all(&p("a"), &RectVariable::new(1).expr())
                    .replace_all(&p("b"), &RectVariable::new(5).expr()),
            ),
        );
        assert_eq!(e.to_string(), "(forall v1 (forall v5 p(v1, v5)))");
        assert_eq!(rect(&e, 1).rectified.to_string(), "(forall v2 (forall v2 p(v2, v2)))");
        assert_eq!(rectify_apart(&e, 1).rectified.to_string(), "(forall v2 (forall v1 p(v2, v1)))");
    }
}
