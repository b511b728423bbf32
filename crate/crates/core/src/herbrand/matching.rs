//! Candidate instances for a quantified variable, found by matching the
//! atomic leaves that contain it against the elements of an interpretation.
//!
//! An atom outside the candidate set turns every leaf containing the variable
//! into a non-member, exactly like a fresh generic atom does, so the
//! candidates plus one generic atom decide the quantifier.

use std::collections::{BTreeMap, HashMap};

use super::interpretation::{Interpretation, RangePolicy};
use crate::rectify::{canonical_key, RectVariable, VariantKey};
use crate::syntax::{Expression, Symbol};

/// The variable is itself a leaf of the logical skeleton while quantifiers
/// range over all expressions: instances may add logical structure and the
/// generic-atom argument no longer applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsupportedCorner;

/// Atomic leaves of the logical skeleton of `r`: atoms reached through
/// negations, connectives and quantifier bodies only.
pub fn skeleton_leaves(r: &Expression) -> Vec<&Expression> {
    let mut out = Vec::new();
    collect_leaves(r, &mut out);
    out
}

fn collect_leaves<'a>(r: &'a Expression, out: &mut Vec<&'a Expression>) {
    match r {
        Expression::Sym(_) | Expression::Apply(..) => out.push(r),
        Expression::Neg(b) => collect_leaves(b, out),
        Expression::Conn(_, l, rr) => {
            collect_leaves(l, out);
            collect_leaves(rr, out);
        }
        Expression::Quant(_, _, b) => collect_leaves(b, out),
    }
}

/// Instances of `v` under which some leaf of `r` can become a member of
/// `interp`, one per variant class, in key order.
pub fn support_candidates(
    interp: &Interpretation,
    r: &Expression,
    v: RectVariable,
    policy: RangePolicy,
) -> Result<Vec<Expression>, UnsupportedCorner> {
    let hole = v.symbol();
    let mut found: BTreeMap<VariantKey, Expression> = BTreeMap::new();
    for leaf in skeleton_leaves(r) {
        if !leaf.contains_symbol(&hole) {
            continue;
        }
        if policy == RangePolicy::AllExpressions && leaf.as_symbol() == Some(&hole) {
            return Err(UnsupportedCorner);
        }
        for element in interp.elements() {
            if let Some(solution) = match_leaf(leaf, element, &hole) {
                if policy == RangePolicy::AtomsOnly && !solution.is_atom() {
                    continue;
                }
                found.entry(canonical_key(&solution)).or_insert(solution);
            }
        }
    }
    Ok(found.into_values().collect())
}

/// Matches `pattern` against the rectified `element` modulo variance, with
/// `hole` as the unknown and every other unbound rectification variable of
/// the pattern as a wildcard. Returns the hole's value when all its
/// occurrences agree up to variance.
pub fn match_leaf(pattern: &Expression, element: &Expression, hole: &Symbol) -> Option<Expression> {
    let mut m = Matcher { hole, bound: HashMap::new(), solutions: Vec::new() };
    if !m.matches(pattern, element) {
        return None;
    }
    let first = m.solutions.first()?;
    let key = canonical_key(first);
    if m.solutions[1..].iter().any(|s| canonical_key(s) != key) {
        return None;
    }
    Some((*first).clone())
}

struct Matcher<'p, 'e> {
    hole: &'p Symbol,
    /// pattern variable bound inside the leaf -> element variable
    bound: HashMap<&'p Symbol, &'e Symbol>,
    solutions: Vec<&'e Expression>,
}

impl<'p, 'e> Matcher<'p, 'e> {
    fn matches(&mut self, pat: &'p Expression, el: &'e Expression) -> bool {
        match (pat, el) {
            (Expression::Sym(s), _) if s == self.hole => {
                if !is_closed(el) {
                    return false;
                }
                self.solutions.push(el);
                true
            }
            (Expression::Sym(s), _) if self.bound.contains_key(s) => {
                el.as_symbol() == Some(self.bound[s])
            }
            // a variable bound further out in the skeleton: any closed subtree will do
            (Expression::Sym(s), _) if s.rect_index().is_some() => is_closed(el),
            (Expression::Sym(s), Expression::Sym(t)) => s == t,
            (Expression::Apply(c, args), Expression::Apply(c2, args2)) => {
                args.len() == args2.len()
                    && self.matches(c, c2)
                    && args.iter().zip(args2).all(|(a, b)| self.matches(a, b))
            }
            (Expression::Neg(a), Expression::Neg(b)) => self.matches(a, b),
            (Expression::Conn(op, l, r), Expression::Conn(op2, l2, r2)) => {
                op == op2 && self.matches(l, l2) && self.matches(r, r2)
            }
            (Expression::Quant(q, pv, pb), Expression::Quant(q2, ev, eb)) => {
                let (Some(ps), Some(es)) = (pv.as_symbol(), ev.as_symbol()) else {
                    return pv == ev && q == q2 && self.matches(pb, eb);
                };
                if q != q2 || ps.rect_index().is_none() || es.rect_index().is_none() {
                    return false;
                }
                let shadowed = self.bound.insert(ps, es);
                let ok = self.matches(pb, eb);
                match shadowed {
                    Some(prev) => {
                        self.bound.insert(ps, prev);
                    }
                    None => {
                        self.bound.remove(ps);
                    }
                }
                ok
            }
            _ => false,
        }
    }
}

/// No rectification variable of `e` is bound outside `e`.
fn is_closed(e: &Expression) -> bool {
    fn go<'a>(e: &'a Expression, bound: &mut Vec<&'a Symbol>) -> bool {
        match e {
            Expression::Sym(s) => s.rect_index().is_none() || bound.contains(&s),
            Expression::Quant(_, v, b) => {
                let pushed = match v.as_symbol() {
                    Some(s) if s.rect_index().is_some() => {
                        bound.push(s);
                        true
                    }
                    _ => false,
                };
                let ok = go(v, bound) && go(b, bound);
                if pushed {
                    bound.pop();
                }
                ok
            }
            _ => e.children().all(|c| go(c, bound)),
        }
    }
    go(e, &mut Vec::new())
}
