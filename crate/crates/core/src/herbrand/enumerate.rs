//! Finite slices of the universe of variant classes, by tree height.
//!
//! Classes are generated level by level from one member per class: the class
//! of a compound expression only depends on the classes of its immediate
//! subexpressions, so combining one member per class reaches every class.
//! A class belongs to the level of its lowest member over the signature.

use std::collections::HashSet;
use std::ops::ControlFlow;

use super::interpretation::Signature;
use crate::rectify::{canonical_key, rect, VariantKey};
use crate::syntax::{Connective, Expression, Quantifier};

#[derive(Debug, Clone)]
struct Class {
    member: Expression,
    key: VariantKey,
    level: usize,
}

/// Canonical representatives of every variant class with a member of height
/// at most `depth`, ordered by level then key.
pub fn enumerate_expressions(sig: &Signature, depth: usize) -> Vec<Expression> {
    classes(sig, depth).into_iter().map(|c| rect(&c.member, 1).rectified).collect()
}

/// [`enumerate_expressions`] restricted to atoms.
pub fn enumerate_atoms(sig: &Signature, depth: usize) -> Vec<Expression> {
    classes(sig, depth)
        .into_iter()
        .filter(|c| c.member.is_atom())
        .map(|c| rect(&c.member, 1).rectified)
        .collect()
}

fn classes(sig: &Signature, depth: usize) -> Vec<Class> {
    let mut seen: HashSet<VariantKey> = HashSet::new();
    let mut all = level_zero(sig);
    seen.extend(all.iter().map(|c| c.key.clone()));
    for level in 1..=depth {
        let mut fresh: Vec<Class> = Vec::new();
        let _ = next_level(sig, &all, level, false, &mut |member| {
            let key = canonical_key(&member);
            if seen.insert(key.clone()) {
                fresh.push(Class { member, key, level });
            }
            ControlFlow::Continue(())
        });
        fresh.sort_by(|a, b| a.key.cmp(&b.key));
        all.extend(fresh);
    }
    all
}

fn level_zero(sig: &Signature) -> Vec<Class> {
    let mut all: Vec<Class> = sig
        .symbols()
        .iter()
        .map(|s| {
            let member = Expression::Sym(s.clone());
            Class { key: canonical_key(&member), member, level: 0 }
        })
        .collect();
    all.sort_by(|a, b| a.key.cmp(&b.key));
    all
}

/// Every expression whose immediate subexpressions are members of `lower`,
/// at least one of them from `level - 1`. Variants are not removed.
/// Above level 0 the atoms are exactly the applications.
fn next_level(
    sig: &Signature,
    lower: &[Class],
    level: usize,
    applications_only: bool,
    emit: &mut dyn FnMut(Expression) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let is_new = |c: &Class| c.level + 1 == level;
    for arity in 1..=sig.max_arity() {
        for_each_tuple(lower.len(), arity + 1, |idx| {
            if !idx.iter().any(|&i| is_new(&lower[i])) {
                return ControlFlow::Continue(());
            }
            let args = idx[1..].iter().map(|&i| lower[i].member.clone()).collect();
            emit(Expression::Apply(Box::new(lower[idx[0]].member.clone()), args))
        })?;
    }
    if !applications_only {
        for c in lower.iter().filter(|c| is_new(c)) {
            emit(Expression::neg(c.member.clone()))?;
        }
        for_each_tuple(lower.len(), 2, |idx| {
            let (l, r) = (&lower[idx[0]], &lower[idx[1]]);
            if !is_new(l) && !is_new(r) {
                return ControlFlow::Continue(());
            }
            for op in Connective::ALL {
                emit(Expression::conn(op, l.member.clone(), r.member.clone()))?;
            }
            for q in Quantifier::ALL {
                emit(Expression::quant(q, l.member.clone(), r.member.clone()))?;
            }
            ControlFlow::Continue(())
        })?;
    }
    ControlFlow::Continue(())
}

/// The instances a bounded quantifier ranges over, streamed: levels below
/// the top are kept as one member per class, the top level is generated on
/// demand and may repeat variants, which does not change any verdict.
#[derive(Debug, Clone)]
pub struct Universe {
    sig: Signature,
    depth: usize,
    atoms_only: bool,
    lower: Vec<Class>,
}

impl Universe {
    pub fn new(sig: &Signature, depth: usize, atoms_only: bool) -> Self {
        let lower = if depth == 0 { Vec::new() } else { classes(sig, depth - 1) };
        Universe { sig: sig.clone(), depth, atoms_only, lower }
    }

    /// Calls `f` on each instance until it breaks.
    pub fn try_for_each(&self, mut f: impl FnMut(&Expression) -> ControlFlow<()>) -> ControlFlow<()> {
        if self.depth == 0 {
            for c in level_zero(&self.sig) {
                f(&c.member)?;
            }
            return ControlFlow::Continue(());
        }
        for c in &self.lower {
            if !self.atoms_only || c.member.is_atom() {
                f(&c.member)?;
            }
        }
        next_level(&self.sig, &self.lower, self.depth, self.atoms_only, &mut |e| f(&e))
    }
}

/// Calls `f` on every tuple of `len` indices below `n`, in lexicographic order.
fn for_each_tuple(n: usize, len: usize, mut f: impl FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
    if n == 0 {
        return ControlFlow::Continue(());
    }
    let mut idx = vec![0; len];
    loop {
        f(&idx)?;
        let mut pos = len;
        loop {
            if pos == 0 {
                return ControlFlow::Continue(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}
