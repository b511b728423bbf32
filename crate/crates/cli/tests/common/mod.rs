//! Random generators and brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rpl::{canonical_key, Connective, Expression, Quantifier, Symbol, VariantKey};

pub fn sym(name: &str) -> Expression {
    Expression::Sym(Symbol::new(name).unwrap())
}

pub fn app(c: Expression, args: Vec<Expression>) -> Expression {
    Expression::apply(c, args).unwrap()
}

fn pick_op(rng: &mut ChaCha8Rng) -> Connective {
    *Connective::ALL.choose(rng).unwrap()
}

fn pick_q(rng: &mut ChaCha8Rng) -> Quantifier {
    *Quantifier::ALL.choose(rng).unwrap()
}

/// Any expression over `names` of height at most `depth`, constructors and
/// quantified expressions included.
pub fn random_expression(rng: &mut ChaCha8Rng, names: &[&str], depth: usize) -> Expression {
    if depth == 0 || rng.gen_bool(0.25) {
        return sym(names.choose(rng).unwrap());
    }
    match rng.gen_range(0..10) {
        0..=3 => {
            let c = if rng.gen_bool(0.8) { sym(names.choose(rng).unwrap()) } else { random_expression(rng, names, depth - 1) };
            let n = rng.gen_range(1..=2);
            let args = (0..n).map(|_| random_expression(rng, names, depth - 1)).collect();
            app(c, args)
        }
        4 => Expression::neg(random_expression(rng, names, depth - 1)),
        5..=6 => Expression::conn(
            pick_op(rng),
            random_expression(rng, names, depth - 1),
            random_expression(rng, names, depth - 1),
        ),
        _ => {
            let var = if rng.gen_bool(0.8) { sym(names.choose(rng).unwrap()) } else { random_expression(rng, names, depth - 1) };
            Expression::quant(pick_q(rng), var, random_expression(rng, names, depth - 1))
        }
    }
}

/// Replaces each rectification variable of a rectified expression by a
/// distinct fresh user symbol `<prefix><k>`: a variant with ordinary names.
pub fn rename_rect_vars(r: &Expression, prefix: &str) -> Expression {
    let mut out = r.clone();
    for k in 1..=r.max_rect_index() {
        let v = Expression::Sym(Symbol::rect_var(k));
        out = out.replace_all(&v, &sym(&format!("{prefix}{k}")));
    }
    out
}

/// A formula built from atoms over `names` and the quantified variables in
/// scope, with at most `quants` quantifiers.
pub fn random_formula(rng: &mut ChaCha8Rng, names: &[&str], vars: &[&str], quants: usize, depth: usize) -> Expression {
    random_formula_in(rng, names, vars, &mut Vec::new(), &mut { quants }, depth)
}

fn random_formula_in(
    rng: &mut ChaCha8Rng,
    names: &[&str],
    vars: &[&str],
    scope: &mut Vec<String>,
    quants: &mut usize,
    depth: usize,
) -> Expression {
    let leaf = depth == 0 || rng.gen_bool(0.2);
    if leaf {
        return random_atom(rng, names, scope);
    }
    match rng.gen_range(0..8) {
        0 => Expression::neg(random_formula_in(rng, names, vars, scope, quants, depth - 1)),
        1..=3 => {
            let l = random_formula_in(rng, names, vars, scope, quants, depth - 1);
            let r = random_formula_in(rng, names, vars, scope, quants, depth - 1);
            Expression::conn(pick_op(rng), l, r)
        }
        _ if *quants > 0 => {
            *quants -= 1;
            let v = vars.choose(rng).unwrap().to_string();
            scope.push(v.clone());
            let body = random_formula_in(rng, names, vars, scope, quants, depth - 1);
            scope.pop();
            Expression::quant(pick_q(rng), sym(&v), body)
        }
        _ => random_atom(rng, names, scope),
    }
}

fn random_atom(rng: &mut ChaCha8Rng, names: &[&str], scope: &[String]) -> Expression {
    let term = |rng: &mut ChaCha8Rng| -> Expression {
        if !scope.is_empty() && rng.gen_bool(0.6) {
            sym(scope.choose(rng).unwrap())
        } else {
            sym(names.choose(rng).unwrap())
        }
    };
    match rng.gen_range(0..6) {
        0 => term(rng),
        1..=3 => {
            let c = sym(names.choose(rng).unwrap());
            let a = term(rng);
            app(c, vec![a])
        }
        4 => {
            let c = term(rng);
            let a = term(rng);
            app(c, vec![a])
        }
        _ => {
            let c = sym(names.choose(rng).unwrap());
            let inner = app(sym(names.choose(rng).unwrap()), vec![term(rng)]);
            app(c, vec![inner])
        }
    }
}

/// Every expression over `names` with heights at most `depth` and
/// application arities in `1..=max_arity`, built straight from the grammar
/// with no identification of variants. Returned by height.
pub fn brute_force_by_height(names: &[&str], max_arity: usize, depth: usize) -> Vec<Vec<Expression>> {
    let mut by_height: Vec<Vec<Expression>> = vec![names.iter().map(|n| sym(n)).collect()];
    for h in 1..=depth {
        let lower: Vec<Expression> = by_height.iter().flatten().cloned().collect();
        let mut level = Vec::new();
        let is_top = |e: &Expression| e.height() + 1 == h;
        for arity in 1..=max_arity {
            for tuple in tuples(&lower, arity + 1) {
                if tuple.iter().any(&is_top) {
                    level.push(app(tuple[0].clone(), tuple[1..].to_vec()));
                }
            }
        }
        for e in lower.iter().filter(|e| is_top(e)) {
            level.push(Expression::neg(e.clone()));
        }
        for l in &lower {
            for r in &lower {
                if !is_top(l) && !is_top(r) {
                    continue;
                }
                for op in Connective::ALL {
                    level.push(Expression::conn(op, l.clone(), r.clone()));
                }
                for q in Quantifier::ALL {
                    level.push(Expression::quant(q, l.clone(), r.clone()));
                }
            }
        }
        by_height.push(level);
    }
    by_height
}

fn tuples(items: &[Expression], n: usize) -> Vec<Vec<Expression>> {
    let mut out: Vec<Vec<Expression>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for it in items {
                let mut t = prefix.clone();
                t.push(it.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Number of distinct variant classes of atoms of height at most d, for each d.
pub fn brute_force_atom_counts(names: &[&str], max_arity: usize, depth: usize) -> Vec<usize> {
    let by_height = brute_force_by_height(names, max_arity, depth);
    let mut seen: BTreeMap<VariantKey, ()> = BTreeMap::new();
    let mut counts = Vec::new();
    for level in &by_height {
        for e in level.iter().filter(|e| e.is_atom()) {
            seen.insert(canonical_key(e), ());
        }
        counts.push(seen.len());
    }
    counts
}
