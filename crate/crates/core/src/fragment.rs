//! First-order fragments: terms and formulas carved out of expressions by a
//! choice of variables, term symbols and predicate symbols with arities, the
//! classical Herbrand semantics of their sentences, and a harness comparing
//! it with the satisfaction of the full logic.
//!
//! A symbol may be both a term and a predicate symbol, and may carry several
//! arities; the syntactic position decides which reading applies.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::herbrand::{satisfies_exact, Interpretation, RangePolicy, Signature};
use crate::rectify::canonical_key;
use crate::syntax::{Expression, Quantifier, Symbol, SymbolError};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("invalid fragment file: {0}")]
    Json(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("`{0}` is declared both as a variable and as a term or predicate symbol")]
    VariableOverlap(String),
    #[error("`{0}` is declared without any arity")]
    NoArity(String),
    #[error("`{0}` is not a sentence of the fragment")]
    NotASentence(String),
    #[error("`{0}` is a ground atom of the fragment and cannot be in the extension pool")]
    PoolNotDisjoint(String),
    #[error("`{0}` is not a ground atom of the fragment")]
    BaseNotInFragment(String),
    #[error("the extension pool has {0} atoms; at most 20 are swept")]
    PoolTooLarge(usize),
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FragmentFile {
    #[serde(default)]
    variables: Vec<String>,
    #[serde(default)]
    term_symbols: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    predicate_symbols: BTreeMap<String, Vec<usize>>,
}

type ArityMap = BTreeMap<Symbol, BTreeSet<usize>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentSpec {
    variables: BTreeSet<Symbol>,
    term_symbols: ArityMap,
    predicate_symbols: ArityMap,
}

impl FragmentSpec {
    pub fn new(
        variables: impl IntoIterator<Item = Symbol>,
        term_symbols: ArityMap,
        predicate_symbols: ArityMap,
    ) -> Result<Self, FragmentError> {
        let variables: BTreeSet<_> = variables.into_iter().collect();
        for (s, arities) in term_symbols.iter().chain(&predicate_symbols) {
            if variables.contains(s) {
                return Err(FragmentError::VariableOverlap(s.to_string()));
            }
            if arities.is_empty() {
                return Err(FragmentError::NoArity(s.to_string()));
            }
        }
        Ok(FragmentSpec { variables, term_symbols, predicate_symbols })
    }

    /// Convenience constructor from names, e.g. `(&["x"], &[("a", &[0])], &[("p", &[1])])`.
    pub fn from_names(
        variables: &[&str],
        term_symbols: &[(&str, &[usize])],
        predicate_symbols: &[(&str, &[usize])],
    ) -> Result<Self, FragmentError> {
        let vars = variables.iter().map(|v| Symbol::new(v)).collect::<Result<Vec<_>, _>>()?;
        FragmentSpec::new(vars, arity_map(term_symbols)?, arity_map(predicate_symbols)?)
    }

    /// Reads `{"variables": [...], "term_symbols": {"f": [1]}, "predicate_symbols": {"p": [1, 2]}}`.
    pub fn from_json(text: &str) -> Result<Self, FragmentError> {
        let file: FragmentFile = serde_json::from_str(text).map_err(|e| FragmentError::Json(e.to_string()))?;
        let vars = file.variables.iter().map(|v| Symbol::new(v)).collect::<Result<Vec<_>, _>>()?;
        let convert = |m: &BTreeMap<String, Vec<usize>>| -> Result<ArityMap, FragmentError> {
            m.iter()
                .map(|(k, v)| Ok((Symbol::new(k)?, v.iter().copied().collect())))
                .collect()
        };
        FragmentSpec::new(vars, convert(&file.term_symbols)?, convert(&file.predicate_symbols)?)
    }

    pub fn to_json(&self) -> String {
        let names = |m: &ArityMap| {
            m.iter()
                .map(|(k, v)| (k.name().to_string(), v.iter().copied().collect()))
                .collect()
        };
        let file = FragmentFile {
            variables: self.variables.iter().map(|s| s.name().to_string()).collect(),
            term_symbols: names(&self.term_symbols),
            predicate_symbols: names(&self.predicate_symbols),
        };
        serde_json::to_string(&file).expect("plain data")
    }

    pub fn variables(&self) -> &BTreeSet<Symbol> {
        &self.variables
    }

    pub fn term_symbols(&self) -> &ArityMap {
        &self.term_symbols
    }

    pub fn predicate_symbols(&self) -> &ArityMap {
        &self.predicate_symbols
    }

    fn is_variable(&self, s: &Symbol) -> bool {
        self.variables.contains(s)
    }

    fn term_arity(&self, s: &Symbol, n: usize) -> bool {
        self.term_symbols.get(s).is_some_and(|a| a.contains(&n))
    }

    fn predicate_arity(&self, s: &Symbol, n: usize) -> bool {
        self.predicate_symbols.get(s).is_some_and(|a| a.contains(&n))
    }

    /// No term symbol of arity >= 1: the term universe is the finite set of constants.
    pub fn is_function_free(&self) -> bool {
        self.term_symbols.values().all(|a| a.iter().all(|&n| n == 0))
    }

    /// Every symbol the fragment declares.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.variables
            .iter()
            .chain(self.term_symbols.keys())
            .chain(self.predicate_symbols.keys())
            .cloned()
            .collect()
    }
}

fn arity_map(entries: &[(&str, &[usize])]) -> Result<ArityMap, FragmentError> {
    entries
        .iter()
        .map(|(name, arities)| Ok((Symbol::new(name)?, arities.iter().copied().collect())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormulaClass {
    Term,
    OpenFormula,
    Sentence,
    NotInFragment(String),
}

pub fn is_term(spec: &FragmentSpec, e: &Expression) -> bool {
    match e {
        Expression::Sym(s) => spec.is_variable(s) || spec.term_arity(s, 0),
        Expression::Apply(c, args) => match c.as_symbol() {
            Some(f) => spec.term_arity(f, args.len()) && args.iter().all(|a| is_term(spec, a)),
            None => false,
        },
        _ => false,
    }
}

fn term_variables(spec: &FragmentSpec, e: &Expression, out: &mut BTreeSet<Symbol>) {
    match e {
        Expression::Sym(s) if spec.is_variable(s) => {
            out.insert(s.clone());
        }
        _ => e.children().for_each(|c| term_variables(spec, c, out)),
    }
}

/// Free variables of `e` if it is a formula of the fragment, otherwise why not.
fn formula_free_vars(spec: &FragmentSpec, e: &Expression) -> Result<BTreeSet<Symbol>, String> {
    match e {
        Expression::Sym(s) => {
            if spec.predicate_arity(s, 0) {
                Ok(BTreeSet::new())
            } else {
                Err(format!("`{s}` is not a predicate symbol of arity 0"))
            }
        }
        Expression::Apply(c, args) => {
            let Some(p) = c.as_symbol() else {
                return Err(format!("constructor `{c}` is not a symbol"));
            };
            if spec.is_variable(p) {
                return Err(format!("variable `{p}` is used as a constructor"));
            }
            if !spec.predicate_arity(p, args.len()) {
                return Err(format!("`{p}` is not a predicate symbol of arity {}", args.len()));
            }
            let mut vars = BTreeSet::new();
            for a in args {
                if !is_term(spec, a) {
                    return Err(format!("argument `{a}` of `{p}` is not a term"));
                }
                term_variables(spec, a, &mut vars);
            }
            Ok(vars)
        }
        Expression::Neg(b) => formula_free_vars(spec, b),
        Expression::Conn(_, l, r) => {
            let mut vars = formula_free_vars(spec, l)?;
            vars.extend(formula_free_vars(spec, r)?);
            Ok(vars)
        }
        Expression::Quant(_, var, body) => {
            let x = match var.as_symbol() {
                Some(x) if spec.is_variable(x) => x,
                _ => return Err(format!("quantified expression `{var}` is not a variable")),
            };
            let mut vars = formula_free_vars(spec, body)?;
            vars.remove(x);
            Ok(vars)
        }
    }
}

/// Formula readings take precedence: with overloaded symbols an expression
/// such as `e(1)` can be both, and it is reported as a formula.
pub fn classify_formula(spec: &FragmentSpec, e: &Expression) -> FormulaClass {
    match formula_free_vars(spec, e) {
        Ok(free) if free.is_empty() => FormulaClass::Sentence,
        Ok(_) => FormulaClass::OpenFormula,
        Err(_) if is_term(spec, e) => FormulaClass::Term,
        Err(reason) => FormulaClass::NotInFragment(reason),
    }
}

pub fn is_ground_atom(spec: &FragmentSpec, e: &Expression) -> bool {
    e.is_atom() && classify_formula(spec, e) == FormulaClass::Sentence
}

/// Ground terms of height at most `depth`, by height then text.
pub fn ground_terms(spec: &FragmentSpec, depth: usize) -> Vec<Expression> {
    let mut levels: Vec<Vec<Expression>> = Vec::new();
    let constants: Vec<Expression> = spec
        .term_symbols
        .iter()
        .filter(|(_, a)| a.contains(&0))
        .map(|(s, _)| Expression::Sym(s.clone()))
        .collect();
    levels.push(constants);
    for level in 1..=depth {
        let lower: Vec<&Expression> = levels.iter().flatten().collect();
        let mut fresh = Vec::new();
        for (f, arities) in &spec.term_symbols {
            for &n in arities.iter().filter(|&&n| n >= 1) {
                for tuple in tuples(&lower, n) {
                    if tuple.iter().any(|t| t.height() + 1 == level) {
                        let args = tuple.into_iter().cloned().collect();
                        fresh.push(Expression::Apply(Box::new(Expression::Sym(f.clone())), args));
                    }
                }
            }
        }
        fresh.sort_by_cached_key(ToString::to_string);
        levels.push(fresh);
    }
    levels.into_iter().flatten().collect()
}

fn tuples<'a, T>(items: &[&'a T], n: usize) -> Vec<Vec<&'a T>> {
    let mut out: Vec<Vec<&T>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |&it| {
                    let mut t = prefix.clone();
                    t.push(it);
                    t
                })
            })
            .collect();
    }
    out
}

/// Ground atoms whose terms have height at most `depth`: predicates in name
/// order, arities ascending, argument tuples in term order.
pub fn ground_atoms(spec: &FragmentSpec, depth: usize) -> Vec<Expression> {
    let terms = ground_terms(spec, depth);
    let term_refs: Vec<&Expression> = terms.iter().collect();
    let mut out = Vec::new();
    for (p, arities) in &spec.predicate_symbols {
        for &n in arities {
            if n == 0 {
                out.push(Expression::Sym(p.clone()));
                continue;
            }
            for tuple in tuples(&term_refs, n) {
                let args = tuple.into_iter().cloned().collect();
                out.push(Expression::Apply(Box::new(Expression::Sym(p.clone())), args));
            }
        }
    }
    out
}

/// The classes of `interp` whose atoms are ground atoms of the fragment.
pub fn restrict(interp: &Interpretation, spec: &FragmentSpec) -> Interpretation {
    interp.filter(|a| is_ground_atom(spec, a))
}

/// Replaces the free occurrences of the variable `x` by the ground term `t`.
fn substitute_free(e: &Expression, x: &Symbol, t: &Expression) -> Expression {
    match e {
        Expression::Sym(s) if s == x => t.clone(),
        Expression::Sym(_) => e.clone(),
        Expression::Quant(_, var, _) if var.as_symbol() == Some(x) => e.clone(),
        Expression::Apply(c, args) => Expression::Apply(
            Box::new(substitute_free(c, x, t)),
            args.iter().map(|a| substitute_free(a, x, t)).collect(),
        ),
        Expression::Neg(b) => Expression::neg(substitute_free(b, x, t)),
        Expression::Conn(op, l, r) => Expression::conn(*op, substitute_free(l, x, t), substitute_free(r, x, t)),
        Expression::Quant(q, var, b) => Expression::quant(*q, (**var).clone(), substitute_free(b, x, t)),
    }
}

/// Classical Herbrand satisfaction of a sentence, quantifiers ranging over
/// the ground terms of height at most `depth`. Two-valued for function-free
/// fragments; otherwise `forall` can only be refuted and `exists` only
/// confirmed.
pub fn fo_satisfies(
    interp: &Interpretation,
    f: &Expression,
    spec: &FragmentSpec,
    depth: usize,
) -> Result<Verdict, FragmentError> {
    if classify_formula(spec, f) != FormulaClass::Sentence {
        return Err(FragmentError::NotASentence(f.to_string()));
    }
    let terms = ground_terms(spec, depth);
    Ok(fo_eval(interp, f, &terms, spec.is_function_free()))
}

fn fo_eval(interp: &Interpretation, f: &Expression, terms: &[Expression], exact: bool) -> Verdict {
    match f {
        Expression::Sym(_) | Expression::Apply(..) => Verdict::from_bool(interp.contains_key(&canonical_key(f))),
        Expression::Neg(b) => fo_eval(interp, b, terms, exact).not(),
        Expression::Conn(op, l, r) => {
            let (a, b) = (fo_eval(interp, l, terms, exact), fo_eval(interp, r, terms, exact));
            match op {
                crate::Connective::And => a.and(b),
                crate::Connective::Or => a.or(b),
                crate::Connective::Implies => a.implies(b),
            }
        }
        Expression::Quant(q, var, body) => {
            let x = var.as_symbol().expect("sentences quantify over variables");
            let decisive = match q {
                Quantifier::Forall => Verdict::Falsified,
                Quantifier::Exists => Verdict::Satisfied,
            };
            let mut saw_unknown = false;
            for t in terms {
                let v = fo_eval(interp, &substitute_free(body, x, t), terms, exact);
                if v == decisive {
                    return decisive;
                }
                saw_unknown |= v == Verdict::Unknown;
            }
            if exact && !saw_unknown {
                decisive.not()
            } else {
                Verdict::Unknown
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionOutcome {
    /// Pool atoms added to the base.
    pub added: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservativeReport {
    pub formula: String,
    pub fo_verdict: Verdict,
    /// False when the first-order side is not two-valued (function symbols).
    pub conclusive: bool,
    pub extensions_checked: usize,
    pub extensions: Vec<ExtensionOutcome>,
    /// Extensions contradicting "first-order satisfied iff satisfied in every extension".
    pub mismatches: Vec<ExtensionOutcome>,
}

impl ConservativeReport {
    pub fn holds(&self) -> bool {
        self.conclusive && self.mismatches.is_empty()
    }
}

/// Compares first-order satisfaction of `f` in `base` with satisfaction of
/// `f` in every extension of `base` by a subset of `pool` (exact mode).
///
/// If the first-order verdict is Satisfied, every extension that does not
/// satisfy `f` is a mismatch. If it is Falsified and every extension
/// satisfies `f`, all extensions are reported.
pub fn conservative_check(
    spec: &FragmentSpec,
    f: &Expression,
    base: &Interpretation,
    pool: &[Expression],
    depth: usize,
) -> Result<ConservativeReport, FragmentError> {
    if pool.len() > 20 {
        return Err(FragmentError::PoolTooLarge(pool.len()));
    }
    for a in base.originals() {
        if !is_ground_atom(spec, a) {
            return Err(FragmentError::BaseNotInFragment(a.to_string()));
        }
    }
    for a in pool {
        if is_ground_atom(spec, a) {
            return Err(FragmentError::PoolNotDisjoint(a.to_string()));
        }
    }
    let fo_verdict = fo_satisfies(base, f, spec, depth)?;
    let conclusive = fo_verdict.is_known();

    let sig = Signature::for_inputs(
        std::iter::once(f).chain(base.originals()).chain(pool),
        spec.symbols(),
        RangePolicy::AtomsOnly,
    )
    .expect("the formula has symbols");

    let extensions: Vec<ExtensionOutcome> = (0..1u32 << pool.len())
        .into_par_iter()
        .map(|mask| {
            let added: Vec<Expression> =
                pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect();
            let j = base.union(&Interpretation::from_atoms(added.iter().cloned()).expect("pool atoms"));
            debug_assert!(restrict(&j, spec).keys().eq(base.keys()));
            ExtensionOutcome {
                added: added.iter().map(ToString::to_string).collect(),
                verdict: satisfies_exact(&j, f, &sig),
            }
        })
        .collect();

    let all_satisfied = extensions.iter().all(|x| x.verdict == Verdict::Satisfied);
    let mismatches = match fo_verdict {
        Verdict::Satisfied => extensions.iter().filter(|x| x.verdict != Verdict::Satisfied).cloned().collect(),
        Verdict::Falsified if all_satisfied => extensions.clone(),
        _ => Vec::new(),
    };
    Ok(ConservativeReport {
        formula: f.to_string(),
        fo_verdict,
        conclusive,
        extensions_checked: extensions.len(),
        extensions,
        mismatches,
    })
}
