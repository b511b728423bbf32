//! Satisfaction of expressions in a Herbrand interpretation.
//!
//! Expressions are rectified first. Atoms are satisfied iff their variant
//! class is in the interpretation; connectives combine with strong Kleene
//! tables; a quantification `(q v R)` is decided by instances `R[A/v]`.
//!
//! Two ways of choosing the instances:
//!
//! * bounded: every class of the signature up to a height. `forall` can only
//!   be refuted and `exists` only confirmed, so known verdicts are sound and
//!   everything else is `Unknown`.
//! * exact: the support candidates of the interpretation plus one fresh
//!   generic atom that stands for every other instance.

use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::enumerate::Universe;
use super::interpretation::{Interpretation, RangePolicy, Signature};
use super::matching::support_candidates;
use crate::rectify::{canonical_key, instantiate, rectify_apart, RectVariable};
use crate::syntax::{Connective, Expression, Quantifier, Symbol};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Bounded { depth: usize },
}

/// Result of evaluating one expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub verdict: Verdict,
    /// Instances chosen along the deciding path, outermost first: witnesses
    /// for `exists`, counterexamples for `forall`.
    pub witnesses: Vec<Expression>,
    /// Quantifier instances evaluated.
    pub instantiations: usize,
    /// Support candidates found (exact mode).
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressionReport {
    pub expression: String,
    pub verdict: Verdict,
    pub witnesses: Vec<String>,
    pub candidates_examined: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statistics {
    pub instantiations: usize,
    pub candidates: usize,
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    #[serde(flatten)]
    pub mode: Mode,
    pub range: RangePolicy,
    pub expressions: Vec<ExpressionReport>,
    pub aggregate: Verdict,
    pub statistics: Statistics,
}

impl CheckReport {
    /// Satisfied iff all are, Falsified if any is, otherwise Unknown.
    pub fn aggregate_of(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts.into_iter().fold(Verdict::Satisfied, Verdict::and)
    }
}

struct Step {
    verdict: Verdict,
    witnesses: Vec<Expression>,
}

impl Step {
    fn bare(verdict: Verdict) -> Self {
        Step { verdict, witnesses: Vec::new() }
    }
}

/// Evaluates expressions against one interpretation. Reuse it for several
/// expressions so that the bounded universe is enumerated once.
pub struct Evaluator<'a> {
    interp: &'a Interpretation,
    range: RangePolicy,
    mode: Mode,
    universe: Option<Arc<Universe>>,
    instantiations: usize,
    candidates: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(interp: &'a Interpretation, sig: &Signature, mode: Mode) -> Self {
        let universe = match mode {
            Mode::Exact => None,
            Mode::Bounded { depth } => {
                Some(Arc::new(Universe::new(sig, depth, sig.range_policy() == RangePolicy::AtomsOnly)))
            }
        };
        Evaluator { interp, range: sig.range_policy(), mode, universe, instantiations: 0, candidates: 0 }
    }

    pub fn evaluate(&mut self, e: &Expression) -> Evaluation {
        let (inst0, cand0) = (self.instantiations, self.candidates);
        let rectified = rectify_apart(e, 1).rectified;
        let step = self.eval(&rectified);
        Evaluation {
            verdict: step.verdict,
            witnesses: step.witnesses,
            instantiations: self.instantiations - inst0,
            candidates: self.candidates - cand0,
        }
    }

    fn eval(&mut self, r: &Expression) -> Step {
        match r {
            Expression::Sym(_) | Expression::Apply(..) => {
                Step::bare(Verdict::from_bool(self.interp.contains_key(&canonical_key(r))))
            }
            Expression::Neg(b) => {
                let s = self.eval(b);
                Step { verdict: s.verdict.not(), witnesses: s.witnesses }
            }
            Expression::Conn(op, l, rr) => self.eval_conn(*op, l, rr),
            Expression::Quant(q, var, body) => match RectVariable::of(var) {
                Some(v) => self.eval_quant(*q, v, body),
                // only rectified input reaches here
                None => Step::bare(Verdict::Unknown),
            },
        }
    }

    fn eval_conn(&mut self, op: Connective, l: &Expression, r: &Expression) -> Step {
        // `a => b` is `(~ a) | b`; `|` is dual to `&`
        let (negate_left, disjunctive) = match op {
            Connective::And => (false, false),
            Connective::Or => (false, true),
            Connective::Implies => (true, true),
        };
        // the value that decides the connective on its own
        let decisive = if disjunctive { Verdict::Satisfied } else { Verdict::Falsified };
        let mut left = self.eval(l);
        if negate_left {
            left.verdict = left.verdict.not();
        }
        if left.verdict == decisive {
            return Step { verdict: decisive, witnesses: left.witnesses };
        }
        let right = self.eval(r);
        if right.verdict == decisive {
            return Step { verdict: decisive, witnesses: right.witnesses };
        }
        let verdict = if disjunctive { left.verdict.or(right.verdict) } else { left.verdict.and(right.verdict) };
        let witnesses = if verdict.is_known() {
            left.witnesses.into_iter().chain(right.witnesses).collect()
        } else {
            Vec::new()
        };
        Step { verdict, witnesses }
    }

    fn eval_quant(&mut self, q: Quantifier, v: RectVariable, body: &Expression) -> Step {
        // forall stops at a counterexample, exists at a witness
        let decisive = match q {
            Quantifier::Forall => Verdict::Falsified,
            Quantifier::Exists => Verdict::Satisfied,
        };
        let mut saw_unknown = false;
        let mut found: Option<Step> = None;
        let mut visit = |this: &mut Self, a: &Expression| {
            this.instantiations += 1;
            let sub = this.eval(&instantiate(body, v, a));
            if sub.verdict == decisive {
                let mut witnesses = vec![a.clone()];
                witnesses.extend(sub.witnesses);
                found = Some(Step { verdict: decisive, witnesses });
                return ControlFlow::Break(());
            }
            saw_unknown |= sub.verdict == Verdict::Unknown;
            ControlFlow::Continue(())
        };
        let exhaustive = match &self.universe {
            Some(universe) => {
                let universe = Arc::clone(universe);
                // a vacuous quantifier gives the same verdict for every instance
                let vacuous = !body.contains_symbol(&v.symbol());
                let _ = universe.try_for_each(|a| match visit(self, a) {
                    ControlFlow::Continue(()) if vacuous => ControlFlow::Break(()),
                    flow => flow,
                });
                false
            }
            None => match support_candidates(self.interp, body, v, self.range) {
                Ok(mut cands) => {
                    self.candidates += cands.len();
                    cands.push(Expression::Sym(Symbol::generic(body.max_generic_index() + 1)));
                    let _ = cands.iter().try_for_each(|a| visit(self, a));
                    true
                }
                Err(_) => return Step::bare(Verdict::Unknown),
            },
        };
        if let Some(step) = found {
            step
        } else if exhaustive && !saw_unknown {
            Step::bare(decisive.not())
        } else {
            Step::bare(Verdict::Unknown)
        }
    }

    pub fn statistics(&self) -> Statistics {
        let depth = match self.mode {
            Mode::Exact => None,
            Mode::Bounded { depth } => Some(depth),
        };
        Statistics { instantiations: self.instantiations, candidates: self.candidates, depth }
    }
}

pub fn satisfies_bounded(interp: &Interpretation, e: &Expression, sig: &Signature, depth: usize) -> Verdict {
    Evaluator::new(interp, sig, Mode::Bounded { depth }).evaluate(e).verdict
}

pub fn satisfies_exact(interp: &Interpretation, e: &Expression, sig: &Signature) -> Verdict {
    Evaluator::new(interp, sig, Mode::Exact).evaluate(e).verdict
}

/// Evaluates every expression of a program.
pub fn check_program(interp: &Interpretation, program: &[Expression], mode: Mode, sig: &Signature) -> CheckReport {
    let mut ev = Evaluator::new(interp, sig, mode);
    let expressions: Vec<ExpressionReport> = program
        .iter()
        .map(|e| {
            let out = ev.evaluate(e);
            ExpressionReport {
                expression: e.to_string(),
                verdict: out.verdict,
                witnesses: out.witnesses.iter().map(ToString::to_string).collect(),
                candidates_examined: out.instantiations,
            }
        })
        .collect();
    let aggregate = CheckReport::aggregate_of(expressions.iter().map(|r| r.verdict));
    CheckReport { mode, range: sig.range_policy(), expressions, aggregate, statistics: ev.statistics() }
}
