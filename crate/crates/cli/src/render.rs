use std::fmt::Write;

use rpl::fragment::{ConservativeReport, FormulaClass};
use rpl::herbrand::{CheckReport, Mode};
use serde::Serialize;

pub fn check(report: &CheckReport) -> String {
    let mut out = String::new();
    for e in &report.expressions {
        let _ = write!(out, "{:<10} {}", e.verdict.to_string(), e.expression);
        if !e.witnesses.is_empty() {
            let _ = write!(out, "  witnesses: {}", e.witnesses.join(", "));
        }
        out.push('\n');
    }
    let mode = match report.mode {
        Mode::Exact => "exact".to_string(),
        Mode::Bounded { depth } => format!("bounded, depth {depth}"),
    };
    let s = &report.statistics;
    let _ = writeln!(out, "aggregate: {} ({mode})", report.aggregate);
    let _ = writeln!(out, "instantiations: {}, candidates: {}", s.instantiations, s.candidates);
    out
}

#[derive(Serialize)]
pub struct ClassRow<'a> {
    expression: &'a str,
    class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
}

impl<'a> ClassRow<'a> {
    pub fn new(expression: &'a str, class: &'a FormulaClass) -> Self {
        let (name, reason) = split(class);
        ClassRow { expression, class: name, reason }
    }
}

fn split(class: &FormulaClass) -> (&'static str, Option<&str>) {
    match class {
        FormulaClass::Term => ("Term", None),
        FormulaClass::OpenFormula => ("OpenFormula", None),
        FormulaClass::Sentence => ("Sentence", None),
        FormulaClass::NotInFragment(r) => ("NotInFragment", Some(r)),
    }
}

pub fn class_line(expression: &str, class: &FormulaClass) -> String {
    match split(class) {
        (name, None) => format!("{name:<14} {expression}"),
        (name, Some(reason)) => format!("{name:<14} {expression}  ({reason})"),
    }
}

pub fn conservative(report: &ConservativeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "formula: {}", report.formula);
    let _ = writeln!(out, "first-order: {}", report.fo_verdict);
    for x in &report.extensions {
        let added = if x.added.is_empty() { "(base only)".to_string() } else { format!("+ {}", x.added.join(", ")) };
        let _ = writeln!(out, "{:<10} {added}", x.verdict.to_string());
    }
    if !report.conclusive {
        let _ = writeln!(out, "inconclusive: the first-order verdict is not two-valued");
    } else if report.mismatches.is_empty() {
        let _ = writeln!(out, "no mismatch over {} extensions", report.extensions_checked);
    } else {
        let _ = writeln!(out, "{} mismatches over {} extensions", report.mismatches.len(), report.extensions_checked);
    }
    out
}
