use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::HerbrandError;
use crate::parser::Line;
use crate::rectify::{canonical_key, rectify_apart, VariantKey};
use crate::syntax::{Expression, Symbol};

/// What quantifiers are instantiated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangePolicy {
    /// Quantifiers range over atoms (the default).
    #[default]
    AtomsOnly,
    /// Quantifiers range over every expression.
    AllExpressions,
}

/// The finite symbol set quantifiers are instantiated from in bounded mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeSet<Symbol>,
    max_arity: usize,
    range_policy: RangePolicy,
}

impl Signature {
    pub fn new(
        symbols: impl IntoIterator<Item = Symbol>,
        max_arity: usize,
        range_policy: RangePolicy,
    ) -> Result<Self, HerbrandError> {
        let symbols: BTreeSet<_> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(HerbrandError::EmptySignature);
        }
        if max_arity == 0 {
            return Err(HerbrandError::ZeroMaxArity);
        }
        Ok(Signature { symbols, max_arity, range_policy })
    }

    /// The user symbols occurring in `exprs` plus `extras`, with the largest
    /// application arity seen (at least 1).
    pub fn for_inputs<'a>(
        exprs: impl IntoIterator<Item = &'a Expression>,
        extras: impl IntoIterator<Item = Symbol>,
        range_policy: RangePolicy,
    ) -> Result<Self, HerbrandError> {
        let mut symbols: BTreeSet<Symbol> = extras.into_iter().collect();
        let mut max_arity = 1;
        for e in exprs {
            for sub in e.subexpressions() {
                match sub {
                    Expression::Sym(s) if !s.is_minted() => {
                        symbols.insert(s.clone());
                    }
                    Expression::Apply(_, args) => max_arity = max_arity.max(args.len()),
                    _ => {}
                }
            }
        }
        Signature::new(symbols, max_arity, range_policy)
    }

    pub fn symbols(&self) -> &BTreeSet<Symbol> {
        &self.symbols
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn range_policy(&self) -> RangePolicy {
        self.range_policy
    }

    pub fn with_range_policy(mut self, range_policy: RangePolicy) -> Self {
        self.range_policy = range_policy;
        self
    }

    pub fn with_max_arity(mut self, max_arity: usize) -> Result<Self, HerbrandError> {
        if max_arity == 0 {
            return Err(HerbrandError::ZeroMaxArity);
        }
        self.max_arity = max_arity;
        Ok(self)
    }
}

/// A Herbrand interpretation: a finite set of variant classes of atoms.
#[derive(Debug, Clone, Default)]
pub struct Interpretation {
    /// key -> rectified representative
    classes: BTreeMap<VariantKey, Expression>,
    originals: Vec<Expression>,
}

impl Interpretation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Errors report 1-based positions in `atoms`.
    pub fn from_atoms(atoms: impl IntoIterator<Item = Expression>) -> Result<Self, HerbrandError> {
        let mut out = Interpretation::default();
        for (i, a) in atoms.into_iter().enumerate() {
            out.insert(a, i + 1)?;
        }
        Ok(out)
    }

    /// Errors report file line numbers.
    pub fn from_lines(lines: &[Line]) -> Result<Self, HerbrandError> {
        let mut out = Interpretation::default();
        for l in lines {
            out.insert(l.expr.clone(), l.line)?;
        }
        Ok(out)
    }

    fn insert(&mut self, atom: Expression, line: usize) -> Result<(), HerbrandError> {
        if !atom.is_atom() {
            return Err(HerbrandError::NotAnAtom { line, expr: atom.to_string() });
        }
        let rectified = rectify_apart(&atom, 1).rectified;
        self.classes.entry(canonical_key(&atom)).or_insert(rectified);
        self.originals.push(atom);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &VariantKey> {
        self.classes.keys()
    }

    pub fn contains_key(&self, key: &VariantKey) -> bool {
        self.classes.contains_key(key)
    }

    /// Rectified representatives, one per class, in key order.
    pub fn elements(&self) -> impl Iterator<Item = &Expression> {
        self.classes.values()
    }

    /// The atoms as loaded, including variant duplicates.
    pub fn originals(&self) -> &[Expression] {
        &self.originals
    }

    pub fn member(&self, atom: &Expression) -> Result<bool, HerbrandError> {
        if !atom.is_atom() {
            return Err(HerbrandError::NotAnAtom { line: 0, expr: atom.to_string() });
        }
        Ok(self.contains_key(&canonical_key(atom)))
    }

    /// The sub-interpretation of the loaded atoms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Expression) -> bool) -> Interpretation {
        let kept = self.originals.iter().filter(|a| keep(a)).cloned();
        Interpretation::from_atoms(kept).expect("subset of atoms")
    }

    /// Union of two interpretations.
    pub fn union(&self, other: &Interpretation) -> Interpretation {
        let all = self.originals.iter().chain(other.originals.iter()).cloned();
        Interpretation::from_atoms(all).expect("both are sets of atoms")
    }

    /// Every user symbol occurring in the loaded atoms.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for a in &self.originals {
            a.collect_symbols(&mut out);
        }
        out
    }
}

/// `interp_from_atoms`: builds an interpretation, collapsing variants.
pub fn interp_from_atoms(atoms: impl IntoIterator<Item = Expression>) -> Result<Interpretation, HerbrandError> {
    Interpretation::from_atoms(atoms)
}

/// `member`: true iff the class of `atom` belongs to `interp`.
pub fn member(interp: &Interpretation, atom: &Expression) -> Result<bool, HerbrandError> {
    interp.member(atom)
}
