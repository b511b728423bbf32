//! Concrete syntax: a fully parenthesised ASCII grammar with Unicode aliases.
//!
//! ```text
//! expr   := symbol | expr '(' expr (',' expr)* ')' | '(' '~' expr ')'
//!         | '(' expr binop expr ')' | '(' quant expr expr ')'
//! binop  := '&' | '|' | '=>' | '<=>'
//! quant  := 'forall' | 'exists'
//! ```
//!
//! `(a <=> b)` is shorthand for `((a & b) | ((~ a) & (~ b)))` and is expanded
//! while parsing. `#` starts a comment that runs to the end of the line.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{is_reserved_name, Connective, Expression, Quantifier, Symbol};

/// Byte range `[start, end)` in the parsed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    pub fn shifted(self, by: usize) -> Self {
        SourceSpan { start: self.start + by, end: self.end + by }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParseErrorKind {
    UnbalancedParens,
    MissingOperand,
    ReservedSymbol,
    EmptyArgumentList,
    TrailingInput,
    UnknownToken,
}

impl ParseErrorKind {
    /// Stable machine-readable code.
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::UnbalancedParens => "unbalanced-parens",
            ParseErrorKind::MissingOperand => "missing-operand",
            ParseErrorKind::ReservedSymbol => "reserved-symbol",
            ParseErrorKind::EmptyArgumentList => "empty-argument-list",
            ParseErrorKind::TrailingInput => "trailing-input",
            ParseErrorKind::UnknownToken => "unknown-token",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{}: {kind}: {message}", span.start)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError { span, kind, message: message.into() }
    }

    pub fn shifted(mut self, by: usize) -> Self {
        self.span = self.span.shifted(by);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Conn(Connective),
    Iff,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Not,
    Bin(BinOp),
    Quant(Quantifier),
    Ident(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Not => "`~`".into(),
            Tok::Bin(BinOp::Conn(c)) => format!("`{}`", c.token()),
            Tok::Bin(BinOp::Iff) => "`<=>`".into(),
            Tok::Quant(q) => format!("`{}`", q.token()),
            Tok::Ident(s) => format!("symbol `{s}`"),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = i + c.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let word = &input[start..end];
            let tok = match word {
                "forall" => Tok::Quant(Quantifier::Forall),
                "exists" => Tok::Quant(Quantifier::Exists),
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, SourceSpan::new(start, end)));
            continue;
        }
        let rest = &input[start..];
        let (tok, len) = if rest.starts_with("<=>") {
            (Tok::Bin(BinOp::Iff), 3)
        } else if rest.starts_with("=>") {
            (Tok::Bin(BinOp::Conn(Connective::Implies)), 2)
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '~' | '¬' => Tok::Not,
                '&' | '∧' => Tok::Bin(BinOp::Conn(Connective::And)),
                '|' | '∨' => Tok::Bin(BinOp::Conn(Connective::Or)),
                '⇒' => Tok::Bin(BinOp::Conn(Connective::Implies)),
                '⇔' => Tok::Bin(BinOp::Iff),
                '∀' => Tok::Quant(Quantifier::Forall),
                '∃' => Tok::Quant(Quantifier::Exists),
                _ => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnknownToken,
                        SourceSpan::new(start, start + c.len_utf8()),
                        format!("unexpected character `{c}`"),
                    ))
                }
            };
            (tok, c.len_utf8())
        };
        for _ in 0..rest[..len].chars().count() {
            chars.next();
        }
        out.push((tok, SourceSpan::new(start, start + len)));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, SourceSpan)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&'a Tok> {
        self.toks.get(self.pos + offset).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|(_, s)| *s).unwrap_or(SourceSpan::new(self.end, self.end))
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn expect_close(&mut self, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            None => Err(ParseError::new(
                ParseErrorKind::UnbalancedParens,
                self.span(),
                format!("missing `)` closing {what}"),
            )),
            Some(t) => Err(ParseError::new(
                ParseErrorKind::MissingOperand,
                self.span(),
                format!("expected `)` closing {what}, found {}", t.describe()),
            )),
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut e = self.primary()?;
        while let Some(args) = self.application_args()? {
            e = Expression::Apply(Box::new(e), args);
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expression, ParseError> {
        let span = self.span();
        match self.bump() {
            Some(Tok::Ident(name)) => {
                if is_reserved_name(name) {
                    return Err(ParseError::new(
                        ParseErrorKind::ReservedSymbol,
                        span,
                        format!("`{name}` is reserved for internally minted variables and generic atoms"),
                    ));
                }
                Ok(Expression::Sym(Symbol::unchecked(name)))
            }
            Some(Tok::LParen) => self.parenthesised(span),
            Some(t) => Err(ParseError::new(
                ParseErrorKind::MissingOperand,
                span,
                format!("expected an expression, found {}", t.describe()),
            )),
            None => Err(ParseError::new(
                ParseErrorKind::MissingOperand,
                span,
                "expected an expression, found end of input",
            )),
        }
    }

    fn parenthesised(&mut self, open: SourceSpan) -> Result<Expression, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                let body = self.expr()?;
                self.expect_close("negation")?;
                Ok(Expression::neg(body))
            }
            Some(Tok::Quant(q)) => {
                let q = *q;
                self.pos += 1;
                let var = self.expr()?;
                let body = self.expr()?;
                self.expect_close("quantified expression")?;
                Ok(Expression::quant(q, var, body))
            }
            None => Err(ParseError::new(
                ParseErrorKind::UnbalancedParens,
                open,
                "`(` is never closed",
            )),
            Some(_) => {
                let left = self.expr()?;
                let op = match self.peek() {
                    Some(Tok::Bin(op)) => *op,
                    None => {
                        return Err(ParseError::new(
                            ParseErrorKind::UnbalancedParens,
                            open,
                            "`(` is never closed",
                        ))
                    }
                    Some(t) => {
                        return Err(ParseError::new(
                            ParseErrorKind::MissingOperand,
                            self.span(),
                            format!("expected a connective, found {}", t.describe()),
                        ))
                    }
                };
                self.pos += 1;
                let right = self.expr()?;
                self.expect_close("binary expression")?;
                Ok(match op {
                    BinOp::Conn(c) => Expression::conn(c, left, right),
                    BinOp::Iff => iff(left, right),
                })
            }
        }
    }

    /// Parses `(e1, ..., en)` following an expression, if what follows is an
    /// argument list. A `(` that opens a negation, a quantification or a binary
    /// expression is left alone: this happens after the quantified expression
    /// of `(forall x (p & q))`.
    fn application_args(&mut self) -> Result<Option<Vec<Expression>>, ParseError> {
        if self.peek() != Some(&Tok::LParen) {
            return Ok(None);
        }
        match self.peek_at(1) {
            Some(Tok::Not) | Some(Tok::Quant(_)) => return Ok(None),
            Some(Tok::RParen) => {
                let start = self.span().start;
                let end = self.toks[self.pos + 1].1.end;
                return Err(ParseError::new(
                    ParseErrorKind::EmptyArgumentList,
                    SourceSpan::new(start, end),
                    "an application needs at least one argument",
                ));
            }
            _ => {}
        }
        let saved = self.pos;
        self.pos += 1;
        let first = self.expr()?;
        if matches!(self.peek(), Some(Tok::Bin(_))) {
            self.pos = saved;
            return Ok(None);
        }
        let mut args = vec![first];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(Some(args));
                }
                None => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnbalancedParens,
                        self.toks[saved].1,
                        "argument list is never closed",
                    ))
                }
                Some(t) => {
                    return Err(ParseError::new(
                        ParseErrorKind::MissingOperand,
                        self.span(),
                        format!("expected `,` or `)` in argument list, found {}", t.describe()),
                    ))
                }
            }
        }
    }
}

/// `(a <=> b)` as `((a & b) | ((~ a) & (~ b)))`.
pub fn iff(left: Expression, right: Expression) -> Expression {
    Expression::conn(
        Connective::Or,
        Expression::conn(Connective::And, left.clone(), right.clone()),
        Expression::conn(Connective::And, Expression::neg(left), Expression::neg(right)),
    )
}

/// Parses one expression.
pub fn parse(input: &str) -> Result<Expression, ParseError> {
    let toks = tokenize(input)?;
    let mut p = Parser { toks: &toks, pos: 0, end: input.len() };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        let kind = if *t == Tok::RParen {
            ParseErrorKind::UnbalancedParens
        } else {
            ParseErrorKind::TrailingInput
        };
        return Err(ParseError::new(kind, p.span(), format!("unexpected {} after expression", t.describe())));
    }
    Ok(e)
}

/// One expression of a program or interpretation file.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    /// 1-based line number.
    pub line: usize,
    /// Byte offset of the line start in the file.
    pub offset: usize,
    pub expr: Expression,
}

/// Parses a `.rpl`/`.rpli` text: one expression per line, blank and
/// comment-only lines skipped. Error spans are file offsets.
pub fn parse_lines(text: &str) -> Result<Vec<Line>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for (i, raw) in text.split('\n').enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if !content.trim().is_empty() {
            let expr = parse(raw).map_err(|e| e.shifted(offset))?;
            out.push(Line { line: i + 1, offset, expr });
        }
        offset += raw.len() + 1;
    }
    Ok(out)
}

/// Canonical ASCII text: exactly the required parentheses, single spaces.
pub fn print_canonical(e: &Expression) -> String {
    e.to_string()
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Sym(s) => f.write_str(s.name()),
            Expression::Apply(c, args) => {
                write!(f, "{c}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expression::Neg(b) => write!(f, "(~ {b})"),
            Expression::Conn(op, l, r) => write!(f, "({l} {} {r})", op.token()),
            Expression::Quant(q, v, b) => write!(f, "({} {v} {b})", q.token()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Expression {
        Expression::Sym(Symbol::new(s).unwrap())
    }

    fn kind(input: &str) -> ParseErrorKind {
        parse(input).unwrap_err().kind
    }

    #[test]
    fn implication() {
        assert_eq!(
            parse("(itIsWet => itRains)").unwrap(),
            Expression::conn(Connective::Implies, sym("itIsWet"), sym("itRains"))
        );
    }

    #[test]
    fn iff_desugars() {
        let e = parse("(e(e) <=> (~ e(e)))").unwrap();
        assert_eq!(
            e.to_string(),
            "((e(e) & (~ e(e))) | ((~ e(e)) & (~ (~ e(e)))))"
        );
    }

    #[test]
    fn quantified_constructor_versus_quantified_atom() {
        let a = parse("(forall x p(x))(a)").unwrap();
        let b = parse("(forall x p(x)(a))").unwrap();
        assert_ne!(a, b);
        assert!(a.is_atom());
        assert!(!b.is_atom());
        match b {
            Expression::Quant(_, v, body) => {
                assert_eq!(*v, sym("x"));
                assert_eq!(body.to_string(), "p(x)(a)");
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn unicode_aliases() {
        let e = parse("(∀T (trust(T) ⇒ T))(ann, bill)").unwrap();
        assert_eq!(e.to_string(), "(forall T (trust(T) => T))(ann, bill)");
        let e = parse("(¬ (∃ Y believes(bill, Y)))").unwrap();
        assert_eq!(e.to_string(), "(~ (exists Y believes(bill, Y)))");
        assert_eq!(parse("(a ∧ b)").unwrap(), parse("(a & b)").unwrap());
        assert_eq!(parse("(a ∨ b)").unwrap(), parse("(a | b)").unwrap());
        assert_eq!(parse("(a ⇔ b)").unwrap(), parse("(a <=> b)").unwrap());
    }

    #[test]
    fn quantified_variable_followed_by_parenthesised_body() {
        let e = parse("(forall x (p & q))").unwrap();
        assert_eq!(e.to_string(), "(forall x (p & q))");
        let e = parse("(forall x (p(x) & (exists y q(y))))").unwrap();
        assert_eq!(e.quantifier_count(), 2);
        let e = parse("(forall f(a) (forall f p(f(a), f)))").unwrap();
        assert_eq!(e.to_string(), "(forall f(a) (forall f p(f(a), f)))");
        let e = parse("(forall x (~ p(x)))").unwrap();
        assert_eq!(e.to_string(), "(forall x (~ p(x)))");
        let e = parse("(forall x ((p(x) & q) => r))").unwrap();
        assert_eq!(e.to_string(), "(forall x ((p(x) & q) => r))");
    }

    #[test]
    fn printing() {
        let e = Expression::Apply(Box::new(Expression::neg(sym("a"))), vec![sym("b")]);
        assert_eq!(print_canonical(&e), "(~ a)(b)");
        let e = Expression::quant(
            Quantifier::Forall,
            sym("x"),
            Expression::Apply(Box::new(sym("p")), vec![sym("x")]),
        );
        assert_eq!(print_canonical(&e), "(forall x p(x))");
    }

    #[test]
    fn whitespace_and_comments_are_insignificant() {
        let a = parse("  believes ( ann ,itRains )  # comment").unwrap();
        assert_eq!(a.to_string(), "believes(ann, itRains)");
    }

    #[test]
    fn error_kinds() {
        assert_eq!(kind("p()"), ParseErrorKind::EmptyArgumentList);
        assert_eq!(kind("(forall v1 p(v1))"), ParseErrorKind::ReservedSymbol);
        assert_eq!(kind("g2"), ParseErrorKind::ReservedSymbol);
        assert_eq!(kind("(p & q"), ParseErrorKind::UnbalancedParens);
        assert_eq!(kind("p(a"), ParseErrorKind::UnbalancedParens);
        assert_eq!(kind("p)"), ParseErrorKind::UnbalancedParens);
        assert_eq!(kind("(p &)"), ParseErrorKind::MissingOperand);
        assert_eq!(kind("(p q)"), ParseErrorKind::MissingOperand);
        assert_eq!(kind(""), ParseErrorKind::MissingOperand);
        assert_eq!(kind("p q"), ParseErrorKind::TrailingInput);
        assert_eq!(kind("p $ q"), ParseErrorKind::UnknownToken);
        assert_eq!(kind("(forall x)"), ParseErrorKind::MissingOperand);
    }

    #[test]
    fn error_spans_point_at_the_culprit() {
        let err = parse("q(v7)").unwrap_err();
        assert_eq!(err.span, SourceSpan { start: 2, end: 4 });
        let err = parse("foo()").unwrap_err();
        assert_eq!(err.span, SourceSpan { start: 3, end: 5 });
    }

    #[test]
    fn lines_skip_blanks_and_comments() {
        let text = "# header\n\na\n  # only comment\n(b & c) # trailing\n";
        let lines = parse_lines(text).unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].line, 3);
        assert_eq!(lines[1].expr.to_string(), "(b & c)");
        let err = parse_lines("a\np()\n").unwrap_err();
        assert_eq!(err.span.start, 3);
    }
}
