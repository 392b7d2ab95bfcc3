//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := unary ("^" factor)?          -- right associative
//! unary  := "-" unary | atom
//! atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! Numbers are decimal with an optional exponent. Recognized function names
//! are `exp, ln, sin, cos, abs, sqrt, min, max, pow`; any other identifier is
//! a variable and is only checked at evaluation time. Constant subtrees are
//! folded during parsing, which keeps printing/re-parsing stable.

use super::{fold_unary, BinaryOp, Reduction, ScalarExpr, UnaryOp};
use std::fmt;
use thiserror::Error;

/// Syntax error with the byte offset of the offending token and the set of
/// tokens that would have been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {}: expected {}, found {}",
            self.offset,
            self.expected.join(" | "),
            self.found
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(ParseError {
                            offset: i,
                            expected: vec!["digit after decimal point".into()],
                            found: found_at(src, i),
                        });
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["number".into()],
                    found: format!("`{text}`"),
                })?;
                toks.push((Tok::Num(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError {
                    offset: i,
                    expected: vec!["number".into(), "identifier".into(), "operator".into()],
                    found: found_at(src, i),
                })
            }
        }
    }
    toks.push((Tok::Eof, src.len()));
    Ok(toks)
}

fn found_at(src: &str, offset: usize) -> String {
    match src[offset..].chars().next() {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&[what]))
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = fold_parsed_binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = fold_parsed_binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ScalarExpr, ParseError> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            Ok(fold_parsed_binary(BinaryOp::Pow, base, exponent))
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<ScalarExpr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            Ok(fold_unary(UnaryOp::Neg, inner))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<ScalarExpr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(ScalarExpr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let name_offset = self.offset();
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(ScalarExpr::Var(name));
                }
                self.bump();
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                self.call(&name, name_offset, args)
            }
            _ => Err(self.err(&["number", "identifier", "`(`", "`-`"])),
        }
    }

    fn call(
        &self,
        name: &str,
        offset: usize,
        mut args: Vec<ScalarExpr>,
    ) -> Result<ScalarExpr, ParseError> {
        let unary = |op: UnaryOp, mut args: Vec<ScalarExpr>| {
            if args.len() == 1 {
                Ok(fold_unary(op, args.remove(0)))
            } else {
                Err(ParseError {
                    offset,
                    expected: vec![format!("1 argument to `{name}`")],
                    found: format!("{} arguments", args.len()),
                })
            }
        };
        match name {
            "exp" => unary(UnaryOp::Exp, args),
            "ln" => unary(UnaryOp::Ln, args),
            "sin" => unary(UnaryOp::Sin, args),
            "cos" => unary(UnaryOp::Cos, args),
            "abs" => unary(UnaryOp::Abs, args),
            "sqrt" => unary(UnaryOp::Sqrt, args),
            "pow" => {
                if args.len() == 2 {
                    let b = args.pop().unwrap();
                    let a = args.pop().unwrap();
                    Ok(fold_parsed_binary(BinaryOp::Pow, a, b))
                } else {
                    Err(ParseError {
                        offset,
                        expected: vec!["2 arguments to `pow`".into()],
                        found: format!("{} arguments", args.len()),
                    })
                }
            }
            "min" | "max" => {
                if args.len() >= 2 {
                    let red = if name == "min" {
                        Reduction::Min
                    } else {
                        Reduction::Max
                    };
                    Ok(ScalarExpr::Reduce(red, args))
                } else {
                    Err(ParseError {
                        offset,
                        expected: vec![format!("at least 2 arguments to `{name}`")],
                        found: format!("{} arguments", args.len()),
                    })
                }
            }
            _ => Err(ParseError {
                offset,
                expected: vec![
                    "function name (exp, ln, sin, cos, abs, sqrt, min, max, pow)".into(),
                ],
                found: format!("`{name}`"),
            }),
        }
    }
}

/// Constant folding restricted to literal operands, so that parsing never
/// erases a variable occurrence.
fn fold_parsed_binary(op: BinaryOp, a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    if let (ScalarExpr::Const(_), ScalarExpr::Const(_)) = (&a, &b) {
        super::fold_binary(op, a, b)
    } else {
        ScalarExpr::Binary(op, Box::new(a), Box::new(b))
    }
}

pub(super) fn parse(source: &str) -> Result<ScalarExpr, ParseError> {
    let toks = tokenize(source)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err(&["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(e)
}
