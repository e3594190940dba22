//! Arithmetic mini-language for derived-attribute formulas.
//!
//! Identifiers are attribute names (letters, digits, `_` and `.`, or any
//! text between back-quotes); numeric literals; `+ - * /` (also `×` `÷`);
//! parentheses; unary minus. The same lexer also produces the comparison and
//! boolean tokens used by record filters.

use std::fmt;

use crate::dataset::{Cell, Dataset};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Token {
    Ident(String),
    Num(f64),
    Str(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Is,
    Missing,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |msg: String| Error::Formula(format!("{msg} in `{src}`"));
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' | '\u{d7}' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' | '\u{f7}' => {
                out.push(Token::Slash);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '=' => {
                i += if chars.get(i + 1) == Some(&'=') { 2 } else { 1 };
                out.push(Token::Eq);
            }
            '!' if chars.get(i + 1) == Some(&'=') => {
                out.push(Token::Ne);
                i += 2;
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    out.push(Token::Le);
                    i += 2;
                } else if chars.get(i + 1) == Some(&'>') {
                    out.push(Token::Ne);
                    i += 2;
                } else {
                    out.push(Token::Lt);
                    i += 1;
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    out.push(Token::Ge);
                    i += 2;
                } else {
                    out.push(Token::Gt);
                    i += 1;
                }
            }
            '`' => {
                let start = i + 1;
                let end = chars[start..]
                    .iter()
                    .position(|&c| c == '`')
                    .ok_or_else(|| err("unterminated back-quoted name".into()))?;
                out.push(Token::Ident(chars[start..start + end].iter().collect()));
                i = start + end + 1;
            }
            '"' | '\'' => {
                let start = i + 1;
                let end = chars[start..]
                    .iter()
                    .position(|&q| q == c)
                    .ok_or_else(|| err("unterminated string".into()))?;
                out.push(Token::Str(chars[start..start + end].iter().collect()));
                i = start + end + 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| err(format!("bad number `{text}`")))?;
                out.push(Token::Num(v));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.')
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(match word.to_ascii_lowercase().as_str() {
                    "and" => Token::And,
                    "or" => Token::Or,
                    "not" => Token::Not,
                    "is" => Token::Is,
                    "missing" => Token::Missing,
                    _ => Token::Ident(word),
                });
            }
            c => return Err(err(format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Str(String),
    Attr(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Str(s) => write!(f, "\"{s}\""),
            Expr::Attr(a) => write!(f, "`{a}`"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, a, b) => {
                let o = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {o} {b})")
            }
        }
    }
}

impl Expr {
    /// Attribute names referenced, first occurrence order, no repeats.
    pub fn attributes(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Attr(a) => {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
                Expr::Neg(x) => walk(x, out),
                Expr::Bin(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

/// Recursive-descent parser over a token slice. Position is public to the
/// crate so the filter grammar can backtrack.
pub(crate) struct Parser<'a> {
    pub tokens: &'a [Token],
    pub pos: usize,
    pub src: &'a str,
}

impl<'a> Parser<'a> {
    pub fn new(tokens: &'a [Token], src: &'a str) -> Self {
        Parser {
            tokens,
            pos: 0,
            src,
        }
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub fn error(&self, msg: &str) -> Error {
        Error::Formula(format!("{msg} at token {} in `{}`", self.pos + 1, self.src))
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn expect(&mut self, t: Token) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {t:?}")))
        }
    }

    pub fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.peek().cloned();
        match tok {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Attr(name))
            }
            Some(Token::Str(s)) => {
                self.pos += 1;
                Ok(Expr::Str(s))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            _ => Err(self.error("expected a number, attribute or `(`")),
        }
    }
}

/// Why a formula could not produce a value for a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalError {
    /// An operand cell is missing; the record is skipped.
    MissingOperand,
    /// Division by zero.
    Undefined,
    /// An operand cell holds text.
    NotNumeric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Formula {
    source: String,
    expr: Expr,
}

impl Formula {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = lex(src)?;
        let mut p = Parser::new(&tokens, src);
        let expr = p.expr()?;
        if !p.at_end() {
            return Err(p.error("unexpected trailing input"));
        }
        if contains_string(&expr) {
            return Err(Error::Formula(format!(
                "string literals are not allowed in formulas: `{src}`"
            )));
        }
        Ok(Formula {
            source: src.to_string(),
            expr,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn attributes(&self) -> Vec<String> {
        self.expr.attributes()
    }

    /// Resolve attribute names against a dataset schema.
    pub fn bind(&self, ds: &Dataset) -> Result<BoundFormula> {
        fn go(e: &Expr, ds: &Dataset) -> Result<Bound> {
            Ok(match e {
                Expr::Num(v) => Bound::Num(*v),
                Expr::Str(_) => unreachable!("rejected at parse time"),
                Expr::Attr(a) => Bound::Col(ds.require_attribute(a)?),
                Expr::Neg(x) => Bound::Neg(Box::new(go(x, ds)?)),
                Expr::Bin(op, a, b) => Bound::Bin(*op, Box::new(go(a, ds)?), Box::new(go(b, ds)?)),
            })
        }
        Ok(BoundFormula {
            root: go(&self.expr, ds)?,
        })
    }
}

fn contains_string(e: &Expr) -> bool {
    match e {
        Expr::Str(_) => true,
        Expr::Neg(x) => contains_string(x),
        Expr::Bin(_, a, b) => contains_string(a) || contains_string(b),
        _ => false,
    }
}

#[derive(Clone, Debug)]
enum Bound {
    Num(f64),
    Col(usize),
    Neg(Box<Bound>),
    Bin(BinOp, Box<Bound>, Box<Bound>),
}

/// A formula whose attribute names are resolved to column indices.
#[derive(Clone, Debug)]
pub struct BoundFormula {
    root: Bound,
}

impl BoundFormula {
    pub fn eval(&self, record: &[Cell]) -> Result<f64, EvalError> {
        self.eval_with(&|i| &record[i])
    }

    /// Evaluate with an arbitrary column lookup (used to test swapped labels).
    pub fn eval_with<'c>(&self, get: &dyn Fn(usize) -> &'c Cell) -> Result<f64, EvalError> {
        // Missing operands take precedence over arithmetic failures.
        let mut cols = Vec::new();
        collect_cols(&self.root, &mut cols);
        for &c in &cols {
            match get(c) {
                Cell::Missing => return Err(EvalError::MissingOperand),
                Cell::Number(_) => {}
                _ => return Err(EvalError::NotNumeric),
            }
        }
        eval(&self.root, get)
    }

    /// Column indices referenced.
    pub fn columns(&self) -> Vec<usize> {
        let mut cols = Vec::new();
        collect_cols(&self.root, &mut cols);
        cols
    }
}

fn collect_cols(b: &Bound, out: &mut Vec<usize>) {
    match b {
        Bound::Col(c) => {
            if !out.contains(c) {
                out.push(*c)
            }
        }
        Bound::Neg(x) => collect_cols(x, out),
        Bound::Bin(_, a, b) => {
            collect_cols(a, out);
            collect_cols(b, out);
        }
        Bound::Num(_) => {}
    }
}

fn eval<'c>(b: &Bound, get: &dyn Fn(usize) -> &'c Cell) -> Result<f64, EvalError> {
    match b {
        Bound::Num(v) => Ok(*v),
        Bound::Col(c) => get(*c).as_number().ok_or(EvalError::NotNumeric),
        Bound::Neg(x) => Ok(-eval(x, get)?),
        Bound::Bin(op, x, y) => {
            let a = eval(x, get)?;
            let b = eval(y, get)?;
            match op {
                BinOp::Add => Ok(a + b),
                BinOp::Sub => Ok(a - b),
                BinOp::Mul => Ok(a * b),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(EvalError::Undefined)
                    } else {
                        Ok(a / b)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_csv_str;

    fn value(src: &str, csv: &str) -> Result<f64, EvalError> {
        let ds = parse_csv_str(csv, "t", None).unwrap();
        Formula::parse(src).unwrap().bind(&ds).unwrap().eval(&ds.records[0])
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(value("1 + 2 * 3", "x\n0\n"), Ok(7.0));
        assert_eq!(value("(1 + 2) * 3", "x\n0\n"), Ok(9.0));
        assert_eq!(value("8 / 4 / 2", "x\n0\n"), Ok(1.0));
        assert_eq!(value("10 - 4 - 3", "x\n0\n"), Ok(3.0));
        assert_eq!(value("-2 * -3", "x\n0\n"), Ok(6.0));
        assert_eq!(value("2e2 + .5", "x\n0\n"), Ok(200.5));
    }

    #[test]
    fn unicode_operators_and_quoted_names() {
        assert_eq!(value("`raw fp` × adj", "raw fp,adj\n100,0.8\n"), Ok(80.0));
        assert_eq!(value("a ÷ b − 1", "a,b\n6,3\n"), Ok(1.0));
    }

    #[test]
    fn dotted_identifiers() {
        assert_eq!(value("Actual.effort * 2", "Actual.effort\n4\n"), Ok(8.0));
    }

    #[test]
    fn missing_and_division_by_zero() {
        assert_eq!(value("a + b", "a,b\n1,?\n"), Err(EvalError::MissingOperand));
        assert_eq!(value("a / b", "a,b\n1,0\n"), Err(EvalError::Undefined));
        assert_eq!(value("a / b", "a,b\nx,1\n"), Err(EvalError::NotNumeric));
    }

    #[test]
    fn unknown_attribute_fails_to_bind() {
        let ds = parse_csv_str("a\n1\n", "t", None).unwrap();
        let f = Formula::parse("a + zz").unwrap();
        assert!(f.bind(&ds).is_err());
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "1 +", "(1", "1 2", "a $ b", "\"x\" + 1"] {
            assert!(Formula::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn attribute_listing() {
        let f = Formula::parse("c * (a + b) - a").unwrap();
        assert_eq!(f.attributes(), vec!["c", "a", "b"]);
    }
}
