use std::fmt;

use super::{Cell, Dataset};
use crate::error::Result;
use crate::formula::{lex, BinOp, Expr, Parser, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// A per-record rule, e.g. `Effort is not missing and Effort > 0`.
///
/// Comparisons involving a missing cell are false; use `is missing` to test
/// for absence explicitly.
#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    Compare(Expr, CmpOp, Expr),
    IsMissing(String),
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
}

impl Predicate {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = lex(src)?;
        let mut p = Parser::new(&tokens, src);
        let pred = or_expr(&mut p)?;
        if !p.at_end() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(pred)
    }

    pub fn not_missing(attr: &str) -> Self {
        Predicate::Not(Box::new(Predicate::IsMissing(attr.to_string())))
    }

    pub fn and(self, other: Predicate) -> Self {
        Predicate::And(Box::new(self), Box::new(other))
    }

    pub fn attributes(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<String>) {
        let mut push = |names: Vec<String>| {
            for n in names {
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        };
        match self {
            Predicate::Compare(a, _, b) => {
                push(a.attributes());
                push(b.attributes());
            }
            Predicate::IsMissing(a) => push(vec![a.clone()]),
            Predicate::Not(p) => p.collect(out),
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    /// Evaluate against one record. Attribute names must already be known to
    /// exist in `ds` (see [`filter_records`]).
    pub fn matches(&self, ds: &Dataset, record: &[Cell]) -> bool {
        match self {
            Predicate::IsMissing(a) => ds
                .attribute_index(a)
                .is_some_and(|i| record[i].is_missing()),
            Predicate::Not(p) => !p.matches(ds, record),
            Predicate::And(a, b) => a.matches(ds, record) && b.matches(ds, record),
            Predicate::Or(a, b) => a.matches(ds, record) || b.matches(ds, record),
            Predicate::Compare(a, op, b) => {
                compare(value(a, ds, record), *op, value(b, ds, record))
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Compare(a, op, b) => {
                let o = match op {
                    CmpOp::Eq => "=",
                    CmpOp::Ne => "!=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                write!(f, "{a} {o} {b}")
            }
            Predicate::IsMissing(a) => write!(f, "`{a}` is missing"),
            Predicate::Not(p) => write!(f, "not ({p})"),
            Predicate::And(a, b) => write!(f, "({a}) and ({b})"),
            Predicate::Or(a, b) => write!(f, "({a}) or ({b})"),
        }
    }
}

fn or_expr(p: &mut Parser) -> Result<Predicate> {
    let mut lhs = and_expr(p)?;
    while p.peek() == Some(&Token::Or) {
        p.pos += 1;
        let rhs = and_expr(p)?;
        lhs = Predicate::Or(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn and_expr(p: &mut Parser) -> Result<Predicate> {
    let mut lhs = not_expr(p)?;
    while p.peek() == Some(&Token::And) {
        p.pos += 1;
        let rhs = not_expr(p)?;
        lhs = Predicate::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn not_expr(p: &mut Parser) -> Result<Predicate> {
    if p.peek() == Some(&Token::Not) {
        p.pos += 1;
        return Ok(Predicate::Not(Box::new(not_expr(p)?)));
    }
    if p.peek() == Some(&Token::LParen) {
        // `(` opens either a nested condition or an arithmetic operand.
        let save = p.pos;
        p.pos += 1;
        if let Ok(inner) = or_expr(p) {
            if p.peek() == Some(&Token::RParen) {
                p.pos += 1;
                return Ok(inner);
            }
        }
        p.pos = save;
    }
    comparison(p)
}

fn comparison(p: &mut Parser) -> Result<Predicate> {
    let lhs = p.expr()?;
    if p.peek() == Some(&Token::Is) {
        p.pos += 1;
        let negate = p.peek() == Some(&Token::Not);
        if negate {
            p.pos += 1;
        }
        p.expect(Token::Missing)?;
        let Expr::Attr(name) = lhs else {
            return Err(p.error("`is missing` applies to an attribute name"));
        };
        let pred = Predicate::IsMissing(name);
        return Ok(if negate {
            Predicate::Not(Box::new(pred))
        } else {
            pred
        });
    }
    let op = match p.peek() {
        Some(Token::Eq) => CmpOp::Eq,
        Some(Token::Ne) => CmpOp::Ne,
        Some(Token::Lt) => CmpOp::Lt,
        Some(Token::Le) => CmpOp::Le,
        Some(Token::Gt) => CmpOp::Gt,
        Some(Token::Ge) => CmpOp::Ge,
        _ => return Err(p.error("expected a comparison operator or `is`")),
    };
    p.pos += 1;
    let rhs = p.expr()?;
    Ok(Predicate::Compare(lhs, op, rhs))
}

#[derive(Debug, PartialEq)]
enum Value {
    Num(f64),
    Text(String),
    Absent,
}

fn value(e: &Expr, ds: &Dataset, record: &[Cell]) -> Value {
    match e {
        Expr::Num(v) => Value::Num(*v),
        Expr::Str(s) => Value::Text(s.clone()),
        Expr::Attr(a) => match ds.attribute_index(a).map(|i| &record[i]) {
            Some(Cell::Number(v)) => Value::Num(*v),
            Some(c @ Cell::Date { .. }) => c.as_ordinal().map_or(Value::Absent, Value::Num),
            Some(Cell::Text(s)) => Value::Text(s.clone()),
            _ => Value::Absent,
        },
        Expr::Neg(x) => match value(x, ds, record) {
            Value::Num(v) => Value::Num(-v),
            _ => Value::Absent,
        },
        Expr::Bin(op, x, y) => match (value(x, ds, record), value(y, ds, record)) {
            (Value::Num(a), Value::Num(b)) => match op {
                BinOp::Add => Value::Num(a + b),
                BinOp::Sub => Value::Num(a - b),
                BinOp::Mul => Value::Num(a * b),
                BinOp::Div if b == 0.0 => Value::Absent,
                BinOp::Div => Value::Num(a / b),
            },
            _ => Value::Absent,
        },
    }
}

fn compare(a: Value, op: CmpOp, b: Value) -> bool {
    use std::cmp::Ordering;
    let ord = match (&a, &b) {
        (Value::Num(x), Value::Num(y)) => x.partial_cmp(y),
        (Value::Text(x), Value::Text(y)) => Some(x.cmp(y)),
        // A numeric cell compared with a quoted number, e.g. `Project = "23"`.
        (Value::Num(x), Value::Text(y)) => y.trim().parse::<f64>().ok().and_then(|y| x.partial_cmp(&y)),
        (Value::Text(x), Value::Num(y)) => x.trim().parse::<f64>().ok().and_then(|x| x.partial_cmp(y)),
        _ => return false,
    };
    match ord {
        None => op == CmpOp::Ne,
        Some(o) => match op {
            CmpOp::Eq => o == Ordering::Equal,
            CmpOp::Ne => o != Ordering::Equal,
            CmpOp::Lt => o == Ordering::Less,
            CmpOp::Le => o != Ordering::Greater,
            CmpOp::Gt => o == Ordering::Greater,
            CmpOp::Ge => o != Ordering::Less,
        },
    }
}

/// Keep the records satisfying `predicate`, in order. Unknown attribute
/// names are a configuration error.
pub fn filter_records(ds: &Dataset, predicate: &Predicate) -> Result<Dataset> {
    for a in predicate.attributes() {
        ds.require_attribute(&a)?;
    }
    let keep: Vec<usize> = (0..ds.len())
        .filter(|&i| predicate.matches(ds, &ds.records[i]))
        .collect();
    Ok(ds.select_records(&keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_csv_str;
    use crate::error::Error;

    fn ds() -> Dataset {
        parse_csv_str(
            "id,Effort,Size,lang\n1,10,100,cobol\n2,0,50,pl1\n3,?,70,cobol\n4,25,?,dms\n",
            "t",
            None,
        )
        .unwrap()
    }

    fn count(rule: &str) -> usize {
        filter_records(&ds(), &Predicate::parse(rule).unwrap())
            .unwrap()
            .len()
    }

    #[test]
    fn effort_positive() {
        assert_eq!(count("Effort is not missing and Effort > 0"), 2);
        assert_eq!(count("Effort > 0"), 2);
    }

    #[test]
    fn drop_by_identifier() {
        assert_eq!(count("not (id = 3)"), 3);
        assert_eq!(count("id != 3"), 3);
        assert_eq!(count("id = \"3\""), 1);
    }

    #[test]
    fn text_and_boolean_logic() {
        assert_eq!(count("lang = \"cobol\" or lang = 'dms'"), 3);
        assert_eq!(count("Size is missing"), 1);
        assert_eq!(count("(Size + 1) * 2 > 150 and not Effort is missing"), 1);
    }

    #[test]
    fn missing_never_satisfies_comparison() {
        assert_eq!(count("Effort != 0"), 2);
    }

    #[test]
    fn order_preserved() {
        let out = filter_records(&ds(), &Predicate::parse("id >= 2").unwrap()).unwrap();
        let ids: Vec<f64> = out.numeric_values(0);
        assert_eq!(ids, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn unknown_attribute() {
        let err = filter_records(&ds(), &Predicate::parse("zz > 1").unwrap()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn parse_errors() {
        for bad in ["Effort", "Effort >", "1 + 2 is missing", "(Effort > 1"] {
            assert!(Predicate::parse(bad).is_err(), "{bad}");
        }
    }
}
