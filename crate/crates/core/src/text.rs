//! Exact text syntax shared by problem files and the command line.
//!
//! ```text
//! 1/2*z(6)^5 + 3                    cyclotomic coefficient
//! 3/2*[2]^(1/3)                     radical coefficient
//! t^(-3/2) + 1/2*z(4)*t^(-1)        polar part
//! inf | <coefficient>                location
//! ```
//!
//! `[x]` groups like parentheses; it marks a radicand in printed output.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclo::CycloNum;
use crate::error::{Error, Result};
use crate::formal::Location;
use crate::puiseux::PolarPart;
use crate::radical::RadicalCoeff;
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn err(pos: usize, message: impl Into<String>) -> Error {
    Error::ParseError { line: 1, column: pos + 1, message: message.into() }
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Num(digits.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect())));
        } else if "+-*/^()[]".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(err(pos, format!("unexpected character '{}'", c)));
        }
    }
    Ok(out)
}

/// A finite sum `Σ c_e t^e`.
#[derive(Clone, Debug, PartialEq)]
struct Value(BTreeMap<Rational, RadicalCoeff>);

impl Value {
    fn constant(c: RadicalCoeff) -> Value {
        Value([(Rational::zero(), c)].into_iter().collect()).clean()
    }

    fn t() -> Value {
        Value([(Rational::one(), RadicalCoeff::one())].into_iter().collect())
    }

    fn clean(mut self) -> Value {
        self.0.retain(|_, c| !c.is_zero());
        self
    }

    fn add(&self, o: &Value) -> Value {
        let mut m = self.0.clone();
        for (e, c) in &o.0 {
            let entry = m.entry(e.clone()).or_insert_with(RadicalCoeff::zero);
            *entry = &*entry + c;
        }
        Value(m).clean()
    }

    fn neg(&self) -> Value {
        Value(self.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }

    fn mul(&self, o: &Value) -> Value {
        let mut m: BTreeMap<Rational, RadicalCoeff> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let entry = m.entry(e1 + e2).or_insert_with(RadicalCoeff::zero);
                *entry = &*entry + &(c1 * c2);
            }
        }
        Value(m).clean()
    }

    fn single(&self) -> Option<(&Rational, &RadicalCoeff)> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    fn pow(&self, s: &Rational, pos: usize) -> Result<Value> {
        if self.0.is_empty() {
            return if s.is_positive() { Ok(self.clone()) } else { Err(err(pos, "division by zero")) };
        }
        if let Some((e, c)) = self.single() {
            let c = c.pow(s).map_err(|e| err(pos, e.to_string()))?;
            return Ok(Value([(e * s, c)].into_iter().collect()));
        }
        if s.is_integer() && !s.is_negative() {
            let mut acc = Value::constant(RadicalCoeff::one());
            for _ in 0..s.to_integer().to_u64().unwrap_or(0) {
                acc = acc.mul(self);
            }
            return Ok(acc);
        }
        Err(err(pos, "only single terms have fractional or negative powers"))
    }

    fn div(&self, o: &Value, pos: usize) -> Result<Value> {
        let inv = o.pow(&-Rational::one(), pos)?;
        Ok(self.mul(&inv))
    }

    fn coefficient(self, pos: usize) -> Result<RadicalCoeff> {
        if self.0.keys().any(|e| !e.is_zero()) {
            return Err(err(pos, "a coefficient cannot contain t"));
        }
        Ok(self.0.into_values().next().unwrap_or_else(RadicalCoeff::zero))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    len: usize,
    allow_t: bool,
}

impl Parser {
    fn new(src: &str, allow_t: bool) -> Result<Self> {
        Ok(Parser { toks: lex(src)?, i: 0, len: src.len(), allow_t })
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(self.pos(), format!("expected '{}'", c)))
        }
    }

    fn number(&mut self) -> Result<BigInt> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(n)
            }
            _ => Err(err(self.pos(), "expected a number")),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.i < self.toks.len() {
            return Err(err(self.pos(), "unexpected trailing input"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Sym('/')) {
                self.i += 1;
                let pos = self.pos();
                let d = self.unary()?;
                acc = acc.div(&d, pos)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Value> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    /// `n`, `-n`, `(p/q)`, `(-p/q)`.
    fn exponent(&mut self) -> Result<Rational> {
        if self.eat('(') {
            let neg = self.eat('-');
            let n = self.number()?;
            let d = if self.eat('/') {
                let pos = self.pos();
                let d = self.number()?;
                if d.is_zero() {
                    return Err(err(pos, "zero denominator"));
                }
                d
            } else {
                BigInt::one()
            };
            self.expect(')')?;
            let r = Rational::new(n, d);
            return Ok(if neg { -r } else { r });
        }
        let neg = self.eat('-');
        let n = Rational::from_integer(self.number()?);
        Ok(if neg { -n } else { n })
    }

    fn power(&mut self) -> Result<Value> {
        let base = self.atom()?;
        if self.eat('^') {
            let pos = self.pos();
            let e = self.exponent()?;
            return base.pow(&e, pos);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Value::constant(RadicalCoeff::from_rational(Rational::from_integer(n))))
            }
            Some(Tok::Sym(open @ ('(' | '['))) => {
                self.i += 1;
                let v = self.expr()?;
                self.expect(if open == '(' { ')' } else { ']' })?;
                Ok(v)
            }
            Some(Tok::Ident(id)) if id == "z" => {
                self.i += 1;
                self.expect('(')?;
                let npos = self.pos();
                let n = self.number()?;
                self.expect(')')?;
                let n =
                    n.to_u32().filter(|n| *n > 0).ok_or_else(|| err(npos, "root-of-unity order must be a positive integer"))?;
                Ok(Value::constant(RadicalCoeff::zeta(n, 1)))
            }
            Some(Tok::Ident(id)) if id == "t" => {
                if !self.allow_t {
                    return Err(err(pos, "'t' is not allowed here"));
                }
                self.i += 1;
                Ok(Value::t())
            }
            Some(Tok::Ident(id)) => Err(err(pos, format!("unknown name '{}'", id))),
            Some(Tok::Sym(c)) => Err(err(pos, format!("unexpected '{}'", c))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

pub fn parse_coeff(s: &str) -> Result<RadicalCoeff> {
    let mut p = Parser::new(s, false)?;
    let v = p.expr()?;
    p.finish()?;
    v.coefficient(0)
}

pub fn parse_cyclo(s: &str) -> Result<CycloNum> {
    parse_coeff(s)?.as_cyclo().ok_or_else(|| err(0, "expected a cyclotomic number (no radicals)"))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    parse_coeff(s)?.to_rational().ok_or_else(|| err(0, "expected a rational number"))
}

pub fn parse_polar(s: &str) -> Result<PolarPart> {
    let mut p = Parser::new(s, true)?;
    let v = p.expr()?;
    p.finish()?;
    let mut ram = BigInt::one();
    for e in v.0.keys() {
        if !e.is_negative() {
            return Err(err(0, format!("polar parts only have negative powers of t, found t^({})", e)));
        }
        ram = ram.lcm(e.denom());
    }
    let p32 = ram.to_u32().ok_or_else(|| err(0, "ramification too large"))?;
    let terms =
        v.0.into_iter()
            .map(|(e, c)| {
                let j = (-e * Rational::from_integer(ram.clone())).to_integer();
                (j.to_u32().expect("bounded by ramification"), c)
            })
            .collect();
    Ok(PolarPart::new(p32, terms))
}

pub fn parse_location(s: &str) -> Result<Location> {
    if s.trim() == "inf" {
        return Ok(Location::Infinity);
    }
    parse_coeff(s)?.as_cyclo().map(Location::Finite).ok_or_else(|| Error::NonCyclotomicLocation(s.to_string()))
}

/// Shift the position of an expression error to where the expression
/// sits in a larger source text.
pub fn relocate(e: Error, source: &str, expr: &str) -> Error {
    match e {
        Error::ParseError { column, message, .. } => {
            let quoted = format!("\"{}\"", expr);
            let at = source.find(&quoted).map(|i| i + 1).or_else(|| source.find(expr));
            match at {
                Some(off) => {
                    let before = &source[..off];
                    let line = before.matches('\n').count() + 1;
                    let col0 = before.rfind('\n').map(|i| off - i - 1).unwrap_or(off);
                    Error::ParseError { line, column: col0 + column, message }
                }
                None => Error::ParseError { line: 1, column, message },
            }
        }
        e => e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn coefficients() {
        let c = parse_cyclo("1/2*z(6)^5 + 3").unwrap();
        let expected = &CycloNum::zeta(6, 5).scale_q(&q(1, 2)) + &CycloNum::from_int(3);
        assert_eq!(c, expected);
        assert_eq!(parse_rational("-7/3").unwrap(), q(-7, 3));
        assert_eq!(parse_cyclo("z(3) + z(3)^2").unwrap(), CycloNum::from_int(-1));
        assert_eq!(parse_cyclo("(1 + z(4))^2").unwrap(), CycloNum::zeta(4, 1).scale_q(&q(2, 1)));
    }

    #[test]
    fn printed_forms_round_trip() {
        for s in ["1 - 1/2*z(4)", "z(6)", "-3", "2*z(12)^5 + z(12)", "3/2*[2]^(1/3)", "z(6)*[3]^(1/4)"] {
            let c = parse_coeff(s).unwrap();
            assert_eq!(parse_coeff(&c.to_string()).unwrap(), c, "{}", s);
        }
        let k = RadicalCoeff::from_int(-2).pow(&q(1, 3)).unwrap().scale_cyclo(&CycloNum::from_rational(q(3, 2)));
        assert_eq!(parse_coeff(&k.to_string()).unwrap(), k);
    }

    #[test]
    fn polar_parts() {
        let p = parse_polar("t^(-3/2) + 1/2*z(4)*t^(-1)").unwrap();
        assert_eq!(p.ram(), 2);
        assert_eq!(p.pole_order(), 3);
        assert_eq!(parse_polar(&p.to_string()).unwrap(), p);
        assert!(parse_polar("0").unwrap().is_zero());
        assert_eq!(parse_polar("t^-2").unwrap(), PolarPart::monomial(RadicalCoeff::one(), 2, 1));
        assert!(parse_polar("t").is_err());
        assert!(parse_polar("1 + t^(-1)").is_err());
    }

    #[test]
    fn locations() {
        assert_eq!(parse_location("inf").unwrap(), Location::Infinity);
        assert_eq!(parse_location("-1").unwrap(), Location::int(-1));
        assert!(matches!(parse_location("[2]^(1/3)"), Err(Error::NonCyclotomicLocation(_))));
    }

    #[test]
    fn error_positions() {
        match parse_coeff("1 + * 2") {
            Err(Error::ParseError { line, column, .. }) => assert_eq!((line, column), (1, 5)),
            e => panic!("{:?}", e),
        }
        match parse_coeff("z(0)") {
            Err(Error::ParseError { column, .. }) => assert_eq!(column, 3),
            e => panic!("{:?}", e),
        }
        assert!(matches!(parse_coeff("t"), Err(Error::ParseError { .. })));
        assert!(matches!(parse_coeff("1/0"), Err(Error::ParseError { .. })));
        let src = "{\n  \"loc\": \"1 + * 2\"\n}";
        match relocate(parse_coeff("1 + * 2").unwrap_err(), src, "1 + * 2") {
            Error::ParseError { line, column, .. } => assert_eq!((line, column), (2, 15)),
            e => panic!("{:?}", e),
        }
    }
}
