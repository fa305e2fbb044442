//! Text grammar for polynomials and rational functions.
//!
//! ```text
//! poly     := [sign] term (sign term)*
//! term     := coeff factor* | factor+
//! coeff    := int ['/' int]
//! factor   := ['*'] ('x' | 'y') ['^' int]
//! ratfun   := poly | '(' poly ')' ['/' '(' poly ')']
//! ```
//!
//! Whitespace is ignored everywhere; juxtaposition is multiplication.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{BivarPoly, Monomial, Rational, RationalFunction};

/// Parse failure with a 1-based character column.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

// Exponents past this are rejected; they would only blow up memory.
const MAX_EXPONENT: u32 = 1024;

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        let chars = src
            .chars()
            .enumerate()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Cursor {
            chars,
            pos: 0,
            _src: src,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        match self.chars.get(self.pos) {
            Some(&(i, _)) => i + 1,
            None => self.chars.last().map(|&(i, _)| i + 2).unwrap_or(1),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return self.error("expected digits");
        }
        Ok(digits.parse().expect("ascii digits"))
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') | Some('\u{2212}') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn term(&mut self) -> Result<(Rational, Monomial), ParseError> {
        let mut coeff = Rational::one();
        let mut seen = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let num = self.integer()?;
            coeff = Rational::from_integer(num);
            if self.peek() == Some('/') {
                self.pos += 1;
                let den = self.integer()?;
                if den.is_zero() {
                    return self.error("zero denominator");
                }
                coeff = Rational::new(coeff.numer().clone(), den);
            }
            seen = true;
        }
        let mut mono = Monomial::ONE;
        loop {
            let save = self.pos;
            if seen && self.peek() == Some('*') {
                self.pos += 1;
            }
            let var = match self.peek() {
                Some('x') => 0,
                Some('y') => 1,
                _ => {
                    if self.pos != save {
                        return self.error("expected 'x' or 'y' after '*'");
                    }
                    break;
                }
            };
            self.pos += 1;
            let mut e = 1u32;
            if self.peek() == Some('^') {
                self.pos += 1;
                let col = self.column();
                let v = self.integer()?;
                e = match u32::try_from(&v) {
                    Ok(e) if e <= MAX_EXPONENT => e,
                    _ => {
                        return Err(ParseError {
                            column: col,
                            message: format!("exponent exceeds {MAX_EXPONENT}"),
                        })
                    }
                };
            }
            let add = if var == 0 {
                Monomial::new(e, 0)
            } else {
                Monomial::new(0, e)
            };
            mono = mono.mul(&add);
            if mono.degree() > MAX_EXPONENT {
                return self.error(format!("total degree exceeds {MAX_EXPONENT}"));
            }
            seen = true;
        }
        if !seen {
            return match self.peek() {
                Some(c) => self.error(format!("unexpected '{c}'")),
                None => self.error("expected a term"),
            };
        }
        Ok((coeff, mono))
    }

    fn poly(&mut self) -> Result<BivarPoly, ParseError> {
        let mut out = BivarPoly::zero();
        let mut neg = self.sign().unwrap_or(false);
        loop {
            let (c, m) = self.term()?;
            out.add_term(m, if neg { -c } else { c });
            match self.sign() {
                Some(s) => neg = s,
                None => break,
            }
        }
        Ok(out)
    }
}

pub fn parse_poly(src: &str) -> Result<BivarPoly, ParseError> {
    let mut cur = Cursor::new(src);
    if cur.at_end() {
        return cur.error("empty polynomial");
    }
    let p = cur.poly()?;
    if !cur.at_end() {
        let c = cur.peek().unwrap_or(' ');
        return cur.error(format!("unexpected '{c}'"));
    }
    Ok(p)
}

pub fn parse_rational_function(src: &str) -> Result<RationalFunction, ParseError> {
    let mut cur = Cursor::new(src);
    if cur.at_end() {
        return cur.error("empty expression");
    }
    if cur.peek() != Some('(') {
        let p = cur.poly()?;
        if !cur.at_end() {
            let c = cur.peek().unwrap_or(' ');
            return cur.error(format!("unexpected '{c}'"));
        }
        return Ok(RationalFunction::from_poly(p));
    }
    let num = parenthesized(&mut cur)?;
    let den = if cur.peek() == Some('/') {
        cur.bump();
        if cur.peek() != Some('(') {
            return cur.error("expected '(' to open the denominator");
        }
        let col = cur.column();
        let den = parenthesized(&mut cur)?;
        if den.is_zero() {
            return Err(ParseError {
                column: col,
                message: "denominator is identically zero".into(),
            });
        }
        den
    } else {
        BivarPoly::one()
    };
    if !cur.at_end() {
        let c = cur.peek().unwrap_or(' ');
        return cur.error(format!("unexpected '{c}'"));
    }
    Ok(RationalFunction::new(num, den).expect("nonzero denominator checked"))
}

fn parenthesized(cur: &mut Cursor<'_>) -> Result<BivarPoly, ParseError> {
    debug_assert_eq!(cur.peek(), Some('('));
    cur.bump();
    let p = cur.poly()?;
    if cur.bump() != Some(')') {
        cur.pos = cur.pos.saturating_sub(1);
        return cur.error("expected ')'");
    }
    Ok(p)
}

impl FromStr for BivarPoly {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

impl FromStr for RationalFunction {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational_function(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    #[test]
    fn grammar_examples() {
        let p = parse_poly("2/3x^3 - x y^2").unwrap();
        assert_eq!(p.coeff(&Monomial::new(3, 0)), q(2, 3));
        assert_eq!(p.coeff(&Monomial::new(1, 2)), q(-1, 1));
        assert_eq!(p.len(), 2);
        assert_eq!(parse_poly("y^2").unwrap(), BivarPoly::monomial(0, 2));
        assert_eq!(
            parse_poly(" 2 / 3 x ^ 3").unwrap(),
            parse_poly("2/3x^3").unwrap()
        );
        assert_eq!(parse_poly("x*y*x").unwrap(), BivarPoly::monomial(2, 1));
        assert_eq!(parse_poly("\u{2212}x").unwrap(), -BivarPoly::x());
        assert_eq!(parse_poly("0").unwrap(), BivarPoly::zero());
        assert_eq!(parse_poly("x - x").unwrap(), BivarPoly::zero());
    }

    #[test]
    fn errors_carry_columns() {
        assert_eq!(parse_poly("x + ").unwrap_err().column, 4);
        assert_eq!(parse_poly("x + z").unwrap_err().column, 5);
        assert_eq!(parse_poly("1/0 x").unwrap_err().message, "zero denominator");
        assert!(parse_poly("").is_err());
        assert!(parse_poly("x^").is_err());
        assert!(parse_poly("x 2").is_err());
        assert!(parse_poly("x^99999999999999999999").is_err());
        assert!(parse_poly("*").is_err());
        assert_eq!(parse_poly("x +* y").unwrap_err().column, 4);
        assert_eq!(parse_poly("2*x*y").unwrap(), parse_poly("2 x y").unwrap());
    }

    #[test]
    fn rational_functions() {
        let r = parse_rational_function("(x^2 + y^2)/(1 + x)").unwrap();
        assert_eq!(r.numerator(), &parse_poly("x^2+y^2").unwrap());
        assert_eq!(r.denominator(), &parse_poly("x + 1").unwrap());
        let r = parse_rational_function("(x^2 - 1)/(2x - 2)").unwrap();
        assert_eq!(r.numerator(), &parse_poly("1/2 x + 1/2").unwrap());
        assert!(r.denominator().is_one_poly());
        assert!(parse_rational_function("(x)/(0)").is_err());
        assert!(parse_rational_function("(x").is_err());
        assert!(parse_rational_function("(x)/y").is_err());
        assert_eq!(
            parse_rational_function("x y").unwrap(),
            RationalFunction::from_poly(BivarPoly::monomial(1, 1))
        );
    }

    #[test]
    fn display_round_trips() {
        for s in ["2/3 x^3 - x y^2", "-x^5 + 7 y - 1/9", "0", "x y"] {
            let p = parse_poly(s).unwrap();
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }
    }
}
