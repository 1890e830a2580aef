//! Symbolic register expansions in ket notation.
//!
//! An expression is a signed sum of terms. A term is an optional rational
//! coefficient, an optional amplitude symbol and one or more factors, where a
//! factor is a basis ket or a parenthesised sub-expression. Adjacent factors
//! are tensored, leftmost factor on the most significant qubit.
//!
//! ```text
//! 1/2 (|00>(a|0> + b|1>) + |01>(a|1> + b|0>) - |11>(b|0> - a|1>))
//! ```
//!
//! Coefficients are `n`, `n/m` or `n/sqrt2`. The symbols `a` and `b` stand
//! for the amplitudes alpha and beta of the unknown qubit.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;

/// The expansions shipped with the crate.
pub const BUNDLED: &str = include_str!("../../golden/expansions.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Alpha,
    Beta,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Ket(BitString),
    Group(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    /// Includes the sign.
    pub coefficient: f64,
    pub symbol: Option<Symbol>,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    LParen,
    RParen,
    Plus,
    Minus,
    Slash,
    Num(f64),
    Sqrt2,
    Sym(Symbol),
    Ket(BitString),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let err = |msg: String| Error::Golden(format!("{msg} in {src:?}"));
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            'a' | 'α' => {
                out.push(Token::Sym(Symbol::Alpha));
                i += 1;
            }
            'b' | 'β' => {
                out.push(Token::Sym(Symbol::Beta));
                i += 1;
            }
            '√' if chars.get(i + 1) == Some(&'2') => {
                out.push(Token::Sqrt2);
                i += 2;
            }
            's' => {
                let word: String = chars[i..].iter().take(5).collect();
                if word != "sqrt2" {
                    return Err(err(format!("unknown word at offset {i}")));
                }
                out.push(Token::Sqrt2);
                i += 5;
            }
            '|' => {
                let end = chars[i + 1..]
                    .iter()
                    .position(|&c| c == '>')
                    .ok_or_else(|| err("unterminated ket".into()))?;
                let label: String = chars[i + 1..i + 1 + end].iter().collect();
                if label.is_empty() {
                    return Err(err("empty ket".into()));
                }
                out.push(Token::Ket(label.parse()?));
                i += end + 2;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse().map_err(|_| err(format!("bad number {text:?}")))?;
                out.push(Token::Num(v));
            }
            other => return Err(err(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn fail(&self, msg: &str) -> Error {
        Error::Golden(format!("{msg} at token {} in {:?}", self.pos, self.src))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut sign = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                -1.0
            }
            Some(Token::Plus) => {
                self.pos += 1;
                1.0
            }
            _ => 1.0,
        };
        loop {
            let mut t = self.term()?;
            t.coefficient *= sign;
            terms.push(t);
            sign = match self.peek() {
                Some(Token::Plus) => 1.0,
                Some(Token::Minus) => -1.0,
                _ => break,
            };
            self.pos += 1;
        }
        Ok(Expr { terms })
    }

    fn term(&mut self) -> Result<Term> {
        let mut coefficient = 1.0;
        if let Some(Token::Num(_) | Token::Sqrt2) = self.peek() {
            coefficient = self.coefficient()?;
        }
        let symbol = match self.peek() {
            Some(Token::Sym(s)) => {
                let s = *s;
                self.pos += 1;
                Some(s)
            }
            _ => None,
        };
        let mut factors = Vec::new();
        loop {
            match self.peek() {
                Some(Token::Ket(_)) => {
                    if let Some(Token::Ket(k)) = self.next() {
                        factors.push(Factor::Ket(k));
                    }
                }
                Some(Token::LParen) => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    if self.next() != Some(Token::RParen) {
                        return Err(self.fail("expected ')'"));
                    }
                    factors.push(Factor::Group(inner));
                }
                _ => break,
            }
        }
        if factors.is_empty() {
            return Err(self.fail("term has no ket"));
        }
        Ok(Term { coefficient, symbol, factors })
    }

    fn coefficient(&mut self) -> Result<f64> {
        let num = match self.next() {
            Some(Token::Num(v)) => v,
            Some(Token::Sqrt2) => std::f64::consts::SQRT_2,
            _ => return Err(self.fail("expected coefficient")),
        };
        if self.peek() != Some(&Token::Slash) {
            return Ok(num);
        }
        self.pos += 1;
        let den = match self.next() {
            Some(Token::Num(v)) => v,
            Some(Token::Sqrt2) => std::f64::consts::SQRT_2,
            _ => return Err(self.fail("expected denominator")),
        };
        if den == 0.0 {
            return Err(self.fail("zero denominator"));
        }
        Ok(num / den)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src, tokens: tokenize(src)?, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(p.fail("trailing input"));
        }
        Ok(e)
    }

    /// Amplitudes with `a` and `b` bound to the given values.
    pub fn evaluate(&self, alpha: Complex64, beta: Complex64) -> Result<Vec<Complex64>> {
        let mut sum: Option<Vec<Complex64>> = None;
        for term in &self.terms {
            let mut v = vec![Complex64::new(term.coefficient, 0.0)];
            match term.symbol {
                Some(Symbol::Alpha) => v[0] *= alpha,
                Some(Symbol::Beta) => v[0] *= beta,
                None => {}
            }
            for f in &term.factors {
                let part = match f {
                    Factor::Ket(k) => {
                        let mut e = vec![Complex64::new(0.0, 0.0); 1 << k.len()];
                        e[index_of(k)] = Complex64::new(1.0, 0.0);
                        e
                    }
                    Factor::Group(g) => g.evaluate(alpha, beta)?,
                };
                v = kron(&v, &part);
            }
            sum = Some(match sum {
                None => v,
                Some(acc) => {
                    if acc.len() != v.len() {
                        return Err(Error::Golden(format!(
                            "terms of different width: {} vs {} amplitudes",
                            acc.len(),
                            v.len()
                        )));
                    }
                    acc.iter().zip(&v).map(|(x, y)| x + y).collect()
                }
            });
        }
        sum.ok_or_else(|| Error::Golden("empty expression".into()))
    }
}

fn index_of(k: &BitString) -> usize {
    k.bits().iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// One expected register state and the simulator snapshot it describes.
#[derive(Clone, Debug, Deserialize)]
pub struct GoldenExpansion {
    pub name: String,
    pub protocol: ProtocolKind,
    /// Snapshot label, see [`crate::protocol::snapshots`].
    pub stage: String,
    pub expr: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct GoldenSet {
    pub expansions: Vec<GoldenExpansion>,
}

impl GoldenSet {
    pub fn bundled() -> Result<Self> {
        Self::from_json(BUNDLED)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: GoldenSet = serde_json::from_str(text)?;
        if set.expansions.is_empty() {
            return Err(Error::Golden("no expansions".into()));
        }
        for e in &set.expansions {
            Expr::parse(&e.expr).map_err(|err| Error::Golden(format!("{}: {err}", e.name)))?;
        }
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Golden(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bell_pair() {
        let v = Expr::parse("1/sqrt2 (|00> + |11>)").unwrap().evaluate(c(1.0), c(0.0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (x, y) in v.iter().zip([h, 0.0, 0.0, h]) {
            assert!((x - c(y)).norm() < 1e-15);
        }
    }

    #[test]
    fn symbols_and_signs() {
        let (a, b) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let v = Expr::parse("-a|1> - b|0>").unwrap().evaluate(a, b).unwrap();
        assert_eq!(v, vec![-b, -a]);
        let w = Expr::parse("α|0> + β|1>").unwrap().evaluate(a, b).unwrap();
        assert_eq!(w, vec![a, b]);
    }

    #[test]
    fn tensor_order_is_left_to_right() {
        let v = Expr::parse("|1>(|0> + 2|1>)").unwrap().evaluate(c(1.0), c(1.0)).unwrap();
        assert_eq!(v, vec![c(0.0), c(0.0), c(1.0), c(2.0)]);
    }

    #[test]
    fn malformed() {
        for bad in ["", "|01", "a + |0>", "1/0 |0>", "|0> + |00>", "(|0>", "|0> x", "|2>", "sqrt3|0>"] {
            let r = Expr::parse(bad).and_then(|e| e.evaluate(c(1.0), c(0.0)));
            assert!(r.is_err(), "{bad:?}");
        }
    }

    #[test]
    fn bundled_set_parses() {
        let set = GoldenSet::bundled().unwrap();
        assert_eq!(set.expansions.len(), 11);
        let sqtp = set.expansions.iter().filter(|e| e.protocol == ProtocolKind::Sqtp).count();
        assert_eq!((sqtp, set.expansions.len() - sqtp), (5, 6));
    }
}
