//! Tabulated lowest-order (`r = 1`, `k = 2`) basis lists on the reference
//! cells, and their comparison with the dualized elements.

use crate::elements::FiniteElement;
use crate::error::Error;
use crate::polycore::{int, Polynomial, Rational, Shape, VectorField};
use crate::derham_check::reference_frame;
use crate::spaces::Family;

/// Components `u_1`, `u_2` of the eight rectangle basis functions on `(-1, 1)^2`.
const RECT_U1: [&str; 8] = [
    "-((x_2^2 - 1)(- 3x_2x_1^2 + 2x_1 + 5x_2 - 4))/32",
    "((x_2^2 - 1)(3x_2x_1^2 + 2x_1 - 5x_2 + 4))/32",
    "((x_2^2 - 1)(3x_2x_1^2 + 2x_1 - 5x_2 - 4))/32",
    "-((x_2^2 - 1)(- 3x_2x_1^2 + 2x_1 + 5x_2 + 4))/32",
    "-((x_2 - 1)(3x_1^2x_2^2 + 3x_1^2x_2 - 5x_2^2 - 5x_2 + 8))/32",
    "((x_2 + 1)(3x_1^2x_2^2 - 3x_1^2x_2 - 5x_2^2 + 5x_2 + 8))/32",
    "(x_2(x_2^2 - 1)(3x_1^2 - 5))/32",
    "-(x_2(x_2^2 - 1)(3x_1^2 - 5))/32",
];
const RECT_U2: [&str; 8] = [
    "((x_1^2 - 1)(- 3x_1x_2^2 + 2x_2 + 5x_1 - 4))/32",
    "((x_1^2 - 1)(- 3x_1x_2^2 - 2x_2 + 5x_1 + 4))/32",
    "-((x_1^2 - 1)(3x_1x_2^2 + 2x_2 - 5x_1 + 4))/32",
    "((x_1^2 - 1)(- 3x_1x_2^2 + 2x_2 + 5x_1 + 4))/32",
    "(x_1(x_1^2 - 1)(3x_2^2 - 5))/32",
    "-(x_1(x_1^2 - 1)(3x_2^2 - 5))/32",
    "-((x_1 - 1)(3x_1^2x_2^2 - 5x_1^2 + 3x_1x_2^2 - 5x_1 + 8))/32",
    "((x_1 + 1)(3x_1^2x_2^2 - 5x_1^2 - 3x_1x_2^2 + 5x_1 + 8))/32",
];

/// Components of the six triangle basis functions on the triangle with
/// vertices `(0, 0)`, `(1, 0)`, `(0, 1)`.
const TRI_U1: [&str; 6] = [
    "x_2(x_1 + x_2)/2 - x_2/2 + x_1x_2/2 + x_2(3x_1 - 4x_1x_2)(x_1 + x_2 - 1)",
    "-x_1x_2(4x_2 - 3)(x_1 + x_2 - 1)",
    "x_1x_2 + x_2(3x_1 - 4x_1x_2)(x_1 + x_2 - 1)",
    "- x_2(x_1 + x_2) - 3x_1x_2 - 6x_2(3x_1 - 4x_1x_2)(x_1 + x_2 - 1)",
    "- x_2(x_1 + x_2) - 3x_1x_2 - 6x_2(3x_1 - 4x_1x_2)(x_1 + x_2 - 1)",
    "1 - 3x_1x_2 - 6x_2(3x_1 - 4x_1x_2)(x_1 + x_2 - 1) - x_2(x_1 + x_2)",
];
const TRI_U2: [&str; 6] = [
    "x_1(8x_1^2x_2 + 2x_1^2 + 8x_1x_2^2 - 6x_1x_2 - 3x_1 + 1)/2",
    "x_1^2(4x_2 + 1)(x_1 + x_2 - 1)",
    "x_1x_2 + x_1(x_1 + 4x_1x_2)(x_1 + x_2 - 1)",
    "x_1(x_1 + x_2) - 3x_1x_2 - 6x_1(x_1 + 4x_1x_2)(x_1 + x_2 - 1)",
    "x_1(x_1 + x_2) - 3x_1x_2 - 6x_1(x_1 + 4x_1x_2)(x_1 + x_2 - 1) - 1",
    "x_1(x_1 + x_2) - 3x_1x_2 - 6x_1(x_1 + 4x_1x_2)(x_1 + x_2 - 1)",
];

/// Parses polynomial expressions in `x_1`, `x_2` with integer constants,
/// `+ - / ^`, parentheses and implicit multiplication.
pub fn parse_polynomial(src: &str) -> Result<Polynomial, Error> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let out = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Config(format!("trailing input in {src:?}")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Var(u8),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, Error> {
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_digit() {
            let mut n = 0i64;
            while i < chars.len() && chars[i].is_ascii_digit() {
                n = n * 10 + chars[i].to_digit(10).unwrap() as i64;
                i += 1;
            }
            out.push(Tok::Num(n));
        } else if c == 'x' {
            let rest: String = chars[i..].iter().take(3).collect();
            match rest.as_str() {
                "x_1" => out.push(Tok::Var(1)),
                "x_2" => out.push(Tok::Var(2)),
                _ => return Err(Error::Config(format!("bad variable in {src:?}"))),
            }
            i += 3;
        } else if "+-/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Config(format!("unexpected {c:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn err<T>(&self) -> Result<T, Error> {
        Err(Error::Config(format!("parse error at token {}", self.pos)))
    }

    fn expr(&mut self) -> Result<Polynomial, Error> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, Error> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Num(n)) if n != 0 => {
                            self.pos += 1;
                            acc = acc.scale(&Rational::new(1.into(), n.into()));
                        }
                        _ => return self.err(),
                    }
                }
                Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::Op('(')) => {
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, Error> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.scale(&int(-1)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, Error> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    return Ok(base.pow(n as u32));
                }
                _ => return self.err(),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Polynomial, Error> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(int(n)))
            }
            Some(Tok::Var(1)) => {
                self.pos += 1;
                Ok(Polynomial::x())
            }
            Some(Tok::Var(_)) => {
                self.pos += 1;
                Ok(Polynomial::y())
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return self.err();
                }
                self.pos += 1;
                Ok(e)
            }
            _ => self.err(),
        }
    }
}

fn tabulated(u1: &[&str], u2: &[&str]) -> Vec<VectorField> {
    u1.iter()
        .zip(u2)
        .map(|(a, b)| VectorField::new(parse_polynomial(a).expect("tabulated list parses"), parse_polynomial(b).expect("tabulated list parses")))
        .collect()
}

pub fn tabulated_basis(shape: Shape) -> Vec<VectorField> {
    match shape {
        Shape::Rectangle => tabulated(&RECT_U1, &RECT_U2),
        Shape::Triangle => tabulated(&TRI_U1, &TRI_U2),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppendixReport {
    pub shape: Shape,
    /// For each tabulated function, the matching dual basis index and sign.
    pub matches: Vec<Option<(usize, i32)>>,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.matches.iter().all(Option::is_some)
    }

    pub fn to_text(&self) -> String {
        let found = self.matches.iter().filter(|m| m.is_some()).count();
        format!(
            "appendix basis on reference {}: {} of {} tabulated functions match a dual basis function up to sign: {}\n",
            self.shape,
            found,
            self.matches.len(),
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

/// Matches tabulated functions to the dual basis up to a signed permutation.
pub fn compare(el: &FiniteElement, tabulated: &[VectorField]) -> AppendixReport {
    let mut used = vec![false; el.dual_basis.len()];
    let matches = tabulated
        .iter()
        .map(|p| {
            let neg = p.scale(&int(-1));
            let hit = el.dual_basis.iter().enumerate().find_map(|(i, d)| {
                if used[i] {
                    None
                } else if d == p {
                    Some((i, 1))
                } else if *d == neg {
                    Some((i, -1))
                } else {
                    None
                }
            });
            if let Some((i, _)) = hit {
                used[i] = true;
            }
            hit
        })
        .collect();
    AppendixReport { shape: el.shape(), matches }
}

/// Dualizes the lowest-order new-family element on the reference cell and
/// compares it with the tabulated list.
pub fn check_appendix(shape: Shape) -> Result<AppendixReport, Error> {
    let el = FiniteElement::new(Family::New, 2, &reference_frame(shape))?;
    Ok(compare(&el, &tabulated_basis(shape)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::rat;

    #[test]
    fn parser_handles_implicit_products() {
        let p = parse_polynomial("-((x_2^2 - 1)(2x_1 + 5))/32").unwrap();
        let x = Polynomial::x();
        let y = Polynomial::y();
        let expect = (&(&(&y * &y) - &Polynomial::one()) * &(&x.scale(&int(2)) + &Polynomial::constant(int(5)))).scale(&rat(-1, 32));
        assert_eq!(p, expect);
        assert_eq!(parse_polynomial("x_1x_2/2").unwrap(), (&x * &y).scale(&rat(1, 2)));
        assert_eq!(parse_polynomial("- x_2 - 3x_1").unwrap(), &y.scale(&int(-1)) - &x.scale(&int(3)));
        assert!(parse_polynomial("x_3").is_err());
        assert!(parse_polynomial("(x_1").is_err());
    }

    #[test]
    fn tabulated_lists_have_expected_sizes() {
        assert_eq!(tabulated_basis(Shape::Rectangle).len(), 8);
        assert_eq!(tabulated_basis(Shape::Triangle).len(), 6);
    }
}
