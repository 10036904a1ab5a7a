//! Coefficient expressions and the text matrix format.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := INT | 'q' | 'q' '^' SINT | 'M' '[' INT ',' INT ']' | '(' expr ')' | '-' factor
//! ```
//!
//! `M[i,j]` letters are accepted so rendered witnesses parse back; plain
//! coefficients reject them. Division is only by nonzero scalars.

use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};
use crate::ncalgebra::NCPoly;
use crate::qfield::QRat;
use crate::tensor::{index_of, word_of, SparseOp};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    allow_letters: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_letters: bool) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
            allow_letters,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self) -> ParseError {
        match self.src.get(self.pos) {
            Some(&b) => ParseError::UnexpectedChar {
                pos: self.pos,
                found: b as char,
            },
            None => ParseError::UnexpectedEnd,
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn integer(&mut self) -> Result<num_bigint::BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected());
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn small(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        let v = self.integer()?;
        usize::try_from(v).map_err(|_| ParseError::UnexpectedChar {
            pos: start,
            found: self.src[start] as char,
        })
    }

    fn signed_exponent(&mut self) -> Result<i32, ParseError> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let start = self.pos;
        let v = self.integer()?;
        let v = i32::try_from(v).map_err(|_| ParseError::UnexpectedChar {
            pos: start,
            found: self.src[start] as char,
        })?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<NCPoly<QRat>, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<NCPoly<QRat>, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(ParseError::DivisionByZero);
                    }
                    let scalar = scalar_of(&d).ok_or(ParseError::UnexpectedChar {
                        pos: at,
                        found: 'M',
                    })?;
                    acc = acc.scale(&scalar.inv().ok_or(ParseError::DivisionByZero)?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<NCPoly<QRat>, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.scale(&QRat::from_int(-1)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'q') => {
                self.pos += 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.signed_exponent()?;
                    Ok(NCPoly::constant(QRat::q_pow(e)))
                } else {
                    Ok(NCPoly::constant(QRat::q()))
                }
            }
            Some(b'M') if self.allow_letters => {
                self.pos += 1;
                self.expect(b'[')?;
                let i = self.small()?;
                self.expect(b',')?;
                let j = self.small()?;
                self.expect(b']')?;
                Ok(NCPoly::generator(i, j))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(NCPoly::constant(QRat::from_rational(num_rational::BigRational::from_integer(v))))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            Err(ParseError::Trailing { pos: self.pos })
        } else {
            Ok(())
        }
    }
}

fn scalar_of(p: &NCPoly<QRat>) -> Option<QRat> {
    if p.is_zero() {
        return Some(QRat::zero());
    }
    if p.degree() != Some(0) {
        return None;
    }
    p.terms().next().map(|(_, c)| c.clone())
}

/// Parses a coefficient expression in `q`.
pub fn parse_coeff(src: &str) -> Result<QRat, ParseError> {
    let mut p = Parser::new(src, false);
    let v = p.expr()?;
    p.finish()?;
    Ok(scalar_of(&v).expect("letters are rejected"))
}

/// Parses an algebra element written with `M[i,j]` letters, as in rendered witnesses.
pub fn parse_ncpoly(src: &str) -> Result<NCPoly<QRat>, ParseError> {
    let mut p = Parser::new(src, true);
    let v = p.expr()?;
    p.finish()?;
    Ok(v)
}

/// Reads an arity-2 operator: header `dim N arity 2`, then `a b c d <expr>` lines.
/// Blank lines and lines starting with `#` are ignored; later lines for the
/// same entry overwrite earlier ones.
pub fn read_matrix(text: &str) -> Result<SparseOp<QRat>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let line_err = |line: usize, msg: String| Error::Parse(ParseError::Line { line, msg });
    let (hline, header) = lines.next().ok_or_else(|| Error::Input("empty matrix file".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let dim = match h.as_slice() {
        ["dim", n, "arity", "2"] => n
            .parse::<usize>()
            .map_err(|_| line_err(hline, format!("bad dimension {n:?}")))?,
        _ => return Err(line_err(hline, "expected header `dim N arity 2`".into())),
    };
    if dim < 2 {
        return Err(line_err(hline, format!("dimension must be at least 2, got {dim}")));
    }
    let mut op = SparseOp::zero(dim, 2);
    for (line, l) in lines {
        let mut parts = l.splitn(5, char::is_whitespace);
        let mut idx = [0usize; 4];
        for slot in idx.iter_mut() {
            let tok = parts.next().ok_or_else(|| line_err(line, "expected `a b c d <coeff>`".into()))?;
            *slot = tok
                .parse()
                .map_err(|_| line_err(line, format!("bad index {tok:?}")))?;
            if *slot >= dim {
                return Err(line_err(line, format!("index {slot} out of range for dim {dim}")));
            }
        }
        let expr = parts.next().ok_or_else(|| line_err(line, "missing coefficient".into()))?;
        let c = parse_coeff(expr).map_err(|e| line_err(line, e.to_string()))?;
        op.set(index_of(&idx[..2], dim), index_of(&idx[2..], dim), c);
    }
    Ok(op)
}

/// Writes an arity-2 operator in the format read by [`read_matrix`].
pub fn write_matrix(op: &SparseOp<QRat>) -> Result<String> {
    if op.arity() != 2 {
        return Err(Error::Shape(format!("expected arity 2, got {}", op.arity())));
    }
    let mut out = format!("dim {} arity 2\n", op.dim());
    for (r, c, v) in op.entries() {
        let rw = word_of(r, op.dim(), 2);
        let cw = word_of(c, op.dim(), 2);
        writeln!(out, "{} {} {} {} {}", rw[0], rw[1], cw[0], cw[1], v).expect("write to string");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::qnum;
    use crate::rmatrix::standard_r;

    #[test]
    fn coefficient_grammar() {
        assert_eq!(parse_coeff("q - q^-1").unwrap(), QRat::q() - QRat::q_pow(-1));
        assert_eq!(parse_coeff("(q^2 - q^-2)/(q - q^-1)").unwrap(), qnum(2));
        assert_eq!(parse_coeff("-q^-1").unwrap(), -QRat::q_pow(-1));
        assert_eq!(parse_coeff(" 3 / 6 ").unwrap(), QRat::from_rational(crate::field::parse_rational("1/2").unwrap()));
        let q_plus_1 = QRat::q() + QRat::one();
        assert_eq!(parse_coeff("1/(q+1)").unwrap(), q_plus_1.inv().unwrap());
        assert_eq!(parse_coeff("--2").unwrap(), QRat::from_int(2));
    }

    #[test]
    fn grammar_errors() {
        assert_eq!(parse_coeff("1/(q-q)"), Err(ParseError::DivisionByZero));
        assert_eq!(parse_coeff(""), Err(ParseError::UnexpectedEnd));
        assert!(matches!(parse_coeff("q + x"), Err(ParseError::UnexpectedChar { found: 'x', .. })));
        assert!(matches!(parse_coeff("q q"), Err(ParseError::Trailing { .. })));
        assert!(parse_coeff("M[0,0]").is_err());
        assert!(matches!(parse_coeff("(q"), Err(ParseError::UnexpectedEnd)));
    }

    #[test]
    fn display_round_trips() {
        for s in ["q^3 - 2/3*q + 7", "(q^2 + 1)/(q^4 - q)", "-5/2*q^-7", "0"] {
            let v = parse_coeff(s).unwrap();
            assert_eq!(parse_coeff(&v.to_string()).unwrap(), v, "{s} -> {v}");
        }
    }

    #[test]
    fn witness_round_trip() {
        let p = parse_ncpoly("(q - q^-1)*M[0,1]*M[1,0] + M[1,1] - 3").unwrap();
        assert_eq!(p.degree(), Some(2));
        assert_eq!(parse_ncpoly(&p.to_string()).unwrap(), p);
        assert!(parse_ncpoly("M[0,0]/M[1,1]").is_err());
    }

    #[test]
    fn matrix_file_round_trip() {
        let r = standard_r(3);
        let text = write_matrix(&r).unwrap();
        assert!(text.starts_with("dim 3 arity 2\n"));
        assert_eq!(read_matrix(&text).unwrap(), r);
    }

    #[test]
    fn matrix_file_errors() {
        assert!(matches!(read_matrix(""), Err(Error::Input(_))));
        assert!(matches!(read_matrix("dim 2 arity 3\n"), Err(Error::Parse(ParseError::Line { line: 1, .. }))));
        assert!(matches!(
            read_matrix("dim 2 arity 2\n0 0 0 2 1\n"),
            Err(Error::Parse(ParseError::Line { line: 2, .. }))
        ));
        assert!(matches!(
            read_matrix("# flip\ndim 2 arity 2\n\n0 0 0 0 q +\n"),
            Err(Error::Parse(ParseError::Line { line: 4, .. }))
        ));
        let p = read_matrix("dim 2 arity 2\n0 0 0 0 1\n0 1 1 0 1\n1 0 0 1 1\n1 1 1 1 1\n").unwrap();
        assert_eq!(p, SparseOp::permutation(2));
    }
}
