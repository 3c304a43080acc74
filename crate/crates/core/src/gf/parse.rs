use crate::error::{Error, Result};
use crate::gf::field::{Elem, Field};
use crate::gf::poly::Poly;

/// Parses polynomial text such as `X^3-X+1`, `2X^2 + 1` or `w^16*x^18 + x + w^6`.
///
/// The indeterminate may be written `X`, `x`, `Y` or `y`; `w` denotes the
/// generator `ω` of an extension field. Integer coefficients are reduced
/// into the prime subfield and `*` between factors is optional.
pub fn parse_poly(field: &Field, text: &str) -> Result<Poly> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut parser = Parser { chars, pos: 0, field };
    let mut acc = Poly::zero(field);
    let mut first = true;
    while parser.pos < parser.chars.len() {
        let negative = match parser.peek() {
            Some('+') => {
                parser.pos += 1;
                false
            }
            Some('-') => {
                parser.pos += 1;
                true
            }
            _ if first => false,
            Some(c) => return Err(Error::Parse(format!("expected '+' or '-', found '{c}'"))),
            None => unreachable!(),
        };
        first = false;
        let (coeff, exp) = parser.term()?;
        let coeff = if negative { field.neg(coeff) } else { coeff };
        acc = acc.add(&Poly::monomial(field, coeff, exp));
    }
    Ok(acc)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    field: &'a Field,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Parse(format!("expected integer at position {start}")))
    }

    fn exponent(&mut self) -> Result<u64> {
        if self.peek() == Some('^') {
            self.pos += 1;
            self.int()
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<(Elem, usize)> {
        let f = self.field;
        let mut coeff = f.one();
        let mut exp = 0usize;
        let mut factors = 0;
        loop {
            match self.peek() {
                Some('*') if factors > 0 => {
                    self.pos += 1;
                    continue;
                }
                Some(c) if c.is_ascii_digit() => {
                    let n = self.int()?;
                    coeff = f.mul(coeff, f.from_int((n % f.p()) as i64));
                }
                Some('w') => {
                    if f.is_prime_field() {
                        return Err(Error::Parse("'w' is only defined over extension fields".into()));
                    }
                    self.pos += 1;
                    let j = self.exponent()?;
                    coeff = f.mul(coeff, f.omega_pow(j));
                }
                Some('X' | 'x' | 'Y' | 'y') => {
                    self.pos += 1;
                    exp += self.exponent()? as usize;
                }
                Some(c) if factors == 0 => {
                    return Err(Error::Parse(format!("unexpected '{c}' at position {}", self.pos)))
                }
                _ => break,
            }
            factors += 1;
        }
        if factors == 0 {
            return Err(Error::Parse("empty term".into()));
        }
        Ok((coeff, exp))
    }
}
