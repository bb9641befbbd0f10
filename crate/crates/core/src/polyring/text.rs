//! Text form of polynomials: terms `c*T^e` joined by `+`, highest degree first.
//!
//! Prime-field coefficients are integers mod `p`; extension-field coefficients
//! are bracketed coordinate tuples `[c0,c1,...]`. A coefficient of 1 is
//! omitted in front of `T` over prime fields. Whitespace is ignored when parsing.

use std::fmt;

use super::{PolyError, Polynomial, RationalFunction};
use crate::gf::Field;

impl Polynomial {
    fn fmt_coeff(&self, c: u32) -> String {
        if self.field.is_prime_field() {
            c.to_string()
        } else {
            let digits: Vec<String> = self.field.digits(c).iter().map(|d| d.to_string()).collect();
            format!("[{}]", digits.join(","))
        }
    }

    pub fn parse(field: &Field, input: &str) -> Result<Self, PolyError> {
        let err = |reason: &str| PolyError::Parse { input: input.to_string(), reason: reason.to_string() };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let mut acc = Polynomial::zero(field);
        for term in s.split('+') {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let (coeff, rest) = parse_coefficient(field, term).map_err(|r| err(&r))?;
            let exp = match (coeff.is_some(), rest) {
                (_, "") => 0,
                (true, r) => match r.strip_prefix('*') {
                    Some(var) => parse_power(var).map_err(|r| err(&r))?,
                    None => return Err(err("expected '*' after coefficient")),
                },
                (false, r) => parse_power(r).map_err(|r| err(&r))?,
            };
            if coeff.is_none() && rest.is_empty() {
                return Err(err("empty term"));
            }
            let c = coeff.unwrap_or(1);
            acc = acc.add(&Polynomial::monomial(field, c, exp));
        }
        Ok(acc)
    }
}

/// Leading coefficient of a term, if present, and the unparsed remainder.
fn parse_coefficient<'a>(field: &Field, term: &'a str) -> Result<(Option<u32>, &'a str), String> {
    if let Some(body) = term.strip_prefix('[') {
        let close = body.find(']').ok_or("unterminated '['")?;
        let parts: Result<Vec<u32>, String> = body[..close]
            .split(',')
            .map(|d| {
                d.parse::<u64>()
                    .map(|v| field.from_int(v))
                    .map_err(|_| format!("bad coordinate {d:?}"))
            })
            .collect();
        let parts = parts?;
        if parts.len() != field.degree() as usize {
            return Err(format!("expected {} coordinates, found {}", field.degree(), parts.len()));
        }
        let value = field.from_digits(&parts).map_err(|e| e.to_string())?;
        return Ok((Some(value), &body[close + 1..]));
    }
    let end = term.find(|c: char| !c.is_ascii_digit()).unwrap_or(term.len());
    if end == 0 {
        return Ok((None, term));
    }
    let v: u64 = term[..end].parse().map_err(|_| format!("coefficient {:?} out of range", &term[..end]))?;
    Ok((Some(field.from_int(v)), &term[end..]))
}

fn parse_power(var: &str) -> Result<usize, String> {
    let rest = var.strip_prefix('T').ok_or_else(|| format!("expected 'T', found {var:?}"))?;
    if rest.is_empty() {
        return Ok(1);
    }
    let e = rest.strip_prefix('^').ok_or_else(|| format!("unexpected {rest:?}"))?;
    e.parse().map_err(|_| format!("bad exponent {e:?}"))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            let coeff = self.fmt_coeff(c);
            match e {
                0 => f.write_str(&coeff)?,
                _ => {
                    if !(self.field.is_prime_field() && c == 1) {
                        write!(f, "{coeff}*")?;
                    }
                    f.write_str("T")?;
                    if e > 1 {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl RationalFunction {
    /// Accepts a polynomial or `num/den`, each side optionally parenthesized.
    pub fn parse(field: &Field, input: &str) -> Result<Self, PolyError> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let strip = |p: &str| -> String {
            p.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(p).to_string()
        };
        match s.split_once('/') {
            None => Ok(Polynomial::parse(field, &strip(&s))?.into()),
            Some((n, d)) => {
                let num = Polynomial::parse(field, &strip(n))?;
                let den = Polynomial::parse(field, &strip(d))?;
                RationalFunction::new(num, den)
            }
        }
    }
}
