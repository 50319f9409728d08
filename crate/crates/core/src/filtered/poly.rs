//! Polynomials in `t1..te` with exact coefficients, used as jet
//! representatives of power series.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::monomial::render_monomial;
use crate::linalg::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

fn degree_of(m: &[u32]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// Graded lexicographic order, larger monomials first.
fn grlex_desc(a: &[u32], b: &[u32]) -> Ordering {
    degree_of(b).cmp(&degree_of(a)).then_with(|| b.cmp(a))
}

impl Polynomial {
    pub fn zero(field: Field, nvars: usize) -> Polynomial {
        Polynomial {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, nvars: usize, c: Scalar) -> Polynomial {
        Polynomial::monomial(field, vec![0; nvars], c)
    }

    pub fn from_i64(field: Field, nvars: usize, c: i64) -> Polynomial {
        Polynomial::constant(field, nvars, field.from_i64(c))
    }

    /// `t_a` (0-based index).
    pub fn var(field: Field, nvars: usize, a: usize) -> Polynomial {
        let mut e = vec![0; nvars];
        e[a] = 1;
        Polynomial::monomial(field, e, field.one())
    }

    pub fn monomial(field: Field, exps: Vec<u32>, c: Scalar) -> Polynomial {
        let nvars = exps.len();
        let mut p = Polynomial::zero(field, nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&vec![0; self.nvars])
    }

    /// Coefficient of `t_a` (0-based) in the linear part.
    pub fn linear_coefficient(&self, a: usize) -> Scalar {
        let mut e = vec![0; self.nvars];
        e[a] = 1;
        self.coefficient(&e)
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| degree_of(m)).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| degree_of(m)).max()
    }

    /// `Some(r)` when every term has total degree `r`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        match (self.min_degree(), self.max_degree()) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-self.field.one())
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let mut out = Polynomial::zero(self.field, self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    /// Product, dropping terms of total degree above `max_degree`.
    pub fn mul_truncated(&self, o: &Polynomial, max_degree: Option<usize>) -> Polynomial {
        let mut out = Polynomial::zero(self.field, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                if max_degree.is_some_and(|n| degree_of(&m) > n) {
                    continue;
                }
                out.add_term(m, &(c1 * c2));
            }
        }
        out
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        self.mul_truncated(o, None)
    }

    pub fn truncate(&self, max_degree: usize) -> Polynomial {
        let mut out = self.clone();
        out.terms.retain(|m, _| degree_of(m) <= max_degree);
        out
    }

    /// Terms in canonical print order (graded lex, largest first).
    pub fn sorted_terms(&self) -> Vec<(&Vec<u32>, &Scalar)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| grlex_desc(a.0, b.0));
        t
    }

    pub fn convert(&self, field: Field) -> Result<Polynomial> {
        let mut out = Polynomial::zero(field, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.convert(field)?);
        }
        Ok(out)
    }

    /// Parses strings such as `3/2*t1^2*t2 - t3`. With one variable both
    /// `t` and `t1` are accepted.
    pub fn parse(s: &str, nvars: usize, field: Field) -> Result<Polynomial> {
        Parser {
            src: s,
            chars: s.char_indices().collect(),
            pos: 0,
            nvars,
            field,
        }
        .parse()
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    nvars: usize,
    field: Field,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in polynomial \"{}\"", self.offset(), self.src))
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |c| c.0)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.1.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.1.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().map(|c| c.1).collect())
    }

    fn parse(mut self) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.field, self.nvars);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return Err(self.err("empty polynomial")),
                None => break,
                Some('+') => {
                    self.pos += 1;
                    1
                }
                Some('-') => {
                    self.pos += 1;
                    -1
                }
                Some(_) if first => 1,
                Some(c) => return Err(self.err(&format!("unexpected '{c}'"))),
            };
            first = false;
            let (exps, c) = self.term()?;
            let c = if sign < 0 { -&c } else { c };
            out.add_term(exps, &c);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Vec<u32>, Scalar)> {
        let mut exps = vec![0u32; self.nvars];
        let mut coeff = self.field.one();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = self.digits().expect("digit present");
                    let mut text = num;
                    if self.peek() == Some('/') {
                        self.pos += 1;
                        self.skip_ws();
                        let den = self.digits().ok_or_else(|| self.err("expected denominator"))?;
                        text = format!("{text}/{den}");
                    }
                    let v = self.field.parse_scalar(&text).map_err(|e| self.err(&e.to_string()))?;
                    coeff = &coeff * &v;
                }
                Some('t') => {
                    self.pos += 1;
                    let idx = match self.digits() {
                        Some(d) => d.parse::<usize>().map_err(|_| self.err("bad variable index"))?,
                        None if self.nvars == 1 => 1,
                        None => return Err(self.err("bare 't' needs an index when there are several variables")),
                    };
                    if idx == 0 || idx > self.nvars {
                        return Err(self.err(&format!("variable t{idx} out of range (e = {})", self.nvars)));
                    }
                    let mut power = 1u32;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        self.skip_ws();
                        let d = self.digits().ok_or_else(|| self.err("expected exponent"))?;
                        power = d.parse().map_err(|_| self.err("exponent too large"))?;
                    }
                    exps[idx - 1] += power;
                }
                Some(c) => return Err(self.err(&format!("unexpected '{c}'"))),
                None => return Err(self.err("unexpected end of input")),
            }
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                return Ok((exps, coeff));
            }
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let single = self.nvars == 1;
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mono = if single {
                match m[0] {
                    0 => String::new(),
                    1 => "t".to_string(),
                    e => format!("t^{e}"),
                }
            } else if degree_of(m) == 0 {
                String::new()
            } else {
                render_monomial(m, "t", false)
            };
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => write!(f, "{abs}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{abs}*{mono}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let f = Field::Rationals;
        let p = Polynomial::parse("t1^2 - 2/3*t2", 2, f).unwrap();
        assert_eq!(p.terms().count(), 2);
        assert_eq!(p.coefficient(&[0, 1]), f.parse_scalar("-2/3").unwrap());
        assert_eq!(p.to_string(), "t1^2 - 2/3*t2");
        let q = Polynomial::parse("3/2*t1^2*t2 - t3", 3, f).unwrap();
        assert_eq!(q.to_string(), "3/2*t1^2*t2 - t3");
        let r = Polynomial::parse(" -t + 1 ", 1, f).unwrap();
        assert_eq!(r.to_string(), "-t + 1");
        assert_eq!(Polynomial::parse("t1*t1", 1, f).unwrap().to_string(), "t^2");
        assert_eq!(Polynomial::parse("0", 2, f).unwrap().to_string(), "0");
    }

    #[test]
    fn parse_errors() {
        let f = Field::Rationals;
        assert!(Polynomial::parse("t", 2, f).is_err());
        assert!(Polynomial::parse("t3", 2, f).is_err());
        assert!(Polynomial::parse("1 +", 1, f).is_err());
        assert!(Polynomial::parse("2 t", 1, f).is_err());
        assert!(Polynomial::parse("", 1, f).is_err());
    }

    #[test]
    fn arithmetic_and_degrees() {
        let f = Field::prime(7).unwrap();
        let t = Polynomial::var(f, 1, 0);
        let one = Polynomial::from_i64(f, 1, 1);
        let p = one.add(&t).mul(&one.sub(&t));
        assert_eq!(p.to_string(), "-t^2 + 1");
        assert_eq!(p.homogeneous_degree(), None);
        assert_eq!(p.truncate(1).to_string(), "1");
        assert_eq!(t.mul(&t).homogeneous_degree(), Some(2));
        assert_eq!(p.mul_truncated(&p, Some(2)).to_string(), "-2*t^2 + 1");
    }
}
