//! Exact field elements: rationals (with a machine-word fast path) and
//! prime fields `F_p` with `p < 2^31`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest admissible prime modulus (exclusive).
pub const MAX_PRIME: u64 = 1 << 31;

/// The base field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Prime(u32),
}

impl Field {
    /// Builds `F_p`, checking that `p` is a prime below `2^31`.
    pub fn prime(p: u64) -> Result<Field> {
        if p < 2 || p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::Prime(p as u32))
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(Rational::from_i64(v)),
            Field::Prime(p) => Scalar::Modular(ModP::new(v.rem_euclid(p as i64) as u32, p)),
        }
    }

    /// Maps the fraction `num/den` into this field.
    pub fn from_fraction(self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        self.from_i64(num).div_checked(&self.from_i64(den))
    }

    /// Parses a decimal `a` or `a/b` string.
    pub fn parse_scalar(self, s: &str) -> Result<Scalar> {
        let r: BigRational = parse_big_rational(s)?;
        self.from_big_rational(&r)
    }

    pub fn from_big_rational(self, r: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rationals => Ok(Scalar::Rational(Rational::from_big(r.clone()))),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let n = r.numer().mod_floor(&pb).to_u32().unwrap();
                let d = r.denom().mod_floor(&pb).to_u32().unwrap();
                if d == 0 {
                    return Err(Error::InvalidField(format!(
                        "denominator of {r} vanishes modulo {p}"
                    )));
                }
                Ok(Scalar::Modular(ModP::new(n, p).mul(ModP::new(d, p).inv())))
            }
        }
    }

    pub fn tag(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        match s {
            "Q" | "QQ" | "rationals" | "rational" => Ok(Field::Rationals),
            _ => match s.strip_prefix("fp:") {
                Some(p) => {
                    let p: u64 = p
                        .parse()
                        .map_err(|_| Error::InvalidField(format!("bad prime in `{s}`")))?;
                    Field::prime(p)
                }
                None => Err(Error::InvalidField(format!("unknown field `{s}`"))),
            },
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn parse_big_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid scalar `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Element of `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModP {
    value: u32,
    modulus: u32,
}

impl ModP {
    #[inline]
    pub fn new(value: u32, modulus: u32) -> ModP {
        debug_assert!(value < modulus);
        ModP { value, modulus }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    #[inline]
    fn add(self, o: ModP) -> ModP {
        let s = self.value as u64 + o.value as u64;
        let m = self.modulus as u64;
        ModP::new(if s >= m { s - m } else { s } as u32, self.modulus)
    }

    #[inline]
    fn sub(self, o: ModP) -> ModP {
        let m = self.modulus as u64;
        let s = self.value as u64 + m - o.value as u64;
        ModP::new(if s >= m { s - m } else { s } as u32, self.modulus)
    }

    #[inline]
    fn mul(self, o: ModP) -> ModP {
        let s = (self.value as u64 * o.value as u64) % self.modulus as u64;
        ModP::new(s as u32, self.modulus)
    }

    #[inline]
    fn neg(self) -> ModP {
        if self.value == 0 {
            self
        } else {
            ModP::new(self.modulus - self.value, self.modulus)
        }
    }

    fn inv(self) -> ModP {
        assert!(self.value != 0, "inverse of zero in F_{}", self.modulus);
        let (mut a, mut m) = (self.value as i64, self.modulus as i64);
        let (mut x0, mut x1) = (0i64, 1i64);
        let m0 = m;
        while a > 1 {
            let q = a / m;
            (a, m) = (m, a % m);
            (x0, x1) = (x1 - q * x0, x0);
        }
        ModP::new(x1.rem_euclid(m0) as u32, self.modulus)
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    fn signed(self) -> i64 {
        let v = self.value as i64;
        if v > self.modulus as i64 / 2 {
            v - self.modulus as i64
        } else {
            v
        }
    }
}

/// A rational number in lowest terms with positive denominator.
///
/// Values whose numerator and denominator fit in an `i64` stay on the
/// machine-word path; anything larger is promoted to `BigRational` and
/// demoted again once it fits.
#[derive(Clone, Debug)]
pub enum Rational {
    Small(i64, i64),
    Big(BigRational),
}

impl Rational {
    pub fn from_i64(v: i64) -> Rational {
        Rational::Small(v, 1)
    }

    fn from_i128(n: i128, d: i128) -> Rational {
        debug_assert!(d != 0);
        let (mut n, mut d) = (n, d);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_i128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) if n != i64::MIN => Rational::Small(n, d),
            _ => Rational::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Rational {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rational::Small(n, d);
            }
        }
        Rational::Big(r)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rational::Small(n, _) => *n == 0,
            Rational::Big(r) => r.is_zero(),
        }
    }

    fn add(&self, o: &Rational) -> Rational {
        match (self, o) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(s) = a.checked_add(*c) {
                        if s != i64::MIN {
                            return Rational::Small(s, 1);
                        }
                    }
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                match a.checked_mul(d).zip(c.checked_mul(b)) {
                    Some((x, y)) => Rational::from_i128(x + y, b * d),
                    None => Rational::from_big(self.to_big() + o.to_big()),
                }
            }
            _ => Rational::from_big(self.to_big() + o.to_big()),
        }
    }

    fn mul(&self, o: &Rational) -> Rational {
        match (self, o) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(s) = a.checked_mul(*c) {
                        if s != i64::MIN {
                            return Rational::Small(s, 1);
                        }
                    }
                }
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * o.to_big()),
        }
    }

    fn neg(&self) -> Rational {
        match self {
            Rational::Small(n, d) => Rational::Small(-n, *d),
            Rational::Big(r) => Rational::from_big(-r),
        }
    }

    fn inv(&self) -> Rational {
        assert!(!self.is_zero(), "inverse of zero rational");
        match self {
            Rational::Small(n, d) => Rational::from_i128(*d as i128, *n as i128),
            Rational::Big(r) => Rational::from_big(r.recip()),
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, o: &Rational) -> bool {
        match (self, o) {
            (Rational::Small(a, b), Rational::Small(c, d)) => a == c && b == d,
            _ => self.to_big() == o.to_big(),
        }
    }
}

impl Eq for Rational {}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Rational::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

fn gcd_i128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// An exact scalar tagged with its field.
///
/// Arithmetic between scalars of different fields is a logic error and
/// panics; public entry points that accept user data check field
/// agreement first and report [`Error::FieldMismatch`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(Rational),
    Modular(ModP),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Modular(m) => Field::Prime(m.modulus),
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular(m) => m.value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field().one()
    }

    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.inv()),
            Scalar::Modular(m) => Scalar::Modular(m.inv()),
        }
    }

    pub fn div_checked(&self, o: &Scalar) -> Result<Scalar> {
        if self.field() != o.field() {
            return Err(Error::FieldMismatch(self.field(), o.field()));
        }
        if o.is_zero() {
            return Err(Error::Parse("division by zero".into()));
        }
        Ok(self * &o.inv())
    }

    /// Is this scalar "negative" for display purposes? Prime-field values
    /// use the symmetric representative.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(Rational::Small(n, _)) => *n < 0,
            Scalar::Rational(Rational::Big(r)) => r.is_negative(),
            Scalar::Modular(m) => m.signed() < 0,
        }
    }

    /// Converts into another field (rationals reduce modulo `p`).
    pub fn convert(&self, target: Field) -> Result<Scalar> {
        match (self, target) {
            (s, t) if s.field() == t => Ok(s.clone()),
            (Scalar::Rational(r), t) => t.from_big_rational(&r.to_big()),
            (Scalar::Modular(m), Field::Rationals) => Ok(Field::Rationals.from_i64(m.signed())),
            (Scalar::Modular(m), t) => Ok(t.from_i64(m.signed())),
        }
    }

    /// Total order used only for deterministic tie-breaking.
    pub fn canonical_cmp(&self, o: &Scalar) -> Ordering {
        self.to_string().cmp(&o.to_string())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Modular(m) => write!(f, "{}", m.signed()),
        }
    }
}

macro_rules! mismatch {
    ($a:expr, $b:expr) => {
        panic!("field mismatch in scalar arithmetic: {} vs {}", $a.field(), $b.field())
    };
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    #[inline]
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Modular(a), Scalar::Modular(b)) if a.modulus == b.modulus => {
                Scalar::Modular(a.add(*b))
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.add(b)),
            _ => mismatch!(self, o),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    #[inline]
    fn sub(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Modular(a), Scalar::Modular(b)) if a.modulus == b.modulus => {
                Scalar::Modular(a.sub(*b))
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.add(&b.neg())),
            _ => mismatch!(self, o),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    #[inline]
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Modular(a), Scalar::Modular(b)) if a.modulus == b.modulus => {
                Scalar::Modular(a.mul(*b))
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.mul(b)),
            _ => mismatch!(self, o),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.inv()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    #[inline]
    fn neg(self) -> Scalar {
        match self {
            Scalar::Modular(a) => Scalar::Modular(a.neg()),
            Scalar::Rational(a) => Scalar::Rational(a.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

/// `acc += a * b`, the inner loop of every elimination.
#[inline]
pub fn fused_add_mul(acc: &mut Scalar, a: &Scalar, b: &Scalar) {
    match (&mut *acc, a, b) {
        (Scalar::Modular(x), Scalar::Modular(y), Scalar::Modular(z)) => {
            let m = x.modulus as u64;
            let v = (x.value as u64 + (y.value as u64 * z.value as u64) % m) % m;
            x.value = v as u32;
        }
        _ => *acc = &*acc + &(a * b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_reduced() {
        let q = Field::Rationals;
        let a = q.parse_scalar("6/4").unwrap();
        assert_eq!(a.to_string(), "3/2");
        let b = q.parse_scalar("-2/-4").unwrap();
        assert_eq!(b.to_string(), "1/2");
        assert_eq!((&a + &b).to_string(), "2");
        assert_eq!((&a * &b).to_string(), "3/4");
        assert!((&a - &a).is_zero());
        assert_eq!(q.parse_scalar("3/-6").unwrap().to_string(), "-1/2");
    }

    #[test]
    fn rational_overflow_promotes_and_demotes() {
        let q = Field::Rationals;
        let big = q.from_i64(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq, Scalar::Rational(Rational::Big(_))));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back, Scalar::Rational(Rational::Small(..))));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        let a = f.from_i64(3);
        assert_eq!((&a * &a.inv()), f.one());
        assert_eq!(f.from_i64(-1).to_string(), "-1");
        assert_eq!(f.parse_scalar("1/2").unwrap(), f.from_i64(4));
        assert!(f.parse_scalar("1/7").is_err());
        assert!(Field::prime(8).is_err());
        assert!(Field::prime(1 << 31).is_err());
    }

    #[test]
    fn field_tags_parse() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rationals);
        assert_eq!("fp:101".parse::<Field>().unwrap(), Field::Prime(101));
        assert!("fp:100".parse::<Field>().is_err());
        assert_eq!(Field::Prime(101).to_string(), "fp:101");
    }

    #[test]
    #[should_panic]
    fn mixing_fields_panics() {
        let _ = &Field::Rationals.one() + &Field::Prime(5).one();
    }
}
