//! Exact arithmetic in multi-quadratic number fields.
//!
//! A [`Surd`] is a finite sum `Σ c_d √d` with rational coefficients `c_d` and
//! distinct square-free radicands `d`. Square roots of distinct square-free
//! integers are linearly independent over ℚ, so this representation is
//! canonical: two surds are equal iff their term maps are equal.
//!
//! The set is closed under `+ − × ÷`. Division uses repeated conjugation
//! (`u + v√p ↦ u − v√p`) to rationalise the denominator one prime at a
//! time, and the sign of an element is decided exactly by the same
//! recursion, so comparisons never depend on floating point.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Square-free radicand. `1` stands for the rational part.
pub type Radicand = u128;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Surd {
    terms: BTreeMap<Radicand, BigRational>,
}

/// Splits a positive integer into `(s, d)` with `n = s² · d` and `d`
/// square-free, by trial division.
///
/// Inputs arising from Wigner symbols only carry small prime factors, so the
/// loop terminates after a handful of divisions.
pub fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    assert!(!n.is_zero(), "square_free_split of zero");
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut p = 2u64;
    loop {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            square *= pb.pow(e / 2);
            if e % 2 == 1 {
                free *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    free *= rest;
    (square, free)
}

fn prime_factors(mut n: Radicand) -> Vec<Radicand> {
    let mut out = Vec::new();
    let mut p: Radicand = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd(a: Radicand, b: Radicand) -> Radicand {
    a.gcd(&b)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // to_f64 gives up on huge numerators/denominators; fall back to
        // scaling by bit lengths.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn one() -> Self {
        Surd::from_rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Surd::from_rational(rat(n))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Surd { terms }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Surd::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `c·√d` for a square-free `d`.
    pub fn term(c: BigRational, d: Radicand) -> Self {
        debug_assert!(d >= 1);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(d, c);
        }
        Surd { terms }
    }

    /// Principal square root of a non-negative rational.
    pub fn sqrt_of(q: &BigRational) -> Self {
        assert!(!q.is_negative(), "square root of a negative rational");
        if q.is_zero() {
            return Surd::zero();
        }
        // √(a/b) = √(ab)/b
        let ab = (q.numer() * q.denom()).to_biguint().expect("positive");
        let (s, d) = square_free_split(&ab);
        let d: Radicand = d
            .to_u128()
            .expect("square-free radicand exceeds the supported basis range");
        let coeff = BigRational::new(BigInt::from_biguint(Sign::Plus, s), q.denom().clone());
        Surd::term(coeff, d)
    }

    pub fn sqrt_int(n: u64) -> Self {
        Surd::sqrt_of(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value, if the element has no irrational part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    /// `(c, d)` if the element is a single term `c·√d`.
    pub fn as_single_term(&self) -> Option<(BigRational, Radicand)> {
        match self.terms.len() {
            0 => Some((BigRational::zero(), 1)),
            1 => self.terms.iter().next().map(|(d, c)| (c.clone(), *d)),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Radicand, &BigRational)> {
        self.terms.iter().map(|(d, c)| (*d, c))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .fold(0.0, |acc, (d, c)| acc + rational_to_f64(c) * (*d as f64).sqrt())
    }

    fn add_term(&mut self, d: Radicand, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(d).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn scale(&self, k: &BigRational) -> Surd {
        if k.is_zero() {
            return Surd::zero();
        }
        Surd {
            terms: self.terms.iter().map(|(d, c)| (*d, c * k)).collect(),
        }
    }

    fn largest_prime(&self) -> Option<Radicand> {
        self.terms
            .keys()
            .filter(|d| **d > 1)
            .flat_map(|d| prime_factors(*d))
            .max()
    }

    /// Writes `self = u + v·√p` where neither `u` nor `v` involves `p`.
    fn split(&self, p: Radicand) -> (Surd, Surd) {
        let mut u = Surd::zero();
        let mut v = Surd::zero();
        for (d, c) in &self.terms {
            if d % p == 0 {
                v.terms.insert(d / p, c.clone());
            } else {
                u.terms.insert(*d, c.clone());
            }
        }
        (u, v)
    }

    /// Exact sign: −1, 0 or +1.
    pub fn signum(&self) -> i32 {
        if self.terms.is_empty() {
            return 0;
        }
        let Some(p) = self.largest_prime() else {
            let q = &self.terms[&1];
            return if q.is_positive() { 1 } else { -1 };
        };
        let (u, v) = self.split(p);
        let su = u.signum();
        let sv = v.signum();
        if sv == 0 {
            return su;
        }
        if su == 0 || su == sv {
            return sv;
        }
        // u and v√p have opposite signs: compare u² with p·v².
        let t = &(&u * &u) - &(&(&v * &v) * &Surd::from_rational(BigRational::from_integer(p.into())));
        su * t.signum()
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Surd {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Surd> {
        if self.is_zero() {
            return None;
        }
        let Some(p) = self.largest_prime() else {
            return Some(Surd::from_rational(self.terms[&1].recip()));
        };
        let (u, v) = self.split(p);
        let pr = Surd::from_rational(BigRational::from_integer(p.into()));
        let norm = &(&u * &u) - &(&(&v * &v) * &pr);
        let conj = &u - &(&v * &Surd::term(BigRational::one(), p));
        let inv_norm = norm.inverse()?;
        Some(&conj * &inv_norm)
    }

    pub fn checked_div(&self, rhs: &Surd) -> Option<Surd> {
        rhs.inverse().map(|inv| self * &inv)
    }

    pub fn square(&self) -> Surd {
        self * self
    }
}

impl From<i64> for Surd {
    fn from(n: i64) -> Self {
        Surd::from_integer(n)
    }
}

impl From<BigRational> for Surd {
    fn from(q: BigRational) -> Self {
        Surd::from_rational(q)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect(),
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (d, c) in &rhs.terms {
            out.add_term(*d, c.clone());
        }
        out
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (d, c) in &rhs.terms {
            out.add_term(*d, -c);
        }
        out
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                // √a·√b = g·√((a/g)(b/g)) for square-free a, b with g = gcd(a, b)
                let g = gcd(*a, *b);
                let d = (a / g).checked_mul(b / g).expect("square-free radicand overflow");
                let c = ca * cb * BigRational::from_integer(BigInt::from(g));
                out.add_term(d, c);
            }
        }
        out
    }
}

impl Div for &Surd {
    type Output = Surd;
    fn div(self, rhs: &Surd) -> Surd {
        self.checked_div(rhs).expect("division by zero surd")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Surd {
            type Output = Surd;
            fn $method(self, rhs: Surd) -> Surd {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Surd> for Surd {
            type Output = Surd;
            fn $method(self, rhs: &Surd) -> Surd {
                (&self).$method(rhs)
            }
        }
        impl $tr<Surd> for &Surd {
            type Output = Surd;
            fn $method(self, rhs: Surd) -> Surd {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Surd> for Surd {
    fn add_assign(&mut self, rhs: &Surd) {
        for (d, c) in &rhs.terms {
            self.add_term(*d, c.clone());
        }
    }
}

impl SubAssign<&Surd> for Surd {
    fn sub_assign(&mut self, rhs: &Surd) {
        for (d, c) in &rhs.terms {
            self.add_term(*d, -c);
        }
    }
}

impl std::iter::Sum for Surd {
    fn sum<I: Iterator<Item = Surd>>(iter: I) -> Surd {
        let mut acc = Surd::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Surd {
    /// Renders as e.g. `1 - 3/5*sqrt(3) + sqrt(15)`; parseable by `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            let body = match (*d, mag.is_one()) {
                (1, _) => fmt_rational(&mag),
                (d, true) => format!("sqrt({d})"),
                (d, false) => format!("{}*sqrt({d})", fmt_rational(&mag)),
            };
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Recursive-descent parser for the textual form. Accepts sums of products of
/// non-negative integers, `p/q` fractions and `sqrt(expr)` with a rational
/// argument, e.g. `-3*sqrt(3)/5 + 1`, `10/3*sqrt(1/7)`, `1/sqrt(5)`.
struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!(
            "{msg} at offset {} in {:?}",
            self.pos,
            String::from_utf8_lossy(self.s)
        )))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Surd> {
        let mut acc = Surd::zero();
        let mut first = true;
        loop {
            let negative = if self.eat(b'-') {
                true
            } else if self.eat(b'+') || first {
                false
            } else {
                break;
            };
            first = false;
            let t = self.term()?;
            if negative {
                acc -= &t;
            } else {
                acc += &t;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Surd> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else if self.eat(b'/') {
                let d = self.factor()?;
                match acc.checked_div(&d) {
                    Some(q) => acc = q,
                    None => return self.err("division by zero"),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Surd> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                let n: BigInt = digits.parse().expect("digits");
                Ok(Surd::from_rational(BigRational::from_integer(n)))
            }
            Some(b's') => {
                if !self.s[self.pos..].starts_with(b"sqrt") {
                    return self.err("unknown identifier");
                }
                self.pos += 4;
                if !self.eat(b'(') {
                    return self.err("expected '(' after sqrt");
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                match arg.as_rational() {
                    Some(q) if !q.is_negative() => Ok(Surd::sqrt_of(&q)),
                    _ => self.err("sqrt argument must be a non-negative rational"),
                }
            }
            _ => self.err("unexpected input"),
        }
    }
}

impl FromStr for Surd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return p.err("trailing input");
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> Surd {
        x.parse().unwrap()
    }

    #[test]
    fn square_free() {
        let (a, b) = square_free_split(&BigUint::from(72u32));
        assert_eq!((a, b), (BigUint::from(6u32), BigUint::from(2u32)));
        let (a, b) = square_free_split(&BigUint::from(1u32));
        assert_eq!((a, b), (BigUint::one(), BigUint::one()));
    }

    #[test]
    fn sqrt_products_collapse() {
        let r = &Surd::sqrt_int(3) * &Surd::sqrt_int(15);
        assert_eq!(r, s("3*sqrt(5)"));
        assert_eq!(Surd::sqrt_int(12), s("2*sqrt(3)"));
        assert_eq!(s("sqrt(3/5)"), s("sqrt(15)/5"));
    }

    #[test]
    fn signs_are_exact() {
        // 1 + √2 − √3 − √6/... tiny positive/negative values
        assert_eq!(s("sqrt(2) + sqrt(3) - sqrt(10)").signum(), -1);
        assert_eq!(s("sqrt(2) + sqrt(3) - sqrt(9)").signum(), 1);
        assert_eq!(s("7 - 4*sqrt(3)").signum(), 1);
        assert_eq!(s("2 - sqrt(4)").signum(), 0);
        assert_eq!(s("-1/4").signum(), -1);
    }

    #[test]
    fn inverse_rationalises() {
        let x = s("1 + sqrt(2) + sqrt(3)");
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, Surd::one());
        assert!(Surd::zero().inverse().is_none());
    }

    #[test]
    fn display_round_trip() {
        let x = s("-3*sqrt(3)/5 + 1 - sqrt(105)");
        assert_eq!(x.to_string(), "1 - 3/5*sqrt(3) - sqrt(105)");
        assert_eq!(s(&x.to_string()), x);
        assert_eq!(Surd::zero().to_string(), "0");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("sqrt(-1)".parse::<Surd>().is_err());
        assert!("1 +".parse::<Surd>().is_err());
        assert!("abc".parse::<Surd>().is_err());
        assert!("1/0".parse::<Surd>().is_err());
    }

    fn arb_surd() -> impl Strategy<Value = Surd> {
        prop::collection::vec(
            (-20i64..20, 1i64..6, prop::sample::select(vec![1u64, 2, 3, 5, 6, 7, 15])),
            0..4,
        )
        .prop_map(|ts| {
            ts.into_iter()
                .map(|(n, d, r)| &Surd::from_ratio(n, d) * &Surd::sqrt_int(r))
                .sum()
        })
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_surd(), b in arb_surd()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
            prop_assert_eq!(s(&a.to_string()), a.clone());
        }

        #[test]
        fn sign_agrees_with_float(a in arb_surd()) {
            let f = a.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(a.signum(), if f > 0.0 { 1 } else { -1 });
            }
            if a.is_zero() {
                prop_assert_eq!(a.signum(), 0);
            }
        }
    }
}
