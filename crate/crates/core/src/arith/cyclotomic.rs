//! Elements of cyclotomic fields Q(ζ_m), stored in the power basis modulo
//! the m-th cyclotomic polynomial Φ_m.
//!
//! Operands with different conductors are lifted to the lcm of the two
//! conductors before operating, using ζ_m = ζ_L^{L/m}. Reduction to the
//! smallest field containing an element only happens on request
//! ([`Cyclotomic::canonical`]) and before integrality tests.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

fn phi_cache() -> &'static Mutex<HashMap<usize, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (low to high) of the m-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: usize) -> Arc<Vec<i64>> {
    assert!(m >= 1, "conductor must be positive");
    if let Some(p) = phi_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    // Φ_m = (x^m - 1) / ∏_{d | m, d < m} Φ_d
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in divisors(m) {
        if d == m {
            continue;
        }
        let den = cyclotomic_polynomial(d);
        num = exact_div_monic(&num, &den);
    }
    let p = Arc::new(num);
    phi_cache().lock().unwrap().insert(m, p.clone());
    p
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

pub fn divisors(m: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    v.sort_unstable();
    v
}

pub fn euler_phi(m: usize) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

/// Reduces `p` in place modulo the monic integer polynomial `modulus`.
fn reduce_mod(mut p: Vec<Rational>, modulus: &[i64]) -> Vec<Rational> {
    let n = modulus.len() - 1;
    if p.len() > n {
        for i in (n..p.len()).rev() {
            if p[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut p[i], Rational::zero());
            for (j, mj) in modulus.iter().enumerate().take(n) {
                match *mj {
                    0 => {}
                    1 => p[i - n + j] -= &c,
                    -1 => p[i - n + j] += &c,
                    m => p[i - n + j] -= &c * Rational::from_integer(BigInt::from(m)),
                }
            }
        }
        p.truncate(n);
    }
    p.resize(n, Rational::zero());
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Quotient and remainder of polynomials over Q; `b` must be nonzero.
fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = b.last().unwrap().recip();
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        r = trim(r);
    }
    (q, r)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect()
}

/// An exact element Σ c_j ζ_m^j of Q(ζ_m), j < φ(m).
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    conductor: usize,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    /// Builds Σ coeffs[j] ζ_m^j, reducing modulo Φ_m (any length accepted).
    pub fn new(conductor: usize, coeffs: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(conductor);
        Self {
            conductor,
            coeffs: reduce_mod(coeffs, &phi),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self {
            conductor: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(super::int(n))
    }

    /// ζ_m^k for any integer k.
    pub fn root_of_unity(m: usize, k: i64) -> Self {
        let e = k.rem_euclid(m as i64) as usize;
        let mut c = vec![Rational::zero(); e + 1];
        c[e] = Rational::one();
        Self::new(m, c)
    }

    pub fn zeta(m: usize) -> Self {
        Self::root_of_unity(m, 1)
    }

    /// The imaginary unit ζ₄.
    pub fn i() -> Self {
        Self::zeta(4)
    }

    pub fn conductor(&self) -> usize {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Re-expresses the element in Q(ζ_target); `target` must be a multiple
    /// of the current conductor.
    pub fn lift_to(&self, target: usize) -> Self {
        assert!(
            target.is_multiple_of(self.conductor),
            "cannot lift conductor {} to {}",
            self.conductor,
            target
        );
        if target == self.conductor {
            return self.clone();
        }
        let step = target / self.conductor;
        let mut p = vec![Rational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            p[j * step] = c.clone();
        }
        Self::new(target, p)
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.conductor == other.conductor {
            return (self.clone(), other.clone());
        }
        let l = lcm(self.conductor, other.conductor);
        (self.lift_to(l), other.lift_to(l))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        if self.conductor == other.conductor {
            let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect();
            return Self {
                conductor: self.conductor,
                coeffs,
            };
        }
        let (a, b) = self.aligned(other);
        a.zip_with(&b, f)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational()
            .then(|| self.coeffs.first().cloned().unwrap_or_else(Rational::zero))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(r.recip()).lift_to(self.conductor));
        }
        // Extended Euclid: s·a ≡ g (mod Φ) with g a nonzero constant.
        let phi: Vec<Rational> = cyclotomic_polynomial(self.conductor)
            .iter()
            .map(|&c| Rational::from_integer(BigInt::from(c)))
            .collect();
        let (mut r0, mut r1) = (phi, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (Vec::<Rational>::new(), vec![Rational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // Φ is irreducible, so the last nonzero remainder is a constant.
        let g = r1[0].recip();
        let coeffs = s1.into_iter().map(|c| c * &g).collect();
        Ok(Self::new(self.conductor, coeffs))
    }

    /// The Galois automorphism ζ ↦ ζ^a (a coprime to the conductor).
    pub fn galois(&self, a: i64) -> Self {
        let m = self.conductor as i64;
        let mut p = vec![Rational::zero(); self.conductor];
        for (j, c) in self.coeffs.iter().enumerate() {
            let e = ((j as i64) * a).rem_euclid(m) as usize;
            p[e] += c;
        }
        Self::new(self.conductor, p)
    }

    /// Complex conjugation, ζ_m ↦ ζ_m^{m-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The same element expressed over the smallest cyclotomic field that
    /// contains it. Idempotent.
    pub fn canonical(&self) -> Self {
        if let Some(r) = self.as_rational() {
            return Self::from_rational(r);
        }
        for d in divisors(self.conductor) {
            if d == 1 || (d % 4 == 2) {
                continue;
            }
            if d == self.conductor {
                break;
            }
            if let Some(c) = self.coordinates_in(d) {
                return Self::new(d, c);
            }
        }
        self.clone()
    }

    /// Power-basis coordinates over Q(ζ_d) if the element lies there.
    fn coordinates_in(&self, d: usize) -> Option<Vec<Rational>> {
        let n = euler_phi(d);
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|j| Self::root_of_unity(d, j as i64).lift_to(self.conductor).coeffs)
            .collect();
        solve_linear(&cols, &self.coeffs)
    }

    /// Numerical value under the embedding ζ_m ↦ exp(2πi/m).
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.conductor as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, c)| {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let a = std::f64::consts::TAU * j as f64 / m;
            (re + v * a.cos(), im + v * a.sin())
        })
    }

    /// Membership in Z[ζ_κ], the ring of integers of Q(ζ_κ).
    pub fn is_cyclotomic_integer(&self, kappa: usize) -> bool {
        if kappa == 0 {
            return false;
        }
        let c = self.canonical();
        if !kappa.is_multiple_of(c.conductor) {
            return false;
        }
        c.lift_to(kappa).coeffs.iter().all(super::is_integer)
    }
}

/// Gaussian elimination for `Σ x_j cols[j] = rhs`; `None` when inconsistent.
fn solve_linear(cols: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let rows = rhs.len();
    let n = cols.len();
    let mut a: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in c..=n {
                    let t = &f * &a[r][k];
                    a[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][n].clone();
    }
    Some(x)
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl From<Rational> for Cyclotomic {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for Cyclotomic {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        if self.is_zero() || rhs.is_zero() {
            return Cyclotomic::from_int(0);
        }
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.coeffs[1..].iter().all(|c| c.is_zero()) {
            return self.scale(&rhs.coeffs[0]);
        }
        if self.conductor == rhs.conductor {
            return Cyclotomic::new(self.conductor, poly_mul(&self.coeffs, &rhs.coeffs));
        }
        let (a, b) = self.aligned(rhs);
        Cyclotomic::new(a.conductor, poly_mul(&a.coeffs, &b.coeffs))
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl super::rational::Coeff for Cyclotomic {
    fn zero() -> Self {
        Self::from_int(0)
    }
    fn one() -> Self {
        Self::from_int(1)
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Result<Self> {
        self.inv()
    }
    fn from_rational(r: Rational) -> Self {
        Cyclotomic::from_rational(r)
    }
}

fn fmt_coeff_term(out: &mut String, c: &Rational, basis: &str) {
    let neg = c.is_negative();
    let a = c.abs();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if basis.is_empty() {
        out.push_str(&a.to_string());
    } else if a.is_one() {
        out.push_str(basis);
    } else if a.is_integer() {
        out.push_str(&format!("{a}{basis}"));
    } else {
        out.push_str(&format!("({a}){basis}"));
    }
}

impl fmt::Display for Cyclotomic {
    /// Canonical-field rendering: `i` for ζ₄, `ζm^j` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        let mut out = String::new();
        for (j, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let basis = match (c.conductor, j) {
                (_, 0) => String::new(),
                (4, 1) => "i".to_string(),
                (m, 1) => format!("ζ{m}"),
                (m, j) => format!("ζ{m}^{j}"),
            };
            fmt_coeff_term(&mut out, a, &basis);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Wire record: `{conductor, coeffs: ["p/q", ...]}` of the canonical form.
#[derive(Serialize, Deserialize)]
struct CyclotomicRecord {
    conductor: usize,
    coeffs: Vec<String>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c = self.canonical();
        CyclotomicRecord {
            conductor: c.conductor,
            coeffs: c.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = CyclotomicRecord::deserialize(d)?;
        if rec.conductor == 0 {
            return Err(serde::de::Error::custom("conductor must be positive"));
        }
        let coeffs = rec
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        if coeffs.len() != euler_phi(rec.conductor) {
            return Err(serde::de::Error::custom("coefficient count must equal φ(conductor)"));
        }
        Ok(Cyclotomic::new(rec.conductor, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn c(m: usize, v: &[i64]) -> Cyclotomic {
        Cyclotomic::new(m, v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(euler_phi(105), 48);
    }

    #[test]
    fn doubling_and_identity() {
        let i = Cyclotomic::i();
        assert_eq!(&i + &i, c(4, &[0, 2]));
        assert_eq!(&i + &Cyclotomic::from_int(0), i);
    }

    #[test]
    fn i_sqrt2_coordinates() {
        let z8 = Cyclotomic::zeta(8);
        let s = &z8 + &Cyclotomic::root_of_unity(8, 3);
        assert_eq!(s.coeffs(), &[int(0), int(1), int(0), int(1)]);
        let (re, im) = s.to_complex();
        assert!(re.abs() < 1e-12 && (im - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn field_examples() {
        let i = Cyclotomic::i();
        assert_eq!(&i * &i, Cyclotomic::from_int(-1));
        let one = Cyclotomic::from_int(1);
        let inv = (&one - &i).inv().unwrap();
        assert_eq!(inv, (&one + &i).scale(&rat(1, 2)));
        let s = &Cyclotomic::zeta(8) + &Cyclotomic::root_of_unity(8, 3);
        assert_eq!(s.conj(), -&s);
        assert_eq!(Cyclotomic::from_int(0).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_conductors_lift_to_lcm() {
        let a = Cyclotomic::zeta(3);
        let b = Cyclotomic::i();
        let p = &a * &b;
        assert_eq!(p.conductor(), 12);
        assert_eq!(p, Cyclotomic::root_of_unity(12, 7));
    }

    #[test]
    fn canonicalization() {
        // ζ₆ lies in Q(ζ₃): ζ₆ = -ζ₃²
        let z6 = Cyclotomic::zeta(6).canonical();
        assert_eq!(z6.conductor(), 3);
        assert_eq!(z6, -Cyclotomic::root_of_unity(3, 2));
        let i = Cyclotomic::i().lift_to(24).canonical();
        assert_eq!(i.conductor(), 4);
        assert_eq!(i.canonical().conductor(), 4);
        let two = Cyclotomic::from_int(2).lift_to(8).canonical();
        assert_eq!(two.conductor(), 1);
        // √2 = ζ₈ + ζ₈⁷ needs conductor 8
        let r2 = (&Cyclotomic::zeta(8) + &Cyclotomic::root_of_unity(8, 7)).canonical();
        assert_eq!(r2.conductor(), 8);
    }

    #[test]
    fn integrality_examples() {
        let m2i = Cyclotomic::i().scale(&int(-2));
        assert!(m2i.is_cyclotomic_integer(4));
        assert!(!m2i.is_cyclotomic_integer(2));
        let s = &Cyclotomic::zeta(8) + &Cyclotomic::root_of_unity(8, 3);
        assert!(s.is_cyclotomic_integer(8));
        assert!(!s.is_cyclotomic_integer(4));
        assert!(!Cyclotomic::from_rational(rat(1, 2)).is_cyclotomic_integer(2));
        // (1 + ζ₃)/... : ζ₆ is an integer of Q(ζ₃) = Q(ζ₆)
        assert!(Cyclotomic::zeta(6).is_cyclotomic_integer(3));
        assert!(Cyclotomic::zeta(3).is_cyclotomic_integer(6));
    }

    #[test]
    fn serde_record() {
        let v = Cyclotomic::i().scale(&int(-2)).lift_to(8);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"conductor":4,"coeffs":["0/1","-2/1"]}"#);
        let back: Cyclotomic = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<Cyclotomic>(r#"{"conductor":4,"coeffs":["1/1"]}"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Cyclotomic::i().scale(&int(-2)).to_string(), "-2i");
        assert_eq!((&Cyclotomic::i() + &Cyclotomic::from_int(1)).to_string(), "1 + i");
        let s = &Cyclotomic::zeta(8) + &Cyclotomic::root_of_unity(8, 3);
        assert_eq!(s.to_string(), "ζ8 + ζ8^3");
        assert_eq!(Cyclotomic::from_rational(rat(-1, 8)).to_string(), "-1/8");
    }
}
