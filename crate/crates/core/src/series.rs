//! Univariate truncated power and Laurent series with exact coefficients.
//!
//! A bounded series knows its coefficients up to an order `T`; everything
//! above `T` is unknown rather than zero, and every operation propagates the
//! tightest order it can guarantee. A series without an order is an exact
//! (Laurent) polynomial.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{int, rat, Coeff, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C: Coeff = Rational> {
    /// Degree of `coeffs[0]`.
    low: i64,
    coeffs: Vec<C>,
    /// Highest known degree; `None` for exact polynomials.
    order: Option<i64>,
}

fn min_order(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coeff> TruncatedSeries<C> {
    /// Coefficients `coeffs[k]` of z^{low+k}. With `order = Some(T)` the
    /// series is known through degree T: longer input is cut, shorter input
    /// is padded with (known) zeros.
    pub fn new(low: i64, mut coeffs: Vec<C>, order: Option<i64>) -> Self {
        if let Some(t) = order {
            let len = (t - low + 1).max(0) as usize;
            coeffs.resize(len, C::zero());
        }
        let mut s = Self { low, coeffs, order };
        s.normalize();
        s
    }

    pub fn polynomial(coeffs: Vec<C>) -> Self {
        Self::new(0, coeffs, None)
    }

    pub fn zero() -> Self {
        Self::polynomial(Vec::new())
    }

    /// O(z^{order+1}): nothing known to be nonzero up to `order`.
    pub fn big_o(order: i64) -> Self {
        Self::new(order + 1, Vec::new(), Some(order))
    }

    pub fn constant(c: C) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn monomial(c: C, degree: i64) -> Self {
        Self::new(degree, vec![c], None)
    }

    /// The exact series z.
    pub fn var() -> Self {
        Self::monomial(C::one(), 1)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.order.is_none() {
            while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                self.coeffs.pop();
            }
            if self.coeffs.is_empty() {
                self.low = 0;
            }
        }
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.low)
    }

    /// Lowest degree at which the series may be nonzero: the valuation, or
    /// T + 1 when every known coefficient vanishes.
    fn effective_valuation(&self) -> Option<i64> {
        self.valuation().or(self.order.map(|t| t + 1))
    }

    fn is_exact_zero(&self) -> bool {
        self.order.is_none() && self.coeffs.is_empty()
    }

    /// Highest stored degree (for exact polynomials, the degree).
    fn top(&self) -> i64 {
        self.order.unwrap_or(self.low + self.coeffs.len() as i64 - 1)
    }

    fn coeff_unchecked(&self, q: i64) -> C {
        if q < self.low {
            return C::zero();
        }
        self.coeffs.get((q - self.low) as usize).cloned().unwrap_or_else(C::zero)
    }

    /// Exact coefficient of z^q.
    pub fn coefficient(&self, q: i64) -> Result<C> {
        if let Some(t) = self.order {
            if q > t {
                return Err(Error::BeyondTruncation { degree: q, order: t });
            }
        }
        Ok(self.coeff_unchecked(q))
    }

    /// Known coefficients from degree `from` through the order (or degree).
    pub fn coefficients_from(&self, from: i64) -> Vec<C> {
        (from..=self.top()).map(|q| self.coeff_unchecked(q)).collect()
    }

    /// Restricts to a bounded series of order at most `t`.
    pub fn truncate(&self, t: i64) -> Self {
        let t = self.order.map_or(t, |o| o.min(t));
        let coeffs = (self.low..=t).map(|q| self.coeff_unchecked(q)).collect();
        Self::new(self.low.min(t + 1), coeffs, Some(t))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.sub_ref(b))
    }

    fn combine(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let order = min_order(self.order, other.order);
        let low = self.low.min(other.low);
        let top = match order {
            Some(t) => t,
            None => self.top().max(other.top()),
        };
        let coeffs = (low..=top)
            .map(|q| f(&self.coeff_unchecked(q), &other.coeff_unchecked(q)))
            .collect();
        Self::new(low, coeffs, order)
    }

    pub fn neg(&self) -> Self {
        self.scale(&C::one().neg_ref())
    }

    pub fn scale(&self, c: &C) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.mul_ref(c)).collect();
        Self::new(self.low, coeffs, self.order)
    }

    /// Multiplication by z^k.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.low + k, self.coeffs.clone(), self.order.map(|t| t + k))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let vf = self.effective_valuation().unwrap();
        let vg = other.effective_valuation().unwrap();
        let order = min_order(self.order.map(|t| t + vg), other.order.map(|t| t + vf));
        let low = vf + vg;
        let top = match order {
            Some(t) => t,
            None => self.top() + other.top(),
        };
        if top < low {
            return Self::new(low, Vec::new(), order);
        }
        let mut out = vec![C::zero(); (top - low + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let da = self.low + i as i64;
            for (j, b) in other.coeffs.iter().enumerate() {
                let d = da + other.low + j as i64;
                if d > top {
                    break;
                }
                if !b.is_zero() {
                    let k = (d - low) as usize;
                    out[k] = out[k].add_ref(&a.mul_ref(b));
                }
            }
        }
        Self::new(low, out, order)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(C::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// 1/f for a bounded series with a nonzero coefficient within its order.
    pub fn invert_multiplicative(&self) -> Result<Self> {
        let Some(t) = self.order else {
            if self.coeffs.len() == 1 {
                let c = self.coeffs[0].try_inv()?;
                return Ok(Self::monomial(c, -self.low));
            }
            return Err(Error::InvalidArgument(
                "inverse of a non-monomial polynomial needs a truncation order".into(),
            ));
        };
        self.inv_bounded(t)
    }

    /// 1/f computed to relative precision `t - valuation`.
    fn inv_bounded(&self, t: i64) -> Result<Self> {
        let v = self.valuation().ok_or(Error::NonInvertibleSeries)?;
        let c0_inv = self.coeffs[0].try_inv().map_err(|_| Error::NonInvertibleSeries)?;
        let precision = (t - v) as usize;
        let mut h: Vec<C> = Vec::with_capacity(precision + 1);
        h.push(c0_inv.clone());
        for n in 1..=precision {
            let mut acc = C::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                acc = acc.add_ref(&self.coeffs[k].mul_ref(&h[n - k]));
            }
            h.push(acc.mul_ref(&c0_inv).neg_ref());
        }
        Ok(Self::new(-v, h, Some(precision as i64 - v)))
    }

    /// 1/f for an exact polynomial, known through degree `t`.
    pub fn invert_to(&self, t: i64) -> Result<Self> {
        let v = self.valuation().ok_or(Error::NonInvertibleSeries)?;
        let f = if self.is_exact() { self.truncate(t + 2 * v) } else { self.clone() };
        let inv = f.invert_multiplicative()?;
        Ok(inv.truncate(t))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_exact() && other.coeffs.len() > 1 {
            return Err(Error::InvalidArgument(
                "division by a non-monomial polynomial needs a truncation order".into(),
            ));
        }
        Ok(self.mul(&other.invert_multiplicative()?))
    }

    /// f(g). `self` must have no principal part; `g` must have zero
    /// constant term unless `self` is an exact polynomial.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if self.low < 0 && !self.coeffs.is_empty() {
            return Err(Error::Composition("composing a Laurent series is not supported".into()));
        }
        if g.effective_valuation().is_some_and(|v| v < 0) {
            return Err(Error::Composition("inner series has a principal part".into()));
        }
        let g_const = !g.coeff_unchecked(0).is_zero();
        if g_const && !self.is_exact() {
            return Err(Error::Composition(
                "inner series must have zero constant term".into(),
            ));
        }
        // Horner from the top; an unknown tail enters as O(z^0).
        let mut acc = match self.order {
            Some(_) => Self::big_o(-1),
            None => Self::zero(),
        };
        let top = self.top();
        for k in (0..=top.max(-1)).rev() {
            acc = acc.mul(g).add(&Self::constant(self.coeff_unchecked(k)));
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<C> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul_ref(&C::from_i64(self.low + i as i64)))
            .collect();
        Self::new(self.low - 1, coeffs, self.order.map(|t| t - 1))
    }

    /// Antiderivative with zero constant term; requires no z^{-1} term.
    pub fn integral(&self) -> Result<Self> {
        if !self.coeff_unchecked(-1).is_zero() {
            return Err(Error::InvalidArgument("cannot integrate a z^-1 term".into()));
        }
        let coeffs: Vec<C> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d = self.low + i as i64 + 1;
                if d == 0 {
                    C::zero()
                } else {
                    c.mul_ref(&C::from_rational(rat(1, d)))
                }
            })
            .collect();
        Ok(Self::new(self.low + 1, coeffs, self.order.map(|t| t + 1)))
    }

    /// log f for f(0) = 1.
    pub fn log(&self) -> Result<Self> {
        if self.valuation() != Some(0) || !self.coeffs[0].is_one() {
            return Err(Error::InvalidArgument("log needs f(0) = 1".into()));
        }
        self.derivative().div_series(self)?.integral()
    }

    fn div_series(&self, other: &Self) -> Result<Self> {
        let inv = match other.order {
            Some(_) => other.invert_multiplicative()?,
            None => other.invert_to(self.top().max(0))?,
        };
        Ok(self.mul(&inv))
    }

    /// exp(g) for g(0) = 0.
    pub fn exp(&self) -> Result<Self> {
        let t = self.order.ok_or_else(|| {
            Error::InvalidArgument("exp of an exact polynomial needs a truncation order".into())
        })?;
        let e = exp_series::<C>(t.max(0));
        e.compose(self)
    }

    /// f(c·z).
    pub fn scale_variable(&self, c: &C) -> Self {
        let mut p = C::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut cur = self.low;
        let step = |p: &C| p.mul_ref(c);
        // c^low for low ≥ 0; negative degrees use the inverse
        if self.low >= 0 {
            for _ in 0..self.low {
                p = step(&p);
            }
        } else {
            let ci = c.try_inv().expect("scale_variable: zero scale on Laurent series");
            for _ in 0..(-self.low) {
                p = p.mul_ref(&ci);
            }
        }
        for x in &self.coeffs {
            coeffs.push(x.mul_ref(&p));
            p = step(&p);
            cur += 1;
        }
        let _ = cur;
        Self::new(self.low, coeffs, self.order)
    }

    /// True when every known odd-degree coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| (self.low + i as i64) % 2 == 0 || c.is_zero())
    }

    /// For even f, the series g with g(y) = f(√y).
    pub fn even_part_in_square(&self) -> Result<Self> {
        if !self.is_even() || self.low < 0 {
            return Err(Error::InvalidArgument("series is not an even power series".into()));
        }
        let top = self.top();
        let coeffs = (0..=top.div_euclid(2)).map(|k| self.coeff_unchecked(2 * k)).collect();
        Ok(Self::new(0, coeffs, self.order.map(|t| t.div_euclid(2))))
    }

    /// f(-z).
    pub fn reflect(&self) -> Self {
        self.scale_variable(&C::from_i64(-1))
    }
}

impl<C: Coeff> fmt::Display for TruncatedSeries<C> {
    /// `c_ℓ z^ℓ + … + c_T z^T + O(z^{T+1})`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = self.low + i as i64;
            let cs = c.to_string();
            let cs = if cs.contains(' ') { format!("({cs})") } else { cs };
            parts.push(match d {
                0 => cs,
                1 => format!("{cs} z"),
                _ => format!("{cs} z^{d}"),
            });
        }
        if let Some(t) = self.order {
            parts.push(format!("O(z^{})", t + 1));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

pub fn exp_series<C: Coeff>(order: i64) -> TruncatedSeries<C> {
    let mut coeffs = Vec::with_capacity(order as usize + 1);
    let mut fact = int(1);
    for k in 0..=order {
        if k > 0 {
            fact *= int(k);
        }
        coeffs.push(C::from_rational(fact.recip()));
    }
    TruncatedSeries::new(0, coeffs, Some(order))
}

fn sinh_cosh(order: i64, odd: bool) -> TruncatedSeries<Rational> {
    let e = exp_series::<Rational>(order);
    let coeffs = e
        .coefficients_from(0)
        .into_iter()
        .enumerate()
        .map(|(k, c)| if (k % 2 == 1) == odd { c } else { int(0) })
        .collect();
    TruncatedSeries::new(0, coeffs, Some(order))
}

/// (1+u)^a for rational a, through degree `order`.
pub fn binomial_series(a: &Rational, order: i64) -> TruncatedSeries<Rational> {
    let mut coeffs = Vec::with_capacity(order as usize + 1);
    let mut c = int(1);
    for k in 0..=order {
        coeffs.push(c.clone());
        c = c * (a - int(k)) / int(k + 1);
    }
    TruncatedSeries::new(0, coeffs, Some(order))
}

/// The series catalogue used by genera and identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedSeries {
    /// x / (1 - e^{-x})
    Todd,
    /// (x/2) / sinh(x/2)
    Ahat,
    /// x / tanh(x)
    Lgenus,
    Exp,
    Sinh,
    Cosh,
    /// cosh / sinh, principal part 1/z
    Coth,
    /// (1+u)^{-1/2}
    Binomial,
    /// (1+u)^{1/2}
    SqrtOnePlus,
}

impl NamedSeries {
    pub const ALL: [NamedSeries; 9] = [
        NamedSeries::Todd,
        NamedSeries::Ahat,
        NamedSeries::Lgenus,
        NamedSeries::Exp,
        NamedSeries::Sinh,
        NamedSeries::Cosh,
        NamedSeries::Coth,
        NamedSeries::Binomial,
        NamedSeries::SqrtOnePlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedSeries::Todd => "todd",
            NamedSeries::Ahat => "ahat",
            NamedSeries::Lgenus => "lgenus",
            NamedSeries::Exp => "exp",
            NamedSeries::Sinh => "sinh",
            NamedSeries::Cosh => "cosh",
            NamedSeries::Coth => "coth",
            NamedSeries::Binomial => "binomial",
            NamedSeries::SqrtOnePlus => "sqrt_one_plus",
        }
    }

    /// The series known through degree `order`.
    pub fn build(self, order: i64) -> TruncatedSeries<Rational> {
        assert!(order >= 0, "truncation order must be non-negative");
        let z = TruncatedSeries::<Rational>::var();
        let quotient = |num: TruncatedSeries<Rational>, den: TruncatedSeries<Rational>| {
            num.div(&den).expect("named series denominators are invertible")
        };
        match self {
            NamedSeries::Exp => exp_series(order),
            NamedSeries::Sinh => sinh_cosh(order, true),
            NamedSeries::Cosh => sinh_cosh(order, false),
            NamedSeries::Todd => {
                let one_minus = TruncatedSeries::constant(int(1))
                    .sub(&exp_series::<Rational>(order + 1).reflect());
                quotient(z, one_minus).truncate(order)
            }
            NamedSeries::Ahat => {
                let half = TruncatedSeries::monomial(rat(1, 2), 1);
                let s = sinh_cosh(order + 1, true).compose(&half).unwrap();
                quotient(half, s).truncate(order)
            }
            NamedSeries::Lgenus => {
                let num = z.mul(&sinh_cosh(order + 2, false));
                quotient(num, sinh_cosh(order + 2, true)).truncate(order)
            }
            NamedSeries::Coth => {
                quotient(sinh_cosh(order + 2, false), sinh_cosh(order + 2, true)).truncate(order)
            }
            NamedSeries::Binomial => binomial_series(&rat(-1, 2), order),
            NamedSeries::SqrtOnePlus => binomial_series(&rat(1, 2), order),
        }
    }
}

impl FromStr for NamedSeries {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "td" => "todd",
            "a_hat" | "â" => "ahat",
            "l" | "l_genus" => "lgenus",
            "sqrt" => "sqrt_one_plus",
            other => other,
        };
        NamedSeries::ALL
            .into_iter()
            .find(|n| n.name() == alias)
            .ok_or_else(|| Error::UnknownSeries(s.to_string()))
    }
}

pub fn named_series(name: &str, order: i64) -> Result<TruncatedSeries<Rational>> {
    if order < 0 {
        return Err(Error::InvalidArgument("truncation order must be non-negative".into()));
    }
    Ok(name.parse::<NamedSeries>()?.build(order))
}

/// a_0, ..., a_n with √(1+u²) = Σ a_n u^{2n}.
pub fn sqrt_taylor_coeffs(n: usize) -> Vec<Rational> {
    let u2 = TruncatedSeries::<Rational>::monomial(int(1), 2);
    let f = NamedSeries::SqrtOnePlus.build(n as i64).compose(&u2).unwrap();
    (0..=n).map(|k| f.coefficient(2 * k as i64).unwrap()).collect()
}
