use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::arith::{Coeff, Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

use super::ring::{GradedRing, Monomial};

/// A sparse element of a [`GradedRing`]; zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Arc<GradedRing>,
    terms: BTreeMap<Monomial, Cyclotomic>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        GradedRing::same(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl RingElement {
    pub fn zero(ring: &Arc<GradedRing>) -> Self {
        Self { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<GradedRing>) -> Self {
        Self::constant(ring, Cyclotomic::from_int(1))
    }

    pub fn constant(ring: &Arc<GradedRing>, c: impl Into<Cyclotomic>) -> Self {
        Self::monomial(ring, Monomial::one(ring.nvars()), c.into())
    }

    /// `c·m`, or zero if `m` is not admissible.
    pub fn monomial(ring: &Arc<GradedRing>, m: Monomial, c: Cyclotomic) -> Self {
        let mut terms = BTreeMap::new();
        if ring.is_admissible(&m) && !c.is_zero() {
            terms.insert(m, c);
        }
        Self { ring: ring.clone(), terms }
    }

    pub fn var(ring: &Arc<GradedRing>, name: &str) -> Result<Self> {
        let i = ring.var_index(name)?;
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Ok(Self::monomial(ring, Monomial(e), Cyclotomic::from_int(1)))
    }

    /// Parses an element in the expression syntax of [`super::parse`].
    pub fn parse(ring: &Arc<GradedRing>, text: &str) -> Result<Self> {
        super::parse::parse_element(ring, text)
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Cyclotomic> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Cyclotomic {
        self.terms.get(m).cloned().unwrap_or_else(|| Cyclotomic::from_int(0))
    }

    pub fn constant_term(&self) -> Cyclotomic {
        self.coefficient(&Monomial::one(self.ring.nvars()))
    }

    /// Degree-k component.
    pub fn homogeneous(&self, k: u32) -> Self {
        self.filter(|m| self.ring.degree(m) == k)
    }

    pub fn without_constant(&self) -> Self {
        self.filter(|m| !m.is_one())
    }

    fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| keep(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self { ring: self.ring.clone(), terms }
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|m| self.ring.degree(m)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Degree if the element is homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if GradedRing::same(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    fn add_term(&mut self, m: Monomial, c: &Cyclotomic) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c.clone());
                }
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Cyclotomic::from_int(-1))
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        Self { ring: self.ring.clone(), terms }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&Cyclotomic::from_rational(r.clone()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, negative)) = self.ring.mul_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, &if negative { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..n {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Integer power; negative exponents go through [`Self::inverse`].
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow(n as u32))
        } else {
            Ok(self.inverse()?.pow(n.unsigned_abs() as u32))
        }
    }

    /// Inverse by splitting off the constant term: the rest is nilpotent, so
    /// the geometric series terminates.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotInvertible("constant term is zero".into()));
        }
        let c0_inv = c0.inv()?;
        let x = self.without_constant().scale(&(-&c0_inv));
        let mut acc = Self::one(&self.ring);
        let mut p = Self::one(&self.ring);
        loop {
            p = p.mul(&x)?;
            if p.is_zero() {
                break;
            }
            acc = acc.add(&p)?;
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Σ f_k x^k for x with no constant term and only even-degree parts.
    pub fn apply_series<C>(&self, f: &TruncatedSeries<C>) -> Result<Self>
    where
        C: Coeff,
        Cyclotomic: From<C>,
    {
        if f.valuation().is_some_and(|v| v < 0) {
            return Err(Error::BadSubstitution("series has a principal part".into()));
        }
        if !self.constant_term().is_zero() {
            return Err(Error::BadSubstitution("argument has a nonzero constant term".into()));
        }
        if self.degrees().iter().any(|d| d % 2 == 1) {
            return Err(Error::BadSubstitution("argument has odd degree".into()));
        }
        let mut acc = Self::zero(&self.ring);
        let mut p = Self::one(&self.ring);
        let mut k = 0i64;
        while !p.is_zero() {
            let c = f.coefficient(k).map_err(|_| Error::SeriesTooShort {
                order: f.order().unwrap_or(k),
                needed: k,
            })?;
            acc = acc.add(&p.scale(&Cyclotomic::from(c)))?;
            p = p.mul(self)?;
            k += 1;
        }
        Ok(acc)
    }

    /// exp(x) for nilpotent even x (no constant term).
    pub fn exp(&self) -> Result<Self> {
        let n = self.nilpotency_bound();
        self.apply_series(&crate::series::exp_series::<Rational>(n))
    }

    /// An upper bound on k with x^k ≠ 0 for x without constant term.
    pub fn nilpotency_bound(&self) -> i64 {
        let min_deg = self.degrees().into_iter().filter(|&d| d > 0).min().unwrap_or(1);
        (self.ring.degree_cap() / min_deg) as i64
    }

    /// The integration functional applied to the top-degree part.
    pub fn integrate(&self) -> Result<Cyclotomic> {
        let functional = self.ring.integration().ok_or(Error::NoIntegration)?;
        let mut acc = Cyclotomic::from_int(0);
        for (m, w) in functional {
            if let Some(c) = self.terms.get(m) {
                acc = &acc + &(c * w);
            }
        }
        Ok(acc)
    }

    /// Integration along the fiber, landing in the base ring. Each monomial
    /// is reordered as (fiber part)·(base part) before the fiber functional
    /// reads its fiber part.
    pub fn fiber_integrate(&self) -> Result<Self> {
        let split = self.ring.split().ok_or(Error::NoFiberSplit)?;
        let vars = self.ring.variables();
        let mut out = Self::zero(&split.base);
        for (m, c) in &self.terms {
            let fiber: Vec<u32> = split.fiber_vars.iter().map(|&i| m.0[i]).collect();
            let Some(w) = split.functional.get(&fiber) else { continue };
            // odd fiber factors moved left past odd base factors before them
            let mut swaps = 0u32;
            let mut odd_base_seen = 0u32;
            for (i, v) in vars.iter().enumerate() {
                if !v.is_odd() || m.0[i] == 0 {
                    continue;
                }
                if split.fiber_vars.contains(&i) {
                    swaps += odd_base_seen;
                } else {
                    odd_base_seen += 1;
                }
            }
            let base: Vec<u32> = split.base_vars.iter().map(|&i| m.0[i]).collect();
            let mut v = c * w;
            if swaps % 2 == 1 {
                v = -v;
            }
            out.add_term(Monomial(base), &v);
        }
        Ok(out)
    }

    /// Pulls a class of the base ring back to `total` along its split.
    pub fn lift_from_base(&self, total: &Arc<GradedRing>) -> Result<Self> {
        let split = total.split().ok_or(Error::NoFiberSplit)?;
        if !GradedRing::same(&split.base, &self.ring) {
            return Err(Error::RingMismatch);
        }
        let mut out = Self::zero(total);
        for (m, c) in &self.terms {
            let mut e = vec![0; total.nvars()];
            for (j, &i) in split.base_vars.iter().enumerate() {
                e[i] = m.0[j];
            }
            let m = Monomial(e);
            if total.is_admissible(&m) {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Reinterprets the element in a ring with the same algebra.
    pub fn in_ring(&self, ring: &Arc<GradedRing>) -> Result<Self> {
        if !self.ring.same_algebra(ring) {
            return Err(Error::RingMismatch);
        }
        Ok(Self { ring: ring.clone(), terms: self.terms.clone() })
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&Cyclotomic) -> Cyclotomic) -> Self {
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map_coefficients(Cyclotomic::conj)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        format_monomial(&self.ring, m)
    }
}

pub fn format_monomial(ring: &GradedRing, m: &Monomial) -> String {
    let parts: Vec<String> = ring
        .variables()
        .iter()
        .zip(&m.0)
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.name.clone() } else { format!("{}^{}", v.name, e) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for RingElement {
    /// Terms by increasing degree: `1 - 1/24*a^2 + (1 + i)*x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<(&Monomial, &Cyclotomic)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| {
            self.ring.degree(a.0).cmp(&self.ring.degree(b.0)).then_with(|| b.0.cmp(a.0))
        });
        let mut out = String::new();
        for (m, c) in ordered {
            let (negative, body) = match c.as_rational() {
                Some(r) => {
                    let neg = r < Rational::from_integer(0.into());
                    let a = if neg { -r } else { r };
                    (neg, a.to_string())
                }
                None => (false, format!("({c})")),
            };
            let mono = format_monomial(&self.ring, m);
            let term = match (mono.as_str(), body.as_str()) {
                ("1", b) => b.to_string(),
                (mo, "1") => mo.to_string(),
                (mo, b) => format!("{b}*{mo}"),
            };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        f.write_str(&out)
    }
}
