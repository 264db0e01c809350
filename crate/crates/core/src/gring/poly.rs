//! Sparse multivariate polynomials over Q and an exact test for identities
//! between sums of rational functions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], &c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, &Rational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent arity");
            p.add_term(e, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn add_term(&mut self, e: Vec<u32>, c: &Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        Self { nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Self { nvars: self.nvars, terms: acc }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(self.nvars), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(e, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                e.iter().zip(point).fold(c, |t, (&k, x)| t * x.powi(k as i32))
            })
            .sum()
    }

    /// Coefficient of the leading (largest) monomial.
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    /// Scaled to leading coefficient 1, together with the scale removed.
    fn normalized(&self) -> (Self, Rational) {
        let lc = self.leading_coefficient().cloned().unwrap_or_else(Rational::one);
        (self.scale(&lc.recip()), lc)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("t{i}") } else { format!("t{i}^{k}") })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// N / (D_1 · D_2 ⋯), denominators kept as a list of factors.
#[derive(Clone, Debug)]
pub struct RationalTerm {
    pub numerator: MultiPoly,
    pub denominator: Vec<MultiPoly>,
}

impl RationalTerm {
    pub fn new(numerator: MultiPoly, denominator: Vec<MultiPoly>) -> Self {
        Self { numerator, denominator }
    }

    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        let mut d = Rational::one();
        for f in &self.denominator {
            d *= f.eval(point);
        }
        (!d.is_zero()).then(|| self.numerator.eval(point) / d)
    }
}

/// First monomial at which the cleared identity fails.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityWitness {
    pub exponents: Vec<u32>,
    /// Coefficient of Σ N_j·(L/D_j) − c·L at that monomial, L the common
    /// denominator.
    pub coefficient: Rational,
}

/// Σ_j N_j/D_j − constant, cleared by the product of the distinct
/// denominator factors (each to its largest multiplicity, factors compared
/// up to scalar multiples). Returns the first nonzero monomial, if any.
pub fn rational_identity_witness(terms: &[RationalTerm], constant: &Rational) -> Result<Option<IdentityWitness>> {
    let nvars = terms
        .iter()
        .map(|t| t.numerator.nvars())
        .next()
        .unwrap_or(0);
    // distinct normalized factors with their max multiplicity
    let mut distinct: Vec<(MultiPoly, u32)> = Vec::new();
    // per term: scalar and multiplicity of each distinct factor
    let mut per_term: Vec<(Rational, Vec<u32>)> = Vec::with_capacity(terms.len());
    for t in terms {
        let mut scalar = Rational::one();
        let mut mult = vec![0u32; distinct.len()];
        for f in &t.denominator {
            if f.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            let (g, lc) = f.normalized();
            scalar *= lc;
            match distinct.iter().position(|(d, _)| *d == g) {
                Some(k) => mult[k] += 1,
                None => {
                    distinct.push((g, 0));
                    mult.push(1);
                }
            }
        }
        for (k, &m) in mult.iter().enumerate() {
            distinct[k].1 = distinct[k].1.max(m);
        }
        per_term.push((scalar, mult));
    }
    let cofactor = |mult: &[u32]| -> MultiPoly {
        distinct
            .iter()
            .enumerate()
            .fold(MultiPoly::one(nvars), |acc, (k, (f, e))| {
                acc.mul(&f.pow(e - mult.get(k).copied().unwrap_or(0)))
            })
    };
    let mut lhs = MultiPoly::zero(nvars);
    for (t, (scalar, mult)) in terms.iter().zip(&per_term) {
        let c = cofactor(mult);
        lhs = lhs.add(&t.numerator.mul(&c).scale(&scalar.recip()));
    }
    let common = cofactor(&[]);
    let diff = lhs.sub(&common.scale(constant));
    Ok(diff.terms().iter().next().map(|(e, c)| IdentityWitness {
        exponents: e.clone(),
        coefficient: c.clone(),
    }))
}

/// Decides Σ_j N_j/D_j = constant exactly.
pub fn rational_identity_check(terms: &[RationalTerm], constant: &Rational) -> Result<bool> {
    Ok(rational_identity_witness(terms, constant)?.is_none())
}

/// The n-th coth sum after t_k = e^{2u_k}:
/// Σ_j ∏_{k≠j} (t_k + t_j)/(t_k − t_j).
pub fn coth_sum_terms(n: usize) -> Vec<RationalTerm> {
    let nv = n + 1;
    (0..nv)
        .map(|j| {
            let mut num = MultiPoly::one(nv);
            let mut den = Vec::with_capacity(n);
            for k in (0..nv).filter(|&k| k != j) {
                let tk = MultiPoly::var(nv, k);
                let tj = MultiPoly::var(nv, j);
                num = num.mul(&tk.add(&tj));
                den.push(tk.sub(&tj));
            }
            RationalTerm::new(num, den)
        })
        .collect()
}
