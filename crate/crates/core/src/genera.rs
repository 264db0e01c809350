//! Multiplicative sequences and equivariant characteristic classes over
//! formal roots.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{int, rat, Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::gring::{GradedRing, RingElement};
use crate::series::{NamedSeries, TruncatedSeries};

/// θ = 2π·a/m, stored reduced with 0 ≤ a < m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Angle {
    a: i64,
    m: i64,
}

impl Angle {
    pub fn turns(a: i64, m: i64) -> Result<Self> {
        if m <= 0 {
            return Err(Error::InvalidArgument("angle denominator must be positive".into()));
        }
        let a = a.rem_euclid(m);
        let g = a.gcd(&m).max(1);
        Ok(Self { a: a / g, m: m / g })
    }

    /// θ = p·π/q.
    pub fn pi_fraction(p: i64, q: i64) -> Result<Self> {
        Self::turns(p, 2 * q)
    }

    pub fn right() -> Self {
        Self { a: 1, m: 4 }
    }

    pub fn numerator(&self) -> i64 {
        self.a
    }

    pub fn denominator(&self) -> i64 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0
    }

    /// 0 < θ < π.
    pub fn in_open_half(&self) -> bool {
        self.a > 0 && 2 * self.a < self.m
    }

    /// Errors unless 0 < θ < π.
    pub fn check_open_half(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::NotNormalDirection)
        } else if !self.in_open_half() {
            Err(Error::AngleOutOfRange)
        } else {
            Ok(())
        }
    }

    /// e^{iθ}.
    pub fn weight(&self) -> Cyclotomic {
        Cyclotomic::root_of_unity(self.m as usize, self.a)
    }

    /// e^{iθ/2}.
    pub fn half_weight(&self) -> Cyclotomic {
        Cyclotomic::root_of_unity(2 * self.m as usize, self.a)
    }

    /// Smallest κ with e^{iθ} a κ-th root of unity.
    pub fn order(&self) -> usize {
        self.m as usize
    }

    pub fn neg(&self) -> Self {
        Self::turns(-self.a, self.m).unwrap()
    }
}

impl fmt::Display for Angle {
    /// As a multiple of π: `pi/2`, `2pi/3`, `pi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = {
            let (p, q) = (2 * self.a, self.m);
            let g = p.gcd(&q).max(1);
            (p / g, q / g)
        };
        match (p, q) {
            (0, _) => f.write_str("0"),
            (1, 1) => f.write_str("pi"),
            (p, 1) => write!(f, "{p}pi"),
            (1, q) => write!(f, "pi/{q}"),
            (p, q) => write!(f, "{p}pi/{q}"),
        }
    }
}

impl FromStr for Angle {
    type Err = Error;
    /// `pi/2`, `2pi/3`, `2*pi/5`, `pi`, `0`, or `turn:a/m` for 2πa/m.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed angle `{s}`"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(rest) = t.strip_prefix("turn:") {
            let (a, m) = rest.split_once('/').ok_or_else(bad)?;
            return Self::turns(a.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?);
        }
        if t == "0" {
            return Ok(Self { a: 0, m: 1 });
        }
        let t = t.replace('π', "pi");
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.to_string(), d.parse::<i64>().map_err(|_| bad())?),
            None => (t.clone(), 1),
        };
        let coef = num.strip_suffix("pi").ok_or_else(bad)?;
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let p: i64 = match coef {
            "" => 1,
            "-" => -1,
            c => c.parse().map_err(|_| bad())?,
        };
        if den <= 0 {
            return Err(bad());
        }
        Self::pi_fraction(p, den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleKind {
    Complex,
    Real,
}

/// Formal roots with character weights. A real bundle stores its half-roots
/// x_j; its complexification has roots ±x_j with weights (w, w̄).
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantBundle {
    pub name: String,
    pub kind: BundleKind,
    ring: Arc<GradedRing>,
    roots: Vec<(RingElement, Cyclotomic)>,
    /// Weight (±1) of a trivial real line completing an odd real rank.
    odd_line: Option<Cyclotomic>,
}

impl EquivariantBundle {
    pub fn complex(name: &str, ring: &Arc<GradedRing>, roots: Vec<(RingElement, Cyclotomic)>) -> Result<Self> {
        Self::build(name, BundleKind::Complex, ring, roots, None)
    }

    pub fn real(name: &str, ring: &Arc<GradedRing>, half_roots: Vec<(RingElement, Cyclotomic)>) -> Result<Self> {
        Self::build(name, BundleKind::Real, ring, half_roots, None)
    }

    /// Real bundle of odd rank: the half-roots plus a trivial real line on
    /// which h acts by `line_weight` (±1).
    pub fn real_odd(
        name: &str,
        ring: &Arc<GradedRing>,
        half_roots: Vec<(RingElement, Cyclotomic)>,
        line_weight: Cyclotomic,
    ) -> Result<Self> {
        if line_weight != Cyclotomic::from_int(1) && line_weight != Cyclotomic::from_int(-1) {
            return Err(Error::InvalidArgument("a real line has weight ±1".into()));
        }
        Self::build(name, BundleKind::Real, ring, half_roots, Some(line_weight))
    }

    /// Non-equivariant bundle (all weights 1).
    pub fn plain(name: &str, kind: BundleKind, ring: &Arc<GradedRing>, roots: Vec<RingElement>) -> Result<Self> {
        let roots = roots.into_iter().map(|r| (r, Cyclotomic::from_int(1))).collect();
        Self::build(name, kind, ring, roots, None)
    }

    /// Rank-`rank` (complex or real) trivial bundle.
    pub fn trivial(name: &str, kind: BundleKind, ring: &Arc<GradedRing>, rank: usize) -> Self {
        let n = match kind {
            BundleKind::Complex => rank,
            BundleKind::Real => rank / 2,
        };
        let roots = vec![(RingElement::zero(ring), Cyclotomic::from_int(1)); n];
        let odd = (kind == BundleKind::Real && rank % 2 == 1).then(|| Cyclotomic::from_int(1));
        Self { name: name.into(), kind, ring: ring.clone(), roots, odd_line: odd }
    }

    fn build(
        name: &str,
        kind: BundleKind,
        ring: &Arc<GradedRing>,
        roots: Vec<(RingElement, Cyclotomic)>,
        odd_line: Option<Cyclotomic>,
    ) -> Result<Self> {
        for (r, w) in &roots {
            if !GradedRing::same(r.ring(), ring) {
                return Err(Error::RingMismatch);
            }
            if r.degrees().iter().any(|&d| d != 2) {
                return Err(Error::InvalidArgument(format!("root `{r}` is not of degree 2")));
            }
            if w.is_zero() {
                return Err(Error::InvalidArgument("weight must be a root of unity".into()));
            }
        }
        Ok(Self { name: name.into(), kind, ring: ring.clone(), roots, odd_line })
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn roots(&self) -> &[(RingElement, Cyclotomic)] {
        &self.roots
    }

    pub fn odd_line(&self) -> Option<&Cyclotomic> {
        self.odd_line.as_ref()
    }

    /// Complex rank, or real rank for real bundles.
    pub fn rank(&self) -> usize {
        match self.kind {
            BundleKind::Complex => self.roots.len(),
            BundleKind::Real => 2 * self.roots.len() + usize::from(self.odd_line.is_some()),
        }
    }

    /// E ⊗ C as a complex bundle.
    pub fn complexify(&self) -> Self {
        let roots = match self.kind {
            BundleKind::Complex => {
                // E ⊗_R C = E ⊕ Ē
                let mut r = self.roots.clone();
                r.extend(self.roots.iter().map(|(x, w)| (x.neg(), w.conj())));
                r
            }
            BundleKind::Real => {
                let mut r = Vec::with_capacity(2 * self.roots.len() + 1);
                for (x, w) in &self.roots {
                    r.push((x.clone(), w.clone()));
                    r.push((x.neg(), w.conj()));
                }
                if let Some(w) = &self.odd_line {
                    r.push((RingElement::zero(&self.ring), w.clone()));
                }
                r
            }
        };
        Self {
            name: format!("{}⊗C", self.name),
            kind: BundleKind::Complex,
            ring: self.ring.clone(),
            roots,
            odd_line: None,
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::BundleKind("direct sum of a real and a complex bundle".into()));
        }
        if !GradedRing::same(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        if self.odd_line.is_some() && other.odd_line.is_some() {
            return Err(Error::BundleKind("sum of two odd real bundles needs a half-root".into()));
        }
        let mut roots = self.roots.clone();
        roots.extend(other.roots.iter().cloned());
        Ok(Self {
            name: format!("{}⊕{}", self.name, other.name),
            kind: self.kind,
            ring: self.ring.clone(),
            roots,
            odd_line: self.odd_line.clone().or_else(|| other.odd_line.clone()),
        })
    }

    /// Tensor product of complex line bundles: roots add, weights multiply.
    pub fn tensor_lines(&self, other: &Self) -> Result<Self> {
        if self.kind != BundleKind::Complex || other.kind != BundleKind::Complex {
            return Err(Error::BundleKind("tensor_lines needs complex bundles".into()));
        }
        if self.roots.len() != 1 || other.roots.len() != 1 {
            return Err(Error::InvalidArgument("tensor_lines needs line bundles".into()));
        }
        let (x, w) = &self.roots[0];
        let (y, v) = &other.roots[0];
        Self::complex(&format!("{}⊗{}", self.name, other.name), &self.ring, vec![(x.add(y)?, w * v)])
    }

    fn require_complex(&self, op: &str) -> Result<()> {
        if self.kind == BundleKind::Complex {
            Ok(())
        } else {
            Err(Error::BundleKind(format!("{op} needs a complex bundle; complexify first")))
        }
    }

    fn require_real(&self, op: &str) -> Result<()> {
        if self.kind == BundleKind::Real {
            Ok(())
        } else {
            Err(Error::BundleKind(format!("{op} needs a real bundle")))
        }
    }
}

/// The genus-defining series of the catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Genus {
    Ahat,
    Todd,
    L,
}

impl Genus {
    pub fn named(self) -> NamedSeries {
        match self {
            Genus::Ahat => NamedSeries::Ahat,
            Genus::Todd => NamedSeries::Todd,
            Genus::L => NamedSeries::Lgenus,
        }
    }

    /// The series known far enough for any degree-2 argument in `ring`.
    pub fn series_for(self, ring: &GradedRing) -> TruncatedSeries<Rational> {
        self.named().build(ring.degree_cap() as i64 / 2 + 1)
    }
}

impl FromStr for Genus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<NamedSeries>()? {
            NamedSeries::Ahat => Ok(Genus::Ahat),
            NamedSeries::Todd => Ok(Genus::Todd),
            NamedSeries::Lgenus => Ok(Genus::L),
            _ => Err(Error::UnknownSeries(s.into())),
        }
    }
}

impl fmt::Display for Genus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Genus::Ahat => "ahat",
            Genus::Todd => "todd",
            Genus::L => "l",
        })
    }
}

fn check_normalized(f: &TruncatedSeries<Rational>) -> Result<()> {
    match f.coefficient(0) {
        Ok(c) if c == int(1) && f.valuation() == Some(0) => Ok(()),
        _ => Err(Error::UnnormalizedGenus),
    }
}

/// ∏ f(x_i) over complex roots; over real half-roots, f(x_j) for even f
/// and f(x_j)f(−x_j) otherwise.
pub fn genus_of_roots(f: &TruncatedSeries<Rational>, e: &EquivariantBundle) -> Result<RingElement> {
    check_normalized(f)?;
    let mut acc = RingElement::one(&e.ring);
    let even = f.is_even();
    for (x, _) in &e.roots {
        let fx = x.apply_series(f)?;
        let factor = match (e.kind, even) {
            (BundleKind::Real, false) => fx.mul(&x.neg().apply_series(f)?)?,
            _ => fx,
        };
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// A bundle given only by its total Chern or Pontryagin class.
#[derive(Clone, Debug)]
pub struct TotalClassBundle {
    pub name: String,
    pub kind: BundleKind,
    pub class: RingElement,
    pub rank: usize,
}

impl TotalClassBundle {
    /// Total Pontryagin class (components in degrees 4k) of a real bundle.
    pub fn pontryagin(name: &str, class: RingElement, rank: usize) -> Result<Self> {
        let b = Self { name: name.into(), kind: BundleKind::Real, class, rank };
        b.components()?;
        Ok(b)
    }

    /// Total Chern class (components in degrees 2k) of a complex bundle.
    pub fn chern(name: &str, class: RingElement, rank: usize) -> Result<Self> {
        let b = Self { name: name.into(), kind: BundleKind::Complex, class, rank };
        b.components()?;
        Ok(b)
    }

    fn step(&self) -> u32 {
        match self.kind {
            BundleKind::Real => 4,
            BundleKind::Complex => 2,
        }
    }

    /// [1, c_1, c_2, …] (or Pontryagin classes).
    pub fn components(&self) -> Result<Vec<RingElement>> {
        if self.class.constant_term() != Cyclotomic::from_int(1) {
            return Err(Error::MalformedTotalClass("constant term must be 1".into()));
        }
        let step = self.step();
        if let Some(d) = self.class.degrees().into_iter().find(|d| d % step != 0) {
            return Err(Error::MalformedTotalClass(format!(
                "component in degree {d} is not a multiple of {step}"
            )));
        }
        let top = self.class.ring().degree_cap() / step;
        Ok((0..=top).map(|k| self.class.homogeneous(k * step)).collect())
    }
}

/// Total Pontryagin class ∏(1 + x_j²) of a real bundle.
pub fn pontryagin_class(e: &EquivariantBundle) -> Result<RingElement> {
    e.require_real("pontryagin_class")?;
    let mut acc = RingElement::one(&e.ring);
    for (x, _) in &e.roots {
        acc = acc.mul(&RingElement::one(&e.ring).add(&x.mul(x)?)?)?;
    }
    Ok(acc)
}

/// Total Chern class ∏(1 + x_i) of a complex bundle.
pub fn chern_class(e: &EquivariantBundle) -> Result<RingElement> {
    e.require_complex("chern_class")?;
    let mut acc = RingElement::one(&e.ring);
    for (x, _) in &e.roots {
        acc = acc.mul(&RingElement::one(&e.ring).add(x)?)?;
    }
    Ok(acc)
}

/// Newton power sums P_1..P_n of the formal roots from elementary
/// symmetric functions e_0 = 1, e_1, …, e_n.
pub fn power_sums(elementary: &[RingElement]) -> Result<Vec<RingElement>> {
    let ring = elementary[0].ring().clone();
    let n = elementary.len() - 1;
    let mut p: Vec<RingElement> = vec![RingElement::zero(&ring)];
    for k in 1..=n {
        // P_k = (−1)^{k−1} k e_k + Σ_{i=1}^{k−1} (−1)^{k−1+i} e_{k−i} P_i
        let sign = |j: usize| Cyclotomic::from_int(if j.is_multiple_of(2) { 1 } else { -1 });
        let mut acc = elementary[k].scale(&(&sign(k - 1) * &Cyclotomic::from_int(k as i64)));
        for i in 1..k {
            let t = elementary[k - i].mul(&p[i])?.scale(&sign(k - 1 + i));
            acc = acc.add(&t)?;
        }
        p.push(acc);
    }
    Ok(p)
}

/// The multiplicative sequence of `f` evaluated on a total class, by
/// exp(Σ_k l_k P_k) with log f = Σ l_k x^k and P_k the Newton power sums.
/// For Pontryagin classes the variable is y = x² and non-even f is first
/// symmetrized to f(x)f(−x).
pub fn genus_of_total_class(f: &TruncatedSeries<Rational>, b: &TotalClassBundle) -> Result<RingElement> {
    check_normalized(f)?;
    let comps = b.components()?;
    let n = comps.len() - 1;
    let g = match b.kind {
        BundleKind::Complex => f.clone(),
        BundleKind::Real => {
            let h = if f.is_even() { f.clone() } else { f.mul(&f.reflect()) };
            h.even_part_in_square()?
        }
    };
    let needed = n as i64;
    if g.order().is_some_and(|t| t < needed) {
        return Err(Error::SeriesTooShort { order: g.order().unwrap(), needed });
    }
    let log_g = g.log()?;
    let p = power_sums(&comps)?;
    let ring = b.class.ring();
    let mut s = RingElement::zero(ring);
    for (k, pk) in p.iter().enumerate().skip(1) {
        let l = log_g.coefficient(k as i64)?;
        s = s.add(&pk.scale_rational(&l))?;
    }
    s.exp()
}

/// Σ w_i e^{x_i} (at h) or Σ e^{x_i}.
pub fn chern_character(e: &EquivariantBundle, at_h: bool) -> Result<RingElement> {
    e.require_complex("chern_character")?;
    let mut acc = RingElement::zero(&e.ring);
    for (x, w) in &e.roots {
        let ex = x.exp()?;
        acc = acc.add(&if at_h { ex.scale(w) } else { ex })?;
    }
    Ok(acc)
}

/// ch λ_{−1}(E)(h) = ∏(1 − w_i e^{x_i}), flagged invertible when its
/// constant term ∏(1 − w_i) is nonzero.
pub fn lambda_minus1_ch(e: &EquivariantBundle) -> Result<(RingElement, bool)> {
    e.require_complex("lambda_minus1_ch")?;
    let one = RingElement::one(&e.ring);
    let mut acc = one.clone();
    for (x, w) in &e.roots {
        acc = acc.mul(&one.sub(&x.exp()?.scale(w))?)?;
    }
    let invertible = !acc.constant_term().is_zero();
    Ok((acc, invertible))
}

/// 2^{s₁} ∏_θ ((1 − e^{iθ})(1 − e^{−iθ}))^{s(θ)}.
pub fn det_one_minus_h(decomp: &[(Angle, u32)], s1: u32) -> Result<Cyclotomic> {
    let mut acc = Cyclotomic::from_int(1 << s1.min(62));
    for _ in 62..s1 {
        acc = &acc * &Cyclotomic::from_int(2);
    }
    for (theta, s) in decomp {
        theta.check_open_half()?;
        let w = theta.weight();
        let one = Cyclotomic::from_int(1);
        let f = &(&one - &w) * &(&one - &w.conj());
        acc = &acc * &f.pow(*s);
    }
    Ok(acc)
}

/// S^θ(N) = [∏_j (1 − w e^{y_j})(1 − w̄ e^{−y_j}) / ((1 − w)(1 − w̄))]^{-1}
/// for N with common weight w = e^{iθ}.
pub fn s_theta_class(n: &EquivariantBundle) -> Result<RingElement> {
    n.require_complex("S_theta_class")?;
    let ring = &n.ring;
    let one = RingElement::one(ring);
    let mut acc = one.clone();
    let unit = Cyclotomic::from_int(1);
    for (y, w) in &n.roots {
        if *w == unit {
            return Err(Error::NotNormalDirection);
        }
        let norm = &(&unit - w) * &(&unit - &w.conj());
        let a = one.sub(&y.exp()?.scale(w))?;
        let b = one.sub(&y.neg().exp()?.scale(&w.conj()))?;
        acc = acc.mul(&a.mul(&b)?.scale(&norm.inv()?))?;
    }
    acc.inverse()
}

/// R(N) = [∏_j ((1 + e^{x_j})/2)((1 + e^{−x_j})/2)]^{-1} for a real bundle.
pub fn r_class(n: &EquivariantBundle) -> Result<RingElement> {
    n.require_real("R_class")?;
    let ring = &n.ring;
    let one = RingElement::one(ring);
    let half = Cyclotomic::from_rational(rat(1, 2));
    let mut acc = one.clone();
    for (x, _) in &n.roots {
        let a = one.add(&x.exp()?)?.scale(&half);
        let b = one.add(&x.neg().exp()?)?.scale(&half);
        acc = acc.mul(&a.mul(&b)?)?;
    }
    acc.inverse()
}

/// ∏ x_j for an oriented real bundle of even rank.
pub fn euler_class(e: &EquivariantBundle) -> Result<RingElement> {
    e.require_real("euler_class")?;
    if e.odd_line.is_some() {
        return Err(Error::OddRank);
    }
    let mut acc = RingElement::one(&e.ring);
    for (x, _) in &e.roots {
        acc = acc.mul(x)?;
    }
    Ok(acc)
}

/// A polynomial in an auxiliary variable t with ring coefficients, known
/// modulo t^{order+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct TPoly {
    coeffs: Vec<RingElement>,
}

impl TPoly {
    pub fn one(ring: &Arc<GradedRing>, order: usize) -> Self {
        let mut coeffs = vec![RingElement::zero(ring); order + 1];
        coeffs[0] = RingElement::one(ring);
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, n: usize) -> Result<&RingElement> {
        self.coeffs.get(n).ok_or(Error::OrderExceeded { n: n as u32, order: self.order() as u32 })
    }

    pub fn coefficients(&self) -> &[RingElement] {
        &self.coeffs
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let n = self.order().min(other.order());
        let ring = self.coeffs[0].ring();
        let mut out = vec![RingElement::zero(ring); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(Self { coeffs: out })
    }

    /// p(t^k).
    pub fn substitute_power(&self, k: usize) -> Self {
        let ring = self.coeffs[0].ring();
        let n = self.order();
        let mut out = vec![RingElement::zero(ring); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * k <= n {
                out[i * k] = c.clone();
            }
        }
        Self { coeffs: out }
    }
}

/// ch(Λ_t E) = ∏(1 + t e^{x_i}) mod t^{order+1}.
pub fn lambda_t_ch(e: &EquivariantBundle, order: usize) -> Result<TPoly> {
    e.require_complex("lambda_t_ch")?;
    let mut acc = TPoly::one(&e.ring, order);
    for (x, _) in &e.roots {
        let mut f = TPoly::one(&e.ring, order);
        if order >= 1 {
            f.coeffs[1] = x.exp()?;
        }
        acc = acc.mul(&f)?;
    }
    Ok(acc)
}

/// ch(S_t E) = ∏(1 − t e^{x_i})^{-1} mod t^{order+1}.
pub fn sym_t_ch(e: &EquivariantBundle, order: usize) -> Result<TPoly> {
    e.require_complex("sym_t_ch")?;
    let mut acc = TPoly::one(&e.ring, order);
    for (x, _) in &e.roots {
        let ex = x.exp()?;
        let mut f = TPoly::one(&e.ring, order);
        for k in 1..=order {
            f.coeffs[k] = f.coeffs[k - 1].mul(&ex)?;
        }
        acc = acc.mul(&f)?;
    }
    Ok(acc)
}

/// ch(R_n) from R_q = ⊗_{n≥1} Λ_{q^n}(F) ⊗_{m≥1} S_{q^m}(F), computed
/// modulo q^{order+1}. `f` is the complex bundle TF ⊗ C.
pub fn rigidity_r_coeff(f: &EquivariantBundle, n: usize, order: usize) -> Result<RingElement> {
    if n > order {
        return Err(Error::OrderExceeded { n: n as u32, order: order as u32 });
    }
    let lam = lambda_t_ch(f, order)?;
    let sym = sym_t_ch(f, order)?;
    let mut acc = TPoly::one(&f.ring, order);
    for k in 1..=order {
        acc = acc.mul(&lam.substitute_power(k))?.mul(&sym.substitute_power(k))?;
    }
    Ok(acc.coefficient(n)?.clone())
}

/// ch(R'_n) from R'_q = ⊗_{n=1/2,3/2,…} Λ_{q^n}(F) ⊗_{m≥1} S_{q^m}(F),
/// the coefficient of q^{n/2}; computed in s = q^{1/2} modulo s^{order+1}.
pub fn rigidity_r_prime_coeff(f: &EquivariantBundle, n: usize, order: usize) -> Result<RingElement> {
    if n > order {
        return Err(Error::OrderExceeded { n: n as u32, order: order as u32 });
    }
    let lam = lambda_t_ch(f, order)?;
    let sym = sym_t_ch(f, order)?;
    let mut acc = TPoly::one(&f.ring, order);
    for k in (1..=order).step_by(2) {
        acc = acc.mul(&lam.substitute_power(k))?;
    }
    for m in (2..=order).step_by(2) {
        acc = acc.mul(&sym.substitute_power(m))?;
    }
    Ok(acc.coefficient(n)?.clone())
}

/// A rational scalar times the unit of a ring, as a convenience for tests
/// and builders.
pub fn rational_class(ring: &Arc<GradedRing>, r: Rational) -> RingElement {
    RingElement::constant(ring, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gring::GradedRing;
    use proptest::prelude::*;

    fn c(n: i64) -> Cyclotomic {
        Cyclotomic::from_int(n)
    }

    fn el(r: &Arc<GradedRing>, s: &str) -> RingElement {
        RingElement::parse(r, s).unwrap()
    }

    fn line_ring() -> Arc<GradedRing> {
        GradedRing::builder("L").var_nil("x", 2, 5).unwrap().build().unwrap()
    }

    #[test]
    fn angles() {
        let a: Angle = "pi/2".parse().unwrap();
        assert_eq!(a, Angle::right());
        assert_eq!(a.weight(), Cyclotomic::i());
        assert_eq!(a.half_weight(), Cyclotomic::zeta(8));
        assert_eq!("2pi/3".parse::<Angle>().unwrap(), Angle::turns(1, 3).unwrap());
        assert_eq!("2*pi/3".parse::<Angle>().unwrap(), Angle::turns(1, 3).unwrap());
        assert_eq!("turn:1/8".parse::<Angle>().unwrap().to_string(), "pi/4");
        assert_eq!("pi".parse::<Angle>().unwrap().to_string(), "pi");
        assert!("0".parse::<Angle>().unwrap().is_zero());
        assert!("banana".parse::<Angle>().is_err());
        assert!(matches!(Angle::pi_fraction(0, 1).unwrap().check_open_half(), Err(Error::NotNormalDirection)));
        assert!(matches!(Angle::pi_fraction(1, 1).unwrap().check_open_half(), Err(Error::AngleOutOfRange)));
    }

    #[test]
    fn ahat_of_real_plane() {
        let r = line_ring();
        let e = EquivariantBundle::plain("E", BundleKind::Real, &r, vec![el(&r, "x")]).unwrap();
        let a = genus_of_roots(&Genus::Ahat.series_for(&r), &e).unwrap();
        assert_eq!(a, el(&r, "1 - 1/24*x^2 + 7/5760*x^4"));
    }

    #[test]
    fn todd_of_trivial_line() {
        let r = line_ring();
        let e = EquivariantBundle::trivial("O", BundleKind::Complex, &r, 1);
        assert_eq!(genus_of_roots(&Genus::Todd.series_for(&r), &e).unwrap(), RingElement::one(&r));
    }

    #[test]
    fn ahat_tangent_cp2_by_roots() {
        let r = GradedRing::builder("CP2").var_nil("a", 2, 3).unwrap().build().unwrap();
        let a = el(&r, "a");
        let t = EquivariantBundle::plain("T", BundleKind::Real, &r, vec![a.clone(), a.clone(), a]).unwrap();
        let g = genus_of_roots(&Genus::Ahat.series_for(&r), &t).unwrap();
        assert_eq!(g, el(&r, "1 - 1/8*a^2"));
        assert_eq!(g.integrate().unwrap(), Cyclotomic::from_rational(rat(-1, 8)));
    }

    #[test]
    fn unnormalized_series_rejected() {
        let r = line_ring();
        let e = EquivariantBundle::trivial("O", BundleKind::Complex, &r, 1);
        let f = TruncatedSeries::<Rational>::polynomial(vec![int(2)]).truncate(4);
        assert!(matches!(genus_of_roots(&f, &e), Err(Error::UnnormalizedGenus)));
    }

    #[test]
    fn total_class_examples() {
        let r = GradedRing::builder("KP1").var_nil("a", 4, 2).unwrap().build().unwrap();
        let p = el(&r, "(1 + 4*a)^-1 * (1 + a)^4");
        assert_eq!(p, RingElement::one(&r));
        let b = TotalClassBundle::pontryagin("T", p, 4).unwrap();
        assert_eq!(genus_of_total_class(&Genus::Ahat.series_for(&r), &b).unwrap(), RingElement::one(&r));
        let triv = TotalClassBundle::pontryagin("1", RingElement::one(&r), 4).unwrap();
        assert_eq!(genus_of_total_class(&Genus::Ahat.series_for(&r), &triv).unwrap(), RingElement::one(&r));
        assert!(TotalClassBundle::pontryagin("bad", el(&r, "2 + a"), 4).is_err());
        let cp = GradedRing::builder("CP").var_nil("a", 2, 3).unwrap().build().unwrap();
        assert!(TotalClassBundle::pontryagin("bad", el(&cp, "1 + a"), 4).is_err());
    }

    #[test]
    fn ahat_cp2_total_class_matches_roots() {
        let r = GradedRing::builder("CP2").var_nil("a", 2, 3).unwrap().build().unwrap();
        let b = TotalClassBundle::pontryagin("T", el(&r, "(1 + a^2)^3"), 4).unwrap();
        let g = genus_of_total_class(&Genus::Ahat.series_for(&r), &b).unwrap();
        assert_eq!(g, el(&r, "1 - 1/8*a^2"));
    }

    #[test]
    fn chern_character_examples() {
        let r = line_ring();
        let triv = EquivariantBundle::complex("O", &r, vec![(RingElement::zero(&r), Cyclotomic::i())]).unwrap();
        assert_eq!(chern_character(&triv, true).unwrap(), RingElement::constant(&r, Cyclotomic::i()));
        let x = el(&r, "x");
        let e = EquivariantBundle::complex("E", &r, vec![(x.clone(), Cyclotomic::i()), (x.neg(), -Cyclotomic::i())]).unwrap();
        // i e^x − i e^{−x} = 2i sinh x
        assert_eq!(chern_character(&e, true).unwrap(), el(&r, "2*i*x + 1/3*i*x^3"));
        assert!(chern_character(&e.complexify(), false).is_ok());
        let real = EquivariantBundle::plain("R", BundleKind::Real, &r, vec![x]).unwrap();
        assert!(matches!(chern_character(&real, false), Err(Error::BundleKind(_))));
    }

    #[test]
    fn lambda_minus1_examples() {
        let r = line_ring();
        let z = RingElement::zero(&r);
        let e = EquivariantBundle::complex("N", &r, vec![(z.clone(), c(-1))]).unwrap();
        assert_eq!(lambda_minus1_ch(&e).unwrap(), (RingElement::constant(&r, 2), true));
        let tf = EquivariantBundle::complex("TF", &r, vec![(z.clone(), Cyclotomic::i()), (z.clone(), -Cyclotomic::i())]).unwrap();
        assert_eq!(lambda_minus1_ch(&tf).unwrap().0, RingElement::constant(&r, 2));
        let z3 = Cyclotomic::zeta(3);
        let e3 = EquivariantBundle::complex("N", &r, vec![(z.clone(), z3.clone()), (z.clone(), z3.pow(2))]).unwrap();
        assert_eq!(lambda_minus1_ch(&e3).unwrap().0, RingElement::constant(&r, 3));
        let fixed = EquivariantBundle::trivial("O", BundleKind::Complex, &r, 1);
        assert!(!lambda_minus1_ch(&fixed).unwrap().1);
    }

    #[test]
    fn det_examples() {
        assert_eq!(det_one_minus_h(&[(Angle::right(), 1)], 0).unwrap(), c(2));
        assert_eq!(det_one_minus_h(&[], 2).unwrap(), c(4));
        assert_eq!(det_one_minus_h(&[(Angle::pi_fraction(1, 3).unwrap(), 1)], 0).unwrap(), c(1));
        assert!(matches!(
            det_one_minus_h(&[(Angle::turns(0, 1).unwrap(), 1)], 0),
            Err(Error::NotNormalDirection)
        ));
    }

    #[test]
    fn s_and_r_normalization() {
        let r = line_ring();
        let z = RingElement::zero(&r);
        let n = EquivariantBundle::complex("N", &r, vec![(z.clone(), Cyclotomic::i()), (z.clone(), Cyclotomic::i())]).unwrap();
        assert_eq!(s_theta_class(&n).unwrap(), RingElement::one(&r));
        let m = EquivariantBundle::plain("M", BundleKind::Real, &r, vec![z.clone()]).unwrap();
        assert_eq!(r_class(&m).unwrap(), RingElement::one(&r));
        let bad = EquivariantBundle::complex("N", &r, vec![(z, c(1))]).unwrap();
        assert!(matches!(s_theta_class(&bad), Err(Error::NotNormalDirection)));
    }

    #[test]
    fn s_theta_first_order() {
        // θ = π/2: (1 − i e^y)(1 + i e^{−y}) / 2 = 1 + (1 − i)... expanded by hand:
        // (1 − i e^y)(1 + i e^{−y}) = 2 − i(e^y − e^{−y}) = 2 − 2i y − i y³/3 …
        // so S^{-1} = 1 − i y + O(y³) and S = 1 + i y − y² + O(y³)
        let r = GradedRing::builder("Y").var_nil("y", 2, 3).unwrap().build().unwrap();
        let n = EquivariantBundle::complex("N", &r, vec![(el(&r, "y"), Cyclotomic::i())]).unwrap();
        assert_eq!(s_theta_class(&n).unwrap(), el(&r, "1 + i*y - y^2"));
    }

    #[test]
    fn r_class_first_order() {
        // ((1+e^x)/2)((1+e^{−x})/2) = (2 + 2cosh x)/4 = 1 + x²/4 + …
        let r = GradedRing::builder("X").var_nil("x", 2, 3).unwrap().build().unwrap();
        let n = EquivariantBundle::plain("N", BundleKind::Real, &r, vec![el(&r, "x")]).unwrap();
        assert_eq!(r_class(&n).unwrap(), el(&r, "1 - 1/4*x^2"));
    }

    #[test]
    fn euler_examples() {
        let r = GradedRing::builder("XY").var_nil("x", 2, 2).unwrap().var_nil("y", 2, 2).unwrap().build().unwrap();
        let (x, y) = (el(&r, "x"), el(&r, "y"));
        let e2 = EquivariantBundle::plain("E", BundleKind::Real, &r, vec![x.clone()]).unwrap();
        assert_eq!(euler_class(&e2).unwrap(), x.clone());
        let e0 = EquivariantBundle::trivial("0", BundleKind::Real, &r, 0);
        assert_eq!(euler_class(&e0).unwrap(), RingElement::one(&r));
        let e4 = EquivariantBundle::plain("E", BundleKind::Real, &r, vec![x.clone(), y.clone()]).unwrap();
        assert_eq!(euler_class(&e4).unwrap(), el(&r, "x*y"));
        let odd = EquivariantBundle::real_odd("E", &r, vec![(x, c(1))], c(1)).unwrap();
        assert!(matches!(euler_class(&odd), Err(Error::OddRank)));
    }

    #[test]
    fn lambda_and_sym_of_trivial_line() {
        let r = line_ring();
        let o = EquivariantBundle::trivial("O", BundleKind::Complex, &r, 1);
        let l = lambda_t_ch(&o, 3).unwrap();
        let want: Vec<RingElement> = [1, 1, 0, 0].iter().map(|&k| RingElement::constant(&r, k)).collect();
        assert_eq!(l.coefficients(), want.as_slice());
        let s = sym_t_ch(&o, 3).unwrap();
        assert!(s.coefficients().iter().all(|c| *c == RingElement::one(&r)));
    }

    #[test]
    fn rigidity_coefficients() {
        let r = line_ring();
        let f = EquivariantBundle::trivial("TF", BundleKind::Real, &r, 2).complexify();
        assert_eq!(rigidity_r_coeff(&f, 0, 3).unwrap(), RingElement::one(&r));
        assert_eq!(rigidity_r_coeff(&f, 1, 3).unwrap(), RingElement::constant(&r, 4));
        assert!(matches!(rigidity_r_coeff(&f, 4, 3), Err(Error::OrderExceeded { .. })));
        // R'_q = Λ_s ⊗ S_{s²} ⊗ Λ_{s³} … : R'_1 = Λ¹F, rank 2
        assert_eq!(rigidity_r_prime_coeff(&f, 0, 3).unwrap(), RingElement::one(&r));
        assert_eq!(rigidity_r_prime_coeff(&f, 1, 3).unwrap(), RingElement::constant(&r, 2));
        // s²: Λ²F (rank 1) from Λ_s plus S¹F (rank 2) from S_{s²}
        assert_eq!(rigidity_r_prime_coeff(&f, 2, 3).unwrap(), RingElement::constant(&r, 3));
    }

    fn root_ring() -> Arc<GradedRing> {
        GradedRing::builder("R")
            .var_nil("u", 2, 7)
            .unwrap()
            .var_nil("v", 2, 7)
            .unwrap()
            .degree_cap(12)
            .build()
            .unwrap()
    }

    fn small_root_ring() -> Arc<GradedRing> {
        GradedRing::builder("R")
            .var_nil("u", 2, 5)
            .unwrap()
            .var_nil("v", 2, 5)
            .unwrap()
            .degree_cap(8)
            .build()
            .unwrap()
    }

    fn arb_roots() -> impl Strategy<Value = Vec<(i64, i64)>> {
        prop::collection::vec((-3i64..=3, -3i64..=3), 1..=4)
    }

    fn roots_of(r: &Arc<GradedRing>, spec: &[(i64, i64)]) -> Vec<RingElement> {
        spec.iter()
            .map(|&(a, b)| el(r, &format!("({a})*u + ({b})*v")))
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn total_class_route_matches_roots_real(spec in arb_roots(), g in 0usize..3) {
            let r = root_ring();
            let genus = [Genus::Ahat, Genus::Todd, Genus::L][g];
            let e = EquivariantBundle::plain("E", BundleKind::Real, &r, roots_of(&r, &spec)).unwrap();
            let f = genus.series_for(&r);
            let b = TotalClassBundle::pontryagin("E", pontryagin_class(&e).unwrap(), e.rank()).unwrap();
            prop_assert_eq!(genus_of_total_class(&f, &b).unwrap(), genus_of_roots(&f, &e).unwrap());
        }

        #[test]
        fn total_class_route_matches_roots_complex(spec in arb_roots()) {
            let r = root_ring();
            let e = EquivariantBundle::plain("E", BundleKind::Complex, &r, roots_of(&r, &spec)).unwrap();
            let f = Genus::Todd.series_for(&r);
            let b = TotalClassBundle::chern("E", chern_class(&e).unwrap(), e.rank()).unwrap();
            prop_assert_eq!(genus_of_total_class(&f, &b).unwrap(), genus_of_roots(&f, &e).unwrap());
        }

        #[test]
        fn ch_additive_and_multiplicative(a in arb_roots(), b in arb_roots(), wa in 0i64..8, wb in 0i64..8) {
            let r = small_root_ring();
            let w = |k: i64| Cyclotomic::root_of_unity(8, k);
            let ea = EquivariantBundle::complex("A", &r, roots_of(&r, &a).into_iter().map(|x| (x, w(wa))).collect()).unwrap();
            let eb = EquivariantBundle::complex("B", &r, roots_of(&r, &b).into_iter().map(|x| (x, w(wb))).collect()).unwrap();
            let sum = ea.direct_sum(&eb).unwrap();
            prop_assert_eq!(
                chern_character(&sum, true).unwrap(),
                chern_character(&ea, true).unwrap().add(&chern_character(&eb, true).unwrap()).unwrap()
            );
            let la = EquivariantBundle::complex("a", &r, vec![(roots_of(&r, &a[..1])[0].clone(), w(wa))]).unwrap();
            let lb = EquivariantBundle::complex("b", &r, vec![(roots_of(&r, &b[..1])[0].clone(), w(wb))]).unwrap();
            prop_assert_eq!(
                chern_character(&la.tensor_lines(&lb).unwrap(), true).unwrap(),
                chern_character(&la, true).unwrap().mul(&chern_character(&lb, true).unwrap()).unwrap()
            );
            let (pa, _) = lambda_minus1_ch(&ea).unwrap();
            let (pb, _) = lambda_minus1_ch(&eb).unwrap();
            prop_assert_eq!(lambda_minus1_ch(&sum).unwrap().0, pa.mul(&pb).unwrap());
        }

        #[test]
        fn s_and_r_multiplicative(a in arb_roots(), b in arb_roots(), k in 1i64..4) {
            let r = small_root_ring();
            let w = Cyclotomic::root_of_unity(8, k);
            let na = EquivariantBundle::complex("A", &r, roots_of(&r, &a).into_iter().map(|x| (x, w.clone())).collect()).unwrap();
            let nb = EquivariantBundle::complex("B", &r, roots_of(&r, &b).into_iter().map(|x| (x, w.clone())).collect()).unwrap();
            let s = s_theta_class(&na.direct_sum(&nb).unwrap()).unwrap();
            prop_assert_eq!(s.constant_term(), c(1));
            prop_assert_eq!(s, s_theta_class(&na).unwrap().mul(&s_theta_class(&nb).unwrap()).unwrap());
            let ra = EquivariantBundle::plain("A", BundleKind::Real, &r, roots_of(&r, &a)).unwrap();
            let rb = EquivariantBundle::plain("B", BundleKind::Real, &r, roots_of(&r, &b)).unwrap();
            let rr = r_class(&ra.direct_sum(&rb).unwrap()).unwrap();
            prop_assert_eq!(rr.constant_term(), c(1));
            prop_assert_eq!(rr, r_class(&ra).unwrap().mul(&r_class(&rb).unwrap()).unwrap());
        }
    }
}
