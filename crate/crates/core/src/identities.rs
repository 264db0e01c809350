//! Exact verifiers for the series and rational-function identities coming
//! out of the Lefschetz computations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{bernoulli_numbers, format_rational, int, is_power_of_two, rat, Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::genera::{chern_character, genus_of_total_class, Genus};
use crate::gring::{coth_sum_terms, rational_identity_witness, MultiPoly, RationalTerm, RingElement};
use crate::series::{binomial_series, NamedSeries};
use crate::spaces::{build_cp, build_kp, build_torus_with_w, closed_form_ch_w, torus_ring, torus_w_factors};

/// Where a verifier found the identity to fail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub location: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub verdict: bool,
    pub witness: Option<Witness>,
    /// Wall time; left out of JSON so reports stay byte-stable.
    #[serde(skip)]
    pub timing: Duration,
}

/// Adds `delta` to one coefficient of a verifier's pipeline; `index`
/// selects the coefficient (reduced modulo the number available).
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub index: usize,
    pub delta: Rational,
}

fn finish(name: &str, params: &[(&str, String)], start: Instant, witness: Option<Witness>) -> IdentityResult {
    IdentityResult {
        name: name.into(),
        params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        verdict: witness.is_none(),
        witness,
        timing: start.elapsed(),
    }
}

fn witness(location: impl Into<String>, detail: impl Into<String>) -> Option<Witness> {
    Some(Witness { location: location.into(), detail: detail.into() })
}

fn fmt_monomial(e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("t{i}") } else { format!("t{i}^{k}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Σ_{j=0}^n ∏_{k≠j} coth(u_k − u_j) = (1 + (−1)^n)/2, exactly over
/// Q(t_0, …, t_n) after t_k = e^{2u_k}.
pub fn verify_coth_cancellation(n: usize, perturb: Option<&Perturbation>) -> Result<IdentityResult> {
    let start = Instant::now();
    if n < 1 {
        return Err(Error::InvalidArgument("coth cancellation needs n ≥ 1".into()));
    }
    let mut terms = coth_sum_terms(n);
    if let Some(p) = perturb {
        let j = p.index % terms.len();
        let t = &terms[j];
        let keys: Vec<Vec<u32>> = t.numerator.terms().keys().cloned().collect();
        let e = keys[(p.index / terms.len()) % keys.len()].clone();
        let bump = MultiPoly::from_terms(t.numerator.nvars(), [(e, p.delta.clone())]);
        terms[j] = RationalTerm::new(t.numerator.add(&bump), t.denominator.clone());
    }
    let rhs = if n.is_multiple_of(2) { int(1) } else { int(0) };
    let w = rational_identity_witness(&terms, &rhs)?.and_then(|w| {
        witness(
            format!("monomial {}", fmt_monomial(&w.exponents)),
            format!("cleared difference has coefficient {}", format_rational(&w.coefficient)),
        )
    });
    Ok(finish("coth-cancellation", &[("n", n.to_string()), ("rhs", format_rational(&rhs))], start, w))
}

/// coth z = cosh z / sinh z against 1/z + Σ 2^{2l} b_{2l}/(2l)! z^{2l−1},
/// coefficientwise through z^T, with the Bernoulli recurrence checked
/// against the coefficients of x/(e^x − 1).
pub fn verify_coth_bernoulli(t: usize, perturb: Option<&Perturbation>) -> Result<IdentityResult> {
    let start = Instant::now();
    if t < 1 {
        return Err(Error::InvalidArgument("coth expansion needs T ≥ 1".into()));
    }
    let params = [("T", t.to_string())];
    let b = bernoulli_numbers(t + 1);
    // x/(e^x − 1) = Td(−x)
    let gen = NamedSeries::Todd.build(t as i64 + 1).reflect();
    let mut fact = int(1);
    for (n, bn) in b.iter().enumerate() {
        if n > 0 {
            fact *= int(n as i64);
        }
        let c = gen.coefficient(n as i64)? * &fact;
        if c != *bn {
            let w = witness(
                format!("B_{n}"),
                format!("recurrence {} vs generating function {}", format_rational(bn), format_rational(&c)),
            );
            return Ok(finish("coth-bernoulli", &params, start, w));
        }
    }
    let division = NamedSeries::Coth.build(t as i64);
    // degrees −1, 0, 1, …, T
    let mut closed: Vec<Rational> = Vec::with_capacity(t + 2);
    for d in -1..=t as i64 {
        let c = if d == -1 {
            int(1)
        } else if d % 2 == 1 {
            let l = (d + 1) / 2;
            let fact = (1..=2 * l).fold(int(1), |acc, k| acc * int(k));
            let pow = Rational::from_integer(num_bigint::BigInt::one() << (2 * l as usize));
            pow * &b[2 * l as usize] / &fact
        } else {
            int(0)
        };
        closed.push(c);
    }
    if let Some(p) = perturb {
        let k = p.index % closed.len();
        closed[k] += &p.delta;
    }
    for (k, c) in closed.iter().enumerate() {
        let d = k as i64 - 1;
        let got = division.coefficient(d)?;
        if got != *c {
            let w = witness(
                format!("z^{d}"),
                format!("cosh/sinh {} vs Bernoulli {}", format_rational(&got), format_rational(c)),
            );
            return Ok(finish("coth-bernoulli", &params, start, w));
        }
    }
    Ok(finish("coth-bernoulli", &params, start, None))
}

/// √(1+u²) = Σ a_j u^{2j}: 2a_n + Σ_{j=1}^{n−1} a_j a_{n−j} = 0 for n ≥ 2
/// (2a_1 = 1), a_j = (−1)^{j+1}|a_j| ≠ 0, and each denominator a power of 2.
pub fn verify_sqrt_claim(big_n: usize, perturb: Option<&Perturbation>) -> Result<IdentityResult> {
    let start = Instant::now();
    if big_n < 2 {
        return Err(Error::InvalidArgument("sqrt claim needs N ≥ 2".into()));
    }
    let params = [("N", big_n.to_string())];
    let mut a = crate::series::sqrt_taylor_coeffs(big_n);
    if let Some(p) = perturb {
        a[1 + p.index % big_n] += &p.delta;
    }
    for n in 1..=big_n {
        let mut lhs = int(2) * &a[n];
        for j in 1..n {
            lhs += &a[j] * &a[n - j];
        }
        let rhs = if n == 1 { int(1) } else { int(0) };
        if lhs != rhs {
            let w = witness(format!("recurrence at n={n}"), format!("left side {}", format_rational(&lhs)));
            return Ok(finish("sqrt-claim", &params, start, w));
        }
        let want_positive = n % 2 == 1;
        if a[n].is_zero() || a[n].is_positive() != want_positive {
            let w = witness(format!("sign of a_{n}"), format!("a_{n} = {}", format_rational(&a[n])));
            return Ok(finish("sqrt-claim", &params, start, w));
        }
        if !is_power_of_two(a[n].denom()) {
            let w = witness(format!("denominator of a_{n}"), format!("a_{n} = {}", format_rational(&a[n])));
            return Ok(finish("sqrt-claim", &params, start, w));
        }
    }
    Ok(finish("sqrt-claim", &params, start, None))
}

/// ∫ Â(T CP_q) through the ring.
pub fn ahat_cp_ring(q: u32) -> Result<Rational> {
    let m = build_cp(q)?;
    let b = m.tangent_class.as_ref().expect("CP carries its Pontryagin class");
    let a = genus_of_total_class(&Genus::Ahat.series_for(&m.ring), b)?;
    a.integrate()?.as_rational().ok_or_else(|| Error::InvalidArgument("Â-genus is not rational".into()))
}

/// 2^{−q} · [u^q] (1 + u²)^{−1/2}.
pub fn ahat_cp_extraction(q: u32) -> Rational {
    if q % 2 == 1 {
        return int(0);
    }
    let c = binomial_series(&rat(-1, 2), q as i64 / 2).coefficient(q as i64 / 2).expect("within order");
    c / Rational::from_integer(num_bigint::BigInt::one() << q as usize)
}

/// Â(CP_q) by the ring and by coefficient extraction, q = 1..q_max; equal,
/// and zero exactly for odd q.
pub fn verify_ahat_cp(q_max: u32, perturb: Option<&Perturbation>) -> Result<IdentityResult> {
    let start = Instant::now();
    if q_max < 2 {
        return Err(Error::InvalidArgument("Â(CP_q) check needs q_max ≥ 2".into()));
    }
    let params = [("q_max", q_max.to_string())];
    for q in 1..=q_max {
        let ring = ahat_cp_ring(q)?;
        let mut ext = ahat_cp_extraction(q);
        if let Some(p) = perturb.filter(|p| 1 + (p.index % q_max as usize) as u32 == q) {
            ext += &p.delta;
        }
        let w = if ring != ext {
            witness(
                format!("q={q}"),
                format!("ring {} vs extraction {}", format_rational(&ring), format_rational(&ext)),
            )
        } else if ring.is_zero() != (q % 2 == 1) {
            witness(format!("q={q}"), format!("parity: Â = {}", format_rational(&ring)))
        } else {
            None
        };
        if w.is_some() {
            return Ok(finish("ahat-cp", &params, start, w));
        }
    }
    Ok(finish("ahat-cp", &params, start, None))
}

/// ∫ Â(T KP_{q−1}).
pub fn ahat_kp(q: u32) -> Result<Cyclotomic> {
    let m = build_kp(q - 1)?;
    let b = m.tangent_class.as_ref().expect("KP carries its Pontryagin class");
    genus_of_total_class(&Genus::Ahat.series_for(&m.ring), b)?.integrate()
}

/// Â(KP_{q−1}) = 0 for q = 2..q_max. The perturbation lands on the
/// top-degree coefficient of one Â class.
pub fn verify_ahat_kp(q_max: u32, perturb: Option<&Perturbation>) -> Result<IdentityResult> {
    let start = Instant::now();
    if q_max < 2 {
        return Err(Error::InvalidArgument("Â(KP) check needs q_max ≥ 2".into()));
    }
    let params = [("q_max", q_max.to_string())];
    for q in 2..=q_max {
        let mut v = ahat_kp(q)?;
        if let Some(p) = perturb.filter(|p| 2 + (p.index % (q_max as usize - 1)) as u32 == q) {
            v = &v + &Cyclotomic::from_rational(p.delta.clone());
        }
        if !v.is_zero() {
            return Ok(finish("ahat-kp", &params, start, witness(format!("q={q}"), format!("Â = {v}"))));
        }
    }
    Ok(finish("ahat-kp", &params, start, None))
}

/// ch(W) for W = Ŵ_1 ⊗ ⋯ ⊗ Ŵ_k, built as ∏ ch(Ŵ_i) and through the tensor
/// line bundle, against ∏(1 + η_iβ_i) for k = 1..k_max.
pub fn verify_ch_w(k_max: u32, perturb: Option<&Perturbation>) -> Result<IdentityResult> {
    let start = Instant::now();
    if k_max < 1 {
        return Err(Error::InvalidArgument("ch(W) check needs k_max ≥ 1".into()));
    }
    let params = [("k_max", k_max.to_string())];
    for k in 1..=k_max {
        let ring = torus_ring(k)?;
        let mut product = RingElement::one(&ring);
        for f in torus_w_factors(&ring, k)? {
            product = product.mul(&chern_character(&f, false)?)?;
        }
        let model = build_torus_with_w(k)?;
        let tensor = chern_character(model.bundle("W")?, false)?.in_ring(&ring)?;
        if let Some(p) = perturb.filter(|p| 1 + (p.index % k_max as usize) as u32 == k) {
            let keys: Vec<_> = product.terms().keys().cloned().collect();
            let m = keys[(p.index / k_max as usize) % keys.len()].clone();
            let bump = RingElement::monomial(&ring, m, Cyclotomic::from_rational(p.delta.clone()));
            product = product.add(&bump)?;
        }
        let closed = closed_form_ch_w(&ring, k)?;
        for (label, got) in [("line factors", &product), ("tensor line", &tensor)] {
            let diff = got.sub(&closed)?;
            if let Some((m, c)) = diff.terms().iter().next() {
                let w = witness(
                    format!("k={k}, monomial {}", ring_monomial(&ring, m)),
                    format!("{label} differs from the closed form by {c}"),
                );
                return Ok(finish("ch-w", &params, start, w));
            }
        }
    }
    Ok(finish("ch-w", &params, start, None))
}

fn ring_monomial(ring: &crate::gring::GradedRing, m: &crate::gring::Monomial) -> String {
    crate::gring::format_monomial(ring, m)
}

/// The verifier catalogue, addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verifier {
    CothCancellation,
    CothBernoulli,
    SqrtClaim,
    AhatCp,
    AhatKp,
    ChW,
}

impl Verifier {
    pub const ALL: [Verifier; 6] = [
        Verifier::CothCancellation,
        Verifier::CothBernoulli,
        Verifier::SqrtClaim,
        Verifier::AhatCp,
        Verifier::AhatKp,
        Verifier::ChW,
    ];

    /// Name of the size parameter.
    pub fn parameter(self) -> &'static str {
        match self {
            Verifier::CothCancellation => "n",
            Verifier::CothBernoulli => "T",
            Verifier::SqrtClaim => "N",
            Verifier::AhatCp | Verifier::AhatKp => "q_max",
            Verifier::ChW => "k_max",
        }
    }

    pub fn default_size(self) -> usize {
        match self {
            Verifier::CothCancellation => 4,
            Verifier::CothBernoulli => 19,
            Verifier::SqrtClaim => 30,
            Verifier::AhatCp => 12,
            Verifier::AhatKp => 6,
            Verifier::ChW => 5,
        }
    }

    pub fn run(self, size: usize, perturb: Option<&Perturbation>) -> Result<IdentityResult> {
        let s32 = u32::try_from(size).map_err(|_| Error::InvalidArgument("size out of range".into()))?;
        match self {
            Verifier::CothCancellation => verify_coth_cancellation(size, perturb),
            Verifier::CothBernoulli => verify_coth_bernoulli(size, perturb),
            Verifier::SqrtClaim => verify_sqrt_claim(size, perturb),
            Verifier::AhatCp => verify_ahat_cp(s32, perturb),
            Verifier::AhatKp => verify_ahat_kp(s32, perturb),
            Verifier::ChW => verify_ch_w(s32, perturb),
        }
    }
}

impl fmt::Display for Verifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verifier::CothCancellation => "coth-cancellation",
            Verifier::CothBernoulli => "coth-bernoulli",
            Verifier::SqrtClaim => "sqrt-claim",
            Verifier::AhatCp => "ahat-cp",
            Verifier::AhatKp => "ahat-kp",
            Verifier::ChW => "ch-w",
        })
    }
}

impl FromStr for Verifier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Verifier::ALL
            .into_iter()
            .find(|v| v.to_string() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown identity `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(index: usize, delta: Rational) -> Perturbation {
        Perturbation { index, delta }
    }

    #[test]
    fn coth_cancellation_small_n() {
        for n in 1..=4 {
            let r = verify_coth_cancellation(n, None).unwrap();
            assert!(r.verdict, "n={n}: {:?}", r.witness);
            assert!(r.witness.is_none());
        }
        assert!(verify_coth_cancellation(0, None).is_err());
        let r = verify_coth_cancellation(2, Some(&bump(3, rat(1, 7)))).unwrap();
        assert!(!r.verdict);
        assert!(r.witness.unwrap().location.starts_with("monomial"));
    }

    #[test]
    fn coth_bernoulli() {
        let r = verify_coth_bernoulli(19, None).unwrap();
        assert!(r.verdict, "{:?}", r.witness);
        let c = NamedSeries::Coth.build(3);
        assert_eq!(c.coefficient(1).unwrap(), rat(1, 3));
        assert_eq!(c.coefficient(3).unwrap(), rat(-1, 45));
        let r = verify_coth_bernoulli(5, Some(&bump(2, rat(1, 2)))).unwrap();
        assert_eq!(r.witness.unwrap().location, "z^1");
    }

    #[test]
    fn sqrt_claim() {
        let a = crate::series::sqrt_taylor_coeffs(3);
        assert_eq!(a[1..], [rat(1, 2), rat(-1, 8), rat(1, 16)]);
        assert!(verify_sqrt_claim(30, None).unwrap().verdict);
        let r = verify_sqrt_claim(10, Some(&bump(4, rat(-1, 1024)))).unwrap();
        assert_eq!(r.witness.unwrap().location, "recurrence at n=5");
    }

    #[test]
    fn ahat_routes() {
        assert_eq!(ahat_cp_ring(2).unwrap(), rat(-1, 8));
        assert_eq!(ahat_cp_extraction(2), rat(-1, 8));
        assert_eq!(ahat_cp_ring(3).unwrap(), int(0));
        assert_eq!(ahat_cp_extraction(4), rat(3, 128));
        assert!(verify_ahat_cp(8, None).unwrap().verdict);
        assert!(verify_ahat_kp(6, None).unwrap().verdict);
        assert!(ahat_kp(2).unwrap().is_zero());
        let r = verify_ahat_cp(6, Some(&bump(2, rat(1, 3)))).unwrap();
        assert_eq!(r.witness.unwrap().location, "q=3");
        let r = verify_ahat_kp(5, Some(&bump(1, rat(1, 3)))).unwrap();
        assert_eq!(r.witness.unwrap().location, "q=3");
    }

    #[test]
    fn ch_w() {
        assert!(verify_ch_w(4, None).unwrap().verdict);
        let r = verify_ch_w(3, Some(&bump(2, int(1)))).unwrap();
        assert!(r.witness.unwrap().location.starts_with("k=3"));
    }

    #[test]
    fn catalogue_names() {
        for v in Verifier::ALL {
            assert_eq!(v.to_string().parse::<Verifier>().unwrap(), v);
        }
        assert_eq!("coth_cancellation".parse::<Verifier>().unwrap(), Verifier::CothCancellation);
        assert!("riemann".parse::<Verifier>().is_err());
    }

    #[test]
    fn results_serialize_without_timing() {
        let a = serde_json::to_string(&verify_sqrt_claim(4, None).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_sqrt_claim(4, None).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, r#"{"name":"sqrt-claim","params":{"N":"4"},"verdict":true,"witness":null}"#);
    }
}
