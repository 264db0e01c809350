//! Higher Lefschetz numbers assembled from fixed-point data, rigidity
//! obstructions, the integrality characteristic number and the Bott–Taubes
//! pairings.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::arith::{rat, Cyclotomic};
use crate::error::{Error, Result};
use crate::genera::{
    chern_character, det_one_minus_h, euler_class, genus_of_roots, genus_of_total_class, lambda_minus1_ch,
    r_class, rigidity_r_coeff, rigidity_r_prime_coeff, s_theta_class, Angle, BundleKind, EquivariantBundle, Genus,
};
use crate::gring::{Current, GradedRing, RingElement};
use crate::spaces::{FixedComponentModel, SpaceModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lift {
    Plus,
    Minus,
}

impl Lift {
    fn sign(self) -> i64 {
        match self {
            Lift::Plus => 1,
            Lift::Minus => -1,
        }
    }
}

/// The classical elliptic complexes along the leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Complex {
    DeRham,
    Signature,
    Dolbeault(u32),
    Spin(Lift),
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Complex::DeRham => f.write_str("de_rham"),
            Complex::Signature => f.write_str("signature"),
            Complex::Dolbeault(j) => write!(f, "dolbeault:{j}"),
            Complex::Spin(Lift::Plus) => f.write_str("spin+"),
            Complex::Spin(Lift::Minus) => f.write_str("spin-"),
        }
    }
}

impl FromStr for Complex {
    type Err = Error;

    /// `de_rham`, `signature`, `dolbeault[:j]`, `spin[+|-]`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        let bad = || Error::InvalidArgument(format!("unknown complex `{s}`"));
        Ok(match t.as_str() {
            "de_rham" | "derham" => Complex::DeRham,
            "signature" => Complex::Signature,
            "dolbeault" => Complex::Dolbeault(0),
            "spin" | "spin+" => Complex::Spin(Lift::Plus),
            // `spin-` became `spin_` above
            "spin_" => Complex::Spin(Lift::Minus),
            _ => match t.strip_prefix("dolbeault:") {
                Some(j) => Complex::Dolbeault(j.parse().map_err(|_| bad())?),
                None => return Err(bad()),
            },
        })
    }
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The h-equivariant symbol restricted to V^h.
#[derive(Clone, Debug)]
pub enum SymbolDatum {
    Classical(Complex),
    /// ch(i*σ)(h) given directly; moved into each component ring.
    Explicit { name: String, numerator: RingElement },
}

impl SymbolDatum {
    pub fn label(&self) -> String {
        match self {
            SymbolDatum::Classical(c) => c.to_string(),
            SymbolDatum::Explicit { name, .. } => format!("explicit:{name}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Strict,
    General,
    Basic3,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Strict => "strict",
            Route::General => "general",
            Route::Basic3 => "basic3",
        })
    }
}

fn as_display<T: fmt::Display, S: Serializer>(t: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(t)
}

/// Which operation produced each factor, with its value.
#[derive(Clone, Debug, Serialize)]
pub struct Factors {
    pub numerator: String,
    pub denominator: String,
    pub todd: String,
    pub fiber_integral: String,
    pub current: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentTerm {
    pub component: String,
    pub multiplicity: u32,
    /// The integrand on V^h before fiber integration.
    #[serde(serialize_with = "as_display")]
    pub local_term: RingElement,
    /// Its fiber integral, a class on the transverse ring.
    #[serde(serialize_with = "as_display")]
    pub haefliger_class: RingElement,
    /// multiplicity · ⟨haefliger_class, current⟩.
    pub value: Cyclotomic,
    pub factors: Factors,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Integrality {
    pub kappa: usize,
    pub verdict: bool,
}

impl Integrality {
    pub fn check(value: &Cyclotomic, kappa: usize) -> Self {
        Self { kappa, verdict: value.is_cyclotomic_integer(kappa) }
    }
}

/// Σ over fixed components, with the per-component terms.
#[derive(Clone, Debug, Serialize)]
pub struct LefschetzReport {
    pub route: Route,
    pub complex: String,
    pub current: String,
    pub value: Cyclotomic,
    pub integrality: Integrality,
    pub components: Vec<ComponentTerm>,
}

/// One complex normal line: root y, weight w = e^{iθ}, half weight e^{iθ/2}.
struct NormalLine {
    root: RingElement,
    weight: Cyclotomic,
    half: Cyclotomic,
}

fn half_weight_for(theta: &Angle, w: &Cyclotomic) -> Result<Cyclotomic> {
    let h = theta.half_weight();
    if h.pow(2) == *w {
        Ok(h)
    } else if h.conj().pow(2) == *w {
        Ok(h.conj())
    } else {
        Err(Error::InvalidArgument(format!("weight {w} does not match the angle {theta}")))
    }
}

fn normal_lines(c: &FixedComponentModel) -> Result<Vec<NormalLine>> {
    let mut out = Vec::new();
    for (theta, n) in &c.normal_theta {
        theta.check_open_half()?;
        for (y, w) in n.roots() {
            out.push(NormalLine { root: y.clone(), weight: w.clone(), half: half_weight_for(theta, w)? });
        }
    }
    if let Some(n) = &c.normal_minus1 {
        let pi = Angle::pi_fraction(1, 1)?;
        for (x, w) in n.roots() {
            out.push(NormalLine { root: x.clone(), weight: w.clone(), half: half_weight_for(&pi, w)? });
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument(format!("component `{}` has no normal directions", c.name)));
    }
    Ok(out)
}

/// Σ(−1)^i tr(h | E^i) at an isolated normal point with the given angles.
pub fn local_index_character(complex: Complex, thetas: &[Angle]) -> Result<Cyclotomic> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("empty angle list".into()));
    }
    if thetas.iter().any(Angle::is_zero) {
        return Err(Error::NotNormalDirection);
    }
    let weights: Vec<(Cyclotomic, Cyclotomic)> = thetas.iter().map(|t| (t.weight(), t.half_weight())).collect();
    Ok(character_from_weights(complex, &weights))
}

fn character_from_weights(complex: Complex, weights: &[(Cyclotomic, Cyclotomic)]) -> Cyclotomic {
    let one = Cyclotomic::from_int(1);
    let prod = |f: &dyn Fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic| {
        weights.iter().fold(one.clone(), |acc, (w, h)| &acc * &f(w, h))
    };
    match complex {
        Complex::DeRham => prod(&|w, _| &(&one - w) * &(&one - &w.conj())),
        Complex::Signature => prod(&|w, _| &w.conj() - w),
        Complex::Dolbeault(j) => {
            let ws: Vec<Cyclotomic> = weights.iter().map(|(w, _)| w.clone()).collect();
            &elementary(&ws, j as usize, one.clone(), |a, b| Ok(a * b), |a, b| Ok(a + b)).unwrap()
                * &prod(&|w, _| &one - &w.conj())
        }
        Complex::Spin(lift) => {
            prod(&|_, h| h - &h.conj()).scale(&rat(lift.sign(), 1))
        }
    }
}

/// e_j(a_1, …, a_r).
fn elementary<T: Clone>(
    items: &[T],
    j: usize,
    one: T,
    mul: impl Fn(&T, &T) -> Result<T>,
    add: impl Fn(&T, &T) -> Result<T>,
) -> Result<T> {
    // e[k] after processing a prefix; None stands for zero
    let mut e: Vec<Option<T>> = vec![None; j + 1];
    e[0] = Some(one);
    for a in items {
        for k in (1..=j).rev() {
            if let Some(prev) = &e[k - 1] {
                let t = mul(prev, a)?;
                e[k] = Some(match &e[k] {
                    Some(x) => add(x, &t)?,
                    None => t,
                });
            }
        }
    }
    e[j].clone().ok_or_else(|| Error::InvalidArgument(format!("no degree-{j} forms in the normal bundle")))
}

fn exp_of(y: &RingElement, scale: (i64, i64)) -> Result<RingElement> {
    y.scale_rational(&rat(scale.0, scale.1)).exp()
}

fn prod_lines(
    ring: &Arc<GradedRing>,
    lines: &[NormalLine],
    f: impl Fn(&NormalLine) -> Result<RingElement>,
) -> Result<RingElement> {
    let mut acc = RingElement::one(ring);
    for l in lines {
        acc = acc.mul(&f(l)?)?;
    }
    Ok(acc)
}

fn todd_tf(c: &FixedComponentModel) -> Result<RingElement> {
    if c.tf.rank() == 0 {
        return Ok(RingElement::one(&c.ring));
    }
    genus_of_roots(&Genus::Todd.series_for(&c.ring), &c.tf.complexify())
}

/// ch λ_{−1}(N^h ⊗ C)(h), required invertible.
fn lambda_denominator(c: &FixedComponentModel) -> Result<RingElement> {
    let (lam, invertible) = lambda_minus1_ch(&c.normal_complexified()?)?;
    if !invertible {
        return Err(Error::TrivialNormalWeight);
    }
    Ok(lam)
}

/// The class-level numerator ch(i*σ)(h) of a classical complex.
fn classical_numerator(c: &FixedComponentModel, complex: Complex) -> Result<RingElement> {
    let ring = &c.ring;
    let lines = normal_lines(c)?;
    if c.tf.rank() > 0 {
        // only de Rham has a closed form with leafwise directions
        if complex != Complex::DeRham {
            return Err(Error::InvalidArgument(format!(
                "{complex} on a component with leafwise directions needs an explicit symbol"
            )));
        }
        let e = euler_class(&c.tf)?;
        return e.mul(&todd_tf(c)?.inverse()?)?.mul(&lambda_denominator(c)?);
    }
    if complex != Complex::DeRham && c.normal_minus1.as_ref().is_some_and(|n| n.odd_line().is_some()) {
        return Err(Error::OddRank);
    }
    let one = RingElement::one(ring);
    match complex {
        Complex::DeRham => lambda_denominator(c),
        Complex::Signature => prod_lines(ring, &lines, |l| {
            exp_of(&l.root, (-1, 1))?.scale(&l.weight.conj()).sub(&exp_of(&l.root, (1, 1))?.scale(&l.weight))
        }),
        Complex::Dolbeault(j) => {
            let twisted: Vec<RingElement> =
                lines.iter().map(|l| Ok(exp_of(&l.root, (1, 1))?.scale(&l.weight))).collect::<Result<_>>()?;
            let ej = elementary(&twisted, j as usize, one.clone(), |a, b| a.mul(b), |a, b| a.add(b))?;
            ej.mul(&prod_lines(ring, &lines, |l| one.sub(&exp_of(&l.root, (-1, 1))?.scale(&l.weight.conj())))?)
        }
        Complex::Spin(lift) => Ok(prod_lines(ring, &lines, |l| {
            exp_of(&l.root, (1, 2))?.scale(&l.half).sub(&exp_of(&l.root, (-1, 2))?.scale(&l.half.conj()))
        })?
        .scale_rational(&rat(lift.sign(), 1))),
    }
}

fn numerator(c: &FixedComponentModel, symbol: &SymbolDatum) -> Result<(RingElement, String)> {
    match symbol {
        SymbolDatum::Classical(complex) => {
            let n = classical_numerator(c, *complex)?;
            let label = format!("ch i*σ({complex}) = {n}");
            Ok((n, label))
        }
        SymbolDatum::Explicit { name, numerator } => {
            let n = numerator.in_ring(&c.ring)?;
            let label = format!("explicit {name} = {n}");
            Ok((n, label))
        }
    }
}

fn twist_character(c: &FixedComponentModel) -> Result<RingElement> {
    match &c.twist {
        Some(w) => {
            if !GradedRing::same(w.ring(), &c.ring) {
                return Err(Error::RingMismatch);
            }
            chern_character(w, true)
        }
        None => Ok(RingElement::one(&c.ring)),
    }
}

fn det_of(c: &FixedComponentModel) -> Result<Cyclotomic> {
    let decomp: Vec<(Angle, u32)> = c.normal_theta.iter().map(|(t, n)| (*t, n.roots().len() as u32)).collect();
    let d = det_one_minus_h(&decomp, c.s1())?;
    if d.is_zero() {
        return Err(Error::TrivialNormalWeight);
    }
    Ok(d)
}

fn current_on(current: &Current, base: &Arc<GradedRing>) -> Result<Current> {
    if GradedRing::same(current.ring(), base) {
        Ok(current.clone())
    } else {
        current.in_ring(base)
    }
}

struct Assembled {
    local: RingElement,
    numerator: String,
    denominator: String,
    todd: String,
}

fn assemble(route: Route, c: &FixedComponentModel, symbol: &SymbolDatum) -> Result<Assembled> {
    let ch_w = twist_character(c)?;
    match route {
        Route::Strict => {
            if c.tf.rank() != 0 {
                return Err(Error::InvalidArgument(format!("component `{}` is not a strict transversal", c.name)));
            }
            let lines = normal_lines(c)?;
            if lines.iter().any(|l| !l.root.is_zero()) {
                return Err(Error::InvalidArgument(format!(
                    "strict route needs flat normal data on `{}`",
                    c.name
                )));
            }
            let (num, label) = match symbol {
                SymbolDatum::Classical(complex) => {
                    let ws: Vec<_> = lines.iter().map(|l| (l.weight.clone(), l.half.clone())).collect();
                    let v = character_from_weights(*complex, &ws);
                    let label = format!("local_index_character({complex}) = {v}");
                    (RingElement::constant(&c.ring, v), label)
                }
                SymbolDatum::Explicit { .. } => numerator(c, symbol)?,
            };
            let det = det_of(c)?;
            let local = num.mul(&ch_w)?.scale(&det.inv()?);
            Ok(Assembled {
                local,
                numerator: label,
                denominator: format!("det(1 - h | N^h) = {det}"),
                todd: "1".into(),
            })
        }
        Route::General => {
            let (num, label) = numerator(c, symbol)?;
            let lam = lambda_denominator(c)?;
            let td = todd_tf(c)?;
            let local = num.mul(&ch_w)?.mul(&lam.inverse()?)?.mul(&td)?;
            Ok(Assembled {
                local,
                numerator: label,
                denominator: format!("ch λ₋₁(N^h⊗C)(h) = {lam}"),
                todd: format!("Td(TF^h⊗C) = {td}"),
            })
        }
        Route::Basic3 => {
            let (num, label) = numerator(c, symbol)?;
            let det = det_of(c)?;
            let mut sr = RingElement::one(&c.ring);
            for (_, n) in &c.normal_theta {
                sr = sr.mul(&s_theta_class(n)?)?;
            }
            if let Some(n) = &c.normal_minus1 {
                sr = sr.mul(&r_class(n)?)?;
            }
            let td = todd_tf(c)?;
            let local = num.mul(&ch_w)?.scale(&det.inv()?).mul(&sr)?.mul(&td)?;
            Ok(Assembled {
                local,
                numerator: label,
                denominator: format!("det(1 - h | N^h) = {det}; ∏S^θ·R = {sr}"),
                todd: format!("Td(TF^h⊗C) = {td}"),
            })
        }
    }
}

/// The per-component term of a route.
pub fn component_term(
    route: Route,
    c: &FixedComponentModel,
    symbol: &SymbolDatum,
    current: &Current,
) -> Result<ComponentTerm> {
    let a = assemble(route, c, symbol)?;
    let class = a.local.fiber_integrate()?;
    let cur = current_on(current, class.ring())?;
    let paired = cur.pair(&class)?;
    let value = paired.scale(&rat(c.multiplicity as i64, 1));
    Ok(ComponentTerm {
        component: c.name.clone(),
        multiplicity: c.multiplicity,
        factors: Factors {
            numerator: a.numerator,
            denominator: a.denominator,
            todd: a.todd,
            fiber_integral: format!("{class}"),
            current: cur.name().to_string(),
        },
        local_term: a.local,
        haefliger_class: class,
        value,
    })
}

/// 2 · lcm of the orders of h on the normal bundles, so spin half weights
/// are included.
pub fn default_kappa(components: &[FixedComponentModel]) -> usize {
    2 * components.iter().fold(1usize, |m, c| m.lcm(&c.order_of_h()))
}

/// Σ_components multiplicity · ⟨fiber∫ local term, C⟩ along `route`.
pub fn lefschetz(
    route: Route,
    components: &[FixedComponentModel],
    symbol: &SymbolDatum,
    current: &Current,
    kappa: Option<usize>,
) -> Result<LefschetzReport> {
    let terms = components
        .iter()
        .map(|c| component_term(route, c, symbol, current))
        .collect::<Result<Vec<_>>>()?;
    let value = terms.iter().fold(Cyclotomic::from_int(0), |acc, t| &acc + &t.value);
    let kappa = kappa.unwrap_or_else(|| default_kappa(components));
    Ok(LefschetzReport {
        route,
        complex: symbol.label(),
        current: current.name().to_string(),
        integrality: Integrality::check(&value, kappa),
        value,
        components: terms,
    })
}

pub fn lefschetz_strict(
    components: &[FixedComponentModel],
    symbol: &SymbolDatum,
    current: &Current,
) -> Result<LefschetzReport> {
    lefschetz(Route::Strict, components, symbol, current, None)
}

pub fn lefschetz_general(
    components: &[FixedComponentModel],
    symbol: &SymbolDatum,
    current: &Current,
) -> Result<LefschetzReport> {
    lefschetz(Route::General, components, symbol, current, None)
}

pub fn lefschetz_basic3(
    components: &[FixedComponentModel],
    symbol: &SymbolDatum,
    current: &Current,
) -> Result<LefschetzReport> {
    lefschetz(Route::Basic3, components, symbol, current, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RigidityVerdict {
    Obstructed,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub model: String,
    pub current: String,
    #[serde(serialize_with = "as_display")]
    pub fiber_integral: RingElement,
    pub value: Cyclotomic,
    pub verdict: RigidityVerdict,
}

fn tangent_genus(model: &SpaceModel, genus: Genus) -> Result<RingElement> {
    let f = genus.series_for(&model.ring);
    if let Some(t) = &model.tangent_roots {
        genus_of_roots(&f, t)
    } else if let Some(t) = &model.tangent_class {
        genus_of_total_class(&f, t)
    } else {
        Err(Error::InvalidArgument(format!("model `{}` has no leafwise tangent data", model.name)))
    }
}

/// ⟨∫_F Â(TF), C⟩; nonzero forbids nontrivial isometric actions of compact
/// connected groups preserving the leaves.
pub fn rigidity_obstruction(model: &SpaceModel, current: &Current) -> Result<RigidityReport> {
    let ahat = tangent_genus(model, Genus::Ahat)?;
    let class = ahat.fiber_integrate()?;
    let cur = current_on(current, class.ring())?;
    let value = cur.pair(&class)?;
    let verdict = if value.is_zero() { RigidityVerdict::Inconclusive } else { RigidityVerdict::Obstructed };
    Ok(RigidityReport {
        model: model.name.clone(),
        current: cur.name().to_string(),
        fiber_integral: class,
        value,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BottTaubesVariant {
    /// ⟨L(TF) ch(R_n), C⟩.
    Signature,
    /// ⟨Â(TF) ch(R'_n), C⟩.
    Spin,
}

/// The coefficient pairings whose constancy in h expresses rigidity.
/// `order` is the q-order to which the product is expanded (at least n).
pub fn bott_taubes_value(
    model: &SpaceModel,
    variant: BottTaubesVariant,
    n: usize,
    order: usize,
    current: &Current,
) -> Result<Cyclotomic> {
    let tf = model
        .tangent_roots
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("Bott–Taubes pairing needs tangent roots".into()))?;
    if tf.kind != BundleKind::Real {
        return Err(Error::BundleKind("TF must be real".into()));
    }
    let f = tf.complexify();
    let (genus, r) = match variant {
        BottTaubesVariant::Signature => (Genus::L, rigidity_r_coeff(&f, n, order)?),
        BottTaubesVariant::Spin => (Genus::Ahat, rigidity_r_prime_coeff(&f, n, order)?),
    };
    let integrand = tangent_genus(model, genus)?.mul(&r)?;
    let class = if model.ring.split().is_some() { integrand.fiber_integrate()? } else { integrand };
    current_on(current, class.ring())?.pair(&class)
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicNumber {
    pub complex: String,
    pub value: Cyclotomic,
    pub integrality: Integrality,
}

/// Σ multiplicity · ∫_{V^h} ch(i*σ)(h)/ch λ₋₁(N^h⊗C)(h) · Td(TF^h⊗C) Â(ν^h) ch(Ê).
/// `e_hat` lives on the transverse ring and is pulled back to each component.
pub fn integrality_characteristic_number(
    components: &[FixedComponentModel],
    symbol: &SymbolDatum,
    e_hat: Option<&EquivariantBundle>,
    kappa: Option<usize>,
) -> Result<CharacteristicNumber> {
    let mut total = Cyclotomic::from_int(0);
    for c in components {
        let a = assemble(Route::General, c, symbol)?;
        let mut integrand = a.local;
        if let Some(nu) = &c.nu {
            integrand = integrand.mul(&genus_of_roots(&Genus::Ahat.series_for(&c.ring), nu)?)?;
        }
        if let Some(e) = e_hat {
            let roots = e
                .roots()
                .iter()
                .map(|(x, w)| Ok((x.lift_from_base(&c.ring)?, w.clone())))
                .collect::<Result<Vec<_>>>()?;
            let lifted = EquivariantBundle::complex(&e.name, &c.ring, roots)?;
            integrand = integrand.mul(&chern_character(&lifted, true)?)?;
        }
        let v = integrand.integrate()?;
        total = &total + &v.scale(&rat(c.multiplicity as i64, 1));
    }
    let kappa = kappa.unwrap_or_else(|| default_kappa(components));
    Ok(CharacteristicNumber {
        complex: symbol.label(),
        integrality: Integrality::check(&total, kappa),
        value: total,
    })
}

#[cfg(test)]
mod tests;
