//! Builders for the concrete cohomology models and fixed-point data.

use std::sync::Arc;

use crate::arith::{Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::genera::{Angle, BundleKind, EquivariantBundle, TotalClassBundle};
use crate::gring::{Current, GradedRing, RingElement};

/// A closed manifold (or foliated model) with the tangent data used
/// downstream. For foliated models `tangent` is the leafwise tangent TF.
#[derive(Clone, Debug)]
pub struct SpaceModel {
    pub name: String,
    pub ring: Arc<GradedRing>,
    /// Real dimension.
    pub dimension: u32,
    pub tangent_class: Option<TotalClassBundle>,
    pub tangent_roots: Option<EquivariantBundle>,
    /// Further named bundles, e.g. the twisting bundle W.
    pub bundles: Vec<EquivariantBundle>,
    /// Named currents, for foliated models on the transverse ring.
    pub currents: Vec<Current>,
}

impl SpaceModel {
    fn new(name: impl Into<String>, ring: Arc<GradedRing>, dimension: u32) -> Self {
        Self {
            name: name.into(),
            ring,
            dimension,
            tangent_class: None,
            tangent_roots: None,
            bundles: Vec::new(),
            currents: Vec::new(),
        }
    }

    pub fn bundle(&self, name: &str) -> Result<&EquivariantBundle> {
        self.bundles
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| Error::InvalidArgument(format!("model has no bundle `{name}`")))
    }

    pub fn current(&self, name: &str) -> Result<&Current> {
        self.currents
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("model has no current `{name}`")))
    }
}

/// A component of V^h: its ring (split into leafwise fiber F^h and
/// transverse base), the leafwise tangent TF^h, the decomposition of the
/// normal bundle N^h under h, and the data restricted to it.
#[derive(Clone, Debug)]
pub struct FixedComponentModel {
    pub name: String,
    pub ring: Arc<GradedRing>,
    /// Real bundle; rank 0 for a strict transversal.
    pub tf: EquivariantBundle,
    /// N^h(−1) as a real bundle with weights −1.
    pub normal_minus1: Option<EquivariantBundle>,
    /// N^h(θ) for 0 < θ < π, complex with common weight e^{iθ}.
    pub normal_theta: Vec<(Angle, EquivariantBundle)>,
    /// Transverse normal bundle ν^h (real); trivial when absent.
    pub nu: Option<EquivariantBundle>,
    /// Twisting bundle restricted to the component, with its weights.
    pub twist: Option<EquivariantBundle>,
    /// Currents on the transverse (base) ring.
    pub currents: Vec<Current>,
    pub multiplicity: u32,
}

impl FixedComponentModel {
    /// A strict transversal: TF^h = 0 and fiber integration is the identity.
    pub fn strict(name: &str, ring: &Arc<GradedRing>) -> Result<Self> {
        let ring = GradedRing::strict_transversal(ring)?;
        Ok(Self {
            name: name.into(),
            tf: EquivariantBundle::trivial("TF^h", BundleKind::Real, &ring, 0),
            ring,
            normal_minus1: None,
            normal_theta: Vec::new(),
            nu: None,
            twist: None,
            currents: Vec::new(),
            multiplicity: 1,
        })
    }

    pub fn base_ring(&self) -> Result<&Arc<GradedRing>> {
        Ok(self.ring.split().ok_or(Error::NoFiberSplit)?.base())
    }

    pub fn is_strict(&self) -> bool {
        self.tf.rank() == 0 && self.ring.split().is_some_and(|s| s.is_trivial())
    }

    pub fn current(&self, name: &str) -> Result<&Current> {
        self.currents
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("component has no current `{name}`")))
    }

    /// The angles of h on N^h, one per complex normal line; N^h(−1)
    /// contributes θ = π per half-root.
    pub fn normal_angles(&self) -> Vec<Angle> {
        let mut out = Vec::new();
        for (theta, n) in &self.normal_theta {
            out.extend(std::iter::repeat_n(*theta, n.roots().len()));
        }
        if let Some(n) = &self.normal_minus1 {
            out.extend(std::iter::repeat_n(Angle::pi_fraction(1, 1).unwrap(), n.roots().len()));
        }
        out
    }

    /// Real dimension of N^h(−1).
    pub fn s1(&self) -> u32 {
        self.normal_minus1.as_ref().map_or(0, |n| n.rank() as u32)
    }

    /// Order of h as seen by the normal weights (lcm of angle denominators).
    pub fn order_of_h(&self) -> usize {
        use num_integer::Integer;
        let mut m = 1usize;
        for (theta, _) in &self.normal_theta {
            m = m.lcm(&theta.order());
        }
        if self.normal_minus1.is_some() {
            m = m.lcm(&2);
        }
        m
    }

    /// N^h ⊗ C as a complex bundle.
    pub fn normal_complexified(&self) -> Result<EquivariantBundle> {
        let mut acc = EquivariantBundle::trivial("N⊗C", BundleKind::Complex, &self.ring, 0);
        for (_, n) in &self.normal_theta {
            acc = acc.direct_sum(&n.complexify())?;
        }
        if let Some(n) = &self.normal_minus1 {
            acc = acc.direct_sum(&n.complexify())?;
        }
        Ok(acc)
    }
}

/// Q[α]/α^{q+1}, deg α = 2, with p = (1 + α²)^{q+1}.
pub fn build_cp(q: u32) -> Result<SpaceModel> {
    if q < 1 {
        return Err(Error::InvalidArgument("CP_q needs q ≥ 1".into()));
    }
    let ring = GradedRing::builder(format!("CP{q}")).var_nil("alpha", 2, q + 1)?.build()?;
    let alpha = RingElement::var(&ring, "alpha")?;
    let p = RingElement::one(&ring).add(&alpha.mul(&alpha)?)?.pow(q + 1);
    let mut m = SpaceModel::new(format!("CP_{q}"), ring.clone(), 2 * q);
    m.tangent_class = Some(TotalClassBundle::pontryagin("TCP", p, 2 * q as usize)?);
    // stably q+1 copies of the hyperplane line
    let roots = vec![alpha; q as usize + 1];
    m.tangent_roots = Some(EquivariantBundle::plain("TCP", BundleKind::Real, &ring, roots)?);
    Ok(m)
}

/// Q[α]/α^{q}, deg α = 4 (q = qm1 + 1), with p = (1 + 4α)^{-1}(1 + α)^{2q}.
pub fn build_kp(qm1: u32) -> Result<SpaceModel> {
    if qm1 < 1 {
        return Err(Error::InvalidArgument("KP_{q-1} needs q ≥ 2".into()));
    }
    let q = qm1 + 1;
    let ring = GradedRing::builder(format!("KP{qm1}")).var_nil("alpha", 4, q)?.build()?;
    let alpha = RingElement::var(&ring, "alpha")?;
    let one = RingElement::one(&ring);
    let inv = one.add(&alpha.scale(&Cyclotomic::from_int(4)))?.inverse()?;
    let p = inv.mul(&one.add(&alpha)?.pow(2 * q))?;
    let mut m = SpaceModel::new(format!("KP_{qm1}"), ring, 4 * qm1);
    m.tangent_class = Some(TotalClassBundle::pontryagin("TKP", p, 4 * qm1 as usize)?);
    Ok(m)
}

/// The torus ring on η_1, β_1, …, η_k, β_k (degree 1, in that order).
pub fn torus_ring(k: u32) -> Result<Arc<GradedRing>> {
    let mut b = GradedRing::builder(format!("T{}", 2 * k));
    for i in 1..=k {
        b = b.var(&format!("eta{i}"), 1)?.var(&format!("beta{i}"), 1)?;
    }
    b.build()
}

/// The k pulled-back line bundles Ŵ_i with c₁ = η_iβ_i.
pub fn torus_w_factors(ring: &Arc<GradedRing>, k: u32) -> Result<Vec<EquivariantBundle>> {
    (1..=k)
        .map(|i| {
            let c1 = RingElement::parse(ring, &format!("eta{i}*beta{i}"))?;
            EquivariantBundle::plain(&format!("W{i}"), BundleKind::Complex, ring, vec![c1])
        })
        .collect()
}

/// T^{2k} with W = Ŵ_1 ⊗ ⋯ ⊗ Ŵ_k, a line bundle with root Σ η_iβ_i.
pub fn build_torus_with_w(k: u32) -> Result<SpaceModel> {
    if k < 1 {
        return Err(Error::InvalidArgument("torus needs k ≥ 1".into()));
    }
    let ring = torus_ring(k)?;
    let factors = torus_w_factors(&ring, k)?;
    let mut w = factors[0].clone();
    for f in &factors[1..] {
        w = w.tensor_lines(f)?;
    }
    w.name = "W".into();
    let mut m = SpaceModel::new(format!("T^{}", 2 * k), ring.clone(), 2 * k);
    m.tangent_roots = Some(EquivariantBundle::trivial("TT", BundleKind::Real, &ring, 2 * k as usize));
    m.bundles.push(w);
    Ok(m)
}

/// ∏_{i=1}^k (1 + η_iβ_i) written out directly.
pub fn closed_form_ch_w(ring: &Arc<GradedRing>, k: u32) -> Result<RingElement> {
    let mut acc = RingElement::one(ring);
    for i in 1..=k {
        acc = acc.mul(&RingElement::parse(ring, &format!("1 + eta{i}*beta{i}"))?)?;
    }
    Ok(acc)
}

/// The two fixed tori of the universal example. Each is a strict
/// transversal T^{2k}; h rotates the leafwise plane by π/2, TF restricted
/// to the torus is trivial, and W restricts with ch = ∏(1 + η_iβ_i).
/// Currents: the dual of every admissible monomial of T^{2k}.
pub fn build_universal_example(k: u32) -> Result<Vec<FixedComponentModel>> {
    let torus = build_torus_with_w(k)?;
    let mut out = Vec::new();
    for idx in 0..2 {
        let mut c = FixedComponentModel::strict(&format!("T^{}_{idx}", 2 * k), &torus.ring)?;
        let ring = c.ring.clone();
        let zero = RingElement::zero(&ring);
        let n = EquivariantBundle::complex("N(pi/2)", &ring, vec![(zero, Angle::right().weight())])?;
        c.normal_theta.push((Angle::right(), n));
        let w = torus.bundle("W")?;
        let roots = w
            .roots()
            .iter()
            .map(|(x, wt)| Ok((x.in_ring(&ring)?, wt.clone())))
            .collect::<Result<Vec<_>>>()?;
        c.twist = Some(EquivariantBundle::complex("W", &ring, roots)?);
        c.currents = Current::all_duals(c.base_ring()?);
        out.push(c);
    }
    Ok(out)
}

/// Atiyah's Z: Q[d]/d³, deg d = 2, ∫ d² = s, leafwise tangent with
/// half-root d (so p₁(TF) = d²).
pub fn build_atiyah_z(s: &Rational) -> Result<SpaceModel> {
    if num_traits::Zero::is_zero(s) {
        return Err(Error::ZeroAtiyahClass);
    }
    let ring = GradedRing::builder("Z")
        .var_nil("d", 2, 3)?
        .integration(vec![(vec![2], Cyclotomic::from_rational(s.clone()))])
        .build()?;
    let d = RingElement::var(&ring, "d")?;
    let mut m = SpaceModel::new("Z", ring.clone(), 4);
    m.tangent_roots = Some(EquivariantBundle::plain("TF", BundleKind::Real, &ring, vec![d])?);
    Ok(m)
}

/// The circle: Q[e]/e², ∫ e = 1.
pub fn circle_ring() -> Result<Arc<GradedRing>> {
    GradedRing::builder("S1").var("e", 1)?.build()
}

/// Z × S¹ foliated by the Z slices: fiber Z, base S¹, leafwise tangent from
/// Z, and the current C_e of the basic form e = dvol on S¹.
pub fn build_atiyah_fibration(s: &Rational) -> Result<SpaceModel> {
    let z = build_atiyah_z(s)?;
    let circle = circle_ring()?;
    let ring = GradedRing::fibered(&z.ring, &circle)?;
    let d = RingElement::var(&ring, "d")?;
    let mut m = SpaceModel::new("Z×S1", ring.clone(), 5);
    m.tangent_roots = Some(EquivariantBundle::plain("TF", BundleKind::Real, &ring, vec![d])?);
    let base = ring.split().unwrap().base().clone();
    let dvol = RingElement::var(&base, "e")?;
    m.currents.push(Current::basic(&dvol)?.with_name("dvol"));
    m.currents.push(Current::measure(&base, Cyclotomic::from_int(1)));
    Ok(m)
}

/// Leaves S^{2q−1} × S¹ over a circle: TF is stably trivial.
pub fn build_sphere_circle_leaves(q: u32) -> Result<SpaceModel> {
    if q < 1 {
        return Err(Error::InvalidArgument("S^{2q-1} needs q ≥ 1".into()));
    }
    let leaf = GradedRing::builder(format!("S{}xS1", 2 * q - 1))
        .var("sigma", 2 * q - 1)?
        .var("tau", 1)?
        .build()?;
    foliated_by(leaf, 2 * q, "S^{2q-1}×S^1 leaves")
}

/// Leaves T^{2k} over a circle: TF is trivial.
pub fn build_torus_leaves(k: u32) -> Result<SpaceModel> {
    let leaf = torus_ring(k)?;
    foliated_by(leaf, 2 * k, "T^{2k} leaves")
}

fn foliated_by(leaf: Arc<GradedRing>, leaf_dim: u32, name: &str) -> Result<SpaceModel> {
    let circle = circle_ring()?;
    let ring = GradedRing::fibered(&leaf, &circle)?;
    let mut m = SpaceModel::new(name, ring.clone(), leaf_dim + 1);
    m.tangent_roots = Some(EquivariantBundle::trivial("TF", BundleKind::Real, &ring, leaf_dim as usize));
    let base = ring.split().unwrap().base().clone();
    let dvol = RingElement::var(&base, "e")?;
    m.currents.push(Current::basic(&dvol)?.with_name("dvol"));
    m.currents.push(Current::measure(&base, Cyclotomic::from_int(1)));
    Ok(m)
}

/// Tensor product of the rings; bundles are not carried over.
pub fn product(a: &SpaceModel, b: &SpaceModel) -> Result<SpaceModel> {
    let ring = GradedRing::tensor(&a.ring, &b.ring)?;
    Ok(SpaceModel::new(format!("{}×{}", a.name, b.name), ring, a.dimension + b.dimension))
}

pub fn point() -> SpaceModel {
    SpaceModel::new("pt", GradedRing::point(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::genera::{genus_of_total_class, Genus};

    fn el(r: &Arc<GradedRing>, s: &str) -> RingElement {
        RingElement::parse(r, s).unwrap()
    }

    #[test]
    fn cp_models() {
        let m = build_cp(1).unwrap();
        assert!(el(&m.ring, "alpha^2").is_zero());
        for (q, want) in [(2, rat(-1, 8)), (4, rat(3, 128))] {
            let m = build_cp(q).unwrap();
            let b = m.tangent_class.as_ref().unwrap();
            let a = genus_of_total_class(&Genus::Ahat.series_for(&m.ring), b).unwrap();
            assert_eq!(a.integrate().unwrap(), Cyclotomic::from_rational(want));
        }
    }

    #[test]
    fn kp_models() {
        let m = build_kp(1).unwrap();
        assert_eq!(m.tangent_class.as_ref().unwrap().class, RingElement::one(&m.ring));
        let m = build_kp(2).unwrap();
        let want = el(&m.ring, "(1 - 4*alpha + 16*alpha^2)*(1 + alpha)^6");
        assert_eq!(m.tangent_class.as_ref().unwrap().class, want);
        for qm1 in 1..=5 {
            let m = build_kp(qm1).unwrap();
            assert_eq!(m.tangent_class.as_ref().unwrap().class.constant_term(), Cyclotomic::from_int(1));
        }
    }

    #[test]
    fn torus_with_w() {
        for k in 1..=5 {
            let m = build_torus_with_w(k).unwrap();
            let w = m.bundle("W").unwrap();
            let ch = crate::genera::chern_character(w, false).unwrap();
            assert_eq!(ch, closed_form_ch_w(&m.ring, k).unwrap());
            assert_eq!(ch.terms().len(), 1 << k);
            assert_eq!(ch.degrees().last(), Some(&(2 * k)));
        }
        let m = build_torus_with_w(1).unwrap();
        let ch = crate::genera::chern_character(m.bundle("W").unwrap(), false).unwrap();
        assert_eq!(ch, el(&m.ring, "1 + eta1*beta1"));
    }

    #[test]
    fn universal_example_shape() {
        let comps = build_universal_example(2).unwrap();
        assert_eq!(comps.len(), 2);
        for c in &comps {
            assert!(c.is_strict());
            assert_eq!(c.normal_angles(), vec![Angle::right()]);
            assert_eq!(c.currents.len(), 16);
            assert_eq!(c.order_of_h(), 4);
        }
    }

    #[test]
    fn atiyah() {
        assert!(matches!(build_atiyah_z(&int(0)), Err(Error::ZeroAtiyahClass)));
        let z = build_atiyah_z(&rat(3, 2)).unwrap();
        assert_eq!(el(&z.ring, "d^2").integrate().unwrap(), Cyclotomic::from_rational(rat(3, 2)));
        let f = build_atiyah_fibration(&rat(3, 2)).unwrap();
        assert!(f.ring.split().is_some());
        assert_eq!(f.current("dvol").unwrap().degree(), Some(0));
    }

    #[test]
    fn product_with_point() {
        let m = build_cp(3).unwrap();
        let p = product(&m, &point()).unwrap();
        assert_eq!(*p.ring, *m.ring);
    }

    #[test]
    fn product_is_associative_on_variable_order() {
        let a = build_cp(1).unwrap();
        let b = SpaceModel::new("S1", circle_ring().unwrap(), 1);
        let c = build_torus_with_w(1).unwrap();
        let left = product(&product(&a, &b).unwrap(), &c).unwrap();
        let right = product(&a, &product(&b, &c).unwrap()).unwrap();
        assert_eq!(*left.ring, *right.ring);
    }
}
