use super::*;
use crate::arith::{int, Rational};
use crate::gring::GradedRing;
use crate::spaces::{
    build_atiyah_fibration, build_sphere_circle_leaves, build_torus_leaves, build_universal_example, point,
};
use proptest::prelude::*;

fn i() -> Cyclotomic {
    Cyclotomic::i()
}

fn ci(n: i64) -> Cyclotomic {
    Cyclotomic::from_int(n)
}

fn i_sqrt2() -> Cyclotomic {
    // ζ₈ + ζ₈³ = i√2
    &Cyclotomic::root_of_unity(8, 1) + &Cyclotomic::root_of_unity(8, 3)
}

fn all_complexes() -> Vec<Complex> {
    vec![
        Complex::DeRham,
        Complex::Signature,
        Complex::Dolbeault(0),
        Complex::Dolbeault(1),
        Complex::Spin(Lift::Plus),
        Complex::Spin(Lift::Minus),
    ]
}

#[test]
fn pinned_local_characters() {
    let r = [Angle::right()];
    assert_eq!(local_index_character(Complex::DeRham, &r).unwrap(), ci(2));
    assert_eq!(local_index_character(Complex::Signature, &r).unwrap(), i().scale(&int(-2)));
    for j in 0..2 {
        let want = &(&i() + &ci(1)) - &ci(2 * j);
        assert_eq!(local_index_character(Complex::Dolbeault(j as u32), &r).unwrap(), want);
    }
    assert_eq!(local_index_character(Complex::Spin(Lift::Plus), &r).unwrap(), i_sqrt2());
    assert_eq!(local_index_character(Complex::Spin(Lift::Minus), &r).unwrap(), -i_sqrt2());
    assert!(matches!(
        local_index_character(Complex::DeRham, &[Angle::turns(0, 1).unwrap()]),
        Err(Error::NotNormalDirection)
    ));
    assert!(local_index_character(Complex::DeRham, &[]).is_err());
}

#[test]
fn complex_names_round_trip() {
    for c in all_complexes().into_iter().chain([Complex::Dolbeault(3)]) {
        assert_eq!(c.to_string().parse::<Complex>().unwrap(), c);
    }
    assert_eq!("de-rham".parse::<Complex>().unwrap(), Complex::DeRham);
    assert!("hodge".parse::<Complex>().is_err());
}

fn universal_value(k: u32, complex: Complex, route: Route, current: &str) -> Cyclotomic {
    let comps = build_universal_example(k).unwrap();
    let cur = Current::dual_named(comps[0].base_ring().unwrap(), current).unwrap();
    lefschetz(route, &comps, &SymbolDatum::Classical(complex), &cur, None).unwrap().value
}

#[test]
fn universal_example_values() {
    let expect = |c: Complex| match c {
        Complex::DeRham => ci(2),
        Complex::Signature => i().scale(&int(-2)),
        Complex::Dolbeault(j) => &(&i() + &ci(1)) - &ci(2 * j as i64),
        Complex::Spin(l) => i_sqrt2().scale(&int(l.sign())),
    };
    for c in all_complexes() {
        for route in [Route::Strict, Route::General, Route::Basic3] {
            assert_eq!(universal_value(1, c, route, "eta1*beta1"), expect(c), "{c} {route}");
            assert_eq!(universal_value(1, c, route, "1"), expect(c), "{c} {route}");
            assert!(universal_value(1, c, route, "eta1").is_zero());
        }
    }
    assert_eq!(universal_value(2, Complex::Signature, Route::Strict, "eta1*beta1*eta2*beta2"), i().scale(&int(-2)));
}

#[test]
fn universal_report_shape() {
    let comps = build_universal_example(1).unwrap();
    let cur = Current::dual_named(comps[0].base_ring().unwrap(), "eta1*beta1").unwrap();
    let rep = lefschetz_strict(&comps, &SymbolDatum::Classical(Complex::Spin(Lift::Plus)), &cur).unwrap();
    assert_eq!(rep.integrality, Integrality { kappa: 8, verdict: true });
    assert_eq!(rep.components.len(), 2);
    for t in &rep.components {
        assert!(t.factors.denominator.ends_with("= 2"), "{}", t.factors.denominator);
        let cur = current_on(&cur, t.haefliger_class.ring()).unwrap();
        assert_eq!(cur.pair(&t.haefliger_class).unwrap(), t.value);
    }
    let a = serde_json::to_string(&rep).unwrap();
    let b = serde_json::to_string(&lefschetz_strict(&comps, &SymbolDatum::Classical(Complex::Spin(Lift::Plus)), &cur).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"complex\":\"spin+\""));
}

#[test]
fn integrality_verdicts() {
    let comps = build_universal_example(1).unwrap();
    let de_rham = integrality_characteristic_number(&comps, &SymbolDatum::Classical(Complex::DeRham), None, Some(8))
        .unwrap();
    assert_eq!(de_rham.value, ci(2));
    assert!(de_rham.integrality.verdict);
    for l in [Lift::Plus, Lift::Minus] {
        let s = integrality_characteristic_number(&comps, &SymbolDatum::Classical(Complex::Spin(l)), None, Some(8))
            .unwrap();
        assert_eq!(s.value, i_sqrt2().scale(&int(l.sign())));
        assert!(s.integrality.verdict);
    }
    let sig = i().scale(&int(-2));
    assert!(!Integrality::check(&sig, 2).verdict);
    assert!(Integrality::check(&sig, 4).verdict);
    assert!(!Integrality::check(&sig.scale(&crate::arith::rat(1, 3)), 8).verdict);
}

/// Strict transversal T² ⊗ Q[a]/a³ with a nonzero normal root.
fn curved_ring() -> Arc<GradedRing> {
    let r = GradedRing::builder("Ta")
        .var_nil("a", 2, 3)
        .unwrap()
        .var("eta1", 1)
        .unwrap()
        .var("beta1", 1)
        .unwrap()
        .build()
        .unwrap();
    GradedRing::strict_transversal(&r).unwrap()
}

fn curved_component(theta: Angle, root: &str, minus1: Option<&str>, twist: &str) -> FixedComponentModel {
    let ring = curved_ring();
    let el = |s: &str| RingElement::parse(&ring, s).unwrap();
    let mut c = FixedComponentModel::strict("curved", &ring).unwrap();
    c.ring = ring.clone();
    c.tf = EquivariantBundle::trivial("TF^h", BundleKind::Real, &ring, 0);
    let n = EquivariantBundle::complex("N", &ring, vec![(el(root), theta.weight())]).unwrap();
    c.normal_theta.push((theta, n));
    if let Some(x) = minus1 {
        c.normal_minus1 = Some(EquivariantBundle::real("N-", &ring, vec![(el(x), ci(-1))]).unwrap());
    }
    c.twist = Some(EquivariantBundle::complex("W", &ring, vec![(el(twist), Cyclotomic::root_of_unity(3, 1))]).unwrap());
    c.currents = Current::all_duals(c.base_ring().unwrap());
    c
}

#[test]
fn general_and_basic3_agree_with_curvature() {
    let c = curved_component(Angle::pi_fraction(2, 3).unwrap(), "a", Some("2*a + eta1*beta1"), "a - eta1*beta1");
    for complex in [Complex::DeRham, Complex::Signature, Complex::Dolbeault(1), Complex::Spin(Lift::Minus)] {
        let sym = SymbolDatum::Classical(complex);
        for cur in &c.currents {
            let g = lefschetz_general(std::slice::from_ref(&c), &sym, cur).unwrap();
            let b = lefschetz_basic3(std::slice::from_ref(&c), &sym, cur).unwrap();
            assert_eq!(g.value, b.value, "{complex} {}", cur.name());
        }
        // strict needs flat normal data
        assert!(lefschetz_strict(std::slice::from_ref(&c), &sym, &c.currents[0]).is_err());
    }
}

#[test]
fn flat_normal_data_reduces_to_ch_over_det() {
    let c = curved_component(Angle::pi_fraction(1, 3).unwrap(), "0", Some("0"), "a");
    let s = r_class(c.normal_minus1.as_ref().unwrap()).unwrap();
    assert_eq!(s, RingElement::one(&c.ring));
    // s₁ = 2 contributes 2² to the determinant
    assert_eq!(det_of(&c).unwrap(), ci(4));
    for complex in all_complexes() {
        let sym = SymbolDatum::Classical(complex);
        for cur in &c.currents {
            let st = lefschetz_strict(std::slice::from_ref(&c), &sym, cur).unwrap().value;
            assert_eq!(st, lefschetz_general(std::slice::from_ref(&c), &sym, cur).unwrap().value);
            assert_eq!(st, lefschetz_basic3(std::slice::from_ref(&c), &sym, cur).unwrap().value);
        }
    }
}

#[test]
fn explicit_symbols_are_linear() {
    let c = curved_component(Angle::right(), "a", None, "eta1*beta1");
    let ring = c.ring.clone();
    let e = |s: &str, name: &str| SymbolDatum::Explicit {
        name: name.into(),
        numerator: RingElement::parse(&ring, s).unwrap(),
    };
    let cur = Current::dual_named(c.base_ring().unwrap(), "a*eta1*beta1").unwrap();
    let one = std::slice::from_ref(&c);
    let v1 = lefschetz_general(one, &e("1 + a", "x"), &cur).unwrap().value;
    let v2 = lefschetz_general(one, &e("i*a^2", "y"), &cur).unwrap().value;
    let v12 = lefschetz_general(one, &e("1 + a + i*a^2", "x+y"), &cur).unwrap().value;
    assert_eq!(&v1 + &v2, v12);
    let c2 = cur.scaled(&ci(3)).plus(&Current::measure(c.base_ring().unwrap(), ci(1))).unwrap();
    let v = lefschetz_general(one, &e("1 + a", "x"), &c2).unwrap().value;
    let m = lefschetz_general(one, &e("1 + a", "x"), &Current::measure(c.base_ring().unwrap(), ci(1))).unwrap().value;
    assert_eq!(v, &v1.scale(&int(3)) + &m);
}

#[test]
fn conjugation_conjugates_the_value() {
    let theta = Angle::pi_fraction(2, 5).unwrap();
    let c = curved_component(theta, "a", Some("a"), "a - eta1*beta1");
    let mut cc = c.clone();
    let conj_bundle = |b: &EquivariantBundle| {
        let roots = b.roots().iter().map(|(x, w)| (x.clone(), w.conj())).collect();
        match b.kind {
            BundleKind::Complex => EquivariantBundle::complex(&b.name, b.ring(), roots).unwrap(),
            BundleKind::Real => EquivariantBundle::real(&b.name, b.ring(), roots).unwrap(),
        }
    };
    cc.normal_theta = c.normal_theta.iter().map(|(t, n)| (*t, conj_bundle(n))).collect();
    cc.normal_minus1 = c.normal_minus1.as_ref().map(conj_bundle);
    cc.twist = c.twist.as_ref().map(conj_bundle);
    for complex in all_complexes() {
        let sym = SymbolDatum::Classical(complex);
        for cur in &c.currents {
            let v = lefschetz_general(std::slice::from_ref(&c), &sym, cur).unwrap().value;
            let w = lefschetz_general(std::slice::from_ref(&cc), &sym, cur).unwrap().value;
            // the weight −1 is self-conjugate, so its half weight i is kept
            // instead of flipping to −i: the other spin lift
            let want = match complex {
                Complex::Spin(_) => -v.conj(),
                _ => v.conj(),
            };
            assert_eq!(w, want, "{complex} {}", cur.name());
        }
    }
}

/// S² fibered over T²: TF^h has half-root x = 2s with ∫ s = 1.
fn sphere_over_torus(mult: u32) -> FixedComponentModel {
    let s2 = GradedRing::builder("S2").var_nil("s", 2, 2).unwrap().build().unwrap();
    let t2 = crate::spaces::torus_ring(1).unwrap();
    let ring = GradedRing::fibered(&s2, &t2).unwrap();
    let x = RingElement::parse(&ring, "2*s").unwrap();
    let zero = RingElement::zero(&ring);
    FixedComponentModel {
        name: "S2×T2".into(),
        tf: EquivariantBundle::real("TF^h", &ring, vec![(x, ci(1))]).unwrap(),
        normal_minus1: None,
        normal_theta: vec![(Angle::right(), EquivariantBundle::complex("N", &ring, vec![(zero, i())]).unwrap())],
        nu: None,
        twist: None,
        currents: Current::all_duals(ring.split().unwrap().base()),
        multiplicity: mult,
        ring,
    }
}

#[test]
fn de_rham_degenerates() {
    let c = sphere_over_torus(3);
    let one = std::slice::from_ref(&c);
    let sym = SymbolDatum::Classical(Complex::DeRham);
    for cur in &c.currents {
        let v = lefschetz_general(one, &sym, cur).unwrap().value;
        if cur.degree() == Some(0) {
            // multiplicity · χ(S²)
            assert_eq!(v, ci(6));
        } else {
            assert!(v.is_zero(), "{}", cur.name());
        }
    }
    let fund = Current::fundamental(c.base_ring().unwrap()).unwrap();
    assert!(lefschetz_general(one, &sym, &fund).unwrap().value.is_zero());
    let mass = Current::measure(c.base_ring().unwrap(), Cyclotomic::from_rational(crate::arith::rat(5, 2)));
    assert_eq!(lefschetz_general(one, &sym, &mass).unwrap().value, ci(15));
    assert_eq!(lefschetz_basic3(one, &sym, &mass).unwrap().value, ci(15));
    // other complexes need an explicit symbol here
    assert!(lefschetz_general(one, &SymbolDatum::Classical(Complex::Signature), &mass).is_err());
}

#[test]
fn rigidity_models() {
    for s in [int(1), int(-3), crate::arith::rat(7, 2)] {
        let m = build_atiyah_fibration(&s).unwrap();
        let rep = rigidity_obstruction(&m, m.current("dvol").unwrap()).unwrap();
        assert_eq!(rep.value, Cyclotomic::from_rational(-s.clone() / Rational::from_integer(24.into())));
        assert_eq!(rep.verdict, RigidityVerdict::Obstructed);
    }
    for m in [build_sphere_circle_leaves(2).unwrap(), build_torus_leaves(1).unwrap()] {
        for cur in &m.currents {
            let rep = rigidity_obstruction(&m, cur).unwrap();
            assert!(rep.value.is_zero());
            assert_eq!(rep.verdict, RigidityVerdict::Inconclusive);
        }
    }
}

#[test]
fn bott_taubes() {
    let mut p = point();
    let mass = Current::measure(&p.ring, ci(1));
    for rank in [0, 2, 4] {
        p.tangent_roots = Some(EquivariantBundle::trivial("TF", BundleKind::Real, &p.ring, rank));
        assert_eq!(bott_taubes_value(&p, BottTaubesVariant::Signature, 0, 0, &mass).unwrap(), ci(1));
    }
    p.tangent_roots = Some(EquivariantBundle::trivial("TF", BundleKind::Real, &p.ring, 2));
    assert_eq!(bott_taubes_value(&p, BottTaubesVariant::Signature, 1, 3, &mass).unwrap(), ci(4));
    assert_eq!(bott_taubes_value(&p, BottTaubesVariant::Spin, 1, 3, &mass).unwrap(), ci(2));
    assert!(matches!(
        bott_taubes_value(&p, BottTaubesVariant::Signature, 4, 3, &mass),
        Err(Error::OrderExceeded { .. })
    ));
    // n = 0 on the Atiyah model is ⟨∫_F L(TF), dvol⟩ = s/3
    let m = build_atiyah_fibration(&int(3)).unwrap();
    let v = bott_taubes_value(&m, BottTaubesVariant::Signature, 0, 2, m.current("dvol").unwrap()).unwrap();
    assert_eq!(v, ci(1));
}

fn angle_strategy() -> impl Strategy<Value = Angle> {
    (2i64..=12).prop_flat_map(|m| (1..m).prop_map(move |a| Angle::turns(a, m).unwrap()))
        .prop_filter("open half", |t| t.in_open_half())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routes_agree_on_curved_components(
        theta in angle_strategy(),
        r in -3i64..=3, s in -3i64..=3, t in -2i64..=2,
        with_minus in any::<bool>(),
        cidx in 0usize..6,
    ) {
        let root = format!("{r}*a + {t}*eta1*beta1");
        let minus = format!("{s}*a");
        let c = curved_component(theta, &root, with_minus.then_some(minus.as_str()), &format!("{s}*a + eta1*beta1"));
        let sym = SymbolDatum::Classical(all_complexes()[cidx]);
        for cur in &c.currents {
            let g = lefschetz_general(std::slice::from_ref(&c), &sym, cur).unwrap().value;
            let b = lefschetz_basic3(std::slice::from_ref(&c), &sym, cur).unwrap().value;
            prop_assert_eq!(g, b);
        }
    }
}
