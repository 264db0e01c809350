use std::fmt;
use std::sync::Arc;

use crate::arith::Cyclotomic;
use crate::error::{Error, Result};

use super::element::{format_monomial, RingElement};
use super::ring::{GradedRing, Monomial};

#[derive(Clone, Debug, PartialEq)]
pub enum CurrentAtom {
    /// Reads the coefficient of a monomial.
    Dual(Monomial),
    /// The fundamental class: the integration functional.
    Fundamental,
    /// β ↦ ∫ β·α for a closed basic form α.
    Basic(RingElement),
}

/// A finite linear combination of current atoms on a ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Current {
    name: String,
    ring: Arc<GradedRing>,
    atoms: Vec<(Cyclotomic, CurrentAtom)>,
}

impl Current {
    pub fn dual(ring: &Arc<GradedRing>, m: Monomial) -> Result<Self> {
        if !ring.is_admissible(&m) {
            return Err(Error::InvalidArgument("dual monomial vanishes in the ring".into()));
        }
        let name = format_monomial(ring, &m);
        Ok(Self::from_atom(ring, name, CurrentAtom::Dual(m)))
    }

    /// Dual of the monomial written as `x*y^2` (or `1`).
    pub fn dual_named(ring: &Arc<GradedRing>, text: &str) -> Result<Self> {
        let e = RingElement::parse(ring, text)?;
        match e.terms().iter().collect::<Vec<_>>().as_slice() {
            [(m, c)] if **c == Cyclotomic::from_int(1) => {
                Self::dual(ring, (*m).clone())
            }
            _ => Err(Error::InvalidArgument(format!("`{text}` is not a monomial"))),
        }
    }

    /// The degree-0 current: a point mass of total `mass`.
    pub fn measure(ring: &Arc<GradedRing>, mass: Cyclotomic) -> Self {
        Self {
            name: "1".into(),
            ring: ring.clone(),
            atoms: vec![(mass, CurrentAtom::Dual(Monomial::one(ring.nvars())))],
        }
    }

    pub fn fundamental(ring: &Arc<GradedRing>) -> Result<Self> {
        ring.integration().ok_or(Error::NoIntegration)?;
        Ok(Self::from_atom(ring, "[fundamental]".into(), CurrentAtom::Fundamental))
    }

    pub fn basic(alpha: &RingElement) -> Result<Self> {
        alpha.ring().integration().ok_or(Error::NoIntegration)?;
        let name = format!("C[{alpha}]");
        Ok(Self::from_atom(alpha.ring(), name, CurrentAtom::Basic(alpha.clone())))
    }

    fn from_atom(ring: &Arc<GradedRing>, name: String, atom: CurrentAtom) -> Self {
        Self { name, ring: ring.clone(), atoms: vec![(Cyclotomic::from_int(1), atom)] }
    }

    /// Every admissible monomial's dual, in degree order.
    pub fn all_duals(ring: &Arc<GradedRing>) -> Vec<Current> {
        ring.monomials()
            .into_iter()
            .map(|m| Self::dual(ring, m).expect("admissible"))
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn atoms(&self) -> &[(Cyclotomic, CurrentAtom)] {
        &self.atoms
    }

    pub fn scaled(&self, c: &Cyclotomic) -> Self {
        let atoms = self.atoms.iter().map(|(w, a)| (w * c, a.clone())).collect();
        Self { name: format!("({c})·{}", self.name), ring: self.ring.clone(), atoms }
    }

    pub fn plus(&self, other: &Current) -> Result<Self> {
        if !GradedRing::same(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Ok(Self { name: format!("{} + {}", self.name, other.name), ring: self.ring.clone(), atoms })
    }

    /// Degree of the classes this current reads, when it is homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.atoms.iter().map(|(_, a)| match a {
            CurrentAtom::Dual(m) => Some(self.ring.degree(m)),
            CurrentAtom::Fundamental => self.ring.top_degree(),
            CurrentAtom::Basic(alpha) => {
                Some(self.ring.top_degree()?.checked_sub(alpha.homogeneous_degree()?)?)
            }
        });
        let first = degs.next()??;
        degs.all(|d| d == Some(first)).then_some(first)
    }

    /// ⟨a, C⟩.
    pub fn pair(&self, a: &RingElement) -> Result<Cyclotomic> {
        if !GradedRing::same(&self.ring, a.ring()) {
            return Err(Error::RingMismatch);
        }
        let mut acc = Cyclotomic::from_int(0);
        for (w, atom) in &self.atoms {
            let v = match atom {
                CurrentAtom::Dual(m) => a.coefficient(m),
                CurrentAtom::Fundamental => a.integrate()?,
                CurrentAtom::Basic(alpha) => a.mul(&alpha.in_ring(a.ring())?)?.integrate()?,
            };
            acc = &acc + &(w * &v);
        }
        Ok(acc)
    }

    /// The same current on a ring with identical algebra.
    pub fn in_ring(&self, ring: &Arc<GradedRing>) -> Result<Self> {
        if !self.ring.same_algebra(ring) {
            return Err(Error::RingMismatch);
        }
        let atoms = self
            .atoms
            .iter()
            .map(|(w, a)| {
                let a = match a {
                    CurrentAtom::Basic(alpha) => CurrentAtom::Basic(alpha.in_ring(ring)?),
                    other => other.clone(),
                };
                Ok((w.clone(), a))
            })
            .collect::<Result<_>>()?;
        Ok(Self { name: self.name.clone(), ring: ring.clone(), atoms })
    }
}

pub fn pair_current(a: &RingElement, c: &Current) -> Result<Cyclotomic> {
    c.pair(a)
}

impl fmt::Display for Current {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
