use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::arith::Cyclotomic;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarTag {
    Fiber,
    Base,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVariable {
    pub name: String,
    pub degree: u32,
    /// x^n = 0 for `Some(n)`.
    pub nilpotency: Option<u32>,
    pub tag: VarTag,
}

impl GradedVariable {
    pub fn new(name: impl Into<String>, degree: u32, nilpotency: Option<u32>) -> Result<Self> {
        let name = name.into();
        if degree == 0 {
            return Err(Error::InvalidRing(format!("variable `{name}` must have positive degree")));
        }
        if !is_identifier(&name) {
            return Err(Error::InvalidRing(format!("`{name}` is not an identifier")));
        }
        if nilpotency == Some(0) {
            return Err(Error::InvalidRing(format!("nilpotency of `{name}` must be positive")));
        }
        let nilpotency = if degree % 2 == 1 {
            Some(nilpotency.map_or(2, |n| n.min(2)))
        } else {
            nilpotency
        };
        Ok(Self { name, degree, nilpotency, tag: VarTag::Base })
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Exponent vector in the ring's declared variable order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

#[derive(Clone, Debug)]
pub struct FiberSplit {
    pub(crate) base: Arc<GradedRing>,
    pub(crate) fiber_vars: Vec<usize>,
    pub(crate) base_vars: Vec<usize>,
    /// Fiber monomial (exponents over `fiber_vars`) to weight.
    pub(crate) functional: BTreeMap<Vec<u32>, Cyclotomic>,
}

impl FiberSplit {
    pub fn base(&self) -> &Arc<GradedRing> {
        &self.base
    }

    pub fn is_trivial(&self) -> bool {
        self.fiber_vars.is_empty()
    }
}

/// Graded-commutative Q-algebra on the declared variables, modulo variable
/// nilpotency and all monomials of degree above the cap.
#[derive(Clone, Debug)]
pub struct GradedRing {
    name: String,
    vars: Vec<GradedVariable>,
    degree_cap: u32,
    integration: Option<BTreeMap<Monomial, Cyclotomic>>,
    split: Option<FiberSplit>,
}

#[derive(Clone, Debug)]
pub struct RingBuilder {
    name: String,
    vars: Vec<GradedVariable>,
    degree_cap: Option<u32>,
    integration: Option<Vec<(Vec<u32>, Cyclotomic)>>,
    split: Option<(Arc<GradedRing>, Vec<(Vec<u32>, Cyclotomic)>)>,
}

impl RingBuilder {
    pub fn var(mut self, name: &str, degree: u32) -> Result<Self> {
        self.vars.push(GradedVariable::new(name, degree, None)?);
        Ok(self)
    }

    pub fn var_nil(mut self, name: &str, degree: u32, nilpotency: u32) -> Result<Self> {
        self.vars.push(GradedVariable::new(name, degree, Some(nilpotency))?);
        Ok(self)
    }

    pub fn variable(mut self, v: GradedVariable) -> Self {
        self.vars.push(v);
        self
    }

    pub fn tag_last(mut self, tag: VarTag) -> Self {
        if let Some(v) = self.vars.last_mut() {
            v.tag = tag;
        }
        self
    }

    pub fn degree_cap(mut self, cap: u32) -> Self {
        self.degree_cap = Some(cap);
        self
    }

    /// Overrides the default functional: each entry maps a top monomial
    /// (exponent vector) to its integral.
    pub fn integration(mut self, entries: Vec<(Vec<u32>, Cyclotomic)>) -> Self {
        self.integration = Some(entries);
        self
    }

    /// Declares the fiber/base split. Base variables are those tagged
    /// [`VarTag::Base`]; they must match `base`'s variables in order.
    pub fn fiber_split(mut self, base: Arc<GradedRing>, functional: Vec<(Vec<u32>, Cyclotomic)>) -> Self {
        self.split = Some((base, functional));
        self
    }

    pub fn build(self) -> Result<Arc<GradedRing>> {
        let mut seen = std::collections::HashSet::new();
        for v in &self.vars {
            if !seen.insert(v.name.as_str()) {
                return Err(Error::InvalidRing(format!("duplicate variable `{}`", v.name)));
            }
        }
        let volume = volume_exponents(&self.vars);
        let vol_degree = volume.as_ref().map(|e| degree_of(&self.vars, e));
        let degree_cap = match (self.degree_cap, vol_degree) {
            (Some(c), _) => c,
            (None, Some(d)) => d,
            (None, None) => {
                return Err(Error::InvalidRing(
                    "a degree cap is required when some variable is not nilpotent".into(),
                ))
            }
        };
        let max_deg = self.vars.iter().map(|v| v.degree).max().unwrap_or(0);
        if degree_cap < max_deg {
            return Err(Error::InvalidRing(format!(
                "degree cap {degree_cap} is below a variable degree {max_deg}"
            )));
        }
        let n = self.vars.len();
        let integration = match self.integration {
            Some(entries) => {
                let mut map = BTreeMap::new();
                for (e, w) in entries {
                    if e.len() != n {
                        return Err(Error::InvalidRing("integration monomial has wrong arity".into()));
                    }
                    map.insert(Monomial(e), w);
                }
                Some(map)
            }
            None => match (volume, vol_degree) {
                (Some(e), Some(d)) if d <= degree_cap => {
                    Some(BTreeMap::from([(Monomial(e), Cyclotomic::from_int(1))]))
                }
                _ => None,
            },
        };
        let split = match self.split {
            None => None,
            Some((base, entries)) => {
                let fiber_vars: Vec<usize> =
                    (0..n).filter(|&i| self.vars[i].tag == VarTag::Fiber).collect();
                let base_vars: Vec<usize> =
                    (0..n).filter(|&i| self.vars[i].tag == VarTag::Base).collect();
                let compatible = base.vars.len() == base_vars.len()
                    && base_vars.iter().zip(&base.vars).all(|(&i, b)| {
                        let v = &self.vars[i];
                        v.name == b.name && v.degree == b.degree && v.nilpotency == b.nilpotency
                    });
                if !compatible {
                    return Err(Error::InvalidRing(
                        "base ring does not match the base-tagged variables".into(),
                    ));
                }
                let mut functional = BTreeMap::new();
                for (e, w) in entries {
                    if e.len() != fiber_vars.len() {
                        return Err(Error::InvalidRing("fiber monomial has wrong arity".into()));
                    }
                    functional.insert(e, w);
                }
                Some(FiberSplit { base, fiber_vars, base_vars, functional })
            }
        };
        Ok(Arc::new(GradedRing { name: self.name, vars: self.vars, degree_cap, integration, split }))
    }
}

fn volume_exponents(vars: &[GradedVariable]) -> Option<Vec<u32>> {
    vars.iter().map(|v| v.nilpotency.map(|n| n - 1)).collect()
}

fn degree_of(vars: &[GradedVariable], exps: &[u32]) -> u32 {
    vars.iter().zip(exps).map(|(v, &e)| v.degree * e).sum()
}

impl GradedRing {
    pub fn builder(name: impl Into<String>) -> RingBuilder {
        RingBuilder {
            name: name.into(),
            vars: Vec::new(),
            degree_cap: None,
            integration: None,
            split: None,
        }
    }

    /// The ring Q concentrated in degree 0, with ∫1 = 1.
    pub fn point() -> Arc<GradedRing> {
        Self::builder("pt").build().expect("point ring")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[GradedVariable] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn integration(&self) -> Option<&BTreeMap<Monomial, Cyclotomic>> {
        self.integration.as_ref()
    }

    pub fn split(&self) -> Option<&FiberSplit> {
        self.split.as_ref()
    }

    /// Degree of the top class paired by the integration functional.
    pub fn top_degree(&self) -> Option<u32> {
        let map = self.integration.as_ref()?;
        map.keys().next().map(|m| self.degree(m))
    }

    pub fn degree(&self, m: &Monomial) -> u32 {
        degree_of(&self.vars, &m.0)
    }

    /// True when `m` survives nilpotency and the degree cap.
    pub fn is_admissible(&self, m: &Monomial) -> bool {
        m.0.len() == self.vars.len()
            && self.vars.iter().zip(&m.0).all(|(v, &e)| v.nilpotency.is_none_or(|n| e < n))
            && self.degree(m) <= self.degree_cap
    }

    /// Product of monomials with its Koszul sign, or `None` if it vanishes.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut exps = Vec::with_capacity(self.vars.len());
        let mut degree = 0;
        for (i, v) in self.vars.iter().enumerate() {
            let e = a.0[i] + b.0[i];
            if v.nilpotency.is_some_and(|n| e >= n) {
                return None;
            }
            degree += e * v.degree;
            exps.push(e);
        }
        if degree > self.degree_cap {
            return None;
        }
        // Moving each odd factor of b left past the odd factors of a with
        // larger index.
        let mut odd_a_after = 0u32;
        let mut swaps = 0u32;
        for i in (0..self.vars.len()).rev() {
            if !self.vars[i].is_odd() {
                continue;
            }
            if b.0[i] == 1 {
                swaps += odd_a_after;
            }
            if a.0[i] == 1 {
                odd_a_after += 1;
            }
        }
        Some((Monomial(exps), swaps % 2 == 1))
    }

    /// Whether elements of the two rings can be combined.
    pub fn same_algebra(&self, other: &GradedRing) -> bool {
        self.degree_cap == other.degree_cap
            && self.vars.len() == other.vars.len()
            && self.vars.iter().zip(&other.vars).all(|(a, b)| {
                a.name == b.name && a.degree == b.degree && a.nilpotency == b.nilpotency
            })
    }

    pub fn same(a: &Arc<GradedRing>, b: &Arc<GradedRing>) -> bool {
        Arc::ptr_eq(a, b) || a.same_algebra(b)
    }

    /// Every admissible monomial, ordered by degree then exponent vector.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.vars.len()];
        self.enumerate(0, 0, &mut cur, &mut out);
        out.sort_by(|a, b| self.degree(a).cmp(&self.degree(b)).then_with(|| b.cmp(a)));
        out
    }

    fn enumerate(&self, i: usize, deg: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.vars.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        let v = &self.vars[i];
        let mut e = 0;
        loop {
            let d = deg + e * v.degree;
            if d > self.degree_cap || v.nilpotency.is_some_and(|n| e >= n) {
                break;
            }
            cur[i] = e;
            self.enumerate(i + 1, d, cur, out);
            e += 1;
        }
        cur[i] = 0;
    }

    /// A with its variables tagged fiber, B with its variables tagged base,
    /// integration ∫_{A⊗B} = ∫_A ∫_B and fiber functional ∫_A.
    pub fn fibered(fiber: &Arc<GradedRing>, base: &Arc<GradedRing>) -> Result<Arc<GradedRing>> {
        let fiber_functional: Vec<(Vec<u32>, Cyclotomic)> = fiber
            .integration
            .as_ref()
            .ok_or(Error::NoIntegration)?
            .iter()
            .map(|(m, w)| (m.0.clone(), w.clone()))
            .collect();
        let base_plain = base.without_split();
        let mut b = Self::tensor_builder(fiber, base, VarTag::Fiber, VarTag::Base)?;
        b = b.fiber_split(base_plain, fiber_functional);
        b.build()
    }

    /// Tensor product; tags are preserved and no split is declared.
    pub fn tensor(a: &Arc<GradedRing>, b: &Arc<GradedRing>) -> Result<Arc<GradedRing>> {
        let mut builder = Self::builder(format!("{}×{}", a.name, b.name));
        for v in a.vars.iter().chain(&b.vars) {
            builder = builder.variable(v.clone());
        }
        builder = builder.degree_cap(a.degree_cap + b.degree_cap);
        if let Some(entries) = tensor_integration(a, b) {
            builder = builder.integration(entries);
        }
        builder.build()
    }

    fn tensor_builder(a: &Arc<GradedRing>, b: &Arc<GradedRing>, ta: VarTag, tb: VarTag) -> Result<RingBuilder> {
        let mut builder = Self::builder(format!("{}×{}", a.name, b.name));
        for v in &a.vars {
            builder = builder.variable(GradedVariable { tag: ta, ..v.clone() });
        }
        for v in &b.vars {
            builder = builder.variable(GradedVariable { tag: tb, ..v.clone() });
        }
        builder = builder.degree_cap(a.degree_cap + b.degree_cap);
        if let Some(entries) = tensor_integration(a, b) {
            builder = builder.integration(entries);
        }
        Ok(builder)
    }

    /// The same ring with every variable tagged base and a trivial fiber:
    /// fiber integration is the identity.
    pub fn strict_transversal(ring: &Arc<GradedRing>) -> Result<Arc<GradedRing>> {
        let base = ring.without_split();
        let mut builder = Self::builder(ring.name.clone());
        for v in &ring.vars {
            builder = builder.variable(GradedVariable { tag: VarTag::Base, ..v.clone() });
        }
        builder = builder.degree_cap(ring.degree_cap);
        if let Some(map) = &ring.integration {
            builder = builder.integration(map.iter().map(|(m, w)| (m.0.clone(), w.clone())).collect());
        }
        builder.fiber_split(base, vec![(Vec::new(), Cyclotomic::from_int(1))]).build()
    }

    pub fn without_split(self: &Arc<Self>) -> Arc<GradedRing> {
        if self.split.is_none() {
            return self.clone();
        }
        Arc::new(GradedRing { split: None, ..(**self).clone() })
    }

    pub fn renamed(self: &Arc<Self>, name: impl Into<String>) -> Arc<GradedRing> {
        Arc::new(GradedRing { name: name.into(), ..(**self).clone() })
    }
}

fn tensor_integration(a: &GradedRing, b: &GradedRing) -> Option<Vec<(Vec<u32>, Cyclotomic)>> {
    let (ia, ib) = (a.integration.as_ref()?, b.integration.as_ref()?);
    let mut out = Vec::new();
    for (ma, wa) in ia {
        for (mb, wb) in ib {
            let mut e = ma.0.clone();
            e.extend_from_slice(&mb.0);
            out.push((e, wa * wb));
        }
    }
    Some(out)
}

impl PartialEq for GradedRing {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other)
            && self.integration == other.integration
            && self.vars.iter().zip(&other.vars).all(|(a, b)| a.tag == b.tag)
    }
}

impl fmt::Display for GradedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self
            .vars
            .iter()
            .map(|v| match v.nilpotency {
                Some(n) => format!("{}:{}:{}", v.name, v.degree, n),
                None => format!("{}:{}", v.name, v.degree),
            })
            .collect();
        write!(f, "{}[{}] (cap {})", self.name, vars.join(", "), self.degree_cap)
    }
}
