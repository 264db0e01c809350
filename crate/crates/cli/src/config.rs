//! Job configuration: a line-oriented `key = value` format with `[section]`
//! blocks, plus a one-line shorthand.
//!
//! ```text
//! # comments run to the end of the line
//! job = lefschetz            # or the shorthand line below
//! lefschetz universal k=2 complex=spin lift=+ current=eta1*beta1 kappa=8
//!
//! [ring]                     # custom ring for `ring` and `custom` targets
//! variables = a:2:2, e:1     # name:degree[:nilpotency]
//! integrate = a*e : 1        # monomial : coefficient; …
//! cap = 3                    # degree cap when some variable is free
//!
//! [bundle W]                 # roots with optional weights, or a total class
//! kind = complex             # complex | real
//! roots = a, 0
//! weights = i, zeta3
//! # pontryagin = 1 + a^2     (with rank = 4)
//!
//! [component F0]             # a strict transversal of V^h
//! multiplicity = 2
//! theta = 1/2; 1/3           # angles as multiples of π, in (0,1)
//! normal = a; 0, 0           # roots of N^h(θ), one group per angle
//! minus1 = a                 # half-roots of N^h(−1)
//! twist = W
//! ```
//!
//! A line whose first word is followed by `=` assigns the rest of the line.
//! Any other line is a sequence of words and `key=value` tokens: the first
//! bare word may name the job, the next one the target (builder or
//! identity). Ring elements use `+ - * ^`, unary minus, parentheses, the
//! constants `i`, `zetaN`, and rationals `p/q`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use haefliger_core::arith::parse_rational;
use haefliger_core::genera::{Angle, BundleKind, EquivariantBundle, Genus, TotalClassBundle};
use haefliger_core::gring::{parse_element_at, parse_scalar, parse_variables, Current, GradedRing, Position, RingElement};
use haefliger_core::identities::Verifier;
use haefliger_core::lefschetz::{BottTaubesVariant, Complex, Lift, Route, SymbolDatum};
use haefliger_core::spaces::{
    build_atiyah_fibration, build_atiyah_z, build_cp, build_kp, build_sphere_circle_leaves, build_torus_leaves,
    build_universal_example, point, FixedComponentModel, SpaceModel,
};
use haefliger_core::{Cyclotomic, Error, Rational};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    Genus,
    Lefschetz,
    Rigidity,
    Verify,
    BottTaubes,
    Integrality,
}

impl JobKind {
    pub const ALL: [JobKind; 6] = [
        JobKind::Genus,
        JobKind::Lefschetz,
        JobKind::Rigidity,
        JobKind::Verify,
        JobKind::BottTaubes,
        JobKind::Integrality,
    ];
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JobKind::Genus => "genus",
            JobKind::Lefschetz => "lefschetz",
            JobKind::Rigidity => "rigidity",
            JobKind::Verify => "verify",
            JobKind::BottTaubes => "bott-taubes",
            JobKind::Integrality => "integrality",
        })
    }
}

impl FromStr for JobKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        JobKind::ALL.into_iter().find(|k| k.to_string() == key).ok_or(())
    }
}

/// A positioned configuration error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} (near `{}`)", self.line, self.column, self.message, self.token)
    }
}

impl std::error::Error for Diagnostic {}

type Parsed<T> = Result<T, Diagnostic>;

/// A token with its 1-based position.
#[derive(Clone, Debug)]
struct Spanned {
    text: String,
    line: usize,
    column: usize,
}

impl Spanned {
    fn diag(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic { line: self.line, column: self.column, token: self.text.clone(), message: message.into() }
    }

    /// A core error, keeping its own position when it has one.
    fn located(&self, e: Error) -> Diagnostic {
        match e {
            Error::Parse { line, column, token, message } => Diagnostic { line, column, token, message },
            other => self.diag(other.to_string()),
        }
    }

    fn at(&self) -> Position {
        Position { line: self.line, column: self.column - 1 }
    }

    /// Splits on `sep`, keeping positions and dropping empty pieces.
    fn split(&self, sep: char) -> Vec<Spanned> {
        let mut out = Vec::new();
        let mut offset = 0;
        for piece in self.text.split(sep) {
            let lead = piece.chars().take_while(|c| c.is_whitespace()).count();
            let t = piece.trim();
            if !t.is_empty() {
                out.push(Spanned { text: t.to_string(), line: self.line, column: self.column + offset + lead });
            }
            offset += piece.chars().count() + 1;
        }
        out
    }

    /// Like `split` but keeps empty pieces, for positional lists.
    fn split_keep(&self, sep: char) -> Vec<Spanned> {
        let mut out = Vec::new();
        let mut offset = 0;
        for piece in self.text.split(sep) {
            let lead = piece.chars().take_while(|c| c.is_whitespace()).count();
            out.push(Spanned { text: piece.trim().to_string(), line: self.line, column: self.column + offset + lead });
            offset += piece.chars().count() + 1;
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
struct Block {
    entries: Vec<(Spanned, Spanned)>,
}

impl Block {
    fn get(&self, key: &str) -> Option<&Spanned> {
        self.entries.iter().find(|(k, _)| k.text == key).map(|(_, v)| v)
    }

    fn insert(&mut self, key: Spanned, value: Spanned) -> Parsed<()> {
        if self.get(&key.text).is_some() {
            return Err(key.diag(format!("duplicate key `{}`", key.text)));
        }
        self.entries.push((key, value));
        Ok(())
    }

    fn allow(&self, allowed: &[&str], context: &str) -> Parsed<()> {
        match self.entries.iter().find(|(k, _)| !allowed.contains(&k.text.as_str())) {
            Some((k, _)) => Err(k.diag(format!("unknown key `{}` for {context}", k.text))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
struct Section {
    kind: String,
    name: Option<Spanned>,
    header: Spanned,
    block: Block,
}

#[derive(Default)]
struct Raw {
    kind: Option<Spanned>,
    target: Option<Spanned>,
    top: Block,
    sections: Vec<Section>,
}

fn is_key(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn char_col(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

impl Raw {
    fn block_mut(&mut self) -> &mut Block {
        match self.sections.last_mut() {
            Some(s) => &mut s.block,
            None => &mut self.top,
        }
    }

    fn word(&mut self, w: Spanned) -> Parsed<()> {
        if !self.sections.is_empty() {
            return Err(w.diag("bare word inside a section"));
        }
        if self.kind.is_none() && self.target.is_none() && w.text.parse::<JobKind>().is_ok() {
            self.kind = Some(w);
        } else if self.target.is_none() {
            self.target = Some(w);
        } else {
            return Err(w.diag(format!("unexpected word `{}`", w.text)));
        }
        Ok(())
    }

    fn token(&mut self, t: Spanned) -> Parsed<()> {
        match t.text.split_once('=') {
            None => self.word(t),
            Some((k, v)) => {
                if !is_key(k) {
                    return Err(t.diag(format!("malformed key `{k}`")));
                }
                if v.is_empty() {
                    return Err(t.diag(format!("missing value for `{k}`")));
                }
                let key = Spanned { text: k.to_string(), ..t.clone() };
                let value = Spanned { text: v.to_string(), line: t.line, column: t.column + k.chars().count() + 1 };
                self.assign(key, value)
            }
        }
    }

    fn assign(&mut self, key: Spanned, value: Spanned) -> Parsed<()> {
        if self.sections.is_empty() && key.text == "job" {
            if self.kind.is_some() {
                return Err(key.diag("duplicate key `job`"));
            }
            self.kind = Some(value);
            return Ok(());
        }
        if self.sections.is_empty() && key.text == "target" {
            if self.target.is_some() {
                return Err(key.diag("duplicate key `target`"));
            }
            self.target = Some(value);
            return Ok(());
        }
        self.block_mut().insert(key, value)
    }

    fn line(&mut self, number: usize, line: &str) -> Parsed<()> {
        let body = line.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            return Ok(());
        }
        let start = body.len() - body.trim_start().len();
        let col = char_col(body, start);
        if let Some(inner) = trimmed.strip_prefix('[') {
            let header = Spanned { text: trimmed.to_string(), line: number, column: col };
            let inner = inner.strip_suffix(']').ok_or_else(|| header.diag("section header must end with `]`"))?;
            let words: Vec<&str> = inner.split_whitespace().collect();
            let (kind, name) = match words.as_slice() {
                [k] => (*k, None),
                [k, n] => (*k, Some(*n)),
                _ => return Err(header.diag("expected `[kind]` or `[kind name]`")),
            };
            if !["ring", "bundle", "component"].contains(&kind) {
                return Err(header.diag(format!("unknown section `{kind}`")));
            }
            if kind == "ring" && name.is_some() {
                return Err(header.diag("`[ring]` takes no name"));
            }
            if kind != "ring" && name.is_none() {
                return Err(header.diag(format!("`[{kind}]` needs a name")));
            }
            let name = name.map(|n| Spanned {
                text: n.to_string(),
                line: number,
                column: col + trimmed.find(n).map_or(0, |b| trimmed[..b].chars().count()),
            });
            if let Some(n) = &name {
                if self.sections.iter().any(|s| s.kind == kind && s.name.as_ref().map(|x| &x.text) == Some(&n.text)) {
                    return Err(n.diag(format!("duplicate section `[{kind} {}]`", n.text)));
                }
            } else if self.sections.iter().any(|s| s.kind == kind) {
                return Err(header.diag(format!("duplicate section `[{kind}]`")));
            }
            self.sections.push(Section { kind: kind.to_string(), name, header, block: Block::default() });
            return Ok(());
        }
        // `key = value` when the first word is immediately followed by `=`.
        let first_end = trimmed.find(|c: char| c.is_whitespace() || c == '=').unwrap_or(trimmed.len());
        let after = trimmed[first_end..].trim_start();
        if first_end > 0 && after.starts_with('=') && !trimmed[..first_end].contains('=') {
            let key = Spanned { text: trimmed[..first_end].to_string(), line: number, column: col };
            if !is_key(&key.text) {
                return Err(key.diag(format!("malformed key `{}`", key.text)));
            }
            let rest = &after[1..];
            let value_text = rest.trim();
            let value_byte = start + (trimmed.len() - rest.len()) + (rest.len() - rest.trim_start().len());
            let value = Spanned { text: value_text.to_string(), line: number, column: char_col(body, value_byte) };
            if value.text.is_empty() {
                return Err(key.diag(format!("missing value for `{}`", key.text)));
            }
            return self.assign(key, value);
        }
        let mut byte = 0;
        for w in body.split_whitespace() {
            let at = body[byte..].find(w).map(|b| b + byte).unwrap_or(byte);
            byte = at + w.len();
            self.token(Spanned { text: w.to_string(), line: number, column: char_col(body, at) })?;
        }
        Ok(())
    }

    fn sections(&self, kind: &str) -> impl Iterator<Item = &Section> {
        let kind = kind.to_string();
        self.sections.iter().filter(move |s| s.kind == kind)
    }
}

/// A validated job, with its models already built.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub kind: JobKind,
    /// Builder or identity name.
    pub target: String,
    /// Every setting as written, keyed `key` or `section.name.key`.
    pub settings: BTreeMap<String, String>,
    pub kappa: Option<usize>,
    /// Series truncation order (genus) or q-order (Bott–Taubes).
    pub truncation: Option<usize>,
    /// Size for verifiers.
    pub max_n: Option<usize>,
    pub(crate) spec: Spec,
}

#[derive(Clone, Debug)]
pub(crate) enum Spec {
    Genus { model: SpaceModel, genus: Genus, bundle: GenusInput },
    Lefschetz { components: Vec<FixedComponentModel>, symbol: SymbolDatum, currents: Vec<Current>, route: Route },
    Rigidity { model: SpaceModel, currents: Vec<Current> },
    Verify { verifiers: Vec<Verifier>, size: Option<usize> },
    BottTaubes { model: SpaceModel, variant: BottTaubesVariant, n: usize, currents: Vec<Current> },
    Integrality { components: Vec<FixedComponentModel>, symbol: SymbolDatum, currents: Vec<Current> },
}

#[derive(Clone, Debug)]
pub(crate) enum GenusInput {
    Roots(EquivariantBundle),
    Total(TotalClassBundle),
}

impl JobConfig {
    /// Applies command-line overrides.
    pub fn with_overrides(mut self, truncation: Option<usize>, max_n: Option<usize>) -> Self {
        if let Some(t) = truncation {
            self.truncation = Some(t);
            self.settings.insert("truncation".into(), t.to_string());
        }
        if let Some(n) = max_n {
            self.max_n = Some(n);
            self.settings.insert("max_n".into(), n.to_string());
        }
        if let Spec::Verify { size, .. } = &mut self.spec {
            if max_n.is_some() {
                *size = max_n;
            }
        }
        self
    }
}

/// Parses one job.
pub fn parse_config(text: &str) -> Parsed<JobConfig> {
    parse_job(text, None, &[])
}

/// Parses a config file together with a requested kind and extra tokens
/// from the command line (read as one more shorthand line).
pub fn parse_job(text: &str, kind: Option<JobKind>, args: &[String]) -> Parsed<JobConfig> {
    let mut raw = Raw::default();
    let mut last = 0;
    for (i, line) in text.lines().enumerate() {
        raw.line(i + 1, line)?;
        last = i + 1;
    }
    if !args.is_empty() {
        // Command-line tokens attach to the top level.
        let line = last + 1;
        let saved = std::mem::take(&mut raw.sections);
        let mut column = 1;
        for a in args {
            let t = Spanned { text: a.trim().to_string(), line, column };
            column += a.chars().count() + 1;
            if !t.text.is_empty() {
                raw.token(t)?;
            }
        }
        raw.sections = saved;
    }
    let named = match &raw.kind {
        Some(k) => Some((k.text.parse::<JobKind>().map_err(|_| k.diag(format!("unknown job `{}`", k.text)))?, k)),
        None => None,
    };
    let kind = match (kind, named) {
        (Some(a), Some((b, tok))) if a != b => {
            return Err(tok.diag(format!("config describes a {b} job but {a} was requested")));
        }
        (Some(a), _) => a,
        (None, Some((b, _))) => b,
        (None, None) => {
            return Err(Diagnostic { line: 1, column: 1, token: String::new(), message: "no job kind given".into() })
        }
    };
    validate(kind, &raw)
}

fn settings(raw: &Raw, kind: JobKind, target: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    out.insert("job".to_string(), kind.to_string());
    out.insert("target".to_string(), target.to_string());
    for (k, v) in &raw.top.entries {
        out.insert(k.text.clone(), v.text.clone());
    }
    for s in &raw.sections {
        let prefix = match &s.name {
            Some(n) => format!("{}.{}", s.kind, n.text),
            None => s.kind.clone(),
        };
        for (k, v) in &s.block.entries {
            out.insert(format!("{prefix}.{}", k.text), v.text.clone());
        }
    }
    out
}

fn parse_usize(v: &Spanned, what: &str) -> Parsed<usize> {
    v.text.parse().map_err(|_| v.diag(format!("{what} must be a non-negative integer")))
}

fn parse_positive(v: &Spanned, what: &str) -> Parsed<u32> {
    match v.text.parse::<u32>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(v.diag(format!("{what} must be a positive integer"))),
    }
}

fn parse_rat(v: &Spanned) -> Parsed<Rational> {
    parse_rational(&v.text).map_err(|e| v.diag(e.to_string()))
}

/// θ as a multiple of π, strictly between 0 and 1.
fn parse_theta(v: &Spanned) -> Parsed<Angle> {
    let r = parse_rat(v)?;
    let (p, q) = (r.numer(), r.denom());
    let out_of_range = || v.diag(Error::AngleOutOfRange.to_string());
    let p: i64 = p.try_into().map_err(|_| out_of_range())?;
    let q: i64 = q.try_into().map_err(|_| out_of_range())?;
    if p <= 0 || p >= q {
        return Err(out_of_range());
    }
    Angle::pi_fraction(p, q).map_err(|e| v.located(e))
}

const BUILDERS: &[(&str, &[&str])] = &[
    ("cp", &["q"]),
    ("kp", &["q"]),
    ("atiyah", &["s"]),
    ("sphere-circle", &["q"]),
    ("torus-leaves", &["k"]),
    ("point", &["rank"]),
    ("universal", &["k"]),
    ("ring", &[]),
    ("custom", &[]),
];

fn builders_for(kind: JobKind) -> &'static [&'static str] {
    match kind {
        JobKind::Genus => &["cp", "kp", "atiyah", "ring"],
        JobKind::Lefschetz | JobKind::Integrality => &["universal", "custom"],
        JobKind::Rigidity => &["atiyah", "sphere-circle", "torus-leaves"],
        JobKind::BottTaubes => &["point", "atiyah", "sphere-circle", "torus-leaves"],
        JobKind::Verify => &[],
    }
}

const COMPONENT_KEYS: &[&str] = &["multiplicity", "theta", "normal", "minus1", "twist"];

fn validate(kind: JobKind, raw: &Raw) -> Parsed<JobConfig> {
    // Angles first: a bad θ is reported before anything depending on it.
    for v in raw.top.get("theta").into_iter().chain(raw.sections("component").filter_map(|s| s.block.get("theta"))) {
        for t in v.split(';') {
            parse_theta(&t)?;
        }
    }
    let shorthand_component = COMPONENT_KEYS.iter().any(|k| raw.top.get(k).is_some());
    let target_tok = match &raw.target {
        Some(t) => Some(t.clone()),
        None if matches!(kind, JobKind::Lefschetz | JobKind::Integrality)
            && (shorthand_component || raw.sections("component").next().is_some()) =>
        {
            None
        }
        None if kind == JobKind::Genus && raw.sections("ring").next().is_some() => None,
        None => {
            return Err(Diagnostic {
                line: 1,
                column: 1,
                token: String::new(),
                message: format!("{kind} job needs a target"),
            })
        }
    };
    let target = match &target_tok {
        Some(t) => t.text.to_ascii_lowercase().replace('_', "-"),
        None if kind == JobKind::Genus => "ring".to_string(),
        None => "custom".to_string(),
    };
    let mut cfg = JobConfig {
        kind,
        target: target.clone(),
        settings: settings(raw, kind, &target),
        kappa: raw.top.get("kappa").map(|v| parse_positive(v, "kappa").map(|k| k as usize)).transpose()?,
        truncation: raw.top.get("truncation").map(|v| parse_usize(v, "truncation")).transpose()?,
        max_n: raw.top.get("max_n").map(|v| parse_usize(v, "max_n")).transpose()?,
        spec: Spec::Verify { verifiers: Vec::new(), size: None },
    };
    let common = ["kappa", "truncation", "max_n"];
    if kind == JobKind::Verify {
        cfg.spec = verify_spec(raw, target_tok.as_ref())?;
        return Ok(cfg);
    }
    let params: &[&str] = match BUILDERS.iter().find(|(n, _)| *n == target) {
        Some((n, p)) if builders_for(kind).contains(n) => p,
        _ => {
            let tok = target_tok.clone().unwrap_or(Spanned { text: target.clone(), line: 1, column: 1 });
            return Err(tok.diag(format!(
                "unknown builder `{}` for {kind} (expected one of: {})",
                tok.text,
                builders_for(kind).join(", ")
            )));
        }
    };
    let job_keys: &[&str] = match kind {
        JobKind::Genus => &["genus", "bundle"],
        JobKind::Lefschetz => &["complex", "j", "lift", "symbol", "route", "current"],
        JobKind::Integrality => &["complex", "j", "lift", "symbol", "current"],
        JobKind::Rigidity => &["current"],
        JobKind::BottTaubes => &["variant", "n", "current"],
        JobKind::Verify => unreachable!(),
    };
    let mut allowed: Vec<&str> = common.iter().chain(job_keys).chain(params).copied().collect();
    if target == "custom" {
        allowed.extend(COMPONENT_KEYS);
    }
    raw.top.allow(&allowed, &format!("{kind} {target}"))?;
    if target != "custom" && target != "ring" {
        if let Some(s) = raw.sections.first() {
            return Err(s.header.diag(format!("sections are only read by custom targets, not `{target}`")));
        }
    }
    cfg.spec = match kind {
        JobKind::Genus => genus_spec(raw, &target)?,
        JobKind::Lefschetz | JobKind::Integrality => {
            let components = components(raw, &target)?;
            let symbol = symbol(raw, &components)?;
            let currents = currents(raw, &components)?;
            if kind == JobKind::Lefschetz {
                let route = match raw.top.get("route") {
                    None => Route::General,
                    Some(v) => match v.text.as_str() {
                        "strict" => Route::Strict,
                        "general" => Route::General,
                        "basic3" => Route::Basic3,
                        _ => return Err(v.diag("route must be strict, general or basic3")),
                    },
                };
                Spec::Lefschetz { components, symbol, currents, route }
            } else {
                Spec::Integrality { components, symbol, currents }
            }
        }
        JobKind::Rigidity => {
            let model = foliated_model(raw, &target)?;
            let currents = model_currents(raw, &model, "dvol")?;
            Spec::Rigidity { model, currents }
        }
        JobKind::BottTaubes => {
            let model = foliated_model(raw, &target)?;
            let default = if target == "point" { "1" } else { "dvol" };
            let currents = model_currents(raw, &model, default)?;
            let variant = match raw.top.get("variant") {
                None => BottTaubesVariant::Signature,
                Some(v) => match v.text.as_str() {
                    "signature" => BottTaubesVariant::Signature,
                    "spin" => BottTaubesVariant::Spin,
                    _ => return Err(v.diag("variant must be signature or spin")),
                },
            };
            let n = raw.top.get("n").map(|v| parse_usize(v, "n")).transpose()?.unwrap_or(0);
            Spec::BottTaubes { model, variant, n, currents }
        }
        JobKind::Verify => unreachable!(),
    };
    Ok(cfg)
}

fn verify_spec(raw: &Raw, target: Option<&Spanned>) -> Parsed<Spec> {
    let target = target.expect("verify jobs have a target");
    if let Some(s) = raw.sections.first() {
        return Err(s.header.diag("verify jobs take no sections"));
    }
    let verifiers = if target.text == "all" {
        Verifier::ALL.to_vec()
    } else {
        vec![target.text.parse::<Verifier>().map_err(|_| {
            let names: Vec<String> = Verifier::ALL.iter().map(|v| v.to_string()).collect();
            target.diag(format!("unknown identity `{}` (expected all or one of: {})", target.text, names.join(", ")))
        })?]
    };
    let mut size_keys = vec!["n", "size"];
    if let [v] = verifiers.as_slice() {
        if !size_keys.contains(&v.parameter()) {
            size_keys.push(v.parameter());
        }
    }
    let allowed: Vec<&str> = size_keys.iter().copied().chain(["kappa", "truncation", "max_n"]).collect();
    raw.top.allow(&allowed, &format!("verify {}", target.text))?;
    let mut size = None;
    for key in &size_keys {
        if let Some(v) = raw.top.get(key) {
            if size.is_some() {
                return Err(v.diag("size given twice"));
            }
            size = Some(parse_usize(v, key)?);
        }
    }
    if size.is_none() {
        size = raw.top.get("max_n").map(|v| parse_usize(v, "max_n")).transpose()?;
    }
    Ok(Spec::Verify { verifiers, size })
}

fn param<'a>(raw: &'a Raw, key: &str, target: &str) -> Parsed<&'a Spanned> {
    raw.top.get(key).ok_or_else(|| Diagnostic {
        line: raw.target.as_ref().map_or(1, |t| t.line),
        column: raw.target.as_ref().map_or(1, |t| t.column),
        token: target.to_string(),
        message: format!("builder `{target}` needs `{key}`"),
    })
}

fn builder_error(raw: &Raw, target: &str, e: Error) -> Diagnostic {
    let tok = raw.target.clone().unwrap_or(Spanned { text: target.into(), line: 1, column: 1 });
    tok.diag(format!("builder `{target}`: {e}"))
}

fn genus_spec(raw: &Raw, target: &str) -> Parsed<Spec> {
    let genus = match raw.top.get("genus") {
        Some(v) => v.text.parse::<Genus>().map_err(|_| v.diag(format!("unknown genus `{}`", v.text)))?,
        None => Genus::Ahat,
    };
    let model = match target {
        "cp" => {
            let v = param(raw, "q", target)?;
            build_cp(parse_positive(v, "q")?).map_err(|e| v.located(e))?
        }
        "kp" => {
            let v = param(raw, "q", target)?;
            let q = parse_positive(v, "q")?;
            if q < 2 {
                return Err(v.diag("KP_{q-1} needs q ≥ 2"));
            }
            build_kp(q - 1).map_err(|e| v.located(e))?
        }
        "atiyah" => {
            let v = param(raw, "s", target)?;
            build_atiyah_z(&parse_rat(v)?).map_err(|e| v.located(e))?
        }
        _ => {
            let ring = custom_ring(raw)?;
            let mut m = point();
            m.name = "custom".into();
            m.ring = ring;
            m
        }
    };
    let bundle = if target == "ring" {
        let decls: Vec<&Section> = raw.sections("bundle").collect();
        let section = match raw.top.get("bundle") {
            Some(v) => *decls
                .iter()
                .find(|s| s.name.as_ref().is_some_and(|n| n.text == v.text))
                .ok_or_else(|| v.diag(format!("no `[bundle {}]` declared", v.text)))?,
            None => match decls.as_slice() {
                [one] => *one,
                _ => {
                    return Err(Diagnostic {
                        line: 1,
                        column: 1,
                        token: String::new(),
                        message: "declare one `[bundle NAME]` or choose one with `bundle = NAME`".into(),
                    })
                }
            },
        };
        genus_bundle(section, &model.ring)?
    } else {
        if let Some(v) = raw.top.get("bundle") {
            return Err(v.diag("`bundle` applies to `ring` targets; builders use their tangent bundle"));
        }
        match (&model.tangent_roots, &model.tangent_class) {
            (Some(b), _) => GenusInput::Roots(b.clone()),
            (None, Some(t)) => GenusInput::Total(t.clone()),
            _ => return Err(builder_error(raw, target, Error::InvalidArgument("no tangent data".into()))),
        }
    };
    Ok(Spec::Genus { model, genus, bundle })
}

fn custom_ring(raw: &Raw) -> Parsed<Arc<GradedRing>> {
    let Some(s) = raw.sections("ring").next() else {
        return Ok(GradedRing::point());
    };
    s.block.allow(&["variables", "integrate", "cap", "name"], "[ring]")?;
    let vars_tok = s.block.get("variables").ok_or_else(|| s.header.diag("`[ring]` needs `variables`"))?;
    let vars = parse_variables(&vars_tok.text).map_err(|e| match e {
        Error::Parse { column, token, message, .. } => Diagnostic {
            line: vars_tok.line,
            column: vars_tok.column + column.saturating_sub(1),
            token,
            message,
        },
        other => vars_tok.diag(other.to_string()),
    })?;
    let name = s.block.get("name").map_or("custom", |v| v.text.as_str());
    let mut b = GradedRing::builder(name);
    for v in vars {
        b = b.variable(v);
    }
    if let Some(c) = s.block.get("cap") {
        b = b.degree_cap(parse_positive(c, "cap")?);
    }
    let plain = b.clone().build().map_err(|e| vars_tok.located(e))?;
    if let Some(t) = s.block.get("integrate") {
        let mut entries = Vec::new();
        for item in t.split(';') {
            let parts = item.split_keep(':');
            let [m, c] = parts.as_slice() else {
                return Err(item.diag("expected `monomial : coefficient`"));
            };
            let e = parse_element_at(&plain, &m.text, m.at()).map_err(|e| m.located(e))?;
            let mono = match e.terms().iter().collect::<Vec<_>>().as_slice() {
                [(mono, c1)] if **c1 == Cyclotomic::from_int(1) => (*mono).clone(),
                _ => return Err(m.diag(format!("`{}` is not a monomial", m.text))),
            };
            let w = parse_scalar(&c.text).map_err(|e| c.diag(e.to_string()))?;
            entries.push((mono.exponents().to_vec(), w));
        }
        b = b.integration(entries);
    }
    b.build().map_err(|e| s.header.located(e))
}

fn parse_roots(ring: &Arc<GradedRing>, v: &Spanned) -> Parsed<Vec<RingElement>> {
    let mut out = Vec::new();
    for r in v.split(',') {
        let e = parse_element_at(ring, &r.text, r.at()).map_err(|e| r.located(e))?;
        if let Some(d) = e.degrees().into_iter().find(|&d| d != 2) {
            return Err(r.diag(format!("degree mismatch: root `{}` has degree {d}, expected 2", r.text)));
        }
        out.push(e);
    }
    Ok(out)
}

fn parse_weights(v: Option<&Spanned>, n: usize) -> Parsed<Vec<Cyclotomic>> {
    let Some(v) = v else {
        return Ok(vec![Cyclotomic::from_int(1); n]);
    };
    let ws = v.split(',');
    if ws.len() != n {
        return Err(v.diag(format!("{} weights for {n} roots", ws.len())));
    }
    ws.iter()
        .map(|w| {
            let c = parse_scalar(&w.text).map_err(|e| w.diag(e.to_string()))?;
            if c.is_zero() {
                return Err(w.diag("weight must be a root of unity"));
            }
            Ok(c)
        })
        .collect()
}

fn bundle_kind(s: &Section) -> Parsed<BundleKind> {
    match s.block.get("kind") {
        None => Ok(BundleKind::Complex),
        Some(v) => match v.text.as_str() {
            "complex" => Ok(BundleKind::Complex),
            "real" => Ok(BundleKind::Real),
            _ => Err(v.diag("kind must be complex or real")),
        },
    }
}

/// A `[bundle]` section as an equivariant bundle in `ring`.
fn equivariant_bundle(s: &Section, ring: &Arc<GradedRing>) -> Parsed<EquivariantBundle> {
    s.block.allow(&["kind", "roots", "weights"], "a bundle with roots")?;
    let name = s.name.as_ref().expect("named section");
    let roots_tok = s.block.get("roots").ok_or_else(|| s.header.diag("bundle needs `roots`"))?;
    let roots = parse_roots(ring, roots_tok)?;
    let weights = parse_weights(s.block.get("weights"), roots.len())?;
    let pairs = roots.into_iter().zip(weights).collect();
    match bundle_kind(s)? {
        BundleKind::Complex => EquivariantBundle::complex(&name.text, ring, pairs),
        BundleKind::Real => EquivariantBundle::real(&name.text, ring, pairs),
    }
    .map_err(|e| roots_tok.located(e))
}

fn genus_bundle(s: &Section, ring: &Arc<GradedRing>) -> Parsed<GenusInput> {
    let name = s.name.as_ref().expect("named section");
    let total = s.block.get("pontryagin").map(|v| (v, true)).or(s.block.get("chern").map(|v| (v, false)));
    let Some((v, pontryagin)) = total else {
        return equivariant_bundle(s, ring).map(GenusInput::Roots);
    };
    s.block.allow(&["pontryagin", "chern", "rank"], "a bundle given by its total class")?;
    let rank_tok = s.block.get("rank").ok_or_else(|| s.header.diag("a total class needs `rank`"))?;
    let rank = parse_usize(rank_tok, "rank")?;
    let class = parse_element_at(ring, &v.text, v.at()).map_err(|e| v.located(e))?;
    let b = if pontryagin {
        TotalClassBundle::pontryagin(&name.text, class, rank)
    } else {
        TotalClassBundle::chern(&name.text, class, rank)
    };
    b.map(GenusInput::Total).map_err(|e| v.located(e))
}

fn components(raw: &Raw, target: &str) -> Parsed<Vec<FixedComponentModel>> {
    if target == "universal" {
        let v = param(raw, "k", target)?;
        return build_universal_example(parse_positive(v, "k")?).map_err(|e| v.located(e));
    }
    let ring = custom_ring(raw)?;
    let mut blocks: Vec<(String, &Block, Spanned)> = raw
        .sections("component")
        .map(|s| (s.name.as_ref().unwrap().text.clone(), &s.block, s.header.clone()))
        .collect();
    let shorthand = COMPONENT_KEYS.iter().any(|k| raw.top.get(k).is_some());
    if shorthand {
        if let Some((_, _, h)) = blocks.first() {
            return Err(h.diag("use either top-level component keys or `[component]` sections"));
        }
        blocks.push(("F".into(), &raw.top, Spanned { text: "F".into(), line: 1, column: 1 }));
    }
    if blocks.is_empty() {
        return Err(Diagnostic {
            line: 1,
            column: 1,
            token: target.into(),
            message: "custom target needs at least one `[component NAME]`".into(),
        });
    }
    blocks.iter().map(|(name, block, header)| component(raw, name, block, header, &ring)).collect()
}

fn component(
    raw: &Raw,
    name: &str,
    block: &Block,
    header: &Spanned,
    ring: &Arc<GradedRing>,
) -> Parsed<FixedComponentModel> {
    if !std::ptr::eq(block, &raw.top) {
        block.allow(COMPONENT_KEYS, &format!("[component {name}]"))?;
    }
    let mut c = FixedComponentModel::strict(name, ring).map_err(|e| header.located(e))?;
    let ring = c.ring.clone();
    if let Some(m) = block.get("multiplicity") {
        c.multiplicity = parse_positive(m, "multiplicity")?;
    }
    let thetas = block.get("theta").map(|v| v.split(';')).unwrap_or_default();
    let normals = block.get("normal").map(|v| v.split_keep(';')).unwrap_or_default();
    if thetas.len() != normals.len() {
        let tok = block.get("normal").or(block.get("theta")).unwrap_or(header);
        return Err(tok.diag(format!("{} angles but {} groups of normal roots", thetas.len(), normals.len())));
    }
    for (t, n) in thetas.iter().zip(&normals) {
        let angle = parse_theta(t)?;
        if n.text.is_empty() {
            return Err(n.diag("empty group of normal roots"));
        }
        let roots = parse_roots(&ring, n)?;
        let w = angle.weight();
        let b = EquivariantBundle::complex(&format!("N({})", t.text), &ring, roots.into_iter().map(|r| (r, w.clone())).collect())
            .map_err(|e| n.located(e))?;
        c.normal_theta.push((angle, b));
    }
    if let Some(v) = block.get("minus1") {
        let roots = parse_roots(&ring, v)?;
        let w = Cyclotomic::from_int(-1);
        c.normal_minus1 = Some(
            EquivariantBundle::real("N(-1)", &ring, roots.into_iter().map(|r| (r, w.clone())).collect())
                .map_err(|e| v.located(e))?,
        );
    }
    if let Some(v) = block.get("twist") {
        let s = raw
            .sections("bundle")
            .find(|s| s.name.as_ref().is_some_and(|n| n.text == v.text))
            .ok_or_else(|| v.diag(format!("no `[bundle {}]` declared", v.text)))?;
        c.twist = Some(equivariant_bundle(s, &ring)?);
    }
    if c.normal_theta.is_empty() && c.normal_minus1.is_none() {
        return Err(header.diag(format!("component `{name}` has no normal directions")));
    }
    let base = c.base_ring().map_err(|e| header.located(e))?.clone();
    c.currents = Current::all_duals(&base);
    Ok(c)
}

fn symbol(raw: &Raw, components: &[FixedComponentModel]) -> Parsed<SymbolDatum> {
    let complex = raw.top.get("complex");
    if let Some(v) = raw.top.get("symbol") {
        if let Some(c) = complex {
            return Err(c.diag("give either `complex` or `symbol`"));
        }
        let ring = &components[0].ring;
        let numerator = parse_element_at(ring, &v.text, v.at()).map_err(|e| v.located(e))?;
        return Ok(SymbolDatum::Explicit { name: v.text.clone(), numerator });
    }
    let v = complex.ok_or_else(|| Diagnostic {
        line: 1,
        column: 1,
        token: String::new(),
        message: "missing `complex` (de_rham, signature, dolbeault, spin) or `symbol`".into(),
    })?;
    let mut c: Complex = v.text.parse().map_err(|e: Error| v.diag(e.to_string()))?;
    if let Some(j) = raw.top.get("j") {
        match c {
            Complex::Dolbeault(_) if !v.text.contains(':') => c = Complex::Dolbeault(parse_usize(j, "j")? as u32),
            _ => return Err(j.diag("`j` applies to complex=dolbeault")),
        }
    }
    if let Some(l) = raw.top.get("lift") {
        let lift = match l.text.as_str() {
            "+" | "plus" => Lift::Plus,
            "-" | "minus" => Lift::Minus,
            _ => return Err(l.diag("lift must be + or -")),
        };
        match c {
            Complex::Spin(_) if v.text == "spin" => c = Complex::Spin(lift),
            _ => return Err(l.diag("`lift` applies to complex=spin")),
        }
    }
    Ok(SymbolDatum::Classical(c))
}

/// Comma-separated currents on the transverse ring of the components.
fn currents(raw: &Raw, components: &[FixedComponentModel]) -> Parsed<Vec<Current>> {
    let base = components[0].base_ring().map_err(|e| Diagnostic {
        line: 1,
        column: 1,
        token: String::new(),
        message: e.to_string(),
    })?;
    let Some(v) = raw.top.get("current") else {
        return Ok(Current::all_duals(base));
    };
    let mut out = Vec::new();
    for item in v.split(',') {
        match item.text.as_str() {
            "all" => out.extend(Current::all_duals(base)),
            "fundamental" => out.push(Current::fundamental(base).map_err(|e| item.located(e))?),
            _ => out.push(dual_current(base, &item)?),
        }
    }
    Ok(out)
}

fn dual_current(ring: &Arc<GradedRing>, item: &Spanned) -> Parsed<Current> {
    parse_element_at(ring, &item.text, item.at()).map_err(|e| item.located(e))?;
    Current::dual_named(ring, &item.text).map_err(|e| item.located(e))
}

fn foliated_model(raw: &Raw, target: &str) -> Parsed<SpaceModel> {
    match target {
        "atiyah" => {
            let v = param(raw, "s", target)?;
            build_atiyah_fibration(&parse_rat(v)?).map_err(|e| v.located(e))
        }
        "sphere-circle" => {
            let v = param(raw, "q", target)?;
            build_sphere_circle_leaves(parse_positive(v, "q")?).map_err(|e| v.located(e))
        }
        "torus-leaves" => {
            let v = param(raw, "k", target)?;
            build_torus_leaves(parse_positive(v, "k")?).map_err(|e| v.located(e))
        }
        "point" => {
            let rank = raw.top.get("rank").map(|v| parse_usize(v, "rank")).transpose()?.unwrap_or(0);
            let mut p = point();
            p.tangent_roots = Some(EquivariantBundle::trivial("TF", BundleKind::Real, &p.ring, rank));
            p.currents.push(Current::measure(&p.ring, Cyclotomic::from_int(1)));
            Ok(p)
        }
        _ => unreachable!("builder table"),
    }
}

/// Currents named by the model, `fundamental`, or duals of monomials on
/// the transverse ring.
fn model_currents(raw: &Raw, model: &SpaceModel, default: &str) -> Parsed<Vec<Current>> {
    let base = model.ring.split().map_or(&model.ring, |s| s.base()).clone();
    let fallback = Spanned { text: default.to_string(), line: 1, column: 1 };
    let v = raw.top.get("current").unwrap_or(&fallback);
    let mut out = Vec::new();
    for item in v.split(',') {
        if let Ok(c) = model.current(&item.text) {
            out.push(c.clone());
        } else if item.text == "fundamental" {
            out.push(Current::fundamental(&base).map_err(|e| item.located(e))?);
        } else {
            out.push(dual_current(&base, &item)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(text: &str) -> Diagnostic {
        parse_config(text).expect_err("should not parse")
    }

    #[test]
    fn shorthand_genus() {
        let c = parse_config("genus cp q=2 genus=ahat").unwrap();
        assert_eq!(c.kind, JobKind::Genus);
        assert_eq!(c.target, "cp");
        assert_eq!(c.settings["q"], "2");
    }

    #[test]
    fn shorthand_lefschetz() {
        let c = parse_config("lefschetz universal k=2 complex=spin lift=+ current=eta1*beta1 kappa=8").unwrap();
        assert_eq!(c.kappa, Some(8));
        match &c.spec {
            Spec::Lefschetz { components, symbol, currents, .. } => {
                assert_eq!(components.len(), 2);
                assert_eq!(symbol.label(), "spin+");
                assert_eq!(currents.len(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn key_value_and_shorthand_mix() {
        let text = "job = lefschetz\nuniversal k=1\ncomplex = dolbeault\nj = 1\ncurrent = 1, eta1*beta1\n";
        let c = parse_config(text).unwrap();
        match &c.spec {
            Spec::Lefschetz { symbol, currents, .. } => {
                assert_eq!(symbol.label(), "dolbeault:1");
                assert_eq!(currents.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_zero_is_rejected() {
        let d = diag("lefschetz theta=0 normal=0 complex=signature");
        assert_eq!(d.message, "θ must lie in (0,π)");
        assert_eq!((d.line, d.column, d.token.as_str()), (1, 17, "0"));
        let d = diag("job = lefschetz\n[component F]\ntheta = 1/3; 1\nnormal = 0; 0\n");
        assert_eq!((d.line, d.column, d.token.as_str()), (3, 14, "1"));
    }

    #[test]
    fn unknown_builder() {
        let d = diag("genus hp q=2");
        assert!(d.message.starts_with("unknown builder `hp`"), "{d}");
        assert_eq!((d.line, d.column), (1, 7));
    }

    #[test]
    fn degree_mismatch() {
        let text = "job = lefschetz\ncomplex = signature\n[ring]\nvariables = a:2:2, e:1\n[component F]\ntheta = 1/2\nnormal = a, e\n";
        let d = diag(text);
        assert!(d.message.starts_with("degree mismatch"), "{d}");
        assert_eq!((d.line, d.column, d.token.as_str()), (7, 13, "e"));
    }

    #[test]
    fn malformed_rational() {
        let d = diag("rigidity atiyah s=1/0");
        assert!(d.message.contains("malformed rational"), "{d}");
        assert_eq!(d.token, "1/0");
    }

    #[test]
    fn expression_errors_are_positioned() {
        let d = diag("lefschetz universal k=1 complex=signature current=eta1*(beta1");
        assert_eq!(d.line, 1);
        assert!(d.column > 50, "{d}");
    }

    #[test]
    fn unresolved_references() {
        let d = diag("job = lefschetz\ncomplex = de_rham\n[component F]\ntheta = 1/2\nnormal = 0\ntwist = W\n");
        assert!(d.message.contains("no `[bundle W]`"), "{d}");
        assert_eq!(d.line, 6);
        let d = diag("lefschetz universal k=1 complex=signature current=zeta");
        assert!(d.message.contains("zeta") || d.token.contains("zeta"), "{d}");
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        assert!(diag("genus cp q=2 colour=red").message.contains("unknown key `colour`"));
        assert!(diag("genus cp q=2 q=3").message.contains("duplicate key"));
        assert!(diag("genus cp").message.contains("needs `q`"));
        assert!(diag("cp q=2").message.contains("no job kind"));
    }

    #[test]
    fn requested_kind_must_match() {
        let d = parse_job("job = genus\ncp q=2", Some(JobKind::Lefschetz), &[]).unwrap_err();
        assert!(d.message.contains("genus job but lefschetz"), "{d}");
        let c = parse_job("cp", Some(JobKind::Genus), &["q=3".into()]).unwrap();
        assert_eq!(c.settings["q"], "3");
    }

    #[test]
    fn custom_ring_genus() {
        let text = "job = genus\ngenus = l\n[ring]\nvariables = x:2:3\nintegrate = x^2 : 1\n[bundle TM]\npontryagin = 1 + 3*x^2\nrank = 4\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.target, "ring");
        assert_eq!(c.settings["bundle.TM.rank"], "4");
    }

    #[test]
    fn verify_sizes() {
        let c = parse_config("verify coth-cancellation n=4").unwrap();
        assert!(matches!(c.spec, Spec::Verify { size: Some(4), .. }));
        let c = parse_config("verify coth-bernoulli T=12").unwrap();
        assert!(matches!(c.spec, Spec::Verify { size: Some(12), .. }));
        assert!(diag("verify coth-bernoulli q_max=12").message.contains("unknown key"));
        assert!(diag("verify nope").message.contains("unknown identity"));
    }
}
