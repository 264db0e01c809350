//! Job reports: exact JSON and a human table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use haefliger_core::arith::format_rational;
use haefliger_core::genera::Genus;
use haefliger_core::identities::IdentityResult;
use haefliger_core::lefschetz::{
    BottTaubesVariant, CharacteristicNumber, Integrality, LefschetzReport, RigidityReport, RigidityVerdict,
};
use haefliger_core::Cyclotomic;
use serde::Serialize;

use crate::config::JobKind;

/// Bumped on any incompatible change to the JSON layout.
pub const SCHEMA: &str = "haefliger-report/1";

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub job: JobKind,
    pub target: String,
    pub input: BTreeMap<String, String>,
    /// False when a verifier or an integrality check failed.
    pub ok: bool,
    pub result: JobResult,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum JobResult {
    Genus(GenusResult),
    Lefschetz(Vec<LefschetzReport>),
    Rigidity(Vec<RigidityReport>),
    Verify(Vec<IdentityResult>),
    BottTaubes(Vec<BottTaubesLine>),
    Integrality(IntegralityResult),
}

impl JobResult {
    pub fn ok(&self) -> bool {
        match self {
            JobResult::Verify(rs) => rs.iter().all(|r| r.verdict),
            JobResult::Integrality(r) => {
                r.characteristic_number.integrality.verdict && r.lefschetz.iter().all(|l| l.integrality.verdict)
            }
            _ => true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenusResult {
    pub space: String,
    pub genus: Genus,
    pub bundle: String,
    pub class: String,
    /// The integral, when the ring has a fundamental class.
    pub value: Option<Cyclotomic>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BottTaubesLine {
    pub variant: BottTaubesVariant,
    pub n: usize,
    pub order: usize,
    pub current: String,
    pub value: Cyclotomic,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralityLine {
    pub current: String,
    pub value: Cyclotomic,
    pub integrality: Integrality,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralityResult {
    pub kappa: usize,
    pub characteristic_number: CharacteristicNumber,
    pub lefschetz: Vec<IntegralityLine>,
}

impl Report {
    /// 0 on success, 1 when a check failed.
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }

    /// Pretty JSON with a trailing newline; identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Exact text: rationals as `p/q`, other values in the field notation.
pub fn exact(c: &Cyclotomic) -> String {
    match c.as_rational() {
        Some(r) => format_rational(&r),
        None => c.to_string(),
    }
}

fn approx(c: &Cyclotomic) -> String {
    let (re, im) = c.to_complex();
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(re), clean(im));
    if im == 0.0 {
        format!("≈ {re:.6} (approx)")
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("≈ {re:.6} {sign} {:.6}i (approx)", im.abs())
    }
}

fn value_cell(c: &Cyclotomic) -> String {
    format!("{}  {}", exact(c), approx(c))
}

fn verdict(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// A plain-text table; exact values first, then a decimal marked approx.
pub fn render_table(r: &Report) -> String {
    let mut out = String::new();
    let mut row = |k: &str, v: String| {
        let _ = writeln!(out, "{k:<14} {v}");
    };
    row("job", format!("{} {}", r.job, r.target));
    let input: Vec<String> =
        r.input.iter().filter(|(k, _)| *k != "job" && *k != "target").map(|(k, v)| format!("{k}={v}")).collect();
    if !input.is_empty() {
        row("input", input.join(" "));
    }
    match &r.result {
        JobResult::Genus(g) => {
            row("space", g.space.clone());
            row("genus", format!("{}({})", g.genus, g.bundle));
            row("class", g.class.clone());
            row("value", g.value.as_ref().map_or("(no fundamental class)".into(), value_cell));
        }
        JobResult::Lefschetz(rs) => {
            for l in rs {
                row("current", l.current.clone());
                row("  complex", format!("{} via {}", l.complex, l.route));
                row("  value", value_cell(&l.value));
                row("  integrality", format!("κ={} {}", l.integrality.kappa, verdict(l.integrality.verdict)));
                for t in &l.components {
                    row(&format!("  {}", t.component), format!("×{}  {}", t.multiplicity, exact(&t.value)));
                }
            }
        }
        JobResult::Rigidity(rs) => {
            for x in rs {
                row("model", x.model.clone());
                row("  current", x.current.clone());
                row("  ∫_F Â(TF)", x.fiber_integral.to_string());
                row("  value", value_cell(&x.value));
                row(
                    "  verdict",
                    match x.verdict {
                        RigidityVerdict::Obstructed => "OBSTRUCTED".into(),
                        RigidityVerdict::Inconclusive => "INCONCLUSIVE".into(),
                    },
                );
            }
        }
        JobResult::Verify(rs) => {
            for x in rs {
                let params: Vec<String> = x.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                row(&x.name, format!("{} {}", verdict(x.verdict), params.join(" ")));
                if let Some(w) = &x.witness {
                    row("  witness", format!("{}: {}", w.location, w.detail));
                }
            }
        }
        JobResult::BottTaubes(ls) => {
            for l in ls {
                row("current", l.current.clone());
                row("  coefficient", format!("{} n={} order={}", variant_name(l.variant), l.n, l.order));
                row("  value", value_cell(&l.value));
            }
        }
        JobResult::Integrality(x) => {
            row("kappa", x.kappa.to_string());
            let c = &x.characteristic_number;
            row(
                "char. number",
                format!("{}  {}  {}", c.complex, value_cell(&c.value), verdict(c.integrality.verdict)),
            );
            for l in &x.lefschetz {
                row(&format!("  {}", l.current), format!("{}  {}", value_cell(&l.value), verdict(l.integrality.verdict)));
            }
        }
    }
    row("ok", verdict(r.ok).into());
    out
}

fn variant_name(v: BottTaubesVariant) -> &'static str {
    match v {
        BottTaubesVariant::Signature => "signature",
        BottTaubesVariant::Spin => "spin",
    }
}
