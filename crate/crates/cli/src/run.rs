//! Dispatch of a parsed job to the engine.

use std::fmt;

use haefliger_core::genera::{genus_of_roots, genus_of_total_class, Genus};
use haefliger_core::gring::RingElement;
use haefliger_core::lefschetz::{
    bott_taubes_value, default_kappa, integrality_characteristic_number, lefschetz, rigidity_obstruction, Integrality,
    Route,
};
use haefliger_core::series::TruncatedSeries;
use haefliger_core::{Error, Rational};

use crate::config::{GenusInput, JobConfig, JobKind, Spec};
use crate::report::{BottTaubesLine, GenusResult, IntegralityLine, IntegralityResult, JobResult, Report, SCHEMA};

/// An engine error, with the job it came from.
#[derive(Debug)]
pub struct JobError {
    pub job: JobKind,
    pub target: String,
    pub source: Error,
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.job, self.target, self.source)
    }
}

impl std::error::Error for JobError {}

pub fn run_job(cfg: &JobConfig) -> Result<Report, JobError> {
    let wrap = |source| JobError { job: cfg.kind, target: cfg.target.clone(), source };
    let result = dispatch(cfg).map_err(wrap)?;
    Ok(Report {
        schema: SCHEMA,
        job: cfg.kind,
        target: cfg.target.clone(),
        input: cfg.settings.clone(),
        ok: result.ok(),
        result,
    })
}

fn series(genus: Genus, truncation: Option<usize>, ring: &haefliger_core::gring::GradedRing) -> TruncatedSeries<Rational> {
    match truncation {
        Some(t) => genus.named().build(t as i64),
        None => genus.series_for(ring),
    }
}

fn dispatch(cfg: &JobConfig) -> Result<JobResult, Error> {
    Ok(match &cfg.spec {
        Spec::Genus { model, genus, bundle } => {
            let f = series(*genus, cfg.truncation, &model.ring);
            let (name, class): (String, RingElement) = match bundle {
                GenusInput::Roots(b) => (b.name.clone(), genus_of_roots(&f, b)?),
                GenusInput::Total(b) => (b.name.clone(), genus_of_total_class(&f, b)?),
            };
            let value = match model.ring.integration() {
                Some(_) => Some(class.integrate()?),
                None => None,
            };
            JobResult::Genus(GenusResult {
                space: model.name.clone(),
                genus: *genus,
                bundle: name,
                class: class.to_string(),
                value,
            })
        }
        Spec::Lefschetz { components, symbol, currents, route } => JobResult::Lefschetz(
            currents
                .iter()
                .map(|c| lefschetz(*route, components, symbol, c, cfg.kappa))
                .collect::<Result<_, _>>()?,
        ),
        Spec::Rigidity { model, currents } => {
            JobResult::Rigidity(currents.iter().map(|c| rigidity_obstruction(model, c)).collect::<Result<_, _>>()?)
        }
        Spec::Verify { verifiers, size } => JobResult::Verify(
            verifiers
                .iter()
                .map(|v| v.run(size.unwrap_or_else(|| v.default_size()), None))
                .collect::<Result<_, _>>()?,
        ),
        Spec::BottTaubes { model, variant, n, currents } => {
            let order = cfg.truncation.unwrap_or(*n);
            let lines = currents
                .iter()
                .map(|c| {
                    Ok(BottTaubesLine {
                        variant: *variant,
                        n: *n,
                        order,
                        current: c.name().to_string(),
                        value: bott_taubes_value(model, *variant, *n, order, c)?,
                    })
                })
                .collect::<Result<_, Error>>()?;
            JobResult::BottTaubes(lines)
        }
        Spec::Integrality { components, symbol, currents } => {
            let kappa = cfg.kappa.unwrap_or_else(|| default_kappa(components));
            let number = integrality_characteristic_number(components, symbol, None, Some(kappa))?;
            let lefschetz = currents
                .iter()
                .map(|c| {
                    let r = lefschetz(Route::General, components, symbol, c, Some(kappa))?;
                    Ok(IntegralityLine { current: r.current, integrality: Integrality::check(&r.value, kappa), value: r.value })
                })
                .collect::<Result<_, Error>>()?;
            JobResult::Integrality(IntegralityResult { kappa, characteristic_number: number, lefschetz })
        }
    })
}
