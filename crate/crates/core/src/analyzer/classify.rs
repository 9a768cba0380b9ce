use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::Event;
use crate::quadratic::TolerancePolicy;
use crate::scalar::Scalar;
use crate::seeds::{uniform_event, SeedStream};
use crate::transforms::{decompose_similarity, fit_affine, LorentzMatrix};

use super::check::{check_coherency_preservation, CheckConfig, Witness};
use super::lines::{line_collapse_census, LineCensus};
use super::maps::BlackBoxMap;
use super::sphere::{degree, DegreeReport, SphereMesh};
use super::vertex_fit::{fit_cone_vertex, VertexFitConfig};

const STAGE_FIT: u64 = 1;
const STAGE_VERTEX: u64 = 2;
const STAGE_CENSUS: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    pub pairs: usize,
    pub fit_samples: usize,
    /// Half-width of the sampling box.
    pub scale: f64,
    pub residual_threshold: f64,
    pub tau: f64,
    pub census_lines: usize,
    pub census_probes: usize,
    pub degree_subdivision: u32,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            pairs: 100_000,
            fit_samples: 512,
            scale: 10.0,
            residual_threshold: 1e-6,
            tau: 1e-9,
            census_lines: 64,
            census_probes: 8,
            degree_subdivision: 4,
            seed: 0,
        }
    }
}

impl ClassifyConfig {
    /// Defaults with the tolerance suited to the scalar type.
    pub fn for_scalar<T: Scalar>() -> Self {
        Self {
            tau: T::DEFAULT_TAU,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let d = Self::default();
        if self.pairs < d.pairs / 10 || self.fit_samples < d.fit_samples / 10 {
            return Err(Error::InvalidArgument(format!(
                "sample counts below a tenth of the defaults ({} pairs, {} fit samples)",
                d.pairs / 10,
                d.fit_samples / 10
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) || !(self.residual_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "scale and residual threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Everything gathered on the way to an inconclusive verdict.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub check_max_normalized: f64,
    pub failed_evaluations: usize,
    pub affine_residual: Option<f64>,
    pub cone_residual: Option<f64>,
    pub census: Option<LineCensus>,
    pub degree: Option<DegreeReport>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub enum Classification<T: Scalar> {
    Similarity {
        k: T,
        #[serde(rename = "Q")]
        q: LorentzMatrix<T>,
        a: Event<T>,
        residual: T,
    },
    Degenerate {
        vertex: Event<T>,
        residual: T,
    },
    Violator {
        witness: Witness<T>,
        magnitude: T,
    },
    Inconclusive {
        diagnostics: Diagnostics,
    },
}

impl<T: Scalar> Classification<T> {
    pub fn verdict(&self) -> &'static str {
        match self {
            Self::Similarity { .. } => "similarity",
            Self::Degenerate { .. } => "degenerate",
            Self::Violator { .. } => "violator",
            Self::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Input/output pairs for fitting: the map's own domain when finite,
/// otherwise seeded points of the sampling box.
fn fit_pairs<T: Scalar, M: BlackBoxMap<T> + ?Sized>(
    map: &M,
    config: &ClassifyConfig,
    stream: SeedStream,
) -> Vec<(Event<T>, Event<T>)> {
    let inputs: Vec<Event<T>> = match map.finite_domain() {
        Some(domain) if domain.len() > config.fit_samples => {
            let mut rng = stream.rng(u64::MAX);
            let mut idx = sample_indices(&mut rng, domain.len(), config.fit_samples).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| domain[i]).collect()
        }
        Some(domain) => domain.to_vec(),
        None => (0..config.fit_samples as u64)
            .into_par_iter()
            .filter_map(|i| uniform_event(&mut stream.rng(i), map.dim(), config.scale).ok())
            .collect(),
    };
    inputs
        .into_par_iter()
        .filter_map(|r| map.eval(&r).ok().map(|y| (r, y)))
        .collect()
}

/// Sorts a black-box map into similarity, degenerate, violator, or inconclusive.
///
/// Stages run in order: the coherency check, an affine fit with similarity
/// decomposition, then a light-cone fit of the sampled outputs. Numerical
/// failures in later stages end up in the diagnostics, never as errors.
pub fn classify<T: Scalar, M: BlackBoxMap<T> + ?Sized>(
    map: &M,
    config: &ClassifyConfig,
) -> Result<Classification<T>> {
    config.validate()?;
    let tol = TolerancePolicy::new(T::lit(config.tau))?;
    let threshold = T::lit(config.residual_threshold);
    let stream = SeedStream::new(config.seed);
    let mut diag = Diagnostics::default();

    let check = check_coherency_preservation(
        map,
        &CheckConfig {
            pairs: config.pairs,
            seed: config.seed,
            scale: config.scale,
        },
        &tol,
    )?;
    diag.check_max_normalized = check.max_normalized.to_f64_lossy();
    diag.failed_evaluations = check.failed_evaluations;
    if let Some(w) = check.worst.filter(|w| w.normalized > T::one()) {
        if w.verify(map, &tol) {
            return Ok(Classification::Violator {
                witness: w,
                magnitude: w.normalized,
            });
        }
        diag.notes.push("worst pair failed to re-verify".into());
    }
    if check.failed_evaluations > 0 {
        diag.notes.push(format!(
            "{} pairs could not be evaluated",
            check.failed_evaluations
        ));
    }

    let pairs = fit_pairs(map, config, stream.child(STAGE_FIT));
    match fit_affine(&pairs) {
        Ok((am, residual)) => {
            diag.affine_residual = Some(residual.to_f64_lossy());
            if residual <= threshold {
                if let Some(ps) = decompose_similarity(&am, threshold) {
                    return Ok(Classification::Similarity {
                        k: ps.k,
                        q: ps.q,
                        a: ps.a,
                        residual,
                    });
                }
                diag.notes.push("affine but not a similarity".into());
            }
        }
        Err(e) => diag.notes.push(format!("affine fit: {e}")),
    }

    let outputs: Vec<Event<T>> = pairs.iter().map(|(_, y)| *y).collect();
    let vertex_config = VertexFitConfig {
        seed: stream.child(STAGE_VERTEX).seed(),
        ..VertexFitConfig::default()
    };
    match fit_cone_vertex(&outputs, &vertex_config) {
        Ok((vertex, residual)) => {
            diag.cone_residual = Some(residual.to_f64_lossy());
            if residual <= threshold {
                return Ok(Classification::Degenerate { vertex, residual });
            }
        }
        Err(e) => diag.notes.push(format!("cone fit: {e}")),
    }

    if map.finite_domain().is_none() {
        match line_collapse_census(
            map,
            stream.child(STAGE_CENSUS).seed(),
            config.census_lines,
            config.scale,
            config.census_probes,
            &tol,
        ) {
            Ok(c) => diag.census = Some(c),
            Err(e) => diag.notes.push(format!("line census: {e}")),
        }
        if map.dim() == 4 {
            let mesh = SphereMesh::icosphere(config.degree_subdivision);
            match degree(map, &Event::zero(4)?, &mesh, &tol) {
                Ok(d) => diag.degree = Some(d),
                Err(e) => diag.notes.push(format!("degree at the origin: {e}")),
            }
        }
    }
    Ok(Classification::Inconclusive { diagnostics: diag })
}
