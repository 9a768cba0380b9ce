use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::event::Event;
use crate::quadratic::TolerancePolicy;
use crate::scalar::Scalar;
use crate::seeds::{random_direction, uniform, uniform_event, SeedStream};

use super::maps::BlackBoxMap;

/// `r1` uniform in `[-scale, scale]^n`, `r2 = r1 + t p` with `t` uniform in
/// `[-scale, scale]` and `p` a random direction.
pub fn sample_coherent_pair<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    scale: f64,
) -> Result<(Event<T>, Event<T>)> {
    let r1 = uniform_event(rng, dim, scale)?;
    let t: T = uniform(rng, -scale, scale);
    let p = random_direction(rng, dim)?;
    Ok((r1, r1 + *p.as_event() * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub pairs: usize,
    pub seed: u64,
    /// Half-width of the sampling box.
    pub scale: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            pairs: 100_000,
            seed: 0,
            scale: 10.0,
        }
    }
}

/// A coherent input pair with a non-coherent image pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct Witness<T: Scalar> {
    pub r1: Event<T>,
    pub r2: Event<T>,
    pub image1: Event<T>,
    pub image2: Event<T>,
    /// `q(r1 - r2)`
    pub input_q: T,
    /// `q(phi(r1) - phi(r2))`
    pub output_q: T,
    /// `|output_q|` over the nullity scale of the image difference.
    pub normalized: T,
}

impl<T: Scalar> Witness<T> {
    /// Re-evaluates the map and confirms the witness independently.
    pub fn verify<M: BlackBoxMap<T> + ?Sized>(&self, map: &M, tol: &TolerancePolicy<T>) -> bool {
        let (Ok(y1), Ok(y2)) = (map.eval(&self.r1), map.eval(&self.r2)) else {
            return false;
        };
        let d = y1 - y2;
        tol.is_null(&(self.r1 - self.r2)) && d.q().abs() > tol.scale(&d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct CheckReport<T: Scalar> {
    pub passed: bool,
    pub pairs_checked: usize,
    /// Largest `|q(phi r1 - phi r2)| / scale`; at most 1 when passing.
    pub max_normalized: T,
    pub worst: Option<Witness<T>>,
    pub failed_evaluations: usize,
    pub seed: u64,
}

fn score<T: Scalar>(
    map: &(impl BlackBoxMap<T> + ?Sized),
    r1: Event<T>,
    r2: Event<T>,
    tol: &TolerancePolicy<T>,
) -> Option<Witness<T>> {
    let y1 = map.eval(&r1).ok()?;
    let y2 = map.eval(&r2).ok()?;
    let d = y1 - y2;
    let output_q = d.q();
    let mut normalized = output_q.abs() / tol.scale(&d);
    if normalized.is_nan() {
        normalized = T::infinity();
    }
    Some(Witness {
        r1,
        r2,
        image1: y1,
        image2: y2,
        input_q: (r1 - r2).q(),
        output_q,
        normalized,
    })
}

type Best<T> = Option<(usize, Witness<T>)>;

fn better<T: Scalar>(a: Best<T>, b: Best<T>) -> Best<T> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            let pick_y =
                y.1.normalized > x.1.normalized || (y.1.normalized == x.1.normalized && y.0 < x.0);
            Some(if pick_y { y } else { x })
        }
    }
}

/// Evaluates `config.pairs` coherent pairs and reports the worst image pair.
///
/// Maps with a finite domain are checked on coherent pairs of their own
/// inputs (a seeded subset when there are more than `config.pairs`).
pub fn check_coherency_preservation<T: Scalar, M: BlackBoxMap<T> + ?Sized>(
    map: &M,
    config: &CheckConfig,
    tol: &TolerancePolicy<T>,
) -> Result<CheckReport<T>> {
    let stream = SeedStream::new(config.seed);
    let n = map.dim();

    let outcomes: Vec<(usize, Option<Witness<T>>)> = match map.finite_domain() {
        Some(domain) => {
            let table_pairs = {
                let mut pairs = Vec::new();
                for i in 0..domain.len() {
                    for j in i + 1..domain.len() {
                        if tol.is_null(&(domain[i] - domain[j]))
                            && tol.distinct(&domain[i], &domain[j])
                        {
                            pairs.push((i, j));
                        }
                    }
                }
                pairs
            };
            let chosen: Vec<(usize, usize)> = if table_pairs.len() > config.pairs {
                let mut rng = stream.rng(u64::MAX);
                let mut idx = sample_indices(&mut rng, table_pairs.len(), config.pairs).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|k| table_pairs[k]).collect()
            } else {
                table_pairs
            };
            chosen
                .par_iter()
                .enumerate()
                .map(|(k, &(i, j))| (k, score(map, domain[i], domain[j], tol)))
                .collect()
        }
        None => (0..config.pairs)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream.rng(k as u64);
                let pair = sample_coherent_pair(&mut rng, n, config.scale);
                (k, pair.ok().and_then(|(r1, r2)| score(map, r1, r2, tol)))
            })
            .collect(),
    };

    let pairs_checked = outcomes.len();
    let failed_evaluations = outcomes.iter().filter(|(_, w)| w.is_none()).count();
    let worst = outcomes
        .into_iter()
        .map(|(k, w)| w.map(|w| (k, w)))
        .fold(None, better);
    let max_normalized = worst.map_or(T::zero(), |(_, w)| w.normalized);
    let passed = max_normalized <= T::one() && failed_evaluations == 0;
    Ok(CheckReport {
        passed,
        pairs_checked,
        max_normalized,
        worst: worst.map(|(_, w)| w),
        failed_evaluations,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::FnMap;
    use crate::transforms::{random_similarity, SimilarityBounds};

    #[test]
    fn sampled_pairs_are_coherent_and_reproducible() {
        let s = SeedStream::new(2);
        for i in 0..1000 {
            let (r1, r2): (Event<f64>, Event<f64>) =
                sample_coherent_pair(&mut s.rng(i), 4, 10.0).unwrap();
            assert!((r1 - r2).q().abs() <= 1e-10 * 100.0);
        }
        let a: (Event<f64>, Event<f64>) = sample_coherent_pair(&mut s.rng(5), 4, 10.0).unwrap();
        let b: (Event<f64>, Event<f64>) = sample_coherent_pair(&mut s.rng(5), 4, 10.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn similarity_passes() {
        let ps = random_similarity::<f64>(4, 4, &SimilarityBounds::default()).unwrap();
        let cfg = CheckConfig {
            pairs: 2000,
            ..CheckConfig::default()
        };
        let report = check_coherency_preservation(&ps, &cfg, &TolerancePolicy::default()).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.pairs_checked, 2000);
    }

    #[test]
    fn squaring_map_fails_with_verifiable_witness() {
        let sq = FnMap::new(4, |r: &Event<f64>| {
            Event::new(&[r.q(), 0.0, 0.0, 0.0]).unwrap()
        });
        let cfg = CheckConfig {
            pairs: 500,
            ..CheckConfig::default()
        };
        let tol = TolerancePolicy::default();
        let report = check_coherency_preservation(&sq, &cfg, &tol).unwrap();
        assert!(!report.passed);
        let w = report.worst.unwrap();
        assert!(w.normalized > 1.0);
        assert!(w.verify(&sq, &tol));
    }

    #[test]
    fn report_is_deterministic() {
        let sq = FnMap::new(4, |r: &Event<f64>| {
            Event::new(&[r.q(), 0.0, 0.0, 0.0]).unwrap()
        });
        let cfg = CheckConfig {
            pairs: 3000,
            seed: 77,
            scale: 3.0,
        };
        let tol = TolerancePolicy::default();
        let a = check_coherency_preservation(&sq, &cfg, &tol).unwrap();
        let b = check_coherency_preservation(&sq, &cfg, &tol).unwrap();
        assert_eq!(a, b);
    }
}
