use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{Event, MAX_DIM};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::seeds::SeedStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexFitConfig {
    /// Sample points used as starts in addition to the coordinate-wise median.
    pub starts: usize,
    pub max_iterations: usize,
    /// Stop once the mean gradient in normalized coordinates is this small.
    pub gradient_tol: f64,
    pub seed: u64,
}

impl Default for VertexFitConfig {
    fn default() -> Self {
        Self {
            starts: 8,
            max_iterations: 200,
            gradient_tol: 1e-10,
            seed: 0,
        }
    }
}

struct Problem<'a, T: Scalar> {
    points: &'a [Event<T>],
}

impl<T: Scalar> Problem<'_, T> {
    fn objective(&self, s: &Event<T>) -> T {
        self.points
            .iter()
            .map(|y| {
                let r = (*y - *s).q();
                r * r
            })
            .fold(T::zero(), |a, b| a + b)
    }

    /// Mean of `J^T J`, mean of `J^T r`, where `J_i = -2 G (y_i - s)`.
    fn normal_equations(&self, s: &Event<T>) -> (Mat<T>, Event<T>) {
        let n = s.dim();
        let two = T::lit(2.0);
        let mut h = Mat::zeros(n).expect("dimension already checked");
        let mut g = Event::zero(n).expect("dimension already checked");
        for y in self.points {
            let d = *y - *s;
            let r = d.q();
            let mut j = [T::zero(); MAX_DIM];
            for k in 0..n {
                let metric = if k + 1 == n { T::one() } else { -T::one() };
                j[k] = -two * metric * d[k];
            }
            for a in 0..n {
                g.coords_mut()[a] = g[a] + j[a] * r;
                for b in 0..n {
                    h[(a, b)] = h[(a, b)] + j[a] * j[b];
                }
            }
        }
        let inv = T::one() / T::lit(self.points.len() as f64);
        (h.scale(inv), g * inv)
    }

    /// Levenberg-Marquardt from `start`; `None` if the gradient test never passes.
    fn solve(&self, start: Event<T>, config: &VertexFitConfig) -> Option<(Event<T>, T)> {
        let n = start.dim();
        let grad_tol = T::lit(config.gradient_tol).max(T::lit(10.0) * T::epsilon());
        let mut s = start;
        let mut f = self.objective(&s);
        let mut lambda = T::lit(1e-3);
        for _ in 0..config.max_iterations {
            let (h, g) = self.normal_equations(&s);
            if !g.is_finite() {
                return None;
            }
            if g.norm() <= grad_tol {
                return Some((s, f));
            }
            let mut accepted = false;
            for _ in 0..30 {
                let mut damped = h;
                for k in 0..n {
                    damped[(k, k)] = h[(k, k)] * (T::one() + lambda) + lambda * T::epsilon();
                }
                let Ok(step) = damped.solve(&-g, T::epsilon()) else {
                    lambda = lambda * T::lit(10.0);
                    continue;
                };
                let trial = s + step;
                let ft = self.objective(&trial);
                if ft <= f {
                    s = trial;
                    f = ft;
                    lambda = (lambda / T::lit(3.0)).max(T::lit(1e-12));
                    accepted = true;
                    break;
                }
                lambda = lambda * T::lit(4.0);
            }
            if !accepted {
                // no descent is possible from here; accept only a genuine stationary point
                let (_, g) = self.normal_equations(&s);
                return (g.norm() <= grad_tol).then_some((s, f));
            }
        }
        let (_, g) = self.normal_equations(&s);
        (g.norm() <= grad_tol).then_some((s, f))
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// RMS of `|q(y - s)| / (1 + |y - s|^2)`.
pub(crate) fn cone_residual<T: Scalar>(samples: &[Event<T>], s: &Event<T>) -> T {
    let sum = samples
        .iter()
        .map(|y| {
            let d = *y - *s;
            let r = d.q().abs() / (T::one() + d.norm_sq());
            r * r
        })
        .fold(T::zero(), |a, b| a + b);
    (sum / T::lit(samples.len() as f64)).sqrt()
}

/// Least-squares vertex `s` of a light cone `q(y - s) = 0` through `samples`,
/// with its normalized residual.
///
/// Samples are centred and scaled to unit RMS spread before fitting, then
/// several starts are run and the lowest converged objective wins.
pub fn fit_cone_vertex<T: Scalar>(
    samples: &[Event<T>],
    config: &VertexFitConfig,
) -> Result<(Event<T>, T)> {
    if samples.len() < 5 {
        return Err(Error::DegenerateSamples);
    }
    let n = samples[0].dim();
    if let Some(bad) = samples.iter().find(|y| y.dim() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: bad.dim(),
        });
    }
    let count = T::lit(samples.len() as f64);
    let centre = samples.iter().fold(Event::zero(n)?, |a, y| a + *y) * (T::one() / count);
    let spread = (samples
        .iter()
        .map(|y| (*y - centre).norm_sq())
        .fold(T::zero(), |a, b| a + b)
        / count)
        .sqrt();
    if spread <= T::epsilon() * (T::one() + centre.norm()) {
        return Ok((centre, cone_residual(samples, &centre)));
    }
    let inv = T::one() / spread;
    let normalized: Vec<Event<T>> = samples.iter().map(|y| (*y - centre) * inv).collect();
    let problem = Problem {
        points: &normalized,
    };

    let mut starts = Vec::with_capacity(config.starts + 1);
    let mut med = [T::zero(); MAX_DIM];
    for (k, m) in med.iter_mut().enumerate().take(n) {
        let mut column: Vec<f64> = normalized.iter().map(|y| y[k].to_f64_lossy()).collect();
        *m = T::lit(median(&mut column));
    }
    starts.push(Event::new(&med[..n])?);
    let mut rng = SeedStream::new(config.seed).rng(0);
    let picks = sample_indices(
        &mut rng,
        normalized.len(),
        config.starts.min(normalized.len()),
    );
    starts.extend(picks.into_iter().map(|i| normalized[i]));

    let best = starts
        .par_iter()
        .enumerate()
        .filter_map(|(i, s)| problem.solve(*s, config).map(|(s, f)| (i, s, f)))
        .reduce_with(|a, b| {
            if b.2 < a.2 || (b.2 == a.2 && b.0 < a.0) {
                b
            } else {
                a
            }
        });
    let (_, s, _) = best.ok_or(Error::NoConvergence)?;
    let vertex = s * spread + centre;
    Ok((vertex, cone_residual(samples, &vertex)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::{random_direction, uniform, uniform_event};

    #[test]
    fn equal_samples_give_that_vertex() {
        let s = Event::new(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let (v, r) = fit_cone_vertex(&[s; 6], &VertexFitConfig::default()).unwrap();
        assert_eq!(v, s);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn recovers_vertex_of_sampled_cone() {
        let stream = SeedStream::new(9);
        let vertex = Event::new(&[3.0, -1.0, 2.0, 0.5]).unwrap();
        let pts: Vec<Event<f64>> = (0..200)
            .map(|i| {
                let mut rng = stream.rng(i);
                let p = random_direction::<f64, _>(&mut rng, 4).unwrap();
                let t: f64 = uniform(&mut rng, -5.0, 5.0);
                vertex + *p.as_event() * t
            })
            .collect();
        let (v, r) = fit_cone_vertex(&pts, &VertexFitConfig::default()).unwrap();
        assert!(v.distance(&vertex) < 1e-9, "{v:?}");
        assert!(r < 1e-12);
    }

    #[test]
    fn box_samples_have_large_residual() {
        let stream = SeedStream::new(3);
        let pts: Vec<Event<f64>> = (0..300)
            .map(|i| uniform_event(&mut stream.rng(i), 4, 10.0).unwrap())
            .collect();
        match fit_cone_vertex(&pts, &VertexFitConfig::default()) {
            Ok((_, r)) => assert!(r > 1e-3),
            Err(e) => assert_eq!(e, Error::NoConvergence),
        }
    }

    #[test]
    fn too_few_samples() {
        let s = Event::new(&[0.0; 4]).unwrap();
        assert_eq!(
            fit_cone_vertex(&[s; 4], &VertexFitConfig::default()).unwrap_err(),
            Error::DegenerateSamples
        );
    }
}
