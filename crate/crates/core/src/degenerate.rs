//! Generator and validator for degenerate coherency preservers.
//!
//! A degenerate preserver sends everything into the light cone of one vertex
//! `s'`. Constructively: pick pairwise disjoint open patches `U_j` such that no
//! event of one patch is coherent with an event of another, attach a null
//! direction `s_j` to each, and set
//!
//! ```text
//! phi(r) = s' + f(r) s_j   if r in U_j
//!          s'              otherwise
//! ```
//!
//! with `f` continuous and vanishing off the patches. Patches here are
//! Euclidean balls and `f` is a scaled tent profile.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{Direction, Event, MAX_DIM};
use crate::quadratic::TolerancePolicy;
use crate::scalar::Scalar;
use crate::seeds::{random_direction, uniform, SeedStream};

/// Largest epsilon accepted by [`build_default`]: unit spacing of the patch
/// centres needs spatial gap `1 - 2 eps` above the time gap `2 eps`.
pub const EPSILON_BOUND: f64 = 0.25;

/// Tent profile `max(0, 1 - |r - center| / radius)`.
pub fn bump<T: Scalar>(center: &Event<T>, radius: T, r: &Event<T>) -> T {
    (T::one() - r.distance(center) / radius).max(T::zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct Patch<T: Scalar> {
    pub center: Event<T>,
    pub radius: T,
    pub direction: Direction<T>,
    pub amplitude: T,
}

impl<T: Scalar> Patch<T> {
    pub fn contains(&self, r: &Event<T>) -> bool {
        r.distance(&self.center) < self.radius
    }

    pub fn profile(&self, r: &Event<T>) -> T {
        self.amplitude * bump(&self.center, self.radius, r)
    }
}

/// Vertex plus a finite family of ball patches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
#[serde(try_from = "DegenerateRepr<T>")]
pub struct DegenerateSpec<T: Scalar> {
    pub vertex: Event<T>,
    pub patches: Vec<Patch<T>>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
struct DegenerateRepr<T: Scalar> {
    vertex: Event<T>,
    #[serde(default)]
    patches: Vec<Patch<T>>,
}

impl<T: Scalar> TryFrom<DegenerateRepr<T>> for DegenerateSpec<T> {
    type Error = Error;
    fn try_from(r: DegenerateRepr<T>) -> Result<Self> {
        DegenerateSpec::new(r.vertex, r.patches)
    }
}

impl<T: Scalar> DegenerateSpec<T> {
    /// Checks dimensions and radii. Separation is checked by [`validate_spec`].
    pub fn new(vertex: Event<T>, patches: Vec<Patch<T>>) -> Result<Self> {
        let n = vertex.dim();
        for (j, p) in patches.iter().enumerate() {
            if p.center.dim() != n || p.direction.dim() != n {
                return Err(Error::InvalidSpec(format!(
                    "patch {j}: dimension differs from vertex"
                )));
            }
            if !(p.radius > T::zero() && p.radius.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "patch {j}: radius must be positive"
                )));
            }
            if !p.amplitude.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "patch {j}: amplitude must be finite"
                )));
            }
        }
        Ok(Self { vertex, patches })
    }

    pub fn dim(&self) -> usize {
        self.vertex.dim()
    }

    /// Index of the first patch containing `r`.
    pub fn patch_of(&self, r: &Event<T>) -> Option<usize> {
        self.patches.iter().position(|p| p.contains(r))
    }

    pub fn eval(&self, r: &Event<T>) -> Result<Event<T>> {
        if r.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: r.dim(),
            });
        }
        Ok(match self.patch_of(r) {
            Some(j) => {
                let p = &self.patches[j];
                self.vertex + *p.direction.as_event() * p.profile(r)
            }
            None => self.vertex,
        })
    }

    /// Lipschitz constant of `eval` implied by the tent profiles.
    pub fn lipschitz_bound(&self) -> T {
        self.patches
            .iter()
            .map(|p| p.amplitude.abs() / p.radius * p.direction.as_event().norm())
            .fold(T::zero(), T::max)
    }
}

/// Outcome of checking one pair of patches.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct PairReport<T: Scalar> {
    pub first: usize,
    pub second: usize,
    /// Spatial-distance and time-gap intervals are disjoint.
    pub interval_separated: bool,
    pub balls_disjoint: bool,
    pub samples: usize,
    /// Smallest `|q(r - r')|` over the sampled cross pairs.
    pub min_abs_q: T,
    /// A coherent cross pair, when one was found.
    pub witness: Option<(Event<T>, Event<T>)>,
}

impl<T: Scalar> PairReport<T> {
    pub fn ok(&self) -> bool {
        self.interval_separated && self.balls_disjoint && self.witness.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct ValidationReport<T: Scalar> {
    pub valid: bool,
    pub pairs: Vec<PairReport<T>>,
    /// Patches whose direction is off the cone section.
    pub bad_directions: Vec<usize>,
    pub brute_force_samples: usize,
    pub seed: u64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Total cross-patch samples, split evenly over patch pairs.
    pub brute_force_samples: usize,
    pub seed: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            brute_force_samples: 10_000,
            seed: 0,
        }
    }
}

fn sample_in_ball<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    center: &Event<T>,
    radius: T,
) -> Event<T> {
    let n = center.dim();
    let mut buf = [T::zero(); MAX_DIM];
    let mut norm = 0.0;
    for c in buf.iter_mut().take(n) {
        let g: f64 = rng.sample(StandardNormal);
        norm += g * g;
        *c = T::lit(g);
    }
    let norm = norm.sqrt().max(1e-300);
    let u: f64 = rng.random::<f64>();
    // strictly inside the open ball
    let rho = 0.999_999 * u.powf(1.0 / n as f64) / norm;
    let offset = Event::from_slice_unchecked(&buf[..n]) * (radius * T::lit(rho));
    *center + offset
}

/// Sign change of `q(r - r')` between two sampled pairs implies a coherent
/// pair on the segment joining them; bisection locates it.
fn bisect_witness<T: Scalar>(
    pos: (Event<T>, Event<T>),
    neg: (Event<T>, Event<T>),
    tol: &TolerancePolicy<T>,
) -> (Event<T>, Event<T>) {
    let at = |s: T| {
        let r = pos.0 + (neg.0 - pos.0) * s;
        let rp = pos.1 + (neg.1 - pos.1) * s;
        (r, rp)
    };
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut best = at(T::lit(0.5));
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        best = at(mid);
        let d = best.0 - best.1;
        let qv = d.q();
        if qv.abs() <= tol.scale(&d) * T::lit(1e-3) {
            break;
        }
        if qv > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

fn check_pair<T: Scalar>(
    spec: &DegenerateSpec<T>,
    i: usize,
    j: usize,
    samples: usize,
    stream: SeedStream,
    tol: &TolerancePolicy<T>,
) -> PairReport<T> {
    let (a, b) = (&spec.patches[i], &spec.patches[j]);
    let delta = a.center - b.center;
    let rho = a.radius + b.radius;
    let ds = delta.spatial_norm();
    let dt = delta.time().abs();
    let interval_separated = ds - rho >= dt + rho || dt - rho >= ds + rho;
    let balls_disjoint = delta.norm() >= rho;

    let draws: Vec<(Event<T>, Event<T>, T)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream.rng(k as u64);
            let r = sample_in_ball(&mut rng, &a.center, a.radius);
            let rp = sample_in_ball(&mut rng, &b.center, b.radius);
            let qv = (r - rp).q();
            (r, rp, qv)
        })
        .collect();

    let mut min_abs_q = T::infinity();
    let mut witness = None;
    let mut pos = None;
    let mut neg = None;
    for &(r, rp, qv) in &draws {
        min_abs_q = min_abs_q.min(qv.abs());
        if witness.is_none() && tol.is_null(&(r - rp)) {
            witness = Some((r, rp));
        }
        if qv > T::zero() && pos.is_none() {
            pos = Some((r, rp));
        }
        if qv < T::zero() && neg.is_none() {
            neg = Some((r, rp));
        }
    }
    if witness.is_none() {
        if let (Some(p), Some(m)) = (pos, neg) {
            let w = bisect_witness(p, m, tol);
            min_abs_q = min_abs_q.min((w.0 - w.1).q().abs());
            witness = Some(w);
        }
    }
    PairReport {
        first: i,
        second: j,
        interval_separated,
        balls_disjoint,
        samples,
        min_abs_q,
        witness,
    }
}

/// Checks the separation conditions pairwise and by seeded sampling.
pub fn validate_spec<T: Scalar>(
    spec: &DegenerateSpec<T>,
    config: &ValidationConfig,
    tol: &TolerancePolicy<T>,
) -> ValidationReport<T> {
    let m = spec.patches.len();
    let pair_count = m * m.saturating_sub(1) / 2;
    let per_pair = if pair_count == 0 {
        0
    } else {
        config.brute_force_samples.div_ceil(pair_count)
    };
    let root = SeedStream::new(config.seed);
    let mut pairs = Vec::with_capacity(pair_count);
    let mut index = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            pairs.push(check_pair(spec, i, j, per_pair, root.child(index), tol));
            index += 1;
        }
    }
    let bad_directions: Vec<usize> = spec
        .patches
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let e = p.direction.as_event();
            e.time() != T::one()
                || (e.spatial_norm() - T::one()).abs()
                    > T::lit(1e-12).max(T::epsilon() * T::lit(8.0))
        })
        .map(|(j, _)| j)
        .collect();
    let valid = pairs.iter().all(PairReport::ok) && bad_directions.is_empty();
    ValidationReport {
        valid,
        brute_force_samples: per_pair * pair_count,
        pairs,
        bad_directions,
        seed: config.seed,
        notes: vec!["patches are Euclidean balls; other patch shapes are not checked".into()],
    }
}

/// Patches of radius `epsilon` centred at `(j, 0, ..., 0)`, `j = 0..count`,
/// with seeded distinct directions and amplitudes in `±[0.5, 2]`.
pub fn build_default<T: Scalar>(
    count: usize,
    epsilon: f64,
    vertex: Event<T>,
    seed: u64,
) -> Result<DegenerateSpec<T>> {
    if !(epsilon > 0.0 && epsilon < EPSILON_BOUND) {
        return Err(Error::EpsilonTooLarge(epsilon));
    }
    let n = vertex.dim();
    let mut rng = SeedStream::new(seed).rng(0);
    let mut patches: Vec<Patch<T>> = Vec::with_capacity(count);
    for j in 0..count {
        let direction = loop {
            let d: Direction<T> = random_direction(&mut rng, n)?;
            let distinct = patches
                .iter()
                .all(|p| p.direction.as_event().distance(d.as_event()) > T::lit(1e-3));
            if distinct {
                break d;
            }
        };
        let magnitude: T = uniform(&mut rng, 0.5, 2.0);
        let amplitude = if rng.random_bool(0.5) {
            magnitude
        } else {
            -magnitude
        };
        let mut center = Event::zero_unchecked(n);
        center.coords_mut()[0] = T::lit(j as f64);
        patches.push(Patch {
            center,
            radius: T::lit(epsilon),
            direction,
            amplitude,
        });
    }
    DegenerateSpec::new(vertex, patches)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(c: &[f64]) -> Event<f64> {
        Event::new(c).unwrap()
    }

    #[test]
    fn bump_examples() {
        let c = ev(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(bump(&c, 0.5, &c), 1.0);
        assert_eq!(bump(&c, 0.5, &ev(&[1.5, 0.0, 0.0, 0.0])), 0.0);
        assert_eq!(bump(&c, 0.5, &ev(&[1.0, 0.0, 0.0, 0.25])), 0.5);
        assert_eq!(bump(&c, 0.5, &ev(&[3.0, 0.0, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn eval_examples() {
        let vertex = ev(&[1.0, 2.0, 3.0, 4.0]);
        let spec = build_default(5, 0.2, vertex, 9).unwrap();
        assert_eq!(spec.eval(&ev(&[0.5, 5.0, 0.0, 0.0])).unwrap(), vertex);
        let p = spec.patches[2];
        let mut doubled = p;
        doubled.amplitude = 2.0;
        let spec2 = DegenerateSpec::new(vertex, vec![doubled]).unwrap();
        assert_eq!(
            spec2.eval(&p.center).unwrap(),
            vertex + *p.direction.as_event() * 2.0
        );
    }

    #[test]
    fn empty_spec_is_constant_and_valid() {
        let vertex = ev(&[0.0, 0.0, 0.0, 1.0]);
        let spec = build_default(0, 0.2, vertex, 1).unwrap();
        assert!(spec.patches.is_empty());
        assert_eq!(spec.eval(&ev(&[4.0, 4.0, 4.0, 4.0])).unwrap(), vertex);
        let report = validate_spec(
            &spec,
            &ValidationConfig::default(),
            &TolerancePolicy::default(),
        );
        assert!(report.valid);
        assert!(report.pairs.is_empty());
    }

    #[test]
    fn default_spec_validates() {
        let spec = build_default(5, 0.2, Event::<f64>::zero(4).unwrap(), 3).unwrap();
        assert_eq!(spec.patches.len(), 5);
        let report = validate_spec(
            &spec,
            &ValidationConfig::default(),
            &TolerancePolicy::default(),
        );
        assert!(report.valid, "{report:?}");
        assert_eq!(report.pairs.len(), 10);
        assert!(report
            .pairs
            .iter()
            .all(|p| p.witness.is_none() && p.min_abs_q > 0.0));
    }

    #[test]
    fn overlapping_patches_give_witness() {
        let d = Direction::from_spatial(&[1.0, 0.0, 0.0]).unwrap();
        let mk = |x: f64| Patch {
            center: ev(&[x, 0.0, 0.0, 0.0]),
            radius: 0.6,
            direction: d,
            amplitude: 1.0,
        };
        let spec = DegenerateSpec::new(Event::zero(4).unwrap(), vec![mk(0.0), mk(1.0)]).unwrap();
        let tol = TolerancePolicy::default();
        let report = validate_spec(&spec, &ValidationConfig::default(), &tol);
        assert!(!report.valid);
        let pair = &report.pairs[0];
        assert!(!pair.interval_separated);
        assert!(!pair.balls_disjoint);
        let (r, rp) = pair.witness.expect("witness pair");
        assert!(spec.patches[0].contains(&r));
        assert!(spec.patches[1].contains(&rp));
        assert!(tol.is_null(&(r - rp)));
    }

    #[test]
    fn epsilon_bound() {
        let v = Event::<f64>::zero(4).unwrap();
        assert_eq!(
            build_default(3, 0.3, v, 0).unwrap_err(),
            Error::EpsilonTooLarge(0.3)
        );
        assert_eq!(
            build_default(3, 0.25, v, 0).unwrap_err(),
            Error::EpsilonTooLarge(0.25)
        );
        assert!(build_default(3, 0.0, v, 0).is_err());
        assert!(build_default(3, 0.249, v, 0).is_ok());
    }

    #[test]
    fn structural_errors() {
        let d = Direction::from_spatial(&[1.0, 0.0, 0.0]).unwrap();
        let bad = Patch {
            center: ev(&[0.0, 0.0, 0.0, 0.0]),
            radius: -1.0,
            direction: d,
            amplitude: 1.0,
        };
        assert!(matches!(
            DegenerateSpec::new(Event::zero(4).unwrap(), vec![bad]),
            Err(Error::InvalidSpec(_))
        ));
        let spec = build_default(2, 0.1, Event::<f64>::zero(4).unwrap(), 0).unwrap();
        assert!(spec.eval(&Event::zero(5).unwrap()).is_err());
    }

    #[test]
    fn serde_shape() {
        let spec = build_default(2, 0.1, ev(&[0.0, 0.0, 0.0, 1.0]), 4).unwrap();
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(v["vertex"][3], 1.0);
        assert_eq!(v["patches"][1]["center"][0], 1.0);
        assert_eq!(v["patches"][1]["radius"], 0.1);
        assert!(v["patches"][0]["direction"].is_array());
        assert!(v["patches"][0]["amplitude"].is_number());
        let back: DegenerateSpec<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back.patches.len(), 2);
        assert_eq!(back.vertex, spec.vertex);
    }
}
