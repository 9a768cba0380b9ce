use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{Direction, Event};
use crate::quadratic::{project_to_section, TolerancePolicy};
use crate::scalar::Scalar;
use crate::seeds::{random_direction, uniform_event, SeedStream};

use super::maps::BlackBoxMap;

const SPHERE_LADDER: usize = 24;

/// `1, 1/2, 2, 1/4, 4, ...`
fn sphere_ladder<T: Scalar>() -> impl Iterator<Item = T> {
    (0..SPHERE_LADDER).map(|i| {
        let j = (i as i32 + 1) / 2;
        let e = if i % 2 == 1 { -j } else { j };
        T::lit(2f64.powi(e))
    })
}

/// Whether `map` is constant along `a + R p`, probing `t = +-2^j` for
/// `probes` exponents centred on zero.
pub fn constant_line_detect<T: Scalar, M: BlackBoxMap<T> + ?Sized>(
    map: &M,
    a: &Event<T>,
    p: &Direction<T>,
    probes: usize,
    tol: &TolerancePolicy<T>,
) -> Result<bool> {
    if probes < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 probes, got {probes}"
        )));
    }
    let y0 = map.eval(a)?;
    let half = (probes / 2) as i32;
    for j in 0..probes as i32 {
        let t = T::lit(2f64.powi(j - half));
        for s in [t, -t] {
            let y = map.eval(&(*a + *p.as_event() * s))?;
            if tol.distinct(&y, &y0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// How many of a batch of random coherent lines are collapsed to a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCensus {
    pub lines: usize,
    pub collapsed: usize,
    /// Lines on which the map could not be evaluated.
    pub errors: usize,
    pub seed: u64,
}

pub fn line_collapse_census<T: Scalar, M: BlackBoxMap<T> + ?Sized>(
    map: &M,
    seed: u64,
    lines: usize,
    scale: f64,
    probes: usize,
    tol: &TolerancePolicy<T>,
) -> Result<LineCensus> {
    if probes < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 probes, got {probes}"
        )));
    }
    let stream = SeedStream::new(seed);
    let n = map.dim();
    let outcomes: Vec<Option<bool>> = (0..lines)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.rng(i as u64);
            let a = uniform_event(&mut rng, n, scale).ok()?;
            let p = random_direction(&mut rng, n).ok()?;
            constant_line_detect(map, &a, &p, probes, tol).ok()
        })
        .collect();
    Ok(LineCensus {
        lines,
        collapsed: outcomes.iter().filter(|o| **o == Some(true)).count(),
        errors: outcomes.iter().filter(|o| o.is_none()).count(),
        seed,
    })
}

/// The direction of the image line `phi(a + R p)`, read off from the first
/// ladder step whose image leaves `phi(a)` with a usable time component.
pub fn induced_sphere_map<T: Scalar, M: BlackBoxMap<T> + ?Sized>(
    map: &M,
    a: &Event<T>,
    p: &Direction<T>,
    tol: &TolerancePolicy<T>,
) -> Result<Direction<T>> {
    let y0 = map.eval(a)?;
    let mut moved = false;
    for t in sphere_ladder::<T>() {
        let y = map.eval(&(*a + *p.as_event() * t))?;
        if !tol.distinct(&y, &y0) {
            continue;
        }
        moved = true;
        let d = y - y0;
        if d.time().abs() > tol.tau_rel * (T::one() + d.norm()) {
            return project_to_section(&y0, &y, tol);
        }
    }
    Err(if moved {
        Error::TimeComponentVanishes
    } else {
        Error::LineCollapse
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::FnMap;
    use crate::transforms::{spatial_rotation, PoincareSimilarity};

    fn ev(c: &[f64]) -> Event<f64> {
        Event::new(c).unwrap()
    }

    #[test]
    fn ladder_order() {
        let l: Vec<f64> = sphere_ladder().take(5).collect();
        assert_eq!(l, vec![1.0, 0.5, 2.0, 0.25, 4.0]);
        assert_eq!(sphere_ladder::<f64>().count(), 24);
    }

    #[test]
    fn constant_map_collapses_every_line() {
        let c = FnMap::new(4, |_: &Event<f64>| ev(&[1.0, 2.0, 3.0, 4.0]));
        let tol = TolerancePolicy::default();
        let p = Direction::from_spatial(&[1.0, 0.0, 0.0]).unwrap();
        assert!(constant_line_detect(&c, &ev(&[0.0; 4]), &p, 8, &tol).unwrap());
        assert_eq!(
            induced_sphere_map(&c, &ev(&[0.0; 4]), &p, &tol).unwrap_err(),
            Error::LineCollapse
        );
        let census = line_collapse_census(&c, 1, 20, 10.0, 6, &tol).unwrap();
        assert_eq!(census.collapsed, 20);
        assert!(constant_line_detect(&c, &ev(&[0.0; 4]), &p, 2, &tol).is_err());
    }

    #[test]
    fn identity_induces_identity() {
        let id = PoincareSimilarity::<f64>::identity(4).unwrap();
        let tol = TolerancePolicy::default();
        let p = Direction::from_spatial(&[0.6, 0.0, 0.8]).unwrap();
        let a = ev(&[1.0, -2.0, 0.5, 3.0]);
        assert!(!constant_line_detect(&id, &a, &p, 8, &tol).unwrap());
        let img = induced_sphere_map(&id, &a, &p, &tol).unwrap();
        for (x, y) in img.as_event().coords().iter().zip(p.as_event().coords()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_rotates_directions() {
        let q = spatial_rotation(4, 0, 1, std::f64::consts::FRAC_PI_2).unwrap();
        let ps = PoincareSimilarity::new(2.0, q, ev(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        let tol = TolerancePolicy::default();
        let p = Direction::from_spatial(&[1.0, 0.0, 0.0]).unwrap();
        let img = induced_sphere_map(&ps, &ev(&[3.0, 0.0, 0.0, 0.0]), &p, &tol).unwrap();
        let want = [0.0, 1.0, 0.0, 1.0];
        for (x, y) in img.as_event().coords().iter().zip(want) {
            assert!((x - y).abs() < 1e-12, "{img:?}");
        }
    }

    #[test]
    fn time_reversal_still_gives_a_direction() {
        let f = FnMap::new(4, |r: &Event<f64>| -*r);
        let tol = TolerancePolicy::default();
        let p = Direction::from_spatial(&[0.0, 0.0, 1.0]).unwrap();
        let img = induced_sphere_map(&f, &ev(&[0.0; 4]), &p, &tol).unwrap();
        assert_eq!(img.spatial(), &[0.0, 0.0, 1.0]);
    }
}
