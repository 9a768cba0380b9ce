//! Constructive intersections of light cones.

use rand::Rng;

use crate::error::{Error, Result};
use crate::event::{Event, MAX_DIM};
use crate::linalg::null_space;
use crate::quadratic::{collinear, TolerancePolicy};
use crate::scalar::Scalar;
use crate::seeds::SeedStream;

const PERTURB_SEED: u64 = 0x2d4_1e77a;
const PERTURB_ROUNDS: u64 = 8;
const GOOD_FACTOR: f64 = 1e-3;
const MIN_FACTOR: f64 = 1e-8;

/// A point `z` coherent with both `x` and `y` satisfying `|z - x| <= |y - x|`.
///
/// Rotates `y - x` so its spatial part lies along a unit vector `u` and takes
/// `z = x + ((|v| + tau) / 2) (u, 1)` where `v`, `tau` are the spatial and
/// time parts of `y - x`. When `v = 0` the last spatial axis is used for `u`.
pub fn find_common_coherent<T: Scalar>(x: &Event<T>, y: &Event<T>) -> Result<Event<T>> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    let n = x.dim();
    let d = *y - *x;
    let v_norm = d.spatial_norm();
    let tau = d.time();
    let mut u = [T::zero(); MAX_DIM];
    if v_norm > T::zero() {
        for (ui, &vi) in u.iter_mut().zip(d.spatial()) {
            *ui = vi / v_norm;
        }
    } else {
        u[n - 2] = T::one();
    }
    u[n - 1] = T::one();
    let step = Event::from_slice_unchecked(&u[..n]);
    Ok(*x + step * ((v_norm + tau) * T::lit(0.5)))
}

/// A non-null `d` coherent with each of three pairwise independent null
/// vectors `a`, `b`, `c` (dimension at least 4).
///
/// Works in `P = {a - b, b - c}^perp`: any `d0 in P` with `B(d0, a) != 0` and
/// `q(d0) != 0` gives `d = t0 d0`, `t0 = 2 B(d0, a) / q(d0)`, the nonzero root
/// of `q(t d0 - a) = 0`.
pub fn find_transversal_coherent<T: Scalar>(
    a: &Event<T>,
    b: &Event<T>,
    c: &Event<T>,
    tol: &TolerancePolicy<T>,
) -> Result<Event<T>> {
    let n = a.dim();
    for other in [b, c] {
        if other.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: other.dim(),
            });
        }
    }
    if n < 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    if [a, b, c].iter().any(|v| !tol.is_null(v)) {
        return Err(Error::NotNull);
    }
    let origin = Event::zero_unchecked(n);
    if collinear(&origin, a, b, tol)
        || collinear(&origin, b, c, tol)
        || collinear(&origin, a, c, tol)
    {
        return Err(Error::Collinear);
    }

    // B(x, w) = <x, Mw>_euclid, so P is the Euclidean null space of M(a-b), M(b-c).
    let lowered = |w: Event<T>| {
        let mut out = -w;
        let last = n - 1;
        out.coords_mut()[last] = w.time();
        out
    };
    let basis = null_space(&[lowered(*a - *b), lowered(*b - *c)], T::lit(1e-12));
    if basis.is_empty() {
        return Err(Error::NoTransversal);
    }

    let a_norm = a.norm();
    let factors = |d0: &Event<T>| -> (T, T) {
        let dn = d0.norm();
        if dn == T::zero() {
            return (T::zero(), T::zero());
        }
        let bf = d0.dot(a).abs() / (dn * a_norm);
        let qf = d0.q().abs() / (dn * dn);
        (bf, qf)
    };
    let pick = |cands: &[Event<T>]| -> Option<(Event<T>, T, T)> {
        cands
            .iter()
            .map(|d0| {
                let (bf, qf) = factors(d0);
                (*d0, bf, qf)
            })
            .max_by(|x, y| (x.1 * x.2).partial_cmp(&(y.1 * y.2)).unwrap())
    };

    let mut candidates = basis.clone();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            candidates.push(basis[i] + basis[j]);
        }
    }
    let mut best = pick(&candidates);
    let good = T::lit(GOOD_FACTOR);
    let stream = SeedStream::new(PERTURB_SEED);
    let mut round = 0;
    while round < PERTURB_ROUNDS && !best.is_some_and(|(_, bf, qf)| bf >= good && qf >= good) {
        let mut rng = stream.rng(round);
        let mut combo = Event::zero_unchecked(n);
        for v in &basis {
            combo = combo + *v * T::lit(rng.random_range(-1.0..=1.0));
        }
        candidates.push(combo);
        best = pick(&candidates);
        round += 1;
    }

    let floor = T::lit(MIN_FACTOR);
    match best {
        Some((d0, bf, qf)) if bf > floor && qf > floor => {
            let t0 = (d0.dot(a) + d0.dot(a)) / d0.q();
            Ok(d0 * t0)
        }
        _ => Err(Error::NoTransversal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(c: &[f64]) -> Event<f64> {
        Event::new(c).unwrap()
    }

    #[test]
    fn common_coherent_worked_example() {
        let x = Event::zero(4).unwrap();
        let y = ev(&[0.0, 0.0, 3.0, 5.0]);
        let z = find_common_coherent(&x, &y).unwrap();
        assert_eq!(z.coords(), &[0.0, 0.0, 4.0, 4.0]);
    }

    #[test]
    fn common_coherent_equal_inputs() {
        let x = ev(&[1.0, -2.0, 3.0, 0.5]);
        assert_eq!(find_common_coherent(&x, &x).unwrap(), x);
    }

    #[test]
    fn common_coherent_purely_temporal_difference() {
        let x = ev(&[1.0, 1.0, 1.0, 1.0]);
        let y = ev(&[1.0, 1.0, 1.0, 3.0]);
        let z = find_common_coherent(&x, &y).unwrap();
        assert_eq!(z.coords(), &[1.0, 1.0, 2.0, 2.0]);
        assert_eq!((z - x).q(), 0.0);
        assert_eq!((z - y).q(), 0.0);
    }

    #[test]
    fn transversal_worked_example() {
        let tol = TolerancePolicy::default();
        let a = ev(&[1.0, 0.0, 0.0, 1.0]);
        let b = ev(&[-1.0, 0.0, 0.0, 1.0]);
        let c = ev(&[0.0, 1.0, 0.0, 1.0]);
        let d = find_transversal_coherent(&a, &b, &c, &tol).unwrap();
        assert_eq!(d.coords(), &[0.0, 0.0, 0.0, 2.0]);
        assert_eq!(d.q(), 4.0);
        for v in [a, b, c] {
            assert_eq!((d - v).q(), 0.0);
        }
    }

    #[test]
    fn transversal_errors() {
        let tol = TolerancePolicy::default();
        let a = ev(&[1.0, 0.0, 0.0, 1.0]);
        let b = ev(&[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(
            find_transversal_coherent(&a, &(a * 2.0), &b, &tol).unwrap_err(),
            Error::Collinear
        );
        assert_eq!(
            find_transversal_coherent(&a, &b, &ev(&[0.0, 0.0, 0.0, 1.0]), &tol).unwrap_err(),
            Error::NotNull
        );
        let a3 = ev(&[1.0, 0.0, 1.0]);
        let b3 = ev(&[0.0, 1.0, 1.0]);
        let c3 = ev(&[-1.0, 0.0, 1.0]);
        assert_eq!(
            find_transversal_coherent(&a3, &b3, &c3, &tol).unwrap_err(),
            Error::UnsupportedDimension(3)
        );
    }

    #[test]
    fn transversal_in_dimension_six() {
        let tol = TolerancePolicy::default();
        let a = ev(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let b = ev(&[0.0, 0.0, 0.0, 0.0, 2.0, -2.0]);
        let c = ev(&[0.0, 0.6, 0.8, 0.0, 0.0, 1.0]);
        let d = find_transversal_coherent(&a, &b, &c, &tol).unwrap();
        assert!(d.q().abs() > 1e-6 * (1.0 + d.norm_sq()));
        for v in [a, b, c] {
            assert!(tol.is_null(&(d - v)));
        }
    }
}
