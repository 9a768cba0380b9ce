//! The Minkowski quadratic form and the predicates built on it.
//!
//! Signature is `(1, n-1)` with the time coordinate last:
//! `q(x) = x_n^2 - sum_{k<n} x_k^2`. Exact-real predicates are replaced by
//! tolerance tests scaled quadratically in the Euclidean norm, see
//! [`TolerancePolicy`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{Direction, Event};
use crate::scalar::Scalar;

/// Relative tolerance `tau` with nullity scale `tau * (1 + |d|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy<T> {
    pub tau_rel: T,
}

impl<T: Scalar> TolerancePolicy<T> {
    pub fn new(tau_rel: T) -> Result<Self> {
        if tau_rel > T::zero() && tau_rel.is_finite() {
            Ok(Self { tau_rel })
        } else {
            Err(Error::InvalidArgument(format!(
                "tolerance must be positive and finite, got {tau_rel}"
            )))
        }
    }

    /// Threshold for `|q(d)|` below which `d` counts as null.
    #[inline]
    pub fn scale(&self, d: &Event<T>) -> T {
        self.tau_rel * (T::one() + d.norm_sq())
    }

    #[inline]
    pub fn is_null(&self, d: &Event<T>) -> bool {
        d.q().abs() <= self.scale(d)
    }

    /// Euclidean separation below which two events are treated as equal.
    #[inline]
    pub fn distinct(&self, a: &Event<T>, b: &Event<T>) -> bool {
        (*a - *b).norm() > self.tau_rel * (T::one() + a.norm() + b.norm())
    }
}

impl<T: Scalar> Default for TolerancePolicy<T> {
    fn default() -> Self {
        Self {
            tau_rel: T::lit(T::DEFAULT_TAU),
        }
    }
}

fn same_dim<T: Scalar>(a: &Event<T>, b: &Event<T>) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        })
    }
}

/// `t1 t2 - sum x1_k x2_k`.
pub fn minkowski_inner<T: Scalar>(r1: &Event<T>, r2: &Event<T>) -> Result<T> {
    same_dim(r1, r2)?;
    Ok(r1.dot(r2))
}

pub fn q<T: Scalar>(r: &Event<T>) -> T {
    r.q()
}

/// Polar form through the polarization identity, so that
/// `2 * polar(x, y) == q(x + y) - q(x) - q(y)` holds bit for bit.
pub fn polar<T: Scalar>(x: &Event<T>, y: &Event<T>) -> Result<T> {
    same_dim(x, y)?;
    Ok(T::lit(0.5) * ((*x + *y).q() - x.q() - y.q()))
}

pub fn eta<T: Scalar>(r: &Event<T>) -> T {
    r.time()
}

/// `q(a - b) = 0` within tolerance. Reflexive and symmetric.
pub fn is_coherent<T: Scalar>(a: &Event<T>, b: &Event<T>, tol: &TolerancePolicy<T>) -> bool {
    a.dim() == b.dim() && tol.is_null(&(*a - *b))
}

/// Coherent and distinct.
pub fn is_adjacent<T: Scalar>(a: &Event<T>, b: &Event<T>, tol: &TolerancePolicy<T>) -> bool {
    is_coherent(a, b, tol) && tol.distinct(a, b)
}

/// `pi_a(m) = (m - a) / eta(m - a)`, renormalized onto the cone section.
pub fn project_to_section<T: Scalar>(
    a: &Event<T>,
    m: &Event<T>,
    tol: &TolerancePolicy<T>,
) -> Result<Direction<T>> {
    same_dim(a, m)?;
    if !tol.distinct(a, m) {
        return Err(Error::VertexCoincidence);
    }
    let d = *m - *a;
    if !tol.is_null(&d) {
        return Err(Error::NotCoherent);
    }
    let time = d.time();
    if time.abs() <= tol.tau_rel * (T::one() + d.norm()) {
        return Err(Error::TimeComponentVanishes);
    }
    let mut spatial = [T::zero(); crate::event::MAX_DIM];
    for (s, &x) in spatial.iter_mut().zip(d.spatial()) {
        *s = x / time;
    }
    Direction::from_spatial(&spatial[..d.dim() - 1])
}

/// Whether `a`, `b`, `c` lie on one affine line: every 2x2 minor of
/// `(b - a, c - a)` vanishes relative to `|b - a| |c - a|`.
pub fn collinear<T: Scalar>(
    a: &Event<T>,
    b: &Event<T>,
    c: &Event<T>,
    tol: &TolerancePolicy<T>,
) -> bool {
    if a.dim() != b.dim() || a.dim() != c.dim() {
        return false;
    }
    let u = *b - *a;
    let v = *c - *a;
    let bound = tol.tau_rel * u.norm() * v.norm();
    let n = u.dim();
    for i in 0..n {
        for j in i + 1..n {
            if (u[i] * v[j] - u[j] * v[i]).abs() > bound {
                return false;
            }
        }
    }
    true
}

/// A maximal coherent set: the line `base + R * dir`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLine<T: Scalar> {
    pub base: Event<T>,
    pub dir: Direction<T>,
}

impl<T: Scalar> CoherentLine<T> {
    pub fn new(base: Event<T>, dir: Direction<T>) -> Result<Self> {
        same_dim(&base, dir.as_event())?;
        Ok(Self { base, dir })
    }

    pub fn point(&self, t: T) -> Event<T> {
        self.base + *self.dir.as_event() * t
    }
}
