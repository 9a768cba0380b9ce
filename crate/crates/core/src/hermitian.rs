//! The 2x2 Hermitian matrix model of 4-dimensional Minkowski space.
//!
//! `(x, y, z, t) -> [[t + z, x + iy], [x - iy, t - z]]` is a linear isometry
//! onto Hermitian matrices with `det` as the quadratic form. Coherent events
//! map to matrices whose difference has rank one.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::Event;
use crate::linalg::Mat;
use crate::quadratic::TolerancePolicy;
use crate::scalar::Scalar;
use crate::transforms::AffineMap;

/// Complex number as an explicit real pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cplx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Scalar> Cplx<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn real(re: T) -> Self {
        Self { re, im: T::zero() }
    }

    pub fn zero() -> Self {
        Self::real(T::zero())
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sq(self) -> T {
        self.re * self.re + self.im * self.im
    }
}

impl<T: Scalar> Add for Cplx<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl<T: Scalar> Sub for Cplx<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl<T: Scalar> Mul for Cplx<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Hermitian matrix `[[d1, off], [conj(off), d2]]`.
///
/// Serializes as `[d1, d2, off_re, off_im]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[T; 4]", into = "[T; 4]")]
pub struct Herm2<T: Scalar> {
    pub d1: T,
    pub d2: T,
    pub off_re: T,
    pub off_im: T,
}

impl<T: Scalar> From<[T; 4]> for Herm2<T> {
    fn from([d1, d2, off_re, off_im]: [T; 4]) -> Self {
        Self {
            d1,
            d2,
            off_re,
            off_im,
        }
    }
}

impl<T: Scalar> From<Herm2<T>> for [T; 4] {
    fn from(h: Herm2<T>) -> Self {
        [h.d1, h.d2, h.off_re, h.off_im]
    }
}

impl<T: Scalar> Herm2<T> {
    pub fn new(d1: T, d2: T, off_re: T, off_im: T) -> Self {
        Self {
            d1,
            d2,
            off_re,
            off_im,
        }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::one(), T::zero(), T::zero())
    }

    pub fn diag(d1: T, d2: T) -> Self {
        Self::new(d1, d2, T::zero(), T::zero())
    }

    pub fn off(&self) -> Cplx<T> {
        Cplx::new(self.off_re, self.off_im)
    }

    pub fn det(&self) -> T {
        self.d1 * self.d2 - (self.off_re * self.off_re + self.off_im * self.off_im)
    }

    pub fn trace(&self) -> T {
        self.d1 + self.d2
    }

    /// `A^t`, which equals the entrywise conjugate for Hermitian `A`.
    pub fn transpose(&self) -> Self {
        Self::new(self.d1, self.d2, self.off_re, -self.off_im)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.d1 * s, self.d2 * s, self.off_re * s, self.off_im * s)
    }

    pub fn max_abs_entry(&self) -> T {
        self.d1
            .abs()
            .max(self.d2.abs())
            .max(self.off().norm_sq().sqrt())
    }

    fn entries(&self) -> [[Cplx<T>; 2]; 2] {
        [
            [Cplx::real(self.d1), self.off()],
            [self.off().conj(), Cplx::real(self.d2)],
        ]
    }
}

impl<T: Scalar> Add for Herm2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.d1 + o.d1,
            self.d2 + o.d2,
            self.off_re + o.off_re,
            self.off_im + o.off_im,
        )
    }
}

impl<T: Scalar> Sub for Herm2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.d1 - o.d1,
            self.d2 - o.d2,
            self.off_re - o.off_re,
            self.off_im - o.off_im,
        )
    }
}

/// General 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex2x2<T> {
    pub m: [[Cplx<T>; 2]; 2],
}

impl<T: Scalar> Complex2x2<T> {
    pub fn new(m: [[Cplx<T>; 2]; 2]) -> Self {
        Self { m }
    }

    /// Row-major real/imaginary pairs `[a_re, a_im, b_re, b_im, c_re, c_im, d_re, d_im]`.
    pub fn from_reals(v: [T; 8]) -> Self {
        Self::new([
            [Cplx::new(v[0], v[1]), Cplx::new(v[2], v[3])],
            [Cplx::new(v[4], v[5]), Cplx::new(v[6], v[7])],
        ])
    }

    pub fn identity() -> Self {
        Self::diag(Cplx::real(T::one()), Cplx::real(T::one()))
    }

    pub fn diag(a: Cplx<T>, d: Cplx<T>) -> Self {
        Self::new([[a, Cplx::zero()], [Cplx::zero(), d]])
    }

    pub fn det(&self) -> Cplx<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    fn mul_entries(a: &[[Cplx<T>; 2]; 2], b: &[[Cplx<T>; 2]; 2]) -> [[Cplx<T>; 2]; 2] {
        let mut out = [[Cplx::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    /// `self * h * self^*`, Hermitian by construction.
    pub fn congruence(&self, h: &Herm2<T>) -> Herm2<T> {
        let left = Self::mul_entries(&self.m, &h.entries());
        let full = Self::mul_entries(&left, &self.adjoint().m);
        Herm2::new(full[0][0].re, full[1][1].re, full[0][1].re, full[0][1].im)
    }
}

pub fn event_to_herm<T: Scalar>(r: &Event<T>) -> Result<Herm2<T>> {
    if r.dim() != 4 {
        return Err(Error::UnsupportedDimension(r.dim()));
    }
    let (x, y, z, t) = (r[0], r[1], r[2], r[3]);
    Ok(Herm2::new(t + z, t - z, x, y))
}

pub fn herm_to_event<T: Scalar>(a: &Herm2<T>) -> Event<T> {
    let half = T::lit(0.5);
    Event::from_slice_unchecked(&[
        a.off_re,
        a.off_im,
        (a.d1 - a.d2) * half,
        (a.d1 + a.d2) * half,
    ])
}

/// Rank of a Hermitian 2x2 matrix under the shared tolerance policy.
///
/// Rank 0 when every entry is within `tau`; rank 2 when `|det|` exceeds the
/// quadratic scale of the corresponding event; rank 1 otherwise.
pub fn rank2<T: Scalar>(a: &Herm2<T>, tol: &TolerancePolicy<T>) -> u8 {
    if a.max_abs_entry() <= tol.tau_rel {
        0
    } else if a.det().abs() > tol.scale(&herm_to_event(a)) {
        2
    } else {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// `A -> c T A T^* + S`, or with `A^t` in place of `A` when `transpose` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardPreserver<T: Scalar> {
    pub sign: Sign,
    pub t: Complex2x2<T>,
    pub s: Herm2<T>,
    pub transpose: bool,
}

impl<T: Scalar> StandardPreserver<T> {
    pub fn new(sign: Sign, t: Complex2x2<T>, s: Herm2<T>, transpose: bool) -> Result<Self> {
        let det = t.det().norm_sq().sqrt();
        let scale =
            t.m.iter()
                .flatten()
                .map(|c| c.norm_sq())
                .fold(T::zero(), T::max);
        if !(det > T::epsilon() * T::lit(16.0) * scale) {
            return Err(Error::Singular);
        }
        Ok(Self {
            sign,
            t,
            s,
            transpose,
        })
    }

    pub fn apply(&self, a: &Herm2<T>) -> Herm2<T> {
        let a = if self.transpose { a.transpose() } else { *a };
        self.t.congruence(&a).scale(self.sign.value()) + self.s
    }

    /// The same map read through the isometry as an affine map of `R^4`.
    pub fn to_affine(&self) -> AffineMap<T> {
        let origin = herm_to_event(&self.apply(&Herm2::default()));
        let cols: Vec<Event<T>> = (0..4)
            .map(|i| {
                let e = Event::unit(4, i).expect("dimension 4");
                let img = self.apply(&event_to_herm(&e).expect("dimension 4"));
                herm_to_event(&img) - origin
            })
            .collect();
        let linear = Mat::from_columns(&cols).expect("four columns of dimension 4");
        AffineMap::new_unchecked(linear, origin)
    }
}

/// One-shot form of [`StandardPreserver::apply`].
pub fn standard_preserver<T: Scalar>(
    sign: Sign,
    t: &Complex2x2<T>,
    s: &Herm2<T>,
    transpose: bool,
    a: &Herm2<T>,
) -> Result<Herm2<T>> {
    Ok(StandardPreserver::new(sign, *t, *s, transpose)?.apply(a))
}

/// `A -> trace(A) R + S` for a rank-one Hermitian projection `R`.
///
/// Adjacent inputs differ by a rank-one Hermitian matrix, whose trace is its
/// only nonzero eigenvalue, so outputs stay adjacent.
pub fn trace_degenerate_preserver<T: Scalar>(
    r: &Herm2<T>,
    s: &Herm2<T>,
    a: &Herm2<T>,
    tol: &TolerancePolicy<T>,
) -> Result<Herm2<T>> {
    check_projection(r, tol)?;
    Ok(r.scale(a.trace()) + *s)
}

fn check_projection<T: Scalar>(r: &Herm2<T>, tol: &TolerancePolicy<T>) -> Result<()> {
    let o2 = r.off().norm_sq();
    let square = Herm2::new(
        r.d1 * r.d1 + o2,
        r.d2 * r.d2 + o2,
        r.off_re * r.trace(),
        r.off_im * r.trace(),
    );
    let bound = tol.tau_rel * (T::one() + r.max_abs_entry());
    let idempotent = (square - *r).max_abs_entry() <= bound;
    let rank_one = (r.trace() - T::one()).abs() <= bound;
    if idempotent && rank_one {
        Ok(())
    } else {
        Err(Error::NotProjection)
    }
}
