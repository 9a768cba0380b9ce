use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::Event;
use crate::linalg::Mat;
use crate::scalar::Scalar;

use super::lorentz::{is_lorentz, LorentzMatrix};
use super::similarity::PoincareSimilarity;

/// `r -> L r + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
#[serde(try_from = "AffineRepr<T>")]
pub struct AffineMap<T: Scalar> {
    #[serde(rename = "L")]
    pub linear: Mat<T>,
    pub b: Event<T>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
struct AffineRepr<T: Scalar> {
    #[serde(rename = "L")]
    linear: Mat<T>,
    b: Event<T>,
}

impl<T: Scalar> TryFrom<AffineRepr<T>> for AffineMap<T> {
    type Error = Error;
    fn try_from(r: AffineRepr<T>) -> Result<Self> {
        AffineMap::new(r.linear, r.b)
    }
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(linear: Mat<T>, b: Event<T>) -> Result<Self> {
        if linear.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                left: linear.dim(),
                right: b.dim(),
            });
        }
        if !linear.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { linear, b })
    }

    pub(crate) fn new_unchecked(linear: Mat<T>, b: Event<T>) -> Self {
        Self { linear, b }
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn apply(&self, r: &Event<T>) -> Event<T> {
        self.linear.apply(r) + self.b
    }
}

/// Least-squares affine fit `y ≈ L r + b` through the normal equations.
///
/// Inputs are centred first, so `L^T` solves `C L^T = D` with `C` the input
/// scatter matrix and `D` the input/output cross scatter. The returned residual
/// is the RMS error divided by `1 + RMS |y_i|`.
pub fn fit_affine<T: Scalar>(samples: &[(Event<T>, Event<T>)]) -> Result<(AffineMap<T>, T)> {
    let Some((first, _)) = samples.first() else {
        return Err(Error::DegenerateSamples);
    };
    let n = first.dim();
    if samples.len() < n + 1 {
        return Err(Error::DegenerateSamples);
    }
    for (r, y) in samples {
        if r.dim() != n || y.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: if r.dim() != n { r.dim() } else { y.dim() },
            });
        }
    }
    let count = T::lit(samples.len() as f64);
    let zero = Event::zero_unchecked(n);
    let r_mean = samples.iter().fold(zero, |acc, (r, _)| acc + *r) * (T::one() / count);
    let y_mean = samples.iter().fold(zero, |acc, (_, y)| acc + *y) * (T::one() / count);

    let mut scatter = Mat::zeros_unchecked(n);
    let mut cross = vec![zero; n];
    for (r, y) in samples {
        let dr = *r - r_mean;
        let dy = *y - y_mean;
        for i in 0..n {
            for j in 0..n {
                scatter[(i, j)] = scatter[(i, j)] + dr[i] * dr[j];
            }
        }
        for (j, col) in cross.iter_mut().enumerate() {
            *col = *col + dr * dy[j];
        }
    }
    scatter
        .solve_many(&mut cross, T::lit(1e-12))
        .map_err(|_| Error::DegenerateSamples)?;
    // cross[j] now holds row j of L.
    let mut linear = Mat::zeros_unchecked(n);
    for (i, row) in cross.iter().enumerate() {
        for j in 0..n {
            linear[(i, j)] = row[j];
        }
    }
    let b = y_mean - linear.apply(&r_mean);
    let map = AffineMap::new(linear, b)?;

    let mut err_sq = T::zero();
    let mut out_sq = T::zero();
    for (r, y) in samples {
        err_sq = err_sq + (map.apply(r) - *y).norm_sq();
        out_sq = out_sq + y.norm_sq();
    }
    let residual = (err_sq / count).sqrt() / (T::one() + (out_sq / count).sqrt());
    Ok((map, residual))
}

/// Recovers `(k, Q, a)` when `L = k Q` with `Q` Lorentz.
///
/// `k = |det L|^{1/n}` because every Lorentz matrix has determinant `±1`.
/// In signature `(1, n-1)`, `n >= 3`, the similarity factor `k^2` cannot be
/// negative, so no sign branch is needed.
pub fn decompose_similarity<T: Scalar>(am: &AffineMap<T>, tol: T) -> Option<PoincareSimilarity<T>> {
    let n = am.dim();
    let det = am.linear.determinant();
    let k = det.abs().powf(T::one() / T::lit(n as f64));
    if !(k > tol) || !k.is_finite() {
        return None;
    }
    let q_hat = am.linear.scale(T::one() / k);
    if !is_lorentz(&q_hat, tol) {
        return None;
    }
    PoincareSimilarity::new(k, LorentzMatrix::new_unchecked(q_hat), am.b).ok()
}
