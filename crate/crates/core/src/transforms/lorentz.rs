use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// `|Q M Q^T - M|_F <= tol * n` with `M = diag(-1, ..., -1, 1)`.
pub fn is_lorentz<T: Scalar>(q: &Mat<T>, tol: T) -> bool {
    let n = q.dim();
    let m = Mat::minkowski_metric(n).expect("matrix dimension already validated");
    let residual = (*q * m * q.transpose()).sub(&m).frobenius();
    residual <= tol * T::lit(n as f64)
}

/// A matrix preserving the quadratic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMatrix<T: Scalar>(Mat<T>);

impl<T: Scalar> LorentzMatrix<T> {
    pub fn new(m: Mat<T>, tol: T) -> Result<Self> {
        if is_lorentz(&m, tol) {
            Ok(Self(m))
        } else {
            Err(Error::InvalidArgument(
                "matrix does not satisfy Q M Q^T = M".into(),
            ))
        }
    }

    pub(crate) fn new_unchecked(m: Mat<T>) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self(Mat::identity(n)?))
    }

    /// Time reversal composed with nothing else: `diag(1, ..., 1, -1)`.
    pub fn time_reversal(n: usize) -> Result<Self> {
        Ok(Self(Mat::minkowski_metric(n)?.scale(-T::one())))
    }

    /// Reflection of every spatial axis: `diag(-1, ..., -1, 1)`.
    pub fn point_reflection(n: usize) -> Result<Self> {
        Ok(Self(Mat::minkowski_metric(n)?))
    }

    /// Reflection of a single spatial axis.
    pub fn axis_reflection(n: usize, axis: usize) -> Result<Self> {
        if axis + 1 >= n {
            return Err(Error::BadAxis);
        }
        let mut m = Mat::identity(n)?;
        m[(axis, axis)] = -T::one();
        Ok(Self(m))
    }

    #[inline]
    pub fn as_mat(&self) -> &Mat<T> {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `Q^{-1} = M Q^T M`.
    pub fn inverse(&self) -> Self {
        let m = Mat::minkowski_metric(self.dim()).expect("validated dimension");
        Self(m * self.0.transpose() * m)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }
}

impl<T: Scalar + Serialize> Serialize for LorentzMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for LorentzMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = Mat::<T>::deserialize(deserializer)?;
        LorentzMatrix::new(m, T::lit(T::DEFAULT_TAU)).map_err(serde::de::Error::custom)
    }
}

/// Boost mixing spatial `axis` (0-based) with time.
pub fn boost<T: Scalar>(n: usize, axis: usize, rapidity: T) -> Result<LorentzMatrix<T>> {
    let mut m = Mat::identity(n)?;
    if axis + 1 >= n {
        return Err(Error::BadAxis);
    }
    let (c, s) = (rapidity.cosh(), rapidity.sinh());
    let t = n - 1;
    m[(axis, axis)] = c;
    m[(axis, t)] = s;
    m[(t, axis)] = s;
    m[(t, t)] = c;
    Ok(LorentzMatrix(m))
}

/// Rotation by `angle` in the spatial plane `(i, j)`, taking `e_i` towards `e_j`.
pub fn spatial_rotation<T: Scalar>(
    n: usize,
    i: usize,
    j: usize,
    angle: T,
) -> Result<LorentzMatrix<T>> {
    let mut m = Mat::identity(n)?;
    if i == j || i + 1 >= n || j + 1 >= n {
        return Err(Error::BadAxis);
    }
    let (c, s) = (angle.cos(), angle.sin());
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(j, i)] = s;
    m[(i, j)] = -s;
    Ok(LorentzMatrix(m))
}
