//! Small dense square matrices (n <= 6) with inline storage.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use serde::de::{Deserialize, Deserializer};
use serde::ser::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::event::{check_dim, Event, MAX_DIM};
use crate::scalar::Scalar;

#[derive(Clone, Copy)]
pub struct Mat<T> {
    data: [[T; MAX_DIM]; MAX_DIM],
    n: u8,
}

impl<T: Copy> Mat<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i][..self.dim()]
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::zeros_unchecked(n))
    }

    pub(crate) fn zeros_unchecked(n: usize) -> Self {
        Self {
            data: [[T::zero(); MAX_DIM]; MAX_DIM],
            n: n as u8,
        }
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i][i] = T::one();
        }
        Ok(m)
    }

    pub fn diag(entries: &[T]) -> Result<Self> {
        let mut m = Self::zeros(entries.len())?;
        for (i, &e) in entries.iter().enumerate() {
            m.data[i][i] = e;
        }
        Ok(m)
    }

    /// `diag(-1, ..., -1, 1)`.
    pub fn minkowski_metric(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n - 1 {
            m.data[i][i] = -T::one();
        }
        m.data[n - 1][n - 1] = T::one();
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite);
                }
                m.data[i][j] = v;
            }
        }
        Ok(m)
    }

    /// Matrix whose columns are the given events.
    pub fn from_columns(cols: &[Event<T>]) -> Result<Self> {
        let n = cols.len();
        let mut m = Self::zeros(n)?;
        for (j, c) in cols.iter().enumerate() {
            if c.dim() != n {
                return Err(Error::NotSquare {
                    rows: c.dim(),
                    cols: n,
                });
            }
            for i in 0..n {
                m.data[i][j] = c[i];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.dim()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let mut t = Self::zeros_unchecked(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j][i] = self.data[i][j];
            }
        }
        t
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for row in out.data.iter_mut().take(self.dim()) {
            for v in row.iter_mut().take(self.dim()) {
                *v = *v * s;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "matrix dimension mismatch");
        let mut out = *self;
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                out.data[i][j] = out.data[i][j] - other.data[i][j];
            }
        }
        out
    }

    pub fn frobenius(&self) -> T {
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + self.data[i][j] * self.data[i][j];
            }
        }
        acc.sqrt()
    }

    pub fn apply(&self, v: &Event<T>) -> Event<T> {
        assert_eq!(self.dim(), v.dim(), "matrix/event dimension mismatch");
        let n = self.dim();
        let mut out = Event::zero_unchecked(n);
        let c = out.coords_mut();
        for i in 0..n {
            let mut acc = T::zero();
            for j in 0..n {
                acc = acc + self.data[i][j] * v[j];
            }
            c[i] = acc;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim()).all(|i| self.row(i).iter().all(|v| v.is_finite()))
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> T {
        let n = self.dim();
        let mut a = self.data;
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
                .unwrap();
            if a[pivot][col] == T::zero() {
                return T::zero();
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det = det * a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] = a[r][c] - f * a[col][c];
                }
            }
        }
        det
    }

    /// Solves `self * x = rhs` for each right-hand side column.
    ///
    /// Pivots smaller than `rel_pivot * max|entry|` are reported as singular.
    pub fn solve_many(&self, rhs: &mut [Event<T>], rel_pivot: T) -> Result<()> {
        let n = self.dim();
        let mut a = self.data;
        let scale = (0..n)
            .flat_map(|i| self.row(i).iter().map(|v| v.abs()))
            .fold(T::zero(), T::max);
        if scale == T::zero() {
            return Err(Error::Singular);
        }
        let mut perm: [usize; MAX_DIM] = [0, 1, 2, 3, 4, 5];
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
                .unwrap();
            if a[pivot][col].abs() <= rel_pivot * scale {
                return Err(Error::Singular);
            }
            a.swap(pivot, col);
            perm.swap(pivot, col);
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                a[r][col] = f;
                for c in col + 1..n {
                    a[r][c] = a[r][c] - f * a[col][c];
                }
            }
        }
        for b in rhs.iter_mut() {
            assert_eq!(b.dim(), n, "rhs dimension mismatch");
            let src = *b;
            let x = b.coords_mut();
            for i in 0..n {
                x[i] = src[perm[i]];
            }
            for i in 0..n {
                for k in 0..i {
                    x[i] = x[i] - a[i][k] * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    x[i] = x[i] - a[i][k] * x[k];
                }
                x[i] = x[i] / a[i][i];
            }
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &Event<T>, rel_pivot: T) -> Result<Event<T>> {
        let mut b = [*rhs];
        self.solve_many(&mut b, rel_pivot)?;
        Ok(b[0])
    }
}

impl<T: Scalar> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(
            i < self.dim() && j < self.dim(),
            "matrix index out of range"
        );
        &self.data[i][j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(
            i < self.dim() && j < self.dim(),
            "matrix index out of range"
        );
        &mut self.data[i][j]
    }
}

impl<T: Scalar> Mul for Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: Mat<T>) -> Mat<T> {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        let n = self.dim();
        let mut out = Mat::zeros_unchecked(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + self.data[i][k] * rhs.data[k][j];
                }
                out.data[i][j] = acc;
            }
        }
        out
    }
}

impl<T: Copy + PartialEq> PartialEq for Mat<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && (0..self.dim()).all(|i| self.row(i) == other.row(i))
    }
}

impl<T: Copy + fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n as usize;
        f.debug_list()
            .entries(self.data.iter().take(n).map(|r| &r[..n]))
            .finish()
    }
}

impl<T: Scalar + Serialize> Serialize for Mat<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Mat<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(deserializer)?;
        Mat::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Orthonormal basis of `{x : <row_i, x>_euclid = 0 for all i}` computed by
/// reduced row echelon form with partial pivoting, then Gram-Schmidt.
pub fn null_space<T: Scalar>(rows: &[Event<T>], rel_pivot: T) -> Vec<Event<T>> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let n = first.dim();
    let mut a: Vec<Vec<T>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(T::zero(), T::max);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == a.len() {
            break;
        }
        let best = (r..a.len())
            .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
            .unwrap();
        if a[best][c].abs() <= rel_pivot * scale {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c];
        for v in a[r].iter_mut() {
            *v = *v / p;
        }
        for i in 0..a.len() {
            if i != r {
                let f = a[i][c];
                if f != T::zero() {
                    for k in 0..n {
                        a[i][k] = a[i][k] - f * a[r][k];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis: Vec<Event<T>> = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = Event::zero_unchecked(n);
        {
            let x = v.coords_mut();
            x[free] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -a[row][free];
            }
        }
        for b in &basis {
            v = v - *b * v.euclid_dot(b);
        }
        let norm = v.norm();
        if norm > T::zero() {
            basis.push(v * (T::one() / norm));
        }
    }
    basis
}
