//! Space-time events and null directions.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::de::{Deserialize, Deserializer};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MIN_DIM: usize = 3;
pub const MAX_DIM: usize = 6;
pub const DEFAULT_DIM: usize = 4;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// A point of `R^n`, `3 <= n <= 6`, with the last coordinate as time.
///
/// Coordinates are stored inline so events are `Copy` and never allocate.
/// Arithmetic between events of different dimension panics; the checked
/// entry points in [`crate::quadratic`] report it as an error instead.
#[derive(Clone, Copy)]
pub struct Event<T> {
    coords: [T; MAX_DIM],
    dim: u8,
}

impl<T: Copy> Event<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords[..self.dim()]
    }

    #[inline]
    pub(crate) fn coords_mut(&mut self) -> &mut [T] {
        let d = self.dim();
        &mut self.coords[..d]
    }

    #[inline]
    pub fn spatial(&self) -> &[T] {
        &self.coords[..self.dim() - 1]
    }

    /// Time coordinate, the linear form `eta`.
    #[inline]
    pub fn time(&self) -> T {
        self.coords[self.dim() - 1]
    }
}

impl<T: Scalar> Event<T> {
    pub fn new(coords: &[T]) -> Result<Self> {
        check_dim(coords.len())?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_slice_unchecked(coords))
    }

    /// Builds an event from `f64` coordinates, converting to `T`.
    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        let converted: Vec<T> = coords.iter().map(|&c| T::lit(c)).collect();
        Self::new(&converted)
    }

    pub(crate) fn from_slice_unchecked(coords: &[T]) -> Self {
        let mut out = Self::zero_unchecked(coords.len());
        out.coords[..coords.len()].copy_from_slice(coords);
        out
    }

    pub(crate) fn zero_unchecked(dim: usize) -> Self {
        Self {
            coords: [T::zero(); MAX_DIM],
            dim: dim as u8,
        }
    }

    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::zero_unchecked(dim))
    }

    /// The `i`-th standard basis vector (0-based; `dim - 1` is time).
    pub fn unit(dim: usize, i: usize) -> Result<Self> {
        check_dim(dim)?;
        if i >= dim {
            return Err(Error::BadAxis);
        }
        let mut e = Self::zero_unchecked(dim);
        e.coords[i] = T::one();
        Ok(e)
    }

    /// Event `(0, ..., 0, 1)`.
    pub fn time_unit(dim: usize) -> Result<Self> {
        Self::unit(dim, dim.saturating_sub(1))
    }

    /// Assembles an event from a spatial part and a time coordinate.
    pub fn from_parts(spatial: &[T], time: T) -> Result<Self> {
        let mut buf = [T::zero(); MAX_DIM];
        let dim = spatial.len() + 1;
        check_dim(dim)?;
        buf[..spatial.len()].copy_from_slice(spatial);
        buf[spatial.len()] = time;
        Self::new(&buf[..dim])
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }

    pub fn norm_sq(&self) -> T {
        self.coords().iter().fold(T::zero(), |acc, &c| acc + c * c)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn spatial_norm(&self) -> T {
        self.spatial()
            .iter()
            .fold(T::zero(), |acc, &c| acc + c * c)
            .sqrt()
    }

    /// Minkowski inner product `t t' - sum x_k x'_k`.
    ///
    /// # Panics
    /// If the dimensions differ.
    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        assert_same_dim(self, other);
        let n = self.dim();
        let mut acc = self.coords[n - 1] * other.coords[n - 1];
        for k in 0..n - 1 {
            acc = acc - self.coords[k] * other.coords[k];
        }
        acc
    }

    /// Quadratic form `q(r) = t^2 - |x|^2`.
    #[inline]
    pub fn q(&self) -> T {
        self.dot(self)
    }

    /// Euclidean dot product of the full coordinate vectors.
    pub fn euclid_dot(&self, other: &Self) -> T {
        assert_same_dim(self, other);
        self.coords()
            .iter()
            .zip(other.coords())
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords().iter().map(|c| c.to_f64_lossy()).collect()
    }
}

#[inline]
fn assert_same_dim<T: Scalar>(a: &Event<T>, b: &Event<T>) {
    assert_eq!(
        a.dim(),
        b.dim(),
        "event dimension mismatch: {} vs {}",
        a.dim(),
        b.dim()
    );
}

impl<T: Copy + PartialEq> PartialEq for Event<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.coords() == other.coords()
    }
}

impl<T: Copy + fmt::Debug> fmt::Debug for Event<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Event").field(&self.coords()).finish()
    }
}

impl<T: Copy> Index<usize> for Event<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.coords()[i]
    }
}

impl<T: Scalar> Add for Event<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_same_dim(&self, &rhs);
        for (a, &b) in self.coords_mut().iter_mut().zip(rhs.coords()) {
            *a = *a + b;
        }
        self
    }
}

impl<T: Scalar> Sub for Event<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        assert_same_dim(&self, &rhs);
        for (a, &b) in self.coords_mut().iter_mut().zip(rhs.coords()) {
            *a = *a - b;
        }
        self
    }
}

impl<T: Scalar> Neg for Event<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for a in self.coords_mut() {
            *a = -*a;
        }
        self
    }
}

impl<T: Scalar> Mul<T> for Event<T> {
    type Output = Self;
    fn mul(mut self, s: T) -> Self {
        for a in self.coords_mut() {
            *a = *a * s;
        }
        self
    }
}

impl<T: Scalar + Serialize> Serialize for Event<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim()))?;
        for c in self.coords() {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Event<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<T>::deserialize(deserializer)?;
        Event::new(&coords).map_err(serde::de::Error::custom)
    }
}

/// A point of the cone section: unit spatial part, time coordinate 1.
///
/// Every nonzero null vector is `t * p` for a unique `t != 0` and direction `p`.
#[derive(Clone, Copy, PartialEq)]
pub struct Direction<T: Copy>(Event<T>);

impl<T: Scalar> Direction<T> {
    /// Normalizes a nonzero spatial vector onto the section.
    pub fn from_spatial(spatial: &[T]) -> Result<Self> {
        check_dim(spatial.len() + 1)?;
        let norm = spatial.iter().fold(T::zero(), |acc, &c| acc + c * c).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if norm <= T::min_positive_value() {
            return Err(Error::InvalidArgument("zero spatial vector".into()));
        }
        let mut buf = [T::zero(); MAX_DIM];
        for (b, &s) in buf.iter_mut().zip(spatial) {
            *b = s / norm;
        }
        buf[spatial.len()] = T::one();
        Ok(Self(Event::from_slice_unchecked(&buf[..spatial.len() + 1])))
    }

    /// Accepts an event already on the section (time 1, spatial norm 1).
    pub fn new(event: Event<T>) -> Result<Self> {
        let time_ok = event.time() == T::one();
        let norm_ok = (event.spatial_norm() - T::one()).abs()
            <= T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
        if !(time_ok && norm_ok) {
            return Err(Error::InvalidArgument(
                "direction must have time 1 and unit spatial part".into(),
            ));
        }
        Self::from_spatial(event.spatial())
    }

    #[inline]
    pub fn as_event(&self) -> &Event<T> {
        &self.0
    }

    #[inline]
    pub fn into_event(self) -> Event<T> {
        self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn spatial(&self) -> &[T] {
        self.0.spatial()
    }
}

impl<T: Copy + fmt::Debug> fmt::Debug for Direction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Direction").field(&self.0.coords()).finish()
    }
}

impl<T: Scalar + Serialize> Serialize for Direction<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Direction<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let ev = Event::<T>::deserialize(deserializer)?;
        if (ev.time() - T::one()).abs() > T::lit(1e-9) {
            return Err(serde::de::Error::custom(
                "direction time coordinate must be 1",
            ));
        }
        Direction::from_spatial(ev.spatial()).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dimensions_and_nan() {
        assert_eq!(
            Event::<f64>::new(&[1.0, 2.0]).unwrap_err(),
            Error::UnsupportedDimension(2)
        );
        assert_eq!(
            Event::<f64>::new(&[0.0; 7]).unwrap_err(),
            Error::UnsupportedDimension(7)
        );
        assert_eq!(
            Event::<f64>::new(&[0.0, f64::NAN, 0.0, 1.0]).unwrap_err(),
            Error::NonFinite
        );
    }

    #[test]
    fn arithmetic_and_accessors() {
        let a = Event::new(&[1.0, 2.0, 3.0, 5.0]).unwrap();
        let b = Event::new(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!((a - b).coords(), &[0.0, 1.0, 2.0, 4.0]);
        assert_eq!((a + b).coords(), &[2.0, 3.0, 4.0, 6.0]);
        assert_eq!((a * 2.0).coords(), &[2.0, 4.0, 6.0, 10.0]);
        assert_eq!(a.time(), 5.0);
        assert_eq!(a.spatial(), &[1.0, 2.0, 3.0]);
        assert_eq!(a.q(), 11.0);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn mixed_dimensions_panic() {
        let a = Event::<f64>::zero(4).unwrap();
        let b = Event::<f64>::zero(5).unwrap();
        let _ = a - b;
    }

    #[test]
    fn direction_normalizes() {
        let p = Direction::from_spatial(&[3.0, 4.0, 0.0]).unwrap();
        assert_eq!(p.as_event().coords(), &[0.6, 0.8, 0.0, 1.0]);
        assert!(Direction::<f64>::from_spatial(&[0.0, 0.0, 0.0]).is_err());
        assert!(Direction::new(Event::new(&[1.0, 0.0, 0.0, 2.0]).unwrap()).is_err());
    }

    #[test]
    fn serde_as_array() {
        let a = Event::new(&[1.0, 2.0, 3.0, 5.0]).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[1.0,2.0,3.0,5.0]");
        let back: Event<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Event<f64>>("[1.0,2.0]").is_err());
    }
}
