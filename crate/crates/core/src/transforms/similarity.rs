use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::Event;
use crate::scalar::Scalar;
use crate::seeds::{uniform, uniform_event, SeedStream};

use super::affine::AffineMap;
use super::lorentz::{boost, spatial_rotation, LorentzMatrix};

/// `r -> k Q r + a` with `k > 0` and `Q` Lorentz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
#[serde(try_from = "SimilarityRepr<T>")]
pub struct PoincareSimilarity<T: Scalar> {
    pub k: T,
    #[serde(rename = "Q")]
    pub q: LorentzMatrix<T>,
    pub a: Event<T>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
struct SimilarityRepr<T: Scalar> {
    k: T,
    #[serde(rename = "Q")]
    q: LorentzMatrix<T>,
    a: Event<T>,
}

impl<T: Scalar> TryFrom<SimilarityRepr<T>> for PoincareSimilarity<T> {
    type Error = Error;
    fn try_from(r: SimilarityRepr<T>) -> Result<Self> {
        PoincareSimilarity::new(r.k, r.q, r.a)
    }
}

impl<T: Scalar> PoincareSimilarity<T> {
    pub fn new(k: T, q: LorentzMatrix<T>, a: Event<T>) -> Result<Self> {
        if !(k > T::zero() && k.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale k must be positive, got {k}"
            )));
        }
        if q.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                left: q.dim(),
                right: a.dim(),
            });
        }
        Ok(Self { k, q, a })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self {
            k: T::one(),
            q: LorentzMatrix::identity(n)?,
            a: Event::zero(n)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn apply(&self, r: &Event<T>) -> Event<T> {
        self.q.as_mat().apply(r) * self.k + self.a
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            k: self.k * other.k,
            q: self.q.compose(&other.q),
            a: self.q.as_mat().apply(&other.a) * self.k + self.a,
        }
    }

    pub fn invert(&self) -> Self {
        let q_inv = self.q.inverse();
        let k_inv = T::one() / self.k;
        Self {
            k: k_inv,
            q: q_inv,
            a: -(q_inv.as_mat().apply(&self.a) * k_inv),
        }
    }

    pub fn to_affine(&self) -> AffineMap<T> {
        AffineMap::new_unchecked(self.q.as_mat().scale(self.k), self.a)
    }
}

/// Parameter ranges for [`random_similarity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityBounds {
    pub k_min: f64,
    pub k_max: f64,
    /// Largest absolute rapidity of each boost factor.
    pub max_rapidity: f64,
    /// Translation drawn uniformly from `[-translation, translation]^n`.
    pub translation: f64,
    /// Number of boost/rotation factors is uniform in `1..=max_factors`.
    pub max_factors: usize,
}

impl Default for SimilarityBounds {
    fn default() -> Self {
        Self {
            k_min: 0.5,
            k_max: 2.0,
            max_rapidity: 0.5,
            translation: 5.0,
            max_factors: 6,
        }
    }
}

impl SimilarityBounds {
    fn validate(&self) -> Result<()> {
        let ok = self.k_min > 0.0
            && self.k_max >= self.k_min
            && self.max_rapidity >= 0.0
            && self.translation >= 0.0
            && self.max_factors >= 1
            && [self.k_min, self.k_max, self.max_rapidity, self.translation]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid similarity bounds {self:?}"
            )))
        }
    }
}

/// Seeded similarity: log-uniform `k`, `Q` a product of boosts and spatial
/// rotations, uniform translation.
pub fn random_similarity<T: Scalar>(
    seed: u64,
    n: usize,
    bounds: &SimilarityBounds,
) -> Result<PoincareSimilarity<T>> {
    bounds.validate()?;
    let mut rng = SeedStream::new(seed).rng(0);
    let k = rng
        .random_range(bounds.k_min.ln()..=bounds.k_max.ln())
        .exp();
    let factors = rng.random_range(1..=bounds.max_factors);
    let mut q = LorentzMatrix::identity(n)?;
    for _ in 0..factors {
        let factor = if rng.random_bool(0.5) {
            let axis = rng.random_range(0..n - 1);
            boost(
                n,
                axis,
                uniform(&mut rng, -bounds.max_rapidity, bounds.max_rapidity),
            )?
        } else {
            let i = rng.random_range(0..n - 1);
            let mut j = rng.random_range(0..n - 2);
            if j >= i {
                j += 1;
            }
            spatial_rotation(
                n,
                i,
                j,
                uniform(&mut rng, -std::f64::consts::PI, std::f64::consts::PI),
            )?
        };
        q = factor.compose(&q);
    }
    let a = uniform_event(&mut rng, n, bounds.translation)?;
    PoincareSimilarity::new(T::lit(k), q, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::transforms::is_lorentz;

    fn ev(c: &[f64]) -> Event<f64> {
        Event::new(c).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = PoincareSimilarity::<f64>::identity(4).unwrap();
        let r = ev(&[1.0, -2.0, 0.5, 3.0]);
        assert_eq!(id.apply(&r), r);
        let ps = PoincareSimilarity::new(
            2.0,
            LorentzMatrix::identity(4).unwrap(),
            ev(&[0.0, 0.0, 0.0, 1.0]),
        )
        .unwrap();
        assert_eq!(
            ps.apply(&ev(&[1.0, 0.0, 0.0, 1.0])).coords(),
            &[2.0, 0.0, 0.0, 3.0]
        );
    }

    #[test]
    fn boost_keeps_null_vectors_null() {
        let ps = PoincareSimilarity::new(1.0, boost(4, 2, 0.7).unwrap(), Event::zero(4).unwrap())
            .unwrap();
        let img = ps.apply(&ev(&[3.0, 4.0, 0.0, 5.0]));
        assert!(img.q().abs() < 1e-12 * (1.0 + img.norm_sq()));
    }

    #[test]
    fn rejects_nonpositive_k() {
        let q = LorentzMatrix::<f64>::identity(4).unwrap();
        assert!(PoincareSimilarity::new(0.0, q, Event::zero(4).unwrap()).is_err());
        assert!(PoincareSimilarity::new(-1.0, q, Event::zero(4).unwrap()).is_err());
    }

    #[test]
    fn compose_and_invert() {
        let id = PoincareSimilarity::<f64>::identity(4).unwrap();
        assert_eq!(id.invert(), id);
        let ps = random_similarity::<f64>(3, 4, &SimilarityBounds::default()).unwrap();
        assert_eq!(ps.compose(&id), ps);
        assert_eq!(id.compose(&ps), ps);
        let round = ps.compose(&ps.invert());
        assert!((round.k - 1.0).abs() < 1e-12);
        assert!(round.q.as_mat().sub(&Mat::identity(4).unwrap()).frobenius() < 1e-9);
        assert!(round.a.norm() < 1e-9);
    }

    #[test]
    fn random_similarity_is_reproducible_and_lorentz() {
        let b = SimilarityBounds::default();
        let p1 = random_similarity::<f64>(11, 4, &b).unwrap();
        let p2 = random_similarity::<f64>(11, 4, &b).unwrap();
        let p3 = random_similarity::<f64>(12, 4, &b).unwrap();
        assert_eq!(p1, p2);
        assert_ne!(p1, p3);
        assert!(is_lorentz(p1.q.as_mat(), 1e-9));
        assert!(p1.k >= 0.5 && p1.k <= 2.0);
    }

    #[test]
    fn serde_shape() {
        let ps = PoincareSimilarity::new(
            2.0,
            LorentzMatrix::identity(4).unwrap(),
            ev(&[0.0, 0.0, 0.0, 1.0]),
        )
        .unwrap();
        let v = serde_json::to_value(ps).unwrap();
        assert_eq!(v["k"], 2.0);
        assert_eq!(v["Q"][3][3], 1.0);
        assert_eq!(v["a"][3], 1.0);
        let back: PoincareSimilarity<f64> = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(back, ps);
        let mut bad = v;
        bad["k"] = serde_json::json!(-1.0);
        assert!(serde_json::from_value::<PoincareSimilarity<f64>>(bad).is_err());
    }
}
