//! Lorentz matrices, Poincaré similarities `r -> k Q r + a`, and recovery of
//! similarities from sampled affine behaviour.

mod affine;
mod lorentz;
mod similarity;

pub use affine::{decompose_similarity, fit_affine, AffineMap};
pub use lorentz::{boost, is_lorentz, spatial_rotation, LorentzMatrix};
pub use similarity::{random_similarity, PoincareSimilarity, SimilarityBounds};
