//! Geometry and transformation analysis on Minkowski space.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases
//! at the bottom of this file name the common concrete choices.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod analyzer;
pub mod cones;
pub mod degenerate;
pub mod error;
pub mod event;
pub mod hermitian;
pub mod linalg;
pub mod quadratic;
pub mod scalar;
pub mod seeds;
pub mod transforms;

pub use error::{Error, Result};
pub use event::{Direction, Event};
pub use linalg::Mat;
pub use quadratic::TolerancePolicy;
pub use scalar::Scalar;

pub type Event64 = Event<f64>;
pub type Event32 = Event<f32>;
pub type Direction64 = Direction<f64>;
pub type Direction32 = Direction<f32>;
pub type Mat64 = Mat<f64>;
pub type Mat32 = Mat<f32>;
pub type TolerancePolicy64 = TolerancePolicy<f64>;
pub type TolerancePolicy32 = TolerancePolicy<f32>;
pub type Herm2F64 = hermitian::Herm2<f64>;
pub type LorentzMatrix64 = transforms::LorentzMatrix<f64>;
pub type PoincareSimilarity64 = transforms::PoincareSimilarity<f64>;
pub type PoincareSimilarity32 = transforms::PoincareSimilarity<f32>;
pub type AffineMap64 = transforms::AffineMap<f64>;
pub type DegenerateSpec64 = degenerate::DegenerateSpec<f64>;
pub type TableMap64 = analyzer::TableMap<f64>;
pub type Classification64 = analyzer::Classification<f64>;
