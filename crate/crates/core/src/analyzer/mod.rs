//! Black-box analysis of candidate coherency preservers.
//!
//! Maps are only observed through evaluation. The checker samples coherent
//! pairs, the line tools probe images of coherent lines, and the classifier
//! decides between a Poincaré similarity, a degenerate map, a detected
//! violation, or an honest "inconclusive".

mod check;
mod classify;
mod lines;
mod maps;
mod sphere;
mod vertex_fit;

pub use check::{
    check_coherency_preservation, sample_coherent_pair, CheckConfig, CheckReport, Witness,
};
pub use classify::{classify, Classification, ClassifyConfig, Diagnostics};
pub use lines::{constant_line_detect, induced_sphere_map, line_collapse_census, LineCensus};
pub use maps::{BlackBoxMap, FnMap, TableMap};
pub use sphere::{degree, sphere_degree, DegreeReport, SphereMesh, DEFAULT_SUBDIVISION};
pub use vertex_fit::{fit_cone_vertex, VertexFitConfig};
