use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{Direction, Event};
use crate::quadratic::TolerancePolicy;
use crate::scalar::Scalar;

use super::lines::induced_sphere_map;
use super::maps::BlackBoxMap;

/// 20 * 4^5 = 20480 triangles.
pub const DEFAULT_SUBDIVISION: u32 = 5;

const NEAREST_INTEGER_SLACK: f64 = 0.1;
const MAX_IMAGE_DIAMETER: f64 = PI / 2.0;

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: V3) -> V3 {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Geodesic icosphere: a subdivided icosahedron projected onto the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMesh {
    pub vertices: Vec<V3>,
    /// Counter-clockwise seen from outside.
    pub triangles: Vec<[usize; 3]>,
    pub level: u32,
}

impl SphereMesh {
    pub fn icosphere(level: u32) -> Self {
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<V3> = [
            [-1.0, g, 0.0],
            [1.0, g, 0.0],
            [-1.0, -g, 0.0],
            [1.0, -g, 0.0],
            [0.0, -1.0, g],
            [0.0, 1.0, g],
            [0.0, -1.0, -g],
            [0.0, 1.0, -g],
            [g, 0.0, -1.0],
            [g, 0.0, 1.0],
            [-g, 0.0, -1.0],
            [-g, 0.0, 1.0],
        ]
        .into_iter()
        .map(normalize)
        .collect();
        let mut triangles = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |i: usize, j: usize, vs: &mut Vec<V3>| {
                let key = (i.min(j), i.max(j));
                *midpoints.entry(key).or_insert_with(|| {
                    let (a, b) = (vs[i], vs[j]);
                    vs.push(normalize([a[0] + b[0], a[1] + b[1], a[2] + b[2]]));
                    vs.len() - 1
                })
            };
            let mut next = Vec::with_capacity(triangles.len() * 4);
            for &[a, b, c] in &triangles {
                let ab = mid(a, b, &mut vertices);
                let bc = mid(b, c, &mut vertices);
                let ca = mid(c, a, &mut vertices);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            triangles = next;
        }
        Self {
            vertices,
            triangles,
            level,
        }
    }
}

/// Signed solid angle of the spherical triangle `abc` (Van Oosterom and Strackee).
fn signed_area(a: V3, b: V3, c: V3) -> f64 {
    let num = dot(a, cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

fn angle(a: V3, b: V3) -> f64 {
    // atan2 form stays accurate for nearly equal vectors
    dot(cross(a, b), cross(a, b)).sqrt().atan2(dot(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: i64,
    /// Total signed image area over `4 pi` before rounding.
    pub raw: f64,
    pub max_image_diameter: f64,
    /// False when `raw` is far from an integer or the mesh is too coarse for the map.
    pub quality: bool,
    pub subdivision: u32,
}

/// Degree of a map between unit spheres given by vertex images on `mesh`.
pub fn sphere_degree(mesh: &SphereMesh, images: &[V3]) -> Result<DegreeReport> {
    if images.len() != mesh.vertices.len() {
        return Err(Error::DimensionMismatch {
            left: mesh.vertices.len(),
            right: images.len(),
        });
    }
    let per_triangle: Vec<(f64, f64)> = mesh
        .triangles
        .par_iter()
        .map(|&[i, j, k]| {
            let (a, b, c) = (images[i], images[j], images[k]);
            let d = angle(a, b).max(angle(b, c)).max(angle(c, a));
            (signed_area(a, b, c), d)
        })
        .collect();
    // summed in mesh order so the result does not depend on thread scheduling
    let (total, diam) = per_triangle
        .iter()
        .fold((0.0, 0.0f64), |acc, &(e, d)| (acc.0 + e, acc.1.max(d)));
    let raw = total / (4.0 * PI);
    let degree = raw.round();
    Ok(DegreeReport {
        degree: degree as i64,
        raw,
        max_image_diameter: diam,
        quality: (raw - degree).abs() <= NEAREST_INTEGER_SLACK && diam <= MAX_IMAGE_DIAMETER,
        subdivision: mesh.level,
    })
}

/// Degree of the induced map `phi_a` on the sphere of light directions, `n = 4` only.
pub fn degree<T: Scalar, M: BlackBoxMap<T> + ?Sized>(
    map: &M,
    a: &Event<T>,
    mesh: &SphereMesh,
    tol: &TolerancePolicy<T>,
) -> Result<DegreeReport> {
    if map.dim() != 4 || a.dim() != 4 {
        return Err(Error::UnsupportedDimension(a.dim()));
    }
    let images: Vec<V3> = mesh
        .vertices
        .par_iter()
        .map(|v| {
            let p = Direction::from_spatial(&[T::lit(v[0]), T::lit(v[1]), T::lit(v[2])])?;
            let img = induced_sphere_map(map, a, &p, tol)?;
            let s = img.spatial();
            Ok(normalize([
                s[0].to_f64_lossy(),
                s[1].to_f64_lossy(),
                s[2].to_f64_lossy(),
            ]))
        })
        .collect::<Result<_>>()?;
    sphere_degree(mesh, &images)
}
