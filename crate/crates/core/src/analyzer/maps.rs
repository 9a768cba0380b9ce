use std::collections::HashMap;

use rayon::prelude::*;

use crate::degenerate::DegenerateSpec;
use crate::error::{Error, Result};
use crate::event::{Event, MAX_DIM};
use crate::quadratic::TolerancePolicy;
use crate::scalar::Scalar;
use crate::transforms::{AffineMap, PoincareSimilarity};

/// A map `R^n -> R^n` observed only through evaluation.
///
/// Evaluation must be deterministic and safe to call from several threads.
pub trait BlackBoxMap<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, r: &Event<T>) -> Result<Event<T>>;

    /// Inputs at which the map is defined, for maps given pointwise.
    fn finite_domain(&self) -> Option<&[Event<T>]> {
        None
    }
}

impl<T: Scalar> BlackBoxMap<T> for PoincareSimilarity<T> {
    fn dim(&self) -> usize {
        PoincareSimilarity::dim(self)
    }

    fn eval(&self, r: &Event<T>) -> Result<Event<T>> {
        check_input(self.dim(), r)?;
        Ok(self.apply(r))
    }
}

impl<T: Scalar> BlackBoxMap<T> for AffineMap<T> {
    fn dim(&self) -> usize {
        AffineMap::dim(self)
    }

    fn eval(&self, r: &Event<T>) -> Result<Event<T>> {
        check_input(self.dim(), r)?;
        Ok(self.apply(r))
    }
}

impl<T: Scalar> BlackBoxMap<T> for DegenerateSpec<T> {
    fn dim(&self) -> usize {
        DegenerateSpec::dim(self)
    }

    fn eval(&self, r: &Event<T>) -> Result<Event<T>> {
        DegenerateSpec::eval(self, r)
    }
}

fn check_input<T: Scalar>(dim: usize, r: &Event<T>) -> Result<()> {
    if r.dim() == dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left: dim,
            right: r.dim(),
        })
    }
}

/// Wraps a closure as a black-box map.
pub struct FnMap<F> {
    dim: usize,
    f: F,
}

impl<F> FnMap<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T: Scalar, F> BlackBoxMap<T> for FnMap<F>
where
    F: Fn(&Event<T>) -> Event<T> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, r: &Event<T>) -> Result<Event<T>> {
        check_input(self.dim, r)?;
        Ok((self.f)(r))
    }
}

type Key = ([u64; MAX_DIM], u8);

fn key_of<T: Scalar>(r: &Event<T>) -> Key {
    let mut bits = [0u64; MAX_DIM];
    for (b, c) in bits.iter_mut().zip(r.coords()) {
        // normalise -0.0 so that it matches 0.0
        let v = c.to_f64_lossy() + 0.0;
        *b = v.to_bits();
    }
    (bits, r.dim() as u8)
}

/// A map given by explicit `(input, output)` rows; lookups are exact.
#[derive(Debug, Clone)]
pub struct TableMap<T: Scalar> {
    dim: usize,
    inputs: Vec<Event<T>>,
    outputs: Vec<Event<T>>,
    index: HashMap<Key, usize>,
}

impl<T: Scalar> TableMap<T> {
    /// Duplicate inputs with different outputs are rejected.
    pub fn new(rows: Vec<(Event<T>, Event<T>)>) -> Result<Self> {
        let dim = rows
            .first()
            .map(|(r, _)| r.dim())
            .ok_or_else(|| Error::InvalidSpec("table has no rows".into()))?;
        let mut inputs = Vec::with_capacity(rows.len());
        let mut outputs = Vec::with_capacity(rows.len());
        let mut index = HashMap::with_capacity(rows.len());
        for (i, (r, y)) in rows.into_iter().enumerate() {
            if r.dim() != dim || y.dim() != dim {
                return Err(Error::InvalidSpec(format!(
                    "row {i}: dimension differs from {dim}"
                )));
            }
            match index.get(&key_of(&r)) {
                Some(&j) => {
                    if outputs[j] != y {
                        return Err(Error::InvalidSpec(format!(
                            "row {i}: input repeats row {j} with a different output"
                        )));
                    }
                }
                None => {
                    index.insert(key_of(&r), inputs.len());
                    inputs.push(r);
                    outputs.push(y);
                }
            }
        }
        Ok(Self {
            dim,
            inputs,
            outputs,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Event<T>, &Event<T>)> {
        self.inputs.iter().zip(&self.outputs)
    }

    /// All distinct coherent pairs of table inputs, `i < j`, by brute force.
    pub fn coherent_pairs(&self, tol: &TolerancePolicy<T>) -> Vec<(usize, usize)> {
        let inputs = &self.inputs;
        (0..inputs.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                (i + 1..inputs.len())
                    .filter(move |&j| {
                        let (a, b) = (&inputs[i], &inputs[j]);
                        tol.is_null(&(*a - *b)) && tol.distinct(a, b)
                    })
                    .map(move |j| (i, j))
            })
            .collect()
    }
}

impl<T: Scalar> BlackBoxMap<T> for TableMap<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, r: &Event<T>) -> Result<Event<T>> {
        self.index
            .get(&key_of(r))
            .map(|&i| self.outputs[i])
            .ok_or(Error::OutsideDomain)
    }

    fn finite_domain(&self) -> Option<&[Event<T>]> {
        Some(&self.inputs)
    }
}
