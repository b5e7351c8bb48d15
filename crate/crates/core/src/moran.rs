//! Standardization, spatial lag and global Moran's I.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weights::SpatialWeights;

/// An attribute vector and its standardized form.
///
/// The standardized values have mean 0 and variance 1 with divisor `n`, so
/// `sum(z_i^2) = n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations<T> {
    pub ids: Vec<String>,
    pub values: Vec<T>,
    pub standardized: Vec<T>,
    pub mean: T,
    /// Population standard deviation of `values`.
    pub scale: T,
}

impl<T: Scalar> Observations<T> {
    /// Standardizes `values`, labelling locations `1..=n`.
    pub fn new(values: Vec<T>) -> Result<Self> {
        let ids = (1..=values.len()).map(|i| i.to_string()).collect();
        Self::with_ids(ids, values)
    }

    pub fn with_ids(ids: Vec<String>, values: Vec<T>) -> Result<Self> {
        let n = values.len();
        if ids.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: ids.len() });
        }
        if n < 2 {
            return Err(Error::TooFewObservations(n));
        }
        let nf = T::of_usize(n);
        let mean = values.iter().copied().sum::<T>() / nf;
        let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
        let scale = (ss / nf).sqrt();
        let magnitude = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if !(scale > magnitude * T::epsilon() * T::of(16.0)) {
            return Err(Error::ZeroVariance);
        }
        let standardized = values.iter().map(|&v| (v - mean) / scale).collect();
        Ok(Self { ids, values, standardized, mean, scale })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Standard deviation of the standardized vector, 1 by construction.
    pub fn sigma(&self) -> T {
        T::one()
    }
}

/// Standardizes a raw attribute vector to mean 0 and population variance 1.
pub fn standardize<T: Scalar>(raw: &[T]) -> Result<Observations<T>> {
    Observations::new(raw.to_vec())
}

/// `L(z)_i = sum_j w_ij z_j` on the standardized values; 0 for islands.
pub fn spatial_lag<T: Scalar>(z: &Observations<T>, w: &SpatialWeights<T>) -> Result<Vec<T>> {
    w.lag(&z.standardized)
}

/// Global Moran coefficient `Z^T W Z / Z^T Z` on row-standardized weights.
pub fn moran_i<T: Scalar>(z: &Observations<T>, w: &SpatialWeights<T>) -> Result<T> {
    w.require_row_standardized()?;
    moran_ratio(&z.standardized, w)
}

/// `x^T W x / x^T x` without any precondition on `x` or `W`.
pub(crate) fn moran_ratio<T: Scalar>(x: &[T], w: &SpatialWeights<T>) -> Result<T> {
    let num = w.quadratic_form(x)?;
    let den: T = x.iter().map(|&v| v * v).sum();
    Ok(num / den)
}
