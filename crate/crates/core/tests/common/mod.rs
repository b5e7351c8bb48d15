#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spatial_influence::{Observations, SpatialWeights};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn rook(rows: usize, cols: usize, torus: bool) -> SpatialWeights<f64> {
    SpatialWeights::lattice_rook(rows, cols, torus).unwrap().row_standardize()
}

/// Standardized vector with an exact 0 at `site`: the other n-1 values are
/// centred and scaled so that the sum of squares is n.
pub fn zero_site_field(rng: &mut ChaCha8Rng, n: usize, site: usize) -> Vec<f64> {
    let mut rest = normals(rng, n - 1);
    let mean = rest.iter().sum::<f64>() / (n - 1) as f64;
    rest.iter_mut().for_each(|v| *v -= mean);
    let ss: f64 = rest.iter().map(|v| v * v).sum();
    let scale = (n as f64 / ss).sqrt();
    rest.iter_mut().for_each(|v| *v *= scale);
    rest.insert(site, 0.0);
    rest
}

/// Observations whose standardized vector is exactly `z` (already
/// standardized by the caller).
pub fn exact_observations(z: Vec<f64>) -> Observations<f64> {
    let n = z.len();
    Observations {
        ids: (1..=n).map(|i| i.to_string()).collect(),
        values: z.clone(),
        standardized: z,
        mean: 0.0,
        scale: 1.0,
    }
}

pub fn dense(w: &SpatialWeights<f64>) -> Vec<Vec<f64>> {
    let n = w.n();
    let mut d = vec![vec![0.0; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        for &j in w.neighbors(i) {
            row[j] = w.get(i, j);
        }
    }
    d
}

/// Composite trapezoid rule with `points` equally spaced nodes.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, points: usize) -> f64 {
    let h = (b - a) / (points - 1) as f64;
    let inner: f64 = (1..points - 1).map(|i| f(a + h * i as f64)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

/// n (MC_c - MC) straight from the definition, for a zero-valued site on
/// symmetric doubly stochastic weights: no closed form involved.
pub fn brute_influence(z: &[f64], dense_w: &[Vec<f64>], site: usize, z1: f64) -> f64 {
    let n = z.len();
    let moran = |x: &[f64]| {
        let num: f64 = (0..n).map(|i| x[i] * (0..n).map(|j| dense_w[i][j] * x[j]).sum::<f64>()).sum();
        num / x.iter().map(|v| v * v).sum::<f64>()
    };
    let mut y = z.to_vec();
    y[site] = z1;
    let m = y.iter().sum::<f64>() / n as f64;
    y.iter_mut().for_each(|v| *v -= m);
    n as f64 * (moran(&y) - moran(z))
}
