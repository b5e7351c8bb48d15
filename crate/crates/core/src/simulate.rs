//! Spatial-lag (SAR) field generation and the Monte Carlo LIF experiment.
//!
//! Fields follow `Z = (I - rho W)^{-1} eps` with `eps ~ N(0, 1)` i.i.d.
//! Replicate `r` draws its noise from the ChaCha8 stream `(seed, r)`, so any
//! replicate can be regenerated on its own and parallel runs are
//! reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::influence::{influence_curve, lif_map, InfluenceCurve, LifOptions, LifScores};
use crate::moran::{moran_i, Observations};
use crate::scalar::Scalar;
use crate::weights::SpatialWeights;

/// Largest system solved by dense LU; bigger ones use fixed-point iteration.
pub const DENSE_LIMIT: usize = 2500;

#[derive(Debug, Clone, PartialEq)]
pub struct SarConfig<T> {
    pub rho: T,
    pub weights: SpatialWeights<T>,
    pub seed: u64,
    pub replications: usize,
}

impl<T: Scalar> SarConfig<T> {
    pub fn new(rho: T, weights: SpatialWeights<T>, seed: u64, replications: usize) -> Result<Self> {
        let cfg = Self { rho, weights, seed, replications };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.require_row_standardized()?;
        // row sums are at most 1, so |rho| < 1 keeps I - rho W invertible
        if !(self.rho.abs() < T::one()) {
            return Err(Error::InvalidParameter(format!("|rho| must be < 1, got {}", self.rho)));
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SarRealization<T> {
    pub field: Vec<T>,
    pub noise: Vec<T>,
    pub seed_used: u64,
    pub replicate_index: usize,
}

/// Solver for `(I - rho W) z = eps`, factorized once per configuration.
pub struct SarSolver<'a, T> {
    rho: T,
    weights: &'a SpatialWeights<T>,
    lu: Option<DenseLu<T>>,
}

impl<'a, T: Scalar> SarSolver<'a, T> {
    pub fn new(config: &'a SarConfig<T>) -> Result<Self> {
        config.validate()?;
        let w = &config.weights;
        let n = w.n();
        let lu = if config.rho == T::zero() || n > DENSE_LIMIT {
            None
        } else {
            let mut a = vec![T::zero(); n * n];
            for i in 0..n {
                a[i * n + i] = T::one();
                for (j, wij) in w.row(i) {
                    a[i * n + j] -= config.rho * wij;
                }
            }
            Some(DenseLu::factor(a, n)?)
        };
        Ok(Self { rho: config.rho, weights: w, lu })
    }

    pub fn solve(&self, eps: &[T]) -> Result<Vec<T>> {
        if self.rho == T::zero() {
            return Ok(eps.to_vec());
        }
        match &self.lu {
            Some(lu) => Ok(lu.solve(eps)),
            None => self.iterate(eps),
        }
    }

    // z <- eps + rho W z contracts with rate |rho| in the max norm.
    fn iterate(&self, eps: &[T]) -> Result<Vec<T>> {
        let tol = T::of(1e-12);
        let mut z = eps.to_vec();
        for _ in 0..10_000 {
            let lag = self.weights.lag(&z)?;
            let mut change = T::zero();
            for i in 0..z.len() {
                let next = eps[i] + self.rho * lag[i];
                change = change.max((next - z[i]).abs());
                z[i] = next;
            }
            if change <= tol {
                return Ok(z);
            }
        }
        Err(Error::SingularSystem)
    }

    /// Max-norm of `(I - rho W) z - eps`.
    pub fn residual(&self, z: &[T], eps: &[T]) -> Result<T> {
        let lag = self.weights.lag(z)?;
        Ok((0..z.len()).map(|i| (z[i] - self.rho * lag[i] - eps[i]).abs()).fold(T::zero(), T::max))
    }
}

struct DenseLu<T> {
    n: usize,
    lu: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Scalar> DenseLu<T> {
    /// Gaussian elimination with partial pivoting, row-major storage.
    fn factor(mut a: Vec<T>, n: usize) -> Result<Self> {
        let mut pivots = Vec::with_capacity(n);
        for col in 0..n {
            let (p, best) =
                (col..n)
                    .map(|r| (r, a[r * n + col].abs()))
                    .fold((col, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if !(best > T::epsilon()) {
                return Err(Error::SingularSystem);
            }
            if p != col {
                for j in 0..n {
                    a.swap(col * n + j, p * n + j);
                }
            }
            pivots.push(p);
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == T::zero() {
                    continue;
                }
                a[r * n + col] = f;
                for j in col + 1..n {
                    let u = a[col * n + j];
                    a[r * n + j] -= f * u;
                }
            }
        }
        Ok(Self { n, lu: a, pivots })
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x = b.to_vec();
        for (col, &p) in self.pivots.iter().enumerate() {
            x.swap(col, p);
        }
        for i in 0..n {
            let s: T = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}

pub(crate) fn noise<T: Scalar>(seed: u64, replicate: usize, n: usize) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    (0..n).map(|_| T::of(StandardNormal.sample(&mut rng))).collect()
}

fn generate_with<T: Scalar>(
    solver: &SarSolver<'_, T>,
    config: &SarConfig<T>,
    replicate: usize,
) -> Result<SarRealization<T>> {
    let eps = noise(config.seed, replicate, config.weights.n());
    let field = solver.solve(&eps)?;
    if field.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(SarRealization { field, noise: eps, seed_used: config.seed, replicate_index: replicate })
}

/// Draws replicate `replicate` of the configured SAR process.
pub fn sar_generate<T: Scalar>(config: &SarConfig<T>, replicate: usize) -> Result<SarRealization<T>> {
    generate_with(&SarSolver::new(config)?, config, replicate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary<T> {
    pub replications: usize,
    /// Global Moran's I of each standardized replicate.
    pub moran: Vec<T>,
    /// Largest solver residual over all replicates.
    pub max_residual: T,
    pub mean_lif: Vec<T>,
    /// Sample standard deviation across replicates (0 for one replicate).
    pub sd_lif: Vec<T>,
    /// Cells with the largest and smallest mean LIF.
    pub mean_argmax: usize,
    pub mean_argmin: usize,
    pub final_field: Vec<T>,
    pub final_scores: LifScores<T>,
    /// Curves on the final replicate for the mean-LIF extremes...
    pub mean_max_curve: InfluenceCurve<T>,
    pub mean_min_curve: InfluenceCurve<T>,
    /// ...and for the final replicate's own extremes.
    pub final_max_curve: InfluenceCurve<T>,
    pub final_min_curve: InfluenceCurve<T>,
}

struct Replicate<T> {
    field: Vec<T>,
    moran: T,
    residual: T,
    scores: LifScores<T>,
}

/// Generates every replicate, standardizes it and computes its LIF map, then
/// aggregates per-cell LIF in replicate order.
pub fn mc_experiment<T: Scalar>(
    config: &SarConfig<T>,
    opts: &LifOptions<T>,
    curve_points: usize,
) -> Result<ExperimentSummary<T>> {
    let solver = SarSolver::new(config)?;
    let w = &config.weights;
    let run = |r: usize| -> Result<Replicate<T>> {
        let real = generate_with(&solver, config, r)?;
        let residual = solver.residual(&real.field, &real.noise)?;
        let z = Observations::new(real.field.clone())?;
        Ok(Replicate { moran: moran_i(&z, w)?, residual, scores: lif_map(&z, w, opts)?, field: real.field })
    };
    let reps = (0..config.replications).into_par_iter().map(run).collect::<Result<Vec<_>>>()?;

    let n = w.n();
    let count = T::of_usize(reps.len());
    let mut mean = vec![T::zero(); n];
    for rep in &reps {
        for (m, &v) in mean.iter_mut().zip(&rep.scores.lif) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= count;
    }
    let mut sd = vec![T::zero(); n];
    if reps.len() > 1 {
        for rep in &reps {
            for ((s, &v), &m) in sd.iter_mut().zip(&rep.scores.lif).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut sd {
            *s = (*s / (count - T::one())).sqrt();
        }
    }
    let by_mean = |pick_max: bool| {
        (0..n)
            .reduce(|best, i| {
                let better = if pick_max { mean[i] > mean[best] } else { mean[i] < mean[best] };
                if better {
                    i
                } else {
                    best
                }
            })
            .expect("at least two cells")
    };
    let (mean_argmax, mean_argmin) = (by_mean(true), by_mean(false));

    let max_residual = reps.iter().map(|r| r.residual).fold(T::zero(), T::max);
    let moran = reps.iter().map(|r| r.moran).collect();
    let last = reps.into_iter().last().expect("replications >= 1");
    let z = Observations::new(last.field.clone())?;
    let curve = |k| influence_curve(&z, w, k, opts, curve_points);
    Ok(ExperimentSummary {
        replications: config.replications,
        moran,
        max_residual,
        mean_max_curve: curve(mean_argmax)?,
        mean_min_curve: curve(mean_argmin)?,
        final_max_curve: curve(last.scores.argmax)?,
        final_min_curve: curve(last.scores.argmin)?,
        mean_lif: mean,
        sd_lif: sd,
        mean_argmax,
        mean_argmin,
        final_field: last.field,
        final_scores: last.scores,
    })
}
