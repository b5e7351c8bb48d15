//! Influence of a single contaminated location on global Moran's I.
//!
//! Contamination replaces the standardized value at one location by `z1`
//! and re-centers the whole vector to mean zero without rescaling it. The
//! influence is `I_c(z1) = n (MC_c - MC)`, and the local influence function
//! (LIF) of a location is the integral of `|I_c|` over `z1` in
//! `[-h sigma, h sigma]` (default `h = 2`, `sigma = 1` on standardized data).
//!
//! For every model used here `I_c` is a ratio of two quadratics in `z1`,
//! captured by [`RationalInfluence`]. Its numerator roots are found in closed
//! form, so the integral of `|I_c|` is split at the kinks and each panel is
//! integrated with adaptive Gauss-Kronrod quadrature.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moran::{moran_i, moran_ratio, Observations};
use crate::quadrature::integrate_panels;
use crate::scalar::Scalar;
use crate::weights::SpatialWeights;

/// Closed-form influence of contaminating a location that held the value 0.
///
/// With `s = sum_{i != k} w_ik z_i` (the location's incoming lag sum) and
/// `D = (n-1)/n z1^2 + n`:
///
/// * `Recentered`: `(2 n z1 s - (1 + (n-1) MC) z1^2) / D`, which equals
///   `n (MC_c - MC)` for the contaminated Moran coefficient `MC_c`.
/// * `Simplified`: `(2 n z1 s - (MC + 1) z1^2) / D`. It agrees with
///   `Recentered` only when `MC = 0`; kept to reproduce the classic
///   influence surfaces, where the level of MC barely matters.
///
/// Both are exact for symmetric, doubly stochastic `W`; otherwise they
/// approximate [`InfluenceModel::Exact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfluenceForm {
    #[default]
    Recentered,
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceModel {
    Closed(InfluenceForm),
    /// Contaminates the location's actual value and recomputes Moran's I
    /// exactly; valid for any weights, and `I_c` vanishes at the current
    /// value instead of at 0.
    Exact,
}

impl Default for InfluenceModel {
    fn default() -> Self {
        InfluenceModel::Closed(InfluenceForm::Recentered)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifOptions<T> {
    /// Half width of the integration range in units of sigma (= 1).
    pub half_width: T,
    pub model: InfluenceModel,
    pub abs_tol: T,
}

impl<T: Scalar> Default for LifOptions<T> {
    fn default() -> Self {
        Self { half_width: T::of(2.0), model: InfluenceModel::default(), abs_tol: T::of(1e-9) }
    }
}

/// `I_c(z1) = (p0 + p1 z1 + p2 z1^2) / (q0 + q1 z1 + q2 z1^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalInfluence<T> {
    pub num: [T; 3],
    pub den: [T; 3],
}

impl<T: Scalar> RationalInfluence<T> {
    pub fn closed(form: InfluenceForm, n: usize, mc: T, lag_sum: T) -> Self {
        let nf = T::of_usize(n);
        let n1 = nf - T::one();
        let quad = match form {
            InfluenceForm::Recentered => T::one() + n1 * mc,
            InfluenceForm::Simplified => mc + T::one(),
        };
        Self { num: [T::zero(), T::of(2.0) * nf * lag_sum, -quad], den: [nf, T::zero(), n1 / nf] }
    }

    #[inline]
    pub fn eval(&self, z1: T) -> T {
        let [p0, p1, p2] = self.num;
        let [q0, q1, q2] = self.den;
        (p0 + z1 * (p1 + z1 * p2)) / (q0 + z1 * (q1 + z1 * q2))
    }

    /// Real roots of the numerator, ascending, without duplicates.
    pub fn numerator_roots(&self) -> Vec<T> {
        quadratic_roots(self.num)
    }

    /// `int_{-h}^{h} |I_c(z1)| dz1`.
    pub fn lif(&self, half_width: T, abs_tol: T) -> Result<T> {
        if !(half_width > T::zero()) {
            return Err(Error::InvalidParameter(format!("half width must be positive, got {half_width}")));
        }
        let (lo, hi) = (-half_width, half_width);
        if quadratic_roots(self.den).into_iter().any(|r| r >= lo && r <= hi) {
            // contaminated vector would be constant
            return Err(Error::ZeroVariance);
        }
        let mut points = vec![lo];
        points.extend(self.numerator_roots().into_iter().filter(|&r| r > lo && r < hi));
        points.push(hi);
        let q = integrate_panels(|x| self.eval(x).abs(), &points, abs_tol, 4096)?;
        Ok(q.value)
    }
}

fn quadratic_roots<T: Scalar>([c0, c1, c2]: [T; 3]) -> Vec<T> {
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == T::zero() {
        return Vec::new();
    }
    let (c0, c1, c2) = (c0 / scale, c1 / scale, c2 / scale);
    let mut roots = if c2.abs() <= T::epsilon() * T::of(8.0) {
        if c1 == T::zero() {
            Vec::new()
        } else {
            vec![-c0 / c1]
        }
    } else {
        let disc = c1 * c1 - T::of(4.0) * c2 * c0;
        if disc < T::zero() {
            Vec::new()
        } else {
            let q = -T::of(0.5) * (c1 + c1.signum() * disc.sqrt());
            if q == T::zero() {
                vec![T::zero()]
            } else {
                vec![q / c2, c0 / q]
            }
        }
    };
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup();
    roots
}

/// Quantities shared by every location of one dataset.
struct Context<'a, T> {
    z: &'a [T],
    n: usize,
    mc: T,
    /// `sum_{i != k} w_ik z_i` per location; 0 on islands.
    lag_sums: Vec<T>,
    col_lags: Vec<T>,
    row_lags: Vec<T>,
    row_sums: Vec<T>,
    col_sums: Vec<T>,
    quad_form: T,
    sum_sq: T,
    sum: T,
    sums_dot_z: T,
    total_weight: T,
}

impl<'a, T: Scalar> Context<'a, T> {
    fn new(z: &'a Observations<T>, w: &'a SpatialWeights<T>) -> Result<Self> {
        let mc = moran_i(z, w)?;
        let zs = &z.standardized[..];
        let col_lags = w.transpose_lag(zs)?;
        let mut lag_sums = col_lags.clone();
        for &i in w.islands() {
            lag_sums[i] = T::zero();
        }
        let row_lags = w.lag(zs)?;
        let row_sums = w.row_sums();
        let col_sums = w.col_sums();
        let sums_dot_z = zs.iter().zip(row_sums.iter().zip(&col_sums)).map(|(&v, (&r, &c))| v * (r + c)).sum();
        Ok(Self {
            z: zs,
            n: zs.len(),
            mc,
            quad_form: zs.iter().zip(&row_lags).map(|(&a, &b)| a * b).sum(),
            sum_sq: zs.iter().map(|&v| v * v).sum(),
            sum: zs.iter().copied().sum(),
            sums_dot_z,
            total_weight: row_sums.iter().copied().sum(),
            lag_sums,
            col_lags,
            row_lags,
            row_sums,
            col_sums,
        })
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.n {
            return Err(Error::IndexOutOfRange { index: k, n: self.n });
        }
        Ok(())
    }

    fn influence(&self, k: usize, model: InfluenceModel) -> RationalInfluence<T> {
        match model {
            InfluenceModel::Closed(form) => RationalInfluence::closed(form, self.n, self.mc, self.lag_sums[k]),
            InfluenceModel::Exact => self.exact(k),
        }
    }

    /// Exact `n (MC_c - MC)` as a rational function of the replacement value.
    ///
    /// With `d = z1 - z_k`, `m = (A + d)/n` and `y = z + d e_k - m 1`:
    /// `y^T W y = P + d (R_k + C_k) - m (B + b d) + m^2 S` and
    /// `y^T y = Q + 2 d z_k + d^2 - (A + d)^2 / n`, where `A = sum z`,
    /// `B = (r + c)^T z`, `b = r_k + c_k`, `S = sum w`.
    fn exact(&self, k: usize) -> RationalInfluence<T> {
        let nf = T::of_usize(self.n);
        let two = T::of(2.0);
        let (a, s) = (self.sum, self.total_weight);
        let big_b = self.sums_dot_z;
        let b = self.row_sums[k] + self.col_sums[k];
        let zk = self.z[k];
        let lag_in = self.col_lags[k];
        let num = [
            self.quad_form - a * big_b / nf + a * a * s / (nf * nf),
            self.row_lags[k] + lag_in - (big_b + a * b) / nf + two * a * s / (nf * nf),
            s / (nf * nf) - b / nf,
        ];
        let den = [self.sum_sq - a * a / nf, two * zk - two * a / nf, T::one() - T::one() / nf];
        let diff = [0, 1, 2].map(|i| nf * (num[i] - self.mc * den[i]));
        RationalInfluence { num: shift(diff, zk), den: shift(den, zk) }
    }
}

/// Rewrites `c0 + c1 d + c2 d^2` with `d = x - h` as a polynomial in `x`.
fn shift<T: Scalar>([c0, c1, c2]: [T; 3], h: T) -> [T; 3] {
    [c0 - c1 * h + c2 * h * h, c1 - T::of(2.0) * c2 * h, c2]
}

fn require_standardized<T: Scalar>(w: &SpatialWeights<T>, z: &Observations<T>) -> Result<()> {
    w.require_row_standardized()?;
    w.check_len(z.n())
}

/// Moran's I after replacing location `k` by `z1` and re-centering, computed
/// by brute force on the modified vector.
pub fn contaminate_exact<T: Scalar>(z: &Observations<T>, w: &SpatialWeights<T>, k: usize, z1: T) -> Result<T> {
    require_standardized(w, z)?;
    if k >= z.n() {
        return Err(Error::IndexOutOfRange { index: k, n: z.n() });
    }
    let mut y = z.standardized.clone();
    y[k] = z1;
    let mean = y.iter().copied().sum::<T>() / T::of_usize(y.len());
    for v in &mut y {
        *v -= mean;
    }
    moran_ratio(&y, w)
}

/// Contaminated Moran coefficient in closed form:
///
/// `[sum_{i,j != k} w_ij z_i z_j + 2 z1 sum_{i != k} w_ik z_i - z1^2/n]
///  / [n + (n-1)/n z1^2]`.
///
/// Exact when the location held 0 and `W` is symmetric and doubly stochastic.
pub fn contaminated_moran_closed<T: Scalar>(z: &Observations<T>, w: &SpatialWeights<T>, k: usize, z1: T) -> Result<T> {
    require_standardized(w, z)?;
    let n = z.n();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let zs = &z.standardized;
    let mut inner = T::zero();
    let mut lag_sum = T::zero();
    for i in (0..n).filter(|&i| i != k) {
        let mut row = T::zero();
        for (j, wij) in w.row(i) {
            if j == k {
                lag_sum += wij * zs[i];
            } else {
                row += wij * zs[j];
            }
        }
        inner += zs[i] * row;
    }
    let nf = T::of_usize(n);
    let num = inner + T::of(2.0) * z1 * lag_sum - z1 * z1 / nf;
    let den = nf + (nf - T::one()) / nf * z1 * z1;
    Ok(num / den)
}

/// `I_c(z1)` at location `k` in the [`InfluenceForm::Recentered`] form.
pub fn influence_at<T: Scalar>(z: &Observations<T>, w: &SpatialWeights<T>, k: usize, z1: T) -> Result<T> {
    let ctx = Context::new(z, w)?;
    ctx.check_index(k)?;
    Ok(ctx.influence(k, InfluenceModel::default()).eval(z1))
}

/// The influence function of location `k` under `model`.
pub fn location_influence<T: Scalar>(
    z: &Observations<T>,
    w: &SpatialWeights<T>,
    k: usize,
    model: InfluenceModel,
) -> Result<RationalInfluence<T>> {
    let ctx = Context::new(z, w)?;
    ctx.check_index(k)?;
    Ok(ctx.influence(k, model))
}

/// `sum_{i != k} w_ik z_i`, the lag sum entering the closed forms (0 on islands).
pub fn lag_sum<T: Scalar>(z: &Observations<T>, w: &SpatialWeights<T>, k: usize) -> Result<T> {
    let ctx = Context::new(z, w)?;
    ctx.check_index(k)?;
    Ok(ctx.lag_sums[k])
}

/// LIF of location `k`.
pub fn lif_at<T: Scalar>(z: &Observations<T>, w: &SpatialWeights<T>, k: usize, opts: &LifOptions<T>) -> Result<T> {
    location_influence(z, w, k, opts.model)?.lif(opts.half_width, opts.abs_tol)
}

/// A sampled influence curve of one location.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceCurve<T> {
    pub location: usize,
    pub z1_grid: Vec<T>,
    pub ic_values: Vec<T>,
    pub lif: T,
    pub lag_sum: T,
    pub mc_baseline: T,
}

/// Samples `I_c` of location `k` on `points` (odd, so that 0 is a grid
/// point) equally spaced values over the integration range.
pub fn influence_curve<T: Scalar>(
    z: &Observations<T>,
    w: &SpatialWeights<T>,
    k: usize,
    opts: &LifOptions<T>,
    points: usize,
) -> Result<InfluenceCurve<T>> {
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("curve needs an odd number >= 3 of points, got {points}")));
    }
    let ctx = Context::new(z, w)?;
    ctx.check_index(k)?;
    let f = ctx.influence(k, opts.model);
    let h = opts.half_width;
    let m = T::of_usize(points - 1);
    let z1_grid: Vec<T> = (0..points).map(|i| h * (T::of_usize(2 * i) - m) / m).collect();
    Ok(InfluenceCurve {
        location: k,
        ic_values: z1_grid.iter().map(|&x| f.eval(x)).collect(),
        z1_grid,
        lif: f.lif(h, opts.abs_tol)?,
        lag_sum: ctx.lag_sums[k],
        mc_baseline: ctx.mc,
    })
}

/// LIF of every location, with a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct LifScores<T> {
    pub lif: Vec<T>,
    /// Locations ordered by decreasing LIF, ties by index.
    pub order: Vec<usize>,
    /// 1-based rank of each location in `order`.
    pub rank: Vec<usize>,
    pub argmax: usize,
    pub argmin: usize,
    pub lag_sums: Vec<T>,
    pub mc: T,
}

impl<T: Scalar> LifScores<T> {
    fn from_values(lif: Vec<T>, lag_sums: Vec<T>, mc: T) -> Self {
        let mut order: Vec<usize> = (0..lif.len()).collect();
        order.sort_by(|&a, &b| lif[b].partial_cmp(&lif[a]).expect("finite LIF").then(a.cmp(&b)));
        let mut rank = vec![0; lif.len()];
        for (r, &loc) in order.iter().enumerate() {
            rank[loc] = r + 1;
        }
        Self { argmax: order[0], argmin: *order.last().expect("non-empty"), lif, order, rank, lag_sums, mc }
    }
}

/// LIF at every location, computed in parallel; output does not depend on
/// the number of worker threads.
pub fn lif_map<T: Scalar>(z: &Observations<T>, w: &SpatialWeights<T>, opts: &LifOptions<T>) -> Result<LifScores<T>> {
    let ctx = Context::new(z, w)?;
    let lif = (0..ctx.n)
        .into_par_iter()
        .map(|k| ctx.influence(k, opts.model).lif(opts.half_width, opts.abs_tol))
        .collect::<Result<Vec<T>>>()?;
    Ok(LifScores::from_values(lif, ctx.lag_sums.clone(), ctx.mc))
}

/// Grid specification for influence surfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec<T> {
    /// Number of locations the surfaces are drawn for.
    pub n: usize,
    pub mc_levels: Vec<T>,
    pub z1_range: (T, T),
    pub lag_range: (T, T),
    /// MC axis of the zero-lag surface.
    pub mc_range: (T, T),
    pub z1_points: usize,
    pub lag_points: usize,
    pub mc_points: usize,
    pub form: InfluenceForm,
}

/// `I_c` over `z1 x lag_sum` for each MC level, plus `I_c` over `z1 x MC`
/// with the lag sum held at 0. Grids are indexed `[z1][other]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceSurfaces<T> {
    pub z1: Vec<T>,
    pub lag: Vec<T>,
    pub by_mc: Vec<(T, Vec<Vec<T>>)>,
    pub mc_axis: Vec<T>,
    pub zero_lag: Vec<Vec<T>>,
}

pub(crate) fn linspace<T: Scalar>((lo, hi): (T, T), m: usize) -> Result<Vec<T>> {
    if m < 2 || !(lo < hi) {
        return Err(Error::EmptyRange);
    }
    let steps = T::of_usize(m - 1);
    Ok((0..m).map(|i| if i + 1 == m { hi } else { lo + (hi - lo) * T::of_usize(i) / steps }).collect())
}

pub fn influence_surface<T: Scalar>(spec: &SurfaceSpec<T>) -> Result<InfluenceSurfaces<T>> {
    if spec.n < 2 {
        return Err(Error::TooFewObservations(spec.n));
    }
    if spec.mc_levels.is_empty() {
        return Err(Error::EmptyRange);
    }
    let z1 = linspace(spec.z1_range, spec.z1_points)?;
    let lag = linspace(spec.lag_range, spec.lag_points)?;
    let mc_axis = linspace(spec.mc_range, spec.mc_points)?;
    let eval = |mc: T, s: T, x: T| RationalInfluence::closed(spec.form, spec.n, mc, s).eval(x);
    let by_mc = spec
        .mc_levels
        .iter()
        .map(|&mc| (mc, z1.iter().map(|&x| lag.iter().map(|&s| eval(mc, s, x)).collect()).collect()))
        .collect();
    let zero_lag = z1.iter().map(|&x| mc_axis.iter().map(|&mc| eval(mc, T::zero(), x)).collect()).collect();
    Ok(InfluenceSurfaces { z1, lag, by_mc, mc_axis, zero_lag })
}
