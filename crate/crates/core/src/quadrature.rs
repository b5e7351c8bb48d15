//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Scalar> Eq for Panel<T> {}
impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Panel<T> {
    let half = T::of(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kron = fc * T::of(WGK[7]);
    let mut gauss = fc * T::of(WG[3]);
    for k in 0..7 {
        let dx = half_len * T::of(XGK[k]);
        let pair = f(center - dx) + f(center + dx);
        kron += pair * T::of(WGK[k]);
        if k % 2 == 1 {
            gauss += pair * T::of(WG[k / 2]);
        }
    }
    let value = kron * half_len;
    let error = ((kron - gauss) * half_len).abs();
    Panel { a, b, value, error }
}

/// Integrates `f` over consecutive panels `points[0]..points[1]..` to the
/// absolute tolerance `abs_tol`, bisecting the panel with the largest error
/// estimate until the summed estimate falls under the tolerance.
pub fn integrate_panels<T: Scalar, F: Fn(T) -> T>(
    f: F,
    points: &[T],
    abs_tol: T,
    max_panels: usize,
) -> Result<Quadrature<T>> {
    if points.len() < 2 || points.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::EmptyRange);
    }
    let mut heap: BinaryHeap<Panel<T>> = points.windows(2).map(|p| kronrod(&f, p[0], p[1])).collect();
    let mut evaluations = 15 * heap.len();
    let total_error = |h: &BinaryHeap<Panel<T>>| h.iter().map(|p| p.error).sum::<T>();
    loop {
        let estimate = total_error(&heap);
        if !estimate.is_finite() {
            return Err(Error::QuadratureFailure { tolerance: abs_tol.as_f64(), estimate: estimate.as_f64() });
        }
        if estimate <= abs_tol {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::QuadratureFailure {
                tolerance: abs_tol.as_f64(),
                estimate: total_error(&heap).as_f64(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = T::of(0.5) * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // interval exhausted at machine precision
            heap.push(worst);
            return Err(Error::QuadratureFailure {
                tolerance: abs_tol.as_f64(),
                estimate: total_error(&heap).as_f64(),
            });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
        evaluations += 30;
    }
    // deterministic summation order
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    Ok(Quadrature {
        value: panels.iter().map(|p| p.value).sum(),
        error_estimate: panels.iter().map(|p| p.error).sum(),
        evaluations,
    })
}

pub fn integrate<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, abs_tol: T) -> Result<Quadrature<T>> {
    integrate_panels(f, &[a, b], abs_tol, 4096)
}
