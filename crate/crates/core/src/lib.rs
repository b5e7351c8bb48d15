//! Influence of individual locations on global Moran's I.
//!
//! The crate computes, for every location of a spatial dataset, how strongly a
//! contaminated value placed there would move the global Moran coefficient
//! (the local influence function, LIF), alongside classical LISA statistics,
//! a spatial-lag (SAR) field simulator and the file formats needed to run the
//! analysis on real data.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below are what most callers want.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod formats;
pub mod influence;
pub mod lisa;
pub mod moran;
pub mod quadrature;
pub mod scalar;
pub mod simulate;
pub mod weights;

pub use error::{Error, Result};
pub use influence::{
    contaminate_exact, contaminated_moran_closed, influence_at, influence_curve, influence_surface, lag_sum, lif_at,
    lif_map, location_influence, InfluenceCurve, InfluenceForm, InfluenceModel, InfluenceSurfaces, LifOptions,
    LifScores, RationalInfluence, SurfaceSpec,
};
pub use lisa::{lisa_inference, local_moran, LisaConfig, LisaResult, Quadrant};
pub use moran::{moran_i, spatial_lag, standardize, Observations};
pub use scalar::Scalar;
pub use simulate::{mc_experiment, sar_generate, ExperimentSummary, SarConfig, SarRealization};
pub use weights::SpatialWeights;

pub type SpatialWeightsF64 = SpatialWeights<f64>;
pub type SpatialWeightsF32 = SpatialWeights<f32>;
pub type ObservationsF64 = Observations<f64>;
pub type ObservationsF32 = Observations<f32>;
pub type LisaResultF64 = LisaResult<f64>;
pub type LifScoresF64 = LifScores<f64>;
pub type InfluenceCurveF64 = InfluenceCurve<f64>;
pub type SarConfigF64 = SarConfig<f64>;
pub type ExperimentSummaryF64 = ExperimentSummary<f64>;
