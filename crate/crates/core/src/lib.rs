//! Homogeneous Ricci flow on the Wallach flag manifolds SU(3)/T², Sp(3)/Sp(1)³
//! and F4/Spin(8).
//!
//! Invariant metrics form the three-parameter family `(x1, x2, x3)`; the flow
//! reduces to the ODE `dx_i/dt = -2 r_i x_i`. The crate integrates that ODE,
//! classifies sectional-curvature positivity and the Ricci signature along
//! trajectories, locates the transitions, and samples the `(s, r)` plane of
//! normalized metrics `(1, 1 + r, s)`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod emit;
pub mod error;
pub mod flow;
pub mod metric;
pub mod region;
pub mod ricci;
pub mod roots;

pub use curvature::{
    classify_equal_pair, classify_sectional, negativity_window, plane_curvature, valiev_bound, valiev_quadratic_bounds,
    CurvatureClass, CurvatureTag, PlaneProbe,
};
pub use error::{Error, Result};
pub use flow::{
    detect_events, integrate, ratio_trace, simulate, EventKind, FlowEvent, FlowOptions, Trajectory, TrajectoryPoint,
};
pub use metric::{
    flow_vector_field, normalize, ratio_derivative_equal_pair, ricci_coefficients, Metric, NormalizedMetric,
    Permutation, RicciData, SpaceKind,
};
pub use region::{sample_curves, sample_regions, CurveId, CurveSample, GridSpec, RegionCell, RegionGrid};
pub use ricci::{
    boundary_root, closed_form_threshold, critical_threshold, dr1_along_flow, equal_pair_ricci,
    normalized_ricci_coeffs, ricci_signature, RicciSignature,
};
