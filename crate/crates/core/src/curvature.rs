//! Sectional-curvature positivity for the three-parameter family.
//!
//! Two criteria cover every metric:
//!
//! * on an equality set `x_i = x_j` positivity depends only on the ratio `q` of
//!   the odd coordinate to the repeated one: strictly positive for
//!   `q in (0, 1) U (1, 4/3)`, nonnegative at `q = 1` and `q = 4/3`, and some
//!   plane is negatively curved for `q > 4/3`;
//! * for pairwise distinct coordinates, normalized to `(1, 1 + r, s)` with
//!   `r > 0, 0 < s < 1`, curvature is strictly positive iff
//!   `r < (s - 2 + 2 sqrt(1 - s + s^2)) / 3` (Valiev's bound).
//!
//! Valiev's bound carries no dependence on `d` and is applied to all three spaces.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::metric::{approx_eq, normalize, Metric, SpaceKind, REL_TOL};

/// Upper end of the positive window on the equal-pair slice.
pub const EQUAL_PAIR_BOUNDARY: f64 = 4.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurvatureTag {
    StrictlyPositive,
    NonnegativeBoundary,
    Mixed,
}

impl CurvatureTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CurvatureTag::StrictlyPositive => "StrictlyPositive",
            CurvatureTag::NonnegativeBoundary => "NonnegativeBoundary",
            CurvatureTag::Mixed => "Mixed",
        }
    }
}

impl std::fmt::Display for CurvatureTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A point of the plane family used to exhibit negative curvature on
/// `(1, 1, 1 + t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneProbe {
    /// `x3 = 1 + t_param` with `x1 = x2 = 1`.
    pub t_param: f64,
    /// Plane-family parameter, `>= 0`.
    pub x_param: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureClass {
    pub tag: CurvatureTag,
    /// Present only for `Mixed` verdicts on an equality set.
    pub witness: Option<PlaneProbe>,
}

impl CurvatureClass {
    fn plain(tag: CurvatureTag) -> Self {
        CurvatureClass { tag, witness: None }
    }
}

/// Sectional curvature `g(R(u, v) v, u)` of the probe plane on `(1, 1, 1 + t)`:
/// `2 / (1 + x^2) * (1 - 3t + (1 + t)^2 x^2)`.
pub fn plane_curvature(p: PlaneProbe) -> Result<f64> {
    let t = p.t_param;
    let x = p.x_param;
    if !(1.0 + t > 0.0) {
        return Err(domain(format!("probe needs 1 + t > 0, got t = {t}")));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("probe needs x >= 0, got x = {x}")));
    }
    let x2 = x * x;
    Ok(2.0 / (1.0 + x2) * (1.0 - 3.0 * t + (1.0 + t) * (1.0 + t) * x2))
}

/// For `t = 1/3 + sigma`, every `x` in `(0, window)` gives a negatively curved
/// probe plane, where `window = sqrt(3 sigma / (1 + (4/3 + 3 sigma)^2))`.
pub fn negativity_window(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(domain(format!("sigma = {sigma} must be > 0")));
    }
    let a = 4.0 / 3.0 + 3.0 * sigma;
    Ok((3.0 * sigma / (1.0 + a * a)).sqrt())
}

/// Classifies `(1, 1, q)` (or any metric with `x1 = x2` and `x3/x1 = q`).
pub fn classify_equal_pair(q: f64, _kind: SpaceKind) -> Result<CurvatureClass> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(domain(format!("ratio q = {q} must be > 0")));
    }
    if approx_eq(q, 1.0) || approx_eq(q, EQUAL_PAIR_BOUNDARY) {
        return Ok(CurvatureClass::plain(CurvatureTag::NonnegativeBoundary));
    }
    if q < EQUAL_PAIR_BOUNDARY {
        return Ok(CurvatureClass::plain(CurvatureTag::StrictlyPositive));
    }
    let sigma = q - EQUAL_PAIR_BOUNDARY;
    let witness = PlaneProbe {
        t_param: q - 1.0,
        x_param: 0.5 * negativity_window(sigma)?,
    };
    Ok(CurvatureClass {
        tag: CurvatureTag::Mixed,
        witness: Some(witness),
    })
}

/// Valiev's bound `(s - 2 + 2 sqrt(1 - s + s^2)) / 3` for `0 < s < 1`.
pub fn valiev_bound(s: f64) -> Result<f64> {
    check_unit_open(s)?;
    Ok(valiev_curve(s))
}

/// The same closed form without the domain check; at `s = 1` it gives `1/3`,
/// the equal-pair boundary `q = 4/3` seen in normalized coordinates.
pub(crate) fn valiev_curve(s: f64) -> f64 {
    (s - 2.0 + 2.0 * (1.0 - s + s * s).sqrt()) / 3.0
}

/// `(s^2/4, valiev_bound(s), s^2/3)`; the middle value lies strictly between the others.
pub fn valiev_quadratic_bounds(s: f64) -> Result<(f64, f64, f64)> {
    let v = valiev_bound(s)?;
    Ok((s * s / 4.0, v, s * s / 3.0))
}

fn check_unit_open(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("s = {s} must lie in (0, 1)")))
    }
}

/// The ratio `odd / repeated` if two coordinates coincide within [`REL_TOL`].
pub fn equal_pair_ratio(m: &Metric) -> Option<f64> {
    let n = normalize(m);
    let top_pair = approx_eq(1.0 + n.r, 1.0);
    let bottom_pair = approx_eq(n.s, 1.0);
    match (top_pair, bottom_pair) {
        (true, true) => Some(1.0),
        (true, false) => Some(n.s),
        (false, true) => Some(1.0 + n.r),
        (false, false) => None,
    }
}

/// Signed distance to the positivity boundary in normalized coordinates:
/// `r - valiev(s)`. Negative inside the strictly positive region.
///
/// On equality sets this reduces to `q - 4/3` when the odd coordinate is the
/// largest, and to `-valiev(q)` when it is the smallest.
pub fn valiev_margin(m: &Metric) -> f64 {
    let n = normalize(m);
    n.r - valiev_curve(n.s)
}

pub fn classify_sectional(m: &Metric) -> CurvatureClass {
    if let Some(q) = equal_pair_ratio(m) {
        // q > 0 always holds for a valid metric
        return classify_equal_pair(q, m.kind()).expect("valid metric gives q > 0");
    }
    let n = normalize(m);
    let bound = valiev_curve(n.s);
    let tag = if (n.r - bound).abs() <= REL_TOL * n.r.abs().max(bound.abs()) {
        CurvatureTag::NonnegativeBoundary
    } else if n.r < bound {
        CurvatureTag::StrictlyPositive
    } else {
        CurvatureTag::Mixed
    };
    CurvatureClass::plain(tag)
}
