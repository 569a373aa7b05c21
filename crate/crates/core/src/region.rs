//! Sampling of the `(s, r)` plane of normalized metrics `(1, 1 + r, s)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{classify_sectional, valiev_curve, CurvatureTag};
use crate::error::{Error, Result};
use crate::metric::{Metric, SpaceKind};
use crate::ricci::{boundary_root, normalized_ricci_coeffs, signature_of};

/// Grid of `n_s x n_r` points, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub n_s: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            s_min: 0.005,
            s_max: 0.995,
            n_s: 200,
            r_min: 0.0,
            r_max: 0.45,
            n_r: 200,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGridSpec(msg));
        if !(self.s_min > 0.0 && self.s_min < self.s_max && self.s_max <= 1.0) {
            return bad(format!(
                "need 0 < s_min < s_max <= 1, got [{}, {}]",
                self.s_min, self.s_max
            ));
        }
        if !(self.r_min >= 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return bad(format!("need 0 <= r_min < r_max, got [{}, {}]", self.r_min, self.r_max));
        }
        if self.n_s == 0 || self.n_r == 0 {
            return bad(format!("need n_s, n_r > 0, got {} x {}", self.n_s, self.n_r));
        }
        Ok(())
    }

    pub fn s_values(&self) -> Vec<f64> {
        linspace(self.s_min, self.s_max, self.n_s)
    }

    pub fn r_values(&self) -> Vec<f64> {
        linspace(self.r_min, self.r_max, self.n_r)
    }
}

/// `"s_min:s_max:n_s,r_min:r_max:n_r"`.
impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (s_part, r_part) = text.split_once(',').ok_or_else(|| {
            Error::InvalidGridSpec(format!("expected 's_min:s_max:n_s,r_min:r_max:n_r', got {text:?}"))
        })?;
        let (s_min, s_max, n_s) = parse_range(s_part)?;
        let (r_min, r_max, n_r) = parse_range(r_part)?;
        let spec = GridSpec {
            s_min,
            s_max,
            n_s,
            r_min,
            r_max,
            n_r,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses `"lo:hi:n"`.
pub fn parse_range(text: &str) -> Result<(f64, f64, usize)> {
    let err = || Error::InvalidGridSpec(format!("expected 'lo:hi:n', got {text:?}"));
    let mut parts = text.trim().split(':');
    let lo = parts
        .next()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .ok_or_else(err)?;
    let hi = parts
        .next()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .ok_or_else(err)?;
    let n = parts
        .next()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .ok_or_else(err)?;
    if parts.next().is_some() || !lo.is_finite() || !hi.is_finite() {
        return Err(err());
    }
    Ok((lo, hi, n))
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub s: f64,
    pub r: f64,
    pub sectional: CurvatureTag,
    pub ricci_d2: bool,
    pub ricci_d4: bool,
    pub ricci_d8: bool,
}

impl RegionCell {
    pub fn ricci_positive(&self, kind: SpaceKind) -> bool {
        match kind {
            SpaceKind::Su3 => self.ricci_d2,
            SpaceKind::Sp3 => self.ricci_d4,
            SpaceKind::F4 => self.ricci_d8,
        }
    }
}

/// Cells in row-major order: `cells[i_s * n_r + i_r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub n_s: usize,
    pub n_r: usize,
    pub cells: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn cell(&self, i_s: usize, i_r: usize) -> &RegionCell {
        &self.cells[i_s * self.n_r + i_r]
    }
}

fn classify_cell(s: f64, r: f64) -> Result<RegionCell> {
    // sectional positivity does not depend on d
    let m = Metric::new(1.0, 1.0 + r, s, SpaceKind::Su3)?;
    let sectional = classify_sectional(&m).tag;
    let ricci = |kind| -> Result<bool> {
        let (a, b, c) = normalized_ricci_coeffs(r, s, kind)?;
        Ok(signature_of([a, b, c], kind).is_positive_definite())
    };
    Ok(RegionCell {
        s,
        r,
        sectional,
        ricci_d2: ricci(SpaceKind::Su3)?,
        ricci_d4: ricci(SpaceKind::Sp3)?,
        ricci_d8: ricci(SpaceKind::F4)?,
    })
}

/// Classifies every grid point. Cells are evaluated in parallel and collected
/// in row-major order, so the result does not depend on scheduling.
pub fn sample_regions(spec: &GridSpec) -> Result<RegionGrid> {
    spec.validate()?;
    let s_values = spec.s_values();
    let r_values = spec.r_values();
    let cells = (0..spec.n_s * spec.n_r)
        .into_par_iter()
        .map(|k| classify_cell(s_values[k / spec.n_r], r_values[k % spec.n_r]))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid {
        s_min: spec.s_min,
        s_max: spec.s_max,
        r_min: spec.r_min,
        r_max: spec.r_max,
        n_s: spec.n_s,
        n_r: spec.n_r,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveId {
    Valiev,
    RicciD2,
    RicciD4,
    RicciD8,
}

impl CurveId {
    /// Bottom to top.
    pub const ALL: [CurveId; 4] = [CurveId::Valiev, CurveId::RicciD2, CurveId::RicciD4, CurveId::RicciD8];

    pub fn ricci(kind: SpaceKind) -> CurveId {
        match kind {
            SpaceKind::Su3 => CurveId::RicciD2,
            SpaceKind::Sp3 => CurveId::RicciD4,
            SpaceKind::F4 => CurveId::RicciD8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CurveId::Valiev => "valiev",
            CurveId::RicciD2 => "ricci_d2",
            CurveId::RicciD4 => "ricci_d4",
            CurveId::RicciD8 => "ricci_d8",
        }
    }

    /// `r(s)` on the curve, for `0 < s < 1`.
    pub fn eval(self, s: f64) -> Result<f64> {
        match self {
            CurveId::Valiev => crate::curvature::valiev_bound(s),
            CurveId::RicciD2 => boundary_root(s, SpaceKind::Su3),
            CurveId::RicciD4 => boundary_root(s, SpaceKind::Sp3),
            CurveId::RicciD8 => boundary_root(s, SpaceKind::F4),
        }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub curve_id: CurveId,
    /// `(s, r)`, sorted by `s`.
    pub points: Vec<(f64, f64)>,
}

/// Samples each curve at the given `s` values, skipping any outside `(0, 1)`.
pub fn sample_curves(ids: &[CurveId], s_values: &[f64]) -> Vec<CurveSample> {
    let mut sorted: Vec<f64> = s_values.iter().copied().filter(|s| *s > 0.0 && *s < 1.0).collect();
    sorted.sort_by(f64::total_cmp);
    ids.iter()
        .map(|&id| CurveSample {
            curve_id: id,
            points: sorted
                .iter()
                .map(|&s| (s, id.eval(s).expect("s filtered to (0, 1)")))
                .collect(),
        })
        .collect()
}

/// `s` values at which consecutive curves (in [`CurveId::ALL`] order) fail
/// to be strictly stacked.
pub fn stacking_violations(s_values: &[f64]) -> Vec<f64> {
    s_values
        .iter()
        .copied()
        .filter(|s| *s > 0.0 && *s < 1.0)
        .filter(|&s| {
            let r: Vec<f64> = CurveId::ALL.iter().map(|id| id.eval(s).expect("s in (0, 1)")).collect();
            r.windows(2).any(|w| !(w[0] < w[1]))
        })
        .collect()
}

/// Valiev curve extended to `s = 1`.
pub fn valiev_at(s: f64) -> f64 {
    valiev_curve(s)
}
