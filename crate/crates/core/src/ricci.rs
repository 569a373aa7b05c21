//! Ricci-tensor signature along the family and the transition from positive
//! definite Ricci to signature `(2d positive, d negative)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::metric::{ricci_coefficients, Metric, SpaceKind};
use crate::roots::{bisect, opposite_signs};

/// Eigenvalues with `|rho| < SIGN_TOL * max(1, sum |rho|)` count as zero.
pub const SIGN_TOL: f64 = 1e-9;

/// Bracket used when searching for the critical `s`.
pub const THRESHOLD_BRACKET: (f64, f64) = (1e-4, 1.0 - 1e-4);

const THRESHOLD_SCAN_POINTS: usize = 1000;
const THRESHOLD_TOL: f64 = 1e-13;

/// Sign counts of the Ricci eigenvalues, each `rho_i` counted `d` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RicciSignature {
    pub n_pos: u32,
    pub n_zero: u32,
    pub n_neg: u32,
}

impl RicciSignature {
    pub fn new(n_pos: u32, n_zero: u32, n_neg: u32) -> Self {
        RicciSignature { n_pos, n_zero, n_neg }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.n_zero == 0 && self.n_neg == 0
    }
}

impl fmt::Display for RicciSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.n_pos, self.n_zero, self.n_neg)
    }
}

/// Classifies three eigenvalues of multiplicity `d` each.
pub fn signature_of(rho: [f64; 3], kind: SpaceKind) -> RicciSignature {
    let d = kind.d();
    let zero = SIGN_TOL * rho.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    let mut sig = RicciSignature::new(0, 0, 0);
    for v in rho {
        if v.abs() < zero {
            sig.n_zero += d;
        } else if v > 0.0 {
            sig.n_pos += d;
        } else {
            sig.n_neg += d;
        }
    }
    sig
}

pub fn ricci_signature(m: &Metric) -> RicciSignature {
    signature_of(ricci_coefficients(m).rho, m.kind())
}

/// `(r1 x1, r2 x2, r3 x3)` at the normalized metric `(1, 1 + r, s)`:
///
/// ```text
/// r1 x1 = (-2dr - dr^2 + (10d-8)s + (10d-8)rs - ds^2) / (2(1+r)s)
/// r2 x2 = (2dr + dr^2 + (10d-8)s - ds^2) / (2s)
/// r3 x3 = ((8d-8) + (8d-8)r - dr^2 + ds^2) / (2(1+r))
/// ```
///
/// The linear term of `r2 x2` is `2dr`, as obtained by substituting into the
/// general coefficient formula; it is sometimes quoted as `dr`.
pub fn normalized_ricci_coeffs(r: f64, s: f64, kind: SpaceKind) -> Result<(f64, f64, f64)> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain(format!("s = {s} must be > 0")));
    }
    if !(1.0 + r > 0.0 && r.is_finite()) {
        return Err(domain(format!("r = {r} must satisfy 1 + r > 0")));
    }
    let d = kind.df();
    let c = f64::from(kind.ricci_const());
    let e = 8.0 * d - 8.0;
    let rho1 = (-2.0 * r * d - d * r * r + c * s + c * r * s - d * s * s) / (2.0 * (1.0 + r) * s);
    let rho2 = (2.0 * d * r + d * r * r + c * s - d * s * s) / (2.0 * s);
    let rho3 = (e + e * r - d * r * r + d * s * s) / (2.0 * (1.0 + r));
    Ok((rho1, rho2, rho3))
}

/// The positive root `r(s)` of `r1 x1 = 0` at `(1, 1 + r, s)`.
pub fn boundary_root(s: f64, kind: SpaceKind) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(domain(format!("s = {s} must lie in (0, 1)")));
    }
    Ok(boundary_root_unchecked(s, kind))
}

pub(crate) fn boundary_root_unchecked(s: f64, kind: SpaceKind) -> f64 {
    let s2 = s * s;
    match kind {
        SpaceKind::Su3 => (1.0 + 8.0 * s2).sqrt() - (1.0 - 3.0 * s),
        SpaceKind::Sp3 => (1.0 + 15.0 * s2).sqrt() - (1.0 - 4.0 * s),
        SpaceKind::F4 => (1.0 + 77.0 / 4.0 * s2).sqrt() - (1.0 - 4.5 * s),
    }
}

/// Analytic gradient `(dr1/dx1, dr1/dx2, dr1/dx3)` of the first Ricci coefficient.
pub fn r1_gradient(m: &Metric) -> [f64; 3] {
    let d = m.kind().df();
    let c = f64::from(m.kind().ricci_const());
    let [x1, x2, x3] = m.x();
    let num = d * x1 * x1 - d * x2 * x2 - d * x3 * x3 + c * x2 * x3;
    let den = 2.0 * x1 * x2 * x3;
    let dnum = [2.0 * d * x1, -2.0 * d * x2 + c * x3, -2.0 * d * x3 + c * x2];
    let dden = [2.0 * x2 * x3, 2.0 * x1 * x3, 2.0 * x1 * x2];
    let den2 = den * den;
    [0, 1, 2].map(|i| (dnum[i] * den - num * dden[i]) / den2)
}

/// `dr1/dt = -2 sum_i rho_i dr1/dx_i` along the unnormalized Ricci flow.
pub fn dr1_along_flow(m: &Metric) -> f64 {
    let rho = ricci_coefficients(m).rho;
    let grad = r1_gradient(m);
    -2.0 * (rho[0] * grad[0] + rho[1] * grad[1] + rho[2] * grad[2])
}

/// `dr1/dt` at the start of the root curve `(1, 1 + r(s), s)`.
pub fn dr1_on_root_curve(s: f64, kind: SpaceKind) -> Result<f64> {
    let r = boundary_root(s, kind)?;
    let m = Metric::new(1.0, 1.0 + r, s, kind)?;
    Ok(dr1_along_flow(&m))
}

/// The `s*` in (0, 1) below which a flow started on the root curve pushes `r1`
/// negative, found by bisection.
pub fn critical_threshold(kind: SpaceKind) -> Result<f64> {
    let (lo, hi) = THRESHOLD_BRACKET;
    let f = |s: f64| dr1_on_root_curve(s, kind).unwrap_or(f64::NAN);

    let mut changes = 0;
    let mut prev = f(lo);
    for i in 1..=THRESHOLD_SCAN_POINTS {
        let s = lo + (hi - lo) * i as f64 / THRESHOLD_SCAN_POINTS as f64;
        let v = f(s);
        if !v.is_finite() {
            return Err(Error::Numerical(format!("dr1/dt not finite at s = {s}")));
        }
        if opposite_signs(prev, v) {
            changes += 1;
        }
        prev = v;
    }
    if changes % 2 == 0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (a, b) = bisect(f, lo, hi, THRESHOLD_TOL)?;
    Ok(0.5 * (a + b))
}

/// Closed-form value of the critical threshold.
pub fn closed_form_threshold(kind: SpaceKind) -> f64 {
    match kind {
        SpaceKind::Su3 => 1.0 - (5.0f64 / 8.0).sqrt(),
        SpaceKind::Sp3 => {
            let r21 = 21f64.sqrt();
            (30.0 + 5.0 * r21 - 3.0 * (5.0 * (21.0 + 4.0 * r21)).sqrt()) / 30.0
        }
        SpaceKind::F4 => {
            let r = 2737f64.sqrt();
            (693.0 + 11.0 * r - 7.0 * (22.0 * (511.0 + 9.0 * r)).sqrt()) / 616.0
        }
    }
}

/// Ricci tensor on the slice `x1 = x2` as displayed against the background
/// inner product: `((10d - 8 - d q)/2, ((8d - 8) - d q^2)/2)` for the
/// `V1 + V2` and `V3` parts.
///
/// The first component equals `rho1` exactly. The second, as displayed, does
/// not track `rho3 = ((8d - 8) + d q^2)/2`: it turns negative at
/// `q = sqrt((8d - 8)/d)` while `rho3` stays positive. Signs agree with `rho`
/// only for `q < sqrt((8d - 8)/d)`, which covers the positively curved range
/// `q < 4/3`.
pub fn equal_pair_ricci(q: f64, kind: SpaceKind) -> Result<(f64, f64)> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(domain(format!("ratio q = {q} must be > 0")));
    }
    let d = kind.df();
    Ok(((10.0 * d - 8.0 - d * q) / 2.0, ((8.0 * d - 8.0) - d * q * q) / 2.0))
}

/// Largest `q` for which [`equal_pair_ricci`] has the same signs as `(rho1, rho3)`.
pub fn equal_pair_sign_agreement_limit(kind: SpaceKind) -> f64 {
    let d = kind.df();
    ((8.0 * d - 8.0) / d).sqrt()
}
