//! Homogeneous metrics on the Wallach flag manifolds and the Ricci-flow vector field.
//!
//! The isotropy representation splits into three irreducible blocks `V1, V2, V3`
//! of equal real dimension `d`, so an invariant metric is a triple of positive
//! scalings `(x1, x2, x3)`. Every quantity in this crate depends only on `d` and
//! that triple.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Relative tolerance used for every boundary and coincidence test.
pub const REL_TOL: f64 = 1e-9;

/// `|a - b| <= REL_TOL * max(|a|, |b|)`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

/// One of the three Wallach spaces, indexed by the block dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceKind {
    /// SU(3)/T², d = 2.
    Su3,
    /// Sp(3)/Sp(1)³, d = 4.
    Sp3,
    /// F4/Spin(8), d = 8.
    F4,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 3] = [SpaceKind::Su3, SpaceKind::Sp3, SpaceKind::F4];

    pub fn from_d(d: u32) -> Result<Self> {
        match d {
            2 => Ok(SpaceKind::Su3),
            4 => Ok(SpaceKind::Sp3),
            8 => Ok(SpaceKind::F4),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }

    /// Real dimension of each block `V_i`.
    pub fn d(self) -> u32 {
        match self {
            SpaceKind::Su3 => 2,
            SpaceKind::Sp3 => 4,
            SpaceKind::F4 => 8,
        }
    }

    pub fn total_dim(self) -> u32 {
        3 * self.d()
    }

    /// The constant `10d - 8` in the Ricci coefficient formula.
    pub fn ricci_const(self) -> u32 {
        10 * self.d() - 8
    }

    /// `4(d - 1)/d`, the attracting fixed point of `x3/x1` on the `x1 = x2` slice.
    pub fn attractor_ratio(self) -> f64 {
        let d = f64::from(self.d());
        4.0 * (d - 1.0) / d
    }

    /// `9d - 8`; along the diagonal every `x_i` decays at exactly this rate.
    pub fn diagonal_rate(self) -> u32 {
        9 * self.d() - 8
    }

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Su3 => "su3",
            SpaceKind::Sp3 => "sp3",
            SpaceKind::F4 => "f4",
        }
    }

    pub(crate) fn df(self) -> f64 {
        f64::from(self.d())
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An invariant metric `x1 <.,.>|V1 + x2 <.,.>|V2 + x3 <.,.>|V3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    x: [f64; 3],
    kind: SpaceKind,
}

impl Metric {
    pub fn new(x1: f64, x2: f64, x3: f64, kind: SpaceKind) -> Result<Self> {
        Self::from_array([x1, x2, x3], kind)
    }

    pub fn from_array(x: [f64; 3], kind: SpaceKind) -> Result<Self> {
        if x.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(Metric { x, kind })
        } else {
            Err(Error::InvalidMetric {
                x1: x[0],
                x2: x[1],
                x3: x[2],
            })
        }
    }

    pub fn x(&self) -> [f64; 3] {
        self.x
    }

    pub fn x1(&self) -> f64 {
        self.x[0]
    }

    pub fn x2(&self) -> f64 {
        self.x[1]
    }

    pub fn x3(&self) -> f64 {
        self.x[2]
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Relabels the blocks: component `i` of the result is component `perm[i]` of `self`.
    pub fn permuted(&self, perm: Permutation) -> Metric {
        Metric {
            x: perm.apply(self.x),
            kind: self.kind,
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Metric> {
        Metric::from_array(self.x.map(|v| v * c), self.kind)
    }
}

/// A permutation of the three block indices, stored as `[p0, p1, p2]` with
/// `apply(v)[i] = v[p_i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation([usize; 3]);

impl Permutation {
    pub const IDENTITY: Permutation = Permutation([0, 1, 2]);

    pub const ALL: [Permutation; 6] = [
        Permutation([0, 1, 2]),
        Permutation([0, 2, 1]),
        Permutation([1, 0, 2]),
        Permutation([1, 2, 0]),
        Permutation([2, 0, 1]),
        Permutation([2, 1, 0]),
    ];

    pub fn new(p: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &i in &p {
            if i > 2 || seen[i] {
                return Err(domain(format!("{p:?} is not a permutation of {{0, 1, 2}}")));
            }
            seen[i] = true;
        }
        Ok(Permutation(p))
    }

    pub fn indices(&self) -> [usize; 3] {
        self.0
    }

    pub fn apply<T: Copy>(&self, v: [T; 3]) -> [T; 3] {
        [v[self.0[0]], v[self.0[1]], v[self.0[2]]]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = [0; 3];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }
}

/// Ricci coefficients `r_i` and Ricci eigenvalues `rho_i = r_i x_i`
/// (each eigenvalue has multiplicity `d`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciData {
    pub r: [f64; 3],
    pub rho: [f64; 3],
}

/// Evaluates
/// `r_i = (d x_i^2 - d x_j^2 - d x_k^2 + (10d - 8) x_j x_k) / (2 x1 x2 x3)`.
///
/// The numerator is written with commutative groupings only, so metrics on an
/// equality set `x_i = x_j` produce bitwise-equal `r_i` and `r_j`.
pub fn ricci_coefficients(m: &Metric) -> RicciData {
    ricci_raw(m.x, m.kind)
}

/// Unchecked form of [`ricci_coefficients`]; intermediate Runge-Kutta stages
/// are evaluated through it before positivity has been checked.
pub(crate) fn ricci_raw(x: [f64; 3], kind: SpaceKind) -> RicciData {
    let d = kind.df();
    let c = f64::from(kind.ricci_const());
    let [x1, x2, x3] = x;
    let den = 2.0 * x1 * x2 * x3;
    let num = |xi: f64, xj: f64, xk: f64| d * xi * xi - (d * xj * xj + d * xk * xk) + c * (xj * xk);
    let r = [num(x1, x2, x3) / den, num(x2, x1, x3) / den, num(x3, x1, x2) / den];
    RicciData {
        r,
        rho: [r[0] * x1, r[1] * x2, r[2] * x3],
    }
}

/// Right-hand side of `dx_i/dt = -2 r_i x_i`.
pub fn flow_vector_field(m: &Metric) -> [f64; 3] {
    ricci_coefficients(m).rho.map(|rho| -2.0 * rho)
}

/// `d/dt (x3/x1)` on the slice `x1 = x2`, in closed form:
/// `q * [-2 (1 - q)((4d - 4) - d q) / x3]` with `q = x3/x1`.
///
/// This equals `-2 q (r3 - r1)`; at `(1, 1, 4/3)` it is `(4/3)(4d/3 - 2)`.
pub fn ratio_derivative_equal_pair(q: f64, x3: f64, kind: SpaceKind) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(domain(format!("ratio q = {q} must be > 0")));
    }
    if !(x3 > 0.0 && x3.is_finite()) {
        return Err(domain(format!("x3 = {x3} must be > 0")));
    }
    let d = kind.df();
    let two_r1_minus_r3 = -2.0 * (1.0 - q) * ((4.0 * d - 4.0) - d * q) / x3;
    Ok(q * two_r1_minus_r3)
}

/// A metric rescaled and relabelled into the form `(1, 1 + r, s)` with
/// `x2 >= x1 >= x3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMetric {
    pub r: f64,
    pub s: f64,
    /// Maps the source metric onto the sorted one: `sorted = applied_permutation.apply(source)`.
    pub applied_permutation: Permutation,
    /// The middle-ranked source coordinate.
    pub scale: f64,
    pub kind: SpaceKind,
}

impl NormalizedMetric {
    /// The normal form `(1, 1 + r, s)`.
    pub fn normal_coordinates(&self) -> [f64; 3] {
        [1.0, 1.0 + self.r, self.s]
    }

    /// Undoes the scaling and relabelling.
    pub fn reconstruct(&self) -> Result<Metric> {
        let sorted = self.normal_coordinates().map(|v| v * self.scale);
        let source = self.applied_permutation.inverse().apply(sorted);
        Metric::from_array(source, self.kind)
    }
}

/// Relabels so that `x2 >= x1 >= x3` and divides by the middle value.
///
/// The relabelling is the first entry of [`Permutation::ALL`] (identity first)
/// that produces this order, so already-sorted input keeps the identity and
/// ties resolve deterministically.
pub fn normalize(m: &Metric) -> NormalizedMetric {
    let perm = Permutation::ALL
        .into_iter()
        .find(|p| {
            let [a, b, c] = p.apply(m.x);
            b >= a && a >= c
        })
        .expect("some relabelling sorts any triple");
    let [mid, top, bottom] = perm.apply(m.x);
    NormalizedMetric {
        r: top / mid - 1.0,
        s: bottom / mid,
        applied_permutation: perm,
        scale: mid,
        kind: m.kind,
    }
}
