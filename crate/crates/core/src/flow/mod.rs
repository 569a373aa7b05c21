//! Integration of `dx_i/dt = -2 r_i x_i` with transition-event detection.
//!
//! Backward flow (`t_end < 0`) reuses the forward machinery with the vector
//! field negated. Events are located by watching scalar indicators at accepted
//! steps and bisecting the step length of a fresh step from the last accepted
//! state whenever an indicator changes sign.

mod rk;

use serde::{Deserialize, Serialize};

use crate::curvature::{classify_sectional, equal_pair_ratio, valiev_margin, CurvatureClass, EQUAL_PAIR_BOUNDARY};
use crate::error::{Error, Result};
use crate::metric::{approx_eq, ricci_coefficients, ricci_raw, Metric, RicciData, SpaceKind};
use crate::ricci::{ricci_signature, RicciSignature};
use crate::roots::{bisect, opposite_signs};

/// Width to which event brackets are refined.
pub const EVENT_BRACKET_WIDTH: f64 = 1e-9;

/// Relative drift from `x1 = x2` tolerated by [`ratio_trace`].
pub const SLICE_DRIFT_TOL: f64 = 1e-8;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
// PI gains for a fifth-order error estimate
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Final flow time; negative for backward flow.
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Integration stops once `min x_i` drops below this.
    pub extinction_floor: f64,
    /// Minimum flow-time spacing between recorded points.
    pub record_stride: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            t_end: 1.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1e-2,
            min_step: 1e-14,
            extinction_floor: 1e-6,
            record_stride: 1e-3,
        }
    }
}

impl FlowOptions {
    pub fn with_t_end(t_end: f64) -> Self {
        FlowOptions {
            t_end,
            ..FlowOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidOptions(format!("{name} = {v} must be finite and > 0")))
            }
        };
        if !self.t_end.is_finite() {
            return Err(Error::InvalidOptions(format!("t_end = {} must be finite", self.t_end)));
        }
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("max_step", self.max_step)?;
        positive("min_step", self.min_step)?;
        positive("extinction_floor", self.extinction_floor)?;
        positive("record_stride", self.record_stride)?;
        if self.min_step >= self.max_step {
            return Err(Error::InvalidOptions(format!(
                "min_step = {} must be < max_step = {}",
                self.min_step, self.max_step
            )));
        }
        Ok(())
    }
}

/// A flow sample with its classifications, all recomputed from `metric`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub metric: Metric,
    pub ricci: RicciData,
    pub sectional: CurvatureClass,
    pub signature: RicciSignature,
}

impl TrajectoryPoint {
    pub fn at(t: f64, metric: Metric) -> Self {
        TrajectoryPoint {
            t,
            metric,
            ricci: ricci_coefficients(&metric),
            sectional: classify_sectional(&metric),
            signature: ricci_signature(&metric),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    /// `q - 4/3` changes sign, where `q` is the equal-pair ratio.
    RatioCrossesFourThirds,
    /// The Valiev margin `r - valiev(s)` changes sign.
    SectionalClassChange,
    /// `rho_i` changes sign; the index is 1-based.
    RicciEigenvalueZero(u8),
    /// `min x_i` fell below the extinction floor.
    Extinction,
}

impl EventKind {
    /// Every monitor [`detect_events`] understands.
    pub const MONITORS: [EventKind; 5] = [
        EventKind::RatioCrossesFourThirds,
        EventKind::SectionalClassChange,
        EventKind::RicciEigenvalueZero(1),
        EventKind::RicciEigenvalueZero(2),
        EventKind::RicciEigenvalueZero(3),
    ];

    pub fn label(&self) -> String {
        match self {
            EventKind::RatioCrossesFourThirds => "RatioCrossesFourThirds".to_string(),
            EventKind::SectionalClassChange => "SectionalClassChange".to_string(),
            EventKind::RicciEigenvalueZero(i) => format!("RicciEigenvalueZero({i})"),
            EventKind::Extinction => "Extinction".to_string(),
        }
    }
}

/// A detected transition, bracketed in flow time with `t_lo <= t_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowEvent {
    pub kind: EventKind,
    pub t_lo: f64,
    pub t_hi: f64,
    pub state_at_t_lo: TrajectoryPoint,
    pub state_at_t_hi: TrajectoryPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: SpaceKind,
    pub points: Vec<TrajectoryPoint>,
    /// Set when the run stopped at the extinction floor.
    pub extinction: Option<FlowEvent>,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("a trajectory always holds its initial point")
    }
}

/// Integrates the flow from `m0` to `opts.t_end` (or to extinction).
pub fn integrate(m0: &Metric, opts: &FlowOptions) -> Result<Trajectory> {
    simulate(m0, opts, &[]).map(|(traj, _)| traj)
}

/// Runs the flow and returns the events seen by `monitors`, in order of
/// occurrence, followed by the extinction event if one occurred.
pub fn detect_events(m0: &Metric, opts: &FlowOptions, monitors: &[EventKind]) -> Result<Vec<FlowEvent>> {
    simulate(m0, opts, monitors).map(|(_, events)| events)
}

/// `(t, x3/x1)` along a flow started on the slice `x1 = x2`.
pub fn ratio_trace(m0: &Metric, opts: &FlowOptions) -> Result<Vec<(f64, f64)>> {
    if !approx_eq(m0.x1(), m0.x2()) {
        return Err(Error::NotOnEqualPairSlice);
    }
    let traj = integrate(m0, opts)?;
    traj.points
        .iter()
        .map(|p| {
            let [x1, x2, x3] = p.metric.x();
            let norm = x1.max(x2).max(x3);
            if (x1 - x2).abs() > SLICE_DRIFT_TOL * norm {
                Err(Error::NotOnEqualPairSlice)
            } else {
                Ok((p.t, x3 / x1))
            }
        })
        .collect()
}

/// Integration plus event detection in a single pass.
pub fn simulate(m0: &Metric, opts: &FlowOptions, monitors: &[EventKind]) -> Result<(Trajectory, Vec<FlowEvent>)> {
    opts.validate()?;
    Integrator::new(m0, opts, monitors).run()
}

struct Integrator<'a> {
    kind: SpaceKind,
    opts: &'a FlowOptions,
    dir: f64,
    monitors: Vec<EventKind>,
    y0: [f64; 3],
}

impl<'a> Integrator<'a> {
    fn new(m0: &Metric, opts: &'a FlowOptions, monitors: &[EventKind]) -> Self {
        let on_slice = equal_pair_ratio(m0).is_some();
        let monitors = monitors
            .iter()
            .copied()
            .filter(|k| match k {
                EventKind::RatioCrossesFourThirds => on_slice,
                EventKind::RicciEigenvalueZero(i) => (1..=3).contains(i),
                EventKind::SectionalClassChange => true,
                EventKind::Extinction => false,
            })
            .collect();
        Integrator {
            kind: m0.kind(),
            opts,
            dir: if opts.t_end < 0.0 { -1.0 } else { 1.0 },
            monitors,
            y0: m0.x(),
        }
    }

    fn field(&self) -> impl Fn(&[f64; 3]) -> [f64; 3] + '_ {
        let scale = -2.0 * self.dir;
        move |y| ricci_raw(*y, self.kind).rho.map(|rho| scale * rho)
    }

    /// Fresh step of length `h >= 0` in flow direction.
    fn step(&self, y: &[f64; 3], h: f64) -> ([f64; 3], [f64; 3]) {
        rk::step(&self.field(), y, h)
    }

    fn indicator(&self, kind: EventKind, y: &[f64; 3]) -> f64 {
        let Ok(m) = Metric::from_array(*y, self.kind) else {
            return f64::NAN;
        };
        match kind {
            EventKind::RatioCrossesFourThirds => equal_pair_ratio(&m).map_or(f64::NAN, |q| q - EQUAL_PAIR_BOUNDARY),
            EventKind::SectionalClassChange => valiev_margin(&m),
            EventKind::RicciEigenvalueZero(i) => ricci_raw(*y, self.kind).rho[usize::from(i) - 1],
            EventKind::Extinction => y.iter().copied().fold(f64::INFINITY, f64::min) - self.opts.extinction_floor,
        }
    }

    fn point(&self, tau: f64, y: [f64; 3]) -> Result<TrajectoryPoint> {
        let m = Metric::from_array(y, self.kind)
            .map_err(|_| Error::Numerical(format!("non-positive state {y:?} at t = {}", self.dir * tau)))?;
        Ok(TrajectoryPoint::at(self.dir * tau, m))
    }

    fn error_ratio(&self, y: &[f64; 3], y_new: &[f64; 3], err: &[f64; 3]) -> f64 {
        let inf = |v: &[f64; 3]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let scale = self.opts.abs_tol + self.opts.rel_tol * inf(y).max(inf(y_new));
        inf(err) / scale
    }

    fn initial_step(&self) -> f64 {
        let f = self.field()(&self.y0);
        let y_norm = self.y0.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let f_norm = f.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let h = if f_norm > 0.0 {
            1e-3 * y_norm / f_norm
        } else {
            self.opts.max_step
        };
        h.clamp(self.opts.min_step, self.opts.max_step)
    }

    /// Refines `[0, h]` from `y` around a sign change of `g`.
    fn bracket<G>(&self, y: &[f64; 3], h: f64, g: G) -> Result<(f64, f64)>
    where
        G: Fn(&[f64; 3]) -> f64,
    {
        bisect(|s| g(&self.step(y, s).0), 0.0, h, EVENT_BRACKET_WIDTH)
    }

    fn event(&self, kind: EventKind, tau: f64, y: &[f64; 3], lo: f64, hi: f64) -> Result<FlowEvent> {
        let before = self.point(tau + lo, self.step(y, lo).0)?;
        let after = self.point(tau + hi, self.step(y, hi).0)?;
        let (state_at_t_lo, state_at_t_hi) = if self.dir > 0.0 {
            (before, after)
        } else {
            (after, before)
        };
        Ok(FlowEvent {
            kind,
            t_lo: state_at_t_lo.t,
            t_hi: state_at_t_hi.t,
            state_at_t_lo,
            state_at_t_hi,
        })
    }

    /// Brackets the extinction crossing inside an accepted step `[0, h]`.
    fn extinction_bracket(&self, y: &[f64; 3], h: f64) -> Result<(f64, f64)> {
        let floor = self.opts.extinction_floor;
        let below = |s: f64| {
            let z = self.step(y, s).0;
            z.iter().any(|v| !v.is_finite() || *v < floor)
        };
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..MAX_BISECTIONS {
            let valid_hi = self.step(y, hi).0.iter().all(|v| v.is_finite() && *v > 0.0);
            if hi - lo <= EVENT_BRACKET_WIDTH && valid_hi {
                return Ok((lo, hi));
            }
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Numerical(
            "could not bracket extinction with a positive state".into(),
        ))
    }

    fn run(self) -> Result<(Trajectory, Vec<FlowEvent>)> {
        let opts = self.opts;
        let tau_end = opts.t_end.abs();
        let mut tau = 0.0;
        let mut y = self.y0;
        let mut points = vec![self.point(0.0, y)?];
        let mut events = Vec::new();
        let mut extinction = None;
        let mut last_recorded = 0.0;
        let mut h = self.initial_step();
        let mut prev_err: f64 = 1e-4;
        let mut prev_ind: Vec<f64> = self.monitors.iter().map(|&k| self.indicator(k, &y)).collect();

        while tau < tau_end {
            let remaining = tau_end - tau;
            let h_try = h.min(remaining).min(opts.max_step);
            let (y_new, err_vec) = self.step(&y, h_try);
            let finite = y_new.iter().chain(err_vec.iter()).all(|v| v.is_finite());
            let err = if finite {
                self.error_ratio(&y, &y_new, &err_vec)
            } else {
                f64::INFINITY
            };

            if !(err <= 1.0) {
                let factor = if err.is_finite() {
                    (SAFETY * err.powf(-1.0 / 5.0)).max(MIN_FACTOR)
                } else {
                    0.25
                };
                h = h_try * factor.min(1.0);
                if h < opts.min_step && remaining > opts.min_step {
                    return Err(Error::StepSizeUnderflow { t: self.dir * tau, h });
                }
                continue;
            }

            let extinct = y_new.iter().any(|v| *v < opts.extinction_floor);
            let extinction_br = if extinct {
                Some(self.extinction_bracket(&y, h_try)?)
            } else {
                None
            };
            let (h_acc, y_acc) = match extinction_br {
                Some((lo, _)) => (lo, self.step(&y, lo).0),
                None => (h_try, y_new),
            };

            // sign changes of monitored indicators inside [tau, tau + h_acc]
            let mut step_events = Vec::new();
            let new_ind: Vec<f64> = self.monitors.iter().map(|&k| self.indicator(k, &y_acc)).collect();
            for (j, &kind) in self.monitors.iter().enumerate() {
                if opposite_signs(prev_ind[j], new_ind[j]) {
                    let (lo, hi) = self.bracket(&y, h_acc, |z| self.indicator(kind, z))?;
                    step_events.push((lo, self.event(kind, tau, &y, lo, hi)?));
                }
            }
            step_events.sort_by(|a, b| a.0.total_cmp(&b.0));
            events.extend(step_events.into_iter().map(|(_, e)| e));

            if let Some((lo, hi)) = extinction_br {
                let ev = self.event(EventKind::Extinction, tau, &y, lo, hi)?;
                points.push(self.point(tau + lo, y_acc)?);
                events.push(ev);
                extinction = Some(ev);
                break;
            }

            tau = if h_acc == remaining { tau_end } else { tau + h_acc };
            y = y_acc;
            prev_ind = new_ind;
            if tau - last_recorded >= opts.record_stride || tau >= tau_end {
                points.push(self.point(tau, y)?);
                last_recorded = tau;
            }

            let e = err.max(1e-10);
            let factor = (SAFETY * e.powf(-ALPHA) * prev_err.powf(BETA)).clamp(MIN_FACTOR, MAX_FACTOR);
            prev_err = e;
            h = (h_try * factor).min(opts.max_step);
        }

        Ok((
            Trajectory {
                kind: self.kind,
                points,
                extinction,
            },
            events,
        ))
    }
}
