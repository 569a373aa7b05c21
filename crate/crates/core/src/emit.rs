//! CSV and JSON writers for trajectories, region grids and curves.
//!
//! Floats are written in their shortest round-trip form with `.` as decimal
//! separator, and lines end in `\n`, so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{FlowEvent, Trajectory};
use crate::region::{CurveSample, RegionGrid};

pub const TRAJECTORY_CSV_HEADER: &str = "t,x1,x2,x3,rho1,rho2,rho3,sectional,ricci_sig";
pub const REGION_CSV_HEADER: &str = "s,r,sectional,ricci_d2,ricci_d4,ricci_d8";
pub const CURVES_CSV_HEADER: &str = "curve,s,r";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Domain(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Serialize)]
struct TrajectoryRecord {
    t: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    rho1: f64,
    rho2: f64,
    rho3: f64,
    sectional: &'static str,
    ricci_sig: String,
}

fn trajectory_records(traj: &Trajectory) -> Vec<TrajectoryRecord> {
    traj.points
        .iter()
        .map(|p| {
            let [x1, x2, x3] = p.metric.x();
            let [rho1, rho2, rho3] = p.ricci.rho;
            TrajectoryRecord {
                t: p.t,
                x1,
                x2,
                x3,
                rho1,
                rho2,
                rho3,
                sectional: p.sectional.tag.as_str(),
                ricci_sig: p.signature.to_string(),
            }
        })
        .collect()
}

fn write_json<W: Write, T: Serialize + ?Sized>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_trajectory<W: Write>(out: &mut W, traj: &Trajectory, format: Format) -> Result<()> {
    let records = trajectory_records(traj);
    match format {
        Format::Json => write_json(out, &records),
        Format::Csv => {
            writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
            for r in &records {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    fmt_f64(r.t),
                    fmt_f64(r.x1),
                    fmt_f64(r.x2),
                    fmt_f64(r.x3),
                    fmt_f64(r.rho1),
                    fmt_f64(r.rho2),
                    fmt_f64(r.rho3),
                    r.sectional,
                    r.ricci_sig
                )?;
            }
            Ok(())
        }
    }
}

pub fn write_regions<W: Write>(out: &mut W, grid: &RegionGrid, format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(out, grid),
        Format::Csv => {
            writeln!(out, "{REGION_CSV_HEADER}")?;
            for c in &grid.cells {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_f64(c.s),
                    fmt_f64(c.r),
                    c.sectional,
                    c.ricci_d2,
                    c.ricci_d4,
                    c.ricci_d8
                )?;
            }
            Ok(())
        }
    }
}

/// JSON: `{"valiev": [[s, r], ...], "ricci_d2": ...}`; CSV: one `curve,s,r` row per point.
pub fn write_curves<W: Write>(out: &mut W, curves: &[CurveSample], format: Format) -> Result<()> {
    match format {
        Format::Json => {
            let map: BTreeMap<&str, Vec<[f64; 2]>> = curves
                .iter()
                .map(|c| (c.curve_id.as_str(), c.points.iter().map(|&(s, r)| [s, r]).collect()))
                .collect();
            write_json(out, &map)
        }
        Format::Csv => {
            writeln!(out, "{CURVES_CSV_HEADER}")?;
            for c in curves {
                for &(s, r) in &c.points {
                    writeln!(out, "{},{},{}", c.curve_id, fmt_f64(s), fmt_f64(r))?;
                }
            }
            Ok(())
        }
    }
}

/// One line per event: `kind t_lo t_hi sectional_after signature_after`.
pub fn write_events<W: Write>(out: &mut W, events: &[FlowEvent]) -> Result<()> {
    for e in events {
        writeln!(
            out,
            "event {} t_lo={} t_hi={} sectional_lo={} sectional_hi={} ricci_sig_lo={} ricci_sig_hi={}",
            e.kind.label(),
            fmt_f64(e.t_lo),
            fmt_f64(e.t_hi),
            e.state_at_t_lo.sectional.tag,
            e.state_at_t_hi.sectional.tag,
            e.state_at_t_lo.signature,
            e.state_at_t_hi.signature
        )?;
    }
    Ok(())
}

pub fn read_regions_json(text: &str) -> Result<RegionGrid> {
    Ok(serde_json::from_str(text)?)
}
