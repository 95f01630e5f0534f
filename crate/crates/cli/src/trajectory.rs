//! Trajectory CSV IO.
//!
//! Main file: `tick,x,y,theta_rad,delta_rad,steer_cmd_rad`, one row per
//! tick. Sidecar scan dump: `tick,r0,...,r{n-1}`. Headers are stable
//! contracts; columns are never reordered. Floats are written in shortest
//! round-trip form, so equal runs produce byte-identical files.

use std::fmt::Write as _;
use symnav::simulation::TrajectorySample;
use thiserror::Error;

pub const TRAJECTORY_HEADER: &str = "tick,x,y,theta_rad,delta_rad,steer_cmd_rad";

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("expected header `{TRAJECTORY_HEADER}`")]
    Header,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub tick: u32,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub delta: f64,
    pub steer_cmd: f64,
}

pub fn to_csv(samples: &[TrajectorySample]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.tick, s.state.x, s.state.y, s.state.theta, s.state.delta, s.steer_command
        )
        .unwrap();
    }
    out
}

/// Scan sidecar; the beam count is taken from the first sample.
pub fn scans_to_csv(samples: &[TrajectorySample]) -> String {
    let beams = samples.first().map_or(0, |s| s.scan.ranges.len());
    let mut out = String::from("tick");
    for i in 0..beams {
        write!(out, ",r{i}").unwrap();
    }
    out.push('\n');
    for s in samples {
        write!(out, "{}", s.tick).unwrap();
        for r in &s.scan.ranges {
            write!(out, ",{r}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn parse_field<T: std::str::FromStr>(
    field: &str,
    name: &str,
    line: usize,
) -> Result<T, TrajectoryError> {
    field.parse().map_err(|_| TrajectoryError::Row {
        line,
        reason: format!("cannot parse {name} from {field:?}"),
    })
}

/// Strict parser for the trajectory CSV format. Rejects wrong headers,
/// wrong field counts, unparseable numbers, and non-finite values; empty
/// trailing lines are tolerated.
pub fn parse_csv(text: &str) -> Result<Vec<TrajectoryRow>, TrajectoryError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRAJECTORY_HEADER => {}
        _ => return Err(TrajectoryError::Header),
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1; // 1-based for humans
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(TrajectoryError::Row {
                line,
                reason: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let row = TrajectoryRow {
            tick: parse_field(fields[0], "tick", line)?,
            x: parse_field(fields[1], "x", line)?,
            y: parse_field(fields[2], "y", line)?,
            theta: parse_field(fields[3], "theta_rad", line)?,
            delta: parse_field(fields[4], "delta_rad", line)?,
            steer_cmd: parse_field(fields[5], "steer_cmd_rad", line)?,
        };
        for (name, v) in [
            ("x", row.x),
            ("y", row.y),
            ("theta_rad", row.theta),
            ("delta_rad", row.delta),
            ("steer_cmd_rad", row.steer_cmd),
        ] {
            if !v.is_finite() {
                return Err(TrajectoryError::Row {
                    line,
                    reason: format!("{name} must be finite, got {v}"),
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
