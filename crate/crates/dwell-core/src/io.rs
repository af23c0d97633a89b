//! CSV encoding of trajectories and Lyapunov diagnostics.
//!
//! Numbers are written with 17 significant digits so a read-back is bit
//! exact. Impulse times produce two rows sharing the same `t`: the left
//! limit first, then the post-jump value, both flagged in `is_impulse`.

use std::fmt::Write as _;

use crate::certificate::full_precision;
use crate::error::{CoreError, CoreResult};
use crate::lyapunov::DiagnosticRow;
use crate::trajectory::Trajectory;

/// A trajectory as flat rows, the shape CSV stores.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryData {
    pub dim: usize,
    /// `(t, state, is_impulse)` rows; impulse nodes appear twice.
    pub rows: Vec<(f64, Vec<f64>, bool)>,
}

impl TrajectoryData {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let mut rows = Vec::with_capacity(traj.times().len() + traj.impulse_nodes().len());
        for (i, &t) in traj.times().iter().enumerate() {
            match traj.pre_state(i) {
                Some(pre) => {
                    rows.push((t, pre.as_slice().to_vec(), true));
                    rows.push((t, traj.states()[i].as_slice().to_vec(), true));
                }
                None => rows.push((t, traj.states()[i].as_slice().to_vec(), false)),
            }
        }
        Self {
            dim: traj.dim(),
            rows,
        }
    }
}

/// `t,x_1..x_n,is_impulse` with a header row.
pub fn write_trajectory_csv(data: &TrajectoryData) -> String {
    let mut out = String::new();
    out.push('t');
    for i in 1..=data.dim {
        let _ = write!(out, ",x_{i}");
    }
    out.push_str(",is_impulse\n");
    for (t, state, is_impulse) in &data.rows {
        out.push_str(&full_precision(*t));
        for x in state {
            out.push(',');
            out.push_str(&full_precision(*x));
        }
        let _ = writeln!(out, ",{}", if *is_impulse { 1 } else { 0 });
    }
    out
}

pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    write_trajectory_csv(&TrajectoryData::from_trajectory(traj))
}

fn parse_field(line_no: usize, field: &str) -> CoreResult<f64> {
    field.trim().parse::<f64>().map_err(|e| CoreError::Invalid {
        what: "csv",
        why: format!("line {line_no}: bad number {field:?}: {e}"),
    })
}

/// Parses the trajectory CSV format back into rows.
pub fn read_trajectory_csv(text: &str) -> CoreResult<TrajectoryData> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| CoreError::Invalid {
        what: "csv",
        why: "empty input".into(),
    })?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") || cols.last() != Some(&"is_impulse") || cols.len() < 3 {
        return Err(CoreError::Invalid {
            what: "csv",
            why: format!("unexpected header {header:?}"),
        });
    }
    let dim = cols.len() - 2;
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 2 {
            return Err(CoreError::Invalid {
                what: "csv",
                why: format!(
                    "line {}: expected {} fields, got {}",
                    idx + 1,
                    dim + 2,
                    fields.len()
                ),
            });
        }
        let t = parse_field(idx + 1, fields[0])?;
        let state: CoreResult<Vec<f64>> = fields[1..=dim]
            .iter()
            .map(|f| parse_field(idx + 1, f))
            .collect();
        let flag = fields[dim + 1].trim();
        let is_impulse = match flag {
            "0" => false,
            "1" => true,
            other => {
                return Err(CoreError::Invalid {
                    what: "csv",
                    why: format!("line {}: bad impulse flag {other:?}", idx + 1),
                })
            }
        };
        rows.push((t, state?, is_impulse));
    }
    Ok(TrajectoryData { dim, rows })
}

/// `t,W1,W2,W,envelope_bound,norm_bound` with a header row.
pub fn write_diagnostics_csv(rows: &[DiagnosticRow]) -> String {
    let mut out = String::from("t,W1,W2,W,envelope_bound,norm_bound\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            full_precision(r.t),
            full_precision(r.w1),
            full_precision(r.w2),
            full_precision(r.w),
            full_precision(r.envelope_bound),
            full_precision(r.norm_bound),
        );
    }
    out
}

/// Parses the diagnostics CSV back into rows.
pub fn read_diagnostics_csv(text: &str) -> CoreResult<Vec<DiagnosticRow>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| CoreError::Invalid {
        what: "csv",
        why: "empty input".into(),
    })?;
    if header != "t,W1,W2,W,envelope_bound,norm_bound" {
        return Err(CoreError::Invalid {
            what: "csv",
            why: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CoreError::Invalid {
                what: "csv",
                why: format!("line {}: expected 6 fields, got {}", idx + 1, fields.len()),
            });
        }
        let mut vals = [0.0; 6];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = parse_field(idx + 1, f)?;
        }
        rows.push(DiagnosticRow {
            t: vals[0],
            w1: vals[1],
            w2: vals[2],
            w: vals[3],
            envelope_bound: vals[4],
            norm_bound: vals[5],
        });
    }
    Ok(rows)
}
