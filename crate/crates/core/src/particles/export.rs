//! CSV and JSON export of trajectories. Numbers are written with Rust's
//! shortest round-trip formatting, so output is byte-stable for a seed.

use std::io::Write;

use serde_json::{json, Value};

use super::trajectory::Trajectory;
use crate::scalar::Real;

fn header(prefix: &str, count: usize) -> Vec<String> {
    std::iter::once("time".to_string())
        .chain((1..=count).map(|i| format!("{prefix}_{i}")))
        .collect()
}

fn write_rows<T: Real, W: Write>(
    out: W,
    head: Vec<String>,
    rows: impl Iterator<Item = (T, Vec<T>)>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&head)?;
    for (time, values) in rows {
        let record: Vec<String> = std::iter::once(time)
            .chain(values)
            .map(|x| format!("{}", x.as_f64()))
            .collect();
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// `time,x_1,...,x_N`, positions by particle index.
pub fn write_trajectory_csv<T: Real, W: Write>(traj: &Trajectory<T>, out: W) -> csv::Result<()> {
    write_rows(
        out,
        header("x", traj.particles()),
        traj.samples.iter().map(|s| (s.time, s.positions.clone())),
    )
}

/// `time,delta_1,...,delta_{N-1}`, spacings by rank.
pub fn write_spacings_csv<T: Real, W: Write>(traj: &Trajectory<T>, out: W) -> csv::Result<()> {
    write_rows(
        out,
        header("delta", traj.particles().saturating_sub(1)),
        traj.samples.iter().map(|s| (s.time, s.spacings.clone())),
    )
}

/// Diagnostics as a JSON object with keys `beta` (one array per recorded
/// sample), `occupation` (N x N times, row = index, column = rank, or null
/// when not tracked), `log_weight` and `seed`.
pub fn diagnostics_json<T: Real>(traj: &Trajectory<T>) -> Value {
    let d = &traj.diagnostics;
    let to_f = |v: &Vec<T>| v.iter().map(|x| x.as_f64()).collect::<Vec<f64>>();
    let occupation = d
        .occupation_matrix()
        .map(|m| m.iter().map(to_f).collect::<Vec<_>>());
    json!({
        "beta": d.beta_path.iter().map(to_f).collect::<Vec<_>>(),
        "occupation": occupation,
        "log_weight": d.log_weight.as_f64(),
        "seed": traj.seed,
    })
}
