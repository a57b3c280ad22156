use serde::Serialize;

use super::grid::Grid;
use crate::classifier::Side;

/// Outermost crossing of `threshold` on the given side, interpolated linearly
/// between the last point at or above it and the next one below. `None` when
/// the field never reaches the threshold or still exceeds it at the edge.
pub fn front_position(field: &[f64], grid: &Grid, side: Side, threshold: f64) -> Option<f64> {
    match side {
        Side::Right => {
            let i = field.iter().rposition(|&f| f >= threshold)?;
            if i + 1 >= field.len() {
                return None;
            }
            let (a, b) = (field[i], field[i + 1]);
            Some(grid.x(i) + grid.dx * (a - threshold) / (a - b))
        }
        Side::Left => {
            let i = field.iter().position(|&f| f >= threshold)?;
            if i == 0 {
                return None;
            }
            let (a, b) = (field[i], field[i - 1]);
            Some(grid.x(i) - grid.dx * (a - threshold) / (a - b))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedEstimate {
    pub speed: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Least-squares slope of `x(t)` over the trailing window `[T/2, T]`; needs at
/// least 20 samples there.
pub fn estimate_speed(trajectory: &[(f64, f64)]) -> Option<SpeedEstimate> {
    let t_end = trajectory.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let window: Vec<(f64, f64)> = trajectory.iter().copied().filter(|p| p.0 >= 0.5 * t_end).collect();
    let n = window.len();
    if n < 20 {
        return None;
    }
    let nf = n as f64;
    let tm = window.iter().map(|p| p.0).sum::<f64>() / nf;
    let xm = window.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = window.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = window.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
    let speed = sxy / sxx;
    let ssr: f64 = window.iter().map(|p| (p.1 - xm - speed * (p.0 - tm)).powi(2)).sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Some(SpeedEstimate { speed, stderr, samples: n })
}
