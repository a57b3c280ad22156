use serde::Serialize;

use super::grid::Grid;
use crate::classifier::{Plateau, Side, TerracePrediction};
use crate::viscosity::PiecewiseProfile;

/// Densities are floored here before taking logarithms.
pub const POSITIVE_FLOOR: f64 = 1e-300;
const FLOOR_RATE: f64 = 690.0;
/// Samples whose predicted `t·ρ(s)` exceeds this fraction of `−ln(floor)` are skipped.
const FLOOR_MARGIN: f64 = 0.8;
const S_STEP: f64 = 0.01;

/// `ln u` at `x`, interpolated linearly in log space.
pub fn log_density_at(field: &[f64], grid: &Grid, x: f64) -> Option<f64> {
    let pos = grid.position(x);
    if pos < 0.0 || pos > (grid.n - 1) as f64 {
        return None;
    }
    let i = (pos.floor() as usize).min(grid.n - 2);
    let w = pos - i as f64;
    let (a, b) = (field[i].max(POSITIVE_FLOOR).ln(), field[i + 1].max(POSITIVE_FLOOR).ln());
    Some((1.0 - w) * a + w * b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopfColeReport {
    pub t: f64,
    pub samples: usize,
    pub skipped_floor: usize,
    pub sup_gap: Option<f64>,
    pub worst_s: Option<f64>,
}

/// `sup |−ln u(st, t)/t − ρ(s)|` over `{ρ(s) > 0.1}` within 2 of the zero front.
pub fn hopf_cole_diagnostic(field: &[f64], grid: &Grid, t: f64, profile: &PiecewiseProfile) -> HopfColeReport {
    let zf = profile.zero_front;
    let (lo, hi) = match profile.side {
        Side::Right => (zf, zf + 2.0),
        Side::Left => (zf - 2.0, zf),
    };
    let n = ((hi - lo) / S_STEP).round() as usize;
    let mut rep = HopfColeReport { t, samples: 0, skipped_floor: 0, sup_gap: None, worst_s: None };
    for i in 0..=n {
        let s = lo + (hi - lo) * i as f64 / n as f64;
        let Some(rho) = profile.value(s) else { continue };
        if rho <= 0.1 {
            continue;
        }
        if t * rho > FLOOR_MARGIN * FLOOR_RATE {
            rep.skipped_floor += 1;
            continue;
        }
        let Some(lu) = log_density_at(field, grid, s * t) else { continue };
        let gap = (-lu / t - rho).abs();
        rep.samples += 1;
        if rep.sup_gap.is_none_or(|g| gap > g) {
            rep.sup_gap = Some(gap);
            rep.worst_s = Some(s);
        }
    }
    rep
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauDeviation {
    pub plateau: Plateau,
    pub x_lo: f64,
    pub x_hi: f64,
    pub deviation: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TerraceReport {
    pub t: f64,
    pub intervals: Vec<PlateauDeviation>,
    pub max_deviation: Option<f64>,
}

/// Per predicted plateau, `sup |u − plateau|` over `x/t` in the interval shrunk
/// by 5% of its length at each end.
pub fn terrace_check(field: &[f64], grid: &Grid, t: f64, prediction: &TerracePrediction) -> TerraceReport {
    let intervals: Vec<PlateauDeviation> = prediction
        .plateaus
        .iter()
        .map(|p| {
            let eta = 0.05 * (p.hi - p.lo);
            let (x_lo, x_hi) = ((p.lo + eta) * t, (p.hi - eta) * t);
            let dev = (0..grid.n)
                .filter(|&i| (x_lo..=x_hi).contains(&grid.x(i)))
                .map(|i| (field[i] - p.value).abs())
                .reduce(f64::max);
            let note = dev.is_none().then(|| "shrunk interval holds no grid points".to_string());
            PlateauDeviation { plateau: *p, x_lo, x_hi, deviation: dev, note }
        })
        .collect();
    let max_deviation = intervals.iter().filter_map(|d| d.deviation).reduce(f64::max);
    TerraceReport { t, intervals, max_deviation }
}
