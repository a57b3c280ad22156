use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature;

/// Uniform grid symmetric about the origin: `x_i = (i − m)·dx`, `n = 2m + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub n: usize,
    pub dx: f64,
    pub half_length: f64,
}

impl Grid {
    /// Smallest symmetric grid with spacing exactly `dx` that covers `[−L, L]`.
    pub fn symmetric(half_length: f64, dx: f64) -> Result<Self> {
        if !(half_length > 0.0 && half_length.is_finite() && dx > 0.0 && dx.is_finite()) {
            return Err(Error::Config(format!("bad grid: half_length={half_length}, dx={dx}")));
        }
        let m = (half_length / dx * (1.0 - 1e-12)).ceil() as usize;
        Ok(Self { n: 2 * m + 1, dx, half_length: m as f64 * dx })
    }

    fn mid(&self) -> f64 {
        ((self.n - 1) / 2) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.mid()) * self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x(0)
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Fractional index of `x`.
    pub fn position(&self, x: f64) -> f64 {
        x / self.dx + self.mid()
    }
}

/// Product-trapezoid weights `w_k = ∫ J(y) φ_k(y) dy`, with `φ_k` the hat function
/// at `k·dx`: the exact integral of `J` against the piecewise-linear interpolant
/// of the field. On a grid that puts nodes at `±h` this is the trapezoid rule for
/// the uniform kernel; off such grids it stays second order. Renormalised to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvolutionWeights {
    pub reach: usize,
    pub weights: Vec<f64>,
}

impl ConvolutionWeights {
    pub fn new(kernel: &KernelSpec, dx: f64) -> Self {
        let h = kernel.half_width();
        let reach = (h / dx * (1.0 - 1e-12)).ceil() as usize;
        let piece = |a: f64, b: f64, hat: &dyn Fn(f64) -> f64| -> f64 {
            let (a, b) = (a.max(-h), b.min(h));
            if b <= a {
                return 0.0;
            }
            // Split at the origin, where the triangle kernel has its kink.
            let f = |y: f64| kernel.density(y) * hat(y);
            if a < 0.0 && b > 0.0 {
                quadrature::integrate(f, a, 0.0, 1e-14) + quadrature::integrate(f, 0.0, b, 1e-14)
            } else {
                quadrature::integrate(f, a, b, 1e-14)
            }
        };
        let mut weights: Vec<f64> = (0..=2 * reach)
            .map(|j| {
                let c = (j as f64 - reach as f64) * dx;
                let up = |y: f64| (y - (c - dx)) / dx;
                let down = |y: f64| ((c + dx) - y) / dx;
                piece(c - dx, c, &up) + piece(c, c + dx, &down)
            })
            .collect();
        let mirror: Vec<f64> = weights.iter().rev().copied().collect();
        weights.iter_mut().zip(mirror).for_each(|(w, m)| *w = 0.5 * (*w + m));
        let mass: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= mass);
        Self { reach, weights }
    }
}

/// `d·(J∗f − f)` with the trapezoid weights; values beyond the grid repeat the
/// nearest edge value.
pub fn nonlocal_op(field: &[f64], weights: &ConvolutionWeights, d: f64) -> Vec<f64> {
    let mut out = vec![0.0; field.len()];
    for (i, o) in out.iter_mut().enumerate() {
        *o = d * (convolve_at(field, weights, i) - field[i]);
    }
    out
}

#[inline]
pub(crate) fn convolve_at(field: &[f64], w: &ConvolutionWeights, i: usize) -> f64 {
    let n = field.len();
    let k = w.reach;
    if i >= k && i + k < n {
        field[i - k..=i + k].iter().zip(&w.weights).map(|(f, w)| f * w).sum()
    } else {
        w.weights
            .iter()
            .enumerate()
            .map(|(j, wj)| {
                let idx = (i as isize + j as isize - k as isize).clamp(0, n as isize - 1) as usize;
                wj * field[idx]
            })
            .sum()
    }
}
