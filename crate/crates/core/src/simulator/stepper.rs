use rayon::prelude::*;
use serde::Serialize;

use super::grid::{convolve_at, ConvolutionWeights, Grid};
use super::habitat::Habitat;
use crate::classifier::Scenario;
use crate::error::{Error, Result};

const CHUNK: usize = 2048;
/// Slack on the invariant box before a step aborts.
pub const BOX_SLACK: f64 = 1e-9;
/// Largest negative undershoot that is clamped silently.
pub const CLAMP_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct State {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Model {
    xs: Vec<f64>,
    prey_w: ConvolutionWeights,
    pred_w: ConvolutionWeights,
    s: Scenario,
    habitat: Habitat,
}

impl Model {
    fn rhs(&self, t: f64, u: &[f64], v: &[f64], du: &mut [f64], dv: &mut [f64]) {
        let s = &self.s;
        let shift = s.c_e * t;
        du.par_chunks_mut(CHUNK).zip(dv.par_chunks_mut(CHUNK)).enumerate().for_each(|(c, (du, dv))| {
            let base = c * CHUNK;
            for j in 0..du.len() {
                let i = base + j;
                let (ui, vi) = (u[i], v[i]);
                let alpha = self.habitat.value(self.xs[i] - shift);
                du[j] = s.prey.d * (convolve_at(u, &self.prey_w, i) - ui) + s.prey.r * ui * (alpha - ui - s.a * vi);
                dv[j] =
                    s.predator.d * (convolve_at(v, &self.pred_w, i) - vi) + s.predator.r * vi * (-1.0 + s.b * ui - vi);
            }
        });
    }
}

#[derive(Debug, Clone)]
struct Buffers {
    k: [Vec<f64>; 2],
    acc: [Vec<f64>; 2],
    tmp: [Vec<f64>; 2],
}

/// Explicit RK4 for the method-of-lines prey-predator system in the moving habitat.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    model: Model,
    buf: Buffers,
    u_max: f64,
    v_max: f64,
}

impl Stepper {
    pub fn new(s: &Scenario, habitat: Habitat, grid: Grid) -> Self {
        let zeros = || vec![0.0; grid.n];
        let u_max = habitat.max();
        Self {
            grid,
            model: Model {
                xs: grid.points(),
                prey_w: ConvolutionWeights::new(&s.prey.kernel, grid.dx),
                pred_w: ConvolutionWeights::new(&s.predator.kernel, grid.dx),
                s: *s,
                habitat,
            },
            buf: Buffers { k: [zeros(), zeros()], acc: [zeros(), zeros()], tmp: [zeros(), zeros()] },
            u_max,
            v_max: (s.b * u_max - 1.0).max(0.0),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Upper corner of the invariant box `[0, α₋] × [0, V₋]`.
    pub fn bounds(&self) -> (f64, f64) {
        (self.u_max, self.v_max)
    }

    /// Raises the invariant box to cover data above `(α₋, V₋)`.
    pub fn widen_bounds(&mut self, u_max: f64, v_max: f64) {
        self.u_max = self.u_max.max(u_max);
        self.v_max = self.v_max.max(v_max);
    }

    /// Largest row sum of the reaction Jacobian over the invariant box.
    pub fn reaction_lipschitz(&self) -> f64 {
        let s = &self.model.s;
        let (um, vm) = (self.u_max, self.v_max);
        let prey = s.prey.r * (3.0 * um + s.a * vm + s.a * um);
        let pred = s.predator.r * (1.0 + s.b * um + 2.0 * vm + s.b * vm);
        prey.max(pred)
    }

    /// `0.9 / (max d + Lip)`.
    pub fn max_dt(&self) -> f64 {
        let s = &self.model.s;
        0.9 / (s.prey.d.max(s.predator.d) + self.reaction_lipschitz())
    }

    /// Right-hand side `(u_t, v_t)` at time `t`.
    pub fn rhs(&self, t: f64, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut du = vec![0.0; u.len()];
        let mut dv = vec![0.0; v.len()];
        self.model.rhs(t, u, v, &mut du, &mut dv);
        (du, dv)
    }

    /// One RK4 step; returns the largest negative undershoot that was clamped to 0.
    pub fn step(&mut self, state: &mut State, dt: f64) -> Result<f64> {
        let t = state.t;
        let Buffers { k: [ku, kv], acc: [au, av], tmp: [tu, tv] } = &mut self.buf;
        let model = &self.model;
        model.rhs(t, &state.u, &state.v, ku, kv);
        au.copy_from_slice(ku);
        av.copy_from_slice(kv);
        for (h, w) in [(0.5, 2.0), (0.5, 2.0), (1.0, 1.0)] {
            axpy(tu, &state.u, h * dt, ku);
            axpy(tv, &state.v, h * dt, kv);
            model.rhs(t + h * dt, tu, tv, ku, kv);
            accumulate(au, w, ku);
            accumulate(av, w, kv);
        }
        let mut clamp = 0.0f64;
        for (y, a, cap, name) in [(&mut state.u, &*au, self.u_max, "u"), (&mut state.v, &*av, self.v_max, "v")] {
            let (under, top) = y
                .par_iter_mut()
                .zip(a.par_iter())
                .map(|(y, a)| {
                    *y += dt / 6.0 * a;
                    let under = (-*y).max(0.0);
                    if *y < 0.0 {
                        *y = 0.0;
                    }
                    (under, if y.is_finite() { *y } else { f64::INFINITY })
                })
                .reduce(|| (0.0, 0.0), |p, q| (p.0.max(q.0), p.1.max(q.1)));
            if !top.is_finite() {
                return Err(Error::NumericalAbort(format!("non-finite {name} at t={}", t + dt)));
            }
            if top > cap + BOX_SLACK {
                return Err(Error::NumericalAbort(format!(
                    "{name} = {top} exceeds the invariant bound {cap} at t={}",
                    t + dt
                )));
            }
            clamp = clamp.max(under);
        }
        state.t = t + dt;
        Ok(clamp)
    }
}

fn axpy(out: &mut [f64], y: &[f64], h: f64, k: &[f64]) {
    out.par_iter_mut().zip(y.par_iter().zip(k.par_iter())).for_each(|(o, (y, k))| *o = y + h * k);
}

fn accumulate(acc: &mut [f64], w: f64, k: &[f64]) {
    acc.par_iter_mut().zip(k.par_iter()).for_each(|(a, k)| *a += w * k);
}
