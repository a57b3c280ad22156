use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::hamiltonians::Decay;

/// Initial density: `amplitude` on `[−radius, radius]`, then per side either the
/// tail `amplitude·e^{−λ(|x| − radius)}` or a `cos²` taper to zero over `taper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialData {
    pub amplitude: f64,
    pub radius: f64,
    pub taper: f64,
    pub right: Decay,
    pub left: Decay,
}

impl InitialData {
    pub fn value(&self, x: f64) -> f64 {
        let tail = if x >= 0.0 { self.right } else { self.left };
        let a = x.abs() - self.radius;
        if a <= 0.0 {
            return self.amplitude;
        }
        match tail {
            Decay::Finite(l) => self.amplitude * (-l * a).exp(),
            Decay::Infinite if a < self.taper => self.amplitude * (FRAC_PI_2 * a / self.taper).cos().powi(2),
            Decay::Infinite => 0.0,
        }
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.value(x)).collect()
    }
}
