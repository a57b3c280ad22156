//! Dispersal kernels and their exponential moments.
//!
//! Every kernel is symmetric, nonnegative, supported on `[-h, h]` and has unit
//! mass. `M(p) = ∫ J(y) e^{py} dy` is evaluated in closed form for the uniform
//! and triangle families and by adaptive Gauss-Legendre quadrature otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::quadrature;

const QUAD_TOL: f64 = 1e-12;
const SERIES_CUTOFF: f64 = 1e-4;
const DERIV_SERIES_CUTOFF: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Uniform,
    Triangle,
    RaisedCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernel")]
pub struct KernelSpec {
    family: KernelFamily,
    half_width: f64,
}

#[derive(Deserialize)]
struct RawKernel {
    family: KernelFamily,
    half_width: f64,
}

impl TryFrom<RawKernel> for KernelSpec {
    type Error = Error;
    fn try_from(raw: RawKernel) -> Result<Self> {
        KernelSpec::new(raw.family, raw.half_width)
    }
}

impl KernelSpec {
    pub fn new(family: KernelFamily, half_width: f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidKernel(format!("half_width must be positive and finite, got {half_width}")));
        }
        Ok(Self { family, half_width })
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        Self::new(KernelFamily::Uniform, half_width)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Kernel density `J(y)`.
    pub fn density(&self, y: f64) -> f64 {
        let h = self.half_width;
        let a = y.abs();
        if a > h {
            return 0.0;
        }
        match self.family {
            KernelFamily::Uniform => 0.5 / h,
            KernelFamily::Triangle => (h - a) / (h * h),
            KernelFamily::RaisedCosine => (1.0 + (std::f64::consts::PI * y / h).cos()) / (2.0 * h),
        }
    }

    /// `M(p)`.
    pub fn mgf(&self, p: f64) -> Result<f64> {
        Ok(self.moments(finite("p", p)?)[0])
    }

    /// `M'(p)`.
    pub fn mgf_d1(&self, p: f64) -> Result<f64> {
        Ok(self.moments(finite("p", p)?)[1])
    }

    /// `M''(p)`.
    pub fn mgf_d2(&self, p: f64) -> Result<f64> {
        Ok(self.moments(finite("p", p)?)[2])
    }

    /// `[M(p), M'(p), M''(p)]` for finite `p`.
    pub fn moments(&self, p: f64) -> [f64; 3] {
        let h = self.half_width;
        match self.family {
            KernelFamily::Uniform => {
                let [f, f1, f2] = sinhc(p * h);
                [f, h * f1, h * h * f2]
            }
            KernelFamily::Triangle => {
                // The triangle kernel is the uniform kernel on [-h/2, h/2] convolved with itself.
                let g = 0.5 * h;
                let [f, f1, f2] = sinhc(p * g);
                [f * f, 2.0 * f * f1 * g, 2.0 * (f1 * f1 + f * f2) * g * g]
            }
            KernelFamily::RaisedCosine => {
                [self.moment_by_quadrature(p, 0), self.moment_by_quadrature(p, 1), self.moment_by_quadrature(p, 2)]
            }
        }
    }

    /// `∫ J(y) y^k e^{py} dy` by adaptive Gauss-Legendre quadrature, split at the origin
    /// where the triangle density has its kink.
    pub fn moment_by_quadrature(&self, p: f64, k: i32) -> f64 {
        let h = self.half_width;
        let f = |y: f64| self.density(y) * y.powi(k) * (p * y).exp();
        quadrature::integrate(f, -h, 0.0, QUAD_TOL) + quadrature::integrate(f, 0.0, h, QUAD_TOL)
    }
}

/// `sinh(x)/x` and its first two derivatives, with series near the origin.
fn sinhc(x: f64) -> [f64; 3] {
    let x2 = x * x;
    let f = if x.abs() < SERIES_CUTOFF { 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0) } else { x.sinh() / x };
    if x.abs() < DERIV_SERIES_CUTOFF {
        let f1 = x * (1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (1.0 / 840.0 + x2 * (1.0 / 45360.0 + x2 / 3991680.0))));
        let f2 = 1.0 / 3.0 + x2 * (1.0 / 10.0 + x2 * (1.0 / 168.0 + x2 * (1.0 / 6480.0 + x2 / 443520.0)));
        [f, f1, f2]
    } else {
        let (s, c) = (x.sinh(), x.cosh());
        let f1 = (x * c - s) / x2;
        let f2 = (x2 * s - 2.0 * x * c + 2.0 * s) / (x2 * x);
        [f, f1, f2]
    }
}
