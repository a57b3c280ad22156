//! Auxiliary roots of the speed formulas: `μ₀`, `p̌`, `p̂`, `p*`, `p̄`, `p̲`, `c̄`
//! and the curves `k(μ)`, `g(μ)`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{domain, finite, Error, Result};
use crate::hamiltonians::{HamiltonianEnv, MinSpeed};
use crate::kernels::KernelSpec;
use crate::solve;

/// Width of the band around region boundaries treated as "on the curve".
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Tolerance under which a concave function touching zero at its maximum is
/// treated as a double root.
const TOUCH_TOL: f64 = 1e-12;

/// One species at the two habitat limits: `minus` is the better (behind) level.
#[derive(Debug, Clone, Serialize)]
pub struct SpeciesPair {
    minus: HamiltonianEnv,
    plus: HamiltonianEnv,
    star_minus: MinSpeed,
    star_plus: MinSpeed,
    #[serde(skip)]
    mu0: OnceLock<f64>,
    #[serde(skip)]
    c_bar: OnceLock<std::result::Result<f64, Error>>,
}

impl SpeciesPair {
    pub fn new(d: f64, r: f64, kernel: KernelSpec, level_minus: f64, level_plus: f64) -> Result<Self> {
        if !(level_minus > level_plus && level_plus > 0.0) {
            return Err(Error::UnsupportedRegime(format!(
                "levels must satisfy minus > plus > 0, got {level_minus} and {level_plus}"
            )));
        }
        Self::build(HamiltonianEnv::new(d, r, level_minus, kernel)?, level_plus)
    }

    /// Allows `level_minus == level_plus`; only for exercising the degenerate limit.
    #[doc(hidden)]
    pub fn new_degenerate(env: HamiltonianEnv) -> Result<Self> {
        Self::build(env, env.level)
    }

    fn build(minus: HamiltonianEnv, level_plus: f64) -> Result<Self> {
        let plus = minus.with_level(level_plus);
        Ok(Self {
            star_minus: minus.min_speed()?,
            star_plus: plus.min_speed()?,
            minus,
            plus,
            mu0: OnceLock::new(),
            c_bar: OnceLock::new(),
        })
    }

    pub fn minus(&self) -> &HamiltonianEnv {
        &self.minus
    }

    pub fn plus(&self) -> &HamiltonianEnv {
        &self.plus
    }

    pub fn star_minus(&self) -> MinSpeed {
        self.star_minus
    }

    pub fn star_plus(&self) -> MinSpeed {
        self.star_plus
    }

    /// `L'(q)`; the slope does not depend on the level.
    pub fn lagrangian_slope(&self, q: f64) -> Result<f64> {
        self.minus.lagrangian_slope(q)
    }

    /// Smallest `μ > 0` with `c₊(μ) = c*₋`.
    pub fn mu0(&self) -> Result<f64> {
        if let Some(v) = self.mu0.get() {
            return Ok(*v);
        }
        let c = self.star_minus.c_star;
        let f = |mu: f64| {
            let (h, dh) = self.plus.h_dh(mu);
            (h - c * mu, dh - c)
        };
        let v = solve::newton_bracket(f, 0.0, self.star_plus.mu_star)?;
        Ok(*self.mu0.get_or_init(|| v))
    }

    /// The roots `p̌ < L'(c_e) < p̂` of `c_e·p − H₊(p) = L₋(c_e)`, for `c_e ≥ c*₋`.
    pub fn check_hat_p(&self, c_e: f64) -> Result<(f64, f64)> {
        finite("c_e", c_e)?;
        if c_e < self.star_minus.c_star - BOUNDARY_BAND {
            return Err(domain(format!("two roots exist only for c_e ≥ c*₋ = {}, got {c_e}", self.star_minus.c_star)));
        }
        let q = self.lagrangian_slope(c_e)?;
        let lm = c_e * q - self.minus.h(q);
        let f = |p: f64| {
            let (h, dh) = self.plus.h_dh(p);
            (c_e * p - h - lm, c_e - dh)
        };
        let top = f(q).0;
        if top <= TOUCH_TOL * lm.abs().max(1.0) {
            return Ok((q, q));
        }
        let check = solve::smallest_root(f, 0.0, q)
            .ok_or_else(|| Error::NoConvergence(format!("no root of the p̌ equation below {q}")))?;
        let hi = solve::grow_bracket(|p| f(p).0, q, q + 1.0)?;
        let hat = solve::newton_bracket(f, q, hi)?;
        Ok((check, hat))
    }

    /// Smallest root in `(λ, L'(c_e)]` of `c_e·p − H₋(p) = c_e·λ − H₊(λ)`; `None` when the
    /// equation has no root there.
    pub fn p_star(&self, c_e: f64, lambda: f64) -> Option<f64> {
        if !(c_e.is_finite() && lambda.is_finite() && lambda > 0.0) {
            return None;
        }
        let q = self.lagrangian_slope(c_e).ok()?;
        if lambda > q {
            return None;
        }
        let rhs = c_e * lambda - self.plus.h(lambda);
        let g = |p: f64| {
            let (h, dh) = self.minus.h_dh(p);
            (c_e * p - h - rhs, c_e - dh)
        };
        let top = g(q).0;
        let tol = TOUCH_TOL * rhs.abs().max(1.0);
        if top < -tol {
            return None;
        }
        if top <= tol {
            // λ = p̌: the root sits exactly at the maximum.
            return Some(q);
        }
        solve::smallest_root(g, lambda, q)
    }

    /// `p̄(c̃)`: smallest root in `(0, L'(c̃))` of `c̃·p − H₊(p) = L₋(c̃)`.
    pub fn p_bar(&self, ce_tilde: f64) -> Result<f64> {
        Ok(self.check_hat_p(ce_tilde)?.0)
    }

    /// Unique `c̄ > c*₋` with `p̄(c̄) = μ*₊`.
    pub fn c_bar(&self) -> Result<f64> {
        self.c_bar.get_or_init(|| self.solve_c_bar()).clone()
    }

    fn solve_c_bar(&self) -> Result<f64> {
        let target = self.star_plus.mu_star;
        let f = |c: f64| -> (f64, f64) {
            match self.p_bar(c) {
                Ok(p) => {
                    let q = self.lagrangian_slope(c).unwrap_or(f64::NAN);
                    // implicit derivative of p̄ from the defining equation
                    let slope = (q - p) / (c - self.plus.dh(p));
                    (p - target, slope)
                }
                Err(_) => (f64::NAN, f64::NAN),
            }
        };
        let lo = self.star_minus.c_star + 1e-8;
        if f(lo).0 >= 0.0 {
            return Err(Error::UnsupportedRegime("p̄ does not start below μ*₊; levels are not separated".into()));
        }
        let hi = solve::grow_bracket(|c| f(c).0, lo, lo + 0.5)?;
        solve::newton_bracket(f, lo, hi)
    }

    /// `L'(c̄)`, the right end of the domain of `g`.
    pub fn lagrangian_slope_c_bar(&self) -> Result<f64> {
        self.lagrangian_slope(self.c_bar()?)
    }

    /// Whether `(c̃, λ)` lies in the set where `p̲` is defined.
    pub fn in_under_set(&self, ce_tilde: f64, lambda: f64) -> Result<bool> {
        let mu = self.star_minus.mu_star;
        let threshold = if lambda <= mu { self.minus.speed_curve(lambda)? } else { self.minus.dh(lambda) };
        Ok(ce_tilde >= threshold - BOUNDARY_BAND)
    }

    /// `p̲(c̃, λ)`: smallest root in `(0, min(λ, L'(c̃)))` of `c̃·p − H₊(p) = c̃·λ − H₋(λ)`.
    pub fn p_under(&self, ce_tilde: f64, lambda: f64) -> Result<f64> {
        finite("c̃", ce_tilde)?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(domain(format!("λ must be positive and finite, got {lambda}")));
        }
        if !self.in_under_set(ce_tilde, lambda)? {
            return Err(domain(format!("(c̃, λ) = ({ce_tilde}, {lambda}) is outside the p̲ domain")));
        }
        let hi = lambda.min(self.lagrangian_slope(ce_tilde)?);
        let rhs = ce_tilde * lambda - self.minus.h(lambda);
        let g = |p: f64| {
            let (h, dh) = self.plus.h_dh(p);
            (ce_tilde * p - h - rhs, ce_tilde - dh)
        };
        solve::smallest_root(g, 0.0, hi)
            .ok_or_else(|| Error::NoConvergence(format!("no root of the p̲ equation below {hi}")))
    }

    /// `k(μ) = (H₋(μ*₋) − H₊(μ)) / (μ*₋ − μ)` on `(0, μ*₋)`.
    pub fn k_curve(&self, mu: f64) -> Result<f64> {
        let ms = self.star_minus.mu_star;
        if !(mu > 0.0 && mu < ms) {
            return Err(domain(format!("k needs μ in (0, {ms}), got {mu}")));
        }
        Ok((self.minus.h(ms) - self.plus.h(mu)) / (ms - mu))
    }

    /// `g(μ) = (H₋(μ) − H₊(μ*₊)) / (μ − μ*₊)` on `(μ*₊, L'(c̄)]`.
    pub fn g_curve(&self, mu: f64) -> Result<f64> {
        let mp = self.star_plus.mu_star;
        let end = self.lagrangian_slope_c_bar()?;
        if !(mu > mp && mu <= end + BOUNDARY_BAND) {
            return Err(domain(format!("g needs μ in ({mp}, {end}], got {mu}")));
        }
        Ok((self.minus.h(mu) - self.plus.h(mp)) / (mu - mp))
    }
}
