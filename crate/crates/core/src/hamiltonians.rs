//! Hamiltonians `H(p) = d(M(p) - 1) + r·level`, their Legendre conjugates and the
//! speed curves `c(μ) = H(μ)/μ`.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{domain, finite, Error, Result};
use crate::kernels::KernelSpec;
use crate::solve;

/// Exponential decay rate of initial data: finite `λ > 0`, or compactly supported data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    Finite(f64),
    Infinite,
}

impl Decay {
    pub fn finite(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(Decay::Finite(lambda))
        } else {
            Err(domain(format!("decay rate must be positive, got {lambda}")))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Decay::Infinite)
    }

    /// `min(λ, cap)`, treating the sentinel as `+∞`.
    pub fn min_with(&self, cap: f64) -> f64 {
        match self {
            Decay::Finite(l) => l.min(cap),
            Decay::Infinite => cap,
        }
    }
}

impl fmt::Display for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decay::Finite(l) => write!(f, "{l}"),
            Decay::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Decay {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Decay::Finite(l) => s.serialize_f64(*l),
            Decay::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Decay {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Decay;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Decay, E> {
                Decay::finite(v).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Decay, E> {
                self.visit_f64(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Decay, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Decay, E> {
                match v {
                    "inf" | "infinity" => Ok(Decay::Infinite),
                    _ => Err(E::custom(format!("expected a number or \"inf\", got {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Minimal speed `c* = min c(μ)` and its minimiser `μ*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinSpeed {
    pub mu_star: f64,
    pub c_star: f64,
}

/// One species at one habitat level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianEnv {
    pub d: f64,
    pub r: f64,
    pub level: f64,
    pub kernel: KernelSpec,
}

impl HamiltonianEnv {
    pub fn new(d: f64, r: f64, level: f64, kernel: KernelSpec) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(domain(format!("dispersal rate must be positive, got {d}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(domain(format!("growth rate must be positive, got {r}")));
        }
        finite("level", level)?;
        Ok(Self { d, r, level, kernel })
    }

    /// The same species at another habitat level.
    pub fn with_level(&self, level: f64) -> Self {
        Self { level, ..*self }
    }

    /// `d(M(p) - 1)`, the level-free part.
    pub fn base_h(&self, p: f64) -> f64 {
        self.d * (self.kernel.moments(p)[0] - 1.0)
    }

    pub fn h(&self, p: f64) -> f64 {
        self.base_h(p) + self.r * self.level
    }

    pub fn dh(&self, p: f64) -> f64 {
        self.d * self.kernel.moments(p)[1]
    }

    pub fn d2h(&self, p: f64) -> f64 {
        self.d * self.kernel.moments(p)[2]
    }

    /// `(H(p), H'(p))` with a single kernel evaluation.
    pub fn h_dh(&self, p: f64) -> (f64, f64) {
        let m = self.kernel.moments(p);
        (self.d * (m[0] - 1.0) + self.r * self.level, self.d * m[1])
    }

    /// `c(μ) = H(μ)/μ`.
    pub fn speed_curve(&self, mu: f64) -> Result<f64> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(domain(format!("speed curve needs μ > 0, got {mu}")));
        }
        Ok(self.h(mu) / mu)
    }

    /// Solves `μH'(μ) = H(μ)`; the left side minus the right is increasing with value
    /// `-r·level` at zero.
    pub fn min_speed(&self) -> Result<MinSpeed> {
        if !(self.level > 0.0) {
            return Err(Error::UnsupportedRegime(format!("minimal speed needs a positive level, got {}", self.level)));
        }
        let tangency = |mu: f64| {
            let m = self.kernel.moments(mu);
            let h = self.d * (m[0] - 1.0) + self.r * self.level;
            (mu * self.d * m[1] - h, mu * self.d * m[2])
        };
        let hi = solve::grow_bracket(|mu| tangency(mu).0, 1e-6, 1.0)?;
        let mu_star = solve::newton_bracket(tangency, 1e-6, hi)?;
        Ok(MinSpeed { mu_star, c_star: self.h(mu_star) / mu_star })
    }

    /// `L'(q)`: the unique `p` with `H'(p) = q`.
    pub fn lagrangian_slope(&self, q: f64) -> Result<f64> {
        finite("q", q)?;
        if q == 0.0 {
            return Ok(0.0);
        }
        let sign = q.signum();
        let target = q.abs();
        let f = |p: f64| (self.dh(p) - target, self.d2h(p));
        let hi = solve::grow_bracket(|p| f(p).0, 0.0, 1.0)?;
        Ok(sign * solve::newton_bracket(f, 0.0, hi)?)
    }

    /// `L(q) = q·L'(q) - H(L'(q))`.
    pub fn lagrangian(&self, q: f64) -> Result<f64> {
        let p = self.lagrangian_slope(q)?;
        Ok(q * p - self.h(p))
    }

    /// `s = c(min(λ, μ*))`, or `c*` for compactly supported data.
    pub fn directional_speed(&self, decay: Decay) -> Result<f64> {
        if let Decay::Finite(l) = decay {
            if !(l > 0.0) {
                return Err(domain(format!("decay rate must be positive, got {l}")));
            }
        }
        let ms = self.min_speed()?;
        match decay {
            Decay::Finite(l) if l < ms.mu_star => self.speed_curve(l),
            _ => Ok(ms.c_star),
        }
    }
}
