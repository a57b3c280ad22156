//! Piecewise viscosity profiles `ρ(s)` and their numerical certification.
//!
//! A profile is built from three kinds of pieces: affine lines `μs − H_±(μ)`,
//! Lagrangian arcs `L_±(s)` and zero. Right profiles live on `[0, ∞)` and left
//! profiles on `(−∞, 0]`; `{ρ = 0}` is the interval between the origin and the
//! zero front, whose position is the spreading speed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{Region, Scenario, Side, Species, SpeedGeometry};
use crate::error::{domain, Error, Result};
use crate::hamiltonians::{Decay, HamiltonianEnv};
use crate::solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceKind {
    /// `slope·s − H_level(slope)`.
    Affine {
        slope: f64,
        level: Level,
    },
    /// `L_level(s)`.
    Arc {
        level: Level,
    },
    Zero,
}

/// One piece on the closed interval `[start, end]`; infinite ends serialise as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    #[serde(flatten)]
    pub kind: PieceKind,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PiecewiseProfile {
    pub side: Side,
    pub construction: String,
    pub pieces: Vec<Piece>,
    pub zero_front: f64,
    minus: HamiltonianEnv,
    plus: HamiltonianEnv,
}

impl PiecewiseProfile {
    fn env(&self, level: Level) -> &HamiltonianEnv {
        match level {
            Level::Minus => &self.minus,
            Level::Plus => &self.plus,
        }
    }

    /// The level-free Hamiltonian `d(M(p) − 1)` entering the profile equation.
    pub fn base_h(&self, p: f64) -> f64 {
        self.minus.base_h(p)
    }

    fn eval(&self, piece: &Piece, s: f64) -> (f64, f64) {
        match piece.kind {
            PieceKind::Zero => (0.0, 0.0),
            PieceKind::Affine { slope, level } => (slope * s - self.env(level).h(slope), slope),
            PieceKind::Arc { level } => {
                let env = self.env(level);
                let p = env.lagrangian_slope(s).unwrap_or(f64::NAN);
                (s * p - env.h(p), p)
            }
        }
    }

    fn piece_at(&self, s: f64) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.start <= s && s <= p.end)
    }

    /// `ρ(s)`, or `None` outside the profile's half-line.
    pub fn value(&self, s: f64) -> Option<f64> {
        self.piece_at(s).map(|p| self.eval(p, s).0)
    }

    /// `ρ'(s)` inside a piece.
    pub fn slope(&self, s: f64) -> Option<f64> {
        self.piece_at(s).map(|p| self.eval(p, s).1)
    }

    /// One-sided derivatives `(ρ'(s⁻), ρ'(s⁺))`.
    pub fn one_sided_slopes(&self, s: f64) -> (Option<f64>, Option<f64>) {
        let left = self.pieces.iter().find(|p| p.start < s && s <= p.end).map(|p| self.eval(p, s).1);
        let right = self.pieces.iter().find(|p| p.start <= s && s < p.end).map(|p| self.eval(p, s).1);
        (left, right)
    }

    /// Interior junctions between consecutive pieces.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.windows(2).map(|w| w[0].end).collect()
    }

    /// Samples `(s, ρ(s))` on `n` evenly spaced points of `[lo, hi]`.
    pub fn sample(&self, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .filter_map(|i| {
                let s = lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
                self.value(s).map(|v| (s, v))
            })
            .collect()
    }
}

struct Builder {
    side: Side,
    pieces: Vec<Piece>,
}

impl Builder {
    fn new(side: Side) -> Self {
        Self { side, pieces: Vec::new() }
    }

    fn push(mut self, kind: PieceKind, start: f64, end: f64) -> Self {
        if end > start || (start.is_infinite() && end.is_infinite()) {
            self.pieces.push(Piece { kind, start, end });
        }
        self
    }

    fn finish(self, construction: &str, geom: &SpeedGeometry) -> Result<PiecewiseProfile> {
        let pieces = self.pieces;
        let zero_front = match self.side {
            Side::Right => match pieces.first() {
                Some(Piece { kind: PieceKind::Zero, start, end }) if *start == 0.0 => *end,
                _ => return Err(domain(format!("{construction}: profile must start with a zero piece"))),
            },
            Side::Left => match pieces.last() {
                Some(Piece { kind: PieceKind::Zero, start, end }) if *end == 0.0 => *start,
                _ => return Err(domain(format!("{construction}: profile must end with a zero piece"))),
            },
        };
        Ok(PiecewiseProfile {
            side: self.side,
            construction: construction.to_string(),
            pieces,
            zero_front,
            minus: *geom.pair().minus(),
            plus: *geom.pair().plus(),
        })
    }
}

/// Larger root `ν > μ*₊` of `c₊(ν) = c`.
fn nu_two(geom: &SpeedGeometry, c: f64) -> Result<f64> {
    let plus = geom.pair().plus();
    let mp = geom.pair().star_plus().mu_star;
    let f = |nu: f64| {
        let (h, dh) = plus.h_dh(nu);
        (h - c * nu, dh - c)
    };
    let hi = solve::grow_bracket(|nu| f(nu).0, mp, mp + 1.0)?;
    solve::newton_bracket(f, mp, hi)
}

/// `H'(p)`, saturated to `+∞` once it leaves the floating-point range. A tail
/// tangency at infinity leaves the affine tail as an empty piece at `±∞`.
fn tangent(env: &HamiltonianEnv, p: f64) -> f64 {
    let t = env.dh(p);
    if t.is_finite() {
        t
    } else {
        f64::INFINITY
    }
}

/// Crossing point of the lines `a·s − H₊(a)` and `b·s − H₊(b)`.
fn crossing(env: &HamiltonianEnv, a: f64, b: f64) -> f64 {
    (env.h(a) - env.h(b)) / (a - b)
}

/// Profile for one species and side; boundary-band queries use the branch their
/// curve is assigned to.
pub fn build_side_profile(geom: &SpeedGeometry, side: Side, decay: Decay, c_e: f64) -> Result<PiecewiseProfile> {
    match side {
        Side::Right => build_right(geom, decay, c_e),
        Side::Left => build_left(geom, decay, c_e),
    }
}

/// Prey profile for a scenario.
pub fn build_profile(s: &Scenario, side: Side) -> Result<PiecewiseProfile> {
    let geom = s.geometry(Species::Prey)?;
    build_side_profile(&geom, side, s.prey.decay(side), s.c_e)
}

fn build_right(geom: &SpeedGeometry, decay: Decay, c_e: f64) -> Result<PiecewiseProfile> {
    use PieceKind::*;
    let pair = geom.pair();
    let (plus, minus) = (pair.plus(), pair.minus());
    let (mp, cp) = (pair.star_plus().mu_star, pair.star_plus().c_star);
    let cm = pair.star_minus().c_star;
    let inf = f64::INFINITY;
    let aff = |slope, level| Affine { slope, level };
    let b = Builder::new(Side::Right);
    let region = geom.classify_right(decay, c_e)?.branch();
    match (region, decay) {
        (Region::Va, Decay::Finite(l)) if l < mp => {
            let s = plus.h(l) / l;
            b.push(Zero, 0.0, s).push(aff(l, Level::Plus), s, inf).finish("right-Aa", geom)
        }
        (Region::Va, Decay::Finite(l)) => {
            let hl = tangent(plus, l);
            b.push(Zero, 0.0, cp)
                .push(Arc { level: Level::Plus }, cp, hl)
                .push(aff(l, Level::Plus), hl, inf)
                .finish("right-Ab", geom)
        }
        (Region::Va, Decay::Infinite) => {
            b.push(Zero, 0.0, cp).push(Arc { level: Level::Plus }, cp, inf).finish("right-compact (c_e <= c*_+)", geom)
        }
        (Region::Vb, _) => {
            let nu = nu_two(geom, c_e)?;
            let hn = tangent(plus, nu);
            let b = b.push(Zero, 0.0, c_e);
            match decay {
                Decay::Finite(l) if l < nu => {
                    let sh = crossing(plus, l, nu);
                    b.push(aff(nu, Level::Plus), c_e, sh).push(aff(l, Level::Plus), sh, inf).finish("right-Ba", geom)
                }
                Decay::Finite(l) => {
                    let hl = tangent(plus, l);
                    b.push(aff(nu, Level::Plus), c_e, hn)
                        .push(Arc { level: Level::Plus }, hn, hl)
                        .push(aff(l, Level::Plus), hl, inf)
                        .finish("right-Bb", geom)
                }
                Decay::Infinite => b
                    .push(aff(nu, Level::Plus), c_e, hn)
                    .push(Arc { level: Level::Plus }, hn, inf)
                    .finish("right-compact (c*_+ < c_e < c*_-)", geom),
            }
        }
        (Region::Vc, _) => {
            let (check, hat) = pair.check_hat_p(c_e)?;
            let b = b.push(Zero, 0.0, cm);
            match decay {
                Decay::Finite(l) if l <= check => {
                    let p = pair
                        .p_star(c_e, l)
                        .ok_or_else(|| Error::NoConvergence(format!("p* undefined at c_e={c_e}, lambda={l}")))?;
                    let hp = tangent(minus, p);
                    b.push(Arc { level: Level::Minus }, cm, hp)
                        .push(aff(p, Level::Minus), hp, c_e)
                        .push(aff(l, Level::Plus), c_e, inf)
                        .finish("right-Da", geom)
                }
                Decay::Finite(l) if l < hat => {
                    let sh = crossing(plus, l, hat);
                    b.push(Arc { level: Level::Minus }, cm, c_e)
                        .push(aff(hat, Level::Plus), c_e, sh)
                        .push(aff(l, Level::Plus), sh, inf)
                        .finish("right-Db", geom)
                }
                Decay::Finite(l) => {
                    let (hh, hl) = (tangent(plus, hat), tangent(plus, l));
                    b.push(Arc { level: Level::Minus }, cm, c_e)
                        .push(aff(hat, Level::Plus), c_e, hh)
                        .push(Arc { level: Level::Plus }, hh, hl)
                        .push(aff(l, Level::Plus), hl, inf)
                        .finish("right-Dc", geom)
                }
                Decay::Infinite => {
                    let hh = tangent(plus, hat);
                    b.push(Arc { level: Level::Minus }, cm, c_e)
                        .push(aff(hat, Level::Plus), c_e, hh)
                        .push(Arc { level: Level::Plus }, hh, inf)
                        .finish("right-compact (c_e >= c*_-)", geom)
                }
            }
        }
        (Region::Vd, Decay::Finite(l)) => {
            let p = pair
                .p_star(c_e, l)
                .ok_or_else(|| Error::NoConvergence(format!("p* undefined at c_e={c_e}, lambda={l}")))?;
            let front = minus.h(p) / p;
            b.push(Zero, 0.0, front)
                .push(aff(p, Level::Minus), front, c_e)
                .push(aff(l, Level::Plus), c_e, inf)
                .finish("right-C0", geom)
        }
        (r, d) => Err(domain(format!("no right profile for {r:?} with decay {d}"))),
    }
}

fn build_left(geom: &SpeedGeometry, decay: Decay, c_e: f64) -> Result<PiecewiseProfile> {
    use PieceKind::*;
    let pair = geom.pair();
    let (plus, minus) = (pair.plus(), pair.minus());
    let cp = pair.star_plus().c_star;
    let (mm, cm) = (pair.star_minus().mu_star, pair.star_minus().c_star);
    let ninf = f64::NEG_INFINITY;
    let aff = |slope, level| Affine { slope, level };
    let ct = -c_e;
    let b = Builder::new(Side::Left);
    let region = geom.classify_left(decay, c_e)?.branch();
    // Tail of every Vb/Vd construction: the p̄ line from c_e, then either straight
    // to its zero or via the L₊ arc to −c*₊.
    let p_bar_tail = |b: Builder, through_arc: bool| -> Result<Builder> {
        let pb = pair.p_bar(ct)?;
        Ok(if through_arc {
            let hb = tangent(plus, pb);
            b.push(aff(-pb, Level::Plus), c_e, -hb).push(Arc { level: Level::Plus }, -hb, -cp).push(Zero, -cp, 0.0)
        } else {
            let z = -plus.h(pb) / pb;
            b.push(aff(-pb, Level::Plus), c_e, z).push(Zero, z, 0.0)
        })
    };
    match (region, decay) {
        (Region::Va, Decay::Finite(l)) if l < mm => {
            let z = -minus.h(l) / l;
            b.push(aff(-l, Level::Minus), ninf, z).push(Zero, z, 0.0).finish("left-Ba", geom)
        }
        (Region::Va, Decay::Finite(l)) => {
            let hl = tangent(minus, l);
            b.push(aff(-l, Level::Minus), ninf, -hl)
                .push(Arc { level: Level::Minus }, -hl, -cm)
                .push(Zero, -cm, 0.0)
                .finish("left-Bb", geom)
        }
        (Region::Va, Decay::Infinite) => b
            .push(Arc { level: Level::Minus }, ninf, -cm)
            .push(Zero, -cm, 0.0)
            .finish("left-compact (c_e >= -c*_-)", geom),
        (Region::Vc, Decay::Finite(l)) => {
            let p = pair.p_under(ct, l)?;
            let z = -plus.h(p) / p;
            b.push(aff(-l, Level::Minus), ninf, c_e)
                .push(aff(-p, Level::Plus), c_e, z)
                .push(Zero, z, 0.0)
                .finish("left-C0", geom)
        }
        (Region::Vb, Decay::Finite(l)) => {
            let hl = tangent(minus, l);
            let b = b.push(aff(-l, Level::Minus), ninf, -hl).push(Arc { level: Level::Minus }, -hl, c_e);
            p_bar_tail(b, false)?.finish("left-D0", geom)
        }
        (Region::Vb, Decay::Infinite) => {
            let b = b.push(Arc { level: Level::Minus }, ninf, c_e);
            p_bar_tail(b, false)?.finish("left-compact (-c_bar < c_e < -c*_-)", geom)
        }
        (Region::Vd, Decay::Finite(l)) => {
            let hl = tangent(minus, l);
            if l <= geom.lc_bar() || c_e < -hl {
                let p = pair.p_under(ct, l)?;
                let hp = tangent(plus, p);
                b.push(aff(-l, Level::Minus), ninf, c_e)
                    .push(aff(-p, Level::Plus), c_e, -hp)
                    .push(Arc { level: Level::Plus }, -hp, -cp)
                    .push(Zero, -cp, 0.0)
                    .finish("left-Aa", geom)
            } else {
                let b = b.push(aff(-l, Level::Minus), ninf, -hl).push(Arc { level: Level::Minus }, -hl, c_e);
                p_bar_tail(b, true)?.finish("left-Ab", geom)
            }
        }
        (Region::Vd, Decay::Infinite) => {
            let b = b.push(Arc { level: Level::Minus }, ninf, c_e);
            p_bar_tail(b, true)?.finish("left-compact (c_e <= -c_bar)", geom)
        }
        (r, d) => Err(domain(format!("no left profile for {r:?} with decay {d}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub max_value_gap: f64,
    pub max_tangency_slope_gap: f64,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.max_value_gap <= 1e-10 && self.max_tangency_slope_gap <= 1e-8
    }
}

/// Value gaps at every junction, and slope gaps where an affine piece meets the
/// arc of its own level.
pub fn check_continuity(profile: &PiecewiseProfile) -> ContinuityReport {
    let mut rep = ContinuityReport { max_value_gap: 0.0, max_tangency_slope_gap: 0.0 };
    for w in profile.pieces.windows(2) {
        let s = w[0].end;
        let (vl, dl) = profile.eval(&w[0], s);
        let (vr, dr) = profile.eval(&w[1], s);
        rep.max_value_gap = rep.max_value_gap.max((vl - vr).abs());
        let tangency = matches!(
            (w[0].kind, w[1].kind),
            (PieceKind::Affine { level: a, .. }, PieceKind::Arc { level: b })
                | (PieceKind::Arc { level: a }, PieceKind::Affine { level: b, .. }) if a == b
        );
        if tangency {
            rep.max_tangency_slope_gap = rep.max_tangency_slope_gap.max((dl - dr).abs());
        }
    }
    rep
}

/// `ρ(0) = 0`, and the far tail is affine with slope `±λ` (finite decay) or a
/// Lagrangian arc (compactly supported data).
pub fn check_boundary(profile: &PiecewiseProfile, decay: Decay) -> bool {
    if profile.value(0.0) != Some(0.0) {
        return false;
    }
    let tail = match profile.side {
        Side::Right => profile.pieces.last(),
        Side::Left => profile.pieces.first(),
    };
    let sign = match profile.side {
        Side::Right => 1.0,
        Side::Left => -1.0,
    };
    match (tail.map(|p| p.kind), decay) {
        (Some(PieceKind::Affine { slope, .. }), Decay::Finite(l)) => (slope - sign * l).abs() <= 1e-12,
        (Some(PieceKind::Arc { .. }), Decay::Infinite) => true,
        _ => false,
    }
}

/// `ρ(c)` where it is positive; the rate in `u(ct, t) ≈ e^{−tρ(c)}`.
pub fn large_deviation_rate(profile: &PiecewiseProfile, c: f64) -> Option<f64> {
    profile.value(c).filter(|v| *v > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    RBar,
    RUnder1,
    RUnder2,
    RUnder3,
    R0,
}

/// Piecewise-constant reaction coefficient: `values[i]` holds between
/// `thresholds[i-1]` and `thresholds[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientField {
    pub kind: FieldKind,
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

impl CoefficientField {
    fn touching(&self, s: f64) -> impl Iterator<Item = f64> + '_ {
        let n = self.thresholds.len();
        (0..=n).filter_map(move |i| {
            let lo = if i == 0 { f64::NEG_INFINITY } else { self.thresholds[i - 1] };
            let hi = if i == n { f64::INFINITY } else { self.thresholds[i] };
            (lo <= s && s <= hi).then_some(self.values[i])
        })
    }

    /// Upper semicontinuous envelope `R*`.
    pub fn upper(&self, s: f64) -> f64 {
        self.touching(s).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lower semicontinuous envelope `R_*`.
    pub fn lower(&self, s: f64) -> f64 {
        self.touching(s).fold(f64::INFINITY, f64::min)
    }
}

/// `R̄`: `rα₋` up to `c_e`, `rα₊` after.
pub fn r_bar(s: &Scenario) -> CoefficientField {
    let r = s.prey.r;
    CoefficientField {
        kind: FieldKind::RBar,
        thresholds: vec![s.c_e],
        values: vec![r * s.alpha_minus, r * s.alpha_plus],
    }
}

/// `R₀`: `r₂V₋` up to `c_e`, `r₂V₊` after.
pub fn r_zero(s: &Scenario) -> CoefficientField {
    let r = s.predator.r;
    CoefficientField { kind: FieldKind::R0, thresholds: vec![s.c_e], values: vec![r * s.v_minus(), r * s.v_plus()] }
}

/// The lower field `R̲ₖ` with the predator-occupied band `[−s₂₋ˡ, s₂₋ʳ]`.
pub fn r_under(s: &Scenario) -> Result<CoefficientField> {
    let pred = s.env(Species::Predator, s.v_minus())?;
    let s2r = pred.directional_speed(s.predator.lambda_right)?;
    let s2l = pred.directional_speed(s.predator.lambda_left)?;
    let r = s.prey.r;
    let (am, ap, av) = (r * s.alpha_minus, r * s.alpha_plus, r * s.a * s.v_minus());
    let ce = s.c_e;
    Ok(if ce > s2r {
        CoefficientField {
            kind: FieldKind::RUnder1,
            thresholds: vec![-s2l, s2r, ce],
            values: vec![am, am - av, am, ap],
        }
    } else if ce >= -s2l {
        CoefficientField {
            kind: FieldKind::RUnder2,
            thresholds: vec![-s2l, ce, s2r],
            values: vec![am, am - av, ap - av, ap],
        }
    } else {
        CoefficientField {
            kind: FieldKind::RUnder3,
            thresholds: vec![ce, -s2l, s2r],
            values: vec![am, ap, ap - av, ap],
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Subsolution,
    Supersolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificationOptions {
    pub grid_points: usize,
    pub exclusion: f64,
    pub tolerance: f64,
    pub kink_samples: usize,
    pub seed: u64,
}

impl Default for CertificationOptions {
    fn default() -> Self {
        Self { grid_points: 10_000, exclusion: 1e-6, tolerance: 1e-8, kink_samples: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub s: f64,
    pub slope: f64,
    pub residual: f64,
    pub at_kink: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub certificate: Certificate,
    pub field: FieldKind,
    pub passed: bool,
    pub grid_samples: usize,
    pub kink_points: usize,
    /// Smallest residual for supersolutions, largest for subsolutions.
    pub worst_residual: f64,
    pub violation: Option<Violation>,
}

fn window(profile: &PiecewiseProfile, field: &CoefficientField) -> (f64, f64) {
    let reach = profile
        .breakpoints()
        .into_iter()
        .chain(field.thresholds.iter().copied())
        .chain([profile.zero_front])
        .filter(|x| x.is_finite())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let span = 1.25 * reach + 2.0;
    match profile.side {
        Side::Right => (0.0, span),
        Side::Left => (-span, 0.0),
    }
}

/// Checks `ρ − sρ' + H(ρ') + R ≥ 0` (with `R*`, where `min{·, ρ}` is taken) or
/// `≤ 0` wherever `ρ > 0` (with `R_*`), on a jittered grid and at every kink.
pub fn certify(
    profile: &PiecewiseProfile,
    field: &CoefficientField,
    certificate: Certificate,
    opts: &CertificationOptions,
) -> CertificationReport {
    let (lo, hi) = window(profile, field);
    let specials: Vec<f64> = profile
        .breakpoints()
        .into_iter()
        .chain(field.thresholds.iter().copied())
        .filter(|x| x.is_finite() && *x > lo && *x < hi && *x != 0.0)
        .collect();
    let n = opts.grid_points;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let jitter: Vec<f64> = (0..n).map(|_| rng.random_range(-0.45..0.45)).collect();
    let step = (hi - lo) / n as f64;
    let sub = certificate == Certificate::Subsolution;
    let tol = opts.tolerance;

    let residual = |s: f64, rho: f64, slope: f64, r: f64| rho - s * slope + profile.base_h(slope) + r;
    // Per-sample outcome: (score, violation). Higher score is worse for sub, lower for super.
    let grid: Vec<(f64, Option<Violation>)> = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let s = lo + (i as f64 + 0.5 + jitter[i]) * step;
            if specials.iter().any(|k| (s - k).abs() < opts.exclusion) {
                return None;
            }
            let rho = profile.value(s)?;
            let slope = profile.slope(s)?;
            if sub {
                if rho <= 0.0 {
                    return Some((f64::NEG_INFINITY, None));
                }
                let res = residual(s, rho, slope, field.lower(s));
                let v = (res > tol).then_some(Violation { s, slope, residual: res, at_kink: false });
                Some((res, v))
            } else {
                let res = residual(s, rho, slope, field.upper(s)).min(rho);
                let v = (res < -tol).then_some(Violation { s, slope, residual: res, at_kink: false });
                Some((res, v))
            }
        })
        .collect();

    let mut kinks = Vec::new();
    for &b in &specials {
        let Some(rho) = profile.value(b) else { continue };
        let (dl, dr) = profile.one_sided_slopes(b);
        let (Some(dl), Some(dr)) = (dl, dr) else { continue };
        let smooth = (dl - dr).abs() <= 1e-9;
        let slopes: Vec<f64> = if smooth {
            vec![dl, dr]
        } else if sub && dl > dr && rho > 0.0 {
            sweep(dr, dl, opts.kink_samples)
        } else if !sub && dl < dr {
            sweep(dl, dr, opts.kink_samples)
        } else {
            Vec::new()
        };
        for phi in slopes {
            if sub {
                if rho <= 0.0 {
                    continue;
                }
                let res = residual(b, rho, phi, field.lower(b));
                let v = (res > tol).then_some(Violation { s: b, slope: phi, residual: res, at_kink: true });
                kinks.push((res, v));
            } else {
                let res = residual(b, rho, phi, field.upper(b)).min(rho);
                let v = (res < -tol).then_some(Violation { s: b, slope: phi, residual: res, at_kink: true });
                kinks.push((res, v));
            }
        }
    }

    let all = grid.iter().chain(kinks.iter());
    let worst = if sub {
        all.clone().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max)
    } else {
        all.clone().map(|x| x.0).fold(f64::INFINITY, f64::min)
    };
    let violation = all.filter_map(|x| x.1).next();
    CertificationReport {
        certificate,
        field: field.kind,
        passed: violation.is_none(),
        grid_samples: grid.len(),
        kink_points: specials.len(),
        worst_residual: worst,
        violation,
    }
}

fn sweep(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n.max(2) - 1) as f64).collect()
}

pub fn certify_subsolution(
    profile: &PiecewiseProfile,
    field: &CoefficientField,
    opts: &CertificationOptions,
) -> CertificationReport {
    certify(profile, field, Certificate::Subsolution, opts)
}

pub fn certify_supersolution(
    profile: &PiecewiseProfile,
    field: &CoefficientField,
    opts: &CertificationOptions,
) -> CertificationReport {
    certify(profile, field, Certificate::Supersolution, opts)
}

/// Everything checked for one prey profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCertificate {
    pub side: Side,
    pub construction: String,
    pub region: Region,
    pub zero_front: f64,
    pub predicted_speed: f64,
    pub continuity: ContinuityReport,
    pub boundary_ok: bool,
    pub subsolution: CertificationReport,
    pub supersolution: CertificationReport,
}

impl ProfileCertificate {
    pub fn passed(&self) -> bool {
        self.continuity.passed()
            && self.boundary_ok
            && self.subsolution.passed
            && self.supersolution.passed
            && (self.zero_front - self.predicted_speed).abs() <= 1e-8
    }
}

/// Builds the prey profile on one side and runs every certification against it.
pub fn certify_prey_side(s: &Scenario, side: Side, opts: &CertificationOptions) -> Result<ProfileCertificate> {
    let geom = s.geometry(Species::Prey)?;
    let decay = s.prey.decay(side);
    let speed = geom.speed(side, decay, s.c_e)?;
    let profile = build_side_profile(&geom, side, decay, s.c_e)?;
    Ok(ProfileCertificate {
        side,
        construction: profile.construction.clone(),
        region: speed.region,
        zero_front: profile.zero_front,
        predicted_speed: speed.value,
        continuity: check_continuity(&profile),
        boundary_ok: check_boundary(&profile, decay),
        subsolution: certify_subsolution(&profile, &r_bar(s), opts),
        supersolution: certify_supersolution(&profile, &r_under(s)?, opts),
    })
}
