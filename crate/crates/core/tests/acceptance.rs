//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! The numeric oracles here evaluate `H` and `H'` from quadrature moments of the
//! kernel and locate roots by forward scans plus plain bisection, sharing nothing
//! with the library solvers.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use shiftspread::simulator::{self, hopf_cole_diagnostic, terrace_check, RunResult, SimulationOptions};
use shiftspread::viscosity::{build_profile, certify_prey_side, CertificationOptions};
use shiftspread::{
    classifier::TerraceCase, predator_upper_bounds, prey_speeds, terrace_prediction, validate, Decay, HamiltonianEnv,
    KernelFamily, KernelSpec, Region, Scenario, Side, Species, SpeciesPair, SpeciesParams,
};

// ---------------------------------------------------------------------------
// oracles

#[derive(Clone, Copy)]
struct Oracle {
    d: f64,
    r: f64,
    kernel: KernelSpec,
}

impl Oracle {
    fn h(&self, level: f64, p: f64) -> f64 {
        self.d * (self.kernel.moment_by_quadrature(p, 0) - 1.0) + self.r * level
    }

    fn dh(&self, p: f64) -> f64 {
        self.d * self.kernel.moment_by_quadrature(p, 1)
    }

    fn c(&self, level: f64, mu: f64) -> f64 {
        self.h(level, mu) / mu
    }

    /// `(μ*, c*)` from `μH'(μ) − H(μ) = 0`, which is increasing in `μ`.
    fn min_speed(&self, level: f64) -> (f64, f64) {
        let phi = |mu: f64| mu * self.dh(mu) - self.h(level, mu);
        let mu = bisect(phi, 1e-9, grow(phi, 1.0));
        (mu, self.c(level, mu))
    }

    /// `L'(q)` for `q > 0` by bisection on `H'(p) = q`.
    fn slope(&self, q: f64) -> f64 {
        let f = |p: f64| self.dh(p) - q;
        bisect(f, 0.0, grow(f, 1.0))
    }
}

/// Doubles `x` until `f(x) > 0`.
fn grow(f: impl Fn(f64) -> f64, mut x: f64) -> f64 {
    while f(x) <= 0.0 {
        x *= 2.0;
        assert!(x < 1e6, "bracket growth failed");
    }
    x
}

/// Plain bisection on a sign change.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo.signum() != f(hi).signum(), "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First sign change on a forward scan with step 1e-3, then bisection.
fn scan_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    let step = 1e-3_f64.min((hi - lo) / 100.0);
    let mut a = lo;
    let mut fa = f(a);
    while a < hi {
        let b = (a + step).min(hi);
        let fb = f(b);
        if fb == 0.0 {
            return Some(b);
        }
        if fa.signum() != fb.signum() {
            return Some(bisect(&f, a, b));
        }
        a = b;
        fa = fb;
    }
    None
}

/// Species-level constants from the oracles.
struct OracleGeometry {
    o: Oracle,
    lm: f64,
    lp: f64,
    mu_m: f64,
    c_m: f64,
    mu_p: f64,
    c_p: f64,
    mu0: f64,
    c_bar: f64,
    lc_bar: f64,
}

impl OracleGeometry {
    fn new(o: Oracle, lm: f64, lp: f64) -> Self {
        let (mu_m, c_m) = o.min_speed(lm);
        let (mu_p, c_p) = o.min_speed(lp);
        let mu0 = bisect(|mu| o.c(lp, mu) - c_m, 1e-9, mu_p);
        let mut g = Self { o, lm, lp, mu_m, c_m, mu_p, c_p, mu0, c_bar: f64::NAN, lc_bar: f64::NAN };
        g.c_bar = g.c_bar_oracle();
        g.lc_bar = o.slope(g.c_bar);
        g
    }

    /// `p̄(c)` as the single crossing of a concave function on `(0, L'(c))`.
    fn p_bar_bisect(&self, c: f64) -> f64 {
        let q = self.o.slope(c);
        let lmc = c * q - self.o.h(self.lm, q);
        bisect(|p| c * p - self.o.h(self.lp, p) - lmc, 0.0, q)
    }

    fn p_bar_scan(&self, c: f64) -> f64 {
        let q = self.o.slope(c);
        let lmc = c * q - self.o.h(self.lm, q);
        scan_root(|p| c * p - self.o.h(self.lp, p) - lmc, 0.0, q).expect("p̄ oracle")
    }

    fn c_bar_oracle(&self) -> f64 {
        let f = |c: f64| self.p_bar_bisect(c) - self.mu_p;
        let lo = self.c_m + 1e-8;
        let mut hi = lo + 0.5;
        while f(hi) <= 0.0 {
            hi = lo + 2.0 * (hi - lo);
        }
        bisect(f, lo, hi)
    }

    fn cp(&self, mu: f64) -> f64 {
        self.o.c(self.lp, mu)
    }

    fn cm(&self, mu: f64) -> f64 {
        self.o.c(self.lm, mu)
    }

    fn k(&self, mu: f64) -> f64 {
        (self.o.h(self.lm, self.mu_m) - self.o.h(self.lp, mu)) / (self.mu_m - mu)
    }

    fn g(&self, mu: f64) -> f64 {
        (self.o.h(self.lm, mu) - self.o.h(self.lp, self.mu_p)) / (mu - self.mu_p)
    }

    /// Literal right-side region sets.
    fn right_regions(&self, l: f64, ce: f64) -> Vec<Region> {
        let s = self.cp(l.min(self.mu_p));
        let mut out = Vec::new();
        if ce < s {
            out.push(Region::Va);
        }
        if l > self.mu0 && s < ce && ce < self.c_m {
            out.push(Region::Vb);
        }
        if (l > self.mu0 && l < self.mu_m && self.c_m < ce && ce < self.k(l)) || (l >= self.mu_m && ce > self.c_m) {
            out.push(Region::Vc);
        }
        if l < self.mu_m && ce > self.cp(l).max(self.k(l)) {
            out.push(Region::Vd);
        }
        out
    }

    /// Literal left-side region sets.
    fn left_regions(&self, l: f64, ce: f64) -> Vec<Region> {
        let s = self.cm(l.min(self.mu_m));
        let hd = self.o.dh(l);
        let mut out = Vec::new();
        if ce > -s {
            out.push(Region::Va);
        }
        if l > self.mu_m && (-hd).max(-self.c_bar) < ce && ce < -self.c_m {
            out.push(Region::Vb);
        }
        let vc = (l <= self.mu_p && ce < -self.cm(l))
            || (l > self.mu_p && l < self.mu_m && -self.g(l) < ce && ce < -self.cm(l))
            || (l >= self.mu_m && l < self.lc_bar && -self.g(l) < ce && ce < -hd);
        if vc {
            out.push(Region::Vc);
        }
        if (l > self.mu_p && l <= self.lc_bar && ce < -self.g(l)) || (l > self.lc_bar && ce < -self.c_bar) {
            out.push(Region::Vd);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// scenarios

fn uniform() -> KernelSpec {
    KernelSpec::uniform(1.0).unwrap()
}

fn prey_oracle() -> Oracle {
    Oracle { d: 1.0, r: 1.0, kernel: uniform() }
}

fn scenario(c_e: f64, right: Decay, left: Decay) -> Scenario {
    Scenario {
        prey: SpeciesParams { d: 1.0, r: 1.0, kernel: uniform(), lambda_right: right, lambda_left: left },
        predator: SpeciesParams {
            d: 0.2,
            r: 0.5,
            kernel: uniform(),
            lambda_right: Decay::Infinite,
            lambda_left: Decay::Infinite,
        },
        a: 0.4,
        b: 1.5,
        alpha_minus: 1.5,
        alpha_plus: 1.0,
        c_e,
    }
}

const INF: Decay = Decay::Infinite;

fn fin(l: f64) -> Decay {
    Decay::Finite(l)
}

// ---------------------------------------------------------------------------
// reporting

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

/// Collects failures inside one criterion.
#[derive(Default)]
struct Failures(Vec<String>);

impl Failures {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    fn summary(&self) -> String {
        match self.0.len() {
            0 => String::new(),
            n => format!("; {n} failure(s), first: {}", self.0[0]),
        }
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail += &format!(" [{:.1} s]", took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            out.passed = false;
            out.detail += &format!(" exceeds {} s budget", limit.as_secs());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 1: Legendre machinery

fn criterion_1() -> Outcome {
    let combos = [
        (1.0, 1.0, 1.0, KernelSpec::uniform(1.0).unwrap()),
        (0.2, 0.5, 0.5, KernelSpec::uniform(1.0).unwrap()),
        (2.0, 0.3, 1.5, KernelSpec::new(KernelFamily::Triangle, 1.5).unwrap()),
        (0.5, 2.0, 0.25, KernelSpec::new(KernelFamily::RaisedCosine, 0.8).unwrap()),
    ];
    let mut fails = Failures::default();
    let mut worst_sup = 0.0_f64;
    let mut worst_zero = 0.0_f64;
    for (d, r, level, kernel) in combos {
        let env = HamiltonianEnv::new(d, r, level, kernel).unwrap();
        let o = Oracle { d, r, kernel };
        let star = env.min_speed().unwrap();
        let c = star.c_star;
        let n_p = 100_000;
        let ps: Vec<f64> = (0..n_p).map(|j| -60.0 + 120.0 * j as f64 / (n_p - 1) as f64).collect();
        let hs: Vec<f64> = ps.iter().map(|&p| o.h(level, p)).collect();
        let qs: Vec<f64> = (0..1000).map(|i| -3.0 * c + 6.0 * c * i as f64 / 999.0).collect();
        let gaps: Vec<(f64, f64, f64)> = qs
            .par_iter()
            .map(|&q| {
                let sup = ps.iter().zip(&hs).map(|(p, h)| q * p - h).fold(f64::NEG_INFINITY, f64::max);
                let l = env.lagrangian(q).unwrap();
                (q, l, (l - sup).abs())
            })
            .collect();
        for &(q, l, gap) in &gaps {
            worst_sup = worst_sup.max(gap);
            fails.check(gap <= 1e-6, || format!("d={d} r={r} level={level}: |L({q}) - sup| = {gap:e}"));
            let slack = 1e-8;
            if q.abs() <= c - slack {
                fails.check(l <= 0.0, || format!("L({q}) = {l:e} > 0 inside the cone"));
            } else if q.abs() >= c + slack {
                fails.check(l > 0.0, || format!("L({q}) = {l:e} <= 0 outside the cone"));
            }
        }
        for q in [c, -c] {
            let l = env.lagrangian(q).unwrap();
            worst_zero = worst_zero.max(l.abs());
            fails.check(l.abs() <= 1e-8, || format!("L({q}) = {l:e}, want 0"));
        }
        for q in [c - 2e-8, -(c - 2e-8)] {
            let l = env.lagrangian(q).unwrap();
            fails.check(l <= 0.0, || format!("L({q}) = {l:e} just inside the cone"));
        }
        for q in [c + 2e-8, -(c + 2e-8)] {
            let l = env.lagrangian(q).unwrap();
            fails.check(l > 0.0, || format!("L({q}) = {l:e} just outside the cone"));
        }
    }
    Outcome::new(
        fails.0.is_empty(),
        format!(
            "Legendre duality on 4x1000 q-points, worst |L - brute sup| {worst_sup:.2e}, worst |L(±c*)| {worst_zero:.2e}{}",
            fails.summary()
        ),
    )
}

// ---------------------------------------------------------------------------
// 2: root suite

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let families = [KernelFamily::Uniform, KernelFamily::Triangle, KernelFamily::RaisedCosine];
    let draws: Vec<_> = (0..50)
        .map(|_| {
            let d = rng.random_range(0.2..2.0);
            let r = rng.random_range(0.2..2.0);
            let family = families[rng.random_range(0..3)];
            let h = rng.random_range(0.5..2.0);
            let lp = rng.random_range(0.2..1.5);
            let lm = lp * rng.random_range(1.2..3.0);
            let u: [f64; 6] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
            (d, r, KernelSpec::new(family, h).unwrap(), lm, lp, u)
        })
        .collect();
    let results: Vec<(Vec<String>, f64, f64)> =
        draws.par_iter().map(|&(d, r, k, lm, lp, u)| root_draw(d, r, k, lm, lp, u)).collect();
    let mut fails = Failures::default();
    let (mut worst_res, mut worst_match) = (0.0_f64, 0.0_f64);
    for (i, (f, res, m)) in results.into_iter().enumerate() {
        worst_res = worst_res.max(res);
        worst_match = worst_match.max(m);
        for msg in f {
            fails.0.push(format!("draw {i}: {msg}"));
        }
    }
    Outcome::new(
        fails.0.is_empty(),
        format!(
            "roots on 50 random draws, worst residual {worst_res:.2e}, worst oracle gap {worst_match:.2e}{}",
            fails.summary()
        ),
    )
}

fn root_draw(d: f64, r: f64, kernel: KernelSpec, lm: f64, lp: f64, u: [f64; 6]) -> (Vec<String>, f64, f64) {
    let pair = SpeciesPair::new(d, r, kernel, lm, lp).unwrap();
    let g = OracleGeometry::new(Oracle { d, r, kernel }, lm, lp);
    let o = g.o;
    let mut fails = Failures::default();
    let mut worst_res = 0.0_f64;
    let mut worst_match = 0.0_f64;
    let mut compare = |name: &str, lib: f64, oracle: f64, residual: f64, fails: &mut Failures| {
        worst_res = worst_res.max(residual.abs());
        worst_match = worst_match.max((lib - oracle).abs());
        fails.check(residual.abs() <= 1e-10, || format!("{name} residual {residual:e}"));
        fails.check((lib - oracle).abs() <= 1e-8, || format!("{name} = {lib} vs oracle {oracle}"));
    };

    let mu0 = pair.mu0().unwrap();
    compare("mu0", mu0, g.mu0, g.cp(mu0) - g.c_m, &mut fails);

    // p̌ and p̂
    let ce = g.c_m + 0.05 + 2.0 * u[0];
    let q = o.slope(ce);
    let lmc = ce * q - o.h(lm, q);
    let big_f = |p: f64| ce * p - o.h(lp, p) - lmc;
    let (check, hat) = pair.check_hat_p(ce).unwrap();
    let check_o = scan_root(big_f, 0.0, q).unwrap();
    let hat_o = scan_root(|p| -big_f(p), q, q + grow(|x| -big_f(q + x), 1.0)).unwrap();
    compare("p_check", check, check_o, big_f(check), &mut fails);
    compare("p_hat", hat, hat_o, big_f(hat), &mut fails);

    // p* with λ below p̌
    let lambda = check_o * (0.1 + 0.85 * u[1]);
    let rhs = ce * lambda - o.h(lp, lambda);
    let big_g = |p: f64| ce * p - o.h(lm, p) - rhs;
    match pair.p_star(ce, lambda) {
        Some(ps) => {
            let ps_o = scan_root(big_g, lambda, q).unwrap();
            compare("p_star", ps, ps_o, big_g(ps), &mut fails);
            fails.check(ps > lambda && ps <= q + 1e-12, || format!("p* = {ps} outside ({lambda}, {q}]"));
        }
        None => fails.0.push(format!("p_star missing at c_e={ce}, lambda={lambda}")),
    }

    // p̄
    let ct = g.c_m + 0.05 + 2.0 * u[2];
    let pb = pair.p_bar(ct).unwrap();
    let qt = o.slope(ct);
    let lmt = ct * qt - o.h(lm, qt);
    compare("p_bar", pb, g.p_bar_scan(ct), ct * pb - o.h(lp, pb) - lmt, &mut fails);

    // p̲
    let l2 = 0.2 + 2.8 * u[3];
    let threshold = if l2 <= g.mu_m { g.cm(l2) } else { o.dh(l2) };
    let cu = threshold + 0.05 + 2.0 * u[4];
    let top = l2.min(o.slope(cu));
    let rhs2 = cu * l2 - o.h(lm, l2);
    let big_u = |p: f64| cu * p - o.h(lp, p) - rhs2;
    let pu = pair.p_under(cu, l2).unwrap();
    compare("p_under", pu, scan_root(big_u, 0.0, top).unwrap(), big_u(pu), &mut fails);
    fails.check(pu < top, || format!("p_under = {pu} not below {top}"));

    // c̄ and the identities
    let cb = pair.c_bar().unwrap();
    let pbar_cb = pair.p_bar(cb).unwrap();
    compare("c_bar", cb, g.c_bar, pbar_cb - g.mu_p, &mut fails);
    let k0 = pair.k_curve(mu0).unwrap();
    fails.check((k0 - g.c_m).abs() <= 1e-8, || format!("k(mu0) = {k0} vs c*- = {}", g.c_m));
    let lcb = pair.lagrangian_slope_c_bar().unwrap();
    let gl = pair.g_curve(lcb).unwrap();
    fails.check((gl - cb).abs() <= 1e-8, || format!("g(L'(c_bar)) = {gl} vs c_bar = {cb}"));
    fails.check((pbar_cb - g.mu_p).abs() <= 1e-8, || format!("p_bar(c_bar) = {pbar_cb} vs mu*+ = {}", g.mu_p));
    let _ = u[5];
    (fails.0, worst_res, worst_match)
}

// ---------------------------------------------------------------------------
// 3: partition and continuity

fn criterion_3() -> Outcome {
    let s = scenario(0.5, INF, INF);
    let mut fails = Failures::default();
    let mut checked = 0usize;
    let mut banded = 0usize;
    let mut worst_jump = 0.0_f64;
    let mut paths = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for species in [Species::Prey, Species::Predator] {
        let p = s.species(species);
        let (lm, lp) = s.levels(species);
        let og = OracleGeometry::new(Oracle { d: p.d, r: p.r, kernel: p.kernel }, lm, lp);
        let geom = s.geometry(species).unwrap();
        let lmax = 2.0 * og.lc_bar.max(og.mu_m);
        let scale = og.c_bar;
        for side in [Side::Right, Side::Left] {
            let (ce_lo, ce_hi) = match side {
                Side::Right => (-0.5 * scale, 3.0 * scale),
                Side::Left => (-3.0 * scale, 0.5 * scale),
            };
            let points: Vec<(f64, f64)> = (0..200)
                .flat_map(|i| {
                    (0..200).map(move |j| {
                        (lmax * (i as f64 + 0.5) / 200.0, ce_lo + (ce_hi - ce_lo) * (j as f64 + 0.5) / 200.0)
                    })
                })
                .collect();
            let verdicts: Vec<Option<String>> = points
                .par_iter()
                .map(|&(l, ce)| {
                    let lib = geom.speed(side, fin(l), ce).map(|b| b.region);
                    let lib = match lib {
                        Ok(r) => r,
                        Err(e) => return Some(format!("{species:?} {side:?} ({l}, {ce}): {e}")),
                    };
                    if lib.on_boundary_band() {
                        return None;
                    }
                    let literal = match side {
                        Side::Right => og.right_regions(l, ce),
                        Side::Left => og.left_regions(l, ce),
                    };
                    (literal != vec![lib])
                        .then(|| format!("{species:?} {side:?} ({l}, {ce}): literal {literal:?}, classifier {lib:?}"))
                })
                .collect();
            for (v, &(l, ce)) in verdicts.into_iter().zip(&points) {
                let region = geom.speed(side, fin(l), ce).map(|b| b.region);
                if matches!(region, Ok(r) if r.on_boundary_band()) {
                    banded += 1;
                } else {
                    checked += 1;
                }
                if let Some(msg) = v {
                    fails.0.push(msg);
                }
            }
        }

        for (side, decay, c0, name) in crossing_paths(&og, &mut rng) {
            paths += 1;
            let eps = 1e-8;
            let at = |ce: f64| geom.speed(side, decay, ce);
            match (at(c0 - eps), at(c0 + eps), at(c0)) {
                (Ok(lo), Ok(hi), Ok(on)) => {
                    let jump = (lo.value - hi.value).abs();
                    worst_jump = worst_jump.max(jump);
                    fails.check(jump <= 1e-6, || format!("{species:?} {name} at {decay}: jump {jump:e}"));
                    fails.check(
                        lo.region != hi.region && !lo.region.on_boundary_band() && !hi.region.on_boundary_band(),
                        || format!("{species:?} {name} at {decay}: no crossing ({:?} -> {:?})", lo.region, hi.region),
                    );
                    fails.check(on.region.on_boundary_band(), || {
                        format!("{species:?} {name} at {decay}: on-curve point labelled {:?}", on.region)
                    });
                    fails.check((on.value - lo.value).abs() <= 1e-6, || format!("{species:?} {name}: curve value off"));
                }
                (a, b, c) => fails.0.push(format!("{species:?} {name}: {:?} {:?} {:?}", a.err(), b.err(), c.err())),
            }
        }
    }
    let ok = fails.0.is_empty() && paths == 40 && checked > 0;
    Outcome::new(
        ok,
        format!(
            "partition on 4x200x200 grids ({checked} classified, {banded} in band), {paths} crossing paths, worst jump {worst_jump:.2e}{}",
            fails.summary()
        ),
    )
}

/// Twenty crossing points per species, one for each branch of every boundary curve.
fn crossing_paths(g: &OracleGeometry, rng: &mut ChaCha8Rng) -> Vec<(Side, Decay, f64, &'static str)> {
    let mut pick = |a: f64, b: f64| {
        let m = 0.05 * (b - a);
        rng.random_range(a + m..b - m)
    };
    let mut out = Vec::new();
    let l = pick(0.05 * g.mu0, g.mu0);
    out.push((Side::Right, fin(l), g.cp(l), "gamma_a (Va|Vd)"));
    let l = pick(g.mu0, g.mu_p);
    out.push((Side::Right, fin(l), g.cp(l), "gamma_a (Va|Vb)"));
    let l = pick(0.05 * g.mu0, g.mu_p);
    if (l - g.mu0).abs() > 0.05 * g.mu0 {
        out.push((Side::Right, fin(l), g.cp(l), "gamma_a"));
    } else {
        let l = 0.5 * g.mu0;
        out.push((Side::Right, fin(l), g.cp(l), "gamma_a"));
    }
    let l = pick(g.mu_p, 3.0 * g.mu_m);
    out.push((Side::Right, fin(l), g.c_p, "gamma_b"));
    out.push((Side::Right, INF, g.c_p, "gamma_b"));
    for _ in 0..2 {
        let l = pick(g.mu0, g.mu_m);
        out.push((Side::Right, fin(l), g.k(l), "gamma_c"));
    }
    let l = pick(g.mu0, 3.0 * g.mu_m);
    out.push((Side::Right, fin(l), g.c_m, "gamma_d"));
    out.push((Side::Right, INF, g.c_m, "gamma_d"));

    let l = pick(0.05 * g.mu_p, g.mu_p);
    out.push((Side::Left, fin(l), -g.cm(l), "gamma_o (Va|Vc, low)"));
    let l = pick(g.mu_p, g.mu_m);
    out.push((Side::Left, fin(l), -g.cm(l), "gamma_o (Va|Vc)"));
    let l = pick(g.mu_m, 3.0 * g.lc_bar);
    out.push((Side::Left, fin(l), -g.c_m, "gamma_p"));
    out.push((Side::Left, INF, -g.c_m, "gamma_p"));
    for _ in 0..3 {
        let l = pick(g.mu_p, g.lc_bar);
        out.push((Side::Left, fin(l), -g.g(l), "gamma_q"));
    }
    let l = pick(g.lc_bar, 3.0 * g.lc_bar);
    out.push((Side::Left, fin(l), -g.c_bar, "gamma_r"));
    out.push((Side::Left, INF, -g.c_bar, "gamma_r"));
    for _ in 0..2 {
        let l = pick(g.mu_m, g.lc_bar);
        out.push((Side::Left, fin(l), -g.o.dh(l), "gamma_s"));
    }
    out
}

// ---------------------------------------------------------------------------
// 4: viscosity certification

fn criterion_4() -> Outcome {
    let cases = [
        ("right Va", Side::Right, scenario(0.5, fin(0.5), INF), Region::Va),
        ("right Vb", Side::Right, scenario(1.05, fin(1.5), INF), Region::Vb),
        ("right Vc", Side::Right, scenario(2.0, fin(3.0), INF), Region::Vc),
        ("right Vd", Side::Right, scenario(5.0, fin(0.4), INF), Region::Vd),
        ("left Va", Side::Left, scenario(0.5, INF, fin(0.8)), Region::Va),
        ("left Vb", Side::Left, scenario(-1.5, INF, fin(3.0)), Region::Vb),
        ("left Vc", Side::Left, scenario(-3.6, INF, fin(0.5)), Region::Vc),
        ("left Vd", Side::Left, scenario(-2.5, INF, fin(4.0)), Region::Vd),
        ("right compact", Side::Right, scenario(1.0267, INF, INF), Region::Vb),
        ("left compact", Side::Left, scenario(-2.5, INF, INF), Region::Vd),
    ];
    let opts = CertificationOptions { grid_points: 10_000, tolerance: 1e-8, seed: 4, ..Default::default() };
    let results: Vec<(String, bool)> = cases
        .par_iter()
        .map(|(name, side, s, region)| match certify_prey_side(s, *side, &opts) {
            Ok(c) => {
                let ok = c.passed() && c.region == *region;
                (
                    format!(
                        "{name}: {} {:?} zero_front {:.6} vs {:.6}, sub {} super {}",
                        c.construction,
                        c.region,
                        c.zero_front,
                        c.predicted_speed,
                        c.subsolution.passed,
                        c.supersolution.passed
                    ),
                    ok,
                )
            }
            Err(e) => (format!("{name}: {e}"), false),
        })
        .collect();
    let bad: Vec<&String> = results.iter().filter(|r| !r.1).map(|r| &r.0).collect();
    Outcome::new(
        bad.is_empty(),
        match bad.first() {
            None => format!("{} profiles certified (continuity, boundary, sub/super, zero front)", results.len()),
            Some(first) => format!("{} of {} profiles failed, first: {first}", bad.len(), results.len()),
        },
    )
}

// ---------------------------------------------------------------------------
// 5-10: simulations

struct Run {
    label: &'static str,
    s: Scenario,
    result: Result<RunResult, String>,
}

impl Run {
    fn speed(&self, species: Species, side: Side) -> Option<f64> {
        self.result.as_ref().ok()?.speed(species, side).map(|e| e.speed)
    }
}

fn simulate(label: &'static str, s: Scenario, opts: SimulationOptions) -> Run {
    let result = simulator::run(&s, &opts).map_err(|e| e.to_string());
    Run { label, s, result }
}

fn within(measured: Option<f64>, target: f64, rel: f64, abs: f64) -> bool {
    measured.is_some_and(|m| (m - target).abs() <= (rel * target.abs()).max(abs))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("none".into(), |v| format!("{v:.4}"))
}

fn criterion_5(runs: &[Run], targets: &[f64; 3]) -> Outcome {
    let mut fails = Failures::default();
    let mut parts = Vec::new();
    for (run, &target) in runs.iter().zip(targets) {
        let m = run.speed(Species::Prey, Side::Right);
        parts.push(format!("{} {} vs {target:.4}", run.label, fmt_opt(m)));
        fails.check(validate(&run.s).all_passed(), || format!("{}: assumptions fail", run.label));
        if let Err(e) = &run.result {
            fails.0.push(format!("{}: {e}", run.label));
        }
        fails.check(within(m, target, 0.05, 0.03), || format!("{}: measured {} vs {target}", run.label, fmt_opt(m)));
    }
    Outcome::new(fails.0.is_empty(), format!("compact-data prey speeds: {}{}", parts.join(", "), fails.summary()))
}

fn criterion_6(runs: &[(&Run, Side, Region)]) -> Outcome {
    let mut fails = Failures::default();
    let mut parts = Vec::new();
    for (run, side, region) in runs {
        let ps = match prey_speeds(&run.s) {
            Ok(p) => p,
            Err(e) => {
                fails.0.push(format!("{}: {e}", run.label));
                continue;
            }
        };
        let pred = match side {
            Side::Right => ps.right,
            Side::Left => ps.left,
        };
        let m = run.speed(Species::Prey, *side);
        let name = format!("{} {side:?}", run.label);
        parts.push(format!("{name} {} vs {:.4}", fmt_opt(m), pred.value));
        fails.check(pred.region == *region, || format!("{name}: classified {:?}", pred.region));
        if let Err(e) = &run.result {
            fails.0.push(format!("{name}: {e}"));
        }
        fails.check(within(m, pred.value, 0.05, 0.0), || format!("{name}: measured {} vs {}", fmt_opt(m), pred.value));
        if *region == Region::Vd && *side == Side::Right {
            let g = run.s.geometry(Species::Prey).unwrap();
            let width = 0.05 * pred.value.abs();
            let s_plus = g.pair().plus().directional_speed(run.s.prey.lambda_right).unwrap();
            let c_minus = g.pair().star_minus().c_star;
            for (what, v) in [("s+", s_plus), ("c_e", run.s.c_e), ("c*-", c_minus)] {
                let gap = m.map_or(0.0, |m| (m - v).abs());
                fails.check(gap >= 3.0 * width, || format!("witness: measured within {gap:.3} of {what} = {v:.4}"));
            }
            parts.push(format!(
                "witness clears s+ = {s_plus:.4} by {:.3} (3 widths = {:.3})",
                m.map_or(0.0, |m| (m - s_plus).abs()),
                3.0 * width
            ));
        }
    }
    Outcome::new(fails.0.is_empty(), format!("exponential-data prey speeds: {}{}", parts.join(", "), fails.summary()))
}

fn criterion_7(runs: &[(&Run, TerraceCase)]) -> Outcome {
    let mut fails = Failures::default();
    let mut parts = Vec::new();
    for (run, case) in runs {
        let pred = match terrace_prediction(&run.s) {
            Ok(p) => p,
            Err(e) => {
                fails.0.push(format!("{}: {e}", run.label));
                continue;
            }
        };
        fails.check(pred.cases.contains(case), || format!("{}: predicted cases {:?}", run.label, pred.cases));
        let Ok(r) = &run.result else {
            fails.0.push(format!("{}: run failed", run.label));
            continue;
        };
        let rep = terrace_check(&r.final_state.u, &r.plan.grid, r.final_state.t, &pred);
        let dev = rep.max_deviation;
        parts.push(format!("{} {case:?} {}", run.label, fmt_opt(dev)));
        fails
            .check(dev.is_some_and(|d| d <= 0.05), || format!("{}: max plateau deviation {}", run.label, fmt_opt(dev)));
        fails.check(rep.intervals.iter().all(|i| i.deviation.is_some()), || format!("{}: empty interval", run.label));
    }
    Outcome::new(fails.0.is_empty(), format!("terrace plateau deviations: {}{}", parts.join(", "), fails.summary()))
}

fn criterion_8(runs: &[&Run]) -> Outcome {
    let mut fails = Failures::default();
    let mut worst = f64::NEG_INFINITY;
    for run in runs {
        let b = match predator_upper_bounds(&run.s) {
            Ok(b) => b,
            Err(e) => {
                fails.0.push(format!("{}: {e}", run.label));
                continue;
            }
        };
        let r = run.speed(Species::Predator, Side::Right);
        let l = run.speed(Species::Predator, Side::Left);
        match (r, l) {
            (Some(r), Some(l)) => {
                let excess = (r - b.right_upper.value).max(b.left_upper.value - l);
                worst = worst.max(excess);
                fails.check(excess <= 0.03, || {
                    format!(
                        "{}: right {r:.4} <= {:.4}, left {l:.4} >= {:.4}",
                        run.label, b.right_upper.value, b.left_upper.value
                    )
                });
            }
            _ => fails.0.push(format!("{}: predator front not tracked", run.label)),
        }
    }
    Outcome::new(
        fails.0.is_empty(),
        format!("predator speeds within bounds in {} runs, largest excess {worst:+.4}{}", runs.len(), fails.summary()),
    )
}

fn criterion_9(runs: &[&Run]) -> Outcome {
    let mut fails = Failures::default();
    let mut parts = Vec::new();
    for run in runs {
        let Ok(r) = &run.result else {
            fails.0.push(format!("{}: run failed", run.label));
            continue;
        };
        let profile = build_profile(&run.s, Side::Right).unwrap();
        let gaps: Vec<Option<f64>> = [50.0, 100.0, 200.0]
            .iter()
            .map(|&t| r.state_at(t).and_then(|st| hopf_cole_diagnostic(&st.u, &r.plan.grid, st.t, &profile).sup_gap))
            .collect();
        parts.push(format!("{} {}", run.label, gaps.iter().map(|g| fmt_opt(*g)).collect::<Vec<_>>().join("/")));
        match gaps[..] {
            [Some(a), Some(b), Some(c)] => {
                fails.check(c <= 0.1, || format!("{}: gap {c} at T=200", run.label));
                fails.check(a > b && b > c, || format!("{}: gaps not decreasing", run.label));
            }
            _ => fails.0.push(format!("{}: missing gap", run.label)),
        }
    }
    Outcome::new(fails.0.is_empty(), format!("Hopf-Cole gaps at T=50/100/200: {}{}", parts.join(", "), fails.summary()))
}

fn criterion_10(base: &Run, fine: &Run) -> Outcome {
    let (a, b) = (base.speed(Species::Prey, Side::Right), fine.speed(Species::Prey, Side::Right));
    match (a, b) {
        (Some(a), Some(b)) => {
            let rel = (a - b).abs() / b.abs();
            Outcome::new(
                rel < 0.01,
                format!("halving dx and dt moves the speed {a:.5} -> {b:.5} ({:.4}%)", 100.0 * rel),
            )
        }
        _ => Outcome::new(false, format!("speed missing: {a:?} {b:?} ({:?})", fine.result.as_ref().err())),
    }
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let mut lines: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |n: u32, o: Outcome| {
        println!("{} criterion {n}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        lines.push((n, o));
    };
    report(1, timed(Some(Duration::from_secs(10)), criterion_1));
    report(2, timed(Some(Duration::from_secs(30)), criterion_2));
    report(3, timed(Some(Duration::from_secs(60)), criterion_3));
    report(4, timed(Some(Duration::from_secs(120)), criterion_4));

    let o = prey_oracle();
    let (_, cp) = o.min_speed(1.0);
    let (_, cm) = o.min_speed(1.5);
    let compact = [cp - 0.2, 0.5 * (cp + cm), cm + 0.3];
    let targets = [cp, compact[1], cm];
    let snaps = SimulationOptions { snapshots: vec![50.0, 100.0], ..Default::default() };

    let start = Instant::now();
    let jobs: Vec<(&'static str, Scenario, SimulationOptions)> = vec![
        ("C5a", scenario(compact[0], INF, INF), SimulationOptions::default()),
        ("C5b", scenario(compact[1], INF, INF), SimulationOptions::default()),
        ("C5c", scenario(compact[2], INF, INF), SimulationOptions::default()),
        ("Va", scenario(0.5, fin(0.5), fin(0.8)), snaps.clone()),
        ("R-Vb", scenario(1.05, fin(1.5), INF), SimulationOptions::default()),
        ("R-Vc", scenario(2.0, fin(3.0), INF), SimulationOptions::default()),
        ("R-Vd", scenario(5.0, fin(0.4), INF), snaps.clone()),
        ("L-Vb", scenario(-1.5, INF, fin(3.0)), SimulationOptions::default()),
        ("L-Vc", scenario(-3.6, INF, fin(0.5)), SimulationOptions::default()),
        ("L-Vd", scenario(-2.5, INF, fin(4.0)), SimulationOptions::default()),
        ("Ta", scenario(2.5, fin(0.5), fin(0.5)), SimulationOptions::default()),
        ("Tb", scenario(0.9, fin(0.5), fin(0.5)), SimulationOptions::default()),
        ("Tc", scenario(-1.7, fin(0.5), fin(0.5)), SimulationOptions::default()),
        ("Td", scenario(-4.0, fin(0.5), fin(0.5)), SimulationOptions::default()),
        ("C5b-fine", scenario(compact[1], INF, INF), refined(&scenario(compact[1], INF, INF))),
    ];
    let runs: Vec<Run> = jobs.into_par_iter().map(|(label, s, opts)| simulate(label, s, opts)).collect();
    let sim_time = start.elapsed();

    report(5, criterion_5(&runs[0..3], &targets));
    // run 3 carries both Va sides
    let c6 = [
        (&runs[3], Side::Right, Region::Va),
        (&runs[4], Side::Right, Region::Vb),
        (&runs[5], Side::Right, Region::Vc),
        (&runs[6], Side::Right, Region::Vd),
        (&runs[3], Side::Left, Region::Va),
        (&runs[7], Side::Left, Region::Vb),
        (&runs[8], Side::Left, Region::Vc),
        (&runs[9], Side::Left, Region::Vd),
    ];
    let mut o6 = criterion_6(&c6);
    o6.detail += &format!(" [simulations {:.0} s]", sim_time.as_secs_f64());
    if sim_time > Duration::from_secs(30 * 60) {
        o6.passed = false;
    }
    report(6, o6);
    let c7 = [
        (&runs[10], TerraceCase::A),
        (&runs[11], TerraceCase::B),
        (&runs[12], TerraceCase::C),
        (&runs[13], TerraceCase::D),
    ];
    report(7, criterion_7(&c7));
    report(8, criterion_8(&runs[0..10].iter().collect::<Vec<_>>()));
    report(9, criterion_9(&[&runs[3], &runs[6]]));
    report(10, criterion_10(&runs[1], &runs[14]));

    let failed: Vec<u32> = lines.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", lines.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}

fn refined(s: &Scenario) -> SimulationOptions {
    let plan = simulator::plan(s, &SimulationOptions::default()).unwrap();
    SimulationOptions { dx: Some(plan.grid.dx / 2.0), dt: Some(plan.dt / 2.0), ..Default::default() }
}
