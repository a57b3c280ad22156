//! Assumption checks, region classification in the `(λ, c_e)` plane and the
//! resulting spreading speed formulas.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hamiltonians::{Decay, HamiltonianEnv};
use crate::kernels::KernelSpec;
use crate::roots::{SpeciesPair, BOUNDARY_BAND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Prey,
    Predator,
}

/// Open regions `Va..Vd` and the boundary curves between them. A `Gamma*` label
/// means the query fell within [`BOUNDARY_BAND`] of that curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Va,
    Vb,
    Vc,
    Vd,
    #[serde(rename = "gamma_a")]
    GammaA,
    #[serde(rename = "gamma_b")]
    GammaB,
    #[serde(rename = "gamma_c")]
    GammaC,
    #[serde(rename = "gamma_d")]
    GammaD,
    #[serde(rename = "gamma_o")]
    GammaO,
    #[serde(rename = "gamma_p")]
    GammaP,
    #[serde(rename = "gamma_q")]
    GammaQ,
    #[serde(rename = "gamma_r")]
    GammaR,
    #[serde(rename = "gamma_s")]
    GammaS,
}

impl Region {
    pub fn on_boundary_band(&self) -> bool {
        !matches!(self, Region::Va | Region::Vb | Region::Vc | Region::Vd)
    }

    /// The open region whose speed formula a boundary curve inherits.
    pub fn branch(&self) -> Region {
        use Region::*;
        match self {
            GammaA | GammaB | GammaO | GammaP => Va,
            GammaD | GammaS => Vb,
            GammaC => Vc,
            GammaQ | GammaR => Vd,
            r => *r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionLabel {
    pub side: Side,
    pub species: Species,
    pub region: Region,
    pub on_boundary_band: bool,
}

/// A speed value together with the region and formula that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSpeed {
    pub value: f64,
    pub region: Region,
    pub branch: String,
}

/// Precomputed constants of one species that the region tests need.
#[derive(Debug, Clone)]
pub struct SpeedGeometry {
    pair: SpeciesPair,
    mu0: f64,
    c_bar: f64,
    lc_bar: f64,
}

impl SpeedGeometry {
    pub fn new(pair: SpeciesPair) -> Result<Self> {
        let mu0 = pair.mu0()?;
        let c_bar = pair.c_bar()?;
        let lc_bar = pair.lagrangian_slope(c_bar)?;
        Ok(Self { pair, mu0, c_bar, lc_bar })
    }

    pub fn pair(&self) -> &SpeciesPair {
        &self.pair
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn c_bar(&self) -> f64 {
        self.c_bar
    }

    /// `L'(c̄)`.
    pub fn lc_bar(&self) -> f64 {
        self.lc_bar
    }

    fn c_plus(&self, mu: f64) -> f64 {
        self.pair.plus().h(mu) / mu
    }

    fn c_minus(&self, mu: f64) -> f64 {
        self.pair.minus().h(mu) / mu
    }

    fn lambda(decay: Decay) -> Result<Option<f64>> {
        match decay {
            Decay::Finite(l) if l > 0.0 && l.is_finite() => Ok(Some(l)),
            Decay::Finite(l) => Err(domain(format!("decay rate must be positive, got {l}"))),
            Decay::Infinite => Ok(None),
        }
    }

    pub fn classify_right(&self, decay: Decay, c_e: f64) -> Result<Region> {
        use Region::*;
        let cp = self.pair.star_plus();
        let cm = self.pair.star_minus().c_star;
        let near = |x: f64| (c_e - x).abs() <= BOUNDARY_BAND;
        let Some(l) = Self::lambda(decay)? else {
            return Ok(if near(cp.c_star) {
                GammaB
            } else if c_e < cp.c_star {
                Va
            } else if near(cm) {
                GammaD
            } else if c_e < cm {
                Vb
            } else {
                Vc
            });
        };
        let s = self.c_plus(l.min(cp.mu_star));
        if near(s) {
            return Ok(if l <= cp.mu_star { GammaA } else { GammaB });
        }
        if c_e < s {
            return Ok(Va);
        }
        if l <= self.mu0 {
            return Ok(Vd);
        }
        if near(cm) {
            return Ok(GammaD);
        }
        if c_e < cm {
            return Ok(Vb);
        }
        if l >= self.pair.star_minus().mu_star {
            return Ok(Vc);
        }
        let k = self.pair.k_curve(l)?;
        Ok(if near(k) {
            GammaC
        } else if c_e < k {
            Vc
        } else {
            Vd
        })
    }

    pub fn classify_left(&self, decay: Decay, c_e: f64) -> Result<Region> {
        use Region::*;
        let mp = self.pair.star_plus().mu_star;
        let cmin = self.pair.star_minus();
        let near = |x: f64| (c_e + x).abs() <= BOUNDARY_BAND;
        let Some(l) = Self::lambda(decay)? else {
            return Ok(if near(cmin.c_star) {
                GammaP
            } else if c_e > -cmin.c_star {
                Va
            } else if near(self.c_bar) {
                GammaR
            } else if c_e > -self.c_bar {
                Vb
            } else {
                Vd
            });
        };
        let s = self.c_minus(l.min(cmin.mu_star));
        if near(s) {
            return Ok(if l < cmin.mu_star { GammaO } else { GammaP });
        }
        if c_e > -s {
            return Ok(Va);
        }
        if l <= mp {
            return Ok(Vc);
        }
        if l >= self.lc_bar {
            return Ok(if near(self.c_bar) {
                GammaR
            } else if c_e > -self.c_bar {
                Vb
            } else {
                Vd
            });
        }
        if l >= cmin.mu_star {
            let hd = self.pair.minus().dh(l);
            if near(hd) {
                return Ok(GammaS);
            }
            if c_e > -hd {
                return Ok(Vb);
            }
        }
        let g = self.pair.g_curve(l)?;
        Ok(if near(g) {
            GammaQ
        } else if c_e > -g {
            Vc
        } else {
            Vd
        })
    }

    /// Membership in an open region by its literal set definition, independent of
    /// the decision tree in [`classify_right`](Self::classify_right).
    pub fn right_region_contains(&self, region: Region, lambda: f64, c_e: f64) -> Result<bool> {
        let cp = self.pair.star_plus();
        let cm = self.pair.star_minus();
        let s = self.c_plus(lambda.min(cp.mu_star));
        let k = || self.pair.k_curve(lambda);
        Ok(match region {
            Region::Va => c_e < s,
            Region::Vb => lambda > self.mu0 && s < c_e && c_e < cm.c_star,
            Region::Vc => {
                (lambda > self.mu0 && lambda < cm.mu_star && cm.c_star < c_e && c_e < k()?)
                    || (lambda >= cm.mu_star && c_e > cm.c_star)
            }
            Region::Vd => lambda < cm.mu_star && c_e > self.c_plus(lambda).max(k()?),
            _ => return Err(domain("membership is defined for open regions only")),
        })
    }

    /// Left-side counterpart of [`right_region_contains`](Self::right_region_contains).
    pub fn left_region_contains(&self, region: Region, lambda: f64, c_e: f64) -> Result<bool> {
        let mp = self.pair.star_plus().mu_star;
        let cm = self.pair.star_minus();
        let s = self.c_minus(lambda.min(cm.mu_star));
        let hd = self.pair.minus().dh(lambda);
        let g = || self.pair.g_curve(lambda);
        let lc = self.lc_bar;
        Ok(match region {
            Region::Va => c_e > -s,
            Region::Vb => lambda > cm.mu_star && (-hd).max(-self.c_bar) < c_e && c_e < -cm.c_star,
            Region::Vc => {
                (lambda <= mp && c_e < -self.c_minus(lambda))
                    || (lambda > mp && lambda < cm.mu_star && -g()? < c_e && c_e < -self.c_minus(lambda))
                    || (lambda >= cm.mu_star && lambda < lc && -g()? < c_e && c_e < -hd)
            }
            Region::Vd => (lambda > mp && lambda <= lc && c_e < -g()?) || (lambda > lc && c_e < -self.c_bar),
            _ => return Err(domain("membership is defined for open regions only")),
        })
    }

    /// Rightward speed for this species' equation with habitat shift `c_e`.
    pub fn right_speed(&self, decay: Decay, c_e: f64) -> Result<BranchSpeed> {
        let region = self.classify_right(decay, c_e)?;
        let cp = self.pair.star_plus();
        let (value, branch) = match (region.branch(), decay) {
            (Region::Va, Decay::Finite(l)) => {
                (self.c_plus(l.min(cp.mu_star)), "s_{+}^r = c_{+}(min(lambda, mu*_{+}))".to_string())
            }
            (Region::Va, Decay::Infinite) => (cp.c_star, "c*_{+}".to_string()),
            (Region::Vb, _) => (c_e, "c_e (locked to the habitat shift)".to_string()),
            (Region::Vc, _) => (self.pair.star_minus().c_star, "c*_{-}".to_string()),
            (Region::Vd, Decay::Finite(l)) => {
                let p = self
                    .pair
                    .p_star(c_e, l)
                    .ok_or_else(|| Error::NoConvergence(format!("p* undefined at c_e={c_e}, lambda={l}")))?;
                (self.c_minus(p), format!("c_{{-}}(p*) with p* = {p}"))
            }
            (r, d) => return Err(domain(format!("no right branch for {r:?} with decay {d}"))),
        };
        Ok(BranchSpeed { value, region, branch: format!("right {region:?}: {branch}") })
    }

    /// Leftward speed (a signed value, negative when the front moves left).
    pub fn left_speed(&self, decay: Decay, c_e: f64) -> Result<BranchSpeed> {
        let region = self.classify_left(decay, c_e)?;
        let cm = self.pair.star_minus();
        let (value, branch) = match (region.branch(), decay) {
            (Region::Va, Decay::Finite(l)) => {
                (-self.c_minus(l.min(cm.mu_star)), "-s_{-}^l = -c_{-}(min(lambda, mu*_{-}))".to_string())
            }
            (Region::Va, Decay::Infinite) => (-cm.c_star, "-c*_{-}".to_string()),
            (Region::Vc, Decay::Finite(l)) => {
                let p = self.pair.p_under(-c_e, l)?;
                (-self.c_plus(p), format!("-c_{{+}}(p_under) with p_under = {p}"))
            }
            (Region::Vb, _) => {
                let p = self.pair.p_bar(-c_e)?;
                (-self.c_plus(p), format!("-c_{{+}}(p_bar) with p_bar = {p}"))
            }
            (Region::Vd, _) => (-self.pair.star_plus().c_star, "-c*_{+}".to_string()),
            (r, d) => return Err(domain(format!("no left branch for {r:?} with decay {d}"))),
        };
        Ok(BranchSpeed { value, region, branch: format!("left {region:?}: {branch}") })
    }

    pub fn speed(&self, side: Side, decay: Decay, c_e: f64) -> Result<BranchSpeed> {
        match side {
            Side::Right => self.right_speed(decay, c_e),
            Side::Left => self.left_speed(decay, c_e),
        }
    }
}

/// Parameters of one species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesParams {
    pub d: f64,
    pub r: f64,
    pub kernel: KernelSpec,
    pub lambda_right: Decay,
    pub lambda_left: Decay,
}

impl SpeciesParams {
    pub fn decay(&self, side: Side) -> Decay {
        match side {
            Side::Right => self.lambda_right,
            Side::Left => self.lambda_left,
        }
    }
}

/// A full problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub prey: SpeciesParams,
    pub predator: SpeciesParams,
    pub a: f64,
    pub b: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub c_e: f64,
}

impl Scenario {
    pub fn v_minus(&self) -> f64 {
        self.b * self.alpha_minus - 1.0
    }

    pub fn v_plus(&self) -> f64 {
        self.b * self.alpha_plus - 1.0
    }

    pub fn species(&self, species: Species) -> &SpeciesParams {
        match species {
            Species::Prey => &self.prey,
            Species::Predator => &self.predator,
        }
    }

    /// Behind and ahead levels of the given species.
    pub fn levels(&self, species: Species) -> (f64, f64) {
        match species {
            Species::Prey => (self.alpha_minus, self.alpha_plus),
            Species::Predator => (self.v_minus(), self.v_plus()),
        }
    }

    pub fn env(&self, species: Species, level: f64) -> Result<HamiltonianEnv> {
        let p = self.species(species);
        HamiltonianEnv::new(p.d, p.r, level, p.kernel)
    }

    pub fn pair(&self, species: Species) -> Result<SpeciesPair> {
        let p = self.species(species);
        let (m, q) = self.levels(species);
        SpeciesPair::new(p.d, p.r, p.kernel, m, q)
    }

    pub fn geometry(&self, species: Species) -> Result<SpeedGeometry> {
        SpeedGeometry::new(self.pair(species)?)
    }

    /// Positivity and finiteness of the raw parameters.
    pub fn check_fields(&self) -> Result<()> {
        let named = [
            ("prey.d", self.prey.d),
            ("prey.r", self.prey.r),
            ("predator.d", self.predator.d),
            ("predator.r", self.predator.r),
            ("a", self.a),
            ("b", self.b),
            ("alpha_minus", self.alpha_minus),
            ("alpha_plus", self.alpha_plus),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !self.c_e.is_finite() {
            return Err(Error::Config(format!("shift speed must be finite, got {}", self.c_e)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The directional speeds compared by the prey-outpaces-predator assumption.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DirectionalSpeeds {
    pub s1_plus_r: Option<f64>,
    pub s1_plus_l: Option<f64>,
    pub s2_minus_r: Option<f64>,
    pub s2_minus_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
    pub v_minus: f64,
    pub v_plus: f64,
    pub directional: DirectionalSpeeds,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && c.passed)
    }

    pub fn first_failure(&self) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// The first failed check among `names`, as an error.
    pub fn require(&self, names: &[&str]) -> Result<()> {
        for n in names {
            if let Some(c) = self.checks.iter().find(|c| c.name == *n && !c.passed) {
                return Err(Error::Assumption { name: c.name.clone(), detail: c.detail.clone() });
            }
        }
        Ok(())
    }
}

fn check(name: &str, passed: bool, detail: String) -> AssumptionCheck {
    AssumptionCheck { name: name.to_string(), passed, detail }
}

/// Checks every standing assumption; failures are reported, not raised.
pub fn validate(s: &Scenario) -> AssumptionReport {
    let mut checks = Vec::new();
    let masses: Vec<f64> = [s.prey.kernel, s.predator.kernel].iter().map(|k| k.moment_by_quadrature(0.0, 0)).collect();
    let mass_ok = masses.iter().all(|m| (m - 1.0).abs() <= 1e-12);
    checks.push(check("J", mass_ok, format!("kernel masses {:?}", masses)));
    let fields = s.check_fields();
    checks.push(check(
        "parameters",
        fields.is_ok(),
        fields.as_ref().err().map_or_else(|| "all rates positive and finite".into(), |e| e.to_string()),
    ));
    let a_ok = s.alpha_minus > s.alpha_plus && s.alpha_plus > 0.0;
    checks.push(check("A", a_ok, format!("alpha_minus = {}, alpha_plus = {}", s.alpha_minus, s.alpha_plus)));
    let (vm, vp) = (s.v_minus(), s.v_plus());
    checks.push(check("H1", vp > 0.0, format!("V_plus = b*alpha_plus - 1 = {vp}")));
    let h2 = s.alpha_plus - s.a * vm;
    checks.push(check("H2", h2 > 0.0, format!("alpha_plus - a*V_minus = {h2}")));

    let mut directional = DirectionalSpeeds::default();
    let fu = if a_ok && vp > 0.0 && fields.is_ok() {
        let speeds = (|| -> Result<DirectionalSpeeds> {
            let prey_plus = s.env(Species::Prey, s.alpha_plus)?;
            let pred_minus = s.env(Species::Predator, vm)?;
            Ok(DirectionalSpeeds {
                s1_plus_r: Some(prey_plus.directional_speed(s.prey.lambda_right)?),
                s1_plus_l: Some(prey_plus.directional_speed(s.prey.lambda_left)?),
                s2_minus_r: Some(pred_minus.directional_speed(s.predator.lambda_right)?),
                s2_minus_l: Some(pred_minus.directional_speed(s.predator.lambda_left)?),
            })
        })();
        match speeds {
            Ok(d) => {
                directional = d;
                let (a, b, c, e) =
                    (d.s2_minus_r.unwrap(), d.s1_plus_r.unwrap(), d.s2_minus_l.unwrap(), d.s1_plus_l.unwrap());
                check("FU", a < b && c < e, format!("s2-^r = {a} vs s1+^r = {b}; s2-^l = {c} vs s1+^l = {e}"))
            }
            Err(e) => check("FU", false, format!("directional speeds unavailable: {e}")),
        }
    } else {
        check("FU", false, "not evaluated: needs (A), (H1) and valid rates".into())
    };
    checks.push(fu);
    AssumptionReport { checks, v_minus: vm, v_plus: vp, directional }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreySpeeds {
    pub right: BranchSpeed,
    pub left: BranchSpeed,
}

/// Prey spreading speeds; requires every assumption to hold.
pub fn prey_speeds(s: &Scenario) -> Result<PreySpeeds> {
    let report = validate(s);
    report.require(&["J", "parameters", "A", "H1", "H2", "FU"])?;
    let geom = s.geometry(Species::Prey)?;
    Ok(PreySpeeds {
        right: geom.right_speed(s.prey.lambda_right, s.c_e)?,
        left: geom.left_speed(s.prey.lambda_left, s.c_e)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredatorBounds {
    /// `c_v^r` is at most this value.
    pub right_upper: BranchSpeed,
    /// `c_v^l` is at least this value.
    pub left_upper: BranchSpeed,
    pub upper_bound_only: bool,
    pub notes: Vec<String>,
}

/// Upper bounds on the predator speeds; needs only (A) and (H1).
pub fn predator_upper_bounds(s: &Scenario) -> Result<PredatorBounds> {
    let report = validate(s);
    report.require(&["parameters", "A", "H1"])?;
    let geom = s.geometry(Species::Predator)?;
    let right = geom.right_speed(s.predator.lambda_right, s.c_e)?;
    let left = geom.left_speed(s.predator.lambda_left, s.c_e)?;
    let mut notes = Vec::new();
    let cm = geom.pair().star_minus().c_star;
    if s.predator.lambda_right.is_infinite() && (s.c_e - cm).abs() <= BOUNDARY_BAND {
        notes.push(format!(
            "c_e = c*_(2,-) = {cm}: the compact-data predator bound is stated with a closed endpoint \
             here while the prey analogue uses an open one; both branches give the value c_e"
        ));
    }
    Ok(PredatorBounds { right_upper: right, left_upper: left, upper_bound_only: true, notes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerraceCase {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlateauLevel {
    AlphaMinus,
    AlphaPlus,
}

/// Predicted plateau of `u` on `x/t ∈ (lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateau {
    pub lo: f64,
    pub hi: f64,
    pub level: PlateauLevel,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TerracePrediction {
    pub cases: Vec<TerraceCase>,
    pub plateaus: Vec<Plateau>,
    pub note: Option<String>,
}

/// Plateau layout of the prey between the predator and prey fronts.
pub fn terrace_prediction(s: &Scenario) -> Result<TerracePrediction> {
    let report = validate(s);
    report.require(&["J", "parameters", "A", "H1", "H2", "FU"])?;
    let d = report.directional;
    let s1p_r = d.s1_plus_r.expect("validated");
    let s2m_r = d.s2_minus_r.expect("validated");
    let s2m_l = d.s2_minus_l.expect("validated");
    let s1m_l = s.env(Species::Prey, s.alpha_minus)?.directional_speed(s.prey.lambda_left)?;
    let speeds = prey_speeds(s)?;
    let (cur, cul) = (speeds.right.value, speeds.left.value);
    let ce = s.c_e;
    let minus = |lo, hi| Plateau { lo, hi, level: PlateauLevel::AlphaMinus, value: s.alpha_minus };
    let plus = |lo, hi| Plateau { lo, hi, level: PlateauLevel::AlphaPlus, value: s.alpha_plus };
    let near = |x: f64| (ce - x).abs() <= BOUNDARY_BAND;

    let (cases, plateaus) = if ce >= s1p_r - BOUNDARY_BAND {
        let mut c = vec![TerraceCase::A];
        if near(s1p_r) {
            c.push(TerraceCase::B);
        }
        (c, vec![minus(s2m_r, cur), minus(-s1m_l, -s2m_l)])
    } else if ce > s2m_r {
        (vec![TerraceCase::B], vec![plus(ce, s1p_r), minus(s2m_r, ce), minus(-s1m_l, -s2m_l)])
    } else if ce <= -s1m_l + BOUNDARY_BAND {
        let mut c = vec![TerraceCase::D];
        if near(-s1m_l) {
            c.insert(0, TerraceCase::C);
        }
        (c, vec![plus(s2m_r, s1p_r), plus(cul, -s2m_l)])
    } else if ce < -s2m_l {
        (vec![TerraceCase::C], vec![plus(s2m_r, s1p_r), plus(ce, -s2m_l), minus(-s1m_l, ce)])
    } else {
        return Ok(TerracePrediction {
            cases: vec![],
            plateaus: vec![],
            note: Some(format!(
                "c_e = {ce} lies in [-s2-^l, s2-^r] = [{}, {s2m_r}]; no terrace layout is predicted there",
                -s2m_l
            )),
        });
    };
    let plateaus = plateaus.into_iter().filter(|p| p.hi > p.lo).collect();
    Ok(TerracePrediction { cases, plateaus, note: None })
}

/// Everything the calculator predicts for a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedReport {
    pub prey_right: BranchSpeed,
    pub prey_left: BranchSpeed,
    pub predator_right_upper: BranchSpeed,
    pub predator_left_upper: BranchSpeed,
    pub predator_bounds_upper_only: bool,
    pub regions: Vec<RegionLabel>,
    pub terrace: TerracePrediction,
    pub notes: Vec<String>,
}

pub fn speed_report(s: &Scenario) -> Result<SpeedReport> {
    let prey = prey_speeds(s)?;
    let pred = predator_upper_bounds(s)?;
    let label = |side, species, region: Region| RegionLabel {
        side,
        species,
        region,
        on_boundary_band: region.on_boundary_band(),
    };
    let regions = vec![
        label(Side::Right, Species::Prey, prey.right.region),
        label(Side::Left, Species::Prey, prey.left.region),
        label(Side::Right, Species::Predator, pred.right_upper.region),
        label(Side::Left, Species::Predator, pred.left_upper.region),
    ];
    let mut notes = pred.notes.clone();
    notes.push("predator values bound the rightward speed from above and the leftward speed from below".into());
    Ok(SpeedReport {
        prey_right: prey.right,
        prey_left: prey.left,
        predator_right_upper: pred.right_upper,
        predator_left_upper: pred.left_upper,
        predator_bounds_upper_only: true,
        regions,
        terrace: terrace_prediction(s)?,
        notes,
    })
}
