//! Direct integration of the prey-predator system with nonlocal dispersal in a
//! habitat shifting at speed `c_e`, front tracking, and the comparisons with the
//! calculator's predictions.

pub mod diagnostics;
pub mod fronts;
pub mod grid;
pub mod habitat;
pub mod initial;
pub mod stepper;

use serde::{Deserialize, Serialize};

pub use diagnostics::{hopf_cole_diagnostic, terrace_check, HopfColeReport, TerraceReport};
pub use fronts::{estimate_speed, front_position, SpeedEstimate};
pub use grid::{nonlocal_op, ConvolutionWeights, Grid};
pub use habitat::{Habitat, HabitatShape};
pub use initial::InitialData;
pub use stepper::{State, Stepper};

use crate::classifier::{Scenario, Side, Species};
use crate::error::{Error, Result};

/// Run controls. Unset fields take the defaults derived from the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationOptions {
    pub horizon: f64,
    /// Default: the smaller kernel half-width over 10.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    /// Default: the stability bound, rounded down to divide `sample_interval`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Default: `(max(|c_e| + c*₁₋, max |prey speed|) + 2)·T + 10·h_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
    /// Default: logistic ramp of width 5·h (prey kernel). Set from the habitat
    /// section of a scenario file rather than from the simulation section.
    #[serde(skip)]
    pub habitat: Option<HabitatShape>,
    /// Default: `0.01·α₊`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prey_threshold: Option<f64>,
    /// Default: `0.01·V₊`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predator_threshold: Option<f64>,
    pub sample_interval: f64,
    pub snapshots: Vec<f64>,
    /// Default: `0.1·α₊`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prey_amplitude: Option<f64>,
    /// Default: `0.1·V₊`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predator_amplitude: Option<f64>,
    /// Half-width of the flat top of the initial data; default 5·h per species.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            horizon: 200.0,
            dx: None,
            dt: None,
            half_length: None,
            habitat: None,
            prey_threshold: None,
            predator_threshold: None,
            sample_interval: 0.5,
            snapshots: Vec::new(),
            prey_amplitude: None,
            predator_amplitude: None,
            radius: None,
        }
    }
}

/// Everything a run needs once defaults are resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunPlan {
    pub grid: Grid,
    pub dt: f64,
    pub steps_per_sample: usize,
    pub samples: usize,
    pub horizon: f64,
    pub habitat: Habitat,
    pub prey_threshold: f64,
    pub predator_threshold: f64,
    pub prey_initial: InitialData,
    pub predator_initial: InitialData,
    pub margin: f64,
    pub snapshots: Vec<f64>,
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

/// The simulator also accepts `a = 0` (uncoupled prey) and `α₋ = α₊`.
fn check_model(s: &Scenario) -> Result<()> {
    for (name, v) in [
        ("prey.d", s.prey.d),
        ("prey.r", s.prey.r),
        ("predator.d", s.predator.d),
        ("predator.r", s.predator.r),
        ("b", s.b),
        ("alpha_minus", s.alpha_minus),
        ("alpha_plus", s.alpha_plus),
    ] {
        positive(name, v)?;
    }
    if !(s.a.is_finite() && s.a >= 0.0) {
        return Err(Error::Config(format!("a must be nonnegative and finite, got {}", s.a)));
    }
    if !s.c_e.is_finite() {
        return Err(Error::Config(format!("shift speed must be finite, got {}", s.c_e)));
    }
    Ok(())
}

/// Resolves defaults and checks resolution and stability.
pub fn plan(s: &Scenario, opts: &SimulationOptions) -> Result<RunPlan> {
    check_model(s)?;
    let horizon = positive("horizon", opts.horizon)?;
    let interval = positive("sample_interval", opts.sample_interval)?;
    let (h1, h2) = (s.prey.kernel.half_width(), s.predator.kernel.half_width());
    let (h_min, h_max) = (h1.min(h2), h1.max(h2));
    let dx = positive("dx", opts.dx.unwrap_or(h_min / 10.0))?;
    if dx > h_min / 8.0 {
        return Err(Error::NumericalAbort(format!(
            "resolution: dx = {dx} exceeds kernel half-width / 8 = {}",
            h_min / 8.0
        )));
    }
    let half_length = match opts.half_length {
        Some(l) => positive("half_length", l)?,
        None => default_half_length(s, horizon, h_max)?,
    };
    let grid = Grid::symmetric(half_length, dx)?;
    let habitat = Habitat {
        shape: opts.habitat.unwrap_or(HabitatShape::LogisticRamp { width: 5.0 * h1 }),
        alpha_minus: s.alpha_minus,
        alpha_plus: s.alpha_plus,
    };
    if let HabitatShape::LogisticRamp { width } = habitat.shape {
        positive("habitat width", width)?;
    }
    let initial = |sp: Species, amplitude: f64, h: f64| InitialData {
        amplitude,
        radius: opts.radius.unwrap_or(5.0 * h),
        taper: h,
        right: s.species(sp).lambda_right,
        left: s.species(sp).lambda_left,
    };
    let prey_initial = initial(Species::Prey, opts.prey_amplitude.unwrap_or(0.1 * s.alpha_plus), h1);
    let predator_initial = initial(Species::Predator, opts.predator_amplitude.unwrap_or(0.1 * s.v_plus()), h2);
    if prey_initial.amplitude < 0.0 || predator_initial.amplitude < 0.0 {
        return Err(Error::Config("initial amplitudes must be nonnegative".into()));
    }
    let mut stepper = Stepper::new(s, habitat, grid);
    stepper.widen_bounds(prey_initial.amplitude, predator_initial.amplitude);
    let dt_max = stepper.max_dt();
    let target = match opts.dt {
        Some(dt) if dt > dt_max => {
            return Err(Error::NumericalAbort(format!("dt = {dt} exceeds the stability bound {dt_max}")));
        }
        Some(dt) => positive("dt", dt)?,
        None => dt_max,
    };
    let steps_per_sample = (interval / target).ceil() as usize;
    let samples = (horizon / interval).round().max(1.0) as usize;
    for &t in &opts.snapshots {
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::Config(format!("snapshot time {t} outside [0, {horizon}]")));
        }
    }
    Ok(RunPlan {
        grid,
        dt: interval / steps_per_sample as f64,
        steps_per_sample,
        samples,
        horizon: samples as f64 * interval,
        habitat,
        prey_threshold: opts.prey_threshold.unwrap_or(0.01 * s.alpha_plus),
        predator_threshold: opts.predator_threshold.unwrap_or(0.01 * s.v_plus()),
        prey_initial,
        predator_initial,
        margin: 5.0 * h_max,
        snapshots: opts.snapshots.clone(),
    })
}

fn default_half_length(s: &Scenario, horizon: f64, h_max: f64) -> Result<f64> {
    let c_star = s.env(Species::Prey, s.alpha_minus)?.min_speed()?.c_star;
    let mut reach = s.c_e.abs() + c_star;
    if let Ok(g) = s.geometry(Species::Prey) {
        for side in [Side::Right, Side::Left] {
            if let Ok(b) = g.speed(side, s.prey.decay(side), s.c_e) {
                reach = reach.max(b.value.abs());
            }
        }
    }
    Ok((reach + 2.0) * horizon + 10.0 * h_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontSample {
    pub t: f64,
    pub prey_right: Option<f64>,
    pub prey_left: Option<f64>,
    pub predator_right: Option<f64>,
    pub predator_left: Option<f64>,
}

impl FrontSample {
    pub fn get(&self, species: Species, side: Side) -> Option<f64> {
        match (species, side) {
            (Species::Prey, Side::Right) => self.prey_right,
            (Species::Prey, Side::Left) => self.prey_left,
            (Species::Predator, Side::Right) => self.predator_right,
            (Species::Predator, Side::Left) => self.predator_left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub plan: RunPlan,
    pub steps: usize,
    pub max_clamp: f64,
    pub trajectory: Vec<FrontSample>,
    #[serde(skip)]
    pub snapshots: Vec<State>,
    #[serde(skip)]
    pub final_state: State,
}

impl RunResult {
    pub fn trajectory_of(&self, species: Species, side: Side) -> Vec<(f64, f64)> {
        self.trajectory.iter().filter_map(|f| f.get(species, side).map(|x| (f.t, x))).collect()
    }

    pub fn speed(&self, species: Species, side: Side) -> Option<SpeedEstimate> {
        estimate_speed(&self.trajectory_of(species, side))
    }

    /// `t,x_right_u,x_left_u,x_right_v,x_left_v`; missing fronts are empty cells.
    pub fn trajectory_csv(&self) -> String {
        let cell = |x: Option<f64>| x.map(|v| format!("{v:.10}")).unwrap_or_default();
        let mut out = String::from("t,x_right_u,x_left_u,x_right_v,x_left_v\n");
        for f in &self.trajectory {
            out += &format!(
                "{},{},{},{},{}\n",
                f.t,
                cell(f.prey_right),
                cell(f.prey_left),
                cell(f.predator_right),
                cell(f.predator_left)
            );
        }
        out
    }

    /// `x,u,v` for one recorded state.
    pub fn snapshot_csv(&self, state: &State) -> String {
        let mut out = String::from("x,u,v\n");
        for (i, (u, v)) in state.u.iter().zip(&state.v).enumerate() {
            out += &format!("{},{u:e},{v:e}\n", self.plan.grid.x(i));
        }
        out
    }

    /// The recorded state closest to time `t`, including the final one.
    pub fn state_at(&self, t: f64) -> Option<&State> {
        self.snapshots
            .iter()
            .chain(std::iter::once(&self.final_state))
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .filter(|st| (st.t - t).abs() <= self.plan.dt)
    }
}

fn fronts(state: &State, plan: &RunPlan) -> Result<FrontSample> {
    let g = &plan.grid;
    let mut sample =
        FrontSample { t: state.t, prey_right: None, prey_left: None, predator_right: None, predator_left: None };
    for (species, field, threshold) in
        [(Species::Prey, &state.u, plan.prey_threshold), (Species::Predator, &state.v, plan.predator_threshold)]
    {
        if threshold <= 0.0 {
            continue;
        }
        if field[0] >= threshold || field[g.n - 1] >= threshold {
            return Err(Error::NumericalAbort(format!(
                "margin violation: {species:?} density reaches the domain edge at t={}",
                state.t
            )));
        }
        for side in [Side::Right, Side::Left] {
            let x = front_position(field, g, side, threshold);
            if let Some(x) = x {
                if g.x_max() - x < plan.margin || x - g.x_min() < plan.margin {
                    return Err(Error::NumericalAbort(format!(
                        "margin violation: {species:?} {side:?} front at {x} within {} of the edge at t={}",
                        plan.margin, state.t
                    )));
                }
            }
            match (species, side) {
                (Species::Prey, Side::Right) => sample.prey_right = x,
                (Species::Prey, Side::Left) => sample.prey_left = x,
                (Species::Predator, Side::Right) => sample.predator_right = x,
                (Species::Predator, Side::Left) => sample.predator_left = x,
            }
        }
    }
    Ok(sample)
}

/// Integrates a planned run to its horizon.
pub fn run_plan(s: &Scenario, plan: RunPlan) -> Result<RunResult> {
    let xs = plan.grid.points();
    let mut stepper = Stepper::new(s, plan.habitat, plan.grid);
    stepper.widen_bounds(plan.prey_initial.amplitude, plan.predator_initial.amplitude);
    let mut state = State { t: 0.0, u: plan.prey_initial.sample(&xs), v: plan.predator_initial.sample(&xs) };
    let mut trajectory = vec![fronts(&state, &plan)?];
    let mut snapshots: Vec<State> = Vec::new();
    let mut pending: Vec<f64> = plan.snapshots.clone();
    pending.sort_by(f64::total_cmp);
    pending.dedup();
    let take_due = |state: &State, pending: &mut Vec<f64>, snapshots: &mut Vec<State>| {
        while pending.first().is_some_and(|&t| t <= state.t + 0.5 * plan.dt) {
            pending.remove(0);
            snapshots.push(state.clone());
        }
    };
    take_due(&state, &mut pending, &mut snapshots);
    let mut max_clamp = 0.0f64;
    let mut steps = 0;
    for k in 1..=plan.samples {
        for _ in 0..plan.steps_per_sample {
            let clamp = stepper.step(&mut state, plan.dt)?;
            steps += 1;
            max_clamp = max_clamp.max(clamp);
            if clamp > stepper::CLAMP_LIMIT {
                return Err(Error::NumericalAbort(format!(
                    "negative undershoot {clamp:e} exceeds {:e} at t={}",
                    stepper::CLAMP_LIMIT,
                    state.t
                )));
            }
            take_due(&state, &mut pending, &mut snapshots);
        }
        // Pin the clock to the sampling lattice so rounding does not drift.
        state.t = k as f64 * plan.dt * plan.steps_per_sample as f64;
        trajectory.push(fronts(&state, &plan)?);
    }
    Ok(RunResult { plan, steps, max_clamp, trajectory, snapshots, final_state: state })
}

/// Plans and integrates a run.
pub fn run(s: &Scenario, opts: &SimulationOptions) -> Result<RunResult> {
    run_plan(s, plan(s, opts)?)
}
