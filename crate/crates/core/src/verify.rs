//! The end-to-end cross-check: assumptions, predicted speeds, certified
//! profiles, then a simulation compared against all of them.

use serde::Serialize;

use crate::classifier::{speed_report, validate, AssumptionReport, Scenario, Side, Species, SpeedReport};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::simulator::{self, HopfColeReport, RunResult, SpeedEstimate, TerraceReport};
use crate::viscosity::{build_profile, certify_prey_side, CertificationOptions, ProfileCertificate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Mismatch,
    AssumptionFailure,
    NumericalAbort,
    ConfigError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Mismatch => 1,
            Status::AssumptionFailure => 2,
            Status::NumericalAbort => 3,
            Status::ConfigError => 65,
        }
    }

    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidKernel(_) => Status::ConfigError,
            Error::Assumption { .. } | Error::UnsupportedRegime(_) => Status::AssumptionFailure,
            Error::NumericalAbort(_) | Error::NoConvergence(_) | Error::Domain(_) => Status::NumericalAbort,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasuredSpeeds {
    pub prey_right: Option<SpeedEstimate>,
    pub prey_left: Option<SpeedEstimate>,
    pub predator_right: Option<SpeedEstimate>,
    pub predator_left: Option<SpeedEstimate>,
}

impl MeasuredSpeeds {
    pub fn of(run: &RunResult) -> Self {
        Self {
            prey_right: run.speed(Species::Prey, Side::Right),
            prey_left: run.speed(Species::Prey, Side::Left),
            predator_right: run.speed(Species::Predator, Side::Right),
            predator_left: run.speed(Species::Predator, Side::Left),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideGap {
    pub side: Side,
    pub report: HopfColeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub grid_points: usize,
    pub dx: f64,
    pub dt: f64,
    pub half_length: f64,
    pub horizon: f64,
    pub steps: usize,
    pub max_clamp: f64,
    pub speeds: MeasuredSpeeds,
    pub terrace: Option<TerraceReport>,
    pub hopf_cole: Vec<SideGap>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub name: Option<String>,
    pub status: Status,
    pub exit_code: i32,
    pub error: Option<String>,
    pub assumptions: Option<AssumptionReport>,
    pub predictions: Option<SpeedReport>,
    pub certification: Vec<ProfileCertificate>,
    pub simulation: Option<SimulationSummary>,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn new(name: Option<String>) -> Self {
        Self {
            name,
            status: Status::Pass,
            exit_code: 0,
            error: None,
            assumptions: None,
            predictions: None,
            certification: Vec::new(),
            simulation: None,
            checks: Vec::new(),
        }
    }

    fn fail(mut self, e: &Error) -> Self {
        self.status = Status::of_error(e);
        self.exit_code = self.status.exit_code();
        self.error = Some(e.to_string());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub report: VerifyReport,
    pub run: Option<RunResult>,
}

fn speed_check(name: &str, measured: Option<SpeedEstimate>, expected: f64, rel: f64, abs: f64) -> Check {
    let tol = (rel * expected.abs()).max(abs);
    match measured {
        Some(m) => Check {
            name: name.into(),
            passed: (m.speed - expected).abs() <= tol,
            measured: Some(m.speed),
            expected: Some(expected),
            tolerance: Some(tol),
            detail: format!("stderr {:.3e} over {} samples", m.stderr, m.samples),
        },
        None => Check {
            name: name.into(),
            passed: false,
            measured: None,
            expected: Some(expected),
            tolerance: Some(tol),
            detail: "no front trajectory to fit".into(),
        },
    }
}

/// Upper bound `measured ≤ bound + slack` on the right; mirrored on the left.
fn bound_check(name: &str, measured: Option<SpeedEstimate>, bound: f64, slack: f64, side: Side) -> Check {
    let (passed, detail) = match (measured, side) {
        (None, _) => (true, "no predator front; the bound holds trivially".to_string()),
        (Some(m), Side::Right) => (m.speed <= bound + slack, format!("stderr {:.3e}", m.stderr)),
        (Some(m), Side::Left) => (m.speed >= bound - slack, format!("stderr {:.3e}", m.stderr)),
    };
    Check {
        name: name.into(),
        passed,
        measured: measured.map(|m| m.speed),
        expected: Some(bound),
        tolerance: Some(slack),
        detail,
    }
}

/// Runs the whole pipeline. Never panics on bad input; the status says what failed.
pub fn verify(cfg: &ScenarioConfig) -> VerifyOutcome {
    let mut report = VerifyReport::new(cfg.name.clone());
    let s = cfg.scenario();
    let set = &cfg.verify;
    let assumptions = validate(&s);
    let first_failure = assumptions.first_failure().cloned();
    report.assumptions = Some(assumptions);
    if let Some(c) = first_failure {
        let e = if c.name == "parameters" {
            Error::Config(c.detail)
        } else {
            Error::Assumption { name: c.name, detail: c.detail }
        };
        return VerifyOutcome { report: report.fail(&e), run: None };
    }
    let predictions = match speed_report(&s) {
        Ok(p) => p,
        Err(e) => return VerifyOutcome { report: report.fail(&e), run: None },
    };
    report.predictions = Some(predictions.clone());

    if set.certify {
        let opts = CertificationOptions { grid_points: set.certification_points, seed: cfg.seed, ..Default::default() };
        for side in [Side::Right, Side::Left] {
            match certify_prey_side(&s, side, &opts) {
                Ok(c) => {
                    report.checks.push(Check {
                        name: format!("certify_{}", side_name(side)),
                        passed: c.passed(),
                        measured: Some(c.zero_front),
                        expected: Some(c.predicted_speed),
                        tolerance: Some(1e-8),
                        detail: format!(
                            "{}: sub worst {:.3e}, super worst {:.3e}",
                            c.construction, c.subsolution.worst_residual, c.supersolution.worst_residual
                        ),
                    });
                    report.certification.push(c);
                }
                Err(e) => return VerifyOutcome { report: report.fail(&e), run: None },
            }
        }
    }

    let mut run = None;
    if set.simulate {
        let result = match simulator::run(&s, &cfg.simulation_options()) {
            Ok(r) => r,
            Err(e) => return VerifyOutcome { report: report.fail(&e), run: None },
        };
        let speeds = MeasuredSpeeds::of(&result);
        let (rel, abs) = (set.speed_rel, set.speed_abs);
        report.checks.push(speed_check("prey_right_speed", speeds.prey_right, predictions.prey_right.value, rel, abs));
        report.checks.push(speed_check("prey_left_speed", speeds.prey_left, predictions.prey_left.value, rel, abs));
        let slack = set.predator_slack;
        report.checks.push(bound_check(
            "predator_right_bound",
            speeds.predator_right,
            predictions.predator_right_upper.value,
            slack,
            Side::Right,
        ));
        report.checks.push(bound_check(
            "predator_left_bound",
            speeds.predator_left,
            predictions.predator_left_upper.value,
            slack,
            Side::Left,
        ));
        let summary = match summarize(&s, &result, Some(&predictions), &set.hopf_cole_sides) {
            Ok(x) => x,
            Err(e) => return VerifyOutcome { report: report.fail(&e), run: None },
        };
        if set.check_terrace {
            if let Some(t) = &summary.terrace {
                report.checks.push(Check {
                    name: "terrace".into(),
                    passed: t.max_deviation.is_some_and(|d| d <= set.terrace),
                    measured: t.max_deviation,
                    expected: Some(0.0),
                    tolerance: Some(set.terrace),
                    detail: format!("cases {:?}", predictions.terrace.cases),
                });
            }
        }
        for g in &summary.hopf_cole {
            let rep = g.report;
            report.checks.push(Check {
                name: format!("hopf_cole_{}", side_name(g.side)),
                passed: rep.sup_gap.is_some_and(|x| x <= set.hopf_cole),
                measured: rep.sup_gap,
                expected: Some(0.0),
                tolerance: Some(set.hopf_cole),
                detail: format!("{} samples, {} skipped at the density floor", rep.samples, rep.skipped_floor),
            });
        }
        report.simulation = Some(summary);
        run = Some(result);
    }

    if report.checks.iter().any(|c| !c.passed) {
        report.status = Status::Mismatch;
        report.exit_code = Status::Mismatch.exit_code();
    }
    VerifyOutcome { report, run }
}

/// Measured speeds plus, when predictions are available, the terrace deviations
/// and Hopf-Cole gaps at the final time.
pub fn summarize(
    s: &Scenario,
    run: &RunResult,
    predictions: Option<&SpeedReport>,
    hopf_cole_sides: &[Side],
) -> Result<SimulationSummary> {
    let fin = &run.final_state;
    let grid = &run.plan.grid;
    let terrace = predictions
        .filter(|p| !p.terrace.plateaus.is_empty())
        .map(|p| simulator::terrace_check(&fin.u, grid, fin.t, &p.terrace));
    let mut hopf_cole = Vec::new();
    if predictions.is_some() {
        for &side in hopf_cole_sides {
            let profile = build_profile(s, side)?;
            hopf_cole.push(SideGap { side, report: simulator::hopf_cole_diagnostic(&fin.u, grid, fin.t, &profile) });
        }
    }
    Ok(SimulationSummary {
        grid_points: grid.n,
        dx: grid.dx,
        dt: run.plan.dt,
        half_length: grid.half_length,
        horizon: run.plan.horizon,
        steps: run.steps,
        max_clamp: run.max_clamp,
        speeds: MeasuredSpeeds::of(run),
        terrace,
        hopf_cole,
    })
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Right => "right",
        Side::Left => "left",
    }
}
