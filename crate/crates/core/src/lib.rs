//! Spreading speeds of a prey-predator system with nonlocal dispersal in a
//! habitat that shifts at constant speed: the explicit speed formulas, the
//! region classification behind them, certified viscosity profiles, and a
//! direct simulator to check all of it against.

pub mod classifier;
pub mod config;
pub mod error;
pub mod hamiltonians;
pub mod kernels;
pub mod quadrature;
pub mod roots;
pub mod simulator;
pub mod solve;
pub mod verify;
pub mod viscosity;

pub use classifier::{
    predator_upper_bounds, prey_speeds, speed_report, terrace_prediction, validate, AssumptionReport, BranchSpeed,
    Region, Scenario, Side, Species, SpeciesParams, SpeedGeometry, SpeedReport,
};
pub use config::{Format, ScenarioConfig};
pub use error::{Error, Result};
pub use hamiltonians::{Decay, HamiltonianEnv, MinSpeed};
pub use kernels::{KernelFamily, KernelSpec};
pub use roots::SpeciesPair;
pub use simulator::{run, RunResult, SimulationOptions};
pub use verify::{verify, Status, VerifyReport};
pub use viscosity::{build_profile, PiecewiseProfile};
