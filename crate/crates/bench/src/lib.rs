//! Shared fixtures for the criterion benches.

use shiftspread::{Decay, KernelSpec, Scenario, SpeciesParams};

/// Prey `d = r = 1`, predator `d = 0.2, r = 0.5`, uniform kernels of half-width 1.
pub fn reference(c_e: f64, lambda_right: Decay, lambda_left: Decay) -> Scenario {
    let k = KernelSpec::uniform(1.0).expect("valid kernel");
    Scenario {
        prey: SpeciesParams { d: 1.0, r: 1.0, kernel: k, lambda_right, lambda_left },
        predator: SpeciesParams {
            d: 0.2,
            r: 0.5,
            kernel: k,
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
