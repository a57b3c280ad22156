use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum HabitatShape {
    Step,
    LogisticRamp { width: f64 },
}

/// Nonincreasing habitat quality `α(z)` with limits `α₋` at −∞ and `α₊` at +∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Habitat {
    pub shape: HabitatShape,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
}

impl Habitat {
    pub fn value(&self, z: f64) -> f64 {
        let (am, ap) = (self.alpha_minus, self.alpha_plus);
        match self.shape {
            HabitatShape::Step => {
                if z <= 0.0 {
                    am
                } else {
                    ap
                }
            }
            HabitatShape::LogisticRamp { width } => ap + (am - ap) * 0.5 * (1.0 - (2.0 * z / width).tanh()),
        }
    }

    pub fn max(&self) -> f64 {
        self.alpha_minus.max(self.alpha_plus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_and_monotonicity() {
        for shape in [HabitatShape::Step, HabitatShape::LogisticRamp { width: 5.0 }] {
            let h = Habitat { shape, alpha_minus: 1.5, alpha_plus: 1.0 };
            assert!((h.value(-1e3) - 1.5).abs() < 1e-12);
            assert!((h.value(1e3) - 1.0).abs() < 1e-12);
            let mut prev = f64::INFINITY;
            for i in 0..400 {
                let v = h.value(-20.0 + 0.1 * i as f64);
                assert!(v <= prev);
                prev = v;
            }
        }
        let ramp = Habitat { shape: HabitatShape::LogisticRamp { width: 5.0 }, alpha_minus: 1.5, alpha_plus: 1.0 };
        assert_eq!(ramp.value(0.0), 1.25);
    }
}
