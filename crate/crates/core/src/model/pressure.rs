use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `p(ρ) = κ ρ^γ` with `κ > 0`, `γ ≥ 1`, so that `p' ≥ 0` and `p'' ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaLaw {
    pub kappa: f64,
    pub gamma: f64,
}

impl Default for GammaLaw {
    fn default() -> Self {
        Self { kappa: 1.0, gamma: 2.0 }
    }
}

impl GammaLaw {
    pub fn new(kappa: f64, gamma: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite() && gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("gamma law needs kappa > 0 and gamma >= 1, got {kappa}, {gamma}")));
        }
        Ok(Self { kappa, gamma })
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.kappa * rho.powf(self.gamma)
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        self.kappa * self.gamma * rho.powf(self.gamma - 1.0)
    }

    pub fn second_derivative(&self, rho: f64) -> f64 {
        self.kappa * self.gamma * (self.gamma - 1.0) * rho.powf(self.gamma - 2.0)
    }

    pub fn sound_speed(&self, rho: f64) -> f64 {
        self.derivative(rho).sqrt()
    }

    /// Inverse of the sound speed, `ρ(c)`; only for `γ > 1`.
    pub(crate) fn density_from_sound_speed(&self, c: f64) -> f64 {
        (c * c / (self.kappa * self.gamma)).powf(1.0 / (self.gamma - 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_and_convex_on_samples() {
        for law in [GammaLaw::default(), GammaLaw::new(0.7, 1.4).unwrap(), GammaLaw::new(1.0, 1.0).unwrap()] {
            for k in 1..200 {
                let rho = k as f64 * 0.05;
                assert!(law.derivative(rho) >= 0.0);
                assert!(law.second_derivative(rho) >= 0.0);
                let h = 1e-6;
                let fd = (law.pressure(rho + h) - law.pressure(rho - h)) / (2.0 * h);
                assert!((fd - law.derivative(rho)).abs() < 1e-6 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GammaLaw::new(-1.0, 2.0).is_err());
        assert!(GammaLaw::new(1.0, 0.5).is_err());
    }
}
