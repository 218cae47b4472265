use serde::{Deserialize, Serialize};

use super::HyperbolicModel;
use crate::error::{Error, Result};
use crate::state::State;

/// Max-norm ball of radius `radius` around `reference` in the model's scaled
/// coordinates (relative density, velocity over sound speed, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub reference: State,
    pub radius: f64,
}

impl Neighborhood {
    pub fn new(model: &dyn HyperbolicModel, reference: State, radius: f64) -> Result<Self> {
        model.check(&reference)?;
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::Config(format!("neighborhood radius must lie in (0, 1), got {radius}")));
        }
        let nb = Self { reference, radius };
        for corner in nb.grid(model) {
            model.eigen(&corner).map_err(|e| Error::Config(format!("neighborhood not hyperbolic: {e}")))?;
        }
        Ok(nb)
    }

    pub fn contains(&self, model: &dyn HyperbolicModel, u: &State) -> bool {
        if model.check(u).is_err() {
            return false;
        }
        let w = model.scaled_coordinates(u, &self.reference);
        w.as_slice().iter().all(|x| x.abs() <= self.radius)
    }

    /// Corner, edge-midpoint and centre samples (3^n points).
    fn grid(&self, model: &dyn HyperbolicModel) -> Vec<State> {
        let n = model.dim();
        let total = 3usize.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut w = State::zeros(n);
                for k in 0..n {
                    w[k] = (code % 3) as f64 - 1.0;
                    code /= 3;
                }
                model.from_scaled_coordinates(&(w * self.radius), &self.reference)
            })
            .collect()
    }

    /// Largest characteristic speed magnitude over the sample grid.
    pub fn max_speed(&self, model: &dyn HyperbolicModel) -> f64 {
        self.grid(model)
            .iter()
            .flat_map(|u| model.eigenvalues(u).as_slice().to_vec())
            .fold(0.0, |m: f64, l| m.max(l.abs()))
    }

    /// Speed assigned to non-physical fronts: strictly above every
    /// characteristic speed in the neighborhood.
    pub fn lambda_hat(&self, model: &dyn HyperbolicModel) -> f64 {
        1.2 * self.max_speed(model)
    }
}
