use serde::{Deserialize, Serialize};

use crate::model::{FieldKind, HyperbolicModel};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontKind {
    Shock,
    Rarefaction,
    Contact,
    NonPhysical,
    ZeroWave,
}

impl FrontKind {
    pub fn is_physical(self) -> bool {
        matches!(self, FrontKind::Shock | FrontKind::Rarefaction | FrontKind::Contact)
    }

    /// Kind of a physical wave of the given family and size.
    pub fn of_wave(model: &dyn HyperbolicModel, family: usize, size: f64) -> Self {
        match model.field_kind(family) {
            FieldKind::LinearlyDegenerate => FrontKind::Contact,
            FieldKind::GenuinelyNonlinear if size < 0.0 => FrontKind::Shock,
            FieldKind::GenuinelyNonlinear => FrontKind::Rarefaction,
        }
    }
}

/// One discontinuity of the piecewise-constant approximation, moving on the
/// line `x0 + speed (t − t0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Front {
    pub kind: FrontKind,
    /// `None` for non-physical fronts and zero-waves.
    pub family: Option<usize>,
    pub x0: f64,
    pub t0: f64,
    pub speed: f64,
    pub left: State,
    pub right: State,
    /// Wave size `σ` for physical fronts, `‖Δu‖` for non-physical ones and
    /// `‖ζ(x+) − ζ(x−)‖` for zero-waves.
    pub size: f64,
    /// Index into the junction list for zero-waves.
    pub junction: Option<usize>,
    pub id: u64,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        if self.speed == 0.0 {
            self.x0
        } else {
            self.x0 + self.speed * (t - self.t0)
        }
    }

    pub fn strength(&self) -> f64 {
        self.size.abs()
    }

    pub fn jump(&self) -> f64 {
        self.left.dist(&self.right)
    }
}

/// Speed of a physical front. Shocks and rarefaction wavelets travel with the
/// chord `Δf₀/Δu₀` of the first conserved component (clamped to the
/// characteristic fan for wavelets), which keeps mass exactly balanced across
/// every physical front.
pub(crate) fn physical_speed(model: &dyn HyperbolicModel, kind: FrontKind, family: usize, left: &State, right: &State) -> f64 {
    let lo = model.lambda(family, left);
    let hi = model.lambda(family, right);
    let dm = right[0] - left[0];
    let chord = if dm.abs() > 1e-12 * left[0].abs().max(1.0) {
        Some((model.flux_unchecked(right)[0] - model.flux_unchecked(left)[0]) / dm)
    } else {
        None
    };
    match kind {
        FrontKind::Contact => lo,
        FrontKind::Shock => chord.unwrap_or(0.5 * (lo + hi)),
        FrontKind::Rarefaction => {
            let (a, b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            chord.map(|s| s.clamp(a, b)).unwrap_or(hi)
        }
        FrontKind::NonPhysical | FrontKind::ZeroWave => unreachable!("not a physical front"),
    }
}

/// Deterministic value in `[0, 1)` from a seed and a front id (splitmix64).
pub(crate) fn unit_hash(seed: u64, id: u64) -> f64 {
    let mut z = seed ^ id.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}
