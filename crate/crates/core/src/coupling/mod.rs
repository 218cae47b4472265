//! Coupling conditions `Ξ(z⁺, z⁻, u⁻) = f(u⁺) − f(u⁻)` at junctions and the
//! junction map `T` solving them for `u⁺`.

mod kink;
mod junction;
mod product;
mod profile;
mod section;
mod table;

pub use junction::{junction_map, JunctionOptions};
pub use kink::{KinkCondition, KinkLaw};
pub use product::{ProductCondition, ProductLaw};
pub use profile::{
    stationary_profile, stationary_profile_primitive, stationary_profile_refined, SectionGas,
    PROFILE_BASE_STEPS, PROFILE_TOLERANCE,
};
pub use section::{SectionCondition, SectionVariant};
pub use table::{check_table_a, TableRow};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::state::State;

/// Junction parameters live in a small vector space: unit tangents in `R²`
/// for pipe kinks, a scalar section for varying cross-sections.
pub type Param = State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    /// `Ξ` is differentiable in `z⁺` at `z⁺ = z⁻`.
    Differentiable,
    /// Only one-sided directional derivatives exist.
    DiniOnly,
}

pub trait CouplingCondition: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    fn parameter_dim(&self) -> usize;

    fn smoothness(&self) -> Smoothness;

    /// Rejects parameters outside the admissible set (non-unit tangents,
    /// non-positive sections).
    fn validate_parameter(&self, z: &Param) -> Result<()>;

    /// `Ξ(z⁺, z⁻, u)`.
    fn evaluate(&self, z_plus: &Param, z_minus: &Param, u: &State) -> Result<State>;

    /// `D⁺_v Ξ(z, z, u)`.
    fn dini(&self, z: &Param, v: &Param, u: &State) -> Result<State>;
}
