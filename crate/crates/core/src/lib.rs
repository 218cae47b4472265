//! Wave-front tracking for one-dimensional balance laws with a
//! non-conservative coupling source `Ξ(ζ(x+), ζ(x), u) + D⁺Ξ · Dζ`.

pub mod coupling;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod model;
pub mod numerics;
pub mod riemann;
pub mod scenario;
pub mod state;
pub mod verify;

pub use error::{Error, ErrorClass, Result};
pub use state::State;
