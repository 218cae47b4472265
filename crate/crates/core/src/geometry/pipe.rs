use serde::{Deserialize, Serialize};

use super::{Chart, Piece, Profile, ZetaGeometry};
use crate::error::{Error, Result};

/// One piece of a planar pipe parametrized by arclength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PipeSegment {
    Straight { length: f64 },
    /// Circular arc turning by `angle` (signed, radians).
    Arc { radius: f64, angle: f64 },
    /// Corner turning the heading by `angle`.
    Kink { angle: f64 },
}

/// Unit tangent `ζ = Γ'` of a pipe starting at arclength `start` with
/// heading `heading`: kinks become atoms, arcs a density equal to the
/// curvature.
pub fn curved_pipe_geometry(start: f64, heading: f64, segments: &[PipeSegment]) -> Result<ZetaGeometry> {
    let mut pieces = Vec::new();
    let mut s = start;
    for seg in segments {
        match *seg {
            PipeSegment::Straight { length } => {
                if !(length >= 0.0 && length.is_finite()) {
                    return Err(Error::Geometry(format!("straight segment of length {length}")));
                }
                s += length;
            }
            PipeSegment::Arc { radius, angle } => {
                if !(radius > 0.0 && radius.is_finite() && angle.is_finite()) {
                    return Err(Error::Geometry(format!("arc with radius {radius} and angle {angle}")));
                }
                if angle != 0.0 {
                    let len = radius * angle.abs();
                    pieces.push(Piece::Smooth { a: s, b: s + len, dtheta: angle, profile: Profile::Linear });
                    s += len;
                }
            }
            PipeSegment::Kink { angle } => {
                if !(angle.is_finite() && angle.abs() < std::f64::consts::PI) {
                    return Err(Error::Geometry(format!("kink angle {angle} out of range")));
                }
                pieces.push(Piece::Jump { x: s, dtheta: angle });
            }
        }
    }
    let geom = ZetaGeometry::new(Chart::UnitTangent, heading, pieces)?;
    // the tangent is unit by construction; sample it anyway
    if let Some((lo, hi)) = geom.extent() {
        for k in 0..=100 {
            let x = lo - 1.0 + (hi - lo + 2.0) * k as f64 / 100.0;
            let n = geom.evaluate(x).norm();
            if (n - 1.0).abs() > 1e-8 {
                return Err(Error::Geometry(format!("tangent norm {n} at {x}")));
            }
        }
    }
    Ok(geom)
}

/// Piecewise-constant section: starts at `a0`, switches to `a` at each `x`.
pub fn section_steps(a0: f64, steps: &[(f64, f64)]) -> Result<ZetaGeometry> {
    if !(a0 > 0.0) {
        return Err(Error::Geometry(format!("section {a0} must be positive")));
    }
    let mut prev = a0;
    let mut pieces = Vec::new();
    for &(x, a) in steps {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Geometry(format!("section {a} must be positive")));
        }
        pieces.push(Piece::Jump { x, dtheta: a - prev });
        prev = a;
    }
    ZetaGeometry::new(Chart::Scalar, a0, pieces)
}

/// Smooth section change from `a0` to `a1` over `[x0, x1]`.
pub fn section_ramp(a0: f64, a1: f64, x0: f64, x1: f64, profile: Profile) -> Result<ZetaGeometry> {
    if !(a0 > 0.0 && a1 > 0.0) {
        return Err(Error::Geometry(format!("sections {a0}, {a1} must be positive")));
    }
    ZetaGeometry::new(Chart::Scalar, a0, vec![Piece::Smooth { a: x0, b: x1, dtheta: a1 - a0, profile }])
}
