//! BV geometries `ζ` built from finitely many jumps and smooth monotone
//! pieces of a scalar coordinate `θ`, mapped to the parameter space by a
//! chart (the section itself, or the unit tangent `(cos θ, sin θ)`).

mod approximation;
mod pipe;

pub use approximation::{build_zeta_h, verify_conditions, ConditionReport, PiecewiseConstantZeta, ZetaJump};
pub use pipe::{curved_pipe_geometry, section_ramp, section_steps, PipeSegment};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coupling::Param;
use crate::error::{Error, Result};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// `ζ = θ` (sections, scalar product parameters).
    Scalar,
    /// `ζ = (cos θ, sin θ)`: pipe tangent with heading `θ`.
    UnitTangent,
}

impl Chart {
    pub fn map(&self, theta: f64) -> Param {
        match self {
            Chart::Scalar => State::new(&[theta]),
            Chart::UnitTangent => State::new(&[theta.cos(), theta.sin()]),
        }
    }

    /// `‖ζ(θ₁) − ζ(θ₀)‖`.
    pub fn chord(&self, theta0: f64, theta1: f64) -> f64 {
        match self {
            Chart::Scalar => (theta1 - theta0).abs(),
            Chart::UnitTangent => 2.0 * (0.5 * (theta1 - theta0)).sin().abs(),
        }
    }

    /// Unit vector `dζ/dθ`.
    fn direction(&self, theta: f64) -> Param {
        match self {
            Chart::Scalar => State::new(&[1.0]),
            Chart::UnitTangent => State::new(&[-theta.sin(), theta.cos()]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Constant `θ'` (circular arcs, linear section ramps).
    Linear,
    /// `θ' ∝ sin(π s)`, vanishing at both ends.
    CosineRamp,
}

impl Profile {
    /// Fraction of the increment reached at `s ∈ [0, 1]`.
    fn fraction(&self, s: f64) -> f64 {
        match self {
            Profile::Linear => s,
            Profile::CosineRamp => 0.5 * (1.0 - (PI * s).cos()),
        }
    }

    fn rate(&self, s: f64) -> f64 {
        match self {
            Profile::Linear => 1.0,
            Profile::CosineRamp => 0.5 * PI * (PI * s).sin(),
        }
    }

    /// Bound on `|d rate/ds|`.
    fn rate_lipschitz(&self) -> f64 {
        match self {
            Profile::Linear => 0.0,
            Profile::CosineRamp => 0.5 * PI * PI,
        }
    }

    fn max_rate(&self) -> f64 {
        match self {
            Profile::Linear => 1.0,
            Profile::CosineRamp => 0.5 * PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Piece {
    Jump { x: f64, dtheta: f64 },
    Smooth { a: f64, b: f64, dtheta: f64, profile: Profile },
}

impl Piece {
    fn start(&self) -> f64 {
        match *self {
            Piece::Jump { x, .. } => x,
            Piece::Smooth { a, .. } => a,
        }
    }

    fn end(&self) -> f64 {
        match *self {
            Piece::Jump { x, .. } => x,
            Piece::Smooth { b, .. } => b,
        }
    }
}

/// An atom of `Dζ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub left: Param,
    pub right: Param,
}

impl Atom {
    pub fn size(&self) -> f64 {
        self.left.dist(&self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothPart {
    pub a: f64,
    pub b: f64,
}

/// `Dζ = Σ (ζ(x+) − ζ(x−)) δ_x + v |μ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub atoms: Vec<Atom>,
    pub smooth: Vec<SmoothPart>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaGeometry {
    pub chart: Chart,
    pub theta_start: f64,
    pub pieces: Vec<Piece>,
}

impl ZetaGeometry {
    pub fn new(chart: Chart, theta_start: f64, mut pieces: Vec<Piece>) -> Result<Self> {
        if !theta_start.is_finite() {
            return Err(Error::Geometry("non-finite start value".into()));
        }
        // jumps first at a shared start so that `θ` accumulates them in order
        pieces.sort_by(|p, q| {
            p.start()
                .total_cmp(&q.start())
                .then_with(|| matches!(p, Piece::Smooth { .. }).cmp(&matches!(q, Piece::Smooth { .. })))
        });
        for p in &pieces {
            match *p {
                Piece::Jump { x, dtheta } if !(x.is_finite() && dtheta.is_finite()) => {
                    return Err(Error::Geometry(format!("non-finite jump {p:?}")));
                }
                Piece::Smooth { a, b, dtheta, .. } if !(a.is_finite() && b.is_finite() && dtheta.is_finite() && a < b) => {
                    return Err(Error::Geometry(format!("ill-formed smooth piece {p:?}")));
                }
                _ => {}
            }
        }
        for w in pieces.windows(2) {
            let overlap = match (w[0], w[1]) {
                (Piece::Jump { x: x0, .. }, Piece::Jump { x: x1, .. }) => x0 == x1,
                _ => w[1].start() < w[0].end(),
            };
            if overlap {
                return Err(Error::Geometry(format!("pieces {:?} and {:?} overlap", w[0], w[1])));
            }
        }
        Ok(Self { chart, theta_start, pieces })
    }

    pub fn constant(chart: Chart, theta: f64) -> Self {
        Self { chart, theta_start: theta, pieces: Vec::new() }
    }

    /// `θ(x)`, left-continuous.
    pub fn theta(&self, x: f64) -> f64 {
        let mut th = self.theta_start;
        for p in &self.pieces {
            match *p {
                Piece::Jump { x: xj, dtheta } => {
                    if xj < x {
                        th += dtheta;
                    } else {
                        break;
                    }
                }
                Piece::Smooth { a, b, dtheta, profile } => {
                    if x <= a {
                        break;
                    }
                    let s = ((x - a) / (b - a)).min(1.0);
                    th += dtheta * profile.fraction(s);
                    if x < b {
                        break;
                    }
                }
            }
        }
        th
    }

    /// `θ(x+)`.
    pub fn theta_right(&self, x: f64) -> f64 {
        let mut th = self.theta(x);
        for p in &self.pieces {
            if let Piece::Jump { x: xj, dtheta } = *p {
                if xj == x {
                    th += dtheta;
                }
            }
        }
        th
    }

    pub fn evaluate(&self, x: f64) -> Param {
        self.chart.map(self.theta(x))
    }

    pub fn right_limit(&self, x: f64) -> Param {
        self.chart.map(self.theta_right(x))
    }

    pub fn value_at_minus_infinity(&self) -> Param {
        self.chart.map(self.theta_start)
    }

    pub fn parameter_dim(&self) -> usize {
        self.chart.map(0.0).dim()
    }

    pub fn decomposition(&self) -> Decomposition {
        let mut atoms = Vec::new();
        let mut smooth = Vec::new();
        for p in &self.pieces {
            match *p {
                Piece::Jump { x, dtheta } if dtheta != 0.0 => {
                    let th = self.theta(x);
                    atoms.push(Atom { x, left: self.chart.map(th), right: self.chart.map(th + dtheta) });
                }
                Piece::Smooth { a, b, dtheta, .. } if dtheta != 0.0 => smooth.push(SmoothPart { a, b }),
                _ => {}
            }
        }
        Decomposition { atoms, smooth }
    }

    /// Direction `v(x)` and `|μ|`-density at `x` (zero off smooth pieces).
    pub fn density(&self, x: f64) -> (Param, f64) {
        for p in &self.pieces {
            if let Piece::Smooth { a, b, dtheta, profile } = *p {
                if a < x && x < b {
                    let rate = dtheta * profile.rate((x - a) / (b - a)) / (b - a);
                    let dir = self.chart.direction(self.theta(x)) * rate.signum();
                    return (dir, rate.abs());
                }
            }
        }
        (self.chart.direction(self.theta(x)), 0.0)
    }

    /// Largest `|μ|`-density and a Lipschitz bound of the density vector
    /// `dζ/dx` over all smooth pieces.
    pub(crate) fn density_bounds(&self) -> (f64, f64) {
        let mut max_rate: f64 = 0.0;
        let mut lip: f64 = 0.0;
        for p in &self.pieces {
            if let Piece::Smooth { a, b, dtheta, profile } = *p {
                let len = b - a;
                let r = dtheta.abs() * profile.max_rate() / len;
                max_rate = max_rate.max(r);
                // d/dx of (θ' e(θ)) = θ'' e + θ'² e⊥
                let second = dtheta.abs() * profile.rate_lipschitz() / (len * len);
                let curv = if self.chart == Chart::UnitTangent { r * r } else { 0.0 };
                lip = lip.max(second + curv);
            }
        }
        (max_rate, lip)
    }

    /// Atomic mass plus absolutely continuous mass of `|Dζ|` over `]a, b[`.
    pub fn variation_open(&self, a: f64, b: f64) -> f64 {
        self.variation_impl(a, b, false)
    }

    /// Variation over `[a, b[`: includes an atom sitting at `a`.
    pub fn variation_closed_open(&self, a: f64, b: f64) -> f64 {
        self.variation_impl(a, b, true)
    }

    fn variation_impl(&self, a: f64, b: f64, include_left: bool) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut tv = 0.0;
        let mut th_before = self.theta_start;
        for p in &self.pieces {
            match *p {
                Piece::Jump { x, dtheta } => {
                    if (x > a || (include_left && x == a)) && x < b {
                        tv += self.chart.chord(th_before, th_before + dtheta);
                    }
                    th_before += dtheta;
                }
                Piece::Smooth { a: pa, b: pb, dtheta, profile } => {
                    let lo = a.max(pa);
                    let hi = b.min(pb);
                    if hi > lo {
                        // monotone pieces: variation is |Δθ| over the overlap
                        let f0 = profile.fraction((lo - pa) / (pb - pa));
                        let f1 = profile.fraction((hi - pa) / (pb - pa));
                        tv += (dtheta * (f1 - f0)).abs();
                    }
                    th_before += dtheta;
                }
            }
        }
        tv
    }

    pub fn total_variation(&self) -> f64 {
        self.variation_open(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Support hull of all pieces, if any.
    pub fn extent(&self) -> Option<(f64, f64)> {
        let lo = self.pieces.iter().map(|p| p.start()).fold(f64::INFINITY, f64::min);
        let hi = self.pieces.iter().map(|p| p.end()).fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn heaviside_has_one_atom() {
        let z = ZetaGeometry::new(Chart::Scalar, 1.0, vec![Piece::Jump { x: 0.0, dtheta: 0.5 }]).unwrap();
        let d = z.decomposition();
        assert_eq!(d.atoms.len(), 1);
        assert!(d.smooth.is_empty());
        assert_eq!(z.evaluate(0.0)[0], 1.0);
        assert_eq!(z.right_limit(0.0)[0], 1.5);
        assert_eq!(z.density(0.3).1, 0.0);
    }

    #[test]
    fn clipped_identity_is_absolutely_continuous() {
        let z = ZetaGeometry::new(
            Chart::Scalar,
            0.0,
            vec![Piece::Smooth { a: 0.0, b: 1.0, dtheta: 1.0, profile: Profile::Linear }],
        )
        .unwrap();
        let d = z.decomposition();
        assert!(d.atoms.is_empty());
        assert_eq!(d.smooth.len(), 1);
        let (v, m) = z.density(0.4);
        assert_relative_eq!(m, 1.0);
        assert_relative_eq!(v[0], 1.0);
        assert_relative_eq!(z.total_variation(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(z.evaluate(0.25)[0], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn arc_density_is_curvature_along_normal() {
        let radius = 2.0;
        let angle = 0.6;
        let z = ZetaGeometry::new(
            Chart::UnitTangent,
            0.0,
            vec![Piece::Smooth { a: 0.0, b: radius * angle, dtheta: angle, profile: Profile::Linear }],
        )
        .unwrap();
        let x = 0.5;
        let (v, m) = z.density(x);
        assert_relative_eq!(m, 1.0 / radius, epsilon = 1e-14);
        let th = x / radius;
        assert_relative_eq!(v[0], -th.sin(), epsilon = 1e-14);
        assert_relative_eq!(v[1], th.cos(), epsilon = 1e-14);
        assert!((z.evaluate(x).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn variation_is_additive() {
        let z = ZetaGeometry::new(
            Chart::UnitTangent,
            0.1,
            vec![
                Piece::Jump { x: -1.0, dtheta: 0.3 },
                Piece::Smooth { a: 0.0, b: 2.0, dtheta: -0.4, profile: Profile::CosineRamp },
                Piece::Jump { x: 2.0, dtheta: 0.2 },
            ],
        )
        .unwrap();
        let atoms: f64 = z.decomposition().atoms.iter().map(|a| a.size()).sum();
        assert_relative_eq!(z.total_variation(), atoms + 0.4, epsilon = 1e-14);
        let split = z.variation_open(f64::NEG_INFINITY, 0.7) + z.variation_closed_open(0.7, f64::INFINITY);
        assert_relative_eq!(split, z.total_variation(), epsilon = 1e-14);
        assert_relative_eq!(z.variation_closed_open(2.0, 3.0), 2.0 * 0.1f64.sin(), epsilon = 1e-14);
        assert_eq!(z.variation_open(2.0, 3.0), 0.0);
    }

    #[test]
    fn rejects_overlaps() {
        let bad = ZetaGeometry::new(
            Chart::Scalar,
            1.0,
            vec![
                Piece::Smooth { a: 0.0, b: 1.0, dtheta: 0.1, profile: Profile::Linear },
                Piece::Jump { x: 0.5, dtheta: 0.1 },
            ],
        );
        assert!(bad.is_err());
    }
}
