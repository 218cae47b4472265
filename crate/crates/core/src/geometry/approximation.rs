//! Piecewise-constant approximation `ζʰ` with its seven construction
//! conditions checked on every build.

use serde::Serialize;

use super::{Chart, Piece, ZetaGeometry};
use crate::coupling::Param;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantZeta {
    pub h: f64,
    pub chart: Chart,
    /// `x₁ < … < x_{N−1}`
    pub breakpoints: Vec<f64>,
    /// `values[k]` holds on `(x_k, x_{k+1}]` with `x₀ = −∞`; one more entry
    /// than breakpoints.
    pub values: Vec<Param>,
    /// Positions of the retained jumps `𝓘ʰ`.
    pub retained: Vec<f64>,
}

/// A jump of `ζʰ`: the location of a zero-wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaJump {
    pub x: f64,
    pub z_minus: Param,
    pub z_plus: Param,
}

impl PiecewiseConstantZeta {
    /// Left-continuous evaluation.
    pub fn evaluate(&self, x: f64) -> Param {
        let k = self.breakpoints.partition_point(|&b| b < x);
        self.values[k]
    }

    pub fn jumps(&self) -> Vec<ZetaJump> {
        self.breakpoints
            .iter()
            .enumerate()
            .filter(|(k, _)| self.values[*k] != self.values[k + 1])
            .map(|(k, &x)| ZetaJump { x, z_minus: self.values[k], z_plus: self.values[k + 1] })
            .collect()
    }

    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }

    /// Variation over `[y, x[`.
    pub fn variation_closed_open(&self, y: f64, x: f64) -> f64 {
        self.breakpoints
            .iter()
            .enumerate()
            .filter(|(_, &b)| y <= b && b < x)
            .map(|(k, _)| self.values[k].dist(&self.values[k + 1]))
            .sum()
    }
}

/// Outcome of the condition checks, with the worst observed quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// (i) breakpoints bracket `[−1/h, 1/h]`
    pub range: bool,
    /// (ii) variation of omitted jumps
    pub omitted_tail: f64,
    /// (iii) worst ratio of pre-jump variation to `h/(1 + #𝓘ʰ)`
    pub pre_jump_ratio: f64,
    /// (iv) largest open-interval variation
    pub max_open_variation: f64,
    /// (vi) largest certified density oscillation
    pub max_oscillation: f64,
    /// (vii) largest spacing
    pub max_spacing: f64,
    pub h: f64,
}

impl ConditionReport {
    /// (v) is vacuous for jump-plus-density geometries.
    pub fn all_hold(&self) -> bool {
        self.range
            && self.omitted_tail < self.h
            && self.pre_jump_ratio < 1.0
            && self.max_open_variation < self.h
            && self.max_oscillation < self.h
            && self.max_spacing < self.h
    }
}

fn smooth_ends(zeta: &ZetaGeometry) -> Vec<f64> {
    zeta.pieces
        .iter()
        .filter_map(|p| match *p {
            Piece::Smooth { a, b, .. } => Some([a, b]),
            _ => None,
        })
        .flatten()
        .collect()
}

fn jump_list(zeta: &ZetaGeometry) -> Vec<(f64, f64)> {
    zeta.decomposition().atoms.iter().map(|a| (a.x, a.size())).collect()
}

/// Which jumps enter `𝓘ʰ`: the large ones, then more (largest first) until
/// the omitted tail drops below `h`.
fn select_jumps(jumps: &[(f64, f64)], h: f64) -> Vec<f64> {
    if jumps.is_empty() {
        return Vec::new();
    }
    let threshold = h / (2.0 * jumps.len() as f64);
    let mut keep: Vec<bool> = jumps.iter().map(|&(_, s)| s >= threshold).collect();
    let mut order: Vec<usize> = (0..jumps.len()).collect();
    order.sort_by(|&a, &b| jumps[b].1.total_cmp(&jumps[a].1));
    let tail = |keep: &[bool]| -> f64 { jumps.iter().zip(keep).filter(|(_, k)| !**k).map(|(j, _)| j.1).sum() };
    for &k in &order {
        if tail(&keep) < h {
            break;
        }
        keep[k] = true;
    }
    jumps.iter().zip(&keep).filter(|(_, k)| **k).map(|(j, _)| j.0).collect()
}

/// Certified oscillation of `dζ/dx` on `]a, b[` (zero when the interval meets
/// no smooth piece).
fn oscillation(zeta: &ZetaGeometry, lip: f64, a: f64, b: f64) -> f64 {
    let touches = zeta.pieces.iter().any(|p| matches!(*p, Piece::Smooth { a: pa, b: pb, .. } if pa < b && a < pb));
    if touches {
        lip * (b - a)
    } else {
        0.0
    }
}

pub fn verify_conditions(zeta: &ZetaGeometry, zh: &PiecewiseConstantZeta) -> ConditionReport {
    let h = zh.h;
    let bp = &zh.breakpoints;
    let (_, lip) = zeta.density_bounds();
    let retained_count = zh.retained.len() as f64;
    let range = !bp.is_empty() && bp[0] < -1.0 / h && *bp.last().unwrap() > 1.0 / h;
    let omitted_tail: f64 = jump_list(zeta)
        .iter()
        .filter(|(x, _)| !zh.retained.contains(x))
        .map(|(_, s)| s)
        .sum();
    let mut pre_jump_ratio: f64 = 0.0;
    for &xj in &zh.retained {
        let i = bp.partition_point(|&b| b < xj);
        if i == 0 || bp[i] != xj {
            pre_jump_ratio = f64::INFINITY;
            continue;
        }
        let tv = zeta.variation_closed_open(bp[i - 1], xj);
        pre_jump_ratio = pre_jump_ratio.max(tv / (h / (1.0 + retained_count)));
    }
    let mut max_open_variation: f64 = 0.0;
    let mut max_oscillation: f64 = 0.0;
    let mut max_spacing: f64 = 0.0;
    for w in bp.windows(2) {
        max_open_variation = max_open_variation.max(zeta.variation_open(w[0], w[1]));
        max_oscillation = max_oscillation.max(oscillation(zeta, lip, w[0], w[1]));
        max_spacing = max_spacing.max(w[1] - w[0]);
    }
    ConditionReport { range, omitted_tail, pre_jump_ratio, max_open_variation, max_oscillation, max_spacing, h }
}

/// Grid spacing as a fraction of `h`.
pub const GRID_FRACTION: f64 = 0.45;

/// Builds `ζʰ`: uniform grid of spacing `< h` over `[−1/h, 1/h]`, retained
/// jumps with a close predecessor point, smooth-piece endpoints, then
/// bisection of every interval that violates a condition.
pub fn build_zeta_h(zeta: &ZetaGeometry, h: f64) -> Result<PiecewiseConstantZeta> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Geometry(format!("mesh parameter {h} must be positive")));
    }
    let tv = zeta.total_variation();
    if !tv.is_finite() {
        return Err(Error::Geometry("geometry has infinite variation".into()));
    }
    let jumps = jump_list(zeta);
    let retained = select_jumps(&jumps, h);
    let (max_rate, lip) = zeta.density_bounds();
    let budget = h / (1.0 + retained.len() as f64);

    let mut lo = -1.0 / h;
    let mut hi = 1.0 / h;
    for &x in &retained {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    lo -= 0.5 * h;
    hi += 0.5 * h;
    // lattice anchored at the origin, so the grid for h/2 refines the one for h
    let spacing = GRID_FRACTION * h;
    let first = (lo / spacing).floor() as i64;
    let last = (hi / spacing).ceil() as i64;
    let mut points: Vec<f64> = (first..=last).map(|k| k as f64 * spacing).collect();
    points.extend(smooth_ends(zeta).into_iter().filter(|x| (lo..=hi).contains(x)));
    let all_atoms: Vec<f64> = jumps.iter().map(|j| j.0).collect();
    for &xj in &retained {
        points.push(xj);
        let prev_atom = all_atoms.iter().copied().filter(|&a| a < xj).fold(f64::NEG_INFINITY, f64::max);
        let mut eta = 0.5 * h;
        if prev_atom.is_finite() {
            eta = eta.min(0.5 * (xj - prev_atom));
        }
        if max_rate > 0.0 {
            eta = eta.min(0.5 * budget / max_rate);
        }
        points.push(xj - eta);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    // bisect until (iii), (iv), (vi), (vii) hold
    for _ in 0..60 {
        let mut extra = Vec::new();
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let bad = b - a >= h
                || zeta.variation_open(a, b) >= h
                || oscillation(zeta, lip, a, b) >= h
                || (retained.contains(&b) && zeta.variation_closed_open(a, b) >= budget);
            if bad {
                extra.push(0.5 * (a + b));
            }
        }
        if extra.is_empty() {
            break;
        }
        points.extend(extra);
        points.sort_by(f64::total_cmp);
        points.dedup();
    }

    let mut values = Vec::with_capacity(points.len() + 1);
    values.push(zeta.value_at_minus_infinity());
    values.extend(points.iter().map(|&x| zeta.right_limit(x)));
    let zh = PiecewiseConstantZeta { h, chart: zeta.chart, breakpoints: points, values, retained };
    let report = verify_conditions(zeta, &zh);
    if !report.all_hold() {
        return Err(Error::Internal(format!("approximation conditions violated: {report:?}")));
    }
    Ok(zh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curved_pipe_geometry, PipeSegment, Profile};
    use approx::assert_relative_eq;

    #[test]
    fn constant_geometry_gives_constant_approximation() {
        let z = ZetaGeometry::constant(Chart::Scalar, 1.5);
        for h in [0.5, 0.1] {
            let zh = build_zeta_h(&z, h).unwrap();
            assert!(zh.jumps().is_empty());
            assert_eq!(zh.evaluate(0.3)[0], 1.5);
        }
    }

    #[test]
    fn large_jump_is_retained_exactly() {
        let z = ZetaGeometry::new(Chart::Scalar, 1.0, vec![Piece::Jump { x: 0.2, dtheta: 0.3 }]).unwrap();
        let zh = build_zeta_h(&z, 0.1).unwrap();
        assert_eq!(zh.retained, vec![0.2]);
        let j = zh.jumps();
        assert_eq!(j.len(), 1);
        assert_eq!(j[0].x, 0.2);
        assert_eq!(j[0].z_minus[0], 1.0);
        assert_relative_eq!(j[0].z_plus[0], 1.3, epsilon = 1e-15);
        assert_eq!(zh.evaluate(0.2)[0], 1.0);
    }

    #[test]
    fn linear_ramp_staircase() {
        let z = ZetaGeometry::new(
            Chart::Scalar,
            0.0,
            vec![Piece::Smooth { a: 0.0, b: 1.0, dtheta: 1.0, profile: Profile::Linear }],
        )
        .unwrap();
        let h = 0.1;
        let zh = build_zeta_h(&z, h).unwrap();
        for j in zh.jumps() {
            assert!(j.z_minus.dist(&j.z_plus) < h);
        }
        assert!(zh.total_variation() <= z.total_variation() + h);
        assert!(verify_conditions(&z, &zh).all_hold());
    }

    #[test]
    fn local_variation_estimate() {
        let z = curved_pipe_geometry(
            -1.0,
            0.0,
            &[
                PipeSegment::Straight { length: 0.5 },
                PipeSegment::Kink { angle: 0.3 },
                PipeSegment::Arc { radius: 2.0, angle: -0.5 },
                PipeSegment::Kink { angle: 0.01 },
            ],
        )
        .unwrap();
        for h in [0.2, 0.1, 0.05] {
            let zh = build_zeta_h(&z, h).unwrap();
            for k in 0..40 {
                let y = -1.5 + 0.07 * k as f64;
                for len in [0.05, 0.3, 1.1] {
                    let x = y + len;
                    assert!(zh.variation_closed_open(y, x) <= h + z.variation_open(y, x) + 1e-12, "y={y} x={x} h={h}");
                }
            }
        }
    }

    #[test]
    fn approximation_converges_in_l1() {
        let z = curved_pipe_geometry(-0.5, 0.2, &[PipeSegment::Arc { radius: 1.0, angle: 0.8 }, PipeSegment::Kink { angle: -0.4 }])
            .unwrap();
        let err = |h: f64| {
            let zh = build_zeta_h(&z, h).unwrap();
            let n = 20000;
            let (a, b) = (-2.0, 2.0);
            let dx = (b - a) / n as f64;
            (0..n).map(|k| a + (k as f64 + 0.5) * dx).map(|x| zh.evaluate(x).dist(&z.evaluate(x)) * dx).sum::<f64>()
        };
        let mut prev = err(0.2);
        for h in [0.1, 0.05, 0.025] {
            let e = err(h);
            assert!(e <= prev, "h={h}: {e} vs {prev}");
            prev = e;
        }
    }
}
