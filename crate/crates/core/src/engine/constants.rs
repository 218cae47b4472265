//! Presampling of the interaction constant used to weight `Q` in `Υ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coupling::{junction_map, CouplingCondition, Param};
use crate::model::{FieldKind, HyperbolicModel};
use crate::riemann::{solve_generalized_riemann, solve_riemann, RiemannOptions};
use crate::state::State;

/// Largest observed `ΔV / (product of incoming strengths)` over random
/// approaching pairs of every type handled by the engine, accurate and
/// simplified. Failed solves are skipped.
pub fn presample_interaction_constant(
    model: &dyn HyperbolicModel,
    cond: &dyn CouplingCondition,
    junctions: &[(Param, Param)],
    reference: &State,
    amplitude: f64,
    samples: usize,
    seed: u64,
    opts: &RiemannOptions,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = model.dim();
    let i0 = model.split_index();
    let mut worst: f64 = 0.0;
    let perturb = |rng: &mut ChaCha8Rng| {
        let mut u = *reference;
        for k in 0..n {
            u[k] += amplitude * reference[k].abs().max(0.1) * rng.gen_range(-1.0..1.0);
        }
        u
    };
    let total_v = |sizes: &[f64]| sizes.iter().map(|s| s.abs()).sum::<f64>();
    for _ in 0..samples {
        let ul = perturb(&mut rng);
        if model.check(&ul).is_err() {
            continue;
        }
        let a = amplitude * rng.gen_range(-1.0..1.0);
        let b = amplitude * rng.gen_range(-1.0..1.0);
        // physical pair: family i on the left approaching family j ≤ i
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..=i);
        let same_gnl = i == j && model.field_kind(i) == FieldKind::GenuinelyNonlinear;
        let approaching = i > j || (same_gnl && a.min(b) < 0.0);
        if approaching {
            if let Ok(ur) = model.lax_curve(i, a, &ul).and_then(|um| model.lax_curve(j, b, &um)) {
                if let Ok(dec) = solve_riemann(model, &ul, &ur, opts) {
                    worst = worst.max((total_v(&dec.sizes()) - a.abs() - b.abs()) / (a * b).abs());
                }
                // simplified solver: the non-physical remainder
                let simple = if i > j {
                    model.lax_curve(j, b, &ul).and_then(|w| model.lax_curve(i, a, &w))
                } else {
                    model.lax_curve(i, a + b, &ul)
                };
                if let Ok(w) = simple {
                    worst = worst.max(w.dist(&ur) / (a * b).abs());
                }
            }
        }
        // non-physical front crossing a physical one
        let eta = amplitude * amplitude * rng.gen_range(0.01..1.0);
        let mut dir = State::zeros(n);
        for k in 0..n {
            dir[k] = rng.gen_range(-1.0..1.0);
        }
        let um = ul + dir.normalized() * eta;
        if let (Ok(ur), Ok(w)) = (model.lax_curve(j, b, &um), model.lax_curve(j, b, &ul)) {
            worst = worst.max((w.dist(&ur) - eta) / (eta * b.abs()));
        }
        if junctions.is_empty() {
            continue;
        }
        let (zp, zm) = junctions[rng.gen_range(0..junctions.len())];
        let dz = zp.dist(&zm);
        if dz == 0.0 {
            continue;
        }
        // wave hitting a junction from the left (right-moving family)
        let fam = rng.gen_range(i0..n);
        let hit_left = model.lax_curve(fam, a, &ul).and_then(|um| junction_map(model, cond, &zp, &zm, &um, &opts.junction));
        if let Ok(ur) = hit_left {
            if let Ok(dec) = solve_generalized_riemann(model, cond, &zp, &zm, &ul, &ur, opts) {
                worst = worst.max((total_v(&dec.sizes()) - a.abs()) / (a.abs() * dz));
            }
            let simple = junction_map(model, cond, &zp, &zm, &ul, &opts.junction).and_then(|t| model.lax_curve(fam, a, &t));
            if let Ok(w) = simple {
                worst = worst.max(w.dist(&ur) / (a.abs() * dz));
            }
        }
        // wave hitting a junction from the right (left-moving family)
        let fam = rng.gen_range(0..i0);
        let hit_right = junction_map(model, cond, &zp, &zm, &ul, &opts.junction).and_then(|um| model.lax_curve(fam, b, &um));
        if let Ok(ur) = hit_right {
            if let Ok(dec) = solve_generalized_riemann(model, cond, &zp, &zm, &ul, &ur, opts) {
                worst = worst.max((total_v(&dec.sizes()) - b.abs()) / (b.abs() * dz));
            }
            let simple = model
                .lax_curve(fam, b, &ul)
                .and_then(|w| junction_map(model, cond, &zp, &zm, &w, &opts.junction));
            if let Ok(w) = simple {
                worst = worst.max(w.dist(&ur) / (b.abs() * dz));
            }
        }
        // non-physical front crossing a junction
        let um = ul + dir.normalized() * eta;
        if let (Ok(tl), Ok(tm)) = (
            junction_map(model, cond, &zp, &zm, &ul, &opts.junction),
            junction_map(model, cond, &zp, &zm, &um, &opts.junction),
        ) {
            worst = worst.max((tm.dist(&tl) - eta) / (eta * dz));
        }
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}
