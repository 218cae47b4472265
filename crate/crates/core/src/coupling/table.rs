use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{CouplingCondition, SectionCondition, SectionGas, SectionVariant};
use crate::error::Result;
use crate::model::GammaLaw;
use crate::state::State;

/// One comparison of `∂₁Ξ₂(a, a, (ρ, q))` by central differences against the
/// closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub variant: SectionVariant,
    pub a: f64,
    pub rho: f64,
    pub q: f64,
    pub finite_difference: f64,
    pub formula: f64,
    pub relative_error: f64,
}

/// Samples `samples` subsonic states per variant and compares derivatives.
pub fn check_table_a(law: GammaLaw, samples: usize, seed: u64) -> Result<Vec<TableRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, f64, f64)> = (0..samples)
        .map(|_| {
            let a = rng.gen_range(0.5..2.0);
            let rho = rng.gen_range(0.5..1.5);
            let q = rng.gen_range(0.05..0.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (a, rho, q)
        })
        .collect();
    let mut rows = Vec::with_capacity(4 * samples);
    for variant in SectionVariant::ALL {
        let cond = SectionCondition::new(variant, SectionGas::Isentropic(law));
        for &(a, rho, q) in &draws {
            let u = State::new(&[rho, q]);
            let h = 1e-5 * a;
            let zm = State::new(&[a]);
            let up = cond.evaluate(&State::new(&[a + h]), &zm, &u)?;
            let dn = cond.evaluate(&State::new(&[a - h]), &zm, &u)?;
            let fd = (up[1] - dn[1]) / (2.0 * h);
            let formula = variant.momentum_derivative(a, rho, q, law.pressure(rho));
            let diff = (fd - formula).abs();
            let relative_error = if formula != 0.0 { diff / formula.abs() } else { diff };
            rows.push(TableRow { variant, a, rho, q, finite_difference: fd, formula, relative_error });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_rows_agree() {
        let rows = check_table_a(GammaLaw::default(), 10, 7).unwrap();
        assert_eq!(rows.len(), 40);
        for r in rows {
            assert!(r.relative_error < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn smooth_limit_slope_at_reference_state() {
        let rows = check_table_a(GammaLaw::default(), 1, 1).unwrap();
        let s = rows.iter().find(|r| r.variant == SectionVariant::S).unwrap();
        assert!((s.formula + s.q * s.q / (s.a * s.rho)).abs() < 1e-15);
    }
}
