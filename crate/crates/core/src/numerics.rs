//! Small numerical kernels: dense solves, damped Newton, bracketed scalar
//! roots and fixed quadrature rules.

use nalgebra::{DMatrix, DVector};

/// Solves `a x = b` for a small dense system. `None` when singular.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let rhs = DVector::from_column_slice(b);
    let sol = m.lu().solve(&rhs)?;
    if sol.iter().all(|x| x.is_finite()) {
        Some(sol.iter().copied().collect())
    } else {
        None
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Forward-difference step for the Jacobian.
    pub fd_step: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_iterations: 50, fd_step: 1e-7, max_halvings: 12 }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton with a forward-difference Jacobian.
///
/// `f` returns `None` when evaluated outside its domain; such trial points are
/// treated like a residual increase and trigger step halving.
pub fn newton_fd<F>(mut f: F, x0: &[f64], opts: NewtonOptions) -> Result<NewtonOutcome, String>
where
    F: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x).ok_or_else(|| "initial point outside domain".to_string())?;
    let mut res = norm(&fx);
    for it in 0..opts.max_iterations {
        if res <= opts.tolerance {
            return Ok(NewtonOutcome { x, residual: res, iterations: it });
        }
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let step = opts.fd_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += step;
            let fp = match f(&xp) {
                Some(v) => v,
                None => {
                    xp[j] = x[j] - step;
                    let fm = f(&xp).ok_or_else(|| "Jacobian probe outside domain".to_string())?;
                    for i in 0..n {
                        jac[i][j] = (fx[i] - fm[i]) / step;
                    }
                    continue;
                }
            };
            for i in 0..n {
                jac[i][j] = (fp[i] - fx[i]) / step;
            }
        }
        let neg: Vec<f64> = fx.iter().map(|v| -v).collect();
        let dx = solve_dense(&jac, &neg).ok_or_else(|| "singular Jacobian".to_string())?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + lambda * d).collect();
            if let Some(ft) = f(&trial) {
                let rt = norm(&ft);
                if rt < res || rt <= opts.tolerance {
                    x = trial;
                    fx = ft;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if res <= opts.tolerance * 100.0 {
                return Ok(NewtonOutcome { x, residual: res, iterations: it });
            }
            return Err(format!("line search stalled at residual {res:e}"));
        }
    }
    if res <= opts.tolerance {
        Ok(NewtonOutcome { x, residual: res, iterations: opts.max_iterations })
    } else {
        Err(format!("no convergence after {} iterations (residual {res:e})", opts.max_iterations))
    }
}

/// Root of a scalar function on `[lo, hi]` by Newton steps safeguarded with
/// bisection. `g(lo)` and `g(hi)` must have opposite signs.
pub fn bracketed_root<G>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    G: Fn(f64) -> f64,
{
    let mut glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Some(lo);
    }
    if ghi == 0.0 {
        return Some(hi);
    }
    if glo.signum() == ghi.signum() || !glo.is_finite() || !ghi.is_finite() {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return Some(x);
        }
        if gx.signum() == glo.signum() {
            lo = x;
            glo = gx;
        } else {
            hi = x;
        }
        let h = 1e-7 * x.abs().max(1e-3);
        let d = (g(x + h) - g(x - h)) / (2.0 * h);
        let mut next = x - gx / d;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol * x.abs().max(1.0) {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

/// Nodes and weights of the 5-point Gauss-Legendre rule on [-1, 1].
pub const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Composite 5-point Gauss-Legendre quadrature with `panels` equal panels.
pub fn gauss_composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in GAUSS5 {
            sum += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * sum
}

/// Composite Simpson rule on an odd number of equally spaced samples.
pub fn simpson(samples: &[f64], h: f64) -> f64 {
    assert!(samples.len() >= 3 && samples.len() % 2 == 1, "Simpson needs an odd sample count");
    let last = samples.len() - 1;
    let mut sum = samples[0] + samples[last];
    for (k, v) in samples.iter().enumerate().take(last).skip(1) {
        sum += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_solves_small_system() {
        let out = newton_fd(
            |x| Some(vec![x[0] * x[0] + x[1] - 3.0, x[0] - x[1] + 1.0]),
            &[0.5, 0.5],
            NewtonOptions::default(),
        )
        .unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-10 && (out.x[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn bracketed_root_finds_sqrt2() {
        let r = bracketed_root(|x| x * x - 2.0, 0.0, 3.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn quadrature_rules_integrate_polynomials() {
        let g = gauss_composite(|x| x.powi(7) - x * x, -1.0, 2.0, 3);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0) / 3.0;
        assert!((g - exact).abs() < 1e-12);
        let xs: Vec<f64> = (0..=10).map(|k| (k as f64 * 0.1).powi(3)).collect();
        assert!((simpson(&xs, 0.1) - 0.25).abs() < 1e-14);
    }
}
