//! Upper bound on the information reachable by local protocols on the
//! nine-state ensemble, the inequality chain behind it, and the three-party
//! rigidity argument.

mod inequalities;
mod three_party;

pub use inequalities::{
    sample_constrained_pairs, verify_inequalities, Check, ConstraintReport, SampleSummary,
};
pub use three_party::{
    condition_residuals, spread_bound_holds, three_party_rigidity, Fact, RigidityReport, Rule,
};

use crate::error::{Error, Result};
use crate::qcore::binary_entropy;

/// Upper end of the admissible stage-I departure `ε`.
pub const EPSILON_MAX: f64 = 1.0 / 72.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub epsilon: f64,
    pub delta: f64,
    /// Minimum posterior `1/9 − 8ε`.
    pub beta: f64,
    pub z: f64,
    pub nu: f64,
    pub f: f64,
    pub deficit: f64,
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < EPSILON_MAX {
        Ok(())
    } else {
        Err(Error::Domain {
            value: eps,
            domain: "(0, 1/72)",
        })
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::Domain {
            value: delta,
            domain: "[0, 1)",
        })
    }
}

/// `z = (2+18ε)/(2−63ε)`.
pub fn z_of(eps: f64) -> f64 {
    (2.0 + 18.0 * eps) / (2.0 - 63.0 * eps)
}

/// Bound on the normalized off-diagonal elements `|a21|/√(a22 a11)` etc.
pub fn nu_epsilon(eps: f64, delta: f64) -> Result<f64> {
    check_epsilon(eps)?;
    check_delta(delta)?;
    let z = z_of(eps);
    let sz = z.sqrt();
    Ok((2.0 * delta / (1.0 - delta))
        * (sz + 0.25 * (z + 2.0 * sz + 1.0) * ((1.0 + delta) / (1.0 - delta)).sqrt()))
}

/// Largest posterior ratio reachable between two members once their residuals
/// overlap by at most `δ`.
pub fn f_epsilon(eps: f64, delta: f64) -> Result<f64> {
    let nu = nu_epsilon(eps, delta)?;
    let x = nu * (1.0 - delta * delta).sqrt();
    if x >= 1.0 {
        return Err(Error::Pole(delta));
    }
    Ok(((1.0 + delta) / (1.0 - delta)) * (1.0 + x) / (1.0 - x))
}

/// Right-hand side of the matching condition: `√((8+72ε)/(8−9ε))`.
pub fn target_ratio(eps: f64) -> f64 {
    ((8.0 + 72.0 * eps) / (8.0 - 9.0 * eps)).sqrt()
}

/// Smallest `δ` with `f_ε(δ) = √((8+72ε)/(8−9ε))`, by bisection.
pub fn solve_delta(eps: f64) -> Result<f64> {
    check_epsilon(eps)?;
    let target = target_ratio(eps);
    // past the pole counts as overshooting the target
    let above = |d: f64| f_epsilon(eps, d).map_or(true, |v| v >= target);
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-15);
    if above(lo) || !above(hi) {
        return Err(Error::NoRoot(eps));
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Δ(ε) = (2/9 − 16ε)·h(½ − ½√(1−δ(ε)²))`.
pub fn deficit(eps: f64) -> Result<f64> {
    let delta = solve_delta(eps)?;
    Ok((2.0 / 9.0 - 16.0 * eps) * binary_entropy(0.5 - 0.5 * (1.0 - delta * delta).sqrt())?)
}

pub fn report_at(eps: f64) -> Result<BoundReport> {
    let delta = solve_delta(eps)?;
    Ok(BoundReport {
        epsilon: eps,
        delta,
        beta: 1.0 / 9.0 - 8.0 * eps,
        z: z_of(eps),
        nu: nu_epsilon(eps, delta)?,
        f: f_epsilon(eps, delta)?,
        deficit: (2.0 / 9.0 - 16.0 * eps)
            * binary_entropy(0.5 - 0.5 * (1.0 - delta * delta).sqrt())?,
    })
}

/// Interior grid `ε_k = k/(n+1) · 1/72`, `k = 1..=n`.
pub fn epsilon_grid(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| k as f64 / (n + 1) as f64 * EPSILON_MAX)
        .collect()
}

pub fn sweep(n: usize) -> Result<Vec<BoundReport>> {
    epsilon_grid(n).into_iter().map(report_at).collect()
}

/// Maximize `Δ(ε)` over `(0, 1/72)`: 200-point grid, then golden section.
pub fn optimize_bound() -> Result<BoundReport> {
    const N: usize = 200;
    let grid = epsilon_grid(N);
    let values: Vec<f64> = grid.iter().map(|&e| deficit(e)).collect::<Result<_>>()?;
    let best = (0..N)
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    let step = EPSILON_MAX / (N + 1) as f64;
    let (mut a, mut b) = (grid[best] - step, grid[best] + step);
    a = a.max(step * 1e-3);
    b = b.min(EPSILON_MAX - step * 1e-3);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (deficit(c)?, deficit(d)?);
    while b - a > 1e-13 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = deficit(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = deficit(d)?;
        }
    }
    report_at(0.5 * (a + b))
}
