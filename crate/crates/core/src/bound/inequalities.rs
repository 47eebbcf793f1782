//! Inequalities on Alice's and Bob's stage-I operators `a`, `b` implied by
//! near-orthogonality of the nine residual states, checked numerically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{nu_epsilon, z_of};
use crate::ensembles::nine_states;
use crate::error::{Error, Result};
use crate::qcore::{c64, CMat, STRUCT_TOL};

/// `lhs ≤ rhs`, with slack `rhs − lhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Check {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Check {
            name: name.to_string(),
            lhs,
            rhs,
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn passed(&self) -> bool {
        self.lhs <= self.rhs + 1e-12 * self.rhs.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub preconditions: Vec<Check>,
    pub inequalities: Vec<Check>,
}

impl ConstraintReport {
    pub fn preconditions_met(&self) -> bool {
        self.preconditions.iter().all(Check::passed)
    }

    pub fn all_passed(&self) -> bool {
        self.inequalities.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.inequalities.iter().filter(|c| !c.passed()).collect()
    }
}

fn is_3x3(m: &CMat) -> Result<()> {
    if m.rows() != 3 || m.cols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: m.rows().max(m.cols()),
        });
    }
    Ok(())
}

/// Largest normalized overlap and largest diagonal ratio of `E = a⊗b` over
/// the nine-state basis.
fn overlap_and_spread(a: &CMat, b: &CMat) -> (f64, f64) {
    let nine = nine_states();
    let states = nine.product_states().expect("pure catalog");
    let n = states.len();
    let mut m = vec![vec![c64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let (ai, bi) = (states[i].factor(0), states[i].factor(1));
            let (aj, bj) = (states[j].factor(0), states[j].factor(1));
            m[i][j] = a.sandwich(ai, aj) * b.sandwich(bi, bj);
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| m[i][i].re).collect();
    let mut overlap = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = (diag[i] * diag[j]).max(0.0).sqrt();
                let r = if d > 0.0 {
                    m[i][j].norm() / d
                } else {
                    f64::INFINITY
                };
                overlap = overlap.max(r);
            }
        }
    }
    let max = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if min > 0.0 { max / min } else { f64::INFINITY };
    (overlap, spread)
}

/// Check the chain of bounds on matrix elements of `a` and `b`. Unmet
/// preconditions are reported in the result, not raised.
pub fn verify_inequalities(a: &CMat, b: &CMat, eps: f64, delta: f64) -> Result<ConstraintReport> {
    is_3x3(a)?;
    is_3x3(b)?;
    let nu = nu_epsilon(eps, delta)?;
    let z = z_of(eps);
    let k = 81.0 * eps / (2.0 - 63.0 * eps);

    let min_eig = |m: &CMat| m.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
    let (overlap, spread) = overlap_and_spread(a, b);
    let preconditions = vec![
        Check::new("hermitian-a", a.max_abs_diff(&a.adjoint()), 1e-12),
        Check::new("hermitian-b", b.max_abs_diff(&b.adjoint()), 1e-12),
        Check::new("psd-a", -min_eig(a), STRUCT_TOL),
        Check::new("psd-b", -min_eig(b), STRUCT_TOL),
        Check::new("overlap", overlap, delta),
        Check::new("spread", spread, (1.0 + 9.0 * eps) / (1.0 - 72.0 * eps)),
    ];

    let r = |m: &CMat, i: usize, j: usize| m.get(i, j).re;
    let x = |m: &CMat, i: usize, j: usize| m.get(i, j);
    let (a00, a11, a22) = (r(a, 0, 0), r(a, 1, 1), r(a, 2, 2));
    let (b00, b11, b22) = (r(b, 0, 0), r(b, 1, 1), r(b, 2, 2));
    let rel = |p: f64, q: f64| (p - q).abs() / (p + q);

    let d = |s1: f64, s2: f64| {
        (a00 * a22 * ((b00 + b11) + s1 * 2.0 * r(b, 1, 0)) * ((b11 + b22) + s2 * 2.0 * r(b, 2, 1)))
            .max(0.0)
            .sqrt()
    };
    let d_sum = d(1.0, 1.0) + d(1.0, -1.0) + d(-1.0, 1.0) + d(-1.0, -1.0);
    let corner = 0.5 * (z + 2.0 * z.sqrt() + 1.0) * delta / (1.0 - delta);

    let inequalities = vec![
        Check::new("re-b10", (2.0 * r(b, 1, 0)).abs(), k * (b00 + b11)),
        Check::new("re-b21", (2.0 * r(b, 2, 1)).abs(), k * (b11 + b22)),
        Check::new("re-a21", (2.0 * r(a, 2, 1)).abs(), k * (a11 + a22)),
        Check::new("re-a10", (2.0 * r(a, 1, 0)).abs(), k * (a00 + a11)),
        Check::new("spread-b00-b11", rel(b00, b11), delta),
        Check::new("spread-b11-b22", rel(b11, b22), delta),
        Check::new("spread-a11-a22", rel(a11, a22), delta),
        Check::new("spread-a00-a11", rel(a00, a11), delta),
        Check::new("sum-a02", 4.0 * (x(a, 0, 2) * b11).norm(), delta * d_sum),
        Check::new("corner-a02", x(a, 0, 2).norm() / (a00 * a22).sqrt(), corner),
        Check::new("corner-b02", x(b, 0, 2).norm() / (b00 * b22).sqrt(), corner),
        Check::new("nu-a21", x(a, 2, 1).norm() / (a22 * a11).sqrt(), nu),
        Check::new("nu-b10", x(b, 1, 0).norm() / (b11 * b00).sqrt(), nu),
        Check::new("nu-a01", x(a, 0, 1).norm() / (a00 * a11).sqrt(), nu),
        Check::new("nu-b12", x(b, 1, 2).norm() / (b11 * b22).sqrt(), nu),
    ];
    Ok(ConstraintReport {
        preconditions,
        inequalities,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub accepted: usize,
    pub attempts: usize,
    pub violations: usize,
    /// Smallest slack seen across all accepted samples and inequalities.
    pub min_slack: f64,
    pub min_slack_check: String,
}

/// Perturbation scales cycled through by the sampler.
const SCALES: [f64; 6] = [0.005, 0.01, 0.02, 0.04, 0.08, 0.16];

fn random_near_identity(rng: &mut ChaCha8Rng, eta: f64) -> CMat {
    let mut m = CMat::identity(3);
    for i in 0..3 {
        let d = m.get(i, i) + c64::new(eta * rng.random_range(-1.0..1.0), 0.0);
        m.set(i, i, d);
        for j in i + 1..3 {
            let z = c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * eta;
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    m
}

/// Draw `(a, b)` pairs near the identity at several scales, keep the first
/// `count` that meet the preconditions, and count inequality violations.
pub fn sample_constrained_pairs(
    count: usize,
    delta: f64,
    eps: f64,
    seed: u64,
) -> Result<SampleSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = count.saturating_mul(2000).max(10_000);
    let mut summary = SampleSummary {
        accepted: 0,
        attempts: 0,
        violations: 0,
        min_slack: f64::INFINITY,
        min_slack_check: String::new(),
    };
    while summary.accepted < count {
        if summary.attempts >= max_attempts {
            return Err(Error::Infeasible(format!(
                "only {} of {count} samples met the preconditions in {max_attempts} draws",
                summary.accepted
            )));
        }
        let eta = SCALES[summary.attempts % SCALES.len()];
        summary.attempts += 1;
        let a = random_near_identity(&mut rng, eta);
        let b = random_near_identity(&mut rng, eta);
        let report = verify_inequalities(&a, &b, eps, delta)?;
        if !report.preconditions_met() {
            continue;
        }
        summary.accepted += 1;
        for c in &report.inequalities {
            if !c.passed() {
                summary.violations += 1;
            }
            if c.slack() < summary.min_slack {
                summary.min_slack = c.slack();
                summary.min_slack_check = c.name.clone();
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_passes_everything() {
        let i = CMat::identity(3);
        let r = verify_inequalities(&i, &i, 0.005, 1e-6).unwrap();
        assert!(r.preconditions_met());
        assert!(r.all_passed());
        assert!(r.inequalities.iter().all(|c| c.slack() >= 0.0));
    }

    #[test]
    fn diagonal_spread_violation_detected() {
        let delta = 0.05;
        let ratio = (1.0 + 3.0 * delta) / (1.0 - 3.0 * delta);
        let a = CMat::from_diag(&[ratio, 1.0, 1.0]);
        let r = verify_inequalities(&a, &CMat::identity(3), 0.005, delta).unwrap();
        let spread = r
            .inequalities
            .iter()
            .find(|c| c.name == "spread-a00-a11")
            .unwrap();
        assert!(!spread.passed());
        // the overlap claim is false for this pair, which the report shows
        assert!(!r.preconditions_met());
    }

    #[test]
    fn small_sample_is_clean() {
        let s = sample_constrained_pairs(50, 0.05, 0.005, 7).unwrap();
        assert_eq!(s.accepted, 50);
        assert_eq!(s.violations, 0);
    }

    #[test]
    fn rejects_wrong_shapes() {
        assert!(verify_inequalities(&CMat::identity(2), &CMat::identity(3), 0.005, 0.05).is_err());
    }
}
