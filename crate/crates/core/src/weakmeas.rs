//! A strong two-outcome measurement replaced by `K` weak probe couplings and
//! a majority vote over the probe readouts.

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::{c64, CVec, STRUCT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakScheme {
    epsilon: f64,
    k: usize,
    seed: u64,
}

impl WeakScheme {
    pub fn new(epsilon: f64, k: usize, seed: u64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if k.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "repetition count must be odd, got {k}"
            )));
        }
        Ok(WeakScheme { epsilon, k, seed })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn theta(&self) -> f64 {
        FRAC_PI_4 - self.epsilon
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= FRAC_PI_4 {
        Ok(())
    } else {
        Err(Error::Domain {
            value: epsilon,
            domain: "(0, pi/4]",
        })
    }
}

fn check_unit(a0: c64, a1: c64) -> Result<()> {
    let n = a0.norm_sqr() + a1.norm_sqr();
    if (n - 1.0).abs() > STRUCT_TOL {
        return Err(Error::InvalidArgument(format!(
            "amplitudes not normalized: |a0|^2 + |a1|^2 = {n}"
        )));
    }
    Ok(())
}

/// `cos²(π/4 − ε) = ½(1 + sin 2ε)`.
pub fn single_weak_correct_prob(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok((FRAC_PI_4 - epsilon).cos().powi(2))
}

/// Probability that a majority of `k` weak readouts points at the true
/// branch: `Σ_{j<k/2} C(k,j) cos^{2(k−j)}θ sin^{2j}θ`.
pub fn majority_sum(epsilon: f64, k: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    if k.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "repetition count must be odd, got {k}"
        )));
    }
    let theta = FRAC_PI_4 - epsilon;
    let (lc, ls) = (2.0 * theta.cos().ln(), 2.0 * theta.sin().ln());
    if theta.sin() <= 0.0 {
        return Ok(1.0);
    }
    let mut ln_binom = 0.0;
    let mut sum = 0.0;
    for j in 0..=(k - 1) / 2 {
        sum += (ln_binom + (k - j) as f64 * lc + j as f64 * ls).exp();
        ln_binom += ((k - j) as f64).ln() - ((j + 1) as f64).ln();
    }
    Ok(sum.min(1.0))
}

/// Probability that the majority vote reports branch 0 when branch 0 carries
/// weight `alpha_sq`.
pub fn majority_success(alpha_sq: f64, epsilon: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha_sq) {
        return Err(Error::Domain {
            value: alpha_sq,
            domain: "[0, 1]",
        });
    }
    let s = majority_sum(epsilon, k)?;
    Ok(alpha_sq * s + (1.0 - alpha_sq) * (1.0 - s))
}

/// `2 e^{−K sin²(2ε)/4}`.
pub fn bernstein_envelope(epsilon: f64, k: usize) -> f64 {
    2.0 * (-(k as f64) * (2.0 * epsilon).sin().powi(2) / 4.0).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakRunResult {
    /// Branch the probes collapsed onto.
    pub branch: u8,
    pub votes: Vec<u8>,
    pub majority: u8,
    /// Normalized system amplitudes after all `K` couplings.
    pub residual: CVec,
    pub correct: bool,
}

/// One run of the weak stream; `run` selects an independent generator stream.
pub fn simulate_stream(a0: c64, a1: c64, scheme: &WeakScheme, run: u64) -> Result<WeakRunResult> {
    check_unit(a0, a1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(scheme.seed);
    rng.set_stream(run);
    let branch: u8 = if rng.random::<f64>() < a0.norm_sqr() {
        0
    } else {
        1
    };
    let bias = scheme.theta().cos().powi(2);
    let votes: Vec<u8> = (0..scheme.k)
        .map(|_| {
            if rng.random::<f64>() < bias {
                branch
            } else {
                1 - branch
            }
        })
        .collect();
    let ones = votes.iter().filter(|&&v| v == 1).count();
    let zeros = scheme.k - ones;
    let majority = u8::from(ones > zeros);
    let residual = residual_after(a0, a1, scheme.theta(), zeros, ones);
    Ok(WeakRunResult {
        branch,
        majority,
        residual,
        correct: majority == branch,
        votes,
    })
}

/// `(α0 cos^{n0}θ sin^{n1}θ, α1 sin^{n0}θ cos^{n1}θ)`, normalized in log space.
fn residual_after(a0: c64, a1: c64, theta: f64, n0: usize, n1: usize) -> CVec {
    let (lc, ls) = (theta.cos().ln(), theta.sin().ln());
    let term = |a: c64, nc: usize, ns: usize| {
        if a.norm() == 0.0 || (ns > 0 && theta.sin() == 0.0) {
            f64::NEG_INFINITY
        } else {
            let pow = |n: usize, l: f64| if n == 0 { 0.0 } else { n as f64 * l };
            a.norm().ln() + pow(nc, lc) + pow(ns, ls)
        }
    };
    let l0 = term(a0, n0, n1);
    let l1 = term(a1, n1, n0);
    let top = l0.max(l1);
    let (m0, m1) = ((l0 - top).exp(), (l1 - top).exp());
    let phase = |a: c64| {
        if a.norm() == 0.0 {
            c64::new(0.0, 0.0)
        } else {
            a / a.norm()
        }
    };
    let norm = (m0 * m0 + m1 * m1).sqrt();
    CVec::new(vec![phase(a0) * (m0 / norm), phase(a1) * (m1 / norm)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakStats {
    pub runs: u64,
    pub correct_rate: f64,
    /// Fraction of runs whose majority reported branch 0.
    pub majority0_rate: f64,
    pub closed_form_correct: f64,
    pub closed_form_majority0: f64,
    /// Standard error of the empirical majority-0 rate under the closed form.
    pub sigma_majority0: f64,
    /// Mean overlap of the final residual with the strong-measurement output.
    pub mean_residual_fidelity: f64,
}

pub fn simulate_many(a0: c64, a1: c64, scheme: &WeakScheme, runs: u64) -> Result<WeakStats> {
    check_unit(a0, a1)?;
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be positive".into()));
    }
    let per_run: Vec<(bool, bool, f64)> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let res = simulate_stream(a0, a1, scheme, r).expect("validated");
            (
                res.correct,
                res.majority == 0,
                res.residual.get(res.branch as usize).norm(),
            )
        })
        .collect();
    // sequential sums keep the statistics bit-identical across thread counts
    let correct = per_run.iter().filter(|x| x.0).count();
    let maj0 = per_run.iter().filter(|x| x.1).count();
    let fid: f64 = per_run.iter().map(|x| x.2).sum();
    let n = runs as f64;
    let closed_form_majority0 = majority_success(a0.norm_sqr(), scheme.epsilon, scheme.k)?;
    Ok(WeakStats {
        runs,
        correct_rate: correct as f64 / n,
        majority0_rate: maj0 as f64 / n,
        closed_form_correct: majority_sum(scheme.epsilon, scheme.k)?,
        closed_form_majority0,
        sigma_majority0: (closed_form_majority0 * (1.0 - closed_form_majority0) / n).sqrt(),
        mean_residual_fidelity: fid / n,
    })
}

/// Overlap between the input and the renormalized output of one weak step
/// that read `outcome`. Here `ε = 0` is allowed and leaves the state untouched.
pub fn residual_fidelity(a0: c64, a1: c64, epsilon: f64, outcome: u8) -> Result<f64> {
    check_unit(a0, a1)?;
    if !(0.0..=FRAC_PI_4).contains(&epsilon) {
        return Err(Error::Domain {
            value: epsilon,
            domain: "[0, pi/4]",
        });
    }
    if outcome > 1 {
        return Err(Error::InvalidArgument(format!(
            "outcome must be 0 or 1, got {outcome}"
        )));
    }
    let theta = FRAC_PI_4 - epsilon;
    let (c0, c1) = if outcome == 0 {
        (theta.cos(), theta.sin())
    } else {
        (theta.sin(), theta.cos())
    };
    let out = [a0 * c0, a1 * c1];
    let norm = (out[0].norm_sqr() + out[1].norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::Annihilated(outcome as usize));
    }
    Ok((a0.conj() * out[0] + a1.conj() * out[1]).norm() / norm)
}

/// Bayesian update of `P(branch 0)` after a single weak readout.
pub fn weak_posterior(prior0: f64, epsilon: f64, outcome: u8) -> Result<f64> {
    let c = single_weak_correct_prob(epsilon)?;
    let (l0, l1) = if outcome == 0 {
        (c, 1.0 - c)
    } else {
        (1.0 - c, c)
    };
    Ok(prior0 * l0 / (prior0 * l0 + (1.0 - prior0) * l1))
}
