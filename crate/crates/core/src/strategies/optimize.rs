//! Multi-start Nelder–Mead over a box, seeded by a Halton sequence.

use rayon::prelude::*;

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// `index`-th point of the Halton sequence in `[0,1)^dim`.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(
        dim <= PRIMES.len(),
        "Halton sequence supports up to {} dimensions",
        PRIMES.len()
    );
    PRIMES[..dim]
        .iter()
        .map(|&b| {
            let (mut i, mut f, mut r) = (index, 1.0, 0.0);
            let b = b as u64;
            while i > 0 {
                f /= b as f64;
                r += f * (i % b) as f64;
                i /= b;
            }
            r
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub tol: f64,
    pub max_evals: usize,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            tol: 1e-9,
            max_evals: 4000,
            initial_step: 0.05,
        }
    }
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Maximize `f` inside `[lower, upper]` from `start`. Returns `(x, f(x), evals)`.
pub fn nelder_mead_max<F>(
    f: &F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: NelderMeadOptions,
) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = start.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    project(&mut x0, lower, upper);
    simplex.push(x0.clone());
    for i in 0..n {
        let mut x = x0.clone();
        let step = opts.initial_step * (upper[i] - lower[i]);
        x[i] = if x[i] + step <= upper[i] {
            x[i] + step
        } else {
            x[i] - step
        };
        project(&mut x, lower, upper);
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .flat_map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (spread <= opts.tol && size <= opts.tol.sqrt()) || evals.get() >= opts.max_evals {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|x| x[j]).sum::<f64>() / n as f64)
            .collect();
        let towards = |k: f64| {
            let mut x: Vec<f64> = (0..n)
                .map(|j| centroid[j] + k * (simplex[n][j] - centroid[j]))
                .collect();
            project(&mut x, lower, upper);
            x
        };

        let xr = towards(-alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = towards(-gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let x = towards(-rho);
                let v = eval(&x);
                (x, v)
            } else {
                let x = towards(rho);
                let v = eval(&x);
                (x, v)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    for j in 0..n {
                        simplex[i][j] = best[j] + sigma * (simplex[i][j] - best[j]);
                    }
                    values[i] = eval(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    (simplex[best].clone(), -values[best], evals.get())
}

/// Outcome of a multi-start search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub params: Vec<f64>,
    pub value: f64,
    pub starts: usize,
    pub evaluations: usize,
}

/// Run Nelder–Mead from `starts` Halton points (offset by `seed`) in parallel
/// and keep the best. Ties go to the earliest start, so the result does not
/// depend on scheduling.
pub fn multistart_max<F>(
    f: &F,
    lower: &[f64],
    upper: &[f64],
    starts: usize,
    seed: u64,
    opts: NelderMeadOptions,
) -> SearchResult
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let dim = lower.len();
    let runs: Vec<(Vec<f64>, f64, usize)> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let u = halton(seed + 1 + k as u64, dim);
            let x: Vec<f64> = (0..dim)
                .map(|j| lower[j] + u[j] * (upper[j] - lower[j]))
                .collect();
            nelder_mead_max(f, &x, lower, upper, opts)
        })
        .collect();
    let evaluations = runs.iter().map(|r| r.2).sum();
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.1 > runs[best].1 {
            best = k;
        }
    }
    SearchResult {
        params: runs[best].0.clone(),
        value: runs[best].1,
        starts,
        evaluations,
    }
}
