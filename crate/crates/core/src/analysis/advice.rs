use crate::error::{Error, Result};
use crate::qcore::ProbVec;

/// Negative hints "not member j" for each hintable `j`, drawn with
/// probabilities `q`; `cost` is the compressed advice in bits per state.
#[derive(Debug, Clone, PartialEq)]
pub struct HintPlan {
    pub hintable: Vec<usize>,
    pub q: Vec<f64>,
    pub cost: f64,
}

/// `−Σ_{i∈hintable} p_i log2(1−q_i)`.
pub fn hint_cost(p: &ProbVec, hintable: &[usize], q: &[f64]) -> f64 {
    hintable
        .iter()
        .zip(q)
        .map(|(&i, &qi)| {
            let pi = p.get(i);
            if pi == 0.0 {
                0.0
            } else {
                -pi * (1.0 - qi).log2()
            }
        })
        .sum()
}

/// Minimize the hint cost over the simplex. Stationarity gives
/// `1 − q_i = p_i/μ` on the active set; members with `p_i ≥ μ` get `q_i = 0`.
pub fn advice_cost(p: &ProbVec, hintable: &[usize]) -> Result<HintPlan> {
    if hintable.is_empty() {
        return Err(Error::InvalidArgument("no hintable members".into()));
    }
    if let Some(&bad) = hintable.iter().find(|&&i| i >= p.len()) {
        return Err(Error::InvalidArgument(format!(
            "hintable index {bad} out of range"
        )));
    }
    let mut seen = hintable.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != hintable.len() {
        return Err(Error::InvalidArgument("hintable indices repeat".into()));
    }
    let n = hintable.len();
    let mut q = vec![0.0; n];
    if let Some(k) = hintable.iter().position(|&i| p.get(i) == 0.0) {
        // a hint about an impossible member is always true and costs nothing
        q[k] = 1.0;
        return Ok(HintPlan {
            hintable: hintable.to_vec(),
            q,
            cost: 0.0,
        });
    }
    if n == 1 {
        return Err(Error::Infeasible(
            "a single hint must always be given and is false with positive probability".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        p.get(hintable[a])
            .total_cmp(&p.get(hintable[b]))
            .then(a.cmp(&b))
    });
    let sorted: Vec<f64> = order.iter().map(|&k| p.get(hintable[k])).collect();
    let mut prefix = 0.0;
    let mut mu = None;
    for k in 0..n {
        prefix += sorted[k];
        if k == 0 {
            continue;
        }
        let m = prefix / k as f64;
        let next_ok = k + 1 == n || sorted[k + 1] >= m;
        if sorted[k] < m && next_ok {
            mu = Some(m);
            break;
        }
    }
    let mu = mu.ok_or_else(|| Error::Infeasible("no consistent active set".into()))?;
    for (k, &i) in hintable.iter().enumerate() {
        q[k] = (1.0 - p.get(i) / mu).max(0.0);
    }
    let cost = hint_cost(p, hintable, &q);
    Ok(HintPlan {
        hintable: hintable.to_vec(),
        q,
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_eight() {
        let plan = advice_cost(&ProbVec::uniform(8), &(0..8).collect::<Vec<_>>()).unwrap();
        assert!((plan.cost - (8.0f64 / 7.0).log2()).abs() < 1e-12);
        assert!(plan.q.iter().all(|&x| (x - 0.125).abs() < 1e-12));
        assert!((plan.cost - 0.19265).abs() < 1e-5);
    }

    #[test]
    fn nine_with_eight_hints() {
        let plan = advice_cost(&ProbVec::uniform(9), &(1..9).collect::<Vec<_>>()).unwrap();
        assert!((plan.cost - 8.0 / 9.0 * (8.0f64 / 7.0).log2()).abs() < 1e-12);
        assert!((plan.cost - 0.17124).abs() < 1e-5);
    }

    #[test]
    fn clamped_solution_beats_grid() {
        let p = ProbVec::new(vec![0.5, 0.25, 0.25]).unwrap();
        let plan = advice_cost(&p, &[0, 1, 2]).unwrap();
        assert_eq!(plan.q, vec![0.0, 0.5, 0.5]);
        assert!((plan.cost - 0.5).abs() < 1e-12);
        let mut best = f64::INFINITY;
        for a in 0..=1000 {
            for b in 0..=(1000 - a) {
                let q = [
                    a as f64 / 1000.0,
                    b as f64 / 1000.0,
                    (1000 - a - b) as f64 / 1000.0,
                ];
                best = best.min(hint_cost(&p, &[0, 1, 2], &q));
            }
        }
        assert!(plan.cost <= best + 1e-12);
        assert!(best - plan.cost < 1e-4);
    }

    #[test]
    fn edge_cases() {
        let p = ProbVec::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(advice_cost(&p, &[0]), Err(Error::Infeasible(_))));
        assert_eq!(advice_cost(&p, &[1]).unwrap().cost, 0.0);
        assert!(advice_cost(&p, &[]).is_err());
        assert!(advice_cost(&p, &[0, 0]).is_err());
    }
}
