use serde::{Deserialize, Serialize};

use super::ALG_TOL;
use crate::error::{Error, Result};

/// A probability vector: nonnegative entries summing to one within 1e-12.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVec(Vec<f64>);

impl ProbVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProbabilities("empty distribution".into()));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidProbabilities(format!(
                "entry {x} is not a probability"
            )));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > ALG_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {total}"
            )));
        }
        Ok(ProbVec(entries))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        ProbVec(vec![1.0 / n as f64; n])
    }

    /// Rescale nonnegative weights to unit mass.
    pub fn normalize(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidProbabilities(format!(
                "cannot normalize {weights:?}"
            )));
        }
        Ok(ProbVec(weights.iter().map(|w| w / total).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ProbVec {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbVec::new(v)
    }
}

impl From<ProbVec> for Vec<f64> {
    fn from(p: ProbVec) -> Vec<f64> {
        p.0
    }
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// `h(x) = −x log2 x − (1−x) log2(1−x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-ALG_TOL..=1.0 + ALG_TOL).contains(&x) {
        return Err(Error::Domain {
            value: x,
            domain: "[0, 1]",
        });
    }
    let x = x.clamp(0.0, 1.0);
    Ok(plogp(x) + plogp(1.0 - x))
}

pub fn shannon_entropy(p: &ProbVec) -> f64 {
    entropy_bits(p.as_slice())
}

/// `−Σ p log2 p` over raw weights, with `0·log 0 = 0`. No normalization check.
pub fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().map(|&x| plogp(x)).sum()
}

/// `I = H(rows) + H(cols) − H(joint)` for a joint distribution given by rows.
pub fn mutual_information(joint: &[Vec<f64>]) -> Result<f64> {
    let cols = joint.first().map_or(0, Vec::len);
    if joint.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument("ragged joint distribution".into()));
    }
    let mut total = 0.0;
    for x in joint.iter().flatten() {
        if *x < 0.0 || !x.is_finite() {
            return Err(Error::InvalidMass(*x));
        }
        total += x;
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidMass(total));
    }
    let row: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..cols)
        .map(|j| joint.iter().map(|r| r[j]).sum())
        .collect();
    let h_joint: f64 = joint.iter().flatten().map(|&x| plogp(x)).sum();
    Ok((entropy_bits(&row) + entropy_bits(&col) - h_joint).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.25).unwrap() - 0.811278).abs() < 1e-5);
        assert!(matches!(binary_entropy(1.5), Err(Error::Domain { .. })));
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn shannon_values() {
        assert!((shannon_entropy(&ProbVec::uniform(9)) - 9f64.log2()).abs() < 1e-12);
        let p = ProbVec::new(vec![3.0 / 8.0, 2.0 / 8.0, 3.0 / 8.0]).unwrap();
        // 11/4 − (3/4)·log2 3; the often-quoted 11/4 − log2 3 drops the 3/4.
        assert!((shannon_entropy(&p) - (2.75 - 0.75 * 3f64.log2())).abs() < 1e-12);
        assert!((shannon_entropy(&p) - 1.561278).abs() < 1e-6);
        assert_eq!(
            shannon_entropy(&ProbVec::new(vec![0.0, 1.0, 0.0]).unwrap()),
            0.0
        );
    }

    #[test]
    fn probvec_validation() {
        assert!(ProbVec::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVec::new(vec![-0.1, 1.1]).is_err());
        assert!(ProbVec::new(vec![]).is_err());
        let json = serde_json::to_string(&ProbVec::uniform(2)).unwrap();
        assert_eq!(json, "[0.5,0.5]");
        assert!(serde_json::from_str::<ProbVec>("[0.2,0.2]").is_err());
    }

    #[test]
    fn mutual_information_cases() {
        let diag: Vec<Vec<f64>> = (0..9)
            .map(|i| {
                (0..9)
                    .map(|j| if i == j { 1.0 / 9.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        assert!((mutual_information(&diag).unwrap() - 9f64.log2()).abs() < 1e-12);

        let p = [0.2, 0.8];
        let q = [0.3, 0.3, 0.4];
        let prod: Vec<Vec<f64>> = p
            .iter()
            .map(|a| q.iter().map(|b| a * b).collect())
            .collect();
        assert!(mutual_information(&prod).unwrap().abs() < 1e-12);

        let f = 0.11;
        let bsc = vec![
            vec![(1.0 - f) / 2.0, f / 2.0],
            vec![f / 2.0, (1.0 - f) / 2.0],
        ];
        let mi = mutual_information(&bsc).unwrap();
        assert!((mi - 0.5002).abs() < 1e-3);
        assert!((mi - (1.0 - binary_entropy(f).unwrap())).abs() < 1e-12);

        assert!(matches!(
            mutual_information(&[vec![0.3, 0.3]]),
            Err(Error::InvalidMass(_))
        ));
    }
}
