use std::fmt;

use super::{LocalElement, ProtocolNode};
use crate::ensembles::ProductEnsemble;
use crate::error::{Error, Result};
use crate::qcore::{kron, CMat, CVec, ProbVec};

/// Members whose posterior falls below this are treated as eliminated.
pub(crate) const ALIVE_TOL: f64 = 1e-15;

/// Outcome labels `r1:r2:…:rn` along one path.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MeasurementRecord(pub Vec<String>);

impl MeasurementRecord {
    pub fn push(&self, label: &str) -> Self {
        let mut v = self.0.clone();
        v.push(label.to_string());
        MeasurementRecord(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for MeasurementRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&self.0.join(":"))
        }
    }
}

/// Snapshot of the protocol state after a measurement record.
///
/// `joint[i]` is `p(ψ_i)·p(m|ψ_i)`; residual factors are the unnormalized
/// per-party kets `M_party|α_i⟩`; `accumulated[party]` is the composed local
/// operator applied so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    ids: Vec<usize>,
    priors: Vec<f64>,
    joint: Vec<f64>,
    residuals: Vec<Vec<CVec>>,
    accumulated: Vec<CMat>,
    record: MeasurementRecord,
}

impl Posterior {
    pub fn initial(e: &ProductEnsemble) -> Result<Self> {
        let states = e.product_states()?;
        Ok(Posterior {
            ids: e.ids().to_vec(),
            priors: e.priors().as_slice().to_vec(),
            joint: e.priors().as_slice().to_vec(),
            residuals: states.iter().map(|s| s.factors().to_vec()).collect(),
            accumulated: e.party_dims().iter().map(|&d| CMat::identity(d)).collect(),
            record: MeasurementRecord::default(),
        })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn record(&self) -> &MeasurementRecord {
        &self.record
    }

    /// Unnormalized `p(ψ_i) p(m|ψ_i)`.
    pub fn joint(&self) -> &[f64] {
        &self.joint
    }

    pub fn mass(&self) -> f64 {
        self.joint.iter().sum()
    }

    /// `p(m|ψ_i)`.
    pub fn likelihoods(&self) -> Vec<f64> {
        self.joint
            .iter()
            .zip(&self.priors)
            .map(|(j, p)| if *p > 0.0 { j / p } else { 0.0 })
            .collect()
    }

    /// `p(ψ_i|m)` by Bayes' rule.
    pub fn probs(&self) -> Result<ProbVec> {
        let total = self.mass();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::ImpossibleRecord);
        }
        ProbVec::normalize(&self.joint)
    }

    pub fn residual_factors(&self, member: usize) -> &[CVec] {
        &self.residuals[member]
    }

    /// Full unnormalized residual `S_m|ψ_i⟩`.
    pub fn residual(&self, member: usize) -> CVec {
        let f = &self.residuals[member];
        let mut k = f[0].clone();
        for x in &f[1..] {
            k = k.kron(x);
        }
        k
    }

    pub fn accumulated(&self) -> &[CMat] {
        &self.accumulated
    }

    /// `E_m = ⊗_party acc†·acc`.
    pub fn effect(&self) -> CMat {
        let mut e = {
            let a = &self.accumulated[0];
            &a.adjoint() * a
        };
        for a in &self.accumulated[1..] {
            e = kron(&e, &(&a.adjoint() * a));
        }
        e
    }

    /// Positions of members with posterior above the elimination threshold.
    pub fn alive(&self) -> Vec<usize> {
        let total = self.mass();
        if total.is_nan() || total <= 0.0 {
            return Vec::new();
        }
        (0..self.joint.len())
            .filter(|&i| self.joint[i] / total > ALIVE_TOL)
            .collect()
    }

    pub fn apply_round(&self, elem: &LocalElement) -> Result<Posterior> {
        let party = elem.party();
        if party >= self.accumulated.len() {
            return Err(Error::InvalidArgument(format!("no party {party}")));
        }
        let m = elem.matrix();
        let dim = self.accumulated[party].rows();
        if m.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.cols(),
            });
        }
        let mut next = self.clone();
        for (i, factors) in next.residuals.iter_mut().enumerate() {
            let before = factors[party].norm_sqr();
            factors[party] = m.mul_vec(&factors[party]);
            let after = factors[party].norm_sqr();
            next.joint[i] = if before > 0.0 {
                self.joint[i] * after / before
            } else {
                0.0
            };
        }
        next.accumulated[party] = m * &self.accumulated[party];
        next.record = self.record.push(elem.label());
        Ok(next)
    }
}

/// Follow `path` (child indices) from the root and return `p(ψ_i|m)`.
pub fn posterior_probs(
    e: &ProductEnsemble,
    tree: &ProtocolNode,
    path: &[usize],
) -> Result<ProbVec> {
    let mut post = Posterior::initial(e)?;
    let mut node = tree;
    for &k in path {
        match node {
            ProtocolNode::Internal {
                elements, children, ..
            } if k < elements.len() => {
                post = post.apply_round(&elements[k])?;
                node = &children[k];
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "path step {k} is not in the tree"
                )))
            }
        }
    }
    post.probs()
}

/// Largest normalized overlap `|⟨φ_i|φ_j⟩|/(‖φ_i‖‖φ_j‖)` among members still alive.
pub fn residual_overlaps(post: &Posterior) -> Result<f64> {
    let alive = post.alive();
    let mut best = 0.0f64;
    for (a, &i) in alive.iter().enumerate() {
        for &j in &alive[a + 1..] {
            let mut ov = 1.0;
            for (fi, fj) in post.residuals[i].iter().zip(&post.residuals[j]) {
                let (ni, nj) = (fi.norm(), fj.norm());
                if ni == 0.0 {
                    return Err(Error::Annihilated(post.ids[i]));
                }
                if nj == 0.0 {
                    return Err(Error::Annihilated(post.ids[j]));
                }
                ov *= fi.inner(fj).norm() / (ni * nj);
            }
            best = best.max(ov);
        }
    }
    Ok(best.min(1.0))
}
