use super::posterior::{residual_overlaps, MeasurementRecord, Posterior};
use super::{LeafKind, ProtocolNode};
use crate::ensembles::ProductEnsemble;
use crate::error::{Error, Result};
use crate::qcore::{binary_entropy, c64, entropy_bits, mutual_information, CVec};

/// Branches carrying less total mass than this are not explored.
const BRANCH_TOL: f64 = 1e-16;

/// One announced outcome of the protocol: a leaf, or one arm of a pair leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeColumn {
    pub record: MeasurementRecord,
    pub leaf: LeafKind,
    /// Member id announced, if any.
    pub guess: Option<usize>,
}

impl OutcomeColumn {
    pub fn describe(&self) -> String {
        match (&self.leaf, self.guess) {
            (LeafKind::Declare(l), _) => format!("{}=>{l}", self.record),
            (_, Some(g)) => format!("{}=>{g}", self.record),
            (_, None) => format!("{}=>other", self.record),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafReport {
    pub record: MeasurementRecord,
    pub leaf: LeafKind,
    pub mass: f64,
    /// `p(ψ_i|m)` over all members, in ensemble order.
    pub posterior: Vec<f64>,
    /// Largest normalized overlap among residuals still alive at the leaf.
    pub overlap: f64,
    pub columns: std::ops::Range<usize>,
}

/// Exact joint distribution over (true member, announced outcome).
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub ids: Vec<usize>,
    pub priors: Vec<f64>,
    pub columns: Vec<OutcomeColumn>,
    /// `joint[member][column]`.
    pub joint: Vec<Vec<f64>>,
    pub leaves: Vec<LeafReport>,
}

impl RunResult {
    pub fn mutual_information(&self) -> Result<f64> {
        mutual_information(&self.joint)
    }

    /// Mass that lands in a column not owned by its dominant member.
    pub fn confusion(&self) -> f64 {
        (0..self.columns.len())
            .map(|c| {
                let col: Vec<f64> = self.joint.iter().map(|r| r[c]).collect();
                let max = col.iter().copied().fold(0.0, f64::max);
                col.iter().sum::<f64>() - max
            })
            .sum()
    }

    pub fn is_perfect(&self, tol: f64) -> bool {
        self.confusion() <= tol
    }

    /// `H(outcome | member)`: randomness injected into the record.
    pub fn outcome_entropy_given_member(&self) -> f64 {
        let h_joint: f64 = self.joint.iter().map(|r| entropy_bits(r)).sum();
        let rows: Vec<f64> = self.joint.iter().map(|r| r.iter().sum()).collect();
        (h_joint - entropy_bits(&rows)).max(0.0)
    }

    pub fn column_mass(&self, c: usize) -> f64 {
        self.joint.iter().map(|r| r[c]).sum()
    }
}

/// Information from the optimal equal-prior measurement on two pure states
/// with overlap `δ`: `1 − h(½ − ½√(1−δ²))`.
pub fn pair_discriminate_info(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain {
            value: delta,
            domain: "[0, 1]",
        });
    }
    Ok(1.0 - binary_entropy(0.5 - 0.5 * (1.0 - delta * delta).sqrt())?)
}

pub fn run_protocol(tree: &ProtocolNode, e: &ProductEnsemble) -> Result<RunResult> {
    tree.validate()?;
    let post = Posterior::initial(e)?;
    let mut out = RunResult {
        ids: e.ids().to_vec(),
        priors: e.priors().as_slice().to_vec(),
        columns: Vec::new(),
        joint: vec![Vec::new(); e.len()],
        leaves: Vec::new(),
    };
    walk(tree, &post, &mut out)?;
    Ok(out)
}

fn walk(node: &ProtocolNode, post: &Posterior, out: &mut RunResult) -> Result<()> {
    match node {
        ProtocolNode::Internal {
            elements, children, ..
        } => {
            for (el, child) in elements.iter().zip(children) {
                let next = post.apply_round(el)?;
                if next.mass() > BRANCH_TOL {
                    walk(child, &next, out)?;
                }
            }
            Ok(())
        }
        ProtocolNode::Leaf(kind) => leaf(kind, post, out),
    }
}

fn push_column(
    out: &mut RunResult,
    record: &MeasurementRecord,
    leaf: &LeafKind,
    guess: Option<usize>,
    col: Vec<f64>,
) {
    out.columns.push(OutcomeColumn {
        record: record.clone(),
        leaf: leaf.clone(),
        guess,
    });
    for (row, x) in out.joint.iter_mut().zip(col) {
        row.push(x);
    }
}

fn leaf(kind: &LeafKind, post: &Posterior, out: &mut RunResult) -> Result<()> {
    let start = out.columns.len();
    let record = post.record().clone();
    let joint = post.joint().to_vec();
    match kind {
        LeafKind::Guess(id) => push_column(out, &record, kind, Some(*id), joint.clone()),
        LeafKind::Declare(_) => push_column(out, &record, kind, None, joint.clone()),
        LeafKind::PairDiscriminate(i, j) => {
            let cols = pair_columns(post, *i, *j)?;
            let [ci, cj, other] = cols;
            push_column(out, &record, kind, Some(*i), ci);
            push_column(out, &record, kind, Some(*j), cj);
            if other.iter().sum::<f64>() > 1e-14 {
                push_column(out, &record, kind, None, other);
            }
        }
    }
    let mass: f64 = joint.iter().sum();
    out.leaves.push(LeafReport {
        record,
        leaf: kind.clone(),
        mass,
        posterior: joint.iter().map(|x| x / mass).collect(),
        overlap: residual_overlaps(post)?,
        columns: start..out.columns.len(),
    });
    Ok(())
}

/// Joint mass for the two arms of a pair measurement plus an "other" arm
/// catching any member whose residual leaves the pair's span.
fn pair_columns(post: &Posterior, i: usize, j: usize) -> Result<[Vec<f64>; 3]> {
    let ids = post.ids();
    let pi = ids.iter().position(|&x| x == i);
    let pj = ids.iter().position(|&x| x == j);
    let alive = post.alive();
    let live = |p: Option<usize>| p.filter(|x| alive.contains(x));
    let basis: Vec<(usize, CVec)> = match (live(pi), live(pj)) {
        (Some(a), Some(b)) => {
            let u = post.residual(a).normalized();
            let v = post.residual(b).normalized();
            let ov = u.inner(&v);
            let delta = ov.norm();
            if delta > 1.0 - 1e-12 {
                return Ok(split_evenly(post, &u));
            }
            let phase = if delta > 0.0 {
                ov / delta
            } else {
                c64::new(1.0, 0.0)
            };
            let v = v.scale(phase.conj());
            let sum = (&u + &v).scale(c64::new(1.0 / (2.0 * (1.0 + delta)).sqrt(), 0.0));
            let diff = (&u - &v).scale(c64::new(1.0 / (2.0 * (1.0 - delta)).sqrt(), 0.0));
            let s = c64::new(0.5f64.sqrt(), 0.0);
            vec![(0, (&sum + &diff).scale(s)), (1, (&sum - &diff).scale(s))]
        }
        (Some(a), None) => vec![(0, post.residual(a).normalized())],
        (None, Some(b)) => vec![(1, post.residual(b).normalized())],
        (None, None) => Vec::new(),
    };
    let n = post.joint().len();
    let mut cols = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (k, &w) in post.joint().iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let r = post.residual(k).normalized();
        let mut captured = 0.0;
        for (slot, e) in &basis {
            let p = e.inner(&r).norm_sqr();
            cols[*slot][k] = w * p;
            captured += p;
        }
        cols[2][k] = w * (1.0 - captured).max(0.0);
    }
    Ok(cols)
}

/// Coincident residuals: a fair coin picks the arm.
fn split_evenly(post: &Posterior, u: &CVec) -> [Vec<f64>; 3] {
    let n = post.ids().len();
    let mut cols = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (k, &w) in post.joint().iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let p = u.inner(&post.residual(k).normalized()).norm_sqr();
        cols[0][k] = 0.5 * w * p;
        cols[1][k] = 0.5 * w * p;
        cols[2][k] = w * (1.0 - p).max(0.0);
    }
    cols
}
