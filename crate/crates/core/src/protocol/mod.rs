//! LOCC protocols as outcome-conditioned trees of local operation elements,
//! executed exactly against an ensemble.

mod doc;
mod posterior;
mod run;

pub use doc::{emit_tree, parse_tree};
pub use posterior::{posterior_probs, residual_overlaps, MeasurementRecord, Posterior};
pub use run::{pair_discriminate_info, run_protocol, LeafReport, OutcomeColumn, RunResult};

use crate::error::{Error, Result};
use crate::qcore::{re, CMat, STRUCT_TOL};

/// One operation element `M` of a party's local round.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalElement {
    party: usize,
    matrix: CMat,
    label: String,
    povm: Option<Vec<f64>>,
}

impl LocalElement {
    pub fn new(party: usize, matrix: CMat, label: impl Into<String>) -> Self {
        LocalElement {
            party,
            matrix,
            label: label.into(),
            povm: None,
        }
    }

    /// Element `√diag(d)` for a POVM diagonal `d` in the standard basis.
    pub fn from_povm(party: usize, diag: &[f64], label: impl Into<String>) -> Result<Self> {
        if let Some(&x) = diag.iter().find(|x| !(0.0..=1.0 + 1e-12).contains(*x)) {
            return Err(Error::Domain {
                value: x,
                domain: "POVM weight in [0, 1]",
            });
        }
        let roots: Vec<f64> = diag.iter().map(|x| x.clamp(0.0, 1.0).sqrt()).collect();
        Ok(LocalElement {
            party,
            matrix: CMat::from_diag(&roots),
            label: label.into(),
            povm: Some(diag.to_vec()),
        })
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn povm(&self) -> Option<&[f64]> {
        self.povm.as_deref()
    }

    /// `M†M`.
    pub fn effect(&self) -> CMat {
        &self.matrix.adjoint() * &self.matrix
    }
}

/// Terminal action once no further local rounds are made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafKind {
    /// Announce the member with this catalog id.
    Guess(usize),
    /// Optimal symmetric measurement between the residuals of two members.
    PairDiscriminate(usize, usize),
    Declare(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolNode {
    Internal {
        party: usize,
        elements: Vec<LocalElement>,
        children: Vec<ProtocolNode>,
    },
    Leaf(LeafKind),
}

impl ProtocolNode {
    pub fn guess(id: usize) -> Self {
        ProtocolNode::Leaf(LeafKind::Guess(id))
    }

    pub fn declare(label: impl Into<String>) -> Self {
        ProtocolNode::Leaf(LeafKind::Declare(label.into()))
    }

    pub fn pair(i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::Invariant(format!(
                "pair leaf needs distinct members, got {i} twice"
            )));
        }
        Ok(ProtocolNode::Leaf(LeafKind::PairDiscriminate(i, j)))
    }

    /// Internal node; checks that the elements form a complete local operation.
    pub fn internal(
        party: usize,
        elements: Vec<LocalElement>,
        children: Vec<ProtocolNode>,
    ) -> Result<Self> {
        check_round(party, &elements)?;
        if children.len() != elements.len() {
            return Err(Error::Invariant(format!(
                "{} elements but {} children",
                elements.len(),
                children.len()
            )));
        }
        Ok(ProtocolNode::Internal {
            party,
            elements,
            children,
        })
    }

    /// Convenience: one child per POVM diagonal, labels taken in order.
    pub fn povm(party: usize, branches: Vec<(&str, Vec<f64>, ProtocolNode)>) -> Result<Self> {
        let mut elements = Vec::with_capacity(branches.len());
        let mut children = Vec::with_capacity(branches.len());
        for (label, diag, child) in branches {
            elements.push(LocalElement::from_povm(party, &diag, label)?);
            children.push(child);
        }
        Self::internal(party, elements, children)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ProtocolNode::Leaf(_))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ProtocolNode::Leaf(_) => 1,
            ProtocolNode::Internal { children, .. } => children.iter().map(Self::leaf_count).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProtocolNode::Leaf(_) => 0,
            ProtocolNode::Internal { children, .. } => {
                1 + children.iter().map(Self::depth).max().unwrap_or(0)
            }
        }
    }

    /// Re-check every internal node (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        match self {
            ProtocolNode::Leaf(LeafKind::PairDiscriminate(i, j)) if i == j => Err(
                Error::Invariant(format!("pair leaf needs distinct members, got {i} twice")),
            ),
            ProtocolNode::Leaf(_) => Ok(()),
            ProtocolNode::Internal {
                party,
                elements,
                children,
            } => {
                check_round(*party, elements)?;
                if children.len() != elements.len() {
                    return Err(Error::Invariant("element/child count mismatch".into()));
                }
                children.iter().try_for_each(Self::validate)
            }
        }
    }
}

fn check_round(party: usize, elements: &[LocalElement]) -> Result<()> {
    let first = elements
        .first()
        .ok_or_else(|| Error::Invariant("round without elements".into()))?;
    let cols = first.matrix.cols();
    let mut sum = CMat::zeros(cols, cols);
    for e in elements {
        if e.party != party {
            return Err(Error::Invariant(format!(
                "element for party {} in a party-{party} round",
                e.party
            )));
        }
        if e.matrix.cols() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: e.matrix.cols(),
            });
        }
        sum = &sum + &e.effect();
    }
    let dev = sum.max_abs_diff(&CMat::identity(cols).scale(re(1.0)));
    if dev > STRUCT_TOL {
        return Err(Error::Invariant(format!(
            "round for party {party} is incomplete (deviation {dev:.3e})"
        )));
    }
    Ok(())
}
