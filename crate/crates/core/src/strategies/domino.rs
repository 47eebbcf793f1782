//! The four-round domino-cut protocol and its images under the symmetries of
//! the 3×3 tiling.

use super::planner::cut_label;
use crate::error::{Error, Result};
use crate::protocol::{LeafKind, LocalElement, ProtocolNode};

fn cut(
    party: usize,
    keep: [f64; 3],
    then: ProtocolNode,
    rest: ProtocolNode,
) -> Result<ProtocolNode> {
    let other = keep.map(|x| 1.0 - x);
    ProtocolNode::povm(
        party,
        vec![
            (&cut_label(party, &keep), keep.to_vec(), then),
            (&cut_label(party, &other), other.to_vec(), rest),
        ],
    )
}

const ALICE: usize = 0;
const BOB: usize = 1;

/// Tree for the set with ψ4 removed.
fn base() -> Result<ProtocolNode> {
    let bob_top = cut(
        ALICE,
        [0.0, 1.0, 0.0],
        ProtocolNode::guess(1),
        ProtocolNode::guess(5),
    )?;
    let bob_01_rest = cut(BOB, [1.0, 0.0, 0.0], ProtocolNode::pair(6, 7)?, bob_top)?;
    let bob_01 = cut(
        ALICE,
        [1.0, 0.0, 0.0],
        ProtocolNode::pair(2, 3)?,
        bob_01_rest,
    )?;
    let bob_2 = cut(
        ALICE,
        [0.0, 0.0, 1.0],
        ProtocolNode::guess(5),
        ProtocolNode::pair(8, 9)?,
    )?;
    cut(BOB, [1.0, 1.0, 0.0], bob_01, bob_2)
}

/// Quarter turn of the tiling: Alice's index takes Bob's, Bob's index becomes
/// `2 − a`. Member ids follow.
fn rotate(node: &ProtocolNode) -> Result<ProtocolNode> {
    const IMAGE: [usize; 10] = [0, 1, 8, 9, 6, 7, 2, 3, 4, 5];
    relabel(node, &|id| IMAGE[id], true)
}

fn swap_partner(node: &ProtocolNode, a: usize, b: usize) -> Result<ProtocolNode> {
    relabel(
        node,
        &|id| {
            if id == a {
                b
            } else if id == b {
                a
            } else {
                id
            }
        },
        false,
    )
}

fn relabel(node: &ProtocolNode, map: &dyn Fn(usize) -> usize, turn: bool) -> Result<ProtocolNode> {
    match node {
        ProtocolNode::Leaf(LeafKind::Guess(i)) => Ok(ProtocolNode::guess(map(*i))),
        ProtocolNode::Leaf(LeafKind::PairDiscriminate(i, j)) => {
            ProtocolNode::pair(map(*i), map(*j))
        }
        ProtocolNode::Leaf(LeafKind::Declare(l)) => Ok(ProtocolNode::declare(l.clone())),
        ProtocolNode::Internal {
            party,
            elements,
            children,
        } => {
            let new_party = if turn { 1 - party } else { *party };
            let mut els = Vec::with_capacity(elements.len());
            let mut kids = Vec::with_capacity(children.len());
            for (el, child) in elements.iter().zip(children) {
                let mut d = el
                    .povm()
                    .ok_or_else(|| Error::Invariant("domino tree uses diagonal rounds".into()))?
                    .to_vec();
                if turn && *party == ALICE {
                    d.reverse();
                }
                els.push(LocalElement::from_povm(
                    new_party,
                    &d,
                    cut_label(new_party, &d),
                )?);
                kids.push(relabel(child, map, turn)?);
            }
            ProtocolNode::internal(new_party, els, kids)
        }
    }
}

/// Domino-cut protocol that identifies the eight states left when
/// `excluded` (2..=9) is removed.
pub fn build_domino_cut(excluded: usize) -> Result<ProtocolNode> {
    // rotation orbits of the excluded state: 4 → 6 → 2 → 8 and 5 → 7 → 3 → 9
    let (partner, turns) = match excluded {
        4 => (false, 0),
        6 => (false, 1),
        2 => (false, 2),
        8 => (false, 3),
        5 => (true, 0),
        7 => (true, 1),
        3 => (true, 2),
        9 => (true, 3),
        1 => {
            return Err(Error::InvalidArgument(
                "removing ψ1 leaves every domino intact; no cut sequence exists".into(),
            ))
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "excluded member must be in 2..=9, got {other}"
            )))
        }
    };
    let mut tree = base()?;
    if partner {
        tree = swap_partner(&tree, 4, 5)?;
    }
    for _ in 0..turns {
        tree = rotate(&tree)?;
    }
    Ok(tree)
}
