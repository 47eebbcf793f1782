use std::collections::HashMap;

use crate::ensembles::ProductEnsemble;
use crate::error::{Error, Result};
use crate::protocol::{LocalElement, ProtocolNode};
use crate::qcore::{CMat, CVec, STRUCT_TOL};

/// A tree of single-party splittings down to singletons. Member ids are the
/// ensemble's catalog ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplittingTree {
    Leaf(usize),
    Split {
        party: usize,
        left: Box<SplittingTree>,
        right: Box<SplittingTree>,
    },
}

impl SplittingTree {
    pub fn members(&self) -> Vec<usize> {
        match self {
            SplittingTree::Leaf(i) => vec![*i],
            SplittingTree::Split { left, right, .. } => {
                let mut v = left.members();
                v.extend(right.members());
                v
            }
        }
    }
}

struct Dissector<'a> {
    factors: Vec<&'a [CVec]>,
    ids: &'a [usize],
    parties: usize,
    memo: HashMap<u64, Option<SplittingTree>>,
}

impl Dissector<'_> {
    /// Connected components of the non-orthogonality graph on `party`.
    fn components(&self, set: &[usize], party: usize) -> Vec<Vec<usize>> {
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for &m in set {
            let linked: Vec<usize> = (0..comps.len())
                .filter(|&c| {
                    comps[c].iter().any(|&o| {
                        self.factors[m][party].inner(&self.factors[o][party]).norm() > STRUCT_TOL
                    })
                })
                .collect();
            let mut merged = vec![m];
            for &c in linked.iter().rev() {
                merged.extend(comps.remove(c));
            }
            merged.sort_unstable();
            comps.push(merged);
        }
        comps.sort();
        comps
    }

    fn solve(&mut self, set: &[usize]) -> Option<SplittingTree> {
        if set.len() == 1 {
            return Some(SplittingTree::Leaf(self.ids[set[0]]));
        }
        let key = set.iter().fold(0u64, |k, &m| k | (1 << m));
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut found = None;
        'parties: for party in 0..self.parties {
            let comps = self.components(set, party);
            if comps.len() < 2 {
                continue;
            }
            let mut subtrees = Vec::with_capacity(comps.len());
            for c in &comps {
                match self.solve(c) {
                    Some(t) => subtrees.push(t),
                    None => continue 'parties,
                }
            }
            let mut tree = subtrees.pop().expect("at least two components");
            while let Some(t) = subtrees.pop() {
                tree = SplittingTree::Split {
                    party,
                    left: Box::new(t),
                    right: Box::new(tree),
                };
            }
            found = Some(tree);
            break;
        }
        self.memo.insert(key, found.clone());
        found
    }
}

/// Whether the product states of `e` can be split down to singletons by
/// orthogonality-respecting single-party cuts, with a witness tree.
pub fn is_dissectible(e: &ProductEnsemble) -> Result<(bool, Option<SplittingTree>)> {
    let states = e.product_states()?;
    if states.len() > 64 {
        return Err(Error::InvalidArgument(
            "dissectibility search supports at most 64 members".into(),
        ));
    }
    let mut d = Dissector {
        factors: states.iter().map(|s| s.factors()).collect(),
        ids: e.ids(),
        parties: e.parties(),
        memo: HashMap::new(),
    };
    let all: Vec<usize> = (0..states.len()).collect();
    let tree = d.solve(&all);
    Ok((tree.is_some(), tree))
}

/// Protocol realizing a splitting tree: at each node the party projects onto
/// the span of the left group's factors or its complement.
pub fn splitting_protocol(tree: &SplittingTree, e: &ProductEnsemble) -> Result<ProtocolNode> {
    let states = e.product_states()?;
    match tree {
        SplittingTree::Leaf(id) => Ok(ProtocolNode::guess(*id)),
        SplittingTree::Split { party, left, right } => {
            let vecs: Vec<CVec> = left
                .members()
                .iter()
                .map(|id| {
                    let pos = e
                        .position(*id)
                        .ok_or_else(|| Error::InvalidArgument(format!("no member {id}")))?;
                    Ok(states[pos].factor(*party).clone())
                })
                .collect::<Result<_>>()?;
            let p = CMat::projector_onto(&vecs);
            let q = &CMat::identity(p.rows()) - &p;
            let l = LocalElement::new(
                *party,
                p,
                format!("{}{}", ['A', 'B', 'C'].get(*party).unwrap_or(&'P'), "L"),
            );
            let r = LocalElement::new(
                *party,
                q,
                format!("{}{}", ['A', 'B', 'C'].get(*party).unwrap_or(&'P'), "R"),
            );
            ProtocolNode::internal(
                *party,
                vec![l, r],
                vec![splitting_protocol(left, e)?, splitting_protocol(right, e)?],
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HereditaryReport {
    /// Dissectible parent sets drawn.
    pub samples: usize,
    pub attempts: usize,
    /// Sub-subsets of a dissectible parent that failed the test.
    pub violations: usize,
}

/// Draw random dissectible subsets of `e` and test one random nonempty subset
/// of each.
pub fn hereditary_check(
    e: &ProductEnsemble,
    samples: usize,
    seed: u64,
) -> Result<HereditaryReport> {
    use rand::{Rng, SeedableRng};
    let n = e.len();
    if n == 0 || n > 63 {
        return Err(Error::InvalidArgument(format!(
            "hereditary check needs 1..=63 members, got {n}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let full = (1u64 << n) - 1;
    let pick = |mask: u64| -> Vec<usize> {
        (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| e.ids()[i])
            .collect()
    };
    let (mut found, mut attempts, mut violations) = (0, 0, 0);
    while found < samples {
        attempts += 1;
        if attempts > 1000 * samples.max(1) {
            return Err(Error::InvalidArgument(
                "too few dissectible subsets to sample".into(),
            ));
        }
        let mask = rng.random_range(1..=full);
        if !is_dissectible(&crate::ensembles::subset(e, &pick(mask), None)?)?.0 {
            continue;
        }
        found += 1;
        let sub = loop {
            let s = mask & rng.random_range(1..=full);
            if s != 0 {
                break s;
            }
        };
        if !is_dissectible(&crate::ensembles::subset(e, &pick(sub), None)?)?.0 {
            violations += 1;
        }
    }
    Ok(HereditaryReport {
        samples: found,
        attempts,
        violations,
    })
}
