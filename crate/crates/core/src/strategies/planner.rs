//! Completion of a partially measured ensemble by standard-basis cuts.
//!
//! Members are grouped into units: members whose support rectangles overlap
//! on every party. A clean cut separates whole units along one party. When no
//! clean cut exists, the planner takes the standard-basis bipartition that
//! tears apart the least posterior mass. Two members left in one unit end in
//! a pair measurement.

use crate::error::Result;
use crate::protocol::{LocalElement, Posterior, ProtocolNode};

const SUPPORT_TOL: f64 = 1e-12;

pub(crate) const PARTY_NAMES: [char; 3] = ['A', 'B', 'C'];

fn party_name(p: usize) -> char {
    PARTY_NAMES.get(p).copied().unwrap_or('P')
}

/// Label for a 0/1 diagonal: party letter followed by the kept indices.
pub(crate) fn cut_label(party: usize, diag: &[f64]) -> String {
    let kept: String = diag
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, _)| char::from_digit(i as u32, 36).unwrap_or('?'))
        .collect();
    format!("{}{}", party_name(party), kept)
}

fn indicator(dim: usize, side: &[bool]) -> Vec<f64> {
    (0..dim).map(|i| if side[i] { 1.0 } else { 0.0 }).collect()
}

fn support(post: &Posterior, member: usize, party: usize) -> Vec<bool> {
    post.residual_factors(member)[party]
        .entries()
        .iter()
        .map(|z| z.norm() > SUPPORT_TOL)
        .collect()
}

fn intersects(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).any(|(x, y)| *x && *y)
}

fn union_into(acc: &mut [bool], other: &[bool]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a |= *b;
    }
}

/// Units of alive members, each as a list of member positions.
fn units(post: &Posterior, alive: &[usize], parties: usize) -> Vec<Vec<usize>> {
    let n = alive.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for a in 0..n {
        for b in a + 1..n {
            let overlap = (0..parties)
                .all(|p| intersects(&support(post, alive[a], p), &support(post, alive[b], p)));
            if overlap {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (a, &m) in alive.iter().enumerate() {
        let r = find(&mut parent, a);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(m),
            None => groups.push((r, vec![m])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

fn unit_support(post: &Posterior, unit: &[usize], party: usize, dim: usize) -> Vec<bool> {
    let mut acc = vec![false; dim];
    for &m in unit {
        union_into(&mut acc, &support(post, m, party));
    }
    acc
}

/// A party along which unit supports fall into several connected blocks.
fn clean_cut(post: &Posterior, units: &[Vec<usize>], dims: &[usize]) -> Option<(usize, Vec<f64>)> {
    for (p, &dim) in dims.iter().enumerate() {
        let mut comps: Vec<Vec<bool>> = Vec::new();
        for u in units {
            let mut s = unit_support(post, u, p, dim);
            let (merged, rest): (Vec<_>, Vec<_>) =
                comps.into_iter().partition(|c| intersects(c, &s));
            for c in &merged {
                union_into(&mut s, c);
            }
            comps = rest;
            comps.push(s);
        }
        if comps.len() > 1 {
            let lowest = comps
                .iter()
                .min_by_key(|c| c.iter().position(|&x| x).unwrap_or(usize::MAX))?;
            return Some((p, indicator(dim, lowest)));
        }
    }
    None
}

/// Standard-basis bipartition splitting the alive set while tearing the
/// least posterior mass out of intact units.
fn damaging_cut(
    post: &Posterior,
    units: &[Vec<usize>],
    dims: &[usize],
) -> Result<Option<(usize, Vec<f64>)>> {
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for (p, &dim) in dims.iter().enumerate() {
        // subsets containing index 0, excluding the full set
        for mask in 0..(1usize << (dim - 1)) {
            let side: Vec<bool> = (0..dim)
                .map(|i| i == 0 || (mask >> (i - 1)) & 1 == 1)
                .collect();
            if side.iter().all(|&x| x) {
                continue;
            }
            let d = indicator(dim, &side);
            let other: Vec<f64> = d.iter().map(|x| 1.0 - x).collect();
            let left = post.apply_round(&LocalElement::from_povm(p, &d, "")?)?;
            let right = post.apply_round(&LocalElement::from_povm(p, &other, "")?)?;
            if left.alive().is_empty() || right.alive().is_empty() {
                continue;
            }
            let comp: Vec<bool> = side.iter().map(|x| !x).collect();
            let cost: f64 = units
                .iter()
                .filter(|u| {
                    let s = unit_support(post, u, p, dim);
                    intersects(&s, &side) && intersects(&s, &comp)
                })
                .flat_map(|u| u.iter().map(|&m| post.joint()[m]))
                .sum();
            if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                best = Some((cost, p, d));
            }
        }
    }
    Ok(best.map(|(_, p, d)| (p, d)))
}

fn split(post: &Posterior, party: usize, d: Vec<f64>) -> Result<ProtocolNode> {
    let other: Vec<f64> = d.iter().map(|x| 1.0 - x).collect();
    let mut elements = Vec::with_capacity(2);
    let mut children = Vec::with_capacity(2);
    for diag in [d, other] {
        let el = LocalElement::from_povm(party, &diag, cut_label(party, &diag))?;
        children.push(complete(&post.apply_round(&el)?)?);
        elements.push(el);
    }
    ProtocolNode::internal(party, elements, children)
}

/// Finish the protocol from `post` using local standard-basis cuts.
pub fn complete(post: &Posterior) -> Result<ProtocolNode> {
    let alive = post.alive();
    let ids = post.ids();
    let dims: Vec<usize> = post.accumulated().iter().map(|a| a.rows()).collect();
    match alive.len() {
        0 => return Ok(ProtocolNode::declare("void")),
        1 => return Ok(ProtocolNode::guess(ids[alive[0]])),
        _ => {}
    }
    let units = units(post, &alive, dims.len());
    if alive.len() == 2 && units.len() == 1 {
        return ProtocolNode::pair(ids[alive[0]], ids[alive[1]]);
    }
    if let Some((p, d)) = clean_cut(post, &units, &dims) {
        return split(post, p, d);
    }
    if let Some((p, d)) = damaging_cut(post, &units, &dims)? {
        return split(post, p, d);
    }
    let best = alive.iter().copied().fold(alive[0], |b, m| {
        if post.joint()[m] > post.joint()[b] {
            m
        } else {
            b
        }
    });
    Ok(ProtocolNode::guess(ids[best]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{catalog, nine_states, subset};
    use crate::protocol::run_protocol;

    #[test]
    fn labels() {
        assert_eq!(cut_label(1, &[1.0, 1.0, 0.0]), "B01");
        assert_eq!(cut_label(0, &[0.0, 0.0, 1.0]), "A2");
    }

    #[test]
    fn dissectible_set_completes_perfectly() {
        let e = catalog("246").unwrap();
        let tree = complete(&Posterior::initial(&e).unwrap()).unwrap();
        let r = run_protocol(&tree, &e).unwrap();
        assert!((r.mutual_information().unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!(r.outcome_entropy_given_member() < 1e-12);
    }

    #[test]
    fn single_member_is_a_guess() {
        let e = subset(&nine_states(), &[7], None).unwrap();
        assert_eq!(
            complete(&Posterior::initial(&e).unwrap()).unwrap(),
            ProtocolNode::guess(7)
        );
    }

    #[test]
    fn domino_pair_becomes_pair_leaf() {
        let e = subset(&nine_states(), &[4, 5], None).unwrap();
        assert_eq!(
            complete(&Posterior::initial(&e).unwrap()).unwrap(),
            ProtocolNode::pair(4, 5).unwrap()
        );
    }

    #[test]
    fn obvious_2468_protocol_costs_a_quarter_bit() {
        let e = catalog("2468").unwrap();
        let tree = complete(&Posterior::initial(&e).unwrap()).unwrap();
        let r = run_protocol(&tree, &e).unwrap();
        assert!(r.is_perfect(1e-12));
        assert!((r.outcome_entropy_given_member() - 0.25).abs() < 1e-12);
    }
}
