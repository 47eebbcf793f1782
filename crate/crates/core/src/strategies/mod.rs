//! The nine-state measurement strategies and an optimizer over their
//! parameters.

mod domino;
mod optimize;
mod planner;

pub use domino::build_domino_cut;
pub use optimize::{halton, multistart_max, nelder_mead_max, NelderMeadOptions, SearchResult};
pub use planner::complete;

use std::fmt;
use std::str::FromStr;

use crate::ensembles::{nine_states, ProductEnsemble};
use crate::error::{Error, Result};
use crate::protocol::{run_protocol, LocalElement, Posterior, ProtocolNode};

/// Parameter point quoted for the five-parameter protocol.
pub const FIVE_PARAM_REFERENCE: [f64; 5] = [0.726, 0.395, 0.312, 0.071, 0.104];

/// Gap kept between parameters and the edges of their open domain.
const EDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyFamily {
    DominoCut,
    Symmetric,
    SingleP,
    FiveParam,
}

impl StrategyFamily {
    pub const ALL: [StrategyFamily; 4] = [
        StrategyFamily::DominoCut,
        StrategyFamily::Symmetric,
        StrategyFamily::SingleP,
        StrategyFamily::FiveParam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyFamily::DominoCut => "domino-cut",
            StrategyFamily::Symmetric => "symmetric",
            StrategyFamily::SingleP => "single-p",
            StrategyFamily::FiveParam => "five-param",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            StrategyFamily::DominoCut | StrategyFamily::Symmetric => 0,
            StrategyFamily::SingleP => 1,
            StrategyFamily::FiveParam => 5,
        }
    }

    /// Closed search box, pulled in from the open domain by a small margin.
    pub fn bounds(self) -> (Vec<f64>, Vec<f64>) {
        match self {
            StrategyFamily::DominoCut | StrategyFamily::Symmetric => (vec![], vec![]),
            StrategyFamily::SingleP => (vec![0.5 + EDGE], vec![1.0 - EDGE]),
            StrategyFamily::FiveParam => (
                vec![0.5 + EDGE, EDGE, EDGE, EDGE, EDGE],
                vec![1.0 - EDGE; 5],
            ),
        }
    }

    pub fn build(self, params: &[f64]) -> Result<ProtocolNode> {
        if params.len() != self.param_count() {
            return Err(Error::InvalidArgument(format!(
                "{} takes {} parameters, got {}",
                self.name(),
                self.param_count(),
                params.len()
            )));
        }
        match self {
            StrategyFamily::DominoCut => build_domino_cut(4),
            StrategyFamily::Symmetric => build_symmetric(),
            StrategyFamily::SingleP => build_single_p(params[0]),
            StrategyFamily::FiveParam => {
                build_five_param(params[0], params[1], params[2], params[3], params[4])
            }
        }
    }
}

impl fmt::Display for StrategyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StrategyFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy '{s}'")))
    }
}

fn reference() -> Result<Posterior> {
    Posterior::initial(&nine_states())
}

fn mirrored(d: [f64; 3], mirror: bool) -> Vec<f64> {
    let mut v = d.to_vec();
    if mirror {
        v.reverse();
    }
    v
}

const ALICE: usize = 0;
const BOB: usize = 1;

/// Bob opens with `{p, ½, 1−p}` / `{1−p, ½, p}`; each branch is finished by
/// the cut planner.
fn build_opening(p: f64) -> Result<ProtocolNode> {
    let root = reference()?;
    let mut elements = Vec::with_capacity(2);
    let mut children = Vec::with_capacity(2);
    for (label, mirror) in [("b1", false), ("b2", true)] {
        let el = LocalElement::from_povm(BOB, &mirrored([p, 0.5, 1.0 - p], mirror), label)?;
        children.push(complete(&root.apply_round(&el)?)?);
        elements.push(el);
    }
    ProtocolNode::internal(BOB, elements, children)
}

pub fn build_symmetric() -> Result<ProtocolNode> {
    build_opening(1.0)
}

pub fn build_single_p(p: f64) -> Result<ProtocolNode> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::Domain {
            value: p,
            domain: "(1/2, 1)",
        });
    }
    build_opening(p)
}

fn in_open_unit(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            value: x,
            domain: "(0, 1)",
        })
    }
}

pub fn build_five_param(p: f64, q: f64, r: f64, s: f64, t: f64) -> Result<ProtocolNode> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::Domain {
            value: p,
            domain: "(1/2, 1)",
        });
    }
    for x in [q, r, s, t] {
        in_open_unit(x)?;
    }
    let root = reference()?;
    let step = |post: &Posterior,
                party: usize,
                branches: Vec<(&str, Vec<f64>)>,
                next: &dyn Fn(&Posterior, usize) -> Result<ProtocolNode>| {
        let mut elements = Vec::with_capacity(branches.len());
        let mut children = Vec::with_capacity(branches.len());
        for (k, (label, d)) in branches.into_iter().enumerate() {
            let el = LocalElement::from_povm(party, &d, label)?;
            children.push(next(&post.apply_round(&el)?, k)?);
            elements.push(el);
        }
        ProtocolNode::internal(party, elements, children)
    };

    let mut elements = Vec::with_capacity(2);
    let mut children = Vec::with_capacity(2);
    for (label, m) in [("b1", false), ("b2", true)] {
        let el = LocalElement::from_povm(BOB, &mirrored([p, 0.5, 1.0 - p], m), label)?;
        let post = root.apply_round(&el)?;
        let tree = step(
            &post,
            ALICE,
            vec![
                ("a1", mirrored([0.0, 1.0 - q, 1.0 - r], m)),
                ("a2", mirrored([1.0, q, r], m)),
            ],
            &|post, k| {
                if k == 0 {
                    return complete(post);
                }
                step(
                    post,
                    BOB,
                    vec![
                        ("b3", mirrored([1.0 - s, 1.0 - t, 0.0], m)),
                        ("b4", mirrored([s, t, 1.0], m)),
                    ],
                    &|post, k| {
                        if k == 0 {
                            return complete(post);
                        }
                        step(
                            post,
                            ALICE,
                            vec![
                                ("a3", mirrored([1.0, 1.0, 0.0], m)),
                                ("a4", mirrored([0.0, 0.0, 1.0], m)),
                            ],
                            &|post, _| complete(post),
                        )
                    },
                )
            },
        )?;
        elements.push(el);
        children.push(tree);
    }
    ProtocolNode::internal(BOB, elements, children)
}

/// Mutual information of `family` at `params` on `e`.
pub fn evaluate(family: StrategyFamily, params: &[f64], e: &ProductEnsemble) -> Result<f64> {
    run_protocol(&family.build(params)?, e)?.mutual_information()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    pub starts: usize,
    pub seed: u64,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            starts: 24,
            seed: 0,
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub family: StrategyFamily,
    pub params: Vec<f64>,
    pub mutual_information: f64,
    pub evaluations: usize,
}

/// Multi-start simplex search for the parameters maximizing mutual
/// information on `e`.
pub fn optimize(
    family: StrategyFamily,
    e: &ProductEnsemble,
    opts: &OptimizeOptions,
) -> Result<Optimum> {
    if family.param_count() == 0 {
        return Ok(Optimum {
            family,
            params: vec![],
            mutual_information: evaluate(family, &[], e)?,
            evaluations: 1,
        });
    }
    let (lo, hi) = family.bounds();
    let objective = |x: &[f64]| evaluate(family, x, e).unwrap_or(f64::NEG_INFINITY);
    let found = multistart_max(
        &objective,
        &lo,
        &hi,
        opts.starts.max(1),
        opts.seed,
        opts.nelder_mead,
    );
    Ok(Optimum {
        family,
        mutual_information: evaluate(family, &found.params, e)?,
        params: found.params,
        evaluations: found.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(tree: &ProtocolNode) -> f64 {
        run_protocol(tree, &nine_states())
            .unwrap()
            .mutual_information()
            .unwrap()
    }

    #[test]
    fn symmetric_value() {
        let v = mi(&build_symmetric().unwrap());
        assert!((v - 2.9964).abs() < 5e-4, "{v}");
    }

    #[test]
    fn five_param_at_reference_point() {
        let [p, q, r, s, t] = FIVE_PARAM_REFERENCE;
        let v = mi(&build_five_param(p, q, r, s, t).unwrap());
        assert!((v - 3.0125).abs() < 1e-3, "{v}");
        assert!((v - 3.0124577).abs() < 1e-6, "{v}");
    }

    #[test]
    fn five_param_midpoint_is_worse() {
        let v = mi(&build_five_param(0.75, 0.5, 0.5, 0.5, 0.5).unwrap());
        assert!(v < 3.0125, "{v}");
    }

    #[test]
    fn single_p_near_half_is_weak() {
        let v = mi(&build_single_p(0.5 + 1e-6).unwrap());
        assert!(v < 3.0, "{v}");
    }

    #[test]
    fn parameter_domains() {
        assert!(build_single_p(0.5).is_err());
        assert!(build_single_p(1.0).is_err());
        assert!(build_five_param(0.4, 0.5, 0.5, 0.5, 0.5).is_err());
        assert!(build_five_param(0.7, 0.0, 0.5, 0.5, 0.5).is_err());
        assert!(StrategyFamily::FiveParam.build(&[0.7]).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in StrategyFamily::ALL {
            assert_eq!(f.name().parse::<StrategyFamily>().unwrap(), f);
        }
        assert!("nope".parse::<StrategyFamily>().is_err());
    }

    #[test]
    fn zero_parameter_family_returns_fixed_value() {
        let o = optimize(
            StrategyFamily::DominoCut,
            &nine_states(),
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!((o.mutual_information - (9f64.log2() - 2.0 / 9.0)).abs() < 1e-12);
        assert!(o.params.is_empty());
    }
}
