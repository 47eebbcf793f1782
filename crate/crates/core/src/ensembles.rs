//! State catalogs: the nine-state domino basis and its rotated family, the
//! eight-state three-qubit basis, Bell ensembles, and the separable mixed pair.
//!
//! Members carry a catalog id (1-based, as in `ψ1..ψ9`) that survives
//! [`subset`], so protocol trees can name members independently of position.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::qcore::{gram, CMat, CVec, ProbVec, ALG_TOL};

/// One product state, stored as normalized per-party factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyState {
    factors: Vec<CVec>,
}

impl PartyState {
    /// Factors are normalized on the way in.
    pub fn new(factors: Vec<CVec>) -> Self {
        assert!(
            !factors.is_empty(),
            "a product state needs at least one party"
        );
        PartyState {
            factors: factors.iter().map(CVec::normalized).collect(),
        }
    }

    pub fn factors(&self) -> &[CVec] {
        &self.factors
    }

    pub fn factor(&self, party: usize) -> &CVec {
        &self.factors[party]
    }

    pub fn ket(&self) -> CVec {
        let mut k = self.factors[0].clone();
        for f in &self.factors[1..] {
            k = k.kron(f);
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Product(PartyState),
    Entangled(CVec),
    Mixed(CMat),
}

impl Member {
    /// Density operator on the full space.
    pub fn density(&self) -> CMat {
        match self {
            Member::Product(s) => {
                let k = s.ket();
                CMat::outer(&k, &k)
            }
            Member::Entangled(k) => CMat::outer(k, k),
            Member::Mixed(rho) => rho.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductEnsemble {
    name: String,
    party_dims: Vec<usize>,
    ids: Vec<usize>,
    members: Vec<Member>,
    priors: ProbVec,
}

impl ProductEnsemble {
    pub fn new(
        name: impl Into<String>,
        party_dims: Vec<usize>,
        ids: Vec<usize>,
        members: Vec<Member>,
        priors: ProbVec,
    ) -> Result<Self> {
        if members.is_empty() || ids.len() != members.len() {
            return Err(Error::InvalidArgument(
                "ids and members must be nonempty and aligned".into(),
            ));
        }
        if priors.len() != members.len() {
            return Err(Error::DimensionMismatch {
                expected: members.len(),
                found: priors.len(),
            });
        }
        let total: usize = party_dims.iter().product();
        for m in &members {
            match m {
                Member::Product(s) => {
                    if s.factors().len() != party_dims.len() {
                        return Err(Error::DimensionMismatch {
                            expected: party_dims.len(),
                            found: s.factors().len(),
                        });
                    }
                    for (f, &d) in s.factors().iter().zip(&party_dims) {
                        if f.dim() != d {
                            return Err(Error::DimensionMismatch {
                                expected: d,
                                found: f.dim(),
                            });
                        }
                    }
                }
                Member::Entangled(k) if k.dim() != total => {
                    return Err(Error::DimensionMismatch {
                        expected: total,
                        found: k.dim(),
                    });
                }
                Member::Mixed(rho) if rho.rows() != total || rho.cols() != total => {
                    return Err(Error::DimensionMismatch {
                        expected: total,
                        found: rho.rows(),
                    });
                }
                _ => {}
            }
        }
        Ok(ProductEnsemble {
            name: name.into(),
            party_dims,
            ids,
            members,
            priors,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn parties(&self) -> usize {
        self.party_dims.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn priors(&self) -> &ProbVec {
        &self.priors
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn with_priors(mut self, priors: ProbVec) -> Result<Self> {
        if priors.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: priors.len(),
            });
        }
        self.priors = priors;
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// All members as product states, or [`Error::MixedMembers`].
    pub fn product_states(&self) -> Result<Vec<&PartyState>> {
        self.members
            .iter()
            .map(|m| match m {
                Member::Product(s) => Ok(s),
                _ => Err(Error::MixedMembers),
            })
            .collect()
    }

    pub fn is_pure(&self) -> bool {
        !self.members.iter().any(|m| matches!(m, Member::Mixed(_)))
    }

    /// Full-space kets of pure members.
    pub fn kets(&self) -> Result<Vec<CVec>> {
        self.members
            .iter()
            .map(|m| match m {
                Member::Product(s) => Ok(s.ket()),
                Member::Entangled(k) => Ok(k.clone()),
                Member::Mixed(_) => Err(Error::MixedMembers),
            })
            .collect()
    }

    pub fn gram(&self) -> Result<CMat> {
        gram(&self.kets()?)
    }
}

fn ket(v: &[f64]) -> CVec {
    CVec::from_real(v)
}

fn product(factors: &[&[f64]]) -> Member {
    Member::Product(PartyState::new(factors.iter().map(|f| ket(f)).collect()))
}

/// The rotated nine-state family; all angles `π/4` give the domino basis.
pub fn build_nine_states(thetas: [f64; 4], priors: ProbVec) -> Result<ProductEnsemble> {
    let [t23, t45, t67, t89] = thetas;
    let (c23, s23) = (t23.cos(), t23.sin());
    let (c45, s45) = (t45.cos(), t45.sin());
    let (c67, s67) = (t67.cos(), t67.sin());
    let (c89, s89) = (t89.cos(), t89.sin());
    let k0 = [1.0, 0.0, 0.0];
    let k1 = [0.0, 1.0, 0.0];
    let k2 = [0.0, 0.0, 1.0];
    let members = vec![
        product(&[&k1, &k1]),
        product(&[&k0, &[c23, s23, 0.0]]),
        product(&[&k0, &[-s23, c23, 0.0]]),
        product(&[&k2, &[0.0, s45, c45]]),
        product(&[&k2, &[0.0, c45, -s45]]),
        product(&[&[0.0, s67, c67], &k0]),
        product(&[&[0.0, c67, -s67], &k0]),
        product(&[&[c89, s89, 0.0], &k2]),
        product(&[&[-s89, c89, 0.0], &k2]),
    ];
    let name = if thetas.iter().all(|t| (t - FRAC_PI_4).abs() < ALG_TOL) {
        "nine"
    } else {
        "nine-rotated"
    };
    ProductEnsemble::new(name, vec![3, 3], (1..=9).collect(), members, priors)
}

/// Uniform nine-state domino basis.
pub fn nine_states() -> ProductEnsemble {
    build_nine_states([FRAC_PI_4; 4], ProbVec::uniform(9)).expect("static catalog")
}

pub fn build_eight_states_three_party(priors: ProbVec) -> Result<ProductEnsemble> {
    let z = [1.0, 0.0];
    let o = [0.0, 1.0];
    let p = [1.0, 1.0];
    let m = [1.0, -1.0];
    let members = vec![
        product(&[&z, &z, &z]),
        product(&[&o, &o, &o]),
        product(&[&p, &z, &o]),
        product(&[&m, &z, &o]),
        product(&[&z, &o, &p]),
        product(&[&z, &o, &m]),
        product(&[&o, &p, &z]),
        product(&[&o, &m, &z]),
    ];
    ProductEnsemble::new(
        "three-party-8",
        vec![2, 2, 2],
        (1..=8).collect(),
        members,
        priors,
    )
}

/// Equiprobable Bell ensemble: `{Φ+, Φ−, Ψ+, Ψ−}` or `{Φ+, Ψ+}`.
pub fn build_bell_ensemble(count: usize) -> Result<ProductEnsemble> {
    let s = 0.5f64.sqrt();
    let phi_p = ket(&[s, 0.0, 0.0, s]);
    let phi_m = ket(&[s, 0.0, 0.0, -s]);
    let psi_p = ket(&[0.0, s, s, 0.0]);
    let psi_m = ket(&[0.0, s, -s, 0.0]);
    let kets = match count {
        4 => vec![phi_p, phi_m, psi_p, psi_m],
        2 => vec![phi_p, psi_p],
        _ => {
            return Err(Error::InvalidArgument(format!(
                "Bell ensemble size must be 2 or 4, got {count}"
            )))
        }
    };
    ProductEnsemble::new(
        format!("bell{count}"),
        vec![2, 2],
        (1..=count).collect(),
        kets.into_iter().map(Member::Entangled).collect(),
        ProbVec::uniform(count),
    )
}

/// `ρ0 = ½(|0+⟩⟨0+| + |+0⟩⟨+0|)`, `ρ1 = ½(|11⟩⟨11| + |−−⟩⟨−−|)`.
pub fn build_mixed_pair() -> (CMat, CMat) {
    let s = 0.5f64.sqrt();
    let zero = ket(&[1.0, 0.0]);
    let one = ket(&[0.0, 1.0]);
    let plus = ket(&[s, s]);
    let minus = ket(&[s, -s]);
    let mix = |a: CVec, b: CVec| {
        let sum = &CMat::outer(&a, &a) + &CMat::outer(&b, &b);
        sum.scale(crate::qcore::re(0.5))
    };
    let rho0 = mix(zero.kron(&plus), plus.kron(&zero));
    let rho1 = mix(one.kron(&one), minus.kron(&minus));
    (rho0, rho1)
}

pub fn mixed_pair_ensemble() -> ProductEnsemble {
    let (r0, r1) = build_mixed_pair();
    ProductEnsemble::new(
        "mixed-pair",
        vec![2, 2],
        vec![0, 1],
        vec![Member::Mixed(r0), Member::Mixed(r1)],
        ProbVec::uniform(2),
    )
    .expect("static catalog")
}

/// Restrict to the members with the given ids. Priors are uniform unless
/// `weights` is supplied.
pub fn subset(
    e: &ProductEnsemble,
    keep: &[usize],
    weights: Option<ProbVec>,
) -> Result<ProductEnsemble> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "subset needs at least one member".into(),
        ));
    }
    let mut ids = Vec::with_capacity(keep.len());
    let mut members = Vec::with_capacity(keep.len());
    for &id in keep {
        let pos = e
            .position(id)
            .ok_or_else(|| Error::InvalidArgument(format!("no member with id {id}")))?;
        if ids.contains(&id) {
            return Err(Error::InvalidArgument(format!("member {id} listed twice")));
        }
        ids.push(id);
        members.push(e.members[pos].clone());
    }
    let priors = match weights {
        Some(w) => w,
        None => ProbVec::uniform(keep.len()),
    };
    ProductEnsemble::new(e.name.clone(), e.party_dims.clone(), ids, members, priors)
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 9] = [
    "nine",
    "nine-rotated",
    "eight-no-psi4",
    "2468",
    "246",
    "three-party-8",
    "bell2",
    "bell4",
    "mixed-pair",
];

/// Default angles for the `nine-rotated` catalog entry.
pub const DEFAULT_ROTATION: [f64; 4] = [0.3, 0.55, 0.9, 1.2];

pub fn catalog(name: &str) -> Result<ProductEnsemble> {
    let nine = nine_states();
    let e = match name {
        "nine" => nine,
        "nine-rotated" => build_nine_states(DEFAULT_ROTATION, ProbVec::uniform(9))?,
        "eight-no-psi4" => subset(&nine, &[1, 2, 3, 5, 6, 7, 8, 9], None)?,
        "2468" => subset(&nine, &[2, 4, 6, 8], None)?,
        "246" => subset(&nine, &[2, 4, 6], None)?,
        "three-party-8" => build_eight_states_three_party(ProbVec::uniform(8))?,
        "bell2" => build_bell_ensemble(2)?,
        "bell4" => build_bell_ensemble(4)?,
        "mixed-pair" => mixed_pair_ensemble(),
        other => return Err(Error::UnknownEnsemble(other.to_string())),
    };
    Ok(e.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{re, schmidt_rank, STRUCT_TOL};

    fn is_identity(g: &CMat, tol: f64) -> bool {
        g.max_abs_diff(&CMat::identity(g.rows())) <= tol
    }

    #[test]
    fn nine_state_factors_and_gram() {
        let e = nine_states();
        let s = 0.5f64.sqrt();
        let psi2 = e.product_states().unwrap()[1];
        assert!((psi2.factor(0) - &ket(&[1.0, 0.0, 0.0])).norm() < 1e-15);
        assert!((psi2.factor(1) - &ket(&[s, s, 0.0])).norm() < 1e-15);
        assert!(is_identity(&e.gram().unwrap(), 1e-12));
    }

    #[test]
    fn zero_angles_give_basis_states() {
        let e = build_nine_states([0.0; 4], ProbVec::uniform(9)).unwrap();
        for s in e.product_states().unwrap() {
            assert_eq!(s.ket().support(STRUCT_TOL).len(), 1);
        }
        assert!(is_identity(&e.gram().unwrap(), 1e-12));
    }

    #[test]
    fn eight_state_catalog() {
        let e = build_eight_states_three_party(ProbVec::uniform(8)).unwrap();
        let s = 0.5f64.sqrt();
        let phi3 = e.product_states().unwrap()[2];
        assert!((phi3.factor(0) - &ket(&[s, s])).norm() < 1e-15);
        assert!((phi3.factor(1) - &ket(&[1.0, 0.0])).norm() < 1e-15);
        assert!((phi3.factor(2) - &ket(&[0.0, 1.0])).norm() < 1e-15);
        assert!(is_identity(&e.gram().unwrap(), 1e-12));
        assert!(e.priors().as_slice().iter().all(|&p| p == 0.125));
    }

    #[test]
    fn bell_catalogs() {
        let e = build_bell_ensemble(4).unwrap();
        let k = e.kets().unwrap();
        let s = 0.5f64.sqrt();
        assert!((&k[3] - &ket(&[0.0, s, -s, 0.0])).norm() < 1e-15);
        assert!(is_identity(&e.gram().unwrap(), 1e-12));
        for ket in &k {
            assert_eq!(schmidt_rank(ket, 2, 2).unwrap(), 2);
        }
        assert!(build_bell_ensemble(3).is_err());
        assert!(e.product_states().is_err());
    }

    #[test]
    fn mixed_pair_properties() {
        let (r0, r1) = build_mixed_pair();
        assert!((r0.trace() - re(1.0)).norm() < 1e-12);
        assert!((r1.trace() - re(1.0)).norm() < 1e-12);
        assert!((&r0 * &r1).trace().norm() < 1e-12);
        assert!(r0.is_psd(STRUCT_TOL) && r1.is_psd(STRUCT_TOL));
        assert_eq!(r0.rank(STRUCT_TOL), 2);
    }

    #[test]
    fn subsets() {
        let nine = nine_states();
        let eight = subset(&nine, &[1, 2, 3, 5, 6, 7, 8, 9], None).unwrap();
        assert_eq!(eight.len(), 8);
        assert!(eight
            .priors()
            .as_slice()
            .iter()
            .all(|&p| (p - 0.125).abs() < 1e-15));
        assert_eq!(
            subset(&nine, &[2, 4, 6, 8], None).unwrap().ids(),
            &[2, 4, 6, 8]
        );
        let all = subset(&nine, &(1..=9).collect::<Vec<_>>(), None).unwrap();
        assert_eq!(all, nine);
        assert!(subset(&nine, &[], None).is_err());
        assert!(subset(&nine, &[10], None).is_err());
    }

    #[test]
    fn catalog_names_resolve() {
        for name in CATALOG_NAMES {
            let e = catalog(name).unwrap();
            assert_eq!(e.name(), name);
        }
        assert_eq!(catalog("ten"), Err(Error::UnknownEnsemble("ten".into())));
    }
}
