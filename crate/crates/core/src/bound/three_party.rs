//! Exact orthogonality of the eight three-qubit residuals forces Alice's,
//! Bob's and Carol's stage-I operators to be multiples of the identity.
//!
//! Each operator `X` is Hermitian 2×2 with positive diagonal, parametrized by
//! the real vector `(X00, X11, Re X01, Im X01)`. Every condition
//! `⟨φ_j|a⊗b⊗c|φ_i⟩ = 0` is a product of three linear functionals, one per
//! party. Two propagation rules run to a fixpoint:
//!
//! * pair rule: when two factors are certified nonzero (a positive combination
//!   of diagonal entries on the current solution set), the third vanishes;
//! * group rule: conditions sharing the same functional on one party are
//!   combined linearly; if the combined cofactor is a product of diagonal
//!   entries, the shared functional vanishes.

use nalgebra::{DMatrix, DVector};

use crate::ensembles::build_eight_states_three_party;
use crate::qcore::{c64, CMat, CVec, ProbVec};

const TOL: f64 = 1e-10;
const NAMES: [char; 3] = ['a', 'b', 'c'];

type Coef = [c64; 4];

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    /// From the single condition on `(i, j)` (1-based member numbers).
    Pair((usize, usize)),
    /// From a linear combination of these conditions.
    Group(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    pub operator: char,
    pub relation: String,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub facts: Vec<Fact>,
    /// Dimension of the remaining solution space for `a`, `b`, `c`.
    pub solution_dims: [usize; 3],
    /// Max entrywise deviation of each operator (scaled to unit `X00`) from I.
    pub deviation: [f64; 3],
    pub max_deviation: f64,
    /// Largest condition residual at `a = b = c = I`.
    pub identity_residual: f64,
    /// Largest condition residual with `a01 = 0.1`, `b = c = I`.
    pub perturbed_residual: f64,
    pub perturbed_condition: (usize, usize),
    /// The stage-I spread bounds are consistently ordered on a grid over `(0, 1/56)`.
    pub spread_bound_ok: bool,
}

impl RigidityReport {
    pub fn proportional_to_identity(&self) -> bool {
        self.solution_dims == [1, 1, 1] && self.max_deviation <= TOL
    }
}

fn factors() -> Vec<Vec<CVec>> {
    let e = build_eight_states_three_party(ProbVec::uniform(8)).expect("static catalog");
    e.product_states()
        .expect("pure catalog")
        .iter()
        .map(|s| s.factors().to_vec())
        .collect()
}

/// Coefficients of `X ↦ ⟨u|X|v⟩` over `(X00, X11, Re X01, Im X01)`.
fn functional(u: &CVec, v: &CVec) -> Coef {
    let g = |k: usize, l: usize| u.get(k).conj() * v.get(l);
    [
        g(0, 0),
        g(1, 1),
        g(0, 1) + g(1, 0),
        c64::new(0.0, 1.0) * (g(0, 1) - g(1, 0)),
    ]
}

const DIAG: [[f64; 4]; 2] = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]];

/// Orthonormal basis (as columns) of the null space of `rows`.
fn nullspace(rows: &[[f64; 4]]) -> DMatrix<f64> {
    let mut gram = DMatrix::<f64>::zeros(4, 4);
    for r in rows {
        let v = DVector::from_row_slice(r);
        gram += &v * v.transpose();
    }
    let eig = gram.symmetric_eigen();
    let scale = eig.eigenvalues.iter().copied().fold(1.0, f64::max);
    let cols: Vec<DVector<f64>> = (0..4)
        .filter(|&k| eig.eigenvalues[k] <= 1e-12 * scale)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(4, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

fn restrict(c: &Coef, n: &DMatrix<f64>) -> Vec<c64> {
    (0..n.ncols())
        .map(|k| (0..4).map(|m| c[m] * n[(m, k)]).sum())
        .collect()
}

fn restrict_real(c: &[f64; 4], n: &DMatrix<f64>) -> Vec<f64> {
    (0..n.ncols())
        .map(|k| (0..4).map(|m| c[m] * n[(m, k)]).sum())
        .collect()
}

fn norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// True when the functional equals `α X00 + β X11` on the solution set with
/// `α, β ≥ 0` not both zero.
fn certified(c: &Coef, n: &DMatrix<f64>) -> bool {
    let r = restrict(c, n);
    if norm(&r) <= TOL || r.iter().any(|z| z.im.abs() > TOL) {
        return false;
    }
    let target: Vec<f64> = r.iter().map(|z| z.re).collect();
    let d0 = restrict_real(&DIAG[0], n);
    let d1 = restrict_real(&DIAG[1], n);
    let fits = |basis: &[&Vec<f64>]| -> bool {
        let a = DMatrix::from_fn(target.len(), basis.len(), |i, j| basis[j][i]);
        let b = DVector::from_column_slice(&target);
        let Ok(x) = a.clone().svd(true, true).solve(&b, 1e-14) else {
            return false;
        };
        let resid = (&a * &x - &b).norm();
        resid <= TOL && x.iter().all(|&w| w >= -TOL) && x.iter().sum::<f64>() > TOL
    };
    fits(&[&d0]) || fits(&[&d1]) || fits(&[&d0, &d1])
}

fn describe(op: char, row: &[f64; 4]) -> String {
    let names = [
        format!("{op}00"),
        format!("{op}11"),
        format!("Re {op}01"),
        format!("Im {op}01"),
    ];
    let mut scale = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if row
        .iter()
        .find(|x| x.abs() > 1e-9 * scale)
        .is_some_and(|x| *x < 0.0)
    {
        scale = -scale;
    }
    let mut out = String::new();
    for (k, &x) in row.iter().enumerate() {
        let x = x / scale;
        if x.abs() < 1e-9 {
            continue;
        }
        let sign = if x < 0.0 { "-" } else { "+" };
        let mag = x.abs();
        let term = if (mag - 1.0).abs() < 1e-9 {
            names[k].clone()
        } else {
            format!("{mag:.6} {}", names[k])
        };
        if out.is_empty() {
            out = if sign == "-" {
                format!("-{term}")
            } else {
                term
            };
        } else {
            out = format!("{out} {sign} {term}");
        }
    }
    format!("{out} = 0")
}

struct Solver {
    /// `conds[k] = ((i, j), [f_a, f_b, f_c])`, 1-based member numbers.
    conds: Vec<((usize, usize), [Coef; 3])>,
    rows: [Vec<[f64; 4]>; 3],
    null: [DMatrix<f64>; 3],
    facts: Vec<Fact>,
}

impl Solver {
    fn new() -> Self {
        let f = factors();
        let mut conds = Vec::new();
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                let fs = [0, 1, 2].map(|p| functional(&f[j][p], &f[i][p]));
                conds.push(((i + 1, j + 1), fs));
            }
        }
        let full = nullspace(&[]);
        Solver {
            conds,
            rows: [vec![], vec![], vec![]],
            null: [full.clone(), full.clone(), full],
            facts: vec![],
        }
    }

    /// Impose `c = 0` on party `p`; returns whether anything new was learned.
    fn impose(&mut self, p: usize, c: &Coef, rule: Rule) -> bool {
        if norm(&restrict(c, &self.null[p])) <= TOL {
            return false;
        }
        for part in [c.map(|z| z.re), c.map(|z| z.im)] {
            if restrict_real(&part, &self.null[p])
                .iter()
                .all(|x| x.abs() <= TOL)
            {
                continue;
            }
            self.rows[p].push(part);
            self.null[p] = nullspace(&self.rows[p]);
            self.facts.push(Fact {
                operator: NAMES[p],
                relation: describe(NAMES[p], &part),
                rule: rule.clone(),
            });
        }
        true
    }

    fn pair_pass(&mut self) -> bool {
        let mut progress = false;
        for k in 0..self.conds.len() {
            let (ij, fs) = self.conds[k];
            let cert: Vec<bool> = (0..3).map(|p| certified(&fs[p], &self.null[p])).collect();
            if cert.iter().filter(|&&x| x).count() == 2 {
                let p = cert
                    .iter()
                    .position(|&x| !x)
                    .expect("one uncertified factor");
                progress |= self.impose(p, &fs[p], Rule::Pair(ij));
            }
        }
        progress
    }

    fn group_pass(&mut self) -> bool {
        for p in 0..3 {
            let (q, r) = ((p + 1) % 3, (p + 2) % 3);
            let gs: Vec<Vec<c64>> = self
                .conds
                .iter()
                .map(|(_, fs)| restrict(&fs[p], &self.null[p]))
                .collect();
            let mut used = vec![false; self.conds.len()];
            for s in 0..self.conds.len() {
                if used[s] || norm(&gs[s]) <= TOL {
                    continue;
                }
                let base = &gs[s];
                let nb = norm(base);
                let mut group = vec![(s, c64::new(1.0, 0.0))];
                for t in s + 1..self.conds.len() {
                    let nt = norm(&gs[t]);
                    if used[t] || nt <= TOL {
                        continue;
                    }
                    let ip: c64 = base.iter().zip(&gs[t]).map(|(x, y)| x.conj() * y).sum();
                    if (ip.norm() - nb * nt).abs() <= TOL * nb * nt {
                        group.push((t, ip / (nb * nb)));
                    }
                }
                if group.len() < 2 {
                    continue;
                }
                for &(t, _) in &group {
                    used[t] = true;
                }
                let cols: Vec<Vec<c64>> = group
                    .iter()
                    .map(|&(t, mu)| {
                        let fq = restrict(&self.conds[t].1[q], &self.null[q]);
                        let fr = restrict(&self.conds[t].1[r], &self.null[r]);
                        fq.iter()
                            .flat_map(|x| fr.iter().map(move |y| mu * x * y))
                            .collect()
                    })
                    .collect();
                let m = cols[0].len();
                if m == 0 {
                    continue;
                }
                let a = DMatrix::from_fn(m, cols.len(), |i, j| cols[j][i]);
                let svd = a.clone().svd(true, true);
                for dq in DIAG {
                    for dr in DIAG {
                        let tq = restrict_real(&dq, &self.null[q]);
                        let tr = restrict_real(&dr, &self.null[r]);
                        let target: Vec<c64> = tq
                            .iter()
                            .flat_map(|x| tr.iter().map(move |y| c64::new(x * y, 0.0)))
                            .collect();
                        let b = DVector::from_column_slice(&target);
                        let Ok(lambda) = svd.solve(&b, 1e-14) else {
                            continue;
                        };
                        let resid = (&a * &lambda - &b).norm();
                        if resid <= 1e-9 * b.norm().max(1.0) {
                            let members = group.iter().map(|&(t, _)| self.conds[t].0).collect();
                            let c = self.conds[s].1[p];
                            if self.impose(p, &c, Rule::Group(members)) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

/// `|⟨φ_j|a⊗b⊗c|φ_i⟩|` for every pair `i < j` (1-based).
pub fn condition_residuals(a: &CMat, b: &CMat, c: &CMat) -> Vec<((usize, usize), f64)> {
    let f = factors();
    let ops = [a, b, c];
    let mut out = Vec::new();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let v: c64 = (0..3)
                .map(|p| ops[p].sandwich(&f[j][p], &f[i][p]))
                .product();
            out.push(((i + 1, j + 1), v.norm()));
        }
    }
    out
}

/// `(7+56ε)/(7−8ε) ≤ (1+8ε)/(1−56ε)`.
pub fn spread_bound_holds(eps: f64) -> bool {
    (7.0 + 56.0 * eps) / (7.0 - 8.0 * eps) <= (1.0 + 8.0 * eps) / (1.0 - 56.0 * eps)
}

pub fn three_party_rigidity() -> RigidityReport {
    let mut s = Solver::new();
    loop {
        if s.pair_pass() {
            continue;
        }
        if !s.group_pass() {
            break;
        }
    }
    let solution_dims = [0, 1, 2].map(|p| s.null[p].ncols());
    let deviation = [0, 1, 2].map(|p| {
        let n = &s.null[p];
        if n.ncols() != 1 || n[(0, 0)].abs() <= TOL {
            return f64::INFINITY;
        }
        let v: Vec<f64> = (0..4).map(|m| n[(m, 0)] / n[(0, 0)]).collect();
        [(v[1] - 1.0).abs(), v[2].abs(), v[3].abs()]
            .into_iter()
            .fold(0.0, f64::max)
    });
    let max_deviation = deviation.iter().copied().fold(0.0, f64::max);

    let id = CMat::identity(2);
    let identity_residual = condition_residuals(&id, &id, &id)
        .iter()
        .map(|x| x.1)
        .fold(0.0, f64::max);
    let pert = CMat::from_real_rows(2, 2, &[1.0, 0.1, 0.1, 1.0]);
    let (perturbed_condition, perturbed_residual) = condition_residuals(&pert, &id, &id)
        .into_iter()
        .fold(((0, 0), 0.0), |best, x| if x.1 > best.1 { x } else { best });
    let spread_bound_ok = (1..200).all(|k| spread_bound_holds(k as f64 / 200.0 / 56.0));

    RigidityReport {
        facts: s.facts,
        solution_dims,
        deviation,
        max_deviation,
        identity_residual,
        perturbed_residual,
        perturbed_condition,
        spread_bound_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_satisfies_all_conditions() {
        let i = CMat::identity(2);
        let r = condition_residuals(&i, &i, &i);
        assert_eq!(r.len(), 28);
        assert!(r.iter().all(|x| x.1 < 1e-15));
    }

    #[test]
    fn solver_forces_identity() {
        let r = three_party_rigidity();
        assert_eq!(r.solution_dims, [1, 1, 1], "{:#?}", r.facts);
        assert!(r.max_deviation <= 1e-10);
        assert!(r.proportional_to_identity());
        let has = |op: char, rel: &str| {
            r.facts
                .iter()
                .any(|f| f.operator == op && f.relation == rel)
        };
        assert!(has('a', "a00 - a11 = 0"));
        assert!(has('b', "b00 - b11 = 0"));
        assert!(has('c', "c00 - c11 = 0"));
        assert!(r.facts.iter().any(|f| matches!(f.rule, Rule::Group(_))));
    }

    #[test]
    fn perturbation_breaks_orthogonality() {
        let r = three_party_rigidity();
        assert!(r.perturbed_residual >= 1e-3);
        assert!(r.identity_residual < 1e-15);
        assert!(r.spread_bound_ok);
    }

    #[test]
    fn describe_rows() {
        assert_eq!(describe('a', &[1.0, -1.0, 0.0, 0.0]), "a00 - a11 = 0");
        assert_eq!(describe('b', &[0.0, 0.0, 0.0, -2.0]), "Im b01 = 0");
        assert_eq!(
            describe('c', &[-0.5, 1.0, 0.0, 0.0]),
            "0.500000 c00 - c11 = 0"
        );
    }
}
