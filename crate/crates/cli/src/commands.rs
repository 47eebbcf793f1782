use std::f64::consts::FRAC_PI_2;

use locc_core::analysis::{
    advice_cost, entanglement_witness, entropy_table, hereditary_check, is_dissectible,
    measurement_entropy, quantum_cost, CostVariant, SplittingTree,
};
use locc_core::bound::{
    epsilon_grid, f_epsilon, optimize_bound, report_at, sample_constrained_pairs, target_ratio,
    three_party_rigidity, BoundReport, Rule,
};
use locc_core::ensembles::{
    build_nine_states, catalog, subset, Member, ProductEnsemble, CATALOG_NAMES,
};
use locc_core::protocol::{emit_tree, parse_tree, run_protocol, LeafKind, ProtocolNode};
use locc_core::qcore::shannon_entropy;
use locc_core::strategies::{
    build_domino_cut, optimize, OptimizeOptions, StrategyFamily, FIVE_PARAM_REFERENCE,
};
use locc_core::weakmeas::{
    bernstein_envelope, majority_success, residual_fidelity, simulate_many,
    single_weak_correct_prob, WeakScheme,
};
use locc_core::{c64, CMat, CVec, Error, ProbVec};

use crate::report::{Record, Report};
use crate::{AnalyzeCmd, BoundCmd, Cli, Command, EnsemblesCmd, ProtocolCmd, StrategyCmd, WeakCmd};

pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownEnsemble(_) => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

type Out = Result<String, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn floats(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("not a number: {t:?}")))
        })
        .collect()
}

fn indices(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("not an index: {t:?}")))
        })
        .collect()
}

/// `<catalog>` or `<catalog>:<id,id,..>`.
fn ensemble(spec: &str) -> Result<ProductEnsemble, CliError> {
    match spec.split_once(':') {
        None => Ok(catalog(spec)?),
        Some((base, ids)) => {
            let e = catalog(base)?;
            Ok(subset(&e, &indices(ids)?, None)?.with_name(spec))
        }
    }
}

fn family(name: &str) -> Result<StrategyFamily, CliError> {
    name.parse().map_err(|_| {
        usage(format!(
            "unknown strategy {name:?} (domino-cut | symmetric | single-p | five-param)"
        ))
    })
}

pub fn dispatch(cli: &Cli) -> Out {
    let report = match &cli.command {
        Command::Ensembles(c) => ensembles(c)?,
        Command::Protocol(c) => protocol(c, cli.tol)?,
        Command::Strategy(c) => match strategy(c, cli)? {
            Emitted::Tree(json) => return Ok(json),
            Emitted::Report(r) => r,
        },
        Command::Bound(c) => bound(c, cli.seed)?,
        Command::Analyze(c) => analyze(c, cli.seed)?,
        Command::Weak(c) => weak(c, cli.seed)?,
    };
    Ok(report.render(cli.format))
}

fn cvec_str(v: &CVec) -> String {
    let parts: Vec<String> = v
        .entries()
        .iter()
        .map(|z| {
            if z.im.abs() < 1e-15 {
                crate::report::sig6(z.re)
            } else {
                format!(
                    "{}{:+}i",
                    crate::report::sig6(z.re),
                    crate::report::sig6(z.im)
                )
            }
        })
        .collect();
    format!("({})", parts.join(","))
}

fn gram_deviation(e: &ProductEnsemble) -> Option<f64> {
    e.gram()
        .ok()
        .map(|g| g.max_abs_diff(&CMat::identity(g.rows())))
}

fn ensembles(cmd: &EnsemblesCmd) -> Result<Report, CliError> {
    let mut rep = Report::default();
    match cmd {
        EnsemblesCmd::List => {
            for name in CATALOG_NAMES {
                let e = catalog(name)?;
                let dims: Vec<String> = e.party_dims().iter().map(usize::to_string).collect();
                rep.push(
                    Record::new("ensemble")
                        .with("name", name)
                        .with("members", e.len())
                        .with("dims", dims.join("x"))
                        .with("pure_product", e.product_states().is_ok()),
                );
            }
        }
        EnsemblesCmd::Show { name } => {
            let e = ensemble(name)?;
            let mut head = Record::new("ensemble")
                .with("name", e.name())
                .with("members", e.len());
            if let Some(d) = gram_deviation(&e) {
                head = head.with("gram_deviation", d);
            }
            rep.push(head);
            for (k, m) in e.members().iter().enumerate() {
                let state = match m {
                    Member::Product(s) => s
                        .factors()
                        .iter()
                        .map(cvec_str)
                        .collect::<Vec<_>>()
                        .join("x"),
                    Member::Entangled(v) => cvec_str(v),
                    Member::Mixed(r) => format!("mixed rank {}", r.rank(1e-12)),
                };
                rep.push(
                    Record::new("member")
                        .with("id", e.ids()[k])
                        .with("prior", e.priors().get(k))
                        .with("state", state),
                );
            }
        }
        EnsemblesCmd::Check { grid } => {
            for name in ["nine", "three-party-8", "bell4"] {
                let e = catalog(name)?;
                rep.push(
                    Record::new("gram")
                        .with("ensemble", name)
                        .with("deviation", gram_deviation(&e).unwrap_or(f64::NAN)),
                );
            }
            let n = (*grid).max(1);
            let pts: Vec<f64> = (1..=n)
                .map(|k| k as f64 * FRAC_PI_2 / (n + 1) as f64)
                .collect();
            let mut worst = 0.0f64;
            let mut count = 0usize;
            for &a in &pts {
                for &b in &pts {
                    for &c in &pts {
                        for &d in &pts {
                            let e = build_nine_states([a, b, c, d], ProbVec::uniform(9))?;
                            worst = worst.max(gram_deviation(&e).unwrap_or(f64::INFINITY));
                            count += 1;
                        }
                    }
                }
            }
            rep.push(
                Record::new("gram")
                    .with("ensemble", format!("nine-rotated-grid-{count}"))
                    .with("deviation", worst),
            );
        }
    }
    Ok(rep)
}

fn leaf_str(l: &LeafKind) -> String {
    match l {
        LeafKind::Guess(i) => format!("guess:{i}"),
        LeafKind::PairDiscriminate(i, j) => format!("pair:{i},{j}"),
        LeafKind::Declare(s) => format!("declare:{s}"),
    }
}

fn run_records(
    rep: &mut Report,
    tree: &ProtocolNode,
    e: &ProductEnsemble,
    tol: f64,
    leaves: bool,
) -> Result<(), CliError> {
    let run = run_protocol(tree, e)?;
    let mi = run.mutual_information()?;
    let perfect = run.is_perfect(tol);
    let max_overlap = run.leaves.iter().map(|l| l.overlap).fold(0.0, f64::max);
    let mut r = Record::new("run")
        .with("ensemble", e.name())
        .with("mutual_information", mi)
        .with("gap", shannon_entropy(e.priors()) - mi)
        .with("perfect", perfect)
        .with("confusion", run.confusion())
        .with("leaves", run.leaves.len())
        .with("max_leaf_overlap", max_overlap);
    if perfect {
        r = r.with("measurement_entropy", measurement_entropy(tree, e)?);
    }
    rep.push(r);
    if leaves {
        for l in &run.leaves {
            rep.push(
                Record::new("leaf")
                    .with("record", l.record.to_string())
                    .with("action", leaf_str(&l.leaf))
                    .with("mass", l.mass)
                    .with("overlap", l.overlap),
            );
        }
    }
    Ok(())
}

fn read_tree(path: &std::path::Path) -> Result<ProtocolNode, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_tree(&text)?)
}

fn protocol(cmd: &ProtocolCmd, tol: f64) -> Result<Report, CliError> {
    let mut rep = Report::default();
    match cmd {
        ProtocolCmd::Run {
            tree,
            ensemble: name,
        } => {
            run_records(&mut rep, &read_tree(tree)?, &ensemble(name)?, tol, true)?;
        }
        ProtocolCmd::Mi {
            tree,
            ensemble: name,
        } => {
            let e = ensemble(name)?;
            let mi = run_protocol(&read_tree(tree)?, &e)?.mutual_information()?;
            rep.push(
                Record::new("mi")
                    .with("ensemble", e.name())
                    .with("mutual_information", mi),
            );
        }
    }
    Ok(rep)
}

enum Emitted {
    Tree(String),
    Report(Report),
}

fn optimum_record(
    o: &locc_core::strategies::Optimum,
    e: &ProductEnsemble,
    starts: usize,
    seed: u64,
) -> Record {
    Record::new("optimum")
        .with("family", o.family.name())
        .with("ensemble", e.name())
        .with("params", o.params.clone())
        .with("mutual_information", o.mutual_information)
        .with("gap", shannon_entropy(e.priors()) - o.mutual_information)
        .with("evaluations", o.evaluations)
        .with("starts", starts)
        .with("seed", seed)
}

fn strategy(cmd: &StrategyCmd, cli: &Cli) -> Result<Emitted, CliError> {
    let mut rep = Report::default();
    match cmd {
        StrategyCmd::Build {
            name,
            params,
            excluded,
            ensemble: ens,
            optimize: opt,
            starts,
            emit_tree: emit,
        } => {
            let fam = family(name)?;
            if excluded.is_some() && fam != StrategyFamily::DominoCut {
                return Err(usage("--excluded applies to domino-cut only"));
            }
            let e = match (ens, excluded) {
                (Some(s), _) => ensemble(s)?,
                (None, Some(x)) => {
                    let keep: Vec<usize> = (1..=9).filter(|i| i != x).collect();
                    ensemble(&format!(
                        "nine:{}",
                        keep.iter()
                            .map(usize::to_string)
                            .collect::<Vec<_>>()
                            .join(",")
                    ))?
                }
                (None, None) => catalog("nine")?,
            };
            let p: Vec<f64> = if *opt {
                let opts = OptimizeOptions {
                    starts: *starts,
                    seed: cli.seed,
                    ..OptimizeOptions::default()
                };
                let o = optimize(fam, &e, &opts)?;
                if !emit {
                    rep.push(optimum_record(&o, &e, *starts, cli.seed));
                }
                o.params
            } else {
                match (params, fam) {
                    (Some(s), _) => floats(s)?,
                    (None, StrategyFamily::FiveParam) => FIVE_PARAM_REFERENCE.to_vec(),
                    (None, StrategyFamily::SingleP) => {
                        return Err(usage("single-p needs --params p or --optimize"))
                    }
                    (None, _) => vec![],
                }
            };
            let tree = match excluded {
                Some(x) => build_domino_cut(*x)?,
                None => fam.build(&p)?,
            };
            if *emit {
                return Ok(Emitted::Tree(emit_tree(&tree) + "\n"));
            }
            let mut head = Record::new("strategy").with("family", fam.name());
            if !p.is_empty() {
                head = head.with("params", p.clone());
            }
            if let Some(x) = excluded {
                head = head.with("excluded", *x);
            }
            rep.push(
                head.with("depth", tree.depth())
                    .with("leaves", tree.leaf_count()),
            );
            run_records(&mut rep, &tree, &e, cli.tol, false)?;
        }
        StrategyCmd::Optimize {
            name,
            starts,
            ensemble: ens,
        } => {
            let fam = family(name)?;
            let e = ensemble(ens)?;
            let opts = OptimizeOptions {
                starts: *starts,
                seed: cli.seed,
                ..OptimizeOptions::default()
            };
            let o = optimize(fam, &e, &opts)?;
            rep.push(optimum_record(&o, &e, *starts, cli.seed));
        }
    }
    Ok(Emitted::Report(rep))
}

fn bound_record(kind: &str, b: &BoundReport) -> Record {
    Record::new(kind)
        .with("epsilon", b.epsilon)
        .with("delta", b.delta)
        .with("beta", b.beta)
        .with("z", b.z)
        .with("nu", b.nu)
        .with("f", b.f)
        .with("deficit", b.deficit)
}

fn bound(cmd: &BoundCmd, seed: u64) -> Result<Report, CliError> {
    let mut rep = Report::default();
    match cmd {
        BoundCmd::Optimize => {
            let b = optimize_bound()?;
            rep.push(bound_record("bound", &b).with("information_cap", 9f64.log2() - b.deficit));
        }
        BoundCmd::At { epsilon } => rep.push(bound_record("bound", &report_at(*epsilon)?)),
        BoundCmd::Sweep { epsilon_grid: n } => {
            if *n == 0 {
                return Err(usage("--epsilon-grid must be positive"));
            }
            let mut worst = 0.0f64;
            for eps in epsilon_grid(*n) {
                let b = report_at(eps)?;
                let err = (f_epsilon(eps, b.delta)? - target_ratio(eps)).abs();
                worst = worst.max(err);
                rep.push(bound_record("point", &b).with("roundtrip_error", err));
            }
            rep.push(
                Record::new("sweep")
                    .with("points", *n)
                    .with("max_roundtrip_error", worst),
            );
        }
        BoundCmd::Verify {
            samples,
            delta,
            epsilon,
        } => {
            let s = sample_constrained_pairs(*samples, *delta, *epsilon, seed)?;
            rep.push(
                Record::new("verify")
                    .with("delta", *delta)
                    .with("epsilon", *epsilon)
                    .with("seed", seed)
                    .with("accepted", s.accepted)
                    .with("attempts", s.attempts)
                    .with("violations", s.violations)
                    .with("min_slack", s.min_slack)
                    .with("min_slack_check", s.min_slack_check),
            );
        }
        BoundCmd::ThreeParty => {
            let r = three_party_rigidity();
            for f in &r.facts {
                let rule = match &f.rule {
                    Rule::Pair((i, j)) => format!("pair({i},{j})"),
                    Rule::Group(g) => {
                        format!(
                            "group[{}]",
                            g.iter()
                                .map(|(i, j)| format!("{i},{j}"))
                                .collect::<Vec<_>>()
                                .join(";")
                        )
                    }
                };
                rep.push(
                    Record::new("fact")
                        .with("operator", f.operator.to_string())
                        .with("relation", f.relation.clone())
                        .with("rule", rule),
                );
            }
            let dims: Vec<String> = r.solution_dims.iter().map(usize::to_string).collect();
            let (i, j) = r.perturbed_condition;
            rep.push(
                Record::new("rigidity")
                    .with("solution_dims", dims.join(","))
                    .with("max_deviation", r.max_deviation)
                    .with("proportional_to_identity", r.proportional_to_identity())
                    .with("identity_residual", r.identity_residual)
                    .with("perturbed_residual", r.perturbed_residual)
                    .with("perturbed_condition", format!("{i},{j}"))
                    .with("spread_bound_ok", r.spread_bound_ok),
            );
        }
    }
    Ok(rep)
}

fn tree_str(t: &SplittingTree) -> String {
    match t {
        SplittingTree::Leaf(i) => i.to_string(),
        SplittingTree::Split { party, left, right } => {
            let p = ['A', 'B', 'C'].get(*party).copied().unwrap_or('?');
            format!("{p}[{} | {}]", tree_str(left), tree_str(right))
        }
    }
}

fn analyze(cmd: &AnalyzeCmd, seed: u64) -> Result<Report, CliError> {
    let mut rep = Report::default();
    match cmd {
        AnalyzeCmd::Dissect { ensemble: name } => {
            let e = ensemble(name)?;
            let (ok, tree) = is_dissectible(&e)?;
            let mut r = Record::new("dissect")
                .with("ensemble", e.name())
                .with("dissectible", ok)
                .with(
                    "verdict",
                    if ok { "dissectible" } else { "not dissectible" },
                );
            if let Some(t) = tree {
                r = r.with("tree", tree_str(&t));
            }
            rep.push(r);
        }
        AnalyzeCmd::Hereditary {
            samples,
            ensemble: name,
        } => {
            let h = hereditary_check(&ensemble(name)?, *samples, seed)?;
            rep.push(
                Record::new("hereditary")
                    .with("samples", h.samples)
                    .with("attempts", h.attempts)
                    .with("violations", h.violations)
                    .with("seed", seed),
            );
        }
        AnalyzeCmd::Table => {
            let rows = entropy_table()?;
            for r in &rows {
                rep.push(
                    Record::new("row")
                        .with("ensemble", r.ensemble.clone())
                        .with("prep_local", r.locally_preparable)
                        .with("meas_local", r.locally_measurable)
                        .with("dissectible", r.dissectible)
                        .with("entropy_prep", r.entropy_prep)
                        .with("entropy_meas", r.entropy_meas)
                        .with("ent_prep", r.entanglement_prep)
                        .with("ent_meas", r.entanglement_meas)
                        .with("advice_meas", r.advice_meas),
                );
            }
            for r in &rows {
                for n in &r.notes {
                    rep.push(
                        Record::new("note")
                            .with("ensemble", r.ensemble.clone())
                            .with("text", n.clone()),
                    );
                }
            }
        }
        AnalyzeCmd::Advice { priors, hintable } => {
            let p = ProbVec::normalize(&floats(priors)?)?;
            let h = match hintable {
                Some(s) => indices(s)?,
                None => (0..p.len()).collect(),
            };
            let plan = advice_cost(&p, &h)?;
            let hs: Vec<String> = plan.hintable.iter().map(usize::to_string).collect();
            rep.push(
                Record::new("advice")
                    .with("hintable", hs.join(","))
                    .with("q", plan.q.clone())
                    .with("cost", plan.cost),
            );
        }
        AnalyzeCmd::Qcost { variant } => {
            let v: CostVariant = variant.parse().map_err(|e: Error| usage(e.to_string()))?;
            let q = quantum_cost(v);
            let mut r = Record::new("qcost")
                .with("variant", v.to_string())
                .with("qubits", q.qubits)
                .with("baseline", q.baseline);
            if let Some(b) = q.baseline_printed {
                r = r.with("baseline_closed_form", b);
            }
            if v == CostVariant::Nine {
                r = r.with(
                    "note",
                    "commonly printed as 1.14152; the formula h(1/3)+2/9 gives the value above",
                );
            }
            rep.push(r);
        }
        AnalyzeCmd::Witness => {
            let w = entanglement_witness()?;
            rep.push(
                Record::new("witness")
                    .with("success_probability", w.success_probability)
                    .with("schmidt_rank", w.schmidt_rank)
                    .with("concurrence", w.concurrence),
            );
        }
    }
    Ok(rep)
}

fn weak(cmd: &WeakCmd, seed: u64) -> Result<Report, CliError> {
    let mut rep = Report::default();
    match cmd {
        WeakCmd::Simulate {
            alpha0,
            epsilon,
            k,
            runs,
        } => {
            if !(0.0..=1.0).contains(alpha0) {
                return Err(usage("--alpha0 must lie in [0, 1]"));
            }
            let a0 = c64::new(*alpha0, 0.0);
            let a1 = c64::new((1.0 - alpha0 * alpha0).max(0.0).sqrt(), 0.0);
            let scheme = WeakScheme::new(*epsilon, *k, seed)?;
            let s = simulate_many(a0, a1, &scheme, *runs)?;
            let z = if s.sigma_majority0 > 0.0 {
                (s.majority0_rate - s.closed_form_majority0) / s.sigma_majority0
            } else {
                0.0
            };
            rep.push(
                Record::new("weak")
                    .with("alpha0", *alpha0)
                    .with("epsilon", *epsilon)
                    .with("K", *k)
                    .with("runs", *runs)
                    .with("seed", seed)
                    .with("single_correct", single_weak_correct_prob(*epsilon)?)
                    .with("majority0_empirical", s.majority0_rate)
                    .with("majority0_closed_form", s.closed_form_majority0)
                    .with("sigma", s.sigma_majority0)
                    .with("z_score", z)
                    .with("correct_empirical", s.correct_rate)
                    .with("correct_closed_form", s.closed_form_correct)
                    .with("mean_residual_fidelity", s.mean_residual_fidelity)
                    .with("step_fidelity_0", residual_fidelity(a0, a1, *epsilon, 0)?)
                    .with("step_fidelity_1", residual_fidelity(a0, a1, *epsilon, 1)?),
            );
        }
        WeakCmd::Bernstein => {
            let mut all = true;
            for i in 1..=15 {
                let eps = 0.05 * i as f64;
                if eps > std::f64::consts::FRAC_PI_4 {
                    break;
                }
                let k0 = (8.0 / (2.0 * eps).sin().powi(2)).ceil() as usize;
                for k in [k0 | 1, (2 * k0) | 1, (5 * k0) | 1] {
                    let fail = 1.0 - majority_success(1.0, eps, k)?;
                    let env = bernstein_envelope(eps, k);
                    all &= fail <= env;
                    rep.push(
                        Record::new("grid")
                            .with("epsilon", eps)
                            .with("K", k)
                            .with("failure", fail)
                            .with("envelope", env)
                            .with("holds", fail <= env),
                    );
                }
            }
            rep.push(Record::new("bernstein").with("all_hold", all));
        }
    }
    Ok(rep)
}
