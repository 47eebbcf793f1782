//! Frozen values reproduced end to end through the public API.

use locc_core::analysis::{advice_cost, quantum_cost, CostVariant};
use locc_core::bound::{optimize_bound, report_at};
use locc_core::ensembles::{catalog, nine_states};
use locc_core::protocol::{emit_tree, parse_tree, run_protocol};
use locc_core::strategies::{build_domino_cut, evaluate, StrategyFamily, FIVE_PARAM_REFERENCE};
use locc_core::ProbVec;

#[test]
fn strategy_values() {
    let e = nine_states();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-8;
    assert!(close(
        evaluate(StrategyFamily::DominoCut, &[], &e).unwrap(),
        2.947702779
    ));
    assert!(close(
        evaluate(StrategyFamily::Symmetric, &[], &e).unwrap(),
        2.996381024
    ));
    assert!(close(
        evaluate(StrategyFamily::SingleP, &[0.836987], &e).unwrap(),
        3.008476812
    ));
    assert!(
        (evaluate(StrategyFamily::FiveParam, &FIVE_PARAM_REFERENCE, &e).unwrap() - 3.0124577).abs()
            < 1e-7
    );
}

#[test]
fn domino_exclusions_measure_three_bits() {
    let nine = nine_states();
    for x in 2..=9 {
        let keep: Vec<usize> = (1..=9).filter(|&i| i != x).collect();
        let e = locc_core::ensembles::subset(&nine, &keep, None).unwrap();
        let tree = build_domino_cut(x).unwrap();
        // through the document format and back
        let tree = parse_tree(&emit_tree(&tree)).unwrap();
        let run = run_protocol(&tree, &e).unwrap();
        assert!(
            (run.mutual_information().unwrap() - 3.0).abs() < 1e-9,
            "excluded {x}"
        );
        assert!(run.is_perfect(1e-12));
    }
}

#[test]
fn bound_values() {
    let b = optimize_bound().unwrap();
    assert!((b.epsilon - 0.00823004).abs() < 1e-7);
    assert!((b.delta - 0.00344353).abs() < 1e-7);
    assert!((b.deficit - 5.31625e-6).abs() < 1e-10);
    assert_eq!(report_at(b.epsilon).unwrap().deficit, b.deficit);
}

#[test]
fn information_costs() {
    assert!((quantum_cost(CostVariant::Eight).qubits - 1.204434).abs() < 1e-6);
    assert!((quantum_cost(CostVariant::Nine).qubits - 1.140518).abs() < 1e-6);
    let plan = advice_cost(&ProbVec::uniform(9), &(1..9).collect::<Vec<_>>()).unwrap();
    assert!((plan.cost - 0.17124).abs() < 1e-5);
    assert_eq!(catalog("eight-no-psi4").unwrap().len(), 8);
}
