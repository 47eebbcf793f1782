//! Fixtures shared by the benchmarks.

use locc_core::ensembles::{nine_states, ProductEnsemble};
use locc_core::protocol::ProtocolNode;
use locc_core::strategies::{StrategyFamily, FIVE_PARAM_REFERENCE};

pub fn nine() -> ProductEnsemble {
    nine_states()
}

pub fn five_param_tree() -> ProtocolNode {
    StrategyFamily::FiveParam
        .build(&FIVE_PARAM_REFERENCE)
        .expect("reference parameters are valid")
}
