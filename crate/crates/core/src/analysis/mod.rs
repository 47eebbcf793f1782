mod accounting;
mod advice;
mod dissect;

pub use accounting::{
    entanglement_witness, entropy_table, measurement_entropy, quantum_cost, AccountingRow,
    CostVariant, EntanglementWitness, QuantumCost,
};
pub use advice::{advice_cost, hint_cost, HintPlan};
pub use dissect::{
    hereditary_check, is_dissectible, splitting_protocol, HereditaryReport, SplittingTree,
};
