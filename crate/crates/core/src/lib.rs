//! Numerical laboratory for local-operations-and-classical-communication (LOCC)
//! measurement protocols on orthogonal product-state ensembles.
//!
//! Modules, bottom-up:
//!
//! * [`qcore`]: dense complex linear algebra on small Hilbert spaces, plus
//!   entropies and mutual information.
//! * [`ensembles`]: state catalogs, including the nine-state "domino" basis,
//!   its rotated family, a three-qubit basis, Bell sets and a mixed pair.
//! * [`protocol`]: outcome-conditioned trees of local operation elements and
//!   an exact executor tracking posteriors and residual states.
//! * [`strategies`]: named measurement strategies for the nine-state basis and
//!   a multi-start simplex optimizer over their parameters.
//! * [`bound`]: the upper bound on locally attainable information, an
//!   operator-inequality checker and the three-party rigidity solver.
//! * [`analysis`]: dissectibility, entropy and entanglement accounting,
//!   quantum communication cost, advice compression.
//! * [`weakmeas`]: a strong two-outcome measurement split into weak steps.

pub mod analysis;
pub mod bound;
pub mod ensembles;
pub mod error;
pub mod protocol;
pub mod qcore;
pub mod strategies;
pub mod weakmeas;

pub use error::{Error, Result};
pub use qcore::{c64, CMat, CVec, ProbVec};
