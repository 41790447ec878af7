//! Exact simulation of two identical particles (bosons or fermions) passing
//! through 50:50 beam-splitter networks whose output paths carry
//! absorptionless which-way detectors.
//!
//! Detector coincidences herald spin-entangled pairs. The crate computes
//! heralding yields for splitter trees and the feedback loop, identifies
//! particle statistics from spin correlations, and quantifies how the
//! entanglement trades off against the distinguishability of the particles.
//!
//! * [`fock`] holds the second-quantized state engine.
//! * [`interferometer`] builds networks and post-selects on detector patterns.
//! * [`metrics`] reduces coincidence states to two-qubit density matrices.
//! * [`oracle`] is an independent first-quantized simulator used for cross-checks.
//! * [`scenarios`] runs the named end-to-end experiments behind the CLI.

pub mod cli;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod metrics;
pub mod oracle;
pub mod scenarios;

pub use error::{Error, Result};
pub use fock::{make_product_state, FockState, Mode, Path, SingleParticleUnitary, Spin, Statistics};
pub use interferometer::{
    build_tree, detect, entangled_yield, feedback_run, fig1_network, fig2_network, postselect, run_network, BranchSet,
    ExcitationPattern, Network,
};
pub use metrics::{concurrence, reduce_to_spin_dm, BellState, TwoQubitDM};
