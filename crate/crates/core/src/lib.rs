//! Learning to defer to an expert.
//!
//! A deferral system pairs a classifier `h: X -> [K]` with a rejector
//! `r: X -> {0, 1}`; on `r(x) = 1` the decision is handed to a human expert
//! whose prediction `M` may or may not match the target `Y`. This crate
//! provides:
//!
//! - [`deferral`]: samples, deferral systems, the 0-1 and cost-augmented
//!   deferral losses, exact risk on finite-support worlds and the
//!   `(K+1)`-action decoding rule.
//! - [`worlds`]: synthetic joint distributions of `(X, Y, M)`, simulated
//!   experts and the named constructions (threshold world, VC-gap world,
//!   the CAL counterexample).
//! - [`hypotheses`]: enumerable hypothesis classes with exhaustive staged
//!   and joint ERM.
//! - [`surrogates`]: the cost-sensitive surrogate family, the deferral
//!   cross-entropy, calibration functions and brute-force consistency checks.
//! - [`learners`]: gradient-trained score models (joint, staged and
//!   semi-supervised joint pipelines).
//! - [`active`]: version spaces, rejector disagreement and the
//!   disagreement-on-disagreements active learner.
//! - [`harness`]: experiment configuration, seeded trial execution, CSV and
//!   JSON outputs, and the command line front end.
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```bash
//! cargo run --release --example <name>
//! ```

pub mod active;
mod bits;
pub mod deferral;
pub mod error;
pub mod harness;
pub mod hypotheses;
pub mod learners;
pub mod seeds;
pub mod surrogates;
pub mod worlds;

pub use deferral::{DeferralSystem, Label, Sample};
pub use error::{Error, Result};
