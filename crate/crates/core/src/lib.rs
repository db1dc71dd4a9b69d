//! Solutions of time-dependent Schrödinger equations for driven optical
//! traps built from Lewis–Riesenfeld invariants.
//!
//! The auxiliary Ermakov–Pinney function σ(t) fixes the driving field and
//! the time-dependent couplings ([`ermakov`]). The invariant is assembled in
//! [`invariant`], its spectrum and the full solutions ψₙ(x,t) come from
//! [`exact`], [`perturb`] or [`wkb`], and [`oracle`] checks them against
//! grid diagonalisation and Crank–Nicolson propagation.

pub mod error;
pub mod ermakov;
pub mod exact;
pub mod invariant;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod perturb;
pub mod quad;
pub mod specfun;
pub mod wkb;

pub use error::{Error, Result};
pub use ermakov::{EpConfig, EpSolution};
pub use exact::{Eigenstate, Method, PhaseFn};
pub use model::{ModelConfig, ModelKind};
pub use observables::ObservableSet;
pub use oracle::{Grid, WaveSample};
