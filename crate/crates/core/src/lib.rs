//! Quantum-optical description of high-harmonic generation in a symmetric
//! two-centre molecule.
//!
//! The pipeline runs from a 1D soft-core TDSE ([`dipole`]) through mode
//! integrals ([`integrals`]) to field states ([`state`]), from which spectra,
//! Wigner functions ([`observables`]) and entanglement measures
//! ([`entanglement`]) follow in closed form. [`oracle`] holds dense
//! brute-force references for small mode counts.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod config;
pub mod dipole;
pub mod entanglement;
pub mod error;
pub mod field;
pub mod grid;
pub mod integrals;
pub mod observables;
pub mod oracle;
pub mod pipeline;
pub mod state;

pub use num_complex::Complex64 as C64;

pub use dipole::{DipoleTrace, LcaoStates, TraceMeta};
pub use entanglement::{EntanglementReport, PartitionSpec, QubitDensity, TwoQubitState};
pub use error::{Error, Result};
pub use field::{Envelope, ModeSet, Molecule, Pulse};
pub use grid::{SpatialGrid, Wavefunction};
pub use integrals::{CouplingOptions, DisplacementSet, ModeAmplitudes, PhaseConvention, TransitionAmplitudes};
pub use observables::{FieldState, ModeDensity, SpectrumReport, WignerGrid, WignerMap};
pub use state::{DisplacedVacuum, ElectronBasis, ElectronState, FieldComponent, JointState, PhotonAddedState};
