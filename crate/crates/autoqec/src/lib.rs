//! Autonomous quantum error correction by engineered dissipation: code
//! checking, jump-operator synthesis, Lindblad simulation, perturbative
//! bounds, and hardware-level ancilla models.

pub mod cli;
pub mod analysis;
pub mod codes;
pub mod error;
pub mod io;
pub mod lindblad;
pub mod numerics;
pub mod physical;
pub mod synthesis;

pub use error::{Error, Result};
pub use numerics::{CMatrix, CVector, DIM_CAP};
