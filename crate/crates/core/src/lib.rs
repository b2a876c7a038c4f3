//! Exact dynamics of a four-spin plaquette with Dzyaloshinskii–Moriya
//! coupling on the ring and Heisenberg exchange on the diagonals: closed-form
//! and numeric evolution, pairwise concurrence, and the search for
//! quantum-state-transfer events.

pub mod cli;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod qst;
pub mod spin;

pub use error::{Error, Result};
