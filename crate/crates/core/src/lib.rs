//! Entangled photon-pair emission from a dipole-coupled pair of three-level
//! defects.
//!
//! The pipeline runs from the electronic structure of the coupled pair
//! ([`physics`]) through the steady-state two-photon amplitude on a frequency
//! grid ([`amplitude`], [`spectra`]) to Schmidt-based entanglement metrics
//! ([`entanglement`]). [`sweep`] drives parameter scans, [`dynamics`] holds the
//! time-domain integrators used to check the closed-form amplitude, and
//! [`config`], [`output`] and [`cli`] handle run files and artifacts.

pub mod amplitude;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod output;
pub mod physics;
pub mod spectra;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
