//! Exact simulation of teleportation-based projective measurements on a
//! two-photon polarization state.
//!
//! An input pair (photons 1, 2) is combined with an auxiliary entangled state,
//! photons 1/5 and 2/6 are Bell-measured, and the outcome lattice is enumerated
//! exhaustively. Accepted branches leave photons 3, 4 in `P_j|beta>` for the
//! projector `P_j` revealed by the register photons.

pub mod auxprep;
pub mod error;
pub mod measurement;
pub mod protocol;
pub mod sample;
pub mod statevec;

pub use error::{Error, Result};
pub use statevec::{Amplitude, Ket, PhotonId, Pol};
