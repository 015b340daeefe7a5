//! Frustration-free spin chains built from matrix product states: models with
//! product vacua and boundary states, the AKLT interpolation, SO(2J+1) chains,
//! transfer operators, ground spaces and spectral-gap certification.

pub mod aklt;
pub mod chain;
pub mod error;
pub mod interaction;
pub mod mps;
pub mod numerics;
pub mod pvbs;
pub mod so;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use interaction::NearestNeighborInteraction;
pub use mps::{MpsFamily, TransferSpectrum};
pub use numerics::OrthonormalFrame;
