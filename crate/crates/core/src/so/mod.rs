//! `SO(2J+1)`-invariant chains and their deformation into a `2J`-type product-vacuum model.
//!
//! Local index order follows the matrix product generators: `0`, then `2j − 1` (annihilation-type)
//! and `2j` (creation-type) for each mode `j`.

mod clifford;
mod model;
mod spectrum;

pub use clifford::{car_creation, clifford_rep, twisted_car, CliffordRep, TwistedCarFamily};
pub use model::{
    so_cartesian_mps, so_charges, so_interaction, so_mps, so_path_interaction, so_path_mps, so_path_relations,
    so_s0, so_spherical_interaction, spherical_unitary, LambdaProfile, SoPathPoint,
};
pub use spectrum::{so_gap_along_path, so_ground_space_dim, so_transfer_check, so_transfer_report, SoGapRow, SoTransferReport};
