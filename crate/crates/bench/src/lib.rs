//! Fixtures shared by the benchmarks.

use pvbs_core::aklt::aklt_interaction;
use pvbs_core::pvbs::{pvbs_interaction, PvbsParams};
use pvbs_core::NearestNeighborInteraction;

pub fn two_type_params() -> PvbsParams {
    PvbsParams::new(vec![0.5, 3.0])
        .and_then(|p| p.with_theta(0, 1, 0.7))
        .and_then(|p| p.with_theta(0, 2, 1.1))
        .and_then(|p| p.with_theta(1, 2, 0.3))
        .expect("valid parameters")
}

pub fn aklt() -> NearestNeighborInteraction {
    aklt_interaction().expect("AKLT interaction")
}

pub fn two_type_chain() -> NearestNeighborInteraction {
    pvbs_interaction(&two_type_params()).expect("PVBS interaction")
}
