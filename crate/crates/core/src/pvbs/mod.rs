//! Product vacua with boundary states: `n` particle types on top of a product vacuum.

mod bounds;
mod convergence;
mod model;
mod one_particle;
mod phase;

pub use bounds::{gap_upper_bound, GapUpperBound};
pub use convergence::{convergence_rate_bound, edge_state_convergence, ConvergenceFit};
pub use model::{
    boundary_matrix, ground_vector_expectation, particle_charges, pvbs_ground_vector,
    pvbs_interaction, pvbs_mps, pvbs_relations, pvbs_transfer_spectrum_closed_form,
    sector_decomposition, ClosedFormSpectrum, SectorDecomposition,
};
pub use one_particle::{
    chebyshev_residual, one_particle_gap_certificate, one_particle_hamiltonian, one_particle_kernel,
    OneParticleCertificate,
};
pub use phase::{classify, equivalence_path, permutation_power, EquivalencePoint, PhaseLabel};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Parameters `λ_1..λ_n > 0` (with `λ_0 = 1`) and antisymmetric phases `θ_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsJson", into = "ParamsJson")]
pub struct PvbsParams {
    lambdas: Vec<f64>,
    /// Keyed by `(i, j)` with `i < j`.
    thetas: BTreeMap<(usize, usize), f64>,
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    lambda: Vec<f64>,
    #[serde(default)]
    theta: BTreeMap<String, f64>,
}

impl TryFrom<ParamsJson> for PvbsParams {
    type Error = Error;

    fn try_from(raw: ParamsJson) -> Result<Self> {
        let mut p = PvbsParams::new(raw.lambda)?;
        for (key, value) in raw.theta {
            let (i, j) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| Error::validation(format!("theta key {key:?} is not of the form \"i,j\"")))?;
            p = p.with_theta(i, j, value)?;
        }
        Ok(p)
    }
}

impl From<PvbsParams> for ParamsJson {
    fn from(p: PvbsParams) -> Self {
        ParamsJson {
            lambda: p.lambdas,
            theta: p.thetas.into_iter().map(|((i, j), v)| (format!("{i},{j}"), v)).collect(),
        }
    }
}

impl PvbsParams {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if let Some(bad) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::validation(format!("lambda must be positive and finite, got {bad}")));
        }
        Ok(PvbsParams { lambdas, thetas: BTreeMap::new() })
    }

    /// Sets `θ_ij` (and implicitly `θ_ji = −θ_ij`).
    pub fn with_theta(mut self, i: usize, j: usize, value: f64) -> Result<Self> {
        let n = self.n();
        if i == j || i > n || j > n || !value.is_finite() {
            return Err(Error::validation(format!("invalid phase theta_({i},{j}) = {value} for n = {n}")));
        }
        let (key, v) = if i < j { ((i, j), value) } else { ((j, i), -value) };
        if v == 0.0 {
            self.thetas.remove(&key);
        } else {
            self.thetas.insert(key, v);
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `λ_i` with `λ_0 = 1`.
    pub fn lambda(&self, i: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            self.lambdas[i - 1]
        }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn theta(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.thetas.get(&(i, j)).copied().unwrap_or(0.0),
            std::cmp::Ordering::Greater => -self.theta(j, i),
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// First type index with `λ_i = 1`.
    pub fn critical_index(&self) -> Option<usize> {
        self.lambdas.iter().position(|&l| l == 1.0).map(|i| i + 1)
    }

    pub fn is_gapped_admissible(&self) -> bool {
        self.critical_index().is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_with_default_phases() {
        let p: PvbsParams = serde_json::from_str(r#"{"lambda":[0.5,2.0],"theta":{"0,2":0.3,"2,1":1.0}}"#).unwrap();
        assert_eq!(p.theta(0, 2), 0.3);
        assert_eq!(p.theta(1, 2), -1.0);
        assert_eq!(p.theta(0, 1), 0.0);
        let back: PvbsParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let bare: PvbsParams = serde_json::from_str(r#"{"lambda":[3.0]}"#).unwrap();
        assert_eq!(bare.theta(0, 1), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PvbsParams::new(vec![0.0]).is_err());
        assert!(PvbsParams::new(vec![-1.0]).is_err());
        assert!(serde_json::from_str::<PvbsParams>(r#"{"lambda":[0.5],"theta":{"0-1":1}}"#).is_err());
        assert!(PvbsParams::new(vec![0.5]).unwrap().with_theta(0, 2, 1.0).is_err());
    }

    #[test]
    fn critical_flag() {
        assert!(!PvbsParams::new(vec![0.5, 1.0]).unwrap().is_gapped_admissible());
        assert_eq!(PvbsParams::new(vec![0.5, 1.0]).unwrap().critical_index(), Some(2));
    }
}
