use super::PvbsParams;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct GapUpperBound {
    /// `+∞` when every type's bound is vacuous at this `N`.
    pub value: f64,
    /// Per type; `+∞` where `N ≤ C_i`.
    pub per_type: Vec<f64>,
    pub vacuous: bool,
    /// Some `λ_i = 1`: the bound degenerates to zero.
    pub critical: bool,
}

/// `min_i (1 − 2/(λ_i + λ_i^{-1})) (1 + (C_i − 1)/(N − C_i))` with `C_i = (1 + λ_i)/|1 − λ_i|`.
pub fn gap_upper_bound(p: &PvbsParams, n_sites: usize) -> GapUpperBound {
    let nn = n_sites as f64;
    let per_type: Vec<f64> = p
        .lambdas()
        .iter()
        .map(|&l| {
            if l == 1.0 {
                return 0.0;
            }
            let c = (1.0 + l) / (1.0 - l).abs();
            if nn <= c {
                return f64::INFINITY;
            }
            (1.0 - 2.0 / (l + 1.0 / l)) * (1.0 + (c - 1.0) / (nn - c))
        })
        .collect();
    let value = per_type.iter().cloned().fold(f64::INFINITY, f64::min);
    GapUpperBound {
        value,
        vacuous: value.is_infinite(),
        critical: !p.is_gapped_admissible(),
        per_type,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_at_ten_sites() {
        let b = gap_upper_bound(&PvbsParams::new(vec![0.5]).unwrap(), 10);
        assert!((b.value - 0.2 * (1.0 + 2.0 / 7.0)).abs() < 1e-15);
        assert!(!b.vacuous && !b.critical);
    }

    #[test]
    fn short_chain_is_vacuous() {
        let b = gap_upper_bound(&PvbsParams::new(vec![0.5]).unwrap(), 3);
        assert!(b.vacuous && b.value.is_infinite());
    }

    #[test]
    fn two_types_take_the_minimum() {
        let b = gap_upper_bound(&PvbsParams::new(vec![0.5, 3.0]).unwrap(), 12);
        let one: f64 = 0.2 * (1.0 + 2.0 / 9.0);
        let three = (1.0 - 2.0 / (3.0 + 1.0 / 3.0)) * (1.0 + 1.0 / 10.0);
        assert!((b.value - one.min(three)).abs() < 1e-15);
    }

    #[test]
    fn approaches_zero_near_criticality() {
        let far = gap_upper_bound(&PvbsParams::new(vec![0.9]).unwrap(), 1000).value;
        let near = gap_upper_bound(&PvbsParams::new(vec![0.99]).unwrap(), 1000).value;
        assert!(near < far && near < 1e-3);
        assert!(gap_upper_bound(&PvbsParams::new(vec![1.0]).unwrap(), 10).critical);
    }
}
