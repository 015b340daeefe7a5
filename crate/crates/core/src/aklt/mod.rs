//! Smooth interpolation between the spin-1 AKLT chain and a two-type product-vacuum model.
//!
//! Local basis order is `(0, +, −)`, i.e. `S_z = diag(0, 1, −1)`.

mod certify;
mod model;
mod zeta;

pub use certify::{
    algebra_no_go_checks, decay_rate, empirical_threshold_k, gap_along_path, martingale_along_path, NoGoReport,
    PathGapRow, ThresholdScan, PATH_KERNEL_DIM,
};
pub use model::{
    aklt_interaction, aklt_relations, path_interaction, path_mps, path_transfer_data, spin_one_matrices, sz_charges,
    PathTransferData,
};
pub use zeta::{closed_form_norms_sq, q_coefficient, zeta_basis, ZetaBasis, ZETA_ORIGIN_S};

use crate::error::{Error, Result};
use serde::Serialize;

/// `f` on `[0, δ]`, which is also its value at the product-vacuum end.
pub const F_AT_ORIGIN: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Branch of `g = ±√(1 − f² cos²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GSign {
    Positive,
    Negative,
}

/// Deformation profile `s ↦ (f(s), g(s))` on `[0, s0]`.
///
/// `f` is constant on `[0, δ]` and ramps to 1 at `s0` with a cubic that has zero slope at both ends.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathSchedule {
    pub s0: f64,
    pub delta: f64,
    pub g_sign: GSign,
}

impl Default for PathSchedule {
    fn default() -> Self {
        Self::standard()
    }
}

impl PathSchedule {
    /// `δ = min(s1, s2, s0/2)` evaluated at `f = 1/√2`.
    pub fn standard() -> Self {
        let f2 = F_AT_ORIGIN * F_AT_ORIGIN;
        let s1 = ((1.0 - f2) / (1.0 + f2)).sqrt().asin();
        let s2 = (f2 * (1.0 - 2.0 * F_AT_ORIGIN.ln()) / (1.0 + f2)).sqrt().min(1.0).asin();
        let s0 = s0();
        Self { s0, delta: s1.min(s2).min(s0 / 2.0), g_sign: GSign::Positive }
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < self.s0) {
            return Err(Error::validation(format!("delta must lie in (0, {}), got {delta}", self.s0)));
        }
        Ok(Self { delta, ..self })
    }

    pub fn with_g_sign(self, g_sign: GSign) -> Self {
        Self { g_sign, ..self }
    }

    pub fn check(&self, s: f64) -> Result<()> {
        if !(0.0..=self.s0).contains(&s) {
            return Err(Error::validation(format!("s = {s} outside [0, {}]", self.s0)));
        }
        Ok(())
    }

    fn ramp(&self, s: f64) -> (f64, f64) {
        if s <= self.delta {
            return (0.0, 0.0);
        }
        let width = self.s0 - self.delta;
        let t = ((s - self.delta) / width).min(1.0);
        (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t) / width)
    }

    pub fn f(&self, s: f64) -> f64 {
        F_AT_ORIGIN + (1.0 - F_AT_ORIGIN) * self.ramp(s).0
    }

    pub fn f_prime(&self, s: f64) -> f64 {
        (1.0 - F_AT_ORIGIN) * self.ramp(s).1
    }

    pub fn g(&self, s: f64) -> f64 {
        let f = self.f(s);
        let c = s.cos();
        let mag = (1.0 - f * f * c * c).max(0.0).sqrt();
        match self.g_sign {
            GSign::Positive => mag,
            GSign::Negative => -mag,
        }
    }

    /// `|g|² + f² cos² − 1`.
    pub fn isometry_defect(&self, s: f64) -> f64 {
        let (f, g, c) = (self.f(s), self.g(s), s.cos());
        (g * g + f * f * c * c - 1.0).abs()
    }

    pub fn point(&self, s: f64) -> Result<PathPoint> {
        self.check(s)?;
        let (f, g) = (self.f(s), self.g(s));
        let (sin, cos) = s.sin_cos();
        let norm = g * g + sin * sin;
        Ok(PathPoint {
            s,
            f,
            g,
            sin,
            cos,
            t2: -f * cos * cos,
            t4: f * f * cos * cos - sin * sin,
            rho1: g * g / norm,
            // Not `1 − ρ1`, which loses all digits near the origin.
            rho2: sin * sin / norm,
        })
    }
}

/// The AKLT end of the path: `sin(s0) = √(2/3)`.
pub fn s0() -> f64 {
    (2.0f64 / 3.0).sqrt().asin()
}

/// Closed-form data of the transfer operator at one point of the path.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathPoint {
    pub s: f64,
    pub f: f64,
    pub g: f64,
    pub sin: f64,
    pub cos: f64,
    /// Doubly degenerate subleading eigenvalue `−f cos²`.
    pub t2: f64,
    /// `f² cos² − sin²`.
    pub t4: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl PathPoint {
    pub fn eigenvalues(&self) -> [f64; 4] {
        [1.0, self.t2, self.t2, self.t4]
    }

    pub fn subleading(&self) -> f64 {
        self.t2.abs().max(self.t4.abs())
    }
}

/// `n` evenly spaced points covering `[0, s0]`.
pub fn uniform_grid(sched: &PathSchedule, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![sched.s0],
        _ => (0..n).map(|i| sched.s0 * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn standard_schedule() {
        let sc = PathSchedule::standard();
        assert!((sc.s0.sin() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((sc.delta - sc.s0 / 2.0).abs() < 1e-15);
        assert_eq!(sc.f(0.0), F_AT_ORIGIN);
        assert_eq!(sc.f(sc.delta), F_AT_ORIGIN);
        assert!((sc.f(sc.s0) - 1.0).abs() < 1e-15);
        assert!((sc.g(sc.s0) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(sc.with_delta(0.0).is_err());
        assert!(sc.check(-1e-3).is_err());
    }

    #[test]
    fn closed_forms_at_aklt_end() {
        let p = PathSchedule::standard().point(s0()).unwrap();
        for (a, b) in p.eigenvalues().iter().zip([1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((p.rho1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_branch() {
        let sc = PathSchedule::standard().with_g_sign(GSign::Negative);
        assert!(sc.g(0.3) < 0.0);
        assert!(sc.isometry_defect(0.3) < 1e-14);
    }

    proptest! {
        #[test]
        fn profile_is_monotone_bounded_and_isometric(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let sc = PathSchedule::standard();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (lo, hi) = (lo * sc.s0, hi * sc.s0);
            prop_assert!(sc.f(lo) <= sc.f(hi));
            prop_assert!(sc.f(hi) <= 1.0);
            prop_assert!(sc.isometry_defect(hi) <= 1e-14);
        }

        #[test]
        fn derivative_matches_finite_difference(a in 0.01f64..0.99) {
            let sc = PathSchedule::standard();
            let s = a * sc.s0;
            let h = 1e-6;
            let fd = (sc.f(s + h) - sc.f(s - h)) / (2.0 * h);
            prop_assert!((fd - sc.f_prime(s)).abs() < 1e-6);
        }
    }
}
