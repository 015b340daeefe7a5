use crate::error::{Error, Result};
use crate::numerics::{anticommutator, dagger, diag, identity, kron_all, max_abs, real, real_matrix, CMatrix, I};

fn sigma_plus() -> CMatrix {
    real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]])
}

/// `x^Q = diag(1, x)`.
fn power_of_number(x: f64) -> CMatrix {
    diag(&[real(1.0), real(x)])
}

fn check_j(j: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::validation("J must be at least 1"));
    }
    if j > 10 {
        return Err(Error::Size { requested: 1u128 << (2 * j), limit: 1 << 20 });
    }
    Ok(())
}

/// Hermitian generators `Z_0, …, Z_{2J}` of the Clifford algebra on `C^{2^J}`, built from fermion modes.
#[derive(Debug, Clone)]
pub struct CliffordRep {
    pub j: usize,
    pub generators: Vec<CMatrix>,
}

impl CliffordRep {
    /// `max_{α,β} ‖{Z_α, Z_β} − 2δ_{αβ}‖`.
    pub fn anticommutator_defect(&self) -> f64 {
        let dim = 1 << self.j;
        let mut worst = 0.0f64;
        for (a, za) in self.generators.iter().enumerate() {
            for (b, zb) in self.generators.iter().enumerate().skip(a) {
                let target = if a == b { identity(dim).mapv(|z| z * 2.0) } else { CMatrix::zeros((dim, dim)) };
                worst = worst.max(max_abs(&(anticommutator(za, zb) - target)));
            }
        }
        worst
    }
}

/// `a*_j = σ_z^{⊗(j−1)} ⊗ σ⁺ ⊗ 1^{⊗(J−j)}` for `j = 1..=J`.
pub fn car_creation(j_total: usize) -> Result<Vec<CMatrix>> {
    twisted_creation(&vec![-1.0; j_total], &vec![1.0; j_total])
}

/// Creation operators with `left^Q` factors before the mode and `right^Q` after it.
fn twisted_creation(left: &[f64], right: &[f64]) -> Result<Vec<CMatrix>> {
    let n = left.len();
    (0..n)
        .map(|m| {
            let factors: Vec<CMatrix> = (0..n)
                .map(|i| match i.cmp(&m) {
                    std::cmp::Ordering::Less => power_of_number(left[i]),
                    std::cmp::Ordering::Equal => sigma_plus(),
                    std::cmp::Ordering::Greater => power_of_number(right[i]),
                })
                .collect();
            kron_all(&factors)
        })
        .collect()
}

pub fn clifford_rep(j: usize) -> Result<CliffordRep> {
    check_j(j)?;
    let z0 = kron_all(&vec![power_of_number(-1.0); j])?;
    let mut generators = vec![z0];
    for c in car_creation(j)? {
        let a = dagger(&c);
        generators.push(&a + &c);
        generators.push((&a - &c).mapv(|z| z * I));
    }
    Ok(CliffordRep { j, generators })
}

/// Fermion modes deformed by `Λ = (λ_1, …, λ_J)`; `Λ = 1` gives the ordinary modes.
#[derive(Debug, Clone)]
pub struct TwistedCarFamily {
    pub lambdas: Vec<f64>,
    pub creation: Vec<CMatrix>,
    pub annihilation: Vec<CMatrix>,
    /// `⊗_j (−λ_j)^Q`.
    pub a0: CMatrix,
}

impl TwistedCarFamily {
    pub fn j(&self) -> usize {
        self.lambdas.len()
    }

    /// Largest residual over nilpotency and the four families of twisted relations.
    pub fn relation_residual(&self) -> f64 {
        let (c, a, a0, l) = (&self.creation, &self.annihilation, &self.a0, &self.lambdas);
        let mut worst = 0.0f64;
        let mut track = |m: CMatrix| worst = worst.max(max_abs(&m));
        let a0_sq = a0.dot(a0);
        for j in 0..self.j() {
            track(c[j].dot(&c[j]));
            track(a[j].dot(&a[j]));
            track(c[j].dot(&a[j]) + a[j].dot(&c[j]).mapv(|z| z * l[j] * l[j]) - &a0_sq);
            track(c[j].dot(a0) + a0.dot(&c[j]).mapv(|z| z * l[j]));
            for k in (0..self.j()).filter(|&k| k != j) {
                track(c[j].dot(&a[k]) + a[k].dot(&c[j]).mapv(|z| z * l[j] * l[k]));
                track(c[j].dot(&c[k]) + c[k].dot(&c[j]).mapv(|z| z * l[j] / l[k]));
            }
        }
        worst
    }
}

pub fn twisted_car(lambdas: &[f64]) -> Result<TwistedCarFamily> {
    check_j(lambdas.len())?;
    if let Some(bad) = lambdas.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
        return Err(Error::validation(format!("twist parameters must lie in (0, 1], got {bad}")));
    }
    let left: Vec<f64> = lambdas.iter().map(|x| -x).collect();
    let creation = twisted_creation(&left, lambdas)?;
    let annihilation = creation.iter().map(dagger).collect();
    let a0 = kron_all(&left.iter().map(|&x| power_of_number(x)).collect::<Vec<_>>())?;
    Ok(TwistedCarFamily { lambdas: lambdas.to_vec(), creation, annihilation, a0 })
}
