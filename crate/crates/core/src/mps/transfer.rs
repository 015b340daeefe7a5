use super::MpsFamily;
use crate::error::{Error, Result};
use crate::numerics::{dagger, general_eigen, hermitian_eigensystem, kron, trace, CMatrix, CVector, C64};
use ndarray::Array2;
use ndarray_linalg::{Inverse, JobSvd, SVDDC};
use std::f64::consts::PI;

/// Eigenvalues closer than this (relative to the spectral radius) form one cluster.
const CLUSTER_TOL: f64 = 1e-7;
/// Minimum relative singular value of a cluster's eigenvector block.
const DEFECT_TOL: f64 = 1e-6;

/// Matrix of `B ↦ Σ_i v_i† B v_i` acting on row-major vectorized `k x k` matrices.
pub fn transfer_operator(f: &MpsFamily) -> CMatrix {
    let k2 = f.k() * f.k();
    f.matrices().iter().fold(Array2::zeros((k2, k2)), |acc, v| {
        acc + kron(&dagger(v), &v.t().to_owned()).expect("bond dimension is small")
    })
}

pub fn apply_transfer(f: &MpsFamily, b: &CMatrix) -> CMatrix {
    f.matrices()
        .iter()
        .fold(CMatrix::zeros((f.k(), f.k())), |acc, v| acc + dagger(v).dot(b).dot(v))
}

/// `B ↦ Σ_ij A_ij v_i† B v_j` for a one-site observable `A`.
pub fn apply_weighted_transfer(f: &MpsFamily, a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros((f.k(), f.k()));
    for (i, vi) in f.matrices().iter().enumerate() {
        let left = dagger(vi).dot(b);
        for (j, vj) in f.matrices().iter().enumerate() {
            let w = a[(i, j)];
            if w != C64::new(0.0, 0.0) {
                out = out + left.dot(vj) * w;
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct TransferSpectrum {
    /// Sorted by descending modulus, then ascending phase.
    pub eigenvalues: Vec<C64>,
    pub right: Vec<CMatrix>,
    /// Paired through `Tr(L_i R_j)`.
    pub left: Vec<CMatrix>,
    pub biorthonormal: bool,
}

impl TransferSpectrum {
    /// `max_ij |Tr(L_i R_j) − δ_ij|`.
    pub fn biorthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, l) in self.left.iter().enumerate() {
            for (j, r) in self.right.iter().enumerate() {
                let t = crate::numerics::trace(&l.dot(r));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((t - target).norm());
            }
        }
        worst
    }

    /// `max_j ‖Ê(R_j) − t_j R_j‖`.
    pub fn eigen_residual(&self, f: &MpsFamily) -> f64 {
        self.right
            .iter()
            .zip(&self.eigenvalues)
            .map(|(r, &t)| crate::numerics::max_abs(&(apply_transfer(f, r) - r * t)))
            .fold(0.0, f64::max)
    }

    /// Spectral radius of everything but the leading eigenvalue.
    pub fn subleading_modulus(&self) -> f64 {
        self.eigenvalues.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn phase(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI + 1e-9 {
        PI
    } else {
        a
    }
}

/// Sorts by descending modulus, ties within `1e-9` broken by ascending phase.
pub fn sort_spectrum(values: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].norm().total_cmp(&values[a].norm()));
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && (values[order[start]].norm() - values[order[end]].norm()).abs() <= 1e-9 {
            end += 1;
        }
        order[start..end].sort_by(|&a, &b| phase(values[a]).total_cmp(&phase(values[b])));
        start = end;
    }
    order
}

/// Largest pairing error between two multisets, matched greedily by distance.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst = 0.0f64;
    for (dist, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(dist);
        }
    }
    worst
}

fn unvec(v: ndarray::ArrayView1<C64>, k: usize) -> CMatrix {
    Array2::from_shape_fn((k, k), |(p, q)| v[p * k + q])
}

/// Scales so the first largest-modulus entry equals one.
fn normalize_column(mut v: CVector) -> CVector {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(&pivot) = v.iter().find(|z| z.norm() >= top * (1.0 - 1e-12)) {
        v.mapv_inplace(|z| z / pivot);
    }
    v
}

/// Full eigendecomposition of the transfer operator with biorthonormal left/right pairs.
pub fn transfer_spectrum(f: &MpsFamily) -> Result<TransferSpectrum> {
    let k = f.k();
    let t = transfer_operator(f);
    let (vals, right) = general_eigen(&t)?;
    let (lvals, left) = general_eigen(&t.t().to_owned())?;
    let radius = vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let order = sort_spectrum(vals.as_slice().unwrap());

    let mut used_left = vec![false; lvals.len()];
    let mut eigenvalues = Vec::with_capacity(order.len());
    let mut rights = Vec::with_capacity(order.len());
    let mut lefts = Vec::with_capacity(order.len());
    let mut assigned = vec![false; order.len()];
    for (pos, &idx) in order.iter().enumerate() {
        if assigned[pos] {
            continue;
        }
        let center = vals[idx];
        let members: Vec<usize> = order
            .iter()
            .enumerate()
            .filter(|&(p, &j)| !assigned[p] && (vals[j] - center).norm() <= CLUSTER_TOL * radius)
            .map(|(p, _)| p)
            .collect();
        let m = members.len();
        let mut r_block = Array2::zeros((k * k, m));
        for (c, &p) in members.iter().enumerate() {
            assigned[p] = true;
            r_block.column_mut(c).assign(&normalize_column(right.column(order[p]).to_owned()));
        }
        let l_idx: Vec<usize> = (0..lvals.len())
            .filter(|&j| !used_left[j] && (lvals[j] - center).norm() <= CLUSTER_TOL * radius)
            .take(m)
            .collect();
        if l_idx.len() != m {
            return Err(Error::Diagonalization { eigenvalue: center, multiplicity: m });
        }
        if m > 1 {
            let (_, s, _) = r_block.svddc(JobSvd::None)?;
            let smax = s.iter().cloned().fold(0.0, f64::max);
            let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
            if smin < DEFECT_TOL * smax {
                return Err(Error::Diagonalization { eigenvalue: center, multiplicity: m });
            }
        }
        let mut l_block = Array2::zeros((k * k, m));
        for (c, &j) in l_idx.iter().enumerate() {
            used_left[j] = true;
            l_block.column_mut(c).assign(&left.column(j));
        }
        let pairing = l_block.t().dot(&r_block);
        let inv = pairing
            .inv()
            .map_err(|_| Error::Diagonalization { eigenvalue: center, multiplicity: m })?;
        let l_block = l_block.dot(&inv.t());
        for c in 0..m {
            eigenvalues.push(vals[order[members[c]]]);
            rights.push(unvec(r_block.column(c), k));
            lefts.push(unvec(l_block.column(c), k).t().to_owned());
        }
    }
    let mut spectrum = TransferSpectrum { eigenvalues, right: rights, left: lefts, biorthonormal: false };
    spectrum.biorthonormal = spectrum.biorthonormality_defect() <= 1e-10;
    Ok(spectrum)
}

/// Gauge-equivalent isometric family `ṽ = r^{-1/2} X^{1/2} v X^{-1/2}`, where `Σ v† X v = r X`
/// is the Perron fixed point. It generates the same ground spaces and satisfies `Σ ṽ† ṽ = 1`.
pub fn isometric_normal_form(f: &MpsFamily) -> Result<MpsFamily> {
    let spec = transfer_spectrum(f)?;
    let r = spec.eigenvalues[0];
    let simple = spec.eigenvalues.get(1).is_none_or(|z| z.norm() < r.norm() * (1.0 - 1e-10));
    if !simple || r.re <= 0.0 || r.im.abs() > 1e-10 * r.norm() {
        return Err(Error::certification(format!("top transfer eigenvalue {r} is not simple, real and positive")));
    }
    let x = &spec.right[0];
    let tr = trace(x);
    let x = x.mapv(|z| z * tr.conj() / tr.norm());
    let x = (&x + &dagger(&x)).mapv(|z| z * 0.5);
    let eig = hermitian_eigensystem(&x)?;
    let top = eig.values.iter().cloned().fold(0.0, f64::max);
    if eig.values.iter().any(|&l| l <= 1e-12 * top) {
        return Err(Error::certification("Perron fixed point is not positive definite"));
    }
    let u = eig.vectors.matrix();
    let root = |p: f64| u.dot(&Array2::from_diag(&eig.values.mapv(|l| C64::new(l.powf(p), 0.0)))).dot(&dagger(u));
    let (half, inv_half) = (root(0.5), root(-0.5));
    let scale = 1.0 / r.re.sqrt();
    MpsFamily::new(f.matrices().iter().map(|v| half.dot(v).dot(&inv_half).mapv(|z| z * scale)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, real, real_matrix};

    fn aklt() -> MpsFamily {
        let a = (2.0f64 / 3.0).sqrt();
        let b = -(1.0f64 / 3.0).sqrt();
        MpsFamily::new(vec![
            real_matrix(&[&[b, 0.0], &[0.0, -b]]),
            real_matrix(&[&[0.0, 0.0], &[a, 0.0]]),
            real_matrix(&[&[0.0, -a], &[0.0, 0.0]]),
        ])
        .unwrap()
    }

    #[test]
    fn scalar_family() {
        let f = MpsFamily::new(vec![real_matrix(&[&[1.0]])]).unwrap();
        assert_eq!(transfer_operator(&f), real_matrix(&[&[1.0]]));
        let g = MpsFamily::new(vec![Array2::from_elem((1, 1), c(0.6, 0.8) * 0.5)]).unwrap();
        let s = transfer_spectrum(&g).unwrap();
        assert!((s.eigenvalues[0] - real(0.25)).norm() < 1e-15);
    }

    #[test]
    fn matrix_agrees_with_direct_application() {
        let f = aklt();
        let t = transfer_operator(&f);
        for p in 0..2 {
            for q in 0..2 {
                let mut e = CMatrix::zeros((2, 2));
                e[(p, q)] = real(1.0);
                let direct = apply_transfer(&f, &e);
                for r in 0..2 {
                    for s in 0..2 {
                        assert!((t[(r * 2 + s, p * 2 + q)] - direct[(r, s)]).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn aklt_spectrum_and_invariant_state() {
        let s = transfer_spectrum(&aklt()).unwrap();
        let expected = [real(1.0), real(-1.0 / 3.0), real(-1.0 / 3.0), real(-1.0 / 3.0)];
        assert!(spectrum_distance(&s.eigenvalues, &expected) < 1e-12);
        assert!(s.biorthonormal);
        assert!(s.eigen_residual(&aklt()) < 1e-12);
        let rho = &s.left[0];
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-12 && (rho[(1, 1)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn jordan_block_is_reported() {
        let f = MpsFamily::new(vec![real_matrix(&[&[1.0, 1.0], &[0.0, 1.0]])]).unwrap();
        let err = transfer_spectrum(&f).unwrap_err();
        assert!(matches!(err, Error::Diagonalization { .. }), "{err}");
    }

    #[test]
    fn sorting_breaks_ties_by_phase() {
        let vals = [c(0.0, 0.5), real(1.0), c(0.0, -0.5), real(-0.5)];
        let order = sort_spectrum(&vals);
        assert_eq!(order, vec![1, 2, 0, 3]);
    }

    #[test]
    fn normal_form_is_isometric_with_the_same_ground_spaces() {
        use crate::mps::ground_space;
        use crate::numerics::subspace_distance;
        let f = MpsFamily::new(vec![
            real_matrix(&[&[0.9, 0.2], &[0.0, -0.4]]),
            real_matrix(&[&[0.0, 0.0], &[0.7, 0.1]]),
            real_matrix(&[&[0.3, -0.5], &[0.0, 0.0]]),
        ])
        .unwrap();
        let g = isometric_normal_form(&f).unwrap();
        assert!(g.isometry_residual().unwrap() < 1e-12);
        assert!((transfer_spectrum(&g).unwrap().eigenvalues[0] - real(1.0)).norm() < 1e-12);
        for n in 2..=4 {
            let d = subspace_distance(&ground_space(&f, n).unwrap(), &ground_space(&g, n).unwrap()).unwrap();
            assert!(d < 1e-10);
        }
        assert!(isometric_normal_form(&aklt()).unwrap().max_deviation(&aklt()) < 1e-12);
    }
}
