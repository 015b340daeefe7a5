use super::transfer::apply_weighted_transfer;
use super::MpsFamily;
use crate::error::{Error, Result};
use crate::numerics::{
    checked_power, dagger, orthonormal_frame_of_span, CMatrix, CVector, OrthonormalFrame, C64,
    DEFAULT_RANK_TOL,
};
use ndarray::{Array1, Array2};

/// Products `v_{i_m} ⋯ v_{i_1}` for every word, indexed with the first letter most significant.
pub fn word_products(f: &MpsFamily, m: usize) -> Result<Vec<CMatrix>> {
    let d = f.d();
    let count = checked_power(d, m)?;
    let mut words = vec![crate::numerics::identity(f.k())];
    for _ in 0..m {
        let mut next = Vec::with_capacity(words.len() * d);
        for w in &words {
            for v in f.matrices() {
                next.push(v.dot(w));
            }
        }
        words = next;
    }
    debug_assert_eq!(words.len(), count);
    Ok(words)
}

/// The `d^N x k²` matrix sending row-major `vec(B)` to `Γ_N(B)`.
pub fn gamma_matrix(f: &MpsFamily, n: usize) -> Result<CMatrix> {
    let k = f.k();
    let words = word_products(f, n)?;
    let mut g = Array2::zeros((words.len(), k * k));
    for (w, m) in words.iter().enumerate() {
        for p in 0..k {
            for q in 0..k {
                g[(w, p * k + q)] = m[(q, p)];
            }
        }
    }
    Ok(g)
}

/// Vector with components `Tr(B v_{i_N} ⋯ v_{i_1})`.
pub fn gamma_map(f: &MpsFamily, n: usize, b: &CMatrix) -> Result<CVector> {
    let k = f.k();
    if b.dim() != (k, k) {
        return Err(Error::validation(format!("boundary matrix must be {k}x{k}")));
    }
    let vec_b = Array1::from_iter(b.iter().cloned());
    Ok(gamma_matrix(f, n)?.dot(&vec_b))
}

/// Orthonormal frame of `Ran Γ_N`.
pub fn ground_space(f: &MpsFamily, n: usize) -> Result<OrthonormalFrame> {
    orthonormal_frame_of_span(&gamma_matrix(f, n)?, DEFAULT_RANK_TOL)
}

/// Observable inserted between two matrix product states.
#[derive(Debug, Clone)]
pub enum Observable {
    Identity,
    /// Operator on consecutive sites starting at the 0-based `first_site`.
    Local { first_site: usize, op: CMatrix },
    /// Operator on the whole chain.
    Full(CMatrix),
}

/// `⟨Γ_N(B_L), A Γ_N(B_R)⟩` through iterated transfer maps.
pub fn mps_overlap(f: &MpsFamily, b_left: &CMatrix, b_right: &CMatrix, n: usize, a: &Observable) -> Result<C64> {
    let k = f.k();
    if b_left.dim() != (k, k) || b_right.dim() != (k, k) {
        return Err(Error::validation(format!("boundary matrices must be {k}x{k}")));
    }
    let d = f.d();
    match a {
        Observable::Full(op) => {
            let dim = checked_power(d, n)?;
            if op.dim() != (dim, dim) {
                return Err(Error::validation("observable does not match the chain"));
            }
            let l = gamma_map(f, n, b_left)?;
            let r = gamma_map(f, n, b_right)?;
            Ok(crate::numerics::inner(l.as_slice().unwrap(), op.dot(&r).as_slice().unwrap()))
        }
        Observable::Identity => Ok(contract(f, b_left, b_right, |x| {
            (0..n).fold(x, |acc, _| super::transfer::apply_transfer(f, &acc))
        })),
        Observable::Local { first_site, op } => {
            let sites = local_width(op.nrows(), d)?;
            if op.ncols() != op.nrows() || first_site + sites > n {
                return Err(Error::validation("local observable does not fit on the chain"));
            }
            let words = word_products(f, sites)?;
            let inner_sites = n - first_site - sites;
            Ok(contract(f, b_left, b_right, |x| {
                let x = (0..inner_sites).fold(x, |acc, _| super::transfer::apply_transfer(f, &acc));
                let x = if sites == 1 {
                    apply_weighted_transfer(f, op, &x)
                } else {
                    block_transfer(&words, op, &x)
                };
                (0..*first_site).fold(x, |acc, _| super::transfer::apply_transfer(f, &acc))
            }))
        }
    }
}

fn local_width(dim: usize, d: usize) -> Result<usize> {
    let mut sites = 0;
    let mut acc = 1usize;
    while acc < dim {
        acc *= d;
        sites += 1;
    }
    if acc != dim || sites == 0 {
        return Err(Error::validation(format!("observable dimension {dim} is not a power of {d}")));
    }
    Ok(sites)
}

fn block_transfer(words: &[CMatrix], op: &CMatrix, x: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(x.dim());
    for (i, wi) in words.iter().enumerate() {
        let left = dagger(wi).dot(x);
        for (j, wj) in words.iter().enumerate() {
            let a = op[(i, j)];
            if a != C64::new(0.0, 0.0) {
                out = out + left.dot(wj) * a;
            }
        }
    }
    out
}

/// `Σ_pq ⟨p| Φ(B_L† |p⟩⟨q| B_R) |q⟩`.
fn contract(f: &MpsFamily, b_left: &CMatrix, b_right: &CMatrix, map: impl Fn(CMatrix) -> CMatrix) -> C64 {
    let k = f.k();
    let bl = dagger(b_left);
    let mut total = C64::new(0.0, 0.0);
    for p in 0..k {
        for q in 0..k {
            let x = Array2::from_shape_fn((k, k), |(r, s)| bl[(r, p)] * b_right[(q, s)]);
            total += map(x)[(p, q)];
        }
    }
    total
}
