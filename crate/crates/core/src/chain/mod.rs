//! Open chains `H = Σ_x h_{x,x+1}` applied through tensor-index arithmetic.

mod gap;
mod sectors;

pub use gap::{spectral_gap, SolverChoice, SolverConfig, SolverKind, SpectrumReport, Tolerances};
pub use sectors::Sectors;

use crate::error::{Error, Result};
use crate::interaction::NearestNeighborInteraction;
use crate::numerics::{checked_power, kron, identity, op_norm, CMatrix, C64, MAX_DENSE_ENTRIES};
use rayon::prelude::*;

/// Above this dimension matrix-vector products run in parallel.
const PARALLEL_DIM: usize = 1 << 14;

/// Default largest dimension assembled as a dense matrix.
pub const DEFAULT_DENSE_CEILING: usize = 4096;

#[derive(Debug, Clone)]
pub struct ChainOperator {
    h: NearestNeighborInteraction,
    n: usize,
    dim: usize,
    /// Nonzero entries of each row of `h`.
    rows: Vec<Vec<(usize, C64)>>,
    h_norm: f64,
    charges: Option<Vec<Vec<i32>>>,
}

impl ChainOperator {
    pub fn new(h: &NearestNeighborInteraction, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation("a chain needs at least two sites"));
        }
        let dim = checked_power(h.d(), n)?;
        let m = h.matrix();
        let rows = (0..m.nrows())
            .map(|r| {
                (0..m.ncols())
                    .filter(|&c| m[(r, c)].norm() > 1e-15)
                    .map(|c| (c, m[(r, c)]))
                    .collect()
            })
            .collect();
        Ok(ChainOperator { h: h.clone(), n, dim, rows, h_norm: op_norm(m)?, charges: None })
    }

    /// Attaches one-site charges conserved by `h`, enabling block diagonalization.
    pub fn with_charges(mut self, charges: Vec<Vec<i32>>) -> Result<Self> {
        if charges.len() != self.h.d() {
            return Err(Error::validation("one charge vector per local basis state is required"));
        }
        if !self.h.conserves(&charges) {
            return Err(Error::validation(format!("interaction {} does not conserve the given charges", self.h.model())));
        }
        // Round-off entries that cross sectors would otherwise index outside a block.
        let d = self.h.d();
        let total = |pair: usize| -> Vec<i32> {
            charges[pair / d].iter().zip(&charges[pair % d]).map(|(x, y)| x + y).collect()
        };
        for (pair, row) in self.rows.iter_mut().enumerate() {
            let q = total(pair);
            row.retain(|&(col, _)| total(col) == q);
        }
        self.charges = Some(charges);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.h.d()
    }

    pub fn interaction(&self) -> &NearestNeighborInteraction {
        &self.h
    }

    pub fn charges(&self) -> Option<&[Vec<i32>]> {
        self.charges.as_deref()
    }

    /// Upper bound `(N − 1) ‖h‖` on `‖H‖`.
    pub fn norm_bound(&self) -> f64 {
        (self.n - 1) as f64 * self.h_norm
    }

    /// Calls `visit(target, value)` for every nonzero `H[w, target]`.
    fn for_each_in_row(&self, w: usize, mut visit: impl FnMut(usize, C64)) {
        let d = self.h.d();
        let mut stride = 1usize;
        for _bond in (0..self.n - 1).rev() {
            let b = (w / stride) % d;
            let a = (w / (stride * d)) % d;
            let pair = a * d + b;
            let base = w - pair * stride;
            for &(col, val) in &self.rows[pair] {
                visit(base + col * stride, val);
            }
            stride *= d;
        }
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        let row = |(w, out): (usize, &mut C64)| {
            let mut acc = C64::new(0.0, 0.0);
            self.for_each_in_row(w, |t, v| acc += v * x[t]);
            *out = acc;
        };
        if self.dim >= PARALLEL_DIM {
            y.par_iter_mut().enumerate().for_each(row);
        } else {
            y.iter_mut().enumerate().for_each(row);
        }
    }

    /// Applies the block of `H` on one sector, in sector-local coordinates.
    pub fn apply_block(&self, sectors: &Sectors, sector: usize, x: &[C64], y: &mut [C64]) {
        let members = sectors.members(sector);
        let row = |(li, out): (usize, &mut C64)| {
            let mut acc = C64::new(0.0, 0.0);
            self.for_each_in_row(members[li], |t, v| acc += v * x[sectors.position(t)]);
            *out = acc;
        };
        if members.len() >= PARALLEL_DIM {
            y.par_iter_mut().enumerate().for_each(row);
        } else {
            y.iter_mut().enumerate().for_each(row);
        }
    }

    pub fn dense_block(&self, sectors: &Sectors, sector: usize) -> Result<CMatrix> {
        let members = sectors.members(sector);
        let m = members.len();
        if (m as u128) * (m as u128) > MAX_DENSE_ENTRIES as u128 {
            return Err(Error::Size { requested: (m * m) as u128, limit: MAX_DENSE_ENTRIES });
        }
        let mut out = CMatrix::zeros((m, m));
        for (li, &w) in members.iter().enumerate() {
            self.for_each_in_row(w, |t, v| out[(li, sectors.position(t))] += v);
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        self.dense_block(&Sectors::trivial(self.dim), 0)
    }

    /// Sectors of the attached charges, or a single block.
    pub fn sectors(&self) -> Sectors {
        match &self.charges {
            Some(q) => Sectors::from_charges(self.h.d(), self.n, q),
            None => Sectors::trivial(self.dim),
        }
    }

    /// Largest `|H[i, j]|` with `i`, `j` in different sectors.
    pub fn off_block_residual(&self, sectors: &Sectors) -> f64 {
        let mut worst = 0.0f64;
        for w in 0..self.dim {
            self.for_each_in_row(w, |t, v| {
                if sectors.sector_of(t) != sectors.sector_of(w) {
                    worst = worst.max(v.norm());
                }
            });
        }
        worst
    }
}

/// A chain Hamiltonian either as a dense matrix or as a matrix-free operator.
#[derive(Debug, Clone)]
pub enum Hamiltonian {
    Dense(CMatrix),
    MatVec(ChainOperator),
}

/// `Σ_x 1^{⊗x} ⊗ h ⊗ 1^{⊗(N−2−x)}`, dense up to `dense_ceiling`.
pub fn assemble_hamiltonian(h: &NearestNeighborInteraction, n: usize, dense_ceiling: usize) -> Result<Hamiltonian> {
    let op = ChainOperator::new(h, n)?;
    if op.dim() <= dense_ceiling {
        Ok(Hamiltonian::Dense(op.to_dense()?))
    } else {
        Ok(Hamiltonian::MatVec(op))
    }
}

/// Kronecker-product assembly, for small chains and cross-checks.
pub fn assemble_by_kron(h: &NearestNeighborInteraction, n: usize) -> Result<CMatrix> {
    let d = h.d();
    let dim = checked_power(d, n)?;
    let mut total = CMatrix::zeros((dim, dim));
    for x in 0..n - 1 {
        let left = identity(d.pow(x as u32));
        let right = identity(d.pow((n - 2 - x) as u32));
        total = total + kron(&kron(&left, h.matrix())?, &right)?;
    }
    Ok(total)
}
