use super::MpsFamily;
use crate::error::{Error, Result};
use crate::numerics::{op_norm, CMatrix, C64};

/// `Σ c · v_i v_j = Σ c' · v_k v_l` over words of length two.
#[derive(Debug, Clone, Default)]
pub struct QuadraticRelation {
    pub lhs: Vec<(C64, (usize, usize))>,
    pub rhs: Vec<(C64, (usize, usize))>,
    pub description: String,
}

impl QuadraticRelation {
    pub fn new(description: impl Into<String>) -> Self {
        QuadraticRelation { description: description.into(), ..Default::default() }
    }

    pub fn lhs(mut self, coeff: C64, i: usize, j: usize) -> Self {
        self.lhs.push((coeff, (i, j)));
        self
    }

    pub fn rhs(mut self, coeff: C64, i: usize, j: usize) -> Self {
        self.rhs.push((coeff, (i, j)));
        self
    }

    fn side(f: &MpsFamily, terms: &[(C64, (usize, usize))]) -> Result<CMatrix> {
        let mut acc = CMatrix::zeros((f.k(), f.k()));
        for &(c, (i, j)) in terms {
            if i >= f.d() || j >= f.d() {
                return Err(Error::validation(format!("word ({i},{j}) outside alphabet of size {}", f.d())));
            }
            acc = acc + f.matrix(i).dot(f.matrix(j)) * c;
        }
        Ok(acc)
    }

    pub fn residual(&self, f: &MpsFamily) -> Result<f64> {
        op_norm(&(Self::side(f, &self.lhs)? - Self::side(f, &self.rhs)?))
    }
}

/// Largest operator-norm residual over `rels`.
pub fn check_quadratic_relations(f: &MpsFamily, rels: &[QuadraticRelation]) -> Result<f64> {
    rels.iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r.residual(f)?)))
}
