use crate::error::Result;
use crate::series::PuiseuxSeries;

use super::matrix::Matrix;

/// An invertible matrix `g` together with its inverse. Acting on an
/// operator `d + A` it gives `d + g^-1 A g + g^-1 d(g)`; the columns of `g`
/// are the new basis vectors written in the old basis.
#[derive(Clone, Debug)]
pub struct GaugeTransform {
    g: Matrix,
    g_inv: Matrix,
}

impl GaugeTransform {
    pub fn identity(n: usize, ram: u32) -> Self {
        GaugeTransform {
            g: Matrix::identity(n, ram),
            g_inv: Matrix::identity(n, ram),
        }
    }

    /// Inverts `g` by elimination.
    pub fn from_matrix(g: Matrix, limit_t: i64) -> Result<Self> {
        let g_inv = g.inverse(limit_t)?;
        Ok(GaugeTransform { g, g_inv })
    }

    /// Trusts the caller that `g g_inv = 1`.
    pub fn with_inverse(g: Matrix, g_inv: Matrix) -> Self {
        let ram = num_integer::lcm(g.ramification(), g_inv.ramification());
        GaugeTransform {
            g: g.lift_to(ram),
            g_inv: g_inv.lift_to(ram),
        }
    }

    /// `1 + x E_ij` with `i != j`.
    pub fn elementary(n: usize, i: usize, j: usize, x: &PuiseuxSeries) -> Self {
        assert_ne!(i, j);
        let ram = x.ramification();
        let mut g = Matrix::identity(n, ram);
        let mut g_inv = Matrix::identity(n, ram);
        g.set(i, j, x.clone());
        g_inv.set(i, j, -x);
        GaugeTransform { g, g_inv }
    }

    /// New basis vector `k` is old basis vector `perm[k]`.
    pub fn permutation(perm: &[usize], ram: u32) -> Self {
        let n = perm.len();
        let mut g = Matrix::zeros(n, n, ram);
        let mut g_inv = Matrix::zeros(n, n, ram);
        for (k, &p) in perm.iter().enumerate() {
            g.set(p, k, PuiseuxSeries::one(ram));
            g_inv.set(k, p, PuiseuxSeries::one(ram));
        }
        GaugeTransform { g, g_inv }
    }

    pub fn diagonal(entries: &[PuiseuxSeries], limit_t: i64) -> Result<Self> {
        let inv: Result<Vec<PuiseuxSeries>> = entries.iter().map(|c| c.invert(limit_t)).collect();
        Ok(GaugeTransform::with_inverse(
            Matrix::diagonal(entries),
            Matrix::diagonal(&inv?),
        ))
    }

    /// Basis `(v, e_j for j != piv)` where `v[piv] = 1`.
    pub fn basis_extension(v: &[PuiseuxSeries], piv: usize) -> Self {
        let n = v.len();
        let ram = v.iter().fold(1u32, |acc, e| num_integer::lcm(acc, e.ramification()));
        let others: Vec<usize> = (0..n).filter(|&j| j != piv).collect();
        let mut g = Matrix::zeros(n, n, ram);
        let mut g_inv = Matrix::zeros(n, n, ram);
        for (i, vi) in v.iter().enumerate() {
            g.set(i, 0, vi.clone());
        }
        g.set(piv, 0, PuiseuxSeries::one(ram));
        g_inv.set(0, piv, PuiseuxSeries::one(ram));
        for (k, &j) in others.iter().enumerate() {
            g.set(j, k + 1, PuiseuxSeries::one(ram));
            g_inv.set(k + 1, j, PuiseuxSeries::one(ram));
            g_inv.set(k + 1, piv, -&v[j]);
        }
        GaugeTransform { g, g_inv }
    }

    /// Block-diagonal `1_offset (+) self (+) 1_rest` inside dimension `n`.
    pub fn embed(&self, offset: usize, n: usize) -> Self {
        let ram = self.ramification();
        let mut g = Matrix::identity(n, ram);
        let mut g_inv = Matrix::identity(n, ram);
        g.set_block(offset, offset, &self.g);
        g_inv.set_block(offset, offset, &self.g_inv);
        GaugeTransform { g, g_inv }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.g
    }

    pub fn inverse_matrix(&self) -> &Matrix {
        &self.g_inv
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn ramification(&self) -> u32 {
        self.g.ramification()
    }

    pub fn lift_to(&self, ram: u32) -> Self {
        GaugeTransform {
            g: self.g.lift_to(ram),
            g_inv: self.g_inv.lift_to(ram),
        }
    }

    /// First `self`, then `next`: the matrix `g h`.
    pub fn then(&self, next: &GaugeTransform) -> Self {
        GaugeTransform {
            g: self.g.mul(&next.g),
            g_inv: next.g_inv.mul(&self.g_inv),
        }
    }

    pub fn inverse(&self) -> Self {
        GaugeTransform {
            g: self.g_inv.clone(),
            g_inv: self.g.clone(),
        }
    }

    /// `g g^-1 = 1` on the known window.
    pub fn is_consistent(&self) -> bool {
        self.g
            .mul(&self.g_inv)
            .eq_to_precision(&Matrix::identity(self.dim(), self.ramification()))
    }
}
