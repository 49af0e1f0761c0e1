use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::scalars::Scalar;
use crate::series::{Derivation, PuiseuxSeries};

/// Dense matrix of Puiseux series sharing one ramification.
#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    ram: u32,
    data: Vec<PuiseuxSeries>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<PuiseuxSeries>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        let ram = data.iter().fold(1u32, |acc, e| acc.lcm(&e.ramification()));
        let data = data.into_iter().map(|e| lift(e, ram)).collect();
        Matrix { rows, cols, ram, data }
    }

    pub fn from_rows(rows: Vec<Vec<PuiseuxSeries>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("rows of unequal length".into()));
        }
        Ok(Matrix::new(r, c, rows.into_iter().flatten().collect()))
    }

    pub fn from_columns(cols: &[Vec<PuiseuxSeries>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let data = (0..r)
            .flat_map(|i| cols.iter().map(move |col| col[i].clone()))
            .collect();
        Matrix::new(r, c, data)
    }

    pub fn from_scalars(rows: &[Vec<Scalar>], ram: u32) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .flatten()
            .map(|x| PuiseuxSeries::constant(x.clone(), ram))
            .collect();
        Matrix::new(r, c, data).lift_to(ram)
    }

    pub fn zeros(rows: usize, cols: usize, ram: u32) -> Self {
        Matrix {
            rows,
            cols,
            ram,
            data: vec![PuiseuxSeries::zero(ram); rows * cols],
        }
    }

    pub fn identity(n: usize, ram: u32) -> Self {
        let mut m = Matrix::zeros(n, n, ram);
        for i in 0..n {
            m.set(i, i, PuiseuxSeries::one(ram));
        }
        m
    }

    pub fn diagonal(entries: &[PuiseuxSeries]) -> Self {
        let n = entries.len();
        let ram = entries.iter().fold(1u32, |acc, e| acc.lcm(&e.ramification()));
        let mut m = Matrix::zeros(n, n, ram);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    pub fn get(&self, i: usize, j: usize) -> &PuiseuxSeries {
        &self.data[i * self.cols + j]
    }

    /// Stores an entry, raising the matrix ramification if needed.
    pub fn set(&mut self, i: usize, j: usize, v: PuiseuxSeries) {
        if self.ram % v.ramification() != 0 {
            *self = self.lift_to(self.ram.lcm(&v.ramification()));
        }
        self.data[i * self.cols + j] = lift(v, self.ram);
    }

    pub fn row(&self, i: usize) -> Vec<PuiseuxSeries> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<PuiseuxSeries> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[PuiseuxSeries] {
        &self.data
    }

    pub fn lift_to(&self, ram: u32) -> Self {
        if ram == self.ram {
            return self.clone();
        }
        Matrix {
            rows: self.rows,
            cols: self.cols,
            ram,
            data: self.data.iter().map(|e| e.lift_to(ram)).collect(),
        }
    }

    fn map(&self, f: impl Fn(&PuiseuxSeries) -> PuiseuxSeries) -> Self {
        Matrix::new(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn derive(&self, der: &Derivation) -> Self {
        self.map(|e| e.derive(der))
    }

    pub fn truncate(&self, prec: i64) -> Self {
        self.map(|e| e.truncate(prec))
    }

    pub fn scale(&self, c: &PuiseuxSeries) -> Self {
        self.map(|e| c * e)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let ram = self.ram.lcm(&other.ram);
        let (a, b) = (self.lift_to(ram), other.lift_to(ram));
        let mut data = Vec::with_capacity(a.rows * b.cols);
        for i in 0..a.rows {
            for j in 0..b.cols {
                let mut acc = PuiseuxSeries::zero(ram);
                for k in 0..a.cols {
                    let (x, y) = (a.get(i, k), b.get(k, j));
                    if x.is_exact_zero() || y.is_exact_zero() {
                        continue;
                    }
                    acc = &acc + &(x * y);
                }
                data.push(acc);
            }
        }
        Matrix {
            rows: a.rows,
            cols: b.cols,
            ram,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[PuiseuxSeries]) -> Vec<PuiseuxSeries> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(PuiseuxSeries::zero(self.ram), |acc, k| {
                    let (x, y) = (self.get(i, k), &v[k]);
                    if x.is_exact_zero() || y.is_exact_zero() {
                        acc
                    } else {
                        &acc + &(x * y)
                    }
                })
            })
            .collect()
    }

    /// `rows x cols` block starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let data = (r0..r0 + rows)
            .flat_map(|i| (c0..c0 + cols).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Matrix::new(rows, cols, data).lift_to(self.ram)
    }

    /// Copies `block` into `self` at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    /// Every entry zero to precision.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(PuiseuxSeries::is_zero)
    }

    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.sub(other).is_zero()
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    /// Worst absolute `t`-precision among the entries.
    pub fn precision_t(&self) -> Option<Rational64> {
        self.data.iter().filter_map(PuiseuxSeries::precision_t).min()
    }

    /// Least valuation among the entries on the `t` scale.
    pub fn valuation_t(&self) -> Option<Rational64> {
        self.data.iter().filter_map(PuiseuxSeries::valuation_t).min()
    }

    /// Inverse by Gauss-Jordan elimination, pivoting on the entry of least
    /// valuation in each column. Inverses of non-monomial pivots are expanded
    /// to absolute `t`-precision `limit_t`.
    pub fn inverse(&self, limit_t: i64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, self.ram);
        for col in 0..n {
            let piv = (col..n)
                .filter_map(|r| a.get(r, col).valuation().map(|v| (v, r)))
                .min()
                .map(|(_, r)| r)
                .ok_or(Error::SingularGauge)?;
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let p_inv = a.get(col, col).invert(limit_t)?;
            a.scale_row(col, &p_inv);
            inv.scale_row(col, &p_inv);
            for r in 0..n {
                if r == col || a.get(r, col).is_exact_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                a.axpy_row(r, col, &factor);
                inv.axpy_row(r, col, &factor);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, c: &PuiseuxSeries) {
        for k in 0..self.cols {
            let v = c * self.get(i, k);
            self.data[i * self.cols + k] = v;
        }
    }

    /// row_r -= factor * row_src
    fn axpy_row(&mut self, r: usize, src: usize, factor: &PuiseuxSeries) {
        for k in 0..self.cols {
            let s = self.get(src, k);
            if s.is_exact_zero() {
                continue;
            }
            let v = self.get(r, k) - &(factor * s);
            self.data[r * self.cols + k] = v;
        }
    }
}

fn lift(e: PuiseuxSeries, ram: u32) -> PuiseuxSeries {
    if e.ramification() == ram {
        e
    } else {
        e.lift_to(ram)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_expr_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Every component zero to precision.
pub fn vec_is_zero(v: &[PuiseuxSeries]) -> bool {
    v.iter().all(PuiseuxSeries::is_zero)
}

pub fn vec_sub(a: &[PuiseuxSeries], b: &[PuiseuxSeries]) -> Vec<PuiseuxSeries> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &PuiseuxSeries, v: &[PuiseuxSeries]) -> Vec<PuiseuxSeries> {
    v.iter().map(|x| c * x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(c: i64, e: i64) -> PuiseuxSeries {
        PuiseuxSeries::monomial(Scalar::from_int(c), e, 1)
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = Matrix::from_rows(vec![
            vec![&t(1, 0) + &t(1, 1), t(2, -1)],
            vec![t(3, 2), &t(1, 0) - &t(1, 3)],
        ])
        .unwrap();
        let inv = m.inverse(20).unwrap();
        assert!(m.mul(&inv).eq_to_precision(&Matrix::identity(2, 1)));
        assert!(inv.mul(&m).eq_to_precision(&Matrix::identity(2, 1)));
        assert!(m.mul(&inv).precision_t().unwrap() >= Rational64::from(10));
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = Matrix::from_rows(vec![vec![t(1, 0), t(2, 1)], vec![t(2, 0), t(4, 1)]]).unwrap();
        assert_eq!(m.inverse(10).unwrap_err(), Error::SingularGauge);
    }

    #[test]
    fn mixed_ramification_lifts() {
        let half = PuiseuxSeries::monomial(Scalar::one(), 1, 2);
        let m = Matrix::from_rows(vec![vec![t(1, 1), half.clone()]]).unwrap();
        assert_eq!(m.ramification(), 2);
        assert_eq!(m.get(0, 0).valuation(), Some(2));
        assert_eq!(m.to_string(), "[t, t^(1/2)]");
    }
}
