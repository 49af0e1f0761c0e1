//! Differential operators `d + A` on `C((t^(1/b)))^n` with `d = t d/dt`,
//! gauge transformations, eigenvectors and the Jordan decomposition.

mod gauge;
mod jordan;
mod matrix;

pub use gauge::GaugeTransform;
pub use jordan::{
    descent_check, jordan, nilpotent_partition, solve_first_order, split_eigenspaces, triangularize,
    unipotent_normal_form, JordanDecomposition, Splitting,
};
pub use matrix::{vec_is_zero, vec_scale, vec_sub, Matrix};

use crate::error::{Error, Result};
use crate::factor::factor_linear;
use crate::orepoly::OrePoly;
use crate::series::{Derivation, PuiseuxSeries};

#[derive(Clone, Debug)]
pub struct DiffOperator {
    a: Matrix,
    der: Derivation,
}

impl DiffOperator {
    pub fn new(a: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix is {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let der = Derivation::delta_one(a.ramification());
        Ok(DiffOperator { a, der })
    }

    pub fn from_rows(rows: Vec<Vec<PuiseuxSeries>>) -> Result<Self> {
        DiffOperator::new(Matrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn derivation(&self) -> &Derivation {
        &self.der
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn ramification(&self) -> u32 {
        self.a.ramification()
    }

    pub fn lift_to(&self, ram: u32) -> Self {
        DiffOperator {
            a: self.a.lift_to(ram),
            der: Derivation::delta_one(ram),
        }
    }

    /// `d(v) + A v`
    pub fn apply(&self, v: &[PuiseuxSeries]) -> Result<Vec<PuiseuxSeries>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for an operator of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        let ram = v
            .iter()
            .fold(self.ramification(), |acc, e| num_integer::lcm(acc, e.ramification()));
        let op = self.lift_to(ram);
        let av = op.a.mul_vec(&v.iter().map(|e| e.lift_to(ram)).collect::<Vec<_>>());
        Ok(v.iter().zip(av).map(|(x, y)| &x.derive(&op.der) + &y).collect())
    }

    /// The operator in the basis given by the columns of `g`.
    pub fn gauge(&self, g: &GaugeTransform) -> Result<Self> {
        if g.dim() != self.dim() {
            return Err(Error::DimensionMismatch("gauge of the wrong dimension".into()));
        }
        let ram = num_integer::lcm(self.ramification(), g.ramification());
        let op = self.lift_to(ram);
        let g = g.lift_to(ram);
        let inner = op.a.mul(g.matrix()).add(&g.matrix().derive(&op.der));
        DiffOperator::new(g.inverse_matrix().mul(&inner))
    }

    /// Diagonal block `[r0, r0 + len)`.
    pub fn block(&self, r0: usize, len: usize) -> Self {
        DiffOperator {
            a: self.a.submatrix(r0, r0, len, len),
            der: self.der.clone(),
        }
    }

    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.a.eq_to_precision(&other.a)
    }
}

/// `sum_k f_k D^k (v)` for `f = sum_k f_k x^k`.
pub fn apply_to_operator(f: &OrePoly, d: &DiffOperator, v: &[PuiseuxSeries]) -> Result<Vec<PuiseuxSeries>> {
    let ram = num_integer::lcm(f.ramification(), d.ramification());
    if f.derivation().lift_to(ram) != Derivation::delta_one(ram) {
        return Err(Error::Unsupported(
            "polynomial and operator use different derivations".into(),
        ));
    }
    let d = d.lift_to(ram);
    let mut w: Vec<PuiseuxSeries> = v.iter().map(|e| e.lift_to(ram)).collect();
    let mut acc = vec![PuiseuxSeries::zero(ram); d.dim()];
    for (k, c) in f.coeffs().iter().enumerate() {
        if k > 0 {
            w = d.apply(&w)?;
        }
        if c.is_exact_zero() {
            continue;
        }
        let c = c.lift_to(ram);
        acc = acc.iter().zip(&w).map(|(a, x)| a + &(&c * x)).collect();
    }
    Ok(acc)
}

/// The monic polynomial `f` of least degree with `f(D) v = 0`, from the
/// first linear dependency among `v, Dv, D^2 v, ...`.
pub fn minimal_diffpoly(d: &DiffOperator, v: &[PuiseuxSeries], limit_t: i64) -> Result<OrePoly> {
    if vec_is_zero(v) {
        return Err(Error::ZeroDivision);
    }
    let n = d.dim();
    let ram = d.ramification();
    let der = Derivation::delta_one(ram);
    // echelon rows: (pivot, vector with 1 at pivot, combination of krylov vectors)
    let mut basis: Vec<(usize, Vec<PuiseuxSeries>, Vec<PuiseuxSeries>)> = Vec::new();
    let mut w: Vec<PuiseuxSeries> = v.iter().map(|e| e.lift_to(ram)).collect();
    for k in 0..=n {
        let mut r = w.clone();
        let mut combo = vec![PuiseuxSeries::zero(ram); k + 1];
        combo[k] = PuiseuxSeries::one(ram);
        for (piv, bv, bc) in &basis {
            let factor = r[*piv].clone();
            if factor.is_exact_zero() {
                continue;
            }
            r = vec_sub(&r, &vec_scale(&factor, bv));
            r[*piv] = PuiseuxSeries::zero(ram);
            for (j, c) in bc.iter().enumerate() {
                combo[j] = &combo[j] - &(&factor * c);
            }
        }
        if vec_is_zero(&r) {
            return Ok(OrePoly::new(combo, der));
        }
        let piv = (0..n)
            .filter_map(|i| r[i].valuation().map(|val| (val, i)))
            .min()
            .map(|(_, i)| i)
            .unwrap();
        let inv = r[piv].invert(limit_t)?;
        let mut bv = vec_scale(&inv, &r);
        bv[piv] = PuiseuxSeries::one(ram);
        let bc = vec_scale(&inv, &combo);
        basis.push((piv, bv, bc));
        if k < n {
            w = d.apply(&w)?;
        }
    }
    Err(Error::PrecisionExhausted(
        "no dependency among n + 1 Krylov vectors".into(),
    ))
}

/// `D v = a v` with `v` non-zero.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub eigenvalue: PuiseuxSeries,
    pub eigenvector: Vec<PuiseuxSeries>,
}

impl EigenPair {
    /// Rescales so the entry of least valuation becomes exactly 1; the
    /// eigenvalue moves within its similarity class.
    pub fn normalized(&self, limit_t: i64) -> Result<(EigenPair, usize)> {
        let piv = self
            .eigenvector
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.valuation().map(|v| (v, i)))
            .min()
            .map(|(_, i)| i)
            .ok_or(Error::ZeroDivision)?;
        let p = &self.eigenvector[piv];
        let ram = p.ramification();
        let inv = p.invert(limit_t)?;
        let mut v = vec_scale(&inv, &self.eigenvector);
        v[piv] = PuiseuxSeries::one(ram);
        // D(c v) = (a + c^-1 d c) c v with c = 1/p, c^-1 d c = -d(p)/p
        let shift = &p.derive(&Derivation::delta_one(ram)) * &inv;
        let eigenvalue = &self.eigenvalue - &shift;
        Ok((
            EigenPair {
                eigenvalue,
                eigenvector: v,
            },
            piv,
        ))
    }
}

/// An eigenvalue with eigenvector, after the base change the factorisation
/// of a minimal polynomial requires. The result lives over the returned
/// ramification; lift `d` to it before checking.
pub fn eigen(d: &DiffOperator, limit_t: i64) -> Result<EigenPair> {
    let n = d.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty operator".into()));
    }
    let ram = d.ramification();
    let mut v = vec![PuiseuxSeries::zero(ram); n];
    v[0] = PuiseuxSeries::one(ram);
    let f = minimal_diffpoly(d, &v, limit_t)?;
    // the product can only agree with f as far as f is known, less the
    // loss from multiplying roots of negative valuation
    let steep = f.min_slope().map_or(0, |r| (-r).ceil().to_integer().max(0));
    let known = f.precision_t().map_or(limit_t, |p| p.floor().to_integer());
    let target = limit_t.min(known - f.degree().unwrap_or(0) as i64 * steep);
    if target < 1 {
        return Err(Error::PrecisionExhausted(format!(
            "minimal polynomial known only to t^{known}"
        )));
    }
    let lf = factor_linear(&f, target)?;
    let big_b = num_integer::lcm(lf.ramification, ram);
    let op = d.lift_to(big_b);
    let mut z: Vec<PuiseuxSeries> = v.iter().map(|e| e.lift_to(big_b)).collect();
    for lam in lf.roots.iter().rev() {
        let lam = lam.lift_to(big_b);
        let dz = op.apply(&z)?;
        let next: Vec<PuiseuxSeries> = dz.iter().zip(&z).map(|(a, b)| a - &(&lam * b)).collect();
        if vec_is_zero(&next) {
            return Ok(EigenPair {
                eigenvalue: lam,
                eigenvector: z,
            });
        }
        z = next;
    }
    Err(Error::PrecisionExhausted(
        "no eigenvector found along the factorisation".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orepoly::ore_mul;
    use crate::scalars::Scalar;

    fn t(c: i64, e: i64) -> PuiseuxSeries {
        PuiseuxSeries::monomial(Scalar::from_int(c), e, 1)
    }

    fn z() -> PuiseuxSeries {
        PuiseuxSeries::zero(1)
    }

    pub(super) fn l_k(k: i64) -> DiffOperator {
        DiffOperator::from_rows(vec![vec![z(), t(1, k)], vec![z(), z()]]).unwrap()
    }

    #[test]
    fn apply_examples() {
        for k in 1..=3 {
            let d = l_k(k);
            assert!(vec_is_zero(&d.apply(&[t(1, 0), z()]).unwrap()));
            assert!(vec_is_zero(&d.apply(&[t(-1, k), t(k, 0)]).unwrap()));
        }
        let d0 = DiffOperator::from_rows(vec![vec![z(), z()], vec![z(), z()]]).unwrap();
        assert!(vec_is_zero(&d0.apply(&[t(3, 0), t(-2, 0)]).unwrap()));
        assert!(matches!(d0.apply(&[t(1, 0)]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn gauge_examples() {
        let d = l_k(2);
        let id = GaugeTransform::identity(2, 1);
        assert!(d.gauge(&id).unwrap().eq_to_precision(&d));
        // scalar case: a -> a + c^-1 d(c)
        let a = DiffOperator::from_rows(vec![vec![t(1, -1)]]).unwrap();
        let c = &t(1, 2) + &t(1, 3);
        let g = GaugeTransform::from_matrix(Matrix::from_rows(vec![vec![c.clone()]]).unwrap(), 20).unwrap();
        let got = a.gauge(&g).unwrap();
        let want = &t(1, -1) + &(&c.invert(20).unwrap() * &c.derive(&Derivation::delta_one(1)));
        assert!(got.matrix().get(0, 0).eq_to_precision(&want));
    }

    #[test]
    fn gauge_composition_is_an_action() {
        let d = DiffOperator::from_rows(vec![vec![t(1, -1), t(2, 0)], vec![t(1, 1), t(3, 0)]]).unwrap();
        let g = GaugeTransform::elementary(2, 0, 1, &t(1, -1));
        let h = GaugeTransform::from_matrix(
            Matrix::from_rows(vec![vec![&t(1, 0) + &t(1, 1), z()], vec![t(2, 0), t(1, 0)]]).unwrap(),
            20,
        )
        .unwrap();
        let two_step = d.gauge(&g).unwrap().gauge(&h).unwrap();
        let one_step = d.gauge(&g.then(&h)).unwrap();
        assert!(two_step.eq_to_precision(&one_step));
    }

    #[test]
    fn minimal_diffpoly_examples() {
        // diagonal operator, v = e1 -> x - a1
        let d = DiffOperator::from_rows(vec![vec![t(1, -1), z()], vec![z(), t(2, -1)]]).unwrap();
        let f = minimal_diffpoly(&d, &[t(1, 0), z()], 20).unwrap();
        assert!(f.eq_to_precision(&OrePoly::linear(&t(1, -1), Derivation::delta_one(1))));
        // L_k with v = (0, 1): D v = (t^k, 0), D^2 v = (k t^k, 0), so f = x^2 - k x
        for k in 1..=3 {
            let v = [z(), t(1, 0)];
            let f = minimal_diffpoly(&l_k(k), &v, 20).unwrap();
            assert_eq!(f.degree(), Some(2));
            let want = OrePoly::monic_from_lower(&[t(-k, 0), z()], Derivation::delta_one(1));
            assert!(f.eq_to_precision(&want), "{f}");
            assert!(vec_is_zero(&apply_to_operator(&f, &l_k(k), &v).unwrap()));
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism() {
        let der = Derivation::delta_one(1);
        let f = OrePoly::linear(&(&t(1, -1) + &t(2, 0)), der.clone());
        let g = OrePoly::monic_from_lower(&[t(3, 1), t(-1, -2)], der);
        let d = DiffOperator::from_rows(vec![vec![t(1, -1), t(2, 0)], vec![t(1, 1), t(3, 0)]]).unwrap();
        let v = [&t(1, 0) + &t(1, 2), t(-1, -1)];
        let lhs = apply_to_operator(&ore_mul(&f, &g), &d, &v).unwrap();
        let rhs = apply_to_operator(&f, &d, &apply_to_operator(&g, &d, &v).unwrap()).unwrap();
        assert!(vec_is_zero(&vec_sub(&lhs, &rhs)));
    }

    #[test]
    fn eigen_examples() {
        let e = eigen(&l_k(2), 20).unwrap();
        assert!(crate::series::is_similar(&e.eigenvalue, &z()));
        let d = DiffOperator::from_rows(vec![vec![t(1, -1), t(1, 0)], vec![z(), t(2, -1)]]).unwrap();
        let e = eigen(&d, 20).unwrap();
        let check = vec_sub(
            &d.apply(&e.eigenvector).unwrap(),
            &vec_scale(&e.eigenvalue, &e.eigenvector),
        );
        assert!(vec_is_zero(&check));
        let one = DiffOperator::from_rows(vec![vec![&t(5, -3) + &t(1, 1)]]).unwrap();
        let e = eigen(&one, 20).unwrap();
        assert!(e.eigenvalue.eq_to_precision(&(&t(5, -3) + &t(1, 1))));
        let (nrm, piv) = e.normalized(20).unwrap();
        assert_eq!(piv, 0);
        assert!(vec_is_zero(&vec_sub(
            &one.apply(&nrm.eigenvector).unwrap(),
            &vec_scale(&nrm.eigenvalue, &nrm.eigenvector)
        )));
    }

    #[test]
    fn eigen_in_lower_triangular_case() {
        // eigenvector is not e1
        let d = DiffOperator::from_rows(vec![vec![t(1, -1), z()], vec![t(1, 0), t(3, -1)]]).unwrap();
        let e = eigen(&d, 20).unwrap();
        let check = vec_sub(
            &d.apply(&e.eigenvector).unwrap(),
            &vec_scale(&e.eigenvalue, &e.eigenvector),
        );
        assert!(vec_is_zero(&check));
        let (nrm, _) = e.normalized(20).unwrap();
        let check = vec_sub(
            &d.apply(&nrm.eigenvector).unwrap(),
            &vec_scale(&nrm.eigenvalue, &nrm.eigenvector),
        );
        assert!(vec_is_zero(&check));
    }
}
