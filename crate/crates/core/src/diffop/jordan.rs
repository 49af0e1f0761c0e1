use std::ops::Range;

use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::scalars::Scalar;
use crate::series::{is_similar, similarity_witness, Derivation, PuiseuxSeries};

use super::{eigen, DiffOperator, GaugeTransform, Matrix};

/// Solves `d(x) + c x = y` for `d = t d/dt` on `C((t^(1/b)))`, assuming `c`
/// is not similar to zero. Coefficients are determined order by order: by
/// the leading term of `c` when `v(c) < 0`, otherwise by `k/b + c_0`.
pub fn solve_first_order(c: &PuiseuxSeries, y: &PuiseuxSeries, limit_t: i64) -> Result<PuiseuxSeries> {
    let ram = c.ramification().lcm(&y.ramification());
    let (c, y) = (c.lift_to(ram), y.lift_to(ram));
    let mu = Scalar::from_ratio(1, ram as i64);
    let limit = limit_t * ram as i64;
    let cap = |bounds: &[Option<i64>]| bounds.iter().flatten().copied().min().unwrap();
    match c.valuation() {
        Some(w) if w < 0 => {
            let Some(vy) = y.valuation() else {
                let p = cap(&[y.precision().map(|p| p - w), Some(limit)]);
                return Ok(if y.is_exact() {
                    PuiseuxSeries::zero(ram)
                } else {
                    PuiseuxSeries::zero_to(ram, p)
                });
            };
            let vx = vy - w;
            let prec = cap(&[
                y.precision().map(|p| p - w),
                c.precision().map(|p| p - w + vx),
                Some(limit),
            ]);
            let cw_inv = c.coeff(w).inv().ok_or(Error::ZeroDivision)?;
            let mut xs: Vec<Scalar> = Vec::new();
            for k in vx..prec {
                let e = k + w;
                let mut acc = y.coeff(e);
                if e >= vx {
                    acc = &acc - &(&(&mu * &Scalar::from_int(e)) * &xs[(e - vx) as usize]);
                }
                for l in (w + 1)..=(e - vx) {
                    let cl = c.coeff(l);
                    if !cl.is_zero() {
                        acc = &acc - &(&cl * &xs[(e - l - vx) as usize]);
                    }
                }
                xs.push(&acc * &cw_inv);
            }
            Ok(PuiseuxSeries::new(ram, vx, xs, Some(prec)))
        }
        _ => {
            if c.precision().is_some_and(|p| p <= 0) {
                return Err(Error::PrecisionExhausted("constant term of coupling unknown".into()));
            }
            let c0 = c.coeff(0);
            let Some(vx) = y.valuation() else {
                let p = cap(&[y.precision(), Some(limit)]);
                return Ok(if y.is_exact() {
                    PuiseuxSeries::zero(ram)
                } else {
                    PuiseuxSeries::zero_to(ram, p)
                });
            };
            let prec = cap(&[y.precision(), c.precision().map(|p| p + vx), Some(limit)]);
            let mut xs: Vec<Scalar> = Vec::new();
            for e in vx..prec {
                let mut acc = y.coeff(e);
                for l in 1..=(e - vx) {
                    let cl = c.coeff(l);
                    if !cl.is_zero() {
                        acc = &acc - &(&cl * &xs[(e - l - vx) as usize]);
                    }
                }
                let div = &(&mu * &Scalar::from_int(e)) + &c0;
                if div.is_zero() {
                    return Err(Error::Resonance(format!(
                        "coupling constant {c0} resonates at order {e}/{ram}"
                    )));
                }
                xs.push(&acc / &div);
            }
            Ok(PuiseuxSeries::new(ram, vx, xs, Some(prec)))
        }
    }
}

/// Checks that every entry below the diagonal is zero to precision and
/// replaces it by an exact zero.
fn force_upper(a: &Matrix) -> Result<Matrix> {
    let mut out = a.clone();
    let ram = a.ramification();
    for i in 0..a.rows() {
        for j in 0..i {
            if !a.get(i, j).is_zero() {
                return Err(Error::PrecisionExhausted(format!(
                    "entry ({i}, {j}) should vanish but is {}",
                    a.get(i, j)
                )));
            }
            out.set(i, j, PuiseuxSeries::zero(ram));
        }
    }
    Ok(out)
}

/// An upper-triangular gauge form, built by peeling off one eigenvector at a
/// time and recursing on the quotient. The ramification may grow.
pub fn triangularize(d: &DiffOperator, limit_t: i64) -> Result<(DiffOperator, GaugeTransform)> {
    let n = d.dim();
    if n <= 1 {
        return Ok((d.clone(), GaugeTransform::identity(n, d.ramification())));
    }
    let first_column_done = (1..n).all(|i| d.matrix().get(i, 0).is_zero());
    let (t1, g1) = if first_column_done {
        (d.clone(), GaugeTransform::identity(n, d.ramification()))
    } else {
        let pair = eigen(d, limit_t)?;
        let (pair, piv) = pair.normalized(limit_t)?;
        let g = GaugeTransform::basis_extension(&pair.eigenvector, piv);
        (d.gauge(&g)?, g)
    };
    let mut a1 = t1.matrix().clone();
    for i in 1..n {
        if !a1.get(i, 0).is_zero() {
            return Err(Error::PrecisionExhausted(
                "eigenvector not invariant to precision".into(),
            ));
        }
        a1.set(i, 0, PuiseuxSeries::zero(a1.ramification()));
    }
    let t1 = DiffOperator::new(a1)?;
    let (t_rest, g_rest) = triangularize(&t1.block(1, n - 1), limit_t)?;
    let b = t1.ramification().lcm(&g_rest.ramification());
    let g2 = g_rest.lift_to(b).embed(1, n);
    let t = t1.lift_to(b).gauge(&g2)?;
    let mut a = force_upper(t.matrix())?;
    a.set_block(1, 1, &force_upper(t_rest.lift_to(b).matrix())?);
    Ok((DiffOperator::new(a)?, g1.lift_to(b).then(&g2)))
}

/// Block-diagonal form with one block per similarity class of eigenvalues.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub op: DiffOperator,
    pub gauge: GaugeTransform,
    /// Index ranges of the blocks in the new basis.
    pub blocks: Vec<Range<usize>>,
    /// For each block, the indices of the input basis it came from.
    pub classes: Vec<Vec<usize>>,
}

/// Decouples the similarity classes of the diagonal of an upper-triangular
/// operator. Entries `(i, j)` between different classes are removed with
/// gauges `1 + x E_ij`, where `d(x) + (a_i - a_j) x = -A_ij`, working through
/// columns left to right and rows bottom to top so that cleared entries stay
/// cleared. A final permutation makes the classes contiguous.
pub fn split_eigenspaces(d: &DiffOperator, limit_t: i64) -> Result<Splitting> {
    if !d.matrix().is_upper_triangular() {
        return Err(Error::Unsupported(
            "splitting needs an upper-triangular operator".into(),
        ));
    }
    let n = d.dim();
    let ram = d.ramification();
    let diag: Vec<PuiseuxSeries> = (0..n).map(|i| d.matrix().get(i, i).clone()).collect();
    let mut class_of: Vec<usize> = Vec::with_capacity(n);
    let mut leaders: Vec<usize> = Vec::new();
    for (i, a) in diag.iter().enumerate() {
        match leaders.iter().position(|&l| is_similar(&diag[l], a)) {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(leaders.len());
                leaders.push(i);
            }
        }
    }
    let mut op = d.clone();
    let mut gauge = GaugeTransform::identity(n, ram);
    for j in 0..n {
        for i in (0..j).rev() {
            if class_of[i] == class_of[j] {
                continue;
            }
            let aij = op.matrix().get(i, j).clone();
            if aij.is_exact_zero() {
                continue;
            }
            if !aij.is_zero() {
                let c = &diag[i] - &diag[j];
                let x = solve_first_order(&c, &-&aij, limit_t)?;
                let g = GaugeTransform::elementary(n, i, j, &x);
                op = op.gauge(&g)?;
                gauge = gauge.then(&g);
                if !op.matrix().get(i, j).is_zero() {
                    return Err(Error::Resonance(format!("entry ({i}, {j}) survived decoupling")));
                }
            }
            let mut a = op.matrix().clone();
            a.set(i, j, PuiseuxSeries::zero(ram));
            op = DiffOperator::new(a)?;
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); leaders.len()];
    for (i, &c) in class_of.iter().enumerate() {
        classes[c].push(i);
    }
    let perm: Vec<usize> = classes.iter().flatten().copied().collect();
    let p = GaugeTransform::permutation(&perm, ram);
    let op = op.gauge(&p)?;
    let mut blocks = Vec::new();
    let mut start = 0;
    for c in &classes {
        blocks.push(start..start + c.len());
        start += c.len();
    }
    // cross-block entries are exact zeros after the permutation; keep them so
    let mut a = op.matrix().clone();
    for (bi, bl) in blocks.iter().enumerate() {
        for (bj, bk) in blocks.iter().enumerate() {
            if bi == bj {
                continue;
            }
            for i in bl.clone() {
                for j in bk.clone() {
                    if !a.get(i, j).is_zero() {
                        return Err(Error::Resonance(format!("coupling ({i}, {j}) between classes remains")));
                    }
                    a.set(i, j, PuiseuxSeries::zero(ram));
                }
            }
        }
    }
    Ok(Splitting {
        op: DiffOperator::new(a)?,
        gauge: gauge.then(&p),
        blocks,
        classes,
    })
}

fn constant_term(e: &PuiseuxSeries) -> Result<Scalar> {
    if e.precision().is_some_and(|p| p <= 0) {
        return Err(Error::PrecisionExhausted(format!("constant term of {e} unknown")));
    }
    Ok(e.coeff(0))
}

/// For an operator whose eigenvalues are all similar to zero, a gauge to
/// `d + N` with `N` constant, strictly upper triangular and nilpotent.
/// Triangular input with zero diagonal is used as is; otherwise the
/// operator is triangularized and its diagonal gauged to exact zeros first.
pub fn unipotent_normal_form(d: &DiffOperator, limit_t: i64) -> Result<(Vec<Vec<Scalar>>, GaugeTransform)> {
    let n = d.dim();
    let zero_diag = |op: &DiffOperator| (0..n).all(|i| op.matrix().get(i, i).is_zero());
    let (mut op, mut gauge) = if d.matrix().is_upper_triangular() && zero_diag(d) {
        (d.clone(), GaugeTransform::identity(n, d.ramification()))
    } else {
        let (t, g) = triangularize(d, limit_t)?;
        let ram = t.ramification();
        let zero = PuiseuxSeries::zero(ram);
        let mut cs = Vec::with_capacity(n);
        for i in 0..n {
            let a = t.matrix().get(i, i);
            let c = similarity_witness(&zero, a, limit_t)
                .ok_or_else(|| Error::NotUnipotent(format!("eigenvalue {a} is not similar to 0")))?;
            cs.push(c);
        }
        let gd = GaugeTransform::diagonal(&cs, limit_t)?;
        (t.gauge(&gd)?, g.then(&gd))
    };
    let ram = op.ramification();
    let der = Derivation::delta_one(ram);
    let mut a = op.matrix().clone();
    for i in 0..n {
        if !a.get(i, i).is_zero() {
            return Err(Error::NotUnipotent(format!(
                "diagonal entry {} is not zero",
                a.get(i, i)
            )));
        }
        a.set(i, i, PuiseuxSeries::zero(ram));
    }
    op = DiffOperator::new(force_upper(&a)?)?;
    for j in 0..n {
        for i in (0..j).rev() {
            let e = op.matrix().get(i, j).clone();
            let tail = &e - &PuiseuxSeries::constant(constant_term(&e)?, ram);
            if tail.is_zero() {
                continue;
            }
            let x = -&tail.integrate(&der, 1)?;
            let g = GaugeTransform::elementary(n, i, j, &x);
            op = op.gauge(&g)?;
            gauge = gauge.then(&g);
        }
    }
    let mut nil = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let e = op.matrix().get(i, j);
            let c = constant_term(e)?;
            let rest = e - &PuiseuxSeries::constant(c.clone(), ram);
            if !rest.is_zero() || (j <= i && !c.is_zero()) {
                return Err(Error::NotUnipotent(format!(
                    "entry ({i}, {j}) = {e} is not a constant above the diagonal"
                )));
            }
            nil[i][j] = c;
        }
    }
    Ok((nil, gauge))
}

/// Rank of a matrix over C by elimination.
fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).max_by(|&a, &b| {
            m[a][c]
                .to_complex()
                .norm()
                .partial_cmp(&m[b][c].to_complex().norm())
                .unwrap()
        }) else {
            break;
        };
        if m[p][c].is_zero() {
            continue;
        }
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] * &inv;
                for k in c..cols {
                    let v = &m[i][k] - &(&f * &m[r][k]);
                    m[i][k] = v;
                }
            }
        }
        r += 1;
    }
    r
}

fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Scalar::zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
                .collect()
        })
        .collect()
}

/// Jordan type of a constant nilpotent matrix: block sizes, largest first.
pub fn nilpotent_partition(n: &[Vec<Scalar>]) -> Vec<usize> {
    let dim = n.len();
    let mut ranks = vec![dim];
    let mut p = n.to_vec();
    for _ in 0..dim {
        ranks.push(rank(&p));
        p = mat_mul(&p, n);
    }
    // number of blocks of size >= k is ranks[k-1] - ranks[k]
    let at_least: Vec<usize> = (1..=dim).map(|k| ranks[k - 1] - ranks[k]).collect();
    let mut parts = Vec::new();
    for k in (1..=dim).rev() {
        let bigger = if k < dim { at_least[k] } else { 0 };
        for _ in 0..(at_least[k - 1] - bigger) {
            parts.push(k);
        }
    }
    parts
}

/// `D = S + N` in a basis over `C((t^(1/b)))`: the gauge takes the input to
/// `d + diag(eigenvalues) + N` with `N` constant and nilpotent, and `N`
/// vanishes between blocks of different eigenvalue classes.
#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    pub ramification: u32,
    /// One canonical similarity representative per basis vector.
    pub eigenvalues: Vec<PuiseuxSeries>,
    pub nilpotent: Vec<Vec<Scalar>>,
    pub gauge: GaugeTransform,
    pub blocks: Vec<Range<usize>>,
    /// Absolute `t`-precision of the reconstruction check.
    pub precision: Option<Rational64>,
    /// The semisimple and nilpotent parts are defined over the input field.
    pub descends: bool,
}

impl JordanDecomposition {
    pub fn nilpotent_matrix(&self) -> Matrix {
        Matrix::from_scalars(&self.nilpotent, self.ramification)
    }

    /// `d + diag(eigenvalues) + N`
    pub fn normal_form(&self) -> DiffOperator {
        let diag = Matrix::diagonal(&self.eigenvalues).lift_to(self.ramification);
        DiffOperator::new(diag.add(&self.nilpotent_matrix())).expect("square")
    }

    pub fn jordan_type(&self) -> Vec<usize> {
        nilpotent_partition(&self.nilpotent)
    }

    /// `(A - C, C)` with `C = g N g^-1`: the matrices of the semisimple and
    /// nilpotent parts in the input basis.
    pub fn parts_in_input_basis(&self, original: &DiffOperator) -> (Matrix, Matrix) {
        let g = self.gauge.matrix();
        let c = g.mul(&self.nilpotent_matrix()).mul(self.gauge.inverse_matrix());
        let a = original.matrix().lift_to(self.ramification);
        (a.sub(&c), c)
    }
}

/// The decomposition descends when the matrices of `S` and `N` in the input
/// basis are fixed by `s -> zeta s`, i.e. involve only the input's powers of `t`.
pub fn descent_check(result: &JordanDecomposition, original: &DiffOperator) -> bool {
    let b0 = original.ramification();
    if result.ramification % b0 != 0 {
        return false;
    }
    let q = (result.ramification / b0) as i64;
    let (s, c) = result.parts_in_input_basis(original);
    [s, c]
        .iter()
        .all(|m| m.entries().iter().all(|e| e.terms().all(|(k, _)| k % q == 0)))
}

/// Jordan decomposition with reconstruction precision at least `prec`.
pub fn jordan(d: &DiffOperator, prec: i64) -> Result<JordanDecomposition> {
    let n = d.dim() as i64;
    let depth = d.matrix().valuation_t().map_or(0, |v| (-v).ceil().to_integer().max(0));
    let mut work = prec + 8 + 2 * n * depth;
    let mut last_err = None;
    for _ in 0..4 {
        match jordan_at(d, work) {
            Ok(jd) if jd.precision.map_or(true, |p| p >= Rational64::from(prec)) => return Ok(jd),
            Ok(jd) => {
                last_err = Some(Error::PrecisionExhausted(format!(
                    "reconstruction precision {} below {prec}",
                    jd.precision.unwrap()
                )))
            }
            Err(e @ Error::PrecisionExhausted(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        work *= 2;
    }
    Err(last_err.unwrap())
}

fn jordan_at(d: &DiffOperator, work: i64) -> Result<JordanDecomposition> {
    let n = d.dim();
    let (t, g1) = triangularize(d, work)?;
    let sp = split_eigenspaces(&t, work)?;
    let ram = sp.op.ramification();
    let mut reps = Vec::with_capacity(n);
    let mut cs = Vec::with_capacity(n);
    for bl in &sp.blocks {
        let (rep, _) = sp.op.matrix().get(bl.start, bl.start).similarity_representative()?;
        for i in bl.clone() {
            let a = sp.op.matrix().get(i, i);
            let c = similarity_witness(&rep, a, work)
                .ok_or_else(|| Error::Resonance(format!("{a} left its similarity class")))?;
            reps.push(rep.lift_to(ram));
            cs.push(c);
        }
    }
    let g3 = GaugeTransform::diagonal(&cs, work)?;
    let op3 = sp.op.gauge(&g3)?;
    let mut gauge = g1.then(&sp.gauge).then(&g3);
    let mut nil = vec![vec![Scalar::zero(); n]; n];
    for bl in &sp.blocks {
        let len = bl.len();
        let mut u = op3.block(bl.start, len).matrix().clone();
        for k in 0..len {
            let i = bl.start + k;
            if !(u.get(k, k) - &reps[i]).is_zero() {
                return Err(Error::PrecisionExhausted(
                    "diagonal gauge missed the representative".into(),
                ));
            }
            u.set(k, k, PuiseuxSeries::zero(ram));
        }
        let (nb, gb) = unipotent_normal_form(&DiffOperator::new(u)?, work)?;
        for (k, row) in nb.iter().enumerate() {
            nil[bl.start + k][bl.clone()].clone_from_slice(row);
        }
        gauge = gauge.then(&gb.embed(bl.start, n));
    }
    let ram = gauge.ramification().lcm(&ram);
    let mut jd = JordanDecomposition {
        ramification: ram,
        eigenvalues: reps.iter().map(|r| r.lift_to(ram)).collect(),
        nilpotent: nil,
        gauge: gauge.lift_to(ram),
        blocks: sp.blocks.clone(),
        precision: None,
        descends: false,
    };
    let recon = d.lift_to(ram).gauge(&jd.gauge)?;
    if !recon.eq_to_precision(&jd.normal_form()) {
        return Err(Error::PrecisionExhausted(
            "reconstruction disagrees with the normal form".into(),
        ));
    }
    jd.precision = recon.matrix().precision_t();
    jd.descends = descent_check(&jd, d);
    Ok(jd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(c: i64, e: i64) -> PuiseuxSeries {
        PuiseuxSeries::monomial(Scalar::from_int(c), e, 1)
    }

    fn z() -> PuiseuxSeries {
        PuiseuxSeries::zero(1)
    }

    fn op(rows: Vec<Vec<PuiseuxSeries>>) -> DiffOperator {
        DiffOperator::from_rows(rows).unwrap()
    }

    fn l_k(k: i64) -> DiffOperator {
        op(vec![vec![z(), t(1, k)], vec![z(), z()]])
    }

    fn s_k(k: i64) -> DiffOperator {
        op(vec![vec![t(1, 0), z()], vec![t(1, 0), &t(1, 0) + &t(1, k)]])
    }

    #[test]
    fn first_order_solver_satisfies_equation() {
        let d = Derivation::delta_one(1);
        for (c, y) in [
            (t(1, -2), &t(1, 0) + &t(3, 1)),
            (&t(1, 0).scale(&Scalar::from_ratio(1, 2)) + &t(1, 1), t(1, -1)),
            (&t(2, -1) + &t(1, 0), &t(1, -3) + &t(1, 2)),
        ] {
            let x = solve_first_order(&c, &y, 30).unwrap();
            let lhs = &x.derive(&d) + &(&c * &x);
            assert!(lhs.eq_to_precision(&y), "c = {c}");
            assert!(lhs.precision().unwrap() >= 20);
        }
        assert!(matches!(
            solve_first_order(&t(3, 0), &t(1, -3), 10),
            Err(Error::Resonance(_))
        ));
    }

    #[test]
    fn triangularize_keeps_triangular_input() {
        let d = op(vec![vec![t(1, -1), t(1, 0)], vec![z(), t(2, 0)]]);
        let (tr, g) = triangularize(&d, 20).unwrap();
        assert!(tr.eq_to_precision(&d));
        assert!(g.matrix().eq_to_precision(&Matrix::identity(2, 1)));
    }

    #[test]
    fn triangularize_lower_form() {
        let d = op(vec![vec![z(), z()], vec![t(1, 0), z()]]);
        let (tr, g) = triangularize(&d, 20).unwrap();
        assert!(tr.matrix().is_upper_triangular());
        assert!(d.gauge(&g).unwrap().eq_to_precision(&tr));
        for i in 0..2 {
            assert!(is_similar(tr.matrix().get(i, i), &z()));
        }
    }

    #[test]
    fn split_examples() {
        let d = op(vec![vec![z(), t(1, 0)], vec![z(), t(1, -1)]]);
        let sp = split_eigenspaces(&d, 20).unwrap();
        assert_eq!(sp.blocks.len(), 2);
        assert!(sp.op.matrix().get(0, 1).is_exact_zero());
        assert!(d.gauge(&sp.gauge).unwrap().eq_to_precision(&sp.op));
        let d = op(vec![vec![z(), t(1, 0)], vec![z(), t(3, 0)]]);
        let sp = split_eigenspaces(&d, 20).unwrap();
        assert_eq!(sp.blocks, vec![0..2]);
        let d = op(vec![vec![t(1, -2), z()], vec![z(), t(1, -1)]]);
        let sp = split_eigenspaces(&d, 20).unwrap();
        assert!(sp.gauge.matrix().eq_to_precision(&Matrix::identity(2, 1)));
    }

    #[test]
    fn split_groups_interleaved_classes() {
        let d = op(vec![
            vec![z(), t(1, 0), t(2, 1)],
            vec![z(), t(1, -1), t(1, 0)],
            vec![z(), z(), t(1, 0)],
        ]);
        let sp = split_eigenspaces(&d, 20).unwrap();
        assert_eq!(sp.classes, vec![vec![0, 2], vec![1]]);
        assert_eq!(sp.blocks, vec![0..2, 2..3]);
        assert!(d.gauge(&sp.gauge).unwrap().eq_to_precision(&sp.op));
    }

    #[test]
    fn unipotent_examples() {
        let j = op(vec![vec![z(), t(1, 0)], vec![z(), z()]]);
        let (n, g) = unipotent_normal_form(&j, 20).unwrap();
        assert_eq!(n[0][1], Scalar::one());
        assert!(g.matrix().eq_to_precision(&Matrix::identity(2, 1)));
        let d0 = op(vec![vec![z(), z()], vec![z(), z()]]);
        let (n, _) = unipotent_normal_form(&d0, 20).unwrap();
        assert_eq!(nilpotent_partition(&n), vec![1, 1]);
        for k in 1..=3 {
            let (n, g) = unipotent_normal_form(&l_k(k), 20).unwrap();
            assert_eq!(nilpotent_partition(&n), vec![1, 1]);
            // second column proportional to (-t^k, k)
            let col = g.matrix().column(1);
            let scaled = [&col[0] * &t(k, 0), &col[1] * &t(k, 0)];
            assert!(scaled[0].eq_to_precision(&t(-1, k)));
            assert!(scaled[1].eq_to_precision(&t(k, 0)));
        }
        let bad = op(vec![vec![t(1, -1)]]);
        assert!(matches!(unipotent_normal_form(&bad, 10), Err(Error::NotUnipotent(_))));
    }

    #[test]
    fn partition_of_constant_nilpotents() {
        let o = Scalar::one;
        let zz = Scalar::zero;
        assert_eq!(nilpotent_partition(&[vec![zz(), o()], vec![zz(), zz()]]), vec![2]);
        let n3 = vec![vec![zz(), o(), zz()], vec![zz(), zz(), o()], vec![zz(), zz(), zz()]];
        assert_eq!(nilpotent_partition(&n3), vec![3]);
        let n21 = vec![vec![zz(), zz(), o()], vec![zz(), zz(), zz()], vec![zz(), zz(), zz()]];
        assert_eq!(nilpotent_partition(&n21), vec![2, 1]);
    }

    #[test]
    fn jordan_of_diagonal() {
        let d = op(vec![vec![&t(1, -1) + &t(2, 0), z()], vec![z(), t(3, -2)]]);
        let jd = jordan(&d, 16).unwrap();
        assert_eq!(jd.jordan_type(), vec![1, 1]);
        assert!(is_similar(&jd.eigenvalues[0], &(&t(1, -1) + &t(2, 0))));
        assert!(jd.descends);
    }

    #[test]
    fn jordan_of_l_k_is_semisimple() {
        for k in 1..=3 {
            let jd = jordan(&l_k(k), 16).unwrap();
            assert_eq!(jd.jordan_type(), vec![1, 1]);
            assert!(jd.eigenvalues.iter().all(|a| is_similar(a, &z())));
        }
    }

    #[test]
    fn jordan_of_s_k_has_nilpotent_part() {
        for k in 1..=2 {
            let jd = jordan(&s_k(k), 16).unwrap();
            assert!(jd.eigenvalues.iter().all(|a| is_similar(a, &t(1, 0))), "k = {k}");
            assert_eq!(jd.jordan_type(), vec![2], "k = {k}");
        }
    }

    #[test]
    fn s_zero_is_semisimple() {
        // d + [[1,0],[1,2]] has eigenvectors (1,-1) and (0,1) with eigenvalues 1 and 2,
        // which are similar, so the nilpotent part vanishes
        let d = s_k(0);
        let v1 = [t(1, 0), t(-1, 0)];
        let v2 = [z(), t(1, 0)];
        let dv1 = d.apply(&v1).unwrap();
        let dv2 = d.apply(&v2).unwrap();
        assert!(super::super::vec_is_zero(&super::super::vec_sub(&dv1, &v1)));
        assert!(super::super::vec_is_zero(&super::super::vec_sub(
            &dv2,
            &super::super::vec_scale(&t(2, 0), &v2)
        )));
        assert!(is_similar(&t(1, 0), &t(2, 0)));
        let jd = jordan(&d, 16).unwrap();
        assert_eq!(jd.jordan_type(), vec![1, 1]);
    }

    #[test]
    fn jordan_of_ramified_companion_descends() {
        // companion operator of x^2 + t^-1
        let d = op(vec![vec![z(), t(-1, -1)], vec![t(1, 0), z()]]);
        let jd = jordan(&d, 12).unwrap();
        assert_eq!(jd.ramification, 2);
        assert_eq!(jd.jordan_type(), vec![1, 1]);
        assert!(jd.descends);
    }
}
