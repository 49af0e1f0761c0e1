//! Univariate commutative polynomials over C, used for reductions mod t.

use std::fmt;

use num_complex::Complex;

use super::scalar::{epsilon, re_cmp, Backend, GaussRat, Scalar};
use crate::error::{Error, Result};

/// Coefficients in ascending degree; the leading coefficient is non-zero
/// unless the polynomial is zero (empty coefficient list).
#[derive(Clone, Debug, PartialEq)]
pub struct CPolynomial {
    coeffs: Vec<Scalar>,
}

impl CPolynomial {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        CPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        CPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        CPolynomial::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        CPolynomial::new(vec![c])
    }

    /// `x - root`
    pub fn linear(root: &Scalar) -> Self {
        CPolynomial::new(vec![-root, Scalar::one()])
    }

    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a Scalar>) -> Self {
        roots
            .into_iter()
            .fold(CPolynomial::one(), |acc, r| acc.mul(&CPolynomial::linear(r)))
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(Scalar::is_one)
    }

    pub fn backend(&self) -> Backend {
        if self.coeffs.iter().all(Scalar::is_exact) {
            Backend::Exact
        } else {
            Backend::Float
        }
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) => {
                let inv = lc.inv().expect("non-zero leading coefficient");
                CPolynomial::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        CPolynomial::new((0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        CPolynomial::new((0..n).map(|k| &self.coeff(k) - &other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        CPolynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return CPolynomial::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        CPolynomial::new(out)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc_inv = divisor.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (CPolynomial::zero(), self.clone());
        }
        let mut quot = vec![Scalar::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = &rem[k] * &lc_inv;
            if c.is_zero() {
                rem[k] = Scalar::zero();
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] = &rem[idx] - &(&c * dc);
            }
            rem[k] = Scalar::zero();
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (CPolynomial::new(quot), CPolynomial::new(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (g, _, _) = self.xgcd(other);
        g
    }

    /// Extended Euclid: returns monic `g` and `(a, b)` with `a*self + b*other = g`.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (CPolynomial::one(), CPolynomial::zero());
        let (mut t0, mut t1) = (CPolynomial::zero(), CPolynomial::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = lc.inv().unwrap();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    pub fn derivative(&self) -> Self {
        CPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Scalar::from_int(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Taylor shift: `p(x + c)`.
    pub fn shift(&self, c: &Scalar) -> Self {
        let mut out = self.coeffs.clone();
        let n = out.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let add = c * &out[j + 1];
                out[j] = &out[j] + &add;
            }
        }
        CPolynomial::new(out)
    }

    /// Yun's square-free decomposition: returns `(a_i, i)` with `p = lc * prod a_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<(CPolynomial, usize)> {
        let mut out = Vec::new();
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return out;
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_rem(&a0).0;
        let mut c = fp.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
}

/// Roots of a non-constant polynomial, with multiplicity.
///
/// The exact backend returns only Gaussian-rational roots: linear and
/// quadratic square-free parts are solved in closed form, higher degrees are
/// located numerically and then confirmed by exact evaluation. A root that
/// cannot be confirmed yields `IrreducibleOverBackend`.
pub fn roots_of(p: &CPolynomial) -> Result<Vec<Scalar>> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Err(Error::IrreducibleOverBackend("constant polynomial has no roots".into()));
    }
    let mut roots = match p.backend() {
        Backend::Exact => exact_roots(p)?,
        Backend::Float => float_roots(p),
    };
    roots.sort_by(re_cmp);
    Ok(roots)
}

fn exact_roots(p: &CPolynomial) -> Result<Vec<Scalar>> {
    let mut roots = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for r in squarefree_exact_roots(&factor)? {
            roots.extend(std::iter::repeat(r).take(mult));
        }
    }
    Ok(roots)
}

fn squarefree_exact_roots(p: &CPolynomial) -> Result<Vec<Scalar>> {
    let p = p.monic();
    match p.degree() {
        Some(1) => Ok(vec![-p.coeff(0)]),
        Some(2) => {
            let b = p.coeff(1);
            let c = p.coeff(0);
            let disc = &(&b * &b) - &(&Scalar::from_int(4) * &c);
            let sq = gaussian_sqrt(&disc)
                .ok_or_else(|| Error::IrreducibleOverBackend(format!("discriminant {disc} is not a square in Q(i)")))?;
            let half = Scalar::from_ratio(1, 2);
            Ok(vec![&(&-&b + &sq) * &half, &(&-&b - &sq) * &half])
        }
        _ => {
            let mut rest = p.clone();
            let mut roots = Vec::new();
            for approx in aberth(&p.coeffs.iter().map(Scalar::to_complex).collect::<Vec<_>>()) {
                let cand = rationalize(approx);
                let Some(cand) = cand else { continue };
                if rest.degree().unwrap_or(0) > 0 && rest.eval(&cand).is_zero() {
                    rest = rest.div_rem(&CPolynomial::linear(&cand)).0;
                    roots.push(cand);
                }
            }
            if rest.degree().unwrap_or(0) > 0 {
                return Err(Error::IrreducibleOverBackend(format!(
                    "factor of degree {} has no Gaussian-rational roots",
                    rest.degree().unwrap()
                )));
            }
            Ok(roots)
        }
    }
}

/// Square root in Q(i), if one exists.
pub fn gaussian_sqrt(z: &Scalar) -> Option<Scalar> {
    z.as_exact()?.sqrt().map(Scalar::Exact)
}

fn rationalize_f64(x: f64) -> Option<(i128, i128)> {
    const MAX_DEN: i64 = 1 << 24;
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-9 * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > MAX_DEN as i128 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = v - a;
        if frac.abs() < 1e-300 {
            break;
        }
        v = 1.0 / frac;
    }
    None
}

fn rationalize(z: Complex<f64>) -> Option<Scalar> {
    let (a, b) = rationalize_f64(z.re)?;
    let (c, d) = rationalize_f64(z.im)?;
    Some(Scalar::Exact(GaussRat::from_parts(a, b, c, d)))
}

fn float_roots(p: &CPolynomial) -> Vec<Scalar> {
    let coeffs: Vec<Complex<f64>> = p.coeffs.iter().map(Scalar::to_complex).collect();
    let raw = aberth(&coeffs);
    // multiple roots come out as tight clusters; averaging restores accuracy
    let scale = raw.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = epsilon().sqrt() * 10.0 * scale;
    let mut used = vec![false; raw.len()];
    let mut out = Vec::with_capacity(raw.len());
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        let cluster: Vec<usize> = (i..raw.len())
            .filter(|&j| !used[j] && (raw[j] - raw[i]).norm() <= tol)
            .collect();
        let mut mean = cluster.iter().map(|&j| raw[j]).sum::<Complex<f64>>() / cluster.len() as f64;
        // a k-fold root is a simple root of the (k-1)-th derivative
        let mut dk = coeffs.clone();
        for _ in 1..cluster.len() {
            dk = (1..dk.len()).map(|k| dk[k] * k as f64).collect();
        }
        mean = newton_polish(&dk, mean);
        for &j in &cluster {
            used[j] = true;
            out.push(Scalar::Float(mean));
        }
    }
    out
}

fn newton_polish(coeffs: &[Complex<f64>], mut z: Complex<f64>) -> Complex<f64> {
    for _ in 0..50 {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Aberth–Ehrlich simultaneous iteration on ascending coefficients.
fn aberth(coeffs: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = coeffs.len() - 1;
    let lc = coeffs[n];
    let monic: Vec<Complex<f64>> = coeffs.iter().map(|c| c / lc).collect();
    if n == 1 {
        return vec![-monic[0]];
    }
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let eval = |x: Complex<f64>| {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for c in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..1000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Coprimality test for the differential Hensel step.
///
/// With `m = 1` the reduced factors must satisfy `gcd(g0(x + n mu), h0(x)) = 1`
/// for every positive integer `n`, i.e. no root of `h0` equals a root of `g0`
/// minus a positive multiple of `mu`. With `m > 1` plain coprimality is required.
pub fn gcd_shifted_coprime(g0: &CPolynomial, h0: &CPolynomial, m: i64, mu: &Scalar) -> Result<bool> {
    if g0.degree().unwrap_or(0) == 0 || h0.degree().unwrap_or(0) == 0 {
        return Ok(true);
    }
    if m > 1 {
        return Ok(g0.gcd(h0).degree() == Some(0));
    }
    let gr = roots_of(g0)?;
    let hr = roots_of(h0)?;
    for a in &gr {
        for b in &hr {
            if let Some(k) = (a - b).integer_multiple_of(mu) {
                if k > 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

impl fmt::Display for CPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = if c.is_compound() {
                format!("({c})")
            } else {
                c.to_string()
            };
            match k {
                0 => write!(f, "{cs}")?,
                _ => {
                    let xs = if k == 1 { "x".to_string() } else { format!("x^{k}") };
                    if c.is_one() {
                        write!(f, "{xs}")?
                    } else {
                        write!(f, "{cs}*{xs}")?
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> CPolynomial {
        CPolynomial::new(c.iter().map(|&k| Scalar::from_int(k)).collect())
    }

    #[test]
    fn roots_double_root() {
        // x^2 + 4x + 4
        let r = roots_of(&poly(&[4, 4, 1])).unwrap();
        assert_eq!(r, vec![Scalar::from_int(-2), Scalar::from_int(-2)]);
    }

    #[test]
    fn roots_linear() {
        assert_eq!(roots_of(&poly(&[-5, 1])).unwrap(), vec![Scalar::from_int(5)]);
    }

    #[test]
    fn roots_of_x2_plus_1_reexpand() {
        let p = poly(&[1, 0, 1]);
        let r = roots_of(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(CPolynomial::from_roots(&r), p);
        assert!(r.contains(&Scalar::i()) && r.contains(&-Scalar::i()));
    }

    #[test]
    fn roots_cubic_numeric_then_exact() {
        let roots = [Scalar::from_ratio(1, 3), Scalar::from_int(-2), Scalar::i()];
        let p = CPolynomial::from_roots(&roots);
        let r = roots_of(&p).unwrap();
        assert_eq!(CPolynomial::from_roots(&r), p);
        assert!(r.iter().all(Scalar::is_exact));
    }

    #[test]
    fn irreducible_over_gaussian_rationals() {
        let err = roots_of(&poly(&[-2, 0, 1])).unwrap_err();
        assert!(matches!(err, Error::IrreducibleOverBackend(_)));
        let err = roots_of(&poly(&[-2, 0, 0, 1])).unwrap_err();
        assert!(matches!(err, Error::IrreducibleOverBackend(_)));
    }

    #[test]
    fn float_backend_roots() {
        let p = CPolynomial::new(vec![
            Scalar::float(2.0, 0.0),
            Scalar::float(0.0, 0.0),
            Scalar::float(-1.0, 0.0),
        ]);
        let r = roots_of(&p).unwrap();
        assert!((r[0].re_f64() + 2f64.sqrt()).abs() < 1e-12);
        assert!((r[1].re_f64() - 2f64.sqrt()).abs() < 1e-12);
        // triple root clustered
        let q = CPolynomial::from_roots(&vec![Scalar::float(1.5, 0.0); 3]);
        for z in roots_of(&q).unwrap() {
            assert!((z.to_complex() - Complex::new(1.5, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn gaussian_sqrt_examples() {
        let z = &Scalar::from_int(3) + &(&Scalar::from_int(4) * &Scalar::i());
        let s = gaussian_sqrt(&z).unwrap();
        assert_eq!(&s * &s, z);
        assert!(gaussian_sqrt(&Scalar::from_int(2)).is_none());
    }

    #[test]
    fn xgcd_bezout() {
        let a = poly(&[-1, 0, 1]);
        let b = poly(&[3, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(g, CPolynomial::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn taylor_shift() {
        // (x+1)^2 = x^2 + 2x + 1 shifted from x^2
        assert_eq!(poly(&[0, 0, 1]).shift(&Scalar::one()), poly(&[1, 2, 1]));
    }

    #[test]
    fn shifted_coprimality() {
        let mu = Scalar::one();
        // g0 = h0 = x, m = 1: roots 0 and -n never coincide
        assert!(gcd_shifted_coprime(&poly(&[0, 1]), &poly(&[0, 1]), 1, &mu).unwrap());
        assert!(!gcd_shifted_coprime(&poly(&[0, 1]), &poly(&[0, 1]), 2, &mu).unwrap());
        // root of h0 is root of g0 minus 2
        assert!(!gcd_shifted_coprime(&poly(&[0, 1]), &poly(&[2, 1]), 1, &mu).unwrap());
        assert!(gcd_shifted_coprime(&poly(&[2, 1]), &poly(&[0, 1]), 1, &mu).unwrap());
    }
}
