//! Differential polynomials `f = sum a_k x^k` over a Puiseux-series field,
//! multiplied by the rule `x a = a x + d(a)`.
//!
//! Coefficients are kept on the left of the powers of `x` and stored in
//! ascending degree. `a(i)` gives the coefficient of `x^(n-i)`.

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalars::{CPolynomial, Scalar};
use crate::series::{Derivation, PuiseuxSeries};

#[derive(Clone, Debug)]
pub struct OrePoly {
    coeffs: Vec<PuiseuxSeries>,
    der: Derivation,
}

fn binomial(n: usize, k: usize) -> i64 {
    let mut r: i64 = 1;
    for j in 0..k {
        r = r * (n - j) as i64 / (j + 1) as i64;
    }
    r
}

impl OrePoly {
    /// Builds a polynomial from ascending coefficients. Coefficients are
    /// lifted to the derivation's ramification and trailing zeros dropped.
    pub fn new(coeffs: Vec<PuiseuxSeries>, der: Derivation) -> Self {
        let b = der.ramification();
        let mut coeffs: Vec<PuiseuxSeries> = coeffs
            .into_iter()
            .map(|c| if c.ramification() == b { c } else { c.lift_to(b) })
            .collect();
        while coeffs.last().is_some_and(PuiseuxSeries::is_zero) {
            coeffs.pop();
        }
        OrePoly { coeffs, der }
    }

    /// Builds `x^n + a_1 x^(n-1) + ... + a_n` from `[a_1, ..., a_n]`.
    pub fn monic_from_lower(lower: &[PuiseuxSeries], der: Derivation) -> Self {
        let b = der.ramification();
        let mut coeffs: Vec<PuiseuxSeries> = lower.iter().rev().cloned().collect();
        coeffs.push(PuiseuxSeries::one(b));
        OrePoly::new(coeffs, der)
    }

    pub fn zero(der: Derivation) -> Self {
        OrePoly::new(Vec::new(), der)
    }

    pub fn one(der: Derivation) -> Self {
        let b = der.ramification();
        OrePoly::new(vec![PuiseuxSeries::one(b)], der)
    }

    pub fn constant(c: PuiseuxSeries, der: Derivation) -> Self {
        OrePoly::new(vec![c], der)
    }

    /// `x`
    pub fn x(der: Derivation) -> Self {
        let b = der.ramification();
        OrePoly::new(vec![PuiseuxSeries::zero(b), PuiseuxSeries::one(b)], der)
    }

    /// `x - lambda`
    pub fn linear(lambda: &PuiseuxSeries, der: Derivation) -> Self {
        let b = der.ramification();
        OrePoly::new(vec![-lambda, PuiseuxSeries::one(b)], der)
    }

    /// `(x - roots[0]) (x - roots[1]) ...`
    pub fn from_roots(roots: &[PuiseuxSeries], der: Derivation) -> Self {
        roots.iter().fold(OrePoly::one(der.clone()), |acc, r| {
            ore_mul(&acc, &OrePoly::linear(r, der.clone()))
        })
    }

    /// Lifts a commutative polynomial over C.
    pub fn from_cpoly(p: &CPolynomial, der: Derivation) -> Self {
        let b = der.ramification();
        OrePoly::new(
            p.coeffs()
                .iter()
                .map(|c| PuiseuxSeries::constant(c.clone(), b))
                .collect(),
            der,
        )
    }

    pub fn derivation(&self) -> &Derivation {
        &self.der
    }

    pub fn ramification(&self) -> u32 {
        self.der.ramification()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^k`.
    pub fn coeff(&self, k: usize) -> PuiseuxSeries {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| PuiseuxSeries::zero(self.ramification()))
    }

    /// Coefficient of `x^(n-i)`.
    pub fn a(&self, i: usize) -> PuiseuxSeries {
        let n = self.degree().unwrap_or(0);
        assert!(i <= n);
        self.coeff(n - i)
    }

    pub fn coeffs(&self) -> &[PuiseuxSeries] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs
            .last()
            .is_some_and(|c| c.is_exact() && c == &PuiseuxSeries::one(self.ramification()))
    }

    /// Worst absolute precision of the coefficients on the `t` scale.
    pub fn precision_t(&self) -> Option<Rational64> {
        self.coeffs.iter().filter_map(PuiseuxSeries::precision_t).min()
    }

    /// Left multiplication by a series.
    pub fn scale_left(&self, c: &PuiseuxSeries) -> Self {
        OrePoly::new(self.coeffs.iter().map(|a| c * a).collect(), self.der.clone())
    }

    /// Left multiplication by `s^k`.
    pub fn shift_left(&self, k: i64) -> Self {
        OrePoly::new(self.coeffs.iter().map(|a| a.shift(k)).collect(), self.der.clone())
    }

    /// Left-normalises by the inverse of the leading coefficient.
    pub fn make_monic(&self, limit_t: i64) -> Result<Self> {
        let lead = self.coeffs.last().ok_or(Error::ZeroDivision)?;
        let inv = lead.invert(limit_t)?;
        let mut out = self.scale_left(&inv);
        let n = out.coeffs.len() - 1;
        out.coeffs[n] = PuiseuxSeries::one(self.ramification());
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (f, g) = align(self, other);
        let n = f.coeffs.len().max(g.coeffs.len());
        OrePoly::new((0..n).map(|k| &f.coeff(k) + &g.coeff(k)).collect(), f.der.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (f, g) = align(self, other);
        let n = f.coeffs.len().max(g.coeffs.len());
        OrePoly::new((0..n).map(|k| &f.coeff(k) - &g.coeff(k)).collect(), f.der.clone())
    }

    /// Truncates every coefficient at absolute `s`-exponent `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        OrePoly::new(self.coeffs.iter().map(|c| c.truncate(prec)).collect(), self.der.clone())
    }

    /// The same polynomial over `C((s^(1/q)))`.
    pub fn ramify(&self, q: u32) -> Self {
        OrePoly::new(self.coeffs.iter().map(|c| c.ramify(q)).collect(), self.der.lift(q))
    }

    pub fn lift_to(&self, b: u32) -> Self {
        assert!(b % self.ramification() == 0);
        self.ramify(b / self.ramification())
    }

    /// Coefficientwise comparison on the known windows.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        let diff = self.sub(other);
        diff.coeffs.iter().all(PuiseuxSeries::is_zero)
    }

    /// `min v_t(a_i)/i` over the non-zero lower coefficients; `None` when
    /// every lower coefficient vanishes.
    pub fn min_slope(&self) -> Option<Rational64> {
        let n = self.degree()?;
        (1..=n)
            .filter_map(|i| self.a(i).valuation_t().map(|v| v / i as i64))
            .min()
    }
}

fn align<'a>(f: &'a OrePoly, g: &'a OrePoly) -> (std::borrow::Cow<'a, OrePoly>, std::borrow::Cow<'a, OrePoly>) {
    use std::borrow::Cow;
    let (bf, bg) = (f.ramification(), g.ramification());
    let (f, g) = if bf == bg {
        (Cow::Borrowed(f), Cow::Borrowed(g))
    } else {
        let l = bf.lcm(&bg);
        (Cow::Owned(f.lift_to(l)), Cow::Owned(g.lift_to(l)))
    };
    assert_eq!(f.der, g.der, "differential polynomials over different derivations");
    (f, g)
}

/// Product in the ring of differential polynomials, using
/// `x^i b = sum_l C(i, l) d^l(b) x^(i-l)`.
pub fn ore_mul(f: &OrePoly, g: &OrePoly) -> OrePoly {
    let (f, g) = align(f, g);
    let der = f.der.clone();
    let b = der.ramification();
    if f.is_zero() || g.is_zero() {
        return OrePoly::zero(der);
    }
    let df = f.coeffs.len() - 1;
    let mut out = vec![PuiseuxSeries::zero(b); df + g.coeffs.len()];
    for (j, bj) in g.coeffs.iter().enumerate() {
        if bj.is_exact_zero() {
            continue;
        }
        let mut derivs = vec![bj.clone()];
        for l in 1..=df {
            let next = derivs[l - 1].derive(&der);
            derivs.push(next);
        }
        for (i, ai) in f.coeffs.iter().enumerate() {
            if ai.is_exact_zero() {
                continue;
            }
            for (l, dl) in derivs.iter().enumerate().take(i + 1) {
                if dl.is_exact_zero() {
                    continue;
                }
                let mut term = ai * dl;
                if l > 0 {
                    term = term.scale(&Scalar::from_int(binomial(i, l)));
                }
                out[i - l + j] = &out[i - l + j] + &term;
            }
        }
    }
    OrePoly::new(out, der)
}

/// `h(x + c)` for a series `c`; the substitution `x -> x + c` is a ring
/// automorphism because `c` commutes with every coefficient.
pub fn substitute_shift(h: &OrePoly, c: &PuiseuxSeries) -> OrePoly {
    let der = h.der.clone();
    let b = der.ramification();
    let xc = OrePoly::new(vec![c.clone(), PuiseuxSeries::one(b)], der.clone());
    let mut power = OrePoly::one(der.clone());
    let mut out = OrePoly::zero(der);
    for (k, a) in h.coeffs.iter().enumerate() {
        if k > 0 {
            power = ore_mul(&power, &xc);
        }
        if !a.is_exact_zero() {
            out = out.add(&power.scale_left(a));
        }
    }
    out
}

/// `h(x + i mu s^(m-1))`, the polynomial with `h(x) s^i = s^i h(x + i mu s^(m-1))`.
pub fn t_shift(h: &OrePoly, i: i64) -> OrePoly {
    if i == 0 {
        return h.clone();
    }
    let der = &h.der;
    let c = PuiseuxSeries::monomial(&der.mu_scalar() * &Scalar::from_int(i), der.m() - 1, der.ramification());
    substitute_shift(h, &c)
}

/// `(s^d x)^k` expanded with coefficients on the left.
pub fn power_expand(d: i64, k: u32, der: &Derivation) -> OrePoly {
    let b = der.ramification();
    let sx = OrePoly::new(
        vec![PuiseuxSeries::zero(b), PuiseuxSeries::monomial(Scalar::one(), d, b)],
        der.clone(),
    );
    (0..k).fold(OrePoly::one(der.clone()), |acc, _| ore_mul(&acc, &sx))
}

/// The image in `C[x]` of a polynomial with integral coefficients.
pub fn reduce_mod_t(f: &OrePoly) -> Result<CPolynomial> {
    let mut out = Vec::with_capacity(f.coeffs.len());
    for (k, c) in f.coeffs.iter().enumerate() {
        if let Some(v) = c.valuation() {
            if v < 0 {
                return Err(Error::NegativeValuation(format!(
                    "coefficient of x^{k} has valuation {}",
                    c.valuation_t().unwrap()
                )));
            }
        }
        if c.precision().is_some_and(|p| p <= 0) {
            return Err(Error::PrecisionExhausted(format!("constant term of x^{k} unknown")));
        }
        out.push(c.coeff(0));
    }
    Ok(CPolynomial::new(out))
}

/// `s^(-nP) f(s^P X)` with `P = r B`, `B = lcm(b, denom r)`, expressed in the
/// variable `X = s^(-P) x` whose derivation is `s^(-P)` times the old one.
/// Requires `r <= v_t(a_i)/i` for every lower coefficient of the monic `f`.
pub fn shear(f: &OrePoly, r: Rational64) -> Result<OrePoly> {
    let n = f.degree().ok_or(Error::ZeroDivision)?;
    for i in 1..=n {
        if let Some(v) = f.a(i).valuation_t() {
            if v < r * i as i64 {
                return Err(Error::NotMinimalSlope(r.to_string(), (v / i as i64).to_string()));
            }
        }
    }
    if r.is_zero() {
        return Ok(f.clone());
    }
    let big_b = f.ramification().lcm(&(*r.denom() as u32));
    let f = f.lift_to(big_b);
    let p = (r * big_b as i64).to_integer();
    let d = &f.der;
    let new_der = Derivation::new(d.mu(), d.m() - p, big_b);
    let mut g = OrePoly::zero(new_der.clone());
    for (k, a) in f.coeffs.iter().enumerate() {
        if a.is_exact_zero() {
            continue;
        }
        let term = power_expand(p, k as u32, &new_der).scale_left(a);
        g = g.add(&term);
    }
    Ok(g.shift_left(-(n as i64) * p))
}

/// `g(s^(-P) x)` over the derivation `der`, where `g` lives over the sheared
/// derivation `s^(-P) der`. Inverts `shear` up to the left factor `s^(nP)`.
pub fn unshear(g: &OrePoly, p: i64, der: &Derivation) -> OrePoly {
    assert_eq!(der.ramification(), g.ramification());
    let mut out = OrePoly::zero(der.clone());
    for (k, a) in g.coeffs.iter().enumerate() {
        if a.is_exact_zero() {
            continue;
        }
        out = out.add(&power_expand(-p, k as u32, der).scale_left(a));
    }
    out
}

/// `f(x - lambda t^r)`.
pub fn translate(f: &OrePoly, lambda: &Scalar, r: Rational64) -> OrePoly {
    if lambda.is_zero() {
        return f.clone();
    }
    let b = f.ramification().lcm(&(*r.denom() as u32));
    let f = f.lift_to(b);
    let e = (r * b as i64).to_integer();
    substitute_shift(&f, &PuiseuxSeries::monomial(-lambda, e, b))
}

/// Lower boundary of the convex hull of `(k, v_t(coefficient of x^k))`, with
/// every edge steeper downwards than `1 - m_t` replaced by one of slope
/// `1 - m_t` (for `t d/dt` this flattens the regular part to slope 0).
///
/// Slopes are reported as `r = -(geometric slope)`, so `r` is the valuation
/// of the roots along that edge: a root `c t^r + ...` produces an edge of
/// geometric slope `-r`.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    vertices: Vec<(i64, Rational64)>,
    slopes: Vec<(Rational64, usize)>,
}

impl NewtonPolygon {
    /// Vertices from left to right.
    pub fn vertices(&self) -> &[(i64, Rational64)] {
        &self.vertices
    }

    /// Edges from left to right as `(r, horizontal length)`; `r` decreases.
    pub fn slopes(&self) -> &[(Rational64, usize)] {
        &self.slopes
    }

    pub fn single_slope(&self) -> Option<Rational64> {
        match self.slopes.as_slice() {
            [(r, _)] => Some(*r),
            _ => None,
        }
    }

    /// The most negative `r`, i.e. the dominant growth of the roots.
    pub fn min_slope(&self) -> Option<Rational64> {
        self.slopes.iter().map(|(r, _)| *r).min()
    }
}

pub fn newton_polygon(f: &OrePoly) -> NewtonPolygon {
    let c = Rational64::one() - f.der.t_scale_m();
    // shear by the clamp slope so that the clamp becomes "flatten negative slopes"
    let pts: Vec<(i64, Rational64)> = f
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(k, a)| a.valuation_t().map(|v| (k as i64, v - c * k as i64)))
        .collect();
    if pts.is_empty() {
        return NewtonPolygon {
            vertices: Vec::new(),
            slopes: Vec::new(),
        };
    }
    // extending each point horizontally to the left realises the clamp
    let floor = pts.iter().map(|p| p.1).min().unwrap();
    let first_min = pts.iter().find(|p| p.1 == floor).unwrap().0;
    let mut cand: Vec<(i64, Rational64)> = Vec::new();
    if first_min > 0 {
        cand.push((0, floor));
    }
    cand.extend(pts.iter().filter(|p| p.0 >= first_min).cloned());
    let mut hull: Vec<(i64, Rational64)> = Vec::new();
    for p in cand {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above segment a-p
            let lhs = (b.1 - a.1) * (p.0 - a.0);
            let rhs = (p.1 - a.1) * (b.0 - a.0);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let vertices: Vec<(i64, Rational64)> = hull.iter().map(|&(x, y)| (x, y + c * x)).collect();
    let slopes = vertices
        .windows(2)
        .map(|w| {
            let dx = w[1].0 - w[0].0;
            (-(w[1].1 - w[0].1) / dx, dx as usize)
        })
        .collect();
    NewtonPolygon { vertices, slopes }
}

fn fmt_coeff_term(out: &mut String, c: &PuiseuxSeries, k: usize) {
    let body = c.to_expr_string();
    let single = c.terms().count() == 1;
    let neg = single && body.starts_with('-');
    let mag = if neg { body[1..].to_string() } else { body };
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let xs = match k {
        0 => String::new(),
        1 => "x".into(),
        _ => format!("x^{k}"),
    };
    if k == 0 {
        out.push_str(if single { &mag } else { &mag });
        if !single {
            let s = out.len() - mag.len();
            out.insert(s, '(');
            out.push(')');
        }
    } else if mag == "1" {
        out.push_str(&xs);
    } else if single {
        out.push_str(&format!("{mag}*{xs}"));
    } else {
        out.push_str(&format!("({mag})*{xs}"));
    }
}

impl OrePoly {
    /// Textual form accepted by the expression parser.
    pub fn to_expr_string(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            fmt_coeff_term(&mut out, c, k);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())?;
        if let Some(p) = self.precision_t() {
            write!(
                f,
                " + O(t^{})",
                if p.is_integer() {
                    p.to_string()
                } else {
                    format!("({p})")
                }
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn t(c: i64, e: i64) -> PuiseuxSeries {
        PuiseuxSeries::monomial(Scalar::from_int(c), e, 1)
    }

    pub fn ser(terms: &[(i64, i64)]) -> PuiseuxSeries {
        terms
            .iter()
            .fold(PuiseuxSeries::zero(1), |acc, &(c, e)| &acc + &t(c, e))
    }

    pub fn d1() -> Derivation {
        Derivation::delta_one(1)
    }

    /// x^2 + (4t^-2 + 2t^-1 + 2) x + (4t^-4 + 4t^-3 + t^-2 + t^-1 + 1)
    pub fn f1() -> OrePoly {
        OrePoly::monic_from_lower(
            &[
                ser(&[(4, -2), (2, -1), (2, 0)]),
                ser(&[(4, -4), (4, -3), (1, -2), (1, -1), (1, 0)]),
            ],
            d1(),
        )
    }

    /// x^2 + (2t^-1 + 2) x + (t^-2 + t^-1 + 1)
    pub fn f2() -> OrePoly {
        OrePoly::monic_from_lower(&[ser(&[(2, -1), (2, 0)]), ser(&[(1, -2), (1, -1), (1, 0)])], d1())
    }

    pub fn f3() -> OrePoly {
        OrePoly::monic_from_lower(&[ser(&[(2, 0)]), ser(&[(1, 0)])], d1())
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn ore_mul_examples() {
        let d = d1();
        let p = ore_mul(
            &OrePoly::linear(&t(1, 1), d.clone()),
            &OrePoly::linear(&t(-1, 1), d.clone()),
        );
        let want = OrePoly::monic_from_lower(&[PuiseuxSeries::zero(1), ser(&[(1, 1), (-1, 2)])], d.clone());
        assert!(p.eq_to_precision(&want), "{p}");
        assert_eq!(p.to_expr_string(), "x^2 + (t - t^2)");

        let lam = ser(&[(-1, -1), (-1, 0)]);
        let sq = ore_mul(&OrePoly::linear(&lam, d.clone()), &OrePoly::linear(&lam, d.clone()));
        assert!(sq.eq_to_precision(&f2()), "{sq}");
        assert!(ore_mul(&f1(), &OrePoly::one(d)).eq_to_precision(&f1()));
    }

    #[test]
    fn t_shift_examples() {
        let x = OrePoly::x(d1());
        assert!(t_shift(&x, 5).eq_to_precision(&OrePoly::linear(&t(-5, 0), d1())));
        let d2 = Derivation::delta_m(2);
        let x2 = OrePoly::x(d2.clone());
        assert!(t_shift(&x2, 1).eq_to_precision(&OrePoly::linear(&t(-1, 1), d2)));
        assert!(t_shift(&f1(), 0).eq_to_precision(&f1()));
    }

    #[test]
    fn t_shift_commutes_powers_of_t_to_the_left() {
        for d in [d1(), Derivation::delta_m(2), Derivation::delta_m(3)] {
            let h = OrePoly::new(vec![t(3, -1), t(1, 2), t(-2, 0), t(1, 0)], d.clone());
            for i in -2..=3 {
                let s_i = OrePoly::constant(t(1, i), d.clone());
                let lhs = ore_mul(&h, &s_i);
                let rhs = t_shift(&h, i).shift_left(i);
                assert!(lhs.eq_to_precision(&rhs), "i = {i}");
            }
        }
    }

    #[test]
    fn power_expand_examples() {
        let d = d1();
        assert!(power_expand(3, 1, &d).eq_to_precision(&OrePoly::new(vec![t(0, 0), t(1, 3)], d.clone())));
        let sq = power_expand(-1, 2, &d);
        let want = OrePoly::new(vec![t(0, 0), t(-1, -2), t(1, -2)], d.clone());
        assert!(sq.eq_to_precision(&want), "{sq}");
        for dd in [d1(), Derivation::delta_m(2), Derivation::delta_m(-1)] {
            for k in 1..=6 {
                let p = power_expand(-2, k, &dd);
                assert_eq!(p.degree(), Some(k as usize));
                assert_eq!(p.coeff(k as usize), t(1, -2 * k as i64));
            }
        }
    }

    #[test]
    fn shear_reproduces_worked_example() {
        let g1 = shear(&f1(), Rational64::from(-2)).unwrap();
        assert_eq!(g1.derivation(), &Derivation::new(Rational64::one(), 3, 1));
        let want = OrePoly::monic_from_lower(
            &[ser(&[(4, 0), (2, 1)]), ser(&[(4, 0), (4, 1), (1, 2), (1, 3), (1, 4)])],
            g1.derivation().clone(),
        );
        assert!(g1.eq_to_precision(&want), "{g1}");
        let bar = reduce_mod_t(&g1).unwrap();
        assert_eq!(
            bar,
            CPolynomial::from_roots(&[Scalar::from_int(-2), Scalar::from_int(-2)])
        );
        assert!(shear(&f3(), Rational64::zero()).unwrap().eq_to_precision(&f3()));
        assert!(matches!(
            shear(&f1(), Rational64::from(-1)),
            Err(Error::NotMinimalSlope(..))
        ));
    }

    #[test]
    fn shear_valuation_zero_exactly_on_the_edge() {
        // v(b_l) = 0 iff v(a_l) = l r
        let f = OrePoly::monic_from_lower(&[ser(&[(1, -1)]), ser(&[(3, -1)]), ser(&[(1, -6), (1, 0)])], d1());
        let r = f.min_slope().unwrap();
        assert_eq!(r, Rational64::from(-2));
        let g = shear(&f, r).unwrap();
        for i in 1..=3 {
            let on_edge = f.a(i).valuation_t() == Some(r * i as i64);
            assert_eq!(g.a(i).valuation() == Some(0), on_edge, "i = {i}");
            assert!(g.a(i).valuation().map_or(true, |v| v >= 0));
        }
    }

    #[test]
    fn ramified_shear() {
        // x^2 + t^-1: slope -1/2
        let f = OrePoly::monic_from_lower(&[PuiseuxSeries::zero(1), t(1, -1)], d1());
        let r = f.min_slope().unwrap();
        assert_eq!(r, Rational64::new(-1, 2));
        let g = shear(&f, r).unwrap();
        assert_eq!(g.ramification(), 2);
        let bar = reduce_mod_t(&g).unwrap();
        assert_eq!(bar, CPolynomial::from_roots(&[Scalar::i(), -&Scalar::i()]));
    }

    #[test]
    fn translate_reproduces_worked_example() {
        let f2_got = translate(&f1(), &Scalar::from_int(2), Rational64::from(-2));
        assert!(f2_got.eq_to_precision(&f2()), "{f2_got}");
        let f3_got = translate(&f2(), &Scalar::from_int(1), Rational64::from(-1));
        assert!(f3_got.eq_to_precision(&f3()), "{f3_got}");
        assert!(translate(&f1(), &Scalar::zero(), Rational64::from(-2)).eq_to_precision(&f1()));
    }

    #[test]
    fn reduce_mod_t_examples() {
        assert_eq!(
            reduce_mod_t(&f3()).unwrap(),
            CPolynomial::new(vec![Scalar::one(), Scalar::from_int(2), Scalar::one()])
        );
        let f = OrePoly::linear(&t(-1, 1), d1());
        assert_eq!(
            reduce_mod_t(&f).unwrap(),
            CPolynomial::new(vec![Scalar::zero(), Scalar::one()])
        );
        assert!(matches!(reduce_mod_t(&f1()), Err(Error::NegativeValuation(_))));
    }

    #[test]
    fn newton_polygons_of_worked_example() {
        let np = newton_polygon(&f1());
        assert_eq!(np.single_slope(), Some(Rational64::from(-2)));
        assert_eq!(np.vertices(), &[(0, Rational64::from(-4)), (2, Rational64::zero())]);
        assert_eq!(newton_polygon(&f2()).single_slope(), Some(Rational64::from(-1)));
        assert_eq!(newton_polygon(&f3()).single_slope(), Some(Rational64::zero()));
    }

    #[test]
    fn newton_polygon_clamps_regular_part() {
        // x^2 + t: geometric slope -1/2 lies below the clamp and is flattened
        let f = OrePoly::monic_from_lower(&[PuiseuxSeries::zero(1), t(1, 1)], d1());
        let np = newton_polygon(&f);
        assert_eq!(np.single_slope(), Some(Rational64::zero()));
        // two slopes: x^3 + t^-2 x^2 + 1 has edges r = -2 then 0
        let g = OrePoly::monic_from_lower(&[t(1, -2), PuiseuxSeries::zero(1), t(1, 0)], d1());
        let np = newton_polygon(&g);
        let rs: Vec<Rational64> = np.slopes().iter().map(|s| s.0).collect();
        assert_eq!(rs, vec![Rational64::zero(), Rational64::from(-2)]);
        assert_eq!(np.slopes().iter().map(|s| s.1).sum::<usize>(), 3);
    }

    #[test]
    fn display_form() {
        assert_eq!(
            f1().to_expr_string(),
            "x^2 + (4*t^-2 + 2*t^-1 + 2)*x + (4*t^-4 + 4*t^-3 + t^-2 + t^-1 + 1)"
        );
        let f = OrePoly::monic_from_lower(&[t(-3, 1), t(-1, 0)], d1());
        assert_eq!(f.to_expr_string(), "x^2 - 3*t*x - 1");
    }
}

#[cfg(test)]
mod proptests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn coeff() -> impl Strategy<Value = PuiseuxSeries> {
        prop::collection::vec((-3i64..=3, -2i64..=2), 0..3).prop_map(|ts| ser(&ts))
    }

    fn poly(der: Derivation) -> impl Strategy<Value = OrePoly> {
        prop::collection::vec(coeff(), 1..=4).prop_map(move |cs| OrePoly::new(cs, der.clone()))
    }

    fn any_der() -> impl Strategy<Value = Derivation> {
        prop_oneof![Just(d1()), Just(Derivation::delta_m(2))]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ore_mul_associative((f, g, h) in any_der().prop_flat_map(|d| (poly(d.clone()), poly(d.clone()), poly(d)))) {
            let lhs = ore_mul(&ore_mul(&f, &g), &h);
            let rhs = ore_mul(&f, &ore_mul(&g, &h));
            prop_assert!(lhs.eq_to_precision(&rhs));
        }

        #[test]
        fn t_shift_identity((h, i) in any_der().prop_flat_map(|d| (poly(d), -3i64..=3))) {
            let d = h.derivation().clone();
            let lhs = ore_mul(&h, &OrePoly::constant(t(1, i), d));
            prop_assert!(lhs.eq_to_precision(&t_shift(&h, i).shift_left(i)));
        }

        #[test]
        fn shear_and_translate_keep_degree_and_monicity(
            lower in prop::collection::vec(coeff(), 1..=4),
            lam in -3i64..=3,
            e in -2i64..=1,
        ) {
            let f = OrePoly::monic_from_lower(&lower, d1());
            let n = f.degree();
            if let Some(r) = f.min_slope() {
                let g = shear(&f, r).unwrap();
                prop_assert_eq!(g.degree(), n);
                prop_assert!(g.is_monic());
            }
            let g = translate(&f, &Scalar::from_int(lam), Rational64::from(e));
            prop_assert_eq!(g.degree(), n);
            prop_assert!(g.is_monic());
        }
    }
}
