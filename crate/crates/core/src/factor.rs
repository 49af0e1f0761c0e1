//! Differential Hensel lifting and linear factorisation of monic
//! differential polynomials over Puiseux series.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::orepoly::{newton_polygon, ore_mul, reduce_mod_t, shear, translate, unshear, NewtonPolygon, OrePoly};
use crate::scalars::{gcd_shifted_coprime, roots_of, CPolynomial, Scalar};
use crate::series::{Derivation, PuiseuxSeries};

/// Snapshot handed to the observer of [`hensel_lift_observed`] after each stage.
pub struct HenselState<'a> {
    pub f: &'a OrePoly,
    pub g: &'a OrePoly,
    pub h: &'a OrePoly,
    /// Stage `n`: `g` and `h` are correct modulo `s^(n+1)`.
    pub stage: i64,
    pub target: i64,
}

impl HenselState<'_> {
    /// Recomputes `f - g h` from scratch and checks it vanishes modulo `s^(n+1)`.
    pub fn invariant_holds(&self) -> bool {
        let p = self.stage + 1;
        let prod = ore_mul(&self.g.truncate(p), &self.h.truncate(p));
        self.f.truncate(p).eq_to_precision(&prod)
    }
}

/// Lifts `f mod s = g0 h0` to `f = g h` modulo `s^(stages+1)`, with `g` monic
/// of the degree of `g0`. Needs `gcd(g0(x + n mu), h0) = 1` for all `n >= 1`
/// when the derivation is `mu s d/ds`, and plain coprimality when `m > 1`.
pub fn hensel_lift(f: &OrePoly, g0: &CPolynomial, h0: &CPolynomial, stages: i64) -> Result<(OrePoly, OrePoly)> {
    hensel_lift_observed(f, g0, h0, stages, |_| {})
}

pub fn hensel_lift_observed(
    f: &OrePoly,
    g0: &CPolynomial,
    h0: &CPolynomial,
    stages: i64,
    mut observer: impl FnMut(&HenselState<'_>),
) -> Result<(OrePoly, OrePoly)> {
    let der = f.derivation().clone();
    let m = der.m();
    if m < 1 {
        return Err(Error::Unsupported(format!("Hensel lifting needs m >= 1, got {der}")));
    }
    let lc = g0.leading().ok_or(Error::ZeroDivision)?.clone();
    let lc_inv = lc.inv().ok_or(Error::ZeroDivision)?;
    let g0 = g0.scale(&lc_inv);
    let h0 = h0.scale(&lc);
    let fbar = reduce_mod_t(f)?;
    if fbar.sub(&g0.mul(&h0)).coeffs().iter().any(|c| !c.is_zero()) {
        return Err(Error::Unsupported("reduction of f is not g0 h0".into()));
    }
    let mu = der.mu_scalar();
    if !gcd_shifted_coprime(&g0, &h0, m, &mu)? {
        return Err(Error::CoprimalityViolation);
    }
    let avail = f.coeffs().iter().filter_map(PuiseuxSeries::precision).min();
    if avail.is_some_and(|p| p < stages + 1) {
        return Err(Error::PrecisionExhausted(format!(
            "lifting to stage {stages} needs coefficients modulo s^{}, have s^{}",
            stages + 1,
            avail.unwrap()
        )));
    }
    let top = stages + 1;
    let mut g = OrePoly::from_cpoly(&g0, der.clone());
    let mut h = OrePoly::from_cpoly(&h0, der.clone());
    // residual f - g h, kept modulo s^top and updated incrementally
    let mut res = f.truncate(top).sub(&ore_mul(&g, &h).truncate(top));
    let fixed_bezout = if m > 1 { Some(bezout(&g0, &h0)?) } else { None };
    observer(&HenselState {
        f,
        g: &g,
        h: &h,
        stage: 0,
        target: stages,
    });
    for n in 1..=stages {
        debug_assert!(res.coeffs().iter().all(|c| c.valuation().map_or(true, |v| v >= n)));
        let fn_poly = CPolynomial::new(res.coeffs().iter().map(|c| c.coeff(n)).collect());
        if !fn_poly.is_zero() {
            let (g0s, a, b) = match &fixed_bezout {
                Some((a, b)) => (g0.clone(), a.clone(), b.clone()),
                None => {
                    let g0s = g0.shift(&(&mu * &Scalar::from_int(n)));
                    let (a, b) = bezout(&g0s, &h0)?;
                    (g0s, a, b)
                }
            };
            let (quo, rem) = b.mul(&fn_poly).div_rem(&g0s);
            let p = rem;
            let q = a.mul(&fn_poly).add(&quo.mul(&h0));
            let ps = OrePoly::from_cpoly(&p, der.clone()).shift_left(n);
            let qs = OrePoly::from_cpoly(&q, der.clone()).shift_left(n);
            // (g + s^n p)(h + s^n q) = g h + g s^n q + s^n p h + s^n p s^n q
            let delta = ore_mul(&g.truncate(top), &qs)
                .add(&ore_mul(&ps, &h.truncate(top)))
                .add(&ore_mul(&ps, &qs).truncate(top));
            res = res.sub(&delta).truncate(top);
            g = g.add(&ps);
            h = h.add(&qs);
        }
        observer(&HenselState {
            f,
            g: &g,
            h: &h,
            stage: n,
            target: stages,
        });
    }
    Ok((with_precision(&g, top), with_precision(&h, top)))
}

/// `(a, b)` with `a g + b h = 1`.
fn bezout(g: &CPolynomial, h: &CPolynomial) -> Result<(CPolynomial, CPolynomial)> {
    let (d, a, b) = g.xgcd(h);
    if d.degree() != Some(0) {
        return Err(Error::CoprimalityViolation);
    }
    Ok((a, b))
}

/// Truncates at `s^prec` but keeps an exact leading `1`.
fn with_precision(f: &OrePoly, prec: i64) -> OrePoly {
    let mut cs: Vec<PuiseuxSeries> = f.truncate(prec).coeffs().to_vec();
    let b = f.ramification();
    if let Some(last) = cs.last_mut() {
        if last.eq_to_precision(&PuiseuxSeries::one(b)) {
            *last = PuiseuxSeries::one(b);
        }
    }
    OrePoly::new(cs, f.derivation().clone())
}

/// For `f` monic with integral coefficients under a derivation `mu s d/ds`,
/// finds `f = (x - Lambda) h` where `Lambda mod s` is the root of `f mod s`
/// of least real part, lifted through `stages` Hensel stages.
pub fn linear_factor_regular(f: &OrePoly, stages: i64) -> Result<(PuiseuxSeries, OrePoly)> {
    regular_split(f, stages, &mut |_| {})
}

fn regular_split(f: &OrePoly, stages: i64, obs: &mut dyn FnMut(&HenselState<'_>)) -> Result<(PuiseuxSeries, OrePoly)> {
    if f.derivation().m() != 1 {
        return Err(Error::Unsupported("regular splitting needs m = 1".into()));
    }
    let fbar = reduce_mod_t(f)?;
    let roots = roots_of(&fbar)?;
    let rho = roots
        .first()
        .ok_or_else(|| Error::Unsupported("constant polynomial".into()))?;
    let g0 = CPolynomial::linear(rho);
    let h0 = CPolynomial::from_roots(&roots[1..]);
    let (g, h) = hensel_lift_observed(f, &g0, &h0, stages, obs)?;
    Ok((-&g.coeff(0), h))
}

/// `f = (x - roots[0]) (x - roots[1]) ... (x - roots[n-1])` over `C((t^(1/b)))`.
#[derive(Clone, Debug)]
pub struct LinearFactorisation {
    pub roots: Vec<PuiseuxSeries>,
    pub ramification: u32,
    /// Absolute `t`-precision to which the re-multiplied product agrees with `f`.
    pub precision: Option<Rational64>,
}

impl LinearFactorisation {
    pub fn product(&self) -> OrePoly {
        OrePoly::from_roots(&self.roots, Derivation::delta_one(self.ramification))
    }
}

/// One step of the factorisation loop, in visiting order.
#[derive(Clone, Debug)]
pub enum FactorStep {
    /// A polynomial of degree at least two entering the loop.
    Visit { poly: OrePoly, polygon: NewtonPolygon },
    /// `x = t^r X`, with the reduction of the sheared polynomial.
    Shear {
        slope: Rational64,
        sheared: OrePoly,
        reduction: CPolynomial,
    },
    /// Reduction with at least two distinct roots: split into degrees.
    Split { left_degree: usize, right_degree: usize },
    /// Unique reduced root: continue with `f(x - lambda t^r)`.
    Translate {
        lambda: Scalar,
        slope: Rational64,
        result: OrePoly,
    },
    /// Integral case: a root peeled off on the left.
    Regular { root: PuiseuxSeries },
}

/// Factors a monic differential polynomial over `C((t^(1/b)))` with
/// derivation `t d/dt` into linear factors, to absolute `t`-precision `prec`.
pub fn factor_linear(f: &OrePoly, prec: i64) -> Result<LinearFactorisation> {
    factor_linear_traced(f, prec).map(|(lf, _)| lf)
}

pub fn factor_linear_traced(f: &OrePoly, prec: i64) -> Result<(LinearFactorisation, Vec<FactorStep>)> {
    factor_linear_observed(f, prec, &mut |_| {})
}

/// As [`factor_linear_traced`], handing every Hensel stage of every lift to `obs`.
pub fn factor_linear_observed(
    f: &OrePoly,
    prec: i64,
    obs: &mut dyn FnMut(&HenselState<'_>),
) -> Result<(LinearFactorisation, Vec<FactorStep>)> {
    if !f.derivation().is_delta_one() {
        return Err(Error::Unsupported(format!(
            "linear factorisation is implemented for t d/dt, got {}",
            f.derivation()
        )));
    }
    let n = f.degree().ok_or(Error::ZeroDivision)?;
    let f = if f.is_monic() {
        f.clone()
    } else {
        f.make_monic(prec + 8)?
    };
    let steep = f.min_slope().map_or(0, |r| (-r).ceil().to_integer().max(0));
    let mut margin = n as i64 * steep + 4;
    let mut last = None;
    for _ in 0..5 {
        let mut trace = Vec::new();
        let roots = factor_rec(&f, prec + margin, &mut trace, obs)?;
        let b = roots.iter().fold(f.ramification(), |acc, r| acc.lcm(&r.ramification()));
        let roots: Vec<PuiseuxSeries> = roots.iter().map(|r| r.lift_to(b)).collect();
        let product = OrePoly::from_roots(&roots, Derivation::delta_one(b));
        let target = f.lift_to(b);
        let diff = target.sub(&product);
        if diff.coeffs().iter().any(|c| !c.is_zero()) {
            return Err(Error::PrecisionExhausted(
                "re-multiplied factors disagree with the input".into(),
            ));
        }
        let got = (0..=n)
            .filter_map(|k| {
                let p = [target.coeff(k).precision(), product.coeff(k).precision()]
                    .into_iter()
                    .flatten()
                    .min();
                p.map(|p| Rational64::new(p, b as i64))
            })
            .min();
        if got.map_or(true, |p| p >= Rational64::from(prec)) {
            let lf = LinearFactorisation {
                roots,
                ramification: b,
                precision: got,
            };
            return Ok((lf, trace));
        }
        if last.is_some() && got <= last {
            // capped by the precision of the input
            break;
        }
        last = got;
        margin = 2 * margin + (Rational64::from(prec) - got.unwrap()).ceil().to_integer();
    }
    Err(Error::PrecisionExhausted(format!(
        "product precision {} below requested {prec}",
        last.map_or("?".to_string(), |p| p.to_string())
    )))
}

fn min_precision(f: &OrePoly) -> Option<i64> {
    f.coeffs().iter().filter_map(PuiseuxSeries::precision).min()
}

fn factor_rec(
    f: &OrePoly,
    work: i64,
    trace: &mut Vec<FactorStep>,
    obs: &mut dyn FnMut(&HenselState<'_>),
) -> Result<Vec<PuiseuxSeries>> {
    let n = f.degree().ok_or(Error::ZeroDivision)?;
    let b = f.ramification();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-&f.coeff(0)]);
    }
    trace.push(FactorStep::Visit {
        poly: f.clone(),
        polygon: newton_polygon(f),
    });
    let Some(r) = f.min_slope() else {
        // x^n up to the known precision
        let root = match min_precision(f) {
            None => PuiseuxSeries::zero(b),
            Some(p) => PuiseuxSeries::zero_to(b, Integer::div_floor(&p, &(n as i64))),
        };
        return Ok(vec![root; n]);
    };
    let work_s = work * b as i64;
    if !r.is_negative() {
        let stages = capped_stages(f, work_s)?;
        let (lam, h) = regular_split(f, stages, obs)?;
        trace.push(FactorStep::Regular { root: lam.clone() });
        let mut out = vec![lam];
        out.extend(factor_rec(&h, work, trace, obs)?);
        return Ok(out);
    }
    let g = shear(f, r)?;
    let big_b = g.ramification();
    let p = (r * big_b as i64).to_integer();
    let gbar = reduce_mod_t(&g)?;
    let roots = roots_of(&gbar)?;
    trace.push(FactorStep::Shear {
        slope: r,
        sheared: g.clone(),
        reduction: gbar,
    });
    let rho = roots[0].clone();
    let k = roots.iter().filter(|z| z.approx_eq(&rho)).count();
    if k < n {
        let g0 = CPolynomial::from_roots(&roots[..k]);
        let h0 = CPolynomial::from_roots(&roots[k..]);
        let stages = capped_stages(&g, work * big_b as i64 + n as i64 * p.abs())?;
        let (gl, hl) = hensel_lift_observed(&g, &g0, &h0, stages, &mut *obs)?;
        let der = f.derivation().lift_to(big_b);
        let (n64, k64) = (n as i64, k as i64);
        let right = OrePoly::constant(
            PuiseuxSeries::monomial(Scalar::one(), -(n64 - k64) * p, big_b),
            der.clone(),
        );
        let f1 = ore_mul(&unshear(&gl, p, &der).shift_left(n64 * p), &right);
        let f2 = unshear(&hl, p, &der).shift_left((n64 - k64) * p);
        trace.push(FactorStep::Split {
            left_degree: k,
            right_degree: n - k,
        });
        let mut out = factor_rec(&f1, work, trace, obs)?;
        out.extend(factor_rec(&f2, work, trace, obs)?);
        return Ok(out);
    }
    let lambda = -&rho;
    let f2 = translate(f, &lambda, r);
    trace.push(FactorStep::Translate {
        lambda,
        slope: r,
        result: f2.clone(),
    });
    let c = PuiseuxSeries::t_power(rho, r);
    Ok(factor_rec(&f2, work, trace, obs)?.iter().map(|m| m + &c).collect())
}

fn capped_stages(f: &OrePoly, wanted: i64) -> Result<i64> {
    let stages = match min_precision(f) {
        Some(p) => wanted.min(p - 1),
        None => wanted,
    };
    if stages < 1 {
        return Err(Error::PrecisionExhausted("no precision left for Hensel lifting".into()));
    }
    Ok(stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orepoly::fixtures::*;
    use num_traits::Zero;

    #[test]
    fn hensel_product_identity_example() {
        // x^2 + t - t^2 = (x - t)(x + t)
        let f = OrePoly::monic_from_lower(&[PuiseuxSeries::zero(1), ser(&[(1, 1), (-1, 2)])], d1());
        let x = CPolynomial::linear(&Scalar::zero());
        let (g, h) = hensel_lift(&f, &x, &x, 10).unwrap();
        assert!(g.eq_to_precision(&OrePoly::linear(&t(1, 1), d1())), "{g}");
        assert!(h.eq_to_precision(&OrePoly::linear(&t(-1, 1), d1())), "{h}");
        assert!(ore_mul(&g, &h).eq_to_precision(&f));
        assert_eq!(g.degree(), Some(1));
    }

    #[test]
    fn hensel_m2_roundtrip() {
        let d2 = Derivation::delta_m(2);
        let gl = OrePoly::linear(&ser(&[(1, 0), (2, 1), (-1, 3)]), d2.clone());
        let hl = OrePoly::linear(&ser(&[(3, 0), (1, 2)]), d2.clone());
        let f = ore_mul(&gl, &hl);
        let g0 = CPolynomial::linear(&Scalar::from_int(1));
        let h0 = CPolynomial::linear(&Scalar::from_int(3));
        let mut stages_seen = 0;
        let (g, h) = hensel_lift_observed(&f, &g0, &h0, 12, |st| {
            assert!(st.invariant_holds(), "stage {}", st.stage);
            stages_seen += 1;
        })
        .unwrap();
        assert_eq!(stages_seen, 13);
        assert_eq!(reduce_mod_t(&g).unwrap(), g0);
        assert_eq!(reduce_mod_t(&h).unwrap(), h0);
        assert!(ore_mul(&g, &h).eq_to_precision(&f));
        assert_eq!(ore_mul(&g, &h).precision_t(), Some(Rational64::from(13)));
    }

    #[test]
    fn hensel_constant_input_needs_no_corrections() {
        let g0 = CPolynomial::from_roots(&[Scalar::from_int(-1)]);
        let h0 = CPolynomial::from_roots(&[Scalar::from_int(2), Scalar::from_int(5)]);
        let f = OrePoly::from_cpoly(&g0.mul(&h0), d1());
        hensel_lift_observed(&f, &g0, &h0, 6, |st| {
            assert!(st.g.eq_to_precision(&OrePoly::from_cpoly(&g0, d1())));
            assert!(st.h.eq_to_precision(&OrePoly::from_cpoly(&h0, d1())));
        })
        .unwrap();
    }

    #[test]
    fn hensel_rejects_resonant_split() {
        // g0 = x - 1, h0 = x: root of g0 minus 1 hits h0
        let g0 = CPolynomial::linear(&Scalar::one());
        let h0 = CPolynomial::linear(&Scalar::zero());
        let f = OrePoly::from_cpoly(&g0.mul(&h0), d1());
        assert_eq!(hensel_lift(&f, &g0, &h0, 4).unwrap_err(), Error::CoprimalityViolation);
    }

    #[test]
    fn regular_examples() {
        let (lam, h) = linear_factor_regular(&f3(), 10).unwrap();
        assert!(lam.eq_to_precision(&t(-1, 0)));
        assert!(h.eq_to_precision(&OrePoly::linear(&t(-1, 0), d1())));
        let f = ore_mul(&OrePoly::linear(&t(1, 1), d1()), &OrePoly::linear(&t(2, 0), d1()));
        let (lam, h) = linear_factor_regular(&f, 12).unwrap();
        assert!(lam.coeff(0).is_zero());
        assert!(ore_mul(&OrePoly::linear(&lam, d1()), &h).eq_to_precision(&f));
    }

    #[test]
    fn factor_worked_example() {
        let (lf, trace) = factor_linear_traced(&f1(), 16).unwrap();
        assert_eq!(lf.ramification, 1);
        let want = ser(&[(-2, -2), (-1, -1), (-1, 0)]);
        for r in &lf.roots {
            assert!(r.eq_to_precision(&want), "{r}");
            assert!(r.precision().unwrap() >= 16);
        }
        assert!(lf.precision.unwrap() >= Rational64::from(16));
        let slopes: Vec<Rational64> = trace
            .iter()
            .filter_map(|s| match s {
                FactorStep::Visit { polygon, .. } => polygon.single_slope(),
                _ => None,
            })
            .collect();
        assert_eq!(
            slopes,
            vec![Rational64::from(-2), Rational64::from(-1), Rational64::zero()]
        );
    }

    #[test]
    fn factor_ramified_example() {
        // x^2 + t^-1 needs s = t^(1/2)
        let f = OrePoly::monic_from_lower(&[PuiseuxSeries::zero(1), t(1, -1)], d1());
        let lf = factor_linear(&f, 10).unwrap();
        assert_eq!(lf.ramification, 2);
        let leads: Vec<(i64, Scalar)> = lf
            .roots
            .iter()
            .map(|r| (r.valuation().unwrap(), r.leading_coefficient().unwrap().clone()))
            .collect();
        assert_eq!(leads[0].0, -1);
        assert_eq!(leads[1].0, -1);
        let mut lc = vec![leads[0].1.clone(), leads[1].1.clone()];
        lc.sort_by(crate::scalars::re_cmp);
        assert_eq!(lc, vec![-&Scalar::i(), Scalar::i()]);
        assert!(lf.product().eq_to_precision(&f.lift_to(2)));
    }

    #[test]
    fn factor_linear_input() {
        let f = OrePoly::linear(&ser(&[(3, -2), (1, 4)]), d1());
        let lf = factor_linear(&f, 10).unwrap();
        assert_eq!(lf.roots, vec![ser(&[(3, -2), (1, 4)])]);
    }

    #[test]
    fn factor_mixed_slopes() {
        let roots = [
            ser(&[(1, -2), (1, 0)]),
            ser(&[(2, 0), (1, 1)]),
            ser(&[(-1, -1), (3, 2)]),
        ];
        let f = OrePoly::from_roots(&roots, d1());
        let lf = factor_linear(&f, 12).unwrap();
        assert!(lf.product().eq_to_precision(&f));
        assert!(lf.precision.unwrap() >= Rational64::from(12));
    }
}
