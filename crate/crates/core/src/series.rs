//! Truncated Puiseux series in `s = t^(1/b)` and the derivations
//! `mu * s^m d/ds` acting on them.
//!
//! Exponents are stored in units of `1/b`. A series either is *exact* (a
//! Laurent polynomial, no unknown tail) or carries an absolute precision `P`:
//! coefficients of `s^e` with `e >= P` are unknown. Precision propagation is
//! pessimistic and no operation fabricates unknown coefficients.

use std::borrow::Cow;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalars::{Backend, Scalar};

/// The derivation `s^e -> mu * e * s^(e + m - 1)` on `C((s))`, `s = t^(1/b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    mu: Rational64,
    m: i64,
    b: u32,
}

impl Derivation {
    pub fn new(mu: Rational64, m: i64, b: u32) -> Self {
        assert!(b >= 1, "ramification must be positive");
        assert!(!mu.is_zero(), "derivation scale must be non-zero");
        Derivation { mu, m, b }
    }

    /// `t d/dt` lifted to `C((t^(1/b)))`.
    pub fn delta_one(b: u32) -> Self {
        Derivation::new(Rational64::new(1, b as i64), 1, b)
    }

    /// `t^m d/dt` on `C((t))`.
    pub fn delta_m(m: i64) -> Self {
        Derivation::new(Rational64::one(), m, 1)
    }

    pub fn mu(&self) -> Rational64 {
        self.mu
    }

    pub fn mu_scalar(&self) -> Scalar {
        Scalar::from_ratio(*self.mu.numer(), *self.mu.denom())
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn ramification(&self) -> u32 {
        self.b
    }

    pub fn is_delta_one(&self) -> bool {
        self.m == 1 && self.mu == Rational64::new(1, self.b as i64)
    }

    /// The same derivation seen on `C((s^(1/q)))`.
    pub fn lift(&self, q: u32) -> Self {
        Derivation::new(self.mu / q as i64, q as i64 * (self.m - 1) + 1, self.b * q)
    }

    pub fn lift_to(&self, b: u32) -> Self {
        assert!(b % self.b == 0, "cannot lift ramification {} to {}", self.b, b);
        self.lift(b / self.b)
    }

    /// The exponent `m_t` with `delta ~ t^(m_t) d/dt` on the unramified scale.
    pub fn t_scale_m(&self) -> Rational64 {
        Rational64::one() + Rational64::new(self.m - 1, self.b as i64)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*s^{}*d/ds, s=t^(1/{})", self.mu, self.m, self.b)
    }
}

#[derive(Clone, Debug)]
pub struct PuiseuxSeries {
    ram: u32,
    start: i64,
    coeffs: Vec<Scalar>,
    prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

impl PuiseuxSeries {
    pub fn new(ram: u32, start: i64, coeffs: Vec<Scalar>, prec: Option<i64>) -> Self {
        assert!(ram >= 1, "ramification must be positive");
        PuiseuxSeries {
            ram,
            start,
            coeffs,
            prec,
        }
        .normalized()
    }

    pub fn zero(ram: u32) -> Self {
        PuiseuxSeries::new(ram, 0, Vec::new(), None)
    }

    /// A series about which only "zero below `s^prec`" is known.
    pub fn zero_to(ram: u32, prec: i64) -> Self {
        PuiseuxSeries::new(ram, 0, Vec::new(), Some(prec))
    }

    pub fn one(ram: u32) -> Self {
        PuiseuxSeries::constant(Scalar::one(), ram)
    }

    pub fn constant(c: Scalar, ram: u32) -> Self {
        PuiseuxSeries::new(ram, 0, vec![c], None)
    }

    pub fn from_int(n: i64) -> Self {
        PuiseuxSeries::constant(Scalar::from_int(n), 1)
    }

    /// `c * s^exp` with `s = t^(1/ram)`.
    pub fn monomial(c: Scalar, exp: i64, ram: u32) -> Self {
        PuiseuxSeries::new(ram, exp, vec![c], None)
    }

    /// `c * t^r` for a rational exponent, at the smallest fitting ramification.
    pub fn t_power(c: Scalar, r: Rational64) -> Self {
        let ram = *r.denom() as u32;
        PuiseuxSeries::monomial(c, *r.numer(), ram)
    }

    /// Builds an exact series from `(t-exponent, coefficient)` pairs.
    pub fn from_terms(terms: &[(Rational64, Scalar)]) -> Self {
        let ram = terms.iter().fold(1u32, |acc, (e, _)| lcm(acc, *e.denom() as u32));
        terms.iter().fold(PuiseuxSeries::zero(ram), |acc, (e, c)| {
            &acc + &PuiseuxSeries::t_power(c.clone(), *e)
        })
    }

    fn normalized(mut self) -> Self {
        if let Some(p) = self.prec {
            let keep = (p - self.start).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.start = 0;
        }
        self
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    /// Absolute precision in units of `1/b`; `None` for exact series.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    /// Absolute precision on the `t` scale.
    pub fn precision_t(&self) -> Option<Rational64> {
        self.prec.map(|p| Rational64::new(p, self.ram as i64))
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Zero to precision: every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// Valuation in units of `1/b`, `None` when zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    pub fn valuation_t(&self) -> Option<Rational64> {
        self.valuation().map(|v| Rational64::new(v, self.ram as i64))
    }

    /// Lower bound on the valuation: the valuation, or the precision of a
    /// series that is zero to precision. `None` for the exact zero.
    fn valuation_bound(&self) -> Option<i64> {
        self.valuation().or(self.prec)
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.coeffs.first()
    }

    /// Coefficient of `s^e`. Callers are responsible for `e < precision`.
    pub fn coeff(&self, e: i64) -> Scalar {
        if e < self.start {
            return Scalar::zero();
        }
        self.coeffs
            .get((e - self.start) as usize)
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Non-zero terms `(exponent in units of 1/b, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.start + k as i64, c))
    }

    /// Highest stored exponent, if any.
    pub fn max_exponent(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.start + self.coeffs.len() as i64 - 1)
    }

    pub fn backend(&self) -> Backend {
        if self.coeffs.iter().all(Scalar::is_exact) {
            Backend::Exact
        } else {
            Backend::Float
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Self {
        PuiseuxSeries::new(
            self.ram,
            self.start,
            self.coeffs.iter().map(|c| c.to_backend(backend)).collect(),
            self.prec,
        )
    }

    /// The same element of `C((t^(1/(b q))))`: exponents and precision scale by `q`.
    pub fn ramify(&self, q: u32) -> Self {
        assert!(q >= 1);
        if q == 1 {
            return self.clone();
        }
        let q64 = q as i64;
        let mut coeffs = Vec::with_capacity(self.coeffs.len() * q as usize);
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                coeffs.extend(std::iter::repeat(Scalar::zero()).take(q as usize - 1));
            }
            coeffs.push(c.clone());
        }
        PuiseuxSeries::new(self.ram * q, self.start * q64, coeffs, self.prec.map(|p| p * q64))
    }

    pub fn lift_to(&self, ram: u32) -> Self {
        assert!(ram % self.ram == 0, "cannot lift ramification {} to {}", self.ram, ram);
        self.ramify(ram / self.ram)
    }

    fn aligned<'a>(a: &'a Self, b: &'a Self) -> (Cow<'a, Self>, Cow<'a, Self>) {
        if a.ram == b.ram {
            return (Cow::Borrowed(a), Cow::Borrowed(b));
        }
        let r = lcm(a.ram, b.ram);
        (Cow::Owned(a.lift_to(r)), Cow::Owned(b.lift_to(r)))
    }

    /// Drops every coefficient at `s^e` with `e >= prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        if self.prec.is_some_and(|p| p <= prec) {
            return self.clone();
        }
        PuiseuxSeries::new(self.ram, self.start, self.coeffs.clone(), Some(prec))
    }

    /// Truncates at absolute `t`-exponent `prec_t`.
    pub fn truncate_t(&self, prec_t: i64) -> Self {
        self.truncate(prec_t * self.ram as i64)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() && c.is_exact() {
            // exact zero times anything known is zero where known
            return match self.valuation_bound() {
                None => PuiseuxSeries::zero(self.ram),
                Some(_) => PuiseuxSeries::new(self.ram, 0, Vec::new(), None),
            };
        }
        PuiseuxSeries::new(
            self.ram,
            self.start,
            self.coeffs.iter().map(|a| a * c).collect(),
            self.prec,
        )
    }

    /// Multiplication by `s^k`.
    pub fn shift(&self, k: i64) -> Self {
        PuiseuxSeries::new(self.ram, self.start + k, self.coeffs.clone(), self.prec.map(|p| p + k))
    }

    fn add_impl(a: &Self, b: &Self, negate_b: bool) -> Self {
        let (a, b) = Self::aligned(a, b);
        let prec = min_prec(a.prec, b.prec);
        let bounds = [a.max_exponent(), b.max_exponent()];
        let hi = bounds.iter().flatten().max().copied();
        let lo = [a.valuation(), b.valuation()].iter().flatten().min().copied();
        let (Some(lo), Some(mut hi)) = (lo, hi) else {
            return PuiseuxSeries::new(a.ram, 0, Vec::new(), prec);
        };
        if let Some(p) = prec {
            hi = hi.min(p - 1);
        }
        if hi < lo {
            return PuiseuxSeries::new(a.ram, 0, Vec::new(), prec);
        }
        let coeffs = (lo..=hi)
            .map(|e| {
                let y = b.coeff(e);
                if negate_b {
                    &a.coeff(e) - &y
                } else {
                    &a.coeff(e) + &y
                }
            })
            .collect();
        PuiseuxSeries::new(a.ram, lo, coeffs, prec)
    }

    fn mul_impl(a: &Self, b: &Self) -> Self {
        let (a, b) = Self::aligned(a, b);
        let ram = a.ram;
        let (va, vb) = match (a.valuation_bound(), b.valuation_bound()) {
            (None, _) | (_, None) => return PuiseuxSeries::zero(ram),
            (Some(x), Some(y)) => (x, y),
        };
        let prec = min_prec(a.prec.map(|p| p + vb), b.prec.map(|p| p + va));
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return PuiseuxSeries::new(ram, 0, Vec::new(), prec);
        }
        let start = a.start + b.start;
        let mut len = a.coeffs.len() + b.coeffs.len() - 1;
        if let Some(p) = prec {
            len = len.min((p - start).max(0) as usize);
        }
        let mut out = vec![Scalar::zero(); len];
        for (i, x) in a.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
                if y.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        PuiseuxSeries::new(ram, start, out, prec)
    }

    /// Multiplicative inverse. Exact non-monomial inputs have infinite
    /// inverses; they are truncated at absolute `t`-exponent `limit_t`, which
    /// also caps the natural precision `P - 2v` of inexact inputs.
    pub fn invert(&self, limit_t: i64) -> Result<Self> {
        let v = self.valuation().ok_or(Error::ZeroDivision)?;
        let a0_inv = self.coeffs[0].inv().ok_or(Error::ZeroDivision)?;
        if self.prec.is_none() && self.coeffs.len() == 1 {
            return Ok(PuiseuxSeries::monomial(a0_inv, -v, self.ram));
        }
        let limit = limit_t * self.ram as i64;
        let natural = self.prec.map(|p| p - 2 * v);
        let prec = min_prec(natural, Some(limit)).unwrap().max(-v + 1);
        let n = (prec + v) as usize;
        let mut out: Vec<Scalar> = Vec::with_capacity(n);
        out.push(a0_inv.clone());
        let neg = -&a0_inv;
        for k in 1..n {
            let mut acc = Scalar::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                let aj = &self.coeffs[j];
                if aj.is_zero() || out[k - j].is_zero() {
                    continue;
                }
                acc = &acc + &(aj * &out[k - j]);
            }
            out.push(&neg * &acc);
        }
        Ok(PuiseuxSeries::new(self.ram, -v, out, Some(prec)))
    }

    /// Applies the derivation. The series is lifted to the derivation's
    /// ramification when that is a multiple of its own.
    pub fn derive(&self, d: &Derivation) -> Self {
        let a = if self.ram == d.b {
            Cow::Borrowed(self)
        } else {
            Cow::Owned(self.lift_to(d.b))
        };
        let mu = d.mu_scalar();
        let shift = d.m - 1;
        let coeffs = a
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = a.start + k as i64;
                if e == 0 || c.is_zero() {
                    Scalar::zero()
                } else {
                    &(&mu * &Scalar::from_int(e)) * c
                }
            })
            .collect();
        PuiseuxSeries::new(d.b, a.start + shift, coeffs, a.prec.map(|p| p + shift))
    }

    /// Solves `d^order(y) = self` for a derivation of the form `mu * s d/ds`,
    /// choosing the solution without constant term.
    pub fn integrate(&self, d: &Derivation, order: u32) -> Result<Self> {
        if d.m != 1 {
            return Err(Error::Unsupported(format!("integration needs m = 1, got {d}")));
        }
        let a = if self.ram == d.b {
            Cow::Borrowed(self)
        } else {
            Cow::Owned(self.lift_to(d.b))
        };
        if a.prec.map_or(true, |p| p > 0) && !a.coeff(0).is_zero() {
            return Err(Error::NotIntegrable(format!("constant term {}", a.coeff(0))));
        }
        let mu = d.mu_scalar();
        let coeffs = a
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = a.start + k as i64;
                if e == 0 {
                    Scalar::zero()
                } else {
                    c / &(&mu * &Scalar::from_int(e)).pow(order)
                }
            })
            .collect();
        Ok(PuiseuxSeries::new(d.b, a.start, coeffs, a.prec))
    }

    /// The unit `u = 1 + O(s)` with `u^(-1) d(u) = self`, for `d = mu s d/ds`
    /// and `self` of positive valuation.
    pub fn exp_integral(&self, d: &Derivation, limit_t: i64) -> Result<Self> {
        if d.m != 1 {
            return Err(Error::Unsupported(format!("exp_integral needs m = 1, got {d}")));
        }
        let w = if self.ram == d.b {
            Cow::Borrowed(self)
        } else {
            Cow::Owned(self.lift_to(d.b))
        };
        if w.valuation().is_some_and(|v| v < 1) {
            return Err(Error::NotIntegrable(
                "logarithmic derivative of a unit has positive valuation".into(),
            ));
        }
        let limit = limit_t * d.b as i64;
        let prec = min_prec(w.prec, Some(limit)).unwrap().max(1);
        if w.is_zero() {
            return Ok(PuiseuxSeries::one(d.b).truncate(prec));
        }
        let mu = d.mu_scalar();
        let mut u = vec![Scalar::one()];
        for e in 1..prec {
            let mut acc = Scalar::zero();
            for l in 1..=e {
                let wl = w.coeff(l);
                if wl.is_zero() {
                    continue;
                }
                acc = &acc + &(&wl * &u[(e - l) as usize]);
            }
            u.push(&acc / &(&mu * &Scalar::from_int(e)));
        }
        Ok(PuiseuxSeries::new(d.b, 0, u, Some(prec)))
    }

    /// Terms of negative valuation plus the constant term reduced into
    /// `[0, 1/b)` along the real axis: the canonical representative of the
    /// similarity class under `t d/dt` on `C((t^(1/b)))`. Returns the
    /// representative and the integer `k` with `const(self) - const(rep) = k/b`.
    pub fn similarity_representative(&self) -> Result<(Self, i64)> {
        if self.prec.is_some_and(|p| p <= 0) {
            return Err(Error::PrecisionExhausted("constant term of eigenvalue unknown".into()));
        }
        let mut terms: Vec<Scalar> = Vec::new();
        let lo = self.valuation().unwrap_or(0).min(0);
        for e in lo..0 {
            terms.push(self.coeff(e));
        }
        let (c0, k) = self.coeff(0).reduce_re_mod(self.ram as i64);
        terms.push(c0);
        Ok((PuiseuxSeries::new(self.ram, lo, terms, None), k))
    }

    /// `true` when every non-zero exponent is a multiple of `b`, i.e. the
    /// series is fixed by `s -> zeta_b s` and lies in `C((t))`.
    pub fn is_galois_invariant(&self) -> bool {
        self.terms().all(|(e, _)| e % self.ram as i64 == 0)
    }

    /// Compares two series on their common window of known coefficients.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// Textual form accepted by the expression parser (no precision marker).
    pub fn to_expr_string(&self) -> String {
        let mut out = String::new();
        for (e, c) in self.terms() {
            let r = Rational64::new(e, self.ram as i64);
            let (neg, mag) = if c.is_negative_real() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let cs = if mag.is_compound() {
                format!("({mag})")
            } else {
                mag.to_string()
            };
            if r.is_zero() {
                out.push_str(&cs);
                continue;
            }
            let ts = if r.is_one() {
                "t".to_string()
            } else if r.is_integer() {
                format!("t^{}", r.numer())
            } else {
                format!("t^({}/{})", r.numer(), r.denom())
            };
            if mag.is_one() {
                out.push_str(&ts);
            } else {
                out.push_str(&format!("{cs}*{ts}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Similarity under `t d/dt`: `a ~ b` iff `a - b = c^(-1) d(c)` for some
/// non-zero `c`. Over `C((t^(1/b)))` the logarithmic derivatives are exactly
/// `(1/b) Z + s C[[s]]`, so the test is: `v(a - b) >= 0` and the constant
/// term of `a - b` lies in `(1/b) Z`.
pub fn is_similar(a: &PuiseuxSeries, b: &PuiseuxSeries) -> bool {
    let diff = a - b;
    if diff.valuation().is_some_and(|v| v < 0) {
        return false;
    }
    let unit = Scalar::from_ratio(1, diff.ram as i64);
    diff.coeff(0).integer_multiple_of(&unit).is_some()
}

/// A non-zero `c` with `a - b = c^(-1) d(c)` for `d = t d/dt`, when one exists.
pub fn similarity_witness(a: &PuiseuxSeries, b: &PuiseuxSeries, limit_t: i64) -> Option<PuiseuxSeries> {
    if !is_similar(a, b) {
        return None;
    }
    let diff = a - b;
    let ram = diff.ram;
    let unit = Scalar::from_ratio(1, ram as i64);
    let k = diff.coeff(0).integer_multiple_of(&unit)?;
    let tail = &diff - &PuiseuxSeries::constant(diff.coeff(0), ram);
    let u = tail.exp_integral(&Derivation::delta_one(ram), limit_t).ok()?;
    Some(u.shift(k))
}

impl PartialEq for PuiseuxSeries {
    /// Structural equality: same precision and same stored coefficients.
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::aligned(self, other);
        a.prec == b.prec && a.start == b.start && a.coeffs == b.coeffs
    }
}

impl<'a> Add<&'a PuiseuxSeries> for &'a PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: &'a PuiseuxSeries) -> PuiseuxSeries {
        PuiseuxSeries::add_impl(self, rhs, false)
    }
}

impl<'a> Sub<&'a PuiseuxSeries> for &'a PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: &'a PuiseuxSeries) -> PuiseuxSeries {
        PuiseuxSeries::add_impl(self, rhs, true)
    }
}

impl<'a> Mul<&'a PuiseuxSeries> for &'a PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: &'a PuiseuxSeries) -> PuiseuxSeries {
        PuiseuxSeries::mul_impl(self, rhs)
    }
}

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        self.scale(&Scalar::from_int(-1))
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self.to_expr_string();
        match self.precision_t() {
            None => write!(f, "{body}"),
            Some(p) => {
                let ps = if p.is_integer() {
                    p.numer().to_string()
                } else {
                    format!("({p})")
                };
                if self.is_zero() {
                    write!(f, "O(t^{ps})")
                } else {
                    write!(f, "{body} + O(t^{ps})")
                }
            }
        }
    }
}
