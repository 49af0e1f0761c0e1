//! Elements of the coefficient field C.
//!
//! Two backends share one type: exact Gaussian rationals `Q(i)` and
//! double-precision complex floats. Mixed arithmetic promotes to float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use malachite_nz::integer::Integer;
use num_complex::Complex;

pub use super::gauss::GaussRat;

const DEFAULT_EPSILON: f64 = 1e-9;

// zero means "unset", i.e. the default
static EPSILON_BITS: AtomicU64 = AtomicU64::new(0);

/// Tolerance used by every float-backend comparison.
pub fn epsilon() -> f64 {
    match EPSILON_BITS.load(AtomicOrdering::Relaxed) {
        0 => DEFAULT_EPSILON,
        bits => f64::from_bits(bits),
    }
}

pub fn set_epsilon(eps: f64) {
    assert!(eps > 0.0 && eps.is_finite(), "epsilon must be positive");
    EPSILON_BITS.store(eps.to_bits(), AtomicOrdering::Relaxed);
}

pub fn reset_epsilon() {
    EPSILON_BITS.store(0, AtomicOrdering::Relaxed);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(GaussRat),
    Float(Complex<f64>),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(GaussRat::zero())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::Exact(GaussRat::i())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(GaussRat::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(GaussRat::from_ratio(n, d))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn to_complex(&self) -> Complex<f64> {
        match self {
            Scalar::Exact(z) => {
                let (re, im) = z.to_f64_pair();
                Complex::new(re, im)
            }
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex())
    }

    pub fn to_backend(&self, backend: Backend) -> Scalar {
        match backend {
            Backend::Exact => self.clone(),
            Backend::Float => self.to_float(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.is_zero(),
            Scalar::Float(z) => z.norm() <= epsilon(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.is_one(),
            Scalar::Float(z) => (z - Complex::new(1.0, 0.0)).norm() <= epsilon(),
        }
    }

    /// Real part as an f64, for ordering and display of float values.
    pub fn re_f64(&self) -> f64 {
        self.to_complex().re
    }

    pub fn im_f64(&self) -> f64 {
        self.to_complex().im
    }

    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            Scalar::Exact(z) => Some(z),
            Scalar::Float(_) => None,
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(z.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// Multiplicative inverse, `None` on zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Exact(z) => Scalar::Exact(z.inv()?),
            Scalar::Float(z) => Scalar::Float(z.inv()),
        })
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// If `self = k * unit` for an integer `k`, returns `k`.
    ///
    /// Float values are accepted within epsilon of an integer multiple.
    pub fn integer_multiple_of(&self, unit: &Scalar) -> Option<i64> {
        let q = self / unit;
        match &q {
            Scalar::Exact(z) => z.to_i64(),
            Scalar::Float(z) => {
                let k = z.re.round();
                if z.im.abs() <= epsilon() && (z.re - k).abs() <= epsilon() * z.re.abs().max(1.0) {
                    Some(k as i64)
                } else {
                    None
                }
            }
        }
    }

    /// Reduces the real part into `[0, unit)` modulo integer multiples of
    /// `unit` (a positive rational, passed as `1/den`). Returns the reduced
    /// value together with the integer `k` that was subtracted.
    pub fn reduce_re_mod(&self, den: i64) -> (Scalar, i64) {
        match self {
            Scalar::Exact(z) => {
                let k = z.floor_re_times(den).expect("similarity shift out of range");
                (Scalar::Exact(z - &GaussRat::from_ratio(k, den)), k)
            }
            Scalar::Float(z) => {
                let scaled = z.re * den as f64;
                let mut k = scaled.floor();
                // snap values that sit within epsilon below an integer
                if (scaled - (k + 1.0)).abs() <= epsilon() * scaled.abs().max(1.0) {
                    k += 1.0;
                }
                let re = z.re - k / den as f64;
                (Scalar::Float(Complex::new(re, z.im)), k as i64)
            }
        }
    }

    /// Approximate equality: exact for exact scalars, epsilon-based (relative
    /// once magnitudes exceed one) as soon as a float is involved.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let a = self.to_complex();
                let b = other.to_complex();
                let scale = a.norm().max(b.norm()).max(1.0);
                (a - b).norm() <= epsilon() * scale
            }
        }
    }
}

/// Total preorder by real part, ties broken by imaginary part ascending.
pub fn re_less(a: &Scalar, b: &Scalar) -> bool {
    re_cmp(a, b) == Ordering::Less
}

pub fn re_cmp(a: &Scalar, b: &Scalar) -> Ordering {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x.cmp_re(y).then_with(|| x.cmp_im(y)),
        _ => {
            let x = a.to_complex();
            let y = b.to_complex();
            let eps = epsilon();
            let cmp_f = |p: f64, q: f64| {
                if (p - q).abs() <= eps * p.abs().max(q.abs()).max(1.0) {
                    Ordering::Equal
                } else if p < q {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            };
            cmp_f(x.re, y.re).then_with(|| cmp_f(x.im, y.im))
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<GaussRat> for Scalar {
    fn from(z: GaussRat) -> Self {
        Scalar::Exact(z)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_complex() $op rhs.to_complex()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        let inv = rhs.inv().expect("scalar division by zero");
        self * &inv
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl<'a> Div<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        &self / rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(a) => Scalar::Float(-a),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn fmt_rational((n, d): (Integer, Integer)) -> String {
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

fn fmt_float(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('e') {
        format!("{x:.17}")
    } else {
        s
    }
}

impl Scalar {
    /// Whether the display form needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re_sign() != Ordering::Equal && !z.is_real(),
            Scalar::Float(z) => z.re != 0.0 && z.im != 0.0,
        }
    }

    /// `Some(true)` when the value is a negative real, used by printers.
    pub fn is_negative_real(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.is_real() && z.re_sign() == Ordering::Less,
            Scalar::Float(z) => z.im == 0.0 && z.re < 0.0,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im, re_zero, im_zero, im_one, im_neg) = match self {
            Scalar::Exact(z) => {
                let (n, d) = z.im();
                let one = d == 1 && (n == 1 || n == -1);
                let neg = n < 0;
                (
                    fmt_rational(z.re()),
                    fmt_rational((if neg { -n } else { n }, d)),
                    z.re_sign() == Ordering::Equal,
                    z.is_real(),
                    one,
                    neg,
                )
            }
            Scalar::Float(z) => (
                fmt_float(z.re),
                fmt_float(z.im.abs()),
                z.re == 0.0,
                z.im == 0.0,
                z.im.abs() == 1.0,
                z.im < 0.0,
            ),
        };
        if im_zero {
            return write!(f, "{re}");
        }
        let imag = if im_one { "i".to_string() } else { format!("{im}*i") };
        match (re_zero, im_neg) {
            (true, false) => write!(f, "{imag}"),
            (true, true) => write!(f, "-{imag}"),
            (false, false) => write!(f, "{re}+{imag}"),
            (false, true) => write!(f, "{re}-{imag}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_field_axioms_on_samples() {
        let a = Scalar::Exact(GaussRat::from_parts(1, 2, -3, 4));
        let b = Scalar::Exact(GaussRat::from_parts(5, 1, 2, 7));
        let c = Scalar::i();
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert_eq!(&a * &b, &b * &a);
        assert!((&a * &a.inv().unwrap()).is_one());
        assert_eq!(&c * &c, Scalar::from_int(-1));
    }

    #[test]
    fn re_less_examples() {
        assert!(re_less(&Scalar::from_int(-2), &Scalar::from_int(1)));
        let p = &Scalar::from_int(3) + &Scalar::i();
        let m = &Scalar::from_int(3) - &Scalar::i();
        assert!(!re_less(&p, &m));
        assert!(re_less(&m, &p));
        assert!(!re_less(&p, &p));
    }

    #[test]
    fn float_equality_uses_epsilon() {
        let a = Scalar::float(1.0, 0.0);
        let b = Scalar::float(1.0 + 1e-12, 0.0);
        assert_eq!(a, b);
        assert_ne!(a, Scalar::float(1.001, 0.0));
        assert_eq!(Scalar::from_int(1), a);
    }

    #[test]
    fn reduce_mod_and_integer_multiple() {
        let (r, k) = Scalar::from_ratio(7, 3).reduce_re_mod(2);
        assert_eq!(k, 4);
        assert_eq!(r, Scalar::from_ratio(1, 3));
        let (r, k) = Scalar::from_ratio(-1, 2).reduce_re_mod(1);
        assert_eq!((r, k), (Scalar::from_ratio(1, 2), -1));
        assert_eq!(
            Scalar::from_int(3).integer_multiple_of(&Scalar::from_ratio(1, 2)),
            Some(6)
        );
        assert_eq!(Scalar::from_ratio(1, 3).integer_multiple_of(&Scalar::one()), None);
        assert_eq!(Scalar::i().integer_multiple_of(&Scalar::one()), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_ratio(-3, 2).to_string(), "-3/2");
        assert_eq!(Scalar::i().to_string(), "i");
        assert_eq!((-Scalar::i()).to_string(), "-i");
        assert_eq!(Scalar::Exact(GaussRat::from_parts(1, 1, -2, 3)).to_string(), "1-2/3*i");
    }
}
