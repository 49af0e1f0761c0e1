//! Exact Gaussian rationals `(re + im i) / den` over arbitrary-precision
//! integers, kept with `den > 0` and `gcd(re, im, den) = 1`.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use malachite_base::num::arithmetic::traits::{CheckedSqrt, DivExact, DivMod, Gcd, Pow};
use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::num::logic::traits::SignificantBits;
use malachite_base::rounding_modes::RoundingMode;
use malachite_nz::integer::Integer;
use malachite_nz::natural::Natural;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    re: Integer,
    im: Integer,
    den: Integer,
}

fn int(n: i64) -> Integer {
    Integer::from(n)
}

fn gcd(a: &Integer, b: &Integer) -> Integer {
    Integer::from(a.unsigned_abs_ref().gcd(b.unsigned_abs_ref()))
}

fn is_unit(n: &Integer) -> bool {
    *n == 1 || *n == -1
}

/// `n / d` reduced, with `d > 0`.
fn reduced(n: &Integer, d: &Integer) -> (Integer, Integer) {
    let g = gcd(n, d);
    if is_unit(&g) {
        (n.clone(), d.clone())
    } else {
        (n.clone().div_exact(&g), d.clone().div_exact(&g))
    }
}

fn ratio_to_f64(n: &Integer, d: &Integer) -> f64 {
    // scale both down so that neither conversion overflows
    let bits = n.significant_bits().max(d.significant_bits());
    let shift = bits.saturating_sub(1000);
    let (n, d) = if shift > 0 {
        (n >> shift, d >> shift)
    } else {
        (n.clone(), d.clone())
    };
    let nf = f64::rounding_from(&n, RoundingMode::Nearest).0;
    let df = f64::rounding_from(&d, RoundingMode::Nearest).0;
    nf / df
}

impl GaussRat {
    /// Builds `(re + im i) / den`; panics when `den` is zero.
    pub fn new(re: Integer, im: Integer, den: Integer) -> Self {
        assert!(den != 0, "zero denominator");
        let (re, im, den) = if den < 0 { (-re, -im, -den) } else { (re, im, den) };
        GaussRat { re, im, den }.normalized()
    }

    /// `a/b + (c/d) i` from machine integers.
    pub fn from_parts(a: i128, b: i128, c: i128, d: i128) -> Self {
        let big = |x: i128| Integer::from(x);
        GaussRat::new(big(a) * big(d), big(c) * big(b), big(b) * big(d))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        GaussRat::new(int(n), int(0), int(d))
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat {
            re: int(n),
            im: int(0),
            den: int(1),
        }
    }

    pub fn zero() -> Self {
        GaussRat::from_int(0)
    }

    pub fn i() -> Self {
        GaussRat {
            re: int(0),
            im: int(1),
            den: int(1),
        }
    }

    fn normalized(mut self) -> Self {
        if self.den == 1 {
            return self;
        }
        self.divide_common(&self.den.clone());
        self
    }

    /// Divides out `gcd(re, im, bound)`, where `bound` is a multiple of
    /// every prime that can be common to all three fields.
    fn divide_common(&mut self, bound: &Integer) {
        let mut g = gcd(bound, &self.re);
        if is_unit(&g) {
            return;
        }
        g = gcd(&g, &self.im);
        if is_unit(&g) {
            return;
        }
        self.re = std::mem::take(&mut self.re).div_exact(&g);
        self.im = std::mem::take(&mut self.im).div_exact(&g);
        self.den = std::mem::take(&mut self.den).div_exact(&g);
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_one(&self) -> bool {
        self.re == 1 && self.im == 0 && self.den == 1
    }

    pub fn is_integer(&self) -> bool {
        self.im == 0 && self.den == 1
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    /// Real part as `(numerator, denominator)` in lowest terms.
    pub fn re(&self) -> (Integer, Integer) {
        reduced(&self.re, &self.den)
    }

    pub fn im(&self) -> (Integer, Integer) {
        reduced(&self.im, &self.den)
    }

    pub fn re_sign(&self) -> Ordering {
        self.re.cmp(&int(0))
    }

    pub fn im_sign(&self) -> Ordering {
        self.im.cmp(&int(0))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (ratio_to_f64(&self.re, &self.den), ratio_to_f64(&self.im, &self.den))
    }

    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -&self.im,
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(
            GaussRat {
                re: &self.re * &self.den,
                im: -(&self.im * &self.den),
                den: norm,
            }
            .normalized(),
        )
    }

    pub fn cmp_re(&self, other: &Self) -> Ordering {
        (&self.re * &other.den).cmp(&(&other.re * &self.den))
    }

    pub fn cmp_im(&self, other: &Self) -> Ordering {
        (&self.im * &other.den).cmp(&(&other.im * &self.den))
    }

    /// The integer `self` as an `i64`, if it is one.
    pub fn to_i64(&self) -> Option<i64> {
        if self.im == 0 && self.den == 1 {
            i64::try_from(&self.re).ok()
        } else {
            None
        }
    }

    /// `floor(Re(self) * k)`.
    pub fn floor_re_times(&self, k: i64) -> Option<i64> {
        let (q, _) = (&self.re * int(k)).div_mod(&self.den);
        i64::try_from(&q).ok()
    }

    /// Square root in `Q(i)`, if there is one. With `z = w / d`,
    /// `sqrt(z) = sqrt(w d) / d`, and a Gaussian integer has a square root in
    /// `Q(i)` only if it has one in `Z[i]`.
    pub fn sqrt(&self) -> Option<Self> {
        let a = &self.re * &self.den;
        let b = &self.im * &self.den;
        let m = (&a * &a + &b * &b).checked_sqrt()?;
        let half = |v: Integer| -> Option<Integer> {
            let (q, r) = v.div_mod(int(2));
            if r != 0 {
                return None;
            }
            q.checked_sqrt()
        };
        let x = half(&m + &a)?;
        let mut y = half(&m - &a)?;
        if b < 0 {
            y = -y;
        }
        Some(GaussRat::new(x, y, self.den.clone()))
    }

    /// `10^k` as a denominator, for exact decimal literals.
    pub fn decimal(digits: Integer, k: u64) -> Self {
        GaussRat::new(digits, int(0), Integer::from(Natural::from(10u32).pow(k)))
    }
}

fn add_sub(a: &GaussRat, b: &GaussRat, negate: bool) -> GaussRat {
    let comb = |x: &Integer, y: &Integer| if negate { x - y } else { x + y };
    if a.den == b.den {
        let mut out = GaussRat {
            re: comb(&a.re, &b.re),
            im: comb(&a.im, &b.im),
            den: a.den.clone(),
        };
        let bound = out.den.clone();
        if bound != 1 {
            out.divide_common(&bound);
        }
        return out;
    }
    let g = gcd(&a.den, &b.den);
    if is_unit(&g) {
        // coprime denominators leave nothing to cancel
        return GaussRat {
            re: comb(&(&a.re * &b.den), &(&b.re * &a.den)),
            im: comb(&(&a.im * &b.den), &(&b.im * &a.den)),
            den: &a.den * &b.den,
        };
    }
    let ea = a.den.clone().div_exact(&g);
    let eb = b.den.clone().div_exact(&g);
    let mut out = GaussRat {
        re: comb(&(&a.re * &eb), &(&b.re * &ea)),
        im: comb(&(&a.im * &eb), &(&b.im * &ea)),
        den: &ea * &b.den,
    };
    // a common prime cannot divide ea or eb, so it divides g
    out.divide_common(&g);
    out
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        add_sub(self, rhs, false)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        add_sub(self, rhs, true)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        let (a, b) = (self, rhs);
        let out = if a.im == 0 && b.im == 0 {
            GaussRat {
                re: &a.re * &b.re,
                im: int(0),
                den: &a.den * &b.den,
            }
        } else {
            GaussRat {
                re: &a.re * &b.re - &a.im * &b.im,
                im: &a.re * &b.im + &a.im * &b.re,
                den: &a.den * &b.den,
            }
        };
        out.normalized()
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -&self.re,
            im: -&self.im,
            den: self.den.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i128, b: i128, c: i128, d: i128) -> GaussRat {
        GaussRat::from_parts(a, b, c, d)
    }

    #[test]
    fn normal_form_is_canonical() {
        assert_eq!(g(2, 4, 6, 4), g(1, 2, 3, 2));
        assert_eq!(g(-1, -2, 0, 1), g(1, 2, 0, 1));
        assert_eq!(&g(1, 2, 0, 1) + &g(1, 2, 0, 1), GaussRat::from_int(1));
        assert_eq!(&g(1, 6, 1, 4) - &g(1, 6, 1, 4), GaussRat::zero());
        // (1+i)(1-i) = 2 cancels against a denominator 2
        assert_eq!(&g(1, 2, 1, 2) * &g(1, 1, -1, 1), GaussRat::from_int(1));
    }

    #[test]
    fn field_operations_against_machine_arithmetic() {
        let a = g(3, 4, -5, 6);
        let b = g(-7, 10, 1, 3);
        let (ar, ai) = a.to_f64_pair();
        let (br, bi) = b.to_f64_pair();
        let close = |z: &GaussRat, re: f64, im: f64| {
            let (x, y) = z.to_f64_pair();
            (x - re).abs() < 1e-12 && (y - im).abs() < 1e-12
        };
        assert!(close(&(&a + &b), ar + br, ai + bi));
        assert!(close(&(&a - &b), ar - br, ai - bi));
        assert!(close(&(&a * &b), ar * br - ai * bi, ar * bi + ai * br));
        assert!((&a * &a.inv().unwrap()).is_one());
        assert_eq!(GaussRat::zero().inv(), None);
    }

    #[test]
    fn square_roots() {
        let z = g(3, 4, 0, 1);
        let r = &z * &z;
        let s = r.sqrt().unwrap();
        assert!(s == z || s == -&z);
        assert_eq!(g(-9, 4, 0, 1).sqrt(), Some(g(0, 1, 3, 2)));
        assert_eq!(g(2, 1, 0, 1).sqrt(), None);
        let w = g(1, 3, -2, 5);
        let ws = (&w * &w).sqrt().unwrap();
        assert_eq!(&ws * &ws, &w * &w);
    }

    #[test]
    fn floor_and_order() {
        assert_eq!(g(7, 3, 1, 1).floor_re_times(2), Some(4));
        assert_eq!(g(-1, 2, 0, 1).floor_re_times(1), Some(-1));
        assert_eq!(g(1, 3, 5, 1).cmp_re(&g(1, 2, -5, 1)), Ordering::Less);
        assert_eq!(g(6, 2, 0, 1).to_i64(), Some(3));
        assert_eq!(g(1, 2, 0, 1).to_i64(), None);
    }

    #[test]
    fn huge_values_convert_to_floats() {
        let big = Integer::from(10u32).pow(400);
        let z = GaussRat::new(&big * int(3), int(0), &big * int(2));
        assert_eq!(z.to_f64_pair(), (1.5, 0.0));
    }
}
