//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` of two `f64` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits (about 32 decimal digits) of significand. Basic
//! operations are built from the error-free transformations `two_sum` and
//! `two_prod` (the latter via fused multiply-add).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Double-double number `hi + lo`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
pub(crate) fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    /// Exact sum of two doubles.
    #[inline]
    pub fn sum_f64(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn prod_f64(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn signum(self) -> f64 {
        if self.hi > 0.0 {
            1.0
        } else if self.hi < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// Multiplication by `2^k`, exact barring overflow or underflow.
    #[inline]
    pub fn ldexp(self, k: i32) -> Dd {
        let s = pow2(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqr(self) -> Dd {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = e + 2.0 * self.hi * self.lo + self.lo * self.lo;
        Dd::new(p, e)
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            if self.hi == 0.0 {
                return Dd::ZERO;
            }
            return Dd::from_f64(f64::NAN);
        }
        // One Newton step on the f64 root doubles the number of correct bits.
        let x = self.hi.sqrt();
        let xx = Dd::prod_f64(x, x);
        let corr = (self - xx).hi / (2.0 * x);
        Dd::sum_f64(x, corr)
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// Natural exponential.
    pub fn exp(self) -> Dd {
        if self.hi > 709.78 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let m = (self.hi / std::f64::consts::LN_2).round();
        let r = (self - Dd::LN2 * m).ldexp(-10);
        // expm1(r) by Taylor series, |r| <= 3.4e-4.
        let mut term = r;
        let mut s = r;
        let mut k = 2.0;
        loop {
            term = term * r / k;
            s += term;
            if term.hi.abs() < 1e-36 * s.hi.abs().max(1e-300) || k > 30.0 {
                break;
            }
            k += 1.0;
        }
        // (1+s)^2 - 1 = s(2+s), applied ten times.
        for _ in 0..10 {
            s = s * (s + 2.0);
        }
        let e = s + 1.0;
        // Split the scaling to avoid overflow of 2^m for m near the limits.
        let m = m as i32;
        let half = m / 2;
        e.ldexp(half).ldexp(m - half)
    }

    /// Natural logarithm.
    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            if self.hi == 0.0 {
                return Dd::from_f64(f64::NEG_INFINITY);
            }
            return Dd::from_f64(f64::NAN);
        }
        if self.hi.is_infinite() {
            return self;
        }
        // x = 2^e m with m near 1, then a Newton step y <- y + m e^{-y} - 1.
        let e = self.hi.log2().round() as i32;
        let m = self.ldexp(-e);
        let y = Dd::from_f64(m.hi.ln());
        let ln_m = y + m * (-y).exp() - 1.0;
        ln_m + Dd::LN2 * e as f64
    }

    /// `ln(1 + x)` with `1 + x` formed in double-double.
    pub fn ln_1p(self) -> Dd {
        if self.hi.abs() < 1e-3 {
            // Series in u = x/(2+x): ln(1+x) = 2 atanh(u).
            let u = self / (self + 2.0);
            let u2 = u.sqr();
            let mut pow = u;
            let mut s = u;
            let mut k = 3.0;
            loop {
                pow *= u2;
                let t = pow / k;
                s += t;
                if t.hi.abs() <= 1e-34 * s.hi.abs() || k > 61.0 {
                    break;
                }
                k += 2.0;
            }
            return s * 2.0;
        }
        (self + 1.0).ln()
    }
}

fn pow2(k: i32) -> f64 {
    if (-1022..=1023).contains(&k) {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        2f64.powi(k)
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, b);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl DivAssign for Dd {
    fn div_assign(&mut self, b: Dd) {
        *self = *self / b;
    }
}

impl AddAssign<f64> for Dd {
    fn add_assign(&mut self, b: f64) {
        *self = *self + b;
    }
}

impl SubAssign<f64> for Dd {
    fn sub_assign(&mut self, b: f64) {
        *self = *self - b;
    }
}

impl MulAssign<f64> for Dd {
    fn mul_assign(&mut self, b: f64) {
        *self = *self * b;
    }
}

impl DivAssign<f64> for Dd {
    fn div_assign(&mut self, b: f64) {
        *self = *self / b;
    }
}

/// `ln Γ(x)` for `x > 0` in double-double precision.
///
/// Shifts the argument up to at least 50 and sums twelve terms of the Stirling
/// series; the truncation error there is below `1e-36` relative.
pub fn ln_gamma(x: Dd) -> Dd {
    const SHIFT_TO: f64 = 50.0;
    // B_{2k} as exact numerator/denominator pairs, k = 1..12.
    const BERNOULLI: [(f64, f64); 12] = [
        (1.0, 6.0),
        (-1.0, 30.0),
        (1.0, 42.0),
        (-1.0, 30.0),
        (5.0, 66.0),
        (-691.0, 2730.0),
        (7.0, 6.0),
        (-3617.0, 510.0),
        (43867.0, 798.0),
        (-174611.0, 330.0),
        (854513.0, 138.0),
        (-236364091.0, 2730.0),
    ];
    let mut x = x;
    let mut prod = Dd::ONE;
    let mut shifted = false;
    while x.hi < SHIFT_TO {
        prod *= x;
        x += 1.0;
        shifted = true;
    }
    let half_ln_2pi = (Dd::PI * 2.0).ln() * 0.5;
    let mut s = (x - 0.5) * x.ln() - x + half_ln_2pi;
    let inv = x.recip();
    let inv2 = inv.sqr();
    let mut pow = inv;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        let c = Dd::from_f64(num) / Dd::from_f64(den * (2.0 * k) * (2.0 * k - 1.0));
        s += c * pow;
        pow *= inv2;
    }
    if shifted {
        s -= prod.ln();
    }
    s
}
