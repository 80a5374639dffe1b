//! Quad-double arithmetic: an unevaluated sum of four non-overlapping
//! doubles, about 212 significant bits.
//!
//! Only what the coefficient pipeline needs is provided: the four basic
//! operations, square root and ordering. Sums and products are formed as
//! exact expansions and then rounded back to four components.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::dd::{quick_two_sum, two_prod, two_sum, Dd};
use crate::real::Real;

#[derive(Clone, Copy, PartialEq)]
pub struct Qd(pub [f64; 4]);

/// Adds `b` to the expansion `h` (increasing magnitude, non-overlapping).
fn grow(h: &mut [f64; 20], len: &mut usize, b: f64) {
    if b == 0.0 {
        return;
    }
    let mut q = b;
    let mut out = 0;
    for i in 0..*len {
        let (s, e) = two_sum(q, h[i]);
        q = s;
        if e != 0.0 {
            h[out] = e;
            out += 1;
        }
    }
    if q != 0.0 {
        h[out] = q;
        out += 1;
    }
    *len = out;
}

/// Rounds the exact sum of `terms` to a quad-double.
fn from_terms(terms: &[f64]) -> Qd {
    let mut h = [0.0; 20];
    let mut len = 0;
    for &t in terms {
        grow(&mut h, &mut len, t);
    }
    if len == 0 {
        return Qd::ZERO;
    }
    // Largest first, then fold the tail into at most four pieces.
    let mut c = [0.0; 5];
    let n = len.min(5);
    for (k, slot) in c.iter_mut().take(n).enumerate() {
        *slot = h[len - 1 - k];
    }
    // Components below the fifth are below the precision kept.
    renorm(c)
}

fn renorm(c: [f64; 5]) -> Qd {
    let mut s = c[4];
    let mut t = [0.0; 5];
    for i in (0..4).rev() {
        let (hi, lo) = quick_two_sum(c[i], s);
        s = hi;
        t[i + 1] = lo;
    }
    t[0] = s;
    let mut out = [0.0; 4];
    let mut k = 0;
    let mut acc = t[0];
    for &x in &t[1..] {
        let (hi, lo) = quick_two_sum(acc, x);
        if lo != 0.0 {
            out[k] = hi;
            k += 1;
            if k == 4 {
                return Qd(out);
            }
            acc = lo;
        } else {
            acc = hi;
        }
    }
    out[k] = acc;
    Qd(out)
}

impl Qd {
    pub const ZERO: Qd = Qd([0.0; 4]);

    pub fn from_f64(x: f64) -> Qd {
        Qd([x, 0.0, 0.0, 0.0])
    }

    pub fn from_dd(x: Dd) -> Qd {
        from_terms(&[x.hi, x.lo])
    }

    pub fn to_f64(self) -> f64 {
        self.0[0] + self.0[1]
    }

    pub fn to_dd(self) -> Dd {
        let (hi, lo) = quick_two_sum(self.0[0], self.0[1]);
        Dd::new(hi, lo + self.0[2])
    }
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        from_terms(&[a[3], b[3], a[2], b[2], a[1], b[1], a[0], b[0]])
    }
}

impl Sub for Qd {
    type Output = Qd;
    fn sub(self, b: Qd) -> Qd {
        self + -b
    }
}

impl Neg for Qd {
    type Output = Qd;
    fn neg(self) -> Qd {
        Qd([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let mut terms = [0.0; 16];
        let mut n = 0;
        // Order-3 products in plain double, smallest first.
        for i in 0..4 {
            terms[n] = a[i] * b[3 - i];
            n += 1;
        }
        for order in (0..3).rev() {
            for i in 0..=order {
                let (p, e) = two_prod(a[i], b[order - i]);
                terms[n] = e;
                terms[n + 1] = p;
                n += 2;
            }
        }
        from_terms(&terms[..n])
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, b: Qd) -> Qd {
        let mut r = self;
        let mut q = [0.0; 5];
        for qi in q.iter_mut() {
            *qi = r.0[0] / b.0[0];
            r = r - b * Qd::from_f64(*qi);
        }
        let mut terms = q;
        terms.reverse();
        from_terms(&terms)
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Qd) -> Option<Ordering> {
        let d = *self - *other;
        d.0[0].partial_cmp(&0.0)
    }
}

impl fmt::Debug for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "Qd({a:e} + {b:e} + {c:e} + {d:e})")
    }
}

impl Real for Qd {
    fn from_f64(x: f64) -> Self {
        Qd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Qd::to_f64(self)
    }
    fn sqrt(self) -> Self {
        if self.0[0] <= 0.0 {
            return if self.0[0] == 0.0 { Qd::ZERO } else { Qd::from_f64(f64::NAN) };
        }
        // One Newton step from the double-double root.
        let x = Qd::from_dd(self.to_dd().sqrt());
        x + (self - x * x) / (x * Qd::from_f64(2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Qd, b: Qd) -> f64 {
        ((a - b).to_f64() / b.to_f64()).abs()
    }

    #[test]
    fn third_times_three_is_one() {
        let third = Qd::from_f64(1.0) / Qd::from_f64(3.0);
        let back = third * Qd::from_f64(3.0);
        assert!((back - Qd::from_f64(1.0)).to_f64().abs() < 1e-63);
        // Components are non-overlapping.
        for w in third.0.windows(2) {
            assert!(w[1].abs() <= w[0].abs() * f64::EPSILON);
        }
    }

    #[test]
    fn cancellation_keeps_low_bits() {
        let x = Qd::from_f64(1.0) + Qd::from_f64(1e-60);
        let d = x - Qd::from_f64(1.0);
        assert!((d.to_f64() - 1e-60).abs() < 1e-75);
    }

    #[test]
    fn sqrt_two() {
        let r = Qd::from_f64(2.0).sqrt();
        assert!(rel(r * r, Qd::from_f64(2.0)) < 1e-62);
    }

    #[test]
    fn division_round_trip() {
        let a = Qd::from_f64(std::f64::consts::PI) / Qd::from_f64(7.0) + Qd::from_f64(1e-20);
        let b = Qd::from_f64(-0.123456789);
        let q = a / b;
        assert!(rel(q * b, a) < 1e-62);
    }

    #[test]
    fn ordering() {
        let one = Qd::from_f64(1.0);
        let tiny = Qd::from_f64(1e-50);
        assert!(one + tiny > one);
        assert!(one - tiny < one);
        assert!(-one < one);
    }
}
