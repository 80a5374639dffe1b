//! Truncated power series and the local inversion of the saddle-point map.
//!
//! A [`TruncatedSeries`] stores `c_0, …, c_N` of `Σ c_k (x - center)^k`. Binary
//! operations require identical centers and truncate to the smaller order.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T = f64> {
    center: f64,
    coeffs: Vec<T>,
}

impl<T: Real> TruncatedSeries<T> {
    pub fn new(center: f64, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::usage("a truncated series needs at least one coefficient"));
        }
        if !center.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("series center and coefficients must be finite"));
        }
        Ok(TruncatedSeries { center, coeffs })
    }

    /// `c + 0·x + … + 0·x^order`.
    pub fn constant(center: f64, c: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        coeffs[0] = c;
        TruncatedSeries { center, coeffs }
    }

    /// The series of `x` itself about `center`, i.e. `center + (x - center)`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut s = Self::constant(center, T::from_f64(center), order);
        if order >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = (order + 1).min(self.coeffs.len());
        TruncatedSeries {
            center: self.center,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Term-wise derivative; the order drops by one (a constant stays order 0).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(self.center, T::zero(), 0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::from_f64(k as f64))
            .collect();
        TruncatedSeries {
            center: self.center,
            coeffs,
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        TruncatedSeries {
            center: self.center,
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    pub fn add_constant(&self, c: T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] + c;
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        check_centers(self, other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        Ok(TruncatedSeries {
            center: self.center,
            coeffs: (0..n).map(|k| f(self.coeffs[k], other.coeffs[k])).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_centers(self, other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                (0..=k).fold(T::zero(), |acc, j| {
                    acc + self.coeffs[j] * other.coeffs[k - j]
                })
            })
            .collect();
        TruncatedSeries {
            center: self.center,
            coeffs,
        }
    }

    pub fn reciprocal(&self) -> Result<Self> {
        let u0 = self.coeffs[0];
        if u0 == T::zero() {
            return Err(Error::domain("reciprocal of a series with zero constant term"));
        }
        let inv0 = T::one() / u0;
        let mut v = Vec::with_capacity(self.coeffs.len());
        v.push(inv0);
        for k in 1..self.coeffs.len() {
            let s = (1..=k).fold(T::zero(), |acc, j| acc + self.coeffs[j] * v[k - j]);
            v.push(-s * inv0);
        }
        Ok(TruncatedSeries {
            center: self.center,
            coeffs: v,
        })
    }

    /// Square root on the positive branch.
    pub fn sqrt(&self) -> Result<Self> {
        let u0 = self.coeffs[0];
        if !(u0 > T::zero()) {
            return Err(Error::domain("square root of a series needs a positive constant term"));
        }
        let s0 = u0.sqrt();
        let two_s0 = s0 + s0;
        let mut s = Vec::with_capacity(self.coeffs.len());
        s.push(s0);
        for k in 1..self.coeffs.len() {
            let cross = (1..k).fold(T::zero(), |acc, j| acc + s[j] * s[k - j]);
            s.push((self.coeffs[k] - cross) / two_s0);
        }
        Ok(TruncatedSeries {
            center: self.center,
            coeffs: s,
        })
    }

    /// Evaluates the polynomial `Σ c_k w^k` (this series, read about `w = 0`)
    /// at `w = inner(v)`, where `inner` has a zero constant term. The result
    /// lives at the center of `inner`.
    fn compose_zero_const(&self, inner: &Self) -> Self {
        let order = inner.order();
        let mut acc = Self::constant(inner.center, self.coeff(self.order()), order);
        for k in (0..self.order()).rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] = acc.coeffs[0] + self.coeffs[k];
        }
        acc
    }

    /// Evaluates the truncated polynomial at a point.
    pub fn eval(&self, x: T) -> T {
        let d = x - T::from_f64(self.center);
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * d + c)
    }
}

fn check_centers<T>(u: &TruncatedSeries<T>, v: &TruncatedSeries<T>) -> Result<()> {
    if u.center != v.center {
        return Err(Error::usage(format!(
            "series centers differ ({} vs {})",
            u.center, v.center
        )));
    }
    Ok(())
}

/// Cauchy product truncated at the smaller order.
pub fn series_mul<T: Real>(u: &TruncatedSeries<T>, v: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    u.mul(v)
}

pub fn series_sqrt<T: Real>(u: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    u.sqrt()
}

pub fn series_reciprocal<T: Real>(u: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    u.reciprocal()
}

/// Solves `Σ φ_k/k! (t-t0)^k = Σ ψ_k/k! (s-s0)^k` for `t(s)` about `s0`.
///
/// `phi[k]` and `psi[k]` hold the k-th derivatives at the respective saddle
/// points; entries 0 and 1 are ignored. Orders up to `k_max + 1` must be
/// present to determine `t_1, …, t_{k_max}`. The returned series has
/// coefficients `t_0 = t0, t_1, …, t_{k_max}` with `t_1 > 0`.
///
/// Both sides are written as `w·sqrt(P(w))`, normalized so the square-root
/// factors start at one, and the normalized reversion is solved by Newton
/// iteration on truncated series.
pub fn invert_transformation<T: Real>(
    t0: T,
    s0: f64,
    phi: &[T],
    psi: &[T],
    k_max: usize,
) -> Result<TruncatedSeries<T>> {
    if k_max == 0 {
        return TruncatedSeries::new(s0, vec![t0]);
    }
    let needed = k_max + 2;
    if phi.len() < needed || psi.len() < needed {
        return Err(Error::usage(format!(
            "derivative arrays must reach order {} (got {} and {})",
            k_max + 1,
            phi.len().saturating_sub(1),
            psi.len().saturating_sub(1)
        )));
    }
    if !(phi[2] > T::zero()) || !(psi[2] > T::zero()) {
        return Err(Error::domain(
            "second derivatives at the saddle points must be positive",
        ));
    }

    // P_j = φ^(j+2)/(j+2)!, j = 0..k_max-1, and likewise Q_j.
    let mut fact = T::one();
    let mut p = Vec::with_capacity(k_max);
    let mut q = Vec::with_capacity(k_max);
    for j in 0..k_max {
        let k = j + 2;
        fact = fact * T::from_f64(k as f64);
        p.push(phi[k] / fact);
        q.push(psi[k] / fact);
    }
    let (p0, q0) = (p[0], q[0]);
    let p_norm = TruncatedSeries::new(0.0, p.iter().map(|&c| c / p0).collect())?;
    let q_norm = TruncatedSeries::new(0.0, q.iter().map(|&c| c / q0).collect())?;

    // w·sqrt(p(w)) as a polynomial of degree k_max.
    let shift_up = |s: TruncatedSeries<T>| {
        let mut c = vec![T::zero()];
        c.extend(s.coeffs);
        TruncatedSeries { center: 0.0, coeffs: c }
    };
    let w_poly = shift_up(p_norm.sqrt()?);
    let v_poly = shift_up(q_norm.sqrt()?);
    let t1 = (q0 / p0).sqrt();

    // Target series c·V(v) about s0; solve W(w(v)) = target.
    let target = TruncatedSeries {
        center: s0,
        coeffs: v_poly.coeffs.iter().map(|&c| c * t1).collect(),
    };
    let w_deriv = w_poly.derivative();
    let mut w = target.clone();
    let iterations = usize::BITS - k_max.leading_zeros() + 2;
    for _ in 0..iterations {
        let residual = w_poly.compose_zero_const(&w).sub(&target)?;
        let slope = w_deriv.compose_zero_const(&w);
        let step = residual.mul(&slope.reciprocal()?)?;
        w = w.sub(&step)?;
        w.coeffs[0] = T::zero();
    }
    let mut coeffs = w.coeffs;
    coeffs[0] = t0;
    TruncatedSeries::new(s0, coeffs)
}
