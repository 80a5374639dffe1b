//! Expansion coefficients `f_n(μ)` of `M̃` and `p_n(μ)` of `Ũ`.
//!
//! The map `s ↦ t(s)` is defined by `φ(t) - φ(t0) = ψ(s) - ψ(μ)` with
//! `φ(t) = t - α ln(1-t) - μ ln t` and `ψ(s) = s - μ ln s`. Both sides carry
//! logarithmic singularities at distance `t0` and `μ` from the expansion
//! point, and the Taylor data of `t(s)` built from their derivatives lose
//! about `t0^{-k}` relative accuracy in the `k`-th coefficient. The
//! pipeline therefore works with the ratio `r(s) = t(s)/s`, which solves the
//! regular equation
//!
//! ```text
//! G(s, r) = s(r - 1) - α ln(1 - s r) - μ ln(r/τ) - G0 = 0,   r(μ) = τ,
//! ```
//!
//! and is analytic in a disk whose size does not shrink with `μ`. `(μ, τ)`
//! is a critical point of `G`; the slope `r'(μ)` is the root of the Hessian
//! quadratic on the branch with `dt/ds > 0`, and each further coefficient
//! follows from one linear equation. The integrands
//! `f = s t'/(t(1-t)) = t'/(r(1-t))` and `p = s t'/t = t'/r` then have no
//! removable singularity left, and `f_n = c_0^(n)` comes from the
//! recursion `c_m^(n+1) = m c_{m+1}^(n) + μ(m+1) c_{m+2}^(n)`.
//!
//! Everything runs in double-double with `α = μτ + 1/τ - 1 - μ`, so the
//! coefficients depend on `(μ, τ)` only and the saddle relation holds
//! exactly. At `μ = 0` the limit `f̃ = (1, 0, 0, …)` is returned.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::scaling::{saddle, ScaledParameters};
#[cfg(test)]
use crate::series::invert_transformation;
use crate::series::TruncatedSeries;

/// Term count used when none is given.
pub const DEFAULT_TERMS: usize = 4;
/// Largest supported index `n` of `f_n`.
pub const MAX_TERMS: usize = 8;


#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Which {
    M,
    U,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Which::M => write!(f, "M"),
            Which::U => write!(f, "U"),
        }
    }
}

/// How a [`CoefficientSet`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientPath {
    /// `μ = 0`: `f̃_0 = 1` and all higher coefficients vanish.
    Limit,
    /// Series solution and recursion at the given `μ`.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub mu: f64,
    pub beta: f64,
    pub tau: f64,
    pub which: Which,
    /// `t(s)` about `s0 = μ`; absent in the `μ = 0` limit.
    pub t_series: Option<TruncatedSeries>,
    /// Integrand coefficients `a_k(μ)`, `k = 0..=2N`; empty in the limit.
    pub a: Vec<f64>,
    pub f: Vec<f64>,
    pub f_tilde: Vec<f64>,
    pub path: CoefficientPath,
}

#[derive(Serialize)]
struct CoefficientJson<'a> {
    mu: f64,
    beta: f64,
    tau: f64,
    which: Which,
    f: &'a [f64],
    f_tilde: &'a [f64],
    path: CoefficientPath,
}

impl CoefficientSet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CoefficientJson {
            mu: self.mu,
            beta: self.beta,
            tau: self.tau,
            which: self.which,
            f: &self.f,
            f_tilde: &self.f_tilde,
            path: self.path,
        })
        .expect("coefficient sets serialize")
    }
}

/// Signed Stirling numbers of the first kind and the integer weights
/// `T(n,k) = Σ_m (-1)^{n+m+k} C(n+k, n+m) s(n+m, m)` of the closed form
/// `f_n = Σ_{k=1}^{n} T(n,k) μ^k a_{n+k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StirlingTable {
    s: Vec<Vec<i128>>,
    t: Vec<Vec<i128>>,
}

impl StirlingTable {
    pub fn new(max_n: usize) -> Self {
        let size = 2 * max_n + 1;
        let mut s = vec![vec![0i128; size]; size];
        s[0][0] = 1;
        for n in 0..size - 1 {
            for m in 1..=n + 1 {
                s[n + 1][m] = s[n][m - 1] - n as i128 * s[n][m];
            }
        }
        let binom = |n: usize, k: usize| -> i128 {
            (0..k).fold(1i128, |acc, j| acc * (n - j) as i128 / (j + 1) as i128)
        };
        let mut t = vec![Vec::new(); max_n + 1];
        for (n, row) in t.iter_mut().enumerate() {
            *row = vec![0i128; n + 1];
            for k in 1..=n {
                row[k] = (0..=k)
                    .map(|m| {
                        let sign = if (n + m + k) % 2 == 0 { 1 } else { -1 };
                        sign * binom(n + k, n + m) * s[n + m][m]
                    })
                    .sum();
            }
        }
        StirlingTable { s, t }
    }

    pub fn max_n(&self) -> usize {
        self.t.len() - 1
    }

    /// Signed Stirling number `s(n, m)`.
    pub fn stirling(&self, n: usize, m: usize) -> i128 {
        self.s[n][m]
    }

    /// `T(n, k)` for `1 <= k <= n`.
    pub fn weight(&self, n: usize, k: usize) -> i128 {
        self.t[n][k]
    }

    /// Row `n` of the weight table, `[T(n,1), …, T(n,n)]`.
    pub fn row(&self, n: usize) -> &[i128] {
        &self.t[n][1..]
    }
}

fn phi_derivs<T: Real>(alpha: T, mu: T, t0: T, k_max: usize) -> Vec<T> {
    let mut out = vec![T::zero(); k_max + 1];
    let one = T::one();
    let inv_1mt = one / (one - t0);
    let inv_t = one / t0;
    let mut fact = one; // (k-1)!
    let mut p1 = inv_1mt; // (1-t0)^{-k}
    let mut p2 = inv_t; // t0^{-k}
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        if k >= 2 {
            fact = fact * T::from_f64((k - 1) as f64);
            p1 = p1 * inv_1mt;
            p2 = p2 * inv_t;
            let sign = if k % 2 == 0 { one } else { -one };
            *slot = alpha * fact * p1 + sign * mu * fact * p2;
        }
    }
    out
}

fn psi_derivs<T: Real>(mu: T, k_max: usize) -> Vec<T> {
    let mut out = vec![T::zero(); k_max + 1];
    let one = T::one();
    let inv_mu = one / mu;
    let mut fact = one;
    let mut pow = one; // μ^{-(k-1)}
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        if k >= 2 {
            fact = fact * T::from_f64((k - 1) as f64);
            pow = pow * inv_mu;
            let sign = if k % 2 == 0 { one } else { -one };
            *slot = sign * fact * pow;
        }
    }
    out
}

/// `φ^(k)(t0)` for `k = 2..=k_max` (entries 0 and 1 are zero), where
/// `φ^(k)(t) = α(k-1)!/(1-t)^k + (-1)^k μ(k-1)!/t^k`.
pub fn phi_derivatives(sp: &ScaledParameters, t0: f64, k_max: usize) -> Result<Vec<f64>> {
    if t0 == 0.0 || t0 == 1.0 || !t0.is_finite() {
        return Err(Error::domain(format!("phi derivatives need t0 outside {{0, 1}}, got {t0}")));
    }
    Ok(phi_derivs(sp.alpha, sp.mu, t0, k_max))
}

/// `ψ^(k)(μ) = (-1)^k (k-1)!/μ^{k-1}` for `k = 2..=k_max`.
pub fn psi_derivatives(mu: f64, k_max: usize) -> Result<Vec<f64>> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::domain("psi derivatives need a non-zero mu"));
    }
    Ok(psi_derivs(mu, k_max))
}

fn integrand<T: Real>(which: Which, mu: f64, t_series: &TruncatedSeries<T>) -> Result<Vec<T>> {
    let order = t_series.order();
    if order == 0 {
        return Err(Error::usage("integrand needs a t-series of order at least 1"));
    }
    let out_order = order - 1;
    let t = t_series.truncate(out_order);
    let dt = t_series.derivative();
    let s = TruncatedSeries::<T>::variable(mu, out_order);
    let numer = s.mul(&dt)?;
    let denom = match which {
        Which::M => {
            let one_minus_t = t.scale(-T::one()).add_constant(T::one());
            t.mul(&one_minus_t)?
        }
        Which::U => t,
    };
    Ok(numer.mul(&denom.reciprocal()?)?.into_coeffs())
}

/// Coefficients `a_k(μ)` of `f(s) = s/(t(1-t)) dt/ds` (for `M`) or of
/// `p(s) = s/t dt/ds` (for `U`) about `s0 = μ`. The output order is one
/// less than that of `t_series`.
pub fn integrand_series(
    which: Which,
    sp: &ScaledParameters,
    t_series: &TruncatedSeries,
) -> Result<Vec<f64>> {
    if t_series.center() != sp.mu {
        return Err(Error::usage("t-series must be centered at s0 = mu"));
    }
    integrand(which, sp.mu, t_series)
}

fn recursive<T: Real>(a: &[T], mu: T, n_max: usize) -> Vec<T> {
    let mut c = a.to_vec();
    let mut f = Vec::with_capacity(n_max + 1);
    f.push(c[0]);
    for _ in 0..n_max {
        let len = c.len() - 2;
        c = (0..len)
            .map(|m| {
                T::from_f64(m as f64) * c[m + 1] + mu * T::from_f64((m + 1) as f64) * c[m + 2]
            })
            .collect();
        f.push(c[0]);
    }
    f
}

/// `f_n(μ)`, `n = 0..=n_max`, by the integration-by-parts recursion.
pub fn f_from_a_recursive(a: &[f64], mu: f64, n_max: usize) -> Result<Vec<f64>> {
    if a.len() < 2 * n_max + 1 {
        return Err(Error::usage(format!(
            "need {} integrand coefficients for n <= {n_max}, got {}",
            2 * n_max + 1,
            a.len()
        )));
    }
    Ok(recursive(&a[..2 * n_max + 1], mu, n_max))
}

/// `f_n(μ) = Σ_{k=1}^{n} T(n,k) μ^k a_{n+k}(μ)` with `f_0 = a_0`.
pub fn f_from_a_stirling(
    a: &[f64],
    mu: f64,
    n_max: usize,
    tbl: &StirlingTable,
) -> Result<Vec<f64>> {
    if a.len() < 2 * n_max + 1 {
        return Err(Error::usage(format!(
            "need {} integrand coefficients for n <= {n_max}, got {}",
            2 * n_max + 1,
            a.len()
        )));
    }
    if tbl.max_n() < n_max {
        return Err(Error::usage(format!(
            "Stirling table covers n <= {}, need {n_max}",
            tbl.max_n()
        )));
    }
    let mut f = vec![a[0]];
    for n in 1..=n_max {
        let mut sum = 0.0;
        let mut mu_k = 1.0;
        for k in 1..=n {
            mu_k *= mu;
            sum += tbl.weight(n, k) as f64 * mu_k * a[n + k];
        }
        f.push(sum);
    }
    Ok(f)
}

struct DirectPipeline<T> {
    t_series: TruncatedSeries<T>,
    a: Vec<T>,
    f: Vec<T>,
}

fn mul_trunc<T: Real>(u: &[T], v: &[T], order: usize) -> Vec<T> {
    (0..=order)
        .map(|k| {
            let mut acc = T::zero();
            for i in 0..=k {
                if i < u.len() && k - i < v.len() {
                    acc = acc + u[i] * v[k - i];
                }
            }
            acc
        })
        .collect()
}

fn recip_trunc<T: Real>(u: &[T], order: usize) -> Vec<T> {
    let inv0 = T::one() / u[0];
    let mut w = vec![inv0];
    for k in 1..=order {
        let mut acc = T::zero();
        for i in 1..=k.min(u.len() - 1) {
            acc = acc + u[i] * w[k - i];
        }
        w.push(-acc * inv0);
    }
    w
}

fn deriv<T: Real>(u: &[T]) -> Vec<T> {
    (1..u.len()).map(|k| T::from_f64(k as f64) * u[k]).collect()
}

/// `ln(u/u0)` to the given order.
fn log_ratio<T: Real>(u: &[T], order: usize) -> Vec<T> {
    let q = mul_trunc(&deriv(u), &recip_trunc(u, order), order.saturating_sub(1));
    let mut out = vec![T::zero()];
    out.extend(q.iter().enumerate().map(|(k, &c)| c / T::from_f64((k + 1) as f64)));
    out.truncate(order + 1);
    out
}

/// Taylor coefficients of `r(s) = t(s)/s` about `s = μ` up to `order`.
fn ratio_series<T: Real>(mu: f64, tau: f64, order: usize) -> Result<Vec<T>> {
    let mu_r = T::from_f64(mu);
    let tau_r = T::from_f64(tau);
    let t0 = mu_r * tau_r;
    let alpha = t0 + T::one() / tau_r - T::one() - mu_r;
    let w = T::one() - t0;
    let w2 = w * w;
    // Hessian of G at (μ, τ).
    let g_ss = alpha * tau_r * tau_r / w2;
    let g_sr = T::one() + alpha / w2;
    let g_rr = alpha * mu_r * mu_r / w2 + mu_r / (tau_r * tau_r);
    let disc = g_sr * g_sr - g_rr * g_ss;
    if !(disc > T::zero()) || !(g_sr > T::zero()) {
        return Err(Error::numerical(format!("no regular saddle branch at mu={mu}, tau={tau}")));
    }
    let r1 = g_ss / (-g_sr - disc.sqrt());
    let lin = g_sr + g_rr * r1;
    let mut r = vec![tau_r];
    if order >= 1 {
        r.push(r1);
    }
    let s = [mu_r, T::one()];
    for k in 2..=order {
        r.push(T::zero());
        let m = k + 1;
        let t = mul_trunc(&s, &r, m);
        let one_minus_t: Vec<T> = t
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == 0 { T::one() - c } else { -c })
            .collect();
        let r_minus_1: Vec<T> = r
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == 0 { c - T::one() } else { c })
            .collect();
        let g_m = mul_trunc(&s, &r_minus_1, m)[m] - alpha * log_ratio(&one_minus_t, m)[m]
            - mu_r * log_ratio(&r, m)[m];
        r[k] = -g_m / lin;
    }
    Ok(r)
}

/// Runs the full pipeline at `(μ, τ)` up to `f_{n_max}`.
fn direct<T: Real>(which: Which, mu: f64, tau: f64, n_max: usize) -> Result<DirectPipeline<T>> {
    let order = 2 * n_max + 1;
    let r = ratio_series::<T>(mu, tau, order)?;
    let s = [T::from_f64(mu), T::one()];
    let t = mul_trunc(&s, &r, order);
    let dt = deriv(&t);
    let out = order - 1;
    let mut a = mul_trunc(&dt, &recip_trunc(&r, out), out);
    if which == Which::M {
        let one_minus_t: Vec<T> = t[..=out]
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == 0 { T::one() - c } else { -c })
            .collect();
        a = mul_trunc(&a, &recip_trunc(&one_minus_t, out), out);
    }
    if a.iter().any(|c| !c.is_finite()) {
        return Err(Error::numerical(format!("integrand coefficients overflow at mu={mu}, tau={tau}")));
    }
    let f = recursive(&a, T::from_f64(mu), n_max);
    Ok(DirectPipeline {
        t_series: TruncatedSeries::new(mu, t)?,
        a,
        f,
    })
}

/// The same coefficients by inverting `φ(t) - φ(t0) = ψ(s) - ψ(μ)` from the
/// derivatives at the saddle point.
#[cfg(test)]
fn inverted<T: Real>(which: Which, mu: f64, tau: f64, n_max: usize) -> Result<Vec<T>> {
    let k_t = 2 * n_max + 1;
    let mu_r = T::from_f64(mu);
    let tau_r = T::from_f64(tau);
    let t0 = mu_r * tau_r;
    let alpha = t0 + T::one() / tau_r - T::one() - mu_r;
    let phi = phi_derivs(alpha, mu_r, t0, k_t + 1);
    let psi = psi_derivs(mu_r, k_t + 1);
    let t_series = if mu > 0.0 {
        invert_transformation(t0, mu, &phi, &psi, k_t)?
    } else {
        // Reflection s -> -s, t -> -t: the k-th derivatives and the t_k
        // pick up (-1)^{k+1}.
        let reflect = |v: &[T]| -> Vec<T> {
            v.iter()
                .enumerate()
                .map(|(k, &x)| if k % 2 == 0 { -x } else { x })
                .collect()
        };
        let w = invert_transformation(-t0, -mu, &reflect(&phi), &reflect(&psi), k_t)?;
        TruncatedSeries::new(mu, reflect(w.coeffs()))?
    };
    let a = integrand(which, mu, &t_series)?;
    Ok(recursive(&a, mu_r, n_max))
}

/// Normalized coefficients `f̃_n` (or `p̃_n`), `n = 0..=n_max`, at `(μ, τ)`,
/// together with the path that produced them.
pub fn tilde_coefficients(
    which: Which,
    mu: f64,
    tau: f64,
    n_max: usize,
) -> Result<(Vec<f64>, CoefficientPath)> {
    check_terms(n_max)?;
    if mu == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return Ok((v, CoefficientPath::Limit));
    }
    if n_max == 0 {
        return Ok((vec![1.0], CoefficientPath::Direct));
    }
    let run = direct::<Dd>(which, mu, tau, n_max)?;
    let f0 = run.f[0];
    let mut v: Vec<f64> = run.f.iter().map(|&fk| (fk / f0).to_f64()).collect();
    v[0] = 1.0;
    Ok((v, CoefficientPath::Direct))
}

fn check_terms(n_max: usize) -> Result<()> {
    if n_max > MAX_TERMS {
        return Err(Error::usage(format!(
            "at most {MAX_TERMS} correction terms are supported, got {n_max}"
        )));
    }
    Ok(())
}

/// Full coefficient set for `M` or `U` at the given scaled parameters.
pub fn coefficient_set(which: Which, sp: &ScaledParameters, n_max: usize) -> Result<CoefficientSet> {
    check_terms(n_max)?;
    let sd = saddle(sp)?;
    let lead = match which {
        Which::M => sd.f0,
        Which::U => sd.p0,
    };
    let (f_tilde, path) = tilde_coefficients(which, sp.mu, sd.tau, n_max)?;
    let (t_series, a) = if sp.mu == 0.0 {
        (None, Vec::new())
    } else {
        let run = direct::<Dd>(which, sp.mu, sd.tau, n_max)?;
        let t = TruncatedSeries::new(
            sp.mu,
            run.t_series.coeffs().iter().map(|c| c.to_f64()).collect(),
        )?;
        (Some(t), run.a.iter().map(|c| c.to_f64()).collect())
    };
    let f = f_tilde.iter().map(|&c| c * lead).collect();
    Ok(CoefficientSet {
        mu: sp.mu,
        beta: sp.beta,
        tau: sd.tau,
        which,
        t_series,
        a,
        f,
        f_tilde,
        path,
    })
}
