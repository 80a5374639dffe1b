//! Scaled parameters, the saddle point of the phase function and the
//! validity region of the expansions.
//!
//! With `α = a/z`, `β = b/z` and `μ = (b-a)/z`, the phase
//! `φ(t) = t - α ln(1-t) - μ ln t` has its relevant saddle point at the small
//! root of `t² - (β+1)t + μ = 0`. It is always evaluated as `t0 = μτ` with
//!
//! ```text
//! τ = 2 / (β + 1 + sqrt((β-1)² + 4α))
//! ```
//!
//! which stays finite and positive as `μ → 0` and never subtracts nearly
//! equal quantities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluation::log1p_stable;

/// Default bound on the saddle point used by [`domain_check`].
pub const DEFAULT_RHO: f64 = 0.8;

/// Raw parameters `(a, b, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parameters {
    a: f64,
    b: f64,
    z: f64,
}

impl Parameters {
    /// Validates `a, b, z > 0`.
    pub fn new(a: f64, b: f64, z: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("z", z)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(Parameters { a, b, z })
    }

    /// Parameters for `U(a, b+1, z)`: only `b + 1 > 0` is needed, which admits
    /// `-1 < b <= 0`. The contiguous relations evaluate `Ũ(a, b, z)` through
    /// this form with its second argument lowered by one.
    pub fn for_u(a: f64, b: f64, z: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("z", z)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if !b.is_finite() || b <= -1.0 {
            return Err(Error::domain(format!(
                "b must be finite with b + 1 > 0 for U(a, b+1, z), got {b}"
            )));
        }
        Ok(Parameters { a, b, z })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn z(&self) -> f64 {
        self.z
    }
}

/// `(α, β, μ, λ)`; `μ` may have either sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledParameters {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub lambda: f64,
}

/// Saddle point and the leading quantities of both expansions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleData {
    pub t0: f64,
    pub tau: f64,
    /// Phase `A(μ) = μ(τ - ln τ - 1) - α ln(1 - μτ)`.
    pub phase: f64,
    /// Leading amplitude of the `M` expansion.
    pub f0: f64,
    /// Leading amplitude of the `U` expansion.
    pub p0: f64,
}

pub fn scale(p: &Parameters) -> ScaledParameters {
    let lambda = p.b - p.a;
    ScaledParameters {
        alpha: p.a / p.z,
        beta: p.b / p.z,
        mu: lambda / p.z,
        lambda,
    }
}

/// `τ` from the quotient form, with the discriminant written as `(β-1)² + 4α`.
pub fn tau(alpha: f64, beta: f64) -> Result<f64> {
    let disc = (beta - 1.0) * (beta - 1.0) + 4.0 * alpha;
    if !(disc > 0.0) {
        return Err(Error::Internal(format!(
            "saddle discriminant {disc} is not positive (alpha={alpha}, beta={beta})"
        )));
    }
    let denom = beta + 1.0 + disc.sqrt();
    if !(denom > 0.0) {
        return Err(Error::domain(format!("no saddle point for beta={beta}, alpha={alpha}")));
    }
    Ok(2.0 / denom)
}

pub fn saddle(sp: &ScaledParameters) -> Result<SaddleData> {
    let ScaledParameters { alpha, beta, mu, .. } = *sp;
    let tau = tau(alpha, beta)?;
    let t0 = mu * tau;
    if t0 >= 1.0 {
        return Err(Error::domain(format!("saddle at or beyond t=1 (t0={t0})")));
    }
    let phase = mu * (tau - tau.ln() - 1.0) - alpha * log1p_stable(-t0)?;
    let quad = beta * mu * tau * tau - 2.0 * mu * tau + 1.0;
    if !(quad > 0.0) {
        return Err(Error::Internal(format!("non-positive amplitude radicand {quad}")));
    }
    let f0 = 1.0 / quad.sqrt();
    let p0 = (1.0 - t0) * f0;
    Ok(SaddleData {
        t0,
        tau,
        phase,
        f0,
        p0,
    })
}

/// True when the saddle point satisfies `t0 <= rho`, i.e. when
/// `α >= ρ² - ρ + (1-ρ)β`.
pub fn domain_check(sp: &ScaledParameters, rho: f64) -> Result<bool> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    Ok(sp.alpha >= rho * rho - rho + (1.0 - rho) * sp.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sp(alpha: f64, beta: f64) -> ScaledParameters {
        ScaledParameters {
            alpha,
            beta,
            mu: beta - alpha,
            lambda: f64::NAN,
        }
    }

    fn bisect_saddle(beta: f64, mu: f64) -> f64 {
        // Root of t² - (β+1)t + μ on (lo, hi) where the sign changes.
        let g = |t: f64| t * t - (beta + 1.0) * t + mu;
        let (mut lo, mut hi) = if mu >= 0.0 { (0.0, 1.0) } else { (mu, 0.0) };
        if mu < 0.0 {
            while g(lo) <= 0.0 {
                lo *= 2.0;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0) == (g(lo) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn scale_examples() {
        let s = scale(&Parameters::new(1.0, 1.0, 5.0).unwrap());
        assert_eq!((s.alpha, s.beta, s.mu, s.lambda), (0.2, 0.2, 0.0, 0.0));

        let s = scale(&Parameters::new(99.0, 500.0, 500.0).unwrap());
        assert_eq!(s.alpha, 0.198);
        assert_eq!(s.beta, 1.0);
        assert_eq!(s.mu, 0.802);
        assert_eq!(s.lambda, 401.0);

        let s = scale(&Parameters::new(130.0, 25.1, 100.0).unwrap());
        assert!((s.alpha - 1.3).abs() < 1e-15);
        assert!((s.beta - 0.251).abs() < 1e-15);
        assert!((s.mu + 1.049).abs() < 1e-15);
        assert!((s.lambda + 104.9).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters_are_domain_errors() {
        for (a, b, z) in [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, f64::NAN), (1.0, 1.0, f64::INFINITY)] {
            assert!(matches!(Parameters::new(a, b, z), Err(Error::Domain(_))));
        }
        assert!(Parameters::for_u(1.0, -0.3, 100.0).is_ok());
        assert!(matches!(Parameters::for_u(1.0, -1.0, 100.0), Err(Error::Domain(_))));
    }

    #[test]
    fn saddle_at_zero_mu() {
        let d = saddle(&ScaledParameters { alpha: 1.0, beta: 1.0, mu: 0.0, lambda: 0.0 }).unwrap();
        assert_eq!(d.t0, 0.0);
        // τ = 1/(β+1) when α = β.
        assert_eq!(d.tau, 0.5);
        assert_eq!(d.phase, 0.0);
        assert_eq!(d.f0, 1.0);
        assert_eq!(d.p0, 1.0);
    }

    #[test]
    fn saddle_matches_bisection() {
        let d = saddle(&sp(0.198, 1.0)).unwrap();
        let want = bisect_saddle(1.0, 0.802);
        assert!((d.t0 - want).abs() <= 1e-14 * want);
        assert!(d.t0 > 0.0 && d.t0 < 1.0);
    }

    #[test]
    fn small_mu_saddle_follows_its_expansion() {
        let mu = 1e-6;
        let beta = 1.0 + mu;
        let d = saddle(&ScaledParameters { alpha: 1.0, beta, mu, lambda: f64::NAN }).unwrap();
        let want = mu / (beta + 1.0) + mu * mu / (beta + 1.0).powi(3);
        assert!((d.t0 - want).abs() <= 1e-12 * want, "{} vs {}", d.t0, want);
    }

    #[test]
    fn domain_check_examples() {
        assert!(domain_check(&sp(2.5, 2.5), 0.8).unwrap());
        assert!(domain_check(&sp(0.0401, 1.0), 0.8).unwrap());
        let boundary = saddle(&sp(0.04, 1.0)).unwrap();
        assert!((boundary.t0 - 0.8).abs() < 1e-14);
        assert!(!domain_check(&sp(0.01, 1.0), 0.8).unwrap());
        assert!(saddle(&sp(0.01, 1.0)).unwrap().t0 > 0.8);
        assert!(matches!(domain_check(&sp(1.0, 1.0), 1.0), Err(Error::Domain(_))));
        assert!(matches!(domain_check(&sp(1.0, 1.0), 0.0), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn saddle_invariants(alpha in 1e-3f64..50.0, beta in 1e-3f64..50.0) {
            let s = sp(alpha, beta);
            let d = saddle(&s).unwrap();
            let mu = s.mu;
            let resid = d.t0 * d.t0 - (beta + 1.0) * d.t0 + mu;
            prop_assert!(resid.abs() <= 1e-13 * mu.abs().max(1.0), "residual {}", resid);
            let rel = ((beta + 1.0) * d.t0 - (d.t0 * d.t0 + mu)).abs() / ((beta + 1.0) * d.t0).abs().max(1e-300);
            prop_assert!(d.t0 == 0.0 || rel <= 1e-13, "relative mismatch {}", rel);
            prop_assert!(d.tau > 0.0);
            if mu >= 0.0 {
                prop_assert!(d.t0 >= 0.0 && d.t0 < 1.0);
            } else {
                prop_assert!(d.t0 <= 0.0);
            }
            prop_assert!(d.f0 > 0.0 && d.p0 > 0.0);
            prop_assert!(d.phase.is_finite());
            if mu >= 0.0 {
                prop_assert!(d.phase >= -1e-15 * alpha.max(1.0));
            }
        }

        #[test]
        fn quotient_form_agrees_with_subtractive_root(alpha in 1e-3f64..50.0, beta in 1e-3f64..50.0) {
            let s = sp(alpha, beta);
            prop_assume!(s.mu.abs() >= 0.1);
            let d = saddle(&s).unwrap();
            let sub = 0.5 * (beta + 1.0) - 0.5 * ((beta + 1.0).powi(2) - 4.0 * s.mu).sqrt();
            prop_assert!((d.tau - sub / s.mu).abs() <= 1e-9 * d.tau);
        }

        #[test]
        fn swapping_a_and_b_flips_mu(a in 0.1f64..100.0, b in 0.1f64..100.0, z in 0.1f64..100.0) {
            let s1 = scale(&Parameters::new(a, b, z).unwrap());
            let s2 = scale(&Parameters::new(b, a, z).unwrap());
            prop_assert_eq!(s1.mu, -s2.mu);
            let d1 = (s1.beta + 1.0).powi(2) - 4.0 * s1.mu;
            let d1_alt = (s1.beta - 1.0).powi(2) + 4.0 * s1.alpha;
            prop_assert!((d1 - d1_alt).abs() <= 1e-12 * d1_alt);
            let d2 = (s2.beta + 1.0).powi(2) - 4.0 * s2.mu;
            let d2_alt = (s2.beta - 1.0).powi(2) + 4.0 * s2.alpha;
            prop_assert!((d2 - d2_alt).abs() <= 1e-12 * d2_alt);
        }
    }
}
