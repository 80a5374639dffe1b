//! Front factors and summation of the expansions.
//!
//! ```text
//! M(a,b,z)   = e^z Γ(b)/Γ(a) z^{a-b} M̃(a,b,z),   M̃ ~ e^{-zA} f0 Σ f̃_n / z^n
//! U(a,b+1,z) = z^{-a} Ũ(a,b+1,z),                Ũ ~ e^{+zA} p0 Σ (-1)^n p̃_n / z^n
//! ```
//!
//! Front factors are assembled in log space; the linear value is produced
//! last and is replaced by a signed zero plus a status flag when it is not
//! representable.

use serde::{Deserialize, Serialize};

use crate::coefficients::{tilde_coefficients, Which, DEFAULT_TERMS};
use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::scaling::{domain_check, saddle, scale, Parameters, DEFAULT_RHO};

/// Whether the linear `value` of an [`ExpansionResult`] is usable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueStatus {
    Normal,
    Underflow,
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub value: f64,
    pub log_magnitude: f64,
    pub sign: i8,
    pub terms_used: usize,
    pub last_term_ratio: f64,
    pub domain_ok: bool,
    pub status: ValueStatus,
}

/// Evaluation settings shared by the entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Highest correction index `N`; the sum runs over `n = 0..=N`.
    pub terms: usize,
    /// Saddle-point bound used for the `domain_ok` diagnostic.
    pub rho: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            terms: DEFAULT_TERMS,
            rho: DEFAULT_RHO,
        }
    }
}

impl EvalOptions {
    pub fn with_terms(terms: usize) -> Self {
        EvalOptions {
            terms,
            ..Default::default()
        }
    }
}

/// `ln(1 + x)`, using `ln(1+x) = 2 artanh(x/(2+x))` and the artanh power
/// series for `|x| <= 1/2`.
pub fn log1p_stable(x: f64) -> Result<f64> {
    if x.is_nan() || x <= -1.0 {
        return Err(Error::domain(format!("log1p needs x > -1, got {x}")));
    }
    if x == 0.0 || x.abs() > 0.5 {
        return Ok(if x == 0.0 { x } else { (1.0 + x).ln() });
    }
    let u = x / (2.0 + x);
    let u2 = u * u;
    let mut pow = u;
    let mut sum = u;
    let mut k = 3.0;
    loop {
        pow *= u2;
        let term = pow / k;
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
        k += 2.0;
    }
    Ok(2.0 * sum)
}

/// `ln Γ(x)` for `x > 0`, accurate to about one unit in the last place.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma needs a finite positive argument, got {x}")));
    }
    Ok(dd::ln_gamma(Dd::from_f64(x)).to_f64())
}

/// `ln Γ(b) - ln Γ(a)`, with the difference formed before rounding.
pub fn log_gamma_ratio(b: f64, a: f64) -> Result<f64> {
    Ok(log_gamma_ratio_dd(b, a)?.to_f64())
}

fn log_gamma_ratio_dd(b: f64, a: f64) -> Result<Dd> {
    for v in [a, b] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("log_gamma_ratio needs positive arguments, got {v}")));
        }
    }
    if a == b {
        return Ok(Dd::ZERO);
    }
    Ok(dd::ln_gamma(Dd::from_f64(b)) - dd::ln_gamma(Dd::from_f64(a)))
}

/// Scaled expansion before the linear value is formed.
struct Scaled {
    /// `∓zA` as an exact product.
    exponent: Dd,
    amplitude: f64,
    sum: f64,
    terms_used: usize,
    last_term_ratio: f64,
    domain_ok: bool,
}

fn scaled_expansion(which: Which, p: &Parameters, opts: &EvalOptions) -> Result<Scaled> {
    let sp = scale(p);
    let sd = saddle(&sp)?;
    let domain_ok = domain_check(&sp, opts.rho)?;
    let (coeffs, _) = tilde_coefficients(which, sp.mu, sd.tau, opts.terms)?;
    let z = p.z();
    let mut terms = Vec::with_capacity(coeffs.len());
    let mut zpow = 1.0;
    for (n, c) in coeffs.iter().enumerate() {
        let sign = if which == Which::U && n % 2 == 1 { -1.0 } else { 1.0 };
        terms.push(sign * c / zpow);
        zpow *= z;
    }
    // Smallest terms first.
    let sum: f64 = terms.iter().rev().sum();
    if !sum.is_finite() || sum == 0.0 {
        return Err(Error::numerical(format!("expansion sum is {sum}")));
    }
    let last = *terms.last().expect("at least one term");
    let (exponent, amplitude) = match which {
        Which::M => (Dd::prod_f64(-z, sd.phase), sd.f0),
        Which::U => (Dd::prod_f64(z, sd.phase), sd.p0),
    };
    Ok(Scaled {
        exponent,
        amplitude,
        sum,
        terms_used: terms.len(),
        last_term_ratio: (last / sum).abs(),
        domain_ok,
    })
}

fn finish(log_mag: Dd, sign: i8, direct: Option<f64>, s: &Scaled) -> ExpansionResult {
    let log_f = log_mag.to_f64();
    let (value, status) = if log_f > f64::MAX.ln() {
        (0.0, ValueStatus::Overflow)
    } else {
        let v = direct.unwrap_or_else(|| log_mag.exp().to_f64());
        if v.abs() < f64::MIN_POSITIVE {
            (0.0 * sign as f64, ValueStatus::Underflow)
        } else if v.is_infinite() {
            (0.0, ValueStatus::Overflow)
        } else {
            (v.abs() * sign as f64, ValueStatus::Normal)
        }
    };
    ExpansionResult {
        value,
        log_magnitude: log_f,
        sign,
        terms_used: s.terms_used,
        last_term_ratio: s.last_term_ratio,
        domain_ok: s.domain_ok,
        status,
    }
}

fn check_m_params(p: &Parameters) -> Result<()> {
    if p.b() <= 0.0 {
        return Err(Error::domain(format!("M(a,b,z) needs b > 0, got {}", p.b())));
    }
    Ok(())
}

/// Evaluates `M̃`, `Ũ`, `M` or `U(a, b+1, z)` by the uniform expansion.
pub fn evaluate(which: Which, scaled: bool, p: &Parameters, opts: &EvalOptions) -> Result<ExpansionResult> {
    if which == Which::M {
        check_m_params(p)?;
    }
    let s = scaled_expansion(which, p, opts)?;
    let sign: i8 = if s.sum < 0.0 { -1 } else { 1 };
    let ln_rest = Dd::from_f64((s.amplitude * s.sum.abs()).ln());
    if scaled {
        let log_mag = s.exponent + ln_rest;
        let front = s.exponent.exp().to_f64();
        let direct = front.is_normal().then_some(front * s.amplitude * s.sum);
        return Ok(finish(log_mag, sign, direct, &s));
    }
    let (a, b, z) = (p.a(), p.b(), p.z());
    let ln_z = Dd::from_f64(z).ln();
    let front = match which {
        // z + ln Γ(b) - ln Γ(a) + (a - b) ln z
        Which::M => Dd::from_f64(z) + log_gamma_ratio_dd(b, a)? + ln_z * Dd::sum_f64(a, -b),
        // -a ln z
        Which::U => -(ln_z * a),
    };
    let log_mag = front + s.exponent + ln_rest;
    Ok(finish(log_mag, sign, None, &s))
}

/// Scaled value split as `exp(exponent) * rest`, for callers that form
/// ratios and products of scaled functions without leaving log space.
pub(crate) fn scaled_parts(which: Which, p: &Parameters, terms: usize) -> Result<(Dd, f64)> {
    if which == Which::M {
        check_m_params(p)?;
    }
    let s = scaled_expansion(which, p, &EvalOptions::with_terms(terms))?;
    Ok((s.exponent, s.amplitude * s.sum))
}

pub fn eval_m_scaled(p: &Parameters, terms: usize) -> Result<ExpansionResult> {
    evaluate(Which::M, true, p, &EvalOptions::with_terms(terms))
}

/// `Ũ(a, b+1, z)` with `μ = (b - a)/z`.
pub fn eval_u_scaled(p: &Parameters, terms: usize) -> Result<ExpansionResult> {
    evaluate(Which::U, true, p, &EvalOptions::with_terms(terms))
}

pub fn eval_m(p: &Parameters, terms: usize) -> Result<ExpansionResult> {
    evaluate(Which::M, false, p, &EvalOptions::with_terms(terms))
}

/// `U(a, b+1, z)`.
pub fn eval_u(p: &Parameters, terms: usize) -> Result<ExpansionResult> {
    evaluate(Which::U, false, p, &EvalOptions::with_terms(terms))
}
