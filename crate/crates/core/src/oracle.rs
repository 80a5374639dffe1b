//! Reference values of `M(a,b,z)` and `U(a,b,z)` that share no code with the
//! asymptotic expansions.
//!
//! `M` is summed from its Maclaurin series and `U` is integrated from
//!
//! ```text
//! U(a,b,z) = 1/Γ(a) ∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt,   a > 0, z > 0,
//! ```
//!
//! both in double-double arithmetic and in log scale so that magnitudes far
//! outside the double range are representable.

use std::sync::OnceLock;

use serde::Serialize;

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::scaling::Parameters;
use crate::verify::unit_shift_base;

/// Default number of requested decimal digits.
pub const DEFAULT_DIGITS: u32 = 30;
/// Double-double carries a little over 31 digits.
pub const MAX_DIGITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    /// Linear value; zero when it is outside the double range.
    pub value: f64,
    pub log_magnitude: f64,
    pub sign: i8,
    #[serde(skip)]
    log_dd: Dd,
}

impl OracleValue {
    fn from_log(log: Dd, sign: i8) -> OracleValue {
        let l = log.to_f64();
        let v = if l > f64::MAX.ln() {
            0.0
        } else {
            let e = log.exp().to_f64();
            if e < f64::MIN_POSITIVE {
                0.0
            } else {
                e
            }
        };
        OracleValue {
            value: v * sign as f64,
            log_magnitude: l,
            sign,
            log_dd: log,
        }
    }

    /// `ln |value|` in full double-double precision.
    pub fn log_magnitude_dd(&self) -> Dd {
        self.log_dd
    }
}

fn check_digits(digits: u32) -> Result<()> {
    if !(DEFAULT_DIGITS..=MAX_DIGITS).contains(&digits) {
        return Err(Error::usage(format!(
            "precision_digits must lie in {DEFAULT_DIGITS}..={MAX_DIGITS}, got {digits}"
        )));
    }
    Ok(())
}

const RESCALE_AT: f64 = 1e180;
const RESCALE_BITS: i32 = 598;

/// `M(a,b,z) = Σ (a)_k/(b)_k z^k/k!`.
pub fn oracle_m(p: &Parameters, precision_digits: u32) -> Result<OracleValue> {
    check_digits(precision_digits)?;
    let (a, b, z) = (p.a(), p.b(), p.z());
    if b <= 0.0 && b == b.floor() {
        return Err(Error::domain(format!("M(a,b,z) is undefined for b = {b}")));
    }
    let tol = 10f64.powi(-(precision_digits as i32));
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    // sum and term are both scaled by 2^-shift.
    let mut shift: i64 = 0;
    let mut prev_abs = 1.0;
    let max_terms = 200_000 + (20.0 * (a.abs() + b.abs() + z)) as usize;
    for k in 1..max_terms {
        let kf = k as f64;
        term = term * Dd::sum_f64(a, kf - 1.0) * z / Dd::sum_f64(b, kf - 1.0) / kf;
        sum += term;
        let t_abs = term.hi.abs();
        if sum.hi.abs() > RESCALE_AT {
            term = term.ldexp(-RESCALE_BITS);
            sum = sum.ldexp(-RESCALE_BITS);
            shift += RESCALE_BITS as i64;
        }
        let decreasing = t_abs <= prev_abs || shift > 0 && t_abs < sum.hi.abs();
        prev_abs = term.hi.abs();
        if decreasing && (kf > b.abs()) && term.hi.abs() <= tol * sum.hi.abs() {
            if sum.hi == 0.0 {
                return Err(Error::numerical("Maclaurin series summed to zero"));
            }
            let sign = if sum.hi < 0.0 { -1 } else { 1 };
            let log = sum.abs().ln() + Dd::LN2 * shift as f64;
            return Ok(OracleValue::from_log(log, sign));
        }
    }
    Err(Error::numerical(format!(
        "Maclaurin series for M({a}, {b}, {z}) did not converge in {max_terms} terms"
    )))
}

/// Node table for tanh-sinh on `[-1, 1]`: for each abscissa `u = k h`,
/// the distance `δ = (1 - x)/2` of the node from the nearer endpoint and the
/// weight `dx/du`.
struct Nodes {
    levels: Vec<Vec<(Dd, Dd)>>,
}

const U_MAX: f64 = 4.6;
const MAX_LEVEL: usize = 10;

fn nodes() -> &'static Nodes {
    static NODES: OnceLock<Nodes> = OnceLock::new();
    NODES.get_or_init(|| {
        let half_pi = Dd::PI * 0.5;
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        for level in 0..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            let step = if level == 0 { 1 } else { 2 };
            let start = if level == 0 { 0 } else { 1 };
            let mut v = Vec::new();
            let mut k = start;
            loop {
                let u = k as f64 * h;
                if u > U_MAX {
                    break;
                }
                let eu = Dd::from_f64(u).exp();
                let emu = eu.recip();
                let sinh = (eu - emu) * 0.5;
                let cosh = (eu + emu) * 0.5;
                // q = e^{-π sinh u}; x = (1-q)/(1+q).
                let q = (-(Dd::PI * sinh)).exp();
                let one_q = q + 1.0;
                let delta = q / one_q;
                let weight = half_pi * cosh * q * 4.0 / one_q.sqr();
                v.push((delta, weight));
                k += step;
            }
            levels.push(v);
        }
        Nodes { levels }
    })
}

/// `∫_l^r exp(log_f(t) - log_ref) dt` by tanh-sinh; `log_f` receives the
/// node and its distance from `l`.
fn tanh_sinh<F>(l: Dd, r: Dd, log_f: F, log_ref: Dd, digits: u32) -> Result<Dd>
where
    F: Fn(Dd, Dd) -> Dd,
{
    let width = r - l;
    let f = |d_left: Dd| -> Dd {
        let t = l + d_left;
        let lf = log_f(t, d_left);
        if lf.hi == f64::NEG_INFINITY || lf.hi.is_nan() && d_left.hi == 0.0 {
            return Dd::ZERO;
        }
        (lf - log_ref).exp()
    };
    // The error after a level is roughly the square of the change it made.
    let tol = 10f64.powi(-(3 * digits as i32) / 4);
    let table = nodes();
    let mut sum = Dd::ZERO;
    let mut prev = Dd::ZERO;
    for (level, nodes) in table.levels.iter().enumerate() {
        for &(delta, weight) in nodes {
            if delta.hi == 0.5 {
                sum += weight * f(width * 0.5);
            } else {
                let d = width * delta;
                sum += weight * (f(d) + f(width - d));
            }
        }
        let h = 0.5f64.powi(level as i32);
        let est = sum * (width * (0.5 * h));
        if !est.is_finite() {
            return Err(Error::numerical("quadrature produced a non-finite value"));
        }
        if level >= 3 && (est - prev).abs().hi <= tol * est.abs().hi {
            return Ok(est);
        }
        prev = est;
    }
    Err(Error::numerical(format!(
        "tanh-sinh did not converge on [{:e}, {:e}] (last estimate {:e})",
        l.hi,
        r.hi,
        prev.hi
    )))
}

/// Gap below the peak at which the integrand is cut off.
const CUT: f64 = 92.0;

/// `U(a,b,z)`; `p.b()` is the second parameter of `U` itself.
pub fn oracle_u(p: &Parameters, precision_digits: u32) -> Result<OracleValue> {
    check_digits(precision_digits)?;
    let (a, b, z) = (p.a(), p.b(), p.z());
    let am1 = Dd::sum_f64(a, -1.0);
    let c = Dd::from_f64(b) - a - 1.0;
    let log_g = |t: Dd| -> Dd { -(t * z) + c * t.ln_1p() };
    let log_f = |t: Dd| -> Dd {
        if t.hi <= 0.0 {
            return if am1.hi > 0.0 {
                Dd::from_f64(f64::NEG_INFINITY)
            } else if am1.hi == 0.0 {
                Dd::ZERO
            } else {
                Dd::from_f64(f64::INFINITY)
            };
        }
        log_g(t) + am1 * t.ln()
    };

    // Critical points: z t^2 + (z - b + 2) t - (a - 1) = 0.
    let qb = z - b + 2.0;
    let qc = -(a - 1.0);
    let disc = qb * qb - 4.0 * z * qc;
    let mut breaks: Vec<f64> = Vec::new();
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let r1 = if qb >= 0.0 { (-qb - sq) / (2.0 * z) } else { (-qb + sq) / (2.0 * z) };
        let r2 = if r1 != 0.0 { qc / (z * r1) } else { -qb / z };
        for r in [r1, r2] {
            if r > 0.0 && r.is_finite() {
                breaks.push(r);
            }
        }
    }
    breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    breaks.dedup();

    // Reference level: the largest value at the critical points, or near 0.
    let mut peak = f64::NEG_INFINITY;
    let mut peak_dd = Dd::from_f64(f64::NEG_INFINITY);
    for &t in &breaks {
        let v = log_f(Dd::from_f64(t));
        if v.hi > peak {
            peak = v.hi;
            peak_dd = v;
        }
    }
    let small_t = breaks.first().copied().unwrap_or(1.0 / z).min(1.0 / z) * 1e-3;
    if a <= 1.0 {
        let v = log_f(Dd::from_f64(small_t));
        if v.hi > peak {
            peak = v.hi;
            peak_dd = v;
        }
    }
    if !peak.is_finite() {
        return Err(Error::numerical("could not locate the integrand peak"));
    }

    // Right cut: beyond the last critical point the integrand decreases.
    let mut right = breaks.last().copied().unwrap_or(0.0).max(1.0 / z);
    let mut guard = 0;
    loop {
        let v = log_f(Dd::from_f64(right)).hi;
        let slope = -z + (a - 1.0) / right + (b - a - 1.0) / (1.0 + right);
        if v - peak < -CUT && slope < -0.25 * z {
            break;
        }
        right *= 1.5;
        guard += 1;
        if guard > 4000 || !right.is_finite() {
            return Err(Error::numerical("could not bound the integrand tail"));
        }
    }
    let mut pts = vec![0.0];
    pts.extend(breaks.iter().copied().filter(|&t| t < right));
    pts.push(right);

    // Left cut for a > 1: the integrand vanishes like t^{a-1} at 0.
    if a > 1.0 && pts.len() > 2 {
        let first = pts[1];
        let mut left = first;
        for _ in 0..1100 {
            left *= 0.5;
            if log_f(Dd::from_f64(left)).hi - peak < -CUT {
                pts[0] = left;
                break;
            }
        }
    }

    let mut total = Dd::ZERO;
    for w in pts.windows(2) {
        let (l, r) = (Dd::from_f64(w[0]), Dd::from_f64(w[1]));
        let piece = if w[0] == 0.0 && a < 1.0 {
            // t = u^{1/a}: ∫_0^r t^{a-1} g dt = (1/a) ∫_0^{r^a} g(u^{1/a}) du.
            let inv_a = Dd::from_f64(a).recip();
            let ln_a = Dd::from_f64(a).ln();
            let upper = (r.ln() * a).exp();
            tanh_sinh(
                Dd::ZERO,
                upper,
                |u, _| {
                    if u.hi <= 0.0 {
                        return log_g(Dd::ZERO) - ln_a;
                    }
                    let t = (u.ln() * inv_a).exp();
                    log_g(t) - ln_a
                },
                peak_dd,
                precision_digits,
            )?
        } else {
            tanh_sinh(l, r, |t, _| log_f(t), peak_dd, precision_digits)?
        };
        total += piece;
    }
    if !(total.hi > 0.0) {
        return Err(Error::numerical(format!("quadrature for U({a}, {b}, {z}) returned {:e}", total.hi)));
    }
    let log = total.ln() + peak_dd - dd::ln_gamma(Dd::from_f64(a));
    Ok(OracleValue::from_log(log, 1))
}

/// `|a M(a,b) U(a+1,b+1) + (a/b) M(a+1,b+1) U(a,b) - e^z Γ(b)/(z^b Γ(a))|`
/// relative to the right-hand side, all from oracle values. `a` and `b` are
/// moved by at most an ulp so that `a + 1` and `b + 1` are exact.
pub fn oracle_wronskian_residual(p: &Parameters, precision_digits: u32) -> Result<f64> {
    let (a, b, z) = (unit_shift_base(p.a()), unit_shift_base(p.b()), p.z());
    if b <= 0.0 {
        return Err(Error::domain("the Wronskian check needs b > 0"));
    }
    let p = &Parameters::new(a, b, z)?;
    let m_ab = oracle_m(p, precision_digits)?.log_magnitude_dd();
    let shifted = Parameters::new(a + 1.0, b + 1.0, z)?;
    let m_up = oracle_m(&shifted, precision_digits)?.log_magnitude_dd();
    let u_up = oracle_u(&shifted, precision_digits)?.log_magnitude_dd();
    let u_ab = oracle_u(p, precision_digits)?.log_magnitude_dd();
    let a_d = Dd::from_f64(a);
    let b_d = Dd::from_f64(b);
    let rhs = Dd::from_f64(z) + dd::ln_gamma(b_d) - b_d * Dd::from_f64(z).ln() - dd::ln_gamma(a_d);
    let x = a_d.ln() + m_ab + u_up - rhs;
    let y = (a_d / b_d).ln() + m_up + u_ab - rhs;
    Ok((x.exp() + y.exp() - 1.0).abs().to_f64())
}
