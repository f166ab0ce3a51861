//! The two-dimensional small-mass scalar model: Hadamard two-point kernel at
//! zero spatial separation, time-averaged moments of the normal-ordered
//! square by singularity-aware quadrature, and the sqrt(2) skewness ratio of
//! the resulting distribution.
//!
//! Moments depend on mu and T only through the product mu T. For mu T << 1
//! the leading logarithms are ln^2(mu T) / (2 pi^2) for the second moment
//! and ln^3(1/(mu T)) / pi^3 for the third.

use crate::error::{Error, Result};
use crate::quad;
use crate::quadform;
use std::f64::consts::PI;

/// Model parameters: effective inverse-time scale mu = e^gamma m / 2 and the
/// sampling interval duration T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub mu: f64,
    pub duration: f64,
}

impl ModelParams {
    pub fn new(mu: f64, duration: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("mu", format!("must be > 0, got {mu}")));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid(
                "duration",
                format!("must be > 0, got {duration}"),
            ));
        }
        Ok(Self { mu, duration })
    }

    pub fn mu_t(&self) -> f64 {
        self.mu * self.duration
    }
}

/// How a moment is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    /// Graded-mesh quadrature of the defining integral.
    Quadrature,
    /// Elementary antiderivatives (second moment only).
    ClosedForm,
    /// The small-mu-T leading logarithm.
    LeadingLog,
    /// Discretized kernel trace from the spectral model (third moment only).
    Trace { points: usize },
}

impl MomentMethod {
    pub fn label(&self) -> &'static str {
        match self {
            MomentMethod::Quadrature => "quadrature",
            MomentMethod::ClosedForm => "closed_form",
            MomentMethod::LeadingLog => "leading_log",
            MomentMethod::Trace { .. } => "trace",
        }
    }
}

/// A computed moment with the method tag and an estimate of the numerical
/// error of that method (not of the model truncation).
#[derive(Debug, Clone, Copy)]
pub struct MomentResult {
    pub value: f64,
    pub method: MomentMethod,
    pub error: f64,
}

pub const MOMENT_CSV_HEADER: &str = "muT,method,order,value,error";

/// One CSV row in the `muT,method,order,value,error` schema.
pub fn moment_csv_row(mu_t: f64, order: u32, result: &MomentResult) -> String {
    format!(
        "{mu_t},{},{order},{},{}\n",
        result.method.label(),
        result.value,
        result.error
    )
}

/// Hadamard kernel of the small-mass field at zero spatial separation:
/// G(t1, t2) = -(1/2 pi) ln(mu |t1 - t2|). Diverges at coincident points;
/// regulated access lives in [`crate::quadform`].
pub fn hadamard_log(t1: f64, t2: f64, mu: f64) -> Result<f64> {
    let dt = (t1 - t2).abs();
    if dt == 0.0 {
        return Err(Error::Domain(format!(
            "hadamard_log: coincident points t = {t1}"
        )));
    }
    Ok(-(mu * dt).ln() / (2.0 * PI))
}

/// Hadamard kernel of the massive field, -(1/4) Y0(m |t1 - t2|).
pub fn hadamard_massive(t1: f64, t2: f64, m: f64) -> Result<f64> {
    let dt = (t1 - t2).abs();
    if dt == 0.0 {
        return Err(Error::Domain(format!(
            "hadamard_massive: coincident points t = {t1}"
        )));
    }
    Ok(-0.25 * bessel_y0(m * dt))
}

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bessel function of the first kind, order zero, by its ascending series
/// for |x| <= 12 and the Hankel asymptotic expansion beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 12.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut acc = 1.0;
        for k in 1..200 {
            term *= -q / ((k * k) as f64);
            acc += term;
            if term.abs() < 1e-18 * acc.abs().max(1.0) {
                break;
            }
        }
        acc
    } else {
        let (p, q) = hankel_pq(x);
        let chi = x - PI / 4.0;
        (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// Neumann function (Bessel of the second kind) of order zero. Ascending
/// series with harmonic-number coefficients for 0 < x <= 12, Hankel
/// asymptotics beyond. Returns -inf at x = 0 and NaN for x < 0.
pub fn bessel_y0(x: f64) -> f64 {
    if x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x <= 12.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0; // q^k / (k!)^2, starting at k = 0
        let mut harmonic = 0.0;
        let mut series = 0.0; // sum_{k>=1} (-1)^{k+1} H_k q^k / (k!)^2
        for k in 1..200 {
            term *= q / ((k * k) as f64);
            harmonic += 1.0 / k as f64;
            let contrib = if k % 2 == 1 { 1.0 } else { -1.0 } * harmonic * term;
            series += contrib;
            if harmonic * term < 1e-18 * series.abs().max(1.0) {
                break;
            }
        }
        2.0 / PI * (((0.5 * x).ln() + EULER_GAMMA) * bessel_j0(x) + series)
    } else {
        let (p, q) = hankel_pq(x);
        let chi = x - PI / 4.0;
        (2.0 / (PI * x)).sqrt() * (p * chi.sin() + q * chi.cos())
    }
}

/// The P and Q series of the order-zero Hankel asymptotic expansion,
/// truncated at the smallest term.
fn hankel_pq(x: f64) -> (f64, f64) {
    // t_k = (0,k)/x^k with t_{k+1} = t_k * (-(2k+1)^2) / (8 (k+1) x)
    let mut p = 0.0;
    let mut q = 0.0;
    let mut t = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0u32..24 {
        let mag = t.abs();
        if mag >= prev {
            break; // asymptotic series started diverging
        }
        prev = mag;
        let m = k / 2;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
        let kf = k as f64;
        t *= -((2.0 * kf + 1.0) * (2.0 * kf + 1.0)) / (8.0 * (kf + 1.0) * x);
        if mag < 1e-18 {
            break;
        }
    }
    (p, q)
}

/// <(phi^2-bar)^2> = (2/T^2) int int G(t1,t2)^2, reduced exactly to
/// (1/pi^2) int_0^1 (1-u) (l + ln u)^2 du with l = ln(mu T).
pub fn second_moment(params: &ModelParams, method: MomentMethod) -> Result<MomentResult> {
    let l = params.mu_t().ln();
    match method {
        MomentMethod::ClosedForm => Ok(MomentResult {
            value: (l * l - 3.0 * l + 3.5) / (2.0 * PI * PI),
            method,
            error: 4.0 * f64::EPSILON * (l * l + 3.0 * l.abs() + 3.5) / (2.0 * PI * PI),
        }),
        MomentMethod::LeadingLog => {
            guard_leading_log(params)?;
            Ok(MomentResult {
                value: l * l / (2.0 * PI * PI),
                method,
                error: 2.0 * f64::EPSILON * l * l / (2.0 * PI * PI),
            })
        }
        MomentMethod::Quadrature => {
            let f = |u: f64| {
                let g = l + u.ln();
                (1.0 - u) * g * g
            };
            let scale = 1.0 + l * l;
            let mut acc = 0.0;
            let mut err = 0.0;
            let mut hi = 1.0f64;
            for _ in 0..64 {
                let lo = 0.5 * hi;
                let est = quad::adaptive(&f, lo, hi, 1e-16 * scale);
                acc += est.value;
                err += est.error;
                hi = lo;
            }
            // remainder of the graded mesh, bounded by dropping the (1-u) factor
            let la = l + hi.ln();
            let remainder = hi * (la * la + 2.0 * la.abs() + 2.0);
            Ok(MomentResult {
                value: acc / (PI * PI),
                method,
                error: (err + remainder) / (PI * PI),
            })
        }
        MomentMethod::Trace { .. } => Err(Error::invalid(
            "method",
            "second_moment supports quadrature, closed_form and leading_log",
        )),
    }
}

/// <(phi^2-bar)^3> = (8/T^3) int^3 G12 G23 G13, reduced to the simplex
/// integral (6/pi^3) int_0^1 du int_0^{1-u} dv (1-u-v) g(u) g(v) g(u+v)
/// with g(u) = lbar - ln u and lbar = ln(1/(mu T)).
pub fn third_moment(params: &ModelParams, method: MomentMethod) -> Result<MomentResult> {
    let lbar = -params.mu_t().ln();
    match method {
        MomentMethod::LeadingLog => {
            guard_leading_log(params)?;
            let v = lbar * lbar * lbar / (PI * PI * PI);
            Ok(MomentResult {
                value: v,
                method,
                error: 3.0 * f64::EPSILON * v.abs(),
            })
        }
        MomentMethod::Quadrature => {
            let (j, err) = simplex_triple_product(lbar);
            Ok(MomentResult {
                value: 6.0 * j / (PI * PI * PI),
                method,
                error: 6.0 * err / (PI * PI * PI),
            })
        }
        MomentMethod::Trace { points } => {
            let grid = quadform::TimeGrid::new(params.duration, points)?;
            let kernel = quadform::build_kernel(&grid, params.mu)?;
            let model = quadform::eigen_lambdas(&kernel, 1e-10)?;
            let value = quadform::trace_cumulant(&model, 3)?;
            Ok(MomentResult {
                value,
                method,
                // empirical 1/N discretization trend, with margin
                error: value.abs() / points as f64,
            })
        }
        MomentMethod::ClosedForm => Err(Error::invalid(
            "method",
            "third_moment supports quadrature, leading_log and trace",
        )),
    }
}

fn guard_leading_log(params: &ModelParams) -> Result<()> {
    if params.mu_t() >= 1.0 {
        return Err(Error::invalid(
            "mu_t",
            format!(
                "leading-log formulas require mu T < 1, got {}",
                params.mu_t()
            ),
        ));
    }
    Ok(())
}

/// J = int_0^1 du int_0^{1-u} dv (1-u-v) g(u) g(v) g(u+v) on graded dyadic
/// meshes toward both logarithmic singularities. Returns (value, error bound).
fn simplex_triple_product(lbar: f64) -> (f64, f64) {
    let g = move |w: f64| lbar - w.ln();
    let scale = 1.0 + lbar * lbar * lbar.abs();

    let inner = |u: f64| -> (f64, f64) {
        let w = 1.0 - u;
        if w <= 0.0 {
            return (0.0, 0.0);
        }
        let f = |v: f64| (1.0 - u - v) * g(u) * g(v) * g(u + v);
        let mut acc = 0.0;
        let mut err = 0.0;
        let mut hi = w;
        for _ in 0..48 {
            let lo = 0.5 * hi;
            let est = quad::adaptive(&f, lo, hi, 1e-17 * scale);
            acc += est.value;
            err += est.error;
            hi = lo;
        }
        // remainder: (1-u-v) <= 1, g(u+v) <= g(u), int_0^a g = a (g(a) + 1)
        let gu = g(u);
        let rem = gu * gu * hi * (g(hi) + 1.0);
        (acc, err + rem.abs())
    };

    let mut acc = 0.0;
    let mut err_total = 0.0;
    let mut hi = 1.0f64;
    // sup of the inner error over all evaluation points bounds its propagated
    // contribution, since the outer integration range has measure one
    let inner_err_sup = std::cell::Cell::new(0.0f64);
    for _ in 0..52 {
        let lo = 0.5 * hi;
        let est = quad::gk15(
            &|u: f64| {
                let (v, e) = inner(u);
                inner_err_sup.set(inner_err_sup.get().max(e));
                v
            },
            lo,
            hi,
        );
        acc += est.value;
        err_total += est.error;
        hi = lo;
    }
    err_total += inner_err_sup.get();
    // outer remainder: I(u) <= g(u) * int_0^1 g(v)^2 dv
    let g2_full = lbar * lbar + 2.0 * lbar + 2.0;
    let rem = g2_full * hi * (g(hi) + 1.0);
    (acc, err_total + rem.abs())
}

/// <(phi^2-bar)^3>^{1/3} / <(phi^2-bar)^2>^{1/2}, from the closed-form
/// second moment and the quadrature third moment. Approaches sqrt(2) as
/// mu T -> 0.
pub fn skewness_ratio(params: &ModelParams) -> Result<f64> {
    let m2 = second_moment(params, MomentMethod::ClosedForm)?.value;
    let m3 = third_moment(params, MomentMethod::Quadrature)?.value;
    if !(m3 > 0.0) {
        return Err(Error::Domain(format!(
            "skewness ratio needs a positive third moment, got {m3}"
        )));
    }
    Ok(m3.cbrt() / m2.sqrt())
}
