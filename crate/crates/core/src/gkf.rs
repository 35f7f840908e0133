//! Gaussian-kinematic-formula engine: expected Euler characteristics of
//! excursion sets `A_u = {f >= u}` from an LKC vector, and level-alpha
//! exceedance thresholds via the Euler characteristic heuristic.
//!
//! The expansion is
//! `E chi(A_u) = sum_j (2 pi)^{-(j+1)/2} L_j H_{j-1}(u) e^{-u^2/2}`
//! with probabilists' Hermite polynomials and the Mills-ratio stand-in
//! `H_{-1}(u) = Psi(u)/phi(u)`, so the `j = 0` term is exactly the pointwise
//! Gaussian tail `L_0 Psi(u)`.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scale::LkcVector;
use crate::special::{binomial, mills_ratio, norm_pdf, norm_tail, unit_ball_volume};
use crate::Result;

/// Probabilists' Hermite polynomial `H_n(x)` for `n >= 0`
/// (`H_0 = 1`, `H_1 = x`, `H_{n+1} = x H_n - n H_{n-1}`), extended by the
/// Mills-ratio term at `n = -1`.
pub fn hermite(n: i32, x: f64) -> f64 {
    assert!(n >= -1, "hermite defined for n >= -1");
    if n == -1 {
        return mills_ratio(x);
    }
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = x;
    for k in 1..n {
        let h2 = x * h1 - k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Flag coefficient `[n j] = C(n, j) omega_n / (omega_{n-j} omega_j)`.
pub fn flag_coefficient(n: usize, j: usize) -> Result<f64> {
    if j > n {
        return Err(Error::InvariantViolation(format!(
            "flag coefficient needs 0 <= j <= n, got [{n} {j}]"
        )));
    }
    Ok(binomial(n, j) * unit_ball_volume(n) / (unit_ball_volume(n - j) * unit_ball_volume(j)))
}

/// Gaussian Minkowski functional `M^1_j([u, inf))` of the half-line:
/// `M^1_0 = Psi(u)` and `M^1_j = H_{j-1}(u) phi(u)` for `j >= 1`.
pub fn gaussian_minkowski(j: usize, u: f64) -> f64 {
    if j == 0 {
        norm_tail(u)
    } else {
        hermite(j as i32 - 1, u) * norm_pdf(u)
    }
}

/// Expected Euler characteristic `E chi(A_u)` of the excursion set above `u`.
///
/// For truncated LKC vectors (rotation space: top two entries only) the
/// missing lower-order terms are simply absent; the truncation travels with
/// the vector and is surfaced in curve metadata.
pub fn expected_ec(lkcs: &LkcVector, u: f64) -> f64 {
    let mut acc = lkcs.value(0) * norm_tail(u);
    let phi = norm_pdf(u);
    for j in 1..=lkcs.dim {
        let lj = lkcs.value(j);
        if lj == 0.0 {
            continue;
        }
        acc += (2.0 * std::f64::consts::PI).powf(-(j as f64) / 2.0) * lj * hermite(j as i32 - 1, u) * phi;
    }
    acc
}

/// The same quantity assembled through the kinematic formula with `i = 0`:
/// `sum_j [j j] (2 pi)^{-j/2} L_j M^1_j([u, inf))`. Used as a consistency
/// check; identical to [`expected_ec`] up to rounding.
pub fn expected_ec_via_minkowski(lkcs: &LkcVector, u: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..=lkcs.dim {
        let flag = flag_coefficient(j, j).expect("j <= j");
        acc += flag
            * (2.0 * std::f64::consts::PI).powf(-(j as f64) / 2.0)
            * lkcs.value(j)
            * gaussian_minkowski(j, u);
    }
    acc
}

/// d/du of [`expected_ec`]; closed form through the Hermite recurrence.
pub fn expected_ec_derivative(lkcs: &LkcVector, u: f64) -> f64 {
    // E chi = L0 Psi + phi(u) P(u) with
    // P(u) = sum_{j>=1} (2 pi)^{-j/2} L_j H_{j-1}(u), so
    // (E chi)' = phi(u) [ -L0 - u P(u) + P'(u) ]
    let phi = norm_pdf(u);
    let mut p = 0.0;
    let mut dp = 0.0;
    for j in 1..=lkcs.dim {
        let c = (2.0 * std::f64::consts::PI).powf(-(j as f64) / 2.0) * lkcs.value(j);
        p += c * hermite(j as i32 - 1, u);
        if j >= 2 {
            dp += c * (j as f64 - 1.0) * hermite(j as i32 - 2, u);
        }
    }
    phi * (-lkcs.value(0) - u * p + dp)
}

/// Smallest `u` from which the EEC curve is strictly decreasing (the largest
/// stationary point of the curve, found by scan + bisection on the
/// derivative's polynomial factor).
pub fn monotone_tail_start(lkcs: &LkcVector) -> f64 {
    // derivative sign = sign of Q(u) = -L0 - u P(u) + P'(u), a polynomial
    let q = |u: f64| expected_ec_derivative(lkcs, u) / norm_pdf(u);
    let mut last = -10.0;
    let mut root = -10.0;
    let mut prev = q(last);
    let steps = 1200;
    for i in 1..=steps {
        let u = -10.0 + 60.0 * i as f64 / steps as f64;
        let cur = q(u);
        if prev > 0.0 && cur <= 0.0 {
            // bracketed a downward crossing; refine
            let (mut a, mut b) = (last, u);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if q(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            root = b;
        }
        last = u;
        prev = cur;
    }
    root
}

/// Solves `expected_ec(lkcs, u) = alpha` on the decreasing tail.
pub fn threshold_for_level(lkcs: &LkcVector, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ConfigInvalid(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let u_mono = monotone_tail_start(lkcs);
    let max = expected_ec(lkcs, u_mono);
    if !(alpha < max) {
        return Err(Error::LevelNotAttainable { alpha, max });
    }
    // bracket on the decreasing tail: EEC -> 0 as u -> inf
    let mut hi = u_mono.max(0.0) + 1.0;
    while expected_ec(lkcs, hi) > alpha {
        hi += 1.0;
        if hi > 1e4 {
            return Err(Error::LevelNotAttainable { alpha, max });
        }
    }
    let mut lo = u_mono;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if expected_ec(lkcs, mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Threshold grid with the EEC values and curve-level metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EecCurve {
    pub thresholds: Vec<f64>,
    pub eec_values: Vec<f64>,
    pub lkcs: LkcVector,
    pub metadata: EecMetadata,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EecMetadata {
    /// True when the LKC vector carries only its leading entries.
    pub truncated: bool,
    /// Start of the strictly decreasing tail.
    pub u_monotone: f64,
    /// Free-form provenance (kernel, domain, sigma band), filled by callers.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub description: Option<String>,
}

/// Evaluates the EEC over an ascending threshold grid.
pub fn eec_curve(lkcs: &LkcVector, thresholds: Vec<f64>, description: Option<String>) -> EecCurve {
    let eec_values = thresholds.iter().map(|&u| expected_ec(lkcs, u)).collect();
    EecCurve {
        metadata: EecMetadata {
            truncated: lkcs.truncated,
            u_monotone: monotone_tail_start(lkcs),
            description,
        },
        thresholds,
        eec_values,
        lkcs: lkcs.clone(),
    }
}
