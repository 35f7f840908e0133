//! Numerical integration: Gauss-Legendre rules, a 1-D adaptive scheme and
//! nested quadrature over the ordered eigenvalue simplex.
//!
//! All integrands of interest are smooth (analytic away from removable
//! points), so panel-doubling Gauss rules converge spectrally; adaptivity is
//! only needed to pick panel counts automatically and to fail loudly when a
//! tolerance cannot be met.

use crate::error::Error;
use crate::Result;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence; accurate to ~1 ulp for the
/// rule sizes used here (n <= 64).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed Gauss-Legendre integral of `f` over `[a, b]`.
pub fn fixed_gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Configuration of the adaptive 1-D scheme.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Absolute tolerance on the integral.
    pub abs_tol: f64,
    /// Hard cap on the number of accepted panels.
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            max_panels: 4000,
        }
    }
}

/// Adaptive Gauss-Legendre integration of `f` over `[a, b]`.
///
/// Each panel is accepted when the 15-point estimate over the panel agrees
/// with the sum of the two half-panel estimates within the panel's share of
/// the absolute tolerance.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: QuadConfig) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = gauss_legendre(15);
    let width = (b - a).abs();
    let mut stack = vec![(a, b, fixed_gl(f, a, b, &rule))];
    let mut total = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, coarse)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = fixed_gl(f, lo, mid, &rule);
        let right = fixed_gl(f, mid, hi, &rule);
        let fine = left + right;
        let share = cfg.abs_tol * ((hi - lo).abs() / width).max(1e-3);
        if (fine - coarse).abs() <= share || (hi - lo).abs() < 1e-14 * width {
            total += fine;
            panels += 1;
            if panels > cfg.max_panels {
                return Err(Error::QuadratureNotConverged(format!(
                    "exceeded {} panels on [{a}, {b}]",
                    cfg.max_panels
                )));
            }
        } else {
            if stack.len() > 4 * cfg.max_panels {
                return Err(Error::QuadratureNotConverged(format!(
                    "subdivision stack overflow on [{a}, {b}]"
                )));
            }
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
    }
    Ok(total)
}

/// Integral of `f` over the ordered simplex
/// `lo <= x_1 <= x_2 <= ... <= x_dim <= hi`
/// by nested Gauss-Legendre with `panels` panels per nesting level.
pub fn ordered_simplex_fixed<F: Fn(&[f64]) -> f64>(
    f: &F,
    dim: usize,
    lo: f64,
    hi: f64,
    panels: usize,
    rule_size: usize,
) -> f64 {
    assert!(dim >= 1);
    let rule = gauss_legendre(rule_size);
    let mut point = vec![0.0; dim];
    nested_level(f, 0, dim, lo, lo, hi, panels, &rule, &mut point)
}

#[allow(clippy::too_many_arguments)]
fn nested_level<F: Fn(&[f64]) -> f64>(
    f: &F,
    level: usize,
    dim: usize,
    floor: f64,
    lo: f64,
    hi: f64,
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
    point: &mut Vec<f64>,
) -> f64 {
    let a = floor.max(lo);
    if a >= hi {
        return 0.0;
    }
    let step = (hi - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let pa = a + p as f64 * step;
        let pb = pa + step;
        let c = 0.5 * (pa + pb);
        let h = 0.5 * (pb - pa);
        for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
            let xi = c + h * x;
            point[level] = xi;
            let inner = if level + 1 == dim {
                f(point)
            } else {
                nested_level(f, level + 1, dim, xi, lo, hi, panels, rule, point)
            };
            acc += w * h * inner;
        }
    }
    acc
}

/// Explicit node/weight list of the nested rule used by
/// [`ordered_simplex_fixed`], for callers that sweep many integrands over one
/// fixed rule (e.g. common-random-number Monte Carlo factors).
pub fn ordered_simplex_nodes(
    dim: usize,
    lo: f64,
    hi: f64,
    panels: usize,
    rule_size: usize,
) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::new();
    if hi <= lo {
        return out;
    }
    let rule = gauss_legendre(rule_size);
    let mut point = vec![0.0; dim];
    collect_nodes(0, dim, lo, lo, hi, panels, &rule, &mut point, 1.0, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn collect_nodes(
    level: usize,
    dim: usize,
    floor: f64,
    lo: f64,
    hi: f64,
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
    point: &mut Vec<f64>,
    weight: f64,
    out: &mut Vec<(Vec<f64>, f64)>,
) {
    let a = floor.max(lo);
    if a >= hi {
        return;
    }
    let step = (hi - a) / panels as f64;
    for p in 0..panels {
        let pa = a + p as f64 * step;
        let c = 0.5 * (2.0 * pa + step);
        let h = 0.5 * step;
        for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
            let xi = c + h * x;
            point[level] = xi;
            let wi = weight * w * h;
            if level + 1 == dim {
                out.push((point.clone(), wi));
            } else {
                collect_nodes(level + 1, dim, xi, lo, hi, panels, rule, point, wi, out);
            }
        }
    }
}

/// Panel-doubling wrapper around [`ordered_simplex_fixed`]: doubles the panel
/// count until two successive refinements agree within `abs_tol`.
pub fn ordered_simplex_auto<F: Fn(&[f64]) -> f64>(
    f: &F,
    dim: usize,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let rule_size = 16;
    let mut panels = 1;
    let mut prev = ordered_simplex_fixed(f, dim, lo, hi, panels, rule_size);
    loop {
        panels *= 2;
        let next = ordered_simplex_fixed(f, dim, lo, hi, panels, rule_size);
        if (next - prev).abs() <= abs_tol.max(1e-14 * next.abs()) {
            return Ok(next);
        }
        if panels >= max_panels {
            return Err(Error::QuadratureNotConverged(format!(
                "ordered simplex integral still moving by {:.3e} at {panels} panels/axis",
                (next - prev).abs()
            )));
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gl_rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre(8);
        // degree 15 is exact for an 8-point rule
        let f = |x: f64| x.powi(15) + 3.0 * x.powi(4) + 1.0;
        let got = fixed_gl(&f, -1.0, 1.0, &rule);
        let want = 2.0 * (3.0 / 5.0 + 1.0);
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn adaptive_gaussian_integral() {
        let f = |x: f64| (-x * x).exp();
        let got = adaptive_quad(&f, 0.0, 12.0, QuadConfig::default()).unwrap();
        assert!((got - PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_moderate_peak() {
        // narrow bump integrates to ~sqrt(pi)/20
        let f = |x: f64| (-(20.0 * (x - 0.3)).powi(2)).exp();
        let got = adaptive_quad(&f, -4.0, 5.0, QuadConfig::default()).unwrap();
        assert!((got - PI.sqrt() / 20.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_nonconvergence() {
        // |x|^{-0.98} is integrable but hopeless for a polynomial rule at 1e-13
        let f = |x: f64| x.abs().powf(-0.98);
        let cfg = QuadConfig {
            abs_tol: 1e-13,
            max_panels: 40,
        };
        assert!(matches!(
            adaptive_quad(&f, 1e-300, 1.0, cfg),
            Err(Error::QuadratureNotConverged(_))
        ));
    }

    #[test]
    fn simplex_volume_and_symmetric_integrand() {
        // volume of the ordered 2-simplex over [0,1]^2 is 1/2
        let one = |_: &[f64]| 1.0;
        let v2 = ordered_simplex_auto(&one, 2, 0.0, 1.0, 1e-12, 64).unwrap();
        assert!((v2 - 0.5).abs() < 1e-12);
        // and 1/6 in dimension 3
        let v3 = ordered_simplex_auto(&one, 3, 0.0, 1.0, 1e-12, 32).unwrap();
        assert!((v3 - 1.0 / 6.0).abs() < 1e-12);
        // symmetric integrand: ordered integral = full-box integral / n!
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let got = ordered_simplex_auto(&f, 2, 0.0, 1.0, 1e-12, 64).unwrap();
        assert!((got - (2.0 / 3.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_degenerate_range_is_zero() {
        let one = |_: &[f64]| 1.0;
        assert_eq!(ordered_simplex_auto(&one, 2, 1.0, 1.0, 1e-12, 8).unwrap(), 0.0);
    }
}
