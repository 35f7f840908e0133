//! Top two Lipschitz-Killing curvatures of the rotation-space parameter
//! space `T x S(sigma_2^-2, sigma_1^-2)`, where `S` is the band of symmetric
//! positive-definite matrices with eigenvalues in `[sigma_2^-2, sigma_1^-2]`.
//!
//! The three `F` integrals below are push-forwards to ordered eigenvalues: a
//! GOE-style change of variables turns the matrix-band integrals into
//! Vandermonde-weighted integrals over the ordered simplex
//! `lam_lo <= lambda_1 <= ... <= lambda_N <= lam_hi`, which are evaluated by
//! nested Gauss-Legendre quadrature. The Haar average
//! `R_j(S) = int |(Q S Q')_{jxj}|^{1/2} dQ` enters the codimension-one term;
//! it has an elliptic-integral closed form at N = 2 (pinned against the
//! Monte-Carlo oracle) and falls back to Haar Monte Carlo with common random
//! numbers for N >= 3.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::Error;
use crate::kernel::KernelMoments;
use crate::linalg::{conjugate, det_leading_block, gram_schmidt_columns};
use crate::quad::{adaptive_quad, ordered_simplex_auto, ordered_simplex_fixed, QuadConfig};
use crate::special::gamma_half;
use crate::Result;

/// Geometry of the eigenvalue band for one rotation-space computation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RotationParams {
    n: usize,
    sigma1: f64,
    sigma2: f64,
}

impl RotationParams {
    pub fn new(n: usize, sigma1: f64, sigma2: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::UnsupportedDimension(n));
        }
        if !(sigma1 > 0.0 && sigma1 < sigma2 && sigma2.is_finite()) {
            return Err(Error::DegenerateRange(format!(
                "need 0 < sigma1 < sigma2, got [{sigma1}, {sigma2}]"
            )));
        }
        Ok(RotationParams { n, sigma1, sigma2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `K = N(N+1)/2`.
    pub fn sym_dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// `D = N + K`.
    pub fn param_dim(&self) -> usize {
        self.n + self.sym_dim()
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Lower eigenvalue bound `sigma_2^{-2}`.
    pub fn lam_lo(&self) -> f64 {
        self.sigma2.powi(-2)
    }

    /// Upper eigenvalue bound `sigma_1^{-2}`.
    pub fn lam_hi(&self) -> f64 {
        self.sigma1.powi(-2)
    }
}

/// A Haar-distributed orthogonal matrix (row-major `n x n`).
///
/// Gaussian matrix plus Gram-Schmidt with positive diagonal `R`; that QR
/// convention makes the distribution exactly Haar (no sign correction
/// needed, unlike Householder-based QR).
pub fn haar_orthogonal_sample(n: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    let mut g = vec![0.0; n * n];
    for v in g.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
    gram_schmidt_columns(&mut g, n);
    g
}

/// Monte-Carlo estimate of `R_j(S)` over `samples` Haar rotations, with its
/// standard error. `s` is row-major `n x n`, symmetric positive definite.
pub fn r_function(s: &[f64], n: usize, j: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if j > n {
        return Err(Error::DimensionMismatch { expected: n, got: j });
    }
    for r in 0..n {
        for c in r + 1..n {
            if (s[r * n + c] - s[c * n + r]).abs() > 1e-12 * s[r * n + c].abs().max(1.0) {
                return Err(Error::InvariantViolation("R_j needs a symmetric matrix".into()));
            }
        }
    }
    if j == 0 {
        return Ok((1.0, 0.0)); // empty determinant
    }
    if j == n {
        // conjugation preserves the full determinant
        return Ok((det_leading_block(s, n, n).sqrt(), 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let q = haar_orthogonal_sample(n, &mut rng);
        let c = conjugate(&q, s, n);
        let v = det_leading_block(&c, n, j).max(0.0).sqrt();
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    Ok((mean, (var / samples as f64).sqrt()))
}

/// Complete elliptic integral of the second kind with parameter `m <= 1`:
/// `E(m) = int_0^{pi/2} sqrt(1 - m sin^2 t) dt`.
pub fn elliptic_e(m: f64) -> f64 {
    assert!(m <= 1.0);
    let f = |t: f64| {
        let s = t.sin();
        (1.0 - m * s * s).max(0.0).sqrt()
    };
    adaptive_quad(
        &f,
        0.0,
        std::f64::consts::FRAC_PI_2,
        QuadConfig {
            abs_tol: 1e-13,
            max_panels: 4000,
        },
    )
    .expect("smooth integrand")
}

/// Closed form for `R_1(diag(l1, l2))`, the Haar average of the square root
/// of the (1,1) entry:
/// `R_1 = (2/pi) sqrt(l_max) E(1 - l_min/l_max)`.
///
/// The argument convention (parameter `m = 1 - l_min/l_max` passed to `E`,
/// prefactor `2/pi sqrt(l_max)`) is the one that reproduces the Haar
/// Monte-Carlo oracle; see the `r1_closed_form_vs_monte_carlo` test.
pub fn r1_elliptic(l1: f64, l2: f64) -> f64 {
    let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    (2.0 / std::f64::consts::PI) * hi.sqrt() * elliptic_e(1.0 - lo / hi)
}

fn check_moment_dim(params: &RotationParams, moments: &KernelMoments) -> Result<()> {
    if moments.n != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: moments.n,
        });
    }
    Ok(())
}

/// Vandermonde product on an ascending vector (nonnegative there).
fn vandermonde(lambda: &[f64]) -> f64 {
    let mut acc = 1.0;
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            acc *= lambda[j] - lambda[i];
        }
    }
    acc
}

/// `F_{K,N} = C_{k,N} int_ordered |Vandermonde| prod lambda_j^{-N/2} dlambda`.
pub fn f_integral_kn(params: &RotationParams, moments: &KernelMoments) -> Result<f64> {
    check_moment_dim(params, moments)?;
    let n = params.n;
    let p = -(n as f64) / 2.0;
    let f = |lam: &[f64]| vandermonde(lam) * lam.iter().map(|l| l.powf(p)).product::<f64>();
    let integral = ordered_simplex_auto(&f, n, params.lam_lo(), params.lam_hi(), 1e-11, 128)?;
    Ok(moments.c_big * integral)
}

/// `F_{K,N-1}`: the `R_{N-1}` factor joins the integrand. Closed form for
/// `R_1` at N = 2; Haar Monte Carlo with common random numbers across
/// quadrature nodes for N >= 3 (so the surrogate integrand stays smooth).
pub fn f_integral_knm1(
    params: &RotationParams,
    moments: &KernelMoments,
    r_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_moment_dim(params, moments)?;
    let n = params.n;
    let p = -(n as f64 + 1.0) / 2.0;
    let weight = move |lam: &[f64]| vandermonde(lam) * lam.iter().map(|l| l.powf(p)).product::<f64>();
    let (lo, hi) = (params.lam_lo(), params.lam_hi());

    if n == 1 {
        // R_0 = 1
        let f = |lam: &[f64]| weight(lam);
        let integral = ordered_simplex_auto(&f, 1, lo, hi, 1e-11, 256)?;
        return Ok((moments.c_big * integral, 0.0));
    }
    if n == 2 {
        let f = |lam: &[f64]| weight(lam) * r1_elliptic(lam[0], lam[1]);
        let integral = ordered_simplex_auto(&f, 2, lo, hi, 1e-10, 128)?;
        return Ok((moments.c_big * integral, 0.0));
    }

    // N >= 3: one set of Haar rotations shared by every quadrature node
    // (common random numbers keep the surrogate integrand smooth in lambda).
    // Each rotation Q contributes a full quadrature value
    //   I_Q = int w(lambda) |(Q diag(lambda) Q')_{(N-1)x(N-1)}|^{1/2} dlambda
    // and the estimator is the sample mean of the I_Q, whose spread gives an
    // exact standard error for the integral.
    let samples = r_samples.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // flattened quadrature rule with the deterministic factor folded into
    // the weights; the block of Q diag(lambda) Q' is linear in lambda, so per
    // sample only the projector tensor P[i][j][k] = Q_ik Q_jk is needed
    let nodes = crate::quad::ordered_simplex_nodes(n, lo, hi, 2, 12);
    let weighted: Vec<(Vec<f64>, f64)> = nodes
        .into_iter()
        .map(|(lam, w)| {
            let wt = w * weight(&lam);
            (lam, wt)
        })
        .collect();
    let b = n - 1;
    let projectors: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let q = haar_orthogonal_sample(n, &mut rng);
            let mut p = vec![0.0; b * b * n];
            for i in 0..b {
                for j in 0..b {
                    for k in 0..n {
                        p[(i * b + j) * n + k] = q[i * n + k] * q[j * n + k];
                    }
                }
            }
            p
        })
        .collect();
    let per_sample: Vec<f64> = projectors
        .par_iter()
        .map(|p| {
            let mut block = vec![0.0; b * b];
            let mut acc = 0.0;
            for (lam, wt) in &weighted {
                for i in 0..b {
                    for j in 0..b {
                        let mut v = 0.0;
                        for (k, &l) in lam.iter().enumerate() {
                            v += l * p[(i * b + j) * n + k];
                        }
                        block[i * b + j] = v;
                    }
                }
                acc += wt * det_leading_block(&block, b, b).max(0.0).sqrt();
            }
            acc
        })
        .collect();
    let mean = per_sample.iter().sum::<f64>() / samples as f64;
    let var = per_sample
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (samples as f64 - 1.0);
    let se = (var / samples as f64).sqrt();
    Ok((moments.c_big * mean, moments.c_big * se))
}

/// `F_{K-1,N}`: the boundary stratum where one eigenvalue is pinned at an
/// end of the band. The eigenvalue integral is over the `(N-1)`-simplex with
/// the pinning factor
/// `sigma_2^{N-2} prod |lambda_j - lam_lo| + sigma_1^{N-2} prod |lam_hi - lambda_j|`.
///
/// At N = 1 the stratum degenerates to the two endpoint matrices and the
/// value is `sigma_1^{-N} + sigma_2^{-N}`.
pub fn f_integral_km1n(params: &RotationParams, moments: &KernelMoments) -> Result<f64> {
    check_moment_dim(params, moments)?;
    let n = params.n;
    if n == 1 {
        return Ok(params.sigma1.powi(-1) + params.sigma2.powi(-1));
    }
    let (lo, hi) = (params.lam_lo(), params.lam_hi());
    let p = -(n as f64) / 2.0;
    let w_lo = params.sigma2.powi(n as i32 - 2);
    let w_hi = params.sigma1.powi(n as i32 - 2);
    let f = |lam: &[f64]| {
        let base = vandermonde(lam) * lam.iter().map(|l| l.powf(p)).product::<f64>();
        let pin_lo: f64 = lam.iter().map(|l| (l - lo).abs()).product();
        let pin_hi: f64 = lam.iter().map(|l| (hi - l).abs()).product();
        base * (w_lo * pin_lo + w_hi * pin_hi)
    };
    let integral = ordered_simplex_auto(&f, n - 1, lo, hi, 1e-11, 128)?;
    let d_big = moments
        .d_big
        .ok_or(Error::UnsupportedDimension(1))?;
    Ok(moments.c_big / d_big * integral)
}

/// Top two LKCs of rotation space plus the raw `F` integrals.
#[derive(Debug, Clone, Serialize)]
pub struct RotationTopTwo {
    /// `L_D = gamma^{N/2} H^E_N(T) F_{K,N}`.
    pub l_top: f64,
    /// `L_{D-1} = (gamma^{(N-1)/2} H^E_{N-1}(dT) F_{K,N-1}
    ///           + gamma^{N/2} H^E_N(T) F_{K-1,N}) / 2`.
    pub l_next: f64,
    pub f_kn: f64,
    pub f_knm1: f64,
    pub f_km1n: f64,
    /// Monte-Carlo standard errors (zero where closed forms were used).
    pub se_f_knm1: f64,
    pub se_l_next: f64,
}

pub fn lkc_rotation_top_two(
    params: &RotationParams,
    moments: &KernelMoments,
    geom: &crate::domain::DomainGeometry,
    r_samples: usize,
    seed: u64,
) -> Result<RotationTopTwo> {
    check_moment_dim(params, moments)?;
    if geom.dimension != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: geom.dimension,
        });
    }
    let n = params.n as f64;
    let gamma = moments.gamma;
    let f_kn = f_integral_kn(params, moments)?;
    let (f_knm1, se_f_knm1) = f_integral_knm1(params, moments, r_samples, seed)?;
    let f_km1n = f_integral_km1n(params, moments)?;
    let l_top = gamma.powf(n / 2.0) * geom.volume * f_kn;
    let l_next = 0.5
        * (gamma.powf((n - 1.0) / 2.0) * geom.boundary_measure * f_knm1
            + gamma.powf(n / 2.0) * geom.volume * f_km1n);
    let se_l_next = 0.5 * gamma.powf((n - 1.0) / 2.0) * geom.boundary_measure * se_f_knm1;
    Ok(RotationTopTwo {
        l_top,
        l_next,
        f_kn,
        f_knm1,
        f_km1n,
        se_f_knm1,
        se_l_next,
    })
}

/// One draw from the Gaussian orthogonal ensemble: symmetric, diagonal
/// entries N(0,2), off-diagonal N(0,1).
pub fn sample_goe(n: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        let d: f64 = StandardNormal.sample(rng);
        m[i * n + i] = d * std::f64::consts::SQRT_2;
        for j in i + 1..n {
            let o: f64 = StandardNormal.sample(rng);
            m[i * n + j] = o;
            m[j * n + i] = o;
        }
    }
    m
}

/// Ordered eigenvalues of a symmetric 2x2 matrix.
pub fn eigenvalues_2x2(m: &[f64]) -> (f64, f64) {
    let (a, b, c) = (m[0], m[1], m[3]);
    let mean = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mean - r, mean + r)
}

/// GOE ordered-eigenvalue density
/// `(2 pi)^{-N/2} 2^{-N(N+1)/4} prod_j Gamma(1/2)/Gamma(j/2)
///  |Vandermonde(lambda)| exp(-sum lambda_i^2 / 4)`
/// on the ordered region; errors on unordered input.
pub fn goe_pushforward_density(n: usize, lambda: &[f64]) -> Result<f64> {
    if lambda.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: lambda.len(),
        });
    }
    if lambda.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnorderedInput);
    }
    let mut gamma_prod = 1.0;
    for j in 1..=n {
        gamma_prod *= gamma_half(1) / gamma_half(j as u32);
    }
    let nf = n as f64;
    let norm = (2.0 * std::f64::consts::PI).powf(-nf / 2.0)
        * 2.0f64.powf(-nf * (nf + 1.0) / 4.0)
        * gamma_prod;
    let sum_sq: f64 = lambda.iter().map(|l| l * l).sum();
    Ok(norm * vandermonde(lambda) * (-0.25 * sum_sq).exp())
}
