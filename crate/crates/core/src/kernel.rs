//! Radial filter kernels and their moment constants.
//!
//! A filter is `h(x) = k(||x||^2)` for a smooth profile `k` on `[0, inf)`,
//! normalized to unit L2 norm over `R^N`. Every constant needed downstream
//! (`gamma`, `kappa`, `kappa_{2,2}`, `kappa_4`, `rho` and the derived
//! `C~_{k,N}`, `c_{k,N}`, `C_{k,N}`, `D_{k,N}`) reduces to a one-dimensional
//! radial integral against an exact angular moment of the unit sphere, so all
//! quadrature here is 1-D and adaptive.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::quad::{adaptive_quad, QuadConfig};
use crate::special::gamma_half;
use crate::Result;

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A spherically symmetric filter `h(x) = k(||x||^2)` on `R^N`.
#[derive(Clone)]
pub struct RadialKernel {
    name: String,
    dim: usize,
    profile: Profile,
    derivative: Profile,
    /// Radius (in `r = ||x||`) beyond which the profile is treated as zero.
    support_radius: f64,
}

impl fmt::Debug for RadialKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialKernel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

impl RadialKernel {
    /// Profile `k(x)` with `x = ||u||^2`.
    pub fn k(&self, x: f64) -> f64 {
        (self.profile)(x)
    }

    /// Profile derivative `dk/dx`.
    pub fn k_dot(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    /// Filter value at a spatial point.
    pub fn h(&self, t: &[f64]) -> f64 {
        let x: f64 = t.iter().map(|v| v * v).sum();
        self.k(x)
    }

    /// Filter value at squared radius `x`.
    pub fn h_radial_sq(&self, x: f64) -> f64 {
        self.k(x)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Standard Gaussian kernel `h(t) = pi^{-N/4} exp(-|t|^2/2)`.
    pub fn gaussian(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        let amp = PI.powf(-(n as f64) / 4.0);
        RadialKernel {
            name: "gaussian".into(),
            dim: n,
            profile: Arc::new(move |x| amp * (-x / 2.0).exp()),
            derivative: Arc::new(move |x| -0.5 * amp * (-x / 2.0).exp()),
            support_radius: 14.0,
        }
    }

    /// Marr ("Mexican hat") wavelet
    /// `h(t) = [4N/((N+2) pi^{N/2})]^{1/2} (1 - |t|^2/N) exp(-|t|^2/2)`.
    pub fn marr(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        let nf = n as f64;
        let amp = (4.0 * nf / ((nf + 2.0) * PI.powf(nf / 2.0))).sqrt();
        RadialKernel {
            name: "marr".into(),
            dim: n,
            profile: Arc::new(move |x| amp * (1.0 - x / nf) * (-x / 2.0).exp()),
            derivative: Arc::new(move |x| {
                amp * (-x / 2.0).exp() * (x / (2.0 * nf) - 1.0 / nf - 0.5)
            }),
            support_radius: 14.0,
        }
    }

    /// User-supplied radial profile with a declared effective support radius.
    ///
    /// The unit-norm invariant and the consistency of `derivative` with
    /// `profile` are checked; the kernel is rejected rather than silently
    /// rescaled, since rescaling `k` without `k_dot` would desynchronize them.
    pub fn custom(
        name: impl Into<String>,
        n: usize,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_radius: f64,
    ) -> Result<Self> {
        let kernel = RadialKernel {
            name: name.into(),
            dim: n,
            profile: Arc::new(profile),
            derivative: Arc::new(derivative),
            support_radius,
        };
        kernel.validate()?;
        Ok(kernel)
    }

    /// Checks the unit L2 norm and finite-difference consistency of the
    /// derivative on the support.
    pub fn validate(&self) -> Result<()> {
        let norm2 = self.l2_norm_sq()?;
        if (norm2 - 1.0).abs() > 1e-6 {
            return Err(Error::InvariantViolation(format!(
                "kernel '{}' has L2 norm^2 = {norm2:.12}, expected 1",
                self.name
            )));
        }
        // central differences at a spread of interior points
        let h = 1e-5;
        let mut checked = 0;
        for i in 1..40 {
            let x = self.support_radius * self.support_radius * i as f64 / 45.0;
            let k0 = self.k(x);
            if k0.abs() < 1e-12 && self.k_dot(x).abs() < 1e-12 {
                continue;
            }
            let fd = (self.k(x + h) - self.k(x - h)) / (2.0 * h);
            let scale = self.k_dot(x).abs().max(1.0);
            if (fd - self.k_dot(x)).abs() > 1e-4 * scale {
                return Err(Error::InvariantViolation(format!(
                    "kernel '{}' derivative inconsistent at x={x}: fd={fd}, k_dot={}",
                    self.name,
                    self.k_dot(x)
                )));
            }
            checked += 1;
        }
        if checked == 0 {
            return Err(Error::InvariantViolation(format!(
                "kernel '{}' vanishes on its declared support",
                self.name
            )));
        }
        Ok(())
    }

    /// `int_{R^N} h^2`, via radial reduction.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        radial_moment(self, Integrand::KSquared, 0, 0, self.dim)
    }
}

/// Which product of profile factors sits in a radial moment integral.
#[derive(Clone, Copy)]
pub(crate) enum Integrand {
    /// `k_dot(r^2)^2`
    KDotSquared,
    /// `k(r^2) k_dot(r^2)`
    KKDot,
    /// `k(r^2)^2`
    KSquared,
    /// `[2 r^2 k_dot(r^2) + (N/2) k(r^2)]^2`, the scale-derivative variance
    ScaleDeriv,
}

/// Exact angular moment of the unit sphere `S^{n-1}`:
/// `int_{S^{n-1}} x_1^a x_2^b dsigma` for even `a`, `b`.
///
/// Expressed through Gamma factors this is
/// `2 G((a+1)/2) G((b+1)/2) G(1/2)^{n-2} / G((n+a+b)/2)`,
/// which also provides the n = 1 continuation used to define `kappa_{2,2}`
/// and `rho` consistently in one dimension.
pub fn sphere_moment(a: u32, b: u32, n: usize) -> f64 {
    debug_assert!(a % 2 == 0 && b % 2 == 0);
    2.0 * gamma_half(a + 1) * gamma_half(b + 1) * PI.sqrt().powi(n as i32 - 2)
        / gamma_half((n as u32) + a + b)
}

/// `int_{R^n} g(||u||^2) u_1^a u_2^b du` reduced to
/// `S_{a,b,n} * int_0^inf g(r^2) r^{n-1+a+b} dr`.
pub(crate) fn radial_moment(
    kernel: &RadialKernel,
    which: Integrand,
    a: u32,
    b: u32,
    n: usize,
) -> Result<f64> {
    let power = (n as u32 - 1 + a + b) as i32;
    let nf = kernel.dim as f64;
    let g = |r: f64| -> f64 {
        let x = r * r;
        let base = match which {
            Integrand::KDotSquared => kernel.k_dot(x) * kernel.k_dot(x),
            Integrand::KKDot => kernel.k(x) * kernel.k_dot(x),
            Integrand::KSquared => kernel.k(x) * kernel.k(x),
            Integrand::ScaleDeriv => {
                let v = 2.0 * x * kernel.k_dot(x) + 0.5 * nf * kernel.k(x);
                v * v
            }
        };
        base * r.powi(power)
    };
    let upper = integration_cutoff(&g, kernel.support_radius);
    let integral = adaptive_quad(&g, 0.0, upper, QuadConfig::default())?;
    Ok(sphere_moment(a, b, n) * integral)
}

/// Upper integration limit: past the integrand's peak, the first scan point
/// where it has fallen below 1e-16 of the peak.
fn integration_cutoff<F: Fn(f64) -> f64>(g: &F, support: f64) -> f64 {
    let hi = support.min(64.0);
    let steps = 512;
    let mut peak = 0.0f64;
    let mut cutoff = hi;
    for i in 1..=steps {
        let r = hi * i as f64 / steps as f64;
        let v = g(r).abs();
        if v > peak {
            peak = v;
            cutoff = hi;
        } else if peak > 0.0 && v < 1e-16 * peak {
            cutoff = r;
            break;
        }
    }
    cutoff
}

/// All kernel-dependent scalar constants for one kernel/dimension pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelMoments {
    pub gamma: f64,
    /// `sigma^2 Var(df/dsigma)`, from the direct variance integral.
    pub kappa: f64,
    pub kappa22: f64,
    pub kappa4: f64,
    pub rho: f64,
    /// `C~_{k,N} = sqrt(N^2 (1/16 + rho/2 + kappa22) + 2 N kappa22)`.
    pub ctilde: f64,
    pub c_small: f64,
    pub c_big: f64,
    /// `D_{k,N}`; undefined at N = 1 (needs the N-1 dimensional constant).
    pub d_big: Option<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    pub kernel: String,
}

impl KernelMoments {
    /// `K = N(N+1)/2`, the dimension of `Sym_N`.
    pub fn sym_dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// `D = N + K`, the rotation-space parameter dimension.
    pub fn param_dim(&self) -> usize {
        self.n + self.sym_dim()
    }
}

/// Residuals of the structural identities, reported alongside the moments.
#[derive(Debug, Clone, Serialize)]
pub struct MomentDiagnostics {
    /// `kappa4 - 3 kappa22` (zero for any consistent radial kernel).
    pub kappa4_identity: f64,
    /// `kappa - 4 ctilde^2` (the two routes to the same constant).
    pub kappa_route_gap: f64,
    /// `1 - int h^2`.
    pub norm_defect: f64,
}

/// Scale-derivative variance `kappa` from the direct integral
/// `int [ <u, grad h(u)> + N h(u)/2 ]^2 du`, independent of the
/// `4 C~^2` route.
pub fn kappa_direct(kernel: &RadialKernel) -> Result<f64> {
    radial_moment(kernel, Integrand::ScaleDeriv, 0, 0, kernel.dim())
}

/// Computes every moment constant for `kernel`, checking the structural
/// invariants along the way.
pub fn compute_moments(kernel: &RadialKernel) -> Result<KernelMoments> {
    let (m, diag) = compute_moments_with_diagnostics(kernel)?;
    let tol_k4 = 1e-7 * m.kappa4.abs().max(1.0);
    if diag.kappa4_identity.abs() > tol_k4 {
        return Err(Error::InvariantViolation(format!(
            "kappa4 - 3*kappa22 = {:.3e} for kernel '{}' (inconsistent profile/derivative)",
            diag.kappa4_identity, m.kernel
        )));
    }
    if diag.kappa_route_gap.abs() > 1e-6 * m.kappa.abs().max(1.0) {
        return Err(Error::InvariantViolation(format!(
            "kappa = {:.12} but 4*ctilde^2 = {:.12} for kernel '{}'",
            m.kappa,
            4.0 * m.ctilde * m.ctilde,
            m.kernel
        )));
    }
    if diag.norm_defect.abs() > 1e-6 {
        return Err(Error::InvariantViolation(format!(
            "kernel '{}' L2 norm defect {:.3e}",
            m.kernel, diag.norm_defect
        )));
    }
    Ok(m)
}

/// Same as [`compute_moments`] but returns the identity residuals instead of
/// enforcing them; used by the verification suite.
pub fn compute_moments_with_diagnostics(
    kernel: &RadialKernel,
) -> Result<(KernelMoments, MomentDiagnostics)> {
    let n = kernel.dim();
    let nf = n as f64;
    let gamma = 4.0 * radial_moment(kernel, Integrand::KDotSquared, 2, 0, n)?;
    let kappa22 = radial_moment(kernel, Integrand::KDotSquared, 2, 2, n)?;
    let kappa4 = radial_moment(kernel, Integrand::KDotSquared, 4, 0, n)?;
    let rho = radial_moment(kernel, Integrand::KKDot, 2, 0, n)?;
    let kappa = kappa_direct(kernel)?;
    let norm2 = kernel.l2_norm_sq()?;

    let core = 1.0 / 16.0 + rho / 2.0 + kappa22;
    let ctilde_sq = nf * nf * core + 2.0 * nf * kappa22;
    if ctilde_sq <= 0.0 {
        return Err(Error::InvariantViolation(format!(
            "ctilde^2 = {ctilde_sq:.6e} <= 0 for kernel '{}'",
            kernel.name()
        )));
    }
    let ctilde = ctilde_sq.sqrt();

    let big_k = n * (n + 1) / 2;
    let big_d = n + big_k;
    let c_small_sq = (2.0 * kappa22).powi(big_k as i32) * (1.0 + nf / (2.0 * kappa22) * core);
    if c_small_sq <= 0.0 {
        return Err(Error::InvariantViolation(format!(
            "c_{{k,N}}^2 = {c_small_sq:.6e} <= 0 for kernel '{}'",
            kernel.name()
        )));
    }
    let c_small = c_small_sq.sqrt();
    let mut gamma_prod = 1.0;
    for j in 1..=n {
        gamma_prod *= gamma_half(1) / gamma_half(j as u32);
    }
    let c_big = (2.0 * PI).powf(big_d as f64 / 2.0 - nf) * gamma_prod * c_small;

    let d_big = if n >= 2 {
        let ctilde_sq_lower = ctilde_sq_in_dim(kernel, n - 1)?;
        let ratio = (ctilde_sq / nf) / (ctilde_sq_lower / (nf - 1.0));
        Some((2.0 * kappa22 * ratio).sqrt())
    } else {
        None
    };

    let moments = KernelMoments {
        gamma,
        kappa,
        kappa22,
        kappa4,
        rho,
        ctilde,
        c_small,
        c_big,
        d_big,
        n,
        kernel: kernel.name().to_string(),
    };
    let diag = MomentDiagnostics {
        kappa4_identity: kappa4 - 3.0 * kappa22,
        kappa_route_gap: kappa - 4.0 * ctilde_sq,
        norm_defect: 1.0 - norm2,
    };
    Ok((moments, diag))
}

/// `C~^2` of the same radial profile, renormalized to unit L2 norm in
/// dimension `m`. For the Gaussian this reproduces the m-dimensional Gaussian
/// kernel exactly; in general it is the constant entering `D_{k,N}`.
fn ctilde_sq_in_dim(kernel: &RadialKernel, m: usize) -> Result<f64> {
    let mf = m as f64;
    let norm2 = radial_moment(kernel, Integrand::KSquared, 0, 0, m)?;
    if norm2 <= 0.0 {
        return Err(Error::InvariantViolation(format!(
            "kernel '{}' has nonpositive L2 norm in dimension {m}",
            kernel.name()
        )));
    }
    let scale = 1.0 / norm2; // multiplies every quadratic moment
    let kappa22 = scale * radial_moment(kernel, Integrand::KDotSquared, 2, 2, m)?;
    let rho = scale * radial_moment(kernel, Integrand::KKDot, 2, 0, m)?;
    let core = 1.0 / 16.0 + rho / 2.0 + kappa22;
    Ok(mf * mf * core + 2.0 * mf * kappa22)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::random_bump_kernel;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gaussian_is_normalized_and_pointwise_correct() {
        let k = RadialKernel::gaussian(2);
        assert!((k.l2_norm_sq().unwrap() - 1.0).abs() < 1e-10);
        // k(0) = pi^{-1/2} for N = 2
        assert!(rel(k.k(0.0), 1.0 / PI.sqrt()) < 1e-14);
        // analytic derivative k_dot = -k/2 at N = 3
        let k3 = RadialKernel::gaussian(3);
        for x in [0.0, 0.5, 1.7, 4.0] {
            assert!((k3.k_dot(x) + k3.k(x) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn marr_is_normalized_with_known_root_and_peak() {
        let k = RadialKernel::marr(2);
        assert!((k.l2_norm_sq().unwrap() - 1.0).abs() < 1e-8);
        // profile zero at x = N
        assert!(k.k(2.0).abs() < 1e-15);
        // h(0) = [4/(3 sqrt(pi))]^{1/2} at N = 1
        let k1 = RadialKernel::marr(1);
        assert!(rel(k1.k(0.0), (4.0 / (3.0 * PI.sqrt())).sqrt()) < 1e-14);
    }

    #[test]
    fn gaussian_moments_match_closed_forms() {
        // Closed-form oracle for the Gaussian moments, evaluated independently:
        //   int e^{-|u|^2} u1^2 u2^2 du = pi^{N/2}/4  => kappa22 = 1/16
        //   gamma = 1/2, rho = -1/4, kappa = N/2
        for n in [1usize, 2, 3] {
            let m = compute_moments(&RadialKernel::gaussian(n)).unwrap();
            assert!(rel(m.gamma, 0.5) < 1e-8, "gamma N={n}");
            assert!(rel(m.kappa22, 1.0 / 16.0) < 1e-8, "kappa22 N={n}");
            assert!(rel(m.rho, -0.25) < 1e-8, "rho N={n}");
            assert!(rel(m.kappa, n as f64 / 2.0) < 1e-8, "kappa N={n}");
            // 1/16 + rho/2 + kappa22 = 0
            assert!(
                (1.0 / 16.0 + m.rho / 2.0 + m.kappa22).abs() < 1e-8,
                "core identity N={n}"
            );
        }
    }

    #[test]
    fn marr_gamma_matches_closed_form() {
        for n in [1usize, 2, 3] {
            let m = compute_moments(&RadialKernel::marr(n)).unwrap();
            let want = (n as f64 + 4.0) / (2.0 * n as f64);
            assert!(rel(m.gamma, want) < 1e-6, "marr gamma N={n}");
        }
    }

    #[test]
    fn kappa_direct_examples() {
        // N = 1 Gaussian: kappa = N/2 = 1/2 by the direct 1-D integral
        let k1 = kappa_direct(&RadialKernel::gaussian(1)).unwrap();
        assert!((k1 - 0.5).abs() < 1e-8);
        // cross-route consistency at N = 3
        let g3 = RadialKernel::gaussian(3);
        let m = compute_moments(&g3).unwrap();
        assert!(rel(kappa_direct(&g3).unwrap(), 4.0 * m.ctilde * m.ctilde) < 1e-6);
        // Marr N = 2: positive, no closed form asserted
        let km = kappa_direct(&RadialKernel::marr(2)).unwrap();
        assert!(km > 0.0);
    }

    #[test]
    fn kappa4_identity_for_all_kernels() {
        for n in [1usize, 2, 3] {
            for kern in [
                RadialKernel::gaussian(n),
                RadialKernel::marr(n),
                random_bump_kernel(n, 42),
            ] {
                let (m, diag) = compute_moments_with_diagnostics(&kern).unwrap();
                assert!(
                    diag.kappa4_identity.abs() < 1e-7 * m.kappa4.max(1.0),
                    "kappa4 identity {} N={n}: {:.3e}",
                    kern.name(),
                    diag.kappa4_identity
                );
                assert!(
                    diag.kappa_route_gap.abs() < 1e-6 * m.kappa.max(1.0),
                    "kappa routes {} N={n}: {:.3e}",
                    kern.name(),
                    diag.kappa_route_gap
                );
            }
        }
    }

    #[test]
    fn radial_reduction_matches_tensor_quadrature_n2() {
        // direct 2-D tensor quadrature of kappa22 = int kdot^2(|u|^2) u1^2 u2^2 du
        let kern = RadialKernel::gaussian(2);
        let rule = crate::quad::gauss_legendre(80);
        let r = 8.0;
        let mut direct = 0.0;
        for (&xi, &wi) in rule.0.iter().zip(rule.1.iter()) {
            let x = r * xi;
            for (&yj, &wj) in rule.0.iter().zip(rule.1.iter()) {
                let y = r * yj;
                let q = x * x + y * y;
                let kd = kern.k_dot(q);
                direct += wi * wj * r * r * kd * kd * x * x * y * y;
            }
        }
        let m = compute_moments(&kern).unwrap();
        assert!((direct - m.kappa22).abs() < 1e-6);

        // same check for gamma = 4 int kdot^2 u1^2 du
        let mut direct_g = 0.0;
        for (&xi, &wi) in rule.0.iter().zip(rule.1.iter()) {
            let x = r * xi;
            for (&yj, &wj) in rule.0.iter().zip(rule.1.iter()) {
                let y = r * yj;
                let q = x * x + y * y;
                let kd = kern.k_dot(q);
                direct_g += wi * wj * r * r * 4.0 * kd * kd * x * x;
            }
        }
        assert!((direct_g - m.gamma).abs() < 1e-6);
    }

    #[test]
    fn rotation_constants_reduce_at_n1() {
        for kern in [
            RadialKernel::gaussian(1),
            RadialKernel::marr(1),
            random_bump_kernel(1, 7),
        ] {
            let m = compute_moments(&kern).unwrap();
            assert!(
                rel(m.c_big, m.ctilde) < 1e-8,
                "C_k = C~_k at N=1 for {}",
                kern.name()
            );
            assert!(m.d_big.is_none());
        }
    }

    #[test]
    fn gaussian_rotation_constants_n2() {
        // c_{k,2} = 8^{-3/2} = 2^{-9/2}, C_{k,2} = pi/16, D_{k,2} = 2^{-3/2}
        let m = compute_moments(&RadialKernel::gaussian(2)).unwrap();
        assert!(rel(m.c_small, 2.0f64.powf(-4.5)) < 1e-8);
        assert!(rel(m.c_big, PI / 16.0) < 1e-8);
        assert!(rel(m.d_big.unwrap(), 2.0f64.powf(-1.5)) < 1e-8);
    }

    #[test]
    fn custom_kernel_rejects_bad_norm_and_bad_derivative() {
        let err = RadialKernel::custom(
            "unnormalized",
            1,
            |x| (-x / 2.0).exp(),
            |x| -0.5 * (-x / 2.0).exp(),
            12.0,
        );
        assert!(matches!(err, Err(Error::InvariantViolation(_))));

        let amp = PI.powf(-0.25);
        let err = RadialKernel::custom(
            "wrong-derivative",
            1,
            move |x| amp * (-x / 2.0).exp(),
            move |x| 0.5 * amp * (-x / 2.0).exp(), // sign flipped
            12.0,
        );
        assert!(matches!(err, Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn sphere_moments_known_values() {
        // surface of S^1 is 2 pi
        assert!(rel(sphere_moment(0, 0, 2), 2.0 * PI) < 1e-14);
        // S^0 = two points
        assert!(rel(sphere_moment(0, 0, 1), 2.0) < 1e-14);
        // int_{S^1} x^2 = pi
        assert!(rel(sphere_moment(2, 0, 2), PI) < 1e-14);
        // surface of S^2 is 4 pi
        assert!(rel(sphere_moment(0, 0, 3), 4.0 * PI) < 1e-14);
    }
}
