//! Registry of runtime self-checks: every structural invariant of the
//! library, runnable as a pass/fail table from the CLI. The acceptance test
//! suite drives the same functions at full sample counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use std::time::Instant;

use crate::domain::{ball_geometry, rectangle_geometry, steiner_volume, tube_volume_estimate};
use crate::gkf::{
    expected_ec, expected_ec_derivative, expected_ec_via_minkowski, hermite, threshold_for_level,
};
use crate::kernel::{compute_moments, compute_moments_with_diagnostics, RadialKernel};
use crate::quad::gauss_legendre;
use crate::rotation::{
    eigenvalues_2x2, f_integral_km1n, f_integral_kn, f_integral_knm1, goe_pushforward_density,
    r1_elliptic, r_function, sample_goe, RotationParams,
};
use crate::scale::{
    lkcs_from_alpha, mu_moment, scale_alpha_lkcs, scale_top_two, LkcVector, ScaleFieldParams,
    ScaleRange,
};
use crate::sim::{monte_carlo_eec, GridSpec};
use crate::special::{norm_pdf, norm_tail};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Wall time; excluded from serialized artifacts so that verify output
    /// stays byte-identical under a fixed seed.
    #[serde(skip)]
    pub millis: u128,
}

pub const SUITES: [&str; 6] = ["kernel", "domain", "scale", "rotation", "gkf", "simulate"];

fn run_check(
    suite: &str,
    name: &str,
    f: impl FnOnce() -> Result<(bool, String)>,
) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        suite: suite.into(),
        name: name.into(),
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Runs one suite (or "all"); `seed` drives every stochastic check.
pub fn run_suite(suite: &str, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let all = suite == "all";
    if all || suite == "kernel" {
        kernel_suite(&mut out, seed);
    }
    if all || suite == "domain" {
        domain_suite(&mut out, seed);
    }
    if all || suite == "scale" {
        scale_suite(&mut out);
    }
    if all || suite == "rotation" {
        rotation_suite(&mut out, seed);
    }
    if all || suite == "gkf" {
        gkf_suite(&mut out);
    }
    if all || suite == "simulate" {
        simulate_suite(&mut out, seed);
    }
    if out.is_empty() {
        return Err(crate::Error::ConfigInvalid(format!(
            "unknown suite '{suite}'; use one of {SUITES:?} or 'all'"
        )));
    }
    Ok(out)
}

fn kernel_suite(out: &mut Vec<CheckResult>, seed: u64) {
    out.push(run_check("kernel", "gamma closed forms", || {
        let mut worst: f64 = 0.0;
        for n in [1usize, 2, 3] {
            let g = compute_moments(&RadialKernel::gaussian(n))?;
            worst = worst.max(rel(g.gamma, 0.5));
            let m = compute_moments(&RadialKernel::marr(n))?;
            worst = worst.max(rel(m.gamma, (n as f64 + 4.0) / (2.0 * n as f64)));
        }
        Ok((worst < 1e-6, format!("worst rel err {worst:.2e}")))
    }));
    out.push(run_check("kernel", "kappa4 - 3 kappa22 identity", || {
        let mut worst: f64 = 0.0;
        for n in [1usize, 2, 3] {
            for kern in [
                RadialKernel::gaussian(n),
                RadialKernel::marr(n),
                random_bump_kernel(n, seed),
            ] {
                let (m, d) = compute_moments_with_diagnostics(&kern)?;
                worst = worst.max(d.kappa4_identity.abs() / m.kappa4.max(1.0));
            }
        }
        Ok((worst < 1e-7, format!("worst residual {worst:.2e}")))
    }));
    out.push(run_check("kernel", "gaussian 1/16 + rho/2 + kappa22 = 0", || {
        let m = compute_moments(&RadialKernel::gaussian(3))?;
        let res = (1.0 / 16.0 + m.rho / 2.0 + m.kappa22).abs();
        Ok((res < 1e-8, format!("residual {res:.2e}")))
    }));
    out.push(run_check("kernel", "kappa equals 4 ctilde^2 (both routes)", || {
        let mut worst: f64 = 0.0;
        for n in [1usize, 2, 3] {
            for kern in [RadialKernel::gaussian(n), RadialKernel::marr(n)] {
                let m = compute_moments(&kern)?;
                worst = worst.max(rel(m.kappa, 4.0 * m.ctilde * m.ctilde));
            }
        }
        Ok((worst < 1e-6, format!("worst rel gap {worst:.2e}")))
    }));
    out.push(run_check("kernel", "C_k = C~_k at N = 1", || {
        let m = compute_moments(&RadialKernel::marr(1))?;
        let r = rel(m.c_big, m.ctilde);
        Ok((r < 1e-8, format!("rel gap {r:.2e}")))
    }));
    out.push(run_check("kernel", "radial reduction vs 2-D tensor quadrature", || {
        let kern = RadialKernel::gaussian(2);
        let m = compute_moments(&kern)?;
        let rule = gauss_legendre(80);
        let r = 8.0;
        let mut direct = 0.0;
        for (&xi, &wi) in rule.0.iter().zip(rule.1.iter()) {
            for (&yj, &wj) in rule.0.iter().zip(rule.1.iter()) {
                let (x, y) = (r * xi, r * yj);
                let kd = kern.k_dot(x * x + y * y);
                direct += wi * wj * r * r * kd * kd * x * x * y * y;
            }
        }
        let gap = (direct - m.kappa22).abs();
        Ok((gap < 1e-6, format!("|direct - radial| = {gap:.2e}")))
    }));
}

fn domain_suite(out: &mut Vec<CheckResult>, seed: u64) {
    out.push(run_check("domain", "Steiner formula vs MC tube volumes", || {
        let shapes = [rectangle_geometry(&[1.0, 1.0])?, ball_geometry(2, 1.0)?];
        let mut detail = String::new();
        let mut pass = true;
        for (gi, geom) in shapes.iter().enumerate() {
            for (ri, rho) in [0.05, 0.1, 0.2].into_iter().enumerate() {
                let want = steiner_volume(geom, rho);
                let (est, se) =
                    tube_volume_estimate(geom, rho, 1_000_000, seed + (gi * 3 + ri) as u64)?;
                let z = (est - want).abs() / se;
                pass &= z <= 3.0;
                detail.push_str(&format!("z={z:.2} "));
            }
        }
        Ok((pass, detail))
    }));
    out.push(run_check("domain", "rectangle scaling L_j ~ c^j", || {
        let base = rectangle_geometry(&[1.0, 2.0, 0.7])?;
        let c: f64 = 1.9;
        let scaled = rectangle_geometry(&[1.9, 3.8, 1.33])?;
        let mut worst: f64 = 0.0;
        for j in 0..=3usize {
            worst = worst.max(rel(scaled.lkc(j), base.lkc(j) * c.powi(j as i32)));
        }
        Ok((worst < 1e-12, format!("worst rel err {worst:.2e}")))
    }));
}

fn scale_suite(out: &mut Vec<CheckResult>) {
    out.push(run_check("scale", "strata pipeline equals Corollary fast path", || {
        let mut worst: f64 = 0.0;
        for n in [1usize, 2, 3] {
            for kern in [RadialKernel::gaussian(n), RadialKernel::marr(n)] {
                let m = compute_moments(&kern)?;
                let params = ScaleFieldParams::from(&m);
                for geom in [rectangle_geometry(&vec![1.5; n])?, ball_geometry(n, 0.8)?] {
                    for range in [ScaleRange::new(0.5, 2.0)?, ScaleRange::new(0.25, 1.5)?] {
                        let alpha = scale_alpha_lkcs(&params, &geom, &range)?;
                        let full = lkcs_from_alpha(&alpha, params.kappa);
                        let (top, next) = scale_top_two(&params, &geom, &range)?;
                        worst = worst.max(rel(full.value(n + 1), top));
                        worst = worst.max(rel(full.value(n), next));
                    }
                }
            }
        }
        Ok((worst < 1e-10, format!("worst rel gap {worst:.2e}")))
    }));
    out.push(run_check("scale", "L_0 equals Euler characteristic", || {
        let mut worst: f64 = 0.0;
        for n in [1usize, 2, 3] {
            let params = ScaleFieldParams::new(n, 0.5, n as f64 / 2.0)?;
            for geom in [rectangle_geometry(&vec![1.3; n])?, ball_geometry(n, 1.1)?] {
                let range = ScaleRange::new(0.4, 2.5)?;
                let alpha = scale_alpha_lkcs(&params, &geom, &range)?;
                let full = lkcs_from_alpha(&alpha, params.kappa);
                worst = worst.max((full.value(0) - 1.0).abs());
            }
        }
        Ok((worst < 1e-10, format!("worst |L0 - 1| = {worst:.2e}")))
    }));
    out.push(run_check("scale", "band additivity of L_{N+1}", || {
        let params = ScaleFieldParams::new(2, 0.5, 1.0)?;
        let geom = rectangle_geometry(&[1.0, 1.0])?;
        let get = |lo: f64, hi: f64| -> Result<f64> {
            let alpha = scale_alpha_lkcs(&params, &geom, &ScaleRange::new(lo, hi)?)?;
            Ok(lkcs_from_alpha(&alpha, params.kappa).value(3))
        };
        let gap = (get(0.5, 2.0)? - get(0.5, 1.1)? - get(1.1, 2.0)?).abs();
        Ok((gap < 1e-12, format!("gap {gap:.2e}")))
    }));
    out.push(run_check("scale", "mu_k closed forms vs integrals (k <= 10)", || {
        let mut worst: f64 = 0.0;
        for k in 0..=10usize {
            let f = |z: f64| z.powi(k as i32) * norm_pdf(z);
            let numeric =
                crate::quad::adaptive_quad(&f, 0.0, 42.0, crate::quad::QuadConfig::default())?;
            worst = worst.max((numeric - mu_moment(k)).abs() / mu_moment(k).max(1.0));
        }
        Ok((worst < 1e-12, format!("worst rel err {worst:.2e}")))
    }));
}

fn rotation_suite(out: &mut Vec<CheckResult>, seed: u64) {
    out.push(run_check("rotation", "N = 1 rotation equals scale space", || {
        let m = compute_moments(&RadialKernel::gaussian(1))?;
        let p = RotationParams::new(1, 0.5, 2.0)?;
        let mut worst = rel(
            f_integral_kn(&p, &m)?,
            m.ctilde * 2.0 * (1.0 / 0.5 - 1.0 / 2.0),
        );
        worst = worst.max(rel(
            f_integral_knm1(&p, &m, 10, seed)?.0,
            2.0 * m.ctilde * 4.0f64.ln(),
        ));
        worst = worst.max(rel(f_integral_km1n(&p, &m)?, 2.5));
        worst = worst.max(rel(m.c_big, m.ctilde));
        Ok((worst < 1e-8, format!("worst rel gap {worst:.2e}")))
    }));
    out.push(run_check("rotation", "N = 2 closed-form L_D regression", || {
        let m = compute_moments(&RadialKernel::gaussian(2))?;
        let mut worst: f64 = 0.0;
        for (s1, s2) in [(1.0, 2.0), (0.5, 1.0), (1.0, 4.0)] {
            let p = RotationParams::new(2, s1, s2)?;
            let l5 = m.gamma * f_integral_kn(&p, &m)?;
            let r = s1 / s2;
            let want = 2.0f64.powi(-4) * std::f64::consts::PI / (s1 * s1)
                * (r * r - 1.0 - (r * r + 1.0) * r.ln());
            worst = worst.max(rel(l5, want));
        }
        Ok((worst < 1e-3, format!("worst rel err {worst:.2e}")))
    }));
    out.push(run_check("rotation", "Haar MC matches elliptic R_1", || {
        let mut pass = true;
        let mut detail = String::new();
        for (i, (l1, l2)) in [(0.25, 1.0), (0.5, 0.9), (0.1, 2.0)].into_iter().enumerate() {
            let s = vec![l1, 0.0, 0.0, l2];
            let (mc, se) = r_function(&s, 2, 1, 200_000, seed + i as u64)?;
            let cf = r1_elliptic(l1, l2);
            let z = (mc - cf).abs() / se;
            pass &= z <= 3.0;
            detail.push_str(&format!("z={z:.2} "));
        }
        Ok((pass, detail))
    }));
    out.push(run_check("rotation", "GOE eigenvalue histogram vs density", || {
        let chk = goe_histogram_check(100_000, 200, seed)?;
        Ok((
            chk.passed,
            format!(
                "L1 {:.4} vs null {:.4} +- {:.4}",
                chk.l1, chk.null_mean, chk.null_sd
            ),
        ))
    }));
    out.push(run_check("rotation", "simplex symmetrization identity", || {
        let m = compute_moments(&RadialKernel::gaussian(2))?;
        let p = RotationParams::new(2, 1.0, 2.0)?;
        let (a, b) = (p.lam_lo(), p.lam_hi());
        let ordered = f_integral_kn(&p, &m)? / m.c_big;
        let cfg = crate::quad::QuadConfig::default();
        let inner = |l1: f64| {
            let g = |l2: f64| (l2 - l1).abs() / (l1 * l2);
            crate::quad::adaptive_quad(&g, a, l1, cfg).unwrap()
                + crate::quad::adaptive_quad(&g, l1, b, cfg).unwrap()
        };
        let full = crate::quad::adaptive_quad(&inner, a, b, cfg)?;
        let r = rel(ordered, full / 2.0);
        Ok((r < 1e-8, format!("rel gap {r:.2e}")))
    }));
}

fn gkf_suite(out: &mut Vec<CheckResult>) {
    out.push(run_check("gkf", "single-point EEC equals Gaussian tail", || {
        let lkcs = LkcVector::from_values(vec![1.0]);
        let mut worst: f64 = 0.0;
        for i in 0..=100 {
            let u = i as f64 * 0.05;
            worst = worst.max((expected_ec(&lkcs, u) - norm_tail(u)).abs());
        }
        Ok((worst < 1e-12, format!("worst abs err {worst:.2e}")))
    }));
    out.push(run_check("gkf", "threshold round trip", || {
        let lkcs = LkcVector::from_values(vec![1.0, 9.8190929083, 7.5]);
        let mut worst: f64 = 0.0;
        for alpha in [0.1, 0.05, 0.01] {
            let u = threshold_for_level(&lkcs, alpha)?;
            worst = worst.max((expected_ec(&lkcs, u) - alpha).abs());
        }
        Ok((worst <= 1e-9, format!("worst round-trip err {worst:.2e}")))
    }));
    out.push(run_check("gkf", "Hermite recurrence vs explicit forms", || {
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let x = -5.0 + 0.05 * i as f64;
            worst = worst.max((hermite(2, x) - (x * x - 1.0)).abs());
            worst = worst.max((hermite(3, x) - (x * x * x - 3.0 * x)).abs());
        }
        Ok((worst < 1e-12, format!("worst abs err {worst:.2e}")))
    }));
    out.push(run_check("gkf", "EEC derivative vs finite differences", || {
        let lkcs = LkcVector::from_values(vec![1.0, 9.82, 7.5]);
        let mut worst: f64 = 0.0;
        for i in 0..=30 {
            let u = 1.0 + 0.1 * i as f64;
            let h = 1e-6;
            let fd = (expected_ec(&lkcs, u + h) - expected_ec(&lkcs, u - h)) / (2.0 * h);
            worst = worst.max(rel(expected_ec_derivative(&lkcs, u), fd));
        }
        Ok((worst < 1e-6, format!("worst rel err {worst:.2e}")))
    }));
    out.push(run_check("gkf", "two GKF assemblies agree", || {
        let lkcs = LkcVector::from_values(vec![1.0, 9.82, 7.5, 0.3]);
        let mut worst: f64 = 0.0;
        for i in 0..=60 {
            let u = -1.0 + 0.1 * i as f64;
            let a = expected_ec(&lkcs, u);
            let b = expected_ec_via_minkowski(&lkcs, u);
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
        Ok((worst < 1e-12, format!("worst rel gap {worst:.2e}")))
    }));
}

fn simulate_suite(out: &mut Vec<CheckResult>, seed: u64) {
    out.push(run_check("simulate", "thread-count invariance", || {
        let range = ScaleRange::new(0.5, 1.0)?;
        let grid = GridSpec::standard(vec![4.0], &range);
        let kernel = RadialKernel::gaussian(1);
        let run = |threads: usize| -> Result<_> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| crate::Error::ConfigInvalid(e.to_string()))?;
            pool.install(|| monte_carlo_eec(&kernel, &grid, &range, &[2.0], 120, seed))
        };
        let (one, four, eight) = (run(1)?, run(4)?, run(8)?);
        Ok((one == four && one == eight, "bit-identical at 1/4/8 threads".into()))
    }));
    out.push(run_check("simulate", "chi at very low threshold is 1", || {
        let range = ScaleRange::new(0.5, 1.0)?;
        let grid = GridSpec::standard(vec![4.0], &range);
        let stats = monte_carlo_eec(&RadialKernel::gaussian(1), &grid, &range, &[-10.0], 100, seed)?;
        Ok((stats.mean_chi[0] == 1.0, format!("mean chi {}", stats.mean_chi[0])))
    }));
    out.push(run_check("simulate", "MC mean chi vs GKF formula (reduced)", || {
        let kernel = RadialKernel::gaussian(1);
        let m = compute_moments(&kernel)?;
        let params = ScaleFieldParams::from(&m);
        let range = ScaleRange::new(0.5, 2.0)?;
        let geom = rectangle_geometry(&[10.0])?;
        let alpha = scale_alpha_lkcs(&params, &geom, &range)?;
        let lkcs = lkcs_from_alpha(&alpha, params.kappa);
        let grid = GridSpec::standard(vec![10.0], &range);
        let us = [2.0, 2.5, 3.0];
        let stats = monte_carlo_eec(&kernel, &grid, &range, &us, 400, seed)?;
        let mut pass = true;
        let mut detail = String::new();
        for j in 0..us.len() {
            let want = expected_ec(&lkcs, us[j]);
            let z = (stats.mean_chi[j] - want).abs() / stats.se_chi[j];
            pass &= z <= 3.0;
            detail.push_str(&format!("u={} z={z:.2} ", us[j]));
        }
        Ok((pass, detail))
    }));
}

/// Seeded smooth compactly-supported radial profile (normalized); exposed so
/// both the verify suite and tests can build the same randomized kernel.
pub fn random_bump_kernel(n: usize, seed: u64) -> RadialKernel {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0: f64 = rng.gen_range(0.5..1.5);
    let c1: f64 = rng.gen_range(-0.3..0.3);
    let c2: f64 = rng.gen_range(-0.05..0.05);
    let r0 = 9.0f64;
    let raw = move |x: f64| {
        if x >= r0 {
            0.0
        } else {
            let b = 1.0 - x / r0;
            (c0 + c1 * x + c2 * x * x) * b * b * b * b
        }
    };
    let raw_dot = move |x: f64| {
        if x >= r0 {
            0.0
        } else {
            let b = 1.0 - x / r0;
            (c1 + 2.0 * c2 * x) * b * b * b * b
                - (4.0 / r0) * (c0 + c1 * x + c2 * x * x) * b * b * b
        }
    };
    // normalize via the angular-moment reduction before constructing
    let surface = crate::kernel::sphere_moment(0, 0, n);
    let radial = crate::quad::adaptive_quad(
        &|r: f64| raw(r * r) * raw(r * r) * r.powi(n as i32 - 1),
        0.0,
        3.0,
        crate::quad::QuadConfig::default(),
    )
    .expect("smooth bump");
    let norm = (surface * radial).sqrt();
    RadialKernel::custom(
        "random-bump",
        n,
        move |x| raw(x) / norm,
        move |x| raw_dot(x) / norm,
        3.0,
    )
    .expect("normalized bump kernel")
}

/// Result of the GOE ordered-eigenvalue histogram comparison.
#[derive(Debug, Clone, Serialize)]
pub struct GoeHistogramCheck {
    /// Observed L1 distance between the empirical histogram and the analytic
    /// bin probabilities.
    pub l1: f64,
    /// Parametric-bootstrap null mean and sd of the same statistic.
    pub null_mean: f64,
    pub null_sd: f64,
    /// `l1 <= null_mean + 3 null_sd`.
    pub passed: bool,
}

/// Samples `samples` 2x2 GOE matrices, bins the ordered eigenvalue pairs on
/// a grid over `[-4, 4]^2` (plus a complement bin), and compares the
/// empirical histogram with the analytic push-forward density in L1. The
/// null scale of the statistic is calibrated by a parametric bootstrap:
/// `boot` multinomial replicates drawn from the analytic probabilities.
pub fn goe_histogram_check(samples: usize, boot: usize, seed: u64) -> Result<GoeHistogramCheck> {
    let grid = 10usize;
    let (lo, hi) = (-4.0f64, 4.0f64);
    let step = (hi - lo) / grid as f64;
    // bins: boxes strictly above the diagonal (box_hi1 <= box_lo2)
    let mut boxes = Vec::new();
    for i in 0..grid {
        for j in (i + 1)..grid {
            boxes.push((lo + i as f64 * step, lo + (i + 1) as f64 * step,
                        lo + j as f64 * step, lo + (j + 1) as f64 * step));
        }
    }
    // analytic probability of each box by tensor Gauss-Legendre
    let rule = gauss_legendre(12);
    let mut p = Vec::with_capacity(boxes.len() + 1);
    for &(a1, b1, a2, b2) in &boxes {
        let (c1, h1) = (0.5 * (a1 + b1), 0.5 * (b1 - a1));
        let (c2, h2) = (0.5 * (a2 + b2), 0.5 * (b2 - a2));
        let mut acc = 0.0;
        for (&x, &wx) in rule.0.iter().zip(rule.1.iter()) {
            for (&y, &wy) in rule.0.iter().zip(rule.1.iter()) {
                let l1 = c1 + h1 * x;
                let l2 = c2 + h2 * y;
                acc += wx * wy * h1 * h2 * goe_pushforward_density(2, &[l1, l2])?;
            }
        }
        p.push(acc);
    }
    let p_rest = (1.0 - p.iter().sum::<f64>()).max(0.0);
    p.push(p_rest);

    // empirical histogram
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; p.len()];
    for _ in 0..samples {
        let m = sample_goe(2, &mut rng);
        let (l1, l2) = eigenvalues_2x2(&m);
        let mut bin = boxes.len(); // complement bin
        if l1 > lo && l1 < hi && l2 > lo && l2 < hi {
            let i = ((l1 - lo) / step) as usize;
            let j = ((l2 - lo) / step) as usize;
            if i < grid && j < grid && j > i {
                // row-major index over the strictly-upper boxes
                let offset: usize = (0..i).map(|k| grid - 1 - k).sum();
                bin = offset + (j - i - 1);
            }
        }
        counts[bin] += 1;
    }
    let l1_dist = |counts: &[u64]| -> f64 {
        counts
            .iter()
            .zip(p.iter())
            .map(|(&c, &q)| (c as f64 / samples as f64 - q).abs())
            .sum()
    };
    let observed = l1_dist(&counts);

    // parametric bootstrap under the analytic model
    let mut null = Vec::with_capacity(boot);
    for _ in 0..boot {
        let mut remaining = samples as u64;
        let mut mass = 1.0;
        let mut cs = vec![0u64; p.len()];
        for (k, &q) in p.iter().enumerate() {
            if k == p.len() - 1 {
                cs[k] = remaining;
                break;
            }
            let frac = (q / mass).clamp(0.0, 1.0);
            let draw = if remaining == 0 || frac <= 0.0 {
                0
            } else if frac >= 1.0 {
                remaining
            } else {
                Binomial::new(remaining, frac)
                    .map_err(|e| crate::Error::ConfigInvalid(e.to_string()))?
                    .sample(&mut rng)
            };
            cs[k] = draw;
            remaining -= draw;
            mass -= q;
        }
        null.push(l1_dist(&cs));
    }
    let null_mean = null.iter().sum::<f64>() / null.len() as f64;
    let null_sd = (null.iter().map(|v| (v - null_mean) * (v - null_mean)).sum::<f64>()
        / (null.len() as f64 - 1.0))
        .sqrt();
    Ok(GoeHistogramCheck {
        l1: observed,
        null_mean,
        null_sd,
        passed: observed <= null_mean + 3.0 * null_sd,
    })
}
