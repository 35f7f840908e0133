//! Scale-space Gaussian field simulation by discrete white-noise smoothing,
//! cubical-complex Euler characteristics of excursion sets, and Monte-Carlo
//! estimates of `E chi(A_u)` and `P{sup f >= u}`.
//!
//! One realization: i.i.d. normal deviates with standard deviation
//! `sqrt(cell volume)` on a padded fine grid, convolved in the frequency
//! domain with `sigma^{-N/2} h(./sigma)` for each sigma of a log-spaced scale
//! grid, then restricted to the unpadded window. The padding margin (>= 5
//! sigma_max) both carries the kernel support and guarantees the circular
//! convolution never wraps noise into the kept window, so results are exactly
//! linear-convolution values.
//!
//! Realizations are keyed by (seed, realization index) ChaCha substreams and
//! reduced in index order; output is byte-identical for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::Error;
use crate::kernel::RadialKernel;
use crate::scale::ScaleRange;
use crate::Result;

/// Spatial/scale discretization parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    /// Side lengths of the spatial box `T = prod [0, extent_i]`, N in {1, 2}.
    pub extent: Vec<f64>,
    /// Grid spacing; must satisfy `spacing <= sigma_min / 4`.
    pub spacing: f64,
    /// Padding margin in units of `sigma_max`; must be >= 5.
    pub pad_sigmas: f64,
    /// Log-spaced scale resolution; must be >= 8 points per octave.
    pub points_per_octave: usize,
}

impl GridSpec {
    /// Default resolution rules for a given scale band: spacing
    /// `sigma_min/4`, padding `5 sigma_max`, 8 points per octave.
    pub fn standard(extent: Vec<f64>, range: &ScaleRange) -> Self {
        GridSpec {
            extent,
            spacing: range.sigma_low() / 4.0,
            pad_sigmas: 5.0,
            points_per_octave: 8,
        }
    }

    fn validate(&self, range: &ScaleRange) -> Result<()> {
        if self.extent.is_empty() || self.extent.len() > 2 {
            return Err(Error::UnsupportedDimension(self.extent.len()));
        }
        if self.extent.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::DegenerateRange("extent must be positive".into()));
        }
        let max_spacing = range.sigma_low() / 4.0;
        if self.spacing > max_spacing * (1.0 + 1e-12) {
            return Err(Error::ResolutionTooCoarse {
                spacing: self.spacing,
                max: max_spacing,
            });
        }
        if self.pad_sigmas < 5.0 {
            return Err(Error::PaddingTooSmall {
                pad: self.pad_sigmas,
                min: 5.0,
            });
        }
        if self.points_per_octave < 8 {
            return Err(Error::ResolutionTooCoarse {
                spacing: self.points_per_octave as f64,
                max: 8.0,
            });
        }
        Ok(())
    }

    /// Log-spaced scale grid with at least `points_per_octave` per octave.
    pub fn sigma_grid(&self, range: &ScaleRange) -> Vec<f64> {
        let octaves = (range.sigma_high() / range.sigma_low()).log2();
        let count = ((self.points_per_octave as f64 * octaves).ceil() as usize).max(1) + 1;
        (0..count)
            .map(|i| {
                range.sigma_low()
                    * (range.sigma_high() / range.sigma_low())
                        .powf(i as f64 / (count - 1) as f64)
            })
            .collect()
    }
}

/// One realization of the scale-space field on the kept window.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub spatial_dim: usize,
    pub spacing: f64,
    pub sigmas: Vec<f64>,
    /// Points per spatial axis of the kept window.
    pub spatial_shape: Vec<usize>,
    /// Row-major over (sigma, spatial axes...).
    pub values: Vec<f64>,
    pub seed: u64,
}

impl FieldGrid {
    /// Full parameter-grid shape: scale axis first.
    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.sigmas.len()];
        s.extend_from_slice(&self.spatial_shape);
        s
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values of one sigma slice.
    pub fn slice(&self, sigma_idx: usize) -> &[f64] {
        let n: usize = self.spatial_shape.iter().product();
        &self.values[sigma_idx * n..(sigma_idx + 1) * n]
    }
}

/// Axis-wise FFT machinery for 1-D/2-D complex arrays.
struct FftNd {
    shape: Vec<usize>,
    fwd: Vec<Arc<dyn Fft<f64>>>,
    inv: Vec<Arc<dyn Fft<f64>>>,
}

impl FftNd {
    fn new(shape: Vec<usize>) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = shape.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inv = shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        FftNd { shape, fwd, inv }
    }

    fn len(&self) -> usize {
        self.shape.iter().product()
    }

    fn transform(&self, data: &mut [Complex<f64>], inverse: bool) {
        let d = self.shape.len();
        let total = self.len();
        let mut strides = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.shape[a + 1];
        }
        for a in 0..d {
            let plan = if inverse { &self.inv[a] } else { &self.fwd[a] };
            let len = self.shape[a];
            let stride = strides[a];
            if stride == 1 {
                for chunk in data.chunks_exact_mut(len) {
                    plan.process(chunk);
                }
            } else {
                let lines = total / len;
                let mut scratch = vec![Complex::default(); len];
                for line in 0..lines {
                    // base index with index_a = 0
                    let block = line / stride;
                    let offset = line % stride;
                    let base = block * stride * len + offset;
                    for (i, s) in scratch.iter_mut().enumerate() {
                        *s = data[base + i * stride];
                    }
                    plan.process(&mut scratch);
                    for (i, s) in scratch.iter().enumerate() {
                        data[base + i * stride] = *s;
                    }
                }
            }
        }
    }
}

/// Shared, read-only convolution plan for one (kernel, grid, band) triple.
struct ConvPlan {
    dim: usize,
    spacing: f64,
    sigmas: Vec<f64>,
    /// Noise-carrying points per axis (kept window + padding both sides).
    data_shape: Vec<usize>,
    keep_shape: Vec<usize>,
    keep_offset: Vec<usize>,
    fft: FftNd,
    /// Forward FFT of `sigma^{-N/2} h(./sigma)` per sigma.
    kernel_spectra: Vec<Vec<Complex<f64>>>,
    cell_sd: f64,
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

impl ConvPlan {
    fn new(kernel: &RadialKernel, grid: &GridSpec, range: &ScaleRange) -> Result<Self> {
        grid.validate(range)?;
        let dim = grid.extent.len();
        if kernel.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: kernel.dim(),
            });
        }
        let sigmas = grid.sigma_grid(range);
        let sigma_max = range.sigma_high();
        // one uniform spacing across axes keeps the kernel isotropic on the
        // lattice; pick the finest spacing that lands a grid point on the far
        // end of some axis, then snap the others
        let mut spacing = f64::INFINITY;
        for &e in &grid.extent {
            let cells = (e / grid.spacing - 1e-9).ceil().max(1.0);
            spacing = spacing.min(e / cells);
        }
        let keep_shape: Vec<usize> = grid
            .extent
            .iter()
            .map(|&e| (e / spacing + 1e-9).floor() as usize + 1)
            .collect();
        let pad_cells = (grid.pad_sigmas * sigma_max / spacing).ceil() as usize;
        let data_shape: Vec<usize> = keep_shape.iter().map(|&k| k + 2 * pad_cells).collect();
        let fft_shape: Vec<usize> = data_shape.iter().map(|&n| next_pow2(n)).collect();
        let fft = FftNd::new(fft_shape.clone());

        // kernel spectra
        let nf = dim as f64;
        let mut kernel_spectra = Vec::with_capacity(sigmas.len());
        for &sigma in &sigmas {
            let radius = (grid.pad_sigmas * sigma / spacing).ceil() as usize;
            let mut arr = vec![Complex::default(); fft.len()];
            fill_kernel(&mut arr, &fft_shape, kernel, sigma, spacing, radius, nf);
            fft.transform(&mut arr, false);
            kernel_spectra.push(arr);
        }
        Ok(ConvPlan {
            dim,
            spacing,
            sigmas,
            data_shape,
            keep_shape,
            keep_offset: vec![pad_cells; dim],
            fft,
            kernel_spectra,
            cell_sd: spacing.powf(nf / 2.0),
        })
    }

    /// One realization on the kept window, deterministic in (seed, stream).
    fn realize(&self, seed: u64, stream: u64) -> FieldGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let fft_len = self.fft.len();
        let mut noise = vec![Complex::default(); fft_len];
        // noise occupies the data region only; the rest stays zero
        let data_len: usize = self.data_shape.iter().product();
        for flat in 0..data_len {
            let idx = self.data_to_fft_index(flat);
            let g: f64 = StandardNormal.sample(&mut rng);
            noise[idx] = Complex::new(g * self.cell_sd, 0.0);
        }
        let mut spectrum = noise;
        self.fft.transform(&mut spectrum, false);

        let keep_len: usize = self.keep_shape.iter().product();
        let mut values = vec![0.0; self.sigmas.len() * keep_len];
        let norm = 1.0 / fft_len as f64;
        let mut work = vec![Complex::default(); fft_len];
        for (si, kspec) in self.kernel_spectra.iter().enumerate() {
            for ((w, s), k) in work.iter_mut().zip(spectrum.iter()).zip(kspec.iter()) {
                *w = s * k;
            }
            self.fft.transform(&mut work, true);
            let out = &mut values[si * keep_len..(si + 1) * keep_len];
            for (flat, o) in out.iter_mut().enumerate() {
                let idx = self.keep_to_fft_index(flat);
                *o = work[idx].re * norm;
            }
        }
        FieldGrid {
            spatial_dim: self.dim,
            spacing: self.spacing,
            sigmas: self.sigmas.clone(),
            spatial_shape: self.keep_shape.clone(),
            values,
            seed,
        }
    }

    fn data_to_fft_index(&self, flat: usize) -> usize {
        let mut rem = flat;
        let mut idx = 0usize;
        for a in (0..self.dim).rev() {
            let coord = rem % self.data_shape[a];
            rem /= self.data_shape[a];
            idx += coord * self.fft_stride(a);
        }
        idx
    }

    fn keep_to_fft_index(&self, flat: usize) -> usize {
        let mut rem = flat;
        let mut idx = 0usize;
        for a in (0..self.dim).rev() {
            let coord = rem % self.keep_shape[a] + self.keep_offset[a];
            rem /= self.keep_shape[a];
            idx += coord * self.fft_stride(a);
        }
        idx
    }

    fn fft_stride(&self, axis: usize) -> usize {
        self.fft.shape[axis + 1..].iter().product()
    }
}

/// Samples `sigma^{-N/2} h(delta/sigma)` on the FFT grid with wrap-around
/// offsets, truncated at `radius` cells.
fn fill_kernel(
    arr: &mut [Complex<f64>],
    fft_shape: &[usize],
    kernel: &RadialKernel,
    sigma: f64,
    spacing: f64,
    radius: usize,
    nf: f64,
) {
    let dim = fft_shape.len();
    let amp = sigma.powf(-nf / 2.0);
    let r = radius as isize;
    match dim {
        1 => {
            let n = fft_shape[0];
            for off in -r..=r {
                let d = off as f64 * spacing / sigma;
                let v = amp * kernel.k(d * d);
                let idx = off.rem_euclid(n as isize) as usize;
                arr[idx] = Complex::new(v, 0.0);
            }
        }
        2 => {
            let (n0, n1) = (fft_shape[0], fft_shape[1]);
            for o0 in -r..=r {
                let d0 = o0 as f64 * spacing / sigma;
                let i0 = o0.rem_euclid(n0 as isize) as usize;
                for o1 in -r..=r {
                    let d1 = o1 as f64 * spacing / sigma;
                    let v = amp * kernel.k(d0 * d0 + d1 * d1);
                    let i1 = o1.rem_euclid(n1 as isize) as usize;
                    arr[i0 * n1 + i1] = Complex::new(v, 0.0);
                }
            }
        }
        _ => unreachable!("validated to N <= 2"),
    }
}

/// Simulates one realization of the scale-space field.
pub fn simulate_scale_field(
    kernel: &RadialKernel,
    grid: &GridSpec,
    range: &ScaleRange,
    seed: u64,
) -> Result<FieldGrid> {
    let plan = ConvPlan::new(kernel, grid, range)?;
    Ok(plan.realize(seed, 0))
}

/// Euler characteristic of the cubical complex whose k-cells are included
/// iff all their vertices have value >= u: `chi = sum_k (-1)^k #k-cells`.
pub fn excursion_euler_characteristic(values: &[f64], shape: &[usize], u: f64) -> i64 {
    let d = shape.len();
    let total: usize = shape.iter().product();
    debug_assert_eq!(values.len(), total);
    let above: Vec<bool> = values.iter().map(|&v| v >= u).collect();
    let mut strides = vec![1usize; d];
    for a in (0..d.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    let mut chi = 0i64;
    for mask in 0..(1usize << d) {
        let k = (mask as u32).count_ones();
        let sign = if k % 2 == 0 { 1i64 } else { -1 };
        // corner offsets of this cell type
        let axes: Vec<usize> = (0..d).filter(|a| mask & (1 << a) != 0).collect();
        let mut corners = vec![0usize];
        for &a in &axes {
            let mut next = Vec::with_capacity(corners.len() * 2);
            for &c in &corners {
                next.push(c);
                next.push(c + strides[a]);
            }
            corners = next;
        }
        // iterate cell anchor positions
        let mut count = 0i64;
        let mut idx = vec![0usize; d];
        'outer: loop {
            let flat: usize = idx.iter().zip(strides.iter()).map(|(i, s)| i * s).sum();
            if corners.iter().all(|&c| above[flat + c]) {
                count += 1;
            }
            // advance multi-index; axis a ranges to shape[a]-1 (or -2 if in mask)
            for a in (0..d).rev() {
                let lim = shape[a] - usize::from(mask & (1 << a) != 0);
                idx[a] += 1;
                if idx[a] < lim {
                    continue 'outer;
                }
                idx[a] = 0;
                if a == 0 {
                    break 'outer;
                }
            }
            if d == 0 {
                break;
            }
        }
        chi += sign * count;
    }
    chi
}

/// Per-threshold empirical excursion statistics over many realizations.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExcursionStats {
    pub thresholds: Vec<f64>,
    /// Mean Euler characteristic of `A_u` per threshold.
    pub mean_chi: Vec<f64>,
    pub se_chi: Vec<f64>,
    /// Empirical `P{sup f >= u}` per threshold.
    pub p_sup: Vec<f64>,
    pub se_sup: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
}

/// Monte-Carlo excursion statistics for the scale-space field on
/// `T x [sigma_l, sigma_u]`. Deterministic under a fixed seed, independent of
/// the rayon thread count.
pub fn monte_carlo_eec(
    kernel: &RadialKernel,
    grid: &GridSpec,
    range: &ScaleRange,
    thresholds: &[f64],
    realizations: usize,
    seed: u64,
) -> Result<ExcursionStats> {
    if realizations < 100 {
        return Err(Error::ConfigInvalid(format!(
            "need at least 100 realizations, got {realizations}"
        )));
    }
    let plan = ConvPlan::new(kernel, grid, range)?;
    let shape: Vec<usize> = {
        let mut s = vec![plan.sigmas.len()];
        s.extend_from_slice(&plan.keep_shape);
        s
    };
    let per_real: Vec<(Vec<i64>, Vec<bool>)> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let field = plan.realize(seed, r as u64 + 1);
            let sup = field.max_value();
            let chis = thresholds
                .iter()
                .map(|&u| excursion_euler_characteristic(&field.values, &shape, u))
                .collect();
            let sups = thresholds.iter().map(|&u| sup >= u).collect();
            (chis, sups)
        })
        .collect();

    let m = thresholds.len();
    let nf = realizations as f64;
    let mut mean_chi = vec![0.0; m];
    let mut se_chi = vec![0.0; m];
    let mut p_sup = vec![0.0; m];
    let mut se_sup = vec![0.0; m];
    for j in 0..m {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut hits = 0.0;
        for (chis, sups) in &per_real {
            let c = chis[j] as f64;
            sum += c;
            sum_sq += c * c;
            if sups[j] {
                hits += 1.0;
            }
        }
        let mean = sum / nf;
        mean_chi[j] = mean;
        se_chi[j] = ((sum_sq / nf - mean * mean).max(0.0) / (nf - 1.0)).sqrt();
        let p = hits / nf;
        p_sup[j] = p;
        se_sup[j] = (p * (1.0 - p) / nf).sqrt();
    }
    Ok(ExcursionStats {
        thresholds: thresholds.to_vec(),
        mean_chi,
        se_chi,
        p_sup,
        se_sup,
        realizations,
        seed,
    })
}

/// Covariance of the scale-space field between `(sigma_a, 0)` and
/// `(sigma_b, gap)` by 1-D quadrature of
/// `(sigma_a sigma_b)^{-1/2} int h((gap - v)/sigma_a) h(-v/sigma_b) dv`.
/// Quadrature oracle for the simulator's covariance tests (N = 1).
pub fn scale_covariance_1d(
    kernel: &RadialKernel,
    sigma_a: f64,
    sigma_b: f64,
    gap: f64,
) -> Result<f64> {
    let support = kernel.support_radius();
    let lo = (-support * sigma_b).min(gap - support * sigma_a);
    let hi = (support * sigma_b).max(gap + support * sigma_a);
    let f = |v: f64| {
        let xa = (gap - v) / sigma_a;
        let xb = -v / sigma_b;
        kernel.k(xa * xa) * kernel.k(xb * xb)
    };
    let integral = crate::quad::adaptive_quad(&f, lo, hi, crate::quad::QuadConfig::default())?;
    Ok(integral / (sigma_a * sigma_b).sqrt())
}
