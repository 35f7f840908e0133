//! Euclidean Lipschitz-Killing curvatures and boundary measures of the
//! spatial search region `T`, plus a Monte-Carlo tube-volume oracle that
//! validates them through the Steiner formula.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::special::unit_ball_volume;
use crate::Result;

/// Shape data needed to sample distances for the tube oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Rectangle { sides: Vec<f64> },
    Ball { radius: f64 },
    Custom,
}

/// Euclidean LKCs and strata measures of a compact search region in `R^N`.
///
/// Rectangles have non-smooth boundaries; they are admitted because every
/// consumer downstream reads only the Euclidean LKC vector, volume, boundary
/// measure and curvature integrals, all of which are well defined for boxes
/// (flat faces contribute zero curvature, corners enter through the lower
/// LKCs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainGeometry {
    pub dimension: usize,
    /// `L^E_0 .. L^E_N` of `T`.
    pub euclid_lkcs: Vec<f64>,
    /// `H^E_N(T)`.
    pub volume: f64,
    /// `H^E_{N-1}(boundary T)`.
    pub boundary_measure: f64,
    /// `int_{dT} detr_m(C_t) dH_{N-1}` for `m = 0 .. N-1` (outward Weingarten
    /// curvature matrix `C_t`); zero for `m >= 1` on flat-faced boxes.
    pub boundary_curvature_integrals: Vec<f64>,
    pub shape: Shape,
}

impl DomainGeometry {
    /// `L^E_j`, zero outside `0..=N`.
    pub fn lkc(&self, j: usize) -> f64 {
        self.euclid_lkcs.get(j).copied().unwrap_or(0.0)
    }

    fn check(self) -> Result<Self> {
        if (self.lkc(0) - 1.0).abs() > 1e-12 {
            return Err(Error::InvariantViolation(
                "L^E_0 must equal 1 for the supported convex shapes".into(),
            ));
        }
        if (self.lkc(self.dimension) - self.volume).abs() > 1e-9 * self.volume.max(1.0) {
            return Err(Error::InvariantViolation("L^E_N must equal the volume".into()));
        }
        if (self.lkc(self.dimension - 1) - 0.5 * self.boundary_measure).abs()
            > 1e-9 * self.boundary_measure.max(1.0)
        {
            return Err(Error::InvariantViolation(
                "L^E_{N-1} must be half the boundary measure".into(),
            ));
        }
        if let Some(first) = self.boundary_curvature_integrals.first() {
            if (first - self.boundary_measure).abs() > 1e-9 * self.boundary_measure.max(1.0) {
                return Err(Error::InvariantViolation(
                    "curvature integral m=0 must equal the boundary measure".into(),
                ));
            }
        }
        Ok(self)
    }
}

/// Geometry of the box `prod_i [0, sides_i]`.
///
/// `L^E_j` is the j-th elementary symmetric polynomial of the side lengths.
pub fn rectangle_geometry(sides: &[f64]) -> Result<DomainGeometry> {
    if sides.is_empty() {
        return Err(Error::EmptySideList);
    }
    if sides.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::DegenerateRange("rectangle sides must be positive".into()));
    }
    let n = sides.len();
    let lkcs = elementary_symmetric(sides);
    let volume = lkcs[n];
    let boundary = 2.0 * sides.iter().map(|s| volume / s).sum::<f64>();
    let mut curv = vec![0.0; n];
    curv[0] = boundary;
    DomainGeometry {
        dimension: n,
        euclid_lkcs: lkcs,
        volume,
        boundary_measure: boundary,
        boundary_curvature_integrals: curv,
        shape: Shape::Rectangle {
            sides: sides.to_vec(),
        },
    }
    .check()
}

/// Geometry of the centered N-ball of the given radius, N in {1, 2, 3}.
pub fn ball_geometry(n: usize, radius: f64) -> Result<DomainGeometry> {
    if !(radius > 0.0) {
        return Err(Error::DegenerateRange("ball radius must be positive".into()));
    }
    let r = radius;
    let (lkcs, volume, boundary, curv) = match n {
        // [-r, r]: two boundary points
        1 => (vec![1.0, 2.0 * r], 2.0 * r, 2.0, vec![2.0]),
        2 => {
            let pi = std::f64::consts::PI;
            (
                vec![1.0, pi * r, pi * r * r],
                pi * r * r,
                2.0 * pi * r,
                // constant curvature 1/r on a circle of length 2 pi r
                vec![2.0 * pi * r, 2.0 * pi],
            )
        }
        3 => {
            let pi = std::f64::consts::PI;
            (
                vec![1.0, 4.0 * r, 2.0 * pi * r * r, 4.0 / 3.0 * pi * r * r * r],
                4.0 / 3.0 * pi * r * r * r,
                4.0 * pi * r * r,
                // detr_m((1/r) I_2) integrated over the sphere of area 4 pi r^2
                vec![4.0 * pi * r * r, 8.0 * pi * r, 4.0 * pi],
            )
        }
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    DomainGeometry {
        dimension: n,
        euclid_lkcs: lkcs,
        volume,
        boundary_measure: boundary,
        boundary_curvature_integrals: curv,
        shape: Shape::Ball { radius },
    }
    .check()
}

/// All elementary symmetric polynomials `e_0 .. e_n` of the inputs.
fn elementary_symmetric(xs: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; xs.len() + 1];
    e[0] = 1.0;
    for (i, &x) in xs.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// Steiner polynomial `sum_j omega_{N-j} rho^{N-j} L^E_j(T)`: the exact
/// Lebesgue volume of the rho-tube around a convex `T`.
pub fn steiner_volume(geom: &DomainGeometry, rho: f64) -> f64 {
    let n = geom.dimension;
    (0..=n)
        .map(|j| unit_ball_volume(n - j) * rho.powi((n - j) as i32) * geom.lkc(j))
        .sum()
}

/// Monte-Carlo estimate of the Lebesgue volume of the rho-tube around `T`,
/// with its standard error. Pure given the seed.
pub fn tube_volume_estimate(
    geom: &DomainGeometry,
    rho: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if rho < 0.0 {
        return Err(Error::DegenerateRange("tube radius must be nonnegative".into()));
    }
    let n = geom.dimension;
    let (lo, hi, dist): (Vec<f64>, Vec<f64>, Box<dyn Fn(&[f64]) -> f64>) = match &geom.shape {
        Shape::Rectangle { sides } => {
            let sides = sides.clone();
            (
                sides.iter().map(|_| -rho).collect(),
                sides.iter().map(|s| s + rho).collect(),
                Box::new(move |x: &[f64]| {
                    let mut d2 = 0.0;
                    for (xi, s) in x.iter().zip(sides.iter()) {
                        let gap = (-xi).max(xi - s).max(0.0);
                        d2 += gap * gap;
                    }
                    d2.sqrt()
                }),
            )
        }
        Shape::Ball { radius } => {
            let r = *radius;
            (
                vec![-(r + rho); n],
                vec![r + rho; n],
                Box::new(move |x: &[f64]| {
                    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    (norm - r).max(0.0)
                }),
            )
        }
        Shape::Custom => return Err(Error::UnsupportedShape),
    };
    let box_vol: f64 = lo.iter().zip(hi.iter()).map(|(a, b)| b - a).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut point = vec![0.0; n];
    for _ in 0..samples {
        for (p, (a, b)) in point.iter_mut().zip(lo.iter().zip(hi.iter())) {
            *p = rng.gen_range(*a..*b);
        }
        if dist(&point) <= rho {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let est = box_vol * p;
    let se = box_vol * (p * (1.0 - p) / samples as f64).sqrt();
    Ok((est, se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn rectangle_lkcs_are_symmetric_polynomials() {
        let g = rectangle_geometry(&[2.0, 3.0]).unwrap();
        assert_eq!(g.euclid_lkcs, vec![1.0, 5.0, 6.0]);
        let g1 = rectangle_geometry(&[4.0]).unwrap();
        assert_eq!(g1.euclid_lkcs, vec![1.0, 4.0]);
        let cube = rectangle_geometry(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(cube.euclid_lkcs, vec![1.0, 3.0, 3.0, 1.0]);
        assert_eq!(cube.boundary_measure, 6.0);
        assert!(matches!(rectangle_geometry(&[]), Err(Error::EmptySideList)));
    }

    #[test]
    fn ball_geometry_tables() {
        let b1 = ball_geometry(1, 1.0).unwrap();
        assert_eq!(b1.euclid_lkcs, vec![1.0, 2.0]);
        let b2 = ball_geometry(2, 1.0).unwrap();
        assert!((b2.lkc(1) - PI).abs() < 1e-14);
        assert!((b2.lkc(2) - PI).abs() < 1e-14);
        assert_eq!(b2.boundary_curvature_integrals.len(), 2);
        assert!((b2.boundary_curvature_integrals[0] - 2.0 * PI).abs() < 1e-14);
        assert!((b2.boundary_curvature_integrals[1] - 2.0 * PI).abs() < 1e-14);
        assert!(matches!(ball_geometry(4, 1.0), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn smooth_boundary_identity_links_lkcs_and_curvature_integrals() {
        // L^E_j = int detr_{N-1-j}(C) / ((N-j) omega_{N-j}) for smooth convex T
        for n in [2usize, 3] {
            let g = ball_geometry(n, 1.3).unwrap();
            for j in 0..n {
                let m = n - 1 - j;
                let pred = g.boundary_curvature_integrals[m]
                    / ((n - j) as f64 * unit_ball_volume(n - j));
                assert!(
                    (pred - g.lkc(j)).abs() < 1e-12 * g.lkc(j).max(1.0),
                    "N={n} j={j}"
                );
            }
        }
    }

    #[test]
    fn steiner_matches_exact_ball_tube() {
        // tube of a disk is a disk
        let g = ball_geometry(2, 1.0).unwrap();
        let got = steiner_volume(&g, 0.5);
        assert!((got - PI * 1.5 * 1.5).abs() < 1e-12);
    }

    #[test]
    fn tube_estimate_unit_square() {
        let g = rectangle_geometry(&[1.0, 1.0]).unwrap();
        let rho = 0.1;
        let want = steiner_volume(&g, rho); // 1 + 4*0.1/2*2 + pi*0.01 = 1.43141...
        assert!((want - (1.0 + 0.4 + PI * 0.01)).abs() < 1e-12);
        let (est, se) = tube_volume_estimate(&g, rho, 1_000_000, 11).unwrap();
        assert!(
            (est - want).abs() <= 3.0 * se,
            "est {est} want {want} se {se}"
        );
    }

    #[test]
    fn tube_estimate_unit_disk() {
        let g = ball_geometry(2, 1.0).unwrap();
        let (est, se) = tube_volume_estimate(&g, 0.5, 1_000_000, 12).unwrap();
        let want = PI * 2.25;
        assert!((est - want).abs() <= 3.0 * se);
    }

    #[test]
    fn zero_tube_returns_volume() {
        let g = rectangle_geometry(&[2.0, 0.5]).unwrap();
        let (est, se) = tube_volume_estimate(&g, 0.0, 10_000, 3).unwrap();
        assert_eq!(se, 0.0); // box equals the tube exactly
        assert!((est - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tube_estimate_deterministic_under_seed() {
        let g = ball_geometry(2, 1.0).unwrap();
        let a = tube_volume_estimate(&g, 0.2, 50_000, 99).unwrap();
        let b = tube_volume_estimate(&g, 0.2, 50_000, 99).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn rectangle_scaling_scales_lkcs_by_c_pow_j(
            c in 0.1f64..10.0,
            s1 in 0.1f64..5.0,
            s2 in 0.1f64..5.0,
            s3 in 0.1f64..5.0,
        ) {
            let base = rectangle_geometry(&[s1, s2, s3]).unwrap();
            let scaled = rectangle_geometry(&[c * s1, c * s2, c * s3]).unwrap();
            for j in 0..=3usize {
                let want = base.lkc(j) * c.powi(j as i32);
                prop_assert!((scaled.lkc(j) - want).abs() <= 1e-10 * want.abs().max(1.0));
            }
        }
    }
}
