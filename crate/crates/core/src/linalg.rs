//! Small dense-matrix helpers for the rotation-space module.
//!
//! Matrices are row-major `Vec<f64>` of size `n*n`; everything here runs at
//! n <= 5 so plain O(n^3) loops are the right tool.

/// `C = A * B` for square matrices of side `n`.
pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// `Q * S * Q'` for square matrices of side `n`.
pub fn conjugate(q: &[f64], s: &[f64], n: usize) -> Vec<f64> {
    let qs = matmul(q, s, n);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += qs[i * n + k] * q[j * n + k];
            }
            out[i * n + j] = acc;
        }
    }
    out
}

/// Determinant of the upper-left `j x j` block, by LU with partial pivoting.
pub fn det_leading_block(m: &[f64], n: usize, j: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    assert!(j <= n);
    let mut a = vec![0.0; j * j];
    for r in 0..j {
        a[r * j..r * j + j].copy_from_slice(&m[r * n..r * n + j]);
    }
    let mut det = 1.0;
    for col in 0..j {
        let mut piv = col;
        for r in col + 1..j {
            if a[r * j + col].abs() > a[piv * j + col].abs() {
                piv = r;
            }
        }
        if a[piv * j + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..j {
                a.swap(col * j + c, piv * j + c);
            }
            det = -det;
        }
        let d = a[col * j + col];
        det *= d;
        for r in col + 1..j {
            let factor = a[r * j + col] / d;
            for c in col..j {
                a[r * j + c] -= factor * a[col * j + c];
            }
        }
    }
    det
}

/// Orthonormalizes the columns of `g` in place by modified Gram-Schmidt with
/// one reorthogonalization pass. Diagonal `R` entries come out positive, so a
/// Gaussian input matrix maps to an exactly Haar-distributed orthogonal matrix.
pub fn gram_schmidt_columns(g: &mut [f64], n: usize) {
    for j in 0..n {
        for _ in 0..2 {
            for prev in 0..j {
                let mut dot = 0.0;
                for r in 0..n {
                    dot += g[r * n + prev] * g[r * n + j];
                }
                for r in 0..n {
                    g[r * n + j] -= dot * g[r * n + prev];
                }
            }
        }
        let mut norm = 0.0;
        for r in 0..n {
            norm += g[r * n + j] * g[r * n + j];
        }
        let norm = norm.sqrt();
        for r in 0..n {
            g[r * n + j] /= norm;
        }
    }
}

/// Max-abs entry of `Q'Q - I`; orthogonality defect.
pub fn orthogonality_defect(q: &[f64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut dot = 0.0;
            for r in 0..n {
                dot += q[r * n + i] * q[r * n + j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}
