//! Column-major dense matrices and the scalar kernels the tiled algorithms
//! are built from.
//!
//! Every kernel fixes its loop order so that a given output element always
//! sees the same sequence of floating-point operations: subtractions of
//! `a*b` products are applied one history column at a time, in ascending
//! column order. That convention is what makes the tiled algorithms
//! bit-identical across tile sizes and worker counts.

use crate::error::{Error, Result};

/// Dense column-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds from a column-major value buffer.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "buffer of {} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `y = self * x` for a vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Shape(format!(
                "mat {}x{} times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            let col = self.col(j);
            for (yi, &cij) in y.iter_mut().zip(col) {
                *yi += cij * xj;
            }
        }
        Ok(y)
    }

    /// `self * other`, plain accumulation in ascending inner index.
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "mul shape mismatch");
        let mut c = Mat::zeros(self.rows, other.cols);
        gemm_add_nn(&mut c, self, other);
        c
    }
}

/// `y[i] -= a * x[i]` over a slice pair. One history term per call; the
/// element-wise independence keeps the loop vectorizable without changing
/// any rounding.
#[inline]
pub fn axpy_sub(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= a * xi;
    }
}

#[inline]
fn axpy_add(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// `c -= a * b` with the fixed term-wise order: for each column of `c`,
/// history columns of `a` are subtracted in ascending order.
pub fn gemm_sub_nn(c: &mut Mat, a: &Mat, b: &Mat) {
    assert_eq!(a.cols, b.rows, "gemm inner dimension");
    assert_eq!(c.rows, a.rows, "gemm rows");
    assert_eq!(c.cols, b.cols, "gemm cols");
    for j in 0..c.cols {
        let cj = c.col_mut(j);
        for t in 0..a.cols {
            axpy_sub(cj, b.get(t, j), a.col(t));
        }
    }
}

/// `c -= a * b^T`, the trailing-update kernel of the right-looking Cholesky.
pub fn gemm_sub_nt(c: &mut Mat, a: &Mat, b: &Mat) {
    assert_eq!(a.cols, b.cols, "gemm inner dimension");
    assert_eq!(c.rows, a.rows, "gemm rows");
    assert_eq!(c.cols, b.rows, "gemm cols");
    for j in 0..c.cols {
        let cj = c.col_mut(j);
        for t in 0..a.cols {
            axpy_sub(cj, b.get(j, t), a.col(t));
        }
    }
}

/// `c += a * b`.
pub fn gemm_add_nn(c: &mut Mat, a: &Mat, b: &Mat) {
    assert_eq!(a.cols, b.rows, "gemm inner dimension");
    assert_eq!(c.rows, a.rows, "gemm rows");
    assert_eq!(c.cols, b.cols, "gemm cols");
    for j in 0..c.cols {
        let cj = c.col_mut(j);
        for t in 0..a.cols {
            axpy_add(cj, b.get(t, j), a.col(t));
        }
    }
}

/// `c += a * b^T`.
pub fn gemm_add_nt(c: &mut Mat, a: &Mat, b: &Mat) {
    assert_eq!(a.cols, b.cols, "gemm inner dimension");
    assert_eq!(c.rows, a.rows, "gemm rows");
    assert_eq!(c.cols, b.rows, "gemm cols");
    for j in 0..c.cols {
        let cj = c.col_mut(j);
        for t in 0..a.cols {
            axpy_add(cj, b.get(j, t), a.col(t));
        }
    }
}

/// In-place unblocked lower Cholesky of a square tile. Only the lower
/// triangle is read; on success the strict upper triangle is zeroed.
///
/// On a nonpositive pivot returns the local row index and the pivot value
/// so callers can translate to a global row.
pub fn cholesky_in_place(a: &mut Mat) -> std::result::Result<(), (usize, f64)> {
    assert_eq!(a.rows, a.cols, "cholesky needs a square tile");
    let n = a.rows;
    for c in 0..n {
        // Trailing columns of the tile see history terms in ascending order,
        // matching the cross-tile update convention.
        for t in 0..c {
            let ltc = a.get(c, t);
            let (head, tail) = a.data.split_at_mut((t + 1) * n);
            let lcol = &head[t * n + c..t * n + n];
            let ccol = &mut tail[(c - t - 1) * n + c..(c - t - 1) * n + n];
            axpy_sub(ccol, ltc, lcol);
        }
        let pivot = a.get(c, c);
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err((c, pivot));
        }
        let d = pivot.sqrt();
        a.set(c, c, d);
        let inv = 1.0 / d;
        for i in c + 1..n {
            let v = a.get(i, c) * inv;
            a.set(i, c, v);
        }
    }
    for j in 1..n {
        for i in 0..j {
            a.set(i, j, 0.0);
        }
    }
    Ok(())
}

/// Solves `x * l^T = a` in place (`a` becomes `x`), `l` lower triangular.
/// This is the panel solve of the tiled Cholesky.
pub fn solve_right_lower_transpose(a: &mut Mat, l: &Mat) {
    assert_eq!(l.rows, l.cols, "triangular tile must be square");
    assert_eq!(a.cols, l.rows, "panel width must match tile order");
    for c in 0..a.cols {
        for t in 0..c {
            let ltc = l.get(c, t);
            let (head, tail) = a.data.split_at_mut(c * a.rows);
            let xcol = &head[t * a.rows..(t + 1) * a.rows];
            axpy_sub(&mut tail[..a.rows], ltc, xcol);
        }
        let inv = 1.0 / l.get(c, c);
        for v in a.col_mut(c) {
            *v *= inv;
        }
    }
}

/// Solves `l * x = b` in place (`b` becomes `x`), `l` lower triangular.
pub fn solve_lower(l: &Mat, b: &mut Mat) {
    assert_eq!(l.rows, l.cols, "triangular tile must be square");
    assert_eq!(b.rows, l.rows, "rhs rows must match tile order");
    let n = l.rows;
    for j in 0..b.cols {
        let col = b.col_mut(j);
        for i in 0..n {
            let mut v = col[i];
            for t in 0..i {
                v -= l.get(i, t) * col[t];
            }
            col[i] = v / l.get(i, i);
        }
    }
}

/// Solves `l^T * x = b` in place, `l` lower triangular.
pub fn solve_lower_transpose(l: &Mat, b: &mut Mat) {
    assert_eq!(l.rows, l.cols, "triangular tile must be square");
    assert_eq!(b.rows, l.rows, "rhs rows must match tile order");
    let n = l.rows;
    for j in 0..b.cols {
        let col = b.col_mut(j);
        for i in (0..n).rev() {
            let mut v = col[i];
            for t in i + 1..n {
                v -= l.get(t, i) * col[t];
            }
            col[i] = v / l.get(i, i);
        }
    }
}

/// Inverse of an SPD matrix through its Cholesky factor, returned exactly
/// symmetric: `inv = w^T w` with `w = l^{-1}`, assigning `(i,j)` and `(j,i)`
/// from one dot product.
pub fn spd_inverse(a: &Mat) -> Result<Mat> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut l = a.clone();
    cholesky_in_place(&mut l).map_err(|(row, pivot)| Error::NotPositiveDefinite { row, pivot })?;
    // w = l^{-1}, computed column by column.
    let mut w = Mat::identity(n);
    solve_lower(&l, &mut w);
    let mut inv = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            // w is lower triangular: row entries of column i start at index i.
            for t in i..n {
                s += w.get(t, i) * w.get(t, j);
            }
            inv.set(i, j, s);
            inv.set(j, i, s);
        }
    }
    Ok(inv)
}

/// FNV-1a over the little-endian bytes of the matrix values, used as a
/// provenance fingerprint.
pub fn fingerprint(parts: &[&Mat]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for m in parts {
        for v in &m.data {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_identity() {
        let mut a = Mat::identity(5);
        cholesky_in_place(&mut a).unwrap();
        assert_eq!(a, Mat::identity(5));
    }

    #[test]
    fn cholesky_2x2_hand_factor() {
        let mut a = Mat::from_fn(2, 2, |i, j| [[4.0, 2.0], [2.0, 3.0]][i][j]);
        cholesky_in_place(&mut a).unwrap();
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(1, 0), 1.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert!((a.get(1, 1) - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cholesky_reports_local_pivot() {
        // Indefinite: eigenvalues 3 and -1.
        let mut a = Mat::from_fn(2, 2, |i, j| [[1.0, 2.0], [2.0, 1.0]][i][j]);
        let err = cholesky_in_place(&mut a).unwrap_err();
        assert_eq!(err.0, 1);
        assert!(err.1 < 0.0);
    }

    #[test]
    fn solve_right_lt_reconstructs() {
        let l = Mat::from_fn(3, 3, |i, j| if j <= i { (i + j + 1) as f64 } else { 0.0 });
        let x = Mat::from_fn(2, 3, |i, j| (i as f64) - 0.5 * (j as f64) + 0.25);
        // a = x * l^T
        let mut a = Mat::zeros(2, 3);
        gemm_add_nt(&mut a, &x, &l);
        solve_right_lower_transpose(&mut a, &l);
        assert!(a.max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn solve_lower_and_transpose_roundtrip() {
        let l = Mat::from_fn(4, 4, |i, j| {
            if j < i {
                0.3 * ((i * 7 + j * 3) % 5) as f64 - 0.4
            } else if j == i {
                2.0 + i as f64
            } else {
                0.0
            }
        });
        let b0 = Mat::from_fn(4, 2, |i, j| (i + 2 * j) as f64 - 1.5);
        let mut b = b0.clone();
        solve_lower(&l, &mut b);
        let mut back = Mat::zeros(4, 2);
        gemm_add_nn(&mut back, &l, &b);
        assert!(back.max_abs_diff(&b0) < 1e-13);

        let mut c = b0.clone();
        solve_lower_transpose(&l, &mut c);
        let mut back2 = Mat::zeros(4, 2);
        gemm_add_nn(&mut back2, &l.transpose(), &c);
        assert!(back2.max_abs_diff(&b0) < 1e-13);
    }

    #[test]
    fn spd_inverse_matches_identity_product() {
        let n = 6;
        let mut a = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                let v = 0.4f64.powi((i as i32 - j as i32).abs());
                a.set(i, j, v);
            }
        }
        let inv = spd_inverse(&a).unwrap();
        let prod = a.mul(&inv);
        assert!(prod.max_abs_diff(&Mat::identity(n)) < 1e-12);
        // Exact symmetry by construction.
        for i in 0..n {
            for j in 0..n {
                assert_eq!(inv.get(i, j).to_bits(), inv.get(j, i).to_bits());
            }
        }
    }

    #[test]
    fn gemm_sub_nn_matches_naive_triple_loop_bitwise() {
        let a = Mat::from_fn(32, 32, |i, j| ((i * 37 + j * 11) % 17) as f64 * 0.173 - 1.1);
        let b = Mat::from_fn(32, 32, |i, j| ((i * 13 + j * 29) % 23) as f64 * 0.091 - 0.7);
        let c0 = Mat::from_fn(32, 32, |i, j| ((i + j) % 9) as f64 * 0.311 - 0.2);

        let mut c = c0.clone();
        gemm_sub_nn(&mut c, &a, &b);

        let mut naive = c0;
        for i in 0..32 {
            for j in 0..32 {
                let mut v = naive.get(i, j);
                for t in 0..32 {
                    v -= a.get(i, t) * b.get(t, j);
                }
                naive.set(i, j, v);
            }
        }
        for i in 0..32 {
            for j in 0..32 {
                assert_eq!(c.get(i, j).to_bits(), naive.get(i, j).to_bits());
            }
        }
    }

    #[test]
    fn fingerprint_sensitive_to_any_value() {
        let a = Mat::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        let mut b = a.clone();
        b.set(2, 1, b.get(2, 1) + 1e-300);
        assert_ne!(fingerprint(&[&a]), fingerprint(&[&b]));
        assert_eq!(fingerprint(&[&a]), fingerprint(&[&a.clone()]));
    }
}
