//! Rank and nullspace computations in both scalar modes.
//!
//! Exact mode uses fraction-free Gaussian elimination over the rationals, so
//! rank is a true integer. Floating mode uses SVD with singular values below
//! `tol_rel * sigma_max` counted as zero.

use crate::scalar::{Scalar, ScalarMode};
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;

/// Row-major matrix of scalars, all in one mode.
#[derive(Clone, Debug)]
pub struct ScalarMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Scalar>,
    pub mode: ScalarMode,
}

impl ScalarMatrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>, mode: ScalarMode) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nr * nc);
        for r in rows {
            assert_eq!(r.len(), nc, "ragged matrix");
            for s in r {
                assert_eq!(s.mode(), mode, "scalar mode mismatch in matrix");
                data.push(s);
            }
        }
        ScalarMatrix { rows: nr, cols: nc, data, mode }
    }

    pub fn zeros(rows: usize, cols: usize, mode: ScalarMode) -> Self {
        ScalarMatrix { rows, cols, data: vec![Scalar::zero(mode); rows * cols], mode }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.mode(), self.mode);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Stack another matrix below this one (same column count).
    pub fn vstack(&self, other: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.mode, other.mode);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        ScalarMatrix { rows: self.rows + other.rows, cols: self.cols, data, mode: self.mode }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64())
    }

    pub fn rank(&self, tol_rel: f64) -> usize {
        match self.mode {
            ScalarMode::Exact => {
                let m = self.to_rational();
                rational_rank(&m)
            }
            ScalarMode::Float => float_rank(&self.to_f64(), tol_rel),
        }
    }

    /// Basis of the right nullspace, as rows of length `cols`.
    pub fn nullspace(&self, tol_rel: f64) -> Vec<Vec<Scalar>> {
        if self.rows == 0 {
            return (0..self.cols)
                .map(|i| {
                    (0..self.cols)
                        .map(|j| if i == j { Scalar::one(self.mode) } else { Scalar::zero(self.mode) })
                        .collect()
                })
                .collect();
        }
        match self.mode {
            ScalarMode::Exact => rational_nullspace(&self.to_rational())
                .into_iter()
                .map(|v| v.into_iter().map(Scalar::Exact).collect())
                .collect(),
            ScalarMode::Float => float_nullspace(&self.to_f64(), tol_rel)
                .into_iter()
                .map(|v| v.into_iter().map(Scalar::Float).collect())
                .collect(),
        }
    }

    fn to_rational(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).as_exact().clone()).collect())
            .collect()
    }
}

/// Reduced row echelon form in place; returns pivot column indices.
pub fn rational_rref(m: &mut Vec<Vec<BigRational>>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for j in c..cols {
            let v = &m[r][j] * &inv;
            m[r][j] = v;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let v = &m[i][j] - &f * &m[r][j];
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rational_rank(m: &[Vec<BigRational>]) -> usize {
    let mut work = m.to_vec();
    rational_rref(&mut work).len()
}

/// Nullspace basis of a rational matrix (right kernel), one vector per free column.
pub fn rational_nullspace(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut work = m.to_vec();
    let pivots = rational_rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free {
        let mut v = vec![BigRational::zero(); cols];
        v[fc] = BigRational::from_integer(1.into());
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -work[r][fc].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn float_rank(m: &DMatrix<f64>, tol_rel: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if max_sv == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > tol_rel * max_sv).count()
}

pub fn float_nullspace(m: &DMatrix<f64>, tol_rel: f64) -> Vec<Vec<f64>> {
    let cols = m.ncols();
    // Pad wide or empty matrices with zero rows so the thin SVD yields a full
    // set of right-singular vectors.
    let work = if m.nrows() < cols {
        let mut w = DMatrix::zeros(cols, cols);
        w.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        w
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("svd with v_t");
    let max_sv = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let mut basis = Vec::new();
    for i in 0..v_t.nrows() {
        let s = svd.singular_values.get(i).copied().unwrap_or(0.0);
        if max_sv == 0.0 || s <= tol_rel * max_sv {
            basis.push(v_t.row(i).iter().cloned().collect());
        }
    }
    basis
}
