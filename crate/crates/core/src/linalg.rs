//! Dense row reduction over a [`Scalar`] field.
//!
//! Exact mode pivots on the first nonzero entry; float mode uses partial
//! pivoting and treats entries below `FLOAT_ZERO_TOL * max|a_ij|` as zero.

use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub(crate) struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    fn scale(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduces in place to reduced row echelon form over the first
    /// `active_cols` columns; returns the pivot columns.
    fn rref(&mut self, active_cols: usize) -> Vec<usize> {
        let scale = self.scale();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..active_cols {
            if row == self.rows {
                break;
            }
            let pick = if S::EXACT {
                (row..self.rows).find(|&r| !self.get(r, col).is_zero())
            } else {
                (row..self.rows)
                    .max_by(|&a, &b| {
                        let (x, y) = (self.get(a, col).to_f64().abs(), self.get(b, col).to_f64().abs());
                        x.total_cmp(&y)
                    })
                    .filter(|&r| !self.get(r, col).is_negligible(scale))
            };
            let Some(p) = pick else { continue };
            self.swap_rows(row, p);
            let inv = S::one() / self.get(row, col).clone();
            for c in 0..self.cols {
                let v = self.get(row, c).clone() * inv.clone();
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let v = self.get(r, c).clone() - factor.clone() * self.get(row, c).clone();
                    self.set(r, c, v);
                }
                if !S::EXACT {
                    self.set(r, col, S::zero());
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(S::zero(), |acc, c| acc + self.get(r, c).clone() * x[c].clone())
            })
            .collect()
    }
}

/// Basis of `{x : A x = 0}`.
pub(crate) fn null_space<S: Scalar>(a: &Matrix<S>) -> Vec<Vec<S>> {
    let mut m = a.clone();
    let pivots = m.rref(m.cols);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); m.cols];
            v[f] = S::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, f).clone();
            }
            v
        })
        .collect()
}

pub(crate) fn rank<S: Scalar>(a: &Matrix<S>) -> usize {
    let mut m = a.clone();
    m.rref(m.cols).len()
}

/// Some solution of `A x = b` (free variables set to zero), if consistent.
pub(crate) fn solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    assert_eq!(a.rows, b.len());
    let mut aug = Matrix::zeros(a.rows, a.cols + 1);
    for r in 0..a.rows {
        for c in 0..a.cols {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, a.cols, b[r].clone());
    }
    let pivots = aug.rref(a.cols);
    let scale = a.scale().max(b.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max));
    for r in pivots.len()..a.rows {
        if !aug.get(r, a.cols).is_negligible(scale) {
            return None;
        }
    }
    let mut x = vec![S::zero(); a.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(r, a.cols).clone();
    }
    if !S::EXACT {
        let residual = a
            .mul_vec(&x)
            .iter()
            .zip(b)
            .map(|(l, r)| (l.clone() - r.clone()).to_f64().powi(2))
            .sum::<f64>()
            .sqrt();
        if residual > 1e-10 * scale.max(1.0) {
            return None;
        }
    }
    Some(x)
}

/// The solution of `A x = b` orthogonal to the null space of `A`, i.e. the
/// minimum-norm representative of the affine solution set.
pub(crate) fn min_norm_solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    let x0 = solve(a, b)?;
    let kernel = null_space(a);
    if kernel.is_empty() {
        return Some(x0);
    }
    let dot = |u: &[S], v: &[S]| {
        u.iter()
            .zip(v)
            .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    };
    let k = kernel.len();
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, dot(&kernel[i], &kernel[j]));
        }
    }
    let rhs: Vec<S> = kernel.iter().map(|v| dot(v, &x0)).collect();
    let c = solve(&gram, &rhs)?;
    let mut x = x0;
    for (coef, v) in c.iter().zip(&kernel) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi = xi.clone() - coef.clone() * vi.clone();
        }
    }
    Some(x)
}
