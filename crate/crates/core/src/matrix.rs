//! Dense matrices over an exact scalar, with fraction-free determinants.

use crate::error::ArithError;
use crate::padic::PadicNumber;
use crate::ring::{ExactDiv, Ring};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, ArithError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(ArithError::InvalidInput(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Submatrix selecting the given rows and columns (0-based, in order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<T>
    where
        T: Clone,
    {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.at(rows[i], cols[j]).clone()
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T: Ring> Matrix<T> {
    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc: Option<T> = None;
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_exactly_zero() {
                    continue;
                }
                let b = rhs.at(k, j);
                if b.is_exactly_zero() {
                    continue;
                }
                let term = a.ring_mul(b);
                acc = Some(match acc {
                    None => term,
                    Some(s) => s.ring_add(&term),
                });
            }
            acc.unwrap_or_else(|| self.at(i, 0).zero_like())
        })
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).ring_add(rhs.at(i, j))
        })
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).ring_sub(rhs.at(i, j))
        })
    }

    pub fn scalar_mul(&self, s: &T) -> Matrix<T> {
        self.map(|x| s.ring_mul(x))
    }

    /// Block-diagonal assembly; off-diagonal entries are exact zeros.
    pub fn block_diag(blocks: &[Matrix<T>]) -> Matrix<T> {
        assert!(!blocks.is_empty(), "block_diag needs at least one block");
        let zero = blocks[0].data[0].zero_like();
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::from_fn(rows, cols, |_, _| zero.clone());
        let mut ro = 0;
        let mut co = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    *m.at_mut(ro + i, co + j) = b.at(i, j).clone();
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
    }
}

/// Determinant by cofactor expansion along the first row, skipping exact
/// zeros. Exponential, but honest for matrices with indeterminate entries;
/// serves as the independent oracle and as the fallback of `det_bareiss`.
pub fn det_expansion<T: Ring>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    assert!(m.rows() >= 1);
    fn go<T: Ring>(m: &Matrix<T>, rows: &[usize], cols: &[usize]) -> Option<T> {
        if rows.len() == 1 {
            let e = m.at(rows[0], cols[0]);
            return if e.is_exactly_zero() {
                None
            } else {
                Some(e.clone())
            };
        }
        let r = rows[0];
        let rest: Vec<usize> = rows[1..].to_vec();
        let mut acc: Option<T> = None;
        for (k, &c) in cols.iter().enumerate() {
            let e = m.at(r, c);
            if e.is_exactly_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &c)| c)
                .collect();
            let Some(minor) = go(m, &rest, &sub_cols) else {
                continue;
            };
            let mut term = e.ring_mul(&minor);
            if k % 2 == 1 {
                term = term.ring_neg();
            }
            acc = Some(match acc {
                None => term,
                Some(s) => s.ring_add(&term),
            });
        }
        acc
    }
    let idx: Vec<usize> = (0..m.rows()).collect();
    go(m, &idx, &idx).unwrap_or_else(|| m.at(0, 0).zero_like())
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
///
/// Pivots are chosen provably nonzero. If a pivot column is exactly zero the
/// determinant is exactly zero; if it is merely indeterminate at the working
/// precision, the computation falls back to cofactor expansion, which
/// propagates the indeterminacy honestly.
pub fn det_bareiss<T: ExactDiv>(m: &Matrix<T>) -> Result<T, ArithError> {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    assert!(n >= 1);
    if n == 1 {
        return Ok(m.at(0, 0).clone());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev: Option<T> = None;
    for k in 0..n - 1 {
        let pivot_row = (k..n).find(|&r| a.at(r, k).is_provably_nonzero());
        let pivot_row = match pivot_row {
            Some(r) => r,
            None => {
                if (k..n).all(|r| a.at(r, k).is_exactly_zero()) {
                    return Ok(m.at(0, 0).zero_like());
                }
                return Ok(det_expansion(m));
            }
        };
        if pivot_row != k {
            a.swap_rows(pivot_row, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a
                    .at(k, k)
                    .ring_mul(a.at(i, j))
                    .ring_sub(&a.at(i, k).ring_mul(a.at(k, j)));
                let entry = match &prev {
                    None => num,
                    Some(p) => num.exact_div(p)?,
                };
                *a.at_mut(i, j) = entry;
            }
        }
        prev = Some(a.at(k, k).clone());
    }
    let det = a.at(n - 1, n - 1).clone();
    Ok(if negate { det.ring_neg() } else { det })
}

/// Inverse of a matrix over Q_p by Gauss-Jordan elimination, pivoting on the
/// entry of smallest exact valuation in each column.
pub fn invert_padic_matrix(m: &Matrix<PadicNumber>) -> Result<Matrix<PadicNumber>, ArithError> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let prime = m.at(0, 0).prime();
    let prec = m
        .entries()
        .filter_map(|e| e.precision())
        .min()
        .ok_or(ArithError::SingularMatrix)?;
    if prec < 1 {
        return Err(ArithError::PrecisionTooSmall(prec));
    }
    let mut a = m.clone();
    let mut inv = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            PadicNumber::one(prime, prec as u32)
        } else {
            PadicNumber::exact_zero(prime)
        }
    });
    for k in 0..n {
        let pivot_row = (k..n)
            .filter(|&r| a.at(r, k).is_provably_nonzero())
            .min_by_key(|&r| a.at(r, k).int_valuation().expect("provably nonzero"))
            .ok_or(ArithError::SingularMatrix)?;
        a.swap_rows(pivot_row, k);
        inv.swap_rows(pivot_row, k);
        let pivot_inv = a.at(k, k).invert()?;
        for j in 0..n {
            *a.at_mut(k, j) = a.at(k, j).mul_ref(&pivot_inv);
            *inv.at_mut(k, j) = inv.at(k, j).mul_ref(&pivot_inv);
        }
        for i in 0..n {
            if i == k || a.at(i, k).is_zero_like() {
                continue;
            }
            let factor = a.at(i, k).clone();
            for j in 0..n {
                let t = factor.mul_ref(a.at(k, j));
                *a.at_mut(i, j) = a.at(i, j).sub_ref(&t);
                let t = factor.mul_ref(inv.at(k, j));
                *inv.at_mut(i, j) = inv.at(i, j).sub_ref(&t);
            }
        }
    }
    Ok(inv)
}

/// k-th power of a square p-adic matrix; the identity is built at the given
/// precision when k = 0.
pub fn padic_matrix_pow(m: &Matrix<PadicNumber>, k: u32, precision: u32) -> Matrix<PadicNumber> {
    assert_eq!(m.rows(), m.cols());
    let prime = m.at(0, 0).prime();
    let identity = Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        if i == j {
            PadicNumber::one(prime, precision)
        } else {
            PadicNumber::exact_zero(prime)
        }
    });
    let mut acc = identity;
    let mut base = m.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(p: u64, rows: &[&[i64]], prec: u32) -> Matrix<PadicNumber> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| PadicNumber::from_i64(p, x, prec).unwrap())
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn determinants_agree() {
        let m = pm(3, &[&[2, 1, 0], &[1, 1, 1], &[0, 4, 2]], 12);
        let d1 = det_bareiss(&m).unwrap();
        let d2 = det_expansion(&m);
        // det = 2(2-4) - 1(2-0) = -6
        assert!(d1.congruent(&PadicNumber::from_i64(3, -6, 12).unwrap()));
        assert!(d1.congruent(&d2));
    }

    #[test]
    fn inverse_of_rotation() {
        let m = pm(3, &[&[0, -1], &[1, 0]], 10);
        let inv = invert_padic_matrix(&m).unwrap();
        let expect = pm(3, &[&[0, 1], &[-1, 0]], 10);
        for i in 0..2 {
            for j in 0..2 {
                assert!(inv.at(i, j).congruent(expect.at(i, j)), "entry ({i},{j})");
            }
        }
        let prod = m.mul(&inv);
        assert!(prod.at(0, 0).congruent(&PadicNumber::one(3, 10)));
        assert!(prod.at(0, 1).is_zero_like());
    }

    #[test]
    fn block_diag_layout() {
        let a = pm(3, &[&[1, 2], &[3, 4]], 8);
        let b = pm(3, &[&[5]], 8);
        let m = Matrix::block_diag(&[a, b]);
        assert_eq!((m.rows(), m.cols()), (3, 3));
        assert!(m.at(0, 2).is_exact_zero());
        assert!(m.at(2, 0).is_exact_zero());
        assert!(m
            .at(2, 2)
            .congruent(&PadicNumber::from_i64(3, 5, 8).unwrap()));
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = pm(3, &[&[1, 2], &[2, 4]], 8);
        assert!(matches!(
            invert_padic_matrix(&m),
            Err(ArithError::SingularMatrix)
        ));
    }
}
