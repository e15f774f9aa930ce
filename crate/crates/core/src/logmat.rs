//! Logarithmic matrices from Frobenius data.
//!
//! From each per-prime matrix C_v in GL_{2gf_v}(Z_p) this module builds
//!
//! * C_{phi,v} = C_v diag(I, (1/p) I), the Frobenius matrix on the local
//!   Dieudonne module,
//! * C_{v,n} = diag(I, Phi_{p^n}(1+X) I) C_v^{-1} over the Iwasawa algebra,
//! * H_{v,n} = C_{v,n} ... C_{v,1} and M_{v,n} = C_{phi,v}^(n+1) H_{v,n},
//! * the block-diagonal H_n over all primes, its evaluations at eps_n, and
//!   the (I, J)-minors selected by index tuples,
//!
//! together with the closed form of H_{v,n}(eps_n) for block anti-diagonal
//! C_v and the structural checks that drive the rank-boundedness criterion.
//!
//! Matrices stay symbolic (series entries) until an evaluation point is
//! chosen. Evaluation of the product is carried out as the product of the
//! evaluated factors: the two agree because evaluation is a ring
//! homomorphism, and the factor-wise route keeps the bottom rows of the
//! level-n factor exactly zero (Phi_{p^n} vanishes at its own root by the
//! case split, not by cancellation of digits).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{phi_at_zeta, CycloElement};
use crate::error::ArithError;
use crate::iwasawa::{phi_series, IwasawaSeries};
use crate::matrix::{det_bareiss, invert_padic_matrix, padic_matrix_pow, Matrix};
use crate::padic::{is_odd_prime_u64, PadicNumber};
use crate::ring::Ring;
use crate::valuation::Valuation;

/// One prime v above p: the residue degree f_v and the unit matrix C_v.
#[derive(Clone, Debug)]
pub struct FrobeniusBlock {
    pub label: String,
    pub f: u32,
    pub c: Matrix<PadicNumber>,
}

/// Global Frobenius data: the prime, the dimension g, the working precision
/// and the per-prime blocks, in declared (canonical) order.
#[derive(Clone, Debug)]
pub struct FrobeniusData {
    prime: u64,
    g: u32,
    precision: u32,
    blocks: Vec<FrobeniusBlock>,
}

impl FrobeniusData {
    /// Validates the structural invariants:
    /// every C_v is square of size 2gf_v with a unit determinant, and
    /// det C_{phi,v} has valuation exactly -gf_v.
    pub fn new(
        prime: u64,
        g: u32,
        precision: u32,
        blocks: Vec<FrobeniusBlock>,
    ) -> Result<Self, ArithError> {
        if !is_odd_prime_u64(prime) {
            return Err(ArithError::NotAnOddPrime(prime));
        }
        if precision < 1 {
            return Err(ArithError::PrecisionTooSmall(precision as i64));
        }
        if g < 1 {
            return Err(ArithError::InvalidInput("g must be at least 1".into()));
        }
        if blocks.is_empty() {
            return Err(ArithError::InvalidInput(
                "at least one prime above p is required".into(),
            ));
        }
        let data = FrobeniusData {
            prime,
            g,
            precision,
            blocks,
        };
        for (idx, b) in data.blocks.iter().enumerate() {
            let size = data.block_size(idx);
            if b.c.rows() != size || b.c.cols() != size {
                return Err(ArithError::InvalidInput(format!(
                    "block `{}`: C_v must be {size}x{size} (2gf_v), got {}x{}",
                    b.label,
                    b.c.rows(),
                    b.c.cols()
                )));
            }
            for e in b.c.entries() {
                if e.prime() != prime {
                    return Err(ArithError::PrimeMismatch(e.prime(), prime));
                }
            }
            let det = det_bareiss(&b.c)?;
            if det.valuation() != Valuation::exact_int(0) {
                return Err(ArithError::InvariantFalsified(format!(
                    "block `{}`: det C_v must be a p-adic unit, found valuation {}",
                    b.label,
                    det.valuation()
                )));
            }
            let gf = (data.g * b.f) as i64;
            let det_phi = det_bareiss(&build_cphi(&data, idx)?)?;
            if det_phi.valuation() != Valuation::exact_int(-gf) {
                return Err(ArithError::InvariantFalsified(format!(
                    "block `{}`: det C_phi must have valuation -gf_v = {}, found {}",
                    b.label,
                    -gf,
                    det_phi.valuation()
                )));
            }
        }
        Ok(data)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn blocks(&self) -> &[FrobeniusBlock] {
        &self.blocks
    }

    pub fn block(&self, idx: usize) -> &FrobeniusBlock {
        &self.blocks[idx]
    }

    pub fn block_index(&self, label: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.label == label)
    }

    /// [F : Q] = sum of the residue degrees f_v.
    pub fn field_degree(&self) -> u32 {
        self.blocks.iter().map(|b| b.f).sum()
    }

    /// g [F : Q], the common size of all admissible index tuples.
    pub fn rank_target(&self) -> usize {
        (self.g * self.field_degree()) as usize
    }

    /// 2 g f_v for the block at `idx`.
    pub fn block_size(&self, idx: usize) -> usize {
        2 * (self.g * self.blocks[idx].f) as usize
    }

    /// g f_v: the split point between the two halves of a block.
    pub fn block_half(&self, idx: usize) -> usize {
        (self.g * self.blocks[idx].f) as usize
    }
}

/// C_{phi,v} = C_v diag(I, (1/p) I): the right half of the columns is scaled
/// by 1/p, so entries may have valuation -1.
pub fn build_cphi(data: &FrobeniusData, v: usize) -> Result<Matrix<PadicNumber>, ArithError> {
    let b = data.block(v);
    let half = data.block_half(v);
    Ok(Matrix::from_fn(b.c.rows(), b.c.cols(), |i, j| {
        if j < half {
            b.c.at(i, j).clone()
        } else {
            b.c.at(i, j).scale_p_pow(-1)
        }
    }))
}

/// C_{v,n} = diag(I, Phi_{p^n}(1+X) I) C_v^{-1}: the top half of the rows of
/// C_v^{-1} unchanged, the bottom half multiplied by Phi_{p^n}(1+X).
pub fn build_cvn(
    data: &FrobeniusData,
    v: usize,
    n: u32,
) -> Result<Matrix<IwasawaSeries>, ArithError> {
    if n == 0 {
        return Err(ArithError::LevelZero);
    }
    let inv = invert_padic_matrix(&data.block(v).c)?;
    let phi = phi_series(data.prime, n, data.precision)?;
    let half = data.block_half(v);
    Ok(Matrix::from_fn(inv.rows(), inv.cols(), |i, j| {
        let e = inv.at(i, j);
        if i < half {
            IwasawaSeries::constant(e.clone())
        } else {
            phi.scale(e)
        }
    }))
}

/// H_{v,n} = C_{v,n} C_{v,n-1} ... C_{v,1}, leftmost factor C_{v,n}.
pub fn build_hvn(
    data: &FrobeniusData,
    v: usize,
    n: u32,
) -> Result<Matrix<IwasawaSeries>, ArithError> {
    if n == 0 {
        return Err(ArithError::LevelZero);
    }
    let mut h = build_cvn(data, v, n)?;
    for k in (1..n).rev() {
        h = h.mul(&build_cvn(data, v, k)?);
    }
    Ok(h)
}

/// M_{v,n} = C_{phi,v}^(n+1) H_{v,n}; entries may have valuation as low as
/// -(n+1).
pub fn build_mvn(
    data: &FrobeniusData,
    v: usize,
    n: u32,
) -> Result<Matrix<IwasawaSeries>, ArithError> {
    let cphi = build_cphi(data, v)?;
    let pow = padic_matrix_pow(&cphi, n + 1, data.precision);
    let pow_series = pow.map(|e| IwasawaSeries::constant(e.clone()));
    Ok(pow_series.mul(&build_hvn(data, v, n)?))
}

/// C_{v,k} evaluated at eps_n: the bottom rows carry Phi_{p^k}(zeta_{p^n}),
/// which the case split makes exactly zero when k = n.
pub fn cvn_at_epsilon(
    data: &FrobeniusData,
    v: usize,
    k: u32,
    n: u32,
) -> Result<Matrix<CycloElement>, ArithError> {
    if k == 0 || n == 0 {
        return Err(ArithError::LevelZero);
    }
    let inv = invert_padic_matrix(&data.block(v).c)?;
    let phi_value = phi_at_zeta(data.prime, k, n, data.precision)?;
    let half = data.block_half(v);
    Ok(Matrix::from_fn(inv.rows(), inv.cols(), |i, j| {
        let e = inv.at(i, j);
        if i < half {
            CycloElement::constant(e.clone(), n)
        } else {
            phi_value.scale(e)
        }
    }))
}

/// H_{v,n}(eps_n) as the product of the evaluated factors.
pub fn hvn_at_epsilon(
    data: &FrobeniusData,
    v: usize,
    n: u32,
) -> Result<Matrix<CycloElement>, ArithError> {
    if n == 0 {
        return Err(ArithError::LevelZero);
    }
    let mut h = cvn_at_epsilon(data, v, n, n)?;
    for k in (1..n).rev() {
        h = h.mul(&cvn_at_epsilon(data, v, k, n)?);
    }
    Ok(h)
}

/// A level-n matrix in per-prime block-diagonal form. The blocks appear in
/// the declared prime order; global row/column indices are obtained by
/// offsetting with the cumulative sizes of the preceding blocks.
#[derive(Clone, Debug)]
pub struct LogMatrix<T> {
    pub level: u32,
    pub blocks: Vec<LogBlock<T>>,
}

#[derive(Clone, Debug)]
pub struct LogBlock<T> {
    pub label: String,
    pub matrix: Matrix<T>,
}

impl<T: Ring> LogMatrix<T> {
    /// The assembled square matrix, exact zeros off the diagonal blocks.
    pub fn to_dense(&self) -> Matrix<T> {
        let blocks: Vec<Matrix<T>> = self.blocks.iter().map(|b| b.matrix.clone()).collect();
        Matrix::block_diag(&blocks)
    }
}

/// The block-diagonal H_n with blocks H_{v,n}, symbolic form.
pub fn assemble_hn(data: &FrobeniusData, n: u32) -> Result<LogMatrix<IwasawaSeries>, ArithError> {
    let blocks = (0..data.blocks().len())
        .map(|v| {
            Ok(LogBlock {
                label: data.block(v).label.clone(),
                matrix: build_hvn(data, v, n)?,
            })
        })
        .collect::<Result<Vec<_>, ArithError>>()?;
    Ok(LogMatrix { level: n, blocks })
}

/// The block-diagonal H_n evaluated at eps_n.
pub fn assemble_hn_at_epsilon(
    data: &FrobeniusData,
    n: u32,
) -> Result<LogMatrix<CycloElement>, ArithError> {
    let blocks = (0..data.blocks().len())
        .map(|v| {
            Ok(LogBlock {
                label: data.block(v).label.clone(),
                matrix: hvn_at_epsilon(data, v, n)?,
            })
        })
        .collect::<Result<Vec<_>, ArithError>>()?;
    Ok(LogMatrix { level: n, blocks })
}

/// One subset of {1, ..., 2gf_v} per prime, stored sorted and 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexTuple {
    parts: Vec<Vec<usize>>,
}

impl IndexTuple {
    pub fn new(parts: Vec<Vec<usize>>) -> Result<Self, ArithError> {
        for (v, part) in parts.iter().enumerate() {
            for w in part.windows(2) {
                if w[0] >= w[1] {
                    return Err(ArithError::InvalidInput(format!(
                        "index tuple part {v} must be strictly increasing"
                    )));
                }
            }
            if part.first().is_some_and(|&i| i == 0) {
                return Err(ArithError::InvalidInput("indices are 1-based".into()));
            }
        }
        Ok(IndexTuple { parts })
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part(&self, v: usize) -> &[usize] {
        &self.parts[v]
    }

    pub fn total_size(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }

    /// Shape check against the Frobenius data (ranges only).
    pub fn validate_shape(&self, data: &FrobeniusData) -> Result<(), ArithError> {
        if self.parts.len() != data.blocks().len() {
            return Err(ArithError::InvalidInput(format!(
                "index tuple has {} parts for {} primes",
                self.parts.len(),
                data.blocks().len()
            )));
        }
        for (v, part) in self.parts.iter().enumerate() {
            let size = data.block_size(v);
            if part.iter().any(|&i| i < 1 || i > size) {
                return Err(ArithError::InvalidInput(format!(
                    "index tuple part {v} must lie in 1..={size}"
                )));
            }
        }
        Ok(())
    }

    /// Membership in the admissible family: correct shape and total size
    /// g [F : Q].
    pub fn is_admissible(&self, data: &FrobeniusData) -> bool {
        self.validate_shape(data).is_ok() && self.total_size() == data.rank_target()
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                let inner: Vec<String> = p.iter().map(|i| i.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

/// The (I, J)-minor of an evaluated H_n. Block diagonality makes the minor
/// factor through the per-prime blocks; when some |I_v| differs from |J_v|
/// the minor is exactly zero by rank considerations, with no digits computed.
pub fn minor_at(
    hn: &LogMatrix<CycloElement>,
    rows: &IndexTuple,
    cols: &IndexTuple,
) -> Result<CycloElement, ArithError> {
    if rows.parts().len() != hn.blocks.len() || cols.parts().len() != hn.blocks.len() {
        return Err(ArithError::InvalidInput(
            "index tuples do not match the number of prime blocks".into(),
        ));
    }
    if rows.total_size() != cols.total_size() {
        return Err(ArithError::InvalidInput(
            "row and column tuples have different sizes".into(),
        ));
    }
    let sample = hn.blocks[0].matrix.at(0, 0);
    if rows
        .parts()
        .iter()
        .zip(cols.parts().iter())
        .any(|(i_v, j_v)| i_v.len() != j_v.len())
    {
        return Ok(sample.zero_like());
    }
    let mut det: Option<CycloElement> = None;
    for (v, block) in hn.blocks.iter().enumerate() {
        let i_v = rows.part(v);
        let j_v = cols.part(v);
        if i_v.is_empty() {
            continue;
        }
        let r0: Vec<usize> = i_v.iter().map(|&i| i - 1).collect();
        let c0: Vec<usize> = j_v.iter().map(|&j| j - 1).collect();
        let sub = block.matrix.submatrix(&r0, &c0);
        let d = det_bareiss(&sub)?;
        det = Some(match det {
            None => d,
            Some(acc) => acc.mul_ref(&d),
        });
    }
    Ok(det.unwrap_or_else(|| sample.zero_like()))
}

/// Per-entry confirmation that the bottom half of H_{v,n}(eps_n) vanishes
/// exactly. A nonzero entry is a falsified invariant and is reported with
/// its valuation.
#[derive(Clone, Debug, Serialize)]
pub struct LowerHalfReport {
    pub label: String,
    pub n: u32,
    pub all_zero: bool,
    /// (row, col, valuation) for entries that are not exact zeros.
    pub offending: Vec<(usize, usize, String)>,
}

pub fn lower_half_vanishing_check(
    data: &FrobeniusData,
    v: usize,
    n: u32,
) -> Result<LowerHalfReport, ArithError> {
    let h = hvn_at_epsilon(data, v, n)?;
    let half = data.block_half(v);
    let mut offending = Vec::new();
    for i in half..h.rows() {
        for j in 0..h.cols() {
            let e = h.at(i, j);
            if !e.is_exactly_zero() {
                offending.push((i + 1, j + 1, e.valuation().to_string()));
            }
        }
    }
    Ok(LowerHalfReport {
        label: data.block(v).label.clone(),
        n,
        all_zero: offending.is_empty(),
        offending,
    })
}

/// delta_n = (eps_1/eps_2)(eps_3/eps_4) ... with the last factor
/// eps_{n-2}/eps_{n-1} for odd n and eps_{n-1}/eps_n for even n; the empty
/// product at n = 1 is 1. Each quotient is realized exactly as
/// Phi_{p^(n-j)}(zeta_{p^n}).
pub fn delta_n(p: u64, n: u32, precision: u32) -> Result<CycloElement, ArithError> {
    if n == 0 {
        return Err(ArithError::LevelZero);
    }
    let mut acc = CycloElement::constant(PadicNumber::one(p, precision), n);
    let mut j = 1;
    while j < n {
        acc = acc.mul_ref(&phi_at_zeta(p, n - j, n, precision)?);
        j += 2;
    }
    Ok(acc)
}

/// The closed form of H_{v,n}(eps_n) for block anti-diagonal C_v, with B1
/// and B2 the unit blocks of C_{v,n} (top-right, and bottom-left before the
/// Phi factor). Returns the assembled matrix and delta_n.
///
/// For odd n the only nonzero block is the upper-right
/// delta_n (B1 B2)^((n-1)/2) B1; for even n it is the upper-left
/// delta_n (B1 B2)^(n/2).
pub fn closed_form_h_antidiag(
    p: u64,
    precision: u32,
    b1: &Matrix<PadicNumber>,
    b2: &Matrix<PadicNumber>,
    n: u32,
) -> Result<(Matrix<CycloElement>, CycloElement), ArithError> {
    if n == 0 {
        return Err(ArithError::LevelZero);
    }
    let m = b1.rows();
    if b1.cols() != m || b2.rows() != m || b2.cols() != m {
        return Err(ArithError::InvalidInput(
            "B1 and B2 must be square of equal size".into(),
        ));
    }
    for b in [b1, b2] {
        let det = det_bareiss(b)?;
        if det.valuation() != Valuation::exact_int(0) {
            return Err(ArithError::InvalidInput(format!(
                "closed form needs unit blocks, found det valuation {}",
                det.valuation()
            )));
        }
    }
    let delta = delta_n(p, n, precision)?;
    let b1b2 = b1.mul(b2);
    let (block, upper_right) = if n % 2 == 1 {
        (
            padic_matrix_pow(&b1b2, (n - 1) / 2, precision).mul(b1),
            true,
        )
    } else {
        (padic_matrix_pow(&b1b2, n / 2, precision), false)
    };
    let zero = CycloElement::zero(p, n);
    let mut out = Matrix::from_fn(2 * m, 2 * m, |_, _| zero.clone());
    for i in 0..m {
        for j in 0..m {
            let value = delta.scale(block.at(i, j));
            if upper_right {
                *out.at_mut(i, m + j) = value;
            } else {
                *out.at_mut(i, j) = value;
            }
        }
    }
    Ok((out, delta))
}

/// B1 (top-right) and B2 (bottom-left, before the Phi factor) of C_{v,n} for
/// a block anti-diagonal C_v: the corresponding blocks of C_v^{-1}.
pub fn antidiag_cvn_blocks(
    data: &FrobeniusData,
    v: usize,
) -> Result<(Matrix<PadicNumber>, Matrix<PadicNumber>), ArithError> {
    let half = data.block_half(v);
    let size = data.block_size(v);
    let c = &data.block(v).c;
    for i in 0..half {
        for j in 0..half {
            if !c.at(i, j).is_exact_zero() || !c.at(half + i, half + j).is_exact_zero() {
                return Err(ArithError::InvalidInput(format!(
                    "block `{}` is not block anti-diagonal",
                    data.block(v).label
                )));
            }
        }
    }
    let inv = invert_padic_matrix(c)?;
    let top: Vec<usize> = (0..half).collect();
    let bottom: Vec<usize> = (half..size).collect();
    let b1 = inv.submatrix(&top, &bottom);
    let b2 = inv.submatrix(&bottom, &top);
    Ok((b1, b2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::Rat;

    const N: u32 = 20;

    fn int(p: u64, x: i64) -> PadicNumber {
        PadicNumber::from_i64(p, x, N).unwrap()
    }

    fn pm(p: u64, rows: &[&[i64]]) -> Matrix<PadicNumber> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(p, x)).collect())
                .collect(),
        )
        .unwrap()
    }

    /// The elliptic a_p = 0 shape: C_v = [[0, -1], [1, 0]] over Z_3.
    fn elliptic_data() -> FrobeniusData {
        FrobeniusData::new(
            3,
            1,
            N,
            vec![FrobeniusBlock {
                label: "v".into(),
                f: 1,
                c: pm(3, &[&[0, -1], &[1, 0]]),
            }],
        )
        .unwrap()
    }

    fn identity_data(p: u64) -> FrobeniusData {
        FrobeniusData::new(
            p,
            1,
            N,
            vec![FrobeniusBlock {
                label: "v".into(),
                f: 1,
                c: pm(p, &[&[1, 0], &[0, 1]]),
            }],
        )
        .unwrap()
    }

    #[test]
    fn cphi_scales_right_columns() {
        let data = elliptic_data();
        let cphi = build_cphi(&data, 0).unwrap();
        assert!(cphi.at(0, 0).is_exact_zero());
        assert_eq!(cphi.at(0, 1).valuation(), Valuation::exact_int(-1));
        assert!(cphi.at(0, 1).congruent(&int(3, -1).scale_p_pow(-1)));
        assert!(cphi.at(1, 0).congruent(&int(3, 1)));
        assert!(cphi.at(1, 1).is_exact_zero());

        let id = identity_data(3);
        let cphi = build_cphi(&id, 0).unwrap();
        assert!(cphi.at(0, 0).congruent(&int(3, 1)));
        assert_eq!(cphi.at(1, 1).valuation(), Valuation::exact_int(-1));

        // det C_phi has valuation -gf_v = -1.
        let det = det_bareiss(&cphi).unwrap();
        assert_eq!(det.valuation(), Valuation::exact_int(-1));
    }

    #[test]
    fn cvn_rotation_example() {
        // C_v^{-1} = [[0, 1], [-1, 0]], so C_{v,1} = [[0, 1], [-Phi_3(1+X), 0]].
        let data = elliptic_data();
        let c = build_cvn(&data, 0, 1).unwrap();
        assert!(c.at(0, 0).is_exactly_zero());
        assert!(c.at(0, 1).coeff(0).congruent(&int(3, 1)));
        assert!(c.at(1, 1).is_exactly_zero());
        let phi_row = c.at(1, 0);
        for (i, want) in [-3i64, -3, -1].iter().enumerate() {
            assert!(
                phi_row.coeff(i).congruent(&int(3, *want)),
                "coefficient {i}"
            );
        }
    }

    #[test]
    fn cvn_identity_example() {
        let data = identity_data(3);
        let c = build_cvn(&data, 0, 2).unwrap();
        assert!(c.at(0, 0).coeff(0).congruent(&int(3, 1)));
        assert!(c.at(0, 1).is_exactly_zero());
        assert!(c.at(1, 0).is_exactly_zero());
        // Bottom-right is Phi_9(1+X): degree 6, Eisenstein.
        assert_eq!(c.at(1, 1).degree(), Some(6));
        assert!(c.at(1, 1).coeff(0).congruent(&int(3, 3)));
    }

    #[test]
    fn cvn_bottom_rows_divisible_by_phi() {
        let data = elliptic_data();
        for n in 1..=3 {
            let c = build_cvn(&data, 0, n).unwrap();
            let phi = phi_series(3, n, N).unwrap();
            for j in 0..2 {
                assert!(
                    c.at(1, j).divisible_by(&phi).unwrap(),
                    "entry (1,{j}) at n={n}"
                );
            }
        }
    }

    #[test]
    fn hvn_single_factor_and_degree_bound() {
        let data = elliptic_data();
        let h1 = build_hvn(&data, 0, 1).unwrap();
        let c1 = build_cvn(&data, 0, 1).unwrap();
        assert_eq!(h1, c1);
        for n in 1..=4u32 {
            let h = build_hvn(&data, 0, n).unwrap();
            let bound = 3usize.pow(n) - 1;
            for e in h.entries() {
                assert!(e.degree().unwrap_or(0) <= bound, "degree bound at n={n}");
            }
        }
    }

    #[test]
    fn hvn_evaluated_rotation_n2() {
        // H_{v,2}(eps_2) = [[-eps_1/eps_2, 0], [0, 0]] for the rotation C_v.
        let data = elliptic_data();
        let h = hvn_at_epsilon(&data, 0, 2).unwrap();
        let quotient = phi_at_zeta(3, 1, 2, N).unwrap();
        let expected = quotient.neg_ref();
        assert!(!h.at(0, 0).sub_ref(&expected).is_provably_nonzero());
        assert_eq!(h.at(0, 0).valuation(), Valuation::Exact(Rat::new(1, 3)));
        assert!(h.at(0, 1).is_exactly_zero());
        assert!(h.at(1, 0).is_exactly_zero());
        assert!(h.at(1, 1).is_exactly_zero());
    }

    #[test]
    fn symbolic_and_evaluated_routes_agree() {
        // Evaluating the symbolic product coefficient-wise must agree with
        // the product of evaluated factors wherever both are determined.
        let data = elliptic_data();
        for n in 1..=3u32 {
            let symbolic = build_hvn(&data, 0, n).unwrap();
            let evaluated = hvn_at_epsilon(&data, 0, n).unwrap();
            let theta = crate::iwasawa::Character::of_level(3, n).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let via_series = symbolic.at(i, j).eval_at_character(&theta).unwrap().value;
                    let diff = via_series.sub_ref(evaluated.at(i, j));
                    assert!(
                        !diff.is_provably_nonzero(),
                        "entry ({i},{j}) at n={n}: {:?}",
                        diff.valuation()
                    );
                }
            }
        }
    }

    #[test]
    fn mvn_identity_example() {
        // n = 1, C_v = I: M = diag(1, Phi/9).
        let data = identity_data(3);
        let m = build_mvn(&data, 0, 1).unwrap();
        assert!(m.at(0, 0).coeff(0).congruent(&int(3, 1)));
        assert!(m.at(0, 1).is_exactly_zero());
        assert!(m.at(1, 0).is_exactly_zero());
        let e = m.at(1, 1);
        // Phi_3(1+X)/9 = (3 + 3X + X^2)/9: valuations -1, -1, -2.
        assert_eq!(e.coeff(0).valuation(), Valuation::exact_int(-1));
        assert_eq!(e.coeff(1).valuation(), Valuation::exact_int(-1));
        assert_eq!(e.coeff(2).valuation(), Valuation::exact_int(-2));
    }

    #[test]
    fn mvn_consistency_and_valuation_floor() {
        let data = elliptic_data();
        for n in 1..=3u32 {
            let m = build_mvn(&data, 0, n).unwrap();
            let cphi_pow = padic_matrix_pow(&build_cphi(&data, 0).unwrap(), n + 1, N)
                .map(|e| IwasawaSeries::constant(e.clone()));
            let redo = cphi_pow.mul(&build_hvn(&data, 0, n).unwrap());
            assert_eq!(m, redo, "definition re-check at n={n}");
            let floor = Rat::from_integer(-((n + 1) as i64));
            for e in m.entries() {
                for c in e.coeffs() {
                    if let Some(b) = c.valuation().lower_bound() {
                        assert!(b >= floor, "valuation {b} below -(n+1) at n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn assemble_hn_layout() {
        let data = elliptic_data();
        let hn = assemble_hn(&data, 1).unwrap();
        assert_eq!(hn.blocks.len(), 1);
        assert_eq!(hn.to_dense().rows(), 2);

        let two = FrobeniusData::new(
            3,
            1,
            N,
            vec![
                FrobeniusBlock {
                    label: "v1".into(),
                    f: 1,
                    c: pm(3, &[&[0, -1], &[1, 0]]),
                },
                FrobeniusBlock {
                    label: "v2".into(),
                    f: 1,
                    c: pm(3, &[&[0, 1], &[-1, 3]]),
                },
            ],
        )
        .unwrap();
        let hn = assemble_hn(&two, 1).unwrap();
        let dense = hn.to_dense();
        assert_eq!((dense.rows(), dense.cols()), (4, 4));
        for i in 0..2 {
            for j in 2..4 {
                assert!(dense.at(i, j).is_exactly_zero(), "off-diagonal block");
                assert!(dense.at(j, i).is_exactly_zero(), "off-diagonal block");
            }
        }
    }

    #[test]
    fn minor_examples() {
        let data = elliptic_data();
        let i0 = IndexTuple::new(vec![vec![1]]).unwrap();
        let i1 = IndexTuple::new(vec![vec![2]]).unwrap();
        // n = 1: the (I_0, I_1) minor is the top-right entry B1 = 1.
        let h1 = assemble_hn_at_epsilon(&data, 1).unwrap();
        let m = minor_at(&h1, &i0, &i1).unwrap();
        assert!(m.coeff(0).congruent(&int(3, 1)));
        assert_eq!(m.valuation(), Valuation::Exact(Rat::from_integer(0)));
        // and the (I_0, I_0) minor is exactly zero.
        assert!(minor_at(&h1, &i0, &i0).unwrap().is_exactly_zero());
        // n = 2: (I_0, I_0) = -eps_1/eps_2, (I_0, I_1) exactly zero.
        let h2 = assemble_hn_at_epsilon(&data, 2).unwrap();
        let m = minor_at(&h2, &i0, &i0).unwrap();
        assert_eq!(m.valuation(), Valuation::Exact(Rat::new(1, 3)));
        assert!(minor_at(&h2, &i0, &i1).unwrap().is_exactly_zero());
    }

    #[test]
    fn minor_block_size_mismatch_is_exact_zero() {
        let two = FrobeniusData::new(
            3,
            1,
            N,
            vec![
                FrobeniusBlock {
                    label: "v1".into(),
                    f: 1,
                    c: pm(3, &[&[0, -1], &[1, 0]]),
                },
                FrobeniusBlock {
                    label: "v2".into(),
                    f: 1,
                    c: pm(3, &[&[0, -1], &[1, 0]]),
                },
            ],
        )
        .unwrap();
        let h = assemble_hn_at_epsilon(&two, 1).unwrap();
        let rows = IndexTuple::new(vec![vec![1], vec![1]]).unwrap();
        let cols = IndexTuple::new(vec![vec![1, 2], vec![]]).unwrap();
        assert!(minor_at(&h, &rows, &cols).unwrap().is_exactly_zero());
    }

    #[test]
    fn lower_half_vanishes_for_identity_and_elliptic() {
        for data in [identity_data(3), elliptic_data()] {
            for n in 1..=3 {
                let r = lower_half_vanishing_check(&data, 0, n).unwrap();
                assert!(r.all_zero, "lower half at n={n}: {:?}", r.offending);
            }
        }
    }

    #[test]
    fn lower_half_vanishes_for_random_gl4() {
        let mut rng = crate::sampling::rng_from_seed(11);
        for _ in 0..5 {
            let c = crate::sampling::random_unit_matrix(&mut rng, 3, 4, N);
            let data = FrobeniusData::new(
                3,
                2,
                N,
                vec![FrobeniusBlock {
                    label: "v".into(),
                    f: 1,
                    c,
                }],
            )
            .unwrap();
            for n in 1..=3 {
                let r = lower_half_vanishing_check(&data, 0, n).unwrap();
                assert!(r.all_zero, "random GL4 lower half at n={n}");
            }
        }
    }

    #[test]
    fn closed_form_base_cases() {
        // n = 1: upper-right block B1, delta_1 = 1 (empty product).
        let b1 = pm(3, &[&[2]]);
        let b2 = pm(3, &[&[1]]);
        let (h, delta) = closed_form_h_antidiag(3, N, &b1, &b2, 1).unwrap();
        assert_eq!(delta.valuation(), Valuation::Exact(Rat::from_integer(0)));
        assert!(h.at(0, 1).coeff(0).congruent(&int(3, 2)));
        assert!(h.at(0, 0).is_exactly_zero());
        assert!(h.at(1, 0).is_exactly_zero());
        assert!(h.at(1, 1).is_exactly_zero());
        // val(delta_2) = 1/2 - 1/6 = 1/3 at p = 3.
        let d2 = delta_n(3, 2, N).unwrap();
        assert_eq!(d2.valuation(), Valuation::Exact(Rat::new(1, 3)));
    }

    #[test]
    fn closed_form_matches_direct_product() {
        // The rotation matrix gives B1 = 1, B2 = -1.
        let data = elliptic_data();
        let (b1, b2) = antidiag_cvn_blocks(&data, 0).unwrap();
        assert!(b1.at(0, 0).congruent(&int(3, 1)));
        assert!(b2.at(0, 0).congruent(&int(3, -1)));
        for n in 1..=4u32 {
            let (closed, _) = closed_form_h_antidiag(3, N, &b1, &b2, n).unwrap();
            let direct = hvn_at_epsilon(&data, 0, n).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(closed.at(i, j), direct.at(i, j), "entry ({i},{j}) at n={n}");
                }
            }
        }
    }
}
