//! Dense coefficient-vector arithmetic over [`PadicNumber`].
//!
//! Convolution is the workhorse of both cyclotomic and Iwasawa-series
//! multiplication. The output follows the shared-precision contract: every
//! coefficient is reported modulo p^N where N is the minimum finite precision
//! occurring among the input coefficients. When all inputs are p-adic
//! integers and p^N fits comfortably below 2^52, the convolution runs on raw
//! u64 residues with u128 accumulators; otherwise it falls back to the
//! generic element-wise path. Both paths produce identical digit knowledge;
//! the fast path may only weaken an interior exact zero to `O(p^N)`, which is
//! always a sound claim.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::padic::{prime_power, PadicNumber};

/// Minimum finite precision across the given slices; `None` when every
/// coefficient is an exact zero.
pub fn min_finite_precision(slices: &[&[PadicNumber]]) -> Option<i64> {
    let mut best: Option<i64> = None;
    for s in slices {
        for c in *s {
            if let Some(p) = c.precision() {
                best = Some(best.map_or(p, |b: i64| b.min(p)));
            }
        }
    }
    best
}

/// Reduces every coefficient with precision above `cap` down to `cap`.
pub fn cap_precision(coeffs: &mut [PadicNumber], cap: i64) {
    for c in coeffs.iter_mut() {
        if let Some(p) = c.precision() {
            if p > cap {
                *c = c.reduce_precision(cap).expect("cap <= precision");
            }
        } else if !c.is_exact_zero() {
            unreachable!("infinite precision is only the exact zero");
        }
    }
}

/// Fast-path residue ceiling: keeps the u128 accumulator far from overflow
/// even for convolutions with millions of terms.
const FAST_MODULUS_BITS: u32 = 52;

fn fast_modulus(p: u64, n: i64) -> Option<u64> {
    if n <= 0 {
        return None;
    }
    let mut m: u128 = 1;
    for _ in 0..n {
        m = m.checked_mul(p as u128)?;
        if m >= (1u128 << FAST_MODULUS_BITS) {
            return None;
        }
    }
    Some(m as u64)
}

fn residue_u64(c: &PadicNumber, p: u64, n: i64, modulus: u64) -> Option<u64> {
    if c.is_zero_like() {
        // Zero-like inputs have precision >= n by choice of n.
        return Some(0);
    }
    let val = c.int_valuation().expect("nonzero has exact valuation");
    if val < 0 {
        return None;
    }
    if val >= n {
        return Some(0);
    }
    let unit = c.unit_part().expect("nonzero has a unit");
    let rel = n - val;
    let unit_mod = (unit % prime_power(p, rel)).to_u64()?;
    let mut r = unit_mod as u128;
    for _ in 0..val {
        r = (r * p as u128) % modulus as u128;
    }
    Some(r as u64)
}

fn from_residue_u64(p: u64, r: u64, n: i64) -> PadicNumber {
    if r == 0 {
        return PadicNumber::zero_at(p, n);
    }
    let mut val = 0i64;
    let mut unit = r;
    while unit.is_multiple_of(p) {
        unit /= p;
        val += 1;
    }
    PadicNumber::from_unit_and_val(p, &BigInt::from(unit), val, (n - val) as u32)
        .expect("residue reconstruction")
}

fn try_fast_convolve(
    p: u64,
    a: &[PadicNumber],
    b: &[PadicNumber],
    n: i64,
) -> Option<Vec<PadicNumber>> {
    let modulus = fast_modulus(p, n)?;
    if a.len().min(b.len()) >= (1 << 24) {
        return None;
    }
    let ra: Vec<u64> = a
        .iter()
        .map(|c| residue_u64(c, p, n, modulus))
        .collect::<Option<_>>()?;
    let rb: Vec<u64> = b
        .iter()
        .map(|c| residue_u64(c, p, n, modulus))
        .collect::<Option<_>>()?;
    let out_len = a.len() + b.len() - 1;
    let mut out = vec![0u128; out_len];
    for (i, &x) in ra.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let x = x as u128;
        for (j, &y) in rb.iter().enumerate() {
            out[i + j] += x * y as u128;
        }
    }
    Some(
        out.into_iter()
            .map(|s| from_residue_u64(p, (s % modulus as u128) as u64, n))
            .collect(),
    )
}

/// Full product of two coefficient vectors. Empty inputs give an empty output.
pub fn convolve(p: u64, a: &[PadicNumber], b: &[PadicNumber]) -> Vec<PadicNumber> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.iter().all(|c| c.is_exact_zero()) || b.iter().all(|c| c.is_exact_zero()) {
        return vec![PadicNumber::exact_zero(p); out_len];
    }
    let n = min_finite_precision(&[a, b]).expect("some coefficient is not the exact zero");
    if let Some(fast) = try_fast_convolve(p, a, b, n) {
        return fast;
    }
    let mut out: Vec<Option<PadicNumber>> = vec![None; out_len];
    for (i, x) in a.iter().enumerate() {
        if x.is_exact_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_exact_zero() {
                continue;
            }
            let term = x.mul_ref(y);
            out[i + j] = Some(match out[i + j].take() {
                None => term,
                Some(acc) => acc.add_ref(&term),
            });
        }
    }
    let mut out: Vec<PadicNumber> = out
        .into_iter()
        .map(|c| c.unwrap_or_else(|| PadicNumber::exact_zero(p)))
        .collect();
    cap_precision(&mut out, n);
    out
}

/// Coefficient-wise sum; the shorter vector is padded with exact zeros.
pub fn add_vecs(p: u64, a: &[PadicNumber], b: &[PadicNumber]) -> Vec<PadicNumber> {
    let len = a.len().max(b.len());
    let zero = PadicNumber::exact_zero(p);
    (0..len)
        .map(|i| {
            let x = a.get(i).unwrap_or(&zero);
            let y = b.get(i).unwrap_or(&zero);
            x.add_ref(y)
        })
        .collect()
}

/// Drops trailing exact zeros (zero-at-precision tails are information and stay).
pub fn trim_exact_zeros(coeffs: &mut Vec<PadicNumber>) {
    while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
        coeffs.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(p: u64, x: i64, prec: u32) -> PadicNumber {
        PadicNumber::from_i64(p, x, prec).unwrap()
    }

    #[test]
    fn fast_and_slow_paths_agree() {
        let p = 3;
        let a: Vec<_> = [4, 0, 7, 9].iter().map(|&x| n(p, x, 12)).collect();
        let b: Vec<_> = [5, 2, 27].iter().map(|&x| n(p, x, 12)).collect();
        let fast = try_fast_convolve(p, &a, &b, 12).expect("fast path applies");
        // Independent naive oracle over PadicNumber arithmetic.
        let mut slow: Vec<Option<PadicNumber>> = vec![None; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let t = x.mul_ref(y);
                slow[i + j] = Some(match slow[i + j].take() {
                    None => t,
                    Some(s) => s.add_ref(&t),
                });
            }
        }
        for (x, y) in fast.iter().zip(slow.iter()) {
            assert!(x.congruent(y.as_ref().unwrap()), "fast {x} vs slow {:?}", y);
        }
    }

    #[test]
    fn convolution_matches_integer_oracle() {
        let p = 5;
        let a: Vec<_> = [1, 2, 3].iter().map(|&x| n(p, x, 10)).collect();
        let b: Vec<_> = [4, 0, 6].iter().map(|&x| n(p, x, 10)).collect();
        let got = convolve(p, &a, &b);
        let want = [4i64, 8, 18, 12, 18];
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want.iter()) {
            assert!(g.congruent(&n(p, *w, 10)));
        }
    }

    #[test]
    fn exact_zero_inputs_short_circuit() {
        let p = 3;
        let a = vec![PadicNumber::exact_zero(p); 3];
        let b: Vec<_> = [1, 2].iter().map(|&x| n(p, x, 8)).collect();
        let out = convolve(p, &a, &b);
        assert!(out.iter().all(|c| c.is_exact_zero()));
    }
}
