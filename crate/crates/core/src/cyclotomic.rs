//! Exact arithmetic in the totally ramified extensions Q_p(zeta_{p^n}).
//!
//! Elements are polynomials in the uniformizer eps_n = zeta_{p^n} - 1, of
//! degree below d = p^(n-1)(p-1), reduced modulo the Eisenstein polynomial
//! Phi_{p^n}(1+X). In this basis the valuation is read off the coefficients:
//! ord(sum a_i eps^i) = min_i (ord_p(a_i) + i/d), and the minimizing index is
//! unique because distinct i give distinct fractional parts. No Newton
//! polygon is ever needed.
//!
//! Level 0 is Q_p itself. Level mixing is a correctness hazard, so lifting an
//! element along zeta_{p^n}^(p^(n-m)) = zeta_{p^m} is an explicit operation,
//! never an implicit coercion.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::ArithError;
use crate::padic::{is_odd_prime_u64, prime_power, PadicNumber};
use crate::poly::{cap_precision, convolve, min_finite_precision, trim_exact_zeros};
use crate::valuation::{Rat, Valuation};

/// Degree of Q_p(zeta_{p^level}) over Q_p: 1 at level 0, else p^(level-1)(p-1).
pub fn ring_dimension(p: u64, level: u32) -> Result<usize, ArithError> {
    if level == 0 {
        return Ok(1);
    }
    let mut d: u128 = (p - 1) as u128;
    for _ in 1..level {
        d = d
            .checked_mul(p as u128)
            .ok_or(ArithError::LevelTooLarge { prime: p, level })?;
        if d > (1 << 31) {
            return Err(ArithError::LevelTooLarge { prime: p, level });
        }
    }
    Ok(d as usize)
}

/// Binomial coefficients C(m, k) for k < len, each reduced to `precision`.
///
/// The running value is kept as an exact unit-and-valuation pair with
/// log_p(m)+1 guard digits so that the exact divisions by k+1 never cost
/// digits (the p-valuation of a binomial coefficient is bounded by the number
/// of base-p digits of m).
pub(crate) fn binomial_row_mod(p: u64, m: u64, len: usize, precision: u32) -> Vec<PadicNumber> {
    let mut guard = 1i64;
    {
        let mut t = m;
        while t > 0 {
            t /= p;
            guard += 1;
        }
    }
    let work = precision as i64 + guard;
    let modulus = prime_power(p, work);
    let strip = |mut x: u64| {
        let mut v = 0i64;
        while x.is_multiple_of(p) {
            x /= p;
            v += 1;
        }
        (v, x)
    };
    let mut unit = BigUint::one();
    let mut pval = 0i64;
    let mut out = Vec::with_capacity(len);
    for k in 0..len as u64 {
        if k > m {
            out.push(PadicNumber::exact_zero(p));
            continue;
        }
        if k > 0 {
            let (va, ua) = strip(m - (k - 1));
            let (vb, ub) = strip(k);
            pval += va - vb;
            let ub_inv = mod_inverse_u64_big(ub, &modulus);
            unit = (&unit * ua * ub_inv).mod_floor(&modulus);
        }
        debug_assert!(pval >= 0, "binomials are integers");
        if pval >= precision as i64 {
            out.push(PadicNumber::zero_at(p, precision as i64));
        } else {
            let u = unit.mod_floor(&prime_power(p, precision as i64 - pval));
            out.push(
                PadicNumber::from_unit_and_val(
                    p,
                    &BigInt::from(u),
                    pval,
                    (precision as i64 - pval) as u32,
                )
                .expect("binomial reconstruction"),
            );
        }
    }
    out
}

fn mod_inverse_u64_big(x: u64, modulus: &BigUint) -> BigUint {
    let x = BigInt::from(x);
    let m = BigInt::from(modulus.clone());
    let e = x.extended_gcd(&m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(&m).to_biguint().expect("nonnegative")
}

/// Phi_{p^n}(1+X) with exact integer coefficients: monic of degree
/// p^(n-1)(p-1), Eisenstein at p. Computed as sum_j (1+X)^(j p^(n-1)).
pub fn phi_poly(p: u64, n: u32) -> Result<Vec<BigInt>, ArithError> {
    if !is_odd_prime_u64(p) {
        return Err(ArithError::NotAnOddPrime(p));
    }
    if n == 0 {
        return Err(ArithError::LevelZero);
    }
    let d = ring_dimension(p, n)?;
    if d > (1 << 22) {
        return Err(ArithError::LevelTooLarge { prime: p, level: n });
    }
    let step = (d / (p - 1) as usize) as u64; // p^(n-1)
    let mut out = vec![BigInt::zero(); d + 1];
    for j in 0..p {
        let m = j * step;
        // Exact binomial row C(m, k), k = 0..=m.
        let mut c = BigInt::one();
        out[0] += &c;
        for k in 0..m {
            c = c * BigInt::from(m - k) / BigInt::from(k + 1);
            out[(k + 1) as usize] += &c;
        }
    }
    Ok(out)
}

/// Phi_{p^n}(1+X) with coefficients reduced to the working precision.
pub(crate) fn phi_coeffs_mod(
    p: u64,
    n: u32,
    precision: u32,
) -> Result<Vec<PadicNumber>, ArithError> {
    if n == 0 {
        return Err(ArithError::LevelZero);
    }
    let d = ring_dimension(p, n)?;
    let step = (d / (p - 1) as usize) as u64;
    let mut out = vec![PadicNumber::exact_zero(p); d + 1];
    for j in 0..p {
        let m = j * step;
        let row = binomial_row_mod(p, m, (m as usize + 1).min(d + 1), precision);
        for (k, c) in row.into_iter().enumerate() {
            out[k] = out[k].add_ref(&c);
        }
    }
    Ok(out)
}

/// An element of Q_p(zeta_{p^level}) in the eps power basis.
///
/// Stored coefficients never reach index d; trailing exact zeros are trimmed,
/// so the zero element has an empty vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CycloElement {
    prime: u64,
    level: u32,
    coeffs: Vec<PadicNumber>,
}

impl CycloElement {
    pub fn zero(p: u64, level: u32) -> Self {
        CycloElement {
            prime: p,
            level,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(x: PadicNumber, level: u32) -> Self {
        let prime = x.prime();
        let mut coeffs = vec![x];
        trim_exact_zeros(&mut coeffs);
        CycloElement {
            prime,
            level,
            coeffs,
        }
    }

    /// The uniformizer eps = zeta_{p^level} - 1 (level >= 1).
    pub fn epsilon(p: u64, level: u32, precision: u32) -> Result<Self, ArithError> {
        if level == 0 {
            return Err(ArithError::LevelZero);
        }
        ring_dimension(p, level)?;
        Ok(CycloElement {
            prime: p,
            level,
            coeffs: vec![PadicNumber::exact_zero(p), PadicNumber::one(p, precision)],
        })
    }

    pub fn from_coeffs(
        p: u64,
        level: u32,
        mut coeffs: Vec<PadicNumber>,
    ) -> Result<Self, ArithError> {
        let d = ring_dimension(p, level)?;
        for c in &coeffs {
            if c.prime() != p {
                return Err(ArithError::PrimeMismatch(c.prime(), p));
            }
        }
        if coeffs.len() > d {
            reduce_mod_phi(p, level, &mut coeffs)?;
        }
        trim_exact_zeros(&mut coeffs);
        Ok(CycloElement {
            prime: p,
            level,
            coeffs,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dimension(&self) -> usize {
        ring_dimension(self.prime, self.level).expect("validated at construction")
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicNumber {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| PadicNumber::exact_zero(self.prime))
    }

    /// Minimum finite precision among the coefficients; `None` for the exact zero.
    pub fn precision(&self) -> Option<i64> {
        min_finite_precision(&[&self.coeffs])
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact_zero())
    }

    pub fn is_provably_nonzero(&self) -> bool {
        self.valuation().is_exact()
    }

    /// Exact rational valuation min_i (ord_p(a_i) + i/d), honest about
    /// indeterminacy: if some coefficient that is zero at the working
    /// precision could undercut the best exactly-known candidate, only a
    /// lower bound is reported.
    pub fn valuation(&self) -> Valuation {
        let d = self.dimension() as i64;
        let mut best_exact: Option<Rat> = None;
        let mut best_bound: Option<Rat> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            let offset = Rat::new(i as i64, d);
            match c.valuation() {
                Valuation::Exact(v) => {
                    let cand = v + offset;
                    if best_exact.is_none_or(|b| cand < b) {
                        best_exact = Some(cand);
                    }
                }
                Valuation::AtLeast(v) => {
                    let cand = v + offset;
                    if best_bound.is_none_or(|b| cand < b) {
                        best_bound = Some(cand);
                    }
                }
                Valuation::Infinite => {}
            }
        }
        match (best_exact, best_bound) {
            (None, None) => Valuation::Infinite,
            (None, Some(b)) => Valuation::AtLeast(b),
            (Some(e), None) => Valuation::Exact(e),
            // Equality cannot occur: distinct indices have distinct
            // fractional parts modulo 1.
            (Some(e), Some(b)) => {
                if e < b {
                    Valuation::Exact(e)
                } else {
                    Valuation::AtLeast(b)
                }
            }
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(
            self.prime, other.prime,
            "cyclotomic operands over different primes"
        );
        assert_eq!(
            self.level, other.level,
            "cyclotomic operands at different levels"
        );
    }

    fn capped(mut coeffs: Vec<PadicNumber>, n_min: Option<i64>) -> Vec<PadicNumber> {
        if let Some(n) = n_min {
            cap_precision(&mut coeffs, n);
        }
        trim_exact_zeros(&mut coeffs);
        coeffs
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let n_min = min_finite_precision(&[&self.coeffs, &other.coeffs]);
        let coeffs = crate::poly::add_vecs(self.prime, &self.coeffs, &other.coeffs);
        CycloElement {
            prime: self.prime,
            level: self.level,
            coeffs: Self::capped(coeffs, n_min),
        }
    }

    pub fn neg_ref(&self) -> Self {
        CycloElement {
            prime: self.prime,
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect(),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        if self.is_exactly_zero() || other.is_exactly_zero() {
            return CycloElement::zero(self.prime, self.level);
        }
        let mut coeffs = convolve(self.prime, &self.coeffs, &other.coeffs);
        let d = self.dimension();
        if coeffs.len() > d {
            reduce_mod_phi(self.prime, self.level, &mut coeffs).expect("level validated");
        }
        let n_min = min_finite_precision(&[&coeffs]);
        CycloElement {
            prime: self.prime,
            level: self.level,
            coeffs: Self::capped(coeffs, n_min),
        }
    }

    /// Multiplication by a Q_p scalar, capped to the shared precision.
    pub fn scale(&self, s: &PadicNumber) -> Self {
        if s.is_exact_zero() || self.is_exactly_zero() {
            return CycloElement::zero(self.prime, self.level);
        }
        let n_min = min_finite_precision(&[&self.coeffs, std::slice::from_ref(s)]);
        let coeffs: Vec<PadicNumber> = self.coeffs.iter().map(|c| c.mul_ref(s)).collect();
        CycloElement {
            prime: self.prime,
            level: self.level,
            coeffs: Self::capped(coeffs, n_min),
        }
    }

    /// Exact multiplication by p^k.
    pub fn scale_p_pow(&self, k: i64) -> Self {
        CycloElement {
            prime: self.prime,
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.scale_p_pow(k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            let prec = self.precision().unwrap_or(1).max(1) as u32;
            return CycloElement::constant(PadicNumber::one(self.prime, prec), self.level);
        }
        let mut acc: Option<CycloElement> = None;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul_ref(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc.expect("e > 0")
    }

    /// Inverse of a provably nonzero element.
    ///
    /// The element is shifted by a power of eps and of p until it becomes a
    /// unit of `Z_p[eps]` (unit constant term), whose inverse is obtained as a
    /// power series modulo p and then Hensel-lifted to the working precision.
    pub fn invert(&self) -> Result<Self, ArithError> {
        let d = self.dimension() as i64;
        let val = match self.valuation() {
            Valuation::Exact(v) => v,
            _ => return Err(ArithError::DivisionByZeroLike),
        };
        // val = t + s/d with 0 <= s < d.
        let scaled = val * Rat::from_integer(d);
        debug_assert!(scaled.is_integer());
        let m = scaled.to_integer();
        let t = m.div_euclid(d);
        let s = m.rem_euclid(d);
        if s == 0 {
            let unit = self.scale_p_pow(-t);
            return Ok(unit.invert_unit()?.scale_p_pow(-t));
        }
        let prec = self.precision().unwrap_or(1).max(1) as u32;
        let eps = CycloElement::epsilon(self.prime, self.level, prec)?;
        let shifted = self.mul_ref(&eps.pow((d - s) as u32));
        debug_assert_eq!(
            shifted.valuation(),
            Valuation::Exact(Rat::from_integer(t + 1))
        );
        let unit = shifted.scale_p_pow(-(t + 1));
        Ok(unit
            .invert_unit()?
            .mul_ref(&eps.pow((d - s) as u32))
            .scale_p_pow(-(t + 1)))
    }

    /// Inverse of a unit of Z_p[eps] (valuation exactly 0).
    fn invert_unit(&self) -> Result<Self, ArithError> {
        let p = self.prime;
        let d = self.dimension();
        if self.valuation() != Valuation::Exact(Rat::zero()) {
            return Err(ArithError::NonUnit {
                val: self.valuation().to_string(),
            });
        }
        let target = self.precision().unwrap_or(1).max(1);
        // Inverse modulo p: power series inversion in F_p[X]/(X^d), since
        // Phi_{p^n}(1+X) = X^d mod p.
        let a_mod_p: Vec<u64> = (0..d)
            .map(|i| {
                self.coeff(i)
                    .residue_mod(1)
                    .and_then(|r| r.to_u64())
                    .expect("integral coefficients")
            })
            .collect();
        let a0_inv = mod_inverse_u64(a_mod_p[0], p);
        let mut w = vec![0u64; d];
        w[0] = a0_inv;
        for k in 1..d {
            let mut s: u128 = 0;
            for j in 1..=k {
                s += (a_mod_p[j] as u128) * (w[k - j] as u128) % p as u128;
            }
            let s = (s % p as u128) as u64;
            w[k] = ((a0_inv as u128 * ((p - s) % p) as u128) % p as u128) as u64;
        }
        let mut inv = CycloElement::from_coeffs(
            p,
            self.level,
            w.into_iter()
                .map(|x| PadicNumber::from_i64(p, x as i64, target as u32).expect("small residue"))
                .collect(),
        )?;
        // Hensel: w <- w (2 - a w) doubles the number of correct digits.
        let two = CycloElement::constant(
            PadicNumber::from_i64(p, 2, target as u32).expect("2 is representable"),
            self.level,
        );
        let mut correct: i64 = 1;
        while correct < target {
            let aw = self.mul_ref(&inv);
            inv = inv.mul_ref(&two.sub_ref(&aw));
            correct *= 2;
        }
        debug_assert!({
            let check = self.mul_ref(&inv);
            let one = CycloElement::constant(PadicNumber::one(p, target as u32), self.level);
            check
                .sub_ref(&one)
                .valuation()
                .lower_bound()
                .is_none_or(|b| b >= Rat::from_integer(target))
                || check.sub_ref(&one).valuation().is_infinite()
        });
        Ok(inv)
    }

    pub fn exact_div(&self, other: &Self) -> Result<Self, ArithError> {
        Ok(self.mul_ref(&other.invert()?))
    }

    /// Evaluates the coefficients of `self` at another element, i.e. the
    /// substitution eps -> t. Used for level lifting and Galois conjugation.
    pub fn substitute_eps(&self, t: &CycloElement) -> CycloElement {
        let mut acc = CycloElement::zero(t.prime, t.level);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(t);
            acc = acc.add_ref(&CycloElement::constant(c.clone(), t.level));
        }
        acc
    }

    /// Lifts a level-m element to level n >= m via
    /// eps_m = (1 + eps_n)^(p^(n-m)) - 1. Valuations are preserved.
    pub fn lift_to_level(&self, n: u32) -> Result<CycloElement, ArithError> {
        if n < self.level {
            return Err(ArithError::InvalidInput(format!(
                "cannot lower a level-{} element to level {n}",
                self.level
            )));
        }
        if n == self.level {
            return Ok(self.clone());
        }
        let prec = self.precision().unwrap_or(1).max(1) as u32;
        let t = epsilon_power_image(self.prime, self.level, n, prec)?;
        Ok(self.substitute_eps(&t))
    }

    /// The Galois conjugate eps -> (1+eps)^a - 1 for a prime to p.
    pub fn galois_conjugate(&self, a: u64) -> Result<CycloElement, ArithError> {
        if a.is_multiple_of(self.prime) {
            return Err(ArithError::InvalidInput(
                "conjugation exponent must be prime to p".into(),
            ));
        }
        let prec = self.precision().unwrap_or(1).max(1) as u32;
        let one = CycloElement::constant(PadicNumber::one(self.prime, prec), self.level);
        let eps = CycloElement::epsilon(self.prime, self.level, prec)?;
        let base = one.add_ref(&eps);
        let t = base.pow(a as u32).sub_ref(&one);
        Ok(self.substitute_eps(&t))
    }
}

/// (1 + eps_n)^(p^(n-m)) - 1 at level n: the image of eps_m.
fn epsilon_power_image(p: u64, m: u32, n: u32, precision: u32) -> Result<CycloElement, ArithError> {
    let e = n - m;
    let mut pe: u64 = 1;
    for _ in 0..e {
        pe = pe
            .checked_mul(p)
            .ok_or(ArithError::LevelTooLarge { prime: p, level: n })?;
    }
    let mut row = binomial_row_mod(p, pe, pe as usize + 1, precision);
    row[0] = PadicNumber::exact_zero(p); // C(pe, 0) - 1 = 0 exactly
    CycloElement::from_coeffs(p, n, row)
}

fn mod_inverse_u64(x: u64, p: u64) -> u64 {
    // Fermat: x^(p-2) mod p.
    let mut acc: u128 = 1;
    let mut base = (x % p) as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

/// In-place reduction modulo Phi_{p^level}(1+X), monic of degree d.
fn reduce_mod_phi(p: u64, level: u32, coeffs: &mut Vec<PadicNumber>) -> Result<(), ArithError> {
    let d = ring_dimension(p, level)?;
    if coeffs.len() <= d {
        return Ok(());
    }
    let prec = min_finite_precision(&[coeffs]).unwrap_or(1).max(1);
    let phi = phi_coeffs_mod(p, level, prec as u32)?;
    while coeffs.len() > d {
        let top = coeffs.pop().expect("len > d >= 1");
        if top.is_exact_zero() {
            continue;
        }
        let base = coeffs.len() - d;
        let neg_top = top.neg_ref();
        for (j, phi_j) in phi.iter().take(d).enumerate() {
            if phi_j.is_exact_zero() {
                continue;
            }
            let t = neg_top.mul_ref(phi_j);
            coeffs[base + j] = coeffs[base + j].add_ref(&t);
        }
    }
    Ok(())
}

/// Phi_{p^k}(zeta_{p^n}) as an exact case split:
/// zero when k = n, the cyclotomic unit quotient eps_{n-k}/eps_{n-k+1}
/// (realized by reading the coefficients of Phi_{p^k}(1+X) in the eps_n
/// basis) when k < n, and p when k > n.
pub fn phi_at_zeta(p: u64, k: u32, n: u32, precision: u32) -> Result<CycloElement, ArithError> {
    if k == 0 || n == 0 {
        return Err(ArithError::LevelZero);
    }
    ring_dimension(p, n)?;
    if k == n {
        return Ok(CycloElement::zero(p, n));
    }
    if k > n {
        let c = PadicNumber::from_i64(p, p as i64, precision)?;
        return Ok(CycloElement::constant(c, n));
    }
    let coeffs = phi_coeffs_mod(p, k, precision)?;
    CycloElement::from_coeffs(p, n, coeffs)
}

impl crate::ring::Ring for CycloElement {
    fn zero_like(&self) -> Self {
        CycloElement::zero(self.prime, self.level)
    }
    fn is_exactly_zero(&self) -> bool {
        self.is_exactly_zero()
    }
    fn is_provably_nonzero(&self) -> bool {
        self.is_provably_nonzero()
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self.add_ref(rhs)
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self.sub_ref(rhs)
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self.mul_ref(rhs)
    }
    fn ring_neg(&self) -> Self {
        self.neg_ref()
    }
}

impl crate::ring::ExactDiv for CycloElement {
    fn exact_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        CycloElement::exact_div(self, rhs)
    }
}

impl std::ops::Add for &CycloElement {
    type Output = CycloElement;
    fn add(self, rhs: &CycloElement) -> CycloElement {
        self.add_ref(rhs)
    }
}
impl std::ops::Sub for &CycloElement {
    type Output = CycloElement;
    fn sub(self, rhs: &CycloElement) -> CycloElement {
        self.sub_ref(rhs)
    }
}
impl std::ops::Mul for &CycloElement {
    type Output = CycloElement;
    fn mul(self, rhs: &CycloElement) -> CycloElement {
        self.mul_ref(rhs)
    }
}


#[cfg(test)]
mod expansion_oracle {
    use super::*;

    #[test]
    fn phi_nine_expanded_by_hand() {
        // Phi_9(x) = x^6 + x^3 + 1, so Phi_9(1+X) = (1+X)^6 + (1+X)^3 + 1
        // = 3 + 9X + 18X^2 + 21X^3 + 15X^4 + 6X^5 + X^6.
        let phi = phi_poly(3, 2).unwrap();
        let want = [3i64, 9, 18, 21, 15, 6, 1];
        assert_eq!(phi.len(), want.len());
        for (got, want) in phi.iter().zip(want.iter()) {
            assert_eq!(*got, BigInt::from(*want));
        }
    }
}
