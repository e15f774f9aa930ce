//! Truncated power series over Z_p in the Iwasawa variable X, together with
//! character evaluation and mu/lambda extraction.
//!
//! A series is a dense coefficient vector with an `exact` marker: exact
//! series are polynomials (the tail is exactly zero), inexact ones are known
//! modulo X^D where D is the number of stored coefficients. Evaluation at a
//! finite-order character sends X to eps_n = zeta_{p^n} - 1; for an inexact
//! series the discarded tail contributes an unknown of valuation at least
//! D/(p^(n-1)(p-1)), and the reported precision of the value is capped
//! accordingly.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{phi_coeffs_mod, ring_dimension, CycloElement};
use crate::error::ArithError;
use crate::padic::{is_odd_prime_u64, PadicNumber};
use crate::poly::{add_vecs, cap_precision, convolve, min_finite_precision, trim_exact_zeros};
use crate::valuation::{Rat, Valuation};

/// Element of `Z_p[[X]]` (coefficients may be Q_p in intermediate states),
/// known modulo X^D with D = number of stored coefficients unless `exact`.
#[derive(Clone, Debug, PartialEq)]
pub struct IwasawaSeries {
    prime: u64,
    coeffs: Vec<PadicNumber>,
    exact: bool,
}

impl IwasawaSeries {
    pub fn zero(p: u64) -> Self {
        IwasawaSeries {
            prime: p,
            coeffs: Vec::new(),
            exact: true,
        }
    }

    pub fn constant(c: PadicNumber) -> Self {
        let prime = c.prime();
        let mut coeffs = vec![c];
        trim_exact_zeros(&mut coeffs);
        IwasawaSeries {
            prime,
            coeffs,
            exact: true,
        }
    }

    /// The series X.
    pub fn variable(p: u64, precision: u32) -> Self {
        IwasawaSeries {
            prime: p,
            coeffs: vec![PadicNumber::exact_zero(p), PadicNumber::one(p, precision)],
            exact: true,
        }
    }

    pub fn from_padic_coeffs(p: u64, coeffs: Vec<PadicNumber>, exact: bool) -> Self {
        for c in &coeffs {
            assert_eq!(c.prime(), p, "series coefficients over the wrong prime");
        }
        IwasawaSeries {
            prime: p,
            coeffs,
            exact,
        }
    }

    /// Ingests exact integers and caps them to the working precision.
    pub fn from_integer_coeffs(
        p: u64,
        coeffs: &[BigInt],
        precision: u32,
    ) -> Result<Self, ArithError> {
        let coeffs = coeffs
            .iter()
            .map(|c| PadicNumber::from_bigint(p, c, precision))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IwasawaSeries {
            prime: p,
            coeffs,
            exact: true,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
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

    /// D: the series is known modulo X^D (meaningful when not exact).
    pub fn x_truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Index of the last coefficient that is not an exact zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_exact_zero())
    }

    pub fn precision(&self) -> Option<i64> {
        min_finite_precision(&[&self.coeffs])
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.exact && self.coeffs.iter().all(|c| c.is_exact_zero())
    }

    pub fn is_provably_nonzero(&self) -> bool {
        self.coeffs.iter().any(|c| c.is_provably_nonzero())
    }

    fn assert_same_prime(&self, other: &Self) {
        assert_eq!(self.prime, other.prime, "series over different primes");
    }

    /// Effective truncation: usize::MAX for exact polynomials.
    fn d_eff(&self) -> usize {
        if self.exact {
            usize::MAX
        } else {
            self.coeffs.len()
        }
    }

    fn finish(p: u64, mut coeffs: Vec<PadicNumber>, d_res: usize, exact: bool) -> Self {
        if d_res != usize::MAX {
            coeffs.truncate(d_res);
            // Tail slots up to D are part of the representation of an
            // inexact series; fill with exact zeros for stored positions.
            while coeffs.len() < d_res {
                coeffs.push(PadicNumber::exact_zero(p));
            }
        }
        if let Some(n) = min_finite_precision(&[&coeffs]) {
            cap_precision(&mut coeffs, n);
        }
        if exact {
            trim_exact_zeros(&mut coeffs);
        }
        IwasawaSeries {
            prime: p,
            coeffs,
            exact,
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.assert_same_prime(other);
        let coeffs = add_vecs(self.prime, &self.coeffs, &other.coeffs);
        let d_res = self.d_eff().min(other.d_eff());
        Self::finish(self.prime, coeffs, d_res, self.exact && other.exact)
    }

    pub fn neg_ref(&self) -> Self {
        IwasawaSeries {
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect(),
            exact: self.exact,
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.assert_same_prime(other);
        if self.is_exactly_zero() || other.is_exactly_zero() {
            return IwasawaSeries::zero(self.prime);
        }
        let coeffs = convolve(self.prime, &self.coeffs, &other.coeffs);
        let d_res = self.d_eff().min(other.d_eff());
        Self::finish(self.prime, coeffs, d_res, self.exact && other.exact)
    }

    pub fn scale(&self, s: &PadicNumber) -> Self {
        if s.is_exact_zero() {
            return IwasawaSeries::zero(self.prime);
        }
        let coeffs: Vec<PadicNumber> = self.coeffs.iter().map(|c| c.mul_ref(s)).collect();
        Self::finish(self.prime, coeffs, usize::MAX, self.exact)
    }

    /// Restricts knowledge to X^d; the result is exact only when every
    /// dropped coefficient was exactly zero.
    pub fn truncate(&self, d: usize) -> Self {
        let dropped_exact = self.coeffs.iter().skip(d).all(|c| c.is_exact_zero());
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(d);
        while coeffs.len() < d {
            coeffs.push(PadicNumber::exact_zero(self.prime));
        }
        IwasawaSeries {
            prime: self.prime,
            coeffs,
            exact: self.exact && dropped_exact,
        }
    }

    /// Quotient and remainder by an exact series with unit leading
    /// coefficient (long division; exact for monic divisors such as
    /// Phi_{p^n}(1+X)).
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), ArithError> {
        self.assert_same_prime(divisor);
        if !divisor.exact {
            return Err(ArithError::InvalidInput(
                "division by a truncated series".into(),
            ));
        }
        let deg_d = divisor
            .degree()
            .ok_or_else(|| ArithError::InvalidInput("division by the zero series".into()))?;
        let lead = divisor.coeff(deg_d);
        let lead_inv = lead.invert_unit().map_err(|_| {
            ArithError::InvalidInput("divisor must have a unit leading coefficient".into())
        })?;
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= deg_d {
            return Ok((IwasawaSeries::zero(self.prime), self.clone()));
        }
        let mut quot = vec![PadicNumber::exact_zero(self.prime); n - deg_d];
        for i in (deg_d..n).rev() {
            let c = rem[i].clone();
            if c.is_exact_zero() {
                continue;
            }
            let q = c.mul_ref(&lead_inv);
            quot[i - deg_d] = q.clone();
            for (j, dj) in divisor.coeffs.iter().enumerate() {
                if dj.is_exact_zero() {
                    continue;
                }
                let t = q.mul_ref(dj);
                rem[i - deg_d + j] = rem[i - deg_d + j].sub_ref(&t);
            }
        }
        rem.truncate(deg_d);
        Ok((
            Self::finish(self.prime, quot, usize::MAX, self.exact),
            Self::finish(self.prime, rem, usize::MAX, self.exact),
        ))
    }

    /// True when every remainder coefficient vanishes to its precision.
    pub fn divisible_by(&self, divisor: &Self) -> Result<bool, ArithError> {
        let (_, rem) = self.div_rem(divisor)?;
        Ok(rem.coeffs.iter().all(|c| c.is_zero_like()))
    }

    /// Evaluates the series at the character's value eps_n on the fixed
    /// topological generator. For inexact series the unknown tail has
    /// valuation at least D/(p^(n-1)(p-1)); the value's coefficient precision
    /// is capped to reflect it and the bound is reported alongside.
    pub fn eval_at_character(&self, theta: &Character) -> Result<CharacterValue, ArithError> {
        if theta.prime() != self.prime {
            return Err(ArithError::PrimeMismatch(self.prime, theta.prime()));
        }
        let level = theta.level();
        let d = ring_dimension(self.prime, level)? as i64;
        let series_prec = self.precision().unwrap_or(1).max(1) as u32;
        let eps = CycloElement::epsilon(self.prime, level, series_prec)?;
        let mut acc = CycloElement::zero(self.prime, level);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(&eps);
            if !c.is_exact_zero() {
                acc = acc.add_ref(&CycloElement::constant(c.clone(), level));
            }
        }
        if self.exact {
            return Ok(CharacterValue {
                value: acc,
                tail_bound: Valuation::Infinite,
            });
        }
        let dd = self.coeffs.len() as i64;
        let bound = Rat::new(dd, d);
        let mut coeffs = acc.coeffs().to_vec();
        for (i, c) in coeffs.iter_mut().enumerate() {
            // Unknown tail adds valuation >= D/d - i/d to coefficient i.
            let cap = Rat::new(dd - i as i64, d).ceil().to_integer();
            if let Some(p) = c.precision() {
                if p > cap {
                    *c = c.reduce_precision(cap).expect("cap < precision");
                }
            } else if c.is_exact_zero() {
                *c = PadicNumber::zero_at(self.prime, cap.max(0));
            }
        }
        if coeffs.is_empty() {
            coeffs.push(PadicNumber::zero_at(
                self.prime,
                (bound.floor().to_integer()).max(0),
            ));
        }
        Ok(CharacterValue {
            value: CycloElement::from_coeffs(self.prime, level, coeffs)?,
            tail_bound: Valuation::AtLeast(bound),
        })
    }

    /// Reads the mu/lambda invariants off the coefficient valuations:
    /// mu = min_i ord_p(a_i), lambda = least index attaining it. `certified`
    /// is set only when the minimum is exactly determined at the current
    /// precision and truncation.
    pub fn newton_invariants(&self) -> Result<MuLambda, ArithError> {
        let mut best_exact: Option<(i64, usize)> = None;
        let mut best_bound: Option<i64> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            match c.valuation() {
                Valuation::Exact(v) => {
                    let v = v.to_integer();
                    if v < 0 {
                        return Err(ArithError::InvalidInput(
                            "mu/lambda invariants need an integral series".into(),
                        ));
                    }
                    if best_exact.is_none_or(|(b, _)| v < b) {
                        best_exact = Some((v, i));
                    }
                }
                Valuation::AtLeast(b) => {
                    let b = b.floor().to_integer();
                    if best_bound.is_none_or(|x| b < x) {
                        best_bound = Some(b);
                    }
                }
                Valuation::Infinite => {}
            }
        }
        match best_exact {
            None => Ok(MuLambda {
                mu: 0,
                lambda: 0,
                certified: false,
            }),
            Some((mu, lambda)) => {
                let bound_safe = best_bound.is_none_or(|b| b > mu);
                let tail_safe = self.exact || mu == 0;
                Ok(MuLambda {
                    mu: mu as u32,
                    lambda: lambda as u32,
                    certified: bound_safe && tail_safe,
                })
            }
        }
    }
}

impl crate::ring::Ring for IwasawaSeries {
    fn zero_like(&self) -> Self {
        IwasawaSeries::zero(self.prime)
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

impl std::ops::Add for &IwasawaSeries {
    type Output = IwasawaSeries;
    fn add(self, rhs: &IwasawaSeries) -> IwasawaSeries {
        self.add_ref(rhs)
    }
}
impl std::ops::Sub for &IwasawaSeries {
    type Output = IwasawaSeries;
    fn sub(self, rhs: &IwasawaSeries) -> IwasawaSeries {
        self.sub_ref(rhs)
    }
}
impl std::ops::Mul for &IwasawaSeries {
    type Output = IwasawaSeries;
    fn mul(self, rhs: &IwasawaSeries) -> IwasawaSeries {
        self.mul_ref(rhs)
    }
}

/// omega_n(X) = (1+X)^(p^n) - 1, an exact polynomial.
pub fn omega_poly(p: u64, n: u32, precision: u32) -> Result<IwasawaSeries, ArithError> {
    if !is_odd_prime_u64(p) {
        return Err(ArithError::NotAnOddPrime(p));
    }
    let mut pn: u64 = 1;
    for _ in 0..n {
        pn = pn
            .checked_mul(p)
            .ok_or(ArithError::LevelTooLarge { prime: p, level: n })?;
    }
    if pn > (1 << 22) {
        return Err(ArithError::LevelTooLarge { prime: p, level: n });
    }
    let mut coeffs = crate::cyclotomic::binomial_row_mod(p, pn, pn as usize + 1, precision);
    coeffs[0] = PadicNumber::exact_zero(p); // C(p^n, 0) - 1 = 0 exactly
    Ok(IwasawaSeries::from_padic_coeffs(p, coeffs, true))
}

/// Phi_{p^n}(1+X) as an exact series at the working precision.
pub fn phi_series(p: u64, n: u32, precision: u32) -> Result<IwasawaSeries, ArithError> {
    let coeffs = phi_coeffs_mod(p, n, precision)?;
    Ok(IwasawaSeries::from_padic_coeffs(p, coeffs, true))
}

/// mu/lambda invariants read off the coefficient Newton polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuLambda {
    pub mu: u32,
    pub lambda: u32,
    pub certified: bool,
}

/// A finite-order character on Gamma, trivial on Delta, of conductor
/// p^(conductor_exponent). It sends the fixed topological generator to a
/// primitive root of unity of order p^(conductor_exponent - 1), so series are
/// evaluated at eps_n with n = conductor_exponent - 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Character {
    prime: u64,
    conductor_exponent: u32,
}

impl Character {
    pub fn new(p: u64, conductor_exponent: u32) -> Result<Self, ArithError> {
        if !is_odd_prime_u64(p) {
            return Err(ArithError::NotAnOddPrime(p));
        }
        if conductor_exponent < 2 {
            return Err(ArithError::InvalidInput(format!(
                "conductor exponent must be at least 2, got {conductor_exponent}"
            )));
        }
        Ok(Character {
            prime: p,
            conductor_exponent,
        })
    }

    /// The character of conductor p^(n+1) evaluated at level n.
    pub fn of_level(p: u64, level: u32) -> Result<Self, ArithError> {
        if level == 0 {
            return Err(ArithError::LevelZero);
        }
        Character::new(p, level + 1)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn conductor_exponent(&self) -> u32 {
        self.conductor_exponent
    }

    pub fn level(&self) -> u32 {
        self.conductor_exponent - 1
    }

    /// p^(n-1)(p-1) = [Q_p(zeta_{p^n}) : Q_p] at the evaluation level n.
    pub fn ramification_degree(&self) -> Result<i64, ArithError> {
        Ok(ring_dimension(self.prime, self.level())? as i64)
    }
}

/// Result of a character evaluation, with the tail bound of the discarded
/// part of a truncated series reported alongside.
#[derive(Clone, Debug)]
pub struct CharacterValue {
    pub value: CycloElement,
    pub tail_bound: Valuation,
}

/// Both sides of the evaluation-valuation identity
/// ord_p(f(eps_n)) = mu + lambda/(p^n - p^(n-1)).
#[derive(Clone, Debug, Serialize)]
pub struct WeierstrassReport {
    pub n: u32,
    pub mu: u32,
    pub lambda: u32,
    pub observed: Valuation,
    pub predicted: Valuation,
    pub matches: bool,
}

/// Checks the evaluation-valuation identity exactly at one level.
pub fn weierstrass_valuation_check(
    f: &IwasawaSeries,
    n: u32,
) -> Result<WeierstrassReport, ArithError> {
    let inv = f.newton_invariants()?;
    if !inv.certified {
        return Err(ArithError::InvalidInput(
            "mu/lambda invariants are not certified at the current precision".into(),
        ));
    }
    let theta = Character::of_level(f.prime(), n)?;
    let d_n = theta.ramification_degree()?;
    if d_n <= inv.lambda as i64 {
        return Err(ArithError::NTooSmall {
            n,
            ramification: d_n,
            lambda: inv.lambda,
        });
    }
    let observed = f.eval_at_character(&theta)?.value.valuation();
    let predicted = Rat::from_integer(inv.mu as i64) + Rat::new(inv.lambda as i64, d_n);
    Ok(WeierstrassReport {
        n,
        mu: inv.mu,
        lambda: inv.lambda,
        observed,
        predicted: Valuation::Exact(predicted),
        matches: observed == Valuation::Exact(predicted),
    })
}
