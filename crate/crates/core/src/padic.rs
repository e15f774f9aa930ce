//! Fixed-precision exact arithmetic in Z_p and Q_p.
//!
//! A value is stored with an *absolute* precision N, meaning it is known
//! modulo p^N. Nonzero values are normalized as `unit * p^val` with the unit
//! coprime to p, so negative valuations (entries of Frobenius matrices carry
//! 1/p) live in the same type as integral values. A value whose known digits
//! all vanish is *not* zero: it is recorded as `O(p^N)` and every consumer
//! must treat its valuation as a lower bound only.
//!
//! Precision never improves through arithmetic. Addition reports
//! `min(N_a, N_b)`; multiplication reports `min(N_a + v_b, N_b + v_a)`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::ArithError;
use crate::valuation::{Rat, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    /// The integer 0, known exactly.
    ExactZero,
    /// All digits below p^bound vanish: the value is O(p^bound).
    ZeroAt { bound: i64 },
    /// `unit * p^val + O(p^prec)` with `unit` a canonical residue modulo
    /// p^(prec - val), coprime to p, and `val < prec`.
    Nonzero { val: i64, unit: BigUint, prec: i64 },
}

/// An element of Q_p known modulo p^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    prime: u64,
    kind: Kind,
}

/// Deterministic Miller-Rabin for u64 inputs.
pub(crate) fn is_odd_prime_u64(n: u64) -> bool {
    if n < 3 || n.is_multiple_of(2) {
        return false;
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        base %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// p^k as a big integer (k >= 0).
pub(crate) fn prime_power(p: u64, k: i64) -> BigUint {
    assert!(k >= 0, "prime_power wants a nonnegative exponent");
    BigUint::from(p).pow(k as u32)
}

/// Largest t with p^t | x, together with x / p^t. Requires x != 0.
fn strip_p(p: u64, mut x: BigUint) -> (i64, BigUint) {
    debug_assert!(!x.is_zero());
    let p_big = BigUint::from(p);
    let mut t = 0i64;
    loop {
        let (q, r) = x.div_rem(&p_big);
        if r.is_zero() {
            x = q;
            t += 1;
        } else {
            return (t, x);
        }
    }
}

/// Modular inverse by extended Euclid; the modulus is p^k and x must be a unit.
fn inv_mod(x: &BigUint, modulus: &BigUint) -> BigUint {
    let x = BigInt::from(x.clone());
    let m = BigInt::from(modulus.clone());
    let egcd = x.extended_gcd(&m);
    debug_assert!(egcd.gcd.is_one(), "inv_mod of a non-unit");
    let inv = egcd.x.mod_floor(&m);
    inv.to_biguint().expect("mod_floor is nonnegative")
}

impl PadicNumber {
    fn check_prime(p: u64) -> Result<(), ArithError> {
        if p >= 3 && is_odd_prime_u64(p) {
            Ok(())
        } else {
            Err(ArithError::NotAnOddPrime(p))
        }
    }

    /// The integer 0, known exactly.
    pub fn exact_zero(p: u64) -> Self {
        PadicNumber {
            prime: p,
            kind: Kind::ExactZero,
        }
    }

    /// A value all of whose digits below p^bound vanish.
    pub fn zero_at(p: u64, bound: i64) -> Self {
        PadicNumber {
            prime: p,
            kind: Kind::ZeroAt { bound },
        }
    }

    /// Builds a value from a canonical residue r modulo p^prec (0 <= r < p^prec).
    fn from_residue(p: u64, r: BigUint, prec: i64) -> Self {
        if r.is_zero() {
            return PadicNumber::zero_at(p, prec);
        }
        let (val, unit) = strip_p(p, r);
        debug_assert!(val < prec);
        PadicNumber {
            prime: p,
            kind: Kind::Nonzero { val, unit, prec },
        }
    }

    /// Parses an exact integer and caps it to the working precision.
    pub fn from_bigint(p: u64, n: &BigInt, precision: u32) -> Result<Self, ArithError> {
        Self::check_prime(p)?;
        if precision == 0 {
            return Err(ArithError::PrecisionTooSmall(0));
        }
        if n.is_zero() {
            return Ok(PadicNumber::exact_zero(p));
        }
        let prec = precision as i64;
        let modulus = BigInt::from(prime_power(p, prec));
        let r = n.mod_floor(&modulus).to_biguint().expect("nonnegative");
        Ok(Self::from_residue(p, r, prec))
    }

    pub fn from_i64(p: u64, n: i64, precision: u32) -> Result<Self, ArithError> {
        Self::from_bigint(p, &BigInt::from(n), precision)
    }

    pub fn one(p: u64, precision: u32) -> Self {
        PadicNumber::from_i64(p, 1, precision).expect("1 is representable")
    }

    /// Builds `unit * p^val` from parts; the unit is reduced modulo
    /// p^(prec - val) and any stray p factors are folded into the valuation.
    pub fn from_unit_and_val(
        p: u64,
        unit: &BigInt,
        val: i64,
        precision_of_unit: u32,
    ) -> Result<Self, ArithError> {
        let x = Self::from_bigint(p, unit, precision_of_unit)?;
        Ok(x.scale_p_pow(val))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Absolute precision; `None` for the exact zero (known to every precision).
    pub fn precision(&self) -> Option<i64> {
        match &self.kind {
            Kind::ExactZero => None,
            Kind::ZeroAt { bound } => Some(*bound),
            Kind::Nonzero { prec, .. } => Some(*prec),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.kind, Kind::ExactZero)
    }

    /// True when every known digit vanishes (exactly zero or O(p^N)).
    pub fn is_zero_like(&self) -> bool {
        !matches!(self.kind, Kind::Nonzero { .. })
    }

    /// True when the value is provably nonzero (some known digit is set).
    pub fn is_provably_nonzero(&self) -> bool {
        matches!(self.kind, Kind::Nonzero { .. })
    }

    /// The normalized p-adic valuation, honest about indeterminacy.
    pub fn valuation(&self) -> Valuation {
        match &self.kind {
            Kind::ExactZero => Valuation::Infinite,
            Kind::ZeroAt { bound } => Valuation::AtLeast(Rat::from_integer(*bound)),
            Kind::Nonzero { val, .. } => Valuation::Exact(Rat::from_integer(*val)),
        }
    }

    /// The exactly determined integer valuation, if any.
    pub fn int_valuation(&self) -> Option<i64> {
        match &self.kind {
            Kind::Nonzero { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// Unit part of a normalized nonzero value.
    pub fn unit_part(&self) -> Option<&BigUint> {
        match &self.kind {
            Kind::Nonzero { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Canonical residue modulo p^N for values with valuation >= 0.
    /// `None` when the value has a pole or N exceeds the known precision.
    pub fn residue_mod(&self, n: i64) -> Option<BigUint> {
        match &self.kind {
            Kind::ExactZero => Some(BigUint::zero()),
            Kind::ZeroAt { bound } => (*bound >= n).then(BigUint::zero),
            Kind::Nonzero { val, unit, prec } => {
                if *val < 0 || *prec < n {
                    return None;
                }
                if *val >= n {
                    return Some(BigUint::zero());
                }
                let r = unit * prime_power(self.prime, *val);
                Some(r.mod_floor(&prime_power(self.prime, n)))
            }
        }
    }

    fn assert_same_prime(&self, other: &Self) {
        assert_eq!(
            self.prime, other.prime,
            "p-adic operands must share the prime ({} vs {})",
            self.prime, other.prime
        );
    }

    /// Exact multiplication by p^k (k may be negative): shifts valuation and
    /// precision together, losing nothing.
    pub fn scale_p_pow(&self, k: i64) -> Self {
        let kind = match &self.kind {
            Kind::ExactZero => Kind::ExactZero,
            Kind::ZeroAt { bound } => Kind::ZeroAt { bound: bound + k },
            Kind::Nonzero { val, unit, prec } => Kind::Nonzero {
                val: val + k,
                unit: unit.clone(),
                prec: prec + k,
            },
        };
        PadicNumber {
            prime: self.prime,
            kind,
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.assert_same_prime(other);
        let p = self.prime;
        match (&self.kind, &other.kind) {
            (Kind::ExactZero, _) => other.clone(),
            (_, Kind::ExactZero) => self.clone(),
            (Kind::ZeroAt { bound: a }, Kind::ZeroAt { bound: b }) => {
                PadicNumber::zero_at(p, (*a).min(*b))
            }
            (Kind::ZeroAt { bound }, Kind::Nonzero { val, unit, prec })
            | (Kind::Nonzero { val, unit, prec }, Kind::ZeroAt { bound }) => {
                let k = (*bound).min(*prec);
                if *val >= k {
                    PadicNumber::zero_at(p, k)
                } else {
                    let unit = unit.mod_floor(&prime_power(p, k - val));
                    debug_assert!(!unit.is_zero());
                    PadicNumber {
                        prime: p,
                        kind: Kind::Nonzero {
                            val: *val,
                            unit,
                            prec: k,
                        },
                    }
                }
            }
            (
                Kind::Nonzero {
                    val: va,
                    unit: ua,
                    prec: na,
                },
                Kind::Nonzero {
                    val: vb,
                    unit: ub,
                    prec: nb,
                },
            ) => {
                let k = (*na).min(*nb);
                let v0 = (*va).min(*vb);
                // Work with residues of (value / p^v0) modulo p^(k - v0).
                let modulus = prime_power(p, k - v0);
                let ra = (ua * prime_power(p, va - v0)).mod_floor(&modulus);
                let rb = (ub * prime_power(p, vb - v0)).mod_floor(&modulus);
                let s = (ra + rb).mod_floor(&modulus);
                PadicNumber::from_residue(p, s, k - v0).scale_p_pow(v0)
            }
        }
    }

    pub fn neg_ref(&self) -> Self {
        let p = self.prime;
        match &self.kind {
            Kind::ExactZero | Kind::ZeroAt { .. } => self.clone(),
            Kind::Nonzero { val, unit, prec } => {
                let modulus = prime_power(p, prec - val);
                let unit = (&modulus - unit).mod_floor(&modulus);
                PadicNumber {
                    prime: p,
                    kind: Kind::Nonzero {
                        val: *val,
                        unit,
                        prec: *prec,
                    },
                }
            }
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.assert_same_prime(other);
        let p = self.prime;
        match (&self.kind, &other.kind) {
            (Kind::ExactZero, _) | (_, Kind::ExactZero) => PadicNumber::exact_zero(p),
            (Kind::ZeroAt { bound: a }, Kind::ZeroAt { bound: b }) => {
                PadicNumber::zero_at(p, a + b)
            }
            (Kind::ZeroAt { bound }, Kind::Nonzero { val, .. })
            | (Kind::Nonzero { val, .. }, Kind::ZeroAt { bound }) => {
                PadicNumber::zero_at(p, bound + val)
            }
            (
                Kind::Nonzero {
                    val: va,
                    unit: ua,
                    prec: na,
                },
                Kind::Nonzero {
                    val: vb,
                    unit: ub,
                    prec: nb,
                },
            ) => {
                let rel = (na - va).min(nb - vb);
                let val = va + vb;
                let unit = (ua * ub).mod_floor(&prime_power(p, rel));
                debug_assert!(!unit.is_zero());
                PadicNumber {
                    prime: p,
                    kind: Kind::Nonzero {
                        val,
                        unit,
                        prec: val + rel,
                    },
                }
            }
        }
    }

    /// Inverse of a unit (valuation exactly 0), to the same precision.
    pub fn invert_unit(&self) -> Result<Self, ArithError> {
        match &self.kind {
            Kind::Nonzero { val: 0, unit, prec } => {
                let modulus = prime_power(self.prime, *prec);
                let inv = inv_mod(unit, &modulus);
                Ok(PadicNumber {
                    prime: self.prime,
                    kind: Kind::Nonzero {
                        val: 0,
                        unit: inv,
                        prec: *prec,
                    },
                })
            }
            _ => Err(ArithError::NonUnit {
                val: self.valuation().to_string(),
            }),
        }
    }

    /// Inverse of any provably nonzero value; relative precision is preserved,
    /// so the absolute precision becomes N - 2v.
    pub fn invert(&self) -> Result<Self, ArithError> {
        match &self.kind {
            Kind::Nonzero { val, unit, prec } => {
                let rel = prec - val;
                let modulus = prime_power(self.prime, rel);
                let inv = inv_mod(unit, &modulus);
                Ok(PadicNumber {
                    prime: self.prime,
                    kind: Kind::Nonzero {
                        val: -val,
                        unit: inv,
                        prec: rel - val,
                    },
                })
            }
            _ => Err(ArithError::DivisionByZeroLike),
        }
    }

    pub fn div_ref(&self, other: &Self) -> Result<Self, ArithError> {
        Ok(self.mul_ref(&other.invert()?))
    }

    /// Same value known modulo p^new_prec; claims are re-derived, never inflated.
    pub fn reduce_precision(&self, new_prec: i64) -> Result<Self, ArithError> {
        match &self.kind {
            Kind::ExactZero => Ok(self.clone()),
            Kind::ZeroAt { bound } => {
                if new_prec > *bound {
                    Err(ArithError::PrecisionInflation {
                        have: *bound,
                        want: new_prec,
                    })
                } else {
                    Ok(PadicNumber::zero_at(self.prime, new_prec))
                }
            }
            Kind::Nonzero { val, unit, prec } => {
                if new_prec > *prec {
                    return Err(ArithError::PrecisionInflation {
                        have: *prec,
                        want: new_prec,
                    });
                }
                if *val >= new_prec {
                    return Ok(PadicNumber::zero_at(self.prime, new_prec));
                }
                let unit = unit.mod_floor(&prime_power(self.prime, new_prec - val));
                debug_assert!(!unit.is_zero());
                Ok(PadicNumber {
                    prime: self.prime,
                    kind: Kind::Nonzero {
                        val: *val,
                        unit,
                        prec: new_prec,
                    },
                })
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc: Option<PadicNumber> = None;
        let mut base = self.clone();
        let mut e = e;
        if e == 0 {
            return PadicNumber::one(self.prime, self.precision().unwrap_or(1).max(1) as u32);
        }
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

    /// True when the two values agree modulo p^min(N_a, N_b).
    pub fn congruent(&self, other: &Self) -> bool {
        if self.prime != other.prime {
            return false;
        }
        let k = match (self.precision(), other.precision()) {
            (None, None) => return self.is_exact_zero() == other.is_exact_zero(),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        let low = self
            .int_valuation()
            .unwrap_or(0)
            .min(other.int_valuation().unwrap_or(0))
            .min(0);
        let modulus = prime_power(self.prime, k - low);
        let residue = |x: &PadicNumber| match &x.kind {
            Kind::ExactZero => Some(BigUint::zero()),
            Kind::ZeroAt { .. } => Some(BigUint::zero()),
            Kind::Nonzero { val, unit, .. } => {
                if *val >= k {
                    Some(BigUint::zero())
                } else {
                    Some((unit * prime_power(x.prime, val - low)).mod_floor(&modulus))
                }
            }
        };
        residue(self) == residue(other)
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime;
        match &self.kind {
            Kind::ExactZero => write!(f, "0"),
            Kind::ZeroAt { bound } => write!(f, "O({p}^{bound})"),
            Kind::Nonzero { val, unit, prec } => {
                write!(f, "{unit} * {p}^{val} (mod {p}^{prec})")
            }
        }
    }
}

/// Parses the canonical textual form produced by `Display`.
pub fn parse_padic(p: u64, s: &str) -> Result<PadicNumber, ArithError> {
    let s = s.trim();
    if s == "0" {
        return Ok(PadicNumber::exact_zero(p));
    }
    let bad = || ArithError::InvalidInput(format!("cannot parse p-adic value `{s}`"));
    if let Some(rest) = s.strip_prefix("O(") {
        let rest = rest.strip_suffix(')').ok_or_else(bad)?;
        let (base, bound) = rest.split_once('^').ok_or_else(bad)?;
        let base: u64 = base.trim().parse().map_err(|_| bad())?;
        if base != p {
            return Err(ArithError::PrimeMismatch(base, p));
        }
        return Ok(PadicNumber::zero_at(
            p,
            bound.trim().parse().map_err(|_| bad())?,
        ));
    }
    let (unit_str, rest) = s.split_once('*').ok_or_else(bad)?;
    let unit: BigUint = unit_str.trim().parse().map_err(|_| bad())?;
    let (pv, modp) = rest.split_once("(mod").ok_or_else(bad)?;
    let (base, val) = pv.trim().split_once('^').ok_or_else(bad)?;
    let base: u64 = base.trim().parse().map_err(|_| bad())?;
    if base != p {
        return Err(ArithError::PrimeMismatch(base, p));
    }
    let val: i64 = val.trim().parse().map_err(|_| bad())?;
    let modp = modp.trim().strip_suffix(')').ok_or_else(bad)?;
    let (base2, prec) = modp.split_once('^').ok_or_else(bad)?;
    let base2: u64 = base2.trim().parse().map_err(|_| bad())?;
    if base2 != p {
        return Err(ArithError::PrimeMismatch(base2, p));
    }
    let prec: i64 = prec.trim().parse().map_err(|_| bad())?;
    if prec <= val {
        return Err(ArithError::InvalidInput(format!(
            "precision {prec} <= valuation {val}"
        )));
    }
    let unit = unit.mod_floor(&prime_power(p, prec - val));
    if unit.is_zero() || (&unit % p).is_zero() {
        return Err(ArithError::InvalidInput(format!(
            "`{s}` has a non-normalized unit part"
        )));
    }
    Ok(PadicNumber {
        prime: p,
        kind: Kind::Nonzero { val, unit, prec },
    })
}

impl std::ops::Add for &PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: &PadicNumber) -> PadicNumber {
        self.add_ref(rhs)
    }
}
impl std::ops::Sub for &PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: &PadicNumber) -> PadicNumber {
        self.sub_ref(rhs)
    }
}
impl std::ops::Mul for &PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: &PadicNumber) -> PadicNumber {
        self.mul_ref(rhs)
    }
}
impl std::ops::Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_ref()
    }
}
