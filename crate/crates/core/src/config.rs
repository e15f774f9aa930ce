//! Configuration documents and their validation.
//!
//! The input document carries the prime, the working precision, the
//! dimension g, the per-prime Frobenius matrices and optionally a Coleman
//! family (explicit coefficient lists, or a synthetic prescription of mu and
//! lambda per tuple plus a seed). Integers are parsed exactly, as JSON
//! numbers or decimal strings of any size, and then capped to the working
//! precision. Emitted documents always serialize integers as strings, so a
//! serialize/parse/serialize round trip is byte-identical.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::criterion::{ColemanFamily, Provenance};
use crate::error::{ArithError, ConfigError};
use crate::iwasawa::IwasawaSeries;
use crate::logmat::{FrobeniusBlock, FrobeniusData, IndexTuple};
use crate::matrix::Matrix;
use crate::padic::PadicNumber;

pub const DEFAULT_PRECISION: u32 = 20;

/// Minimum precision for meaningful verdicts.
pub const MIN_PRECISION: u32 = 4;

/// An exact integer that accepts JSON numbers or decimal strings and always
/// serializes as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactInt(pub BigInt);

impl Serialize for ExactInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExactInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExactInt, E> {
                Ok(ExactInt(BigInt::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExactInt, E> {
                Ok(ExactInt(BigInt::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExactInt, E> {
                BigInt::from_str(v.trim())
                    .map(ExactInt)
                    .map_err(|_| E::custom(format!("`{v}` is not a decimal integer")))
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimeDoc {
    pub label: String,
    pub f: u32,
    pub c: Vec<Vec<ExactInt>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColemanEntryDoc {
    pub tuple: Vec<Vec<usize>>,
    pub coefficients: Vec<ExactInt>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SyntheticFamilyDoc {
    pub tuple: Vec<Vec<usize>>,
    pub mu: u32,
    pub lambda: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SyntheticDoc {
    pub seed: u64,
    #[serde(default = "default_degree")]
    pub degree: u32,
    pub families: Vec<SyntheticFamilyDoc>,
}

fn default_degree() -> u32 {
    8
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColemanDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit: Option<Vec<ColemanEntryDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticDoc>,
}

/// The top-level input document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputDoc {
    pub p: u64,
    #[serde(default = "default_precision")]
    pub precision: u32,
    pub g: u32,
    pub primes: Vec<PrimeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coleman: Option<ColemanDoc>,
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

impl InputDoc {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Canonical JSON emission: pretty-printed with a trailing newline, integers
/// as strings, key order fixed by the struct definitions.
pub fn canonical_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// Builds and validates the Frobenius data, citing the offending field on
/// structural errors. Mathematical invariant violations (non-unit
/// determinants and the determinant valuation of the Frobenius matrix) pass
/// through as `ConfigError::Arith`.
pub fn load_frobenius(doc: &InputDoc) -> Result<FrobeniusData, ConfigError> {
    if doc.precision < MIN_PRECISION {
        return Err(ConfigError::field(
            "precision",
            format!(
                "must be at least {MIN_PRECISION} for meaningful verdicts, got {}",
                doc.precision
            ),
        ));
    }
    if doc.primes.is_empty() {
        return Err(ConfigError::field(
            "primes",
            "at least one prime above p is required",
        ));
    }
    let mut blocks = Vec::with_capacity(doc.primes.len());
    for (i, prime_doc) in doc.primes.iter().enumerate() {
        let expected = 2 * (doc.g * prime_doc.f) as usize;
        if prime_doc.c.len() != expected {
            return Err(ConfigError::field(
                format!("primes[{i}].c"),
                format!(
                    "expected {expected} rows (2gf_v), got {}",
                    prime_doc.c.len()
                ),
            ));
        }
        let mut rows = Vec::with_capacity(expected);
        for (r, row) in prime_doc.c.iter().enumerate() {
            if row.len() != expected {
                return Err(ConfigError::field(
                    format!("primes[{i}].c[{r}]"),
                    format!("expected {expected} entries, got {}", row.len()),
                ));
            }
            let row = row
                .iter()
                .map(|e| PadicNumber::from_bigint(doc.p, &e.0, doc.precision))
                .collect::<Result<Vec<_>, ArithError>>()?;
            rows.push(row);
        }
        blocks.push(FrobeniusBlock {
            label: prime_doc.label.clone(),
            f: prime_doc.f,
            c: Matrix::from_rows(rows)?,
        });
    }
    Ok(FrobeniusData::new(doc.p, doc.g, doc.precision, blocks)?)
}

/// Builds the Coleman family named by the document; absent `coleman` yields
/// the all-zero family (every tuple flagged missing).
pub fn load_coleman(doc: &InputDoc, data: &FrobeniusData) -> Result<ColemanFamily, ConfigError> {
    let Some(coleman) = &doc.coleman else {
        return Ok(ColemanFamily::from_entries(
            data,
            Vec::new(),
            Provenance::UserSupplied,
        )?);
    };
    match (&coleman.explicit, &coleman.synthetic) {
        (Some(_), Some(_)) => Err(ConfigError::field(
            "coleman",
            "give either `explicit` or `synthetic`, not both",
        )),
        (None, None) => Err(ConfigError::field(
            "coleman",
            "one of `explicit` or `synthetic` is required",
        )),
        (Some(entries), None) => {
            let mut given = Vec::with_capacity(entries.len());
            for (i, e) in entries.iter().enumerate() {
                let tuple = IndexTuple::new(e.tuple.clone()).map_err(|err| {
                    ConfigError::field(format!("coleman.explicit[{i}].tuple"), err.to_string())
                })?;
                let coeffs: Vec<BigInt> = e.coefficients.iter().map(|c| c.0.clone()).collect();
                let series = IwasawaSeries::from_integer_coeffs(doc.p, &coeffs, doc.precision)?;
                given.push((tuple, series));
            }
            Ok(ColemanFamily::from_entries(
                data,
                given,
                Provenance::UserSupplied,
            )?)
        }
        (None, Some(synthetic)) => {
            let mut specs = Vec::with_capacity(synthetic.families.len());
            for (i, fam) in synthetic.families.iter().enumerate() {
                let tuple = IndexTuple::new(fam.tuple.clone()).map_err(|err| {
                    ConfigError::field(
                        format!("coleman.synthetic.families[{i}].tuple"),
                        err.to_string(),
                    )
                })?;
                specs.push((tuple, fam.mu, fam.lambda));
            }
            Ok(ColemanFamily::synthetic(
                data,
                &specs,
                synthetic.seed,
                synthetic.degree,
            )?)
        }
    }
}

/// Serializes Frobenius data back into a document (used by the GL2
/// constructor command).
pub fn frobenius_to_doc(data: &FrobeniusData) -> InputDoc {
    InputDoc {
        p: data.prime(),
        precision: data.precision(),
        g: data.g(),
        primes: data
            .blocks()
            .iter()
            .map(|b| PrimeDoc {
                label: b.label.clone(),
                f: b.f,
                c: (0..b.c.rows())
                    .map(|i| {
                        (0..b.c.cols())
                            .map(|j| ExactInt(signed_representative(b.c.at(i, j))))
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
        coleman: None,
    }
}

/// The balanced integer representative of a p-adic integer (smallest absolute
/// value), for readable emitted configs.
fn signed_representative(x: &PadicNumber) -> BigInt {
    let Some(prec) = x.precision() else {
        return BigInt::from(0);
    };
    let Some(residue) = x.residue_mod(prec) else {
        return BigInt::from(0);
    };
    let modulus = BigInt::from(crate::padic::prime_power(x.prime(), prec));
    let r = BigInt::from(residue);
    if &r * 2 > modulus {
        r - modulus
    } else {
        r
    }
}
