//! Exact hyperbolicity constants.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Integers serialized as decimal strings; integers or strings accepted.
pub mod decimal {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(i) => Ok(BigInt::from(i)),
            Repr::Str(s) => s.trim().parse().map_err(serde::de::Error::custom),
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_str(&v.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigInt>, D::Error> {
            match Option::<Repr>::deserialize(d)? {
                None => Ok(None),
                Some(Repr::Int(i)) => Ok(Some(BigInt::from(i))),
                Some(Repr::Str(s)) => s.trim().parse().map(Some).map_err(serde::de::Error::custom),
            }
        }
    }
}

/// `n -> slope * n + intercept`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Affine {
    #[serde(with = "decimal")]
    pub slope: BigInt,
    #[serde(with = "decimal")]
    pub intercept: BigInt,
}

impl Affine {
    pub fn at(&self, n: u64) -> BigInt {
        &self.slope * BigInt::from(n) + &self.intercept
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsLedger {
    pub delta: u64,
    #[serde(default)]
    pub certified: bool,
    #[serde(default)]
    pub toy: bool,
    #[serde(rename = "C", with = "decimal")]
    pub c: BigInt,
    #[serde(rename = "M", with = "decimal")]
    pub m: BigInt,
    #[serde(with = "decimal")]
    pub k: BigInt,
    #[serde(rename = "K", with = "decimal")]
    pub big_k: BigInt,
    #[serde(rename = "R")]
    pub r: Affine,
    #[serde(rename = "K1", default, with = "decimal::option", skip_serializing_if = "Option::is_none")]
    pub k1: Option<BigInt>,
}

/// The constants for a given `delta`; `K1` from an isoperimetric constant.
pub fn compute_constants(delta: u64, k_iso: Option<u64>, certified: bool) -> Result<ConstantsLedger> {
    if delta == 0 {
        return Err(Error::validation("delta must be at least 1"));
    }
    let d = BigInt::from(delta);
    let c = BigInt::from(3) * &d;
    let m = BigInt::from(6) * (&c + BigInt::from(45) * &d) + BigInt::from(2) * &d + BigInt::from(3);
    let k = BigInt::from(2) * &m;
    let exp = m.to_u32().and_then(|m| m.checked_mul(2)).and_then(|x| x.checked_add(3)).ok_or_else(|| {
        Error::Unsupported("delta too large for the exponent".into())
    })?;
    let big_k = BigInt::from(3) * (BigInt::one() << exp) + &m + BigInt::from(3);
    let intercept = BigInt::from(4) * &m + BigInt::from(3) * &k + BigInt::from(50) * &d + BigInt::from(3);
    let k1 = k_iso.map(|ki| {
        let ki = BigInt::from(ki);
        BigInt::from(3) * &ki * (BigInt::from(2) * &ki + BigInt::one())
    });
    Ok(ConstantsLedger {
        delta,
        certified,
        toy: false,
        c,
        m,
        k,
        big_k,
        r: Affine { slope: BigInt::from(4), intercept },
        k1,
    })
}

impl ConstantsLedger {
    /// A user-supplied ledger. Never certified.
    pub fn toy_from_json(text: &str) -> Result<Self> {
        let mut l: ConstantsLedger =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("toy constants: {e}")))?;
        l.certified = false;
        l.toy = true;
        for (name, v) in [("C", &l.c), ("M", &l.m), ("k", &l.k), ("K", &l.big_k)] {
            if v.sign() == num_bigint::Sign::Minus {
                return Err(Error::validation(format!("toy constants: {name} must be nonnegative")));
            }
        }
        Ok(l)
    }

    pub fn r_at(&self, n: u64) -> BigInt {
        self.r.at(n)
    }

    fn small(x: &BigInt, what: &str) -> Result<u64> {
        x.to_u64().ok_or_else(|| Error::budget(format!("{what} = {x} exceeds the desk-scale range"), 0))
    }

    pub fn c_small(&self) -> Result<u64> {
        Self::small(&self.c, "C")
    }

    pub fn m_small(&self) -> Result<u64> {
        Self::small(&self.m, "M")
    }

    pub fn k_small(&self) -> Result<u64> {
        Self::small(&self.k, "k")
    }

    pub fn big_k_small(&self) -> Result<u64> {
        Self::small(&self.big_k, "K")
    }

    pub fn r_small(&self, n: u64) -> Result<u64> {
        Self::small(&self.r_at(n), "R(n)")
    }

    /// The forbidden radius `m - C - 45 delta + 3 eps` of the dagger condition.
    pub fn forbidden_radius(&self, m: u64, eps: u64) -> BigInt {
        BigInt::from(m) - &self.c - BigInt::from(45u64 * self.delta) + BigInt::from(3 * eps)
    }
}
