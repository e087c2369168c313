//! Exact rationals, cyclotomic field elements and a fixed-point embedding into C.

mod bigfloat;
mod cyclo;

pub use bigfloat::{BigComplex, BigFloat};
pub use cyclo::{cyclotomic_poly, euler_phi, CycloNum};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `p/q` or `p`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            if q == BigInt::from(0) {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Rat::new(p, q)
        }
        None => Rat::from_integer(t.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?),
    };
    Ok(parsed)
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serializes any value through its `Display` form.
pub fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
