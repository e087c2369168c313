use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rat;

/// Fixed-point real: value = mant / 2^bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    bits: u32,
}

static PI_CACHE: OnceLock<Mutex<HashMap<u32, BigInt>>> = OnceLock::new();

fn atan_inv(x: u64, w: u32) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut t = (BigInt::one() << w) / &x;
    let mut sum = t.clone();
    let mut k = 1u64;
    loop {
        t /= &x2;
        if t.is_zero() {
            break;
        }
        let term = &t / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

impl BigFloat {
    pub fn zero(bits: u32) -> Self {
        BigFloat { mant: BigInt::zero(), bits }
    }

    pub fn one(bits: u32) -> Self {
        BigFloat { mant: BigInt::one() << bits, bits }
    }

    pub fn from_rat(r: &Rat, bits: u32) -> Self {
        let n = r.numer() << bits;
        let d = r.denom();
        // round to nearest
        let q = (&n * 2 + if n.is_negative() { -d } else { d.clone() }) / (d * 2);
        BigFloat { mant: q, bits }
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        BigFloat { mant: BigInt::from(v) << bits, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn with(&self, mant: BigInt) -> Self {
        BigFloat { mant, bits: self.bits }
    }

    /// Changes the number of fractional bits.
    pub fn rebits(&self, bits: u32) -> Self {
        let mant = match bits.cmp(&self.bits) {
            Ordering::Greater => &self.mant << (bits - self.bits),
            Ordering::Less => &self.mant >> (self.bits - bits),
            Ordering::Equal => self.mant.clone(),
        };
        BigFloat { mant, bits }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        self.with(&self.mant + &o.mant)
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        self.with(&self.mant - &o.mant)
    }

    pub fn neg(&self) -> Self {
        self.with(-&self.mant)
    }

    pub fn abs(&self) -> Self {
        self.with(self.mant.abs())
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        self.with((&self.mant * &o.mant) >> self.bits)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.with(&self.mant * k)
    }

    pub fn div(&self, o: &Self) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        assert!(!o.mant.is_zero(), "division by zero");
        self.with((&self.mant << self.bits) / &o.mant)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// An integer e with |self| < 2^e.
    pub fn log2_upper(&self) -> i64 {
        if self.mant.is_zero() {
            return -(self.bits as i64) - 1;
        }
        self.mant.bits() as i64 - self.bits as i64
    }

    pub fn to_f64(&self) -> f64 {
        let nb = self.mant.bits() as i64;
        let shift = (nb - 60).max(0);
        let m = (&self.mant >> shift as usize).to_f64().unwrap_or(0.0);
        let e = shift - self.bits as i64;
        let mut v = m;
        let mut e = e;
        while e > 1000 {
            v *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            v *= 2f64.powi(-1000);
            e += 1000;
        }
        v * 2f64.powi(e as i32)
    }

    pub fn pi(bits: u32) -> Self {
        let cache = PI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(m) = cache.lock().unwrap().get(&bits) {
            return BigFloat { mant: m.clone(), bits };
        }
        let w = bits + 16;
        let p = atan_inv(5, w) * 16 - atan_inv(239, w) * 4;
        let mant: BigInt = p >> 16usize;
        cache.lock().unwrap().insert(bits, mant.clone());
        BigFloat { mant, bits }
    }

    pub fn two_pi(bits: u32) -> Self {
        Self::pi(bits).mul_int(2)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "sqrt of negative");
        self.with((&self.mant << self.bits).sqrt())
    }

    fn halvings(&self) -> u32 {
        (self.log2_upper() + 12).max(0) as u32
    }

    pub fn exp(&self) -> Self {
        let s = self.halvings();
        let w = self.bits + s + 24;
        let y = (&self.mant << (w - self.bits)) >> s as usize;
        let one = BigInt::one() << w;
        let mut sum = one.clone();
        let mut term = one;
        let mut k = 1u64;
        loop {
            term = ((term * &y) >> w) / BigInt::from(k);
            if term.is_zero() {
                break;
            }
            sum += &term;
            k += 1;
        }
        for _ in 0..s {
            sum = (&sum * &sum) >> w;
        }
        BigFloat { mant: sum >> (w - self.bits), bits: self.bits }
    }

    /// (cos θ, sin θ).
    pub fn cos_sin(&self) -> (Self, Self) {
        let s = self.halvings();
        let w = self.bits + 2 * s + 24;
        let y = (&self.mant << (w - self.bits)) >> s as usize;
        let one = BigInt::one() << w;
        // term_k = y^k / k!, alternating into cos (even k) and sin (odd k)
        let mut c = one.clone();
        let mut sn = BigInt::zero();
        let mut term = one;
        let mut k = 1u64;
        loop {
            term = ((term * &y) >> w) / BigInt::from(k);
            if term.is_zero() {
                break;
            }
            match k % 4 {
                1 => sn += &term,
                2 => c -= &term,
                3 => sn -= &term,
                _ => c += &term,
            }
            k += 1;
        }
        for _ in 0..s {
            let c2 = ((&c * &c) >> w) - ((&sn * &sn) >> w);
            let s2 = (&c * &sn) >> (w - 1);
            c = c2;
            sn = s2;
        }
        let sh = w - self.bits;
        (BigFloat { mant: c >> sh, bits: self.bits }, BigFloat { mant: sn >> sh, bits: self.bits })
    }

    /// k^(−s) for a positive integer k and rational s, via integer q-th roots.
    pub fn int_pow_neg_rat(k: u64, s: &Rat, bits: u32) -> Self {
        assert!(k >= 1);
        let p = s.numer().to_i64().expect("exponent numerator too large");
        let q = s.denom().to_u32().expect("exponent denominator too large");
        let kb = BigInt::from(k);
        let w = bits + 8;
        let root_of = |e: u64| -> BigInt {
            // mantissa of k^(e/q) at w bits
            let v = num_traits::pow(kb.clone(), e as usize) << (w as usize * q as usize);
            v.nth_root(q)
        };
        let mant = if p <= 0 {
            root_of((-p) as u64)
        } else {
            let r = root_of(p as u64);
            (BigInt::one() << (2 * w)) / r
        };
        BigFloat { mant: mant >> 8usize, bits }
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.mant.is_negative();
        let scaled = (self.mant.abs() * num_traits::pow(BigInt::from(10), digits)) >> self.bits;
        let mut s = scaled.to_string();
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        let (ip, fp) = s.split_at(s.len() - digits);
        format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rebits(self.bits.max(other.bits)).mant.cmp(&other.rebits(self.bits.max(other.bits)).mant)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_decimal(digits))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn zero(bits: u32) -> Self {
        BigComplex { re: BigFloat::zero(bits), im: BigFloat::zero(bits) }
    }

    pub fn add(&self, o: &Self) -> Self {
        BigComplex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        BigComplex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        BigComplex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, r: &BigFloat) -> Self {
        BigComplex { re: self.re.mul(r), im: self.im.mul(r) }
    }

    /// An integer e with |self| < 2^e.
    pub fn log2_upper(&self) -> i64 {
        self.re.log2_upper().max(self.im.log2_upper()) + 1
    }

    pub fn to_complex64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let im = self.im.to_decimal(digits);
        if let Some(abs) = im.strip_prefix('-') {
            write!(f, "{}-{}i", self.re.to_decimal(digits), abs)
        } else {
            write!(f, "{}+{}i", self.re.to_decimal(digits), im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn pi_digits() {
        let p = BigFloat::pi(200);
        assert!(p.to_decimal(40).starts_with("3.1415926535897932384626433832795028841971"));
    }

    #[test]
    fn exp_and_trig() {
        let b = 128;
        let e = BigFloat::one(b).exp();
        assert!(e.to_decimal(30).starts_with("2.718281828459045235360287471352"));
        let x = BigFloat::from_rat(&rat(-47, 3), b).exp();
        assert!((x.to_f64() - (-47.0f64 / 3.0).exp()).abs() < 1e-20);
        let (c, s) = BigFloat::pi(b).div(&BigFloat::from_i64(6, b)).cos_sin();
        assert!((s.to_f64() - 0.5).abs() < 1e-30);
        assert!((c.to_f64() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let (c, s) = BigFloat::two_pi(b).mul(&BigFloat::from_rat(&rat(5, 7), b)).cos_sin();
        let one = c.mul(&c).add(&s.mul(&s)).sub(&BigFloat::one(b));
        assert!(one.log2_upper() < -120);
    }

    #[test]
    fn rational_powers() {
        let b = 128;
        let r = BigFloat::int_pow_neg_rat(2, &rat(-1, 2), b);
        assert!(r.to_decimal(30).starts_with("1.414213562373095048801688724209"));
        let r = BigFloat::int_pow_neg_rat(8, &rat(1, 3), b);
        assert!((r.to_f64() - 0.5).abs() < 1e-30);
        let r = BigFloat::int_pow_neg_rat(7, &int(0), b);
        assert_eq!(r.to_f64(), 1.0);
    }

    #[test]
    fn decimal_format() {
        assert_eq!(BigFloat::from_rat(&rat(-1, 8), 64).to_decimal(4), "-0.1250");
        assert_eq!(BigFloat::from_rat(&rat(1, 3), 64).to_decimal(3), "0.333");
    }
}
