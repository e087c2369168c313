use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{parse_rat, BigComplex, BigFloat, Rat};
use crate::error::{Error, Result};

pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut phi = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

static PHI_CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i128>>>>> = OnceLock::new();

/// Coefficients of the m-th cyclotomic polynomial, constant term first.
///
/// Obtained by dividing x^m − 1 by Φ_d for every proper divisor d of m.
pub fn cyclotomic_poly(m: u32) -> Arc<Vec<i128>> {
    assert!(m >= 1);
    let cache = PHI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    let mut num = vec![0i128; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            let div = cyclotomic_poly(d);
            num = exact_div_monic(&num, &div);
        }
    }
    let out = Arc::new(num);
    cache.lock().unwrap().insert(m, out.clone());
    out
}

fn exact_div_monic(num: &[i128], den: &[i128]) -> Vec<i128> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i128; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        q[i] = c;
        for (t, &dc) in den.iter().enumerate() {
            rem[i + t] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    q
}

/// Exact element of Q(ζ_m) in the power basis modulo Φ_m.
///
/// Orders congruent to 2 mod 4 are folded to m/2, since Q(ζ_m) = Q(ζ_{m/2}) there.
#[derive(Clone, Debug)]
pub struct CycloNum {
    order: u32,
    coeffs: Vec<Rat>,
}

fn canonical_order(m: u32) -> u32 {
    if m % 4 == 2 {
        m / 2
    } else {
        m
    }
}

impl CycloNum {
    pub fn zero() -> Self {
        Self::from_rat(Rat::zero())
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        CycloNum { order: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    /// ζ_m^e with ζ_m = exp(2πi/m).
    pub fn zeta_pow(m: u32, e: i64) -> Self {
        assert!(m >= 1);
        let e = e.rem_euclid(m as i64) as u64;
        Self::from_power_terms(m, &[(e, Rat::one())])
    }

    pub fn zeta(m: u32) -> Self {
        Self::zeta_pow(m, 1)
    }

    /// Builds from the power-basis coefficients; the vector must have length φ(m).
    pub fn new(order: u32, coeffs: Vec<Rat>) -> Result<Self> {
        if order == 0 || coeffs.len() as u64 != euler_phi(order as u64) {
            return Err(Error::InvalidArgument(format!(
                "order {order} needs {} coefficients, got {}",
                if order == 0 { 0 } else { euler_phi(order as u64) },
                coeffs.len()
            )));
        }
        if order % 4 == 2 {
            let terms: Vec<(u64, Rat)> = coeffs.into_iter().enumerate().map(|(i, c)| (i as u64, c)).collect();
            return Ok(Self::from_power_terms(order, &terms));
        }
        Ok(CycloNum { order, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Σ c·ζ_m^e for arbitrary exponents, reduced into the canonical field.
    fn from_power_terms(m: u32, terms: &[(u64, Rat)]) -> Self {
        let target = canonical_order(m);
        let mut dense = vec![Rat::zero(); target as usize];
        for (e, c) in terms {
            let e = e % m as u64;
            let (idx, neg) = if target != m {
                // ζ_m = −ζ_{m/2}^{(m+2)/4}
                let step = (m as u64 + 2) / 4;
                ((e * step) % target as u64, e % 2 == 1)
            } else {
                (e, false)
            };
            if neg {
                dense[idx as usize] -= c;
            } else {
                dense[idx as usize] += c;
            }
        }
        Self::reduce_dense(target, dense)
    }

    fn reduce_dense(m: u32, mut dense: Vec<Rat>) -> Self {
        let phi = cyclotomic_poly(m);
        let deg = phi.len() - 1;
        for top in (deg..dense.len()).rev() {
            if dense[top].is_zero() {
                continue;
            }
            let c = dense[top].clone();
            for (t, &pc) in phi.iter().enumerate() {
                if pc != 0 {
                    dense[top - deg + t] -= &c * Rat::from_integer(BigInt::from(pc));
                }
            }
        }
        dense.truncate(deg);
        dense.resize(deg, Rat::zero());
        CycloNum { order: m, coeffs: dense }
    }

    /// Re-expresses self in Q(ζ_target); target must be a multiple of the order.
    pub fn promote(&self, target: u32) -> Self {
        let target = canonical_order(target);
        assert_eq!(target % self.order, 0, "promotion target must be a multiple");
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as u64;
        let terms: Vec<(u64, Rat)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u64 * step, c.clone()))
            .collect();
        Self::from_power_terms(target, &terms)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let l = a.order.lcm(&b.order);
        (a.promote(l), b.promote(l))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> Option<Rat> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_else(Rat::zero))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.order == 1 && other.order == 1 {
            return Self::from_rat(&self.coeffs[0] + &other.coeffs[0]);
        }
        let (a, b) = Self::common(self, other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycloNum { order: a.order, coeffs }
    }

    pub fn neg(&self) -> Self {
        CycloNum { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CycloNum { order: self.order, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if other.order == 1 {
            return self.scale(&other.coeffs[0]);
        }
        if self.order == 1 {
            return other.scale(&self.coeffs[0]);
        }
        let (a, b) = Self::common(self, other);
        let n = a.coeffs.len();
        let mut dense = vec![Rat::zero(); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    dense[i + j] += x * y;
                }
            }
        }
        Self::reduce_dense(a.order, dense)
    }

    /// Multiplicative inverse by solving the linear system of multiplication by self.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if self.order == 1 {
            return Ok(Self::from_rat(self.coeffs[0].recip()));
        }
        let n = self.coeffs.len();
        // column j = self * ζ^j
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            cols.push(self.mul(&Self::zeta_pow(self.order, j as i64)).coeffs);
        }
        let mut mat: Vec<Vec<Rat>> = (0..n)
            .map(|r| {
                let mut row: Vec<Rat> = (0..n).map(|c| cols[c][r].clone()).collect();
                row.push(if r == 0 { Rat::one() } else { Rat::zero() });
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !mat[r][col].is_zero()).ok_or(Error::ZeroDivisor)?;
            mat.swap(col, piv);
            let p = mat[col][col].clone();
            for x in mat[col].iter_mut() {
                *x /= &p;
            }
            for r in 0..n {
                if r != col && !mat[r][col].is_zero() {
                    let f = mat[r][col].clone();
                    for c in col..=n {
                        let v = &mat[col][c] * &f;
                        mat[r][c] -= v;
                    }
                }
            }
        }
        Ok(CycloNum { order: self.order, coeffs: mat.into_iter().map(|r| r[n].clone()).collect() })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let m = self.order as u64;
        let terms: Vec<(u64, Rat)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| ((m - i as u64) % m, c.clone()))
            .collect();
        Self::from_power_terms(self.order, &terms)
    }

    pub fn embed(&self, precision_bits: u32) -> BigComplex {
        let bits = precision_bits + 32;
        let mut re = BigFloat::zero(bits);
        let mut im = BigFloat::zero(bits);
        let m = self.order;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = BigFloat::from_rat(c, bits);
            if i == 0 {
                re = re.add(&cf);
                continue;
            }
            let theta = BigFloat::two_pi(bits).mul(&BigFloat::from_rat(&Rat::new(BigInt::from(i), BigInt::from(m)), bits));
            let (cs, sn) = BigFloat::cos_sin(&theta);
            re = re.add(&cf.mul(&cs));
            im = im.add(&cf.mul(&sn));
        }
        BigComplex { re, im }
    }

    pub fn to_complex64(&self) -> num_complex::Complex64 {
        let m = self.order as f64;
        let mut z = num_complex::Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let th = 2.0 * std::f64::consts::PI * i as f64 / m;
                z += num_complex::Complex64::from_polar(super::rat_to_f64(c), th);
            }
        }
        z
    }

    /// Text form `ord=m;[c0,c1,...]`.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("ord={};[{}]", self.order, parts.join(","))
    }

    /// Parses either the cyclotomic text form or a bare rational.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let Some(rest) = t.strip_prefix("ord=") else {
            return Ok(Self::from_rat(parse_rat(t)?));
        };
        let (ord, list) = rest.split_once(';').ok_or_else(|| Error::Parse(format!("missing `;` in `{s}`")))?;
        let order: u32 = ord.trim().parse().map_err(|_| Error::Parse(format!("bad order in `{s}`")))?;
        let inner = list
            .trim()
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("missing brackets in `{s}`")))?;
        let coeffs = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(parse_rat).collect::<Result<Vec<_>>>()?
        };
        Self::new(order, coeffs)
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNum {}

impl serde::Serialize for CycloNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl From<Rat> for CycloNum {
    fn from(r: Rat) -> Self {
        Self::from_rat(r)
    }
}

impl From<i64> for CycloNum {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

/// Rationals print as `p/q`, everything else in the cyclotomic text form.
impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.is_rational() {
            write!(f, "{r}")
        } else {
            f.write_str(&self.to_text())
        }
    }
}

impl std::ops::Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        CycloNum::add(self, rhs)
    }
}

impl std::ops::Sub for &CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &CycloNum) -> CycloNum {
        CycloNum::sub(self, rhs)
    }
}

impl std::ops::Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        CycloNum::mul(self, rhs)
    }
}

impl std::ops::Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len() as u64 - 1, euler_phi(105));
        assert!(p105.contains(&-2));
    }

    #[test]
    fn spec_examples() {
        let i = CycloNum::zeta(4);
        assert_eq!(i.mul(&i), CycloNum::from_int(-1));
        let w = CycloNum::zeta(3);
        assert_eq!(w.add(&w.mul(&w)), CycloNum::from_int(-1));
        assert_eq!(w.add(&w.mul(&w)).is_rational(), Some(int(-1)));
        let z5 = CycloNum::zeta(5);
        let half = CycloNum::from_rat(rat(1, 2));
        assert_eq!(half.add(&z5).sub(&z5), half);
        assert_eq!(z5.is_rational(), None);
        assert_eq!(CycloNum::from_rat(rat(7, 3)).is_rational(), Some(rat(7, 3)));
    }

    #[test]
    fn mixed_orders_and_folding() {
        // ζ_6 = −ζ_3², and ζ_12^3 = ζ_4
        assert_eq!(CycloNum::zeta(6), CycloNum::zeta_pow(3, 2).neg());
        assert_eq!(CycloNum::zeta(6).order(), 3);
        assert_eq!(CycloNum::zeta_pow(12, 3), CycloNum::zeta(4));
        let s = CycloNum::zeta(4).add(&CycloNum::zeta(3));
        assert_eq!(s.order(), 12);
        assert_eq!(CycloNum::zeta_pow(2, 1), CycloNum::from_int(-1));
        assert_eq!(CycloNum::zeta_pow(10, 5), CycloNum::from_int(-1));
    }

    #[test]
    fn inverse_and_division() {
        let a = CycloNum::from_int(2).add(&CycloNum::zeta(7));
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv), CycloNum::one());
        assert_eq!(CycloNum::zero().inv(), Err(Error::ZeroDivisor));
        assert_eq!(CycloNum::zeta(9).pow(9), CycloNum::one());
    }

    #[test]
    fn conjugation() {
        let z = CycloNum::zeta(5);
        assert_eq!(z.mul(&z.conj()), CycloNum::one());
        let r = z.add(&z.conj());
        assert!(r.is_rational().is_none());
        // 2cos(2π/5) satisfies x² + x − 1 = 0
        assert!(r.mul(&r).add(&r).sub(&CycloNum::one()).is_zero());
    }

    #[test]
    fn text_round_trip() {
        let a = CycloNum::zeta(5).scale(&rat(-3, 7)).add(&CycloNum::from_rat(rat(1, 2)));
        let t = a.to_text();
        let b = CycloNum::parse(&t).unwrap();
        assert_eq!(b.to_text(), t);
        assert_eq!(CycloNum::parse("-2/5").unwrap(), CycloNum::from_rat(rat(-2, 5)));
        assert!(CycloNum::parse("ord=5;[1,2]").is_err());
    }

    #[test]
    fn embedding() {
        let z = CycloNum::zeta(4).embed(128);
        let err_re = z.re.to_f64().abs();
        let err_im = (z.im.to_f64() - 1.0).abs();
        assert!(err_re < 1e-30 && err_im < 1e-30);
        // sharper check against the exact fixed-point value of 1
        let one = BigFloat::from_rat(&int(1), z.im.bits());
        assert!(z.im.sub(&one).abs().log2_upper() < -124);
        let w = CycloNum::zeta(3).to_complex64();
        assert!((w.re + 0.5).abs() < 1e-15 && (w.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let q = CycloNum::from_rat(rat(-1, 12)).embed(64);
        assert!((q.re.to_f64() + 1.0 / 12.0).abs() < 1e-18);
    }
}
