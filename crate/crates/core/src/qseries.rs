//! Truncated Puiseux series in q and the theta/eta/character identities built on them.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exactnum::{int, rat, BigFloat, CycloNum, Rat};
use crate::fock::{minimal_central_charge, minimal_weight};
use crate::{Error, Result};

fn rat_num_at(r: &Rat, denom: i64) -> i64 {
    let scaled = r * Rat::from_integer(denom.into());
    assert!(scaled.is_integer(), "exponent {r} not on lattice 1/{denom}");
    scaled.to_integer().to_i64().expect("exponent overflow")
}

/// Series Σ c_e q^{e/denom}, exact for every exponent ≤ order.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries {
    denom: i64,
    terms: BTreeMap<i64, Rat>,
    order: i64,
}

impl PuiseuxSeries {
    pub fn zero(order: &Rat) -> Self {
        let denom = order.denom().to_i64().expect("denominator overflow");
        PuiseuxSeries { denom, terms: BTreeMap::new(), order: rat_num_at(order, denom) }
    }

    pub fn one(order: &Rat) -> Self {
        Self::monomial(&Rat::zero(), Rat::one(), order)
    }

    pub fn monomial(exp: &Rat, coeff: Rat, order: &Rat) -> Self {
        let denom = exp.denom().lcm(order.denom()).to_i64().expect("denominator overflow");
        let mut s = PuiseuxSeries { denom, terms: BTreeMap::new(), order: rat_num_at(order, denom) };
        let e = rat_num_at(exp, denom);
        if e <= s.order && !coeff.is_zero() {
            s.terms.insert(e, coeff);
        }
        s
    }

    /// Σ coeffs[n] q^n for integer exponents 0..=order.
    pub fn from_integers(coeffs: &[i128], order: i64) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .take((order + 1).max(0) as usize)
            .filter(|(_, c)| **c != 0)
            .map(|(n, c)| (n as i64, Rat::from_integer((*c).into())))
            .collect();
        PuiseuxSeries { denom: 1, terms, order }
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn order(&self) -> Rat {
        rat(self.order, self.denom)
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<Rat> {
        self.terms.keys().next().map(|e| rat(*e, self.denom))
    }

    pub fn coeff(&self, exp: &Rat) -> Rat {
        let scaled = exp * Rat::from_integer(self.denom.into());
        if !scaled.is_integer() {
            return Rat::zero();
        }
        let e = scaled.to_integer().to_i64().unwrap_or(i64::MAX);
        self.terms.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> Vec<(Rat, Rat)> {
        self.terms.iter().map(|(e, c)| (rat(*e, self.denom), c.clone())).collect()
    }

    /// Integer-exponent coefficients 0..=order; None if any exponent is fractional or negative.
    pub fn integer_coeffs(&self) -> Option<Vec<Rat>> {
        let top = Integer::div_floor(&self.order, &self.denom);
        let mut out = vec![Rat::zero(); (top + 1).max(0) as usize];
        for (e, c) in &self.terms {
            if *e < 0 || e % self.denom != 0 {
                return None;
            }
            out[(e / self.denom) as usize] = c.clone();
        }
        Some(out)
    }

    fn rescaled(&self, denom: i64) -> Self {
        let f = denom / self.denom;
        PuiseuxSeries {
            denom,
            terms: self.terms.iter().map(|(e, c)| (e * f, c.clone())).collect(),
            order: self.order * f,
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let d = self.denom.lcm(&other.denom);
        (self.rescaled(d), other.rescaled(d))
    }

    fn normalized(mut self) -> Self {
        let order = self.order;
        self.terms.retain(|e, c| *e <= order && !c.is_zero());
        let mut g = self.denom.gcd(&self.order);
        for e in self.terms.keys() {
            g = g.gcd(e);
        }
        if g > 1 {
            self.denom /= g;
            self.order /= g;
            self.terms = std::mem::take(&mut self.terms).into_iter().map(|(e, c)| (e / g, c)).collect();
        }
        self
    }

    pub fn truncate(&self, order: &Rat) -> Self {
        let o = order.min(&self.order()).clone();
        let d = self.denom.lcm(&o.denom().to_i64().expect("denominator overflow"));
        let mut s = self.rescaled(d);
        s.order = rat_num_at(&o, d);
        s.normalized()
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        a.order = a.order.min(b.order);
        for (e, c) in b.terms {
            *a.terms.entry(e).or_insert_with(Rat::zero) += c;
        }
        a.normalized()
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = -c.clone();
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = &*c * r;
        }
        s.normalized()
    }

    /// Multiply by q^exp.
    pub fn shift(&self, exp: &Rat) -> Self {
        let d = self.denom.lcm(&exp.denom().to_i64().expect("denominator overflow"));
        let s = self.rescaled(d);
        let k = rat_num_at(exp, d);
        PuiseuxSeries { denom: d, terms: s.terms.into_iter().map(|(e, c)| (e + k, c)).collect(), order: s.order + k }
            .normalized()
    }

    /// q → q^r for positive rational r.
    pub fn substitute(&self, r: &Rat) -> Self {
        assert!(r.is_positive(), "substitution exponent must be positive");
        let p = r.numer().to_i64().expect("overflow");
        let q = r.denom().to_i64().expect("overflow");
        PuiseuxSeries {
            denom: self.denom * q,
            terms: self.terms.iter().map(|(e, c)| (e * p, c.clone())).collect(),
            order: self.order * p,
        }
        .normalized()
    }

    fn val_num(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.order)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let order = (a.order + b.val_num()).min(b.order + a.val_num());
        let mut terms: BTreeMap<i64, Rat> = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e = ea + eb;
                if e > order {
                    break;
                }
                *terms.entry(e).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        PuiseuxSeries { denom: a.denom, terms, order }.normalized()
    }

    pub fn inverse(&self) -> Result<Self> {
        let (&v, lead) = self.terms.iter().next().ok_or(Error::ZeroDivisor)?;
        let lead_inv = lead.recip();
        let h: Vec<(i64, Rat)> = self.terms.iter().skip(1).map(|(e, c)| (e - v, c * &lead_inv)).collect();
        let top = self.order - v;
        let mut inv = vec![Rat::zero(); (top + 1) as usize];
        inv[0] = Rat::one();
        for n in 1..=top {
            let mut acc = Rat::zero();
            for (e, c) in &h {
                if *e > n {
                    break;
                }
                let prev = &inv[(n - e) as usize];
                if !prev.is_zero() {
                    acc -= c * prev;
                }
            }
            inv[n as usize] = acc;
        }
        let terms = inv
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n as i64 - v, c * &lead_inv))
            .collect();
        Ok(PuiseuxSeries { denom: self.denom, terms, order: top - v }.normalized())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// First exponent ≤ the common order where the two series differ.
    pub fn first_difference(&self, other: &Self) -> Option<Rat> {
        self.sub(other).valuation()
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = a.is_one();
            if e.is_zero() {
                write!(f, "{a}")?;
            } else {
                if !unit {
                    write!(f, "{a}*")?;
                }
                if e.is_one() {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^({e})")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^({}))", self.order())
    }
}

/// Truncated series in x with Laurent polynomial coefficients in z; exact for x-degree ≤ order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    order: i64,
    terms: BTreeMap<(i64, i64), i128>,
}

impl BiSeries {
    pub fn one(order: i64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), 1);
        BiSeries { order, terms }
    }

    /// 1 + c·x^a z^b.
    pub fn binomial(c: i128, a: i64, b: i64, order: i64) -> Self {
        let mut s = Self::one(order);
        if a <= order {
            *s.terms.entry((a, b)).or_insert(0) += c;
        }
        s
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Coefficient of x^a z^b.
    pub fn coeff(&self, a: i64, b: i64) -> i128 {
        self.terms.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut terms: BTreeMap<(i64, i64), i128> = BTreeMap::new();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                if a1 + a2 > order {
                    break;
                }
                *terms.entry((a1 + a2, b1 + b2)).or_insert(0) += c1.checked_mul(*c2).expect("coefficient overflow");
            }
        }
        terms.retain(|_, c| *c != 0);
        BiSeries { order, terms }
    }

    /// x-series coefficient list of z^b.
    pub fn z_coefficient(&self, b: i64) -> Vec<i128> {
        let mut out = vec![0; (self.order + 1).max(0) as usize];
        for ((a, bb), c) in &self.terms {
            if *bb == b {
                out[*a as usize] = *c;
            }
        }
        out
    }
}

/// Positive integer exponent sets for products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExponentSet {
    All,
    Residues { modulus: u32, residues: Vec<u32> },
    Excluding { modulus: u32, residues: Vec<u32> },
    Explicit(Vec<u64>),
}

impl ExponentSet {
    pub fn contains(&self, e: u64) -> bool {
        match self {
            ExponentSet::All => e >= 1,
            ExponentSet::Residues { modulus, residues } => {
                e >= 1 && residues.iter().any(|r| (e % *modulus as u64) == (*r % *modulus) as u64)
            }
            ExponentSet::Excluding { modulus, residues } => {
                e >= 1 && !residues.iter().any(|r| (e % *modulus as u64) == (*r % *modulus) as u64)
            }
            ExponentSet::Explicit(v) => v.contains(&e),
        }
    }
}

fn dense_product(set: &ExponentSet, sign: i32, order: i64) -> Vec<i128> {
    let n = (order.max(0) + 1) as usize;
    let mut c = vec![0i128; n];
    c[0] = 1;
    for e in 1..n {
        if !set.contains(e as u64) {
            continue;
        }
        if sign > 0 {
            for t in (e..n).rev() {
                c[t] = c[t].checked_sub(c[t - e]).expect("coefficient overflow");
            }
        } else {
            for t in e..n {
                c[t] = c[t].checked_add(c[t - e]).expect("coefficient overflow");
            }
        }
    }
    c
}

/// Π_{e ∈ set} (1 − q^e)^{sign}, truncated at integer order.
pub fn product_expand(set: &ExponentSet, sign: i32, order: i64) -> PuiseuxSeries {
    assert!(sign == 1 || sign == -1, "sign must be ±1");
    PuiseuxSeries::from_integers(&dense_product(set, sign, order), order)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub passed: bool,
    pub order: String,
    pub first_difference: Option<String>,
    pub detail: String,
}

fn check_pair(identity: &str, lhs: &PuiseuxSeries, rhs: &PuiseuxSeries, detail: String) -> IdentityCheck {
    let diff = lhs.first_difference(rhs);
    let order = lhs.order().min(rhs.order());
    IdentityCheck {
        identity: identity.to_string(),
        passed: diff.is_none(),
        order: order.to_string(),
        first_difference: diff.map(|d| d.to_string()),
        detail,
    }
}

/// Π(1 − x^n) against Σ(−1)^n x^{n(3n+1)/2}.
pub fn euler_check(order: i64) -> IdentityCheck {
    let lhs = product_expand(&ExponentSet::All, 1, order);
    let mut rhs = vec![0i128; (order + 1) as usize];
    let mut n: i64 = 0;
    loop {
        let mut any = false;
        for m in [n, -n] {
            let e = m * (3 * m + 1) / 2;
            if e <= order && (m == n || n != 0) {
                rhs[e as usize] += if m.rem_euclid(2) == 0 { 1 } else { -1 };
                any = true;
            }
        }
        if !any && n > 0 {
            break;
        }
        n += 1;
    }
    // n = 0 was counted for both m and −m
    rhs[0] -= 1;
    let rhs = PuiseuxSeries::from_integers(&rhs, order);
    check_pair("euler", &lhs, &rhs, "pentagonal exponents".into())
}

/// Π(1 − x^{2n})(1 + x^{2n−1}z)(1 + x^{2n−1}/z) against Σ x^{n²} z^n on |z-degree| ≤ z_range.
pub fn jacobi_check(order: i64, z_range: i64) -> (IdentityCheck, BiSeries) {
    let mut lhs = BiSeries::one(order);
    let mut n = 1;
    while 2 * n - 1 <= order {
        lhs = lhs.mul(&BiSeries::binomial(-1, 2 * n, 0, order));
        lhs = lhs.mul(&BiSeries::binomial(1, 2 * n - 1, 1, order));
        lhs = lhs.mul(&BiSeries::binomial(1, 2 * n - 1, -1, order));
        n += 1;
    }
    let mut first = None;
    'outer: for b in -z_range..=z_range {
        let got = lhs.z_coefficient(b);
        for (a, c) in got.iter().enumerate() {
            let want = if (a as i64) == b * b { 1 } else { 0 };
            if *c != want {
                first = Some(format!("x^{a} z^{b}"));
                break 'outer;
            }
        }
    }
    let check = IdentityCheck {
        identity: "jacobi".into(),
        passed: first.is_none(),
        order: order.to_string(),
        first_difference: first,
        detail: format!("|z-degree| <= {z_range}"),
    };
    (check, lhs)
}

fn check_kj(k: i64, j: i64) -> Result<i64> {
    if k < 1 || j < 1 || j > k {
        return Err(Error::InvalidArgument(format!("need 1 <= j <= k, got k={k}, j={j}")));
    }
    Ok(2 * k + 1)
}

/// Triple product at x → x^{N/2}, z → −x^{(N−2j)/2}, N = 2k+1: both sides as x-series.
pub fn specialize_triple_product(k: i64, j: i64, order: i64) -> Result<(PuiseuxSeries, PuiseuxSeries, IdentityCheck)> {
    let nn = check_kj(k, j)?;
    let set = ExponentSet::Residues { modulus: nn as u32, residues: vec![0, j as u32, (nn - j) as u32] };
    let lhs = product_expand(&set, 1, order);
    let mut rhs = vec![0i128; (order + 1) as usize];
    let bound = (order as f64).sqrt() as i64 + 2;
    for n in -bound..=bound {
        let e = n * (nn * n + nn - 2 * j) / 2;
        if (0..=order).contains(&e) {
            rhs[e as usize] += if n.rem_euclid(2) == 0 { 1 } else { -1 };
        }
    }
    let rhs = PuiseuxSeries::from_integers(&rhs, order);
    let check = check_pair("triple-product-specialization", &lhs, &rhs, format!("k={k}, j={j}"));
    Ok((lhs, rhs, check))
}

/// Σ_n (−1)^n q^{(M/2)(n+ε/2)²} and the phase e^{πiε/2} factored out of the theta constant.
pub fn reduced_theta(eps: &Rat, m: i64, order: &Rat) -> Result<(PuiseuxSeries, CycloNum)> {
    if !eps.is_positive() || *eps >= int(2) || m < 1 {
        return Err(Error::InvalidArgument(format!("need 0 < eps < 2 and M >= 1, got eps={eps}, M={m}")));
    }
    let half_m = rat(m, 2);
    let mut s = PuiseuxSeries::zero(order);
    let mut n: i64 = 0;
    loop {
        let mut any = false;
        for t in if n == 0 { vec![0] } else { vec![n, -n] } {
            let x = int(t) + eps / int(2);
            let e = &half_m * &x * &x;
            if e <= *order {
                let sgn = if t.rem_euclid(2) == 0 { 1 } else { -1 };
                s = s.add(&PuiseuxSeries::monomial(&e, int(sgn), order));
                any = true;
            }
        }
        if !any && n > 0 {
            break;
        }
        n += 1;
    }
    let den = eps.denom().to_u32().expect("overflow");
    let num = eps.numer().to_i64().expect("overflow");
    Ok((s, CycloNum::zeta_pow(4 * den, num)))
}

/// η = x^{1/24}Π(1−x^n) against the ε = 1/3, M = 3 theta constant with phase e^{−πi/6}.
pub fn verify_eta_relation(order: i64) -> Result<IdentityCheck> {
    let o = int(order);
    let (theta, phase) = reduced_theta(&rat(1, 3), 3, &o)?;
    let eta = product_expand(&ExponentSet::All, 1, order).shift(&rat(1, 24)).truncate(&o);
    let outer = CycloNum::zeta_pow(12, -1);
    let phase_ok = outer.mul(&phase) == CycloNum::one();
    let mut c = check_pair("eta-theta", &theta.truncate(&o), &eta, format!("phase cancels: {phase_ok}"));
    c.passed &= phase_ok;
    Ok(c)
}

/// q^{h − c/24} Π_{n ≢ 0, ±i (mod 2k+1)} 1/(1 − q^n).
pub fn minimal_char(k: i64, i: i64, order: i64) -> Result<PuiseuxSeries> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need k >= 2, got {k}")));
    }
    let nn = check_kj(k, i)?;
    let set = ExponentSet::Excluding { modulus: nn as u32, residues: vec![0, i as u32, (nn - i) as u32] };
    let e = minimal_exponent(k, i);
    Ok(product_expand(&set, -1, order).shift(&e))
}

/// h − c/24 for the (2, 2k+1) model at index i.
pub fn minimal_exponent(k: i64, i: i64) -> Rat {
    minimal_weight(k, i) - minimal_central_charge(k) / int(24)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaQuotientReport {
    pub k: i64,
    pub j: i64,
    #[serde(serialize_with = "crate::exactnum::ser_display")]
    pub prefactor_exponent: Rat,
    pub phase_product: CycloNum,
    pub phases_cancel: bool,
    pub check: IdentityCheck,
}

/// Π_{s ≢ ±j, 0} 1/(1 − x^{Nn−s}) against x^{1/24 − (2(k−j)+1)²/(8N)} θ_ε(Nτ)/θ_{1/3}(3τ) with phases.
pub fn verify_theta_quotient(k: i64, j: i64, order: i64) -> Result<ThetaQuotientReport> {
    let nn = check_kj(k, j)?;
    let t = 2 * (k - j) + 1;
    let eps = rat(t, nn);
    let prefactor = rat(1, 24) - rat(t * t, 8 * nn);
    // series side is evaluated one unit beyond order so the quotient is exact through order
    let work = int(order + 2);
    let (num, ph_num) = reduced_theta(&eps, nn, &work)?;
    let (den, ph_den) = reduced_theta(&rat(1, 3), 3, &work)?;
    let outer = CycloNum::zeta_pow(12, 1).mul(&CycloNum::zeta_pow(4 * nn as u32, -t));
    let phase_product = outer.mul(&ph_num).div(&ph_den)?;
    let phases_cancel = phase_product == CycloNum::one();
    let rhs = num.div(&den)?.shift(&prefactor).truncate(&int(order));
    let set = ExponentSet::Excluding { modulus: nn as u32, residues: vec![0, j as u32, (nn - j) as u32] };
    let lhs = product_expand(&set, -1, order);
    let mut check = check_pair("theta-quotient", &lhs, &rhs, format!("k={k}, j={j}"));
    check.passed &= phases_cancel;
    Ok(ThetaQuotientReport { k, j, prefactor_exponent: prefactor, phase_product, phases_cancel, check })
}

#[derive(Clone, Debug, Serialize)]
pub struct ModularReport {
    pub k: i64,
    pub order: i64,
    pub precision_bits: u32,
    pub samples: Vec<String>,
    pub s_matrix: Vec<Vec<f64>>,
    pub max_residual: f64,
    pub fixed_point_residual: f64,
    pub condition_estimate: f64,
}

struct CharEval {
    exps: Vec<BigFloat>,
    coeffs: Vec<Vec<i128>>,
}

impl CharEval {
    fn new(k: i64, order: i64, bits: u32) -> Self {
        let nn = 2 * k + 1;
        let mut exps = Vec::new();
        let mut coeffs = Vec::new();
        for i in 1..=k {
            exps.push(BigFloat::from_rat(&minimal_exponent(k, i), bits));
            let set = ExponentSet::Excluding { modulus: nn as u32, residues: vec![0, i as u32, (nn - i) as u32] };
            coeffs.push(dense_product(&set, -1, order));
        }
        CharEval { exps, coeffs }
    }

    /// Characters at τ = i·t: q = e^{−2πt}.
    fn at(&self, t: &BigFloat) -> Vec<BigFloat> {
        let bits = t.bits();
        let two_pi_t = BigFloat::two_pi(bits).mul(t);
        let q = two_pi_t.neg().exp();
        self.exps
            .iter()
            .zip(&self.coeffs)
            .map(|(e, cs)| {
                let mut acc = BigFloat::zero(bits);
                for c in cs.iter().rev() {
                    acc = acc.mul(&q).add(&BigFloat::from_rat(&Rat::from_integer((*c).into()), bits));
                }
                two_pi_t.mul(e).neg().exp().mul(&acc)
            })
            .collect()
    }
}

/// Solves A X = B by partial pivoting; returns X and max|pivot|/min|pivot|.
fn solve(mut a: Vec<Vec<BigFloat>>, mut b: Vec<Vec<BigFloat>>) -> (Vec<Vec<BigFloat>>, f64) {
    let n = a.len();
    let (mut pmax, mut pmin) = (0f64, f64::INFINITY);
    for col in 0..n {
        let p = (col..n)
            .max_by(|x, y| a[*x][col].abs().to_f64().partial_cmp(&a[*y][col].abs().to_f64()).unwrap())
            .unwrap();
        a.swap(col, p);
        b.swap(col, p);
        let piv = a[col][col].clone();
        let mag = piv.abs().to_f64();
        pmax = pmax.max(mag);
        pmin = pmin.min(mag);
        if piv.is_zero() {
            return (b, f64::INFINITY);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col].div(&piv);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let v = a[r][c].sub(&f.mul(&a[col][c]));
                a[r][c] = v;
            }
            for c in 0..b[r].len() {
                let v = b[r][c].sub(&f.mul(&b[col][c]));
                b[r][c] = v;
            }
        }
    }
    for (r, row) in b.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v = v.div(&a[r][r]);
        }
    }
    (b, pmax / pmin)
}

/// Fits χ(−1/τ) = S χ(τ) on k samples of the imaginary axis and reports residuals on the rest.
pub fn modular_s_check(k: i64, samples: usize, order: i64, precision_bits: u32) -> Result<ModularReport> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need k >= 2, got {k}")));
    }
    let ku = k as usize;
    if samples < ku + 1 {
        return Err(Error::InvalidArgument(format!("need at least {} samples", ku + 1)));
    }
    // worst q on [0.7, 1.5] and its image is e^{−2π/1.5}
    let tail_log2 = -(2.0 * std::f64::consts::PI / 1.5) * (order as f64) / std::f64::consts::LN_2;
    if tail_log2 > -(precision_bits as f64) / 2.0 {
        return Err(Error::CutoffTooSmall(format!(
            "order {order} leaves tail 2^{tail_log2:.0}, need below 2^-{}",
            precision_bits / 2
        )));
    }
    let bits = precision_bits;
    let ev = CharEval::new(k, order, bits);
    let ts: Vec<Rat> = (0..samples)
        .map(|s| rat(7, 10) + rat(8 * s as i64, 10 * (samples as i64 - 1)))
        .collect();
    let mut at = Vec::new();
    let mut at_s = Vec::new();
    for t in &ts {
        at.push(ev.at(&BigFloat::from_rat(t, bits)));
        at_s.push(ev.at(&BigFloat::from_rat(&t.recip(), bits)));
    }
    // rows: samples; A_k Sᵀ = B_k
    let (st, cond) = solve(at[..ku].to_vec(), at_s[..ku].to_vec());
    if !cond.is_finite() || cond > 2f64.powi((precision_bits / 2).min(1000) as i32) {
        return Err(Error::IllConditioned(cond));
    }
    let apply = |row: &[BigFloat]| -> Vec<BigFloat> {
        (0..ku)
            .map(|c| {
                let mut acc = BigFloat::zero(bits);
                for r in 0..ku {
                    acc = acc.add(&row[r].mul(&st[r][c]));
                }
                acc
            })
            .collect()
    };
    let mut max_residual = 0f64;
    for s in ku..samples {
        let pred = apply(&at[s]);
        for c in 0..ku {
            max_residual = max_residual.max(pred[c].sub(&at_s[s][c]).abs().to_f64());
        }
    }
    let at_i = ev.at(&BigFloat::one(bits));
    let img = apply(&at_i);
    let fixed_point_residual =
        img.iter().zip(&at_i).map(|(a, b)| a.sub(b).abs().to_f64()).fold(0f64, f64::max);
    let s_matrix = (0..ku).map(|r| (0..ku).map(|c| st[c][r].to_f64()).collect()).collect();
    Ok(ModularReport {
        k,
        order,
        precision_bits,
        samples: ts.iter().map(|t| format!("{t}i")).collect(),
        s_matrix,
        max_residual,
        fixed_point_residual,
        condition_estimate: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &PuiseuxSeries) -> Vec<i64> {
        s.integer_coeffs().unwrap().iter().map(|c| c.to_integer().to_i64().unwrap()).collect()
    }

    #[test]
    fn euler_product_prefix() {
        let s = product_expand(&ExponentSet::All, 1, 12);
        assert_eq!(ints(&s), vec![1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn restricted_partitions() {
        let set = ExponentSet::Residues { modulus: 5, residues: vec![2, 3] };
        assert_eq!(ints(&product_expand(&set, -1, 8)), vec![1, 0, 1, 1, 1, 1, 2, 2, 3]);
        assert_eq!(ints(&product_expand(&ExponentSet::Explicit(vec![]), 1, 5)), vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = product_expand(&ExponentSet::All, 1, 20).shift(&rat(1, 24));
        let b = a.inverse().unwrap();
        assert_eq!(b.valuation(), Some(rat(-1, 24)));
        let p = a.mul(&b);
        assert_eq!(p.first_difference(&PuiseuxSeries::one(&p.order())), None);
        let parts = product_expand(&ExponentSet::All, -1, 10);
        assert_eq!(ints(&parts), vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn identities() {
        assert!(euler_check(50).passed);
        assert!(euler_check(1).passed);
        let (c, s) = jacobi_check(30, 5);
        assert!(c.passed);
        assert_eq!(s.coeff(0, 0), 1);
        assert_eq!(s.z_coefficient(1).iter().position(|c| *c != 0), Some(1));
        for (k, j) in [(2, 1), (2, 2), (1, 1)] {
            assert!(specialize_triple_product(k, j, 30).unwrap().2.passed);
        }
        assert!(verify_eta_relation(30).unwrap().passed);
    }

    #[test]
    fn theta_values() {
        let (s, _) = reduced_theta(&rat(3, 5), 5, &int(5)).unwrap();
        assert_eq!(s.valuation(), Some(rat(9, 40)));
        let (z, _) = reduced_theta(&rat(3, 5), 5, &rat(1, 10)).unwrap();
        assert_eq!(z.valuation(), None);
    }

    #[test]
    fn quotient_and_chars() {
        for (k, j) in [(2, 1), (2, 2)] {
            let r = verify_theta_quotient(k, j, 30).unwrap();
            assert!(r.phases_cancel && r.check.passed, "{:?}", r.check);
            assert_eq!(r.prefactor_exponent, -minimal_exponent(k, j));
        }
        assert_eq!(minimal_char(2, 1, 5).unwrap().valuation(), Some(rat(11, 60)));
        assert_eq!(minimal_char(2, 2, 5).unwrap().valuation(), Some(rat(-1, 60)));
        assert_eq!(minimal_central_charge(2), rat(-22, 5));
    }

    #[test]
    fn full_orders() {
        for k in 1..=3 {
            for j in 1..=k {
                assert!(verify_theta_quotient(k, j, 50).unwrap().check.passed);
            }
        }
        assert!(jacobi_check(60, 6).0.passed && euler_check(200).passed);
        assert!(modular_s_check(2, 3, 400, 256).unwrap().max_residual < 1e-6);
        assert!(modular_s_check(3, 4, 600, 256).unwrap().max_residual < 1e-4);
    }

    #[test]
    fn fock_trace_matches_characters() {
        use crate::characters::even_twist_group;
        use crate::fock::{qtrace, TraceMode};
        for k in [2i64, 3] {
            let g = even_twist_group((2 * k + 1) as u32).unwrap();
            for i in 1..=k as usize {
                let t = qtrace(&g, i, TraceMode::Character, 24).unwrap();
                let j = g.index_residue(i).unwrap() as i64;
                let want = minimal_char(k, j, 24).unwrap();
                assert_eq!(t.to_series().first_difference(&want), None, "k={k} i={i}");
                assert_eq!(t.to_series().order(), want.order());
            }
        }
    }

    #[test]
    fn modular_small() {
        let r = modular_s_check(2, 3, 200, 128).unwrap();
        assert!(r.max_residual < 1e-6, "{r:?}");
        assert!(r.fixed_point_residual < 1e-6);
    }
}
