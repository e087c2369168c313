//! Special values L(1−n, χ) from Bernoulli polynomials and the class number formula.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::characters::{is_prime, legendre_symbol, PeriodicFn};
use crate::error::{Error, Result};
use crate::exactnum::{int, rat, CycloNum, Rat};

pub const MAX_BERNOULLI_DEGREE: usize = 64;

/// B_n(x) with coefficients of x^0, …, x^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernPoly {
    coeffs: Vec<Rat>,
}

impl BernPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Vec<Rat> {
        self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect()
    }
}

/// B_n from B_0 = 1, B_n' = n·B_{n−1} and ∫_0^1 B_n = 0.
pub fn bernoulli_poly(n: usize) -> Result<BernPoly> {
    if n > MAX_BERNOULLI_DEGREE {
        return Err(Error::InvalidArgument(format!("Bernoulli degree {n} exceeds {MAX_BERNOULLI_DEGREE}")));
    }
    let mut b = vec![Rat::one()];
    for m in 1..=n {
        // antiderivative of m·B_{m−1}
        let mut next = vec![Rat::zero(); m + 1];
        for (i, c) in b.iter().enumerate() {
            next[i + 1] = c * int(m as i64) / int(i as i64 + 1);
        }
        let integral: Rat = next.iter().enumerate().map(|(i, c)| c / int(i as i64 + 1)).sum();
        next[0] = -integral;
        b = next;
    }
    Ok(BernPoly { coeffs: b })
}

fn in_asserted_class(chi: &PeriodicFn) -> bool {
    chi.is_mean_zero() || chi.is_nonmultiple_indicator() || chi.is_dirichlet_character()
}

/// Whether L(1−n, χ) from the Bernoulli formula is backed by the classical theorem
/// (Dirichlet characters) or only for n ≤ 2 (mean-zero functions).
pub fn l_special_warranted(n: usize, chi: &PeriodicFn) -> bool {
    n <= 2 || chi.is_dirichlet_character() || chi.is_nonmultiple_indicator()
}

/// L(1−n, χ) = −Σ_a χ(a) N^{n−1} B_n(a/N)/n.
///
/// Accepted for mean-zero functions, Dirichlet characters and the indicator of
/// non-multiples of N (the identity of a twist group).
pub fn l_special(n: usize, chi: &PeriodicFn) -> Result<CycloNum> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !in_asserted_class(chi) {
        return Err(Error::InvalidArgument(
            "function is neither mean-zero, a Dirichlet character nor a non-multiple indicator".into(),
        ));
    }
    let b = bernoulli_poly(n)?;
    let nn = chi.period() as i64;
    let scale = Rat::from_integer(num_traits::pow(BigInt::from(nn), n - 1)) / int(n as i64);
    let mut acc = CycloNum::zero();
    for a in 1..=nn {
        let v = chi.eval(a);
        if v.is_zero() {
            continue;
        }
        let w = b.eval(&rat(a, nn)) * &scale;
        acc = acc.sub(&v.scale(&w));
    }
    Ok(acc)
}

/// L(0, χ) = Σ −(k/N)χ(k) + ½Σχ(k).
pub fn l_zero(chi: &PeriodicFn) -> Result<CycloNum> {
    if !in_asserted_class(chi) {
        return Err(Error::InvalidArgument("function outside the asserted class".into()));
    }
    let n = chi.period() as i64;
    let mut acc = CycloNum::zero();
    for k in 1..=n {
        let v = chi.eval(k);
        acc = acc.add(&v.scale(&(rat(-k, n) + rat(1, 2))));
    }
    Ok(acc)
}

/// L(−1, χ) = Σ −(k²/2N)χ(k) + ½Σ kχ(k) − (N/12)Σχ(k).
pub fn l_minus_one(chi: &PeriodicFn) -> Result<CycloNum> {
    if !in_asserted_class(chi) {
        return Err(Error::InvalidArgument("function outside the asserted class".into()));
    }
    Ok(l_minus_one_formula(chi))
}

/// The finite sum behind [`l_minus_one`], for any periodic function.
///
/// Linear in χ; used where an identity is checked on a basis of functions that need
/// not lie in the class where the sum is an L-value.
pub fn l_minus_one_formula(chi: &PeriodicFn) -> CycloNum {
    let n = chi.period() as i64;
    let mut acc = CycloNum::zero();
    for k in 1..=n {
        let v = chi.eval(k);
        if v.is_zero() {
            continue;
        }
        let w = rat(-k * k, 2 * n) + rat(k, 2) - rat(n, 12);
        acc = acc.add(&v.scale(&w));
    }
    acc
}

/// h(Q(√−q)) = −(1/q) Σ_{k<q} k·(k/q) for primes q ≡ 3 (mod 4), q > 3.
pub fn class_number_imag_quadratic(q: u64) -> Result<u64> {
    if q <= 3 || q % 4 != 3 || !is_prime(q) {
        return Err(Error::OutOfScopeModulus(q as i64));
    }
    let s: i64 = (1..q as i64).map(|k| k * legendre_symbol(k, q)).sum();
    let h = Rat::new(BigInt::from(-s), BigInt::from(q));
    if !h.is_integer() || !h.is_positive() {
        return Err(Error::Inconsistent(format!("class number formula gave {h}")));
    }
    Ok(h.to_integer().to_u64().expect("class number fits"))
}
