//! Partial sums, the averaging transform, inflation, and limits of divergent series.

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::characters::PeriodicFn;
use crate::error::{Error, Result};
use crate::exactnum::{int, rat, BigComplex, BigFloat, CycloNum, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Weight {
    Const,
    Linear,
}

impl Weight {
    pub fn power(self) -> u32 {
        match self {
            Weight::Const => 0,
            Weight::Linear => 1,
        }
    }
}

/// A lazily described sequence; indices start at 1.
#[derive(Clone, Debug)]
pub enum SeqSpec {
    /// A finite list followed by zeros.
    Explicit(Vec<CycloNum>),
    /// t_i = χ(i − shift)·(i − shift)^power for i > shift, and 0 before.
    Periodic { chi: PeriodicFn, power: u32, shift: usize },
    PartialSum(Box<SeqSpec>),
    Cesaro(Box<SeqSpec>),
    Inflate(Box<SeqSpec>, usize),
    Combination(Vec<(Rat, SeqSpec)>),
}

pub fn partial_sum(s: SeqSpec) -> SeqSpec {
    SeqSpec::PartialSum(Box::new(s))
}

pub fn cesaro(s: SeqSpec) -> SeqSpec {
    SeqSpec::Cesaro(Box::new(s))
}

pub fn inflate(s: SeqSpec, k: usize) -> Result<SeqSpec> {
    if k == 0 {
        return Err(Error::InvalidArgument("inflation factor must be positive".into()));
    }
    Ok(SeqSpec::Inflate(Box::new(s), k))
}

/// Partial sums of Σ χ(i)·i^p.
pub fn series(chi: &PeriodicFn, weight: Weight) -> SeqSpec {
    partial_sum(SeqSpec::Periodic { chi: chi.clone(), power: weight.power(), shift: 0 })
}

fn pow_i(i: usize, p: u32) -> Rat {
    Rat::from_integer(num_traits::pow(num_bigint::BigInt::from(i), p as usize))
}

impl SeqSpec {
    /// Period of the residue oscillation, used to size convergence windows.
    pub fn period(&self) -> usize {
        match self {
            SeqSpec::Explicit(_) => 1,
            SeqSpec::Periodic { chi, .. } => chi.period() as usize,
            SeqSpec::PartialSum(s) | SeqSpec::Cesaro(s) => s.period(),
            SeqSpec::Inflate(s, k) => s.period() * k,
            SeqSpec::Combination(parts) => parts.iter().fold(1, |acc, (_, s)| acc.lcm(&s.period())),
        }
    }

    pub fn terms_exact(&self, n: usize) -> Vec<CycloNum> {
        match self {
            SeqSpec::Explicit(v) => (0..n).map(|i| v.get(i).cloned().unwrap_or_else(CycloNum::zero)).collect(),
            SeqSpec::Periodic { chi, power, shift } => (1..=n)
                .map(|i| {
                    if i <= *shift {
                        CycloNum::zero()
                    } else {
                        let j = i - shift;
                        chi.eval(j as i64).scale(&pow_i(j, *power))
                    }
                })
                .collect(),
            SeqSpec::PartialSum(s) => {
                let mut acc = CycloNum::zero();
                s.terms_exact(n)
                    .into_iter()
                    .map(|t| {
                        acc = acc.add(&t);
                        acc.clone()
                    })
                    .collect()
            }
            SeqSpec::Cesaro(s) => {
                let mut acc = CycloNum::zero();
                s.terms_exact(n)
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| {
                        acc = acc.add(&t);
                        acc.scale(&rat(1, i as i64 + 1))
                    })
                    .collect()
            }
            SeqSpec::Inflate(s, k) => {
                let inner = s.terms_exact(n.div_ceil(*k));
                (0..n).map(|i| inner[i / k].clone()).collect()
            }
            SeqSpec::Combination(parts) => {
                let mut out = vec![CycloNum::zero(); n];
                for (c, s) in parts {
                    for (o, t) in out.iter_mut().zip(s.terms_exact(n)) {
                        *o = o.add(&t.scale(c));
                    }
                }
                out
            }
        }
    }

    pub fn terms_numeric(&self, n: usize) -> Vec<Complex64> {
        match self {
            SeqSpec::Explicit(v) => {
                (0..n).map(|i| v.get(i).map(|x| x.to_complex64()).unwrap_or_default()).collect()
            }
            SeqSpec::Periodic { chi, power, shift } => {
                let vals: Vec<Complex64> = chi.values().iter().map(|v| v.to_complex64()).collect();
                let p = chi.period() as usize;
                (1..=n)
                    .map(|i| {
                        if i <= *shift {
                            Complex64::zero()
                        } else {
                            let j = i - shift;
                            vals[(j - 1) % p] * (j as f64).powi(*power as i32)
                        }
                    })
                    .collect()
            }
            SeqSpec::PartialSum(s) => {
                let mut acc = Complex64::zero();
                s.terms_numeric(n)
                    .into_iter()
                    .map(|t| {
                        acc += t;
                        acc
                    })
                    .collect()
            }
            SeqSpec::Cesaro(s) => {
                let mut acc = Complex64::zero();
                s.terms_numeric(n)
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| {
                        acc += t;
                        acc / (i as f64 + 1.0)
                    })
                    .collect()
            }
            SeqSpec::Inflate(s, k) => {
                let inner = s.terms_numeric(n.div_ceil(*k));
                (0..n).map(|i| inner[i / k]).collect()
            }
            SeqSpec::Combination(parts) => {
                let mut out = vec![Complex64::zero(); n];
                for (c, s) in parts {
                    let cf = crate::exactnum::rat_to_f64(c);
                    for (o, t) in out.iter_mut().zip(s.terms_numeric(n)) {
                        *o += t * cf;
                    }
                }
                out
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SeqSpec::Explicit(v) => {
                let head: Vec<String> = v.iter().take(6).map(|x| x.to_string()).collect();
                format!("[{}, …]", head.join(", "))
            }
            SeqSpec::Periodic { chi, power, shift } => {
                let w = match power {
                    0 => String::new(),
                    1 => "·i".to_string(),
                    p => format!("·i^{p}"),
                };
                let z = if *shift > 0 { format!("{shift} zeros + ") } else { String::new() };
                format!("{z}χ(i){w}, χ of period {}", chi.period())
            }
            SeqSpec::PartialSum(s) => format!("partial sums of ({})", s.label()),
            SeqSpec::Cesaro(s) => format!("averages of ({})", s.label()),
            SeqSpec::Inflate(s, k) => format!("({}) repeated {k} times", s.label()),
            SeqSpec::Combination(parts) => {
                let p: Vec<String> = parts.iter().map(|(c, s)| format!("{c}·({})", s.label())).collect();
                p.join(" + ")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LimitValue {
    Exact(String),
    Numeric { re: f64, im: f64 },
    Divergent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LimitMode {
    ExactClosedForm,
    Numeric { tol: f64, window: usize, n_terms: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub series: String,
    pub value: LimitValue,
    pub mode: LimitMode,
    pub depth: usize,
    pub residual: Option<f64>,
}

impl LimitReport {
    pub fn numeric_value(&self) -> Option<Complex64> {
        match self.value {
            LimitValue::Numeric { re, im } => Some(Complex64::new(re, im)),
            _ => None,
        }
    }
}

/// Applies the averaging transform `depth` times and inspects the trailing window.
pub fn limit_numeric(s: &SeqSpec, depth: usize, n_terms: usize, tol: f64) -> Result<LimitReport> {
    if depth > 4 {
        return Err(Error::InvalidArgument(format!("depth {depth} exceeds 4")));
    }
    let period = s.period();
    if n_terms < 10 * period {
        return Err(Error::InvalidArgument(format!("need at least {} terms for period {period}", 10 * period)));
    }
    let window = (2 * period).max(64).min(n_terms);
    let mut seq = s.clone();
    for _ in 0..depth {
        seq = cesaro(seq);
    }
    let vals = seq.terms_numeric(n_terms);
    let tail = &vals[n_terms - window..];
    let (mut rmin, mut rmax, mut imin, mut imax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in tail {
        rmin = rmin.min(z.re);
        rmax = rmax.max(z.re);
        imin = imin.min(z.im);
        imax = imax.max(z.im);
    }
    let spread = (rmax - rmin).max(imax - imin);
    if !spread.is_finite() || spread > tol {
        return Err(Error::NoConvergence { depth, spread });
    }
    Ok(LimitReport {
        series: s.label(),
        value: LimitValue::Numeric { re: (rmax + rmin) / 2.0, im: (imax + imin) / 2.0 },
        mode: LimitMode::Numeric { tol, window, n_terms },
        depth,
        residual: Some(spread / 2.0),
    })
}

fn sum_weighted(chi: &PeriodicFn, f: impl Fn(i64) -> Rat) -> CycloNum {
    (1..=chi.period() as i64).fold(CycloNum::zero(), |acc, i| acc.add(&chi.eval(i).scale(&f(i))))
}

/// Limit of the averaged series Σχ(i) (weight const, averaged once) or Σχ(i)·i
/// (weight linear, averaged and then residue-averaged), from the closed forms of the
/// direct computation.
pub fn limit_exact_periodic(chi: &PeriodicFn, weight: Weight) -> Result<CycloNum> {
    if !chi.is_mean_zero() {
        return Err(Error::AxiomInapplicable("Σ χ(k) over a period is not zero".into()));
    }
    let n = chi.period() as i64;
    let s0 = chi.sum();
    let s1 = sum_weighted(chi, int);
    match weight {
        Weight::Const => {
            // ([(a+1)aN/2 + a]Σχ − aΣkχ)/(aN) with Σχ = 0
            debug_assert!(s0.is_zero());
            Ok(s1.scale(&rat(-1, n)))
        }
        Weight::Linear => {
            // (1/N)Σ_b (b+1)Σ_{i≤b}χ(i) + (1/N)Σ_b ((1+b+N)/N)Σ iχ(i)
            //   − (1/N)Σ i²χ(i) − (1/N)Σ_b Σ_{i≤b} iχ(i)
            let s2 = sum_weighted(chi, |i| int(i * i));
            let mut first = CycloNum::zero();
            let mut last = CycloNum::zero();
            let mut run0 = CycloNum::zero();
            let mut run1 = CycloNum::zero();
            let mut coeff_s1 = Rat::zero();
            for b in 1..=n {
                run0 = run0.add(chi.eval(b));
                run1 = run1.add(&chi.eval(b).scale(&int(b)));
                first = first.add(&run0.scale(&int(b + 1)));
                last = last.add(&run1);
                coeff_s1 += rat(1 + b + n, n);
            }
            let inv_n = rat(1, n);
            Ok(first
                .add(&s1.scale(&coeff_s1))
                .sub(&s2)
                .sub(&last)
                .scale(&inv_n))
        }
    }
}

/// Limit of Σ_t [ψ₁(t)·t + ψ₀(t)] for mean-zero ψ₀, ψ₁.
pub fn limit_exact_mixed(linear: &PeriodicFn, constant: &PeriodicFn) -> Result<CycloNum> {
    Ok(limit_exact_periodic(linear, Weight::Linear)?.add(&limit_exact_periodic(constant, Weight::Const)?))
}

/// Writes the inflated series of Σχ(u)·u^p (p ∈ {0,1}) as Σ_t [ψ₁(t)·t + ψ₀(t)].
///
/// Repeating each partial sum k times puts the term χ(u)u^p at t = (u−1)k + 1.
pub fn inflated_form(chi: &PeriodicFn, weight: Weight, k: u32) -> (PeriodicFn, PeriodicFn) {
    let spread = chi.spread(k);
    match weight {
        Weight::Const => (PeriodicFn::zero(spread.period()), spread),
        Weight::Linear => {
            // u = t/k + (k−1)/k
            let lin = spread.scale(&CycloNum::from_rat(rat(1, k as i64)));
            let cst = spread.scale(&CycloNum::from_rat(rat(k as i64 - 1, k as i64)));
            (lin, cst)
        }
    }
}

/// Mean of one period, after checking periodicity on `periods` periods.
fn periodic_sequence_limit(s: &SeqSpec, period: usize, periods: usize) -> Result<CycloNum> {
    let v = s.terms_exact(period * periods);
    for i in period..v.len() {
        if v[i] != v[i - period] {
            return Err(Error::Inconsistent(format!("sequence not periodic at index {}", i + 1)));
        }
    }
    let sum = v[..period].iter().fold(CycloNum::zero(), |a, x| a.add(x));
    Ok(sum.scale(&rat(1, period as i64)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Replay {
    pub table: Vec<(String, String)>,
    pub steps: Vec<String>,
}

fn exact_prefix_equal(a: &SeqSpec, b: &SeqSpec, n: usize) -> bool {
    a.terms_exact(n) == b.terms_exact(n)
}

fn solve_rational(mut rows: Vec<Vec<Rat>>, unknowns: usize) -> Result<Vec<Rat>> {
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x /= &pv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=unknowns {
                    let v = &rows[r][j] * &f;
                    rows[i][j] -= v;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return Err(Error::Inconsistent("replayed linear system has no solution".into()));
    }
    if piv_cols.len() != unknowns {
        return Err(Error::Inconsistent("replayed linear system is underdetermined".into()));
    }
    Ok((0..unknowns).map(|c| rows[c][unknowns].clone()).collect())
}

/// Replays the worked derivations of 0+1+1+…, 0+1−2+3−… and 0+1+2+3+… as checked steps.
pub fn replay_derivations() -> Result<Replay> {
    const CHECK: usize = 240;
    let mut steps = Vec::new();
    let ones = SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[1]), power: 0, shift: 1 };
    let b = partial_sum(ones.clone());
    let b_inf = inflate(b.clone(), 2)?;
    // b − 2·inflate(b, 2) = 0,1,0,1,…
    let diff = SeqSpec::Combination(vec![(int(1), b.clone()), (int(-2), b_inf.clone())]);
    let half = periodic_sequence_limit(&diff, 2, CHECK / 2)?;
    steps.push(format!("lim(b − 2·inflate(b,2)) with b = partial sums of 0+1+1+…: periodic 0,1,…, limit {half}"));
    steps.push("inflation invariance: lim inflate(b,2) = lim b".into());

    let alt_chi = PeriodicFn::from_ints(&[1, -1]);
    let s1_val = limit_exact_periodic(&alt_chi, Weight::Linear)?;
    steps.push(format!("0+1−2+3−4+…: averaged twice, closed form {s1_val}"));

    // t = s2 − s1 termwise, t's partial sums = inflate(partial sums of u, 2), u = 4·s2 termwise
    let s2_terms = SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[1]), power: 1, shift: 1 };
    let s1_terms = SeqSpec::Periodic { chi: alt_chi.clone(), power: 1, shift: 1 };
    let t_terms = SeqSpec::Combination(vec![(int(1), s2_terms.clone()), (int(-1), s1_terms)]);
    let expected_t: Vec<CycloNum> = (1..=CHECK as i64)
        .map(|i| CycloNum::from_int(if i >= 3 && i % 2 == 1 { 2 * (i - 1) } else { 0 }))
        .collect();
    if t_terms.terms_exact(CHECK) != expected_t {
        return Err(Error::Inconsistent("s2 − s1 is not 0+0+4+0+8+…".into()));
    }
    steps.push("s2 − s1 = 0+0+4+0+8+0+… termwise".into());
    let u_terms = SeqSpec::Combination(vec![(int(4), s2_terms.clone())]);
    if !exact_prefix_equal(&partial_sum(t_terms), &inflate(partial_sum(u_terms.clone()), 2)?, CHECK) {
        return Err(Error::Inconsistent("partial sums of s2 − s1 are not an inflation".into()));
    }
    steps.push("inflation invariance: lim 0,0,4,4,12,12,… = lim 0,4,12,…".into());
    if !exact_prefix_equal(&u_terms, &SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[4]), power: 1, shift: 1 }, CHECK)
    {
        return Err(Error::Inconsistent("0+4+8+… is not 4·(0+1+2+…)".into()));
    }
    steps.push("linearity: 0+4+8+… = 4·s2".into());

    // unknowns: s, s', s1, s2, t, u
    let r = |v: &[i64], rhs: Rat| -> Vec<Rat> {
        let mut row: Vec<Rat> = v.iter().map(|&x| int(x)).collect();
        row.push(rhs);
        row
    };
    let half_r = half.is_rational().ok_or_else(|| Error::Inconsistent("non-rational limit".into()))?;
    let s1_r = s1_val.is_rational().ok_or_else(|| Error::Inconsistent("non-rational limit".into()))?;
    let rows = vec![
        r(&[1, -2, 0, 0, 0, 0], half_r),
        r(&[1, -1, 0, 0, 0, 0], Rat::zero()),
        r(&[0, 0, 1, 0, 0, 0], s1_r),
        r(&[0, 0, -1, 1, -1, 0], Rat::zero()),
        r(&[0, 0, 0, 0, 1, -1], Rat::zero()),
        r(&[0, 0, 0, -4, 0, 1], Rat::zero()),
    ];
    let sol = solve_rational(rows, 6)?;
    steps.push(format!("solved: s = {}, s1 = {}, s2 = {}", sol[0], sol[2], sol[3]));
    Ok(Replay {
        table: vec![
            ("0+1+1+1+…".into(), sol[0].to_string()),
            ("0+1−2+3−4+…".into(), sol[2].to_string()),
            ("0+1+2+3+…".into(), sol[3].to_string()),
        ],
        steps,
    })
}

/// (1/l) Σ_{k≤l} (l+1−k)χ(k)k^{−s} at the largest l ≤ n_terms divisible by N.
pub fn averaged_dirichlet(chi: &PeriodicFn, s: &Rat, n_terms: usize, precision_bits: u32) -> Result<BigComplex> {
    if !chi.is_mean_zero() {
        return Err(Error::AxiomInapplicable("Σ χ(k) over a period is not zero".into()));
    }
    if *s <= int(-1) {
        return Err(Error::OutsideHalfPlane(s.to_string()));
    }
    let n = chi.period() as usize;
    let l = n_terms - n_terms % n;
    if l == 0 {
        return Err(Error::InvalidArgument(format!("need at least {n} terms")));
    }
    let bits = precision_bits + 32;
    let mut per_residue = vec![BigFloat::zero(bits); n];
    for k in 1..=l {
        let r = (k - 1) % n;
        if chi.values()[r].is_zero() {
            continue;
        }
        let w = BigFloat::int_pow_neg_rat(k as u64, s, bits).mul_int((l + 1 - k) as i64);
        per_residue[r] = per_residue[r].add(&w);
    }
    let mut acc = BigComplex::zero(bits);
    for (r, sum) in per_residue.iter().enumerate() {
        let v = &chi.values()[r];
        if v.is_zero() {
            continue;
        }
        acc = acc.add(&v.embed(precision_bits).scale(&sum.rebits(bits)));
    }
    let inv_l = BigFloat::one(bits).div(&BigFloat::from_i64(l as i64, bits));
    Ok(acc.scale(&inv_l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{dirichlet_characters, legendre_character};
    use crate::lvalues::{l_minus_one, l_zero};

    #[test]
    fn transforms() {
        let nat = partial_sum(SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[1]), power: 0, shift: 0 });
        assert_eq!(nat.terms_exact(4), (1..=4).map(CycloNum::from_int).collect::<Vec<_>>());
        let inf = inflate(nat.clone(), 2).unwrap();
        assert_eq!(inf.terms_exact(6), [1, 1, 2, 2, 3, 3].map(CycloNum::from_int).to_vec());
        assert_eq!(inflate(nat.clone(), 1).unwrap().terms_exact(9), nat.terms_exact(9));
        assert!(inflate(nat, 0).is_err());
        let alt = SeqSpec::Explicit([0, 1, 0, 1, 0, 1].map(CycloNum::from_int).to_vec());
        let c = cesaro(alt).terms_exact(4);
        assert_eq!(c[3], CycloNum::from_rat(rat(1, 2)));
    }

    #[test]
    fn worked_examples_numeric() {
        // 1 − 2 + 3 − 4 + … averaged twice
        let s = series(&PeriodicFn::from_ints(&[1, -1]), Weight::Linear);
        let r = limit_numeric(&s, 2, 100_000, 1e-3).unwrap();
        assert!((r.numeric_value().unwrap().re - 0.25).abs() < 1e-3);
        // 0,1,0,1,… averaged once
        let p = SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[0, 1]), power: 0, shift: 0 };
        let r = limit_numeric(&p, 1, 10_000, 1e-3).unwrap();
        assert!((r.numeric_value().unwrap().re - 0.5).abs() < 1e-3);
    }

    #[test]
    fn no_value_for_growing_partial_sums() {
        let ones = partial_sum(SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[1]), power: 0, shift: 1 });
        for depth in 0..=4 {
            assert!(matches!(limit_numeric(&ones, depth, 20_000, 1e-3), Err(Error::NoConvergence { .. })));
        }
    }

    #[test]
    fn closed_forms_match_lvalues() {
        let q7 = legendre_character(7);
        assert_eq!(limit_exact_periodic(&q7, Weight::Const).unwrap(), CycloNum::one());
        let q5 = legendre_character(5);
        assert_eq!(limit_exact_periodic(&q5, Weight::Linear).unwrap(), CycloNum::from_rat(rat(-2, 5)));
        for n in 2..=15u32 {
            for chi in dirichlet_characters(n).into_iter().skip(1) {
                assert_eq!(limit_exact_periodic(&chi, Weight::Const).unwrap(), l_zero(&chi).unwrap());
                assert_eq!(limit_exact_periodic(&chi, Weight::Linear).unwrap(), l_minus_one(&chi).unwrap());
            }
        }
        let triv = PeriodicFn::from_ints(&[1, 1, 0]);
        assert!(matches!(limit_exact_periodic(&triv, Weight::Const), Err(Error::AxiomInapplicable(_))));
    }

    #[test]
    fn inflated_form_generates_the_inflated_partial_sums() {
        let chi = legendre_character(5);
        for weight in [Weight::Const, Weight::Linear] {
            for k in 1..=4u32 {
                let (lin, cst) = inflated_form(&chi, weight, k);
                let direct = inflate(series(&chi, weight), k as usize).unwrap();
                let rebuilt = partial_sum(SeqSpec::Combination(vec![
                    (int(1), SeqSpec::Periodic { chi: lin.clone(), power: 1, shift: 0 }),
                    (int(1), SeqSpec::Periodic { chi: cst.clone(), power: 0, shift: 0 }),
                ]));
                // inflation repeats b_u at positions (u−1)k+1..uk; the rebuilt series jumps at (u−1)k+1
                assert_eq!(direct.terms_exact(200), rebuilt.terms_exact(200), "k={k}");
                assert_eq!(
                    limit_exact_mixed(&lin, &cst).unwrap(),
                    limit_exact_periodic(&chi, weight).unwrap()
                );
            }
        }
    }

    #[test]
    fn replay_table() {
        let r = replay_derivations().unwrap();
        let vals: Vec<&str> = r.table.iter().map(|(_, v)| v.as_str()).collect();
        assert_eq!(vals, ["-1/2", "1/4", "-1/12"]);
    }

    #[test]
    fn averaged_dirichlet_values() {
        let q7 = legendre_character(7);
        let v = averaged_dirichlet(&q7, &int(0), 100_000, 64).unwrap();
        assert!((v.re.to_f64() - 1.0).abs() < 1e-3);
        let q5 = legendre_character(5);
        let v = averaged_dirichlet(&q5, &int(1), 100_000, 64).unwrap();
        let direct: f64 = (1..=1_000_000i64).map(|k| [0.0, 1.0, -1.0, -1.0, 1.0][(k % 5) as usize] / k as f64).sum();
        assert!((v.re.to_f64() - direct).abs() < 1e-3);
        assert!(matches!(averaged_dirichlet(&q5, &int(-1), 1000, 64), Err(Error::OutsideHalfPlane(_))));
    }
}
