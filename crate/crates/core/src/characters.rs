//! Periodic functions, Dirichlet characters and finite twist groups of even functions.

use std::fmt::Write as _;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactnum::{euler_phi, rat, CycloNum};

/// A function Z → Q(ζ) of period N, stored as χ(1), …, χ(N); χ(N) is the value at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicFn {
    period: u32,
    values: Vec<CycloNum>,
}

impl PeriodicFn {
    pub fn new(period: u32, values: Vec<CycloNum>) -> Result<Self> {
        if period == 0 || values.len() != period as usize {
            return Err(Error::InvalidArgument(format!(
                "period {period} needs {period} values, got {}",
                values.len()
            )));
        }
        Ok(PeriodicFn { period, values })
    }

    pub fn from_ints(values: &[i64]) -> Self {
        PeriodicFn { period: values.len() as u32, values: values.iter().map(|&v| CycloNum::from_int(v)).collect() }
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn values(&self) -> &[CycloNum] {
        &self.values
    }

    pub fn eval(&self, j: i64) -> &CycloNum {
        let n = self.period as i64;
        let r = j.rem_euclid(n);
        let idx = if r == 0 { n - 1 } else { r - 1 };
        &self.values[idx as usize]
    }

    pub fn sum(&self) -> CycloNum {
        self.values.iter().fold(CycloNum::zero(), |acc, v| acc.add(v))
    }

    pub fn is_mean_zero(&self) -> bool {
        self.sum().is_zero()
    }

    pub fn is_even(&self) -> bool {
        (1..self.period as i64).all(|j| self.eval(j) == self.eval(-j))
    }

    pub fn is_odd(&self) -> bool {
        (0..self.period as i64).all(|j| self.eval(j) == &self.eval(-j).neg())
    }

    /// Multiplicative, χ(1) = 1 and vanishing exactly on non-units.
    pub fn is_dirichlet_character(&self) -> bool {
        let n = self.period as i64;
        if self.eval(1) != &CycloNum::one() {
            return false;
        }
        for a in 1..=n {
            if (a.gcd(&n) == 1) == self.eval(a).is_zero() {
                return false;
            }
        }
        for a in 1..=n {
            for b in a..=n {
                if self.eval(a * b) != &self.eval(a).mul(self.eval(b)) {
                    return false;
                }
            }
        }
        true
    }

    /// The function that is 1 off multiples of N and 0 on them.
    pub fn is_nonmultiple_indicator(&self) -> bool {
        let n = self.period as i64;
        (1..=n).all(|j| {
            let want = if j % n == 0 { CycloNum::zero() } else { CycloNum::one() };
            self.eval(j) == &want
        })
    }

    pub fn lift(&self, period: u32) -> Self {
        assert_eq!(period % self.period, 0, "lift target must be a multiple of the period");
        let values = (1..=period as i64).map(|j| self.eval(j).clone()).collect();
        PeriodicFn { period, values }
    }

    /// Pointwise product, lifting both factors to the lcm period.
    pub fn mul(&self, other: &Self) -> Self {
        let p = self.period.lcm(&other.period);
        let values = (1..=p as i64).map(|j| self.eval(j).mul(other.eval(j))).collect();
        PeriodicFn { period: p, values }
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.period.lcm(&other.period);
        let values = (1..=p as i64).map(|j| self.eval(j).add(other.eval(j))).collect();
        PeriodicFn { period: p, values }
    }

    pub fn scale(&self, c: &CycloNum) -> Self {
        PeriodicFn { period: self.period, values: self.values.iter().map(|v| v.mul(c)).collect() }
    }

    pub fn conj(&self) -> Self {
        PeriodicFn { period: self.period, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn zero(period: u32) -> Self {
        PeriodicFn { period, values: vec![CycloNum::zero(); period as usize] }
    }

    /// The function t ↦ χ((t − 1)/k + 1) on t ≡ 1 (mod k), zero elsewhere; period kN.
    pub fn spread(&self, k: u32) -> Self {
        let p = self.period * k;
        let values = (1..=p as i64)
            .map(|t| if (t - 1) % k as i64 == 0 { self.eval((t - 1) / k as i64 + 1).clone() } else { CycloNum::zero() })
            .collect();
        PeriodicFn { period: p, values }
    }

    /// The function j ↦ χ(j/l) on multiples of l, zero elsewhere; period lN.
    pub fn dilate(&self, l: u32) -> Self {
        let p = self.period * l;
        let values = (1..=p as i64)
            .map(|j| if j % l as i64 == 0 { self.eval(j / l as i64).clone() } else { CycloNum::zero() })
            .collect();
        PeriodicFn { period: p, values }
    }

    /// Plain-text table: header `period N`, then one `j value` line per residue.
    pub fn to_table(&self) -> String {
        let mut s = format!("period {}\n", self.period);
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{} {}", i + 1, v);
        }
        s
    }

    pub fn parse_table(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty character table".into()))?;
        let period: u32 = header
            .strip_prefix("period")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        if period == 0 {
            return Err(Error::Parse("period must be positive".into()));
        }
        let mut values: Vec<Option<CycloNum>> = vec![None; period as usize];
        for line in lines {
            let (j, v) = line.split_once(char::is_whitespace).ok_or_else(|| Error::Parse(format!("bad line `{line}`")))?;
            let j: usize = j.parse().map_err(|_| Error::Parse(format!("bad residue in `{line}`")))?;
            if j == 0 || j > period as usize {
                return Err(Error::Parse(format!("residue {j} out of range")));
            }
            if values[j - 1].replace(CycloNum::parse(v)?).is_some() {
                return Err(Error::Parse(format!("duplicate residue {j}")));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("missing residue {}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(period, values)
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut a = 0;
        while n.is_multiple_of(p) {
            n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn mult_order(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut o = 1;
    while x != 1 {
        x = x * g % m;
        o += 1;
    }
    o
}

/// Smallest primitive root modulo an odd prime power.
pub fn primitive_root(m: u64) -> u64 {
    let phi = euler_phi(m);
    (2..m).find(|&g| g.gcd(&m) == 1 && mult_order(g, m) == phi).expect("odd prime powers have primitive roots")
}

/// Lifts x mod m1 to the unit ≡ x mod m1, ≡ 1 mod m2.
fn crt_lift(x: u64, m1: u64, m2: u64) -> u64 {
    (0..m2).map(|t| x + t * m1).find(|v| v % m2 == 1 % m2).expect("coprime moduli")
}

/// All φ(N) Dirichlet characters mod N with values in Q(ζ_φ(N)); index 0 is trivial.
pub fn dirichlet_characters(n: u32) -> Vec<PeriodicFn> {
    assert!(n >= 1);
    let n64 = n as u64;
    let phi = euler_phi(n64);
    // (generator lifted to mod N, order)
    let mut gens: Vec<(u64, u64)> = Vec::new();
    for (p, a) in factorize(n64) {
        let pa = p.pow(a);
        let rest = n64 / pa;
        if p == 2 {
            if a == 2 {
                gens.push((crt_lift(3, 4, rest), 2));
            } else if a >= 3 {
                gens.push((crt_lift(pa - 1, pa, rest), 2));
                gens.push((crt_lift(5, pa, rest), pa / 4));
            }
        } else {
            let g = primitive_root(pa);
            gens.push((crt_lift(g, pa, rest), euler_phi(pa)));
        }
    }
    // discrete logs of every unit
    let mut logs: Vec<Option<Vec<u64>>> = vec![None; n as usize];
    let mut exps = vec![0u64; gens.len()];
    loop {
        let u = gens.iter().zip(&exps).fold(1 % n64, |acc, (&(g, _), &e)| acc * mod_pow(g, e, n64) % n64);
        logs[u as usize] = Some(exps.clone());
        if !advance(&mut exps, &gens.iter().map(|g| g.1).collect::<Vec<_>>()) {
            break;
        }
    }
    let orders: Vec<u64> = gens.iter().map(|g| g.1).collect();
    let mut chars = Vec::new();
    let mut c = vec![0u64; gens.len()];
    let m = phi.max(1) as u32;
    loop {
        let values = (1..=n64)
            .map(|j| match &logs[(j % n64) as usize] {
                Some(e) if j.gcd(&n64) == 1 || n64 == 1 => {
                    let ex: u64 = c.iter().zip(e).zip(&orders).map(|((ci, ei), oi)| ci * ei * (phi / oi)).sum();
                    CycloNum::zeta_pow(m, ex as i64)
                }
                _ => CycloNum::zero(),
            })
            .collect();
        chars.push(PeriodicFn { period: n, values });
        if !advance(&mut c, &orders) {
            break;
        }
    }
    chars
}

fn advance(v: &mut [u64], bounds: &[u64]) -> bool {
    for i in (0..v.len()).rev() {
        v[i] += 1;
        if v[i] < bounds[i] {
            return true;
        }
        v[i] = 0;
    }
    false
}

/// Legendre symbol (k/q) for an odd prime q by Euler's criterion.
pub fn legendre_symbol(k: i64, q: u64) -> i64 {
    let r = mod_pow(k.rem_euclid(q as i64) as u64, (q - 1) / 2, q);
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// The real character (·/p) for an odd prime p.
pub fn legendre_character(p: u32) -> PeriodicFn {
    PeriodicFn::from_ints(&(1..=p as i64).map(|k| legendre_symbol(k, p as u64)).collect::<Vec<_>>())
}

/// Kronecker symbol (a/n) for n ≥ 1.
pub fn kronecker(a: i64, n: u64) -> i64 {
    assert!(n >= 1);
    let mut n = n;
    let mut t = 1i64;
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            t = -t;
        }
        n >>= v;
    }
    // Jacobi symbol (a/n), n odd
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn is_squarefree(m: i64) -> bool {
    factorize(m.unsigned_abs()).iter().all(|&(_, a)| a == 1)
}

/// A finite abelian group of even periodic functions under pointwise product.
#[derive(Clone, Debug)]
pub struct TwistGroup {
    period: u32,
    elements: Vec<PeriodicFn>,
    identity: usize,
    table: Vec<Vec<usize>>,
    label: String,
}

impl TwistGroup {
    /// Validates the group axioms and the evenness / mean-zero conditions on the given list.
    pub fn from_elements(elements: Vec<PeriodicFn>, label: &str) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidGroup("empty element list".into()));
        }
        let period = elements[0].period;
        if elements.iter().any(|e| e.period != period) {
            return Err(Error::InvalidGroup("elements have different periods".into()));
        }
        for (a, ea) in elements.iter().enumerate() {
            if elements[..a].contains(ea) {
                return Err(Error::InvalidGroup(format!("element {a} repeated")));
            }
        }
        let find = |f: &PeriodicFn| elements.iter().position(|e| e == f);
        let mut table = vec![vec![0; elements.len()]; elements.len()];
        for a in 0..elements.len() {
            for b in 0..elements.len() {
                table[a][b] = find(&elements[a].mul(&elements[b]))
                    .ok_or_else(|| Error::InvalidGroup(format!("product of elements {a} and {b} not in group")))?;
            }
        }
        let identity = (0..elements.len())
            .find(|&e| (0..elements.len()).all(|x| table[e][x] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..elements.len() {
            if !(0..elements.len()).any(|b| table[a][b] == identity) {
                return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
            }
        }
        for (a, e) in elements.iter().enumerate() {
            if !e.is_even() {
                return Err(Error::InvalidGroup(format!("element {a} is not even")));
            }
            if !e.eval(0).is_zero() {
                return Err(Error::InvalidGroup(format!("element {a} does not vanish at 0")));
            }
            if a != identity && !e.is_mean_zero() {
                return Err(Error::InvalidGroup(format!("element {a} is not mean-zero")));
            }
        }
        let id = &elements[identity];
        if !id.values.iter().all(|v| v.is_zero() || v == &CycloNum::one()) {
            return Err(Error::InvalidGroup("identity takes values outside {0,1}".into()));
        }
        Ok(TwistGroup { period, elements, identity, table, label: label.to_string() })
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[PeriodicFn] {
        &self.elements
    }

    pub fn identity(&self) -> &PeriodicFn {
        &self.elements[self.identity]
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    /// Describes how the elements were generated, for reproducible indexing.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn product_index(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut o = 1;
        while x != self.identity {
            x = self.table[x][a];
            o += 1;
        }
        o
    }

    /// b = Σ_{j=1..N} e(j) for the identity e.
    pub fn b(&self) -> CycloNum {
        self.identity().sum()
    }

    /// The dual characters ψ_1, …, ψ_k as value lists over the elements.
    ///
    /// For a cyclic group whose first element γ generates it, ψ_i(γ^s) = ζ_k^{is};
    /// ψ_k is the trivial character.
    pub fn dual(&self) -> Vec<Vec<CycloNum>> {
        let k = self.order();
        let orders: Vec<usize> = (0..k).map(|a| self.element_order(a)).collect();
        let exponent = orders.iter().fold(1usize, |acc, &o| acc.lcm(&o));
        // greedy generating set, first element preferred, then by decreasing order
        let mut cand: Vec<usize> = (0..k).collect();
        cand.sort_by_key(|&a| (a != 0, std::cmp::Reverse(orders[a])));
        let mut expr: Vec<Option<Vec<usize>>> = vec![None; k];
        expr[self.identity] = Some(Vec::new());
        let mut gens = Vec::new();
        for &g in &cand {
            if expr[g].is_some() {
                continue;
            }
            let r = gens.len();
            gens.push(g);
            let current: Vec<(usize, Vec<usize>)> =
                (0..k).filter_map(|x| expr[x].clone().map(|e| (x, e))).collect();
            for (x, ex) in current {
                let mut y = self.table[x][g];
                for e in 1..orders[g] {
                    if expr[y].is_none() {
                        let mut v = ex.clone();
                        v.resize(r, 0);
                        v.push(e);
                        expr[y] = Some(v);
                    }
                    y = self.table[y][g];
                }
            }
        }
        let exprs: Vec<Vec<usize>> = expr
            .into_iter()
            .map(|e| {
                let mut v = e.expect("generating set covers the group");
                v.resize(gens.len(), 0);
                v
            })
            .collect();
        let mut duals = Vec::new();
        let mut assign = vec![0u64; gens.len()];
        let bounds = vec![exponent as u64; gens.len()];
        loop {
            let vals: Vec<u64> = exprs
                .iter()
                .map(|e| e.iter().zip(&assign).map(|(&ei, &ai)| ei as u64 * ai).sum::<u64>() % exponent as u64)
                .collect();
            let hom = (0..k).all(|a| {
                (0..k).all(|b| (vals[a] + vals[b]) % exponent as u64 == vals[self.table[a][b]])
            });
            if hom && !duals.contains(&vals) {
                duals.push(vals);
            }
            if !advance(&mut assign, &bounds) {
                break;
            }
        }
        assert_eq!(duals.len(), k, "finite abelian group has |G| dual characters");
        // position p (0-based) is index p, with the trivial character last as index k
        let mut ordered: Vec<Vec<CycloNum>> = duals
            .iter()
            .map(|v| v.iter().map(|&e| CycloNum::zeta_pow(exponent as u32, e as i64)).collect())
            .collect();
        let trivial = ordered.remove(0);
        ordered.push(trivial);
        ordered
    }

    /// e_i = (1/k) Σ_g ψ_i(g)·g for i in 1..=k.
    pub fn projector(&self, i: usize) -> Result<PeriodicFn> {
        let k = self.order();
        if i == 0 || i > k {
            return Err(Error::InvalidArgument(format!("index {i} outside 1..={k}")));
        }
        let psi = &self.dual()[i - 1];
        let inv_k = CycloNum::from_rat(rat(1, k as i64));
        let mut acc = PeriodicFn::zero(self.period);
        for (g, w) in self.elements.iter().zip(psi) {
            acc = acc.add(&g.scale(w));
        }
        Ok(acc.scale(&inv_k))
    }

    /// Residue j ≤ N/2 tied to index i: the support of e_i is {j, N − j}.
    pub fn index_residue(&self, i: usize) -> Result<u32> {
        let e = self.projector(i)?;
        let n = self.period as i64;
        let support: Vec<i64> = (1..=n).filter(|&j| !e.eval(j).is_zero()).collect();
        let j = support.first().copied().ok_or_else(|| Error::IndexMismatch(format!("index {i} has empty support")))?;
        if support != vec![j, n - j] || e.eval(j) != &CycloNum::one() {
            return Err(Error::IndexMismatch(format!("index {i} projects onto residues {support:?}")));
        }
        Ok(j as u32)
    }
}

/// Even Dirichlet characters for prime N, the family f_s otherwise; cyclic of order (N−1)/2.
pub fn even_twist_group(n: u32) -> Result<TwistGroup> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::UnsupportedPeriod(n as i64));
    }
    let k = (n - 1) / 2;
    let gen = if is_prime(n as u64) {
        let g = primitive_root(n as u64);
        let mut values = vec![CycloNum::zero(); n as usize];
        let mut x = 1u64;
        for a in 0..(n - 1) as i64 {
            values[x as usize - 1] = CycloNum::zeta_pow(k, a);
            x = x * g % n as u64;
        }
        (PeriodicFn { period: n, values }, format!("even characters mod {n}, generator χ(g) = ζ_{k} with primitive root g = {g}"))
    } else {
        let mut values = vec![CycloNum::zero(); n as usize];
        for u in 1..=k {
            values[u as usize - 1] = CycloNum::zeta_pow(k, u as i64);
            values[(n - u) as usize - 1] = CycloNum::zeta_pow(k, u as i64);
        }
        (PeriodicFn { period: n, values }, format!("family f_s mod {n}, f_1(u) = ζ_{k}^u for 1 ≤ u ≤ {k}"))
    };
    let mut elements = vec![gen.0.clone()];
    for _ in 1..k {
        let next = elements.last().unwrap().mul(&gen.0);
        elements.push(next);
    }
    TwistGroup::from_elements(elements, &gen.1)
}

/// The order-2 group {χ_D, 1} for the real quadratic field Q(√m).
pub fn quadratic_field_group(m: i64) -> Result<TwistGroup> {
    if m < 0 {
        return Err(Error::NotTotallyReal);
    }
    if m <= 1 || !is_squarefree(m) {
        return Err(Error::InvalidArgument(format!("{m} is not a squarefree integer > 1")));
    }
    let d = if m % 4 == 1 { m } else { 4 * m };
    let chi = PeriodicFn::from_ints(&(1..=d).map(|j| kronecker(d, j as u64)).collect::<Vec<_>>());
    let triv = PeriodicFn::from_ints(&(1..=d).map(|j| i64::from(j.gcd(&d) == 1)).collect::<Vec<_>>());
    TwistGroup::from_elements(vec![chi, triv], &format!("Kronecker symbol of discriminant {d}"))
}

/// Σ_j χ(j)·conj(ψ(j)) over one period.
pub fn inner_product(a: &PeriodicFn, b: &PeriodicFn) -> CycloNum {
    let p = a.period().lcm(&b.period());
    (1..=p as i64).fold(CycloNum::zero(), |acc, j| acc.add(&a.eval(j).mul(&b.eval(j).conj())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characters_mod_5() {
        let cs = dirichlet_characters(5);
        assert_eq!(cs.len(), 4);
        assert!(cs[0].is_nonmultiple_indicator());
        let real: Vec<_> = cs.iter().filter(|c| c.values().iter().all(|v| v.is_rational().is_some())).collect();
        assert_eq!(real.len(), 2);
        assert_eq!(real[1], &PeriodicFn::from_ints(&[1, -1, -1, 1, 0]));
        assert_eq!(real[1], &legendre_character(5));
        assert!(cs.iter().all(|c| c.is_dirichlet_character()));
    }

    #[test]
    fn small_and_composite_moduli() {
        let one = dirichlet_characters(1);
        assert_eq!(one, vec![PeriodicFn::from_ints(&[1])]);
        let seven = dirichlet_characters(7);
        assert_eq!(seven.iter().filter(|c| c.is_even()).count(), 3);
        for n in [8u32, 12, 15, 16, 24] {
            let cs = dirichlet_characters(n);
            assert_eq!(cs.len() as u64, euler_phi(n as u64));
            assert!(cs.iter().all(|c| c.is_dirichlet_character()), "N = {n}");
        }
    }

    #[test]
    fn orthogonality() {
        for n in [5u32, 9, 12] {
            let cs = dirichlet_characters(n);
            let phi = CycloNum::from_int(euler_phi(n as u64) as i64);
            for (a, x) in cs.iter().enumerate() {
                for (b, y) in cs.iter().enumerate() {
                    let ip = inner_product(x, y);
                    assert_eq!(ip, if a == b { phi.clone() } else { CycloNum::zero() });
                }
            }
        }
    }

    #[test]
    fn twist_groups() {
        let g5 = even_twist_group(5).unwrap();
        assert_eq!(g5.order(), 2);
        assert!(g5.identity().is_nonmultiple_indicator());
        let g7 = even_twist_group(7).unwrap();
        assert_eq!(g7.order(), 3);
        let g9 = even_twist_group(9).unwrap();
        assert_eq!(g9.order(), 4);
        let f1 = &g9.elements()[0];
        assert_eq!(f1.mul(f1), g9.elements()[1]);
        assert_eq!(g9.b(), CycloNum::from_int(8));
        assert!(even_twist_group(8).is_err());
        assert!(even_twist_group(1).is_err());
    }

    #[test]
    fn quadratic_fields() {
        let g = quadratic_field_group(5).unwrap();
        assert_eq!(g.elements()[0], PeriodicFn::from_ints(&[1, -1, -1, 1, 0]));
        let g2 = quadratic_field_group(2).unwrap();
        assert_eq!(g2.period(), 8);
        assert!(g2.elements()[0].is_even());
        assert_eq!(quadratic_field_group(-7).unwrap_err(), Error::NotTotallyReal);
        assert!(quadratic_field_group(12).is_err());
    }

    #[test]
    fn kronecker_against_euler_criterion() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in -30..30 {
                assert_eq!(kronecker(a, p), legendre_symbol(a, p), "a={a} p={p}");
            }
        }
        for a in [-7i64, 5, 8, 12, 13] {
            for m in 1..40u64 {
                for n in 1..40u64 {
                    assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
                }
            }
        }
    }

    #[test]
    fn dual_and_projectors() {
        for n in [5u32, 7, 9, 11, 13, 15] {
            let g = even_twist_group(n).unwrap();
            let k = g.order();
            let mut total = PeriodicFn::zero(n);
            for i in 1..=k {
                let e = g.projector(i).unwrap();
                assert_eq!(e.mul(&e), e);
                for i2 in 1..=k {
                    if i2 != i {
                        assert_eq!(e.mul(&g.projector(i2).unwrap()), PeriodicFn::zero(n));
                    }
                }
                total = total.add(&e);
                let j = g.index_residue(i).unwrap();
                // literal dictionary χ(j) = ω^{k−i} with χ the generator
                let omega = CycloNum::zeta_pow(k as u32, (k - i) as i64);
                assert_eq!(g.elements()[0].eval(j as i64), &omega, "N={n} i={i}");
            }
            assert_eq!(&total, g.identity());
        }
    }

    #[test]
    fn table_round_trip() {
        let g = even_twist_group(7).unwrap();
        for e in g.elements() {
            let t = e.to_table();
            let back = PeriodicFn::parse_table(&t).unwrap();
            assert_eq!(&back, e);
            assert_eq!(back.to_table(), t);
        }
        assert!(PeriodicFn::parse_table("period 2\n1 1\n").is_err());
        assert!(PeriodicFn::parse_table("period 2\n1 1\n1 1\n").is_err());
    }

    #[test]
    fn user_supplied_group_validation() {
        let triv = PeriodicFn::from_ints(&[1, 1, 1, 1, 0]);
        assert!(TwistGroup::from_elements(vec![triv.clone()], "trivial").is_ok());
        let odd = legendre_character(7);
        assert!(TwistGroup::from_elements(vec![odd, PeriodicFn::from_ints(&[1, 1, 1, 1, 1, 1, 0])], "odd").is_err());
        let not_closed = PeriodicFn::from_ints(&[1, -1, -1, 1, 0]);
        assert!(TwistGroup::from_elements(vec![not_closed], "no identity").is_err());
    }
}
