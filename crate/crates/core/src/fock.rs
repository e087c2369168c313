//! Truncated Fock space of the oscillator algebra [a_m, a_n] = m·δ_{m,−n} and the
//! twisted Virasoro operators L_n^χ and T_n^i acting on it.
//!
//! Operators act lazily on partition states: every L_n^χ is a finite sum on any given
//! state, so results are exact without truncating intermediate vectors. Checks restrict
//! inputs to a degree window so that all states met stay below the cutoff.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{PeriodicFn, TwistGroup};
use crate::error::{Error, Result};
use crate::exactnum::{euler_phi, int, rat, CycloNum, Rat};
use crate::lvalues::{l_minus_one, l_minus_one_formula};

pub const MAX_CUTOFF: u32 = 60;

/// a_{−j₁}···a_{−j_p}|0⟩, stored as the parts in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FockState {
    parts: Vec<u16>,
}

impl FockState {
    pub fn vacuum() -> Self {
        FockState { parts: Vec::new() }
    }

    pub fn from_parts(parts: &[u32]) -> Result<Self> {
        if parts.iter().any(|&p| p == 0 || p > u16::MAX as u32) {
            return Err(Error::InvalidArgument("parts must be positive modes".into()));
        }
        let mut v: Vec<u16> = parts.iter().map(|&p| p as u16).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Ok(FockState { parts: v })
    }

    pub fn parts(&self) -> Vec<u32> {
        self.parts.iter().map(|&p| p as u32).collect()
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().map(|&p| p as u32).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.parts.is_empty()
    }

    /// ⟨λ|λ⟩ = Π j^{m_j}·m_j! for a_k† = a_{−k}.
    pub fn norm(&self) -> BigInt {
        let mut acc = BigInt::one();
        let mut i = 0;
        while i < self.parts.len() {
            let j = self.parts[i];
            let mut m = 0u32;
            while i < self.parts.len() && self.parts[i] == j {
                m += 1;
                i += 1;
                acc *= BigInt::from(j) * BigInt::from(m);
            }
        }
        acc
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "|0>");
        }
        let p: Vec<String> = self.parts.iter().map(|x| x.to_string()).collect();
        write!(f, "|{}>", p.join(","))
    }
}

fn sort_key(s: &FockState) -> (u32, std::cmp::Reverse<Vec<u16>>) {
    (s.degree(), std::cmp::Reverse(s.parts.clone()))
}

/// All partitions of degree ≤ `cutoff`, optionally restricted to parts in the given
/// residue classes modulo N; sorted by degree.
pub fn fock_basis(cutoff: u32, allowed: Option<(u32, &[u32])>) -> Result<Vec<FockState>> {
    if cutoff > MAX_CUTOFF {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} exceeds {MAX_CUTOFF}")));
    }
    let ok = |p: u32| match allowed {
        None => true,
        Some((n, res)) => res.iter().any(|&r| r % n == p % n),
    };
    let parts: Vec<u16> = (1..=cutoff).filter(|&p| ok(p)).map(|p| p as u16).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: u32, max_idx: usize, parts: &[u16], cur: &mut Vec<u16>, out: &mut Vec<FockState>) {
        out.push(FockState { parts: cur.clone() });
        for i in (0..max_idx).rev() {
            let p = parts[i] as u32;
            if p <= rem {
                cur.push(parts[i]);
                rec(rem - p, i + 1, parts, cur, out);
                cur.pop();
            }
        }
    }
    rec(cutoff, parts.len(), &parts, &mut cur, &mut out);
    out.sort_by_key(sort_key);
    Ok(out)
}

fn insert_part(parts: &[u16], k: u16) -> Vec<u16> {
    let pos = parts.iter().position(|&p| p <= k).unwrap_or(parts.len());
    let mut v = Vec::with_capacity(parts.len() + 1);
    v.extend_from_slice(&parts[..pos]);
    v.push(k);
    v.extend_from_slice(&parts[pos..]);
    v
}

/// a_k on a partition: creates −k for k < 0, removes k with weight k·m_k for k > 0.
fn apply_mode(parts: &[u16], k: i64) -> Option<(Vec<u16>, i128)> {
    if k == 0 {
        return None;
    }
    if k < 0 {
        let m = u16::try_from(-k).expect("mode fits the state encoding");
        return Some((insert_part(parts, m), 1));
    }
    let k16 = u16::try_from(k).ok()?;
    let first = parts.iter().position(|&p| p == k16)?;
    let mult = parts[first..].iter().take_while(|&&p| p == k16).count() as i128;
    let mut v = parts.to_vec();
    v.remove(first);
    Some((v, k as i128 * mult))
}

/// :a_p a_q: on a partition; the annihilator (positive index) acts first.
fn apply_normal_pair(parts: &[u16], p: i64, q: i64) -> Option<(Vec<u16>, i128)> {
    let (first, second) = if p > 0 && q < 0 { (p, q) } else { (q, p) };
    let (s1, c1) = apply_mode(parts, first)?;
    let (s2, c2) = apply_mode(&s1, second)?;
    Some((s2, c1 * c2))
}

/// Primitive operators on the Fock space with integer matrix entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Op {
    Mode(i64),
    /// Σ :a_P a_Q: over P + Q = l·n·N with l | P and (−P/l) mod N in `residues`.
    Bilinear { modulus: u32, dil: u32, residues: Vec<u32>, n: i64 },
}

fn bilinear_terms(parts: &[u16], modulus: u32, dil: u32, residues: &[u32], n: i64) -> Vec<(Vec<u16>, i128)> {
    let total = dil as i64 * n * modulus as i64;
    let mut cands: Vec<i64> = Vec::new();
    let mut last = 0u16;
    for &d in parts {
        if d != last {
            cands.push(d as i64);
            cands.push(total - d as i64);
            last = d;
        }
    }
    if total < 0 {
        cands.extend(total + 1..0);
    }
    cands.sort_unstable();
    cands.dedup();
    let l = dil as i64;
    let nn = modulus as i64;
    let mut acc: HashMap<Vec<u16>, i128> = HashMap::new();
    for p in cands {
        let q = total - p;
        if p == 0 || q == 0 || p % l != 0 {
            continue;
        }
        let res = (-p / l).rem_euclid(nn) as u32;
        if !residues.contains(&res) {
            continue;
        }
        if let Some((s, c)) = apply_normal_pair(parts, p, q) {
            *acc.entry(s).or_insert(0) += c;
        }
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

type SVec = Vec<(u32, i128)>;

/// Interned partitions with memoised operator actions.
#[derive(Default)]
struct Space {
    index: HashMap<Vec<u16>, u32>,
    states: Vec<Vec<u16>>,
    ops: HashMap<Op, usize>,
    op_list: Vec<Op>,
    cache: HashMap<(usize, u32), Rc<SVec>>,
}

impl Space {
    fn id(&mut self, p: Vec<u16>) -> u32 {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        let i = self.states.len() as u32;
        self.states.push(p.clone());
        self.index.insert(p, i);
        i
    }

    fn op(&mut self, op: Op) -> usize {
        if let Some(&i) = self.ops.get(&op) {
            return i;
        }
        let i = self.op_list.len();
        self.op_list.push(op.clone());
        self.ops.insert(op, i);
        i
    }

    fn apply_basis(&mut self, op: usize, s: u32) -> Rc<SVec> {
        if let Some(v) = self.cache.get(&(op, s)) {
            return v.clone();
        }
        let parts = self.states[s as usize].clone();
        let raw: Vec<(Vec<u16>, i128)> = match &self.op_list[op] {
            Op::Mode(k) => apply_mode(&parts, *k).into_iter().collect(),
            Op::Bilinear { modulus, dil, residues, n } => bilinear_terms(&parts, *modulus, *dil, residues, *n),
        };
        let mut out: SVec = raw.into_iter().map(|(p, c)| (self.id(p), c)).collect();
        out.sort_unstable();
        let rc = Rc::new(out);
        self.cache.insert((op, s), rc.clone());
        rc
    }

    fn apply(&mut self, op: usize, v: &[(u32, i128)]) -> SVec {
        let mut acc: HashMap<u32, i128> = HashMap::new();
        for &(s, c) in v {
            for &(t, d) in self.apply_basis(op, s).iter() {
                *acc.entry(t).or_insert(0) += c * d;
            }
        }
        let mut out: SVec = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        out.sort_unstable();
        out
    }

    /// (AB − BA) applied to a basis state.
    fn commutator(&mut self, a: usize, b: usize, s: u32) -> SVec {
        let bs = self.apply_basis(b, s);
        let abs = self.apply(a, &bs);
        let as_ = self.apply_basis(a, s);
        let bas = self.apply(b, &as_);
        sub_svec(&abs, &bas)
    }

    fn state(&self, s: u32) -> FockState {
        FockState { parts: self.states[s as usize].clone() }
    }
}

fn sub_svec(a: &[(u32, i128)], b: &[(u32, i128)]) -> SVec {
    let mut acc: BTreeMap<u32, i128> = a.iter().copied().collect();
    for &(s, c) in b {
        *acc.entry(s).or_insert(0) -= c;
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// A common integral frame for cyclotomic coefficients: x = (Σ v_t ζ_K^t)/den.
struct Frame {
    order: u32,
    den: i128,
}

impl Frame {
    fn new<'a>(vals: impl IntoIterator<Item = &'a CycloNum>) -> Frame {
        let vals: Vec<&CycloNum> = vals.into_iter().collect();
        let order = vals.iter().fold(1u32, |acc, v| acc.lcm(&v.order()));
        let mut den = BigInt::one();
        for v in &vals {
            for c in v.promote(order).coeffs() {
                den = den.lcm(c.denom());
            }
        }
        Frame { order, den: den.to_i128().expect("denominator fits") }
    }

    fn phi(&self) -> usize {
        euler_phi(self.order as u64) as usize
    }

    fn ints(&self, x: &CycloNum) -> Vec<i128> {
        x.promote(self.order)
            .coeffs()
            .iter()
            .map(|c| {
                let v = c * Rat::from_integer(BigInt::from(self.den));
                debug_assert!(v.is_integer());
                v.to_integer().to_i128().expect("coefficient fits")
            })
            .collect()
    }

    fn value(&self, v: &[i128]) -> CycloNum {
        let coeffs = v.iter().map(|&c| Rat::new(BigInt::from(c), BigInt::from(self.den))).collect();
        CycloNum::new(self.order, coeffs).expect("frame vector length")
    }
}

/// Outcome of one identity checked on every input state of a window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub label: String,
    pub passed: bool,
    pub states_checked: usize,
    pub witness: Option<String>,
}

/// Σ lhs_key·vec_key = Σ rhs_key·vec_key, the vectors being computed per input state.
struct LinearCase {
    label: String,
    lhs: Vec<(usize, CycloNum)>,
    rhs: Vec<(usize, CycloNum)>,
}

struct PreparedCase {
    frame: Frame,
    lhs: Vec<(usize, Vec<i128>)>,
    rhs: Vec<(usize, Vec<i128>)>,
}

fn prepare(c: &LinearCase) -> PreparedCase {
    let frame = Frame::new(c.lhs.iter().chain(&c.rhs).map(|(_, x)| x));
    let conv = |side: &[(usize, CycloNum)]| {
        side.iter().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (*k, frame.ints(x))).collect()
    };
    PreparedCase { lhs: conv(&c.lhs), rhs: conv(&c.rhs), frame }
}

fn combine(side: &[(usize, Vec<i128>)], vecs: &[SVec], phi: usize) -> BTreeMap<u32, Vec<i128>> {
    let mut acc: BTreeMap<u32, Vec<i128>> = BTreeMap::new();
    for (k, coeff) in side {
        for &(s, c) in &vecs[*k] {
            let e = acc.entry(s).or_insert_with(|| vec![0; phi]);
            for (x, y) in e.iter_mut().zip(coeff) {
                *x += c * y;
            }
        }
    }
    acc.retain(|_, v| v.iter().any(|&x| x != 0));
    acc
}

/// Runs the cases over the given input states; `keys` yields the vectors per state.
fn run_cases(
    space: &mut Space,
    inputs: &[u32],
    cases: &[LinearCase],
    mut keys: impl FnMut(&mut Space, u32) -> Vec<SVec>,
) -> Vec<CaseResult> {
    let prepared: Vec<PreparedCase> = cases.iter().map(prepare).collect();
    let mut results: Vec<CaseResult> = cases
        .iter()
        .map(|c| CaseResult { label: c.label.clone(), passed: true, states_checked: 0, witness: None })
        .collect();
    for &s in inputs {
        let vecs = keys(space, s);
        for (p, r) in prepared.iter().zip(results.iter_mut()) {
            if !r.passed {
                continue;
            }
            r.states_checked += 1;
            let phi = p.frame.phi();
            let l = combine(&p.lhs, &vecs, phi);
            let rh = combine(&p.rhs, &vecs, phi);
            if l != rh {
                let zero = vec![0; phi];
                let (out, lv, rv) = l
                    .keys()
                    .chain(rh.keys())
                    .find_map(|k| {
                        let a = l.get(k).unwrap_or(&zero);
                        let b = rh.get(k).unwrap_or(&zero);
                        (a != b).then(|| (*k, a.clone(), b.clone()))
                    })
                    .expect("maps differ at some key");
                r.passed = false;
                r.witness = Some(format!(
                    "input {} output {}: lhs {} rhs {}",
                    space.state(s),
                    space.state(out),
                    p.frame.value(&lv),
                    p.frame.value(&rv)
                ));
            }
        }
    }
    results
}

fn window_inputs(space: &mut Space, window: i64) -> Result<Vec<u32>> {
    if window < 0 {
        return Err(Error::CutoffTooSmall(format!("window degree {window} is negative")));
    }
    Ok(fock_basis(window as u32, None)?.into_iter().map(|s| space.id(s.parts)).collect())
}

/// Representatives r ≤ N − r of the residue pairs {r, N − r}, r ≠ 0.
fn pair_reps(modulus: u32) -> Vec<u32> {
    (1..=modulus / 2).collect()
}

fn pair_residues(modulus: u32, r: u32) -> Vec<u32> {
    let mut v = vec![r, (modulus - r) % modulus];
    v.sort_unstable();
    v.dedup();
    v
}

/// Indicator of the residue pair {r, N − r}.
fn pair_indicator(modulus: u32, r: u32) -> PeriodicFn {
    let res = pair_residues(modulus, r);
    PeriodicFn::from_ints(&(1..=modulus).map(|j| i64::from(res.contains(&(j % modulus)))).collect::<Vec<_>>())
}

fn check_even_function(f: &PeriodicFn, modulus: u32) -> Result<()> {
    if f.period() != modulus {
        return Err(Error::InvalidArgument(format!("function of period {} on modulus {modulus}", f.period())));
    }
    if !f.is_even() || !f.eval(0).is_zero() {
        return Err(Error::InvalidArgument("function must be even and vanish at 0".into()));
    }
    Ok(())
}

/// Bracket identity [L_m^f, L_n^g] = (m − n)·L_{m+n}^h + scalar, with the dilated
/// operators (1/l)·τ_l(L) when `dil` = l > 1.
#[derive(Clone, Debug)]
pub struct BracketSpec {
    pub label: String,
    pub f: PeriodicFn,
    pub g: PeriodicFn,
    pub h: PeriodicFn,
    pub scalar: CycloNum,
}

/// Central term of the twisted bracket: δ_{m,−n}[(m/N)·L(−1,ω) + (m³/12)·Σω].
pub fn twisted_central_term(omega: &PeriodicFn, m: i64, n: i64) -> CycloNum {
    if m != -n {
        return CycloNum::zero();
    }
    let nn = omega.period() as i64;
    l_minus_one_formula(omega).scale(&rat(m, nn)).add(&omega.sum().scale(&rat(m * m * m, 12)))
}

#[allow(clippy::too_many_arguments)]
fn check_brackets(
    modulus: u32,
    dil: u32,
    m: i64,
    n: i64,
    cutoff: u32,
    specs: &[BracketSpec],
    basis_certificate: bool,
) -> Result<Vec<CaseResult>> {
    if cutoff > MAX_CUTOFF {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} exceeds {MAX_CUTOFF}")));
    }
    for s in specs {
        check_even_function(&s.f, modulus)?;
        check_even_function(&s.g, modulus)?;
        check_even_function(&s.h, modulus)?;
    }
    let window = cutoff as i64 - (dil * modulus) as i64 * (m.abs() + n.abs());
    let mut space = Space::default();
    let inputs = window_inputs(&mut space, window)?;
    let reps = pair_reps(modulus);
    let nr = reps.len();
    let fam = |space: &mut Space, r: u32, k: i64| {
        space.op(Op::Bilinear { modulus, dil, residues: pair_residues(modulus, r), n: k })
    };
    let am: Vec<usize> = reps.iter().map(|&r| fam(&mut space, r, m)).collect();
    let an: Vec<usize> = reps.iter().map(|&r| fam(&mut space, r, n)).collect();
    let amn: Vec<usize> = reps.iter().map(|&r| fam(&mut space, r, m + n)).collect();
    // keys: 0 identity, 1..=nr² commutators X_rs, then Y_r = B_{m+n}^r
    let x_key = |a: usize, b: usize| 1 + a * nr + b;
    let y_key = |a: usize| 1 + nr * nr + a;
    let nn = modulus as i64;
    let l = dil as i64;
    let two_nl = int(2 * nn * l);
    let four = int(4 * nn * nn * l * l);
    let mut cases = Vec::new();
    if basis_certificate {
        for a in 0..nr {
            for b in 0..nr {
                let mut rhs = Vec::new();
                if a == b {
                    let e = pair_indicator(modulus, reps[a]);
                    rhs.push((y_key(a), CycloNum::from_rat(&two_nl * int(m - n))));
                    rhs.push((0, twisted_central_term(&e, m, n).scale(&four)));
                }
                cases.push(LinearCase {
                    label: format!("residue pair basis e_{} e_{}, (m,n)=({m},{n})", reps[a], reps[b]),
                    lhs: vec![(x_key(a, b), CycloNum::one())],
                    rhs,
                });
            }
        }
    }
    for s in specs {
        let mut lhs = Vec::new();
        for a in 0..nr {
            for b in 0..nr {
                let c = s.f.eval(reps[a] as i64).mul(s.g.eval(reps[b] as i64));
                lhs.push((x_key(a, b), c.scale(&(Rat::one() / &four))));
            }
        }
        let mut rhs: Vec<(usize, CycloNum)> = (0..nr)
            .map(|a| (y_key(a), s.h.eval(reps[a] as i64).scale(&(int(m - n) / &two_nl))))
            .collect();
        rhs.push((0, s.scalar.clone()));
        cases.push(LinearCase { label: format!("{}, (m,n)=({m},{n})", s.label), lhs, rhs });
    }
    Ok(run_cases(&mut space, &inputs, &cases, |space, st| {
        let mut vecs = vec![vec![(st, 1i128)]];
        for a in 0..nr {
            for b in 0..nr {
                vecs.push(space.commutator(am[a], an[b], st));
            }
        }
        for &op in &amn {
            let v = space.apply_basis(op, st);
            vecs.push((*v).clone());
        }
        vecs
    }))
}

fn mode_pairs(max_mode: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for m in -max_mode..=max_mode {
        for n in -max_mode..=max_mode {
            v.push((m, n));
        }
    }
    v
}

fn bracket_specs(group: &TwistGroup, m: i64, n: i64, pairs: &[(usize, usize)]) -> Vec<BracketSpec> {
    pairs
        .iter()
        .map(|&(a, b)| {
            let f = &group.elements()[a];
            let g = &group.elements()[b];
            let h = f.mul(g);
            let scalar = twisted_central_term(&h, m, n);
            BracketSpec { label: format!("elements ({a},{b})"), f: f.clone(), g: g.clone(), h, scalar }
        })
        .collect()
}

/// [L_m^{χ₁}, L_n^{χ₂}] = (m − n)L_{m+n}^{χ₁χ₂} + δ_{m,−n}[(m/N)L(−1,χ₁χ₂) + (m³/12)Σχ₁χ₂]
/// for the group elements with indices `a`, `b`.
pub fn verify_twisted_bracket(group: &TwistGroup, a: usize, b: usize, m: i64, n: i64, cutoff: u32) -> Result<CaseResult> {
    if a >= group.order() || b >= group.order() {
        return Err(Error::InvalidArgument("element index out of range".into()));
    }
    let specs = bracket_specs(group, m, n, &[(a, b)]);
    let mut r = check_brackets(group.period(), 1, m, n, cutoff, &specs, false)?;
    Ok(r.remove(0))
}

/// The twisted bracket for every ordered pair of group elements and |m|, |n| ≤ `max_mode`,
/// plus the same identity on the basis of residue-pair indicators.
pub fn verify_twisted_bracket_suite(group: &TwistGroup, max_mode: i64, cutoff: u32) -> Result<Vec<CaseResult>> {
    let k = group.order();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).collect();
    let per: Vec<Result<Vec<CaseResult>>> = mode_pairs(max_mode)
        .into_par_iter()
        .map(|(m, n)| check_brackets(group.period(), 1, m, n, cutoff, &bracket_specs(group, m, n, &pairs), true))
        .collect();
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

/// [a_k, L_n^χ] = (1/N)χ(k)k·a_{k+nN} for each group element, on the window
/// d ≤ D − N|n| − |k|.
pub fn verify_mode_bracket(group: &TwistGroup, k: i64, n: i64, cutoff: u32) -> Result<Vec<CaseResult>> {
    let modulus = group.period();
    let nn = modulus as i64;
    let window = cutoff as i64 - nn * n.abs() - k.abs();
    let mut space = Space::default();
    let inputs = window_inputs(&mut space, window)?;
    let reps = pair_reps(modulus);
    let ak = space.op(Op::Mode(k));
    let shifted = space.op(Op::Mode(k + n * nn));
    let fams: Vec<usize> = reps
        .iter()
        .map(|&r| space.op(Op::Bilinear { modulus, dil: 1, residues: pair_residues(modulus, r), n }))
        .collect();
    // keys: 0 identity, 1 a_{k+nN}, 2.. [a_k, B_n^r]
    let mut cases = Vec::new();
    for (a, &r) in reps.iter().enumerate() {
        let e = pair_indicator(modulus, r);
        cases.push(LinearCase {
            label: format!("residue pair basis e_{r}, k={k}, n={n}"),
            lhs: vec![(2 + a, CycloNum::one())],
            rhs: vec![(1, e.eval(k).scale(&int(2 * k)))],
        });
    }
    for (idx, chi) in group.elements().iter().enumerate() {
        let lhs = reps.iter().enumerate().map(|(a, &r)| (2 + a, chi.eval(r as i64).scale(&rat(1, 2 * nn)))).collect();
        cases.push(LinearCase {
            label: format!("element {idx}, k={k}, n={n}"),
            lhs,
            rhs: vec![(1, chi.eval(k).scale(&rat(k, nn)))],
        });
    }
    Ok(run_cases(&mut space, &inputs, &cases, |space, st| {
        let mut vecs = vec![vec![(st, 1i128)], (*space.apply_basis(shifted, st)).clone()];
        for &f in &fams {
            vecs.push(space.commutator(ak, f, st));
        }
        vecs
    }))
}

/// The projected operators T_n^i = L_n^{e_i} with e_i = (1/k)Σ_g ψ_i(g)·g.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub central_charge: String,
    pub projectors_ok: bool,
    pub cases: Vec<CaseResult>,
}

/// Checks that the projectors e_i are idempotent, pairwise orthogonal and sum to the
/// identity of the group, and that they agree with the ω-average (1/k)Σ_s ω^{is}χ^s
/// when the first element generates the group.
pub fn verify_projectors(group: &TwistGroup) -> Result<bool> {
    let k = group.order();
    let es: Vec<PeriodicFn> = (1..=k).map(|i| group.projector(i)).collect::<Result<_>>()?;
    let mut ok = true;
    for i in 0..k {
        for j in 0..k {
            let p = es[i].mul(&es[j]);
            let want = if i == j { es[i].clone() } else { PeriodicFn::zero(group.period()) };
            ok &= p == want;
        }
    }
    let total = es.iter().fold(PeriodicFn::zero(group.period()), |acc, e| acc.add(e));
    ok &= &total == group.identity();
    let gen = &group.elements()[0];
    let cyclic = (1..=k).all(|s| {
        let mut p = gen.clone();
        for _ in 1..s {
            p = p.mul(gen);
        }
        p == group.elements()[s - 1]
    });
    if cyclic {
        let omega = CycloNum::zeta(k as u32);
        for (i, e) in es.iter().enumerate() {
            let i = i + 1;
            let mut acc = PeriodicFn::zero(group.period());
            for s in 1..=k {
                acc = acc.add(&group.elements()[s - 1].scale(&omega.pow((i * s % k) as u32)));
            }
            ok &= &acc.scale(&CycloNum::from_rat(rat(1, k as i64))) == e;
        }
    }
    Ok(ok)
}

/// [T_m^i, T_n^j] = δ_ij[(m − n)T_{m+n}^i + δ_{m,−n}·m³b/(12k)] with T_0 shifted by
/// L(−1, e_i)/(2N), for all i, j and |m|, |n| ≤ `max_mode`.
pub fn verify_decomposition(group: &TwistGroup, max_mode: i64, cutoff: u32) -> Result<DecompositionReport> {
    let k = group.order();
    let nn = group.period() as i64;
    let es: Vec<PeriodicFn> = (1..=k).map(|i| group.projector(i)).collect::<Result<_>>()?;
    let b = group.b();
    let central_charge = b.scale(&rat(1, k as i64));
    let per: Vec<Result<Vec<CaseResult>>> = mode_pairs(max_mode)
        .into_par_iter()
        .map(|(m, n)| {
            let mut specs = Vec::new();
            for i in 0..k {
                for j in 0..k {
                    let (h, scalar) = if i == j {
                        let mut s = CycloNum::zero();
                        if m == -n {
                            // 2m·(shift of T_0) plus the central term m³b/(12k)
                            s = l_minus_one_formula(&es[i])
                                .scale(&rat(2 * m, 2 * nn))
                                .add(&central_charge.scale(&rat(m * m * m, 12)));
                        }
                        (es[i].clone(), s)
                    } else {
                        (PeriodicFn::zero(group.period()), CycloNum::zero())
                    };
                    specs.push(BracketSpec {
                        label: format!("T^{} T^{}", i + 1, j + 1),
                        f: es[i].clone(),
                        g: es[j].clone(),
                        h,
                        scalar,
                    });
                }
            }
            check_brackets(group.period(), 1, m, n, cutoff, &specs, false)
        })
        .collect();
    let mut cases = Vec::new();
    for r in per {
        cases.extend(r?);
    }
    Ok(DecompositionReport {
        central_charge: central_charge.to_string(),
        projectors_ok: verify_projectors(group)?,
        cases,
    })
}

/// (1/l)·τ_l(L_m^χ), with τ_l: a_k ↦ a_{lk}, 1 ↦ l, obeys the same twisted bracket.
pub fn scaling_embed_check(chi: &PeriodicFn, l: u32, m: i64, n: i64, cutoff: u32) -> Result<CaseResult> {
    if l == 0 {
        return Err(Error::InvalidArgument("scaling factor must be positive".into()));
    }
    let h = chi.mul(chi);
    let spec = BracketSpec {
        label: format!("scaled by l={l}"),
        f: chi.clone(),
        g: chi.clone(),
        scalar: twisted_central_term(&h, m, n),
        h,
    };
    let mut r = check_brackets(chi.period(), l, m, n, cutoff, &[spec], false)?;
    Ok(r.remove(0))
}

/// Exact sparse operator between degree slices.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedOperator {
    degree_shift: i64,
    truncation: u32,
    domain_cutoff: u32,
    columns: BTreeMap<FockState, BTreeMap<FockState, CycloNum>>,
}

impl GradedOperator {
    pub fn degree_shift(&self) -> i64 {
        self.degree_shift
    }

    /// Largest input degree on which the operator is stored.
    pub fn domain_cutoff(&self) -> u32 {
        self.domain_cutoff
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn entry(&self, input: &FockState, output: &FockState) -> CycloNum {
        self.columns.get(input).and_then(|c| c.get(output)).cloned().unwrap_or_else(CycloNum::zero)
    }

    /// Nonzero entries as (input, output, value).
    pub fn entries(&self) -> impl Iterator<Item = (&FockState, &FockState, &CycloNum)> {
        self.columns.iter().flat_map(|(i, c)| c.iter().map(move |(o, v)| (i, o, v)))
    }

    pub fn apply(&self, input: &FockState) -> Option<&BTreeMap<FockState, CycloNum>> {
        self.columns.get(input)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.values().all(|c| c.is_empty())
    }

    /// Grading exactness: every entry moves the degree by exactly the shift.
    pub fn respects_grading(&self) -> bool {
        self.entries().all(|(i, o, _)| o.degree() as i64 == i.degree() as i64 + self.degree_shift)
    }
}

fn materialize(terms: &[(Op, CycloNum)], shift: i64, truncation: u32) -> Result<GradedOperator> {
    if truncation > MAX_CUTOFF {
        return Err(Error::InvalidArgument(format!("cutoff {truncation} exceeds {MAX_CUTOFF}")));
    }
    let dom = truncation as i64 - shift.max(0);
    if dom < 0 {
        return Err(Error::CutoffTooSmall(format!("no input degree keeps the output below {truncation}")));
    }
    let mut space = Space::default();
    let ops: Vec<(usize, CycloNum)> = terms.iter().map(|(o, c)| (space.op(o.clone()), c.clone())).collect();
    let mut columns = BTreeMap::new();
    for st in fock_basis(dom as u32, None)? {
        let sid = space.id(st.parts.clone());
        let mut col: BTreeMap<FockState, CycloNum> = BTreeMap::new();
        for (op, c) in &ops {
            if c.is_zero() {
                continue;
            }
            for &(t, v) in space.apply_basis(*op, sid).iter() {
                let e = col.entry(space.state(t)).or_insert_with(CycloNum::zero);
                *e = e.add(&c.scale(&Rat::from_integer(BigInt::from(v))));
            }
        }
        col.retain(|_, v| !v.is_zero());
        columns.insert(st, col);
    }
    Ok(GradedOperator { degree_shift: shift, truncation, domain_cutoff: dom as u32, columns })
}

/// :a_{−j} a_{j+m}: on states of degree ≤ D.
pub fn normal_ordered_bilinear(j: i64, m: i64, cutoff: u32) -> Result<GradedOperator> {
    if j.abs() > cutoff as i64 || (j + m).abs() > cutoff as i64 {
        return Err(Error::InvalidArgument(format!("modes {} and {} exceed the cutoff", -j, j + m)));
    }
    materialize_pair(-j, j + m, cutoff)
}

fn materialize_pair(p: i64, q: i64, cutoff: u32) -> Result<GradedOperator> {
    let shift = -(p + q);
    let dom = cutoff as i64 - shift.max(0);
    if dom < 0 {
        return Err(Error::CutoffTooSmall(format!("no input degree keeps the output below {cutoff}")));
    }
    let mut columns = BTreeMap::new();
    for st in fock_basis(dom as u32, None)? {
        let mut col = BTreeMap::new();
        if p != 0 && q != 0 {
            if let Some((s, c)) = apply_normal_pair(&st.parts, p, q) {
                col.insert(FockState { parts: s }, CycloNum::from_rat(Rat::from_integer(BigInt::from(c))));
            }
        }
        columns.insert(st, col);
    }
    Ok(GradedOperator { degree_shift: shift, truncation: cutoff, domain_cutoff: dom as u32, columns })
}

/// L_n^χ = (1/2N)Σ_j χ(j):a_{−j}a_{j+nN}: on states up to degree D.
///
/// Odd χ gives the zero operator: the terms j and −j − nN cancel in pairs.
pub fn build_l(chi: &PeriodicFn, n: i64, cutoff: u32) -> Result<GradedOperator> {
    let modulus = chi.period();
    let nn = modulus as i64;
    if n.abs() * nn > cutoff as i64 {
        return Err(Error::CutoffTooSmall(format!("|n|·N = {} exceeds the cutoff {cutoff}", n.abs() * nn)));
    }
    if chi.is_odd() && !chi.is_even() {
        log::warn!("odd function: L_{n} is the zero operator");
        return materialize(&[], -n * nn, cutoff);
    }
    let terms: Vec<(Op, CycloNum)> = (0..modulus)
        .map(|t| {
            (
                Op::Bilinear { modulus, dil: 1, residues: vec![t], n },
                chi.eval(t as i64).scale(&rat(1, 2 * nn)),
            )
        })
        .collect();
    materialize(&terms, -n * nn, cutoff)
}

/// T_n^i together with the scalar L(−1, e_i)/(2N) carried by the shifted zero mode.
pub fn build_t(group: &TwistGroup, i: usize, n: i64, cutoff: u32, shifted: bool) -> Result<(GradedOperator, CycloNum)> {
    let e = group.projector(i)?;
    let op = build_l(&e, n, cutoff)?;
    let scalar = if shifted && n == 0 {
        l_minus_one_formula(&e).scale(&rat(1, 2 * group.period() as i64))
    } else {
        CycloNum::zero()
    };
    Ok((op, scalar))
}

fn compose(a: &GradedOperator, b: &GradedOperator, st: &FockState) -> BTreeMap<FockState, CycloNum> {
    let mut acc: BTreeMap<FockState, CycloNum> = BTreeMap::new();
    if let Some(col) = b.apply(st) {
        for (mid, c) in col {
            if let Some(col2) = a.apply(mid) {
                for (out, d) in col2 {
                    let e = acc.entry(out.clone()).or_insert_with(CycloNum::zero);
                    *e = e.add(&c.mul(d));
                }
            }
        }
    }
    acc
}

/// AB − BA on input degrees d ≤ D − |shift_A| − |shift_B|.
pub fn commutator(a: &GradedOperator, b: &GradedOperator) -> Result<GradedOperator> {
    let truncation = a.truncation.min(b.truncation);
    let window = truncation as i64 - a.degree_shift.abs() - b.degree_shift.abs();
    if window < 0 {
        return Err(Error::CutoffTooSmall(format!("window degree {window} is negative")));
    }
    let mut columns = BTreeMap::new();
    for st in fock_basis(window as u32, None)? {
        let mut col = compose(a, b, &st);
        for (out, v) in compose(b, a, &st) {
            let e = col.entry(out).or_insert_with(CycloNum::zero);
            *e = e.sub(&v);
        }
        col.retain(|_, v| !v.is_zero());
        columns.insert(st, col);
    }
    Ok(GradedOperator {
        degree_shift: a.degree_shift + b.degree_shift,
        truncation,
        domain_cutoff: window as u32,
        columns,
    })
}

/// ⟨μ|L_n^χ|λ⟩·⟨μ|μ⟩ = conj(⟨λ|L_{−n}^{χ̄}|μ⟩)·⟨λ|λ⟩ on all stored entries.
pub fn verify_adjoint(chi: &PeriodicFn, n: i64, cutoff: u32) -> Result<CaseResult> {
    let a = build_l(chi, n, cutoff)?;
    let b = build_l(&chi.conj(), -n, cutoff)?;
    let mut checked = 0;
    let nrm = |s: &FockState| Rat::from_integer(s.norm());
    for (input, col) in &a.columns {
        for (out, v) in col {
            if b.apply(out).is_none() {
                continue;
            }
            checked += 1;
            let lhs = v.scale(&nrm(out));
            let rhs = b.entry(out, input).conj().scale(&nrm(input));
            if lhs != rhs {
                return Ok(CaseResult {
                    label: format!("adjoint of L_{n}"),
                    passed: false,
                    states_checked: checked,
                    witness: Some(format!("{input} -> {out}: {lhs} vs {rhs}")),
                });
            }
        }
    }
    // entries of the adjoint with no partner in `a` must vanish
    for (input, col) in &b.columns {
        for (out, v) in col {
            if a.apply(out).is_some() && a.entry(out, input).is_zero() && !v.is_zero() {
                return Ok(CaseResult {
                    label: format!("adjoint of L_{n}"),
                    passed: false,
                    states_checked: checked,
                    witness: Some(format!("{out} -> {input} missing")),
                });
            }
        }
    }
    Ok(CaseResult { label: format!("adjoint of L_{n}"), passed: true, states_checked: checked, witness: None })
}

/// Vacuum energies of T_0^i.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VacuumEnergy {
    pub index: usize,
    pub residue: u32,
    /// (1/2k)Σ_s ω^{is}L(−1, χ^s), the constant in N·T_0^i.
    pub c: CycloNum,
    /// j(N − j)/(2N) − N/12 when N = 2k + 1.
    pub c_closed: Option<CycloNum>,
    /// ½L(−1, identity) − c.
    pub d: CycloNum,
    /// (2(k − j) + 1)²/(8(2k + 1)) − 1/24 when N = 2k + 1.
    pub d_closed: Option<CycloNum>,
    /// Whether χ(j) = ω^{k−i} holds for the generator χ = first element.
    pub dictionary_ok: bool,
}

pub fn vacuum_energies(group: &TwistGroup, i: usize) -> Result<VacuumEnergy> {
    let k = group.order();
    let nn = group.period() as i64;
    let j = group.index_residue(i)? as i64;
    let psi = &group.dual()[i - 1];
    let mut sum = CycloNum::zero();
    for (g, w) in group.elements().iter().zip(psi) {
        sum = sum.add(&w.mul(&l_minus_one(g)?));
    }
    let c = sum.scale(&rat(1, 2 * k as i64));
    let half_id = l_minus_one(group.identity())?.scale(&rat(1, 2));
    let d = half_id.sub(&c);
    let odd_family = nn == 2 * k as i64 + 1;
    let c_closed = odd_family.then(|| CycloNum::from_rat(rat(j * (nn - j), 2 * nn) - rat(nn, 12)));
    let d_closed = odd_family.then(|| {
        let kk = k as i64;
        let t = 2 * (kk - j) + 1;
        CycloNum::from_rat(rat(t * t, 8 * (2 * kk + 1)) - rat(1, 24))
    });
    let omega = CycloNum::zeta(k as u32);
    let dictionary_ok = group.elements()[0].eval(j) == &omega.pow(((k - i) % k) as u32);
    Ok(VacuumEnergy { index: i, residue: j as u32, c, c_closed, d, d_closed, dictionary_ok })
}

/// The three expressions for the fractional power of the i-th character.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FractionalPowers {
    pub modulus: u32,
    pub index: usize,
    pub residue: u32,
    #[serde(serialize_with = "crate::exactnum::ser_display")]
    pub closed: Rat,
    #[serde(serialize_with = "crate::exactnum::ser_display")]
    pub weight_minus_charge: Rat,
    pub l_combination: CycloNum,
    pub passed: bool,
}

/// Central charge 1 − 6(2k − 1)²/(4k + 2) of the (2, 2k+1) minimal model.
pub fn minimal_central_charge(k: i64) -> Rat {
    Rat::one() - rat(6 * (2 * k - 1) * (2 * k - 1), 4 * k + 2)
}

/// Highest weight ((2(k − i) + 1)² − (2k − 1)²)/(8(2k + 1)).
pub fn minimal_weight(k: i64, i: i64) -> Rat {
    let t = 2 * (k - i) + 1;
    rat(t * t - (2 * k - 1) * (2 * k - 1), 8 * (2 * k + 1))
}

/// (2(k−j)+1)²/(8(2k+1)) − 1/24 = h^{1,j} − c/24 = ½L(−1,χ^k) − (1/2k)Σ_s ω^{is}L(−1,χ^s).
pub fn verify_fractional_powers(modulus: u32, i: usize) -> Result<FractionalPowers> {
    if modulus < 5 || modulus.is_multiple_of(2) {
        return Err(Error::UnsupportedPeriod(modulus as i64));
    }
    let group = crate::characters::even_twist_group(modulus)?;
    let k = group.order() as i64;
    if i == 0 || i as i64 > k {
        return Err(Error::InvalidArgument(format!("index {i} outside 1..={k}")));
    }
    let v = vacuum_energies(&group, i)?;
    let j = v.residue as i64;
    let t = 2 * (k - j) + 1;
    let closed = rat(t * t, 8 * (2 * k + 1)) - rat(1, 24);
    let weight_minus_charge = minimal_weight(k, j) - minimal_central_charge(k) / int(24);
    // ½L(−1, χ^k) − (1/2k)Σ_s ω^{is} L(−1, χ^s) with χ^s the s-th power of the generator
    let omega = CycloNum::zeta(k as u32);
    let mut sum = CycloNum::zero();
    for s in 1..=k as usize {
        let w = omega.pow(((i * s) % k as usize) as u32);
        sum = sum.add(&w.mul(&l_minus_one(&group.elements()[s - 1])?));
    }
    let l_combination = l_minus_one(&group.elements()[k as usize - 1])?
        .scale(&rat(1, 2))
        .sub(&sum.scale(&rat(1, 2 * k)));
    let passed = closed == weight_minus_charge
        && l_combination == CycloNum::from_rat(closed.clone())
        && v.d == l_combination
        && v.dictionary_ok;
    Ok(FractionalPowers { modulus, index: i, residue: j as u32, closed, weight_minus_charge, l_combination, passed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TraceMode {
    /// q-trace of L_0^k − T_0^i on the T_0^i vacuum: parts ≢ 0, ±j (mod N).
    Character,
    /// q-trace of T_0^i on L_0^k − T_0^i = 0: parts ≡ ±j (mod N).
    Kernel,
}

/// q^{prefactor}·Σ_n coeffs[n] q^n.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QTrace {
    #[serde(serialize_with = "crate::exactnum::ser_display")]
    pub prefactor: Rat,
    pub coeffs: Vec<u64>,
}

impl QTrace {
    pub fn to_series(&self) -> crate::qseries::PuiseuxSeries {
        let c: Vec<i128> = self.coeffs.iter().map(|&x| x as i128).collect();
        crate::qseries::PuiseuxSeries::from_integers(&c, c.len() as i64 - 1).shift(&self.prefactor)
    }
}

/// Trace of q^{N·(eigenvalue) + vacuum energy} over the relevant partition states up to
/// degree D; eigenvalues are computed by applying the operators to each state.
pub fn qtrace(group: &TwistGroup, i: usize, mode: TraceMode, cutoff: u32) -> Result<QTrace> {
    let modulus = group.period();
    if cutoff < 2 * modulus {
        return Err(Error::CutoffTooSmall(format!("cutoff {cutoff} below 2N = {}", 2 * modulus)));
    }
    let v = vacuum_energies(group, i)?;
    let j = v.residue;
    let e = group.projector(i)?;
    let id = group.identity();
    let (allowed, op_fn, prefactor): (Vec<u32>, PeriodicFn, CycloNum) = match mode {
        TraceMode::Character => {
            let res = (1..modulus).filter(|&r| r != j && r != modulus - j && !id.eval(r as i64).is_zero()).collect();
            (res, id.add(&e.scale(&CycloNum::from_int(-1))), v.d.clone())
        }
        TraceMode::Kernel => (vec![j, modulus - j], e.clone(), v.c.clone()),
    };
    let prefactor = prefactor
        .is_rational()
        .ok_or_else(|| Error::Inconsistent(format!("vacuum energy {prefactor} is not rational")))?;
    let states = fock_basis(cutoff, Some((modulus, &allowed)))?;
    let mut space = Space::default();
    let ops: Vec<(usize, CycloNum)> = (0..modulus)
        .filter(|&t| !op_fn.eval(t as i64).is_zero())
        .map(|t| (space.op(Op::Bilinear { modulus, dil: 1, residues: vec![t], n: 0 }), op_fn.eval(t as i64).clone()))
        .collect();
    let mut coeffs = vec![0u64; cutoff as usize + 1];
    for st in states {
        let sid = space.id(st.parts.clone());
        // N × eigenvalue: (1/2N) factor times N
        let mut diag = CycloNum::zero();
        for (op, c) in &ops {
            for &(t, val) in space.apply_basis(*op, sid).iter() {
                if t != sid {
                    return Err(Error::Inconsistent(format!("{st} is not an eigenstate")));
                }
                diag = diag.add(&c.scale(&rat(val as i64, 2)));
            }
        }
        let g = diag.is_rational().filter(|g| g.is_integer() && !g.is_negative()).ok_or_else(|| {
            Error::Inconsistent(format!("grading {diag} of {st} is not a non-negative integer"))
        })?;
        let g = g.to_integer().to_usize().expect("small grading");
        if g <= cutoff as usize {
            coeffs[g] += 1;
        }
    }
    Ok(QTrace { prefactor, coeffs })
}

/// Partitions of n into parts from the allowed residues, by the product expansion.
pub fn restricted_partition_counts(modulus: u32, allowed: &[u32], order: usize) -> Vec<u64> {
    let mut c = vec![0u64; order + 1];
    c[0] = 1;
    for p in 1..=order {
        if allowed.contains(&(p as u32 % modulus)) {
            for n in p..=order {
                c[n] += c[n - p];
            }
        }
    }
    c
}
