//! Central cocycles of the Witt-type bracket [L_m, L_n] = (m − n)L_{m+n} indexed by O_K.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactnum::{int, Rat};
use crate::{Error, Result};

/// Q (d = 0) or Q(√d) for squarefree d ≠ 0, 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadField {
    d: i64,
}

/// a + b√d.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub a: Rat,
    pub b: Rat,
}

/// x + yω over the integral basis {1, ω}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem {
    pub x: i64,
    pub y: i64,
}

fn squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p * p))
}

impl QuadField {
    pub fn rational() -> Self {
        QuadField { d: 0 }
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !squarefree(d) {
            return Err(Error::InvalidArgument(format!("d = {d} is not a squarefree integer other than 0, 1")));
        }
        if d < 0 {
            log::warn!("Q(sqrt({d})) is not totally real; the cocycle system is built as a ring construction only");
        }
        Ok(QuadField { d })
    }

    /// Accepts Q, Q(i), Q(sqrtD), Q(sqrt-D), sqrtD or a bare integer d.
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        if t == "q" || t == "1" || t == "0" {
            return Ok(Self::rational());
        }
        if t == "q(i)" || t == "i" {
            return Self::quadratic(-1);
        }
        let inner = t.strip_prefix("q(").and_then(|r| r.strip_suffix(')')).unwrap_or(&t);
        let num = inner.strip_prefix("sqrt").unwrap_or(inner);
        let num = num.trim_start_matches('(').trim_end_matches(')');
        let d: i64 = num.parse().map_err(|_| Error::Parse(format!("unknown field '{s}'")))?;
        Self::quadratic(d)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn degree(&self) -> usize {
        if self.d == 0 {
            1
        } else {
            2
        }
    }

    /// ω = (1 + √d)/2 when d ≡ 1 (mod 4), else √d.
    pub fn half_omega(&self) -> bool {
        self.d != 0 && self.d.rem_euclid(4) == 1
    }

    pub fn is_totally_real(&self) -> bool {
        self.d >= 0
    }

    pub fn label(&self) -> String {
        match self.d {
            0 => "Q".into(),
            -1 => "Q(i)".into(),
            d => format!("Q(sqrt{d})"),
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { a: Rat::zero(), b: Rat::zero() }
    }

    pub fn from_rat(&self, r: Rat) -> FieldElem {
        FieldElem { a: r, b: Rat::zero() }
    }

    pub fn add(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        FieldElem { a: &x.a + &y.a, b: &x.b + &y.b }
    }

    pub fn sub(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        FieldElem { a: &x.a - &y.a, b: &x.b - &y.b }
    }

    pub fn mul(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        let d = int(self.d);
        FieldElem { a: &x.a * &y.a + d * &x.b * &y.b, b: &x.a * &y.b + &x.b * &y.a }
    }

    pub fn inv(&self, x: &FieldElem) -> Result<FieldElem> {
        let norm = &x.a * &x.a - int(self.d) * &x.b * &x.b;
        if norm.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(FieldElem { a: &x.a / &norm, b: -&x.b / &norm })
    }

    pub fn embed(&self, r: RingElem) -> FieldElem {
        if self.d == 0 {
            return self.from_rat(int(r.x));
        }
        if self.half_omega() {
            FieldElem { a: int(r.x) + Rat::new(r.y.into(), 2.into()), b: Rat::new(r.y.into(), 2.into()) }
        } else {
            FieldElem { a: int(r.x), b: int(r.y) }
        }
    }

    pub fn ring_mul(&self, p: RingElem, q: RingElem) -> RingElem {
        if self.d == 0 {
            return RingElem { x: p.x * q.x, y: 0 };
        }
        // ω² = d, or ω² = ω + (d − 1)/4
        let (w0, w1) = if self.half_omega() { ((self.d - 1) / 4, 1) } else { (self.d, 0) };
        let yy = p.y * q.y;
        RingElem { x: p.x * q.x + yy * w0, y: p.x * q.y + p.y * q.x + yy * w1 }
    }

    pub fn format(&self, x: &FieldElem) -> String {
        if x.b.is_zero() {
            return x.a.to_string();
        }
        let root = if self.d == -1 { "i".to_string() } else { format!("sqrt({})", self.d) };
        let bpart = if x.b.is_one() {
            root
        } else if (-&x.b).is_one() {
            format!("-{root}")
        } else {
            format!("{}*{root}", x.b)
        };
        if x.a.is_zero() {
            bpart
        } else if bpart.starts_with('-') {
            format!("{}{bpart}", x.a)
        } else {
            format!("{}+{bpart}", x.a)
        }
    }
}

impl FieldElem {
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl RingElem {
    pub fn new(x: i64, y: i64) -> Self {
        RingElem { x, y }
    }

    pub fn add(self, o: Self) -> Self {
        RingElem { x: self.x + o.x, y: self.y + o.y }
    }

    pub fn neg(self) -> Self {
        RingElem { x: -self.x, y: -self.y }
    }

    pub fn scale(self, k: i64) -> Self {
        RingElem { x: k * self.x, y: k * self.y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn height(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    /// Representative of {m, −m}, with the sign flip applied.
    fn canonical(self) -> (Self, bool) {
        if self.x > 0 || (self.x == 0 && self.y > 0) {
            (self, false)
        } else {
            (self.neg(), true)
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x, self.y) {
            (x, 0) => write!(f, "{x}"),
            (0, y) => write!(f, "{y}w"),
            (x, y) => write!(f, "{x}{:+}w", y),
        }
    }
}

/// Sparse coefficients and the pair (m, n) the row came from.
pub type Equation = (Vec<(usize, FieldElem)>, RingElem, RingElem);

/// Jacobi constraints on α over a height box; α(0) = 0 and α(−m) = −α(m) are built in.
#[derive(Clone, Debug)]
pub struct CocycleSystem {
    pub field: QuadField,
    pub height: i64,
    /// Box elements up to sign, sorted by height.
    pub unknowns: Vec<RingElem>,
    pub equations: Vec<Equation>,
    index: HashMap<RingElem, usize>,
}

impl CocycleSystem {
    pub fn box_size(&self) -> usize {
        2 * self.unknowns.len()
    }

    /// α values on the unknowns evaluated at a box element.
    pub fn value(&self, alpha: &[FieldElem], m: RingElem) -> FieldElem {
        if m.is_zero() {
            return self.field.zero();
        }
        let (c, flip) = m.canonical();
        let v = alpha[self.index[&c]].clone();
        if flip {
            self.field.sub(&self.field.zero(), &v)
        } else {
            v
        }
    }

    /// Vector m ↦ m^p on the unknowns.
    pub fn power_vector(&self, p: u32) -> Vec<FieldElem> {
        self.unknowns
            .iter()
            .map(|&m| {
                let e = self.field.embed(m);
                (1..p).fold(e.clone(), |acc, _| self.field.mul(&acc, &e))
            })
            .collect()
    }

    /// First equation not satisfied by alpha.
    pub fn violated(&self, alpha: &[FieldElem]) -> Option<(RingElem, RingElem)> {
        let f = &self.field;
        self.equations
            .iter()
            .find(|(row, _, _)| {
                let s = row.iter().fold(f.zero(), |acc, (i, c)| f.add(&acc, &f.mul(c, &alpha[*i])));
                !s.is_zero()
            })
            .map(|(_, m, n)| (*m, *n))
    }
}

/// (m − n)α(m+n) − (2n + m)α(m) + (n + 2m)α(n) = 0 for all m, n, m + n in the box.
pub fn build_system(field: QuadField, height: i64) -> Result<CocycleSystem> {
    if height < 3 {
        return Err(Error::InvalidArgument(format!("height {height} below 3")));
    }
    let ys = if field.degree() == 1 { 0..=0 } else { -height..=height };
    let mut elems = Vec::new();
    for x in -height..=height {
        for y in ys.clone() {
            let m = RingElem::new(x, y);
            if !m.is_zero() {
                elems.push(m);
            }
        }
    }
    let mut unknowns: Vec<RingElem> = elems.iter().copied().filter(|m| !m.canonical().1).collect();
    unknowns.sort_by_key(|m| (m.height(), m.x.abs() + m.y.abs(), m.y.abs(), m.x, m.y));
    let index: HashMap<RingElem, usize> = unknowns.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut equations = Vec::new();
    for &m in &elems {
        for &n in &elems {
            let s = m.add(n);
            if s.height() > height {
                continue;
            }
            let em = field.embed(m);
            let en = field.embed(n);
            let two = field.from_rat(int(2));
            let terms = [
                (s, field.sub(&em, &en)),
                (m, field.sub(&field.zero(), &field.add(&field.mul(&two, &en), &em))),
                (n, field.add(&en, &field.mul(&two, &em))),
            ];
            let mut row: BTreeMap<usize, FieldElem> = BTreeMap::new();
            for (e, c) in terms {
                if e.is_zero() {
                    continue;
                }
                let (can, flip) = e.canonical();
                let c = if flip { field.sub(&field.zero(), &c) } else { c };
                let slot = row.entry(index[&can]).or_insert_with(|| field.zero());
                *slot = field.add(slot, &c);
            }
            let row: Vec<(usize, FieldElem)> = row.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            if !row.is_empty() {
                equations.push((row, m, n));
            }
        }
    }
    Ok(CocycleSystem { field, height, unknowns, equations, index })
}

/// Fully reduced row echelon form kept sparse; pivots are the largest column of each row.
struct Rref {
    field: QuadField,
    rows: BTreeMap<usize, BTreeMap<usize, FieldElem>>,
}

impl Rref {
    fn reduce(&self, row: &[(usize, FieldElem)]) -> BTreeMap<usize, FieldElem> {
        let f = &self.field;
        let mut out: BTreeMap<usize, FieldElem> = BTreeMap::new();
        for (c, v) in row {
            if let Some(prow) = self.rows.get(c) {
                for (pc, pv) in prow {
                    if pc == c {
                        continue;
                    }
                    let slot = out.entry(*pc).or_insert_with(|| f.zero());
                    *slot = f.sub(slot, &f.mul(v, pv));
                }
            } else {
                let slot = out.entry(*c).or_insert_with(|| f.zero());
                *slot = f.add(slot, v);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    fn insert(&mut self, row: &[(usize, FieldElem)]) -> Result<bool> {
        let f = self.field;
        let r = self.reduce(row);
        let Some((&p, pv)) = r.iter().next_back() else {
            return Ok(false);
        };
        let inv = f.inv(pv)?;
        let r: BTreeMap<usize, FieldElem> = r.iter().map(|(c, v)| (*c, f.mul(v, &inv))).collect();
        for other in self.rows.values_mut() {
            if let Some(k) = other.remove(&p) {
                for (c, v) in &r {
                    if *c == p {
                        continue;
                    }
                    let slot = other.entry(*c).or_insert_with(|| f.zero());
                    *slot = f.sub(slot, &f.mul(&k, v));
                }
                other.retain(|_, v| !v.is_zero());
            }
        }
        self.rows.insert(p, r);
        Ok(true)
    }

    fn nullspace(&self, n: usize) -> Vec<Vec<FieldElem>> {
        let f = &self.field;
        (0..n)
            .filter(|c| !self.rows.contains_key(c))
            .map(|free| {
                let mut v = vec![f.zero(); n];
                v[free] = f.from_rat(Rat::one());
                for (p, row) in &self.rows {
                    if let Some(c) = row.get(&free) {
                        v[*p] = f.sub(&f.zero(), c);
                    }
                }
                v
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NullspaceReport {
    pub field: String,
    pub height: i64,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub dimension: usize,
    /// Basis vectors printed on the first few unknowns.
    pub basis: Vec<Vec<String>>,
    pub contains_m: bool,
    pub contains_m3: bool,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Exact null space of the system and its basis vectors.
pub fn solve_system(sys: &CocycleSystem) -> Result<(usize, Vec<Vec<FieldElem>>)> {
    if sys.equations.is_empty() {
        return Err(Error::InvalidArgument("empty system".into()));
    }
    let mut rref = Rref { field: sys.field, rows: BTreeMap::new() };
    for (row, _, _) in &sys.equations {
        rref.insert(row)?;
    }
    Ok((rref.rows.len(), rref.nullspace(sys.unknowns.len())))
}

pub fn nullspace_report(sys: &CocycleSystem) -> Result<NullspaceReport> {
    let (rank, basis) = solve_system(sys)?;
    let m1 = sys.power_vector(1);
    let m3 = sys.power_vector(3);
    let contains_m = sys.violated(&m1).is_none();
    let contains_m3 = sys.violated(&m3).is_none();
    let dimension = basis.len();
    let passed = dimension == 2 && contains_m && contains_m3;
    let witness = if passed {
        None
    } else if dimension > 2 {
        let extra = &basis[2];
        let support: Vec<String> =
            extra.iter().zip(&sys.unknowns).filter(|(v, _)| !v.is_zero()).map(|(_, m)| m.to_string()).collect();
        Some(format!("extra null vector supported on {}", support.join(",")))
    } else if !contains_m || !contains_m3 {
        let v = if contains_m { &m3 } else { &m1 };
        sys.violated(v).map(|(m, n)| format!("constraint at m={m}, n={n}"))
    } else {
        Some(format!("dimension {dimension}"))
    };
    let show = sys.unknowns.len().min(6);
    Ok(NullspaceReport {
        field: sys.field.label(),
        height: sys.height,
        unknowns: sys.unknowns.len(),
        equations: sys.equations.len(),
        rank,
        dimension,
        basis: basis
            .iter()
            .map(|v| {
                (0..show).map(|i| format!("a({})={}", sys.unknowns[i], sys.field.format(&v[i]))).collect()
            })
            .collect(),
        contains_m,
        contains_m3,
        passed,
        witness,
    })
}

pub fn nullspace_dim(field: QuadField, height: i64) -> Result<NullspaceReport> {
    nullspace_report(&build_system(field, height)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct LineRecursionReport {
    pub field: String,
    pub height: i64,
    pub lines: Vec<String>,
    pub vectors_checked: usize,
    pub points_checked: usize,
    pub interpolation_ok: bool,
    pub passed: bool,
    pub witness: Option<String>,
}

/// (m − 1)α((m+1)b) = (m + 2)α(mb) − (2m + 1)α(b) along each basis line b, for every null-space
/// basis vector and a seeded random combination; also fits a·m + b·m³ on the rational line.
pub fn verify_line_recursion(field: QuadField, height: i64, seed: u64) -> Result<LineRecursionReport> {
    if height < 4 {
        return Err(Error::InvalidArgument(format!("height {height} below 4")));
    }
    let sys = build_system(field, height)?;
    let (_, basis) = solve_system(&sys)?;
    let f = &sys.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = basis.clone();
    let mut combo = vec![f.zero(); sys.unknowns.len()];
    for v in &basis {
        let c = f.from_rat(int(rng.gen_range(-9..=9)));
        for (slot, x) in combo.iter_mut().zip(v) {
            *slot = f.add(slot, &f.mul(&c, x));
        }
    }
    vectors.push(combo.clone());
    let mut lines = vec![RingElem::new(1, 0)];
    if field.degree() == 2 {
        lines.push(RingElem::new(0, 1));
    }
    let mut points = 0;
    let mut witness = None;
    for alpha in &vectors {
        for &b in &lines {
            for m in -height..height {
                let hi = b.scale(m + 1);
                if hi.height() > height || b.scale(m).height() > height {
                    continue;
                }
                let lhs = f.mul(&f.from_rat(int(m - 1)), &sys.value(alpha, hi));
                let rhs = f.sub(
                    &f.mul(&f.from_rat(int(m + 2)), &sys.value(alpha, b.scale(m))),
                    &f.mul(&f.from_rat(int(2 * m + 1)), &sys.value(alpha, b)),
                );
                points += 1;
                if lhs != rhs && witness.is_none() {
                    witness = Some(format!("line {b}, m = {m}"));
                }
            }
        }
    }
    // a·m + b·m³ through m = 1, 2, then checked on 3..H
    let v1 = sys.value(&combo, RingElem::new(1, 0));
    let v2 = sys.value(&combo, RingElem::new(2, 0));
    // a + b = v1, 2a + 8b = v2
    let six_b = f.sub(&v2, &f.mul(&f.from_rat(int(2)), &v1));
    let bb = f.mul(&six_b, &f.from_rat(Rat::new(1.into(), 6.into())));
    let aa = f.sub(&v1, &bb);
    let interpolation_ok = (3..=height).all(|m| {
        let want = f.add(&f.mul(&aa, &f.from_rat(int(m))), &f.mul(&bb, &f.from_rat(int(m * m * m))));
        sys.value(&combo, RingElem::new(m, 0)) == want
    });
    if !interpolation_ok && witness.is_none() {
        witness = Some("random null vector does not fit a*m + b*m^3 on the rational line".into());
    }
    Ok(LineRecursionReport {
        field: field.label(),
        height,
        lines: lines.iter().map(|b| b.to_string()).collect(),
        vectors_checked: vectors.len(),
        points_checked: points,
        interpolation_ok,
        passed: witness.is_none(),
        witness,
    })
}

/// Value under the embedding √d > 0; None for imaginary fields.
pub fn embed_real(field: QuadField, x: &FieldElem) -> Option<f64> {
    if field.d < 0 {
        return None;
    }
    let a = crate::exactnum::rat_to_f64(&x.a);
    let b = crate::exactnum::rat_to_f64(&x.b);
    Some(a + b * (field.d as f64).sqrt())
}
