//! Acceptance suite: one line per criterion, tolerances and runtime budgets pinned.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ltwist::characters::{dirichlet_characters, even_twist_group, legendre_character, PeriodicFn};
use ltwist::cocycle::{nullspace_dim, QuadField};
use ltwist::exactnum::{rat, CycloNum};
use ltwist::fock::{
    minimal_central_charge, qtrace, scaling_embed_check, verify_decomposition, verify_fractional_powers,
    verify_mode_bracket, verify_twisted_bracket_suite, CaseResult, TraceMode,
};
use ltwist::lvalues::{class_number_imag_quadratic, l_minus_one, l_zero};
use ltwist::qseries::{
    euler_check, jacobi_check, minimal_char, minimal_exponent, modular_s_check, specialize_triple_product,
    verify_theta_quotient,
};
use ltwist::report::{report_all, RunConfig, Status};
use ltwist::summation::{limit_exact_periodic, limit_numeric, partial_sum, replay_derivations, series, SeqSpec, Weight};
use ltwist::Result;

/// Criteria that cannot hold as stated; each is still run and reported as FAIL.
const KNOWN_FAILURES: &[(&str, &str)] = &[
    ("4b", "1-4+9-16+... has no iterated-average value 1/8: depth 2 oscillates near +-1/8, depth 3 tends to 0"),
    ("suite", "the full report contains the 1/8 check above"),
];

/// Report checks whose failure is the documented one.
const DOCUMENTED_REPORT_FAILURES: &[&str] = &["summation.alternating-squares"];

const CUTOFF: u32 = 30;
const CESARO_TERMS: usize = 100_000;
const CESARO_TOL: f64 = 1e-3;

struct Line {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> Result<(bool, String)>,
}

fn even_nontrivial(n: u32) -> Vec<PeriodicFn> {
    dirichlet_characters(n).into_iter().filter(|c| c.is_even() && c.is_mean_zero()).collect()
}

fn all_pass(cases: &[CaseResult]) -> (bool, Option<String>) {
    match cases.iter().find(|c| !c.passed) {
        Some(c) => (false, Some(format!("{}: {}", c.label, c.witness.clone().unwrap_or_default()))),
        None => (true, None),
    }
}

fn c1() -> Result<(bool, String)> {
    let l = l_zero(&legendre_character(7))?;
    let h = class_number_imag_quadratic(7)?;
    Ok((l == CycloNum::one() && h == 1, format!("L(0,(./7)) = {l}, h(-7) = {h}")))
}

fn c2() -> Result<(bool, String)> {
    let mut count = 0;
    for n in [5, 7, 9, 11, 12, 13, 15] {
        for chi in even_nontrivial(n) {
            let c = limit_exact_periodic(&chi, Weight::Const)?;
            let l = limit_exact_periodic(&chi, Weight::Linear)?;
            if c != l_zero(&chi)? || l != l_minus_one(&chi)? {
                return Ok((false, format!("mismatch at modulus {n}")));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} characters, exact equality")))
}

fn c3() -> Result<(bool, String)> {
    let mut worst = 0f64;
    let mut count = 0;
    for n in [5, 7, 9, 11, 12, 13] {
        for chi in even_nontrivial(n) {
            for (w, depth, exact) in [(Weight::Const, 1, l_zero(&chi)?), (Weight::Linear, 2, l_minus_one(&chi)?)] {
                let r = limit_numeric(&series(&chi, w), depth, CESARO_TERMS, CESARO_TOL)?;
                worst = worst.max((r.numeric_value().unwrap_or_default() - exact.to_complex64()).norm());
                count += 1;
            }
        }
    }
    Ok((worst < CESARO_TOL, format!("{count} limits, max error {worst:.2e} (tol {CESARO_TOL:e})")))
}

fn c4a() -> Result<(bool, String)> {
    let r = replay_derivations()?;
    let got: Vec<&str> = r.table.iter().map(|(_, v)| v.as_str()).collect();
    Ok((got == ["-1/2", "1/4", "-1/12"], format!("replayed values {}", got.join(", "))))
}

fn c4b() -> Result<(bool, String)> {
    let sq = partial_sum(SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[1, -1]), power: 2, shift: 0 });
    let mut seen = Vec::new();
    for depth in 1..=4 {
        match limit_numeric(&sq, depth, CESARO_TERMS, CESARO_TOL) {
            Ok(r) => {
                let v = r.numeric_value().unwrap_or_default().re;
                if (v - 0.125).abs() < CESARO_TOL {
                    return Ok((true, format!("depth {depth} gives {v:.6}")));
                }
                seen.push(format!("depth {depth} -> {v:.6}"));
            }
            Err(ltwist::Error::NoConvergence { spread, .. }) => seen.push(format!("depth {depth} spread {spread:.3}")),
            Err(e) => return Err(e),
        }
    }
    Ok((false, format!("want 1/8 within {CESARO_TOL:e}; {}", seen.join(", "))))
}

fn c5() -> Result<(bool, String)> {
    let mut total = 0;
    for n in [3, 5, 7] {
        let g = even_twist_group(n)?;
        let mut cases = verify_twisted_bracket_suite(&g, 2, CUTOFF)?;
        for k in -6..=6 {
            for m in -2..=2 {
                cases.extend(verify_mode_bracket(&g, k, m, CUTOFF)?);
            }
        }
        if let (false, w) = all_pass(&cases) {
            return Ok((false, format!("N={n}: {}", w.unwrap_or_default())));
        }
        total += cases.len();
    }
    Ok((true, format!("{total} exact cases at D={CUTOFF}")))
}

fn c6() -> Result<(bool, String)> {
    let mut notes = Vec::new();
    for n in [5, 7] {
        let rep = verify_decomposition(&even_twist_group(n)?, 2, CUTOFF)?;
        let (ok, w) = all_pass(&rep.cases);
        if !ok || !rep.projectors_ok || rep.central_charge != "2" {
            return Ok((false, format!("N={n}: c={} {}", rep.central_charge, w.unwrap_or_default())));
        }
        notes.push(format!("N={n}: {} cases, c=2 per copy", rep.cases.len()));
    }
    Ok((true, notes.join("; ")))
}

fn c7() -> Result<(bool, String)> {
    let mut n5 = Vec::new();
    for n in [5u32, 7, 9, 11, 13] {
        for i in 1..=(n as usize - 1) / 2 {
            let f = verify_fractional_powers(n, i)?;
            if !f.passed {
                return Ok((false, format!("N={n}, i={i}")));
            }
            if n == 5 {
                n5.push(f.closed.clone());
            }
        }
    }
    let ok = n5.contains(&rat(11, 60)) && n5.contains(&rat(-1, 60));
    Ok((ok, format!("three-way equality; N=5 values {}", n5.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "))))
}

fn c8() -> Result<(bool, String)> {
    for k in [2i64, 3] {
        let g = even_twist_group((2 * k + 1) as u32)?;
        for i in 1..=k as usize {
            let t = qtrace(&g, i, TraceMode::Character, 24)?;
            let j = g.index_residue(i)? as i64;
            if let Some(e) = t.to_series().first_difference(&minimal_char(k, j, 24)?) {
                return Ok((false, format!("k={k}, i={i}: differs at q^{e}")));
            }
        }
    }
    let ok = minimal_exponent(2, 1) == rat(11, 60)
        && minimal_exponent(2, 2) == rat(-1, 60)
        && minimal_central_charge(2) == rat(-22, 5);
    Ok((ok, "exact through q^24; exponents 11/60, -1/60, c = -22/5".into()))
}

fn c9() -> Result<(bool, String)> {
    let mut fails = Vec::new();
    if !euler_check(200).passed {
        fails.push("euler".to_string());
    }
    if !jacobi_check(60, 6).0.passed {
        fails.push("jacobi".to_string());
    }
    for k in 1..=3 {
        for j in 1..=k {
            if !specialize_triple_product(k, j, 50)?.2.passed {
                fails.push(format!("triple product {k},{j}"));
            }
            let r = verify_theta_quotient(k, j, 50)?;
            if !r.check.passed || !r.phases_cancel {
                fails.push(format!("theta quotient {k},{j}"));
            }
        }
    }
    Ok((fails.is_empty(), if fails.is_empty() { "all exact".into() } else { fails.join(", ") }))
}

fn c10() -> Result<(bool, String)> {
    let r = modular_s_check(2, 3, 400, 256)?;
    Ok((r.max_residual < 1e-6, format!("residual {:.2e} (bound 1e-6)", r.max_residual)))
}

fn c11() -> Result<(bool, String)> {
    for f in ["Q", "Q(sqrt2)", "Q(sqrt5)"] {
        for h in 3..=5 {
            let r = nullspace_dim(QuadField::parse(f)?, h)?;
            if !r.passed {
                return Ok((false, format!("{f}, H={h}: dimension {}", r.dimension)));
            }
        }
    }
    Ok((true, "dimension 2, basis {m, m^3}, heights 3..5".into()))
}

fn c12() -> Result<(bool, String)> {
    let chi = even_twist_group(3)?.elements()[0].clone();
    let mut cases = Vec::new();
    for l in [2, 3] {
        for (m, n) in [(1, -1), (1, 0)] {
            cases.push(scaling_embed_check(&chi, l, m, n, CUTOFF)?);
        }
    }
    let (ok, w) = all_pass(&cases);
    Ok((ok, w.unwrap_or_else(|| "exact for l = 2, 3".into())))
}

fn suite() -> Result<(bool, String)> {
    let r = report_all(&RunConfig::default())?;
    let failed: Vec<&str> = r.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.id.as_str()).collect();
    let detail = format!("{} checks, {} failed {:?}", r.checks.len(), r.failed, failed);
    if failed != DOCUMENTED_REPORT_FAILURES {
        // anything else failing is not covered by the documentation
        return Ok((false, format!("{detail} UNDOCUMENTED")));
    }
    Ok((r.failed == 0 && r.checks.len() >= 40, detail))
}

fn main() -> ExitCode {
    let lines = [
        Line { id: "1", title: "exact L-values, h(-7) = 1", budget: Duration::from_secs(1), run: c1 },
        Line { id: "2", title: "averaged sums equal L-values exactly", budget: Duration::from_secs(5), run: c2 },
        Line { id: "3", title: "numeric iterated averages", budget: Duration::from_secs(30), run: c3 },
        Line { id: "4a", title: "worked derivations replayed", budget: Duration::from_secs(10), run: c4a },
        Line { id: "4b", title: "1-4+9-16+... = 1/8", budget: Duration::from_secs(10), run: c4b },
        Line { id: "5", title: "mode and twisted brackets, N = 3, 5, 7", budget: Duration::from_secs(120), run: c5 },
        Line { id: "6", title: "decomposition into Virasoro copies", budget: Duration::from_secs(120), run: c6 },
        Line { id: "7", title: "fractional powers as L-value combinations", budget: Duration::from_secs(5), run: c7 },
        Line { id: "8", title: "Fock q-traces equal minimal characters", budget: Duration::from_secs(60), run: c8 },
        Line { id: "9", title: "series identities", budget: Duration::from_secs(60), run: c9 },
        Line { id: "10", title: "modular S span check", budget: Duration::from_secs(120), run: c10 },
        Line { id: "11", title: "cocycle space is {a m + b m^3}", budget: Duration::from_secs(60), run: c11 },
        Line { id: "12", title: "scaling symmetry", budget: Duration::from_secs(60), run: c12 },
        Line { id: "suite", title: "full report, zero failures", budget: Duration::from_secs(600), run: suite },
    ];
    let mut unexpected = Vec::new();
    for line in &lines {
        let t = Instant::now();
        let res = (line.run)();
        let el = t.elapsed();
        let (ok, detail) = match res {
            Ok((ok, d)) => (ok && el <= line.budget, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_FAILURES.iter().find(|(id, _)| *id == line.id).filter(|_| !detail.ends_with("UNDOCUMENTED"));
        println!(
            "{} criterion {:<5} {:<44} {} [{:.2}s / {}s]",
            if ok { "PASS" } else { "FAIL" },
            line.id,
            line.title,
            detail,
            el.as_secs_f64(),
            line.budget.as_secs()
        );
        match (ok, known) {
            (false, Some((_, why))) => println!("     documented: {why}"),
            (false, None) => unexpected.push(line.id),
            (true, Some(_)) => println!("     note: listed as a known failure but passed"),
            (true, None) => {}
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: no failures beyond the documented ones");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
