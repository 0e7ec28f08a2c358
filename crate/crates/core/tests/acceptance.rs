//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pfaff::cli::catalog::{self, Entry};
use pfaff::exactalg::{Polynomial, Rational, RationalMatrix};
use pfaff::integral::{character_report, point_frame, verify_integral_element, MaximalSearch, DEFAULT_SEARCH_LIMIT};
use pfaff::pfaffian::PfaffianSystem;
use pfaff::reduction::{trace_integral_curve, Direction};
use pfaff::testing::{random_form, random_point, random_poly};
use pfaff::DifferentialForm;

const RUNTIME_BUDGET: Duration = Duration::from_secs(1);
const TRACE_RESIDUAL: f64 = 1e-8;
const TRACE_AXIS_TOL: f64 = 1e-9;
const RANDOM_INTEGRABLE: usize = 100;
const GOURSAT_POINTS: usize = 5;
const PROPERTY_CASES: usize = 500;

type Verdict = Result<String, String>;

fn entry(name: &str) -> Entry {
    catalog::entry(name).unwrap_or_else(|| panic!("catalog entry {name}"))
}

/// All catalog expectations of an entry must hold.
fn catalog_checks(name: &str) -> Verdict {
    let outcomes = catalog::run_entry(&entry(name));
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{} @{}: expected {}, got {}", o.check, o.point, o.expected, o.actual))
        .collect();
    if failed.is_empty() {
        Ok(format!("{} checks", outcomes.len()))
    } else {
        Err(failed.join("; "))
    }
}

fn point_of(e: &Entry, name: &str) -> Vec<Rational> {
    e.document().point(name).expect("declared point").to_vec()
}

/// Point used for generic statements: `generic` when declared.
fn generic_point(e: &Entry) -> (String, Vec<Rational>) {
    let doc = e.document();
    match doc.point("generic") {
        Ok(p) => ("generic".into(), p.to_vec()),
        Err(_) => ("origin".into(), doc.point("origin").expect("origin").to_vec()),
    }
}

/// Chain character of the entry's designated chain at `p`.
fn designated_character(e: &Entry, p: &[Rational]) -> Result<pfaff::integral::CharacterReport, String> {
    let doc = e.document();
    let seeds = match e.designated_seed {
        Some(s) => doc.seed_at(s, p).map_err(|x| x.to_string())?,
        None => Vec::new(),
    };
    character_report(&e.system(), p, &seeds, DEFAULT_SEARCH_LIMIT).map_err(|x| x.to_string())
}

fn c1_system_a() -> Verdict {
    let start = Instant::now();
    let checks = catalog_checks("system-a")?;
    let elapsed = start.elapsed();
    if elapsed > RUNTIME_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{checks} in {elapsed:.2?}"))
}

fn c3_system_b() -> Verdict {
    let checks = catalog_checks("system-b")?;
    let e = entry("system-b");
    let origin = point_of(&e, "origin");
    let report = designated_character(&e, &origin)?;
    match &report.maximal {
        MaximalSearch::Found(m) => {
            let frame = point_frame(&e.system(), &origin).map_err(|x| x.to_string())?;
            let witness: Vec<Vec<Rational>> = m.witness.iter().map(|w| frame.to_ambient(w)).collect();
            if !verify_integral_element(&e.system(), &origin, &witness).map_err(|x| x.to_string())? {
                return Err("maximal witness is not an integral element".into());
            }
            Ok(format!(
                "{checks}; chain character {}, rho_max {} (certified {}) with verified witness",
                report.character_chain, m.rho_max, m.certified
            ))
        }
        MaximalSearch::Refused { .. } => Err("maximal search refused".into()),
    }
}

fn c4_system_b_tilde() -> Verdict {
    let checks = catalog_checks("system-b-tilde")?;
    let flag = entry("system-b-tilde").system().derived_flag();
    let drop = flag.ranks()[0] - flag.ranks()[1];
    if drop != 2 {
        return Err(format!("rank drop {drop}"));
    }
    Ok(format!("{checks}; rank drop 2"))
}

fn c5_system_c() -> Verdict {
    let checks = catalog_checks("system-c")?;
    let e = entry("system-c");
    let flag = e.system().derived_flag();
    if flag.first_derived().rank() != 0 {
        return Err(format!("derived rank {}", flag.first_derived().rank()));
    }
    let report = designated_character(&e, &point_of(&e, "origin"))?;
    Ok(format!(
        "{checks}; rank drop 3, chain character {}, singular flag {:?}",
        report.character_chain,
        report.singular_char2()
    ))
}

fn c6_gender() -> Verdict {
    let e = entry("system-a");
    let outcomes = catalog::run_entry(&e);
    let gender: Vec<_> = outcomes.iter().filter(|o| o.check.starts_with("gender of d(g)")).collect();
    if gender.len() != 2 {
        return Err("gender expectations missing".into());
    }
    for o in &gender {
        if !o.passed {
            return Err(format!("{}: expected {}, got {}", o.check, o.expected, o.actual));
        }
    }
    Ok(gender.iter().map(|o| format!("{} = {}", o.check, o.actual)).collect::<Vec<_>>().join(", "))
}

fn c7_darboux() -> Verdict {
    let mut errors = Vec::new();
    let mut done = Vec::new();
    for name in ["darboux-h1", "darboux-h2"] {
        match catalog_checks(name) {
            Ok(d) => done.push(format!("{name}: {d}")),
            Err(d) => errors.push(format!("{name}: {d}")),
        }
    }
    if errors.is_empty() {
        Ok(done.join("; "))
    } else {
        Err(errors.join("; "))
    }
}

fn c8_character_one() -> Verdict {
    let mut bad = Vec::new();
    let mut count = 0;
    for e in catalog::entries() {
        let (pname, p) = generic_point(&e);
        let flag = e.system().derived_flag();
        let ranks = flag.ranks();
        let drop = ranks[0] - ranks.get(1).copied().unwrap_or(ranks[0]);
        let report = designated_character(&e, &p)?;
        count += 1;
        if (report.character_chain == 1) != (drop == 1) {
            bad.push(format!(
                "{} @{pname}: character {}, rank drop {drop}",
                e.name, report.character_chain
            ));
        }
    }
    if bad.is_empty() {
        Ok(format!("{count} entries"))
    } else {
        Err(bad.join("; "))
    }
}

/// The three integrability tests on one system at one point.
fn integrability_agree(system: &PfaffianSystem, p: &[Rational]) -> Result<bool, String> {
    let gender_zero = system.system_gender_at(p, true).map_err(|e| e.to_string())? == 0;
    let frobenius = system.is_frobenius_integrable();
    let report = character_report(system, p, &[], DEFAULT_SEARCH_LIMIT).map_err(|e| e.to_string())?;
    let full = match report.rho_max() {
        Some(r) => r == system.nvars() - system.rank(),
        None => return Err("maximal search refused".into()),
    };
    if !(gender_zero == frobenius && frobenius == full) {
        return Err(format!("gender zero {gender_zero}, frobenius {frobenius}, full rho {full}"));
    }
    Ok(frobenius)
}

fn random_integrable(rng: &mut ChaCha8Rng) -> (PfaffianSystem, Vec<Rational>) {
    loop {
        let n = rng.gen_range(3..=5);
        let r = rng.gen_range(1..n);
        let differentials: Vec<DifferentialForm> = (0..r)
            .map(|j| {
                let f = &Polynomial::var(n, j) + &random_poly(rng, n, 3, 2);
                DifferentialForm::function(f).exterior_derivative()
            })
            .collect();
        let gens: Vec<DifferentialForm> = (0..r)
            .map(|_| {
                differentials.iter().fold(DifferentialForm::zero(n, 1), |acc, df| {
                    &acc + &df.scale(&random_poly(rng, n, 2, 1))
                })
            })
            .collect();
        let Ok(system) = PfaffianSystem::new(n, gens) else { continue };
        let p = random_point(rng, n);
        if system.check_point(&p).is_ok() {
            return (system, p);
        }
    }
}

fn c9_integrability() -> Verdict {
    let mut integrable = 0;
    for e in catalog::entries() {
        let (_, p) = generic_point(&e);
        if integrability_agree(&e.system(), &p).map_err(|x| format!("{}: {x}", e.name))? {
            integrable += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..RANDOM_INTEGRABLE {
        let (system, p) = random_integrable(&mut rng);
        if !integrability_agree(&system, &p).map_err(|x| format!("random system {i}: {x}"))? {
            return Err(format!("random system {i} is not integrable"));
        }
    }
    Ok(format!(
        "catalog ({integrable} integrable) and {RANDOM_INTEGRABLE} random integrable systems agree"
    ))
}

fn c10_goursat() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for name in ["goursat-2", "goursat-3"] {
        let system = entry(name).system();
        if !system.is_flag_system() {
            return Err(format!("{name} is not reported as a flag system"));
        }
        let (n, r) = (system.nvars(), system.rank());
        for _ in 0..GOURSAT_POINTS {
            let p = random_point(&mut rng, n);
            let report = character_report(&system, &p, &[], DEFAULT_SEARCH_LIMIT).map_err(|e| e.to_string())?;
            if report.character_chain != n - r - 1 {
                return Err(format!("{name}: character {} at {p:?}", report.character_chain));
            }
        }
    }
    Ok(format!("{GOURSAT_POINTS} random points on each chart"))
}

fn sign(n: usize, odd: bool) -> Polynomial {
    Polynomial::constant(n, Rational::from_integer(if odd { -1 } else { 1 }.into()))
}

fn c11_algebra() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 4;
    for case in 0..PROPERTY_CASES {
        let p = rng.gen_range(0..3);
        let q = rng.gen_range(0..3);
        let a = random_form(&mut rng, n, p, 3);
        let b = random_form(&mut rng, n, q, 3);
        if !a.exterior_derivative().exterior_derivative().is_zero() {
            return Err(format!("d∘d, case {case}"));
        }
        let ab = a.wedge(&b).map_err(|e| e.to_string())?;
        let ba = b.wedge(&a).map_err(|e| e.to_string())?;
        if ab != ba.scale(&sign(n, p * q % 2 == 1)) {
            return Err(format!("anticommutativity, case {case}"));
        }
        let lhs = ab.exterior_derivative();
        let rhs = &a.exterior_derivative().wedge(&b).map_err(|e| e.to_string())?
            + &a.wedge(&b.exterior_derivative()).map_err(|e| e.to_string())?.scale(&sign(n, p % 2 == 1));
        if lhs != rhs {
            return Err(format!("Leibniz, case {case}"));
        }
        let rows = rng.gen_range(1..6);
        let cols = rng.gen_range(1..7);
        let data: Vec<Vec<Rational>> = (0..rows).map(|_| random_point(&mut rng, cols)).collect();
        let m = RationalMatrix::from_rows((), cols, data).map_err(|e| e.to_string())?;
        let kernel = m.nullspace();
        let annihilated = kernel
            .iter()
            .all(|v| m.mul_vec(v).expect("lengths agree").iter().all(|x| *x == Rational::from_integer(0.into())));
        if m.rank() + kernel.len() != cols || m.transpose().rank() != m.rank() || !annihilated {
            return Err(format!("rank-nullity, case {case}"));
        }
    }
    Ok(format!("{PROPERTY_CASES} cases each of d∘d, Leibniz, anticommutativity, rank-nullity"))
}

fn c12_trace() -> Verdict {
    let system = entry("system-a").system();
    let start = Instant::now();
    let curve = trace_integral_curve(&system, &system.origin(), &Direction::Basis(0), 1e-3, 1000)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if curve.samples.len() != 1001 {
        return Err(format!("{} samples", curve.samples.len()));
    }
    for (k, s) in curve.samples.iter().enumerate() {
        let off_axis = [0, 1, 2, 4].iter().any(|&i| s[i].abs() > TRACE_AXIS_TOL);
        if off_axis || (s[3] - k as f64 * 1e-3).abs() > TRACE_AXIS_TOL {
            return Err(format!("sample {k} leaves the x4-axis: {s:?}"));
        }
    }
    if curve.max_residual > TRACE_RESIDUAL {
        return Err(format!("max residual {:e}", curve.max_residual));
    }
    if elapsed > RUNTIME_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("max residual {:e} in {elapsed:.2?}", curve.max_residual))
}

fn c13_determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_pfaff"))
            .args(["catalog", "run-all", "--json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    if a.stdout.is_empty() {
        return Err("empty output".into());
    }
    if a.stdout != b.stdout {
        return Err("outputs differ".into());
    }
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Verdict)> = vec![
        ("system A invariants", c1_system_a),
        ("system A with v3", || catalog_checks("system-a-tilde")),
        ("system B chain and maximal characters", c3_system_b),
        ("system B with v3", c4_system_b_tilde),
        ("system C zero derived system", c5_system_c),
        ("gender conventions", c6_gender),
        ("Darboux normal forms", c7_darboux),
        ("character one iff rank drop one", c8_character_one),
        ("integrability tests agree", c9_integrability),
        ("Goursat flags", c10_goursat),
        ("algebra properties", c11_algebra),
        ("curve tracing", c12_trace),
        ("determinism of catalog run-all", c13_determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = f();
        let took = start.elapsed();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
