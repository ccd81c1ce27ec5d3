//! Self-check suites behind `collatz verify`.

use std::fmt::Write as _;

use collatz_perm::census::analytic_permutations;
use collatz_perm::census::output::to_csv;
use collatz_perm::geometry::permutation_at;
use collatz_perm::{
    brute_force_census, census, check_prepend_closure, classify, collatz_perm, enumerate_types,
    fibonacci, start_value, suffix_lines, validate_witness, witness_schedule, CensusRow, Exec,
    Permutation, TraceType, DEFAULT_GUARD,
};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::reference::reference_row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn record(&mut self, name: &str, result: Result<(), String>) {
        self.checks.push(Check {
            name: name.to_string(),
            failure: result.err(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            match &c.failure {
                None => writeln!(out, "PASS {}", c.name).unwrap(),
                Some(why) => writeln!(out, "FAIL {}: {why}", c.name).unwrap(),
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        writeln!(
            out,
            "{} checks, {} passed, {failed} failed",
            self.checks.len(),
            self.checks.len() - failed
        )
        .unwrap();
        out
    }
}

fn expect_eq<T: PartialEq + std::fmt::Display>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want}"))
    }
}

fn perm_of(x: u64) -> Result<Permutation, String> {
    collatz_perm(&BigUint::from(x), DEFAULT_GUARD).map_err(|e| format!("C({x}): {e}"))
}

fn ty(s: &str) -> TraceType {
    s.parse().expect("built-in type literal")
}

fn check_perm(x: u64, want: &str) -> Result<(), String> {
    expect_eq(
        &format!("C({x})"),
        perm_of(x)?.to_string(),
        want.to_string(),
    )
}

fn worked_example() -> Result<(), String> {
    let sigma = ty("uddud");
    let c = classify(&sigma).map_err(|e| e.to_string())?;
    expect_eq("c", c.congruence.residue.to_string(), "7".into())?;
    expect_eq("modulus", c.congruence.modulus.to_string(), "27".into())?;
    let s = witness_schedule(&sigma).map_err(|e| e.to_string())?;
    expect_eq("least witness", s.a0, 16)?;
    expect_eq("first valid witness", c.a_first, 16)?;
    let x = start_value(&sigma, 16).map_err(|e| e.to_string())?;
    expect_eq("start value", x.to_string(), "19417".into())?;
    let values: Vec<String> = validate_witness(&sigma, 16)
        .values
        .iter()
        .map(|v| v.to_string())
        .collect();
    expect_eq(
        "trace",
        values.join(" "),
        "19417 58252 29126 14563 43690 21845".into(),
    )?;
    expect_eq("perm", c.perm_first.to_string(), "2 6 4 1 5 3".into())?;
    expect_eq("perm count", c.perm_count, 1)
}

fn shortest_et() -> Result<(), String> {
    let c = classify(&ty("uddudududduddd")).map_err(|e| e.to_string())?;
    expect_eq("perm count", c.perm_count, 2)?;
    expect_eq(
        "first perm",
        c.perm_first.to_string(),
        "3 12 7 2 10 5 13 8 15 11 6 14 9 4 1".into(),
    )?;
    expect_eq(
        "asymptotic perm",
        c.perm_asymptotic.to_string(),
        "4 12 7 2 10 5 13 8 15 11 6 14 9 3 1".into(),
    )?;
    expect_eq("c", c.congruence.residue.to_string(), "16".into())?;
    expect_eq("modulus", c.congruence.modulus.to_string(), "729".into())?;
    expect_eq("first witness", c.a_first, 4)?;
    expect_eq("second witness", c.second_witness().unwrap_or(0), 490)?;
    let x = c.x_max.ok_or("no crossings")?;
    expect_eq("x_max", x.to_string(), "1145/26".into())
}

fn fibonacci_rows(rows: &[CensusRow]) -> Result<(), String> {
    for r in rows {
        let f = fibonacci(r.length as u32).to_u64().unwrap_or(u64::MAX);
        expect_eq(&format!("total at n={}", r.length), r.total, f)?;
        expect_eq(&format!("excess at n={}", r.length), r.excess, 0)?;
    }
    Ok(())
}

fn reference_rows(rows: &[CensusRow]) -> Result<(), String> {
    for r in rows {
        let (total, excess) = reference_row(r.length)
            .ok_or_else(|| format!("no reference row for n={}", r.length))?;
        expect_eq(&format!("total at n={}", r.length), r.total, total)?;
        expect_eq(&format!("excess at n={}", r.length), r.excess, excess)?;
    }
    Ok(())
}

/// Geometric permutation at the first valid witness against simulation.
pub fn simulation_agrees(max_type_len: usize) -> Result<usize, String> {
    let mut checked = 0;
    for m in 0..=max_type_len {
        for sigma in enumerate_types(m) {
            let c = classify(&sigma).map_err(|e| e.to_string())?;
            let x = start_value(&sigma, c.a_first).map_err(|e| e.to_string())?;
            let sim = collatz_perm(&x, DEFAULT_GUARD).map_err(|e| e.to_string())?;
            let geo =
                permutation_at(&suffix_lines(&sigma), c.a_first).map_err(|e| e.to_string())?;
            if sim != geo || sim != c.perm_first {
                return Err(format!("{sigma}: simulation {sim}, geometry {geo}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Brute-force permutation sets are subsets of the analytic sets, whose
/// sizes are the Fibonacci numbers while no excess exists.
pub fn brute_force_within_analytic(n_max: usize, x_limit: u64, exec: Exec) -> Result<(), String> {
    let bf = brute_force_census(n_max, x_limit, exec);
    if let Some((x, e)) = bf.skipped.first() {
        return Err(format!("simulation of {x} failed: {e}"));
    }
    for n in 1..=n_max {
        let analytic = analytic_permutations(n).map_err(|e| e.to_string())?;
        let f = fibonacci(n as u32).to_usize().unwrap_or(usize::MAX);
        expect_eq(&format!("analytic size at n={n}"), analytic.len(), f)?;
        if let Some(p) = bf.of_length(n).difference(&analytic).next() {
            return Err(format!("simulated permutation {p} has no type"));
        }
    }
    Ok(())
}

fn closure(rows: &[CensusRow]) -> Result<(), String> {
    let ets: Vec<TraceType> = rows
        .iter()
        .flat_map(|r| r.ets.iter().map(|e| e.sigma.clone()))
        .collect();
    let report = check_prepend_closure(&ets).map_err(|e| e.to_string())?;
    if report.checked == 0 {
        return Err("no excess-creating types found".into());
    }
    match report.violations.first() {
        None => Ok(()),
        Some(s) => Err(format!("d{s} is not excess-creating")),
    }
}

pub fn run(level: Level, exec: Exec) -> Report {
    let mut r = Report::default();
    r.record("C(12) = 5 3 1 4 2", check_perm(12, "5 3 1 4 2"));
    r.record("C(908) = 5 3 1 4 2", check_perm(908, "5 3 1 4 2"));
    r.record(
        "C(5) = C(21) = C(85) = 1",
        [5, 21, 85].iter().try_for_each(|&x| check_perm(x, "1")),
    );
    r.record("C(19417) = 2 6 4 1 5 3", check_perm(19417, "2 6 4 1 5 3"));
    r.record(
        "C(9) = 3 12 7 2 10 5 13 8 15 11 6 14 9 4 1",
        check_perm(9, "3 12 7 2 10 5 13 8 15 11 6 14 9 4 1"),
    );
    r.record("type uddud worked example", worked_example());
    r.record("shortest excess-creating type", shortest_et());
    let small = census(1, 14, exec).map_err(|e| e.to_string());
    r.record(
        "census n=1..14 equals Fibonacci",
        small.and_then(|rows| fibonacci_rows(&rows)),
    );
    if level == Level::Quick {
        return r;
    }

    let rows = census(15, 24, exec).map_err(|e| e.to_string());
    r.record(
        "census n=15..24 matches reference table",
        rows.as_ref()
            .map_err(Clone::clone)
            .and_then(|rows| reference_rows(rows)),
    );
    r.record(
        "simulation agrees with geometry for types up to length 9",
        simulation_agrees(9).map(|_| ()),
    );
    r.record(
        "brute force up to 10^6 within analytic sets for n <= 10",
        brute_force_within_analytic(10, 1_000_000, exec),
    );
    r.record(
        "d-prepend closure for type lengths 14..22",
        rows.as_ref()
            .map_err(Clone::clone)
            .and_then(|rows| closure(&rows[..rows.len().saturating_sub(1)])),
    );
    let seq = census(1, 24, Exec::Sequential).map(|rows| to_csv(&rows));
    let par = census(1, 24, Exec::Parallel).map(|rows| to_csv(&rows));
    r.record(
        "sequential and parallel CSV identical",
        match (seq, par) {
            (Ok(a), Ok(b)) if a == b => Ok(()),
            (Ok(_), Ok(_)) => Err("outputs differ".into()),
            (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
        },
    );
    r
}
