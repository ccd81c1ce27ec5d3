//! Per-type classification (one or two permutations) and the per-length
//! census built on it.
//!
//! A type yields at most two permutations: the one at its first valid
//! witness, and the slope-ordered one that every later witness produces,
//! since the second witness already lies past the crude crossing bound.
//! Permutations of different types never coincide (the type is recoverable
//! from the rises and descents), so the census only sums counts.

pub mod checkpoint;
pub mod kernel;
pub mod output;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::affine::{congruence, suffix_lines, Congruence};
use crate::collatz::{rank_permutation, trace_bounded, Permutation};
use crate::error::{Error, Result};
use crate::geometry::{
    asymptotic_permutation, max_intersection_abscissa, permutation_at, pow2_exceeds, Rational,
};
use crate::par::{map_ordered, Exec};
use crate::sigma::{fibonacci, Letter, TraceType};
use crate::witness::{first_valid_witness, witness_schedule, WitnessSchedule, DEFAULT_WITNESS_CAP};

use checkpoint::Checkpoint;
use kernel::{frontier, walk, Tables, Tally};

/// Largest permutation length the census accepts.
pub const MAX_CENSUS_LENGTH: usize = 34;

/// Depth at which the prepend tree is cut into independent work units.
pub const SPLIT_DEPTH: u32 = 12;

/// Work units between checkpoint writes when none is configured.
pub const DEFAULT_CHECKPOINT_CHUNK: usize = 64;

/// Everything known about one type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub sigma: TraceType,
    pub congruence: Congruence,
    pub schedule: WitnessSchedule,
    pub a_first: u64,
    pub perm_first: Permutation,
    pub perm_asymptotic: Permutation,
    /// Rightmost crossing; absent for the one-line family of the empty type.
    pub x_max: Option<Rational>,
    pub perm_count: u8,
}

impl Classification {
    pub fn is_et(&self) -> bool {
        self.perm_count == 2
    }

    /// First witness producing the slope-ordered permutation, when it
    /// differs from the first valid witness.
    pub fn second_witness(&self) -> Option<u64> {
        self.is_et().then(|| self.a_first + self.schedule.period)
    }
}

pub fn classify(sigma: &TraceType) -> Result<Classification> {
    let cong = congruence(sigma);
    let schedule = witness_schedule(sigma)?;
    let a_first = first_valid_witness(sigma, DEFAULT_WITNESS_CAP)?;
    let fam = suffix_lines(sigma);
    let x_max = match max_intersection_abscissa(&fam) {
        Ok(x) => Some(x),
        Err(Error::FamilyTooSmall) => None,
        Err(e) => return Err(e),
    };
    let perm_asymptotic = asymptotic_permutation(&fam)?;
    let past_crossings = x_max.as_ref().is_none_or(|x| pow2_exceeds(a_first, x));
    let perm_first = if past_crossings {
        perm_asymptotic.clone()
    } else {
        permutation_at(&fam, a_first)?
    };
    let perm_count = if perm_first == perm_asymptotic { 1 } else { 2 };
    Ok(Classification {
        sigma: sigma.clone(),
        congruence: cong,
        schedule,
        a_first,
        perm_first,
        perm_asymptotic,
        x_max,
        perm_count,
    })
}

/// Serializable summary of an excess-creating type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtRecord {
    pub sigma: TraceType,
    pub c: u64,
    pub modulus: u64,
    pub a_first: u64,
    pub perm_first: Permutation,
    pub perm_asymptotic: Permutation,
}

impl From<&Classification> for EtRecord {
    fn from(c: &Classification) -> Self {
        EtRecord {
            sigma: c.sigma.clone(),
            c: c.congruence
                .residue
                .to_u64()
                .expect("census residues fit in u64"),
            modulus: c
                .congruence
                .modulus
                .to_u64()
                .expect("census moduli fit in u64"),
            a_first: c.a_first,
            perm_first: c.perm_first.clone(),
            perm_asymptotic: c.perm_asymptotic.clone(),
        }
    }
}

/// One row of the census: permutations of length `length`, i.e. types of
/// length `length - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub length: usize,
    pub total: u64,
    pub excess: u64,
    pub types: u64,
    pub first_witness_skipped: u64,
    pub ets: Vec<EtRecord>,
}

impl CensusRow {
    pub fn et_count(&self) -> usize {
        self.ets.len()
    }

    fn from_tally(length: usize, tally: Tally) -> Self {
        let fib = fibonacci(length as u32).to_u64().expect("F_n fits in u64");
        let mut ets: Vec<EtRecord> = tally.ets.iter().map(EtRecord::from).collect();
        ets.sort_by(|a, b| a.sigma.cmp(&b.sigma));
        CensusRow {
            length,
            total: tally.perm_total,
            excess: tally.perm_total.saturating_sub(fib),
            types: tally.types,
            first_witness_skipped: tally.first_witness_skipped,
            ets,
        }
    }
}

/// Knobs for [`census_with`].
#[derive(Debug, Clone, Default)]
pub struct CensusOptions {
    pub exec: Exec,
    /// Checkpoint file read on start (if present) and rewritten as work
    /// completes.
    pub checkpoint: Option<PathBuf>,
    /// Work units per checkpoint write.
    pub chunk: Option<usize>,
}

pub fn census(n_min: usize, n_max: usize, exec: Exec) -> Result<Vec<CensusRow>> {
    census_with(
        n_min,
        n_max,
        &CensusOptions {
            exec,
            ..Default::default()
        },
    )
}

/// Classifies every type of length `n - 1` for each `n` in the range.
pub fn census_with(n_min: usize, n_max: usize, opts: &CensusOptions) -> Result<Vec<CensusRow>> {
    if n_min < 1 || n_min > n_max || n_max > MAX_CENSUS_LENGTH {
        return Err(Error::InvalidRange {
            min: n_min,
            max: n_max,
        });
    }
    let tables = Tables::new();
    let mut ckpt = match &opts.checkpoint {
        Some(path) if path.exists() => Checkpoint::load(path)?,
        _ => Checkpoint::new(),
    };
    if ckpt.split_depth != SPLIT_DEPTH {
        return Err(Error::Checkpoint(format!(
            "split depth {} does not match {}",
            ckpt.split_depth, SPLIT_DEPTH
        )));
    }
    let mut rows = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        if let Some(row) = ckpt.completed(n) {
            rows.push(row.clone());
            continue;
        }
        let row = census_length(n, &tables, opts, &mut ckpt)?;
        ckpt.complete(row.clone());
        if let Some(path) = &opts.checkpoint {
            ckpt.save(path)?;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn census_length(
    n: usize,
    tables: &Tables,
    opts: &CensusOptions,
    ckpt: &mut Checkpoint,
) -> Result<CensusRow> {
    let m = (n - 1) as u32;
    let roots = frontier(m.min(SPLIT_DEPTH), tables);
    let (mut tally, start) = ckpt.resume_point(n, &roots)?;
    let chunk = match (opts.chunk, &opts.checkpoint) {
        (Some(c), _) => c.max(1),
        (None, Some(_)) => DEFAULT_CHECKPOINT_CHUNK,
        (None, None) => roots.len().max(1),
    };
    let mut i = start;
    while i < roots.len() {
        let end = (i + chunk).min(roots.len());
        let parts = map_ordered(opts.exec, &roots[i..end], |root| {
            let mut t = Tally::default();
            walk(root, m, tables, &mut t).map(|_| t)
        });
        for part in parts {
            tally.merge(part?);
        }
        i = end;
        if let Some(path) = &opts.checkpoint {
            if i < roots.len() {
                ckpt.set_partial(n, &roots[i - 1], &tally);
                ckpt.save(path)?;
            }
        }
    }
    Ok(CensusRow::from_tally(n, tally))
}

/// All excess-creating types of length `m`, in lexicographic order.
pub fn et_list(m: usize, exec: Exec) -> Result<Vec<Classification>> {
    let tables = Tables::new();
    let m = m as u32;
    let roots = frontier(m.min(SPLIT_DEPTH), &tables);
    let parts = map_ordered(exec, &roots, |root| {
        let mut t = Tally::default();
        walk(root, m, &tables, &mut t).map(|_| t.ets)
    });
    let mut ets = Vec::new();
    for part in parts {
        ets.extend(part?);
    }
    ets.sort_by(|a, b| a.sigma.cmp(&b.sigma));
    Ok(ets)
}

/// Outcome of [`check_prepend_closure`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClosureReport {
    pub checked: usize,
    pub violations: Vec<TraceType>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `d·σ` is again excess-creating for every `σ` given.
pub fn check_prepend_closure(ets: &[TraceType]) -> Result<ClosureReport> {
    let mut report = ClosureReport::default();
    for sigma in ets {
        report.checked += 1;
        let extended = sigma.prepend(Letter::D)?;
        if !classify(&extended)?.is_et() {
            report.violations.push(sigma.clone());
        }
    }
    Ok(report)
}

/// Distinct permutations found by direct simulation, bucketed by length.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BruteForceCensus {
    /// `by_length[n - 1]` holds the permutations of length `n`.
    pub by_length: Vec<BTreeSet<Permutation>>,
    /// Start values whose simulation failed.
    pub skipped: Vec<(u64, Error)>,
}

impl BruteForceCensus {
    pub fn of_length(&self, n: usize) -> &BTreeSet<Permutation> {
        &self.by_length[n - 1]
    }
}

/// Simulates `C(x)` for every `x <= x_limit` that is not a power of two,
/// keeping permutations of length at most `n_max`.
pub fn brute_force_census(n_max: usize, x_limit: u64, exec: Exec) -> BruteForceCensus {
    const BLOCK: u64 = 1 << 14;
    let blocks: Vec<(u64, u64)> = (0..=x_limit / BLOCK)
        .map(|i| (i * BLOCK + 1, ((i + 1) * BLOCK).min(x_limit)))
        .filter(|(lo, hi)| lo <= hi)
        .collect();
    let parts = map_ordered(exec, &blocks, |&(lo, hi)| {
        let mut part = BruteForceCensus {
            by_length: vec![BTreeSet::new(); n_max],
            skipped: Vec::new(),
        };
        for x in lo..=hi {
            if x > 1 && x.is_power_of_two() {
                continue;
            }
            if let Some(short) = trace_bounded_u64(x, n_max) {
                if let Some(values) = short {
                    let p = Permutation::from_values(&values).expect("trace values are distinct");
                    part.by_length[p.len() - 1].insert(p);
                }
                continue;
            }
            match trace_bounded(&BigUint::from(x), n_max) {
                Ok(Some(t)) => match rank_permutation(t.elements()) {
                    Ok(p) => {
                        part.by_length[p.len() - 1].insert(p);
                    }
                    Err(e) => part.skipped.push((x, e)),
                },
                Ok(None) => {}
                Err(e) => part.skipped.push((x, e)),
            }
        }
        part
    });
    let mut out = BruteForceCensus {
        by_length: vec![BTreeSet::new(); n_max],
        skipped: Vec::new(),
    };
    for part in parts {
        for (acc, set) in out.by_length.iter_mut().zip(part.by_length) {
            acc.extend(set);
        }
        out.skipped.extend(part.skipped);
    }
    out
}

/// Machine-word version of [`trace_bounded`]; the outer `None` means the
/// iteration overflowed `u64`.
fn trace_bounded_u64(x: u64, max_len: usize) -> Option<Option<Vec<u64>>> {
    let is_pow2 = |v: u64| v > 1 && v.is_power_of_two();
    let mut values = vec![x];
    let mut cur = x;
    loop {
        let next = if cur.is_multiple_of(2) {
            cur / 2
        } else {
            cur.checked_mul(3)?.checked_add(1)?
        };
        if is_pow2(next) {
            return Some(Some(values));
        }
        if values.len() >= max_len {
            return Some(None);
        }
        values.push(next);
        cur = next;
    }
}

/// Every permutation of length `n` obtained analytically: one or two per
/// type of length `n - 1`.
pub fn analytic_permutations(n: usize) -> Result<BTreeSet<Permutation>> {
    let mut out = BTreeSet::new();
    for sigma in crate::sigma::enumerate_types(n - 1) {
        let c = classify(&sigma)?;
        out.insert(c.perm_first);
        out.insert(c.perm_asymptotic);
    }
    Ok(out)
}

/// Tally of congruence residues across excess-creating types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResidueReport {
    pub by_c: BTreeMap<BigUint, usize>,
    pub by_c_mod_729: BTreeMap<u64, usize>,
}

pub fn c_residue_report<'a>(ets: impl IntoIterator<Item = &'a Classification>) -> ResidueReport {
    let mut report = ResidueReport::default();
    for et in ets {
        let c = &et.congruence.residue;
        *report.by_c.entry(c.clone()).or_default() += 1;
        let small = (c % 729u32).to_u64().unwrap();
        *report.by_c_mod_729.entry(small).or_default() += 1;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collatz::{collatz_perm, DEFAULT_GUARD};
    use crate::sigma::enumerate_types;
    use crate::witness::start_value;

    fn ty(s: &str) -> TraceType {
        s.parse().unwrap()
    }

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn classify_shortest_et() {
        let c = classify(&ty("uddudududduddd")).unwrap();
        assert_eq!(c.perm_count, 2);
        assert_eq!(c.a_first, 4);
        assert_eq!(c.second_witness(), Some(490));
        assert_eq!(c.congruence.residue, BigUint::from(16u32));
        assert_eq!(c.congruence.modulus, BigUint::from(729u32));
        assert_eq!(c.perm_first, perm("3 12 7 2 10 5 13 8 15 11 6 14 9 4 1"));
        assert_eq!(
            c.perm_asymptotic,
            perm("4 12 7 2 10 5 13 8 15 11 6 14 9 3 1")
        );
    }

    #[test]
    fn classify_single_permutation_types() {
        let c = classify(&ty("dududd")).unwrap();
        assert_eq!(c.perm_count, 1);
        assert_eq!(c.perm_first, perm("4 1 6 3 7 5 2"));
        assert_eq!(c.second_witness(), None);

        let c = classify(&ty("d")).unwrap();
        assert_eq!(c.perm_count, 1);
        assert_eq!(c.a_first, 4);
        assert_eq!(c.perm_first, perm("2 1"));

        let c = classify(&ty("")).unwrap();
        assert_eq!(c.perm_count, 1);
        assert_eq!(c.x_max, None);
        assert_eq!(c.perm_first, perm("1"));
    }

    /// Oracle: every start value up to 10^4 whose type is `d` gives `2 1`.
    #[test]
    fn type_d_by_simulation() {
        for x in 1..=10_000u64 {
            let x = BigUint::from(x);
            if let Ok(t) = crate::collatz::trace(&x, DEFAULT_GUARD) {
                if crate::collatz::trace_type(&t) == ty("d") {
                    assert_eq!(rank_permutation(t.elements()).unwrap(), perm("2 1"));
                }
            }
        }
    }

    #[test]
    fn first_permutation_matches_simulation() {
        for m in 0..=10 {
            for sigma in enumerate_types(m) {
                let c = classify(&sigma).unwrap();
                let x = start_value(&sigma, c.a_first).unwrap();
                assert_eq!(
                    collatz_perm(&x, DEFAULT_GUARD).unwrap(),
                    c.perm_first,
                    "{sigma}"
                );
                if let Some(x_max) = &c.x_max {
                    if pow2_exceeds(c.a_first, x_max) {
                        assert_eq!(c.perm_count, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_counts_match_classify() {
        let tables = Tables::new();
        for m in 0..=15u32 {
            let mut tally = Tally::default();
            walk(&kernel::Node::root(), m, &tables, &mut tally).unwrap();
            let expected: u64 = enumerate_types(m as usize)
                .map(|s| classify(&s).unwrap().perm_count as u64)
                .sum();
            assert_eq!(tally.perm_total, expected, "m = {m}");
        }
    }

    #[test]
    fn small_rows() {
        let rows = census(1, 16, Exec::Sequential).unwrap();
        let totals: Vec<u64> = rows.iter().map(|r| r.total).collect();
        assert_eq!(
            totals,
            vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 611, 989]
        );
        assert_eq!(rows[14].excess, 1);
        assert_eq!(rows[15].excess, 2);
        for r in &rows {
            assert_eq!(r.excess as usize, r.et_count());
        }
        assert!(matches!(
            census(0, 3, Exec::Sequential),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            census(4, 3, Exec::Sequential),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            census(1, 35, Exec::Sequential),
            Err(Error::InvalidRange { .. })
        ));
    }

    #[test]
    fn et_lists() {
        let names = |m| {
            et_list(m, Exec::Parallel)
                .unwrap()
                .iter()
                .map(|c| c.sigma.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(14), vec!["uddudududduddd"]);
        assert!(names(13).is_empty());
        let l15 = names(15);
        assert_eq!(l15.len(), 2);
        assert!(l15.contains(&"duddudududduddd".to_string()));
    }

    #[test]
    fn closure_examples() {
        let r = check_prepend_closure(&[ty("uddudududduddd")]).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 1);
        assert!(check_prepend_closure(&[]).unwrap().passed());
    }

    #[test]
    fn brute_force_small() {
        let bf = brute_force_census(7, 1_000_000, Exec::Parallel);
        let sizes: Vec<usize> = bf.by_length.iter().map(BTreeSet::len).collect();
        // ududud first appears at x = 26512143.
        assert_eq!(sizes, vec![1, 1, 2, 3, 5, 8, 12]);
        assert!(bf.skipped.is_empty());

        let bf = brute_force_census(5, 10_000, Exec::Sequential);
        assert!(bf.of_length(5).contains(&perm("5 3 1 4 2")));
        let bf = brute_force_census(1, 5, Exec::Sequential);
        assert_eq!(
            bf.of_length(1).iter().cloned().collect::<Vec<_>>(),
            vec![perm("1")]
        );
    }

    #[test]
    fn brute_force_reaches_fibonacci_at_length_seven() {
        let bf = brute_force_census(7, 30_000_000, Exec::Parallel);
        let sizes: Vec<usize> = bf.by_length.iter().map(BTreeSet::len).collect();
        assert_eq!(sizes, vec![1, 1, 2, 3, 5, 8, 13]);
    }

    #[test]
    #[ignore = "scans 10^8 start values"]
    fn brute_force_table_one_limit() {
        let bf = brute_force_census(7, 100_000_000, Exec::Parallel);
        let sizes: Vec<usize> = bf.by_length.iter().map(BTreeSet::len).collect();
        assert_eq!(sizes, vec![1, 1, 2, 3, 5, 8, 13]);
    }

    #[test]
    fn u64_and_big_simulation_agree() {
        for x in (1..5000u64).filter(|&x| x == 1 || !x.is_power_of_two()) {
            let small = trace_bounded_u64(x, 30).unwrap();
            let big = trace_bounded(&BigUint::from(x), 30).unwrap();
            assert_eq!(
                small,
                big.map(|t| t.elements().iter().map(|v| v.to_u64().unwrap()).collect())
            );
        }
        assert_eq!(trace_bounded_u64(u64::MAX, 5), None);
    }

    #[test]
    fn residue_report() {
        let ets = et_list(14, Exec::Sequential).unwrap();
        let r = c_residue_report(&ets);
        assert_eq!(
            r.by_c.into_iter().collect::<Vec<_>>(),
            vec![(BigUint::from(16u32), 1)]
        );
        assert_eq!(r.by_c_mod_729.get(&16), Some(&1));
        let empty: Vec<Classification> = Vec::new();
        assert_eq!(c_residue_report(&empty), ResidueReport::default());
    }
}
