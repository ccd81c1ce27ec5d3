//! Text reports for `trace`, `perm`, `type-info`, `et-list` and `census`.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use collatz_perm::census::output::{to_csv, to_json};
use collatz_perm::census::CensusOptions;
use collatz_perm::witness::{approx_digits, validate_witness};
use collatz_perm::{
    c_residue_report, census_with, classify, collatz_perm, et_list, rank_permutation,
    sigma_to_affine, start_value, trace, trace_type, witness_schedule, EtRecord, Exec, TraceType,
    MAX_CENSUS_LENGTH,
};
use num_bigint::BigUint;

use crate::{CliError, CliResult};

/// Witness exponents above this are not expanded into full traces.
pub const MAX_EXPANDED_EXPONENT: u64 = 4096;

pub fn cmd_trace(x: &BigUint, guard: u64) -> CliResult<String> {
    let t = trace(x, guard)?;
    let p = rank_permutation(t.elements())?;
    Ok(format!(
        "trace: {t}\ntype: {}\nperm: {p}\n",
        display_type(&trace_type(&t))
    ))
}

pub fn cmd_perm(xs: &[BigUint], guard: u64) -> CliResult<String> {
    let mut out = String::new();
    for x in xs {
        let p = collatz_perm(x, guard)?;
        if xs.len() == 1 {
            writeln!(out, "{p}").unwrap();
        } else {
            writeln!(out, "{x}: {p}").unwrap();
        }
    }
    Ok(out)
}

fn display_type(t: &TraceType) -> String {
    if t.is_empty() {
        "-".into()
    } else {
        t.to_string()
    }
}

pub fn cmd_type_info(sigma: &TraceType) -> CliResult<String> {
    let class = classify(sigma)?;
    let schedule = witness_schedule(sigma)?;
    let form = sigma_to_affine(sigma);
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "type: {}", display_type(sigma)).unwrap();
    writeln!(
        w,
        "length: {} (permutation length {})",
        sigma.len(),
        sigma.len() + 1
    )
    .unwrap();
    writeln!(w, "u count: {}", sigma.count_u()).unwrap();
    writeln!(w, "affine: {form}  (p, q, b) = {}", form.triple()).unwrap();
    writeln!(w, "congruence: {}", class.congruence).unwrap();
    writeln!(w, "c: {}", class.congruence.residue).unwrap();
    writeln!(w, "modulus: {}", class.congruence.modulus).unwrap();
    writeln!(w, "schedule: {schedule}").unwrap();
    writeln!(w, "least witness: 2^{}", schedule.a0).unwrap();
    if class.a_first != schedule.a0 {
        let report = validate_witness(sigma, schedule.a0);
        let reason = report
            .failure
            .map(|f| f.to_string())
            .unwrap_or_else(|| "rejected".into());
        writeln!(w, "least witness rejected: {reason}").unwrap();
    }
    writeln!(w, "first valid witness: 2^{}", class.a_first).unwrap();
    if class.a_first <= MAX_EXPANDED_EXPONENT {
        let x = start_value(sigma, class.a_first)?;
        writeln!(w, "start value: {x}").unwrap();
        let values = validate_witness(sigma, class.a_first).values;
        let joined: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        writeln!(w, "trace: {}", joined.join(" ")).unwrap();
    } else {
        writeln!(
            w,
            "start value: about {} digits (not expanded)",
            (class.a_first as f64 * std::f64::consts::LOG10_2).ceil() as u64
        )
        .unwrap();
    }
    match &class.x_max {
        Some(x) => writeln!(w, "x_max: {x} (≈{:.2})", x.to_f64()).unwrap(),
        None => writeln!(w, "x_max: none (single line)").unwrap(),
    }
    writeln!(
        w,
        "crude bound: {}",
        collatz_perm::crude_abscissa_bound(sigma)
    )
    .unwrap();
    writeln!(w, "permutations: {}", class.perm_count).unwrap();
    writeln!(w, "perm (a={}): {}", class.a_first, class.perm_first).unwrap();
    if let Some(a2) = class.second_witness() {
        writeln!(w, "perm (a={a2}): {}", class.perm_asymptotic).unwrap();
        if a2 <= MAX_EXPANDED_EXPONENT {
            let x2 = start_value(sigma, a2)?;
            writeln!(w, "second start value: {} digits", approx_digits(&x2)).unwrap();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

pub fn cmd_et_list(m: usize, format: Format, exec: Exec) -> CliResult<String> {
    if m + 1 > MAX_CENSUS_LENGTH {
        return Err(CliError::usage(format!(
            "type length {m} exceeds the cap of {}",
            MAX_CENSUS_LENGTH - 1
        )));
    }
    let ets = et_list(m, exec)?;
    if format == Format::Json {
        let records: Vec<EtRecord> = ets.iter().map(EtRecord::from).collect();
        let mut s = serde_json::to_string_pretty(&records).expect("records serialize");
        s.push('\n');
        return Ok(s);
    }
    let mut out = String::new();
    writeln!(out, "excess-creating types of length {m}: {}", ets.len()).unwrap();
    for c in &ets {
        writeln!(
            out,
            "{}  c={} mod {}  a={}  first: {}  asymptotic: {}",
            c.sigma,
            c.congruence.residue,
            c.congruence.modulus,
            c.a_first,
            c.perm_first,
            c.perm_asymptotic
        )
        .unwrap();
    }
    let report = c_residue_report(&ets);
    if !report.by_c.is_empty() {
        let dist: Vec<String> = report
            .by_c
            .iter()
            .map(|(c, n)| format!("{c}:{n}"))
            .collect();
        writeln!(out, "c distribution: {}", dist.join(" ")).unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CensusArgs {
    pub min: usize,
    pub max: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub resume: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Runs the census. The table goes to `--out` when given (with a summary on
/// stdout), otherwise to stdout.
pub fn cmd_census(args: &CensusArgs) -> CliResult<String> {
    if args.min < 1 || args.min > args.max || args.max > MAX_CENSUS_LENGTH {
        return Err(CliError::usage(format!(
            "need 1 <= min <= max <= {MAX_CENSUS_LENGTH}, got min={} max={}",
            args.min, args.max
        )));
    }
    if args.threads == Some(0) {
        return Err(CliError::usage("--threads must be positive"));
    }
    if let Some(path) = &args.out {
        // Fail before the long computation, not after.
        fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::new(crate::exit::OUTPUT, format!("{}: {e}", path.display())))?;
    }
    let opts = CensusOptions {
        exec: Exec::from_threads(args.threads),
        checkpoint: args.resume.clone(),
        chunk: None,
    };
    let rows = census_with(args.min, args.max, &opts)?;
    let table = match args.format {
        Format::Json => to_json(&rows),
        Format::Csv | Format::Text => to_csv(&rows),
    };
    let Some(path) = &args.out else {
        return Ok(table);
    };
    fs::write(path, &table)
        .map_err(|e| CliError::new(crate::exit::OUTPUT, format!("{}: {e}", path.display())))?;
    let mut out = String::new();
    writeln!(
        out,
        "lengths {}..={}: {} rows written to {}",
        args.min,
        args.max,
        rows.len(),
        path.display()
    )
    .unwrap();
    for r in &rows {
        let skipped = if r.first_witness_skipped > 0 {
            format!(
                "  (least witness degenerate for {} types)",
                r.first_witness_skipped
            )
        } else {
            String::new()
        };
        writeln!(
            out,
            "n={:>2}  total={:>8}  excess={:>3}  ets={:>3}{skipped}",
            r.length,
            r.total,
            r.excess,
            r.et_count()
        )
        .unwrap();
    }
    Ok(out)
}
