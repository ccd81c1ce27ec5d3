//! Witnesses: powers of two `A = 2^a` at which a type's trace ends.
//!
//! A type with `k` u's has the integrality condition `A ≡ c (mod 3^(k+1))`.
//! Because 2 generates the units modulo every power of 3, the solutions are
//! `a = a0 + j·2·3^k`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

use crate::affine::{congruence, suffix_lines};
use crate::collatz::{collatz_step, is_power_of_two, pow2};
use crate::error::{Error, Result};
use crate::sigma::{Letter, TraceType};

/// How many schedule entries [`first_valid_witness`] inspects by default.
pub const DEFAULT_WITNESS_CAP: u32 = 4;

/// Order of 2 modulo `3^e`, i.e. `2·3^(e-1)`.
pub fn pow2_order_mod_pow3(e: u32) -> u64 {
    assert!(e >= 1);
    3u64.checked_pow(e - 1)
        .and_then(|x| x.checked_mul(2))
        .expect("exponent too large for a u64 schedule")
}

/// Least `a >= 1` with `2^a ≡ c (mod 3^e)`.
///
/// Solves modulo 3 first (the parity of `a`), then lifts one ternary digit
/// per level: if `r` solves the congruence modulo `3^(j-1)`, exactly one of
/// `r`, `r + P`, `r + 2P` (with `P = 2·3^(j-2)`) solves it modulo `3^j`.
pub fn discrete_log_pow2(c: &BigUint, e: u32) -> Result<u64> {
    assert!(e >= 1, "modulus exponent must be positive");
    let three = BigUint::from(3u32);
    if (c % &three).is_zero() {
        return Err(Error::NotAUnit(c.to_string()));
    }
    let two = BigUint::from(2u32);
    let mut r: u64 = if c % &three == BigUint::from(1u32) {
        0
    } else {
        1
    };
    let mut modulus = three.clone();
    for j in 2..=e {
        modulus *= &three;
        let prev_order = pow2_order_mod_pow3(j - 1);
        let target = c % &modulus;
        r = (0..3u64)
            .map(|t| r + t * prev_order)
            .find(|&cand| two.modpow(&BigUint::from(cand), &modulus) == target)
            .expect("2 is a primitive root modulo powers of 3");
    }
    Ok(if r == 0 { pow2_order_mod_pow3(e) } else { r })
}

/// The arithmetic progression `a0 + j·period` of witness exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WitnessSchedule {
    pub a0: u64,
    pub period: u64,
    pub k: u32,
}

impl WitnessSchedule {
    pub fn nth(&self, j: u64) -> u64 {
        self.a0 + j * self.period
    }

    pub fn contains(&self, a: u64) -> bool {
        a >= self.a0 && (a - self.a0).is_multiple_of(self.period)
    }

    pub fn iter(self) -> impl Iterator<Item = u64> {
        (0..).map(move |j| self.nth(j))
    }
}

impl fmt::Display for WitnessSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a = {} + {}j", self.a0, self.period)
    }
}

pub fn witness_schedule(sigma: &TraceType) -> Result<WitnessSchedule> {
    let cong = congruence(sigma);
    let a0 = discrete_log_pow2(&cong.residue, cong.exponent)?;
    Ok(WitnessSchedule {
        a0,
        period: pow2_order_mod_pow3(cong.exponent),
        k: cong.exponent - 1,
    })
}

fn to_biguint(x: BigInt) -> Option<BigUint> {
    match x.sign() {
        Sign::Plus => x.to_biguint(),
        _ => None,
    }
}

/// Start value `Σ(2^a)` of the trace ending at `(2^a - 1)/3`.
pub fn start_value(sigma: &TraceType, a: u64) -> Result<BigUint> {
    let form = crate::affine::sigma_to_affine(sigma);
    form.eval_at_pow2(a)
        .and_then(to_biguint)
        .ok_or_else(|| Error::NotAWitness {
            sigma: sigma.to_string(),
            a,
        })
}

/// Reason a candidate witness does not produce a genuine trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessFailure {
    NotInSchedule,
    NotPositive { position: usize },
    PowerOfTwo { position: usize, value: BigUint },
    ForwardMismatch { position: usize },
    Repeated { position: usize },
}

impl fmt::Display for WitnessFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessFailure::NotInSchedule => write!(f, "congruence not satisfied"),
            WitnessFailure::NotPositive { position } => {
                write!(f, "value at position {position} is not positive")
            }
            WitnessFailure::PowerOfTwo { position, value } => {
                if *position == 1 {
                    write!(f, "start value {value} is a power of two")
                } else {
                    write!(f, "value {value} at position {position} is a power of two")
                }
            }
            WitnessFailure::ForwardMismatch { position } => {
                write!(f, "forward iteration diverges at position {position}")
            }
            WitnessFailure::Repeated { position } => {
                write!(f, "value at position {position} repeats an earlier one")
            }
        }
    }
}

/// Outcome of [`validate_witness`]; `values` holds the reconstructed trace
/// when every line was integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub a: u64,
    pub values: Vec<BigUint>,
    pub failure: Option<WitnessFailure>,
}

impl WitnessReport {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }
}

/// Reconstructs the trace at `A = 2^a` from the line family and checks it
/// against forward Collatz iteration.
pub fn validate_witness(sigma: &TraceType, a: u64) -> WitnessReport {
    let fail = |values, failure| WitnessReport {
        a,
        values,
        failure: Some(failure),
    };
    let fam = suffix_lines(sigma);
    let mut values = Vec::with_capacity(fam.len());
    for (i, line) in fam.lines().iter().enumerate() {
        match line.eval_at_pow2(a) {
            None => return fail(Vec::new(), WitnessFailure::NotInSchedule),
            Some(v) => match to_biguint(v) {
                Some(v) => values.push(v),
                None => return fail(Vec::new(), WitnessFailure::NotPositive { position: i + 1 }),
            },
        }
    }
    if let Some(i) = values.iter().position(is_power_of_two) {
        let value = values[i].clone();
        return fail(
            values,
            WitnessFailure::PowerOfTwo {
                position: i + 1,
                value,
            },
        );
    }
    let mut seen = HashSet::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        if !seen.insert(v) {
            return fail(values.clone(), WitnessFailure::Repeated { position: i + 1 });
        }
    }
    for i in 0..values.len() {
        let next = collatz_step(&values[i]);
        let expected = values.get(i + 1).cloned().unwrap_or_else(|| pow2(a));
        if next != expected {
            return fail(values, WitnessFailure::ForwardMismatch { position: i + 1 });
        }
    }
    WitnessReport {
        a,
        values,
        failure: None,
    }
}

/// Validity test used on the census path.
///
/// For `A = 2^a >= 16` an integral witness is always genuine: a power of two
/// inside the trace could only be followed by further powers of two and 1,
/// never by the odd final element `(A - 1)/3 >= 5`; parities are forced by
/// the line shapes, and distinctness follows from reaching `A`. Only `a = 2`
/// needs the full reconstruction.
pub fn is_valid_witness(sigma: &TraceType, a: u64, schedule: &WitnessSchedule) -> bool {
    if !schedule.contains(a) {
        return false;
    }
    a >= 4 || validate_witness(sigma, a).is_valid()
}

/// Smallest schedule entry passing [`is_valid_witness`].
pub fn first_valid_witness(sigma: &TraceType, cap: u32) -> Result<u64> {
    let schedule = witness_schedule(sigma)?;
    schedule
        .iter()
        .take(cap as usize)
        .find(|&a| is_valid_witness(sigma, a, &schedule))
        .ok_or_else(|| Error::NoValidWitnessWithinCap {
            sigma: sigma.to_string(),
            cap,
        })
}

/// Same as [`first_valid_witness`] but runs the full reconstruction on
/// every candidate.
pub fn first_valid_witness_exhaustive(sigma: &TraceType, cap: u32) -> Result<u64> {
    let schedule = witness_schedule(sigma)?;
    schedule
        .iter()
        .take(cap as usize)
        .find(|&a| validate_witness(sigma, a).is_valid())
        .ok_or_else(|| Error::NoValidWitnessWithinCap {
            sigma: sigma.to_string(),
            cap,
        })
}

/// Whether the start value is odd, read off the type alone.
pub fn start_is_odd(sigma: &TraceType) -> bool {
    matches!(sigma.first(), None | Some(Letter::U))
}

/// Decimal digit count of `x` (at most one too many), for display.
pub fn approx_digits(x: &BigUint) -> u64 {
    (x.bits() as f64 * std::f64::consts::LOG10_2).floor() as u64 + 1
}
