//! The Collatz map, traces, and the rank map `C`.
//!
//! A trace is the run of iterates from a start value up to, but excluding,
//! the first power of two `2^j` with `j >= 1`. The value `1 = 2^0` does not
//! terminate a trace, so `trace(1) = [1]`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma::{Letter, TraceType};

/// Iteration limit used when the caller does not supply one.
pub const DEFAULT_GUARD: u64 = 1_000_000;

/// `true` for `2^j` with `j >= 1`.
pub fn is_power_of_two(x: &BigUint) -> bool {
    let bits = x.bits();
    bits > 1 && x.trailing_zeros() == Some(bits - 1)
}

/// One application of the Collatz map.
pub fn collatz_step(x: &BigUint) -> BigUint {
    if x.is_even() {
        x >> 1u32
    } else {
        x * 3u32 + 1u32
    }
}

/// A Collatz trace. Construct with [`trace`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    elements: Vec<BigUint>,
}

impl Trace {
    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn start(&self) -> &BigUint {
        &self.elements[0]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The power of two that follows the last element.
    pub fn terminal(&self) -> BigUint {
        collatz_step(self.elements.last().expect("traces are nonempty"))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, self.elements.iter())
    }
}

fn check_start(x: &BigUint) -> Result<()> {
    if x.is_zero() {
        return Err(Error::NonPositiveStart);
    }
    if is_power_of_two(x) {
        return Err(Error::PowerOfTwoStart(x.to_string()));
    }
    Ok(())
}

/// Iterates from `x` until the next value is a power of two.
pub fn trace(x: &BigUint, guard: u64) -> Result<Trace> {
    check_start(x)?;
    let mut elements = vec![x.clone()];
    let mut steps = 0u64;
    loop {
        let next = collatz_step(elements.last().unwrap());
        if is_power_of_two(&next) {
            return Ok(Trace { elements });
        }
        steps += 1;
        if steps >= guard {
            return Err(Error::GuardExceeded {
                start: x.to_string(),
                guard,
            });
        }
        elements.push(next);
    }
}

/// Like [`trace`], but gives up (returning `None`) once the trace is known
/// to be longer than `max_len`.
pub fn trace_bounded(x: &BigUint, max_len: usize) -> Result<Option<Trace>> {
    check_start(x)?;
    let mut elements = vec![x.clone()];
    loop {
        let next = collatz_step(elements.last().unwrap());
        if is_power_of_two(&next) {
            return Ok(Some(Trace { elements }));
        }
        if elements.len() >= max_len {
            return Ok(None);
        }
        elements.push(next);
    }
}

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(ranks: Vec<u32>) -> Result<Self> {
        let n = ranks.len();
        let mut seen = vec![false; n];
        for &r in &ranks {
            let r = r as usize;
            if r == 0 || r > n || seen[r - 1] {
                return Err(Error::NotAPermutation(n));
            }
            seen[r - 1] = true;
        }
        Ok(Permutation(ranks))
    }

    pub(crate) fn from_ranks_unchecked(ranks: Vec<u32>) -> Self {
        Permutation(ranks)
    }

    /// Ranks of `values` (smallest gets 1). `None` on ties.
    pub fn from_values<T: Ord>(values: &[T]) -> Option<Self> {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[i].cmp(&values[j]));
        if order.windows(2).any(|w| values[w[0]] == values[w[1]]) {
            return None;
        }
        let mut ranks = vec![0u32; values.len()];
        for (rank, &i) in order.iter().enumerate() {
            ranks[i] = rank as u32 + 1;
        }
        Some(Permutation(ranks))
    }

    pub fn ranks(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, self.0.iter())
    }
}

impl std::str::FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let ranks = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| Error::NotAPermutation(0)))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(ranks)
    }
}

fn write_joined<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = T>,
) -> fmt::Result {
    for (i, item) in items.enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// Replaces each element by its rank among all elements.
pub fn rank_permutation(elements: &[BigUint]) -> Result<Permutation> {
    Permutation::from_values(elements).ok_or(Error::DuplicateElements)
}

/// The Collatz permutation `C(x)`.
pub fn collatz_perm(x: &BigUint, guard: u64) -> Result<Permutation> {
    rank_permutation(trace(x, guard)?.elements())
}

/// Step letters of a trace: `u` at odd elements, `d` at even ones. The
/// final element's hidden `u` into the power of two is not included.
pub fn trace_type(t: &Trace) -> TraceType {
    let elems = t.elements();
    let letters = elems[..elems.len() - 1]
        .iter()
        .map(|x| if x.is_odd() { Letter::U } else { Letter::D })
        .collect();
    TraceType::from_letters_unchecked(letters)
}

/// Reads the type back off a permutation's rises and descents.
pub fn type_from_permutation(p: &Permutation) -> Result<TraceType> {
    let r = p.ranks();
    let letters: Vec<Letter> = r
        .windows(2)
        .map(|w| if w[0] < w[1] { Letter::U } else { Letter::D })
        .collect();
    if let Some(i) = letters
        .windows(2)
        .position(|w| w[0] == Letter::U && w[1] == Letter::U)
    {
        return Err(Error::NotCollatzPattern(i + 1));
    }
    TraceType::from_letters(letters)
}

/// `2^a` as a big integer.
pub fn pow2(a: u64) -> BigUint {
    BigUint::one() << a
}
