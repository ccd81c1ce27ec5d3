//! Trace types: words over `{u, d}` with no `uu` factor that end in `d`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One step of a trace. `D < U` fixes the enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    D,
    U,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::D => 'd',
            Letter::U => 'u',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'd' => Ok(Letter::D),
            'u' => Ok(Letter::U),
            other => Err(Error::InvalidLetter(other)),
        }
    }
}

/// A validated trace type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TraceType {
    letters: Vec<Letter>,
}

impl TraceType {
    pub fn empty() -> Self {
        TraceType::default()
    }

    /// Validates the grammar: no `uu`, and a nonempty word ends in `d`.
    pub fn from_letters(letters: Vec<Letter>) -> Result<Self> {
        if let Some(i) = letters.windows(2).position(|w| w == [Letter::U, Letter::U]) {
            return Err(Error::ConsecutiveUps(i));
        }
        if letters.last() == Some(&Letter::U) {
            return Err(Error::DoesNotEndInD);
        }
        Ok(TraceType { letters })
    }

    pub(crate) fn from_letters_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(TraceType::from_letters(letters.clone()).is_ok());
        TraceType { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn count_u(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::U).count()
    }

    pub fn count_d(&self) -> usize {
        self.len() - self.count_u()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    /// Whether `letter` may be prepended without breaking the grammar.
    pub fn can_prepend(&self, letter: Letter) -> bool {
        match letter {
            Letter::D => true,
            Letter::U => self.first() == Some(Letter::D),
        }
    }

    pub fn prepend(&self, letter: Letter) -> Result<TraceType> {
        if !self.can_prepend(letter) {
            return Err(Error::InvalidExtension {
                letter: letter.as_char(),
                sigma: self.to_string(),
            });
        }
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(letter);
        letters.extend_from_slice(&self.letters);
        Ok(TraceType { letters })
    }
}

/// Parses a bare word such as `"uddud"`. The empty string is the empty type.
pub fn validate_type(word: &str) -> Result<TraceType> {
    word.parse()
}

impl FromStr for TraceType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>>>()?;
        TraceType::from_letters(letters)
    }
}

impl TryFrom<String> for TraceType {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TraceType> for String {
    fn from(t: TraceType) -> Self {
        t.to_string()
    }
}

impl fmt::Display for TraceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// All valid types of length `m` in lexicographic order, `d < u`.
pub fn enumerate_types(m: usize) -> TypeIter {
    TypeIter {
        current: Some(vec![Letter::D; m]),
    }
}

/// Iterator returned by [`enumerate_types`].
pub struct TypeIter {
    current: Option<Vec<Letter>>,
}

impl Iterator for TypeIter {
    type Item = TraceType;

    fn next(&mut self) -> Option<TraceType> {
        let word = self.current.take()?;
        let m = word.len();
        // Successor: bump the rightmost d that may become u, reset the tail.
        let mut next = word.clone();
        let bump = (0..m.saturating_sub(1))
            .rev()
            .find(|&i| next[i] == Letter::D && (i == 0 || next[i - 1] == Letter::D));
        if let Some(i) = bump {
            next[i] = Letter::U;
            for l in &mut next[i + 1..] {
                *l = Letter::D;
            }
            self.current = Some(next);
        }
        Some(TraceType::from_letters_unchecked(word))
    }
}

/// `F_1 = F_2 = 1`; `fibonacci(0)` is 0.
pub fn fibonacci(n: u32) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}
