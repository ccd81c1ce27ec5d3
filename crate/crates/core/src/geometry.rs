//! Exact geometry of a type's line family.
//!
//! Each suffix form `(2^p t - b)/3^q` is a line in `t`. Reading the lines'
//! heights at `t = 2^a` gives the permutation for witness `a`; past the
//! rightmost pairwise crossing the order is fixed by the slopes `2^p/3^q`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::affine::{pow3, AffineForm, LineFamily};
use crate::collatz::{pow2, Permutation};
use crate::error::{Error, Result};
use crate::sigma::TraceType;
use crate::witness::validate_witness;

/// Reduced fraction with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn from_integer(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Lossy; for display only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl std::str::FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| format!("expected num/den, got {s:?}"))?;
        let n: BigInt = n.trim().parse().map_err(|e| format!("{e}"))?;
        let d: BigInt = d.trim().parse().map_err(|e| format!("{e}"))?;
        if d == BigInt::from(0) {
            return Err("zero denominator".into());
        }
        Ok(Rational::new(n, d))
    }
}

fn slope_key(l: &AffineForm, other_q: u32) -> BigInt {
    BigInt::from(pow2(l.p as u64) * pow3(other_q))
}

/// Abscissa where two lines cross:
/// `(3^q2 b1 - 3^q1 b2) / (2^p1 3^q2 - 2^p2 3^q1)`.
pub fn intersection(l1: &AffineForm, l2: &AffineForm) -> Result<Rational> {
    let den = slope_key(l1, l2.q) - slope_key(l2, l1.q);
    if den == BigInt::from(0) {
        return Err(Error::SameSlope);
    }
    let num = BigInt::from(pow3(l2.q) * &l1.b) - BigInt::from(pow3(l1.q) * &l2.b);
    Ok(Rational::new(num, den))
}

/// Rightmost crossing over all pairs of lines.
pub fn max_intersection_abscissa(f: &LineFamily) -> Result<Rational> {
    let lines = f.lines();
    if lines.len() < 2 {
        return Err(Error::FamilyTooSmall);
    }
    let mut best: Option<Rational> = None;
    for (i, l1) in lines.iter().enumerate() {
        for l2 in &lines[i + 1..] {
            let t = intersection(l1, l2)?;
            if best.as_ref().is_none_or(|b| t > *b) {
                best = Some(t);
            }
        }
    }
    Ok(best.unwrap())
}

/// `3^(k+1)`: no two lines of the family cross to the right of it.
pub fn crude_abscissa_bound(sigma: &TraceType) -> BigUint {
    pow3(sigma.count_u() as u32 + 1)
}

/// Compares slopes `2^p1/3^q1` and `2^p2/3^q2` exactly.
pub fn compare_slopes(l1: &AffineForm, l2: &AffineForm) -> Ordering {
    slope_key(l1, l2.q).cmp(&slope_key(l2, l1.q))
}

/// Line order beyond every crossing, read off the slopes.
pub fn asymptotic_permutation(f: &LineFamily) -> Result<Permutation> {
    let lines = f.lines();
    let mut order: Vec<usize> = (0..lines.len()).collect();
    order.sort_by(|&i, &j| compare_slopes(&lines[i], &lines[j]));
    if order
        .windows(2)
        .any(|w| compare_slopes(&lines[w[0]], &lines[w[1]]) == Ordering::Equal)
    {
        return Err(Error::SameSlope);
    }
    let mut ranks = vec![0u32; lines.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank as u32 + 1;
    }
    Ok(Permutation::from_ranks_unchecked(ranks))
}

/// Line order at `t = 2^a`, from the exact trace values.
pub fn permutation_at(f: &LineFamily, a: u64) -> Result<Permutation> {
    let sigma = f.sigma();
    let t = pow2(a);
    let not_witness = || Error::NotAWitness {
        sigma: sigma.to_string(),
        a,
    };
    let values = f
        .lines()
        .iter()
        .map(|l| l.eval(&t).ok_or_else(not_witness))
        .collect::<Result<Vec<BigInt>>>()?;
    let report = validate_witness(sigma, a);
    if let Some(failure) = report.failure {
        return Err(Error::DegenerateWitness {
            sigma: sigma.to_string(),
            a,
            reason: failure.to_string(),
        });
    }
    Permutation::from_values(&values).ok_or_else(|| Error::DegenerateWitness {
        sigma: sigma.to_string(),
        a,
        reason: "tied line values".into(),
    })
}

/// Whether `2^a > x`, decided exactly.
pub fn pow2_exceeds(a: u64, x: &Rational) -> bool {
    if !x.numer().is_positive() {
        return true;
    }
    // x < 2^(bits(num) - bits(den) + 1), and x >= 2^(bits(num) - bits(den) - 1).
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let a = a as i64;
    if a > nb - db + 1 {
        return true;
    }
    if a < nb - db - 1 {
        return false;
    }
    BigInt::from(pow2(a as u64)) * x.denom() > *x.numer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::suffix_lines;
    use crate::sigma::enumerate_types;
    use crate::witness::{first_valid_witness, witness_schedule, DEFAULT_WITNESS_CAP};

    fn ty(s: &str) -> TraceType {
        s.parse().unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn crossing_of_dd_lines() {
        let fam = suffix_lines(&ty("dd"));
        // (2A-2)/3 and (4A-4)/3 both vanish at A = 1.
        let t = intersection(fam.position(2), fam.position(1)).unwrap();
        assert_eq!(t, rat(1, 1));
        assert_eq!(t.to_string(), "1/1");
        assert_eq!(
            intersection(fam.position(1), fam.position(1)),
            Err(Error::SameSlope)
        );
    }

    #[test]
    fn max_abscissa_examples() {
        let fam = suffix_lines(&ty("dududd"));
        let x = max_intersection_abscissa(&fam).unwrap();
        assert_eq!(x, rat(25, 4));
        assert!(x < rat(13, 1));

        let x = max_intersection_abscissa(&suffix_lines(&ty("uddudududduddd"))).unwrap();
        assert_eq!(x, rat(1145, 26));
        assert!(rat(44, 1) < x && x < rat(441, 10));

        for m in 1..=10 {
            let s: TraceType = "d".repeat(m).parse().unwrap();
            assert_eq!(
                max_intersection_abscissa(&suffix_lines(&s)).unwrap(),
                rat(1, 1)
            );
        }

        let x = max_intersection_abscissa(&suffix_lines(&ty("uddud"))).unwrap();
        assert_eq!(x, rat(7, 1));

        assert_eq!(
            max_intersection_abscissa(&suffix_lines(&ty(""))),
            Err(Error::FamilyTooSmall)
        );
    }

    #[test]
    fn crude_bounds() {
        assert_eq!(
            crude_abscissa_bound(&ty("uddudududduddd")),
            BigUint::from(729u32)
        );
        assert_eq!(crude_abscissa_bound(&ty("dududd")), BigUint::from(27u32));
        assert_eq!(crude_abscissa_bound(&ty("d")), BigUint::from(3u32));
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(
            asymptotic_permutation(&suffix_lines(&ty("dududd"))).unwrap(),
            perm("4 1 6 3 7 5 2")
        );
        assert_eq!(
            asymptotic_permutation(&suffix_lines(&ty("uddudududduddd"))).unwrap(),
            perm("4 12 7 2 10 5 13 8 15 11 6 14 9 3 1")
        );
        for m in 0..=8usize {
            let s: TraceType = "d".repeat(m).parse().unwrap();
            let expected: Vec<u32> = (1..=m as u32 + 1).rev().collect();
            assert_eq!(
                asymptotic_permutation(&suffix_lines(&s)).unwrap().ranks(),
                &expected[..]
            );
        }
    }

    #[test]
    fn permutation_at_examples() {
        assert_eq!(
            permutation_at(&suffix_lines(&ty("dududd")), 8).unwrap(),
            perm("4 1 6 3 7 5 2")
        );
        assert_eq!(
            permutation_at(&suffix_lines(&ty("uddudududduddd")), 4).unwrap(),
            perm("3 12 7 2 10 5 13 8 15 11 6 14 9 4 1")
        );
        assert_eq!(
            permutation_at(&suffix_lines(&ty("uddudududduddd")), 490).unwrap(),
            perm("4 12 7 2 10 5 13 8 15 11 6 14 9 3 1")
        );
        assert_eq!(
            permutation_at(&suffix_lines(&ty("uddud")), 16).unwrap(),
            perm("2 6 4 1 5 3")
        );
        assert!(matches!(
            permutation_at(&suffix_lines(&ty("uddud")), 17),
            Err(Error::NotAWitness { .. })
        ));
        assert!(matches!(
            permutation_at(&suffix_lines(&ty("d")), 2),
            Err(Error::DegenerateWitness { .. })
        ));
    }

    /// Oracle for the asymptotic order: evaluate every line at a huge t
    /// (beyond the crude bound) with exact rationals.
    #[test]
    fn asymptotic_matches_evaluation_far_right() {
        for m in 0..=9 {
            for sigma in enumerate_types(m) {
                let fam = suffix_lines(&sigma);
                let t = BigInt::from(pow2(200));
                let values: Vec<BigRational> = fam
                    .lines()
                    .iter()
                    .map(|l| {
                        BigRational::new(
                            (&t << l.p) - BigInt::from(l.b.clone()),
                            BigInt::from(pow3(l.q)),
                        )
                    })
                    .collect();
                assert_eq!(
                    asymptotic_permutation(&fam).unwrap(),
                    Permutation::from_values(&values).unwrap()
                );
            }
        }
    }

    #[test]
    fn witness_beyond_crossings_gives_asymptotic_order() {
        for m in 1..=10 {
            for sigma in enumerate_types(m) {
                let fam = suffix_lines(&sigma);
                let xmax = max_intersection_abscissa(&fam).unwrap();
                let s = witness_schedule(&sigma).unwrap();
                let a0 = first_valid_witness(&sigma, DEFAULT_WITNESS_CAP).unwrap();
                let a = s
                    .iter()
                    .find(|&a| a >= a0 && pow2_exceeds(a, &xmax))
                    .unwrap();
                if a > 4000 {
                    continue;
                }
                assert_eq!(
                    permutation_at(&fam, a).unwrap(),
                    asymptotic_permutation(&fam).unwrap(),
                    "{sigma}"
                );
            }
        }
    }

    #[test]
    fn pow2_comparison() {
        assert!(!pow2_exceeds(4, &rat(1145, 26)));
        assert!(!pow2_exceeds(5, &rat(1145, 26)));
        assert!(pow2_exceeds(6, &rat(1145, 26)));
        assert!(!pow2_exceeds(2, &rat(4, 1)));
        assert!(pow2_exceeds(3, &rat(7, 1)));
        assert!(pow2_exceeds(0, &rat(-3, 2)));
        for a in 0..20u64 {
            for n in 1..200i64 {
                for d in [1i64, 2, 3, 7, 26] {
                    assert_eq!(
                        pow2_exceeds(a, &rat(n, d)),
                        (1i64 << a) * d > n,
                        "{a} {n}/{d}"
                    );
                }
            }
        }
    }

    #[test]
    fn rational_round_trip() {
        let r: Rational = "1145/26".parse().unwrap();
        assert_eq!(r, rat(1145, 26));
        assert_eq!(rat(4, 2).to_string(), "2/1");
        assert!("3/0".parse::<Rational>().is_err());
        assert!((rat(1145, 26).to_f64() - 44.0384).abs() < 1e-3);
    }
}
