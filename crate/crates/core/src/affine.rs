//! Compositions of the inverse steps `U(x) = (x - 1)/3` and `D(x) = 2x`.
//!
//! Every composition that ends in `U` has the shape `t -> (2^p t - b) / 3^q`.
//! Forms are kept exactly as composition produces them; nothing is reduced,
//! so the exponent `q` of a full composition is the congruence exponent.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::collatz::pow2;
use crate::sigma::{Letter, TraceType};

pub fn pow3(e: u32) -> BigUint {
    BigUint::from(3u32).pow(e)
}

/// Inverse of `2^p` modulo `3^e`.
pub fn inv_pow2_mod_pow3(p: u32, e: u32) -> BigUint {
    let modulus = pow3(e);
    let inv2 = (&modulus + 1u32) >> 1u32;
    inv2.modpow(&BigUint::from(p), &modulus)
}

/// The map `t -> (2^p t - b) / 3^q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub p: u32,
    pub q: u32,
    pub b: BigUint,
}

impl AffineForm {
    /// `U` on its own: `(t - 1) / 3`.
    pub fn base() -> Self {
        AffineForm {
            p: 0,
            q: 1,
            b: BigUint::one(),
        }
    }

    /// `D` applied after this form.
    pub fn then_d(&self) -> Self {
        AffineForm {
            p: self.p + 1,
            q: self.q,
            b: &self.b << 1u32,
        }
    }

    /// `U` applied after this form.
    pub fn then_u(&self) -> Self {
        AffineForm {
            p: self.p,
            q: self.q + 1,
            b: &self.b + pow3(self.q),
        }
    }

    pub fn then(&self, letter: Letter) -> Self {
        match letter {
            Letter::D => self.then_d(),
            Letter::U => self.then_u(),
        }
    }

    /// `2^p t - b` as a signed integer.
    pub fn numerator_at(&self, t: &BigUint) -> BigInt {
        BigInt::from(t << self.p) - BigInt::from(self.b.clone())
    }

    /// Exact value at `t`, if it is an integer.
    pub fn eval(&self, t: &BigUint) -> Option<BigInt> {
        let (quot, rem) = self.numerator_at(t).div_rem(&BigInt::from(pow3(self.q)));
        rem.is_zero().then_some(quot)
    }

    pub fn eval_at_pow2(&self, a: u64) -> Option<BigInt> {
        self.eval(&pow2(a))
    }

    pub fn triple(&self) -> String {
        format!("({}, {}, {})", self.p, self.q, self.b)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slope = pow2(self.p as u64);
        let denom = pow3(self.q);
        if slope.is_one() {
            write!(f, "(A - {})/{}", self.b, denom)
        } else {
            write!(f, "({}A - {})/{}", slope, self.b, denom)
        }
    }
}

impl Serialize for AffineForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&self.p)?;
        t.serialize_element(&self.q)?;
        t.serialize_element(&self.b.to_string())?;
        t.end()
    }
}

/// The suffix compositions of a type's `Σ`, one per trace position.
///
/// `lines()[i]` is trace position `i + 1`; the last entry is `U` alone and
/// the first entry is all of `Σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineFamily {
    sigma: TraceType,
    lines: Vec<AffineForm>,
}

impl LineFamily {
    pub fn sigma(&self) -> &TraceType {
        &self.sigma
    }

    pub fn lines(&self) -> &[AffineForm] {
        &self.lines
    }

    /// Line at 1-based trace position `i`.
    pub fn position(&self, i: usize) -> &AffineForm {
        &self.lines[i - 1]
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

pub fn suffix_lines(sigma: &TraceType) -> LineFamily {
    let m = sigma.len();
    let mut lines = Vec::with_capacity(m + 1);
    lines.push(AffineForm::base());
    for &letter in sigma.letters().iter().rev() {
        let next = lines.last().unwrap().then(letter);
        lines.push(next);
    }
    lines.reverse();
    LineFamily {
        sigma: sigma.clone(),
        lines,
    }
}

/// The full composition `Σ(A)`.
pub fn sigma_to_affine(sigma: &TraceType) -> AffineForm {
    sigma
        .letters()
        .iter()
        .rev()
        .fold(AffineForm::base(), |form, &l| form.then(l))
}

/// `A ≡ residue (mod 3^exponent)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Congruence {
    pub residue: BigUint,
    pub modulus: BigUint,
    pub exponent: u32,
}

impl Congruence {
    pub fn is_satisfied_by(&self, a: &BigUint) -> bool {
        a % &self.modulus == self.residue
    }

    /// Whether `2^a` satisfies the congruence.
    pub fn holds_at_pow2(&self, a: u64) -> bool {
        BigUint::from(2u32).modpow(&BigUint::from(a), &self.modulus) == self.residue
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A ≡ {} (mod {})", self.residue, self.modulus)
    }
}

/// Integrality condition of a form: `2^p A ≡ b (mod 3^q)`.
pub fn form_congruence(form: &AffineForm) -> Congruence {
    let modulus = pow3(form.q);
    let residue = (&form.b * inv_pow2_mod_pow3(form.p, form.q)) % &modulus;
    Congruence {
        residue,
        modulus,
        exponent: form.q,
    }
}

pub fn congruence(sigma: &TraceType) -> Congruence {
    form_congruence(&sigma_to_affine(sigma))
}

/// Type, form and congruence carried along a prepend-only walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixState {
    pub sigma: TraceType,
    pub form: AffineForm,
    pub congruence: Congruence,
}

impl Default for PrefixState {
    fn default() -> Self {
        PrefixState::new()
    }
}

impl PrefixState {
    /// State of the empty type: `(A - 1)/3`, `A ≡ 1 (mod 3)`.
    pub fn new() -> Self {
        PrefixState {
            sigma: TraceType::empty(),
            form: AffineForm::base(),
            congruence: Congruence {
                residue: BigUint::one(),
                modulus: BigUint::from(3u32),
                exponent: 1,
            },
        }
    }

    pub fn from_scratch(sigma: &TraceType) -> Self {
        let form = sigma_to_affine(sigma);
        let congruence = form_congruence(&form);
        PrefixState {
            sigma: sigma.clone(),
            form,
            congruence,
        }
    }

    pub fn prepend(&self, letter: Letter) -> crate::Result<Self> {
        let sigma = self.sigma.prepend(letter)?;
        let form = self.form.then(letter);
        let congruence = match letter {
            // 2^(p+1) A ≡ 2b  ⇔  2^p A ≡ b: the residue is unchanged.
            Letter::D => self.congruence.clone(),
            Letter::U => self.lift_congruence(&form),
        };
        Ok(PrefixState {
            sigma,
            form,
            congruence,
        })
    }

    /// New residue is `c + t·3^q` for the single `t ∈ {0, 1, 2}` solving the
    /// congruence one level up.
    fn lift_congruence(&self, form: &AffineForm) -> Congruence {
        let old = &self.congruence;
        let modulus = &old.modulus * 3u32;
        let scale = pow2(form.p as u64) % &modulus;
        let target = &form.b % &modulus;
        let residue = (0u32..3)
            .map(|t| &old.residue + &old.modulus * t)
            .find(|c| (&scale * c) % &modulus == target)
            .expect("2 is a unit modulo every power of 3");
        Congruence {
            residue,
            modulus,
            exponent: old.exponent + 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::enumerate_types;

    fn ty(s: &str) -> TraceType {
        s.parse().unwrap()
    }

    fn form(p: u32, q: u32, b: u64) -> AffineForm {
        AffineForm {
            p,
            q,
            b: BigUint::from(b),
        }
    }

    #[test]
    fn full_compositions() {
        assert_eq!(sigma_to_affine(&ty("uddud")), form(3, 3, 29));
        assert_eq!(sigma_to_affine(&ty("")), form(0, 1, 1));
        assert_eq!(sigma_to_affine(&ty("dududd")), form(4, 3, 46));
        assert_eq!(sigma_to_affine(&ty("uddud")).to_string(), "(8A - 29)/27");
        assert_eq!(sigma_to_affine(&ty("")).to_string(), "(A - 1)/3");
        assert_eq!(sigma_to_affine(&ty("uddud")).triple(), "(3, 3, 29)");
    }

    #[test]
    fn suffix_line_positions() {
        let fam = suffix_lines(&ty("dududd"));
        assert_eq!(fam.len(), 7);
        assert_eq!(fam.position(4), &form(2, 2, 7));
        assert_eq!(fam.position(7), &form(0, 1, 1));
        assert_eq!(fam.position(5), &form(2, 1, 4));
        assert_eq!(fam.position(1), &sigma_to_affine(&ty("dududd")));
        // Remaining lines of the dududd figure.
        assert_eq!(fam.position(6), &form(1, 1, 2));
        assert_eq!(fam.position(3), &form(3, 2, 14));
        assert_eq!(fam.position(2), &form(3, 3, 23));
    }

    #[test]
    fn congruence_examples() {
        let c = congruence(&ty("uddud"));
        assert_eq!((c.residue, c.modulus), (7u32.into(), 27u32.into()));
        let c = congruence(&ty("uddudududduddd"));
        assert_eq!((c.residue, c.modulus), (16u32.into(), 729u32.into()));
        let c = congruence(&ty("dududd"));
        assert_eq!(
            (c.residue.clone(), c.modulus.clone()),
            (13u32.into(), 27u32.into())
        );
        assert_eq!(c.to_string(), "A ≡ 13 (mod 27)");
    }

    /// Oracle for the dududd residue: try every A mod 27 and keep those at
    /// which all seven lines are integers.
    #[test]
    fn congruence_by_residue_scan() {
        let fam = suffix_lines(&ty("dududd"));
        let hits: Vec<u32> = (0u32..27)
            .filter(|&a| {
                let t = BigUint::from(a + 27 * 100);
                fam.lines().iter().all(|l| l.eval(&t).is_some())
            })
            .collect();
        assert_eq!(hits, vec![13]);
    }

    #[test]
    fn integrality_iff_congruence() {
        for m in 0..=8 {
            for sigma in enumerate_types(m) {
                let f = sigma_to_affine(&sigma);
                let cong = form_congruence(&f);
                let modulus: u64 = cong.modulus.clone().try_into().unwrap();
                for r in 0..modulus {
                    let t = BigUint::from(r + modulus * 5);
                    assert_eq!(
                        f.eval(&t).is_some(),
                        cong.is_satisfied_by(&t),
                        "{sigma} at {t}"
                    );
                }
            }
        }
    }

    #[test]
    fn prepend_d_doubles_b() {
        let s = PrefixState::from_scratch(&ty("uddud"));
        let d = s.prepend(Letter::D).unwrap();
        assert_eq!(d.form, form(4, 3, 58));
        assert_eq!(d.form, sigma_to_affine(&ty("duddud")));
        let e = PrefixState::new().prepend(Letter::D).unwrap();
        assert_eq!(e.sigma.to_string(), "d");
        assert_eq!(e.form, form(1, 1, 2));
        assert!(PrefixState::new().prepend(Letter::U).is_err());
    }

    #[test]
    fn incremental_matches_from_scratch() {
        fn walk(state: &PrefixState, depth: usize) {
            assert_eq!(state, &PrefixState::from_scratch(&state.sigma));
            if depth == 0 {
                return;
            }
            for l in [Letter::D, Letter::U] {
                if let Ok(next) = state.prepend(l) {
                    walk(&next, depth - 1);
                }
            }
        }
        walk(&PrefixState::new(), 12);
    }

    #[test]
    fn family_steps_match_letters() {
        for m in 0..=10 {
            for sigma in enumerate_types(m) {
                let fam = suffix_lines(&sigma);
                assert_eq!(fam.lines()[0], sigma_to_affine(&sigma));
                assert_eq!(fam.lines()[m], AffineForm::base());
                for (i, &l) in sigma.letters().iter().enumerate() {
                    assert_eq!(fam.lines()[i], fam.lines()[i + 1].then(l));
                }
                let mut pq: Vec<(u32, u32)> = fam.lines().iter().map(|f| (f.p, f.q)).collect();
                pq.sort();
                pq.dedup();
                assert_eq!(pq.len(), m + 1);
            }
        }
    }

    #[test]
    fn affine_serializes_as_triple() {
        assert_eq!(
            serde_json::to_string(&form(3, 3, 29)).unwrap(),
            "[3,3,\"29\"]"
        );
    }
}
