//! Prepend-only depth-first walk over all types of one length.
//!
//! Each node carries the residue data needed to classify its type without
//! big-integer work: `b` and `2^-p` modulo `3^KERNEL_EXP`, and the discrete
//! log residue `r` with `2^r ≡ c (mod 3^q)`. Prepending `d` leaves `c` and
//! `r` unchanged; prepending `u` lifts `r` by one ternary digit.
//!
//! A type is settled on the spot when its first valid witness exceeds the
//! crude crossing bound `3^(k+1)`; the rest go through the exact
//! classification in the parent module.

use crate::error::Result;
use crate::sigma::{Letter, TraceType};
use crate::witness::{is_valid_witness, WitnessSchedule};

use super::{classify, Classification};

/// Residues are kept modulo `3^KERNEL_EXP`; `3^40 < 2^64`.
pub const KERNEL_EXP: u32 = 40;
const MODULUS: u64 = 12_157_665_459_056_928_801;
const INV2: u64 = MODULUS.div_ceil(2);

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

/// Tables shared read-only by every worker.
#[derive(Debug)]
pub struct Tables {
    pow3: Vec<u64>,
    /// `2^(2·3^(q-1)) mod 3^KERNEL_EXP`, i.e. 2 raised to the order mod `3^q`.
    pow2_order: Vec<u64>,
    /// Least `a` with `2^a > 3^q`.
    threshold: Vec<u64>,
}

impl Tables {
    pub fn new() -> Self {
        let n = KERNEL_EXP as usize + 1;
        let mut pow3 = vec![1u64; n];
        for i in 1..n {
            pow3[i] = pow3[i - 1] * 3;
        }
        let mut pow2_order = vec![0u64; n];
        let mut g = 4u64; // 2^2, order mod 3
        for slot in pow2_order.iter_mut().skip(1) {
            *slot = g;
            g = mulmod(mulmod(g, g), g);
        }
        let threshold = (0..n)
            .map(|q| {
                let p3 = 3u128.pow(q as u32);
                (0..).find(|&a| 1u128 << a > p3).unwrap()
            })
            .collect();
        Tables {
            pow3,
            pow2_order,
            threshold,
        }
    }
}

impl Default for Tables {
    fn default() -> Self {
        Tables::new()
    }
}

/// Walk state for one node of the prepend tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    pub len: u32,
    /// Bit `j` is the letter `j` places from the end; set means `u`.
    pub bits: u64,
    pub p: u32,
    pub q: u32,
    b: u64,
    inv2p: u64,
    /// Discrete log residue modulo `2·3^(q-1)`.
    r: u64,
    /// `2^r mod 3^KERNEL_EXP`.
    pow2r: u64,
}

impl Node {
    pub fn root() -> Self {
        Node {
            len: 0,
            bits: 0,
            p: 0,
            q: 1,
            b: 1,
            inv2p: 1,
            r: 0,
            pow2r: 1,
        }
    }

    pub fn first(&self) -> Option<Letter> {
        if self.len == 0 {
            None
        } else if self.bits >> (self.len - 1) & 1 == 1 {
            Some(Letter::U)
        } else {
            Some(Letter::D)
        }
    }

    pub fn can_prepend(&self, letter: Letter) -> bool {
        match letter {
            Letter::D => true,
            Letter::U => self.first() == Some(Letter::D),
        }
    }

    pub fn prepend(&self, letter: Letter, t: &Tables) -> Node {
        debug_assert!(self.can_prepend(letter));
        debug_assert!(self.q < KERNEL_EXP);
        match letter {
            Letter::D => Node {
                len: self.len + 1,
                p: self.p + 1,
                b: mulmod(self.b, 2),
                inv2p: mulmod(self.inv2p, INV2),
                ..*self
            },
            Letter::U => {
                let b = (self.b + t.pow3[self.q as usize]) % MODULUS;
                let q = self.q + 1;
                let m = t.pow3[q as usize];
                let c = mulmod(b, self.inv2p) % m;
                let step = 2 * t.pow3[self.q as usize - 1];
                let mut r = self.r;
                let mut pow2r = self.pow2r;
                let mut found = false;
                for _ in 0..3 {
                    if pow2r % m == c {
                        found = true;
                        break;
                    }
                    r += step;
                    pow2r = mulmod(pow2r, t.pow2_order[self.q as usize]);
                }
                assert!(found, "2 is a primitive root modulo powers of 3");
                Node {
                    len: self.len + 1,
                    bits: self.bits | 1 << self.len,
                    p: self.p,
                    q,
                    b,
                    inv2p: self.inv2p,
                    r,
                    pow2r,
                }
            }
        }
    }

    pub fn residue(&self, t: &Tables) -> u64 {
        mulmod(self.b, self.inv2p) % t.pow3[self.q as usize]
    }

    pub fn schedule(&self, t: &Tables) -> WitnessSchedule {
        let period = 2 * t.pow3[self.q as usize - 1];
        WitnessSchedule {
            a0: if self.r == 0 { period } else { self.r },
            period,
            k: self.q - 1,
        }
    }

    pub fn sigma(&self) -> TraceType {
        let letters = (0..self.len)
            .rev()
            .map(|j| {
                if self.bits >> j & 1 == 1 {
                    Letter::U
                } else {
                    Letter::D
                }
            })
            .collect();
        TraceType::from_letters_unchecked(letters)
    }
}

/// Counts for a batch of same-length types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub types: u64,
    pub perm_total: u64,
    /// Types whose least schedule entry is not a genuine witness.
    pub first_witness_skipped: u64,
    /// Types that needed the exact classification.
    pub exact_checks: u64,
    pub ets: Vec<Classification>,
}

impl Tally {
    pub fn merge(&mut self, other: Tally) {
        self.types += other.types;
        self.perm_total += other.perm_total;
        self.first_witness_skipped += other.first_witness_skipped;
        self.exact_checks += other.exact_checks;
        self.ets.extend(other.ets);
    }
}

/// Classifies the type at a leaf and records it.
fn visit_leaf(node: &Node, t: &Tables, tally: &mut Tally) -> Result<()> {
    tally.types += 1;
    let schedule = node.schedule(t);
    let mut a_first = schedule.a0;
    let mut sigma = None;
    if a_first < 4 {
        let s = node.sigma();
        if !is_valid_witness(&s, a_first, &schedule) {
            tally.first_witness_skipped += 1;
            a_first += schedule.period;
        }
        sigma = Some(s);
    }
    if a_first >= t.threshold[node.q as usize] {
        tally.perm_total += 1;
        return Ok(());
    }
    tally.exact_checks += 1;
    let sigma = sigma.unwrap_or_else(|| node.sigma());
    let class = classify(&sigma)?;
    debug_assert_eq!(class.a_first, a_first);
    tally.perm_total += class.perm_count as u64;
    if class.perm_count == 2 {
        tally.ets.push(class);
    }
    Ok(())
}

/// Classifies every type of total length `target` below `node`.
pub fn walk(node: &Node, target: u32, t: &Tables, tally: &mut Tally) -> Result<()> {
    if node.len == target {
        return visit_leaf(node, t, tally);
    }
    for letter in [Letter::D, Letter::U] {
        if node.can_prepend(letter) {
            walk(&node.prepend(letter, t), target, t, tally)?;
        }
    }
    Ok(())
}

/// All nodes at depth `depth` in walk order (`d` before `u`).
pub fn frontier(depth: u32, t: &Tables) -> Vec<Node> {
    let mut out = Vec::new();
    fn go(node: Node, depth: u32, t: &Tables, out: &mut Vec<Node>) {
        if node.len == depth {
            out.push(node);
            return;
        }
        for letter in [Letter::D, Letter::U] {
            if node.can_prepend(letter) {
                go(node.prepend(letter, t), depth, t, out);
            }
        }
    }
    go(Node::root(), depth, t, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::congruence;
    use crate::sigma::enumerate_types;
    use crate::witness::witness_schedule;
    use num_bigint::BigUint;

    #[test]
    fn modulus_constant() {
        assert_eq!(BigUint::from(MODULUS), crate::affine::pow3(KERNEL_EXP));
        assert_eq!(mulmod(INV2, 2), 1);
    }

    #[test]
    fn thresholds() {
        let t = Tables::new();
        assert_eq!(t.threshold[0], 1);
        assert_eq!(t.threshold[1], 2);
        assert_eq!(t.threshold[3], 5);
        assert_eq!(t.threshold[6], 10);
    }

    /// The fixed-width walk against the big-integer from-scratch route.
    #[test]
    fn nodes_match_big_integer_route() {
        let t = Tables::new();
        for depth in 0..=14 {
            let nodes = frontier(depth, &t);
            let sigmas: Vec<TraceType> = nodes.iter().map(Node::sigma).collect();
            let mut sorted = sigmas.clone();
            sorted.sort();
            assert_eq!(sorted, enumerate_types(depth as usize).collect::<Vec<_>>());
            for (node, sigma) in nodes.iter().zip(&sigmas) {
                let cong = congruence(sigma);
                assert_eq!(BigUint::from(node.residue(&t)), cong.residue, "{sigma}");
                assert_eq!(node.q, cong.exponent);
                assert_eq!(
                    node.schedule(&t),
                    witness_schedule(sigma).unwrap(),
                    "{sigma}"
                );
                assert_eq!(node.p as usize, sigma.count_d());
            }
        }
    }

    #[test]
    fn lifting_stays_exact_at_depth() {
        let t = Tables::new();
        // ududud...d with 16 u's: the deepest modulus a census reaches.
        let sigma: TraceType = format!("{}dd", "ud".repeat(16)).parse().unwrap();
        let mut node = Node::root();
        for &l in sigma.letters().iter().rev() {
            node = node.prepend(l, &t);
        }
        assert_eq!(node.sigma(), sigma);
        assert_eq!(node.schedule(&t), witness_schedule(&sigma).unwrap());
    }
}
