//! The enumeration `S^i_n` of sets holding exactly `i` columns from each of
//! rows `0..i`.
//!
//! A row's `i`-subset `c_1 < ... < c_i` is ranked by the combinatorial number
//! system, `Σ C(c_k, k)` (colexicographic order). The `i` row ranks are then
//! combined by the shell order on `ℕ^i`: tuples with smaller maximum first,
//! ties broken lexicographically. Both steps are bijections with closed-form
//! inverses, so ranks of sets with astronomically large columns stay cheap.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A set of `i` columns in each of rows `0..i`, rows sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChoiceSet {
    rows: Vec<Vec<BigUint>>,
}

impl ChoiceSet {
    /// Validates and sorts `rows`.
    pub fn new(i: usize, mut rows: Vec<Vec<BigUint>>) -> Result<Self> {
        if i < 2 {
            return Err(Error::MalformedChoiceSet(format!("row index {i} is below 2")));
        }
        if rows.len() != i {
            return Err(Error::MalformedChoiceSet(format!("{} rows given, {i} expected", rows.len())));
        }
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort();
            row.dedup();
            if row.len() != i {
                return Err(Error::MalformedChoiceSet(format!(
                    "row {r} holds {} distinct columns, {i} expected",
                    row.len()
                )));
            }
        }
        Ok(ChoiceSet { rows })
    }

    pub fn i(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        &self.rows
    }

    pub fn contains(&self, row: usize, col: &BigUint) -> bool {
        self.rows.get(row).is_some_and(|r| r.binary_search(col).is_ok())
    }

    /// Members as `(row, column)`, row-major.
    pub fn members(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.rows.iter().enumerate().flat_map(|(r, cols)| cols.iter().map(move |c| (r, c)))
    }

    pub fn rank(&self) -> BigUint {
        let ranks: Vec<BigUint> = self.rows.iter().map(|r| subset_rank(r)).collect();
        shell_rank(&ranks)
    }
}

/// `choice_set`: `S^i_n`.
pub fn choice_set(i: usize, n: &BigUint) -> Result<ChoiceSet> {
    if i < 2 {
        return Err(Error::MalformedChoiceSet(format!("row index {i} is below 2")));
    }
    let rows = shell_unrank(n, i).iter().map(|r| subset_unrank(r, i)).collect();
    Ok(ChoiceSet { rows })
}

/// `choice_index`: the `n` with `S^i_n` equal to `rows`.
pub fn choice_index(i: usize, rows: &[Vec<BigUint>]) -> Result<BigUint> {
    Ok(ChoiceSet::new(i, rows.to_vec())?.rank())
}

pub(crate) fn binomial(n: &BigUint, k: usize) -> BigUint {
    if *n < BigUint::from(k) {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for t in 0..k {
        num *= n - BigUint::from(t);
        den *= BigUint::from(t + 1);
    }
    num / den
}

/// Colex rank of a sorted set of distinct naturals.
pub fn subset_rank(sorted: &[BigUint]) -> BigUint {
    sorted.iter().enumerate().map(|(k, c)| binomial(c, k + 1)).sum()
}

/// Inverse of [`subset_rank`] for sets of size `k`.
pub fn subset_unrank(n: &BigUint, k: usize) -> Vec<BigUint> {
    let mut rest = n.clone();
    let mut out = Vec::with_capacity(k);
    for size in (1..=k).rev() {
        if rest.is_zero() {
            // The least `size` columns.
            out.extend((0..size).rev().map(BigUint::from));
            break;
        }
        let c = largest_with_binomial_at_most(&rest, size);
        rest -= binomial(&c, size);
        out.push(c);
    }
    out.reverse();
    out
}

/// Largest `c` with `C(c, k) ≤ n`.
fn largest_with_binomial_at_most(n: &BigUint, k: usize) -> BigUint {
    if k == 1 {
        return n.clone();
    }
    // Small n: walk up from C(k, k) = 1.
    let mut c = BigUint::from(k);
    let mut b = BigUint::one();
    for _ in 0..64 {
        if b > *n {
            return c - 1u32;
        }
        let next = &c + 1u32;
        b = b * &next / (&next - BigUint::from(k));
        c = next;
    }
    // (c - k + 1)^k / k! ≤ C(c, k), so c ≤ ⌊(k! n)^{1/k}⌋ + k - 1.
    let fact: BigUint = (1..=k).map(BigUint::from).product();
    let mut c = (fact * n).nth_root(k as u32) + BigUint::from(k - 1);
    while binomial(&c, k) > *n {
        c -= 1u32;
    }
    c
}

/// Rank of a tuple in the shell order on `ℕ^m`.
pub fn shell_rank(t: &[BigUint]) -> BigUint {
    let m = t.len();
    let Some(max) = t.iter().max() else { return BigUint::zero() };
    let blocks = Blocks::new(max, m);
    let mut rank = blocks.max_pow[m].clone();
    let mut has_max = false;
    for (p, v) in t.iter().enumerate() {
        rank += v * blocks.get(m - p - 1, has_max);
        has_max |= v == max;
    }
    rank
}

/// Counts of tuples of length `tail` over `0..=max` completing a prefix,
/// depending on whether the prefix already attains `max`.
struct Blocks {
    above_pow: Vec<BigUint>,
    max_pow: Vec<BigUint>,
}

impl Blocks {
    fn new(max: &BigUint, m: usize) -> Self {
        let above = max + 1u32;
        let powers = |base: &BigUint| {
            let mut out = Vec::with_capacity(m + 1);
            out.push(BigUint::one());
            for t in 0..m {
                let next = &out[t] * base;
                out.push(next);
            }
            out
        };
        Blocks { above_pow: powers(&above), max_pow: powers(max) }
    }

    fn get(&self, tail: usize, has_max: bool) -> BigUint {
        if has_max {
            self.above_pow[tail].clone()
        } else {
            &self.above_pow[tail] - &self.max_pow[tail]
        }
    }
}

/// Inverse of [`shell_rank`] on tuples of length `m ≥ 1`.
pub fn shell_unrank(n: &BigUint, m: usize) -> Vec<BigUint> {
    // Below 2^m the maximum is at most 1 and the tuple is the binary digits of n.
    if let Some(small) = n.to_u64().filter(|&v| m >= 64 || v >> m == 0) {
        return (0..m).rev().map(|p| BigUint::from(u32::from(p < 64 && small >> p & 1 == 1))).collect();
    }
    let max = n.nth_root(m as u32);
    let blocks = Blocks::new(&max, m);
    let mut rest = n - &blocks.max_pow[m];
    let mut has_max = false;
    let mut out = Vec::with_capacity(m);
    for p in 0..m {
        let b = blocks.get(m - p - 1, has_max);
        let below = &max * &b;
        if !b.is_zero() && rest < below {
            out.push(&rest / &b);
            rest %= &b;
        } else {
            rest -= below;
            out.push(max.clone());
            has_max = true;
        }
    }
    debug_assert!(rest.is_zero());
    out
}
