//! Natural numbers stored by their set of one-bit positions, each position
//! itself a [`Nat`].
//!
//! Witnesses of the BIT graph have the form `Σ 2^u + 2^k` with `k` larger than
//! every vertex already in play, so iterating them produces towers of
//! exponentials. Storing only the positions of the one bits keeps such values
//! small in memory: the size of a value is proportional to the number of its
//! one bits, hereditarily. Values below `2^64` use a plain machine word.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Largest bit length rendered in plain decimal by `Display`.
pub const DECIMAL_DISPLAY_BITS: u64 = 256;

/// Longest exact rendering `Display` produces; larger values are abbreviated.
pub const DISPLAY_CHARS: usize = 512;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Nat(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(u64),
    /// Height, then strictly descending one-bit positions; the first is at
    /// least 64. Height is 1 + the height of the top position (0 for small
    /// values) and is monotone in the value.
    Sparse(u32, Arc<[Nat]>),
}

impl Nat {
    pub const fn small(v: u64) -> Nat {
        Nat(Repr::Small(v))
    }

    pub fn zero() -> Nat {
        Nat::small(0)
    }

    /// The number whose one bits sit exactly at `positions` (duplicates ignored).
    pub fn from_bit_positions<I: IntoIterator<Item = Nat>>(positions: I) -> Nat {
        let mut ps: Vec<Nat> = positions.into_iter().collect();
        ps.sort_unstable_by(|a, b| b.cmp(a));
        ps.dedup();
        match ps.first() {
            None => Nat::zero(),
            Some(top) if top < &Nat::small(64) => {
                let v = ps.iter().fold(0u64, |acc, p| acc | (1u64 << p.as_u64().unwrap()));
                Nat::small(v)
            }
            Some(_) => Nat::sparse(ps),
        }
    }

    fn sparse(ps: Vec<Nat>) -> Nat {
        Nat(Repr::Sparse(ps[0].height() + 1, ps.into()))
    }

    /// Number of nested exponentials: 0 below `2^64`, else one more than for
    /// the top one-bit position.
    pub fn height(&self) -> u32 {
        match &self.0 {
            Repr::Small(_) => 0,
            Repr::Sparse(h, _) => *h,
        }
    }

    /// `2^e`.
    pub fn pow2(e: Nat) -> Nat {
        Nat::from_bit_positions([e])
    }

    pub fn as_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Sparse(..) => None,
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small(_))
    }

    /// Whether bit `pos` is one.
    pub fn bit(&self, pos: &Nat) -> bool {
        match &self.0 {
            Repr::Small(v) => match pos.as_u64() {
                Some(p) if p < 64 => v >> p & 1 == 1,
                _ => false,
            },
            Repr::Sparse(_, ps) => ps.binary_search_by(|q| pos.cmp(q)).is_ok(),
        }
    }

    /// One-bit positions in ascending order.
    pub fn bit_positions(&self) -> Vec<Nat> {
        match &self.0 {
            Repr::Small(v) => (0..64u64).filter(|p| v >> p & 1 == 1).map(Nat::small).collect(),
            Repr::Sparse(_, ps) => ps.iter().rev().cloned().collect(),
        }
    }

    /// `self + 1`.
    pub fn succ(&self) -> Nat {
        match &self.0 {
            Repr::Small(v) => match v.checked_add(1) {
                Some(w) => Nat::small(w),
                None => Nat::pow2(Nat::small(64)),
            },
            Repr::Sparse(_, ps) => {
                // Clear the trailing run of ones 0..r and set bit r.
                let mut run = 0u64;
                let mut keep = ps.len();
                while keep > 0 && ps[keep - 1] == Nat::small(run) {
                    keep -= 1;
                    run += 1;
                }
                let mut out: Vec<Nat> = ps[..keep].to_vec();
                out.push(Nat::small(run));
                Nat::sparse(out)
            }
        }
    }

    /// Exact conversion when the value has at most `max_bits` bits.
    pub fn to_biguint(&self, max_bits: u64) -> Option<BigUint> {
        match &self.0 {
            Repr::Small(v) => Some(BigUint::from(*v)),
            Repr::Sparse(_, ps) => {
                let top = ps[0].as_u64()?;
                if top >= max_bits {
                    return None;
                }
                let mut out = BigUint::zero();
                for p in ps.iter() {
                    out.set_bit(p.as_u64()?, true);
                }
                Some(out)
            }
        }
    }

    pub fn from_biguint(v: &BigUint) -> Nat {
        if let Ok(small) = u64::try_from(v) {
            return Nat::small(small);
        }
        Nat::from_bit_positions((0..v.bits()).filter(|&b| v.bit(b)).map(Nat::small))
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Nat {
        Nat::small(v)
    }
}

impl From<&BigUint> for Nat {
    fn from(v: &BigUint) -> Nat {
        Nat::from_biguint(v)
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Nat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Small(_), Repr::Sparse(..)) => Ordering::Less,
            (Repr::Sparse(..), Repr::Small(_)) => Ordering::Greater,
            (Repr::Sparse(ha, a), Repr::Sparse(hb, b)) => {
                if ha != hb {
                    return ha.cmp(hb);
                }
                if Arc::ptr_eq(a, b) {
                    return Ordering::Equal;
                }
                for (x, y) in a.iter().zip(b.iter()) {
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                a.len().cmp(&b.len())
            }
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Nat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Nat {
    /// An upper bound on the length of the exact rendering, saturating at
    /// `cap`. Shared subterms are measured once per occurrence, without
    /// walking the expansion.
    fn rendered_len(&self, cap: usize, memo: &mut HashMap<usize, usize>) -> usize {
        let Repr::Sparse(_, ps) = &self.0 else { return 20 };
        let key = Arc::as_ptr(ps) as *const Nat as usize;
        if let Some(&n) = memo.get(&key) {
            return n;
        }
        let mut n = 21usize;
        for p in ps.iter() {
            n = n.saturating_add(p.rendered_len(cap, memo) + 5).min(cap);
        }
        memo.insert(key, n);
        n
    }

    /// A hash of the value, computed on its shared structure.
    pub fn digest(&self) -> u64 {
        self.digest_memo(&mut HashMap::new())
    }

    fn digest_memo(&self, memo: &mut HashMap<usize, u64>) -> u64 {
        let mut h = DefaultHasher::new();
        match &self.0 {
            Repr::Small(v) => (0u8, v).hash(&mut h),
            Repr::Sparse(height, ps) => {
                let key = Arc::as_ptr(ps) as *const Nat as usize;
                if let Some(&d) = memo.get(&key) {
                    return d;
                }
                (1u8, height).hash(&mut h);
                for p in ps.iter() {
                    p.digest_memo(memo).hash(&mut h);
                }
                let d = h.finish();
                memo.insert(key, d);
                return d;
            }
        }
        h.finish()
    }
}

impl fmt::Display for Nat {
    /// Decimal up to [`DECIMAL_DISPLAY_BITS`] bits, then sums of powers of two
    /// while that stays under [`DISPLAY_CHARS`] characters, then
    /// `tower<height>#<digest>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(b) = self.to_biguint(DECIMAL_DISPLAY_BITS) {
            return write!(f, "{b}");
        }
        if self.rendered_len(DISPLAY_CHARS + 1, &mut HashMap::new()) > DISPLAY_CHARS {
            return write!(f, "tower{}#{:016x}", self.height(), self.digest());
        }
        let Repr::Sparse(_, ps) = &self.0 else { unreachable!() };
        // High powers as `2^e`, everything below bit 64 folded into a decimal tail.
        let mut tail = 0u64;
        let mut first = true;
        for p in ps.iter() {
            match p.as_u64() {
                Some(q) if q < 64 => tail |= 1 << q,
                _ => {
                    if !first {
                        f.write_str("+")?;
                    }
                    first = false;
                    if p.is_small() {
                        write!(f, "2^{p}")?;
                    } else {
                        write!(f, "2^({p})")?;
                    }
                }
            }
        }
        if tail != 0 {
            write!(f, "+{tail}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid natural `{0}`")]
pub struct ParseNatError(pub String);

impl FromStr for Nat {
    type Err = ParseNatError;

    /// Accepts plain decimal or a sum of distinct powers `2^e` / decimal
    /// terms, where `e` is a decimal or a parenthesized expression.
    fn from_str(s: &str) -> Result<Nat, ParseNatError> {
        let err = || ParseNatError(s.to_string());
        let mut p = Parser { s: s.as_bytes(), i: 0 };
        let v = p.sum().ok_or_else(err)?;
        if p.i != p.s.len() {
            return Err(err());
        }
        Ok(v)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn sum(&mut self) -> Option<Nat> {
        let mut positions: Vec<Nat> = Vec::new();
        loop {
            let term = self.term()?;
            for b in term.bit_positions() {
                if positions.contains(&b) {
                    return None;
                }
                positions.push(b);
            }
            if self.s.get(self.i) == Some(&b'+') {
                self.i += 1;
            } else {
                return Some(Nat::from_bit_positions(positions));
            }
        }
    }

    fn term(&mut self) -> Option<Nat> {
        if self.s[self.i..].starts_with(b"2^") {
            self.i += 2;
            let e = if self.s.get(self.i) == Some(&b'(') {
                self.i += 1;
                let e = self.sum()?;
                if self.s.get(self.i) != Some(&b')') {
                    return None;
                }
                self.i += 1;
                e
            } else {
                self.decimal()?
            };
            Some(Nat::pow2(e))
        } else {
            self.decimal()
        }
    }

    fn decimal(&mut self) -> Option<Nat> {
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return None;
        }
        let digits = std::str::from_utf8(&self.s[start..self.i]).ok()?;
        let v = BigUint::parse_bytes(digits.as_bytes(), 10)?;
        Some(Nat::from_biguint(&v))
    }
}

/// `2^k` as a `BigUint`, for tests and small conversions.
pub fn big_pow2(k: u64) -> BigUint {
    BigUint::one() << k
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &Nat) -> BigUint {
        v.to_biguint(1 << 20).unwrap()
    }

    #[test]
    fn succ_carries_into_sparse() {
        let m = Nat::small(u64::MAX);
        assert_eq!(m.succ(), Nat::pow2(Nat::small(64)));
        let v = Nat::from_bit_positions([70, 2, 1, 0].map(Nat::small));
        assert_eq!(v.succ(), Nat::from_bit_positions([70, 3].map(Nat::small)));
    }

    #[test]
    fn tower_compare_and_bits() {
        let t = Nat::pow2(Nat::pow2(Nat::small(100)));
        let u = Nat::pow2(Nat::pow2(Nat::small(99)));
        assert!(t > u);
        assert!(t.bit(&Nat::pow2(Nat::small(100))));
        assert!(!t.bit(&Nat::small(3)));
        assert!(Nat::small(u64::MAX) < u);
    }

    #[test]
    fn display_round_trip_of_tower() {
        let t = Nat::from_bit_positions([Nat::pow2(Nat::small(300)), Nat::small(5), Nat::small(0)]);
        let s = t.to_string();
        assert_eq!(s, "2^(2^300)+33");
        assert_eq!(s.parse::<Nat>().unwrap(), t);
        assert!("2^3+8".parse::<Nat>().is_err());
        assert!("".parse::<Nat>().is_err());
    }

    #[test]
    fn deep_towers_are_abbreviated() {
        let mut t = Nat::small(5000);
        for _ in 0..40 {
            // Two references to the previous value, so the expansion doubles.
            t = Nat::from_bit_positions([t.succ(), t]);
        }
        let s = t.to_string();
        assert!(s.starts_with(&format!("tower{}#", t.height())), "{s}");
        assert!(s.len() < 40);
        assert_eq!(s, t.clone().to_string());
        assert!(s.parse::<Nat>().is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_biguint(a in proptest::collection::btree_set(0u64..200, 0..12),
                               b in proptest::collection::btree_set(0u64..200, 0..12)) {
            let na = Nat::from_bit_positions(a.iter().copied().map(Nat::small));
            let nb = Nat::from_bit_positions(b.iter().copied().map(Nat::small));
            let (ba, bb) = (big(&na), big(&nb));
            prop_assert_eq!(na.cmp(&nb), ba.cmp(&bb));
            prop_assert_eq!(big(&na.succ()), &ba + 1u32);
            prop_assert_eq!(Nat::from_biguint(&ba), na.clone());
            prop_assert_eq!(na.to_string().parse::<Nat>().unwrap(), na);
        }
    }
}
