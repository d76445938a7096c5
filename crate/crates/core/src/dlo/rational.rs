//! The fixed enumeration of ℚ: index 0 is 0, and index `2m - 1` / `2m` is
//! `+r` / `-r` for the `m`-th term `r` of the Calkin–Wilf sequence.
//!
//! Within an open interval the rational of least index is the
//! Stern–Brocot-simplest one (Calkin–Wilf levels are Stern–Brocot levels and
//! an interval meets its shallowest level exactly once), so witnesses for the
//! dense order are found by continued-fraction descent instead of scanning.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::backforth::{order_type_over, Atom, AtomicType, FreshTracker, Homogeneous};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// The `m`-th (1-based) positive rational of the Calkin–Wilf sequence.
fn cw_positive(m: &BigUint) -> Rational {
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    let bits = m.bits();
    for k in (0..bits - 1).rev() {
        if m.bit(k) {
            a = &a + &b;
        } else {
            b = &a + &b;
        }
    }
    BigRational::new(a, b)
}

/// `cw_rational`: the rational with index `n`.
pub fn cw_rational(n: &BigUint) -> Rational {
    if n.is_zero() {
        return Rational::zero();
    }
    if n.is_odd() {
        cw_positive(&((n + 1u32) >> 1))
    } else {
        -cw_positive(&(n >> 1))
    }
}

pub fn cw_rational_u64(n: u64) -> Rational {
    cw_rational(&BigUint::from(n))
}

/// Position of a positive rational in the Calkin–Wilf sequence.
fn cw_positive_index(q: &Rational) -> BigUint {
    let (mut p, mut d) = (q.numer().magnitude().clone(), q.denom().magnitude().clone());
    // Runs of (bit, length) from the leaf up to the root.
    let mut runs: Vec<(bool, BigUint)> = Vec::new();
    while !(p.is_one() && d.is_one()) {
        if p < d {
            let t = (&d - 1u32) / &p;
            d -= &t * &p;
            runs.push((false, t));
        } else {
            let t = (&p - 1u32) / &d;
            p -= &t * &d;
            runs.push((true, t));
        }
    }
    let mut idx = BigUint::one();
    for (bit, len) in runs.into_iter().rev() {
        let len = u64::try_from(&len).expect("run length fits in memory");
        idx <<= len;
        if bit {
            idx += (BigUint::one() << len) - 1u32;
        }
    }
    idx
}

/// `rational_index`: inverse of [`cw_rational`].
pub fn rational_index(q: &Rational) -> BigUint {
    if q.is_zero() {
        BigUint::zero()
    } else if q.is_positive() {
        cw_positive_index(q) * 2u32 - 1u32
    } else {
        cw_positive_index(&-q) * 2u32
    }
}

/// Simplest rational in the open interval `(lo, hi)` of the non-negative
/// reals, `lo` finite, `hi = None` meaning `+∞`.
fn simplest_positive(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let n = lo.floor();
    let next = &n + Rational::one();
    if hi.is_none_or(|h| &next < h) {
        return next;
    }
    let hi = hi.unwrap();
    let lo_frac = lo - &n;
    let hi_frac = hi - &n;
    let inner_lo = hi_frac.recip();
    let inner_hi = (!lo_frac.is_zero()).then(|| lo_frac.recip());
    n + simplest_positive(&inner_lo, inner_hi.as_ref()).recip()
}

/// The least-index rational strictly between `lo` and `hi` (`None` = unbounded).
pub fn simplest_between(lo: Option<&Rational>, hi: Option<&Rational>) -> Rational {
    if let (Some(l), Some(h)) = (lo, hi) {
        assert!(l < h, "empty interval ({l}, {h})");
    }
    let below_zero = lo.is_none_or(|l| l.is_negative());
    let above_zero = hi.is_none_or(|h| h.is_positive());
    if below_zero && above_zero {
        Rational::zero()
    } else if !below_zero {
        simplest_positive(lo.unwrap(), hi)
    } else {
        let neg_hi = -hi.unwrap();
        let neg_lo = lo.map(|l| -l);
        -simplest_positive(&neg_hi, neg_lo.as_ref())
    }
}

/// An open interval of ℚ with optional infinite ends.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalInterval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl RationalInterval {
    pub fn whole() -> Self {
        RationalInterval { lo: None, hi: None }
    }

    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Self {
        if let (Some(l), Some(h)) = (&lo, &hi) {
            assert!(l < h, "empty interval");
        }
        RationalInterval { lo, hi }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|l| l < q) && self.hi.as_ref().is_none_or(|h| q < h)
    }
}

/// Least-index unused rational of an interval, tracked over the gaps that
/// used points cut it into.
pub struct GapTracker {
    gaps: BTreeMap<Option<Rational>, (Option<Rational>, Rational)>,
    heap: BinaryHeap<Reverse<(BigUint, Option<Rational>)>>,
}

impl GapTracker {
    pub fn new(interval: &RationalInterval) -> Self {
        let mut t = GapTracker { gaps: BTreeMap::new(), heap: BinaryHeap::new() };
        t.open(interval.lo.clone(), interval.hi.clone());
        t
    }

    fn open(&mut self, lo: Option<Rational>, hi: Option<Rational>) {
        let best = simplest_between(lo.as_ref(), hi.as_ref());
        self.heap.push(Reverse((rational_index(&best), lo.clone())));
        self.gaps.insert(lo, (hi, best));
    }
}

impl FreshTracker<Rational> for GapTracker {
    fn least_unused(&mut self) -> Rational {
        loop {
            let Reverse((idx, lo)) = self.heap.peek().expect("an interval of ℚ is infinite").clone();
            match self.gaps.get(&lo) {
                Some((_, best)) if rational_index(best) == idx => return best.clone(),
                _ => {
                    self.heap.pop();
                }
            }
        }
    }

    fn mark_used(&mut self, e: &Rational) {
        let key = Some(e.clone());
        let Some((lo, (hi, _))) = self.gaps.range(..key.clone()).next_back() else { return };
        if hi.as_ref().is_some_and(|h| e >= h) {
            return;
        }
        let (lo, hi) = (lo.clone(), hi.clone());
        self.gaps.remove(&lo);
        self.open(lo, key.clone());
        self.open(key, hi);
    }
}

impl Homogeneous for RationalInterval {
    type Elem = Rational;
    type Fresh = GapTracker;

    fn fresh_tracker(&self) -> GapTracker {
        GapTracker::new(self)
    }

    fn atom(&self, a: &Rational, b: &Rational) -> Atom {
        Atom::Order(a.cmp(b))
    }

    fn type_over<V>(&self, e: &Rational, placed: &BTreeMap<Rational, V>) -> AtomicType<Rational> {
        order_type_over(e, placed)
    }

    fn realize(&self, t: &AtomicType<Rational>) -> Result<Rational> {
        let AtomicType::Order { below, above } = t else {
            return Err(Error::WitnessFailure("graph type asked of an order".into()));
        };
        let lo = below.as_ref().or(self.lo.as_ref());
        let hi = above.as_ref().or(self.hi.as_ref());
        if let (Some(l), Some(h)) = (lo, hi) {
            if l >= h {
                return Err(Error::WitnessFailure(format!("empty interval ({l}, {h})")));
            }
        }
        Ok(simplest_between(lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_terms() {
        assert_eq!(cw_rational_u64(0), int(0));
        assert_eq!(cw_rational_u64(1), int(1));
        assert_eq!(cw_rational_u64(2), int(-1));
        let pos: Vec<Rational> = (1..8).map(|k| cw_rational_u64(2 * k - 1)).collect();
        assert_eq!(pos, vec![int(1), rat(1, 2), int(2), rat(1, 3), rat(3, 2), rat(2, 3), int(3)]);
    }

    #[test]
    fn index_round_trip() {
        for k in 0..10_000u64 {
            assert_eq!(rational_index(&cw_rational_u64(k)), BigUint::from(k));
        }
        assert_eq!(rational_index(&int(70)), BigUint::from((1u128 << 70) - 1) * 2u32 - 1u32);
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let seen: std::collections::BTreeSet<Rational> = (0..5000).map(cw_rational_u64).collect();
        assert_eq!(seen.len(), 5000);
    }

    // Least index in (lo, hi) by scanning the enumeration.
    fn scan_least(lo: Option<&Rational>, hi: Option<&Rational>) -> Rational {
        let iv = RationalInterval::new(lo.cloned(), hi.cloned());
        (0u64..).map(cw_rational_u64).find(|q| iv.contains(q)).unwrap()
    }

    #[test]
    fn simplest_is_least_index() {
        let pts: Vec<Rational> = (0..60).map(cw_rational_u64).collect();
        for a in &pts {
            for b in &pts {
                if a < b {
                    assert_eq!(simplest_between(Some(a), Some(b)), scan_least(Some(a), Some(b)), "({a}, {b})");
                }
            }
            assert_eq!(simplest_between(Some(a), None), scan_least(Some(a), None));
            assert_eq!(simplest_between(None, Some(a)), scan_least(None, Some(a)));
        }
    }

    #[test]
    fn gap_tracker_follows_enumeration() {
        let iv = RationalInterval::new(Some(int(0)), Some(int(2)));
        let mut t = iv.fresh_tracker();
        let mut got = Vec::new();
        for _ in 0..40 {
            let q = t.least_unused();
            t.mark_used(&q);
            got.push(q);
        }
        let want: Vec<Rational> = (0u64..).map(cw_rational_u64).filter(|q| iv.contains(q)).take(40).collect();
        assert_eq!(got, want);
    }
}
