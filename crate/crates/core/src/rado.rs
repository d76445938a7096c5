//! The random graph in its BIT presentation: for `i < j`, `i ~ j` iff bit `i`
//! of `j` is one.

use std::collections::{BTreeMap, BTreeSet};

use crate::backforth::{graph_type_over, Atom, AtomicType, CountingTracker, Homogeneous};
use crate::error::{Error, Result};
use crate::nat::Nat;

/// The BIT graph as a back-and-forth participant, witnessed by [`rado_witness`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RadoGraph;

impl Homogeneous for RadoGraph {
    type Elem = Nat;
    type Fresh = CountingTracker<Nat>;

    fn fresh_tracker(&self) -> Self::Fresh {
        CountingTracker::default()
    }

    fn atom(&self, a: &Nat, b: &Nat) -> Atom {
        Atom::Adjacent(rado_adj(a, b))
    }

    fn type_over<V>(&self, e: &Nat, placed: &BTreeMap<Nat, V>) -> AtomicType<Nat> {
        graph_type_over(self, e, placed)
    }

    fn realize(&self, t: &AtomicType<Nat>) -> Result<Nat> {
        match t {
            AtomicType::Graph { adjacent, non_adjacent } => rado_witness(adjacent, non_adjacent),
            AtomicType::Order { .. } => Err(Error::WitnessFailure("order type asked of a graph".into())),
        }
    }
}

pub fn rado_adj(i: &Nat, j: &Nat) -> bool {
    match i.cmp(j) {
        std::cmp::Ordering::Less => j.bit(i),
        std::cmp::Ordering::Greater => i.bit(j),
        std::cmp::Ordering::Equal => false,
    }
}

/// A vertex adjacent to all of `u` and none of `v`:
/// `Σ_{x ∈ u} 2^x + 2^k` with `k = 1 + max(u ∪ v ∪ {0})`.
pub fn rado_witness(u: &BTreeSet<Nat>, v: &BTreeSet<Nat>) -> Result<Nat> {
    if u.intersection(v).next().is_some() {
        return Err(Error::OverlappingSets);
    }
    let top = u.iter().chain(v.iter()).max().cloned().unwrap_or_else(Nat::zero);
    let k = top.succ();
    Ok(Nat::from_bit_positions(u.iter().cloned().chain(std::iter::once(k))))
}

/// Smallest vertex outside `u ∪ v` adjacent to all of `u` and none of `v`,
/// found by scanning upward. Only for small inputs.
pub fn least_witness(u: &BTreeSet<Nat>, v: &BTreeSet<Nat>) -> Result<Nat> {
    if u.intersection(v).next().is_some() {
        return Err(Error::OverlappingSets);
    }
    let mut w = Nat::zero();
    loop {
        if !u.contains(&w)
            && !v.contains(&w)
            && u.iter().all(|x| rado_adj(&w, x))
            && v.iter().all(|x| !rado_adj(&w, x))
        {
            return Ok(w);
        }
        w = w.succ();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u64]) -> BTreeSet<Nat> {
        xs.iter().copied().map(Nat::small).collect()
    }

    // Independent bit-extraction oracle on machine words.
    fn bit_oracle(i: u64, j: u64) -> bool {
        let (a, b) = (i.min(j), i.max(j));
        a != b && a < 64 && (b >> a) & 1 == 1
    }

    #[test]
    fn adjacency_examples() {
        assert!(rado_adj(&Nat::small(0), &Nat::small(1)));
        assert!(!rado_adj(&Nat::small(0), &Nat::small(2)));
        assert!(rado_adj(&Nat::small(2), &Nat::small(5)));
    }

    #[test]
    fn witness_examples() {
        assert_eq!(rado_witness(&set(&[0, 1]), &set(&[2])).unwrap(), Nat::small(11));
        assert_eq!(rado_witness(&set(&[]), &set(&[])).unwrap(), Nat::small(2));
        assert_eq!(rado_witness(&set(&[0]), &set(&[0])), Err(Error::OverlappingSets));
    }

    #[test]
    fn symmetric_irreflexive_and_matches_bits() {
        for i in 0..1u64 << 11 {
            for j in 0..1u64 << 11 {
                let a = rado_adj(&Nat::small(i), &Nat::small(j));
                assert_eq!(a, rado_adj(&Nat::small(j), &Nat::small(i)));
                assert_eq!(a, bit_oracle(i, j));
            }
        }
    }

    #[test]
    fn symmetric_on_sampled_pairs_below_2_16() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(16);
        for _ in 0..200_000 {
            let (i, j) = (rng.gen_range(0..1u64 << 16), rng.gen_range(0..1u64 << 16));
            let a = rado_adj(&Nat::small(i), &Nat::small(j));
            assert_eq!(a, rado_adj(&Nat::small(j), &Nat::small(i)));
            assert_eq!(a, bit_oracle(i, j));
        }
    }

    #[test]
    fn least_witness_never_exceeds_closed_form() {
        for (u, v) in [(vec![0, 1], vec![2]), (vec![], vec![]), (vec![3], vec![1, 5]), (vec![2, 4], vec![0])] {
            let (u, v) = (set(&u), set(&v));
            assert!(least_witness(&u, &v).unwrap() <= rado_witness(&u, &v).unwrap());
        }
        assert_eq!(least_witness(&set(&[]), &set(&[])).unwrap(), Nat::small(0));
    }

    #[test]
    fn witness_over_towers() {
        let big = Nat::pow2(Nat::pow2(Nat::small(90)));
        let u: BTreeSet<Nat> = [big.clone(), Nat::small(3)].into();
        let v = set(&[0, 7]);
        let w = rado_witness(&u, &v).unwrap();
        assert!(u.iter().all(|x| rado_adj(&w, x)));
        assert!(v.iter().all(|x| !rado_adj(&w, x)));
        assert!(w > big);
    }
}
