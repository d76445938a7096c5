//! Finite partial injections and coherent sequences of them.
//!
//! A [`StagedMap`] presents an infinite map (an automorphism, an isomorphism
//! of countable structures) as stages `0, 1, 2, ...`, each a finite partial
//! injection that restricts the next one. Nothing decided at a stage is ever
//! revised, so a value read at stage `s` is the value of the limit map.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::error::{Error, Result};

/// A finite partial injection, kept with its inverse and insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMap<A: Ord, B: Ord> {
    fwd: BTreeMap<A, B>,
    inv: BTreeMap<B, A>,
    order: Vec<A>,
}

impl<A: Ord, B: Ord> Default for PartialMap<A, B> {
    fn default() -> Self {
        PartialMap { fwd: BTreeMap::new(), inv: BTreeMap::new(), order: Vec::new() }
    }
}

impl<A: Ord + Clone + Debug, B: Ord + Clone + Debug> PartialMap<A, B> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `a ↦ b`. Re-inserting an existing pair is a no-op; anything that
    /// would break injectivity or functionality is rejected.
    pub fn insert(&mut self, a: A, b: B) -> Result<()> {
        match (self.fwd.get(&a), self.inv.get(&b)) {
            (Some(old), _) if old == &b => Ok(()),
            (None, None) => {
                self.fwd.insert(a.clone(), b.clone());
                self.inv.insert(b, a.clone());
                self.order.push(a);
                Ok(())
            }
            _ => Err(Error::NotAnIsomorphism(format!("{a:?} ↦ {b:?} clashes with existing pairs"))),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (A, B)>>(pairs: I) -> Result<Self> {
        let mut m = Self::new();
        for (a, b) in pairs {
            m.insert(a, b)?;
        }
        Ok(m)
    }

    pub fn get(&self, a: &A) -> Option<&B> {
        self.fwd.get(a)
    }

    pub fn preimage(&self, b: &B) -> Option<&A> {
        self.inv.get(b)
    }

    pub fn contains(&self, a: &A) -> bool {
        self.fwd.contains_key(a)
    }

    pub fn hits(&self, b: &B) -> bool {
        self.inv.contains_key(b)
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    /// Pairs in ascending domain order.
    pub fn iter(&self) -> impl Iterator<Item = (&A, &B)> {
        self.fwd.iter()
    }

    /// Pairs in the order they were inserted.
    pub fn iter_inserted(&self) -> impl Iterator<Item = (&A, &B)> {
        self.order.iter().map(move |a| (a, &self.fwd[a]))
    }

    pub fn domain(&self) -> impl Iterator<Item = &A> {
        self.fwd.keys()
    }

    pub fn range(&self) -> impl Iterator<Item = &B> {
        self.inv.keys()
    }

    pub fn domain_map(&self) -> &BTreeMap<A, B> {
        &self.fwd
    }

    pub fn range_map(&self) -> &BTreeMap<B, A> {
        &self.inv
    }

    /// First `n` inserted pairs.
    pub fn prefix(&self, n: usize) -> Self {
        let mut out = Self::new();
        for a in self.order.iter().take(n) {
            out.insert(a.clone(), self.fwd[a].clone()).expect("prefix of an injection");
        }
        out
    }

    /// Whether every pair of `self` also belongs to `other`.
    pub fn is_restriction_of(&self, other: &Self) -> bool {
        self.fwd.iter().all(|(a, b)| other.get(a) == Some(b))
    }

    pub fn inverse(&self) -> PartialMap<B, A> {
        PartialMap::from_pairs(self.order.iter().map(|a| (self.fwd[a].clone(), a.clone())))
            .expect("inverse of an injection")
    }
}

/// Why a staged map stopped growing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageLimit {
    /// Last stage that was fully built.
    pub stage: usize,
    pub reason: String,
}

/// A coherent sequence of finite partial injections.
///
/// Stages past a construction budget saturate: `stage(s)` returns the last
/// completed stage and [`StagedMap::limit`] reports where and why growth
/// stopped. Values beyond it read as undefined rather than failing.
pub trait StagedMap<A: Ord, B: Ord = A>: Send + Sync {
    fn stage(&self, s: usize) -> PartialMap<A, B>;

    fn limit(&self) -> Option<StageLimit> {
        None
    }

    fn lookup(&self, k: &A, s: usize) -> Option<B>
    where
        A: Clone + Debug,
        B: Clone + Debug,
    {
        self.stage(s).get(k).cloned()
    }
}

impl<A: Ord, B: Ord, M: StagedMap<A, B> + ?Sized> StagedMap<A, B> for &M {
    fn stage(&self, s: usize) -> PartialMap<A, B> {
        (**self).stage(s)
    }
    fn limit(&self) -> Option<StageLimit> {
        (**self).limit()
    }
}

impl<A: Ord, B: Ord, M: StagedMap<A, B> + ?Sized> StagedMap<A, B> for std::sync::Arc<M> {
    fn stage(&self, s: usize) -> PartialMap<A, B> {
        (**self).stage(s)
    }
    fn limit(&self) -> Option<StageLimit> {
        (**self).limit()
    }
}

/// `staged_lookup`: the value of stage `s` at `k`, if defined.
pub fn staged_lookup<A, B, M>(m: &M, k: &A, s: usize) -> Option<B>
where
    A: Ord + Clone + Debug,
    B: Ord + Clone + Debug,
    M: StagedMap<A, B> + ?Sized,
{
    m.lookup(k, s)
}

/// Checks `stage(s) ⊆ stage(s + 1)` for every `s < stages`.
pub fn audit_coherence<A, B, M>(m: &M, stages: usize) -> Result<()>
where
    A: Ord + Clone + Debug,
    B: Ord + Clone + Debug,
    M: StagedMap<A, B> + ?Sized,
{
    let mut prev = m.stage(0);
    for s in 1..=stages {
        let next = m.stage(s);
        if !prev.is_restriction_of(&next) {
            return Err(Error::Unresolved(format!("stage {} is not a restriction of stage {s}", s - 1)));
        }
        prev = next;
    }
    Ok(())
}

/// The identity on ℕ; stage `s` is the identity on `0..s`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityMap;

impl<T> StagedMap<T, T> for IdentityMap
where
    T: Ord + Clone + Debug + From<u64>,
{
    fn stage(&self, s: usize) -> PartialMap<T, T> {
        PartialMap::from_pairs((0..s as u64).map(|k| (T::from(k), T::from(k)))).unwrap()
    }

    fn lookup(&self, k: &T, s: usize) -> Option<T> {
        (*k < T::from(s as u64)).then(|| k.clone())
    }
}

/// A map known all at once: stage `s` holds the first `s` pairs in ascending
/// domain order, and every stage from `len` on is the whole map.
#[derive(Clone, Debug)]
pub struct FiniteMap<A: Ord, B: Ord>(pub PartialMap<A, B>);

impl<A, B> StagedMap<A, B> for FiniteMap<A, B>
where
    A: Ord + Clone + Debug + Send + Sync,
    B: Ord + Clone + Debug + Send + Sync,
{
    fn stage(&self, s: usize) -> PartialMap<A, B> {
        PartialMap::from_pairs(self.0.iter().take(s).map(|(a, b)| (a.clone(), b.clone()))).unwrap()
    }
}
