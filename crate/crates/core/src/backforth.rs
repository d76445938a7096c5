//! Deterministic back-and-forth between homogeneous structures.
//!
//! Steps alternate strictly: an even step maps the least unmapped element of
//! the left structure to a right-hand witness of its atomic type over the
//! current domain, an odd step pulls back the least unhit element of the
//! right structure the same way. "Least" is the structure's own canonical
//! enumeration (vertex code, rational index). Given the same witness
//! operations the construction is a pure function of its inputs.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::staged::{PartialMap, StageLimit, StagedMap};

/// A finite partial isomorphism between two structures.
pub type PartialIso<A, B> = PartialMap<A, B>;

/// The relation between two elements: adjacency for graphs, comparison for orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    Adjacent(bool),
    Order(Ordering),
}

/// The atomic type of a new element over a finite set of placed elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomicType<E> {
    Graph { adjacent: BTreeSet<E>, non_adjacent: BTreeSet<E> },
    /// Greatest placed element below, least placed element above.
    Order { below: Option<E>, above: Option<E> },
}

impl<E: Ord + Clone> AtomicType<E> {
    /// Transports the type along a map of the placed elements.
    pub fn map<F: Ord, G: Fn(&E) -> F>(&self, f: G) -> AtomicType<F> {
        match self {
            AtomicType::Graph { adjacent, non_adjacent } => AtomicType::Graph {
                adjacent: adjacent.iter().map(&f).collect(),
                non_adjacent: non_adjacent.iter().map(&f).collect(),
            },
            AtomicType::Order { below, above } => {
                AtomicType::Order { below: below.as_ref().map(&f), above: above.as_ref().map(&f) }
            }
        }
    }
}

/// Incrementally answers "least element not yet used" in canonical order.
pub trait FreshTracker<E>: Send {
    fn least_unused(&mut self) -> E;
    fn mark_used(&mut self, e: &E);
}

/// A countable structure with computable witnesses for atomic types.
pub trait Homogeneous: Send + Sync {
    type Elem: Clone + Ord + Debug + Send + Sync;
    type Fresh: FreshTracker<Self::Elem>;

    fn fresh_tracker(&self) -> Self::Fresh;

    fn atom(&self, a: &Self::Elem, b: &Self::Elem) -> Atom;

    /// Type of `e` over the keys of `placed` (`e` itself is not a key).
    fn type_over<V>(&self, e: &Self::Elem, placed: &BTreeMap<Self::Elem, V>) -> AtomicType<Self::Elem>;

    /// An element realizing `t`, distinct from everything `t` mentions.
    fn realize(&self, t: &AtomicType<Self::Elem>) -> Result<Self::Elem>;

    /// Rejects elements too large to keep working with; the staged engine
    /// stops growing at the first rejection.
    fn admit(&self, _e: &Self::Elem) -> Result<()> {
        Ok(())
    }
}

/// Graph type of `e` over `placed`, by querying adjacency.
pub fn graph_type_over<S: Homogeneous, V>(
    s: &S,
    e: &S::Elem,
    placed: &BTreeMap<S::Elem, V>,
) -> AtomicType<S::Elem> {
    let mut adjacent = BTreeSet::new();
    let mut non_adjacent = BTreeSet::new();
    for d in placed.keys() {
        if s.atom(e, d) == Atom::Adjacent(true) {
            adjacent.insert(d.clone());
        } else {
            non_adjacent.insert(d.clone());
        }
    }
    AtomicType::Graph { adjacent, non_adjacent }
}

/// Order type of `e` over `placed`, from its neighbours in the sorted keys.
pub fn order_type_over<E: Ord + Clone, V>(e: &E, placed: &BTreeMap<E, V>) -> AtomicType<E> {
    AtomicType::Order {
        below: placed.range(..e.clone()).next_back().map(|(k, _)| k.clone()),
        above: placed.range(e.clone()..).next().map(|(k, _)| k.clone()),
    }
}

/// Fresh tracker for structures enumerated by ℕ in increasing order.
#[derive(Clone, Debug)]
pub struct CountingTracker<E> {
    next: u64,
    used: BTreeSet<E>,
}

impl<E> Default for CountingTracker<E> {
    fn default() -> Self {
        CountingTracker { next: 0, used: BTreeSet::new() }
    }
}

impl<E: Ord + Clone + From<u64> + Send> FreshTracker<E> for CountingTracker<E> {
    fn least_unused(&mut self) -> E {
        while self.used.contains(&E::from(self.next)) {
            self.next += 1;
        }
        E::from(self.next)
    }

    fn mark_used(&mut self, e: &E) {
        self.used.insert(e.clone());
    }
}

/// Whether `p` preserves every atomic relation in both directions.
pub fn preserves_relations<L: Homogeneous, R: Homogeneous>(
    left: &L,
    right: &R,
    p: &PartialIso<L::Elem, R::Elem>,
) -> bool {
    let pairs: Vec<_> = p.iter().collect();
    pairs.iter().enumerate().all(|(n, (a, b))| {
        pairs[n + 1..].iter().all(|(c, d)| left.atom(a, c) == right.atom(b, d))
    })
}

fn forward_onto<L: Homogeneous, R: Homogeneous>(
    left: &L,
    right: &R,
    p: &PartialIso<L::Elem, R::Elem>,
    a: &L::Elem,
) -> Result<R::Elem> {
    let t = left.type_over(a, p.domain_map()).map(|d| p.get(d).expect("domain element").clone());
    let b = right.realize(&t)?;
    if p.hits(&b) {
        return Err(Error::WitnessFailure(format!("witness {b:?} is already in the range")));
    }
    Ok(b)
}

fn backward_onto<L: Homogeneous, R: Homogeneous>(
    left: &L,
    right: &R,
    p: &PartialIso<L::Elem, R::Elem>,
    b: &R::Elem,
) -> Result<L::Elem> {
    let t = right.type_over(b, p.range_map()).map(|d| p.preimage(d).expect("range element").clone());
    let a = left.realize(&t)?;
    if p.contains(&a) {
        return Err(Error::WitnessFailure(format!("witness {a:?} is already in the domain")));
    }
    Ok(a)
}

/// `bf_step`: extends `p` by one pair, forward when `|p|` is even and
/// backward when it is odd.
pub fn bf_step<L: Homogeneous, R: Homogeneous>(
    left: &L,
    right: &R,
    p: &PartialIso<L::Elem, R::Elem>,
) -> Result<PartialIso<L::Elem, R::Elem>> {
    let mut out = p.clone();
    if p.len() % 2 == 0 {
        let mut fresh = left.fresh_tracker();
        p.domain().for_each(|a| fresh.mark_used(a));
        let a = fresh.least_unused();
        let b = forward_onto(left, right, p, &a)?;
        out.insert(a, b)?;
    } else {
        let mut fresh = right.fresh_tracker();
        p.range().for_each(|b| fresh.mark_used(b));
        let b = fresh.least_unused();
        let a = backward_onto(left, right, p, &b)?;
        out.insert(a, b)?;
    }
    Ok(out)
}

/// A left-side involution the construction's domain is closed under.
/// It may refuse an element whose image is out of reach.
pub type Closure<E> = Arc<dyn Fn(&E) -> Result<E> + Send + Sync>;

struct Run<L: Homogeneous, R: Homogeneous> {
    map: PartialIso<L::Elem, R::Elem>,
    pairs: Vec<(L::Elem, R::Elem)>,
    pos_left: BTreeMap<L::Elem, usize>,
    pos_right: BTreeMap<R::Elem, usize>,
    left_fresh: L::Fresh,
    right_fresh: R::Fresh,
    /// `stage_ends[s]` = number of pairs in stage `s`.
    stage_ends: Vec<usize>,
    limit: Option<StageLimit>,
}

/// A staged isomorphism built by back-and-forth, extended on demand.
///
/// Stage `s` is the result of `s` rounds. A round is a forward step followed
/// by a backward step (so stage `s` is `2s` calls of [`bf_step`]). With a
/// closure `σ`, each step is followed by mapping `σ` of the new left element
/// forward when it is not yet in the domain, so every stage has a σ-closed
/// domain.
pub struct BackAndForth<L: Homogeneous, R: Homogeneous> {
    left: L,
    right: R,
    closure: Option<Closure<L::Elem>>,
    max_stage: usize,
    run: Mutex<Run<L, R>>,
}

impl<L: Homogeneous, R: Homogeneous> BackAndForth<L, R> {
    pub fn new(left: L, right: R, max_stage: usize) -> Self {
        Self::build(left, right, None, max_stage)
    }

    pub fn closed_under(left: L, right: R, closure: Closure<L::Elem>, max_stage: usize) -> Self {
        Self::build(left, right, Some(closure), max_stage)
    }

    fn build(left: L, right: R, closure: Option<Closure<L::Elem>>, max_stage: usize) -> Self {
        let run = Run {
            map: PartialMap::new(),
            pairs: Vec::new(),
            pos_left: BTreeMap::new(),
            pos_right: BTreeMap::new(),
            left_fresh: left.fresh_tracker(),
            right_fresh: right.fresh_tracker(),
            stage_ends: vec![0],
            limit: None,
        };
        BackAndForth { left, right, closure, max_stage, run: Mutex::new(run) }
    }

    pub fn left(&self) -> &L {
        &self.left
    }

    pub fn right(&self) -> &R {
        &self.right
    }

    pub fn max_stage(&self) -> usize {
        self.max_stage
    }

    fn push(&self, run: &mut Run<L, R>, a: L::Elem, b: R::Elem) -> Result<()> {
        self.left.admit(&a)?;
        self.right.admit(&b)?;
        run.map.insert(a.clone(), b.clone())?;
        run.left_fresh.mark_used(&a);
        run.right_fresh.mark_used(&b);
        run.pos_left.insert(a.clone(), run.pairs.len());
        run.pos_right.insert(b.clone(), run.pairs.len());
        run.pairs.push((a, b));
        Ok(())
    }

    fn close(&self, run: &mut Run<L, R>, a: &L::Elem) -> Result<()> {
        if let Some(sigma) = &self.closure {
            let image = sigma(a)?;
            if !run.map.contains(&image) {
                let b = forward_onto(&self.left, &self.right, &run.map, &image)?;
                self.push(run, image, b)?;
            }
        }
        Ok(())
    }

    fn round(&self, run: &mut Run<L, R>) -> Result<()> {
        let a = run.left_fresh.least_unused();
        let b = forward_onto(&self.left, &self.right, &run.map, &a)?;
        self.push(run, a.clone(), b)?;
        self.close(run, &a)?;
        let b = run.right_fresh.least_unused();
        let a = backward_onto(&self.left, &self.right, &run.map, &b)?;
        self.push(run, a.clone(), b)?;
        self.close(run, &a)
    }

    fn ensure(&self, run: &mut Run<L, R>, s: usize) -> usize {
        let target = s.min(self.max_stage);
        while run.limit.is_none() && run.stage_ends.len() <= target {
            let built = run.stage_ends.len() - 1;
            let keep = run.pairs.len();
            match self.round(run) {
                Ok(()) => run.stage_ends.push(run.pairs.len()),
                Err(e) => {
                    // Discard the half-finished round.
                    for (a, b) in run.pairs.drain(keep..) {
                        run.pos_left.remove(&a);
                        run.pos_right.remove(&b);
                    }
                    run.map = run.map.prefix(keep);
                    run.limit = Some(StageLimit { stage: built, reason: e.to_string() });
                }
            }
        }
        if run.limit.is_none() && s > self.max_stage {
            run.limit = Some(StageLimit {
                stage: self.max_stage,
                reason: format!("stage budget {} reached", self.max_stage),
            });
        }
        (run.stage_ends.len() - 1).min(s)
    }

    /// Number of pairs in stage `s` (after saturation).
    pub fn stage_len(&self, s: usize) -> usize {
        let mut run = self.run.lock().unwrap();
        let s = self.ensure(&mut run, s);
        run.stage_ends[s]
    }

    /// Image of `a` at stage `s`, if defined there.
    pub fn forward(&self, a: &L::Elem, s: usize) -> Option<R::Elem> {
        let mut run = self.run.lock().unwrap();
        let s = self.ensure(&mut run, s);
        let end = run.stage_ends[s];
        run.pos_left.get(a).filter(|&&i| i < end).map(|&i| run.pairs[i].1.clone())
    }

    /// Preimage of `b` at stage `s`, if defined there.
    pub fn backward(&self, b: &R::Elem, s: usize) -> Option<L::Elem> {
        let mut run = self.run.lock().unwrap();
        let s = self.ensure(&mut run, s);
        let end = run.stage_ends[s];
        run.pos_right.get(b).filter(|&&i| i < end).map(|&i| run.pairs[i].0.clone())
    }

    /// Advances until `a` is in the domain or the stage budget runs out.
    pub fn resolve_forward(&self, a: &L::Elem) -> Option<R::Elem> {
        self.resolve(|run| run.pos_left.get(a).map(|&i| run.pairs[i].1.clone()))
    }

    /// Advances until `b` is in the range or the stage budget runs out.
    pub fn resolve_backward(&self, b: &R::Elem) -> Option<L::Elem> {
        self.resolve(|run| run.pos_right.get(b).map(|&i| run.pairs[i].0.clone()))
    }

    fn resolve<T>(&self, probe: impl Fn(&Run<L, R>) -> Option<T>) -> Option<T> {
        let mut run = self.run.lock().unwrap();
        loop {
            // Only values inside a completed stage count.
            let built = run.stage_ends.len() - 1;
            if let Some(v) = probe(&run) {
                return Some(v);
            }
            if run.limit.is_some() || built >= self.max_stage {
                return None;
            }
            self.ensure(&mut run, built + 1);
        }
    }
}

impl<L: Homogeneous, R: Homogeneous> StagedMap<L::Elem, R::Elem> for BackAndForth<L, R> {
    fn stage(&self, s: usize) -> PartialMap<L::Elem, R::Elem> {
        let mut run = self.run.lock().unwrap();
        let s = self.ensure(&mut run, s);
        run.map.prefix(run.stage_ends[s])
    }

    fn limit(&self) -> Option<StageLimit> {
        self.run.lock().unwrap().limit.clone()
    }

    fn lookup(&self, k: &L::Elem, s: usize) -> Option<R::Elem> {
        self.forward(k, s)
    }
}

/// `canonical_iso`: the strict back-and-forth isomorphism between `a` and `b`.
pub fn canonical_iso<L: Homogeneous, R: Homogeneous>(a: L, b: R, max_stage: usize) -> BackAndForth<L, R> {
    BackAndForth::new(a, b, max_stage)
}

/// Default node-expansion budget for [`bounded_conj_search`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConjSearch {
    /// A verified finite certificate, lexicographically first.
    Consistent(PartialIso<Nat, Nat>),
    /// Nothing found within the bounds; this is not a refutation.
    Exhausted { expanded: u64 },
}

/// Inputs of [`bounded_conj_search`].
pub struct ConjProblem<'a> {
    pub phi: &'a dyn StagedMap<Nat, Nat>,
    pub psi: &'a dyn StagedMap<Nat, Nat>,
    pub adj_left: &'a dyn Fn(&Nat, &Nat) -> bool,
    pub adj_right: &'a dyn Fn(&Nat, &Nat) -> bool,
    /// Stage at which `phi` and `psi` are read.
    pub stage: usize,
}

/// `bounded_conj_search`: depth-first search for `p` on `0..m` with images
/// below `bound`, preserving adjacency and satisfying `p(φ(k)) = ψ(p(k))`
/// wherever every value involved is defined.
pub fn bounded_conj_search(problem: &ConjProblem<'_>, m: u64, bound: u64, budget: u64) -> ConjSearch {
    let phi = problem.phi.stage(problem.stage);
    let psi = problem.psi.stage(problem.stage);
    let mut search = Search { problem, phi, psi, bound, budget, expanded: 0, p: PartialMap::new() };
    if search.extend(0, m) {
        ConjSearch::Consistent(search.p)
    } else {
        ConjSearch::Exhausted { expanded: search.expanded }
    }
}

struct Search<'a, 'b> {
    problem: &'b ConjProblem<'a>,
    phi: PartialMap<Nat, Nat>,
    psi: PartialMap<Nat, Nat>,
    bound: u64,
    budget: u64,
    expanded: u64,
    p: PartialMap<Nat, Nat>,
}

impl Search<'_, '_> {
    fn extend(&mut self, k: u64, m: u64) -> bool {
        if k == m {
            return true;
        }
        let key = Nat::small(k);
        for c in 0..self.bound {
            if self.expanded >= self.budget {
                return false;
            }
            let img = Nat::small(c);
            if self.p.hits(&img) {
                continue;
            }
            self.expanded += 1;
            if !self.consistent_with(&key, &img) {
                continue;
            }
            self.p.insert(key.clone(), img).expect("fresh pair");
            if self.extend(k + 1, m) {
                return true;
            }
            self.p = self.p.prefix(k as usize);
        }
        false
    }

    fn consistent_with(&self, key: &Nat, img: &Nat) -> bool {
        let adj_l = self.problem.adj_left;
        let adj_r = self.problem.adj_right;
        if self.p.iter().any(|(a, b)| adj_l(a, key) != adj_r(b, img)) {
            return false;
        }
        let mut trial = self.p.clone();
        trial.insert(key.clone(), img.clone()).expect("fresh pair");
        commutes_where_defined(&trial, &self.phi, &self.psi)
    }
}

/// `p(φ(k)) = ψ(p(k))` for every `k` in the domain with all four values defined.
pub fn commutes_where_defined(
    p: &PartialMap<Nat, Nat>,
    phi: &PartialMap<Nat, Nat>,
    psi: &PartialMap<Nat, Nat>,
) -> bool {
    p.iter().all(|(k, pk)| {
        let lhs = phi.get(k).and_then(|fk| p.get(fk));
        let rhs = psi.get(pk);
        match (lhs, rhs) {
            (Some(l), Some(r)) => l == r,
            // One side defined inside the certificate forces the other.
            (Some(_), None) => false,
            (None, Some(r)) => match (p.preimage(r), phi.get(k)) {
                (Some(pre), Some(fk)) => pre == fk,
                (Some(_), None) => false,
                (None, _) => true,
            },
            (None, None) => true,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rado::RadoGraph;
    use crate::staged::{audit_coherence, IdentityMap};

    #[test]
    fn rado_self_iso_is_adjacency_preserving_and_coherent() {
        let h = canonical_iso(RadoGraph, RadoGraph, 6);
        for s in 0..=6 {
            let st = h.stage(s);
            assert!(preserves_relations(&RadoGraph, &RadoGraph, &st), "stage {s}");
        }
        audit_coherence(&h, 6).unwrap();
        let again = canonical_iso(RadoGraph, RadoGraph, 6);
        assert_eq!(again.stage(6), h.stage(6));
    }

    #[test]
    fn bf_step_matches_staged_rounds() {
        let mut p = PartialMap::new();
        for _ in 0..8 {
            p = bf_step(&RadoGraph, &RadoGraph, &p).unwrap();
        }
        assert_eq!(p, canonical_iso(RadoGraph, RadoGraph, 4).stage(4));
    }

    #[test]
    fn identity_search_finds_identity() {
        let adj = |a: &Nat, b: &Nat| crate::rado::rado_adj(a, b);
        let problem = ConjProblem { phi: &IdentityMap, psi: &IdentityMap, adj_left: &adj, adj_right: &adj, stage: 16 };
        match bounded_conj_search(&problem, 3, 8, DEFAULT_SEARCH_BUDGET) {
            ConjSearch::Consistent(p) => {
                let id: Vec<_> = (0..3).map(|k| (Nat::small(k), Nat::small(k))).collect();
                assert_eq!(p, PartialMap::from_pairs(id).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn search_respects_budget() {
        let adj = |a: &Nat, b: &Nat| crate::rado::rado_adj(a, b);
        let never = |_: &Nat, _: &Nat| false;
        let problem = ConjProblem { phi: &IdentityMap, psi: &IdentityMap, adj_left: &adj, adj_right: &never, stage: 4 };
        assert!(matches!(bounded_conj_search(&problem, 3, 8, 20), ConjSearch::Exhausted { expanded: 20 }));
        // Whole tree: 8 candidates for 0, of which 0..4 commute, each with 7 failing candidates for 1.
        assert_eq!(bounded_conj_search(&problem, 3, 8, 1000), ConjSearch::Exhausted { expanded: 36 });
    }
}
