//! Cycle types of permutations of ℕ read at finite depth, and a brute-force
//! isomorphism oracle for small graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::staged::{PartialMap, StagedMap};
use crate::structure::ListedGraph;

/// Largest vertex count [`graph_iso_bruteforce`] accepts.
pub const BRUTEFORCE_MAX: usize = 9;

/// Cycle structure seen inside a prefix `0..p`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleType {
    /// Cycle length to number of cycles, for cycles inside the prefix.
    pub resolved: BTreeMap<u64, u64>,
    /// Maximal orbit segments inside the prefix that do not close up.
    pub open_threads: u64,
    /// Points lying on those segments.
    pub open_points: u64,
}

impl CycleType {
    pub fn resolved_points(&self) -> u64 {
        self.resolved.iter().map(|(len, count)| len * count).sum()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cycles")?;
        for (len, count) in &self.resolved {
            write!(f, " {len}:{count}")?;
        }
        write!(f, " open {}", self.open_threads)
    }
}

/// `cycle_type`, reading `f` at stage `prefix`.
pub fn cycle_type<M: StagedMap<Nat, Nat> + ?Sized>(f: &M, prefix: u64) -> Result<CycleType> {
    cycle_type_at(f, prefix, prefix as usize)
}

/// `cycle_type`, reading `f` at stage `s`.
pub fn cycle_type_at<M: StagedMap<Nat, Nat> + ?Sized>(f: &M, prefix: u64, s: usize) -> Result<CycleType> {
    let st = f.stage(s);
    let mut next: Vec<Option<u64>> = Vec::with_capacity(prefix as usize);
    for k in 0..prefix {
        let v = st
            .get(&Nat::small(k))
            .ok_or_else(|| Error::Unresolved(format!("f({k}) is undefined at stage {s}")))?;
        next.push(v.as_u64().filter(|&v| v < prefix));
    }
    let mut has_pred = vec![false; prefix as usize];
    for v in next.iter().flatten() {
        has_pred[*v as usize] = true;
    }
    let mut seen = vec![false; prefix as usize];
    let mut out = CycleType::default();
    // Segments start at points with no predecessor inside the prefix.
    for start in (0..prefix as usize).filter(|&s| !has_pred[s]) {
        out.open_threads += 1;
        let mut cur = Some(start as u64);
        while let Some(c) = cur {
            seen[c as usize] = true;
            out.open_points += 1;
            cur = next[c as usize];
        }
    }
    for start in 0..prefix as usize {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start as u64;
        loop {
            seen[cur as usize] = true;
            len += 1;
            cur = next[cur as usize].expect("points off segments lie on cycles");
            if cur as usize == start {
                break;
            }
        }
        *out.resolved.entry(len).or_default() += 1;
    }
    Ok(out)
}

/// A permutation of ℕ moving only the points listed, identity elsewhere.
/// Stage `s` is the permutation on `0..s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportedPermutation {
    moves: BTreeMap<u64, u64>,
}

impl SupportedPermutation {
    pub fn new<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut moves = BTreeMap::new();
        let mut hit = BTreeSet::new();
        for (a, b) in pairs {
            if moves.insert(a, b).is_some() || !hit.insert(b) {
                return Err(Error::NotAnIsomorphism(format!("{a} -> {b} breaks injectivity")));
            }
        }
        if moves.keys().copied().collect::<BTreeSet<u64>>() != hit {
            return Err(Error::NotAnIsomorphism("listed points are not permuted among themselves".into()));
        }
        moves.retain(|a, b| a != b);
        Ok(SupportedPermutation { moves })
    }

    pub fn from_map(m: &PartialMap<Nat, Nat>) -> Result<Self> {
        let small = |n: &Nat| n.as_u64().ok_or_else(|| Error::Unresolved(format!("point {n} is beyond 64 bits")));
        let pairs: Vec<(u64, u64)> = m.iter().map(|(a, b)| Ok((small(a)?, small(b)?))).collect::<Result<_>>()?;
        Self::new(pairs)
    }

    pub fn apply(&self, k: u64) -> u64 {
        self.moves.get(&k).copied().unwrap_or(k)
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.moves.keys().copied()
    }

    /// One past the largest moved point.
    pub fn support_bound(&self) -> u64 {
        self.moves.keys().next_back().map_or(0, |m| m + 1)
    }

    /// Cycles of length at least 2, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<u64>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.moves.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut cyc = vec![start];
            seen.insert(start);
            let mut cur = self.apply(start);
            while cur != start {
                seen.insert(cur);
                cyc.push(cur);
                cur = self.apply(cur);
            }
            out.push(cyc);
        }
        out
    }
}

impl StagedMap<Nat, Nat> for SupportedPermutation {
    fn stage(&self, s: usize) -> PartialMap<Nat, Nat> {
        PartialMap::from_pairs((0..s as u64).map(|k| (Nat::small(k), Nat::small(self.apply(k)))))
            .expect("a permutation is injective")
    }

    fn lookup(&self, k: &Nat, s: usize) -> Option<Nat> {
        let v = k.as_u64().filter(|&v| v < s as u64)?;
        Some(Nat::small(self.apply(v)))
    }
}

/// A `k` with `k f k⁻¹ = g`, matching cycles of equal length in order of
/// their least points; `None` when the nontrivial cycle types differ.
pub fn conjugator_by_cycles(f: &SupportedPermutation, g: &SupportedPermutation) -> Option<SupportedPermutation> {
    let by_len = |p: &SupportedPermutation| {
        let mut m: BTreeMap<usize, Vec<Vec<u64>>> = BTreeMap::new();
        for c in p.cycles() {
            m.entry(c.len()).or_default().push(c);
        }
        m
    };
    let (cf, cg) = (by_len(f), by_len(g));
    if cf.keys().ne(cg.keys()) || cf.iter().zip(&cg).any(|((_, a), (_, b))| a.len() != b.len()) {
        return None;
    }
    let mut k: BTreeMap<u64, u64> = BTreeMap::new();
    for (a, b) in cf.values().flatten().zip(cg.values().flatten()) {
        for (p, q) in a.iter().zip(b) {
            k.insert(*p, *q);
        }
    }
    // Complete to a permutation: points of one support outside the other are
    // paired up in increasing order.
    let dom: BTreeSet<u64> = k.keys().copied().collect();
    let ran: BTreeSet<u64> = k.values().copied().collect();
    let free_dom: Vec<u64> = ran.difference(&dom).copied().collect();
    let free_ran: Vec<u64> = dom.difference(&ran).copied().collect();
    for (p, q) in free_dom.into_iter().zip(free_ran) {
        k.insert(p, q);
    }
    SupportedPermutation::new(k).ok()
}

/// Outcome of [`graph_iso_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoSearch {
    /// The lexicographically first isomorphism, on `0..n`.
    Found(PartialMap<u64, u64>),
    /// No isomorphism exists.
    None { reason: String },
    /// The node budget ran out first.
    Exhausted { expanded: u64 },
}

/// `graph_iso_bruteforce`.
pub fn graph_iso_bruteforce(x: &ListedGraph, y: &ListedGraph) -> Result<Option<PartialMap<u64, u64>>> {
    match graph_iso_search(x, y, u64::MAX)? {
        IsoSearch::Found(a) => Ok(Some(a)),
        IsoSearch::None { .. } => Ok(None),
        IsoSearch::Exhausted { .. } => unreachable!("unbounded search"),
    }
}

/// Depth-first search over bijections `0..n → 0..n` in lexicographic order,
/// pruned by degree and by adjacency to the vertices already placed.
pub fn graph_iso_search(x: &ListedGraph, y: &ListedGraph, budget: u64) -> Result<IsoSearch> {
    let (nx, ny) = (x.core_size() as usize, y.core_size() as usize);
    for n in [nx, ny] {
        if n > BRUTEFORCE_MAX {
            return Err(Error::TooLarge { n, max: BRUTEFORCE_MAX });
        }
    }
    if nx != ny {
        return Ok(IsoSearch::None { reason: format!("{nx} vertices against {ny}") });
    }
    let adj = |g: &ListedGraph| {
        let mut m = vec![vec![false; nx]; nx];
        for (i, j) in g.edges() {
            m[i as usize][j as usize] = true;
            m[j as usize][i as usize] = true;
        }
        m
    };
    let (ax, ay) = (adj(x), adj(y));
    let deg = |m: &Vec<Vec<bool>>| m.iter().map(|r| r.iter().filter(|&&e| e).count()).collect::<Vec<_>>();
    let (dx, dy) = (deg(&ax), deg(&ay));
    let (mut sx, mut sy) = (dx.clone(), dy.clone());
    sx.sort_unstable();
    sy.sort_unstable();
    if sx != sy {
        return Ok(IsoSearch::None { reason: "degree multisets differ".into() });
    }
    let mut s = Search { ax, ay, dx, dy, assign: Vec::new(), used: vec![false; nx], expanded: 0, budget };
    match s.extend() {
        Some(true) => Ok(IsoSearch::Found(
            PartialMap::from_pairs(s.assign.iter().enumerate().map(|(i, &j)| (i as u64, j as u64)))?,
        )),
        Some(false) => Ok(IsoSearch::None { reason: format!("no isomorphism among {} partial maps", s.expanded) }),
        None => Ok(IsoSearch::Exhausted { expanded: s.expanded }),
    }
}

struct Search {
    ax: Vec<Vec<bool>>,
    ay: Vec<Vec<bool>>,
    dx: Vec<usize>,
    dy: Vec<usize>,
    assign: Vec<usize>,
    used: Vec<bool>,
    expanded: u64,
    budget: u64,
}

impl Search {
    /// `Some(found)`, or `None` when the budget ran out.
    fn extend(&mut self) -> Option<bool> {
        let i = self.assign.len();
        if i == self.dx.len() {
            return Some(true);
        }
        for c in 0..self.dy.len() {
            if self.used[c] || self.dx[i] != self.dy[c] {
                continue;
            }
            if self.expanded >= self.budget {
                return None;
            }
            self.expanded += 1;
            if (0..i).any(|p| self.ax[i][p] != self.ay[c][self.assign[p]]) {
                continue;
            }
            self.assign.push(c);
            self.used[c] = true;
            if self.extend()? {
                return Some(true);
            }
            self.assign.pop();
            self.used[c] = false;
        }
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::staged::IdentityMap;

    fn perm(pairs: &[(u64, u64)]) -> SupportedPermutation {
        SupportedPermutation::new(pairs.iter().copied()).unwrap()
    }

    struct Shift;

    impl StagedMap<Nat, Nat> for Shift {
        fn stage(&self, s: usize) -> PartialMap<Nat, Nat> {
            PartialMap::from_pairs((0..s as u64).map(|k| (Nat::small(k), Nat::small(k + 1)))).unwrap()
        }
    }

    #[test]
    fn identity_cycle_type() {
        let c = cycle_type(&IdentityMap, 10).unwrap();
        assert_eq!(c.resolved, BTreeMap::from([(1, 10)]));
        assert_eq!(c.open_threads, 0);
        assert_eq!(c.to_string(), "cycles 1:10 open 0");
    }

    #[test]
    fn transposition_cycle_type() {
        let c = cycle_type(&perm(&[(0, 1), (1, 0)]), 10).unwrap();
        assert_eq!(c.resolved, BTreeMap::from([(1, 8), (2, 1)]));
        assert_eq!(c.open_threads, 0);
    }

    #[test]
    fn shift_is_one_open_thread() {
        let c = cycle_type(&Shift, 10).unwrap();
        assert!(c.resolved.is_empty());
        assert_eq!((c.open_threads, c.open_points), (1, 10));
    }

    #[test]
    fn cut_cycles_become_threads() {
        // (0 5 1): inside 0..3 the segment 1 -> 0 and 5 falls outside.
        let c = cycle_type(&perm(&[(0, 5), (5, 1), (1, 0)]), 3).unwrap();
        assert_eq!(c.resolved, BTreeMap::from([(1, 1)]));
        assert_eq!((c.open_threads, c.open_points), (1, 2));
        assert_eq!(c.resolved_points() + c.open_points, 3);
    }

    #[test]
    fn undefined_points_are_unresolved() {
        let f = crate::staged::FiniteMap(PartialMap::from_pairs([(Nat::small(0), Nat::small(0))]).unwrap());
        assert!(matches!(cycle_type(&f, 3), Err(Error::Unresolved(_))));
    }

    #[test]
    fn conjugator_matches_cycles() {
        let f = perm(&[(0, 1), (1, 2), (2, 0), (5, 6), (6, 5)]);
        let g = perm(&[(3, 4), (4, 3), (7, 9), (9, 8), (8, 7)]);
        let k = conjugator_by_cycles(&f, &g).unwrap();
        for p in 0..12 {
            assert_eq!(k.apply(f.apply(p)), g.apply(k.apply(p)));
        }
        assert!(conjugator_by_cycles(&f, &perm(&[(0, 1), (1, 0)])).is_none());
    }

    fn triangle() -> ListedGraph {
        ListedGraph::finite(3, &[(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn bruteforce_examples() {
        let id = graph_iso_bruteforce(&triangle(), &triangle()).unwrap().unwrap();
        assert!(id.iter().all(|(a, b)| a == b));
        let path = ListedGraph::finite(3, &[(0, 1), (1, 2)]);
        assert_eq!(graph_iso_bruteforce(&path, &triangle()).unwrap(), None);
        let big = ListedGraph::finite(10, &[]);
        assert_eq!(graph_iso_bruteforce(&big, &big), Err(Error::TooLarge { n: 10, max: 9 }));
    }

    fn is_iso(x: &ListedGraph, y: &ListedGraph, q: &[u64]) -> bool {
        let ey: BTreeSet<(u64, u64)> = y.edges().collect();
        x.edges().all(|(i, j)| {
            let (a, b) = (q[i as usize], q[j as usize]);
            ey.contains(&(a.min(b), a.max(b)))
        }) && x.edges().count() == ey.len()
    }

    #[test]
    fn bruteforce_finds_first_permutation() {
        let x = ListedGraph::finite(5, &[(0, 1), (1, 2), (2, 3), (1, 4)]);
        let y = x.relabel(&[3, 0, 4, 1, 2]);
        let a = graph_iso_bruteforce(&x, &y).unwrap().unwrap();
        let got: Vec<u64> = (0..5).map(|i| *a.get(&i).unwrap()).collect();
        assert!(is_iso(&x, &y, &got));
        // Lexicographically least among all isomorphisms, by enumeration.
        let mut best: Option<Vec<u64>> = None;
        let mut q: Vec<u64> = (0..5).collect();
        permutations(&mut q, 0, &mut |q| {
            if is_iso(&x, &y, q) && best.as_ref().is_none_or(|b| q < b.as_slice()) {
                best = Some(q.to_vec());
            }
        });
        assert_eq!(Some(got), best);
    }

    fn permutations(q: &mut Vec<u64>, k: usize, f: &mut impl FnMut(&[u64])) {
        if k == q.len() {
            f(q);
            return;
        }
        for i in k..q.len() {
            q.swap(k, i);
            permutations(q, k + 1, f);
            q.swap(k, i);
        }
    }

    #[test]
    fn budget_is_respected() {
        // Same degrees, not isomorphic: a hexagon and two triangles.
        let hex = ListedGraph::finite(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]);
        let two = ListedGraph::finite(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(graph_iso_search(&hex, &two, 5).unwrap(), IsoSearch::Exhausted { expanded: 5 });
        assert!(matches!(graph_iso_search(&hex, &two, u64::MAX).unwrap(), IsoSearch::None { .. }));
        assert_eq!(graph_iso_bruteforce(&two, &hex).unwrap(), None);
    }
}
