//! Graphs into conjugacy of automorphisms of `Γ`: `φ_x = h σ h⁻¹` for the
//! canonical isomorphism `h : Δ_x → Γ`, and the conjugators built from
//! isomorphisms `x ≅ y`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::delta::{DeltaGraph, SwapMemo, VertexCode, DEFAULT_MAX_CODE_BITS};
use super::hereditary::{Transport, VertexArena, VertexId};
use crate::backforth::{BackAndForth, Closure};
use crate::error::{Error, Result};
use crate::invariants::{graph_iso_search, IsoSearch};
use crate::nat::Nat;
use crate::rado::RadoGraph;
use crate::staged::{PartialMap, StageLimit, StagedMap};
use crate::structure::{GraphOracle, GraphSize, ListedGraph};

/// Stage budget of the canonical isomorphism `Δ_x → Γ`.
pub const DEFAULT_GRAPH_STAGES: usize = 256;

/// Prefix on which conjugacy certificates are checked.
pub const CERTIFICATE_PREFIX: u64 = 200;

/// Codes of `Δ_x` below this are checked exhaustively against the
/// row-preserving conjugator.
pub const DELTA_CHECK_CODES: u64 = 200;

pub type DeltaToRado = BackAndForth<DeltaGraph, RadoGraph>;

/// `φ_x` together with the isomorphism `h` it is transported along.
pub struct GraphReduction {
    h: DeltaToRado,
}

/// `graph_reduce` with the default stage budget.
pub fn graph_reduce(x: Arc<dyn GraphOracle>) -> GraphReduction {
    graph_reduce_with(x, DEFAULT_GRAPH_STAGES)
}

/// `graph_reduce`. The back-and-forth for `h` maps `σ(a)` whenever it maps
/// `a`, so every stage's range is closed under `φ_x`.
pub fn graph_reduce_with(x: Arc<dyn GraphOracle>, max_stage: usize) -> GraphReduction {
    let delta = DeltaGraph::new(x);
    let memo = delta.memo().clone();
    let sigma: Closure<VertexId> = Arc::new(move |v| Ok(memo.swap_id(*v)));
    GraphReduction { h: BackAndForth::closed_under(delta, RadoGraph, sigma, max_stage) }
}

impl GraphReduction {
    pub fn h(&self) -> &DeltaToRado {
        &self.h
    }

    pub fn delta(&self) -> &DeltaGraph {
        self.h.left()
    }

    /// `φ_x(k)`, advancing `h` until `k` is in its range.
    pub fn resolve(&self, k: &Nat) -> Option<Nat> {
        let a = self.h.resolve_backward(k)?;
        self.h.resolve_forward(&self.delta().swap(a))
    }
}

impl StagedMap<Nat, Nat> for GraphReduction {
    fn stage(&self, s: usize) -> PartialMap<Nat, Nat> {
        let h = self.h.stage(s);
        let mut out = PartialMap::new();
        for (a, b) in h.iter() {
            let img = h.get(&self.delta().swap(*a)).expect("stages are σ-closed");
            out.insert(b.clone(), img.clone()).expect("conjugate of a permutation");
        }
        out
    }

    fn limit(&self) -> Option<StageLimit> {
        self.h.limit()
    }

    fn lookup(&self, k: &Nat, s: usize) -> Option<Nat> {
        let a = self.h.backward(k, s)?;
        self.h.forward(&self.delta().swap(a), s)
    }
}

/// A bijection of ℕ moving finitely many points, checked as an isomorphism
/// `x ≅ y` of padded graphs.
fn checked_iso(x: &dyn GraphOracle, y: &dyn GraphOracle, a: &PartialMap<u64, u64>) -> Result<HashMap<u64, u64>> {
    let dom: BTreeSet<u64> = a.domain().copied().collect();
    let ran: BTreeSet<u64> = a.range().copied().collect();
    if dom != ran {
        return Err(Error::NotAnIsomorphism("map is not a permutation of its support".into()));
    }
    let (GraphSize::Finite(nx), GraphSize::Finite(ny)) = (x.known_size(), y.known_size()) else {
        return Err(Error::NotAnIsomorphism("isomorphisms are only checked between finite graphs".into()));
    };
    let n = nx.max(ny).max(dom.last().map_or(0, |m| m + 1));
    let at = |v: u64| a.get(&v).copied().unwrap_or(v);
    for i in 0..n {
        for j in i + 1..n {
            if x.adj(i, j) != y.adj(at(i), at(j)) {
                return Err(Error::NotAnIsomorphism(format!(
                    "{i}-{j} is {} but {}-{} is {}",
                    edge_word(x.adj(i, j)),
                    at(i),
                    at(j),
                    edge_word(y.adj(at(i), at(j)))
                )));
            }
        }
    }
    Ok(a.iter().map(|(&i, &j)| (i, j)).collect())
}

fn edge_word(e: bool) -> &'static str {
    if e {
        "an edge"
    } else {
        "a non-edge"
    }
}

/// The row-preserving isomorphism `α : Δ_x → Δ_y` induced by `a : x ≅ y`:
/// `a` on the columns of rows 0 and 1, and `(i, n) ↦ (i, rank α[S^i_n])`.
pub struct RowPreserving {
    a: Arc<HashMap<u64, u64>>,
    transport: Transport,
}

impl RowPreserving {
    pub fn new(arena: Arc<VertexArena>, a: HashMap<u64, u64>) -> Self {
        let a = Arc::new(a);
        let on_cols = a.clone();
        let transport = Transport::new(arena, move |row, col| {
            let img = match col.to_u64().and_then(|c| on_cols.get(&c)) {
                Some(&c) => BigUint::from(c),
                None => col.clone(),
            };
            (row, img)
        });
        RowPreserving { a, transport }
    }

    /// `α⁻¹`, induced by `a⁻¹`.
    pub fn inverse(&self) -> RowPreserving {
        RowPreserving::new(self.arena().clone(), self.a.iter().map(|(&i, &j)| (j, i)).collect())
    }

    pub fn arena(&self) -> &Arc<VertexArena> {
        self.transport.arena()
    }

    pub fn apply_id(&self, id: VertexId) -> VertexId {
        self.transport.apply_id(id)
    }

    /// `α(v)`, if its code has at most `max_bits` bits.
    pub fn apply(&self, v: &VertexCode, max_bits: u64) -> Option<VertexCode> {
        let img = self.transport.apply(v);
        self.arena().code(img, max_bits)
    }

    /// `α` on those codes below `n` whose images have at most `max_bits` bits.
    pub fn prefix(&self, n: u64, max_bits: u64) -> PartialMap<VertexCode, VertexCode> {
        let mut out = PartialMap::new();
        for code in 0..n {
            let v = VertexCode::from(code);
            if let Some(w) = self.apply(&v, max_bits) {
                out.insert(v, w).expect("α is injective");
            }
        }
        out
    }
}

/// `γ = h_y α h_x⁻¹`.
pub struct GraphConjugator {
    hx: Arc<GraphReduction>,
    hy: Arc<GraphReduction>,
    alpha: RowPreserving,
}

/// `graph_conjugator`.
pub fn graph_conjugator(hx: Arc<GraphReduction>, hy: Arc<GraphReduction>, a: &PartialMap<u64, u64>) -> Result<GraphConjugator> {
    let x = hx.delta().oracle().clone();
    let y = hy.delta().oracle().clone();
    let a = checked_iso(x.as_ref(), y.as_ref(), a)?;
    let alpha = RowPreserving::new(hx.delta().memo().arena().clone(), a);
    Ok(GraphConjugator { hx, hy, alpha })
}

impl GraphConjugator {
    pub fn alpha(&self) -> &RowPreserving {
        &self.alpha
    }

    /// `γ(k)`, advancing both isomorphisms as far as their budgets allow.
    pub fn resolve(&self, k: &Nat) -> Option<Nat> {
        let a = self.hx.h().resolve_backward(k)?;
        self.hy.h().resolve_forward(&self.alpha.apply_id(a))
    }

    /// Checks `α σ_x = σ_y α` and that `α` carries `Δ_x`-adjacency to
    /// `Δ_y`-adjacency, on all codes below `n`. Images are compared as
    /// vertices, whatever the size of their codes.
    pub fn verify_on_delta(&self, n: u64) -> Result<()> {
        let (dx, dy) = (self.hx.delta(), self.hy.delta());
        let arena = self.alpha.arena();
        let (x, y) = (dx.oracle().as_ref(), dy.oracle().as_ref());
        let vs: Vec<VertexId> = (0..n).map(|c| arena.intern(&VertexCode::from(c))).collect();
        let imgs: Vec<VertexId> = vs.iter().map(|&v| self.alpha.apply_id(v)).collect();
        for (code, (&v, &av)) in vs.iter().zip(&imgs).enumerate() {
            let lhs = self.alpha.apply_id(dx.memo().swap_id(v));
            let rhs = dy.memo().swap_id(av);
            if lhs != rhs {
                return Err(Error::NotCommuting(format!("α σ and σ α differ at code {code}")));
            }
        }
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if arena.adj(x, vs[i], vs[j]) != arena.adj(y, imgs[i], imgs[j]) {
                    return Err(Error::NotAnIsomorphism(format!("α breaks the pair of codes {i}, {j}")));
                }
            }
        }
        Ok(())
    }
}

impl StagedMap<Nat, Nat> for GraphConjugator {
    fn stage(&self, s: usize) -> PartialMap<Nat, Nat> {
        let hy = self.hy.h().stage(s);
        let mut out = PartialMap::new();
        for (a, b) in self.hx.h().stage(s).iter() {
            if let Some(img) = hy.get(&self.alpha.apply_id(*a)) {
                out.insert(b.clone(), img.clone()).expect("γ is injective");
            }
        }
        out
    }

    fn limit(&self) -> Option<StageLimit> {
        self.hx.limit().or_else(|| self.hy.limit())
    }

    fn lookup(&self, k: &Nat, s: usize) -> Option<Nat> {
        let a = self.hx.h().backward(k, s)?;
        self.hy.h().forward(&self.alpha.apply_id(a), s)
    }
}

/// Outcome of checking `γ φ_x = φ_y γ` on a prefix of ℕ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CommuteReport {
    /// Points where all four values resolved and agreed.
    pub checked: u64,
    /// Points where some value lies beyond the stage budgets.
    pub unresolved: u64,
}

/// Checks `γ(φ_x(k)) = φ_y(γ(k))` for `k < prefix` wherever every value
/// resolves at stage `s`.
pub fn check_commuting<G, P, Q>(gamma: &G, phi_x: &P, phi_y: &Q, prefix: u64, s: usize) -> Result<CommuteReport>
where
    G: StagedMap<Nat, Nat> + ?Sized,
    P: StagedMap<Nat, Nat> + ?Sized,
    Q: StagedMap<Nat, Nat> + ?Sized,
{
    let (g, px, py) = (gamma.stage(s), phi_x.stage(s), phi_y.stage(s));
    let mut report = CommuteReport::default();
    for k in 0..prefix {
        let k = Nat::small(k);
        let lhs = px.get(&k).and_then(|v| g.get(v));
        let rhs = g.get(&k).and_then(|v| py.get(v));
        match (lhs, rhs) {
            (Some(l), Some(r)) if l == r => report.checked += 1,
            (Some(l), Some(r)) => {
                return Err(Error::NotCommuting(format!("γ(φ_x({k})) = {l} but φ_y(γ({k})) = {r}")));
            }
            _ => report.unresolved += 1,
        }
    }
    Ok(report)
}

/// `recover_graph_iso`: reads `a(n)` off the column of `α((0, n))` for
/// `n < prefix`, after checking that `α` commutes with the swaps where both
/// sides are defined.
pub fn recover_graph_iso(
    x: &dyn GraphOracle,
    y: &dyn GraphOracle,
    alpha: &PartialMap<VertexCode, VertexCode>,
    swap: &SwapMemo,
    prefix: u64,
) -> Result<PartialMap<u64, u64>> {
    let arena = swap.arena();
    for (v, w) in alpha.iter() {
        // Codes out of reach of the budget are not keys of `alpha`.
        let Ok(sv) = swap.swap(v, DEFAULT_MAX_CODE_BITS) else { continue };
        if let Some(lhs) = alpha.get(&sv) {
            if arena.intern(lhs) != swap.swap_id(arena.intern(w)) {
                return Err(Error::NotCommuting(format!("{v:?}")));
            }
        }
    }
    let mut a = PartialMap::new();
    for n in 0..prefix {
        let Some(w) = alpha.get(&VertexCode::new(0, BigUint::from(n))) else { continue };
        if w.row() >= 2 {
            return Err(Error::RowViolation { row: w.row() });
        }
        let col = w
            .col()
            .to_u64()
            .ok_or_else(|| Error::NotAnIsomorphism(format!("column of α((0,{n})) exceeds 64 bits")))?;
        a.insert(n, col)?;
    }
    let pts: Vec<(u64, u64)> = a.iter().map(|(&i, &j)| (i, j)).collect();
    for (k, &(i, ai)) in pts.iter().enumerate() {
        for &(j, aj) in &pts[k + 1..] {
            if x.adj(i, j) != y.adj(ai, aj) {
                return Err(Error::NotAnIsomorphism(format!("{i}-{j} against {ai}-{aj}")));
            }
        }
    }
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Conjugate {
        iso: PartialMap<u64, u64>,
        certificate: PartialMap<Nat, Nat>,
        report: CommuteReport,
    },
    NotConjugate {
        witness: String,
    },
    Exhausted {
        expanded: u64,
    },
}

impl Verdict {
    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Conjugate { .. } => "conjugate",
            Verdict::NotConjugate { .. } => "not-conjugate",
            Verdict::Exhausted { .. } => "exhausted",
        }
    }
}

/// `decide_conjugate_reduced` on finite graphs, padded to a common size.
///
/// An isomorphism yields `γ`, checked on [`CERTIFICATE_PREFIX`] and, at the
/// level of `Δ`, on codes below [`DELTA_CHECK_CODES`]. A complete search
/// without one is a refutation: conjugate `φ_x, φ_y` force `x ≅ y`.
pub fn decide_conjugate_reduced(
    hx: Arc<GraphReduction>,
    hy: Arc<GraphReduction>,
    x: &ListedGraph,
    y: &ListedGraph,
    budget: u64,
    stage: usize,
) -> Result<Verdict> {
    let n = x.core_size().max(y.core_size());
    let pad = |g: &ListedGraph| ListedGraph::new(GraphSize::Finite(n), g.edges());
    let (px, py) = (pad(x)?, pad(y)?);
    let a = match graph_iso_search(&px, &py, budget)? {
        IsoSearch::Found(a) => a,
        IsoSearch::None { reason } => return Ok(Verdict::NotConjugate { witness: reason }),
        IsoSearch::Exhausted { expanded } => return Ok(Verdict::Exhausted { expanded }),
    };
    let gamma = graph_conjugator(hx.clone(), hy.clone(), &a)?;
    gamma.verify_on_delta(DELTA_CHECK_CODES)?;
    let report = check_commuting(&gamma, hx.as_ref(), hy.as_ref(), CERTIFICATE_PREFIX, stage)?;
    Ok(Verdict::Conjugate { iso: a, certificate: gamma.stage(stage), report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rado::rado_adj;
    use crate::staged::audit_coherence;

    fn reduce(g: ListedGraph) -> Arc<GraphReduction> {
        Arc::new(graph_reduce_with(Arc::new(g), 12))
    }

    fn perm(pairs: &[(u64, u64)]) -> PartialMap<u64, u64> {
        PartialMap::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn phi_is_an_adjacency_preserving_involution() {
        let r = reduce(ListedGraph::finite(3, &[(0, 1), (1, 2)]));
        let st = r.stage(12);
        assert!(st.len() >= 8, "only {} points resolved", st.len());
        for (k, v) in st.iter() {
            assert_eq!(st.get(v), Some(k));
            for (k2, v2) in st.iter() {
                assert_eq!(rado_adj(k, k2), rado_adj(v, v2));
            }
        }
        audit_coherence(r.as_ref(), 12).unwrap();
    }

    #[test]
    fn identity_conjugator_commutes() {
        let r = reduce(ListedGraph::finite(3, &[(0, 1), (1, 2), (0, 2)]));
        let g = graph_conjugator(r.clone(), r.clone(), &perm(&[])).unwrap();
        g.verify_on_delta(150).unwrap();
        let rep = check_commuting(&g, r.as_ref(), r.as_ref(), 200, 12).unwrap();
        assert!(rep.checked > 0);
    }

    #[test]
    fn rotation_conjugator_commutes_and_round_trips() {
        let x = ListedGraph::finite(3, &[(0, 1)]);
        let y = ListedGraph::finite(3, &[(1, 2)]);
        let a = perm(&[(0, 1), (1, 2), (2, 0)]);
        let (rx, ry) = (reduce(x.clone()), reduce(y.clone()));
        let g = graph_conjugator(rx.clone(), ry.clone(), &a).unwrap();
        g.verify_on_delta(150).unwrap();
        check_commuting(&g, rx.as_ref(), ry.as_ref(), 200, 12).unwrap();
        let alpha = g.alpha().prefix(400, 1 << 12);
        assert!((0..400u64).map(VertexCode::from).filter(|v| v.row() < 2).all(|v| alpha.contains(&v)));
        let memo = rx.delta().memo();
        let got = recover_graph_iso(&x, &y, &alpha, memo, 3).unwrap();
        assert_eq!(got, a);
        // Following α by the swap lands row 0 in row 1; the columns are unchanged.
        let swapped =
            PartialMap::from_pairs(alpha.iter().filter_map(|(v, w)| Some((v.clone(), memo.swap(w, 1 << 12).ok()?)))).unwrap();
        assert_eq!(recover_graph_iso(&x, &y, &swapped, memo, 3).unwrap(), a);
    }

    #[test]
    fn non_isomorphism_is_rejected() {
        let x = reduce(ListedGraph::finite(3, &[(0, 1)]));
        let y = reduce(ListedGraph::finite(3, &[(1, 2)]));
        assert!(matches!(graph_conjugator(x, y, &perm(&[])), Err(Error::NotAnIsomorphism(_))));
    }

    #[test]
    fn row_violation_is_reported() {
        let x = ListedGraph::finite(2, &[]);
        let alpha = PartialMap::from_pairs([(VertexCode::new(0, 0u32.into()), VertexCode::new(2, 0u32.into()))]).unwrap();
        assert_eq!(recover_graph_iso(&x, &x, &alpha, &SwapMemo::new(), 2), Err(Error::RowViolation { row: 2 }));
    }

    #[test]
    fn decide_examples() {
        let tri = ListedGraph::finite(3, &[(0, 1), (1, 2), (0, 2)]);
        let path = ListedGraph::finite(3, &[(0, 1), (1, 2)]);
        let (rt, rp) = (reduce(tri.clone()), reduce(path.clone()));
        let v = decide_conjugate_reduced(rt.clone(), rt.clone(), &tri, &tri, 1_000_000, 12).unwrap();
        assert_eq!(v.word(), "conjugate");
        let v = decide_conjugate_reduced(rp, rt, &path, &tri, 1_000_000, 12).unwrap();
        assert_eq!(v.word(), "not-conjugate");
    }
}
