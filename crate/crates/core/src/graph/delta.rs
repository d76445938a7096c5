//! `Δ_x`: two copies of `x` in rows 0 and 1 joined by a perfect matching,
//! plus witness rows `i ≥ 2` where `(i, n)` sees exactly `S^i_n` below it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::choice::{choice_set, ChoiceSet};
use super::hereditary::{Transport, VertexArena, VertexId};
use crate::backforth::{graph_type_over, Atom, AtomicType, FreshTracker, Homogeneous};
use crate::error::{Error, Result};
use crate::pairing::{pair, unpair};
use crate::structure::GraphOracle;

/// Codes above this many bits are not written out by default.
pub const DEFAULT_MAX_CODE_BITS: u64 = 1 << 14;

/// A vertex `(row, col)` of `Δ_x` with its pairing code. Ordered by code.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexCode {
    code: BigUint,
    row: usize,
    col: BigUint,
}

impl VertexCode {
    pub fn new(row: usize, col: BigUint) -> Self {
        VertexCode { code: pair(&BigUint::from(row), &col), row, col }
    }

    pub fn from_code(code: BigUint) -> Result<Self> {
        let (i, j) = unpair(&code);
        let row = i.to_usize().ok_or_else(|| Error::Unresolved(format!("row of code {code} is out of range")))?;
        Ok(VertexCode { code, row, col: j })
    }

    pub fn code(&self) -> &BigUint {
        &self.code
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn col(&self) -> &BigUint {
        &self.col
    }
}

impl From<u64> for VertexCode {
    fn from(code: u64) -> Self {
        VertexCode::from_code(BigUint::from(code)).expect("rows of 64-bit codes fit")
    }
}

impl Ord for VertexCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code.cmp(&other.code)
    }
}

impl PartialOrd for VertexCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl fmt::Display for VertexCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.row, self.col)
    }
}

fn x_adj(x: &dyn GraphOracle, a: &BigUint, b: &BigUint) -> bool {
    match (a.to_u64(), b.to_u64()) {
        (Some(a), Some(b)) => a != b && x.adj(a, b),
        // Columns past 64 bits are padding.
        _ => false,
    }
}

fn adj_with(x: &dyn GraphOracle, u: &VertexCode, v: &VertexCode, set_of: impl Fn(&VertexCode) -> Arc<ChoiceSet>) -> bool {
    let (u, v) = if u.row <= v.row { (u, v) } else { (v, u) };
    match (u.row, v.row) {
        (0, 0) | (1, 1) => x_adj(x, &u.col, &v.col),
        (0, 1) => u.col == v.col,
        (r, i) if r == i => false,
        (r, _) => set_of(v).contains(r, &u.col),
    }
}

/// `delta_adj`.
pub fn delta_adj(x: &dyn GraphOracle, u: &VertexCode, v: &VertexCode) -> bool {
    adj_with(x, u, v, |w| Arc::new(choice_set(w.row, &w.col).expect("row is at least 2")))
}

/// `delta_witness`: a row-`i` vertex seeing all of `u` and none of `v`, with
/// `i = max(2, 1 + max row of u ∪ v, max_r |u ∩ row r|)` and each row padded
/// by its smallest columns not taken by `u ∪ v`.
pub fn delta_witness(u: &BTreeSet<VertexCode>, v: &BTreeSet<VertexCode>) -> Result<VertexCode> {
    if u.intersection(v).next().is_some() {
        return Err(Error::OverlappingSets);
    }
    let mut per_row: BTreeMap<usize, usize> = BTreeMap::new();
    for w in u {
        *per_row.entry(w.row).or_default() += 1;
    }
    let top_row = u.iter().chain(v).map(|w| w.row + 1).max().unwrap_or(0);
    let widest = per_row.values().copied().max().unwrap_or(0);
    let i = 2.max(top_row).max(widest);
    let rows = (0..i)
        .map(|r| {
            let mut cols: Vec<BigUint> = u.iter().filter(|w| w.row == r).map(|w| w.col.clone()).collect();
            let taken: BTreeSet<&BigUint> = u.iter().chain(v).filter(|w| w.row == r).map(|w| &w.col).collect();
            let mut c = BigUint::from(0u32);
            while cols.len() < i {
                if !taken.contains(&c) {
                    cols.push(c.clone());
                }
                c += 1u32;
            }
            cols
        })
        .collect();
    Ok(VertexCode::new(i, ChoiceSet::new(i, rows)?.rank()))
}

/// The swap `σ`, the same permutation of codes for every `x`, with a cache of
/// choice sets for adjacency queries.
pub struct SwapMemo {
    sigma: Transport,
    sets: Mutex<HashMap<VertexCode, Arc<ChoiceSet>>>,
}

impl Default for SwapMemo {
    fn default() -> Self {
        Self::with_arena(Arc::new(VertexArena::new()))
    }
}

impl SwapMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_arena(arena: Arc<VertexArena>) -> Self {
        SwapMemo { sigma: Transport::new(arena, |row, col| (1 - row, col.clone())), sets: Mutex::default() }
    }

    /// The memo over the process-wide arena.
    pub fn shared() -> Arc<SwapMemo> {
        static SHARED: OnceLock<Arc<SwapMemo>> = OnceLock::new();
        SHARED.get_or_init(|| Arc::new(SwapMemo::with_arena(VertexArena::shared()))).clone()
    }

    pub fn arena(&self) -> &Arc<VertexArena> {
        self.sigma.arena()
    }

    pub fn choice_set_of(&self, v: &VertexCode) -> Arc<ChoiceSet> {
        if let Some(s) = self.sets.lock().unwrap().get(v) {
            return s.clone();
        }
        let s = Arc::new(choice_set(v.row, &v.col).expect("row is at least 2"));
        self.sets.lock().unwrap().insert(v.clone(), s.clone());
        s
    }

    /// `σ`: swaps rows 0 and 1 columnwise and acts on row `i ≥ 2` through the
    /// image of `S^i_n`.
    pub fn swap_id(&self, id: VertexId) -> VertexId {
        self.sigma.apply_id(id)
    }

    /// `σ(v)`, if its code has at most `max_bits` bits.
    pub fn swap(&self, v: &VertexCode, max_bits: u64) -> Result<VertexCode> {
        let img = self.sigma.apply(v);
        self.arena().code(img, max_bits).ok_or_else(|| {
            Error::Unresolved(format!("σ{v:?} has a code of more than {max_bits} bits"))
        })
    }
}

/// `swap_vertex`, refusing images whose codes exceed `max_bits` bits.
pub fn swap_vertex(v: &VertexCode, max_bits: u64) -> Result<VertexCode> {
    SwapMemo::shared().swap(v, max_bits)
}

/// `Δ_x` as a back-and-forth participant. Elements are interned vertices, so
/// witnesses and swaps whose codes are astronomically large stay cheap.
pub struct DeltaGraph {
    x: Arc<dyn GraphOracle>,
    memo: Arc<SwapMemo>,
}

impl DeltaGraph {
    pub fn new(x: Arc<dyn GraphOracle>) -> Self {
        Self::with_memo(x, SwapMemo::shared())
    }

    pub fn with_memo(x: Arc<dyn GraphOracle>, memo: Arc<SwapMemo>) -> Self {
        DeltaGraph { x, memo }
    }

    pub fn oracle(&self) -> &Arc<dyn GraphOracle> {
        &self.x
    }

    pub fn memo(&self) -> &Arc<SwapMemo> {
        &self.memo
    }

    pub fn arena(&self) -> &Arc<VertexArena> {
        self.memo.arena()
    }

    pub fn adj(&self, u: &VertexCode, v: &VertexCode) -> bool {
        adj_with(self.x.as_ref(), u, v, |w| self.memo.choice_set_of(w))
    }

    pub fn swap(&self, v: VertexId) -> VertexId {
        self.memo.swap_id(v)
    }
}

/// Hands out vertices in code order.
pub struct CodeTracker {
    arena: Arc<VertexArena>,
    next: u64,
    used: BTreeSet<VertexId>,
}

impl FreshTracker<VertexId> for CodeTracker {
    fn least_unused(&mut self) -> VertexId {
        loop {
            let v = self.arena.intern(&VertexCode::from(self.next));
            if !self.used.contains(&v) {
                return v;
            }
            self.next += 1;
        }
    }

    fn mark_used(&mut self, e: &VertexId) {
        self.used.insert(*e);
    }
}

impl Homogeneous for DeltaGraph {
    type Elem = VertexId;
    type Fresh = CodeTracker;

    fn fresh_tracker(&self) -> Self::Fresh {
        CodeTracker { arena: self.arena().clone(), next: 0, used: BTreeSet::new() }
    }

    fn atom(&self, a: &VertexId, b: &VertexId) -> Atom {
        Atom::Adjacent(self.arena().adj(self.x.as_ref(), *a, *b))
    }

    fn type_over<V>(&self, e: &VertexId, placed: &BTreeMap<VertexId, V>) -> AtomicType<VertexId> {
        graph_type_over(self, e, placed)
    }

    fn realize(&self, t: &AtomicType<VertexId>) -> Result<VertexId> {
        match t {
            AtomicType::Graph { adjacent, non_adjacent } => self.arena().witness(adjacent, non_adjacent),
            AtomicType::Order { .. } => Err(Error::WitnessFailure("order type asked of a graph".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::ListedGraph;

    fn vc(r: usize, c: u64) -> VertexCode {
        VertexCode::new(r, BigUint::from(c))
    }

    fn edge01() -> ListedGraph {
        ListedGraph::finite(3, &[(0, 1)])
    }

    #[test]
    fn adjacency_examples() {
        let x = edge01();
        assert!(delta_adj(&x, &vc(0, 0), &vc(0, 1)));
        assert!(delta_adj(&x, &vc(1, 0), &vc(1, 1)));
        assert!(delta_adj(&x, &vc(0, 7), &vc(1, 7)));
        assert!(!delta_adj(&x, &vc(0, 7), &vc(1, 8)));
        for n in 0..20 {
            for m in 0..20 {
                assert!(!delta_adj(&x, &vc(2, n), &vc(2, m)));
            }
        }
    }

    #[test]
    fn row_two_vertex_sees_its_choice_set() {
        let x = edge01();
        // S^2_0 = {0,1} in rows 0 and 1.
        for r in 0..2 {
            for c in 0..5 {
                assert_eq!(delta_adj(&x, &vc(r, c), &vc(2, 0)), c < 2);
            }
        }
    }

    #[test]
    fn witness_examples() {
        let u: BTreeSet<VertexCode> = [vc(0, 0), vc(1, 0)].into();
        assert_eq!(delta_witness(&u, &BTreeSet::new()).unwrap(), vc(2, 0));
        let v: BTreeSet<VertexCode> = [vc(0, 5)].into();
        let w = delta_witness(&BTreeSet::new(), &v).unwrap();
        assert_eq!(w, vc(2, 0));
        assert!(!delta_adj(&edge01(), &w, &vc(0, 5)));
        let both: BTreeSet<VertexCode> = [vc(0, 0)].into();
        assert_eq!(delta_witness(&both, &both), Err(Error::OverlappingSets));
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap_vertex(&vc(0, 5), 64), Ok(vc(1, 5)));
        assert_eq!(swap_vertex(&vc(2, 0), 64), Ok(vc(2, 0)));
        // S^2_1 = ({0,1}, {0,2}) and S^2_2 = ({0,2}, {0,1}).
        assert_eq!(swap_vertex(&vc(2, 1), 64), Ok(vc(2, 2)));
        assert!(matches!(swap_vertex(&vc(7, 0), 1 << 10), Err(Error::Unresolved(_))));
    }

    #[test]
    fn swap_is_an_involution() {
        let memo = SwapMemo::new();
        for code in 0..2000u64 {
            let v = memo.arena().intern(&VertexCode::from(code));
            assert_eq!(memo.swap_id(memo.swap_id(v)), v);
        }
    }

    #[test]
    fn codes_round_trip() {
        for code in 0..2000u64 {
            let v = VertexCode::from(code);
            assert_eq!(VertexCode::new(v.row(), v.col().clone()), v);
        }
    }
}
