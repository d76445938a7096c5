//! Vertices of `Δ` as interned hereditary choice sets.
//!
//! A vertex `(i, n)` with `i ≥ 2` is determined by the set `S^i_n` it sees
//! below it, so the swap and the row-preserving conjugators can act on that
//! structure directly. Their images often have codes far too large to write
//! down (the column of `σ((7, 0))` already runs past a million bits), so an
//! image is kept as structure and turned into a code only on request, under a
//! bit budget.
//!
//! Interning makes structure canonical: two ids of one arena are equal iff
//! they name the same vertex.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap as HashMap;

use super::choice::{shell_rank, shell_unrank, subset_rank, subset_unrank};
use super::delta::VertexCode;
use crate::error::{Error, Result};
use crate::structure::GraphOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    Low { row: usize, col: BigUint },
    /// Subset ids, indexed by row.
    High { row: usize, rows: Vec<u32> },
}

#[derive(Default)]
struct Store {
    nodes: Vec<Node>,
    node_ids: HashMap<Node, VertexId>,
    /// Sorted member ids; all members of a subset share a row.
    subsets: Vec<Vec<VertexId>>,
    subset_ids: HashMap<Vec<VertexId>, u32>,
    /// Interned codes, by row then column.
    by_code: Vec<HashMap<BigUint, VertexId>>,
    by_rank: HashMap<(usize, usize, BigUint), u32>,
    codes: HashMap<VertexId, VertexCode>,
    prints: HashMap<VertexId, u64>,
}

impl Store {
    fn node(&self, id: VertexId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    fn row(&self, id: VertexId) -> usize {
        match self.node(id) {
            Node::Low { row, .. } | Node::High { row, .. } => *row,
        }
    }

    fn intern_node(&mut self, node: Node) -> VertexId {
        if let Some(&id) = self.node_ids.get(&node) {
            return id;
        }
        let id = VertexId(u32::try_from(self.nodes.len()).expect("arena holds fewer than 2^32 vertices"));
        self.nodes.push(node.clone());
        self.node_ids.insert(node, id);
        id
    }

    fn intern_subset(&mut self, mut members: Vec<VertexId>) -> u32 {
        members.sort_unstable();
        if let Some(&s) = self.subset_ids.get(&members) {
            return s;
        }
        let s = u32::try_from(self.subsets.len()).expect("arena holds fewer than 2^32 subsets");
        self.subsets.push(members.clone());
        self.subset_ids.insert(members, s);
        s
    }

    fn intern_code(&mut self, row: usize, col: &BigUint) -> VertexId {
        if let Some(&id) = self.by_code.get(row).and_then(|m| m.get(col)) {
            return id;
        }
        let node = if row < 2 {
            Node::Low { row, col: col.clone() }
        } else {
            let rows = shell_unrank(col, row)
                .into_iter()
                .enumerate()
                .map(|(r, rank)| self.intern_ranked_subset(r, row, rank))
                .collect();
            Node::High { row, rows }
        };
        let id = self.intern_node(node);
        self.note_code(row, col.clone(), id);
        id
    }

    /// The subset of row `r` with `size` members and colex rank `rank`.
    fn intern_ranked_subset(&mut self, r: usize, size: usize, rank: BigUint) -> u32 {
        let key = (r, size, rank);
        if let Some(&s) = self.by_rank.get(&key) {
            return s;
        }
        let members = subset_unrank(&key.2, size).iter().map(|c| self.intern_code(r, c)).collect();
        let s = self.intern_subset(members);
        self.by_rank.insert(key, s);
        s
    }

    fn note_code(&mut self, row: usize, col: BigUint, id: VertexId) {
        if self.by_code.len() <= row {
            self.by_code.resize_with(row + 1, HashMap::default);
        }
        self.by_code[row].insert(col, id);
    }

    fn code(&mut self, id: VertexId, max_bits: u64) -> Option<VertexCode> {
        if let Some(v) = self.codes.get(&id) {
            return (v.code().bits() <= max_bits).then(|| v.clone());
        }
        let v = match self.node(id).clone() {
            Node::Low { row, col } => VertexCode::new(row, col),
            Node::High { row, rows } => {
                let mut ranks = Vec::with_capacity(row);
                for s in rows {
                    let mut cols = Vec::with_capacity(row);
                    for m in self.subsets[s as usize].clone() {
                        cols.push(self.code(m, max_bits)?.col().clone());
                    }
                    cols.sort();
                    ranks.push(subset_rank(&cols));
                }
                // The shell rank is at least max^row.
                let widest = ranks.iter().map(|r| r.bits()).max().unwrap_or(0);
                if (row as u64).saturating_mul(widest.saturating_sub(1)) > max_bits {
                    return None;
                }
                VertexCode::new(row, shell_rank(&ranks))
            }
        };
        if v.code().bits() > max_bits {
            return None;
        }
        self.codes.insert(id, v.clone());
        self.note_code(v.row(), v.col().clone(), id);
        Some(v)
    }

    fn fingerprint(&mut self, id: VertexId) -> u64 {
        if let Some(&p) = self.prints.get(&id) {
            return p;
        }
        let mut h = DefaultHasher::new();
        match self.node(id).clone() {
            Node::Low { row, col } => (row, col).hash(&mut h),
            Node::High { row, rows } => {
                row.hash(&mut h);
                for s in rows {
                    let mut ps: Vec<u64> = self.subsets[s as usize].clone().into_iter().map(|m| self.fingerprint(m)).collect();
                    ps.sort_unstable();
                    ps.hash(&mut h);
                }
            }
        }
        let p = h.finish();
        self.prints.insert(id, p);
        p
    }
}

/// An interning store of `Δ` vertices. The vertex set of `Δ_x` does not
/// depend on `x`, so one arena serves every graph.
#[derive(Default)]
pub struct VertexArena {
    store: Mutex<Store>,
}

impl VertexArena {
    pub fn new() -> Self {
        Self::default()
    }

    /// The process-wide arena.
    pub fn shared() -> Arc<VertexArena> {
        static SHARED: OnceLock<Arc<VertexArena>> = OnceLock::new();
        SHARED.get_or_init(|| Arc::new(VertexArena::new())).clone()
    }

    pub fn intern(&self, v: &VertexCode) -> VertexId {
        self.store.lock().unwrap().intern_code(v.row(), v.col())
    }

    pub fn row(&self, id: VertexId) -> usize {
        self.store.lock().unwrap().row(id)
    }

    /// The code of `id`, if it has at most `max_bits` bits.
    pub fn code(&self, id: VertexId, max_bits: u64) -> Option<VertexCode> {
        self.store.lock().unwrap().code(id, max_bits)
    }

    /// A structural hash, comparable across arenas.
    pub fn fingerprint(&self, id: VertexId) -> u64 {
        self.store.lock().unwrap().fingerprint(id)
    }

    /// Adjacency in `Δ_x`.
    pub fn adj(&self, x: &dyn GraphOracle, a: VertexId, b: VertexId) -> bool {
        let store = self.store.lock().unwrap();
        let (a, b) = if store.row(a) <= store.row(b) { (a, b) } else { (b, a) };
        match (store.node(a), store.node(b)) {
            (Node::Low { row: r, col: c }, Node::Low { row: s, col: d }) => {
                if r == s {
                    match (c.to_u64(), d.to_u64()) {
                        (Some(c), Some(d)) => c != d && x.adj(c, d),
                        _ => false,
                    }
                } else {
                    c == d
                }
            }
            (_, Node::High { row, rows }) => {
                let r = store.row(a);
                r < *row && store.subsets[rows[r] as usize].binary_search(&a).is_ok()
            }
            (Node::High { .. }, Node::Low { .. }) => unreachable!("rows are ordered"),
        }
    }

    /// The `delta_witness` rule on interned vertices: a vertex of row
    /// `i = max(2, 1 + max row of u ∪ v, max_r |u ∩ row r|)` seeing `u` plus,
    /// in each row, the smallest columns whose vertices are outside `u ∪ v`.
    pub fn witness(&self, u: &BTreeSet<VertexId>, v: &BTreeSet<VertexId>) -> Result<VertexId> {
        if u.intersection(v).next().is_some() {
            return Err(Error::OverlappingSets);
        }
        let mut store = self.store.lock().unwrap();
        let mut per_row: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for &w in u {
            per_row.entry(store.row(w)).or_default().push(w);
        }
        let top_row = u.iter().chain(v).map(|&w| store.row(w) + 1).max().unwrap_or(0);
        let widest = per_row.values().map(Vec::len).max().unwrap_or(0);
        let i = 2.max(top_row).max(widest);
        let mut rows = Vec::with_capacity(i);
        for r in 0..i {
            let mut members = per_row.remove(&r).unwrap_or_default();
            let mut c = 0u64;
            while members.len() < i {
                let w = store.intern_code(r, &BigUint::from(c));
                if !u.contains(&w) && !v.contains(&w) {
                    members.push(w);
                }
                c += 1;
            }
            rows.push(store.intern_subset(members));
        }
        Ok(store.intern_node(Node::High { row: i, rows }))
    }

    pub fn len(&self) -> usize {
        self.store.lock().unwrap().nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

type LowRows = Box<dyn Fn(usize, &BigUint) -> (usize, BigUint) + Send + Sync>;

#[derive(Default)]
struct TransportMemo {
    verts: HashMap<VertexId, VertexId>,
    subsets: HashMap<u32, u32>,
}

/// A permutation of `Δ`'s vertices given on rows 0 and 1 (sending whole rows
/// to whole rows) and extended upward by `(i, S) ↦ (i, image of S)`.
pub struct Transport {
    arena: Arc<VertexArena>,
    low: LowRows,
    memo: Mutex<TransportMemo>,
}

impl Transport {
    pub fn new(arena: Arc<VertexArena>, low: impl Fn(usize, &BigUint) -> (usize, BigUint) + Send + Sync + 'static) -> Self {
        Transport { arena, low: Box::new(low), memo: Mutex::default() }
    }

    pub fn arena(&self) -> &Arc<VertexArena> {
        &self.arena
    }

    pub fn apply_id(&self, id: VertexId) -> VertexId {
        let mut memo = self.memo.lock().unwrap();
        let mut store = self.arena.store.lock().unwrap();
        self.map(&mut memo, &mut store, id)
    }

    pub fn apply(&self, v: &VertexCode) -> VertexId {
        let id = self.arena.intern(v);
        self.apply_id(id)
    }

    fn map(&self, memo: &mut TransportMemo, store: &mut Store, id: VertexId) -> VertexId {
        if let Some(&w) = memo.verts.get(&id) {
            return w;
        }
        let img = match store.node(id).clone() {
            Node::Low { row, col } => {
                let (row, col) = (self.low)(row, &col);
                store.intern_code(row, &col)
            }
            Node::High { row, rows } => {
                let mut out = vec![0; row];
                for s in rows {
                    let t = self.map_subset(memo, store, s);
                    let target = store.row(store.subsets[t as usize][0]);
                    out[target] = t;
                }
                store.intern_node(Node::High { row, rows: out })
            }
        };
        memo.verts.insert(id, img);
        img
    }

    fn map_subset(&self, memo: &mut TransportMemo, store: &mut Store, s: u32) -> u32 {
        if let Some(&t) = memo.subsets.get(&s) {
            return t;
        }
        let members = store.subsets[s as usize].clone();
        let imgs = members.into_iter().map(|m| self.map(memo, store, m)).collect();
        let t = store.intern_subset(imgs);
        memo.subsets.insert(s, t);
        t
    }
}
