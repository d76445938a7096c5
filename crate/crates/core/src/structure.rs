//! Countable graphs and linear orders on ℕ, and their line-oriented text forms.
//!
//! ```text
//! graph <n|omega>        order finite <n>        order catalog <N|Z|Q>
//! e <i> <j>              rank <i> <r>            map <a> <b>
//! ```

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::staged::PartialMap;

/// Declared size of a graph's vertex set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphSize {
    Finite(u64),
    Omega,
}

/// A countable graph on ℕ given by a decidable adjacency predicate.
///
/// Implementations must be symmetric and irreflexive. A graph of known size
/// `n` has no edges at vertices `≥ n`; those are isolated padding.
pub trait GraphOracle: Send + Sync {
    fn adj(&self, i: u64, j: u64) -> bool;
    fn known_size(&self) -> GraphSize;
}

/// A graph with a finite edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListedGraph {
    size: GraphSize,
    edges: BTreeSet<(u64, u64)>,
}

impl ListedGraph {
    /// Edges are unordered; loops and out-of-range endpoints are rejected.
    pub fn new<I: IntoIterator<Item = (u64, u64)>>(size: GraphSize, edges: I) -> Result<Self> {
        let mut g = ListedGraph { size, edges: BTreeSet::new() };
        for (n, (i, j)) in edges.into_iter().enumerate() {
            g.add_edge(i, j, n + 1)?;
        }
        Ok(g)
    }

    /// Finite graph on `n` vertices. Panics on invalid edges; meant for literals.
    pub fn finite(n: u64, edges: &[(u64, u64)]) -> Self {
        Self::new(GraphSize::Finite(n), edges.iter().copied()).expect("valid edge list")
    }

    fn add_edge(&mut self, i: u64, j: u64, line: usize) -> Result<()> {
        if i == j {
            return Err(Error::MalformedLine { line, detail: format!("loop at {i}") });
        }
        if let GraphSize::Finite(n) = self.size {
            if i >= n || j >= n {
                return Err(Error::MalformedLine { line, detail: format!("edge {i} {j} outside 0..{n}") });
            }
        }
        if !self.edges.insert((i.min(j), i.max(j))) {
            return Err(Error::DuplicateEdge { line, i, j });
        }
        Ok(())
    }

    pub fn edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.edges.iter().copied()
    }

    /// Number of vertices carrying the graph: the declared size, or one past
    /// the largest endpoint for `omega`.
    pub fn core_size(&self) -> u64 {
        match self.size {
            GraphSize::Finite(n) => n,
            GraphSize::Omega => self.edges.iter().map(|&(_, j)| j + 1).max().unwrap_or(0),
        }
    }

    pub fn degree(&self, v: u64) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// The image of this graph under a vertex relabelling `perm` of `0..n`.
    pub fn relabel(&self, perm: &[u64]) -> Self {
        Self::new(self.size, self.edges.iter().map(|&(i, j)| (perm[i as usize], perm[j as usize])))
            .expect("relabelling by a permutation")
    }
}

impl GraphOracle for ListedGraph {
    fn adj(&self, i: u64, j: u64) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    fn known_size(&self) -> GraphSize {
        self.size
    }
}

/// Order types available without a rank listing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Catalog {
    /// ℕ with its usual order.
    N,
    /// ℤ, with ℕ enumerating it as `0, 1, -1, 2, -2, ...`.
    Z,
    /// ℚ, with ℕ enumerating it through the fixed enumeration of the rationals.
    Q,
}

/// An order known only through its comparison predicate.
#[derive(Clone)]
pub struct StreamedOrder(pub std::sync::Arc<dyn Fn(u64, u64) -> bool + Send + Sync>);

impl std::fmt::Debug for StreamedOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("StreamedOrder(..)")
    }
}

impl PartialEq for StreamedOrder {
    fn eq(&self, other: &Self) -> bool {
        std::sync::Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for StreamedOrder {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderKind {
    /// `ranks[i]` is the position of element `i`.
    Finite { ranks: Vec<u64> },
    Catalog(Catalog),
    Streamed(StreamedOrder),
}

/// A countable linear order on ℕ (or on `0..n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderOracle {
    kind: OrderKind,
}

impl OrderOracle {
    pub fn finite(ranks: Vec<u64>) -> Result<Self> {
        let n = ranks.len() as u64;
        let distinct: BTreeSet<u64> = ranks.iter().copied().collect();
        if distinct.len() as u64 != n || ranks.iter().any(|&r| r >= n) {
            return Err(Error::RankNotPermutation { line: 0, n });
        }
        Ok(OrderOracle { kind: OrderKind::Finite { ranks } })
    }

    pub fn catalog(c: Catalog) -> Self {
        OrderOracle { kind: OrderKind::Catalog(c) }
    }

    /// An infinite order given only by `lt`; the caller vouches for it being
    /// a strict total order.
    pub fn streamed(lt: impl Fn(u64, u64) -> bool + Send + Sync + 'static) -> Self {
        OrderOracle { kind: OrderKind::Streamed(StreamedOrder(std::sync::Arc::new(lt))) }
    }

    pub fn kind(&self) -> &OrderKind {
        &self.kind
    }

    /// Number of elements, `None` for infinite orders.
    pub fn len(&self) -> Option<u64> {
        match &self.kind {
            OrderKind::Finite { ranks } => Some(ranks.len() as u64),
            OrderKind::Catalog(_) | OrderKind::Streamed(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn lt(&self, i: u64, j: u64) -> bool {
        match &self.kind {
            OrderKind::Finite { ranks } => ranks[i as usize] < ranks[j as usize],
            OrderKind::Catalog(Catalog::N) => i < j,
            OrderKind::Catalog(Catalog::Z) => zigzag(i) < zigzag(j),
            OrderKind::Catalog(Catalog::Q) => {
                crate::dlo::rational::cw_rational_u64(i) < crate::dlo::rational::cw_rational_u64(j)
            }
            OrderKind::Streamed(s) => (s.0)(i, j),
        }
    }
}

/// `0, 1, -1, 2, -2, ...`
pub fn zigzag(k: u64) -> i64 {
    if k % 2 == 1 {
        k.div_ceil(2) as i64
    } else {
        -((k / 2) as i64)
    }
}

/// A parsed structure file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Graph(ListedGraph),
    Order(OrderOracle),
}

fn malformed(line: usize, detail: impl Into<String>) -> Error {
    Error::MalformedLine { line, detail: detail.into() }
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.split('\n')
        .enumerate()
        .map(|(n, l)| (n + 1, l.split(' ').filter(|f| !f.is_empty()).collect::<Vec<_>>()))
        .filter(|(_, f)| !f.is_empty())
}

fn number(line: usize, field: &str) -> Result<u64> {
    field.parse().map_err(|_| malformed(line, format!("expected a natural, found `{field}`")))
}

/// `parse_structure`: reads a graph file or an order file.
pub fn parse_structure(text: &str) -> Result<Structure> {
    let mut lines = numbered_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| malformed(1, "empty input"))?;
    match header.as_slice() {
        ["graph", size] => {
            let size = match *size {
                "omega" => GraphSize::Omega,
                n => GraphSize::Finite(number(hl, n)?),
            };
            let mut g = ListedGraph { size, edges: BTreeSet::new() };
            for (ln, fields) in lines {
                match fields.as_slice() {
                    ["e", i, j] => g.add_edge(number(ln, i)?, number(ln, j)?, ln)?,
                    _ => return Err(malformed(ln, "expected `e <i> <j>`")),
                }
            }
            Ok(Structure::Graph(g))
        }
        ["order", "finite", n] => {
            let n = number(hl, n)?;
            let mut ranks: Vec<Option<u64>> = vec![None; n as usize];
            let mut used = vec![false; n as usize];
            let mut last = hl;
            for (ln, fields) in lines {
                last = ln;
                let ["rank", i, r] = fields.as_slice() else {
                    return Err(malformed(ln, "expected `rank <i> <r>`"));
                };
                let (i, r) = (number(ln, i)?, number(ln, r)?);
                if i >= n {
                    return Err(malformed(ln, format!("element {i} outside 0..{n}")));
                }
                if ranks[i as usize].is_some() {
                    return Err(malformed(ln, format!("element {i} ranked twice")));
                }
                if r >= n || used[r as usize] {
                    return Err(Error::RankNotPermutation { line: ln, n });
                }
                used[r as usize] = true;
                ranks[i as usize] = Some(r);
            }
            let ranks: Option<Vec<u64>> = ranks.into_iter().collect();
            let ranks = ranks.ok_or(Error::RankNotPermutation { line: last, n })?;
            Ok(Structure::Order(OrderOracle { kind: OrderKind::Finite { ranks } }))
        }
        ["order", "catalog", name] => {
            let c = match *name {
                "N" => Catalog::N,
                "Z" => Catalog::Z,
                "Q" => Catalog::Q,
                other => return Err(Error::UnknownCatalog { line: hl, name: other.to_string() }),
            };
            if let Some((ln, _)) = lines.next() {
                return Err(malformed(ln, "catalog orders take no further lines"));
            }
            Ok(Structure::Order(OrderOracle::catalog(c)))
        }
        _ => Err(malformed(hl, "expected `graph <n|omega>` or `order finite|catalog ...`")),
    }
}

/// Reads `map <a> <b>` lines into a partial injection.
pub fn parse_map(text: &str) -> Result<PartialMap<Nat, Nat>> {
    let mut m = PartialMap::new();
    for (ln, fields) in numbered_lines(text) {
        let ["map", a, b] = fields.as_slice() else {
            return Err(malformed(ln, "expected `map <a> <b>`"));
        };
        let a: Nat = a.parse().map_err(|_| malformed(ln, format!("bad natural `{a}`")))?;
        let b: Nat = b.parse().map_err(|_| malformed(ln, format!("bad natural `{b}`")))?;
        m.insert(a, b).map_err(|_| malformed(ln, "map is not a partial injection"))?;
    }
    Ok(m)
}

/// Renders a map in the `map <a> <b>` format, ascending in the domain.
pub fn format_map(m: &PartialMap<Nat, Nat>) -> String {
    m.iter().map(|(a, b)| format!("map {a} {b}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_file() {
        let Structure::Graph(g) = parse_structure("graph 3\ne 0 1\n").unwrap() else { panic!() };
        assert!(g.adj(0, 1) && g.adj(1, 0));
        assert!(!g.adj(1, 2));
        assert!(!g.adj(0, 0));
        assert_eq!(g.known_size(), GraphSize::Finite(3));
    }

    #[test]
    fn order_file() {
        let Structure::Order(o) = parse_structure("order finite 2\nrank 0 1\nrank 1 0").unwrap() else {
            panic!()
        };
        assert!(o.lt(1, 0));
        assert!(!o.lt(0, 1));
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert_eq!(
            parse_structure("order finite 2\nrank 0 0\nrank 1 0"),
            Err(Error::RankNotPermutation { line: 3, n: 2 })
        );
        assert_eq!(
            parse_structure("graph 3\ne 0 1\ne 1 0"),
            Err(Error::DuplicateEdge { line: 3, i: 1, j: 0 })
        );
        assert!(matches!(parse_structure("order catalog R"), Err(Error::UnknownCatalog { line: 1, .. })));
        assert!(matches!(parse_structure("graph 3\nx 0 1"), Err(Error::MalformedLine { line: 2, .. })));
        assert!(matches!(parse_structure("graph 3\ne 1 1"), Err(Error::MalformedLine { line: 2, .. })));
        assert!(matches!(
            parse_structure("order finite 3\nrank 0 0\nrank 1 1"),
            Err(Error::RankNotPermutation { line: 3, .. })
        ));
    }

    #[test]
    fn catalog_orders() {
        let z = OrderOracle::catalog(Catalog::Z);
        assert!(z.lt(2, 0) && z.lt(0, 1) && z.lt(4, 2));
        let q = OrderOracle::catalog(Catalog::Q);
        assert!(q.lt(2, 0) && q.lt(0, 1));
    }

    #[test]
    fn map_file() {
        let m = parse_map("map 0 1\nmap 1 0\n").unwrap();
        assert_eq!(m.get(&Nat::small(0)), Some(&Nat::small(1)));
        assert_eq!(format_map(&m), "map 0 1\nmap 1 0\n");
        assert!(parse_map("map 0 1\nmap 2 1\n").is_err());
    }
}
