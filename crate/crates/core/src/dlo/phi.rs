//! Automorphisms of ℚ with a prescribed fixed-point set, and their orbitals.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use super::embed::{closed_embed, ClosedEmbedding, Location};
use super::rational::{cw_rational, cw_rational_u64, rational_index, simplest_between, Rational, RationalInterval};
use crate::backforth::BackAndForth;
use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::staged::{PartialMap, StagedMap};
use crate::structure::OrderOracle;

/// How many enumerated rationals are scanned for separating fixed points.
pub const FIXED_POINT_SCAN: u64 = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Fixed,
    Up,
    Down,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Fixed => "fixed",
            Parity::Up => "up",
            Parity::Down => "down",
        }
    }
}

/// An orbital, described by a representative and its parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbital {
    pub rep: Rational,
    pub parity: Parity,
}

/// The convex set an orbital occupies.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OrbitalSpan {
    Point(Rational),
    /// An open interval, `None` ends unbounded; parity is `Up` or `Down`.
    Bump { lo: Option<Rational>, hi: Option<Rational>, parity: Parity },
}

impl OrbitalSpan {
    pub fn parity(&self) -> Parity {
        match self {
            OrbitalSpan::Point(_) => Parity::Fixed,
            OrbitalSpan::Bump { parity, .. } => *parity,
        }
    }

    /// The least-index rational of the span.
    pub fn rep(&self) -> Rational {
        match self {
            OrbitalSpan::Point(q) => q.clone(),
            OrbitalSpan::Bump { lo, hi, .. } => simplest_between(lo.as_ref(), hi.as_ref()),
        }
    }

    pub fn orbital(&self) -> Orbital {
        Orbital { rep: self.rep(), parity: self.parity() }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        match self {
            OrbitalSpan::Point(p) => p == q,
            OrbitalSpan::Bump { lo, hi, .. } => RationalInterval { lo: lo.clone(), hi: hi.clone() }.contains(q),
        }
    }

    /// Whether every point of `self` lies below every point of `other`.
    pub fn below(&self, other: &OrbitalSpan) -> bool {
        let top = match self {
            OrbitalSpan::Point(p) => Some(p),
            OrbitalSpan::Bump { hi, .. } => hi.as_ref(),
        };
        let bottom = match other {
            OrbitalSpan::Point(p) => Some(p),
            OrbitalSpan::Bump { lo, .. } => lo.as_ref(),
        };
        match (top, bottom) {
            (Some(t), Some(b)) => match (self, other) {
                (OrbitalSpan::Point(_), OrbitalSpan::Point(_)) => t < b,
                _ => t <= b,
            },
            _ => false,
        }
    }
}

/// A map ℚ → ℚ evaluated pointwise.
pub trait RationalMap: Send + Sync {
    fn apply(&self, q: &Rational) -> Result<Rational>;
}

/// An order-automorphism of ℚ with its orbital structure.
pub trait OrderAutomorphism: RationalMap {
    fn apply_inverse(&self, q: &Rational) -> Result<Rational>;

    /// The orbital containing `q`.
    fn span_of(&self, q: &Rational) -> Result<OrbitalSpan>;

    /// All orbitals in ascending order, when there are finitely many.
    fn orbitals(&self) -> Option<Vec<OrbitalSpan>> {
        None
    }
}

impl<T: RationalMap + ?Sized> RationalMap for &T {
    fn apply(&self, q: &Rational) -> Result<Rational> {
        (**self).apply(q)
    }
}

impl<T: RationalMap + ?Sized> RationalMap for Arc<T> {
    fn apply(&self, q: &Rational) -> Result<Rational> {
        (**self).apply(q)
    }
}

impl<T: OrderAutomorphism + ?Sized> OrderAutomorphism for &T {
    fn apply_inverse(&self, q: &Rational) -> Result<Rational> {
        (**self).apply_inverse(q)
    }
    fn span_of(&self, q: &Rational) -> Result<OrbitalSpan> {
        (**self).span_of(q)
    }
    fn orbitals(&self) -> Option<Vec<OrbitalSpan>> {
        (**self).orbitals()
    }
}

impl<T: OrderAutomorphism + ?Sized> OrderAutomorphism for Arc<T> {
    fn apply_inverse(&self, q: &Rational) -> Result<Rational> {
        (**self).apply_inverse(q)
    }
    fn span_of(&self, q: &Rational) -> Result<OrbitalSpan> {
        (**self).span_of(q)
    }
    fn orbitals(&self) -> Option<Vec<OrbitalSpan>> {
        (**self).orbitals()
    }
}

/// `t ↦ t + c`. With `c = 0` this is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation(pub Rational);

impl Translation {
    pub fn identity() -> Self {
        Translation(Rational::zero())
    }

    pub fn by(n: i64) -> Self {
        Translation(super::rational::int(n))
    }
}

impl RationalMap for Translation {
    fn apply(&self, q: &Rational) -> Result<Rational> {
        Ok(q + &self.0)
    }
}

impl OrderAutomorphism for Translation {
    fn apply_inverse(&self, q: &Rational) -> Result<Rational> {
        Ok(q - &self.0)
    }

    fn span_of(&self, q: &Rational) -> Result<OrbitalSpan> {
        Ok(self.whole_span().unwrap_or_else(|| OrbitalSpan::Point(q.clone())))
    }

    fn orbitals(&self) -> Option<Vec<OrbitalSpan>> {
        self.whole_span().map(|s| vec![s])
    }
}

impl Translation {
    fn whole_span(&self) -> Option<OrbitalSpan> {
        let parity = if self.0.is_positive() {
            Parity::Up
        } else if self.0.is_negative() {
            Parity::Down
        } else {
            return None;
        };
        Some(OrbitalSpan::Bump { lo: None, hi: None, parity })
    }
}

type IntervalIso = BackAndForth<RationalInterval, RationalInterval>;

/// `φ_x`: fixes `im(α)` pointwise and acts on each complementary interval `I`
/// as `ψ_I⁻¹ ∘ (t + 1) ∘ ψ_I`, `ψ_I` the canonical back-and-forth from `I` onto ℚ.
pub struct PhiDlo {
    emb: ClosedEmbedding,
    isos: Mutex<BTreeMap<RationalInterval, Arc<IntervalIso>>>,
}

impl std::fmt::Debug for PhiDlo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhiDlo").field("emb", &self.emb).finish_non_exhaustive()
    }
}

/// `build_phi_dlo`.
pub fn build_phi_dlo(emb: ClosedEmbedding) -> PhiDlo {
    PhiDlo { emb, isos: Mutex::new(BTreeMap::new()) }
}

impl PhiDlo {
    pub fn embedding(&self) -> &ClosedEmbedding {
        &self.emb
    }

    fn iso(&self, lo: Option<Rational>, hi: Option<Rational>) -> Arc<IntervalIso> {
        let key = RationalInterval::new(lo, hi);
        let mut isos = self.isos.lock().unwrap();
        isos.entry(key.clone())
            .or_insert_with(|| Arc::new(BackAndForth::new(key, RationalInterval::whole(), usize::MAX)))
            .clone()
    }

    fn shift(&self, q: &Rational, by: Rational) -> Result<Rational> {
        match self.emb.locate(q) {
            Location::Fixed => Ok(q.clone()),
            Location::Gap { lo, hi } => {
                let psi = self.iso(lo, hi);
                let t = psi
                    .resolve_forward(q)
                    .ok_or_else(|| Error::Unresolved(format!("ψ_I at {q}")))?;
                psi.resolve_backward(&(t + by)).ok_or_else(|| Error::Unresolved(format!("ψ_I⁻¹ near {q}")))
            }
        }
    }
}

impl RationalMap for PhiDlo {
    fn apply(&self, q: &Rational) -> Result<Rational> {
        self.shift(q, Rational::one())
    }
}

impl OrderAutomorphism for PhiDlo {
    fn apply_inverse(&self, q: &Rational) -> Result<Rational> {
        self.shift(q, -Rational::one())
    }

    fn span_of(&self, q: &Rational) -> Result<OrbitalSpan> {
        Ok(match self.emb.locate(q) {
            Location::Fixed => OrbitalSpan::Point(q.clone()),
            Location::Gap { lo, hi } => OrbitalSpan::Bump { lo, hi, parity: Parity::Up },
        })
    }

    fn orbitals(&self) -> Option<Vec<OrbitalSpan>> {
        let pts = self.emb.finite_image()?;
        let mut out = Vec::with_capacity(2 * pts.len() + 1);
        let mut lo: Option<Rational> = None;
        for p in pts {
            out.push(OrbitalSpan::Bump { lo: lo.take(), hi: Some(p.clone()), parity: Parity::Up });
            out.push(OrbitalSpan::Point(p.clone()));
            lo = Some(p.clone());
        }
        out.push(OrbitalSpan::Bump { lo, hi: None, parity: Parity::Up });
        Some(out)
    }
}

/// A map of ℚ read on indices of the fixed enumeration. Stage `s`
/// is the map on indices `0..s`.
pub struct IndexMap<F> {
    f: F,
    /// Indices above this many bits are not looked up.
    max_bits: u64,
}

impl<F: RationalMap> IndexMap<F> {
    pub fn new(f: F) -> Self {
        IndexMap { f, max_bits: 1 << 16 }
    }

    pub fn inner(&self) -> &F {
        &self.f
    }

    fn at(&self, k: &Nat) -> Option<Nat> {
        let q = cw_rational(&k.to_biguint(self.max_bits)?);
        let img = self.f.apply(&q).ok()?;
        Some(Nat::from_biguint(&rational_index(&img)))
    }
}

impl<F: RationalMap> StagedMap<Nat, Nat> for IndexMap<F> {
    fn stage(&self, s: usize) -> PartialMap<Nat, Nat> {
        let mut out = PartialMap::new();
        for k in 0..s as u64 {
            let k = Nat::small(k);
            if let Some(v) = self.at(&k) {
                let _ = out.insert(k, v);
            }
        }
        out
    }

    fn lookup(&self, k: &Nat, s: usize) -> Option<Nat> {
        match k.as_u64() {
            Some(v) if v < s as u64 => self.at(k),
            _ => None,
        }
    }
}

/// `dlo_reduce`: `φ_x` for the closed embedding of `x`, on indices.
pub fn dlo_reduce(x: &OrderOracle) -> Result<IndexMap<PhiDlo>> {
    Ok(IndexMap::new(build_phi_dlo(closed_embed(x)?)))
}

/// `orbital_classify`: the parity of the orbital through `q`.
pub fn orbital_classify<F: RationalMap + ?Sized>(phi: &F, q: &Rational) -> Result<Parity> {
    let img = phi.apply(q)?;
    Ok(match img.cmp(q) {
        std::cmp::Ordering::Equal => Parity::Fixed,
        std::cmp::Ordering::Greater => Parity::Up,
        std::cmp::Ordering::Less => Parity::Down,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orbitality {
    Same,
    Different,
    Unknown,
}

/// `same_orbital`: whether `q` and `r` share an orbital, judged from the
/// first `depth` powers of `φ` and the fixed points among the first
/// [`FIXED_POINT_SCAN`] enumerated rationals.
pub fn same_orbital<F: OrderAutomorphism + ?Sized>(phi: &F, q: &Rational, r: &Rational, depth: u64) -> Result<Orbitality> {
    if q == r {
        return Ok(Orbitality::Same);
    }
    let (pq, pr) = (orbital_classify(phi, q)?, orbital_classify(phi, r)?);
    if pq != pr || pq == Parity::Fixed {
        return Ok(Orbitality::Different);
    }
    let (mut fwd, mut back) = (q.clone(), q.clone());
    for _ in 0..depth {
        fwd = phi.apply(&fwd)?;
        back = phi.apply_inverse(&back)?;
        let (lo, hi) = if fwd < back { (&fwd, &back) } else { (&back, &fwd) };
        if lo <= r && r <= hi {
            return Ok(Orbitality::Same);
        }
    }
    let (lo, hi) = if q < r { (q, r) } else { (r, q) };
    for k in 0..FIXED_POINT_SCAN {
        let p = cw_rational_u64(k);
        if lo < &p && &p < hi && phi.apply(&p)? == p {
            return Ok(Orbitality::Different);
        }
    }
    Ok(Orbitality::Unknown)
}

/// Indices `0..n` with the parity of the orbital through each.
pub fn classify_prefix<F: RationalMap + ?Sized>(phi: &F, n: u64) -> Result<Vec<(BigUint, Parity)>> {
    (0..n)
        .map(|k| Ok((BigUint::from(k), orbital_classify(phi, &cw_rational_u64(k))?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlo::rational::{int, rat};
    use crate::structure::Catalog;

    fn phi_of(ranks: Vec<u64>) -> PhiDlo {
        build_phi_dlo(closed_embed(&OrderOracle::finite(ranks).unwrap()).unwrap())
    }

    #[test]
    fn empty_order_gives_one_up_bump() {
        let phi = phi_of(vec![]);
        for k in 0..200 {
            let q = cw_rational_u64(k);
            assert!(phi.apply(&q).unwrap() > q);
        }
        assert_eq!(phi.orbitals().unwrap().len(), 1);
    }

    #[test]
    fn empty_order_is_translation() {
        // Identical enumerations on both sides make ψ the identity.
        let phi = phi_of(vec![]);
        for k in 0..200 {
            let q = cw_rational_u64(k);
            assert_eq!(phi.apply(&q).unwrap(), &q + int(1));
        }
    }

    #[test]
    fn one_point_is_the_only_fixed_point() {
        let phi = phi_of(vec![0]);
        assert_eq!(phi.apply(&int(0)).unwrap(), int(0));
        for k in 1..200 {
            let q = cw_rational_u64(k);
            assert!(phi.apply(&q).unwrap() > q, "{q}");
        }
    }

    #[test]
    fn inverse_undoes_apply() {
        let phi = phi_of(vec![1, 0, 2]);
        for k in 0..150 {
            let q = cw_rational_u64(k);
            assert_eq!(phi.apply_inverse(&phi.apply(&q).unwrap()).unwrap(), q);
            assert_eq!(phi.apply(&phi.apply_inverse(&q).unwrap()).unwrap(), q);
        }
    }

    #[test]
    fn catalog_q_is_identity() {
        let phi = dlo_reduce(&OrderOracle::catalog(Catalog::Q)).unwrap();
        for k in 0..200u64 {
            assert_eq!(phi.lookup(&Nat::small(k), 200), Some(Nat::small(k)));
        }
    }

    #[test]
    fn two_point_order_has_two_fixed_points() {
        let phi = dlo_reduce(&OrderOracle::finite(vec![1, 0]).unwrap()).unwrap();
        let stage = phi.stage(200);
        let fixed: Vec<&Nat> = stage.iter().filter(|(a, b)| a == b).map(|(a, _)| a).collect();
        assert_eq!(fixed.len(), 2);
        let img = phi.inner().embedding().finite_image().unwrap().to_vec();
        for k in fixed {
            assert!(img.contains(&cw_rational_u64(k.as_u64().unwrap())));
        }
    }

    #[test]
    fn classify_translations() {
        assert_eq!(orbital_classify(&Translation::identity(), &rat(3, 7)).unwrap(), Parity::Fixed);
        assert_eq!(orbital_classify(&Translation::by(1), &int(0)).unwrap(), Parity::Up);
        assert_eq!(orbital_classify(&Translation::by(-1), &int(0)).unwrap(), Parity::Down);
    }

    #[test]
    fn same_orbital_examples() {
        assert_eq!(same_orbital(&Translation::by(1), &int(0), &rat(5, 2), 3).unwrap(), Orbitality::Same);
        assert_eq!(same_orbital(&phi_of(vec![0]), &int(-1), &int(1), 10).unwrap(), Orbitality::Different);
        assert_eq!(same_orbital(&phi_of(vec![0]), &rat(1, 3), &rat(1, 3), 0).unwrap(), Orbitality::Same);
    }

    #[test]
    fn spans_partition_and_match_parity() {
        let phi = phi_of(vec![2, 0, 1]);
        let spans = phi.orbitals().unwrap();
        for w in spans.windows(2) {
            assert!(w[0].below(&w[1]));
        }
        for k in 0..300 {
            let q = cw_rational_u64(k);
            let owners: Vec<&OrbitalSpan> = spans.iter().filter(|s| s.contains(&q)).collect();
            assert_eq!(owners.len(), 1);
            assert_eq!(owners[0].parity(), orbital_classify(&phi, &q).unwrap());
            assert_eq!(&phi.span_of(&q).unwrap(), owners[0]);
        }
    }

    #[test]
    fn index_map_is_coherent() {
        let phi = dlo_reduce(&OrderOracle::catalog(Catalog::Z)).unwrap();
        crate::staged::audit_coherence(&phi, 60).unwrap();
    }
}
