//! Closed order-preserving embeddings of linear orders into ℚ.

use std::collections::BTreeMap;

use num_traits::Signed;

use super::rational::{cw_rational_u64, int, simplest_between, Rational};
use crate::error::{Error, Result};
use crate::structure::{zigzag, Catalog, OrderKind, OrderOracle};

/// Where a rational sits relative to a closed image: on it, or inside one
/// maximal complementary open interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Fixed,
    Gap { lo: Option<Rational>, hi: Option<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Image {
    /// Ascending image points.
    Finite(Vec<Rational>),
    Catalog(Catalog),
}

/// A closed order-preserving map `α` from a linear order into ℚ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedEmbedding {
    source: OrderOracle,
    alpha: Vec<Rational>,
    image: Image,
}

/// `closed_embed`.
///
/// Finite orders are placed element by element at the least-index rational
/// compatible with the elements already placed, so the image is finite and
/// therefore closed. `N` goes to `0, 1, 2, ...`, `Z` to the integers and `Q`
/// onto ℚ itself through the fixed enumeration.
pub fn closed_embed(x: &OrderOracle) -> Result<ClosedEmbedding> {
    match x.kind() {
        OrderKind::Finite { ranks } => {
            let mut placed: BTreeMap<u64, Rational> = BTreeMap::new();
            let mut alpha = Vec::with_capacity(ranks.len());
            for &r in ranks {
                let lo = placed.range(..r).next_back().map(|(_, q)| q);
                let hi = placed.range(r..).next().map(|(_, q)| q);
                let q = simplest_between(lo, hi);
                placed.insert(r, q.clone());
                alpha.push(q);
            }
            let image = Image::Finite(placed.into_values().collect());
            Ok(ClosedEmbedding { source: x.clone(), alpha, image })
        }
        OrderKind::Catalog(c) => Ok(ClosedEmbedding { source: x.clone(), alpha: Vec::new(), image: Image::Catalog(*c) }),
        OrderKind::Streamed(_) => Err(Error::UnsupportedOrder(
            "only finite and catalog orders have a computable closed embedding".into(),
        )),
    }
}

impl ClosedEmbedding {
    pub fn source(&self) -> &OrderOracle {
        &self.source
    }

    /// `α(k)`.
    pub fn alpha(&self, k: u64) -> Rational {
        match &self.image {
            Image::Finite(_) => self.alpha[k as usize].clone(),
            Image::Catalog(Catalog::N) => int(k as i64),
            Image::Catalog(Catalog::Z) => int(zigzag(k)),
            Image::Catalog(Catalog::Q) => cw_rational_u64(k),
        }
    }

    /// The image points in ascending order, when finite.
    pub fn finite_image(&self) -> Option<&[Rational]> {
        match &self.image {
            Image::Finite(v) => Some(v),
            Image::Catalog(_) => None,
        }
    }

    pub fn locate(&self, q: &Rational) -> Location {
        match &self.image {
            Image::Finite(pts) => match pts.binary_search(q) {
                Ok(_) => Location::Fixed,
                Err(i) => Location::Gap {
                    lo: i.checked_sub(1).map(|j| pts[j].clone()),
                    hi: pts.get(i).cloned(),
                },
            },
            Image::Catalog(Catalog::Q) => Location::Fixed,
            Image::Catalog(c) => {
                if q.is_integer() && (*c == Catalog::Z || !q.is_negative()) {
                    Location::Fixed
                } else if *c == Catalog::N && q.is_negative() {
                    Location::Gap { lo: None, hi: Some(int(0)) }
                } else {
                    let f = q.floor();
                    Location::Gap { hi: Some(&f + int(1)), lo: Some(f) }
                }
            }
        }
    }

    pub fn in_image(&self, q: &Rational) -> bool {
        self.locate(q) == Location::Fixed
    }
}

/// Whether the element of `x` with label `k` maps into the image in order,
/// checked on labels `0..n`.
pub fn is_order_preserving(e: &ClosedEmbedding, n: u64) -> bool {
    (0..n).all(|i| (0..n).all(|j| e.source.lt(i, j) == (e.alpha(i) < e.alpha(j))))
}
