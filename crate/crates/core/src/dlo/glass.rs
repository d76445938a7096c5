//! Conjugating automorphisms of ℚ with matching orbital structure.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::phi::{OrbitalSpan, OrderAutomorphism, Parity, RationalMap};
use super::rational::{cw_rational_u64, Rational, RationalInterval};
use crate::backforth::BackAndForth;
use crate::error::{Error, Result};
use crate::staged::PartialMap;

/// Iterations allowed when locating a point's fundamental domain.
pub const ORBIT_WALK_LIMIT: u64 = 10_000;

/// Which orbital of `ψ` each orbital of `φ` goes to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitalMatching {
    /// Every orbital of `φ` to the orbital of `ψ` occupying the same set.
    Identity,
    /// Explicit pairs, ascending in both coordinates.
    Pairs(Vec<(OrbitalSpan, OrbitalSpan)>),
}

/// The order-preserving matching of two finite orbital structures, position
/// by position.
pub fn canonical_matching<F, G>(phi: &F, psi: &G) -> Result<OrbitalMatching>
where
    F: OrderAutomorphism + ?Sized,
    G: OrderAutomorphism + ?Sized,
{
    let (Some(a), Some(b)) = (phi.orbitals(), psi.orbitals()) else {
        return Err(Error::Unresolved("orbital structure is not finite".into()));
    };
    if a.len() != b.len() {
        return Err(Error::OrderMismatch(format!("{} orbitals against {}", a.len(), b.len())));
    }
    let pairs: Vec<_> = a.into_iter().zip(b).collect();
    check_pairs(&pairs)?;
    Ok(OrbitalMatching::Pairs(pairs))
}

fn check_pairs(pairs: &[(OrbitalSpan, OrbitalSpan)]) -> Result<()> {
    for (s, t) in pairs {
        if s.parity() != t.parity() {
            return Err(Error::ParityMismatch(format!(
                "{} orbital at {} matched to {} orbital at {}",
                s.parity().as_str(),
                s.rep(),
                t.parity().as_str(),
                t.rep()
            )));
        }
    }
    for w in pairs.windows(2) {
        if !w[0].0.below(&w[1].0) || !w[0].1.below(&w[1].1) {
            return Err(Error::OrderMismatch(format!("matching is not ascending at {}", w[1].0.rep())));
        }
    }
    Ok(())
}

type DomainIso = BackAndForth<RationalInterval, RationalInterval>;

/// `β` with `β ∘ φ = ψ ∘ β`.
///
/// Fixed points go to their matched fixed points. On a matched pair of bumps
/// with representatives `q ↦ q'`, `β(φⁿ(y)) = ψⁿ(β(y))` for `y` in the
/// fundamental domain `[q, φ(q))`, where `β` is the canonical back-and-forth
/// from `(q, φ(q))` onto `(q', ψ(q'))`. Down-bumps are handled through `φ⁻¹`
/// and `ψ⁻¹`.
pub struct GlassConjugator<F, G> {
    phi: F,
    psi: G,
    matching: OrbitalMatching,
    pairs: BTreeMap<OrbitalSpan, OrbitalSpan>,
    isos: Mutex<BTreeMap<(OrbitalSpan, OrbitalSpan), Arc<DomainIso>>>,
}

/// `glass_conjugator`.
pub fn glass_conjugator<F, G>(phi: F, psi: G, matching: OrbitalMatching) -> Result<GlassConjugator<F, G>>
where
    F: OrderAutomorphism,
    G: OrderAutomorphism,
{
    let pairs = match &matching {
        OrbitalMatching::Pairs(p) => {
            check_pairs(p)?;
            for (side, listed) in [(0, phi.orbitals()), (1, psi.orbitals())] {
                if let Some(listed) = listed {
                    let used: Vec<&OrbitalSpan> = p.iter().map(|(s, t)| if side == 0 { s } else { t }).collect();
                    if used.len() != listed.len() || used.iter().zip(&listed).any(|(u, l)| *u != l) {
                        return Err(Error::OrderMismatch("matching does not cover every orbital".into()));
                    }
                }
            }
            p.iter().cloned().collect()
        }
        OrbitalMatching::Identity => {
            if let (Some(a), Some(b)) = (phi.orbitals(), psi.orbitals()) {
                if a.len() != b.len() {
                    return Err(Error::OrderMismatch(format!("{} orbitals against {}", a.len(), b.len())));
                }
                let pairs: Vec<_> = a.into_iter().zip(b).collect();
                check_pairs(&pairs)?;
                if pairs.iter().any(|(s, t)| s != t) {
                    return Err(Error::OrderMismatch("identity matching between different orbitals".into()));
                }
            }
            BTreeMap::new()
        }
    };
    Ok(GlassConjugator { phi, psi, matching, pairs, isos: Mutex::new(BTreeMap::new()) })
}

impl<F: OrderAutomorphism, G: OrderAutomorphism> GlassConjugator<F, G> {
    pub fn matching(&self) -> &OrbitalMatching {
        &self.matching
    }

    fn target(&self, s: &OrbitalSpan) -> Result<OrbitalSpan> {
        match &self.matching {
            OrbitalMatching::Pairs(_) => self
                .pairs
                .get(s)
                .cloned()
                .ok_or_else(|| Error::OrderMismatch(format!("orbital at {} is not matched", s.rep()))),
            OrbitalMatching::Identity => {
                let t = self.psi.span_of(&s.rep())?;
                if &t != s {
                    return Err(Error::OrderMismatch(format!("ψ has a different orbital at {}", s.rep())));
                }
                Ok(t)
            }
        }
    }

    fn up_phi(&self, parity: Parity, q: &Rational, n: i64) -> Result<Rational> {
        step(&self.phi, parity, q, n)
    }

    fn up_psi(&self, parity: Parity, q: &Rational, n: i64) -> Result<Rational> {
        step(&self.psi, parity, q, n)
    }

    fn domain_iso(&self, s: &OrbitalSpan, t: &OrbitalSpan, q: &Rational, q2: &Rational) -> Result<Arc<DomainIso>> {
        let mut isos = self.isos.lock().unwrap();
        let key = (s.clone(), t.clone());
        if let Some(iso) = isos.get(&key) {
            return Ok(iso.clone());
        }
        let left = RationalInterval::new(Some(q.clone()), Some(self.up_phi(s.parity(), q, 1)?));
        let right = RationalInterval::new(Some(q2.clone()), Some(self.up_psi(t.parity(), q2, 1)?));
        let iso = Arc::new(BackAndForth::new(left, right, usize::MAX));
        isos.insert(key, iso.clone());
        Ok(iso)
    }
}

/// `f^n(q)` where `f` is `φ` on up-bumps and `φ⁻¹` on down-bumps.
fn step<F: OrderAutomorphism + ?Sized>(f: &F, parity: Parity, q: &Rational, n: i64) -> Result<Rational> {
    let forward = (n >= 0) == (parity != Parity::Down);
    let mut cur = q.clone();
    for _ in 0..n.unsigned_abs() {
        cur = if forward { f.apply(&cur)? } else { f.apply_inverse(&cur)? };
    }
    Ok(cur)
}

impl<F: OrderAutomorphism, G: OrderAutomorphism> RationalMap for GlassConjugator<F, G> {
    fn apply(&self, y: &Rational) -> Result<Rational> {
        let s = self.phi.span_of(y)?;
        let t = self.target(&s)?;
        let parity = s.parity();
        if parity != t.parity() {
            return Err(Error::ParityMismatch(format!("orbital of {y} matched across parities")));
        }
        if let OrbitalSpan::Point(p) = t {
            return Ok(p);
        }
        let (q, q2) = (s.rep(), t.rep());
        // Find n with y in [fⁿ(q), fⁿ⁺¹(q)).
        let mut n: i64 = 0;
        let mut base = q.clone();
        let mut walked = 0;
        while y < &base || &self.up_phi(parity, &base, 1)? <= y {
            let dir = if y < &base { -1 } else { 1 };
            base = self.up_phi(parity, &base, dir)?;
            n += dir;
            walked += 1;
            if walked > ORBIT_WALK_LIMIT {
                return Err(Error::Unresolved(format!("{y} is more than {ORBIT_WALK_LIMIT} steps from {q}")));
            }
        }
        let y0 = self.up_phi(parity, y, -n)?;
        let b0 = if y0 == q {
            q2.clone()
        } else {
            self.domain_iso(&s, &t, &q, &q2)?
                .resolve_forward(&y0)
                .ok_or_else(|| Error::Unresolved(format!("fundamental domain map at {y0}")))?
        };
        self.up_psi(parity, &b0, n)
    }
}

/// `recover_order_iso`: `β` restricted to the fixed points of `φ` among the
/// first `prefix` enumerated rationals, after checking `βφ = ψβ` there.
pub fn recover_order_iso<B, F, G>(beta: &B, phi: &F, psi: &G, prefix: u64) -> Result<PartialMap<Rational, Rational>>
where
    B: RationalMap + ?Sized,
    F: RationalMap + ?Sized,
    G: RationalMap + ?Sized,
{
    let mut out = PartialMap::new();
    for k in 0..prefix {
        let q = cw_rational_u64(k);
        let bq = beta.apply(&q)?;
        let lhs = beta.apply(&phi.apply(&q)?)?;
        let rhs = psi.apply(&bq)?;
        if lhs != rhs {
            return Err(Error::NotConjugating(format!("β(φ({q})) = {lhs} but ψ(β({q})) = {rhs}")));
        }
        if phi.apply(&q)? == q {
            out.insert(q, bq).map_err(|e| Error::NotConjugating(e.to_string()))?;
        }
    }
    let pts: Vec<(&Rational, &Rational)> = out.iter().collect();
    for w in pts.windows(2) {
        if w[0].1 >= w[1].1 {
            return Err(Error::NotConjugating(format!("β reverses {} and {}", w[0].0, w[1].0)));
        }
    }
    Ok(out)
}

/// Checks `β(φ(q)) = ψ(β(q))` on the first `prefix` enumerated rationals,
/// returning the first failure.
pub fn verify_conjugation<B, F, G>(beta: &B, phi: &F, psi: &G, prefix: u64) -> Result<()>
where
    B: RationalMap + ?Sized,
    F: RationalMap + ?Sized,
    G: RationalMap + ?Sized,
{
    recover_order_iso(beta, phi, psi, prefix).map(|_| ())
}
