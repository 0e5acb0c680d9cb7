//! Sheafification along ♭, closure and density of subobjects, and the
//! extension property of sheaves.

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::site::Site;

use super::{subpresheaves_on, NatTransform, Presheaf, Subpresheaf};

/// ♭*Q: (♭*Q)(v) = Q(♭v), restricting along ♭w ⊆ ♭v.
pub fn sheafify<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>) -> Presheaf<L> {
    let stages = (0..q.len()).map(|v| q.stage(site.flat(v)).to_vec()).collect();
    Presheaf::from_index_fn(site, stages, |v, w, i| q.restrict(site.flat(v), site.flat(w), i)).expect("♭ is monotone")
}

/// ζ: Q → ♭*Q, with ζ_v = Q(♭v ↪ v).
pub fn zeta<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>) -> NatTransform {
    NatTransform { components: (0..q.len()).map(|v| (0..q.size(v)).map(|i| q.restrict(v, site.flat(v), i)).collect()).collect() }
}

pub fn is_sheaf<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>) -> bool {
    zeta(site, q).is_iso(&sheafify(site, q))
}

/// Closure: S̄(v) = {x ∈ Q(v) : x|♭v ∈ S(♭v)}.
pub fn closure<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>, s: &Subpresheaf) -> Subpresheaf {
    Subpresheaf::new(
        (0..q.len())
            .map(|v| (0..q.size(v)).filter(|&i| s.contains(site.flat(v), q.restrict(v, site.flat(v), i))).collect())
            .collect(),
    )
}

pub fn is_dense<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>, s: &Subpresheaf) -> bool {
    closure(site, q, s) == Subpresheaf::full(q)
}

/// ♭*S as a subobject of ♭*Q: (♭*S)(v) = S(♭v).
pub fn sheafify_sub(site: &Site, s: &Subpresheaf) -> Subpresheaf {
    Subpresheaf::new((0..s.stages().len()).map(|v| s.stage(site.flat(v)).clone()).collect())
}

/// ϱ_v: a subobject of Q↓♭v goes to ♭* of it, a subsheaf of ♭*(Q↓v).
pub fn varrho_sub(site: &Site, v: usize, s: &Subpresheaf) -> Subpresheaf {
    debug_assert!((0..s.stages().len()).all(|w| s.stage(w).is_empty() || site.leq(w, site.flat(v))));
    sheafify_sub(site, s)
}

/// Unique extension of λ: S → R along a dense S ↪ Q into a sheaf R:
/// μ_v = ζ_{R,v}⁻¹ ∘ λ_{♭v} ∘ Q(♭v ↪ v).
pub fn extend_along_dense<A, B>(
    site: &Site,
    q: &Presheaf<A>,
    s: &Subpresheaf,
    r: &Presheaf<B>,
    lambda: &NatTransform,
) -> Result<NatTransform>
where
    A: Clone + Eq + Hash + Debug,
    B: Clone + Eq + Hash + Debug,
{
    if !s.is_subpresheaf_of(site, q) || !is_dense(site, q, s) {
        return Err(Error::NotDense);
    }
    if !is_sheaf(site, r) {
        return Err(Error::NotSheaf);
    }
    let sp = s.as_presheaf(site, q)?;
    if !lambda.is_natural(site, &sp, r) {
        return Err(Error::InvalidInput("λ is not a natural transformation S → R".into()));
    }
    let zr = zeta(site, r);
    let mut components = Vec::with_capacity(q.len());
    for v in 0..q.len() {
        let f = site.flat(v);
        let mut inverse = vec![usize::MAX; r.size(f)];
        for (y, &z) in zr.components[v].iter().enumerate() {
            inverse[z] = y;
        }
        let local: Vec<usize> = s.stage(f).iter().copied().collect();
        let comp = (0..q.size(v))
            .map(|i| {
                let x = q.restrict(v, f, i);
                let k = local.binary_search(&x).expect("dense: restriction lands in S(♭v)");
                inverse[lambda.apply(f, k)]
            })
            .collect();
        components.push(comp);
    }
    Ok(NatTransform { components })
}

/// Subsheaves of ♭*(Q↓v), as subobjects of ♭*Q supported on {w : ♭w ⊆ v}.
/// A subsheaf is determined by its fixed stages.
pub fn sheaf_power_stage<L: Clone + Eq + Hash + Debug>(
    site: &Site,
    q: &Presheaf<L>,
    v: usize,
    guard: usize,
) -> Result<Vec<Subpresheaf>> {
    let fixed = site.down(v).intersect(site.fixed_points());
    let order: Vec<usize> = site.bottom_up().iter().rev().copied().filter(|&w| fixed.contains(w)).collect();
    let support = site.flat_preimage_down(v);
    let on_fixed = subpresheaves_on(site, q, &order, guard)?;
    let mut out: Vec<Subpresheaf> = on_fixed
        .into_iter()
        .map(|a| {
            Subpresheaf::new(
                (0..q.len()).map(|w| if support.contains(w) { a.stage(site.flat(w)).clone() } else { BTreeSet::new() }).collect(),
            )
        })
        .collect();
    out.sort();
    Ok(out)
}

/// The power sheaf v ↦ Sub_j(♭*(Q↓v)), restricting by w ↦ ♭*(S↓w).
pub fn sheaf_power<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>, guard: usize) -> Result<Presheaf<Subpresheaf>> {
    let stages = (0..q.len()).map(|v| sheaf_power_stage(site, q, v, guard)).collect::<Result<Vec<_>>>()?;
    Presheaf::from_fn(site, stages, |_, w, s| s.masked(site.flat_preimage_down(w)))
}
