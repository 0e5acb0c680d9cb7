//! The spectral presheaf Σ, the outer presheaf O, daseinization, and the
//! three equivalent proposition representations (down-set subobjects,
//! hyper-elements, clopen subobjects) in presheaf and sheaf flavors.
//!
//! Characters of a context are indexed by its minimal projections, so a
//! projection of a context, a clopen subset of its spectrum, and a down-set
//! of its projection lattice (via its top) are all the same atom mask.
//! In the sheaf flavor the value at a context `w` is a mask over the atoms
//! of `♭w`.

use crate::contexts::{full_mask, ContextPoset, Mask, Skeleton};
use crate::error::{size_limit, Error, Result};
use crate::linops::{loewner_leq, Projection};
use crate::presheaves::Presheaf;
use crate::scalar::Scalar;
use crate::site::{ContextSet, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Presheaf,
    Sheaf,
}

/// Character of a context, identified with one of its minimal projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub context: usize,
    pub index: usize,
}

/// Σ with stage v = characters of v (labelled by atom index).
pub fn build_sigma(sk: &Skeleton) -> Presheaf<usize> {
    let stages = (0..sk.len()).map(|v| (0..sk.atoms(v)).collect()).collect();
    Presheaf::from_index_fn(sk.site(), stages, |v, w, i| sk.parent(v, w, i)).expect("parent maps are total")
}

/// O with stage v = projection lattice of v; element index equals its mask.
pub fn build_outer(sk: &Skeleton) -> Presheaf<Mask> {
    let stages = (0..sk.len()).map(|v| (0..=sk.full(v)).collect()).collect();
    Presheaf::from_index_fn(sk.site(), stages, |v, w, i| sk.coarsen(v, w, i as Mask) as usize)
        .expect("coarsening stays in the lattice")
}

/// σ(P) for a character σ of v: the eigenvalue of P on σ's minimal projection.
pub fn character_value<T: Scalar>(poset: &ContextPoset<T>, sigma: Character, p: &Projection<T>) -> T {
    let e = &poset.context(sigma.context).projections()[sigma.index];
    (e.matrix() * p.matrix()).trace().re / T::from_usize(e.rank()).expect("rank fits")
}

/// δ(P)_v: the sum of minimal projections e of v with ‖eP‖ > ε.
pub fn daseinize<T: Scalar>(poset: &ContextPoset<T>, p: &Projection<T>, v: usize) -> Mask {
    let eps = poset.epsilon();
    poset.context(v).projections().iter().enumerate().fold(
        0,
        |m, (i, e)| {
            if (e.matrix() * p.matrix()).norm() > eps {
                m | 1 << i
            } else {
                m
            }
        },
    )
}

/// δ(P)_v as the meet of every projection of v dominating P.
pub fn daseinize_by_meet<T: Scalar>(poset: &ContextPoset<T>, p: &Projection<T>, v: usize) -> Result<Mask> {
    let full = poset.skeleton().full(v);
    let tol = T::rank_tolerance();
    let mut meet = full;
    for m in 0..=full {
        let q = Projection::new(poset.projection(v, m), tol)?;
        if loewner_leq(p, &q, tol)? {
            meet &= m;
        }
    }
    Ok(meet)
}

/// δ_j(P)_v = δ(P)_{♭v}, a mask over the atoms of ♭v.
pub fn daseinize_j<T: Scalar>(poset: &ContextPoset<T>, p: &Projection<T>, v: usize) -> Mask {
    daseinize(poset, p, poset.flat(v))
}

/// α_v(P): the characters of v with σ(P) = 1. P must belong to v.
pub fn alpha<T: Scalar>(poset: &ContextPoset<T>, v: usize, p: &Projection<T>) -> Result<Vec<Character>> {
    let mask = mask_of(poset, v, p)?;
    Ok((0..poset.skeleton().atoms(v)).filter(|i| mask >> i & 1 == 1).map(|index| Character { context: v, index }).collect())
}

/// The atom mask of a projection lying in context v.
pub fn mask_of<T: Scalar>(poset: &ContextPoset<T>, v: usize, p: &Projection<T>) -> Result<Mask> {
    let mask = daseinize(poset, p, v);
    if (&poset.projection(v, mask) - p.matrix()).norm() > T::rank_tolerance() {
        return Err(Error::InvalidInput(format!("projection does not belong to context {}", poset.label(v))));
    }
    Ok(mask)
}

fn check_support(sk: &Skeleton, flavor: Flavor, support: ContextSet) -> Result<()> {
    let site = sk.site();
    if !support.is_subset(site.all()) || !site.is_down_closed(support) {
        return Err(Error::InvalidInput(format!("support {support:?} is not down-closed")));
    }
    if flavor == Flavor::Sheaf && support.iter().any(|w| !support.contains(site.flat(w))) {
        return Err(Error::InvalidInput("sheaf support must be closed under ♭".into()));
    }
    Ok(())
}

/// Atoms of the stage that holds values at w in the given flavor.
fn value_context(site: &Site, flavor: Flavor, w: usize) -> usize {
    match flavor {
        Flavor::Presheaf => w,
        Flavor::Sheaf => site.flat(w),
    }
}

/// The hyper-element inequalities, plus h_w = h_{♭w} in the sheaf flavor.
pub fn is_hyper(sk: &Skeleton, flavor: Flavor, support: ContextSet, values: &[Mask]) -> bool {
    let site = sk.site();
    if values.len() != sk.len() || check_support(sk, flavor, support).is_err() {
        return false;
    }
    support.iter().all(|v| {
        let cv = value_context(site, flavor, v);
        values[v] & !sk.full(cv) == 0
            && (flavor == Flavor::Presheaf || values[v] == values[site.flat(v)])
            && site.down(v).iter().all(|w| {
                let cw = value_context(site, flavor, w);
                sk.coarsen(cv, cw, values[v]) & !values[w] == 0
            })
    })
}

macro_rules! masked_family {
    ($name:ident, $field:ident) => {
        impl $name {
            pub fn flavor(&self) -> Flavor {
                self.flavor
            }

            pub fn support(&self) -> ContextSet {
                self.support
            }

            /// Value at v, or None outside the support.
            pub fn get(&self, v: usize) -> Option<Mask> {
                self.support.contains(v).then(|| self.$field[v])
            }

            /// Values indexed by context; zero outside the support.
            pub fn values(&self) -> &[Mask] {
                &self.$field
            }
        }
    };
}

/// Down-set subobject with a top at every stage, stored by its tops.
/// Stage v is {m : m ⊆ top(v)} for v in the support, empty elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DbSubobject {
    flavor: Flavor,
    support: ContextSet,
    tops: Vec<Mask>,
}

masked_family!(DbSubobject, tops);

impl DbSubobject {
    pub fn new(sk: &Skeleton, flavor: Flavor, support: ContextSet, tops: Vec<Mask>) -> Result<Self> {
        let tops = zero_outside(tops, support);
        if !is_hyper(sk, flavor, support, &tops) {
            return Err(Error::InvalidInput("tops do not form a subobject".into()));
        }
        Ok(Self { flavor, support, tops })
    }

    /// From explicit stage sets, which must be down-closed with a top.
    pub fn from_stages(sk: &Skeleton, flavor: Flavor, support: ContextSet, stages: &[Vec<Mask>]) -> Result<Self> {
        if stages.len() != sk.len() {
            return Err(Error::InvalidInput("one stage per context required".into()));
        }
        let mut tops = vec![0; sk.len()];
        for v in support.iter() {
            let stage = &stages[v];
            let top = stage.iter().fold(0, |a, &m| a | m);
            if !stage.contains(&top) {
                return Err(Error::InvalidInput(format!("stage at {v} has no top element")));
            }
            let mut expected: Vec<Mask> = submasks(top).collect();
            let mut got = stage.clone();
            expected.sort_unstable();
            got.sort_unstable();
            got.dedup();
            if got != expected {
                return Err(Error::InvalidInput(format!("stage at {v} is not down-closed")));
            }
            tops[v] = top;
        }
        if (0..sk.len()).any(|v| !support.contains(v) && !stages[v].is_empty()) {
            return Err(Error::InvalidInput("non-empty stage outside the support".into()));
        }
        Self::new(sk, flavor, support, tops)
    }

    /// Constant top (I or ♭-stage I) everywhere on the support.
    pub fn full(sk: &Skeleton, flavor: Flavor, support: ContextSet) -> Self {
        let tops = (0..sk.len()).map(|v| sk.full(value_context(sk.site(), flavor, v))).collect();
        Self { flavor, support, tops: zero_outside(tops, support) }
    }

    pub fn top(&self, v: usize) -> Option<Mask> {
        self.get(v)
    }

    pub fn contains(&self, v: usize, m: Mask) -> bool {
        self.support.contains(v) && m & !self.tops[v] == 0
    }

    /// Explicit stage set at v.
    pub fn stage(&self, v: usize) -> Vec<Mask> {
        match self.get(v) {
            Some(t) => {
                let mut s: Vec<Mask> = submasks(t).collect();
                s.sort_unstable();
                s
            }
            None => Vec::new(),
        }
    }

    /// The support cut down to a smaller down-closed set.
    pub fn masked(&self, support: ContextSet) -> Self {
        let support = self.support.intersect(support);
        Self { flavor: self.flavor, support, tops: zero_outside(self.tops.clone(), support) }
    }

    /// A↓v in the presheaf flavor.
    pub fn restrict_down(&self, site: &Site, v: usize) -> Self {
        self.masked(site.down(v))
    }

    /// Restriction in the proposition space of the matching flavor:
    /// A↓w (presheaf) or ♭*(A↓w) (sheaf). For a global A this is its name at w.
    pub fn restrict_to(&self, site: &Site, w: usize) -> Self {
        self.masked(base_support(site, self.flavor, Some(w)))
    }

    /// ♭*A: support {w : ♭w ∈ support}, value at w the value at ♭w.
    pub fn flat_pullback(&self, site: &Site) -> Self {
        let support: ContextSet = (0..site.len()).filter(|&w| self.support.contains(site.flat(w))).collect();
        let tops = (0..site.len()).map(|w| self.tops[site.flat(w)]).collect();
        Self { flavor: Flavor::Sheaf, support, tops: zero_outside(tops, support) }
    }

    /// Stagewise inclusion.
    pub fn leq(&self, other: &Self) -> bool {
        self.support.is_subset(other.support) && self.support.iter().all(|v| self.tops[v] & !other.tops[v] == 0)
    }

    pub fn meet(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    /// Join read through the clopen representation (union of spectra).
    pub fn join(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    fn zip(&self, other: &Self, f: impl Fn(Mask, Mask) -> Mask) -> Self {
        assert_eq!((self.flavor, self.support), (other.flavor, other.support), "operands over different bases");
        let tops = self.tops.iter().zip(&other.tops).map(|(&a, &b)| f(a, b)).collect();
        Self { flavor: self.flavor, support: self.support, tops: zero_outside(tops, self.support) }
    }

    /// c: the hyper-element of tops.
    pub fn to_hyper(&self) -> HyperElement {
        HyperElement { flavor: self.flavor, support: self.support, values: self.tops.clone() }
    }

    /// f = k ∘ c.
    pub fn to_clopen(&self) -> ClopenSubobject {
        self.to_hyper().to_clopen()
    }
}

/// Family of projections decreasing under daseinization restriction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperElement {
    flavor: Flavor,
    support: ContextSet,
    values: Vec<Mask>,
}

masked_family!(HyperElement, values);

impl HyperElement {
    pub fn new(sk: &Skeleton, flavor: Flavor, support: ContextSet, values: Vec<Mask>) -> Result<Self> {
        let values = zero_outside(values, support);
        if !is_hyper(sk, flavor, support, &values) {
            return Err(Error::InvalidInput("family is not a hyper-element".into()));
        }
        Ok(Self { flavor, support, values })
    }

    /// Inverse of c: each stage is the down-set of the value.
    pub fn to_db(&self) -> DbSubobject {
        DbSubobject { flavor: self.flavor, support: self.support, tops: self.values.clone() }
    }

    /// k: stage v becomes α of the value, a set of characters.
    pub fn to_clopen(&self) -> ClopenSubobject {
        ClopenSubobject { flavor: self.flavor, support: self.support, members: self.values.clone() }
    }
}

/// Subobject of Σ (or ♭*Σ); members at v are a bitset over the characters
/// of v (or of ♭v).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClopenSubobject {
    flavor: Flavor,
    support: ContextSet,
    members: Vec<Mask>,
}

masked_family!(ClopenSubobject, members);

impl ClopenSubobject {
    /// Validates closure under Σ restrictions; in the sheaf flavor also
    /// requires each stage to equal its ♭-stage.
    pub fn new(sk: &Skeleton, flavor: Flavor, support: ContextSet, members: Vec<Mask>) -> Result<Self> {
        let members = zero_outside(members, support);
        check_support(sk, flavor, support)?;
        let site = sk.site();
        for v in support.iter() {
            let cv = value_context(site, flavor, v);
            if members[v] & !sk.full(cv) != 0 || (flavor == Flavor::Sheaf && members[v] != members[site.flat(v)]) {
                return Err(Error::InvalidInput(format!("bad stage at {v}")));
            }
            for w in site.down(v).iter() {
                let cw = value_context(site, flavor, w);
                if sk.coarsen(cv, cw, members[v]) & !members[w] != 0 {
                    return Err(Error::InvalidInput(format!("not closed under restriction {v} -> {w}")));
                }
            }
        }
        Ok(Self { flavor, support, members })
    }

    pub fn characters(&self, site: &Site, v: usize) -> Vec<Character> {
        let context = value_context(site, self.flavor, v);
        match self.get(v) {
            Some(m) => (0..Mask::BITS as usize).filter(|i| m >> i & 1 == 1).map(|index| Character { context, index }).collect(),
            None => Vec::new(),
        }
    }

    /// Inverse of k.
    pub fn to_hyper(&self) -> HyperElement {
        HyperElement { flavor: self.flavor, support: self.support, values: self.members.clone() }
    }

    pub fn to_db(&self) -> DbSubobject {
        self.to_hyper().to_db()
    }
}

fn zero_outside(mut values: Vec<Mask>, support: ContextSet) -> Vec<Mask> {
    for (v, x) in values.iter_mut().enumerate() {
        if !support.contains(v) {
            *x = 0;
        }
    }
    values
}

/// All submasks of `m`, including 0 and m.
pub fn submasks(m: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// The proposition generated by δ(P) (presheaf) or δ_j(P) (sheaf) over the
/// whole poset.
pub fn proposition_of<T: Scalar>(poset: &ContextPoset<T>, p: &Projection<T>, flavor: Flavor) -> DbSubobject {
    let support = poset.site().all();
    let tops = (0..poset.len())
        .map(|v| match flavor {
            Flavor::Presheaf => daseinize(poset, p, v),
            Flavor::Sheaf => daseinize_j(poset, p, v),
        })
        .collect();
    DbSubobject { flavor, support, tops }
}

/// Support of Sub_dB(O↓v) (presheaf) or Sub_jdB(♭*(O↓v)) (sheaf); the whole
/// poset when `base` is None.
pub fn base_support(site: &Site, flavor: Flavor, base: Option<usize>) -> ContextSet {
    match (base, flavor) {
        (None, _) => site.all(),
        (Some(v), Flavor::Presheaf) => site.down(v),
        (Some(v), Flavor::Sheaf) => site.flat_preimage_down(v),
    }
}

/// Every down-set subobject over the given base, in a canonical order.
/// `guard` bounds the number of search nodes.
pub fn enumerate_db(sk: &Skeleton, flavor: Flavor, base: Option<usize>, guard: usize) -> Result<Vec<DbSubobject>> {
    let site = sk.site();
    let support = base_support(site, flavor, base);
    // in the sheaf flavor only the fixed stages are free
    let free = match flavor {
        Flavor::Presheaf => support,
        Flavor::Sheaf => support.intersect(site.fixed_points()),
    };
    let order: Vec<usize> = site.bottom_up().iter().rev().copied().filter(|&v| free.contains(v)).collect();
    let mut tops = vec![0 as Mask; sk.len()];
    let mut out = Vec::new();
    let mut work = 0usize;
    rec(sk, &order, free, 0, &mut tops, &mut out, &mut work, guard)?;
    let mut props: Vec<DbSubobject> = out
        .into_iter()
        .map(|t| {
            let tops = (0..sk.len()).map(|w| if flavor == Flavor::Sheaf { t[site.flat(w)] } else { t[w] }).collect();
            DbSubobject { flavor, support, tops: zero_outside(tops, support) }
        })
        .collect();
    props.sort();
    return Ok(props);

    #[allow(clippy::too_many_arguments)]
    fn rec(
        sk: &Skeleton,
        order: &[usize],
        free: ContextSet,
        k: usize,
        tops: &mut Vec<Mask>,
        out: &mut Vec<Vec<Mask>>,
        work: &mut usize,
        guard: usize,
    ) -> Result<()> {
        *work += 1;
        if *work > guard {
            return Err(size_limit("proposition enumeration", guard));
        }
        if k == order.len() {
            out.push(tops.clone());
            return Ok(());
        }
        let v = order[k];
        let required = sk.site().up(v).intersect(free).without(v).iter().fold(0, |acc, u| acc | sk.coarsen(u, v, tops[u]));
        let full = full_mask(sk.atoms(v));
        for extra in submasks(full & !required) {
            tops[v] = required | extra;
            rec(sk, order, free, k + 1, tops, out, work, guard)?;
        }
        tops[v] = 0;
        Ok(())
    }
}
