//! Finite presheaves on a [`Site`], subpresheaves, natural transformations,
//! and the sheaf machinery induced by ♭.

mod omega;
mod sheaf;

pub use omega::{
    apply_j, build_omega, build_omega_j, omega_global_elements, omega_j_global_elements, omega_j_subpresheaf, retraction_r,
    Sieve, TruthValue,
};
pub use sheaf::{
    closure, extend_along_dense, is_dense, is_sheaf, sheaf_power, sheaf_power_stage, sheafify, sheafify_sub, varrho_sub, zeta,
};

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{size_limit, Error, Result};
use crate::site::{ContextSet, Site};

/// Presheaf with explicit, labelled stage sets and array-backed restrictions.
/// `maps[v][w]` is Q(w ↪ v) for w ⊆ v, sending indices of Q(v) to indices of Q(w).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf<L = usize> {
    stages: Vec<Vec<L>>,
    maps: Vec<Vec<Option<Vec<usize>>>>,
}

impl<L: Clone + Eq + Hash + Debug> Presheaf<L> {
    /// Builds restrictions from a label-level function; the image must be a
    /// listed element of the smaller stage.
    pub fn from_fn(site: &Site, stages: Vec<Vec<L>>, mut restrict: impl FnMut(usize, usize, &L) -> L) -> Result<Self> {
        let n = site.len();
        if stages.len() != n {
            return Err(Error::InvalidInput("one stage per context required".into()));
        }
        let index: Vec<HashMap<&L, usize>> = stages.iter().map(|s| s.iter().enumerate().map(|(i, l)| (l, i)).collect()).collect();
        let mut maps = vec![vec![None; n]; n];
        for v in 0..n {
            for w in site.down(v).iter() {
                let mut m = Vec::with_capacity(stages[v].len());
                for x in &stages[v] {
                    let y = restrict(v, w, x);
                    let &j = index[w]
                        .get(&y)
                        .ok_or_else(|| Error::InvalidInput(format!("restriction {v}->{w} leaves the stage: {y:?}")))?;
                    m.push(j);
                }
                maps[v][w] = Some(m);
            }
        }
        Ok(Self { stages, maps })
    }

    /// Builds restrictions from an index-level function.
    pub fn from_index_fn(
        site: &Site,
        stages: Vec<Vec<L>>,
        mut restrict: impl FnMut(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let n = site.len();
        if stages.len() != n {
            return Err(Error::InvalidInput("one stage per context required".into()));
        }
        let mut maps = vec![vec![None; n]; n];
        for v in 0..n {
            for w in site.down(v).iter() {
                let m: Vec<usize> = (0..stages[v].len()).map(|i| restrict(v, w, i)).collect();
                if m.iter().any(|&j| j >= stages[w].len()) {
                    return Err(Error::InvalidInput(format!("restriction {v}->{w} out of range")));
                }
                maps[v][w] = Some(m);
            }
        }
        Ok(Self { stages, maps })
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn stage(&self, v: usize) -> &[L] {
        &self.stages[v]
    }

    pub fn size(&self, v: usize) -> usize {
        self.stages[v].len()
    }

    pub fn label(&self, v: usize, i: usize) -> &L {
        &self.stages[v][i]
    }

    pub fn index_of(&self, v: usize, l: &L) -> Option<usize> {
        self.stages[v].iter().position(|x| x == l)
    }

    /// Q(w ↪ v) applied to element `i` of Q(v).
    pub fn restrict(&self, v: usize, w: usize, i: usize) -> usize {
        self.maps[v][w].as_ref().expect("restriction along a non-inclusion")[i]
    }

    pub fn restriction(&self, v: usize, w: usize) -> &[usize] {
        self.maps[v][w].as_deref().expect("restriction along a non-inclusion")
    }

    /// Identity along v ⊆ v and composition along u ⊆ w ⊆ v.
    pub fn is_functorial(&self, site: &Site) -> bool {
        (0..self.len()).all(|v| {
            (0..self.size(v)).all(|i| self.restrict(v, v, i) == i)
                && site.down(v).iter().all(|w| {
                    site.down(w)
                        .iter()
                        .all(|u| (0..self.size(v)).all(|i| self.restrict(w, u, self.restrict(v, w, i)) == self.restrict(v, u, i)))
                })
        })
    }

    /// Q↓s: stages outside the down-closed set `support` emptied.
    pub fn masked(&self, site: &Site, support: ContextSet) -> Self {
        debug_assert!(site.is_down_closed(support));
        let stages = (0..self.len()).map(|v| if support.contains(v) { self.stages[v].clone() } else { Vec::new() }).collect();
        Self::from_index_fn(site, stages, |v, w, i| self.restrict(v, w, i)).expect("masking preserves restrictions")
    }

    /// Q↓v.
    pub fn down(&self, site: &Site, v: usize) -> Self {
        self.masked(site, site.down(v))
    }

    /// Relabels elements without changing the structure.
    pub fn map_labels<M>(&self, mut f: impl FnMut(usize, &L) -> M) -> Presheaf<M> {
        Presheaf {
            stages: self.stages.iter().enumerate().map(|(v, s)| s.iter().map(|l| f(v, l)).collect()).collect(),
            maps: self.maps.clone(),
        }
    }
}

/// Subpresheaf, stored as a set of element indices per stage of its parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subpresheaf {
    stages: Vec<BTreeSet<usize>>,
}

impl Subpresheaf {
    pub fn new(stages: Vec<BTreeSet<usize>>) -> Self {
        Self { stages }
    }

    pub fn full<L: Clone + Eq + Hash + Debug>(q: &Presheaf<L>) -> Self {
        Self { stages: (0..q.len()).map(|v| (0..q.size(v)).collect()).collect() }
    }

    pub fn empty(n: usize) -> Self {
        Self { stages: vec![BTreeSet::new(); n] }
    }

    pub fn stage(&self, v: usize) -> &BTreeSet<usize> {
        &self.stages[v]
    }

    pub fn stages(&self) -> &[BTreeSet<usize>] {
        &self.stages
    }

    pub fn contains(&self, v: usize, i: usize) -> bool {
        self.stages[v].contains(&i)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.stages.iter().zip(&other.stages).all(|(a, b)| a.is_subset(b))
    }

    /// Closed under the parent's restrictions.
    pub fn is_subpresheaf_of<L: Clone + Eq + Hash + Debug>(&self, site: &Site, q: &Presheaf<L>) -> bool {
        self.stages.len() == q.len()
            && (0..q.len()).all(|v| {
                self.stages[v]
                    .iter()
                    .all(|&i| i < q.size(v) && site.down(v).iter().all(|w| self.stages[w].contains(&q.restrict(v, w, i))))
            })
    }

    /// Stages outside `support` emptied.
    pub fn masked(&self, support: ContextSet) -> Self {
        Self {
            stages: self
                .stages
                .iter()
                .enumerate()
                .map(|(v, s)| if support.contains(v) { s.clone() } else { BTreeSet::new() })
                .collect(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self { stages: self.stages.iter().zip(&other.stages).map(|(a, b)| a & b).collect() }
    }

    /// The subpresheaf as a presheaf whose labels are parent indices.
    pub fn as_presheaf<L: Clone + Eq + Hash + Debug>(&self, site: &Site, q: &Presheaf<L>) -> Result<Presheaf<usize>> {
        let stages = self.stages.iter().map(|s| s.iter().copied().collect()).collect();
        Presheaf::from_fn(site, stages, |v, w, &i| q.restrict(v, w, i))
    }
}

/// Natural transformation; `components[v][i]` is the image of element i of
/// the source stage at v.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NatTransform {
    pub components: Vec<Vec<usize>>,
}

impl NatTransform {
    pub fn apply(&self, v: usize, i: usize) -> usize {
        self.components[v][i]
    }

    pub fn is_natural<A, B>(&self, site: &Site, source: &Presheaf<A>, target: &Presheaf<B>) -> bool
    where
        A: Clone + Eq + Hash + Debug,
        B: Clone + Eq + Hash + Debug,
    {
        (0..source.len()).all(|v| {
            self.components[v].len() == source.size(v)
                && self.components[v].iter().all(|&j| j < target.size(v))
                && site.down(v).iter().all(|w| {
                    (0..source.size(v))
                        .all(|i| self.apply(w, source.restrict(v, w, i)) == target.restrict(v, w, self.apply(v, i)))
                })
        })
    }

    /// Every component injective and surjective.
    pub fn is_iso<B: Clone + Eq + Hash + Debug>(&self, target: &Presheaf<B>) -> bool {
        self.components.iter().enumerate().all(|(v, c)| {
            let image: BTreeSet<usize> = c.iter().copied().collect();
            image.len() == c.len() && image.len() == target.size(v)
        })
    }
}

/// All subpresheaves of `q`, enumerated top-down with forced images.
pub fn subpresheaves<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>, guard: usize) -> Result<Vec<Subpresheaf>> {
    let order: Vec<usize> = site.bottom_up().iter().rev().copied().collect();
    subpresheaves_on(site, q, &order, guard)
}

/// Subfamilies closed under restriction, over the contexts in `order`
/// (a top-down ordering of a down-closed or otherwise convex set); contexts
/// absent from `order` get empty stages and are ignored.
pub(crate) fn subpresheaves_on<L: Clone + Eq + Hash + Debug>(
    site: &Site,
    q: &Presheaf<L>,
    order: &[usize],
    guard: usize,
) -> Result<Vec<Subpresheaf>> {
    let chosen: ContextSet = order.iter().copied().collect();
    let mut cur = vec![BTreeSet::new(); q.len()];
    let mut out = Vec::new();
    let mut work = 0usize;
    rec(site, q, order, chosen, 0, &mut cur, &mut out, &mut work, guard)?;
    return Ok(out);

    #[allow(clippy::too_many_arguments)]
    fn rec<L: Clone + Eq + Hash + Debug>(
        site: &Site,
        q: &Presheaf<L>,
        order: &[usize],
        chosen: ContextSet,
        k: usize,
        cur: &mut Vec<BTreeSet<usize>>,
        out: &mut Vec<Subpresheaf>,
        work: &mut usize,
        guard: usize,
    ) -> Result<()> {
        *work += 1;
        if *work > guard {
            return Err(size_limit("subobject enumeration", guard));
        }
        if k == order.len() {
            out.push(Subpresheaf { stages: cur.clone() });
            return Ok(());
        }
        let v = order[k];
        let mut required = BTreeSet::new();
        for u in site.up(v).intersect(chosen).without(v).iter() {
            for &i in &cur[u] {
                required.insert(q.restrict(u, v, i));
            }
        }
        let optional: Vec<usize> = (0..q.size(v)).filter(|i| !required.contains(i)).collect();
        if optional.len() > 24 {
            return Err(size_limit("stage too large for subset enumeration", 24));
        }
        for bits in 0u32..1 << optional.len() {
            let mut s = required.clone();
            for (b, &i) in optional.iter().enumerate() {
                if bits >> b & 1 == 1 {
                    s.insert(i);
                }
            }
            cur[v] = s;
            rec(site, q, order, chosen, k + 1, cur, out, work, guard)?;
        }
        cur[v] = BTreeSet::new();
        Ok(())
    }
}

/// Compatible families (one element per context), found by assigning the
/// maximal contexts and propagating restrictions downward. `guard` bounds
/// the number of search nodes.
pub fn global_elements<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>, guard: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    search_sections(site, q, guard, &mut |family| out.push(family.to_vec()))?;
    Ok(out)
}

/// Number of global elements, without storing them.
pub fn count_global_elements<L: Clone + Eq + Hash + Debug>(site: &Site, q: &Presheaf<L>, guard: usize) -> Result<usize> {
    let mut count = 0;
    search_sections(site, q, guard, &mut |_| count += 1)?;
    Ok(count)
}

fn search_sections<L: Clone + Eq + Hash + Debug>(
    site: &Site,
    q: &Presheaf<L>,
    guard: usize,
    emit: &mut dyn FnMut(&[usize]),
) -> Result<()> {
    let maxes: Vec<usize> = site.maximal().iter().collect();
    let mut assign: Vec<Option<usize>> = vec![None; q.len()];
    let mut work = 0usize;
    return rec(site, q, &maxes, 0, &mut assign, &mut work, guard, emit);

    #[allow(clippy::too_many_arguments)]
    fn rec<L: Clone + Eq + Hash + Debug>(
        site: &Site,
        q: &Presheaf<L>,
        maxes: &[usize],
        k: usize,
        assign: &mut Vec<Option<usize>>,
        work: &mut usize,
        guard: usize,
        emit: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        *work += 1;
        if *work > guard {
            return Err(size_limit("global element search", guard));
        }
        if k == maxes.len() {
            let family: Vec<usize> = assign.iter().map(|x| x.expect("every context lies below a maximal one")).collect();
            emit(&family);
            return Ok(());
        }
        let m = maxes[k];
        for x in 0..q.size(m) {
            let mut touched = Vec::new();
            let mut ok = true;
            for w in site.down(m).iter() {
                let val = q.restrict(m, w, x);
                match assign[w] {
                    Some(y) if y != val => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        assign[w] = Some(val);
                        touched.push(w);
                    }
                }
            }
            if ok {
                rec(site, q, maxes, k + 1, assign, work, guard, emit)?;
            }
            for w in touched {
                assign[w] = None;
            }
        }
        Ok(())
    }
}

/// Every natural transformation `source → target`, by backtracking over
/// component functions with naturality pruning.
pub fn natural_transformations<A, B>(
    site: &Site,
    source: &Presheaf<A>,
    target: &Presheaf<B>,
    guard: usize,
) -> Result<Vec<NatTransform>>
where
    A: Clone + Eq + Hash + Debug,
    B: Clone + Eq + Hash + Debug,
{
    let order: Vec<usize> = site.bottom_up().to_vec();
    let mut comps: Vec<Option<Vec<usize>>> = vec![None; source.len()];
    let mut out = Vec::new();
    let mut work = 0usize;
    rec(site, source, target, &order, 0, &mut comps, &mut out, &mut work, guard)?;
    return Ok(out);

    #[allow(clippy::too_many_arguments)]
    fn rec<A, B>(
        site: &Site,
        source: &Presheaf<A>,
        target: &Presheaf<B>,
        order: &[usize],
        k: usize,
        comps: &mut Vec<Option<Vec<usize>>>,
        out: &mut Vec<NatTransform>,
        work: &mut usize,
        guard: usize,
    ) -> Result<()>
    where
        A: Clone + Eq + Hash + Debug,
        B: Clone + Eq + Hash + Debug,
    {
        *work += 1;
        if *work > guard {
            return Err(size_limit("natural transformation search", guard));
        }
        if k == order.len() {
            out.push(NatTransform { components: comps.iter().map(|c| c.clone().expect("assigned")).collect() });
            return Ok(());
        }
        let v = order[k];
        let (ns, nt) = (source.size(v), target.size(v));
        if ns > 0 && nt == 0 {
            return Ok(());
        }
        let below: Vec<usize> = site.down(v).without(v).iter().collect();
        let mut f = vec![0usize; ns];
        loop {
            // bottom-up order: every strict subcontext already has a component
            let natural = below.iter().all(|&w| {
                let cw = comps[w].as_ref().expect("lower component assigned");
                (0..ns).all(|i| cw[source.restrict(v, w, i)] == target.restrict(v, w, f[i]))
            });
            if natural {
                comps[v] = Some(f.clone());
                rec(site, source, target, order, k + 1, comps, out, work, guard)?;
                comps[v] = None;
            }
            // next function in lexicographic order
            let mut pos = 0;
            while pos < ns {
                f[pos] += 1;
                if f[pos] < nt {
                    break;
                }
                f[pos] = 0;
                pos += 1;
            }
            if pos == ns {
                break;
            }
        }
        Ok(())
    }
}
