//! Subobject classifier Ω, the topology j induced by ♭, and Ω_j.

use crate::error::{Error, Result};
use crate::site::{ContextSet, Site};

use super::{Presheaf, Subpresheaf};

/// Sieve on a context: a down-closed subset of ↓at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sieve {
    pub at: usize,
    pub members: ContextSet,
}

impl Sieve {
    pub fn new(site: &Site, at: usize, members: ContextSet) -> Result<Self> {
        if !members.is_subset(site.down(at)) || !site.is_down_closed(members) {
            return Err(Error::InvalidInput(format!("{members:?} is not a sieve on {at}")));
        }
        Ok(Self { at, members })
    }

    pub fn maximal(site: &Site, at: usize) -> Self {
        Self { at, members: site.down(at) }
    }

    pub fn restrict(&self, site: &Site, w: usize) -> Self {
        debug_assert!(site.leq(w, self.at));
        Self { at: w, members: self.members.intersect(site.down(w)) }
    }

    /// Closed for j, i.e. ♭v' ∈ S implies v' ∈ S.
    pub fn is_j_closed(&self, site: &Site) -> bool {
        apply_j(site, self.at, self.members) == self.members
    }
}

/// Global element of Ω: one sieve per context, compatible under restriction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthValue {
    sieves: Vec<ContextSet>,
}

impl TruthValue {
    /// The global element whose sieve at v is U ∩ ↓v.
    pub fn from_downset(site: &Site, u: ContextSet) -> Result<Self> {
        if !site.is_down_closed(u) {
            return Err(Error::InvalidInput(format!("{u:?} is not down-closed")));
        }
        Ok(Self { sieves: (0..site.len()).map(|v| u.intersect(site.down(v))).collect() })
    }

    /// Checks that every entry is a sieve and the family is compatible.
    pub fn from_sieves(site: &Site, sieves: Vec<ContextSet>) -> Result<Self> {
        if sieves.len() != site.len() {
            return Err(Error::InvalidInput("one sieve per context required".into()));
        }
        for v in 0..site.len() {
            Sieve::new(site, v, sieves[v])?;
            for w in site.down(v).iter() {
                if sieves[v].intersect(site.down(w)) != sieves[w] {
                    return Err(Error::InvalidInput(format!("sieves at {v} and {w} disagree")));
                }
            }
        }
        Ok(Self { sieves })
    }

    pub fn at(&self, v: usize) -> Sieve {
        Sieve { at: v, members: self.sieves[v] }
    }

    pub fn sieves(&self) -> &[ContextSet] {
        &self.sieves
    }

    /// The down-set this global element corresponds to.
    pub fn downset(&self) -> ContextSet {
        self.sieves.iter().fold(ContextSet::empty(), |acc, s| acc.union(*s))
    }

    /// Global element of Ω_j: every sieve is j-closed.
    pub fn is_j_closed(&self, site: &Site) -> bool {
        (0..self.sieves.len()).all(|v| self.at(v).is_j_closed(site))
    }
}

/// j_v(ω) = {v' ⊆ v : ♭v' ∈ ω}.
pub fn apply_j(site: &Site, v: usize, sieve: ContextSet) -> ContextSet {
    site.down(v).iter().filter(|&w| sieve.contains(site.flat(w))).collect()
}

/// The retraction Ω → Ω_j; it coincides with j.
pub fn retraction_r(site: &Site, s: Sieve) -> Sieve {
    Sieve { at: s.at, members: apply_j(site, s.at, s.members) }
}

/// Ω with stages labelled by their sieves (sorted).
pub fn build_omega(site: &Site, guard: usize) -> Result<Presheaf<ContextSet>> {
    let stages = (0..site.len()).map(|v| site.sieves(v, guard)).collect::<Result<Vec<_>>>()?;
    Presheaf::from_fn(site, stages, |_, w, s| s.intersect(site.down(w)))
}

/// Ω_j: the j-closed sieves, labelled by themselves.
pub fn build_omega_j(site: &Site, guard: usize) -> Result<Presheaf<ContextSet>> {
    let stages = (0..site.len())
        .map(|v| site.sieves(v, guard).map(|all| all.into_iter().filter(|&s| apply_j(site, v, s) == s).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Presheaf::from_fn(site, stages, |_, w, s| s.intersect(site.down(w)))
}

/// Ω_j as a subobject of Ω: the equalizer of the identity and j.
pub fn omega_j_subpresheaf(site: &Site, omega: &Presheaf<ContextSet>) -> Subpresheaf {
    Subpresheaf::new(
        (0..site.len())
            .map(|v| {
                (0..omega.size(v))
                    .filter(|&i| {
                        let s = *omega.label(v, i);
                        apply_j(site, v, s) == s
                    })
                    .collect()
            })
            .collect(),
    )
}

/// ΓΩ, one element per down-set of the site.
pub fn omega_global_elements(site: &Site, guard: usize) -> Result<Vec<TruthValue>> {
    site.downsets_within(site.all(), guard)?.into_iter().map(|u| TruthValue::from_downset(site, u)).collect()
}

/// ΓΩ_j: down-sets U with ♭v ∈ U implying v ∈ U.
pub fn omega_j_global_elements(site: &Site, guard: usize) -> Result<Vec<TruthValue>> {
    Ok(omega_global_elements(site, guard)?.into_iter().filter(|t| t.is_j_closed(site)).collect())
}
