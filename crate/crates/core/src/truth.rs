//! Truth objects, their characteristic morphisms, and truth-value assignment.
//!
//! A truth object is a family of stage classes: at a context v (in the
//! presheaf flavor) a set of down-set subobjects of O↓v, or (in the sheaf
//! flavor) of ♭*(O↓v). Stage classes are predicates; `materialize` turns
//! them into explicit sets under a guard.

use std::collections::BTreeSet;

use num_complex::Complex;

use crate::contexts::{ContextPoset, Mask, Skeleton};
use crate::error::{Error, Result};
use crate::linops::{DensityMatrix, Projection};
use crate::presheaves::{Presheaf, TruthValue};
use crate::scalar::Scalar;
use crate::site::{ContextSet, Site};
use crate::spectral::{base_support, daseinize, enumerate_db, DbSubobject, Flavor};

#[derive(Debug, Clone)]
pub enum TruthKind<T: Scalar = f64> {
    Full,
    Empty,
    /// tr(ρ ∨A(w)) ≥ r at every stage w; `weights[v][i]` is tr(ρ e_i) for the
    /// minimal projections e_i of v.
    RhoR {
        r: T,
        weights: Vec<Vec<T>>,
    },
    /// δ(|φ⟩⟨φ|)_w ∈ A(w) at every stage w; `delta[v]` is that daseinization.
    Vector {
        delta: Vec<Mask>,
    },
    Materialized(Vec<BTreeSet<DbSubobject>>),
}

#[derive(Debug, Clone)]
pub struct TruthObject<T: Scalar = f64> {
    flavor: Flavor,
    site: Site,
    eps: T,
    kind: TruthKind<T>,
}

/// 𝕋^{ρ,r} (presheaf) or 𝕋^{ρ,r}_j (sheaf).
pub fn truth_rho_r<T: Scalar>(poset: &ContextPoset<T>, rho: &DensityMatrix<T>, r: T, flavor: Flavor) -> Result<TruthObject<T>> {
    if !(r >= T::zero() && r <= T::one()) {
        return Err(Error::InvalidInput(format!("r = {r} outside [0, 1]")));
    }
    if rho.dim() != poset.dim() {
        return Err(Error::DimensionMismatch { expected: poset.dim(), found: rho.dim() });
    }
    Ok(TruthObject {
        flavor,
        site: poset.site().clone(),
        eps: poset.epsilon(),
        kind: TruthKind::RhoR { r, weights: poset.atom_expectations(rho) },
    })
}

/// 𝕋^{|φ⟩} (presheaf) or 𝕋^{|φ⟩}_j (sheaf).
pub fn truth_vector<T: Scalar>(poset: &ContextPoset<T>, phi: &[Complex<T>], flavor: Flavor) -> Result<TruthObject<T>> {
    if phi.len() != poset.dim() {
        return Err(Error::DimensionMismatch { expected: poset.dim(), found: phi.len() });
    }
    let norm = phi.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    if (norm - T::one()).abs() > T::rank_tolerance() {
        return Err(Error::InvalidInput(format!("state vector has norm {norm}")));
    }
    let p = Projection::from_vector(phi)?;
    Ok(TruthObject {
        flavor,
        site: poset.site().clone(),
        eps: poset.epsilon(),
        kind: TruthKind::Vector { delta: (0..poset.len()).map(|v| daseinize(poset, &p, v)).collect() },
    })
}

impl<T: Scalar> TruthObject<T> {
    pub fn full(site: &Site, flavor: Flavor) -> Self {
        Self { flavor, site: site.clone(), eps: T::default_epsilon(), kind: TruthKind::Full }
    }

    pub fn empty(site: &Site, flavor: Flavor) -> Self {
        Self { flavor, site: site.clone(), eps: T::default_epsilon(), kind: TruthKind::Empty }
    }

    /// Explicit stage classes; every member must live over the right base.
    pub fn from_stages(site: &Site, flavor: Flavor, stages: Vec<BTreeSet<DbSubobject>>) -> Result<Self> {
        if stages.len() != site.len() {
            return Err(Error::InvalidInput("one stage class per context required".into()));
        }
        for (v, stage) in stages.iter().enumerate() {
            let support = base_support(site, flavor, Some(v));
            if stage.iter().any(|a| a.flavor() != flavor || a.support() != support) {
                return Err(Error::InvalidInput(format!("stage class at {v} holds a subobject over the wrong base")));
            }
        }
        Ok(Self { flavor, site: site.clone(), eps: T::default_epsilon(), kind: TruthKind::Materialized(stages) })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn kind(&self) -> &TruthKind<T> {
        &self.kind
    }

    pub fn site(&self) -> &Site {
        &self.site
    }

    /// Explicit stage classes, when the object is materialized.
    pub fn stages(&self) -> Option<&[BTreeSet<DbSubobject>]> {
        match &self.kind {
            TruthKind::Materialized(stages) => Some(stages),
            _ => None,
        }
    }

    /// Membership of `a` in the stage class at v. Subobjects over a
    /// different base are never members.
    pub fn contains(&self, v: usize, a: &DbSubobject) -> bool {
        if a.flavor() != self.flavor || a.support() != base_support(&self.site, self.flavor, Some(v)) {
            return false;
        }
        let ctx = |w: usize| match self.flavor {
            Flavor::Presheaf => w,
            Flavor::Sheaf => self.site.flat(w),
        };
        match &self.kind {
            TruthKind::Full => true,
            TruthKind::Empty => false,
            TruthKind::RhoR { r, weights } => a.support().iter().all(|w| {
                let top = a.values()[w];
                let tr =
                    weights[ctx(w)].iter().enumerate().filter(|(i, _)| top >> i & 1 == 1).fold(T::zero(), |s, (_, &x)| s + x);
                tr >= *r - self.eps
            }),
            TruthKind::Vector { delta } => a.support().iter().all(|w| delta[ctx(w)] & !a.values()[w] == 0),
            TruthKind::Materialized(stages) => stages[v].contains(a),
        }
    }

    /// The stage class at v as an explicit sorted list.
    pub fn materialize_stage(&self, sk: &Skeleton, v: usize, guard: usize) -> Result<Vec<DbSubobject>> {
        Ok(enumerate_db(sk, self.flavor, Some(v), guard)?.into_iter().filter(|a| self.contains(v, a)).collect())
    }

    pub fn materialize(&self, sk: &Skeleton, guard: usize) -> Result<Self> {
        let stages = (0..sk.len())
            .map(|v| self.materialize_stage(sk, v, guard).map(|s| s.into_iter().collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { flavor: self.flavor, site: self.site.clone(), eps: self.eps, kind: TruthKind::Materialized(stages) })
    }

    /// First context whose stage class is not a filter (up-closed and
    /// closed under binary meets), if any. Empty classes are filters.
    pub fn first_non_filter(&self, sk: &Skeleton, guard: usize) -> Result<Option<usize>> {
        for v in 0..sk.len() {
            let all = enumerate_db(sk, self.flavor, Some(v), guard)?;
            let members: Vec<&DbSubobject> = all.iter().filter(|a| self.contains(v, a)).collect();
            if !is_filter(&all, &members, |a| self.contains(v, a)) {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    pub fn check_filters(&self, sk: &Skeleton, guard: usize) -> Result<()> {
        match self.first_non_filter(sk, guard)? {
            Some(v) => Err(Error::NotFilter(v)),
            None => Ok(()),
        }
    }

    /// Members restrict to members: A ∈ T(v) implies A↓w ∈ T(w)
    /// (presheaf) or ♭*(A↓w) ∈ T(w) (sheaf).
    pub fn is_restriction_closed(&self, sk: &Skeleton, guard: usize) -> Result<bool> {
        for v in 0..sk.len() {
            for a in self.materialize_stage(sk, v, guard)? {
                if sk.site().down(v).iter().any(|w| !self.contains(w, &a.restrict_to(sk.site(), w))) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The truth object as a presheaf of its materialized stage classes.
    pub fn as_presheaf(&self, sk: &Skeleton, guard: usize) -> Result<Presheaf<DbSubobject>> {
        let stages = (0..sk.len()).map(|v| self.materialize_stage(sk, v, guard)).collect::<Result<Vec<_>>>()?;
        let site = sk.site();
        Presheaf::from_fn(site, stages, |_, w, a| a.restrict_to(site, w))
    }

    /// τ at v applied to a subobject over the base of v:
    /// {w ⊆ v : restriction of S to w is in T(w)}.
    pub fn tau(&self, v: usize, s: &DbSubobject) -> ContextSet {
        self.site.down(v).iter().filter(|&w| self.contains(w, &s.restrict_to(&self.site, w))).collect()
    }

    /// The characteristic morphism. Materialized truth objects are checked
    /// for filter stages first.
    pub fn tau_char(&self, sk: &Skeleton, guard: usize) -> Result<Characteristic<'_, T>> {
        if matches!(self.kind, TruthKind::Materialized(_)) {
            self.check_filters(sk, guard)?;
        }
        Ok(Characteristic { truth: self })
    }
}

/// Filter test inside the finite lattice `all` of one stage.
fn is_filter(all: &[DbSubobject], members: &[&DbSubobject], contains: impl Fn(&DbSubobject) -> bool) -> bool {
    members.iter().all(|a| all.iter().filter(|b| a.leq(b)).all(&contains))
        && members.iter().all(|a| members.iter().all(|b| contains(&a.meet(b))))
}

pub struct Characteristic<'a, T: Scalar> {
    truth: &'a TruthObject<T>,
}

impl<T: Scalar> Characteristic<'_, T> {
    pub fn apply(&self, v: usize, s: &DbSubobject) -> ContextSet {
        self.truth.tau(v, s)
    }
}

/// ν(P; T) = τ ∘ ⌈P⌉: the down-set of contexts w where the name of P at w
/// is accepted.
pub fn nu<T: Scalar>(p: &DbSubobject, truth: &TruthObject<T>) -> Result<TruthValue> {
    let site = truth.site();
    if p.flavor() != truth.flavor() {
        return Err(Error::InvalidInput("proposition and truth object have different flavors".into()));
    }
    if p.support() != site.all() {
        return Err(Error::InvalidInput("proposition must be defined on every context".into()));
    }
    let accepted: ContextSet = (0..site.len()).filter(|&w| truth.contains(w, &p.restrict_to(site, w))).collect();
    TruthValue::from_downset(site, accepted)
}

/// Closed form for δ(P) (or δ_j(P)) against 𝕋^{ρ,r}:
/// {w : tr(ρ δ(P)_w) ≥ r - ε}, computed from the matrices.
pub fn nu_projection_fast<T: Scalar>(
    poset: &ContextPoset<T>,
    p: &Projection<T>,
    rho: &DensityMatrix<T>,
    r: T,
    flavor: Flavor,
) -> Result<TruthValue> {
    if !(r >= T::zero() && r <= T::one()) {
        return Err(Error::InvalidInput(format!("r = {r} outside [0, 1]")));
    }
    let site = poset.site();
    let accepted: ContextSet = (0..poset.len())
        .filter(|&w| {
            let ctx = match flavor {
                Flavor::Presheaf => w,
                Flavor::Sheaf => site.flat(w),
            };
            let d = poset.projection(ctx, daseinize(poset, p, ctx));
            rho.expectation(&d) >= r - poset.epsilon()
        })
        .collect();
    TruthValue::from_downset(site, accepted)
}
