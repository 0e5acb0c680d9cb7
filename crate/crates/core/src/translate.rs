//! Translation between the presheaf and sheaf pictures, and the
//! coarse-graining intervals of truth values, propositions and truth objects.
//!
//! The sheaf side is always indexed by the same contexts as the presheaf
//! side; the map ♭ does the bookkeeping. A truth presheaf is stored by its
//! stage classes, every one of which is either empty or principal.

use std::collections::{BTreeMap, BTreeSet};

use crate::contexts::{ContextPoset, Skeleton};
use crate::error::{size_limit, Error, Result};
use crate::fixtures::{state_grid, R_GRID};
use crate::presheaves::{omega_global_elements, omega_j_global_elements, retraction_r, TruthValue};
use crate::scalar::Scalar;
use crate::site::{ContextSet, Site};
use crate::spectral::{enumerate_db, DbSubobject, Flavor};
use crate::truth::{nu, truth_rho_r, TruthObject};

/// Exhaustive theorem checks refuse larger posets.
pub const MAX_THEOREM_CONTEXTS: usize = 6;
pub const MAX_THEOREM_ATOMS: usize = 4;

/// Stagewise inclusion.
pub trait StagewiseOrder {
    fn stage_leq(&self, other: &Self) -> bool;
}

impl StagewiseOrder for TruthValue {
    fn stage_leq(&self, other: &Self) -> bool {
        self.downset().is_subset(other.downset())
    }
}

impl StagewiseOrder for DbSubobject {
    fn stage_leq(&self, other: &Self) -> bool {
        self.leq(other)
    }
}

/// Only materialized truth objects are comparable.
impl<T: Scalar> StagewiseOrder for TruthObject<T> {
    fn stage_leq(&self, other: &Self) -> bool {
        match (self.stages(), other.stages()) {
            (Some(a), Some(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.is_subset(y)),
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Interval<X> {
    pub lower: X,
    pub upper: X,
}

impl<X: StagewiseOrder> Interval<X> {
    pub fn new(lower: X, upper: X) -> Result<Self> {
        if !lower.stage_leq(&upper) {
            return Err(Error::InvalidInput("interval bounds are not ordered".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, x: &X) -> bool {
        self.lower.stage_leq(x) && x.stage_leq(&self.upper)
    }
}

// ---- truth values ----

/// r∘ν, stagewise.
pub fn r_of(site: &Site, nu: &TruthValue) -> TruthValue {
    let sieves = (0..site.len()).map(|v| retraction_r(site, nu.at(v)).members).collect();
    TruthValue::from_sieves(site, sieves).expect("r maps global elements to global elements")
}

/// V' ∈ (ν_j)_V ⟺ ♭V' ∈ ν_V for all V' ⊆ V.
pub fn is_translation_tv(site: &Site, nu: &TruthValue, nu_j: &TruthValue) -> bool {
    (0..site.len()).all(|v| {
        let (s, s_j) = (nu.sieves()[v], nu_j.sieves()[v]);
        site.down(v).iter().all(|w| s_j.contains(w) == s.contains(site.flat(w)))
    })
}

/// The largest translation: ν_j read as an element of ΓΩ.
pub fn gamma_max(nu_j: &TruthValue) -> TruthValue {
    nu_j.clone()
}

/// The smallest translation: the down-set of contexts V' with some member
/// of ν_j in U♭(V'), i.e. ↓♭(ν_j).
pub fn gamma_min(site: &Site, nu_j: &TruthValue) -> TruthValue {
    let members = nu_j.downset();
    let u: ContextSet = (0..site.len()).filter(|&v| !site.u_flat(v).intersect(members).is_empty()).collect();
    TruthValue::from_downset(site, u).expect("↓♭ of a down-set is a down-set")
}

pub fn gamma_interval(site: &Site, nu_j: &TruthValue) -> Interval<TruthValue> {
    Interval { lower: gamma_min(site, nu_j), upper: gamma_max(nu_j) }
}

// ---- propositions ----

/// ♭*P = P_j.
pub fn is_translation_prop(site: &Site, p: &DbSubobject, p_j: &DbSubobject) -> bool {
    p.flavor() == Flavor::Presheaf && p_j.flavor() == Flavor::Sheaf && p.flat_pullback(site) == *p_j
}

fn check_global_sheaf(site: &Site, p_j: &DbSubobject) -> Result<()> {
    if p_j.flavor() != Flavor::Sheaf || p_j.support() != site.all() {
        return Err(Error::InvalidInput("expected a sheaf proposition over the whole poset".into()));
    }
    Ok(())
}

/// ı^∨(P_j): at V the preimage of P_j(V) under ζ_O, whose top is the top
/// of P_j(V) read in V.
pub fn iota_max(sk: &Skeleton, p_j: &DbSubobject) -> Result<DbSubobject> {
    let site = sk.site();
    check_global_sheaf(site, p_j)?;
    let tops = (0..sk.len()).map(|v| sk.lift(site.flat(v), v, p_j.values()[v])).collect();
    DbSubobject::new(sk, Flavor::Presheaf, site.all(), tops)
}

/// ı^∧(P_j): at V the join of δ(top P_j(W))_V over W ∈ U♭(V), or 0 when
/// U♭(V) is empty.
pub fn iota_min(sk: &Skeleton, p_j: &DbSubobject) -> Result<DbSubobject> {
    let site = sk.site();
    check_global_sheaf(site, p_j)?;
    let tops =
        (0..sk.len()).map(|v| site.u_flat(v).iter().fold(0, |m, w| m | sk.coarsen(site.flat(w), v, p_j.values()[w]))).collect();
    DbSubobject::new(sk, Flavor::Presheaf, site.all(), tops)
}

pub fn iota_interval(sk: &Skeleton, p_j: &DbSubobject) -> Result<Interval<DbSubobject>> {
    Interval::new(iota_min(sk, p_j)?, iota_max(sk, p_j)?)
}

// ---- truth objects ----

/// (ϱ_O)_V: a down-set subobject S of O↓♭V goes to ♭*S.
pub fn varrho(site: &Site, v: usize, s: &DbSubobject) -> Result<DbSubobject> {
    if s.flavor() != Flavor::Presheaf || s.support() != site.down(site.flat(v)) {
        return Err(Error::InvalidInput(format!("subobject does not live over ↓♭({})", site.label(v))));
    }
    Ok(s.flat_pullback(site))
}

/// ϱ_O^{-1}(T_j): at V, the subobjects A of O↓♭V with ♭*A ∈ T_j(V).
pub struct TruthPreimage<'a, T: Scalar> {
    truth_j: &'a TruthObject<T>,
}

pub fn truth_preimage<T: Scalar>(truth_j: &TruthObject<T>) -> Result<TruthPreimage<'_, T>> {
    if truth_j.flavor() != Flavor::Sheaf {
        return Err(Error::InvalidInput("truth_preimage expects a sheaf-flavor truth object".into()));
    }
    Ok(TruthPreimage { truth_j })
}

impl<T: Scalar> TruthPreimage<'_, T> {
    pub fn contains(&self, v: usize, a: &DbSubobject) -> bool {
        let site = self.truth_j.site();
        varrho(site, v, a).is_ok_and(|s| self.truth_j.contains(v, &s))
    }

    pub fn materialize_stage(&self, sk: &Skeleton, v: usize, guard: usize) -> Result<Vec<DbSubobject>> {
        let flat = sk.site().flat(v);
        Ok(enumerate_db(sk, Flavor::Presheaf, Some(flat), guard)?.into_iter().filter(|a| self.contains(v, a)).collect())
    }
}

fn check_pair<T: Scalar>(truth: &TruthObject<T>, truth_j: &TruthObject<T>) -> Result<()> {
    if truth.flavor() != Flavor::Presheaf || truth_j.flavor() != Flavor::Sheaf {
        return Err(Error::InvalidInput("expected a presheaf and a sheaf truth object".into()));
    }
    Ok(())
}

/// ♭*T = ϱ_O^{-1}(T_j): T(♭V) and the preimage agree on every subobject of O↓♭V.
pub fn is_translation_truth<T: Scalar>(
    sk: &Skeleton,
    truth: &TruthObject<T>,
    truth_j: &TruthObject<T>,
    guard: usize,
) -> Result<bool> {
    check_pair(truth, truth_j)?;
    let pre = truth_preimage(truth_j)?;
    for v in 0..sk.len() {
        let flat = sk.site().flat(v);
        for a in enumerate_db(sk, Flavor::Presheaf, Some(flat), guard)? {
            if truth.contains(flat, &a) != pre.contains(v, &a) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The square τ_j ∘ ϱ_O = ζ⁻¹ ∘ ♭*r ∘ ♭*τ, checked elementwise: for every
/// A over ↓♭V and V' ⊆ ♭V, A↓♭V' ∈ T(♭V') ⟺ ♭*(A↓V') ∈ T_j(V').
pub fn diagram_commutes<T: Scalar>(
    sk: &Skeleton,
    truth: &TruthObject<T>,
    truth_j: &TruthObject<T>,
    guard: usize,
) -> Result<bool> {
    check_pair(truth, truth_j)?;
    let site = sk.site();
    for v in 0..sk.len() {
        let flat = site.flat(v);
        for a in enumerate_db(sk, Flavor::Presheaf, Some(flat), guard)? {
            for w in site.down(flat).iter() {
                let left = truth.contains(site.flat(w), &a.restrict_down(site, site.flat(w)));
                let right = truth_j.contains(w, &a.restrict_down(site, w).flat_pullback(site));
                if left != right {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Smallest filter of Sub_dB(O↓v) containing `r`: the up-set of ∧r, or
/// nothing when `r` is empty.
pub fn filter_generate(sk: &Skeleton, v: usize, r: &[DbSubobject], guard: usize) -> Result<BTreeSet<DbSubobject>> {
    let support = sk.site().down(v);
    if r.iter().any(|a| a.flavor() != Flavor::Presheaf || a.support() != support) {
        return Err(Error::InvalidInput(format!("generator not over ↓{}", sk.site().label(v))));
    }
    let Some(first) = r.first() else { return Ok(BTreeSet::new()) };
    let m = r.iter().fold(first.clone(), |acc, a| acc.meet(a));
    Ok(enumerate_db(sk, Flavor::Presheaf, Some(v), guard)?.into_iter().filter(|a| m.leq(a)).collect())
}

/// ȷ^∨(T_j)(V) = {A over ↓V : ♭*A ∈ T_j(V)}, materialized.
pub fn jmath_max<T: Scalar>(sk: &Skeleton, truth_j: &TruthObject<T>, guard: usize) -> Result<TruthObject<T>> {
    if truth_j.flavor() != Flavor::Sheaf {
        return Err(Error::InvalidInput("jmath_max expects a sheaf-flavor truth object".into()));
    }
    let site = sk.site();
    let stages = (0..sk.len())
        .map(|v| {
            enumerate_db(sk, Flavor::Presheaf, Some(v), guard)
                .map(|all| all.into_iter().filter(|a| truth_j.contains(v, &a.flat_pullback(site))).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    TruthObject::from_stages(site, Flavor::Presheaf, stages)
}

/// ȷ^∧(T_j)(V): the filter generated by the restrictions to ↓V of
/// ϱ_O^{-1}(T_j)(W) for W ∈ U♭(V); empty when U♭(V) is.
pub fn jmath_min<T: Scalar>(sk: &Skeleton, truth_j: &TruthObject<T>, guard: usize) -> Result<TruthObject<T>> {
    let pre = truth_preimage(truth_j)?;
    let site = sk.site();
    let mut generated = Vec::with_capacity(sk.len());
    let mut cache: BTreeMap<usize, Vec<DbSubobject>> = BTreeMap::new();
    for v in 0..sk.len() {
        let mut r = BTreeSet::new();
        for w in site.u_flat(v).iter() {
            if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(w) {
                e.insert(pre.materialize_stage(sk, w, guard)?);
            }
            r.extend(cache[&w].iter().map(|a| a.restrict_down(site, v)));
        }
        generated.push(filter_generate(sk, v, &r.into_iter().collect::<Vec<_>>(), guard)?);
    }
    TruthObject::from_stages(site, Flavor::Presheaf, generated)
}

pub fn jmath_interval<T: Scalar>(sk: &Skeleton, truth_j: &TruthObject<T>, guard: usize) -> Result<Interval<TruthObject<T>>> {
    Interval::new(jmath_min(sk, truth_j, guard)?, jmath_max(sk, truth_j, guard)?)
}

/// ν_j(P_j; T_j) = r∘ν(P; T).
pub fn verify_nu_relation<T: Scalar>(
    site: &Site,
    p: &DbSubobject,
    truth: &TruthObject<T>,
    p_j: &DbSubobject,
    truth_j: &TruthObject<T>,
) -> Result<bool> {
    Ok(r_of(site, &nu(p, truth)?) == nu(p_j, truth_j)?)
}

// ---- truth presheaves by generators ----

/// A truth presheaf whose stage at v is ↑gens[v], or empty for None. Every
/// filter of a finite lattice is of this form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Principal {
    gens: Vec<Option<DbSubobject>>,
}

impl Principal {
    fn contains(&self, v: usize, a: &DbSubobject) -> bool {
        self.gens[v].as_ref().is_some_and(|g| g.leq(a))
    }

    fn leq(&self, other: &Self) -> bool {
        self.gens.iter().zip(&other.gens).all(|(a, b)| match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b.leq(a),
        })
    }

    /// T1 ∩ T2.
    fn join(&self, other: &Self) -> Self {
        let gens = self
            .gens
            .iter()
            .zip(&other.gens)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(a.join(b)),
                _ => None,
            })
            .collect();
        Self { gens }
    }

    /// The filter generated by T1 ∪ T2.
    fn meet(&self, other: &Self) -> Self {
        let gens = self
            .gens
            .iter()
            .zip(&other.gens)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(a.meet(b)),
                (x, None) | (None, x) => x.clone(),
            })
            .collect();
        Self { gens }
    }

    /// Reads generators off explicit filter stages; None if some stage is
    /// not a filter.
    fn from_stages(lattices: &[Vec<DbSubobject>], stages: &[BTreeSet<DbSubobject>]) -> Option<Self> {
        let mut gens = Vec::with_capacity(stages.len());
        for (all, stage) in lattices.iter().zip(stages) {
            let Some(first) = stage.first() else {
                gens.push(None);
                continue;
            };
            let m = stage.iter().fold(first.clone(), |acc, a| acc.meet(a));
            if all.iter().filter(|a| m.leq(a)).count() != stage.len() || !stage.contains(&m) {
                return None;
            }
            gens.push(Some(m));
        }
        Some(Self { gens })
    }

    fn materialize(&self, lattices: &[Vec<DbSubobject>]) -> Vec<BTreeSet<DbSubobject>> {
        lattices.iter().enumerate().map(|(v, all)| all.iter().filter(|a| self.contains(v, a)).cloned().collect()).collect()
    }
}

/// Sub_dB(O↓v) for every v.
fn stage_lattices(sk: &Skeleton, guard: usize) -> Result<Vec<Vec<DbSubobject>>> {
    (0..sk.len()).map(|v| enumerate_db(sk, Flavor::Presheaf, Some(v), guard)).collect()
}

fn principal_presheaves(sk: &Skeleton, lattices: &[Vec<DbSubobject>], guard: usize) -> Result<Vec<Principal>> {
    let site = sk.site();
    let order: Vec<usize> = site.bottom_up().iter().rev().copied().collect();
    let mut gens: Vec<Option<DbSubobject>> = vec![None; sk.len()];
    let mut out = Vec::new();
    let mut work = 0usize;
    rec(site, lattices, &order, 0, &mut gens, &mut out, &mut work, guard)?;
    out.sort();
    return Ok(out);

    #[allow(clippy::too_many_arguments)]
    fn rec(
        site: &Site,
        lattices: &[Vec<DbSubobject>],
        order: &[usize],
        k: usize,
        gens: &mut Vec<Option<DbSubobject>>,
        out: &mut Vec<Principal>,
        work: &mut usize,
        guard: usize,
    ) -> Result<()> {
        *work += 1;
        if *work > guard {
            return Err(size_limit("truth presheaf enumeration", guard));
        }
        if k == order.len() {
            out.push(Principal { gens: gens.clone() });
            return Ok(());
        }
        let v = order[k];
        // every generator above v restricts into the stage at v
        let above: Vec<DbSubobject> =
            site.up(v).without(v).iter().filter_map(|u| gens[u].as_ref().map(|g| g.restrict_down(site, v))).collect();
        if above.is_empty() {
            gens[v] = None;
            rec(site, lattices, order, k + 1, gens, out, work, guard)?;
        }
        for g in &lattices[v] {
            if above.iter().all(|a| g.leq(a)) {
                gens[v] = Some(g.clone());
                rec(site, lattices, order, k + 1, gens, out, work, guard)?;
            }
        }
        gens[v] = None;
        Ok(())
    }
}

/// Every truth presheaf: restriction-closed families of filters of
/// Sub_dB(O↓v), materialized.
pub fn truth_presheaves<T: Scalar>(sk: &Skeleton, guard: usize) -> Result<Vec<TruthObject<T>>> {
    let lattices = stage_lattices(sk, guard)?;
    principal_presheaves(sk, &lattices, guard)?
        .into_iter()
        .map(|p| TruthObject::from_stages(sk.site(), Flavor::Presheaf, p.materialize(&lattices)))
        .collect()
}

// ---- theorem verification ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseResult {
    pub name: String,
    pub checked: usize,
    pub failures: usize,
}

impl ClauseResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem: u8,
    pub counts: BTreeMap<String, usize>,
    /// Class sizes in the order of the sheaf-side enumeration.
    pub class_sizes: Vec<usize>,
    pub clauses: Vec<ClauseResult>,
    /// Truth-object check only: whether some truth presheaf translates no truth sheaf.
    pub non_translation_exists: Option<bool>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(ClauseResult::passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

#[derive(Default)]
struct Clauses(Vec<ClauseResult>);

impl Clauses {
    fn check(&mut self, name: &str, ok: bool) {
        let c = match self.0.iter_mut().find(|c| c.name == name) {
            Some(c) => c,
            None => {
                self.0.push(ClauseResult { name: name.into(), checked: 0, failures: 0 });
                self.0.last_mut().unwrap()
            }
        };
        c.checked += 1;
        c.failures += usize::from(!ok);
    }
}

fn check_size(sk: &Skeleton) -> Result<()> {
    if sk.len() > MAX_THEOREM_CONTEXTS {
        return Err(size_limit("contexts for theorem verification", MAX_THEOREM_CONTEXTS));
    }
    if (0..sk.len()).any(|v| sk.atoms(v) > MAX_THEOREM_ATOMS) {
        return Err(size_limit("minimal projections per context for theorem verification", MAX_THEOREM_ATOMS));
    }
    Ok(())
}

/// Pairwise closure of each class under the two lattice operations.
fn check_closed<X: PartialEq>(clauses: &mut Clauses, classes: &[Vec<X>], join: impl Fn(&X, &X) -> X, meet: impl Fn(&X, &X) -> X) {
    for class in classes {
        for a in class {
            for b in class {
                clauses.check("closed_under_join", class.contains(&join(a, b)));
                clauses.check("closed_under_meet", class.contains(&meet(a, b)));
            }
        }
    }
}

/// ΓΩ is the disjoint union of the classes of translations of each
/// ν_j ∈ ΓΩ_j, and each class is the interval [γ^∧(ν_j), γ^∨(ν_j)].
pub fn verify_theorem1(sk: &Skeleton, guard: usize) -> Result<TheoremReport> {
    check_size(sk)?;
    let site = sk.site();
    let all = omega_global_elements(site, guard)?;
    let sheaf = omega_j_global_elements(site, guard)?;
    let mut clauses = Clauses::default();
    let mut classes: Vec<Vec<TruthValue>> = vec![Vec::new(); sheaf.len()];
    for nu in &all {
        let hits: Vec<usize> = (0..sheaf.len()).filter(|&k| is_translation_tv(site, nu, &sheaf[k])).collect();
        clauses.check("partition", hits.len() == 1);
        if let Some(&k) = hits.first() {
            classes[k].push(nu.clone());
        }
    }
    for (k, nu_j) in sheaf.iter().enumerate() {
        let interval = gamma_interval(site, nu_j);
        clauses.check("bounds_are_translations", {
            let (lo, hi) = (&interval.lower, &interval.upper);
            is_translation_tv(site, lo, nu_j) && is_translation_tv(site, hi, nu_j) && lo.stage_leq(hi)
        });
        clauses.check("retraction_of_bounds", r_of(site, &interval.lower) == *nu_j && r_of(site, &interval.upper) == *nu_j);
        for nu in &all {
            clauses.check("class_equals_interval", classes[k].contains(nu) == interval.contains(nu));
        }
    }
    let union = |a: &TruthValue, b: &TruthValue| TruthValue::from_downset(site, a.downset().union(b.downset())).unwrap();
    let inter = |a: &TruthValue, b: &TruthValue| TruthValue::from_downset(site, a.downset().intersect(b.downset())).unwrap();
    check_closed(&mut clauses, &classes, union, inter);
    Ok(TheoremReport {
        theorem: 1,
        counts: BTreeMap::from([("gamma_omega".into(), all.len()), ("gamma_omega_j".into(), sheaf.len())]),
        class_sizes: classes.iter().map(Vec::len).collect(),
        clauses: clauses.0,
        non_translation_exists: None,
    })
}

/// Sub_dB(O) is the disjoint union of the classes ♭*⁻¹(P_j), each the
/// interval [ı^∧(P_j), ı^∨(P_j)].
pub fn verify_theorem2(sk: &Skeleton, guard: usize) -> Result<TheoremReport> {
    check_size(sk)?;
    let site = sk.site();
    let props = enumerate_db(sk, Flavor::Presheaf, None, guard)?;
    let sheaf = enumerate_db(sk, Flavor::Sheaf, None, guard)?;
    let intervals = sheaf.iter().map(|p_j| iota_interval(sk, p_j)).collect::<Result<Vec<_>>>()?;
    let mut clauses = Clauses::default();
    let mut classes: Vec<Vec<DbSubobject>> = vec![Vec::new(); sheaf.len()];
    for p in &props {
        let image = p.flat_pullback(site);
        let fibre = sheaf.binary_search(&image).ok();
        clauses.check("image_is_sheaf_proposition", fibre.is_some());
        let containing: Vec<usize> = (0..sheaf.len()).filter(|&k| intervals[k].contains(p)).collect();
        clauses.check("partition", containing.len() == 1);
        clauses.check("interval_matches_image", fibre.is_some() && containing == [fibre.unwrap()]);
        if let Some(k) = fibre {
            classes[k].push(p.clone());
        }
    }
    for (k, p_j) in sheaf.iter().enumerate() {
        let (lo, hi) = (&intervals[k].lower, &intervals[k].upper);
        clauses.check("bounds_are_translations", is_translation_prop(site, lo, p_j) && is_translation_prop(site, hi, p_j));
        for p in &props {
            clauses.check("class_equals_interval", classes[k].contains(p) == intervals[k].contains(p));
        }
    }
    check_closed(&mut clauses, &classes, DbSubobject::join, DbSubobject::meet);
    Ok(TheoremReport {
        theorem: 2,
        counts: BTreeMap::from([("sub_db".into(), props.len()), ("sub_jdb".into(), sheaf.len())]),
        class_sizes: classes.iter().map(Vec::len).collect(),
        clauses: clauses.0,
        non_translation_exists: None,
    })
}

/// Truth sheaves sampled for the truth-object check: the filter-valued 𝕋^{ρ,r}_j over the
/// state grid and r grid, and the principal truth sheaves ↑P_j of every sheaf
/// proposition. Returns the sample (materialized, deduplicated) and the
/// number of 𝕋^{ρ,r}_j dropped for having a non-filter stage.
pub fn theorem3_sample<T: Scalar>(poset: &ContextPoset<T>, guard: usize) -> Result<(Vec<TruthObject<T>>, usize)> {
    let sk = poset.skeleton();
    let site = sk.site();
    let mut seen: BTreeSet<Vec<BTreeSet<DbSubobject>>> = BTreeSet::new();
    let mut sample = Vec::new();
    let mut excluded = 0;
    let mut push = |t: TruthObject<T>, sample: &mut Vec<TruthObject<T>>| {
        if seen.insert(t.stages().expect("materialized").to_vec()) {
            sample.push(t);
        }
    };
    for (_, rho) in state_grid::<T>(poset.dim()) {
        for r in R_GRID {
            let t = truth_rho_r(poset, &rho, T::lit(r), Flavor::Sheaf)?;
            if t.first_non_filter(sk, guard)?.is_some() {
                excluded += 1;
                continue;
            }
            push(t.materialize(sk, guard)?, &mut sample);
        }
    }
    for p_j in enumerate_db(sk, Flavor::Sheaf, None, guard)? {
        let stages = (0..sk.len())
            .map(|v| {
                let g = p_j.restrict_to(site, v);
                enumerate_db(sk, Flavor::Sheaf, Some(v), guard).map(|all| all.into_iter().filter(|a| g.leq(a)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        push(TruthObject::from_stages(site, Flavor::Sheaf, stages)?, &mut sample);
    }
    Ok((sample, excluded))
}

/// Whether a truth presheaf translates some truth sheaf. The candidate is
/// forced to be V ↦ ϱ_V(T(♭V)); T qualifies when every T(♭V) is saturated
/// for ϱ_V and the candidate is a restriction-closed family of filters.
fn translates_some_sheaf(sk: &Skeleton, t: &Principal, lattices: &[Vec<DbSubobject>], guard: usize) -> Result<bool> {
    let site = sk.site();
    let mut stages_j = Vec::with_capacity(sk.len());
    for v in 0..sk.len() {
        let flat = site.flat(v);
        let image: BTreeSet<DbSubobject> =
            lattices[flat].iter().filter(|a| t.contains(flat, a)).map(|a| a.flat_pullback(site)).collect();
        if lattices[flat].iter().any(|a| !t.contains(flat, a) && image.contains(&a.flat_pullback(site))) {
            return Ok(false);
        }
        stages_j.push(image);
    }
    let candidate = TruthObject::<f64>::from_stages(site, Flavor::Sheaf, stages_j)?;
    Ok(candidate.first_non_filter(sk, guard)?.is_none() && candidate.is_restriction_closed(sk, guard)?)
}

/// For every sampled truth sheaf T_j, its class of translations among all
/// truth presheaves is exactly [ȷ^∧(T_j), ȷ^∨(T_j)]. Also reports whether
/// some truth presheaf is a translation of no truth sheaf at all.
pub fn verify_theorem3<T: Scalar>(poset: &ContextPoset<T>, guard: usize) -> Result<TheoremReport> {
    let sk = poset.skeleton();
    check_size(sk)?;
    let site = sk.site();
    let lattices = stage_lattices(sk, guard)?;
    let all = principal_presheaves(sk, &lattices, guard)?;
    let (sample, excluded) = theorem3_sample(poset, guard)?;
    let mut clauses = Clauses::default();
    let mut classes = Vec::with_capacity(sample.len());
    for t_j in &sample {
        // T is a translation iff T(♭V) is the preimage stage at every V
        let targets = (0..sk.len())
            .map(|v| truth_preimage(t_j)?.materialize_stage(sk, v, guard).map(|s| s.into_iter().collect::<BTreeSet<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let is_translation = |t: &Principal| {
            (0..sk.len()).all(|v| {
                let flat = site.flat(v);
                lattices[flat].iter().all(|a| t.contains(flat, a) == targets[v].contains(a))
            })
        };
        let class: Vec<Principal> = all.iter().filter(|t| is_translation(t)).cloned().collect();
        let lo = Principal::from_stages(&lattices, jmath_min(sk, t_j, guard)?.stages().unwrap());
        let hi = Principal::from_stages(&lattices, jmath_max(sk, t_j, guard)?.stages().unwrap());
        clauses.check("bounds_are_filters", lo.is_some() && hi.is_some());
        let (Some(lo), Some(hi)) = (lo, hi) else {
            classes.push(class);
            continue;
        };
        clauses.check("bounds_are_translations", is_translation(&lo) && is_translation(&hi) && lo.leq(&hi));
        for t in &all {
            let in_interval = lo.leq(t) && t.leq(&hi);
            clauses.check("class_equals_interval", class.contains(t) == in_interval);
        }
        classes.push(class);
    }
    check_closed(&mut clauses, &classes, Principal::join, Principal::meet);
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            clauses.check("classes_disjoint", a.iter().all(|t| !b.contains(t)));
        }
    }
    let mut non_translations = 0;
    for t in &all {
        if !translates_some_sheaf(sk, t, &lattices, guard)? {
            non_translations += 1;
        }
    }
    Ok(TheoremReport {
        theorem: 3,
        counts: BTreeMap::from([
            ("truth_presheaves".into(), all.len()),
            ("sampled_truth_sheaves".into(), sample.len()),
            ("excluded_non_filter".into(), excluded),
            ("non_translation_presheaves".into(), non_translations),
        ]),
        class_sizes: classes.iter().map(Vec::len).collect(),
        clauses: clauses.0,
        non_translation_exists: Some(non_translations > 0),
    })
}

pub fn verify_theorem<T: Scalar>(poset: &ContextPoset<T>, n: u8, guard: usize) -> Result<TheoremReport> {
    match n {
        1 => verify_theorem1(poset.skeleton(), guard),
        2 => verify_theorem2(poset.skeleton(), guard),
        3 => verify_theorem3(poset, guard),
        _ => Err(Error::InvalidInput(format!("no theorem {n}"))),
    }
}
