//! The finite poset of contexts, the Galois pair (φ, ψ) and ♭ = φψ.

use crate::error::{size_limit, Error, Result};
use crate::linops::{
    algebra_member, generated_algebra, matrix_exp_i, minimal_projections_seeded, AlgebraBasis, ComplexMatrix, DensityMatrix,
    Projection,
};
use crate::scalar::Scalar;
use crate::site::{ContextSet, Site};

/// Bitmask over the minimal projections of one context.
pub type Mask = u32;

pub const MAX_OBSERVABLES: usize = 12;

/// A named classical observable together with its quantization υ(a).
#[derive(Debug, Clone)]
pub struct ClassicalObservable<T: Scalar = f64> {
    name: String,
    operator: ComplexMatrix<T>,
    exp: ComplexMatrix<T>,
}

impl<T: Scalar> ClassicalObservable<T> {
    pub fn new(name: impl Into<String>, operator: ComplexMatrix<T>, eps: T) -> Result<Self> {
        let exp = matrix_exp_i(&operator, eps)?;
        Ok(Self { name: name.into(), operator, exp })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn operator(&self) -> &ComplexMatrix<T> {
        &self.operator
    }

    /// e^{iυ(a)}.
    pub fn unitary(&self) -> &ComplexMatrix<T> {
        &self.exp
    }
}

/// A commutative algebra, stored as its minimal projections in canonical order.
#[derive(Debug, Clone)]
pub struct Context<T: Scalar = f64> {
    label: String,
    projections: Vec<Projection<T>>,
}

impl<T: Scalar> Context<T> {
    pub fn from_algebra(label: impl Into<String>, algebra: &AlgebraBasis<T>, seed: u64) -> Result<Self> {
        let projections = minimal_projections_seeded(algebra, seed)?;
        Ok(Self { label: label.into(), projections })
    }

    /// ℂ·I.
    pub fn scalars(dim: usize) -> Self {
        Self { label: "CI".into(), projections: vec![Projection::identity(dim)] }
    }

    fn from_projections(label: String, mut projections: Vec<Projection<T>>) -> Self {
        projections.sort_by_key(|p| p.matrix().rounded_key());
        Self { label, projections }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.projections[0].dim()
    }

    pub fn projections(&self) -> &[Projection<T>] {
        &self.projections
    }

    /// Number of minimal projections (= characters = algebra dimension).
    pub fn atoms(&self) -> usize {
        self.projections.len()
    }

    pub fn algebra(&self) -> AlgebraBasis<T> {
        AlgebraBasis::from_partition(self.dim(), &self.projections)
    }

    /// Sum of the minimal projections selected by `mask`.
    pub fn projection(&self, mask: Mask) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (i, p) in self.projections.iter().enumerate() {
            if mask >> i & 1 == 1 {
                m = &m + p.matrix();
            }
        }
        m
    }

    /// Same set of minimal projections up to `tol` and reordering.
    pub fn same_as(&self, other: &Self, tol: T) -> bool {
        self.atoms() == other.atoms()
            && self.projections.iter().all(|p| other.projections.iter().any(|q| (p.matrix() - q.matrix()).norm() <= tol))
    }

    /// Index of the minimal projection of `self` lying above `e`, if any.
    fn parent_of(&self, e: &ComplexMatrix<T>, tol: T) -> Option<usize> {
        self.projections.iter().position(|p| (&(p.matrix() * e) - e).norm() <= tol)
    }

    /// True iff `self` is a subalgebra of `other`.
    pub fn is_subalgebra_of(&self, other: &Self, tol: T) -> bool {
        other.projections.iter().all(|e| self.parent_of(e.matrix(), tol).is_some())
    }
}

/// Algebra intersection: minimal projections are sums over connected
/// components of the overlap graph between the two sets of minimal projections.
pub fn intersect<T: Scalar>(a: &Context<T>, b: &Context<T>, tol: T) -> Context<T> {
    let (na, nb) = (a.atoms(), b.atoms());
    let mut comp: Vec<usize> = (0..na + nb).collect();
    fn find(comp: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while comp[r] != r {
            r = comp[r];
        }
        comp[x] = r;
        r
    }
    for i in 0..na {
        for j in 0..nb {
            if (a.projections[i].matrix() * b.projections[j].matrix()).norm() > tol {
                let (ri, rj) = (find(&mut comp, i), find(&mut comp, na + j));
                comp[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut sums: Vec<(usize, ComplexMatrix<T>)> = Vec::new();
    for i in 0..na {
        let r = find(&mut comp, i);
        match sums.iter_mut().find(|(root, _)| *root == r) {
            Some((_, m)) => *m = &*m + a.projections[i].matrix(),
            None => sums.push((r, a.projections[i].matrix().clone())),
        }
    }
    let projections = sums.into_iter().map(|(_, m)| Projection::new_unchecked(m)).collect();
    Context::from_projections(format!("{}^{}", a.label, b.label), projections)
}

/// φ(C): the commutative algebra generated by {e^{iυ(a)} : a ∈ C}.
pub fn phi<T: Scalar>(dim: usize, subset: &[&ClassicalObservable<T>], seed: u64) -> Result<Context<T>> {
    let gens: Vec<ComplexMatrix<T>> = subset.iter().map(|o| o.unitary().clone()).collect();
    let algebra = generated_algebra(dim, &gens)?;
    if !algebra.is_commutative() {
        let names: Vec<&str> = subset.iter().map(|o| o.name()).collect();
        return Err(Error::NonCommutingSet(names.join(",")));
    }
    let label = if subset.is_empty() {
        "CI".to_string()
    } else {
        let names: Vec<&str> = subset.iter().map(|o| o.name()).collect();
        format!("phi({})", names.join(","))
    };
    Context::from_algebra(label, &algebra, seed)
}

#[derive(Debug, Clone, Copy)]
pub struct PosetOptions<T: Scalar = f64> {
    pub epsilon: T,
    pub max_contexts: usize,
    pub seed: u64,
}

impl<T: Scalar> Default for PosetOptions<T> {
    fn default() -> Self {
        Self { epsilon: T::default_epsilon(), max_contexts: 64, seed: 0 }
    }
}

/// Seed context given by generator matrices.
#[derive(Debug, Clone)]
pub struct SeedContext<T: Scalar = f64> {
    pub name: String,
    pub generators: Vec<ComplexMatrix<T>>,
}

impl<T: Scalar> SeedContext<T> {
    pub fn new(name: impl Into<String>, generators: Vec<ComplexMatrix<T>>) -> Self {
        Self { name: name.into(), generators }
    }
}

/// Combinatorial shadow of a context poset: the site plus, for every pair
/// w ⊆ v, the map sending each minimal projection of v to the minimal
/// projection of w above it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    site: Site,
    atoms: Vec<usize>,
    parents: Vec<Vec<Vec<u8>>>,
}

impl Skeleton {
    /// `parents[v][w]` must be given for every w ⊆ v and be empty otherwise.
    pub fn new(site: Site, atoms: Vec<usize>, parents: Vec<Vec<Vec<u8>>>) -> Result<Self> {
        let n = site.len();
        if atoms.len() != n || parents.len() != n || atoms.iter().any(|&k| k == 0 || k > 16) {
            return Err(Error::InvalidInput("skeleton tables have inconsistent sizes".into()));
        }
        for v in 0..n {
            for w in 0..n {
                let map = &parents[v][w];
                if site.leq(w, v) {
                    if map.len() != atoms[v] || map.iter().any(|&p| p as usize >= atoms[w]) {
                        return Err(Error::InvalidInput(format!("bad coarsening map {v} -> {w}")));
                    }
                    if v == w && map.iter().enumerate().any(|(i, &p)| p as usize != i) {
                        return Err(Error::InvalidInput("coarsening along v ⊆ v is not identity".into()));
                    }
                } else if !map.is_empty() {
                    return Err(Error::InvalidInput(format!("coarsening map given for {w} not below {v}")));
                }
            }
        }
        for v in 0..n {
            for w in site.down(v).iter() {
                for u in site.down(w).iter() {
                    for i in 0..atoms[v] {
                        let via = parents[w][u][parents[v][w][i] as usize];
                        if via != parents[v][u][i] {
                            return Err(Error::InvalidInput(format!("coarsening maps do not compose at {v}>{w}>{u}")));
                        }
                    }
                }
            }
            // every minimal projection of a subalgebra is hit
            for w in site.down(v).iter() {
                let hit = parents[v][w].iter().fold(0u32, |m, &p| m | 1 << p);
                if hit != full_mask(atoms[w]) {
                    return Err(Error::InvalidInput(format!("coarsening {v} -> {w} is not onto")));
                }
            }
        }
        Ok(Self { site, atoms, parents })
    }

    pub fn site(&self) -> &Site {
        &self.site
    }

    pub fn len(&self) -> usize {
        self.site.len()
    }

    pub fn is_empty(&self) -> bool {
        self.site.is_empty()
    }

    pub fn atoms(&self, v: usize) -> usize {
        self.atoms[v]
    }

    /// Mask of I in context v.
    pub fn full(&self, v: usize) -> Mask {
        full_mask(self.atoms[v])
    }

    /// Minimal projection of w above atom `i` of v (w ⊆ v).
    pub fn parent(&self, v: usize, w: usize, i: usize) -> usize {
        self.parents[v][w][i] as usize
    }

    /// δ(P)_w for P ∈ O(v) given as a mask, w ⊆ v.
    pub fn coarsen(&self, v: usize, w: usize, mask: Mask) -> Mask {
        debug_assert!(self.site.leq(w, v));
        let map = &self.parents[v][w];
        (0..self.atoms[v]).filter(|&i| mask >> i & 1 == 1).fold(0, |m, i| m | 1 << map[i])
    }

    /// A projection of w ⊆ v rewritten as a mask over the atoms of v.
    pub fn lift(&self, w: usize, v: usize, mask: Mask) -> Mask {
        debug_assert!(self.site.leq(w, v));
        let map = &self.parents[v][w];
        (0..self.atoms[v]).filter(|&i| mask >> map[i] & 1 == 1).fold(0, |m, i| m | 1 << i)
    }
}

pub fn full_mask(atoms: usize) -> Mask {
    if atoms >= 32 {
        Mask::MAX
    } else {
        (1 << atoms) - 1
    }
}

/// Context poset 𝒲: contexts, inclusion order, ♭, and the observables.
#[derive(Debug, Clone)]
pub struct ContextPoset<T: Scalar = f64> {
    dim: usize,
    eps: T,
    contexts: Vec<Context<T>>,
    observables: Vec<ClassicalObservable<T>>,
    psi: Vec<u32>,
    phi_table: Vec<Option<usize>>,
    skeleton: Skeleton,
}

impl<T: Scalar> ContextPoset<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> T {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn context(&self, v: usize) -> &Context<T> {
        &self.contexts[v]
    }

    pub fn contexts(&self) -> &[Context<T>] {
        &self.contexts
    }

    pub fn observables(&self) -> &[ClassicalObservable<T>] {
        &self.observables
    }

    pub fn site(&self) -> &Site {
        self.skeleton.site()
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn label(&self, v: usize) -> &str {
        self.site().label(v)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.site().index_of(label)
    }

    /// Id of a context equal to `c`, if present.
    pub fn find(&self, c: &Context<T>) -> Option<usize> {
        self.contexts.iter().position(|d| d.same_as(c, T::rank_tolerance()))
    }

    /// ψ(V) as a bitmask over observable indices.
    pub fn psi_mask(&self, v: usize) -> u32 {
        self.psi[v]
    }

    /// ψ(V) as observable names.
    pub fn psi(&self, v: usize) -> Vec<&str> {
        self.observables.iter().enumerate().filter(|(i, _)| self.psi[v] >> i & 1 == 1).map(|(_, o)| o.name()).collect()
    }

    /// φ(C) for C given as a bitmask; `None` if the exponentials do not commute.
    pub fn phi_mask(&self, subset: u32) -> Option<usize> {
        self.phi_table.get(subset as usize).copied().flatten()
    }

    pub fn flat(&self, v: usize) -> usize {
        self.site().flat(v)
    }

    pub fn u_flat(&self, v: usize) -> ContextSet {
        self.site().u_flat(v)
    }

    pub fn intersect(&self, a: usize, b: usize) -> Result<usize> {
        let c = intersect(&self.contexts[a], &self.contexts[b], T::rank_tolerance());
        self.find(&c).ok_or_else(|| Error::ClosureViolation("intersection missing from poset".into()))
    }

    /// Matrix of the projection of context v selected by `mask`.
    pub fn projection(&self, v: usize, mask: Mask) -> ComplexMatrix<T> {
        self.contexts[v].projection(mask)
    }

    /// tr(ρ e) for each minimal projection e of every context.
    pub fn atom_expectations(&self, rho: &DensityMatrix<T>) -> Vec<Vec<T>> {
        self.contexts.iter().map(|c| c.projections().iter().map(|p| rho.expectation(p.matrix())).collect()).collect()
    }

    /// Galois biconditional C ⊆ ψ(V) ⟺ φ(C) ⊆ V over every commuting C and
    /// every context V. Returns the first violation.
    pub fn check_galois(&self) -> std::result::Result<(), (u32, usize)> {
        for (c, phi_c) in self.phi_table.iter().enumerate() {
            let Some(phi_c) = *phi_c else { continue };
            let c = c as u32;
            for v in 0..self.len() {
                let lhs = c & !self.psi[v] == 0;
                let rhs = self.site().leq(phi_c, v);
                if lhs != rhs {
                    return Err((c, v));
                }
            }
        }
        Ok(())
    }
}

struct Builder<T: Scalar> {
    dim: usize,
    contexts: Vec<Context<T>>,
    max: usize,
    tol: T,
}

impl<T: Scalar> Builder<T> {
    fn insert(&mut self, c: Context<T>) -> Result<usize> {
        if let Some(i) = self.contexts.iter().position(|d| d.same_as(&c, self.tol)) {
            return Ok(i);
        }
        if self.contexts.len() >= self.max {
            return Err(size_limit("context count", self.max));
        }
        if c.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: c.dim() });
        }
        self.contexts.push(c);
        Ok(self.contexts.len() - 1)
    }
}

/// Smallest context set containing ℂ·I, the seeds and every φ(C), closed
/// under intersection (and hence under ♭).
pub fn build_poset<T: Scalar>(
    dim: usize,
    observables: Vec<ClassicalObservable<T>>,
    seeds: &[SeedContext<T>],
    options: &PosetOptions<T>,
) -> Result<ContextPoset<T>> {
    let eps = options.epsilon;
    if observables.len() > MAX_OBSERVABLES {
        return Err(size_limit("observable count", MAX_OBSERVABLES));
    }
    if options.max_contexts > crate::site::MAX_SITE {
        return Err(Error::InvalidInput(format!("max_contexts above {}", crate::site::MAX_SITE)));
    }
    for (i, o) in observables.iter().enumerate() {
        o.operator().check_dim(dim)?;
        if !o.operator().is_hermitian(eps) {
            return Err(Error::InvalidInput(format!("observable {} is not Hermitian", o.name())));
        }
        for p in &observables[..i] {
            if p.name() == o.name() {
                return Err(Error::InvalidInput(format!("duplicate observable name {}", o.name())));
            }
            if (p.operator() - o.operator()).norm() <= eps {
                return Err(Error::InvalidInput(format!("quantization not injective: {} and {}", p.name(), o.name())));
            }
        }
    }
    let mut b = Builder { dim, contexts: Vec::new(), max: options.max_contexts.max(1), tol: T::rank_tolerance() };
    b.insert(Context::scalars(dim))?;

    for s in seeds {
        for g in &s.generators {
            g.check_dim(dim)?;
        }
        let algebra = generated_algebra(dim, &s.generators)?;
        if !algebra.is_commutative() {
            return Err(Error::NonCommutingSet(s.name.clone()));
        }
        b.insert(Context::from_algebra(s.name.clone(), &algebra, options.seed)?)?;
    }

    let m = observables.len();
    let commute: Vec<Vec<bool>> = observables
        .iter()
        .map(|a| observables.iter().map(|c| a.unitary().commutator(c.unitary()).norm() <= T::rank_tolerance()).collect())
        .collect();
    let mut subsets: Vec<u32> = (0..1u32 << m).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    let mut phi_raw: Vec<Option<usize>> = vec![None; 1 << m];
    for &s in &subsets {
        let members: Vec<usize> = (0..m).filter(|i| s >> i & 1 == 1).collect();
        let pairwise = members.iter().all(|&i| members.iter().all(|&j| commute[i][j]));
        if !pairwise {
            continue;
        }
        let chosen: Vec<&ClassicalObservable<T>> = members.iter().map(|&i| &observables[i]).collect();
        phi_raw[s as usize] = Some(b.insert(phi(dim, &chosen, options.seed)?)?);
    }

    let mut fresh = 0;
    loop {
        let mut grew = false;
        let len = b.contexts.len();
        for i in 0..len {
            for j in (i + 1)..len {
                let mut c = intersect(&b.contexts[i], &b.contexts[j], b.tol);
                if !b.contexts.iter().any(|d| d.same_as(&c, b.tol)) {
                    c.label = format!("W{fresh}");
                    fresh += 1;
                    b.insert(c)?;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }

    // canonical ids: by number of atoms, then rounded projection entries
    let mut order: Vec<usize> = (0..b.contexts.len()).collect();
    let keys: Vec<_> = b
        .contexts
        .iter()
        .map(|c| (c.atoms(), c.projections().iter().map(|p| p.matrix().rounded_key()).collect::<Vec<_>>()))
        .collect();
    order.sort_by(|&x, &y| keys[x].cmp(&keys[y]));
    let mut new_id = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        new_id[old] = new;
    }
    let contexts: Vec<Context<T>> = order.iter().map(|&o| b.contexts[o].clone()).collect();
    let phi_table: Vec<Option<usize>> = phi_raw.iter().map(|p| p.map(|i| new_id[i])).collect();

    let mut labels: Vec<String> = contexts.iter().map(|c| c.label.clone()).collect();
    for i in 0..labels.len() {
        if labels[..i].contains(&labels[i]) {
            return Err(Error::InvalidInput(format!("duplicate context label {}", labels[i])));
        }
    }
    labels.shrink_to_fit();

    let psi: Vec<u32> = contexts
        .iter()
        .map(|c| {
            let alg = c.algebra();
            (0..m).filter(|&i| algebra_member(&alg, observables[i].unitary(), eps)).fold(0, |acc, i| acc | 1 << i)
        })
        .collect();
    let flat: Vec<usize> = psi
        .iter()
        .map(|&p| phi_table[p as usize].ok_or_else(|| Error::ClosureViolation("phi(psi(V)) missing from poset".into())))
        .collect::<Result<_>>()?;

    let n = contexts.len();
    let leq: Vec<Vec<bool>> =
        (0..n).map(|a| (0..n).map(|v| contexts[a].is_subalgebra_of(&contexts[v], b.tol)).collect()).collect();
    let site = Site::new(labels, &leq, flat)?;

    let atoms: Vec<usize> = contexts.iter().map(Context::atoms).collect();
    let mut parents = vec![vec![Vec::new(); n]; n];
    for v in 0..n {
        for w in site.down(v).iter() {
            parents[v][w] = contexts[v]
                .projections()
                .iter()
                .map(|e| {
                    contexts[w]
                        .parent_of(e.matrix(), b.tol)
                        .map(|p| p as u8)
                        .ok_or_else(|| Error::ClosureViolation("inclusion without coarsening".into()))
                })
                .collect::<Result<_>>()?;
        }
    }
    let skeleton = Skeleton::new(site, atoms, parents)?;
    let poset = ContextPoset { dim, eps, contexts, observables, psi, phi_table, skeleton };

    for i in 0..n {
        for j in (i + 1)..n {
            poset.intersect(i, j)?;
        }
    }
    if let Err((c, v)) = poset.check_galois() {
        return Err(Error::ClosureViolation(format!("Galois property fails for subset {c:#b} at {v}")));
    }
    Ok(poset)
}
