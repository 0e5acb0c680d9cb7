//! Finite posets of contexts carrying an idempotent, deflationary, monotone
//! endomap ♭. Everything here is combinatorial; no matrices.

use std::fmt;

use crate::error::{size_limit, Error, Result};

/// Hard cap imposed by the bitset width.
pub const MAX_SITE: usize = 128;

/// Set of context ids, as a bitset.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextSet(u128);

impl ContextSet {
    pub const fn empty() -> Self {
        Self(0)
    }

    pub fn singleton(v: usize) -> Self {
        Self(1 << v)
    }

    pub fn from_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        ids.into_iter().fold(Self::empty(), |s, v| s.with(v))
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 128 && self.0 >> v & 1 == 1
    }

    #[must_use]
    pub fn with(self, v: usize) -> Self {
        Self(self.0 | 1 << v)
    }

    #[must_use]
    pub fn without(self, v: usize) -> Self {
        Self(self.0 & !(1 << v))
    }

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    #[must_use]
    pub fn intersect(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    #[must_use]
    pub fn minus(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl fmt::Debug for ContextSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ContextSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_ids(iter)
    }
}

/// Context poset with the quantization-induced endomap ♭.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    labels: Vec<String>,
    below: Vec<ContextSet>,
    above: Vec<ContextSet>,
    flat: Vec<usize>,
    order: Vec<usize>,
}

impl Site {
    /// `leq[a][b]` means context a is a subalgebra of context b.
    pub fn new(labels: Vec<String>, leq: &[Vec<bool>], flat: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_SITE {
            return Err(Error::InvalidInput(format!("site size {n} outside 1..={MAX_SITE}")));
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) || flat.len() != n {
            return Err(Error::InvalidInput("site tables have inconsistent sizes".into()));
        }
        let mut below = vec![ContextSet::empty(); n];
        let mut above = vec![ContextSet::empty(); n];
        for a in 0..n {
            for b in 0..n {
                if leq[a][b] {
                    below[b] = below[b].with(a);
                    above[a] = above[a].with(b);
                }
            }
        }
        for a in 0..n {
            if !leq[a][a] {
                return Err(Error::ClosureViolation(format!("order not reflexive at {a}")));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(Error::ClosureViolation(format!("order not antisymmetric: {a}, {b}")));
                }
                if leq[a][b] && !below[a].is_subset(below[b]) {
                    return Err(Error::ClosureViolation(format!("order not transitive at {a} <= {b}")));
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (below[v].len(), v));
        let site = Self { labels, below, above, flat, order };
        site.check_flat()?;
        Ok(site)
    }

    fn check_flat(&self) -> Result<()> {
        let n = self.len();
        if (0..n).filter(|&v| self.below[v].len() == 1).count() != 1 || !(0..n).any(|v| self.above[v].len() == n) {
            return Err(Error::ClosureViolation("poset has no unique bottom".into()));
        }
        for v in 0..n {
            let f = self.flat[v];
            if f >= n || !self.leq(f, v) {
                return Err(Error::ClosureViolation(format!("flat not deflationary at {v}")));
            }
            if self.flat[f] != f {
                return Err(Error::ClosureViolation(format!("flat not idempotent at {v}")));
            }
            for w in self.below[v].iter() {
                if !self.leq(self.flat[w], f) {
                    return Err(Error::ClosureViolation(format!("flat not monotone at {w} <= {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn all(&self) -> ContextSet {
        ContextSet::from_ids(0..self.len())
    }

    /// a ⊆ b as algebras.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b].contains(a)
    }

    /// ↓v, including v.
    pub fn down(&self, v: usize) -> ContextSet {
        self.below[v]
    }

    /// ↑v, including v.
    pub fn up(&self, v: usize) -> ContextSet {
        self.above[v]
    }

    pub fn flat(&self, v: usize) -> usize {
        self.flat[v]
    }

    pub fn flat_map(&self) -> &[usize] {
        &self.flat
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        self.flat[v] == v
    }

    pub fn fixed_points(&self) -> ContextSet {
        (0..self.len()).filter(|&v| self.is_fixed(v)).collect()
    }

    pub fn flat_is_identity(&self) -> bool {
        (0..self.len()).all(|v| self.is_fixed(v))
    }

    pub fn bottom(&self) -> usize {
        self.order[0]
    }

    /// Contexts in a bottom-up linear extension of the order.
    pub fn bottom_up(&self) -> &[usize] {
        &self.order
    }

    pub fn maximal(&self) -> ContextSet {
        (0..self.len()).filter(|&v| self.above[v].len() == 1).collect()
    }

    /// U♭(v) = {w : v ⊆ ♭(w)}.
    pub fn u_flat(&self, v: usize) -> ContextSet {
        (0..self.len()).filter(|&w| self.leq(v, self.flat[w])).collect()
    }

    /// {w : ♭(w) ⊆ v}; the support of ♭*(Q↓v).
    pub fn flat_preimage_down(&self, v: usize) -> ContextSet {
        (0..self.len()).filter(|&w| self.leq(self.flat[w], v)).collect()
    }

    /// Hasse cover pairs (lower, upper).
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.len() {
            for a in self.below[b].without(b).iter() {
                let between = self.above[a].intersect(self.below[b]).without(a).without(b);
                if between.is_empty() {
                    out.push((a, b));
                }
            }
        }
        out.sort();
        out
    }

    pub fn is_down_closed(&self, s: ContextSet) -> bool {
        s.iter().all(|v| self.below[v].is_subset(s))
    }

    /// All down-closed subsets of `within` (itself assumed down-closed).
    pub fn downsets_within(&self, within: ContextSet, guard: usize) -> Result<Vec<ContextSet>> {
        let elems: Vec<usize> = self.order.iter().copied().filter(|&v| within.contains(v)).collect();
        let mut out = Vec::new();
        self.downsets_rec(&elems, 0, ContextSet::empty(), guard, &mut out)?;
        out.sort();
        Ok(out)
    }

    fn downsets_rec(&self, elems: &[usize], i: usize, cur: ContextSet, guard: usize, out: &mut Vec<ContextSet>) -> Result<()> {
        if i == elems.len() {
            if out.len() >= guard {
                return Err(size_limit("down-set enumeration", guard));
            }
            out.push(cur);
            return Ok(());
        }
        let v = elems[i];
        self.downsets_rec(elems, i + 1, cur, guard, out)?;
        if self.below[v].without(v).is_subset(cur) {
            self.downsets_rec(elems, i + 1, cur.with(v), guard, out)?;
        }
        Ok(())
    }

    /// Sieves on v: down-closed subsets of ↓v.
    pub fn sieves(&self, v: usize, guard: usize) -> Result<Vec<ContextSet>> {
        self.downsets_within(self.below[v], guard)
    }

    /// Labels of a set in id order.
    pub fn names(&self, s: ContextSet) -> Vec<String> {
        s.iter().map(|v| self.labels[v].clone()).collect()
    }
}
