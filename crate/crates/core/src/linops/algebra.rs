use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{hermitian_eigen, ComplexMatrix, Projection};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Orthonormal (Hilbert-Schmidt) basis of a unital *-subalgebra of M_n.
#[derive(Debug, Clone)]
pub struct AlgebraBasis<T: Scalar = f64> {
    dim: usize,
    basis: Vec<ComplexMatrix<T>>,
    commutative: bool,
}

impl<T: Scalar> AlgebraBasis<T> {
    /// Wraps an already orthonormal spanning list.
    fn from_orthonormal(dim: usize, basis: Vec<ComplexMatrix<T>>) -> Self {
        let commutative =
            basis.iter().enumerate().all(|(i, a)| basis[i + 1..].iter().all(|b| a.commutator(b).norm() <= T::rank_tolerance()));
        Self { dim, basis, commutative }
    }

    /// Span of a list of pairwise orthogonal projections summing to identity.
    pub fn from_partition(dim: usize, projections: &[Projection<T>]) -> Self {
        let basis = projections.iter().map(|p| p.matrix().scale_real(T::one() / p.matrix().norm())).collect();
        Self { dim, basis, commutative: true }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the algebra as a vector space.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[ComplexMatrix<T>] {
        &self.basis
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    /// Frobenius distance from `m` to the span.
    pub fn distance(&self, m: &ComplexMatrix<T>) -> T {
        residual(&self.basis, m).norm()
    }

    /// Same subspace, judged by mutual containment of bases.
    pub fn same_span(&self, other: &Self, eps: T) -> bool {
        self.len() == other.len()
            && self.basis.iter().all(|b| other.distance(b) <= eps)
            && other.basis.iter().all(|b| self.distance(b) <= eps)
    }
}

fn residual<T: Scalar>(basis: &[ComplexMatrix<T>], m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut r = m.clone();
    // two passes of modified Gram-Schmidt keep the residual orthogonal
    for _ in 0..2 {
        for b in basis {
            let c = b.inner(&r);
            r.sub_scaled(c, b);
        }
    }
    r
}

/// Appends the normalized residual of `m` if it is not already in the span.
fn try_extend<T: Scalar>(basis: &mut Vec<ComplexMatrix<T>>, m: &ComplexMatrix<T>) -> bool {
    let scale = T::one().max(m.norm());
    let r = residual(basis, m);
    let nr = r.norm();
    if nr > T::rank_tolerance() * scale {
        basis.push(r.scale_real(T::one() / nr));
        true
    } else {
        false
    }
}

/// Orthonormal basis of {X : XA = AX and XA† = A†X for all A ∈ S}.
pub fn commutant<T: Scalar>(dim: usize, s: &[ComplexMatrix<T>]) -> Result<AlgebraBasis<T>> {
    for a in s {
        a.check_dim(dim)?;
    }
    let n = dim;
    let unknowns = n * n;
    let zero = Complex::new(T::zero(), T::zero());
    let mut rows: Vec<Vec<Complex<T>>> = Vec::with_capacity(2 * s.len() * unknowns);
    let mut scale = T::one();
    for a in s {
        let adj = a.adjoint();
        for m in [a, &adj] {
            for i in 0..n {
                for j in 0..n {
                    let mut row = vec![zero; unknowns];
                    for k in 0..n {
                        row[i * n + k] = row[i * n + k] + m[(k, j)];
                        row[k * n + j] = row[k * n + j] - m[(i, k)];
                    }
                    rows.push(row);
                }
            }
            scale = scale.max(m.norm());
        }
    }
    let null = nullspace(rows, unknowns, T::rank_tolerance() * scale);
    let mut basis = Vec::new();
    for v in null {
        let m = ComplexMatrix::from_row_major(n, v)?;
        try_extend(&mut basis, &m);
    }
    Ok(AlgebraBasis::from_orthonormal(n, basis))
}

/// Reduced row echelon form with partial pivoting; returns one nullspace
/// vector per free column, in column order.
fn nullspace<T: Scalar>(mut rows: Vec<Vec<Complex<T>>>, cols: usize, tol: T) -> Vec<Vec<Complex<T>>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut free = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let best = (r..rows.len()).max_by(|&x, &y| rows[x][c].norm().partial_cmp(&rows[y][c].norm()).expect("finite entries"));
        match best {
            Some(p) if rows[p][c].norm() > tol => {
                rows.swap(r, p);
                let inv = Complex::new(T::one(), T::zero()) / rows[r][c];
                for x in rows[r].iter_mut() {
                    *x = *x * inv;
                }
                let pivot_row = rows[r].clone();
                for (i, row) in rows.iter_mut().enumerate() {
                    if i != r {
                        let f = row[c];
                        if f != zero {
                            for (x, y) in row.iter_mut().zip(&pivot_row) {
                                *x = *x - f * y;
                            }
                        }
                    }
                }
                pivots.push((r, c));
                r += 1;
            }
            _ => free.push(c),
        }
    }
    free.iter()
        .map(|&f| {
            let mut v = vec![zero; cols];
            v[f] = Complex::new(T::one(), T::zero());
            for &(row, col) in &pivots {
                v[col] = -rows[row][f];
            }
            v
        })
        .collect()
}

/// Unital *-algebra generated by `s`, by closing span{I, S, S†} under products.
/// Coincides with the bicommutant S″ in finite dimension.
pub fn generated_algebra<T: Scalar>(dim: usize, s: &[ComplexMatrix<T>]) -> Result<AlgebraBasis<T>> {
    for a in s {
        a.check_dim(dim)?;
    }
    let mut basis = Vec::new();
    try_extend(&mut basis, &ComplexMatrix::identity(dim));
    for a in s {
        try_extend(&mut basis, a);
        try_extend(&mut basis, &a.adjoint());
    }
    loop {
        let mut grew = false;
        let len = basis.len();
        for i in 0..len {
            for j in 0..len {
                let prod = &basis[i] * &basis[j];
                grew |= try_extend(&mut basis, &prod);
            }
        }
        if !grew {
            break;
        }
    }
    Ok(AlgebraBasis::from_orthonormal(dim, basis))
}

/// True iff `m` lies within Frobenius distance `eps` of span(A).
pub fn algebra_member<T: Scalar>(a: &AlgebraBasis<T>, m: &ComplexMatrix<T>, eps: T) -> bool {
    m.dim() == a.dim() && a.distance(m) <= eps
}

/// Minimal projections of a commutative algebra in canonical order.
pub fn minimal_projections<T: Scalar>(a: &AlgebraBasis<T>) -> Result<Vec<Projection<T>>> {
    minimal_projections_seeded(a, 0)
}

/// As [`minimal_projections`], drawing the generic element from `seed`.
/// The result does not depend on the seed.
pub fn minimal_projections_seeded<T: Scalar>(a: &AlgebraBasis<T>, seed: u64) -> Result<Vec<Projection<T>>> {
    if !a.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let n = a.dim();
    let half = T::lit(0.5);
    let mut hermitian = Vec::new();
    for b in a.basis() {
        let adj = b.adjoint();
        let re = (b + &adj).scale_real(half);
        let im = (b - &adj).scale(Complex::new(T::zero(), -half));
        for h in [re, im] {
            if h.norm() > T::rank_tolerance() {
                hermitian.push(h);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..6 {
        let mut h = ComplexMatrix::zeros(n);
        for hk in &hermitian {
            let c: f64 = rng.gen_range(-1.0..1.0);
            h = &h + &hk.scale_real(T::lit(c));
        }
        if let Some(mut ps) = spectral_split(a, &h) {
            ps.sort_by_key(|p| p.matrix().rounded_key());
            return Ok(ps);
        }
    }
    Err(Error::InvalidInput("could not separate the minimal projections".into()))
}

/// Groups the eigenvectors of `h` into spectral projections and checks that
/// they are exactly the minimal projections of `a`.
fn spectral_split<T: Scalar>(a: &AlgebraBasis<T>, h: &ComplexMatrix<T>) -> Option<Vec<Projection<T>>> {
    let n = a.dim();
    let eig = hermitian_eigen(h);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.last_mut() {
            Some(g) if eig.values[k] - eig.values[*g.last().unwrap()] < T::eigen_gap() => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    if groups.len() != a.len() {
        return None;
    }
    let tol = T::rank_tolerance();
    let mut out = Vec::with_capacity(groups.len());
    for g in groups {
        let mut p = ComplexMatrix::zeros(n);
        for &k in &g {
            p = &p + &ComplexMatrix::outer(&eig.vector(k));
        }
        if a.distance(&p) > tol * T::lit(10.0) {
            return None;
        }
        let tr = p.trace().re;
        for b in a.basis() {
            let corner = &(&p * b) * &p;
            let c = (&p * b).trace() / Complex::new(tr, T::zero());
            if (&corner - &p.scale(c)).norm() > tol * T::lit(10.0) {
                return None;
            }
        }
        out.push(Projection::new_unchecked(p));
    }
    Some(out)
}
