//! Dense complex linear algebra at small dimension: projections, Löwner
//! order, commutants, generated *-algebras and their minimal projections.

mod algebra;
mod eigen;
mod matrix;

pub use algebra::{algebra_member, commutant, generated_algebra, minimal_projections, minimal_projections_seeded, AlgebraBasis};
pub use eigen::{hermitian_eigen, HermitianEigen};
pub use matrix::{pauli, ComplexMatrix, MAX_DIM};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// True iff `m` is Hermitian and idempotent within `eps`.
pub fn is_projection<T: Scalar>(m: &ComplexMatrix<T>, eps: T) -> bool {
    m.is_hermitian(eps) && (&(m * m) - m).norm() <= eps
}

/// Orthogonal projection, checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T: Scalar = f64> {
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> Projection<T> {
    pub fn new(matrix: ComplexMatrix<T>, eps: T) -> Result<Self> {
        if is_projection(&matrix, eps) {
            Ok(Self { matrix })
        } else {
            Err(Error::InvalidInput("matrix is not a projection".into()))
        }
    }

    /// Skips validation; callers guarantee the projection property.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim) }
    }

    /// |v⟩⟨v| for a vector that is normalized here.
    pub fn from_vector(v: &[Complex<T>]) -> Result<Self> {
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm <= T::rank_tolerance() {
            return Err(Error::InvalidInput("zero vector".into()));
        }
        let u: Vec<_> = v.iter().map(|z| z.unscale(norm)).collect();
        Ok(Self { matrix: ComplexMatrix::outer(&u) })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round().to_usize().unwrap_or(0)
    }
}

/// P ≼ Q iff QP = P within `eps` (range inclusion).
pub fn loewner_leq<T: Scalar>(p: &Projection<T>, q: &Projection<T>, eps: T) -> Result<bool> {
    p.matrix.check_dim(q.dim())?;
    Ok((&(q.matrix() * p.matrix()) - p.matrix()).norm() <= eps)
}

/// Positive semidefinite, Hermitian, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar = f64> {
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(matrix: ComplexMatrix<T>, eps: T) -> Result<Self> {
        if !matrix.is_hermitian(eps) {
            return Err(Error::InvalidInput("density matrix is not Hermitian".into()));
        }
        if (matrix.trace().re - T::one()).abs() > eps.max(T::rank_tolerance()) {
            return Err(Error::InvalidInput("density matrix trace is not 1".into()));
        }
        let eig = hermitian_eigen(&matrix);
        if eig.values.iter().any(|&l| l < -eps.max(T::rank_tolerance())) {
            return Err(Error::InvalidInput("density matrix has a negative eigenvalue".into()));
        }
        Ok(Self { matrix })
    }

    /// Pure state |φ⟩⟨φ|; `phi` must be a unit vector.
    pub fn pure(phi: &[Complex<T>], eps: T) -> Result<Self> {
        let norm = phi.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if (norm - T::one()).abs() > eps.max(T::rank_tolerance()) {
            return Err(Error::InvalidInput("state vector is not normalized".into()));
        }
        Ok(Self { matrix: ComplexMatrix::outer(phi) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(T::one() / T::lit(dim as f64)) }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Real part of tr(ρ M).
    pub fn expectation(&self, m: &ComplexMatrix<T>) -> T {
        (&self.matrix * m).trace().re
    }
}

/// e^{iH} through the spectral decomposition of a Hermitian `h`.
pub fn matrix_exp_i<T: Scalar>(h: &ComplexMatrix<T>, eps: T) -> Result<ComplexMatrix<T>> {
    if !h.is_hermitian(eps) {
        return Err(Error::InvalidInput("exponent is not Hermitian".into()));
    }
    let eig = hermitian_eigen(h);
    let n = h.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let phase = Complex::new(lambda.cos(), lambda.sin());
        let v = eig.vector(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = out[(i, j)] + phase * v[i] * v[j].conj();
            }
        }
    }
    Ok(out)
}
