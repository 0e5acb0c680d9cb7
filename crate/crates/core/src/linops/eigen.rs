use num_complex::Complex;

use super::ComplexMatrix;
use crate::scalar::Scalar;

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Scalar = f64> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Scalar> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Cyclic complex Jacobi rotations. Only the Hermitian part of `h` is used.
pub fn hermitian_eigen<T: Scalar>(h: &ComplexMatrix<T>) -> HermitianEigen<T> {
    let n = h.dim();
    let half = T::lit(0.5);
    let mut a = (h + &h.adjoint()).scale_real(half);
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.norm().max(T::min_positive_value());
    let tiny = T::epsilon() * scale * T::lit(1e-3);

    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tiny {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let gabs = g.norm();
                if gabs <= tiny {
                    continue;
                }
                let e = g.unscale(gabs);
                let tau = (a[(q, q)].re - a[(p, p)].re) / (T::lit(2.0) * gabs);
                let t = tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt());
                let t = if tau == T::zero() { T::one() } else { t };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let cz = Complex::new(c, T::zero());
                let se = e.scale(s);
                let se_conj = se.conj();
                // columns: A <- A J with J = [[c, s e], [-s ē, c]]
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cz - akq * se_conj;
                    a[(k, q)] = akp * se + akq * cz;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cz - vkq * se_conj;
                    v[(k, q)] = vkp * se + vkq * cz;
                }
                // rows: A <- J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cz - aqk * se;
                    a[(q, k)] = apk * se_conj + aqk * cz;
                }
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    HermitianEigen { values, vectors }
}
