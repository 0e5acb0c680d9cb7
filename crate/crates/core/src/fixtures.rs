//! Small named posets and a seeded generator of random ones.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contexts::{build_poset, ClassicalObservable, ContextPoset, PosetOptions, SeedContext};
use crate::error::{Error, Result};
use crate::linops::{hermitian_eigen, pauli, ComplexMatrix, DensityMatrix};
use crate::scalar::Scalar;

/// Qubit with 𝒪 = {a ↦ σ_z} and the seed context generated by σ_x.
/// Poset: CI below phi(a) (the diagonal algebra) and Vx; ♭(Vx) = CI.
pub fn fixture_a<T: Scalar>() -> ContextPoset<T> {
    let eps = T::default_epsilon();
    let a = ClassicalObservable::new("a", pauli::z(), eps).expect("σ_z is Hermitian");
    let seeds = [SeedContext::new("Vx", vec![pauli::x()])];
    build_poset(2, vec![a], &seeds, &PosetOptions::default()).expect("fixture A builds")
}

/// Qutrit with 𝒪 = {a ↦ diag(1,2,3)} and the seed context generated by
/// diag(1,0,0). The seed sits strictly between CI and the ♭-fixed diagonal
/// algebra but is not itself ♭-fixed.
pub fn fixture_b<T: Scalar>() -> ContextPoset<T> {
    let eps = T::default_epsilon();
    let a = ClassicalObservable::new("a", ComplexMatrix::diagonal(&[T::lit(1.0), T::lit(2.0), T::lit(3.0)]), eps)
        .expect("diagonal operator is Hermitian");
    let seed = ComplexMatrix::diagonal(&[T::one(), T::zero(), T::zero()]);
    let seeds = [SeedContext::new("V1", vec![seed])];
    build_poset(3, vec![a], &seeds, &PosetOptions::default()).expect("fixture B builds")
}

/// Qutrit with 𝒪 = {a ↦ diag(1,2,3), b ↦ diag(0,0,1)} and two seeds:
/// "V1" generated by diag(1,0,0), and "Vp" generated by diag(0,0,1) with the
/// projection onto (e1 + e2)/√2. Here ♭(Vp) = phi(b), which is not the bottom.
pub fn fixture_c<T: Scalar>() -> ContextPoset<T> {
    let eps = T::default_epsilon();
    let (zero, one) = (T::zero(), T::one());
    let a = ClassicalObservable::new("a", ComplexMatrix::diagonal(&[T::lit(1.0), T::lit(2.0), T::lit(3.0)]), eps)
        .expect("diagonal operator is Hermitian");
    let b =
        ClassicalObservable::new("b", ComplexMatrix::diagonal(&[zero, zero, one]), eps).expect("diagonal operator is Hermitian");
    let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let plus = ComplexMatrix::outer(&[Complex::new(h, zero), Complex::new(h, zero), Complex::new(zero, zero)]);
    let seeds = [
        SeedContext::new("V1", vec![ComplexMatrix::diagonal(&[one, zero, zero])]),
        SeedContext::new("Vp", vec![plus, ComplexMatrix::diagonal(&[zero, zero, one])]),
    ];
    build_poset(3, vec![a, b], &seeds, &PosetOptions::default()).expect("fixture C builds")
}

/// Poset whose contexts are generated by the given orthogonal bases of rays
/// (no observables, so ♭ collapses everything to CI).
pub fn ray_poset<T: Scalar>(dim: usize, bases: &[Vec<Vec<f64>>], max_contexts: usize) -> Result<ContextPoset<T>> {
    let mut seeds = Vec::new();
    for (k, basis) in bases.iter().enumerate() {
        let mut gens = Vec::new();
        for ray in basis {
            if ray.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: ray.len() });
            }
            let norm = ray.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::InvalidInput("zero ray".into()));
            }
            let v: Vec<Complex<T>> = ray.iter().map(|&x| Complex::new(T::lit(x / norm), T::zero())).collect();
            gens.push(ComplexMatrix::outer(&v));
        }
        seeds.push(SeedContext::new(format!("B{k}"), gens));
    }
    let options = PosetOptions { max_contexts, ..PosetOptions::default() };
    build_poset(dim, Vec::new(), &seeds, &options)
}

/// Random unitary eigenbasis (columns) from a random Hermitian matrix.
fn random_basis<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Complex<T>>> {
    let mut h = ComplexMatrix::<T>::zeros(n);
    for i in 0..n {
        for j in i..n {
            let re = T::lit(rng.gen_range(-1.0..1.0));
            let im = if i == j { T::zero() } else { T::lit(rng.gen_range(-1.0..1.0)) };
            h[(i, j)] = Complex::new(re, im);
            h[(j, i)] = Complex::new(re, -im);
        }
    }
    let eig = hermitian_eigen(&h);
    (0..n).map(|k| eig.vector(k)).collect()
}

fn diagonal_in<T: Scalar>(basis: &[Vec<Complex<T>>], values: &[f64]) -> ComplexMatrix<T> {
    let n = basis.len();
    let mut m = ComplexMatrix::zeros(n);
    for (v, &lam) in basis.iter().zip(values) {
        m = &m + &ComplexMatrix::outer(v).scale_real(T::lit(lam));
    }
    m
}

/// Seeded random poset in dimension 2–4 with at most `max_contexts` contexts.
/// Observables are diagonal in one or two random bases with small integer
/// spectra (so some are degenerate); seeds are coarse-grainings of random bases.
pub fn random_fixture<T: Scalar>(seed: u64, max_contexts: usize) -> ContextPoset<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let dim = rng.gen_range(2..=4usize);
        let bases: Vec<_> = (0..3).map(|_| random_basis::<T>(&mut rng, dim)).collect();
        let n_obs = rng.gen_range(1..=3usize);
        let mut observables = Vec::new();
        for i in 0..n_obs {
            let basis = &bases[if rng.gen_bool(0.7) { 0 } else { 1 }];
            let values: Vec<f64> = (0..dim).map(|_| f64::from(rng.gen_range(0..3u8))).collect();
            let op = diagonal_in(basis, &values);
            observables.push(ClassicalObservable::new(format!("a{i}"), op, T::default_epsilon()).expect("Hermitian"));
        }
        let n_seeds = rng.gen_range(1..=2usize);
        let seeds: Vec<SeedContext<T>> = (0..n_seeds)
            .map(|k| {
                let basis = &bases[if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..3usize) }];
                let values: Vec<f64> = (0..dim).map(|_| f64::from(rng.gen_range(0..2u8))).collect();
                SeedContext::new(format!("S{k}"), vec![diagonal_in(basis, &values)])
            })
            .collect();
        let options = PosetOptions { max_contexts, ..PosetOptions::default() };
        if let Ok(p) = build_poset(dim, observables, &seeds, &options) {
            if p.len() > 2 {
                return p;
            }
        }
    }
}

/// Five deterministic states in dimension `dim`: the first and last basis
/// vectors, the uniform superposition, the maximally mixed state, and a
/// full-rank mixture of the first basis vector with a complex ray.
pub fn state_grid<T: Scalar>(dim: usize) -> Vec<(String, DensityMatrix<T>)> {
    let eps = T::rank_tolerance();
    let (zero, one) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
    let basis = |k: usize| -> Vec<Complex<T>> { (0..dim).map(|i| if i == k { one } else { zero }).collect() };
    let h = T::one() / T::from_usize(dim).expect("small dim").sqrt();
    let uniform: Vec<Complex<T>> = vec![Complex::new(h, T::zero()); dim];
    let ray: Vec<Complex<T>> = (0..dim).map(|i| Complex::new(T::lit(1.0 / (i + 1) as f64), T::lit(0.25 * i as f64))).collect();
    let norm = ray.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    let ray: Vec<Complex<T>> = ray.iter().map(|z| z / norm).collect();
    let mixed = &ComplexMatrix::outer(&basis(0)).scale_real(T::lit(0.6)) + &ComplexMatrix::outer(&ray).scale_real(T::lit(0.3));
    let mixed = &mixed + &ComplexMatrix::identity(dim).scale_real(T::lit(0.1) / T::from_usize(dim).expect("small dim"));
    vec![
        ("e0".to_string(), DensityMatrix::pure(&basis(0), eps).expect("unit vector")),
        (format!("e{}", dim - 1), DensityMatrix::pure(&basis(dim - 1), eps).expect("unit vector")),
        ("uniform".to_string(), DensityMatrix::pure(&uniform, eps).expect("unit vector")),
        ("mixed".to_string(), DensityMatrix::maximally_mixed(dim)),
        ("generic".to_string(), DensityMatrix::new(mixed, eps).expect("valid density matrix")),
    ]
}

/// The r values used with [`state_grid`].
pub const R_GRID: [f64; 5] = [0.0, 0.3, 0.5, 0.9, 1.0];
