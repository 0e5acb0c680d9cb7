use num_complex::Complex;
use proptest::prelude::*;
use qtopos::linops::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn proj(m: ComplexMatrix) -> Projection {
    Projection::new(m, EPS).unwrap()
}

fn ket0() -> Projection {
    proj(ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]))
}

fn ket_plus() -> Projection {
    proj(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]))
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    ComplexMatrix::from_row_major(n, data).unwrap()
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n);
    (&m + &m.adjoint()).scale_real(0.5)
}

#[test]
fn projection_checks() {
    assert!(is_projection(&ComplexMatrix::<f64>::identity(2), EPS));
    assert!(!is_projection(&pauli::x::<f64>(), EPS));
    let half = (&ComplexMatrix::identity(2) + &pauli::x()).scale_real(0.5);
    assert!(is_projection(&half, EPS));
}

#[test]
fn loewner_examples() {
    let id = Projection::identity(2);
    assert!(loewner_leq(&ket0(), &id, EPS).unwrap());
    assert!(!loewner_leq(&id, &ket0(), EPS).unwrap());
    // ‖QP − P‖ = 1/√2 here, far above tolerance
    let p = ket_plus();
    let q = ket0();
    let gap = (&(q.matrix() * p.matrix()) - p.matrix()).norm();
    assert!((gap - 0.5f64.sqrt()).abs() < 1e-12);
    assert!(!loewner_leq(&p, &q, EPS).unwrap());
    assert!(loewner_leq(&ket0(), &Projection::identity(3), EPS).is_err());
}

#[test]
fn commutant_examples() {
    let z = commutant(2, &[pauli::z::<f64>()]).unwrap();
    assert_eq!(z.len(), 2);
    assert!(z.distance(&pauli::z()) < EPS && z.distance(&ComplexMatrix::identity(2)) < EPS);
    assert_eq!(commutant::<f64>(2, &[]).unwrap().len(), 4);
    assert_eq!(commutant(2, &[pauli::x::<f64>(), pauli::z()]).unwrap().len(), 1);
    for b in z.basis() {
        assert!(b.commutator(&pauli::z()).norm() < EPS);
    }
}

#[test]
fn generated_algebra_examples() {
    let a = generated_algebra(2, &[pauli::z::<f64>()]).unwrap();
    assert_eq!(a.len(), 2);
    assert!(a.is_commutative());
    assert!(a.distance(&pauli::z()) < EPS);
    let triv = generated_algebra::<f64>(2, &[]).unwrap();
    assert_eq!(triv.len(), 1);
    let full = generated_algebra(2, &[pauli::x::<f64>(), pauli::z()]).unwrap();
    assert_eq!(full.len(), 4);
    assert!(!full.is_commutative());
}

#[test]
fn generated_algebra_matches_bicommutant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..24 {
        let n = 2 + trial % 3;
        // mix of commuting families (shared eigenbasis) and generic sets
        let gens: Vec<ComplexMatrix> = if trial % 2 == 0 {
            let u = random_hermitian(&mut rng, n);
            let eig = hermitian_eigen(&u);
            (0..1 + trial % 2)
                .map(|_| {
                    let mut d = ComplexMatrix::zeros(n);
                    for k in 0..n {
                        let lam = f64::from(rng.gen_range(0..2u8));
                        d = &d + &ComplexMatrix::outer(&eig.vector(k)).scale_real(lam);
                    }
                    d
                })
                .collect()
        } else {
            (0..1 + trial % 3).map(|_| random_matrix(&mut rng, n)).collect()
        };
        let direct = generated_algebra(n, &gens).unwrap();
        let first = commutant(n, &gens).unwrap();
        let bicomm = commutant(n, first.basis()).unwrap();
        assert!(direct.same_span(&bicomm, 1e-6), "trial {trial}");
        let again = generated_algebra(n, bicomm.basis()).unwrap();
        assert!(again.same_span(&direct, 1e-6), "trial {trial}");
    }
}

#[test]
fn minimal_projection_examples() {
    let diag = generated_algebra(2, &[pauli::z()]).unwrap();
    let ps = minimal_projections(&diag).unwrap();
    assert_eq!(ps.len(), 2);
    let one = proj(ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]));
    assert!(ps.iter().any(|p| (p.matrix() - ket0().matrix()).norm() < 1e-9));
    assert!(ps.iter().any(|p| (p.matrix() - one.matrix()).norm() < 1e-9));

    let triv = generated_algebra::<f64>(2, &[]).unwrap();
    let ps = minimal_projections(&triv).unwrap();
    assert_eq!(ps.len(), 1);
    assert!((ps[0].matrix() - &ComplexMatrix::identity(2)).norm() < 1e-9);

    let vx = generated_algebra(2, &[pauli::x()]).unwrap();
    let ps = minimal_projections(&vx).unwrap();
    let plus = (&ComplexMatrix::identity(2) + &pauli::x()).scale_real(0.5);
    let minus = (&ComplexMatrix::identity(2) - &pauli::x()).scale_real(0.5);
    assert!(ps.iter().any(|p| (p.matrix() - &plus).norm() < 1e-9));
    assert!(ps.iter().any(|p| (p.matrix() - &minus).norm() < 1e-9));

    let full = generated_algebra(2, &[pauli::x::<f64>(), pauli::z()]).unwrap();
    assert_eq!(minimal_projections(&full).unwrap_err(), qtopos::Error::NotCommutative);
}

#[test]
fn minimal_projections_partition_and_seed_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..12 {
        let n = 2 + trial % 3;
        let h = random_hermitian(&mut rng, n);
        let eig = hermitian_eigen(&h);
        // coarse-grain the eigenbasis into blocks of size 1 or 2
        let mut d = ComplexMatrix::zeros(n);
        for k in 0..n {
            d = &d + &ComplexMatrix::outer(&eig.vector(k)).scale_real((k / 2) as f64);
        }
        let a = generated_algebra(n, &[d]).unwrap();
        let base = minimal_projections_seeded(&a, 0).unwrap();
        assert_eq!(base.len(), a.len());
        let mut sum = ComplexMatrix::zeros(n);
        for (i, p) in base.iter().enumerate() {
            sum = &sum + p.matrix();
            for q in &base[i + 1..] {
                assert!((p.matrix() * q.matrix()).norm() < 1e-8);
            }
        }
        assert!((&sum - &ComplexMatrix::identity(n)).norm() < 1e-8);
        for seed in [1u64, 99, 12345] {
            let other = minimal_projections_seeded(&a, seed).unwrap();
            for (p, q) in base.iter().zip(&other) {
                assert!((p.matrix() - q.matrix()).norm() < 1e-8, "seed {seed}");
            }
        }
    }
}

#[test]
fn exp_examples() {
    let z = matrix_exp_i(&ComplexMatrix::<f64>::zeros(2), EPS).unwrap();
    assert!((&z - &ComplexMatrix::identity(2)).norm() < 1e-12);
    let pz = matrix_exp_i(&pauli::z().scale_real(std::f64::consts::PI), EPS).unwrap();
    assert!((&pz + &ComplexMatrix::identity(2)).norm() < 1e-12);
    let u = matrix_exp_i(&pauli::z(), EPS).unwrap();
    assert!((u[(0, 0)] - c(1f64.cos(), 1f64.sin())).norm() < 1e-12);
    assert!((u[(1, 1)] - c(1f64.cos(), -1f64.sin())).norm() < 1e-12);
    assert!(matrix_exp_i(&pauli::y().scale(c(0.0, 1.0)), EPS).is_err());
}

#[test]
fn membership_examples() {
    let diag = generated_algebra(2, &[pauli::z()]).unwrap();
    let u = matrix_exp_i(&pauli::z(), EPS).unwrap();
    assert!(algebra_member(&diag, &u, EPS));
    let scalars = generated_algebra::<f64>(2, &[]).unwrap();
    assert!(!algebra_member(&scalars, &pauli::z(), EPS));
    for a in [&diag, &scalars] {
        assert!(algebra_member(a, &ComplexMatrix::identity(2), EPS));
    }
}

#[test]
fn density_matrix_validation() {
    let rho = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)], EPS).unwrap();
    assert!((rho.expectation(ket0().matrix()) - 1.0).abs() < 1e-12);
    assert!(DensityMatrix::pure(&[c(1.0, 0.0), c(1.0, 0.0)], EPS).is_err());
    assert!(DensityMatrix::new(pauli::z(), EPS).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::<f64>::identity(2).scale_real(0.5), EPS).is_ok());
}

#[test]
fn single_precision_path() {
    let a = generated_algebra::<f32>(2, &[pauli::x()]).unwrap();
    let ps = minimal_projections(&a).unwrap();
    assert_eq!(ps.len(), 2);
    let plus = (&ComplexMatrix::<f32>::identity(2) + &pauli::x()).scale_real(0.5);
    assert!(ps.iter().any(|p| (p.matrix() - &plus).norm() < 1e-4));
}

proptest! {
    #[test]
    fn eigen_reconstructs(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, n);
        let eig = hermitian_eigen(&h);
        let mut back = ComplexMatrix::zeros(n);
        for k in 0..n {
            back = &back + &ComplexMatrix::outer(&eig.vector(k)).scale_real(eig.values[k]);
        }
        prop_assert!((&back - &h).norm() < 1e-9);
        let vtv = &eig.vectors.adjoint() * &eig.vectors;
        prop_assert!((&vtv - &ComplexMatrix::identity(n)).norm() < 1e-9);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn exp_is_unitary(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, n);
        let u = matrix_exp_i(&h, EPS).unwrap();
        let uu = &u * &u.adjoint();
        prop_assert!((&uu - &ComplexMatrix::identity(n)).norm() < 1e-9);
    }
}
