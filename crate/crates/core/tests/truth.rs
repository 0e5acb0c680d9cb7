use std::collections::BTreeSet;

use num_complex::Complex;
use proptest::prelude::*;
use qtopos::contexts::ContextPoset;
use qtopos::fixtures::{fixture_a, fixture_b, fixture_c, random_fixture, state_grid, R_GRID};
use qtopos::linops::{DensityMatrix, Projection};
use qtopos::presheaves::{apply_j, is_sheaf};
use qtopos::site::ContextSet;
use qtopos::spectral::{enumerate_db, proposition_of, DbSubobject, Flavor};
use qtopos::truth::*;
use qtopos::Error;

const GUARD: usize = 1_000_000;
const FLAVORS: [Flavor; 2] = [Flavor::Presheaf, Flavor::Sheaf];

fn c(v: &[f64]) -> Vec<Complex<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|&x| Complex::new(x / n, 0.0)).collect()
}

fn pure(v: &[f64]) -> DensityMatrix {
    DensityMatrix::pure(&c(v), 1e-9).unwrap()
}

fn proj(v: &[f64]) -> Projection {
    Projection::from_vector(&c(v)).unwrap()
}

fn set(p: &ContextPoset, labels: &[&str]) -> ContextSet {
    labels.iter().map(|l| p.index_of(l).unwrap()).collect()
}

fn all_projections(p: &ContextPoset) -> Vec<Projection> {
    let mut out = Vec::new();
    for v in 0..p.len() {
        for m in 0..=p.skeleton().full(v) {
            out.push(Projection::new(p.projection(v, m), 1e-8).unwrap());
        }
    }
    out
}

#[test]
fn rho_r_examples_on_fixture_a() {
    let p = fixture_a::<f64>();
    let d = p.index_of("phi(a)").unwrap();
    let a = proposition_of(&p, &proj(&[1.0, 0.0]), Flavor::Sheaf).restrict_to(p.site(), d);
    let t = truth_rho_r(&p, &pure(&[1.0, 1.0]), 0.6, Flavor::Sheaf).unwrap();
    assert!(!t.contains(d, &a));
    let t = truth_rho_r(&p, &pure(&[1.0, 1.0]), 0.5, Flavor::Sheaf).unwrap();
    assert!(t.contains(d, &a), "knife edge at r = 0.5 accepted with slack");
    let t = truth_rho_r(&p, &pure(&[1.0, 0.0]), 1.0, Flavor::Sheaf).unwrap();
    assert!(t.contains(d, &a));
    for flavor in FLAVORS {
        let t0 = truth_rho_r(&p, &pure(&[0.3, 0.7]), 0.0, flavor).unwrap();
        for v in 0..p.len() {
            for a in enumerate_db(p.skeleton(), flavor, Some(v), GUARD).unwrap() {
                assert!(t0.contains(v, &a));
            }
        }
    }
    assert!(matches!(truth_rho_r(&p, &pure(&[1.0, 0.0]), 1.5, Flavor::Sheaf), Err(Error::InvalidInput(_))));
    assert!(matches!(truth_rho_r(&p, &pure(&[1.0, 0.0]), -0.1, Flavor::Sheaf), Err(Error::InvalidInput(_))));
}

#[test]
fn vector_examples_on_fixture_a() {
    let p = fixture_a::<f64>();
    let d = p.index_of("phi(a)").unwrap();
    let t = truth_vector(&p, &c(&[1.0, 0.0]), Flavor::Sheaf).unwrap();
    let one = proposition_of(&p, &proj(&[0.0, 1.0]), Flavor::Sheaf).restrict_to(p.site(), d);
    assert!(!t.contains(d, &one));
    for v in 0..p.len() {
        assert!(t.contains(v, &DbSubobject::full(p.skeleton(), Flavor::Sheaf, p.site().flat_preimage_down(v))));
    }
    let bad = vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)];
    assert!(matches!(truth_vector(&p, &bad, Flavor::Sheaf), Err(Error::InvalidInput(_))));
}

#[test]
fn vector_state_agrees_with_rho_one() {
    for p in [fixture_a::<f64>(), fixture_b(), fixture_c(), random_fixture(2, 12)] {
        let n = p.dim();
        let mut vectors = vec![c(&vec![1.0; n])];
        let mut first = vec![0.0; n];
        first[0] = 1.0;
        vectors.push(c(&first));
        vectors.push((0..n).map(|i| Complex::new(0.3 * i as f64 + 0.1, 0.2)).collect());
        for phi in vectors {
            let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let phi: Vec<Complex<f64>> = phi.iter().map(|z| z / norm).collect();
            let rho = DensityMatrix::pure(&phi, 1e-9).unwrap();
            for flavor in FLAVORS {
                let tv = truth_vector(&p, &phi, flavor).unwrap();
                let tr = truth_rho_r(&p, &rho, 1.0, flavor).unwrap();
                for v in 0..p.len() {
                    for a in enumerate_db(p.skeleton(), flavor, Some(v), GUARD).unwrap() {
                        assert_eq!(tv.contains(v, &a), tr.contains(v, &a));
                    }
                }
            }
        }
    }
}

#[test]
fn tau_examples() {
    let p = fixture_a::<f64>();
    let d = p.index_of("phi(a)").unwrap();
    let t = truth_vector(&p, &c(&[1.0, 1.0]), Flavor::Sheaf).unwrap();
    let s = proposition_of(&p, &proj(&[1.0, 0.0]), Flavor::Sheaf).restrict_to(p.site(), d);
    let tau = t.tau_char(p.skeleton(), GUARD).unwrap();
    assert_eq!(tau.apply(d, &s), set(&p, &["CI"]));
    let full = TruthObject::<f64>::full(p.site(), Flavor::Sheaf);
    assert_eq!(full.tau(d, &s), p.site().down(d));
    let empty = TruthObject::<f64>::empty(p.site(), Flavor::Sheaf);
    assert_eq!(empty.tau(d, &s), ContextSet::empty());
}

#[test]
fn nu_examples() {
    let p = fixture_a::<f64>();
    let d = p.index_of("phi(a)").unwrap();
    let t0 = truth_vector(&p, &c(&[1.0, 0.0]), Flavor::Sheaf).unwrap();
    let zero = proposition_of(&p, &proj(&[1.0, 0.0]), Flavor::Sheaf);
    let one = proposition_of(&p, &proj(&[0.0, 1.0]), Flavor::Sheaf);
    assert_eq!(nu(&zero, &t0).unwrap().downset(), p.site().all());
    assert_eq!(nu(&one, &t0).unwrap().at(d).members, set(&p, &["CI"]));
    let full = TruthObject::<f64>::full(p.site(), Flavor::Presheaf);
    assert_eq!(nu(&proposition_of(&p, &proj(&[0.2, 1.0]), Flavor::Presheaf), &full).unwrap().downset(), p.site().all());
    assert!(nu(&zero, &full).is_err(), "flavor mismatch");

    let plus = pure(&[1.0, 1.0]);
    let fast = nu_projection_fast(&p, &proj(&[1.0, 0.0]), &plus, 0.6, Flavor::Sheaf).unwrap();
    assert_eq!(fast.at(d).members, set(&p, &["CI"]));
    assert_eq!(nu_projection_fast(&p, &proj(&[1.0, 0.0]), &plus, 0.0, Flavor::Sheaf).unwrap().downset(), p.site().all());
    assert_eq!(nu_projection_fast(&p, &Projection::identity(2), &plus, 1.0, Flavor::Sheaf).unwrap().downset(), p.site().all());
}

#[test]
fn shortcut_matches_generic_nu() {
    for p in [fixture_a::<f64>(), fixture_b(), fixture_c(), random_fixture(4, 12)] {
        for (_, rho) in state_grid::<f64>(p.dim()) {
            for r in R_GRID {
                for flavor in FLAVORS {
                    let t = truth_rho_r(&p, &rho, r, flavor).unwrap();
                    for q in all_projections(&p) {
                        let generic = nu(&proposition_of(&p, &q, flavor), &t).unwrap();
                        assert_eq!(nu_projection_fast(&p, &q, &rho, r, flavor).unwrap(), generic);
                        if flavor == Flavor::Sheaf {
                            assert!(generic.is_j_closed(p.site()));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn rho_r_truth_sheaf_is_a_sheaf() {
    let p = fixture_a::<f64>();
    for (_, rho) in state_grid::<f64>(2) {
        for r in R_GRID {
            let t = truth_rho_r(&p, &rho, r, Flavor::Sheaf).unwrap();
            let as_presheaf = t.as_presheaf(p.skeleton(), GUARD).unwrap();
            assert!(as_presheaf.is_functorial(p.site()));
            assert!(is_sheaf(p.site(), &as_presheaf));
            assert!(t.is_restriction_closed(p.skeleton(), GUARD).unwrap());
        }
    }
}

#[test]
fn restriction_closure_of_generated_truth_objects() {
    for p in [fixture_b::<f64>(), fixture_c()] {
        for (_, rho) in state_grid::<f64>(p.dim()) {
            for r in R_GRID {
                for flavor in FLAVORS {
                    assert!(truth_rho_r(&p, &rho, r, flavor).unwrap().is_restriction_closed(p.skeleton(), GUARD).unwrap());
                }
            }
        }
    }
}

#[test]
fn filters_for_sharp_thresholds_and_vector_states() {
    for p in [fixture_a::<f64>(), fixture_c()] {
        for (_, rho) in state_grid::<f64>(p.dim()) {
            for r in [0.0, 1.0] {
                for flavor in FLAVORS {
                    let t = truth_rho_r(&p, &rho, r, flavor).unwrap();
                    assert_eq!(t.first_non_filter(p.skeleton(), GUARD).unwrap(), None);
                }
            }
        }
    }
}

#[test]
fn intermediate_thresholds_break_meet_closure() {
    // |+⟩ with r = 0.3 accepts both |0⟩⟨0| and |1⟩⟨1| at the diagonal
    // context but not their meet 0
    let p = fixture_a::<f64>();
    let d = p.index_of("phi(a)").unwrap();
    let t = truth_rho_r(&p, &pure(&[1.0, 1.0]), 0.3, Flavor::Sheaf).unwrap();
    let a = proposition_of(&p, &proj(&[1.0, 0.0]), Flavor::Sheaf).restrict_to(p.site(), d);
    let b = proposition_of(&p, &proj(&[0.0, 1.0]), Flavor::Sheaf).restrict_to(p.site(), d);
    assert!(t.contains(d, &a) && t.contains(d, &b));
    assert!(!t.contains(d, &a.meet(&b)));
    assert_eq!(t.first_non_filter(p.skeleton(), GUARD).unwrap(), Some(d));
    let materialized = t.materialize(p.skeleton(), GUARD).unwrap();
    assert!(matches!(materialized.tau_char(p.skeleton(), GUARD), Err(Error::NotFilter(v)) if v == d));
}

#[test]
fn monotone_in_r() {
    for p in [fixture_a::<f64>(), fixture_c()] {
        for (_, rho) in state_grid::<f64>(p.dim()) {
            for flavor in FLAVORS {
                for w in R_GRID.windows(2) {
                    let lo = truth_rho_r(&p, &rho, w[0], flavor).unwrap();
                    let hi = truth_rho_r(&p, &rho, w[1], flavor).unwrap();
                    for v in 0..p.len() {
                        for a in hi.materialize_stage(p.skeleton(), v, GUARD).unwrap() {
                            assert!(lo.contains(v, &a));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn materialized_round_trip() {
    let p = fixture_c::<f64>();
    let t = truth_rho_r(&p, &state_grid::<f64>(3)[4].1, 0.9, Flavor::Presheaf).unwrap();
    let m = t.materialize(p.skeleton(), GUARD).unwrap();
    for v in 0..p.len() {
        assert_eq!(m.materialize_stage(p.skeleton(), v, GUARD).unwrap(), t.materialize_stage(p.skeleton(), v, GUARD).unwrap());
    }
    let wrong_base: Vec<BTreeSet<DbSubobject>> =
        (0..p.len()).map(|_| [DbSubobject::full(p.skeleton(), Flavor::Presheaf, p.site().all())].into()).collect();
    assert!(TruthObject::<f64>::from_stages(p.site(), Flavor::Presheaf, wrong_base).is_err());
}

#[test]
fn f32_truth_values_match() {
    let p64 = fixture_c::<f64>();
    let p32 = fixture_c::<f32>();
    let rho64 = &state_grid::<f64>(3)[4].1;
    let rho32 = &state_grid::<f32>(3)[4].1;
    for q in all_projections(&p64) {
        let q32 = Projection::new(q.matrix().map_scalar::<f32>(), 1e-3).unwrap();
        for r in [0.0, 0.3, 0.9] {
            assert_eq!(
                nu_projection_fast(&p64, &q, rho64, r, Flavor::Sheaf).unwrap(),
                nu_projection_fast(&p32, &q32, rho32, r as f32, Flavor::Sheaf).unwrap()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nu_is_compatible_and_sheaf_values_are_closed(seed in 0u64..10_000, k in 0usize..5, r in 0.0f64..=1.0, idx in 0usize..1000) {
        let p = random_fixture::<f64>(seed, 12);
        let rho = &state_grid::<f64>(p.dim())[k].1;
        let projs = all_projections(&p);
        let q = &projs[idx % projs.len()];
        for flavor in FLAVORS {
            let t = truth_rho_r(&p, rho, r, flavor).unwrap();
            let value = nu(&proposition_of(&p, q, flavor), &t).unwrap();
            for v in 0..p.len() {
                let sieve = value.at(v).members;
                prop_assert!(p.site().is_down_closed(sieve));
                for w in p.site().down(v).iter() {
                    prop_assert_eq!(sieve.intersect(p.site().down(w)), value.at(w).members);
                }
                if flavor == Flavor::Sheaf {
                    prop_assert_eq!(apply_j(p.site(), v, sieve), sieve);
                }
            }
        }
    }
}
