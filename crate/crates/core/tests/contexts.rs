use qtopos::contexts::*;
use qtopos::fixtures::{fixture_a, fixture_b, fixture_c, random_fixture};
use qtopos::linops::{loewner_leq, pauli, ComplexMatrix, Projection};
use qtopos::site::ContextSet;
use qtopos::Error;

const EPS: f64 = 1e-9;

fn ids(p: &ContextPoset, labels: &[&str]) -> ContextSet {
    labels.iter().map(|l| p.index_of(l).unwrap()).collect()
}

#[test]
fn fixture_a_shape() {
    let p = fixture_a::<f64>();
    assert_eq!(p.len(), 3);
    let (ci, d, vx) = (p.index_of("CI").unwrap(), p.index_of("phi(a)").unwrap(), p.index_of("Vx").unwrap());
    assert_eq!(ci, 0);
    assert!(p.site().leq(ci, d) && p.site().leq(ci, vx));
    assert!(!p.site().leq(d, vx) && !p.site().leq(vx, d));
    assert_eq!((p.flat(ci), p.flat(d), p.flat(vx)), (ci, d, ci));
    assert_eq!(p.psi(d), vec!["a"]);
    assert!(p.psi(ci).is_empty() && p.psi(vx).is_empty());
    assert_eq!(p.u_flat(ci), ids(&p, &["CI", "phi(a)", "Vx"]));
    assert_eq!(p.u_flat(d), ids(&p, &["phi(a)"]));
    assert!(p.u_flat(vx).is_empty());
    assert_eq!(p.intersect(d, vx).unwrap(), ci);
    assert_eq!(p.intersect(d, d).unwrap(), d);
    assert_eq!(p.intersect(vx, ci).unwrap(), ci);
}

#[test]
fn phi_examples() {
    let a = ClassicalObservable::new("a", pauli::z::<f64>(), EPS).unwrap();
    let b = ClassicalObservable::new("b", ComplexMatrix::diagonal(&[1.0, 2.0]), EPS).unwrap();
    let d = phi(2, &[&a], 0).unwrap();
    assert_eq!(d.atoms(), 2);
    assert!(d.same_as(&phi(2, &[&a, &b], 0).unwrap(), 1e-9));
    assert_eq!(phi::<f64>(2, &[], 0).unwrap().atoms(), 1);
    let x = ClassicalObservable::new("x", pauli::x::<f64>(), EPS).unwrap();
    assert!(matches!(phi(2, &[&a, &x], 0), Err(Error::NonCommutingSet(_))));
}

#[test]
fn empty_configuration_is_a_point() {
    let p = build_poset::<f64>(2, vec![], &[], &PosetOptions::default()).unwrap();
    assert_eq!(p.len(), 1);
    assert!(p.site().flat_is_identity());
}

#[test]
fn non_commuting_seed_rejected() {
    let seeds = [SeedContext::new("bad", vec![pauli::x::<f64>(), pauli::z()])];
    let err = build_poset(2, vec![], &seeds, &PosetOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NonCommutingSet(_)));
}

#[test]
fn size_limit_enforced() {
    let a = ClassicalObservable::new("a", pauli::z::<f64>(), EPS).unwrap();
    let seeds = [SeedContext::new("Vx", vec![pauli::x()])];
    let options = PosetOptions { max_contexts: 2, ..PosetOptions::default() };
    assert!(matches!(build_poset(2, vec![a], &seeds, &options), Err(Error::SizeLimit { .. })));
}

#[test]
fn non_injective_quantization_rejected() {
    let a = ClassicalObservable::new("a", pauli::z::<f64>(), EPS).unwrap();
    let b = ClassicalObservable::new("b", pauli::z::<f64>(), EPS).unwrap();
    assert!(build_poset(2, vec![a, b], &[], &PosetOptions::default()).is_err());
}

#[test]
fn fixture_b_has_unfixed_context_below_fixed_one() {
    let p = fixture_b::<f64>();
    assert_eq!(p.len(), 3);
    let (v1, d) = (p.index_of("V1").unwrap(), p.index_of("phi(a)").unwrap());
    assert!(p.site().leq(v1, d));
    assert_eq!(p.flat(v1), 0);
    assert_eq!(p.flat(d), d);
}

#[test]
fn fixture_c_flat_onto_nontrivial_fixed_point() {
    let p = fixture_c::<f64>();
    assert_eq!(p.len(), 5);
    let id = |l: &str| p.index_of(l).unwrap();
    assert_eq!(p.flat(id("Vp")), id("phi(b)"));
    assert_eq!(p.flat(id("V1")), id("CI"));
    assert_eq!(p.flat(id("phi(a)")), id("phi(a)"));
    assert_eq!(p.psi(id("Vp")), vec!["b"]);
    assert_eq!(p.psi(id("phi(a)")), vec!["a", "b"]);
    assert_eq!(p.intersect(id("Vp"), id("phi(a)")).unwrap(), id("phi(b)"));
    assert_eq!(p.intersect(id("V1"), id("Vp")).unwrap(), id("CI"));
    assert_eq!(p.site().maximal(), ids(&p, &["phi(a)", "Vp"]));
}

fn check_axioms(p: &ContextPoset) {
    let s = p.site();
    for v in 0..p.len() {
        let f = p.flat(v);
        assert_eq!(p.flat(f), f);
        assert!(s.leq(f, v));
        for w in s.down(v).iter() {
            assert!(s.leq(p.flat(w), f));
            // anti-monotone up-set operator
            assert!(p.u_flat(v).is_subset(p.u_flat(w)));
        }
        for w in 0..p.len() {
            let m = p.intersect(v, w).unwrap();
            assert!(s.leq(m, v) && s.leq(m, w));
            for u in s.down(v).intersect(s.down(w)).iter() {
                assert!(s.leq(u, m), "intersection is the meet");
            }
        }
    }
    p.check_galois().unwrap();
}

#[test]
fn axioms_hold_on_fixtures() {
    check_axioms(&fixture_a());
    check_axioms(&fixture_b());
    check_axioms(&fixture_c());
    for seed in 0..8 {
        let p = random_fixture::<f64>(seed, 12);
        assert!(p.len() <= 12);
        check_axioms(&p);
    }
}

#[test]
fn random_fixtures_are_deterministic() {
    let a = random_fixture::<f64>(3, 12);
    let b = random_fixture::<f64>(3, 12);
    assert_eq!(a.site(), b.site());
}

#[test]
fn loewner_is_a_partial_order_on_context_lattices() {
    for p in [fixture_a::<f64>(), fixture_b(), random_fixture(5, 12)] {
        for v in 0..p.len() {
            let k = p.context(v).atoms();
            let projs: Vec<Projection> = (0..1u32 << k).map(|m| Projection::new(p.projection(v, m), 1e-8).unwrap()).collect();
            for (i, a) in projs.iter().enumerate() {
                assert!(loewner_leq(a, a, EPS).unwrap());
                for (j, b) in projs.iter().enumerate() {
                    let ab = loewner_leq(a, b, 1e-8).unwrap();
                    // in a commutative lattice, order is mask inclusion
                    assert_eq!(ab, (i as u32) & !(j as u32) == 0);
                    if ab && loewner_leq(b, a, 1e-8).unwrap() {
                        assert_eq!(i, j);
                    }
                    for c in &projs {
                        if ab && loewner_leq(b, c, 1e-8).unwrap() {
                            assert!(loewner_leq(a, c, 1e-8).unwrap());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn skeleton_coarsening_matches_matrices() {
    for p in [fixture_a::<f64>(), fixture_b(), random_fixture(2, 12)] {
        let sk = p.skeleton();
        for v in 0..p.len() {
            for w in p.site().down(v).iter() {
                for mask in 0..1u32 << sk.atoms(v) {
                    let big = p.projection(v, mask);
                    let small = p.projection(w, sk.coarsen(v, w, mask));
                    // the coarsened projection dominates the original
                    assert!((&(&small * &big) - &big).norm() < 1e-8);
                }
                for mask in 0..1u32 << sk.atoms(w) {
                    let lifted = p.projection(v, sk.lift(w, v, mask));
                    assert!((&lifted - &p.projection(w, mask)).norm() < 1e-8);
                }
            }
        }
    }
}
