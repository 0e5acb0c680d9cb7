//! Acceptance run: one PASS/FAIL line per criterion, with per-clause
//! counts for anything that fails.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex;
use qtopos::contexts::{ContextPoset, Mask};
use qtopos::fixtures::{fixture_a, fixture_b, fixture_c, random_fixture, state_grid, R_GRID};
use qtopos::linops::Projection;
use qtopos::presheaves::*;
use qtopos::site::Site;
use qtopos::spectral::*;
use qtopos::translate::*;
use qtopos::truth::{nu, nu_projection_fast, truth_rho_r};
use qtopos_cli::ks;

const GUARD: usize = 2_000_000;

#[derive(Default)]
struct Clause {
    checked: usize,
    failed: usize,
    first: Option<String>,
}

#[derive(Default)]
struct Check {
    clauses: BTreeMap<&'static str, Clause>,
    notes: Vec<String>,
}

impl Check {
    fn ok(&mut self, clause: &'static str, cond: bool, detail: impl FnOnce() -> String) {
        let c = self.clauses.entry(clause).or_default();
        c.checked += 1;
        if !cond {
            c.failed += 1;
            c.first.get_or_insert_with(detail);
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn passed(&self) -> bool {
        self.clauses.values().all(|c| c.failed == 0)
    }
}

fn poset_name(k: usize) -> String {
    match k {
        0 => "FIXTURE-A".into(),
        1 => "FIXTURE-B".into(),
        2 => "FIXTURE-C".into(),
        k => format!("random#{}", k - 3),
    }
}

/// Named fixtures followed by `randoms` seeded random posets.
fn posets(randoms: u64, max_contexts: usize) -> Vec<ContextPoset> {
    let mut out = vec![fixture_a(), fixture_b(), fixture_c()];
    out.extend((0..randoms).map(|s| random_fixture(s, max_contexts)));
    out
}

fn ray(v: &[(f64, f64)]) -> Projection {
    let c: Vec<Complex<f64>> = v.iter().map(|&(re, im)| Complex::new(re, im)).collect();
    Projection::from_vector(&c).unwrap()
}

/// Every projection of every context plus two rays in general position.
fn projections(p: &ContextPoset) -> Vec<Projection> {
    let mut out = Vec::new();
    for v in 0..p.len() {
        for m in 0..=p.skeleton().full(v) {
            out.push(Projection::new(p.projection(v, m), 1e-8).unwrap());
        }
    }
    let n = p.dim();
    out.push(ray(&(0..n).map(|i| (1.0 / (i + 1) as f64, 0.2 * i as f64)).collect::<Vec<_>>()));
    out.push(ray(&(0..n).map(|i| (0.3 + 0.1 * i as f64, -0.4 + 0.5 * i as f64)).collect::<Vec<_>>()));
    out
}

fn criterion1(c: &mut Check) {
    let mut ps = vec![fixture_a::<f64>()];
    ps.extend((0..12).map(|s| random_fixture::<f64>(s, 12)));
    let dims: std::collections::BTreeSet<usize> = ps.iter().map(|p| p.dim()).collect();
    c.note(format!("{} posets, dimensions {dims:?}", ps.len()));
    for (k, p) in ps.iter().enumerate() {
        let s = p.site();
        c.ok("size", p.len() <= 12 && (2..=4).contains(&p.dim()), || format!("poset {k}"));
        c.ok("galois", p.check_galois().is_ok(), || format!("poset {k}: {:?}", p.check_galois()));
        for v in 0..s.len() {
            let f = s.flat(v);
            c.ok("flat_idempotent", s.flat(f) == f, || format!("poset {k} at {}", s.label(v)));
            c.ok("flat_deflationary", s.leq(f, v), || format!("poset {k} at {}", s.label(v)));
            for w in s.down(v).iter() {
                c.ok("flat_monotone", s.leq(s.flat(w), f), || format!("poset {k}: {} <= {}", s.label(w), s.label(v)));
            }
            let sieves = s.sieves(v, GUARD).unwrap();
            c.ok("j_unit", apply_j(s, v, s.down(v)) == s.down(v), || format!("poset {k} at {}", s.label(v)));
            for &a in &sieves {
                let ja = apply_j(s, v, a);
                c.ok("j_idempotent", apply_j(s, v, ja) == ja, || format!("poset {k} at {}", s.label(v)));
                c.ok("j_inflationary", a.is_subset(ja), || format!("poset {k} at {}", s.label(v)));
                for &b in &sieves {
                    let lhs = apply_j(s, v, a.intersect(b));
                    c.ok("j_meet", lhs == ja.intersect(apply_j(s, v, b)), || format!("poset {k} at {}", s.label(v)));
                }
            }
        }
    }
}

/// ♭*(Q↓V) = ♭*(Q↓♭V), ♭*((♭*Q)↓V) = ♭*(Q↓V), ♭*((♭*(Q↓V))↓V′) = ♭*(Q↓V′).
fn flat_identities<L: Clone + Eq + Hash + Debug>(c: &mut Check, s: &Site, q: &Presheaf<L>, k: usize) {
    let sheaf = sheafify(s, q);
    for v in 0..s.len() {
        let inner = sheafify(s, &q.down(s, v));
        c.ok("flat1", inner == sheafify(s, &q.down(s, s.flat(v))), || format!("poset {k} at {}", s.label(v)));
        c.ok("flat2", sheafify(s, &sheaf.down(s, v)) == inner, || format!("poset {k} at {}", s.label(v)));
        for w in s.down(v).iter() {
            let lhs = sheafify(s, &inner.down(s, w));
            c.ok("flat3", lhs == sheafify(s, &q.down(s, w)), || format!("poset {k}: {} <= {}", s.label(w), s.label(v)));
        }
    }
}

fn criterion2(c: &mut Check) {
    for (k, p) in posets(12, 12).iter().enumerate() {
        let s = p.site();
        let omega = build_omega(s, GUARD).unwrap();
        let oj = build_omega_j(s, GUARD).unwrap();
        let sigma = build_sigma(p.skeleton());
        let outer = build_outer(p.skeleton());
        c.ok("omega_j_sheaf", is_sheaf(s, &oj), || poset_name(k));
        if !s.flat_is_identity() {
            c.ok("omega_not_sheaf", !is_sheaf(s, &omega), || poset_name(k));
        }
        c.ok("sheafified_is_sheaf", is_sheaf(s, &sheafify(s, &omega)), || format!("{} omega", poset_name(k)));
        c.ok("sheafified_is_sheaf", is_sheaf(s, &sheafify(s, &sigma)), || format!("{} sigma", poset_name(k)));
        c.ok("sheafified_is_sheaf", is_sheaf(s, &sheafify(s, &outer)), || format!("{} outer", poset_name(k)));

        let sheaf = sheafify(s, &sigma);
        for a in subpresheaves(s, &sheaf, GUARD).unwrap() {
            if closure(s, &sheaf, &a) == a {
                c.ok("subsheaf_fixed", sheafify_sub(s, &a) == a, || poset_name(k));
            }
        }
        flat_identities(c, s, &omega, k);
        flat_identities(c, s, &sigma, k);
        flat_identities(c, s, &outer, k);

        let all_maps = natural_transformations(s, &omega, &oj, GUARD).unwrap();
        for sub in subpresheaves(s, &omega, GUARD).unwrap() {
            if !is_dense(s, &omega, &sub) {
                continue;
            }
            let sp = sub.as_presheaf(s, &omega).unwrap();
            for lambda in natural_transformations(s, &sp, &oj, GUARD).unwrap() {
                let mu = extend_along_dense(s, &omega, &sub, &oj, &lambda).unwrap();
                let agreeing: Vec<&NatTransform> = all_maps
                    .iter()
                    .filter(|m| {
                        (0..s.len()).all(|v| sp.stage(v).iter().enumerate().all(|(i, &x)| m.apply(v, x) == lambda.apply(v, i)))
                    })
                    .collect();
                c.ok("unique_extension", agreeing == vec![&mu], || poset_name(k));
            }
        }
    }
}

fn criterion3(c: &mut Check) {
    for (k, p) in posets(4, 12).iter().enumerate() {
        let (sk, s) = (p.skeleton(), p.site());
        for proj in projections(p) {
            for v in 0..p.len() {
                let d = daseinize(p, &proj, v);
                c.ok("overlap_equals_meet", daseinize_by_meet(p, &proj, v).ok() == Some(d), || {
                    format!("{} at {}", poset_name(k), s.label(v))
                });
                for w in s.down(v).iter() {
                    c.ok("restriction_law", sk.coarsen(v, w, d) == daseinize(p, &proj, w), || poset_name(k));
                    let dj = daseinize_j(p, &proj, v);
                    c.ok("delta_j_global_element", sk.coarsen(s.flat(v), s.flat(w), dj) == daseinize_j(p, &proj, w), || {
                        poset_name(k)
                    });
                }
            }
            let pj = proposition_of(p, &proj, Flavor::Sheaf);
            c.ok("delta_j_global_element", is_hyper(sk, Flavor::Sheaf, s.all(), pj.values()), || poset_name(k));
        }
        for h in enumerate_db(sk, Flavor::Sheaf, None, GUARD).unwrap() {
            let lifted: Vec<Mask> = (0..p.len()).map(|v| sk.lift(s.flat(v), v, h.values()[v])).collect();
            c.ok("sheaf_hyper_is_presheaf_hyper", is_hyper(sk, Flavor::Presheaf, s.all(), &lifted), || poset_name(k));
        }
    }
}

fn criterion4(c: &mut Check) {
    let p = fixture_a::<f64>();
    let (sk, s) = (p.skeleton(), p.site());
    let grid = state_grid::<f64>(2);
    c.note(format!("{} states x {} r values", grid.len(), R_GRID.len()));
    for (name, rho) in &grid {
        for r in R_GRID {
            let t = truth_rho_r(&p, rho, r, Flavor::Sheaf).unwrap();
            let pre = t.as_presheaf(sk, GUARD).unwrap();
            c.ok("truth_sheaf_is_sheaf", is_sheaf(s, &pre) && t.is_restriction_closed(sk, GUARD).unwrap(), || {
                format!("{name}, r = {r}")
            });
            for flavor in [Flavor::Presheaf, Flavor::Sheaf] {
                let t = truth_rho_r(&p, rho, r, flavor).unwrap();
                let bad = t.first_non_filter(sk, GUARD).unwrap();
                c.ok("filter_axioms", bad.is_none(), || {
                    format!("{name}, r = {r}, {flavor:?}: stage {} not meet-closed", s.label(bad.unwrap()))
                });
                for q in projections(&p) {
                    let generic = nu(&proposition_of(&p, &q, flavor), &t).unwrap();
                    c.ok("shortcut_nu", nu_projection_fast(&p, &q, rho, r, flavor).unwrap() == generic, || {
                        format!("{name}, r = {r}")
                    });
                }
            }
        }
        for flavor in [Flavor::Presheaf, Flavor::Sheaf] {
            for w in R_GRID.windows(2) {
                let lo = truth_rho_r(&p, rho, w[0], flavor).unwrap();
                let hi = truth_rho_r(&p, rho, w[1], flavor).unwrap();
                for v in 0..p.len() {
                    for a in hi.materialize_stage(sk, v, GUARD).unwrap() {
                        c.ok("monotone_in_r", lo.contains(v, &a), || format!("{name}, r = {:?}", w));
                    }
                }
            }
        }
    }
}

fn criterion5(c: &mut Check) {
    for (k, p) in posets(0, 12).iter().enumerate() {
        let (sk, s) = (p.skeleton(), p.site());
        let qs = projections(p);
        for q in &qs {
            let a = proposition_of(p, q, Flavor::Presheaf);
            let a_j = proposition_of(p, q, Flavor::Sheaf);
            c.ok("proposition_translation", is_translation_prop(s, &a, &a_j), || poset_name(k));
        }
        for (name, rho) in state_grid::<f64>(p.dim()) {
            for r in R_GRID {
                let t = truth_rho_r(p, &rho, r, Flavor::Presheaf).unwrap();
                let t_j = truth_rho_r(p, &rho, r, Flavor::Sheaf).unwrap();
                c.ok("truth_translation", is_translation_truth(sk, &t, &t_j, GUARD).unwrap(), || {
                    format!("{} {name} r = {r}", poset_name(k))
                });
                for q in &qs {
                    let a = proposition_of(p, q, Flavor::Presheaf);
                    let a_j = proposition_of(p, q, Flavor::Sheaf);
                    c.ok("nu_j_is_r_nu", verify_nu_relation(s, &a, &t, &a_j, &t_j).unwrap(), || {
                        format!("{} {name} r = {r}", poset_name(k))
                    });
                }
            }
        }
    }
    for (k, p) in [fixture_a::<f64>(), fixture_b()].iter().enumerate() {
        let sk = p.skeleton();
        let (sample, _) = theorem3_sample(p, GUARD).unwrap();
        let (mut pos, mut neg) = (0, 0);
        for t_j in &sample {
            for t in &truth_presheaves::<f64>(sk, GUARD).unwrap() {
                let tr = is_translation_truth(sk, t, t_j, GUARD).unwrap();
                c.ok("diagram_iff_translation", tr == diagram_commutes(sk, t, t_j, GUARD).unwrap(), || poset_name(k));
                if tr {
                    pos += 1;
                } else {
                    neg += 1;
                }
            }
        }
        c.ok("both_instance_kinds", pos > 0 && neg > 0, || format!("{}: {pos} positive, {neg} negative", poset_name(k)));
        c.note(format!("{}: {pos} commuting, {neg} non-commuting instances", poset_name(k)));
    }
}

fn criterion6(c: &mut Check) {
    let start = Instant::now();
    let a = fixture_a::<f64>();
    let r = verify_theorem1(a.skeleton(), GUARD).unwrap();
    let mut sizes = r.class_sizes.clone();
    sizes.sort_unstable();
    c.ok("fixture_a_counts", r.counts.get("gamma_omega") == Some(&5) && r.counts.get("gamma_omega_j") == Some(&3), || {
        format!("{:?}", r.counts)
    });
    c.ok("fixture_a_classes", sizes == [1, 2, 2], || format!("{sizes:?}"));
    let site = a.site();
    for nu_j in omega_j_global_elements(site, GUARD).unwrap() {
        let i = gamma_interval(site, &nu_j);
        let class: Vec<TruthValue> =
            omega_global_elements(site, GUARD).unwrap().into_iter().filter(|nu| r_of(site, nu) == nu_j).collect();
        let lowest = class.iter().all(|x| i.lower.stage_leq(x));
        let highest = class.iter().all(|x| x.stage_leq(&i.upper));
        c.ok("fixture_a_bounds", lowest && highest && class.contains(&i.lower) && class.contains(&i.upper), || {
            format!("class of {:?}", site.names(nu_j.downset()))
        });
    }
    let mut n = 0;
    for (k, p) in posets(10, MAX_THEOREM_CONTEXTS).iter().enumerate() {
        if p.len() > MAX_THEOREM_CONTEXTS {
            continue;
        }
        n += 1;
        let r = verify_theorem1(p.skeleton(), GUARD).unwrap();
        for cl in &r.clauses {
            c.ok("all_fixtures", cl.passed(), || format!("{}: {}", poset_name(k), cl.name));
        }
    }
    let ms = start.elapsed().as_millis();
    c.note(format!("{n} fixtures, {ms} ms"));
    c.ok("runtime_under_1s", ms < 1000, || format!("{ms} ms"));
}

fn criterion7(c: &mut Check) {
    let a = fixture_a::<f64>();
    let r = verify_theorem2(a.skeleton(), GUARD).unwrap();
    for cl in &r.clauses {
        c.ok("fixture_a", cl.passed(), || format!("{} failed {} of {}", cl.name, cl.failures, cl.checked));
    }
    c.note(format!("counts {:?}, classes {:?}", r.counts, r.class_sizes));
}

fn criterion8(c: &mut Check) {
    for (k, p) in posets(0, 12).iter().enumerate() {
        let r = verify_theorem3(p, GUARD).unwrap();
        let interval = r.clause("class_equals_interval");
        c.ok("interval_clause", interval.is_some_and(|cl| cl.passed() && cl.checked > 0), || poset_name(k));
        c.ok("non_translation_reported", r.non_translation_exists.is_some(), || poset_name(k));
        c.note(format!(
            "{}: {} sampled truth sheaves, non-translation truth presheaf exists = {:?}",
            poset_name(k),
            r.counts.get("sampled_truth_sheaves").copied().unwrap_or(0),
            r.non_translation_exists
        ));
    }
}

fn criterion9(c: &mut Check) {
    let start = Instant::now();
    let p = ks::named_fixture("cabello18", 0).unwrap();
    let count = ks::ks_count(&p, GUARD).unwrap();
    c.ok("cabello18_no_global_section", count.global_sections == 0, || format!("{count:?}"));
    c.ok("cabello18_shape", p.dim() == 4 && count.maximal_contexts == 9, || format!("dim {}, {count:?}", p.dim()));
    let a = ks::ks_count(&fixture_a(), GUARD).unwrap();
    c.ok("fixture_a_count_is_2", a.global_sections == 2, || {
        format!(
            "|ΓΣ| = {} (2 x 2 independent characters over the two maximal contexts); |Γ♭*Σ| = {}",
            a.global_sections, a.sheaf_global_sections
        )
    });
    let ms = start.elapsed().as_millis();
    c.ok("runtime_under_10s", ms < 10_000, || format!("{ms} ms"));
}

fn criterion10(c: &mut Check) {
    let bin = env!("CARGO_BIN_EXE_qtopos");
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/fixture_a.json");
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(bin).arg("run").arg(&scenario).arg("--out").arg(dir.path()).output().unwrap();
        (out.status.code(), std::fs::read(dir.path().join("report.json")).unwrap())
    };
    let (code1, a) = run();
    let (code2, b) = run();
    c.ok("exit_zero", code1 == Some(0) && code2 == Some(0), || format!("{code1:?} {code2:?}"));
    c.ok("byte_identical", !a.is_empty() && a == b, || format!("{} vs {} bytes", a.len(), b.len()));
}

type Criterion = fn(&mut Check);

fn main() -> ExitCode {
    let criteria: [(u8, Criterion); 10] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
        (10, criterion10),
    ];
    let mut all = true;
    for (n, f) in criteria {
        let mut c = Check::default();
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut c)));
        let ms = start.elapsed().as_millis();
        let passed = outcome.is_ok() && c.passed();
        all &= passed;
        println!("criterion {n}: {} ({ms} ms)", if passed { "PASS" } else { "FAIL" });
        if outcome.is_err() {
            println!("    panicked");
        }
        for (name, cl) in &c.clauses {
            if cl.failed > 0 {
                println!("    {name}: {} of {} failed; first: {}", cl.failed, cl.checked, cl.first.as_deref().unwrap_or(""));
            }
        }
        for note in &c.notes {
            println!("    {note}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
