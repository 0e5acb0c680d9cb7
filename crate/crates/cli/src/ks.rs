//! Kochen-Specker ray sets and the global-section count of Σ.

use qtopos::fixtures::ray_poset;
use qtopos::presheaves::{count_global_elements, sheafify};
use qtopos::spectral::build_sigma;
use qtopos::Poset;

use crate::error::{CliError, CliResult};

/// Poset sizes needed by the named fixtures.
pub const KS_MAX_CONTEXTS: usize = 128;

/// The 18 rays in dimension 4, as 9 orthonormal bases; every ray lies in
/// exactly two of them.
pub fn cabello18() -> Vec<Vec<Vec<f64>>> {
    let b = |rows: [[f64; 4]; 4]| rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    vec![
        b([[0., 0., 0., 1.], [0., 0., 1., 0.], [1., 1., 0., 0.], [1., -1., 0., 0.]]),
        b([[0., 0., 0., 1.], [0., 1., 0., 0.], [1., 0., 1., 0.], [1., 0., -1., 0.]]),
        b([[1., -1., 1., -1.], [1., -1., -1., 1.], [1., 1., 0., 0.], [0., 0., 1., 1.]]),
        b([[1., -1., 1., -1.], [1., 1., 1., 1.], [1., 0., -1., 0.], [0., 1., 0., -1.]]),
        b([[0., 0., 1., 0.], [0., 1., 0., 0.], [1., 0., 0., 1.], [1., 0., 0., -1.]]),
        b([[1., -1., -1., 1.], [1., 1., 1., 1.], [1., 0., 0., -1.], [0., 1., -1., 0.]]),
        b([[1., 1., -1., 1.], [1., 1., 1., -1.], [1., -1., 0., 0.], [0., 0., 1., 1.]]),
        b([[1., 1., -1., 1.], [-1., 1., 1., 1.], [1., 0., 1., 0.], [0., 1., 0., -1.]]),
        b([[1., 1., 1., -1.], [-1., 1., 1., 1.], [1., 0., 0., 1.], [0., 1., -1., 0.]]),
    ]
}

/// The 33 rays in dimension 3: coordinate permutations of (0,0,1),
/// (0,1,±1), (0,1,±√2) and (1,±1,√2), up to sign.
pub fn peres33_rays() -> Vec<[f64; 3]> {
    let s = std::f64::consts::SQRT_2;
    let mut seeds: Vec<[f64; 3]> = vec![[0., 0., 1.], [0., 1., 1.], [0., 1., -1.]];
    for a in [1., -1.] {
        seeds.push([0., 1., a * s]);
        seeds.push([0., s, a]);
        for b in [1., -1.] {
            seeds.push([a, b, s]);
        }
    }
    let perms = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
    let mut rays: Vec<[f64; 3]> = Vec::new();
    for v in seeds {
        for p in perms {
            let r = [v[p[0]], v[p[1]], v[p[2]]];
            if !rays.iter().any(|q| parallel(q, &r)) {
                rays.push(r);
            }
        }
    }
    rays
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn parallel(a: &[f64; 3], b: &[f64; 3]) -> bool {
    (dot(a, b).powi(2) - dot(a, a) * dot(b, b)).abs() < 1e-9
}

/// Every orthogonal pair of rays completed to a basis of ℂ³ (the third
/// vector is the cross product); bases are listed once.
pub fn bases_from_rays3(rays: &[[f64; 3]]) -> Vec<Vec<Vec<f64>>> {
    let mut bases: Vec<[[f64; 3]; 3]> = Vec::new();
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            let (a, b) = (rays[i], rays[j]);
            if dot(&a, &b).abs() > 1e-9 {
                continue;
            }
            let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            let basis = [a, b, c];
            let same = |other: &[[f64; 3]; 3]| basis.iter().all(|x| other.iter().any(|y| parallel(x, y)));
            if !bases.iter().any(same) {
                bases.push(basis);
            }
        }
    }
    bases.into_iter().map(|b| b.iter().map(|r| r.to_vec()).collect()).collect()
}

pub fn named_fixture(name: &str, max_contexts: usize) -> CliResult<Poset> {
    let max = max_contexts.max(KS_MAX_CONTEXTS);
    match name {
        "cabello18" => Ok(ray_poset(4, &cabello18(), max)?),
        "peres33" => Ok(ray_poset(3, &bases_from_rays3(&peres33_rays()), max)?),
        other => Err(CliError::Validation(format!("unknown KS fixture {other}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsCount {
    pub contexts: usize,
    pub maximal_contexts: usize,
    /// |ΓΣ|.
    pub global_sections: usize,
    /// |Γ♭*Σ|.
    pub sheaf_global_sections: usize,
}

pub fn ks_count(poset: &Poset, guard: usize) -> CliResult<KsCount> {
    let sk = poset.skeleton();
    let site = sk.site();
    let sigma = build_sigma(sk);
    Ok(KsCount {
        contexts: poset.len(),
        maximal_contexts: site.maximal().len(),
        global_sections: count_global_elements(site, &sigma, guard)?,
        sheaf_global_sections: count_global_elements(site, &sheafify(site, &sigma), guard)?,
    })
}
