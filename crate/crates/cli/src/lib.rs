//! Scenario runner: builds a context poset from a JSON scenario, executes
//! its commands in order and assembles a deterministic JSON report.

pub mod dot;
pub mod error;
pub mod ks;
pub mod scenario;

use std::path::{Path, PathBuf};

use qtopos::presheaves::TruthValue;
use qtopos::site::{ContextSet, Site};
use qtopos::spectral::{daseinize, daseinize_j, proposition_of, DbSubobject, Flavor};
use qtopos::translate::{
    gamma_interval, iota_max, iota_min, is_translation_prop, is_translation_truth, r_of, verify_theorem, TheoremReport,
};
use qtopos::truth::{nu, truth_rho_r};
use qtopos::Poset;
use serde_json::{json, Map, Value};

pub use error::{CliError, CliResult};
use scenario::{check_r, Command, FlavorSpec, Model, Overrides, Scenario, Settings};

pub struct Report {
    pub json: Value,
    /// Some checking command came out false.
    pub failed: bool,
    /// One human-readable line per command.
    pub summary: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn load(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    scenario::parse(&text)
}

pub fn poset_summary(poset: &Poset) -> Value {
    let site = poset.site();
    let contexts: Vec<Value> = (0..poset.len())
        .map(|v| {
            json!({
                "name": site.label(v),
                "atoms": poset.skeleton().atoms(v),
                "psi": poset.psi(v),
                "flat": site.label(site.flat(v)),
            })
        })
        .collect();
    let covers: Vec<Value> = site.covers().into_iter().map(|(lo, hi)| json!([site.label(lo), site.label(hi)])).collect();
    json!({ "dimension": poset.dim(), "contexts": contexts, "covers": covers })
}

fn truth_value_json(site: &Site, t: &TruthValue) -> Value {
    let sieves: Map<String, Value> =
        (0..site.len()).map(|v| (site.label(v).to_string(), json!(site.names(t.sieves()[v])))).collect();
    json!({ "downset": site.names(t.downset()), "sieves": sieves })
}

fn atoms_of(mask: u32) -> Vec<u32> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

fn tops_json(site: &Site, p: &DbSubobject) -> Value {
    let m: Map<String, Value> = (0..site.len()).map(|v| (site.label(v).to_string(), json!(atoms_of(p.values()[v])))).collect();
    Value::Object(m)
}

pub fn theorem_json(r: &TheoremReport) -> Value {
    let clauses: Vec<Value> = r
        .clauses
        .iter()
        .map(|c| json!({ "name": c.name, "checked": c.checked, "failures": c.failures, "passed": c.passed() }))
        .collect();
    let mut v = json!({
        "theorem": r.theorem,
        "passed": r.passed(),
        "counts": r.counts,
        "class_sizes": r.class_sizes,
        "clauses": clauses,
    });
    if let Some(x) = r.non_translation_exists {
        v["non_translation_exists"] = json!(x);
    }
    v
}

struct Runner<'a> {
    scenario: &'a Scenario,
    model: Model,
    settings: &'a Settings,
    out_dir: PathBuf,
}

impl Runner<'_> {
    fn site(&self) -> &Site {
        self.model.poset.site()
    }

    fn projection(&self, name: &str) -> CliResult<&qtopos::Proj> {
        self.model.projections.get(name).ok_or_else(|| CliError::Validation(format!("unknown projection {name}")))
    }

    fn state(&self, name: &str) -> CliResult<&qtopos::Density> {
        self.model.states.get(name).ok_or_else(|| CliError::Validation(format!("unknown state {name}")))
    }

    fn r_list(&self, r: Option<f64>) -> CliResult<Vec<f64>> {
        let rs = match r {
            Some(r) => vec![r],
            None => self.scenario.r_values.clone(),
        };
        if rs.is_empty() {
            return Err(CliError::Validation("no r given and r_values is empty".into()));
        }
        rs.iter().try_for_each(|&r| check_r(r))?;
        Ok(rs)
    }

    /// Result JSON, whether the command checked something and passed, and a
    /// summary line.
    fn execute(&self, cmd: &Command) -> CliResult<(Value, Option<bool>, String)> {
        let poset = &self.model.poset;
        let site = self.site();
        let guard = self.settings.guard;
        match cmd {
            Command::Daseinize { projection, flavor } => {
                let p = self.projection(projection)?;
                let stages: Vec<Value> = (0..poset.len())
                    .map(|v| {
                        let (ctx, mask) = match flavor {
                            FlavorSpec::Presheaf => (v, daseinize(poset, p, v)),
                            FlavorSpec::Sheaf => (site.flat(v), daseinize_j(poset, p, v)),
                        };
                        let rank = poset.projection(ctx, mask).trace().re.round() as i64;
                        json!({ "context": site.label(v), "value_context": site.label(ctx), "atoms": atoms_of(mask), "rank": rank })
                    })
                    .collect();
                let v =
                    json!({ "command": "daseinize", "projection": projection, "flavor": flavor_name(*flavor), "stages": stages });
                Ok((v, None, format!("daseinize {projection}: {} stages", poset.len())))
            }
            Command::Assign { projection, state, r, flavor } => {
                let (p, rho) = (self.projection(projection)?, self.state(state)?);
                let flavor_q: Flavor = (*flavor).into();
                let prop = proposition_of(poset, p, flavor_q);
                let mut values = Vec::new();
                for r in self.r_list(*r)? {
                    let t = truth_rho_r(poset, rho, r, flavor_q)?;
                    let mut v = truth_value_json(site, &nu(&prop, &t)?);
                    v["r"] = json!(r);
                    values.push(v);
                }
                let line = format!("assign {projection} in {state}: {} truth values", values.len());
                let v = json!({
                    "command": "assign", "projection": projection, "state": state,
                    "flavor": flavor_name(*flavor), "values": values,
                });
                Ok((v, None, line))
            }
            Command::Translate { projection, state, r } => {
                let (p, rho) = (self.projection(projection)?, self.state(state)?);
                let prop = proposition_of(poset, p, Flavor::Presheaf);
                let prop_j = proposition_of(poset, p, Flavor::Sheaf);
                let sk = poset.skeleton();
                let prop_ok = is_translation_prop(site, &prop, &prop_j);
                let mut all_ok = prop_ok;
                let mut values = Vec::new();
                for r in self.r_list(*r)? {
                    let t = truth_rho_r(poset, rho, r, Flavor::Presheaf)?;
                    let t_j = truth_rho_r(poset, rho, r, Flavor::Sheaf)?;
                    let value = nu(&prop, &t)?;
                    let value_j = nu(&prop_j, &t_j)?;
                    let relation = r_of(site, &value) == value_j;
                    let interval = gamma_interval(site, &value_j);
                    let in_class = interval.contains(&value);
                    let truth_ok = is_translation_truth(sk, &t, &t_j, guard)?;
                    all_ok &= relation && in_class && truth_ok;
                    values.push(json!({
                        "r": r,
                        "nu": site.names(value.downset()),
                        "nu_j": site.names(value_j.downset()),
                        "r_nu": site.names(r_of(site, &value).downset()),
                        "relation_holds": relation,
                        "gamma_min": site.names(interval.lower.downset()),
                        "gamma_max": site.names(interval.upper.downset()),
                        "nu_in_gamma_class": in_class,
                        "truth_translates": truth_ok,
                    }));
                }
                let v = json!({
                    "command": "translate", "projection": projection, "state": state,
                    "proposition_translates": prop_ok,
                    "iota_min": tops_json(site, &iota_min(sk, &prop_j)?),
                    "iota_max": tops_json(site, &iota_max(sk, &prop_j)?),
                    "values": values, "passed": all_ok,
                });
                Ok((v, Some(all_ok), format!("translate {projection} in {state}: {}", pass_word(all_ok))))
            }
            Command::Verify { theorem } => {
                let mut reports = Vec::new();
                let mut ok = true;
                let mut line = Vec::new();
                for n in theorem.theorems() {
                    let r = verify_theorem(poset, n, guard)?;
                    ok &= r.passed();
                    line.push(format!("theorem {n} {} (classes {:?})", pass_word(r.passed()), r.class_sizes));
                    reports.push(theorem_json(&r));
                }
                let v = json!({ "command": "verify", "reports": reports, "passed": ok });
                Ok((v, Some(ok), format!("verify: {}", line.join("; "))))
            }
            Command::KsCheck { fixture, expect } => {
                let named;
                let target = match fixture {
                    Some(name) => {
                        named = ks::named_fixture(name, self.settings.max_contexts)?;
                        &named
                    }
                    None => poset,
                };
                let (v, passed) = ks_json(fixture.as_deref(), target, *expect, guard)?;
                let line = format!("ks-check {}: |ΓΣ| = {}", fixture.as_deref().unwrap_or("scenario"), v["global_sections"]);
                Ok((v, passed, line))
            }
            Command::Dot { file, highlight } => {
                let set: ContextSet = highlight
                    .iter()
                    .map(|n| site.index_of(n).ok_or_else(|| CliError::Validation(format!("unknown context {n}"))))
                    .collect::<CliResult<_>>()?;
                if !site.is_down_closed(set) {
                    return Err(CliError::Validation("highlighted contexts must form a down-set".into()));
                }
                let text = dot::export_dot(site, (!highlight.is_empty()).then_some(set));
                std::fs::create_dir_all(&self.out_dir)?;
                std::fs::write(self.out_dir.join(file), text)?;
                let v = json!({ "command": "dot", "file": file, "nodes": site.len(), "cover_edges": site.covers().len() });
                Ok((v, None, format!("dot: wrote {file}")))
            }
        }
    }
}

fn flavor_name(f: FlavorSpec) -> &'static str {
    match f {
        FlavorSpec::Presheaf => "presheaf",
        FlavorSpec::Sheaf => "sheaf",
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Named fixtures pass when Σ has no global section; any other poset
/// passes only against an explicit expectation.
pub fn ks_json(fixture: Option<&str>, poset: &Poset, expect: Option<usize>, guard: usize) -> CliResult<(Value, Option<bool>)> {
    let count = ks::ks_count(poset, guard)?;
    let expected = expect.or(fixture.map(|_| 0));
    let passed = expected.map(|e| e == count.global_sections);
    let mut v = json!({
        "command": "ks-check",
        "fixture": fixture.unwrap_or("scenario"),
        "dimension": poset.dim(),
        "contexts": count.contexts,
        "maximal_contexts": count.maximal_contexts,
        "global_sections": count.global_sections,
        "sheaf_global_sections": count.sheaf_global_sections,
    });
    if let Some(e) = expected {
        v["expected"] = json!(e);
        v["passed"] = json!(passed == Some(true));
    }
    Ok((v, passed))
}

pub fn run_scenario(scenario: &Scenario, settings: &Settings) -> CliResult<Report> {
    let model = scenario.build(settings)?;
    let out_dir = settings.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let runner = Runner { scenario, model, settings, out_dir };
    let mut results = Vec::new();
    let mut summary = Vec::new();
    let mut failed = false;
    for cmd in &scenario.commands {
        let (v, passed, line) = runner.execute(cmd)?;
        failed |= passed == Some(false);
        results.push(v);
        summary.push(line);
    }
    let json = json!({
        "poset": poset_summary(&runner.model.poset),
        "settings": {
            "epsilon": settings.epsilon,
            "max_contexts": settings.max_contexts,
            "guard": settings.guard,
            "seed": settings.seed,
        },
        "results": results,
        "failed": failed,
    });
    Ok(Report { json, failed, summary })
}

pub fn run_file(path: &Path, overrides: &Overrides) -> CliResult<(Report, Settings)> {
    let scenario = load(path)?;
    let settings = Settings::resolve(&scenario.options, overrides);
    Ok((run_scenario(&scenario, &settings)?, settings))
}
