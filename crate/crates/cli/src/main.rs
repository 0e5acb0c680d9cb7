use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qtopos_cli::scenario::{AllTag, Command as ScenarioCommand, Overrides, Settings, TheoremSpec};
use qtopos_cli::{dot, ks, ks_json, load, run_scenario, CliError, CliResult, Report};

#[derive(Parser)]
#[command(name = "qtopos", version, about = "Presheaf and sheaf truth values on finite context posets")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Numerical tolerance for eigenvalue and trace comparisons.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Upper bound on the number of contexts when closing the poset.
    #[arg(long, global = true)]
    max_contexts: Option<usize>,
    /// Search-node budget for exhaustive enumerations.
    #[arg(long, global = true)]
    guard: Option<usize>,
    /// Directory for report.json and DOT files; the report goes to stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for eigenbasis canonicalization.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every command in a scenario file.
    Run { file: PathBuf },
    /// Check the coarse-graining theorems on a scenario's poset.
    Verify { which: Which, file: PathBuf },
    /// Count global sections of the spectral presheaf of a Kochen-Specker set.
    Ks { fixture: KsFixture },
    /// Print the poset of a scenario as a DOT digraph.
    Dot { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum KsFixture {
    Peres33,
    Cabello18,
}

impl KsFixture {
    fn name(self) -> &'static str {
        match self {
            KsFixture::Peres33 => "peres33",
            KsFixture::Cabello18 => "cabello18",
        }
    }
}

fn emit(report: &Report, out: Option<&Path>) -> CliResult<()> {
    for line in &report.summary {
        eprintln!("{line}");
    }
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("report.json"), report.to_json_string())?;
        }
        None => print!("{}", report.to_json_string()),
    }
    Ok(())
}

fn settings_for(file: &Path, overrides: &Overrides) -> CliResult<(qtopos_cli::scenario::Scenario, Settings)> {
    let scenario = load(file)?;
    let settings = Settings::resolve(&scenario.options, overrides);
    Ok((scenario, settings))
}

fn run(cli: Cli) -> CliResult<i32> {
    let overrides = Overrides {
        epsilon: cli.epsilon,
        max_contexts: cli.max_contexts,
        guard: cli.guard,
        seed: cli.seed,
        out: cli.out.clone(),
    };
    match cli.command {
        Cmd::Run { file } => {
            let (scenario, settings) = settings_for(&file, &overrides)?;
            let report = run_scenario(&scenario, &settings)?;
            emit(&report, settings.out.as_deref())?;
            Ok(report.exit_code())
        }
        Cmd::Verify { which, file } => {
            let (mut scenario, settings) = settings_for(&file, &overrides)?;
            let theorem = match which {
                Which::One => TheoremSpec::One(1),
                Which::Two => TheoremSpec::One(2),
                Which::Three => TheoremSpec::One(3),
                Which::All => TheoremSpec::All(AllTag::All),
            };
            scenario.commands = vec![ScenarioCommand::Verify { theorem }];
            let report = run_scenario(&scenario, &settings)?;
            emit(&report, settings.out.as_deref())?;
            Ok(report.exit_code())
        }
        Cmd::Ks { fixture } => {
            let settings = Settings::resolve(&Default::default(), &overrides);
            let poset = ks::named_fixture(fixture.name(), settings.max_contexts)?;
            let (v, passed) = ks_json(Some(fixture.name()), &poset, None, settings.guard)?;
            let failed = passed == Some(false);
            let line = format!("ks {}: |ΓΣ| = {}", fixture.name(), v["global_sections"]);
            let json = serde_json::json!({ "results": [v], "failed": failed });
            let report = Report { json, failed, summary: vec![line] };
            emit(&report, settings.out.as_deref())?;
            Ok(report.exit_code())
        }
        Cmd::Dot { file } => {
            let (scenario, settings) = settings_for(&file, &overrides)?;
            let model = scenario.build(&settings)?;
            let text = dot::export_dot(model.poset.site(), None);
            match settings.out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join("poset.dot"), text)?;
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
