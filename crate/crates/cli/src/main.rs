use clap::{Parser, Subcommand, ValueEnum};
use prplab::commands::{self, CliError, EnlargeArgs};
use prplab::model::load_model;
use prplab::report::ScenarioReport;
use prplab::scenarios;
use std::process::ExitCode;

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

/// Exact laboratory for martingale representation and filtration
/// enlargement on finite filtered models.
#[derive(Parser)]
#[command(name = "prplab", version, about)]
struct Cli {
    /// Output format: human-readable text or deterministic JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Doob decomposition of a process into initial value, martingale
    /// part and predictable drift.
    Decompose {
        /// Model file or bundled model name.
        model: String,
        /// Process to decompose.
        #[arg(long)]
        process: String,
        /// Working filtration: 'natural:A,B' or 'explicit'.
        #[arg(long)]
        filtration: Option<String>,
        /// Reference measure: 'P' or 'density:NAME'.
        #[arg(long, default_value = "P")]
        measure: String,
    },
    /// Structure condition: solve the drift against the predictable
    /// variation.
    Structure {
        model: String,
        #[arg(long)]
        process: String,
        #[arg(long)]
        filtration: Option<String>,
        #[arg(long, default_value = "P")]
        measure: String,
    },
    /// Doléans exponential of the structure integrand and the measure it
    /// induces.
    Doleans {
        model: String,
        #[arg(long)]
        process: String,
        #[arg(long)]
        filtration: Option<String>,
        #[arg(long, default_value = "P")]
        measure: String,
    },
    /// Equivalent martingale measure for a process family.
    Emm {
        model: String,
        /// Comma-separated process names (default: all).
        #[arg(long)]
        processes: Option<String>,
        #[arg(long)]
        filtration: Option<String>,
    },
    /// All extremal points of the martingale-measure polytope.
    Extremals {
        model: String,
        #[arg(long)]
        processes: Option<String>,
        #[arg(long)]
        filtration: Option<String>,
    },
    /// Completeness of an integrator family.
    Complete {
        model: String,
        /// Integrators: process names and QC(A,B) covariations.
        #[arg(long)]
        integrators: Option<String>,
        #[arg(long)]
        filtration: Option<String>,
        #[arg(long, default_value = "P")]
        measure: String,
    },
    /// Represent the terminal value of a named process against
    /// integrators.
    Represent {
        model: String,
        /// Process whose terminal value is the representation target.
        target: String,
        #[arg(long)]
        integrators: String,
        #[arg(long)]
        filtration: Option<String>,
        #[arg(long, default_value = "P")]
        measure: String,
    },
    /// First strict-inclusion diagnostics for an enlargement.
    Enlarge {
        model: String,
        /// Random-time name for a progressive enlargement.
        #[arg(long)]
        tau: Option<String>,
        /// Processes whose natural filtration joins the reference one.
        #[arg(long)]
        join: Option<String>,
    },
    /// The representation-loss witness for an enlargement.
    Witness {
        model: String,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        join: Option<String>,
    },
    /// Immersion characterization for an enlargement.
    Immersion {
        model: String,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        join: Option<String>,
        #[arg(long, default_value = "P")]
        measure: String,
    },
    /// Run a builtin scenario (or list them with --list).
    Scenario {
        /// Scenario name.
        name: Option<String>,
        /// Model file or bundled name; defaults to the scenario's
        /// bundled model.
        model: Option<String>,
        /// List the builtin scenarios and exit.
        #[arg(long)]
        list: bool,
        /// Alternative way to pass the scenario name.
        #[arg(long = "scenario")]
        scenario_name: Option<String>,
    },
}

enum Output {
    Report(ScenarioReport),
    Text(String),
}

fn dispatch(cmd: Command) -> Result<Output, CliError> {
    match cmd {
        Command::Decompose { model, process, filtration, measure } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_decompose(&built, &name, &process, filtration.as_deref(), &measure)
                .map(Output::Report)
        }
        Command::Structure { model, process, filtration, measure } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_structure(&built, &name, &process, filtration.as_deref(), &measure)
                .map(Output::Report)
        }
        Command::Doleans { model, process, filtration, measure } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_doleans(&built, &name, &process, filtration.as_deref(), &measure)
                .map(Output::Report)
        }
        Command::Emm { model, processes, filtration } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_emm(&built, &name, processes.as_deref(), filtration.as_deref())
                .map(Output::Report)
        }
        Command::Extremals { model, processes, filtration } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_extremals(&built, &name, processes.as_deref(), filtration.as_deref())
                .map(Output::Report)
        }
        Command::Complete { model, integrators, filtration, measure } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_complete(
                &built,
                &name,
                integrators.as_deref(),
                filtration.as_deref(),
                &measure,
            )
            .map(Output::Report)
        }
        Command::Represent { model, target, integrators, filtration, measure } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_represent(
                &built,
                &name,
                &target,
                &integrators,
                filtration.as_deref(),
                &measure,
            )
            .map(Output::Report)
        }
        Command::Enlarge { model, tau, join } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_enlarge(
                &built,
                &name,
                &EnlargeArgs { tau: tau.as_deref(), join: join.as_deref() },
            )
            .map(Output::Report)
        }
        Command::Witness { model, tau, join } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_witness(
                &built,
                &name,
                &EnlargeArgs { tau: tau.as_deref(), join: join.as_deref() },
            )
            .map(Output::Report)
        }
        Command::Immersion { model, tau, join, measure } => {
            let (name, built) = load_model(&model)?;
            commands::cmd_immersion(
                &built,
                &name,
                &EnlargeArgs { tau: tau.as_deref(), join: join.as_deref() },
                &measure,
            )
            .map(Output::Report)
        }
        Command::Scenario { name, model, list, scenario_name } => {
            if list {
                return Ok(Output::Text(render_scenario_list()));
            }
            // With the --scenario flag the positional argument is the
            // model; without it the positional argument is the name.
            let (scenario, model_arg) = match (scenario_name, name, model) {
                (Some(flag), pos, m) => (flag, m.or(pos)),
                (None, Some(pos), m) => (pos, m),
                (None, None, _) => {
                    return Err(CliError::Input(
                        "pass a scenario name (or --list)".into(),
                    ))
                }
            };
            let descriptor = scenarios::descriptors()
                .into_iter()
                .find(|d| d.name == scenario)
                .ok_or_else(|| {
                    CliError::UnknownEntity(format!(
                        "scenario '{scenario}' (run `prplab scenario --list`)"
                    ))
                })?;
            let model_arg = model_arg.unwrap_or_else(|| descriptor.default_model.to_string());
            let (model_label, built) = load_model(&model_arg)?;
            scenarios::run_scenario(&scenario, &built, &model_label).map(Output::Report)
        }
    }
}

fn render_scenario_list() -> String {
    let mut out = String::from("builtin scenarios:\n");
    for d in scenarios::descriptors() {
        out.push_str(&format!(
            "  {:<20} {}\n{:24}default model: {}; requires: {}\n",
            d.name, d.summary, "", d.default_model, d.requires
        ));
        out.push_str(&format!(
            "{:24}hypotheses: {}\n{:24}conclusions: {}\n",
            "",
            d.hypotheses.join(" | "),
            "",
            d.conclusions.join(" | ")
        ));
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match dispatch(cli.command) {
        Ok(Output::Report(report)) => {
            match format {
                Format::Text => print!("{}", report.render_text()),
                Format::Structured => print!("{}", report.render_structured()),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(Output::Text(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
