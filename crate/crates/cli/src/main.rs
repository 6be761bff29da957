use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use galerkin_nn::catalog::RuleKind;
use galerkin_nn::IterationRecord;
use galerkin_nn_cli::commands::{self, CliError};
use galerkin_nn_cli::config::{self, Entries, RunConfig};

/// Adaptive Galerkin solver with trained shallow-network basis functions.
#[derive(Parser)]
#[command(name = "galerkin-nn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive loop on a catalog problem and write its reports.
    Run {
        #[command(flatten)]
        common: Common,
        /// Record wall-clock times in the history.
        #[arg(long)]
        timing: bool,
        /// Also write the training and validation rules as CSV.
        #[arg(long)]
        export_rules: bool,
    },
    /// List the problem catalog.
    List {
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Rerun a 1D problem per interior rule and node count.
    QuadratureStudy {
        #[command(flatten)]
        common: Common,
        /// Interior node counts, e.g. `16,64,512`.
        #[arg(long, value_delimiter = ',', required = true)]
        nodes: Vec<usize>,
        /// Interior rule families to compare.
        #[arg(long = "kind", value_enum, value_delimiter = ',', default_value = "gauss")]
        kinds: Vec<Kind>,
    },
    /// Write a problem's sampled exact solution or quadrature rules.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rules: bool,
        #[arg(long)]
        exact: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gauss,
    Riemann,
}

#[derive(Args)]
struct Common {
    /// Catalog problem name (overrides `problem.name`).
    #[arg(long)]
    problem: Option<String>,
    /// Config file: `key = value` lines or JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` setting; may repeat.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    max_iterations: Option<String>,
    /// Output directory, relative to the output root.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Grid points per direction for sampled fields.
    #[arg(long)]
    grid: Option<String>,
    /// Suppress progress lines.
    #[arg(long, short)]
    quiet: bool,
}

impl Common {
    fn config(&self, default_problem: Option<&str>) -> Result<RunConfig, CliError> {
        let mut e = Entries::default();
        if let Some(p) = default_problem {
            e.push("problem.name", p, "default");
        }
        if let Some(path) = &self.config {
            e.extend(config::read_file(path)?);
        }
        for s in &self.set {
            let Some((k, v)) = s.split_once('=') else {
                return Err(CliError::Usage(format!("--set expects KEY=VALUE, got `{s}`")));
            };
            e.push(k.trim(), v.trim(), "--set");
        }
        let flags = [
            ("problem.name", &self.problem, "--problem"),
            ("schedules.tol", &self.tol, "--tol"),
            ("seed", &self.seed, "--seed"),
            ("schedules.epochs", &self.epochs, "--epochs"),
            ("schedules.max_iterations", &self.max_iterations, "--max-iterations"),
            ("report.grid", &self.grid, "--grid"),
        ];
        for (key, value, flag) in flags {
            if let Some(v) = value {
                e.push(key, v.as_str(), flag);
            }
        }
        let mut cfg = RunConfig::from_entries(&e)?;
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        Ok(cfg)
    }
}

fn progress(quiet: bool) -> impl FnMut(&IterationRecord) {
    move |r| {
        if quiet {
            return;
        }
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3e}"));
        eprintln!(
            "iter {:>3}  n={:<5} eta={:.3e}  true_energy={}  cond={}",
            r.iteration,
            r.width,
            r.eta,
            opt(r.true_energy),
            opt(r.cond)
        );
    }
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let root = commands::output_root();
    match cli.command {
        Command::List { json } => {
            print!("{}", commands::cmd_list(json));
            Ok(commands::EXIT_OK)
        }
        Command::Run {
            common,
            timing,
            export_rules,
        } => {
            let mut cfg = common.config(None)?;
            cfg.report.timing |= timing;
            cfg.report.rules |= export_rules;
            let out = commands::cmd_run(&cfg, &root, &mut progress(common.quiet))?;
            println!(
                "{}: {} after {} iterations; manifest {}",
                cfg.problem,
                out.state.termination.name(),
                out.state.iteration(),
                out.manifest.display()
            );
            if let galerkin_nn::TerminationReason::Degenerate(msg) = &out.state.termination {
                eprintln!("numerical abort: {msg}");
            }
            Ok(out.exit_code())
        }
        Command::QuadratureStudy { common, nodes, kinds } => {
            let cfg = common.config(Some("l2_fit"))?;
            let kinds: Vec<RuleKind> = kinds
                .iter()
                .map(|k| match k {
                    Kind::Gauss => RuleKind::Gauss,
                    Kind::Riemann => RuleKind::Riemann,
                })
                .collect();
            let mut show = progress(common.quiet);
            let out = commands::cmd_quadrature_study(&cfg, &nodes, &kinds, &root, &mut |k, n, r| {
                if !common.quiet && r.iteration == 1 {
                    eprintln!("-- {} {n}", k.name());
                }
                show(r)
            })?;
            println!("{} rows in {}", out.rows.len(), out.dir.join("study.csv").display());
            Ok(out.exit_code())
        }
        Command::Export { common, rules, exact } => {
            let cfg = common.config(None)?;
            for p in commands::cmd_export(&cfg, &root, rules, exact)? {
                println!("{}", p.display());
            }
            Ok(commands::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("galerkin-nn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
