use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pfaff_cli::{analyze, cartan_hilbert_report, load_input, registry, CliError, Command, Options, Report};

#[derive(Parser)]
#[command(name = "pfaff", version, about = "Pfaff dimension, torsion, process and spinor analysis of differential forms")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random samples per probabilistic zero test.
    #[arg(long, global = true, default_value_t = 16)]
    samples: usize,
    /// Relative threshold below which a float sample counts as zero.
    #[arg(long, global = true, default_value_t = 1e-9)]
    threshold: f64,
    /// Evaluation point such as "x=1, t=1/2"; repeatable.
    #[arg(long, global = true, value_name = "BINDINGS")]
    at: Vec<String>,
    #[arg(long, global = true, value_name = "NAME")]
    form: Option<String>,
    #[arg(long, global = true, value_name = "NAME")]
    field: Option<String>,
    /// Replace the density of the selected field.
    #[arg(long, global = true, value_name = "EXPR")]
    rho: Option<String>,
    /// Repeat the analysis with N derived seeds and report whether verdicts agree.
    #[arg(long, global = true, value_name = "N")]
    sweep: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pfaff dimension and thermodynamic class.
    Classify { input: String, #[command(flatten)] common: Common },
    /// Pfaff sequence with per-element zero verdicts.
    Sequence { input: String, #[command(flatten)] common: Common },
    /// Torsion vector, dissipation coefficient and torsion identities.
    Torsion { input: String, #[command(flatten)] common: Common },
    /// First-law decomposition along a direction field.
    Process { input: String, #[command(flatten)] common: Common },
    /// Eigendirections of the 2-form at a point.
    Spinors { input: String, #[command(flatten)] common: Common },
    /// Navier-Stokes residual, work decomposition and hydrodynamic torsion.
    Ns {
        input: String,
        /// Drop the grad div v terms.
        #[arg(long)]
        incompressible: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Top Pfaffian of the Cartan-Hilbert action.
    CartanHilbert {
        /// System with a `run cartan_hilbert` declaration; omit to use --n and --lagrangian.
        input: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Lagrangian over q, v, t (q1.., v1.. when n = 2); defaults to the free particle.
        #[arg(long)]
        lagrangian: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run every request of a registered example.
    Example { name: String, #[command(flatten)] common: Common },
    /// List registered examples.
    ListExamples,
}

fn options(c: &Common, incompressible: bool) -> Options {
    Options {
        seed: c.seed,
        samples: c.samples,
        threshold: c.threshold,
        at: c.at.clone(),
        form: c.form.clone(),
        field: c.field.clone(),
        rho: c.rho.clone(),
        sweep: c.sweep,
        incompressible,
    }
}

fn on_input(cmd: Command, input: &str, common: &Common, incompressible: bool) -> Result<(Report, Common), CliError> {
    let sys = if cmd == Command::Example { registry::load_example(input)? } else { load_input(input)? };
    Ok((analyze(cmd, input, &sys, &options(common, incompressible))?, common.clone()))
}

fn run(cli: Cli) -> Result<Option<(Report, Common)>, CliError> {
    let out = match cli.command {
        Cmd::Classify { input, common } => on_input(Command::Classify, &input, &common, false)?,
        Cmd::Sequence { input, common } => on_input(Command::Sequence, &input, &common, false)?,
        Cmd::Torsion { input, common } => on_input(Command::Torsion, &input, &common, false)?,
        Cmd::Process { input, common } => on_input(Command::Process, &input, &common, false)?,
        Cmd::Spinors { input, common } => on_input(Command::Spinors, &input, &common, false)?,
        Cmd::Ns { input, incompressible, common } => on_input(Command::Ns, &input, &common, incompressible)?,
        Cmd::CartanHilbert { input: Some(input), common, .. } => {
            on_input(Command::CartanHilbert, &input, &common, false)?
        }
        Cmd::CartanHilbert { input: None, n, lagrangian, common } => {
            (cartan_hilbert_report(n, lagrangian.as_deref(), &options(&common, false))?, common)
        }
        Cmd::Example { name, common } => on_input(Command::Example, &name, &common, false)?,
        Cmd::ListExamples => {
            let mut stdout = std::io::stdout().lock();
            for n in registry::names() {
                let _ = writeln!(stdout, "{n}");
            }
            return Ok(None);
        }
    };
    Ok(Some(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, common) = match run(cli) {
        Ok(Some(r)) => r,
        Ok(None) => return ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let json = report.to_json();
    if let Some(path) = &common.out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: {path}: {e}");
            return ExitCode::from(1);
        }
    }
    let text = if common.json { json } else { report.to_text() };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &report.failures {
            eprintln!("analysis failure: {f}");
        }
        ExitCode::from(2)
    }
}
