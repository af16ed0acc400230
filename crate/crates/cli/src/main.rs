use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use convdiff::fem2d::DeltaStrategy;
use convdiff::harness::{compare, run_convergence, Case, CompareConfig, ConvergenceTable, ExperimentConfig, Scheme};
use convdiff::mesh::MeshKind;
use convdiff::problems::BuiltinProblem;
use convdiff::Error;

/// Discretizations of singularly perturbed convection-diffusion problems.
#[derive(Debug, Parser)]
#[command(name = "convdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem and write plot data (`x u` or `x y u` lines).
    Solve {
        /// p1 or mms2d.
        #[arg(long)]
        problem: String,
        /// central, upwind, ilin, fd2d-upwind, fem-galerkin or fem-sdfem.
        #[arg(long)]
        scheme: String,
        /// uniform, shishkin or bakhvalov.
        #[arg(long)]
        mesh: String,
        /// Number of mesh intervals (per axis in 2D).
        #[arg(long = "N")]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        /// galerkin_zero, coarse_half_h or user_constant=<value> (fem-sdfem only).
        #[arg(long)]
        delta: Option<String>,
        /// Convection vector of mms2d as `b1,b2`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        beta: Option<Vec<f64>>,
        /// Plot data file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a convergence sweep described by a JSON config and write a CSV table.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run two schemes over the same sweep and write a joined CSV table.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> convdiff::Result<ExitCode> {
    match command {
        Command::Solve { problem, scheme, mesh, n, eps, delta, beta, out } => {
            let mut problem = BuiltinProblem::from_name(&problem)?;
            if let Some(b) = beta {
                if b.len() != 2 {
                    return Err(Error::InvalidArgument(format!("--beta needs two components, got {}", b.len())));
                }
                match &mut problem {
                    BuiltinProblem::Mms2d { b: slot } => *slot = [b[0], b[1]],
                    BuiltinProblem::P1 => {
                        return Err(Error::InvalidArgument("--beta only applies to mms2d".into()));
                    }
                }
            }
            let case = Case {
                problem,
                scheme: scheme.parse::<Scheme>()?,
                mesh: mesh.parse::<MeshKind>()?,
                n,
                eps,
                delta: delta.as_deref().map(str::parse::<DeltaStrategy>).transpose()?,
            };
            let solved = case.solve()?;
            with_output(out.as_deref(), |w| solved.solution.write_text(w))?;
            match solved.max_error() {
                Ok(e) => eprintln!("max nodal error: {e:e}"),
                Err(Error::MissingExactSolution) => {}
                Err(e) => return Err(e),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let table = run_convergence(&cfg)?;
            let target = out.or(cfg.output.clone());
            with_output(target.as_deref(), |w| table.write_csv(w))?;
            Ok(report_failures(&[&table]))
        }
        Command::Compare { config, out } => {
            let cfg = CompareConfig::load(&config)?;
            let comparison = compare(&cfg)?;
            let target = out.or(cfg.output.clone());
            with_output(target.as_deref(), |w| {
                w.write_all(comparison.to_csv().as_bytes())?;
                Ok(())
            })?;
            let [a, b] = &comparison.tables;
            Ok(report_failures(&[a, b]))
        }
    }
}

/// Rows that failed are left blank in the CSV; list them and exit with 2.
fn report_failures(tables: &[&ConvergenceTable]) -> ExitCode {
    let mut any = false;
    for t in tables {
        for row in t.failures() {
            any = true;
            eprintln!(
                "{} eps={} N={}: {}",
                t.scheme,
                row.eps,
                row.n,
                row.failure.as_deref().unwrap_or_default()
            );
        }
    }
    if any {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn with_output(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> convdiff::Result<()>,
) -> convdiff::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
