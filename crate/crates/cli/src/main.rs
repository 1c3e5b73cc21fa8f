use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sta_cli::commands;
use sta_cli::{CliError, Method, ProtocolFile};

#[derive(Parser)]
#[command(name = "sta", version, about = "Fast frictionless frequency changes of a harmonic trap")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Protocol file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Directory for CSV and JSON outputs; created if missing.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate b(t) and ω²(t) of the invariant-based design.
    Design(Common),
    /// Propagate each initial state and write trajectories.
    Propagate(Common),
    /// Raman parameter chain and coupling mismatch report.
    Raman(Common),
    /// Run several methods on the same states and grid.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Comma-separated list, at least two of ii, tt, tt-bare, plain.
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Design(c) | Command::Propagate(c) | Command::Raman(c) => c,
        Command::Compare { common, .. } => common,
    };
    let file = ProtocolFile::read(&common.input)?;
    let out = &common.out_dir;
    let say = |line: String| {
        if !common.quiet {
            println!("{line}");
        }
    };
    match &cli.command {
        Command::Design(_) => {
            let s = commands::design(&file, out)?;
            say(format!(
                "gamma = {:.6}, min omega^2 = {:.6e} at t = {:.6}, {} expulsive interval(s)",
                s.gamma,
                s.schedule.min_omega_sq.value,
                s.schedule.min_omega_sq.t,
                s.schedule.expulsive_intervals.len()
            ));
        }
        Command::Propagate(_) => {
            let s = commands::propagate(&file, out)?;
            for st in &s.states {
                say(format!(
                    "{} n={}: fidelity {:.10}, P_n(t_f) {:.10}, max population drift {:.3e}",
                    s.method, st.n, st.final_fidelity, st.final_population, st.max_population_deviation
                ));
            }
        }
        Command::Raman(_) => {
            let r = commands::raman(&file, out)?;
            say(format!(
                "Omega/2 = {:.6e}, s = {:.6e}, sideband coefficient {:.6e}, resonance_ok {}, phase_ok {}",
                r.effective.half_rabi(),
                r.effective.stark,
                r.sideband.coefficient,
                r.sideband.resonance_ok,
                r.sideband.phase_ok
            ));
            for note in &r.notes {
                say(note.clone());
            }
        }
        Command::Compare { methods, .. } => {
            let methods = methods.iter().map(|m| Method::parse(m)).collect::<Result<Vec<_>, _>>()?;
            let s = commands::compare(&file, &methods, out)?;
            for m in &s.methods {
                for st in &m.states {
                    say(format!("{:>7} n={}: fidelity {:.10}", m.method, st.n, st.final_fidelity));
                }
            }
        }
    }
    say(format!("wrote {}", out.display()));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = sta_cli::threads_from_env().and_then(|threads| match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?
            .install(|| run(cli)),
        None => run(cli),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sta: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
