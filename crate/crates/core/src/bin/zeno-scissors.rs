use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use zeno_scissors::experiment::{
    cmd_fig2, cmd_sweep, cmd_truncate, cmd_verify, write_output, ExperimentConfig, Mode, Overrides, VerifyHooks,
};
use zeno_scissors::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Emission probability vs stage count for the three reference probes
    Fig2,
    /// Emission probability vs stage count for one probe
    Sweep,
    /// Closed form vs full-space propagation, plus conservation checks
    Verify,
    /// Post-selected state fidelity with the vacuum-stripped probe
    Truncate,
}

#[derive(Debug, Parser)]
#[command(name = "zeno-scissors", version, about = "Vacuum truncation by Kerr-interrupted n-photon generation")]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Target Fock number of the signal mode
    #[arg(long = "n")]
    n: Option<usize>,

    /// Kerr phase per photon pair per stage
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,

    /// Probe state: fock:M | coherent:RE[,IM] | squeezed:EPS,ALPHA | custom:@FILE
    #[arg(long, allow_hyphen_values = true)]
    probe: Option<String>,

    /// Stage counts, inclusive: A:B or A:B:STEP
    #[arg(long = "N-range", value_name = "A:B[:S]")]
    n_range: Option<String>,

    /// Signal-mode cutoff for full-space runs (at least 2n+2)
    #[arg(long)]
    a_cutoff: Option<usize>,

    /// Probe-mode cutoff
    #[arg(long)]
    b_cutoff: Option<usize>,

    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// TOML file with any of: n, kappa, probe, N_range, a_cutoff, b_cutoff, out
    #[arg(long)]
    config: Option<PathBuf>,

    /// Perturb kappa on the closed-form path of `verify` (negative control)
    #[arg(long, hide = true, allow_hyphen_values = true, default_value_t = 0.0)]
    corrupt_kappa: f64,
}

fn exit_for(err: &Error) -> ExitCode {
    match err {
        Error::Leakage { .. } => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let flags = Overrides {
        n: cli.n,
        kappa: cli.kappa,
        probe: cli.probe,
        n_range: cli.n_range,
        a_cutoff: cli.a_cutoff,
        b_cutoff: cli.b_cutoff,
        out: cli.out,
    };
    let file = match &cli.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let mode = match cli.command {
        Command::Fig2 => Mode::Fig2,
        Command::Sweep => Mode::Sweep,
        Command::Verify => Mode::Verify,
        Command::Truncate => Mode::Truncate,
    };
    let config = ExperimentConfig::resolve(mode, flags.or(file))?;
    let out = config.output_path.as_deref();
    match mode {
        Mode::Fig2 => write_output(out, &cmd_fig2(&config)?)?,
        Mode::Sweep => write_output(out, &cmd_sweep(&config)?)?,
        Mode::Truncate => write_output(out, &cmd_truncate(&config)?)?,
        Mode::Verify => {
            let hooks = VerifyHooks {
                kappa_corruption: cli.corrupt_kappa,
            };
            let report = cmd_verify(&config, hooks)?;
            write_output(out, &report.render())?;
            if !report.passed() {
                for c in report.checks.iter().filter(|c| !c.passed()) {
                    eprintln!(
                        "verify: {} deviation {:.3e} exceeds {:.0e} at {}",
                        c.name, c.max_deviation, c.tolerance, c.worst_case
                    );
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("zeno-scissors: {err}");
            exit_for(&err)
        }
    }
}
