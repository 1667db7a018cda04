use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpde::analysis::Sector;
use qpde::circuits::CircuitMode;
use qpde::evolution::EvolutionPath;
use qpde_cli::commands::{cmd_aem, cmd_bpde_scan, cmd_circuit, cmd_spectrum, Overrides};
use qpde_cli::manifest::RunManifest;
use qpde_cli::CliError;

/// Phase-difference estimation of electronic energy gaps on a simulated register.
#[derive(Parser, Debug)]
#[command(name = "qpde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact eigenvalues and same-particle-number gaps.
    Spectrum(Common),
    /// Phase difference estimation of E(phi1) - E(phi0).
    Qpde(Common),
    /// Standard phase estimation of E(phi0).
    Qpe(Common),
    /// Phase difference estimation without the inverse state preparation.
    QpdeNaive(Common),
    /// Single-ancilla Prob(0) scan over trial gaps.
    BpdeScan(Common),
    /// Step-size extrapolation of the QPDE gap.
    Aem(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PathArg {
    Gate,
    Compiled,
    Exact,
}

impl From<PathArg> for EvolutionPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Gate => EvolutionPath::GateLevel,
            PathArg::Compiled => EvolutionPath::Compiled,
            PathArg::Exact => EvolutionPath::Exact,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Run manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Time-evolution implementation.
    #[arg(long, value_enum)]
    path: Option<PathArg>,
    /// Sample one outcome and decode it.
    #[arg(long)]
    single_shot: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Bin to track across step sizes (aem).
    #[arg(long)]
    peak_bin: Option<usize>,
    /// Output directory, overriding the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sector filter as `N,2Sz` (spectrum).
    #[arg(long, value_parser = parse_sector, allow_hyphen_values = true)]
    sector: Option<Sector>,
}

fn parse_sector(s: &str) -> Result<Sector, String> {
    let (n, sz) = s
        .split_once(',')
        .ok_or_else(|| format!("expected N,2Sz, got {s:?}"))?;
    Ok(Sector {
        n_particles: n.trim().parse().map_err(|e| format!("particle number {n:?}: {e}"))?,
        two_sz: sz.trim().parse().map_err(|e| format!("2Sz {sz:?}: {e}"))?,
    })
}

fn prepare(common: &Common) -> Result<(RunManifest, Overrides), CliError> {
    let overrides = Overrides {
        path: common.path.map(Into::into),
        single_shot: common.single_shot,
        seed: common.seed,
        peak_bin: common.peak_bin,
        out: common.out.clone(),
        sector: common.sector,
    };
    let mut manifest = RunManifest::load(&common.manifest)?;
    overrides.apply(&mut manifest);
    Ok((manifest, overrides))
}

fn run(cli: Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Spectrum(c) => cmd_spectrum(prepare(c)?.0),
        Command::Qpde(c) => {
            let (m, o) = prepare(c)?;
            cmd_circuit(m, CircuitMode::Qpde, &o)
        }
        Command::Qpe(c) => {
            let (m, o) = prepare(c)?;
            cmd_circuit(m, CircuitMode::Qpe, &o)
        }
        Command::QpdeNaive(c) => {
            let (m, o) = prepare(c)?;
            cmd_circuit(m, CircuitMode::QpdeNaive, &o)
        }
        Command::BpdeScan(c) => cmd_bpde_scan(prepare(c)?.0),
        Command::Aem(c) => {
            let (m, o) = prepare(c)?;
            cmd_aem(m, &o)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
