use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dyadic_verify::experiments::{counterexample, kernels, l1norms, lemma3, strongsum, theorem1a};
use dyadic_verify::{emit, ExperimentReport, Format, HarnessResult, PhiSchedule};

#[derive(Args)]
struct Output {
    /// Summability order α in (0, 1].
    #[arg(long, default_value_t = 0.5, global = true)]
    alpha: f64,
    /// Report format: json or csv.
    #[arg(long, default_value = "json", global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form Dirichlet/Fejér kernels against summation, and majorization of K_n^α.
    Kernels {
        #[arg(long, default_value_t = 8)]
        resolution: u32,
        /// Largest order; defaults to 2^resolution.
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// L1 norms of K_n^α with a bounded-tail verdict.
    L1norms {
        #[arg(long, default_value_t = 12)]
        resolution: u32,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = 1.05)]
        tail_ratio: f64,
    },
    /// Kernel integrals over I_M on the complement classes.
    Lemma3 {
        /// Single resolution, overriding --m-list.
        #[arg(long, conflicts_with = "m_list")]
        resolution: Option<u32>,
        #[arg(long, value_delimiter = ',', default_value = "4,5,6")]
        m_list: Vec<u32>,
        #[arg(long)]
        n_probes: Option<usize>,
        #[arg(long, default_value_t = 2)]
        working_extra: u32,
        #[arg(long, default_value_t = 2.0)]
        stability_factor: f64,
    },
    /// Random atoms: pointwise coset bounds and the weighted maximal integral.
    Theorem1a {
        #[arg(long, conflicts_with = "m_list")]
        resolution: Option<u32>,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6")]
        m_list: Vec<u32>,
        /// Largest order; defaults to 2^(M+2) per resolution.
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        stability_factor: f64,
    },
    /// The f_nk family: exact identities, band bounds, norm decay, divergence statistic.
    Counterexample {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        nk_list: Vec<u32>,
        /// log-power:<beta>, log-over-loglog or table:<v1>;<v2>;... (repeatable).
        #[arg(long)]
        phi: Vec<String>,
        #[arg(long, default_value_t = 2.0)]
        stability_factor: f64,
        #[arg(long, default_value_t = 0.1)]
        slope_tolerance: f64,
    },
    /// Logarithmic strong means of random atoms.
    Strongsum {
        #[arg(long, conflicts_with = "m_list")]
        resolution: Option<u32>,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        m_list: Vec<u32>,
        #[arg(long, default_value_t = 512)]
        nmax: usize,
        #[arg(long, default_value_t = 50)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw atom values at this resolution, then refine; defaults to log2(nmax).
        #[arg(long)]
        atom_resolution: Option<u32>,
        #[arg(long, default_value_t = 1.2)]
        plateau_ratio: f64,
        #[arg(long, default_value_t = 2.0)]
        stability_factor: f64,
    },
}

/// Verification experiments for (C,α) means on the dyadic group.
///
/// Exit status: 0 when the verdict passes, 2 when it fails, 1 on bad
/// parameters or I/O errors.
#[derive(Parser)]
#[command(name = "dyadic-cesaro", version)]
struct Cli {
    #[command(flatten)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

fn resolutions(single: Option<u32>, list: Vec<u32>) -> Vec<u32> {
    single.map_or(list, |m| vec![m])
}

fn run(command: Command, alpha: f64) -> HarnessResult<ExperimentReport> {
    match command {
        Command::Kernels { resolution, nmax } => kernels::run(&kernels::KernelsParams {
            alpha,
            resolution,
            n_max: nmax.unwrap_or(1usize << resolution.min(usize::BITS - 1)),
        }),
        Command::L1norms { resolution, nmax, tail_ratio } => l1norms::run(&l1norms::L1NormsParams {
            alpha,
            resolution,
            n_max: nmax.unwrap_or(1usize << resolution.min(usize::BITS - 1)),
            tail_ratio,
        }),
        Command::Lemma3 { resolution, m_list, n_probes, working_extra, stability_factor } => {
            lemma3::run(&lemma3::Lemma3Params {
                alpha,
                resolutions: resolutions(resolution, m_list),
                n_probes,
                working_extra,
                stability_factor,
            })
        }
        Command::Theorem1a { resolution, m_list, nmax, seeds, seed, stability_factor } => {
            theorem1a::run(&theorem1a::Theorem1aParams {
                alpha,
                resolutions: resolutions(resolution, m_list),
                n_max: nmax,
                seeds,
                seed,
                stability_factor,
            })
        }
        Command::Counterexample { nk_list, phi, stability_factor, slope_tolerance } => {
            let phis = if phi.is_empty() {
                PhiSchedule::defaults()
            } else {
                phi.iter().map(|s| s.parse()).collect::<HarnessResult<_>>()?
            };
            counterexample::run(&counterexample::CounterexampleParams {
                alpha,
                nk_list,
                phis,
                stability_factor,
                slope_tolerance,
            })
        }
        Command::Strongsum {
            resolution,
            m_list,
            nmax,
            seeds,
            seed,
            atom_resolution,
            plateau_ratio,
            stability_factor,
        } => {
            strongsum::run(&strongsum::StrongSumParams {
                alpha,
                resolutions: resolutions(resolution, m_list),
                n_max: nmax,
                seeds,
                seed,
                atom_resolution,
                plateau_ratio,
                stability_factor,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let Cli { output, command } = cli;
    let report = match run(command, output.alpha) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&report, output.format, output.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if report.verdict.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
