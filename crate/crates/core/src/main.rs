use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sft_perturb::charpoly::{perturbed_charpoly_one, perturbed_charpoly_two};
use sft_perturb::higher_block::{invariant_basis, BlockContext, ForbidSet};
use sft_perturb::scan::{scan_bounds, write_scan, ScanConfig, ScanMode, DEFAULT_BUDGET};
use sft_perturb::sft::{validate_sft, SftSpec};
use sft_perturb::spectra::{pf_eigenvalue, shift_spectrum};
use sft_perturb::verify::verify_suite;
use sft_perturb::Error;

#[derive(Parser)]
#[command(name = "sft-perturb", version, about = "Forbidden-word perturbations of subshifts of finite type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a shift file and print its structural data.
    Validate { file: PathBuf },
    /// Print lambda0, the entropy log(lambda0), and the gap radius.
    Entropy { file: PathBuf },
    /// Characteristic polynomial data after forbidding one or two words.
    Forbid {
        file: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(short = 'w', long = "word", required = true, num_args = 1)]
        words: Vec<String>,
    },
    /// Invariant basis and interaction case of a word pair.
    Classify {
        file: PathBuf,
        #[arg(short = 'w', long = "word", required = true, num_args = 1)]
        words: Vec<String>,
    },
    /// Spectral scan over all (or a seeded sample of) forbidden sets.
    Scan {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        kmin: usize,
        #[arg(long)]
        kmax: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the structural and oracle checks up to block length `kmax`.
    Verify {
        file: PathBuf,
        #[arg(long)]
        kmax: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    One,
    Two,
}

enum Failure {
    Input(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Structural(_) | Error::Rank(_) => Failure::Verification(e.to_string()),
            other => Failure::Input(other),
        }
    }
}

fn load(path: &Path) -> Result<SftSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    Ok(text.parse()?)
}

fn forbid_set(spec: &SftSpec, words: &[String]) -> Result<ForbidSet, Failure> {
    if words.len() > 2 {
        return Err(Error::ForbidSetSize.into());
    }
    let parsed = words.iter().map(|w| spec.parse_word(w)).collect::<Result<Vec<_>, _>>()?;
    Ok(ForbidSet::new(spec, parsed)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => {
            let spec = load(&file)?;
            let d = validate_sft(&spec)?;
            println!("symbols: {}", spec.symbols().join(" "));
            println!("irreducible: {}", d.irreducible);
            println!("period: {}", d.period_s);
            println!("cycle: {}", d.is_cycle);
            println!("lambda0: {:.12}", d.lambda0);
        }
        Command::Entropy { file } => {
            let spec = load(&file)?;
            validate_sft(&spec)?;
            let s = shift_spectrum(&spec)?;
            println!("lambda0: {:.12} +/- {:.1e}", s.lambda0.value, s.lambda0.radius);
            println!("entropy: {:.12}", s.lambda0.value.ln());
            println!("second modulus: {:.12}", s.second_modulus);
            println!("rho: {:.12}", s.rho);
        }
        Command::Forbid { file, k, words } => {
            let spec = load(&file)?;
            validate_sft(&spec)?;
            let c = forbid_set(&spec, &words)?;
            if c.k() != k {
                return Err(Error::WordLength { word: words[0].clone(), expected: k + 1, found: c.k() + 1 }.into());
            }
            let x = match c.words() {
                [w] => perturbed_charpoly_one(&spec, k, w)?,
                _ => perturbed_charpoly_two(&spec, k, &c)?,
            };
            let lambda1 = pf_eigenvalue(&x.x)?;
            println!("X(t) = {}", x.x);
            println!("Delta(t) = {}", x.delta);
            println!("M(t) = {}", x.m_poly);
            println!("m = {}", x.nilpotent_exponent);
            println!("lambda1 = {:.12} +/- {:.1e}", lambda1.value, lambda1.radius);
        }
        Command::Classify { file, words } => {
            let spec = load(&file)?;
            validate_sft(&spec)?;
            let c = forbid_set(&spec, &words)?;
            if c.words().len() != 2 {
                return Err(Error::ForbidSetSize.into());
            }
            let ctx = BlockContext::new(&spec, c.k())?;
            let basis = invariant_basis(&spec, c.k(), &c)?;
            print!("{}", basis.describe(&spec));
            let checks = ctx.pair_checks(&basis)?;
            for check in &checks {
                println!("{} {}", if check.passed { "PASS" } else { "FAIL" }, check.name);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::Verification(format!("{failed} support conditions failed")));
            }
        }
        Command::Scan { file, mode, kmin, kmax, budget, seed, out } => {
            let spec = load(&file)?;
            validate_sft(&spec)?;
            let mode = match mode {
                Mode::One => ScanMode::OneWord,
                Mode::Two => ScanMode::TwoWord,
            };
            let config = ScanConfig { mode, k_min: kmin, k_max: kmax, budget, seed };
            let output = scan_bounds(&spec, &config)?;
            write_scan(&output, &out)?;
            for s in &output.meta.summaries {
                println!(
                    "k={} instances={}{} max_scaled_one={:.6} max_scaled_two={:.6} min_lambda1={:.6}",
                    s.k,
                    s.instances,
                    if s.exhaustive { "" } else { " (sampled)" },
                    s.max_scaled_one,
                    s.max_scaled_two,
                    s.min_lambda1
                );
            }
            if let Some(e) = &output.meta.envelope {
                println!(
                    "envelope {:?} max {:.6} vs {:?} max {:.6}: {}",
                    e.early,
                    e.early_max,
                    e.late,
                    e.late_max,
                    if e.holds { "holds" } else { "fails" }
                );
            }
            println!("wrote {}", out.display());
        }
        Command::Verify { file, kmax } => {
            let spec = load(&file)?;
            validate_sft(&spec)?;
            let report = verify_suite(&spec, kmax)?;
            print!("{report}");
            if !report.passed() {
                return Err(Failure::Verification(format!("{} checks failed", report.failed_checks().count())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
