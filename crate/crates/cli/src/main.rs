//! `thermoforge` — experiment runner for the shift-dynamics laboratory.
//!
//! Exit codes: 0 success, 1 configuration error, 2 resource cap exceeded,
//! 3 numerical contract violation.

mod config;
mod scenarios;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::{CliError, ErrorKind, Overrides, RawConfig};

#[derive(Parser)]
#[command(
    name = "thermoforge",
    version,
    about = "Shift-dynamics laboratory: pressure, fluctuation relations, rate functions and error exponents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario from a config file and emit CSV/JSON artifacts.
    Run(RunArgs),
    /// Run the exact-identity suite on the bundled fixtures (fast CI entry).
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (flat key-value with sections).
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario named in the config.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory (overrides experiment.output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Thread budget; recorded in the manifest (kernels are single-threaded
    /// and deterministic).
    #[arg(long)]
    threads: Option<usize>,
    /// Global enumeration cap on ℓⁿ (also settable via THERMOFORGE_CAP).
    #[arg(long)]
    cap: Option<u128>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional config; only seed/output_dir are read from it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the report (none: print only).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest period enumerated per fixture.
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Negative control: perturb one law weight and expect the suite to fail.
    #[arg(long)]
    inject_fault: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thermoforge: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::config(format!("config `{}`: {e}", args.config.display())))?;
    let base = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let raw = RawConfig::parse(&text, &base)?;
    let overrides = Overrides {
        scenario: args.scenario,
        out: args.out,
        seed: args.seed,
        threads: args.threads,
        cap: args.cap,
    };
    let exp = config::resolve(&raw, &overrides)?;
    let artifacts = scenarios::run(&exp)?;
    write_artifacts(&exp.output_dir, &exp.canonical, &exp, &artifacts)?;
    println!(
        "scenario `{}` wrote {} artifact(s) to {}",
        exp.scenario.as_str(),
        artifacts.len() + 1,
        exp.output_dir.display()
    );
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let mut seed = args.seed;
    let mut out = args.out;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("config `{}`: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let raw = RawConfig::parse(&text, &base)?;
        let over = Overrides::default();
        // only the seed and output directory matter for verify
        if seed.is_none() {
            if let Ok(exp) = config::resolve(&raw, &over) {
                seed = Some(exp.seed);
                if out.is_none() {
                    out = Some(exp.output_dir);
                }
            }
        }
    }
    let seed = seed.unwrap_or(42);
    let (table, files, all_passed) = scenarios::verify(seed, args.n_max, args.inject_fault)?;
    print!("{table}");
    if let Some(dir) = out {
        let canonical = format!(
            "verify.inject_fault = {}\nverify.n_max = {}\nverify.seed = {seed}\n",
            args.inject_fault, args.n_max
        );
        write_manifest_and_files(&dir, &canonical, seed, "verify", 1, &files)?;
    }
    if all_passed {
        println!("verify: all identities hold");
        Ok(())
    } else {
        Err(CliError {
            kind: ErrorKind::Numerical,
            message: "verify: at least one exact identity failed".into(),
        })
    }
}

fn write_artifacts(
    dir: &Path,
    canonical: &str,
    exp: &config::Experiment,
    files: &scenarios::Artifacts,
) -> Result<(), CliError> {
    write_manifest_and_files(dir, canonical, exp.seed, exp.scenario.as_str(), exp.threads, files)
}

fn write_manifest_and_files(
    dir: &Path,
    canonical: &str,
    seed: u64,
    scenario: &str,
    threads: usize,
    files: &scenarios::Artifacts,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("output dir `{}`: {e}", dir.display())))?;
    let mut checksums: BTreeMap<String, String> = BTreeMap::new();
    for (name, contents) in files {
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::config(format!("writing `{}`: {e}", path.display())))?;
        checksums.insert(name.clone(), sha256_hex(contents.as_bytes()));
    }
    let manifest = serde_json::json!({
        "tool": "thermoforge",
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": scenario,
        "seed": seed,
        "threads": threads,
        "config_hash": sha256_hex(canonical.as_bytes()),
        "files": checksums,
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, format!("{manifest:#}\n"))
        .map_err(|e| CliError::config(format!("writing `{}`: {e}", path.display())))?;
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}
