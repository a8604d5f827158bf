use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use invnorm::config::RunConfig;
use invnorm::run::{certify, certify_and_write, summary, Progress};
use invnorm::selftest::{self, Fault};
use invnorm::files;

/// Certified bounds for the inverse of perturbed Laplace operators on the
/// unit box.
#[derive(Parser)]
#[command(name = "invnorm", version)]
struct Cli {
    /// Worker threads for the Newton multi-start (overrides the config).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print the default configuration and exit.
    #[arg(long)]
    dump_defaults: bool,

    /// Stage progress on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline and write a certificate. Exit 0 when a norm bound
    /// was certified, 2 when none was (e.g. no spectral gap), 1 on error.
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit one of the two result tables as CSV from the certificates in a
    /// run directory; with --config, certify each tabulated N first.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long, default_value = "runs")]
        dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suite; exit 0 iff every check passes.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    Gram,
}

fn load(path: &PathBuf, threads: Option<usize>) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(t) = threads {
        cfg.run.threads = t;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn table(which: u8, dir: &PathBuf, config: Option<&PathBuf>, out: Option<&PathBuf>, cli: &Cli) -> Result<u8> {
    if let Some(path) = config {
        let cfg = load(path, cli.threads)?;
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for &n in &cfg.table.n_cert {
            let mut progress = Progress::new(cli.verbose);
            let o = certify(&cfg, n, &mut progress)?;
            eprintln!("{}", summary(&o.certificate));
            files::write_certificate(&dir.join(format!("certificate-N{n}.json")), &o.certificate)?;
        }
    }
    let certs: Vec<_> = files::collect_certificates(dir)?.into_iter().map(|(_, c)| c).collect();
    match out {
        Some(p) => {
            let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            files::write_table(f, which, &certs)?;
        }
        None => files::write_table(std::io::stdout().lock(), which, &certs)?,
    }
    Ok(0)
}

fn main_inner(cli: &Cli) -> Result<u8> {
    if cli.dump_defaults {
        print!("{}", RunConfig::dump_defaults());
        return Ok(0);
    }
    match &cli.command {
        None => bail!("no command given (try --help)"),
        Some(Command::Certify { config, out }) => {
            let cfg = load(config, cli.threads)?;
            let mut progress = Progress::new(cli.verbose);
            let o = certify_and_write(&cfg, out.as_deref(), &mut progress)?;
            println!("{}", summary(&o.certificate));
            if let Some(e) = &o.certificate.refinement_error {
                eprintln!("refinement skipped: {e}");
            }
            Ok(o.exit_code())
        }
        Some(Command::Table { which, dir, config, out }) => table(*which, dir, config.as_ref(), out.as_ref(), cli),
        Some(Command::Selftest { seed, inject_fault }) => {
            let ctx = selftest::Context { seed: *seed, fault: inject_fault.map(|FaultArg::Gram| Fault::Gram) };
            let results = selftest::run(&ctx, |r| println!("{}", r.line()));
            let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
            if failed.is_empty() {
                println!("all {} checks passed", results.len());
                Ok(0)
            } else {
                let stages: Vec<&str> = failed.iter().map(|r| r.stage).collect();
                println!("{} of {} checks failed (stages: {})", failed.len(), results.len(), stages.join(", "));
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    // usage errors exit with 1; 2 is reserved for runs without a bound
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match main_inner(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
