use clap::{Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use uowc_secrecy::sweep::{compare_report, load_config, run_sweep, Engine, RunOptions};
use uowc_secrecy::{Error, Result};

#[derive(Parser)]
#[command(
    version,
    about = "Secrecy metrics of a mixed RF/underwater-optical relay link"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the sweep described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides the config's sample count.
        #[arg(long)]
        mc_samples: Option<usize>,
        /// Comma-separated subset of analytic,mc. Overrides the config.
        #[arg(long, value_delimiter = ',')]
        engines: Option<Vec<String>>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Report ASC in bits instead of nats.
        #[arg(long)]
        bits: bool,
        /// Fill the ms column.
        #[arg(long)]
        timing: bool,
        /// Write the comparison report as JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

enum Outcome {
    Clean,
    Flagged,
    RowFailures,
}

#[allow(clippy::too_many_arguments)]
fn run(
    config: PathBuf,
    seed: u64,
    mc_samples: Option<usize>,
    engines: Option<Vec<String>>,
    out: Option<PathBuf>,
    format: Format,
    bits: bool,
    timing: bool,
    report: Option<PathBuf>,
) -> Result<Outcome> {
    let mut spec = load_config(&config)?;
    if let Some(e) = engines {
        let e = e
            .iter()
            .map(|s| s.parse::<Engine>())
            .collect::<Result<Vec<_>>>()?;
        spec = spec.with_engines(e)?;
    }
    if let Some(n) = mc_samples {
        spec = spec.with_mc_samples(n)?;
    }
    let table = run_sweep(&spec, seed, RunOptions { timing })?;
    let shown = if bits { table.to_bits() } else { table.clone() };
    let sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => shown.write_csv(sink)?,
        Format::Jsonl => shown.write_jsonl(sink)?,
    }

    let mut outcome = Outcome::Clean;
    if spec.engines().len() == 2 {
        match compare_report(&table) {
            Ok(r) => {
                eprint!("{}", r.render_text());
                if let Some(p) = report {
                    std::fs::write(p, r.to_json())?;
                }
                if r.flagged > 0 {
                    outcome = Outcome::Flagged;
                }
            }
            Err(Error::MissingEngine) => eprintln!("no point has results from both engines"),
            Err(e) => return Err(e),
        }
    }
    let failed = table.rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} row(s) failed; see the status column");
        outcome = Outcome::RowFailures;
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Run {
            config,
            seed,
            mc_samples,
            engines,
            out,
            format,
            bits,
            timing,
            report,
        } => run(
            config, seed, mc_samples, engines, out, format, bits, timing, report,
        ),
    };
    match r {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Flagged) => ExitCode::from(2),
        Ok(Outcome::RowFailures) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
