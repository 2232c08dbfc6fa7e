use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use permfree::harness::{
    self, emit_report, emit_table, DemoConfig, ExperimentConfig, Format, MSizes, ProbeConfig, ReportRow, StudyMode,
};
use permfree::perm::{enumerate_nc_pairings, enumerate_noncrossing, enumerate_pairings, enumerate_permutations};
use permfree::{Error, Result};

/// Limit moments, exact finite-N expectations and Monte Carlo estimates for
/// words in random permutation, Gaussian and Wishart matrices.
#[derive(Parser)]
#[command(name = "permfree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limit moments predicted by asymptotic freeness.
    Limit(Common),
    /// Finite-N expectations, exact or with sampled permutation averages.
    Exact(Common),
    /// Full-matrix Monte Carlo estimates.
    Mc(Common),
    /// Limit, finite-N and optionally Monte Carlo values side by side.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Add a full-matrix Monte Carlo row per size.
        #[arg(long)]
        with_mc: bool,
    },
    /// Var tr and N²·Var tr across sizes.
    Variance(Common),
    /// Count or list permutations of a given kind.
    Enumerate {
        #[arg(long, value_enum, default_value_t = Kind::Noncrossing)]
        kind: Kind,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        n: Vec<usize>,
        /// Print every permutation in cycle notation instead of counts.
        #[arg(long)]
        list: bool,
    },
    /// Run a named demonstration.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(harness::DEMOS))]
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Averages of fixed-point counts of permutation words across sizes.
    Probe {
        /// Word such as g1.g2^-1 (repeatable).
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        perm_samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "auto")]
        mode: StudyMode,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    All,
    Pairings,
    Noncrossing,
    NcPairings,
}

#[derive(Args)]
struct Output {
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Number of generator families.
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Monomial such as "G1 U[g1] G1* U[g1^-1]" (repeatable).
    #[arg(long = "monomial", required = true)]
    monomials: Vec<String>,
    /// Increasing list of N.
    #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
    n: Vec<usize>,
    /// One M per N.
    #[arg(long, value_delimiter = ',', conflicts_with = "c")]
    m: Option<Vec<usize>>,
    /// M = round(c·N).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 100_000)]
    perm_samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    mode: StudyMode,
    #[command(flatten)]
    output: Output,
}

impl Common {
    fn config(&self, with_mc: bool) -> ExperimentConfig {
        ExperimentConfig {
            s: self.s,
            monomials: self.monomials.clone(),
            sizes: self.n.clone(),
            m_sizes: match &self.m {
                Some(ms) => MSizes::Explicit(ms.clone()),
                None => MSizes::Ratio(self.c.unwrap_or(1.0)),
            },
            samples: self.samples,
            perm_samples: self.perm_samples,
            seed: self.seed,
            mode: self.mode,
            with_mc,
        }
    }
}

fn enumerate(kind: Kind, sizes: &[usize], list: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(if list { ["n", "perm"] } else { ["n", "count"] })?;
    for &n in sizes {
        let perms: Box<dyn Iterator<Item = permfree::Perm>> = match kind {
            Kind::All => Box::new(enumerate_permutations(n)?),
            Kind::Pairings => Box::new(enumerate_pairings(n)?),
            Kind::Noncrossing => Box::new(enumerate_noncrossing(n)?),
            Kind::NcPairings => Box::new(enumerate_nc_pairings(n)?),
        };
        if list {
            for p in perms {
                w.write_record([n.to_string(), p.to_string()])?;
            }
        } else {
            w.write_record([n.to_string(), perms.count().to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the report and repeats the message of every error row on stderr.
fn report(rows: &[ReportRow], output: &Output) -> Result<()> {
    for r in rows {
        if let Some(e) = &r.error {
            eprintln!("permfree: {} at N = {}: {e}", r.monomial, r.n.map_or("-".into(), |n| n.to_string()));
        }
    }
    emit_report(rows, output.format, output.out.as_deref())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Limit(c) => report(&harness::run_limits(&c.config(false))?, &c.output),
        Command::Exact(c) => report(&harness::run_exact_study(&c.config(false))?, &c.output),
        Command::Mc(c) => report(&harness::run_mc_study(&c.config(false))?, &c.output),
        Command::Converge { common, with_mc } => {
            report(&harness::run_convergence_study(&common.config(with_mc))?, &common.output)
        }
        Command::Variance(c) => emit_table(
            &harness::run_variance_study(&c.config(false))?,
            c.output.format,
            c.output.out.as_deref(),
        ),
        Command::Enumerate { kind, n, list } => enumerate(kind, &n, list),
        Command::Demo {
            name,
            n,
            samples,
            seed,
            c,
            output,
        } => {
            let rows = harness::run_demo(&name, &DemoConfig { n, samples, seed, c })?;
            report(&rows, &output)
        }
        Command::Probe {
            words,
            s,
            n,
            perm_samples,
            seed,
            mode,
            output,
        } => {
            let cfg = ProbeConfig {
                words,
                s,
                sizes: n,
                samples: perm_samples,
                seed,
                mode,
            };
            emit_table(&harness::run_boundedness_probe(&cfg)?, output.format, output.out.as_deref())
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("PERMFREE_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Validation(format!("PERMFREE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Validation(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("permfree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
