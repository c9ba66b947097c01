//! `cg-obstruct`: Casson-Gordon four-genus obstructions from the command line.
//!
//! Exit codes: 0 certified / success, 1 not certified, 2 usage or input error.

use std::path::PathBuf;
use std::process::ExitCode;

use cg_obstruct::casson_gordon::{eta_knot, sigma_knot, Character};
use cg_obstruct::obstruction::{genus_lower_bound, slice_diagnostics};
use cg_obstruct::search::{search, SearchConfig};
use cg_obstruct::signatures::{lt_nullity, lt_signature, set_tolerance_exponent, RootOfUnity};
use cg_obstruct::{build_family, GAKnot};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod render;

const PRECISION_ENV: &str = "CG_OBSTRUCT_PRECISION";

#[derive(Parser, Debug)]
#[command(name = "cg-obstruct", version, about = "Casson-Gordon invariants and four-genus lower bounds for sums of cabled torus knots")]
struct Cli {
    /// Worker threads (default: all cores). `1` gives the reference sequential order.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct KnotArg {
    /// Family parameters `p1,p2,q1,q2,q3`.
    #[arg(long)]
    family: Option<String>,
    /// Knot expression, e.g. "T(2,5;2,7) # -T(2,5;2,7)".
    #[arg(long)]
    knot: Option<String>,
}

impl KnotArg {
    fn resolve(&self) -> Result<GAKnot, String> {
        match (&self.family, &self.knot) {
            (Some(f), _) => {
                let nums = f
                    .split(',')
                    .map(|v| v.trim().parse::<u64>().map_err(|_| format!("`{v}` is not a positive integer")))
                    .collect::<Result<Vec<u64>, String>>()?;
                let [p1, p2, q1, q2, q3] = nums[..] else {
                    return Err("--family needs exactly five comma-separated primes".into());
                };
                build_family(p1, p2, q1, q2, q3).map_err(|e| e.to_string())
            }
            (None, Some(k)) => k.parse().map_err(|e: cg_obstruct::Error| e.to_string()),
            (None, None) => Err("one of --family or --knot is required".into()),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify a four-genus lower bound by exhausting isotropic characters.
    Verify {
        #[command(flatten)]
        knot: KnotArg,
        /// Genus hypothesis to refute; exit 0 iff g4_top > genus is certified.
        #[arg(long, default_value_t = 1)]
        genus: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        /// Witnesses recorded per prime.
        #[arg(long, default_value_t = 3)]
        witnesses: usize,
        /// Samples of the signature function over the upper half circle.
        #[arg(long, default_value_t = 1000)]
        resolution: u64,
    },
    /// Sweep family parameters and list certified examples as JSON lines.
    Search {
        /// `key = value` config file; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Cable prime range `lo..hi` (inclusive).
        #[arg(long)]
        p_range: Option<String>,
        /// Companion prime range `lo..hi` (inclusive).
        #[arg(long)]
        q_range: Option<String>,
        /// Explicit cable primes, comma separated.
        #[arg(long)]
        p_primes: Option<String>,
        /// Explicit companion primes, comma separated.
        #[arg(long)]
        q_primes: Option<String>,
        /// Allow non-algebraic cables (p <= 4q).
        #[arg(long)]
        no_algebraic: bool,
        #[arg(long)]
        genus: Option<u64>,
        #[arg(long, value_parser = ["product", "max_prime"])]
        rank: Option<String>,
        #[arg(long)]
        limit: Option<usize>,
        /// Append-only progress file; an existing one is resumed.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        witnesses: Option<usize>,
    },
    /// Levine-Tristram signature and nullity of T(2,q) at every m-th root of unity.
    Signature {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Casson-Gordon sigma and eta of a knot at a character.
    Cg {
        #[command(flatten)]
        knot: KnotArg,
        /// One residue per piece, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        character: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
    },
}

enum Failure {
    NotCertified,
    Input(String),
}

fn usage_error(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { knot, genus, format, witnesses, resolution } => {
            let knot = knot.resolve().map_err(usage_error)?;
            if genus < 1 {
                return Err(usage_error("--genus must be at least 1"));
            }
            let mut report = genus_lower_bound(&knot, genus, witnesses).map_err(|e| usage_error(e.to_string()))?;
            report.diagnostics =
                Some(slice_diagnostics(&knot, resolution).map_err(|e| usage_error(e.to_string()))?);
            print!("{}", render::report(&report, format));
            if report.certifies_above(genus) {
                Ok(())
            } else {
                Err(Failure::NotCertified)
            }
        }
        Command::Search {
            config,
            p_range,
            q_range,
            p_primes,
            q_primes,
            no_algebraic,
            genus,
            rank,
            limit,
            checkpoint,
            witnesses,
        } => {
            let mut cfg = SearchConfig::default();
            if let Some(path) = config {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
                cfg = cfg.apply_key_values(&text).map_err(|e| usage_error(e.to_string()))?;
            }
            let mut overrides = String::new();
            for (key, value) in [
                ("p_range", p_range),
                ("q_range", q_range),
                ("p_primes", p_primes),
                ("q_primes", q_primes),
                ("genus", genus.map(|g| g.to_string())),
                ("ranking", rank),
                ("limit", limit.map(|l| l.to_string())),
                ("witnesses", witnesses.map(|w| w.to_string())),
            ] {
                if let Some(v) = value {
                    overrides.push_str(&format!("{key} = {v}\n"));
                }
            }
            if no_algebraic {
                overrides.push_str("require_algebraic = false\n");
            }
            cfg = cfg.apply_key_values(&overrides).map_err(|e| usage_error(e.to_string()))?;
            cfg.validate().map_err(|e| usage_error(e.to_string()))?;
            let outcome = search(&cfg, checkpoint.as_deref()).map_err(|e| usage_error(e.to_string()))?;
            print!("{}", render::search_lines(&outcome));
            Ok(())
        }
        Command::Signature { q, m, format } => {
            if q % 2 == 0 {
                return Err(usage_error(format!("q = {q} must be odd")));
            }
            if m == 0 {
                return Err(usage_error("m must be positive"));
            }
            let mut rows = Vec::with_capacity(m as usize);
            for a in 0..m {
                let w = RootOfUnity::new(a as i64, m);
                let s = lt_signature(q, w).map_err(|e| usage_error(e.to_string()))?;
                let n = lt_nullity(q, w).map_err(|e| usage_error(e.to_string()))?;
                rows.push((a, s, n));
            }
            print!("{}", render::signature_table(q, m, &rows, format));
            Ok(())
        }
        Command::Cg { knot, character, format } => {
            let knot = knot.resolve().map_err(usage_error)?;
            let residues = character
                .split(',')
                .map(|v| v.trim().parse::<i64>().map_err(|_| usage_error(format!("`{v}` is not an integer"))))
                .collect::<Result<Vec<i64>, Failure>>()?;
            let chi = Character::new(&knot, &residues).map_err(|e| usage_error(e.to_string()))?;
            let sigma = sigma_knot(&knot, &chi).map_err(|e| usage_error(e.to_string()))?;
            let eta = eta_knot(&knot, &chi).map_err(|e| usage_error(e.to_string()))?;
            print!("{}", render::cg_values(&knot, &chi, &sigma, eta, format));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(value) = std::env::var(PRECISION_ENV) {
        match value.trim().parse::<i32>() {
            Ok(e) if (1..=15).contains(&e) => set_tolerance_exponent(e),
            _ => {
                eprintln!("error: {PRECISION_ENV} must be an integer in 1..=15");
                return ExitCode::from(2);
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotCertified) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
