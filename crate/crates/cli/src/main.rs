use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trinomial_core::counter::{Strategy, DEFAULT_FULL_TABLE_BUDGET};
use trinomial_core::field::DEFAULT_Q_BUDGET;
use trinomial_core::laws::Depth;

mod commands;
mod output;

/// Exact point counts, error-term identities and genus data for
/// `rho^i x^a11 y^a12 + rho^j x^a21 y^a22 = x^a31 y^a32` over finite fields.
#[derive(Debug, Parser)]
#[command(name = "trinomial", version)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Largest field size accepted.
    #[arg(long, global = true, env = "TRINOMIAL_Q_BUDGET", default_value_t = DEFAULT_Q_BUDGET)]
    pub budget: u64,
    /// Largest q for which a full (q-1)^2 table is materialized.
    #[arg(long, global = true, default_value_t = DEFAULT_FULL_TABLE_BUDGET)]
    pub full_budget: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Folded,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exhaustive,
    Fibre,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::Fibre => Strategy::Fibre,
        }
    }
}

impl From<ModeArg> for Depth {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Folded => Depth::Folded,
            ModeArg::Full => Depth::Full,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Characteristic of the field.
    #[arg(long, conflicts_with = "q", required_unless_present = "q")]
    pub p: Option<u64>,
    /// Extension degree, used with --p.
    #[arg(long, default_value_t = 1, requires = "p")]
    pub n: u32,
    /// Field size, factored as p^n.
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Exponents a11,a12,a21,a22,a31,a32.
    #[arg(long, value_parser = parse_exponents, allow_hyphen_values = true)]
    pub exp: [i64; 6],
    #[command(flatten)]
    pub field: FieldArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constants d, e, f, k, w, 2g~ and the cokernel group.
    Constants(FamilyArgs),
    /// Error-term table, folded over cosets or in full.
    Table {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Folded)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
        strategy: StrategyArg,
    },
    /// Check every identity and bound; exits 1 on any failure.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        depth: ModeArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
        strategy: StrategyArg,
        /// Also fail when g~ is not an integer.
        #[arg(long)]
        strict: bool,
        /// Add 1 to the full-table entry I,J before checking.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        inject_fault: Option<(i64, i64)>,
    },
    /// Points on x^3 + y^3 + z^3 = 0 and the u^2 + 27v^2 = 4p certificate, one line per prime.
    Gauss {
        /// A single odd prime instead of a range.
        #[arg(long, conflicts_with_all = ["from", "to"])]
        p: Option<u64>,
        #[arg(long, default_value_t = 3)]
        from: u64,
        /// Exclusive upper end of the prime range.
        #[arg(long, default_value_t = 500)]
        to: u64,
        /// Compare with a direct projective count.
        #[arg(long)]
        check: bool,
    },
    /// Genus from delta invariants and from the closed formula.
    Genus {
        #[arg(long, value_parser = parse_exponents, allow_hyphen_values = true)]
        exp: [i64; 6],
        /// Permute monomials and exchange coordinates into the accepted shape first.
        #[arg(long)]
        normalize: bool,
        /// Field sizes at which to compare with g~.
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
    },
    /// max x subject to x + y + z = 0, x^2 + y^2 + z^2 = 6q.
    Opti {
        #[arg(long)]
        q: u64,
    },
    /// Verify many families, one JSON line per (exponents, q).
    Sweep {
        /// A single family instead of the exponent grid.
        #[arg(long, value_parser = parse_exponents, allow_hyphen_values = true)]
        exp: Option<[i64; 6]>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        min: i64,
        #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
        max: i64,
        /// Field sizes.
        #[arg(long, value_delimiter = ',', required_unless_present = "primes_below")]
        q: Vec<u64>,
        /// Use every odd prime below this bound as q.
        #[arg(long, conflicts_with = "q")]
        primes_below: Option<u64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Folded)]
        depth: ModeArg,
        /// Check a random sample of this many grid matrices per q.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_exponents(s: &str) -> Result<[i64; 6], String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|v: Vec<i64>| format!("expected 6 exponents, got {}", v.len()))
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    match s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(v) if v.len() == 2 => Ok((v[0], v[1])),
        _ => Err(format!("expected I,J, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
