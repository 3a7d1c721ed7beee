use clap::{Args, Parser, Subcommand, ValueEnum};

use blowup_coh::qcomb::DEFAULT_BUDGET;

/// Exact divisor and cohomology computations on the iterated blow-up of
/// projective space over a finite field. Reports are JSON on stdout.
#[derive(Debug, Parser)]
#[command(name = "blowup", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// h^0 of D(abar, n, m), or of D(abar(tau), 0, 0) with --tau.
    Dims(DivisorArgs),
    /// Vanishing certificates for every graded piece of the representation
    /// of highest weight --lambda.
    CertifyGlobnull(GlobnullArgs),
    /// All cohomology groups by direct computation on the surface, d <= 2.
    Oracle(DivisorArgs),
    /// Logarithmic basis, invariant forms and their identities in degree --s.
    Logforms(LogformsArgs),
    /// Steinberg dimension in degree --s, or all degrees.
    Steinberg(SteinbergArgs),
    /// Enumerated unipotent subgroups against the counting formula.
    Counts(CountsArgs),
    /// Neighbors of the standard vertex and apartment profiles.
    Building(BuildingArgs),
    /// Ceiling identities and floor-vector hypotheses.
    CheckIdentities(IdentityArgs),
}

/// A comma-separated flag value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Field order, a prime power.
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    /// Cap on enumerated candidates.
    #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = positive_budget)]
    pub budget: u128,
    /// Replay certificates and recompute oracle values; mismatches exit 1.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DivisorArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub d: Option<u32>,
    /// Subset of 1..=d, comma separated.
    #[arg(long, value_parser = index_list, allow_hyphen_values = true, conflicts_with_all = ["abar", "n", "m"])]
    pub tau: Option<List<usize>>,
    #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
    pub abar: Option<List<i64>>,
    #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
    pub n: Option<List<i64>>,
    #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
    pub m: Option<List<i64>>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GlobnullArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub d: Option<u32>,
    #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
    pub lambda: List<i64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LogformsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=6))]
    pub d: u32,
    #[arg(long)]
    pub s: u32,
    /// Seed for sampled group elements when exhaustive checks are too large.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SteinbergArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub d: u32,
    #[arg(long)]
    pub s: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CountsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8))]
    pub d: u32,
    /// Restrict to this subset of 0..=d.
    #[arg(long, value_parser = index_list)]
    pub tau: Option<List<usize>>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BuildingArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    pub d: u32,
    /// Weight whose exponent profiles are tabulated on the unit ball.
    #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
    pub lambda: Option<List<i64>>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub d: u32,
    /// Check a single weight instead of every weight with entries in [-6, 6];
    /// without it the ceiling sweep runs only for d <= 4.
    #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
    pub lambda: Option<List<i64>>,
    #[command(flatten)]
    pub common: Common,
}

fn int_list(s: &str) -> Result<List<i64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.iter().all(|x| x.abs() <= 1_000_000) {
                Ok(List(v))
            } else {
                Err("entries must lie in [-1000000, 1000000]".into())
            }
        })
}

fn index_list(s: &str) -> Result<List<usize>, String> {
    if s.trim().is_empty() {
        return Ok(List(vec![]));
    }
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sorted = v.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != v.len() {
        return Err("indices must be distinct".into());
    }
    if v.iter().any(|&i| i > 30) {
        return Err("indices must be at most 30".into());
    }
    Ok(List(sorted))
}

fn positive_budget(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("budget must be positive".into()),
        Ok(b) => Ok(b),
        Err(e) => Err(e.to_string()),
    }
}
