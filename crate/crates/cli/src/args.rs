use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use critforge::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "critforge",
    version,
    about = "Exact invariants and normal forms of formal potentials",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,

    /// Run one job per line of FILE concurrently; output keeps input order.
    #[arg(long, value_name = "FILE")]
    pub batch: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Truncation order N; results are exact modulo m^(N+1).
    #[arg(long = "order", short = 'N', global = true, default_value_t = critforge::series::DEFAULT_ORDER)]
    pub order: u32,

    /// q (rational square classes) or c-formal (rank only).
    #[arg(long, global = true, default_value = "q", value_parser = parse_mode)]
    pub mode: Mode,

    /// Largest certificate degree searched for Milnor numbers.
    #[arg(long, global = true, default_value_t = critforge::milnor::DEFAULT_CAP)]
    pub cap: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Shorthand for --format json.
    #[arg(long, global = true)]
    pub json: bool,
}

impl GlobalOpts {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Milnor number with its determinacy certificate.
    Milnor(Potential),
    /// Tjurina number.
    Tjurina(Potential),
    /// Behrend value and Milnor-fiber Euler characteristic.
    Behrend(Potential),
    /// Split into a non-degenerate quadratic form plus a residual.
    Split(Potential),
    /// The split read as a minimal model (residual with zero Hessian).
    MinimalModel(Potential),
    /// Add a quadratic form in fresh variables.
    Stabilize(Stabilize),
    /// Thom-Sebastiani sum of two potentials.
    TsSum(Pair),
    /// Invariants of the residual after splitting.
    Invariants(Potential),
    /// Compare two potentials up to stabilization.
    StableCompare(Pair),
    /// Check an explicit coordinate change between two stabilizations.
    VerifyWitness(Witness),
    /// Check a one-parameter family of coordinate changes.
    VerifyIsotopy(Isotopy),
    /// Determinant of a matrix over Q[t].
    DetFamily(DetFamily),
    /// Stable class of a quadratic form.
    GwClass(FormArg),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Milnor(_) => "milnor",
            Command::Tjurina(_) => "tjurina",
            Command::Behrend(_) => "behrend",
            Command::Split(_) => "split",
            Command::MinimalModel(_) => "minimal-model",
            Command::Stabilize(_) => "stabilize",
            Command::TsSum(_) => "ts-sum",
            Command::Invariants(_) => "invariants",
            Command::StableCompare(_) => "stable-compare",
            Command::VerifyWitness(_) => "verify-witness",
            Command::VerifyIsotopy(_) => "verify-isotopy",
            Command::DetFamily(_) => "det-family",
            Command::GwClass(_) => "gw-class",
        }
    }
}

#[derive(Debug, Args)]
pub struct Potential {
    /// Comma-separated variable names, in monomial order.
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    /// Use a named fixture instead of an expression.
    #[arg(long, conflicts_with = "expr")]
    pub preset: Option<String>,
    /// Polynomial expression, e.g. "x^3 + y^4".
    pub expr: Option<String>,
}

#[derive(Debug, Args)]
pub struct Stabilize {
    #[command(flatten)]
    pub potential: Potential,
    #[command(flatten)]
    pub form: FormArg,
}

#[derive(Debug, Args)]
pub struct FormArg {
    /// Gram matrix, rows separated by ';' ("0,1;1,0"), or "diag:a,b,...".
    #[arg(long = "form", allow_hyphen_values = true)]
    pub form: String,
}

#[derive(Debug, Args)]
pub struct Pair {
    /// Variables of each potential; give once per expression.
    #[arg(long = "vars", action = clap::ArgAction::Append)]
    pub vars: Vec<String>,
    #[arg(long, conflicts_with = "exprs")]
    pub preset: Option<String>,
    #[arg(num_args = 0..=2)]
    pub exprs: Vec<String>,
}

#[derive(Debug, Args)]
pub struct Witness {
    #[command(flatten)]
    pub pair: Pair,
    /// Form added to the first potential (default: empty).
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub q1: String,
    /// Form added to the second potential (default: empty).
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub q2: String,
    /// Image of each variable of the stabilized space, in order.
    #[arg(long = "map", action = clap::ArgAction::Append, allow_hyphen_values = true)]
    pub map: Vec<String>,
    /// Names for the stabilized space (default: first variables, then s1, s2, ...).
    #[arg(long, value_delimiter = ',')]
    pub space_vars: Vec<String>,
}

#[derive(Debug, Args)]
pub struct Isotopy {
    #[command(flatten)]
    pub potential: Potential,
    /// Image of each variable, polynomial in the variables and the parameter.
    #[arg(long = "map", action = clap::ArgAction::Append, allow_hyphen_values = true)]
    pub map: Vec<String>,
    #[arg(long, default_value = "t")]
    pub param: String,
}

#[derive(Debug, Args)]
pub struct DetFamily {
    /// Rows separated by ';', entries by ','; entries are polynomials in the parameter.
    #[arg(long, conflicts_with = "preset", allow_hyphen_values = true)]
    pub matrix: Option<String>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value = "t")]
    pub param: String,
    /// Parameter values to specialize at.
    #[arg(long, value_delimiter = ',', default_value = "0,1", allow_hyphen_values = true)]
    pub at: Vec<String>,
}
