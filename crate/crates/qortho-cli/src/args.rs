use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qortho",
    version,
    about = "Partition functions, skew-orthogonal polynomials, kernels and correlations of discrete q-orthogonal ensembles"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Lattice parameter in (0,1); the working base is sqrt(q).
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true)]
    pub trunc_depth: Option<usize>,
    #[arg(long, global = true)]
    pub tail_tol: Option<f64>,
    #[arg(long, global = true)]
    pub cmp_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    LittleQJacobi,
    AlSalamCarlitz,
    QLaguerre,
    BigQJacobi,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
}

/// `ANCHOR:K`, the point `anchor · q^{K/2}`; anchor 0 is the upper endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointArg {
    pub anchor: usize,
    pub k: i64,
}

fn parse_point(s: &str) -> Result<PointArg, String> {
    let (a, k) = s.split_once(':').ok_or_else(|| format!("point {s:?} is not of the form ANCHOR:K"))?;
    let anchor = a.trim().parse().map_err(|_| format!("bad anchor index in {s:?}"))?;
    let k = k.trim().parse().map_err(|_| format!("bad exponent numerator in {s:?}"))?;
    Ok(PointArg { anchor, k })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridArg {
    /// Every retained node of the truncated lattice.
    All,
    Range {
        anchor: usize,
        from: i64,
        to: i64,
    },
}

fn parse_grid(s: &str) -> Result<GridArg, String> {
    if s == "all" {
        return Ok(GridArg::All);
    }
    let (a, r) = s.split_once(':').ok_or_else(|| format!("grid {s:?} is not 'all' or ANCHOR:K0..K1"))?;
    let (from, to) = r.split_once("..").ok_or_else(|| format!("grid {s:?} lacks a K0..K1 range"))?;
    let anchor = a.trim().parse().map_err(|_| format!("bad anchor index in {s:?}"))?;
    let from: i64 = from.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let to: i64 = to.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if to < from {
        return Err(format!("empty range in {s:?}"));
    }
    Ok(GridArg::Range { anchor, from, to })
}

fn parse_tuple(s: &str) -> Result<Vec<PointArg>, String> {
    s.split(',').map(|p| parse_point(p.trim())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GaugeArg {
    /// No p_{2m} component in Q_{2m+1}.
    Op,
    /// No x^{2m} monomial in Q_{2m+1}.
    Monomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Pfaffian,
    Qdet,
    Families,
    Operators,
    Sops,
    Partitions,
    Kernels,
    Correlations,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Pfaffian => "pfaffian",
            Suite::Qdet => "qdet",
            Suite::Families => "families",
            Suite::Operators => "operators",
            Suite::Sops => "sops",
            Suite::Partitions => "partitions",
            Suite::Kernels => "kernels",
            Suite::Correlations => "correlations",
        }
    }

    pub fn all() -> Vec<Suite> {
        Suite::value_variants().to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Weights,
    Ops,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition function by every available route.
    Partition {
        #[command(flatten)]
        family: FamilyArgs,
        /// Particle count.
        #[arg(long)]
        n: usize,
        /// Add the brute-force nested sum (at most 4 particles).
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        oracle_depth: Option<usize>,
    },
    /// Skew-orthogonal polynomials Q_0..Q_{2N-1}, closed form and numeric.
    Sop {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = GaugeArg::Op)]
        gauge: GaugeArg,
        /// q-Laguerre only: compare the rescaled odd coefficients with the
        /// Laguerre values -2n(2n+alpha) at q = limit_q.
        #[arg(long)]
        limit_check: bool,
        #[arg(long, default_value_t = 0.999)]
        limit_q: f64,
    },
    /// The 2x2 matrix kernel at one pair of lattice points.
    Kernel {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_point)]
        x: PointArg,
        #[arg(long, value_parser = parse_point)]
        y: PointArg,
    },
    /// Correlation functions over a point grid and explicit tuples.
    Correlation {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        /// One-point grid: `all` or ANCHOR:K0..K1; repeatable.
        #[arg(long, value_parser = parse_grid)]
        grid: Vec<GridArg>,
        /// A k-point tuple ANCHOR:K,ANCHOR:K,...; repeatable.
        #[arg(long, value_parser = parse_tuple)]
        tuple: Vec<Vec<PointArg>>,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        oracle_depth: Option<usize>,
        /// Relative tolerance against the oracle.
        #[arg(long, default_value_t = 1e-6)]
        oracle_tol: f64,
    },
    /// Run identity suites; exit 2 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
    },
    /// Tables of lattice weights or OP data.
    Tabulate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = TableKind::Ops)]
        what: TableKind,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
    },
}
