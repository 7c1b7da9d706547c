use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mvnm::bench::{run_bench, BenchCase};
use mvnm::engine::{compute_moment, Engine};
use mvnm::marriage::{count_marriages, parse_cross};
use mvnm::pure::{discover, PureOptions, RecurrenceCache, SearchLimits};
use mvnm::table::{write_table, TableShape};
use mvnm::{CovarianceSpec, Error, MultiIndex};

#[derive(Parser)]
#[command(name = "mvnm", version, about = "Exact mixed moments of the multivariate normal distribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the moment E[x1^m1 ... xk^mk].
    Moment(MomentArgs),
    /// Count pairings with prescribed cross-group pair counts.
    Coeff(CoeffArgs),
    /// Write a table of symbolic moments.
    Table(TableArgs),
    /// Find a pure recurrence along one coordinate.
    Discover(DiscoverArgs),
    /// Time the pure engine against the wick engine.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Wick,
    Stein,
    Pure,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Wick => Engine::Wick,
            EngineArg::Stein => Engine::Stein,
            EngineArg::Pure => Engine::Pure,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    NumericBig,
    SymbolicMid,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = SearchLimits::default().max_order)]
    max_order: usize,
    #[arg(long, default_value_t = SearchLimits::default().max_degree)]
    max_degree: usize,
}

impl SearchArgs {
    fn limits(&self) -> SearchLimits {
        SearchLimits::new(self.max_order, self.max_degree)
    }
}

#[derive(Args)]
struct MomentArgs {
    #[arg(long)]
    k: usize,
    /// Exponents, e.g. 3,3.
    #[arg(long)]
    m: String,
    /// `symbolic` or the i<j entries in lex order, e.g. 1/2,1/3,1/4.
    #[arg(long, default_value = "symbolic")]
    cov: String,
    #[arg(long, value_enum, default_value = "pure")]
    engine: EngineArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Fail instead of using the mixed recurrence when no pure recurrence is found.
    #[arg(long)]
    no_fallback: bool,
    /// Where discovered recurrences are stored.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct CoeffArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: String,
    /// Cross counts, e.g. c12=9,c13=7,c23=5.
    #[arg(long, default_value = "")]
    cross: String,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// All m with 1 <= m_i <= N.
    #[arg(long, value_name = "N", conflicts_with = "diagonal", required_unless_present = "diagonal")]
    grid: Option<u32>,
    /// (2t, ..., 2t) for t = 1..N.
    #[arg(long, value_name = "N")]
    diagonal: Option<u32>,
    #[arg(long, value_enum, default_value = "wick")]
    engine: EngineArg,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiscoverArgs {
    #[arg(long)]
    k: usize,
    /// 1-based coordinate that runs.
    #[arg(long)]
    direction: usize,
    /// Frozen coordinates, e.g. m1=4,m2=4; unlisted ones are 0.
    #[arg(long, default_value = "")]
    fixed: String,
    #[arg(long, default_value = "symbolic")]
    cov: String,
    #[command(flatten)]
    search: SearchArgs,
    /// Output file for the recurrence JSON; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "numeric-big")]
    case: CaseArg,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn parse_m(k: usize, s: &str) -> Result<MultiIndex, Error> {
    let m: MultiIndex = s.parse()?;
    if m.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: m.len() });
    }
    Ok(m)
}

fn parse_fixed(k: usize, direction: usize, s: &str) -> Result<MultiIndex, Error> {
    let mut v = vec![0u32; k];
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (name, val) = item.split_once('=').ok_or_else(|| invalid(format!("expected mi=value, got `{item}`")))?;
        let i: usize = name
            .strip_prefix('m')
            .and_then(|d| d.parse().ok())
            .filter(|&i| (1..=k).contains(&i))
            .ok_or_else(|| invalid(format!("no coordinate `{name}` for k={k}")))?;
        if i == direction {
            return Err(invalid(format!("m{i} is the running coordinate")));
        }
        v[i - 1] = val.parse().map_err(|_| invalid(format!("bad value in `{item}`")))?;
    }
    Ok(MultiIndex::new(v))
}

fn default_cache() -> RecurrenceCache {
    if let Some(d) = std::env::var_os("MVNM_CACHE_DIR") {
        return RecurrenceCache::with_dir(d);
    }
    match std::env::var_os("HOME") {
        Some(h) => RecurrenceCache::with_dir(PathBuf::from(h).join(".cache").join("mvnm")),
        None => RecurrenceCache::new(),
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_moment(a: MomentArgs) -> Result<(), Error> {
    let cov = CovarianceSpec::parse(a.k, &a.cov)?;
    let m = parse_m(a.k, &a.m)?;
    let opts = PureOptions { limits: a.search.limits(), fallback: !a.no_fallback, ..Default::default() };
    let cache = match a.cache_dir {
        Some(d) => RecurrenceCache::with_dir(d),
        None => default_cache(),
    };
    let r = compute_moment(&cov, &m, a.engine.into(), &opts, &cache)?;
    match a.format {
        Format::Text => println!("{}", r.value),
        Format::Json => println!("{}", r.to_json()),
    }
    Ok(())
}

fn cmd_coeff(a: CoeffArgs) -> Result<(), Error> {
    let m = parse_m(a.k, &a.m)?;
    let cross = parse_cross(&a.cross)?;
    println!("{}", count_marriages(&m, &cross)?);
    Ok(())
}

fn cmd_table(a: TableArgs) -> Result<(), Error> {
    let shape = match (a.grid, a.diagonal) {
        (Some(n), _) => TableShape::Grid(n),
        (None, Some(n)) => TableShape::Diagonal(n),
        (None, None) => return Err(invalid("one of --grid or --diagonal is required")),
    };
    let mut out = output(&a.out)?;
    write_table(&mut out, a.k, shape, a.engine.into())
}

fn cmd_discover(a: DiscoverArgs) -> Result<(), Error> {
    if a.direction == 0 || a.direction > a.k {
        return Err(invalid(format!("direction must be in 1..={}", a.k)));
    }
    let cov = CovarianceSpec::parse(a.k, &a.cov)?;
    let fixed = parse_fixed(a.k, a.direction, &a.fixed)?;
    let rec = discover(&cov, a.direction - 1, &fixed, &a.search.limits())?;
    let summary = format!(
        "order {} degree {} step {} offset {} fit_end {}",
        rec.order,
        rec.degree(),
        rec.step,
        rec.offset,
        rec.fit_end
    );
    match &a.out {
        Some(p) => {
            std::fs::write(p, rec.to_json() + "\n")?;
            println!("{summary}");
        }
        None => {
            println!("{}", rec.to_json());
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Error> {
    let case = match a.case {
        CaseArg::NumericBig => BenchCase::NumericBig,
        CaseArg::SymbolicMid => BenchCase::SymbolicMid,
    };
    println!("{}", run_bench(case, a.repeat)?.to_json());
    Ok(())
}

fn exit_code(e: &Error, discovering: bool) -> u8 {
    match e {
        Error::Parse(_) | Error::DimensionMismatch { .. } | Error::InvalidArgument(_) => 2,
        Error::NotFound { .. } if discovering => 5,
        Error::NotFound { .. } => 3,
        Error::Io(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let discovering = matches!(cli.command, Command::Discover(_));
    let result = match cli.command {
        Command::Moment(a) => cmd_moment(a),
        Command::Coeff(a) => cmd_coeff(a),
        Command::Table(a) => cmd_table(a),
        Command::Discover(a) => cmd_discover(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mvnm: {e}");
            ExitCode::from(exit_code(&e, discovering))
        }
    }
}
