//! The `ratbase` command-line front end.
//!
//! Exit codes: 0 on success, 2 when a word is not the expansion of an
//! integer, 3 when a request exceeds the enumeration cap, 64 on usage
//! errors and 1 otherwise (including failed verification suites).

mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::adelic::{
    boundary_tube, count_boundary_hits, fit_growth, render_tiles, write_csv, write_svg, AdeleContext, FiberScheme,
    TubeAtlas, DEFAULT_MAX_ENUM,
};
use crate::error::{Error, Result};
use crate::fourier::{coefficient_table, eval_urysohn_direct, eval_urysohn_series, write_coefficients_csv};
use crate::numeration::{Base, Digit, DigitWord};
use crate::patterns::{
    asymptotic_report, champernowne_freq, count_pattern, count_pattern_at, report_json, summatory_sod,
    write_report_csv, ChampernowneStream, Pattern,
};
use crate::Q;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_IN_LANGUAGE: i32 = 2;
pub const EXIT_SCALE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable overriding the enumeration cap.
pub const MAX_ENUM_VAR: &str = "RATBASE_MAX_ENUM";

#[derive(Debug, Parser)]
#[command(name = "ratbase", version, about = "Rational-base number systems, their digit statistics and tiles")]
struct Cli {
    /// Worker threads for parallel commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
struct BaseArgs {
    /// Numerator of the base a/b.
    #[arg(long)]
    a: u32,
    /// Denominator of the base a/b.
    #[arg(long)]
    b: u32,
}

impl BaseArgs {
    fn base(&self) -> Result<Base> {
        Base::new(self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fiber {
    Alpha,
    Padic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Roundtrip,
    Tiling,
    Digits,
    Tube,
    Fourier,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the base-a/b expansion of a non-negative integer.
    Encode {
        #[command(flatten)]
        base: BaseArgs,
        n: String,
    },
    /// Print the integer a digit word represents.
    Decode {
        #[command(flatten)]
        base: BaseArgs,
        word: String,
    },
    /// Count occurrences of a digit pattern.
    Patterns(PatternsArgs),
    /// Print the summatory sum of digits up to N.
    SodSum {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long = "N", value_parser = parse_count)]
        n: u64,
    },
    /// Print digits of the concatenated-expansion stream, or count a pattern in it.
    Champernowne {
        #[command(flatten)]
        base: BaseArgs,
        /// Number of stream positions.
        #[arg(long = "N", value_parser = parse_count)]
        n: u64,
        /// Count windows equal to this pattern instead of printing digits.
        #[arg(long)]
        w: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the level-r tile approximations of a range of translates.
    Tiles(TilesArgs),
    /// Tabulate Fourier coefficients of the tile indicators.
    Fourier(FourierArgs),
    /// Boundary tube sizes and boundary hit counts.
    Boundary(BoundaryArgs),
    /// Run invariant suites and print one line per property.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct PatternsArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Pattern as a digit string (or a comma list when a > 10).
    #[arg(long)]
    w: String,
    /// Count over 1..=N.
    #[arg(long = "N", value_parser = parse_count, required_unless_present = "horizons", conflicts_with = "horizons")]
    n: Option<u64>,
    /// Only the count at digit position k (plain and zero-padded).
    #[arg(long, requires = "n")]
    k: Option<usize>,
    /// Comma-separated horizons for the asymptotic report, e.g. 1e4,1e5.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    horizons: Option<Vec<u64>>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TilesArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long)]
    r: u32,
    /// Translate range `lo..hi`; the step is one over the common denominator.
    #[arg(long, default_value = "0..0", allow_hyphen_values = true)]
    translates: String,
    #[arg(long, value_enum, default_value = "svg")]
    format: Format,
    /// Vertical coordinate for the p-adic factor.
    #[arg(long, value_enum, default_value = "alpha")]
    fiber: Fiber,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FourierArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long)]
    d: Digit,
    #[arg(long)]
    r: u32,
    /// Largest |xi b^r| in the table.
    #[arg(long, default_value_t = 100)]
    max_xi: u64,
    /// Evaluate the truncated series at this rational point instead.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    /// Series cutoff for --at.
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    cutoff: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Highest tube level; levels 1..=r are reported.
    #[arg(long)]
    r: u32,
    /// Extra levels used to decide membership (capped by the enumeration limit).
    #[arg(long, default_value_t = 8)]
    resolution: u32,
    /// With --N: count 1 <= n <= N whose digit-k point falls in a level-r tube box.
    #[arg(long, requires = "n")]
    k: Option<u32>,
    #[arg(long = "N", value_parser = parse_count, requires = "k")]
    n: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 6)]
    r: u32,
    /// Upper end of integer ranges.
    #[arg(long = "N", value_parser = parse_count, default_value = "10000")]
    n: u64,
    /// Number of random points for sampled properties.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Accepts plain integers and scientific notation such as `1e6` or `2.5e3`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if !(0.0..=9.0e15).contains(&v) || v.fract() != 0.0 {
        return Err(format!("not a non-negative integer: {s}"));
    }
    Ok(v as u64)
}

fn parse_rational(s: &str) -> Result<Q> {
    Q::from_str(s.trim()).map_err(|_| Error::parse(s, "expected a rational such as -5/2"))
}

/// `lo..hi` with step `1 / lcm(den lo, den hi)`.
fn parse_translates(s: &str) -> Result<Vec<Q>> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| Error::parse(s, "expected lo..hi"))?;
    let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
    if lo > hi {
        return Err(Error::parse(s, "empty range"));
    }
    let den = lo.denom().lcm(hi.denom());
    let (a, b) = ((lo.numer() * (&den / lo.denom())), (hi.numer() * (&den / hi.denom())));
    let count = (&b - &a + BigInt::one()).to_u64().filter(|&c| c <= DEFAULT_MAX_ENUM);
    let count = count.ok_or_else(|| Error::parse(s, "too many translates"))?;
    Ok((0..count).map(|i| Q::new(&a + BigInt::from(i), den.clone())).collect())
}

fn max_enum_from_env() -> Result<u64> {
    match std::env::var(MAX_ENUM_VAR) {
        Ok(v) => parse_count(&v).map_err(|e| Error::parse(&v, e)),
        Err(_) => Ok(DEFAULT_MAX_ENUM),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotInLanguage { .. } => EXIT_NOT_IN_LANGUAGE,
        Error::ScaleExceeded { .. } => EXIT_SCALE,
        Error::BoundaryAmbiguous { .. } | Error::Io(_) => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    let result = pool.install(|| dispatch(cli.command, stdout));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs `f` against the file at `path`, or against `stdout`.
fn with_output<F>(path: &Option<PathBuf>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(stdout);
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    let max_enum = max_enum_from_env()?;
    let context = |b: &BaseArgs| -> Result<AdeleContext> { Ok(AdeleContext::new(b.base()?).with_max_enum(max_enum)) };
    match command {
        Command::Encode { base, n } => {
            let base = base.base()?;
            let n = BigUint::from_str(n.trim()).map_err(|_| Error::parse(&n, "expected a non-negative integer"))?;
            writeln!(stdout, "{}", base.encode(&n))?;
        }
        Command::Decode { base, word } => {
            let w = DigitWord::parse(base.base()?, &word)?;
            writeln!(stdout, "{}", w.decode()?)?;
        }
        Command::Patterns(args) => cmd_patterns(args, stdout)?,
        Command::SodSum { base, n } => {
            writeln!(stdout, "{}", summatory_sod(base.base()?, n))?;
        }
        Command::Champernowne { base, n, w, out } => {
            let base = base.base()?;
            match w {
                Some(w) => {
                    let w = Pattern::parse(base, &w)?;
                    writeln!(stdout, "{}", champernowne_freq(base, &w, n))?;
                }
                None => with_output(&out, stdout, |o| {
                    let ascii = base.a() <= 10;
                    for (i, d) in ChampernowneStream::new(base).take(n as usize).enumerate() {
                        if ascii {
                            o.write_all(&[b'0' + d as u8])?;
                        } else {
                            write!(o, "{}{d}", if i == 0 { "" } else { "," })?;
                        }
                    }
                    writeln!(o)?;
                    Ok(())
                })?,
            }
        }
        Command::Tiles(args) => {
            let ctx = context(&args.base)?;
            let translates = parse_translates(&args.translates)?;
            let scheme = match args.fiber {
                Fiber::Alpha => FiberScheme::AlphaDigits,
                Fiber::Padic => FiberScheme::PadicDigits,
            };
            let rects = render_tiles(&ctx, args.r, &translates, scheme)?;
            with_output(&args.out, stdout, |o| match args.format {
                Format::Svg => write_svg(&rects, ctx.a(), o),
                Format::Csv => write_csv(&rects, o),
                Format::Json => Err(Error::InvalidArgument("tiles are written as svg or csv".into())),
            })?;
        }
        Command::Fourier(args) => cmd_fourier(args, &context, stdout)?,
        Command::Boundary(args) => cmd_boundary(args, &context, stdout)?,
        Command::Verify(args) => {
            let ctx = context(&args.base)?;
            let ok = verify::run(&ctx, &args, stdout)?;
            return Ok(if ok { EXIT_OK } else { EXIT_FAILURE });
        }
    }
    Ok(EXIT_OK)
}

fn cmd_patterns(args: PatternsArgs, stdout: &mut dyn Write) -> Result<()> {
    let base = args.base.base()?;
    let w = Pattern::parse(base, &args.w)?;
    let label = base.format_digits(w.digits());
    if let Some(horizons) = &args.horizons {
        let rows = asymptotic_report(base, &w, horizons)?;
        return with_output(&args.out, stdout, |o| match args.format {
            Format::Json => Ok(writeln!(o, "{}", report_json(&rows))?),
            _ => write_report_csv(&rows, o),
        });
    }
    let n = args.n.expect("clap requires N or horizons");
    if let Some(k) = args.k {
        #[derive(Serialize)]
        struct Row<'a> {
            #[serde(rename = "N")]
            n: u64,
            w: &'a str,
            k: usize,
            #[serde(rename = "S_kw")]
            plain: u64,
            #[serde(rename = "S_kw_padded")]
            padded: u64,
        }
        let row = Row {
            n,
            w: &label,
            k,
            plain: count_pattern_at(base, &w, k, n, false),
            padded: count_pattern_at(base, &w, k, n, true),
        };
        return with_output(&args.out, stdout, |o| write_one(o, args.format, &row));
    }
    let stats = count_pattern(base, &w, n);
    with_output(&args.out, stdout, |o| match args.format {
        Format::Json => Ok(writeln!(o, "{}", serde_json::to_string_pretty(&stats).expect("stats serialize"))?),
        _ => {
            let mut wtr = csv::Writer::from_writer(o);
            wtr.write_record(["N", "w", "S_w"])?;
            wtr.write_record([n.to_string(), label.clone(), stats.total.to_string()])?;
            wtr.flush()?;
            Ok(())
        }
    })
}

fn write_one<T: Serialize>(o: &mut dyn Write, format: Format, row: &T) -> Result<()> {
    if format == Format::Json {
        writeln!(o, "{}", serde_json::to_string_pretty(row).expect("row serializes"))?;
    } else {
        let mut wtr = csv::Writer::from_writer(o);
        wtr.serialize(row)?;
        wtr.flush()?;
    }
    Ok(())
}

fn cmd_fourier(
    args: FourierArgs,
    context: &dyn Fn(&BaseArgs) -> Result<AdeleContext>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let ctx = context(&args.base)?;
    if let Some(at) = &args.at {
        let z = parse_rational(at)?;
        let series = eval_urysohn_series(&ctx, args.d, args.r, &z, args.cutoff)?;
        #[derive(Serialize)]
        struct Row {
            z: String,
            digit: Digit,
            r: u32,
            cutoff: u64,
            direct: String,
            series_re: f64,
            series_im: f64,
            tail_bound: f64,
        }
        let row = Row {
            z: z.to_string(),
            digit: args.d,
            r: args.r,
            cutoff: args.cutoff,
            direct: eval_urysohn_direct(&ctx, args.d, args.r, &z).to_string(),
            series_re: series.value.re,
            series_im: series.value.im,
            tail_bound: series.tail_bound,
        };
        return with_output(&args.out, stdout, |o| write_one(o, args.format, &row));
    }
    let table = coefficient_table(&ctx, args.d, args.r, args.max_xi)?;
    with_output(&args.out, stdout, |o| match args.format {
        Format::Json => {
            let rows: Vec<_> = table.iter().map(|c| c.row(ctx.b())).collect();
            Ok(writeln!(o, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize"))?)
        }
        _ => write_coefficients_csv(&ctx, &table, o),
    })
}

/// Highest level whose `a^level` boxes fit under the cap.
fn max_level(ctx: &AdeleContext) -> u32 {
    let mut r = 0;
    while ctx.a_pow_checked(r + 1).is_ok() && r < 60 {
        r += 1;
    }
    r
}

fn cmd_boundary(
    args: BoundaryArgs,
    context: &dyn Fn(&BaseArgs) -> Result<AdeleContext>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let ctx = context(&args.base)?;
    if args.r == 0 {
        return Err(Error::InvalidArgument("tube level must be at least 1".into()));
    }
    if args.resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be at least 1".into()));
    }
    let top = max_level(&ctx);
    let resolution_for = |r: u32| -> Result<u32> {
        let res = (r + args.resolution).min(top);
        if res <= r {
            ctx.a_pow_checked(r + 1)?;
        }
        Ok(res)
    };
    if let (Some(k), Some(n)) = (args.k, args.n) {
        let atlas = TubeAtlas::new(&ctx, args.r, resolution_for(args.r)?)?;
        #[derive(Serialize)]
        struct Row {
            k: u32,
            r: u32,
            resolution: u32,
            #[serde(rename = "N")]
            n: u64,
            hits: u64,
        }
        let row =
            Row { k, r: args.r, resolution: atlas.resolution(), n, hits: count_boundary_hits(&ctx, k, args.r, n, &atlas)? };
        return with_output(&args.out, stdout, |o| write_one(o, args.format, &row));
    }
    #[derive(Serialize)]
    struct Row {
        r: u32,
        digit: Digit,
        resolution: u32,
        period_count: usize,
        actual_count: usize,
    }
    let mut rows = Vec::new();
    for r in 1..=args.r {
        let res = resolution_for(r)?;
        for d in ctx.base().digits() {
            let t = boundary_tube(&ctx, d, r, res)?;
            rows.push(Row { r, digit: d, resolution: res, period_count: t.period_count(), actual_count: t.actual_count() });
        }
    }
    with_output(&args.out, stdout, |o| {
        if args.format == Format::Json {
            let pts: Vec<(u32, u64)> = rows.iter().filter(|x| x.digit == 0).map(|x| (x.r, x.period_count as u64)).collect();
            let fit = fit_growth(&pts).map(|(c, rho)| serde_json::json!({ "C": c, "rho": rho }));
            let doc = serde_json::json!({ "levels": rows, "fit": fit });
            writeln!(o, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        } else {
            let mut wtr = csv::Writer::from_writer(o);
            for row in &rows {
                wtr.serialize(row)?;
            }
            wtr.flush()?;
        }
        Ok(())
    })
}
