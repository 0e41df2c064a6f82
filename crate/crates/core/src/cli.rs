//! Command-line front end: `dist`, `verify`, `gen`, `convert`.
//!
//! Exit codes: 0 success, 1 I/O, usage or parse error, 2 invalid code,
//! 3 distance floor reached.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{
    css_new, cyclic_repetition, gen_hgp, gen_named, gen_toric, stab_new, AnyCode, CodeError,
    CssCode, Sector, StabCode,
};
use crate::distance::{dist_rand_css, dist_rand_stab, DistanceError, DistanceResult, IsParams};
use crate::gf::{FieldSpec, GfError};
use crate::linalg::MatrixGF;
use crate::mtxe::{self, MtxeError, ROLE_KEY};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVALID_CODE: i32 = 2;
pub const EXIT_FLOOR: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: MtxeError },
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Code(CodeError::Noncommuting { .. })
            | CliError::Code(CodeError::NotSelfOrthogonal { .. })
            | CliError::Distance(DistanceError::ZeroLogicalDim) => EXIT_INVALID_CODE,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qdist",
    version,
    about = "Randomized upper bounds on the distance of q-ary quantum codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for low-weight logical operators
    Dist(DistArgs),
    /// Check that the input defines a valid code and print its parameters
    Verify(CodeInput),
    /// Write MTXE files for a code family
    Gen(GenArgs),
    /// Canonicalize an MTX/MTXE file or strip it to plain MTX
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
pub struct CodeInput {
    /// X-type check matrix of a CSS code
    #[arg(long, requires = "hz", conflicts_with = "stab")]
    pub hx: Option<PathBuf>,
    /// Z-type check matrix of a CSS code
    #[arg(long, requires = "hx", conflicts_with = "stab")]
    pub hz: Option<PathBuf>,
    /// Stabilizer generator matrix, interleaved (a_1, b_1, a_2, b_2, ...)
    #[arg(long)]
    pub stab: Option<PathBuf>,
    /// Field override, e.g. GF(4)
    #[arg(long)]
    pub field: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SectorArg {
    Z,
    X,
    Both,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub input: CodeInput,
    #[arg(long, value_enum, default_value = "both")]
    pub sector: SectorArg,
    #[arg(long, default_value_t = 10_000)]
    pub iters: u64,
    /// Stop once the bound is at most this weight (0 disables)
    #[arg(long, default_value_t = 0)]
    pub floor: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Rounds per RNG block
    #[arg(long, default_value_t = 64, hide = true)]
    pub block_size: u64,
    /// Print a single JSON record
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub family: Family,
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Output prefix; files are PREFIX_hx.mtx and PREFIX_hz.mtx, or PREFIX_stab.mtx
    #[arg(long, global = true)]
    pub out: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Toric code on an L x L torus
    Toric {
        #[arg(long = "L")]
        l: usize,
    },
    /// Hypergraph product of two check matrices
    Hgp {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Cyclic repetition check matrix, handy as hgp input
    Rep {
        #[arg(long = "L")]
        l: usize,
    },
    /// steane, five_qubit or rep(L)
    Named {
        #[arg(long)]
        name: String,
    },
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Emit plain Matrix Market without structured comments
    #[arg(long)]
    pub strip: bool,
    #[arg(long)]
    pub field: Option<String>,
}

/// Per-sector numbers inside a [`RunReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub sector: String,
    pub d_upper: usize,
    pub witness: Vec<u32>,
    pub hits: u64,
    pub iters_done: u64,
    pub p_miss: f64,
    pub hit_floor: bool,
}

impl SectorReport {
    fn new(sector: &str, r: &DistanceResult) -> Self {
        SectorReport {
            sector: sector.into(),
            d_upper: r.d_upper,
            witness: r.witness.iter().map(|x| x.value()).collect(),
            hits: r.hits,
            iters_done: r.iters_done,
            p_miss: r.p_miss,
            hit_floor: r.hit_floor,
        }
    }
}

/// Result of `qdist dist`. The JSON form omits the wall time so that it is
/// reproducible; the time is printed separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: String,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub sector: String,
    pub d_upper: usize,
    pub witness: Vec<u32>,
    pub hits: u64,
    pub iters_done: u64,
    pub p_miss: f64,
    pub hit_floor: bool,
    pub seed: u64,
    pub iters: u64,
    pub floor: usize,
    pub sectors: Vec<SectorReport>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let sectors: Vec<String> = self
            .sectors
            .iter()
            .map(|r| format!("{}: {}", r.sector, r.d_upper))
            .collect();
        s.push_str(&format!(
            "code: {} n={} k={} over GF({})\n",
            self.kind, self.n, self.k, self.q
        ));
        s.push_str(&format!(
            "distance upper bound ({}): d <= {}  [{}]\n",
            self.sector,
            self.d_upper,
            sectors.join(", ")
        ));
        s.push_str(&format!(
            "hits: {} of {} rounds, estimated probability the bound is not tight: {:.3e}\n",
            self.hits, self.iters_done, self.p_miss
        ));
        if self.hit_floor {
            s.push_str(&format!(
                "floor {} reached, search stopped early\n",
                self.floor
            ));
        }
        let w: Vec<String> = self.witness.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("witness: {}\n", w.join(" ")));
        s.push_str(&format!(
            "seed: {}  iters: {}  wall time: {:.3} s\n",
            self.seed, self.iters, self.wall_time_s
        ));
        s
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Dist(args) => cmd_dist(&args, out, err),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Gen(args) => cmd_gen(&args, out),
        Command::Convert(args) => cmd_convert(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn parse_field(name: Option<&str>) -> Result<Option<FieldSpec>, CliError> {
    name.map(FieldSpec::parse_name)
        .transpose()
        .map_err(CliError::from)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_matrix(path: &Path, field: Option<&FieldSpec>) -> Result<MatrixGF, CliError> {
    let text = read_text(path)?;
    mtxe::parse_mtxe(&text, field)
        .map(|(_, m)| m)
        .map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
}

/// Unvalidated matrices named on the command line.
enum RawCode {
    Css(MatrixGF, MatrixGF),
    Stab(MatrixGF),
}

fn load_raw(input: &CodeInput) -> Result<RawCode, CliError> {
    let field = parse_field(input.field.as_deref())?;
    match (&input.hx, &input.hz, &input.stab) {
        (Some(hx), Some(hz), None) => {
            let hx = load_matrix(hx, field.as_ref())?;
            let hz = load_matrix(hz, field.as_ref())?;
            Ok(RawCode::Css(hx, hz))
        }
        (None, None, Some(s)) => Ok(RawCode::Stab(load_matrix(s, field.as_ref())?)),
        _ => Err(CliError::Usage(
            "give either --hx FILE --hz FILE or --stab FILE".into(),
        )),
    }
}

fn validate(raw: RawCode) -> Result<AnyCode, CliError> {
    Ok(match raw {
        RawCode::Css(hx, hz) => {
            let field = hx.field().clone();
            AnyCode::Css(css_new(&field, hx, hz)?)
        }
        RawCode::Stab(s) => {
            let field = s.field().clone();
            AnyCode::Stab(stab_new(&field, s)?)
        }
    })
}

fn css_report(code: &CssCode, args: &DistArgs, params: &IsParams) -> Result<RunReport, CliError> {
    let sectors: Vec<Sector> = match args.sector {
        SectorArg::Z => vec![Sector::Z],
        SectorArg::X => vec![Sector::X],
        SectorArg::Both => vec![Sector::Z, Sector::X],
    };
    let mut reports = Vec::new();
    let mut best: Option<DistanceResult> = None;
    for sector in sectors {
        let r = dist_rand_css(code, sector, params)?;
        reports.push(SectorReport::new(sector.label(), &r));
        let floor_hit = r.hit_floor;
        if best.as_ref().is_none_or(|b| r.d_upper < b.d_upper) {
            best = Some(r);
        }
        if floor_hit {
            break;
        }
    }
    let best = best.expect("at least one sector");
    let sector = match args.sector {
        SectorArg::Z => "z",
        SectorArg::X => "x",
        SectorArg::Both => "both",
    };
    Ok(report_from(
        "css",
        code.n(),
        code.k(),
        code.field().q(),
        sector,
        &best,
        reports.iter().any(|r| r.hit_floor),
        reports,
        args,
    ))
}

fn stab_report(code: &StabCode, args: &DistArgs, params: &IsParams) -> Result<RunReport, CliError> {
    let r = dist_rand_stab(code, params)?;
    let reports = vec![SectorReport::new("symplectic", &r)];
    Ok(report_from(
        "stabilizer",
        code.n(),
        code.k(),
        code.field().q(),
        "symplectic",
        &r,
        r.hit_floor,
        reports,
        args,
    ))
}

#[allow(clippy::too_many_arguments)]
fn report_from(
    kind: &str,
    n: usize,
    k: usize,
    q: u32,
    sector: &str,
    best: &DistanceResult,
    hit_floor: bool,
    sectors: Vec<SectorReport>,
    args: &DistArgs,
) -> RunReport {
    RunReport {
        kind: kind.into(),
        n,
        k,
        q,
        sector: sector.into(),
        d_upper: best.d_upper,
        witness: best.witness.iter().map(|x| x.value()).collect(),
        hits: best.hits,
        iters_done: best.iters_done,
        p_miss: best.p_miss,
        hit_floor,
        seed: args.seed,
        iters: args.iters,
        floor: args.floor,
        sectors,
        wall_time_s: 0.0,
    }
}

pub fn cmd_dist(
    args: &DistArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let code = validate(load_raw(&args.input)?)?;
    let params = IsParams {
        iters: args.iters,
        dist_floor: args.floor,
        seed: args.seed,
        block_size: args.block_size,
        threads: args.threads,
    };
    let start = Instant::now();
    let mut report = match &code {
        AnyCode::Css(c) => css_report(c, args, &params)?,
        AnyCode::Stab(s) => stab_report(s, args, &params)?,
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    if args.json {
        let _ = writeln!(out, "{}", report.to_json());
        let _ = writeln!(err, "wall time: {:.3} s", report.wall_time_s);
    } else {
        let _ = write!(out, "{}", report.render_text());
    }
    Ok(if report.hit_floor {
        EXIT_FLOOR
    } else {
        EXIT_OK
    })
}

pub fn cmd_verify(input: &CodeInput, out: &mut dyn Write) -> Result<i32, CliError> {
    let raw = load_raw(input)?;
    let (n, ranks) = match &raw {
        RawCode::Css(hx, hz) => (
            hx.ncols(),
            format!("rank(hx)={} rank(hz)={}", hx.rank(), hz.rank()),
        ),
        RawCode::Stab(s) => {
            if s.ncols() % 2 != 0 {
                return Err(CodeError::OddColumns(s.ncols()).into());
            }
            (s.ncols() / 2, format!("rank(s)={}", s.rank()))
        }
    };
    let q = match &raw {
        RawCode::Css(hx, _) => hx.field().q(),
        RawCode::Stab(s) => s.field().q(),
    };
    match validate(raw) {
        Ok(code) => {
            let _ = writeln!(out, "n={} k={} q={} {}", n, code.k(), q, ranks);
            let _ = writeln!(out, "PASS");
            Ok(EXIT_OK)
        }
        Err(e @ CliError::Code(CodeError::Noncommuting { .. }))
        | Err(e @ CliError::Code(CodeError::NotSelfOrthogonal { .. })) => {
            let _ = writeln!(out, "n={} k=n/a q={} {}", n, q, ranks);
            let _ = writeln!(out, "FAIL: {e}");
            Ok(EXIT_INVALID_CODE)
        }
        Err(e) => Err(e),
    }
}

fn tags(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|&(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn write_code(code: &AnyCode, prefix: &str, label: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    match code {
        AnyCode::Css(c) => {
            for (suffix, role, m) in [("hx", "HX", c.hx()), ("hz", "HZ", c.hz())] {
                let path = PathBuf::from(format!("{prefix}_{suffix}.mtx"));
                let text = mtxe::write_mtxe(m, &tags(&[(ROLE_KEY, role), ("Code", label)]));
                write_text(&path, &text)?;
                written.push(path);
            }
        }
        AnyCode::Stab(s) => {
            let path = PathBuf::from(format!("{prefix}_stab.mtx"));
            let text = mtxe::write_mtxe(
                s.s(),
                &tags(&[(ROLE_KEY, "S"), ("Layout", "interleaved"), ("Code", label)]),
            );
            write_text(&path, &text)?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let field_override = parse_field(args.field.as_deref())?;
    let field = field_override.clone().unwrap_or_else(FieldSpec::binary);
    let (code, default_prefix, label) = match &args.family {
        Family::Toric { l } => (
            AnyCode::Css(gen_toric(*l, &field)?),
            "toric".to_string(),
            format!("toric L={l}"),
        ),
        Family::Hgp { a, b } => {
            let a = load_matrix(a, field_override.as_ref())?;
            let b = load_matrix(b, field_override.as_ref())?;
            (
                AnyCode::Css(gen_hgp(&a, &b)?),
                "hgp".to_string(),
                "hypergraph product".to_string(),
            )
        }
        Family::Rep { l } => {
            if *l < 2 {
                return Err(CliError::Usage("rep needs L >= 2".into()));
            }
            let prefix = args.out.clone().unwrap_or_else(|| format!("rep{l}"));
            let path = PathBuf::from(format!("{prefix}.mtx"));
            let m = cyclic_repetition(*l, &field);
            let label = format!("cyclic repetition L={l}");
            write_text(&path, &mtxe::write_mtxe(&m, &tags(&[("Code", &label)])))?;
            let _ = writeln!(out, "{}", path.display());
            return Ok(EXIT_OK);
        }
        Family::Named { name } => (
            gen_named(name, &field)?,
            name.replace(['(', ')'], ""),
            name.clone(),
        ),
    };
    let prefix = args.out.clone().unwrap_or(default_prefix);
    for path in write_code(&code, &prefix, &label)? {
        let _ = writeln!(out, "{}", path.display());
    }
    Ok(EXIT_OK)
}

pub fn cmd_convert(args: &ConvertArgs) -> Result<i32, CliError> {
    let text = read_text(&args.input)?;
    let parse_err = |source| CliError::Parse {
        path: args.input.clone(),
        source,
    };
    let output = if args.strip {
        mtxe::strip_to_mtx(&mtxe::parse_document(&text).map_err(parse_err)?)
    } else {
        let field = parse_field(args.field.as_deref())?;
        let (doc, m) = mtxe::parse_mtxe(&text, field.as_ref()).map_err(parse_err)?;
        mtxe::write_mtxe(&m, &doc.tags)
    };
    write_text(&args.out, &output)?;
    Ok(EXIT_OK)
}
