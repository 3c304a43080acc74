//! The `cosetmap` command-line front end.
//!
//! Exit codes: 0 on success, 1 when the request is well formed but has no
//! solution, 2 on malformed input or a failed `--verify` self-check.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::Value;

use crate::affine_ct::{affine_cycle_type, gamma_dpl, gamma_of_matrix, gamma_of_poly};
use crate::cgl::factor_into_cgl;
use crate::cwaffine::{
    construct_main, construct_sylow_type, one_cycle_map, one_cycle_polynomial, ConstructMode,
    CosetWiseAffineMap, GammaChoice,
};
use crate::cycletype::CycleType;
use crate::error::{Error, Result};
use crate::gf::json::poly_to_json;
use crate::gf::{parse_poly, Field, Poly};
use crate::linalg::{matrix_from_json, matrix_to_json, vector_from_json, AffineMap, Matrix, Vector};
use crate::oracle::{analyze, Addition, MapTable, Report};

#[derive(Parser, Debug)]
#[command(name = "cosetmap", version, about = "Cycle types of affine maps and coset-wise affine complete mappings")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every randomized search.
    #[arg(long, env = "COSETMAP_SEED", default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    p: u64,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Monic irreducible modulus over GF(p), e.g. "X^3-X+1".
    #[arg(long)]
    modulus: Option<String>,
}

impl FieldArgs {
    fn field(&self) -> Result<Field> {
        match &self.modulus {
            None => Field::new(self.p, self.k),
            Some(text) => {
                let poly = parse_poly(&Field::prime(self.p)?, text)?;
                if poly.degree() != Some(self.k) {
                    return Err(Error::InvalidModulus(format!("{text} does not have degree {}", self.k)));
                }
                Field::with_modulus(self.p, poly.coeffs())
            }
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cycle type of x ↦ xA + v.
    CycleType {
        #[command(flatten)]
        field: FieldArgs,
        /// Matrix as JSON rows (inline or a file path).
        #[arg(long)]
        matrix: String,
        /// Shift as a JSON array; zero if omitted.
        #[arg(long)]
        shift: Option<String>,
    },
    /// Γ(M) for a matrix or Γ(Comp(P)) for a polynomial.
    Gamma {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        poly: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Γ(d, p, ℓ).
    GammaDpl {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        l: u64,
    },
    /// Writes a matrix as a product of ℓ matrices without eigenvalue -1.
    CglFactor {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 2)]
        l: u64,
    },
    /// Lifts a base permutation from a JSON job file.
    Construct {
        /// Job as JSON (inline, a file path, or "-" for stdin).
        #[arg(long)]
        job: String,
        #[arg(long)]
        verify: bool,
    },
    /// A complete mapping of GF(p)^k with a Sylow-p cycle type.
    SylowType {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        /// Target cycle type, e.g. "x1^3 x3^2".
        #[arg(long = "type")]
        target: String,
        #[arg(long)]
        verify: bool,
    },
    /// The p^k-cycle h_k as a coset-wise affine map.
    OneCycle {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        verify: bool,
    },
    /// The reduced polynomial of h_k over GF(p^k).
    OneCyclePoly {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Oracle analysis of a value table or a coset-wise affine map.
    Verify {
        /// MapTable as JSON {"n", "images"} or CSV lines "x,y".
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        table: Option<String>,
        /// Coset-wise affine map JSON.
        #[arg(long)]
        map: Option<String>,
        /// Read indices as vectors over GF(p); plain integers mod n otherwise.
        #[arg(long)]
        p: Option<u64>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CycleTypeRepr {
    Text(String),
    Map(BTreeMap<String, u64>),
}

impl CycleTypeRepr {
    fn into_cycle_type(self) -> Result<CycleType> {
        match self {
            CycleTypeRepr::Text(s) => s.parse(),
            CycleTypeRepr::Map(m) => {
                let pairs = m
                    .into_iter()
                    .map(|(k, v)| k.parse::<u64>().map(|k| (k, v)))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse("cycle lengths must be integers".into()))?;
                CycleType::from_pairs(pairs)
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum JobMode {
    Complete,
    Permutation,
}

#[derive(Deserialize)]
struct GammaEntry {
    l: u64,
    i: usize,
    #[serde(rename = "type")]
    gamma: CycleTypeRepr,
}

/// `{"p", "d", "t", "g": [images], "gammas": [{"l", "i", "type"}], "mode"}`.
#[derive(Deserialize)]
struct Job {
    p: u64,
    d: usize,
    t: usize,
    g: Vec<usize>,
    gammas: Vec<GammaEntry>,
    #[serde(default = "complete_mode")]
    mode: JobMode,
}

fn complete_mode() -> JobMode {
    JobMode::Complete
}

enum Failure {
    Lib(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(String, i32), Failure>;

/// Runs the CLI on `args` (program name first) against the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            if code == 1 {
                let _ = writeln!(err, "error: empty result");
            }
            code
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_infeasible() {
                1
            } else {
                2
            }
        }
        Err(Failure::Verify(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            2
        }
    }
}

fn read_input(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

fn read_json(arg: &str) -> Result<Value> {
    serde_json::from_str(&read_input(arg)?).map_err(|e| Error::Parse(e.to_string()))
}

fn line(s: impl std::fmt::Display) -> String {
    format!("{s}\n")
}

fn json_line(v: &Value) -> String {
    line(serde_json::to_string(v).expect("serializable"))
}

fn dispatch(cli: &Cli) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::CycleType { field, matrix, shift } => {
            let field = field.field()?;
            let m = matrix_from_json(&field, &read_json(matrix)?)?;
            let v = match shift {
                Some(s) => vector_from_json(&field, &read_json(s)?)?,
                None => Vector::zeros(&field, m.rows()),
            };
            let ct = affine_cycle_type(&AffineMap::new(m, v)?)?;
            Ok((cycle_type_out(&ct, fmt), 0))
        }
        Command::Gamma { field, poly, matrix } => {
            let field = field.field()?;
            let set = match (poly, matrix) {
                (Some(text), _) => gamma_of_poly(&parse_poly(&field, text)?)?,
                (None, Some(m)) => gamma_of_matrix(&matrix_from_json(&field, &read_json(m)?)?)?,
                (None, None) => return Err(Error::InvalidArgument("give --poly or --matrix".into()).into()),
            };
            Ok((cycle_type_set_out(set.iter(), fmt), 0))
        }
        Command::GammaDpl { d, p, l } => {
            let set = gamma_dpl(*d, *p, *l)?;
            let code = if set.is_empty() { 1 } else { 0 };
            Ok((cycle_type_set_out(set.iter(), fmt), code))
        }
        Command::CglFactor { field, matrix, l } => {
            let field = field.field()?;
            let m = matrix_from_json(&field, &read_json(matrix)?)?;
            let fac = factor_into_cgl(&m, *l, cli.seed)?;
            let factors: Vec<Value> = fac.factors.iter().map(matrix_to_json).collect();
            let text = match fmt {
                Format::Json => json_line(&Value::from(factors)),
                Format::Text => factors.iter().map(json_line).collect(),
            };
            Ok((text, 0))
        }
        Command::Construct { job, verify } => {
            let job: Job = serde_json::from_value(read_json(job)?).map_err(|e| Error::Parse(format!("job: {e}")))?;
            let mut gammas = GammaChoice::new();
            let mut expected = CycleType::empty();
            for entry in job.gammas {
                let gamma = entry.gamma.into_cycle_type()?;
                expected = expected.try_mul(&gamma.try_blow_up(entry.l)?)?;
                if gammas.insert((entry.l, entry.i), gamma).is_some() {
                    return Err(Error::Parse(format!("γ for ({}, {}) given twice", entry.l, entry.i)).into());
                }
            }
            let mode = match job.mode {
                JobMode::Complete => ConstructMode::Complete,
                JobMode::Permutation => ConstructMode::Permutation,
            };
            let map = construct_main(job.p, job.d, job.t, &job.g, &gammas, cli.seed, mode)?;
            if gammas.len() != map.top_cycles()?.len() {
                return Err(Error::InvalidArgument("more γ entries than cycles of g".into()).into());
            }
            if *verify {
                self_check(&map, Some(&expected), (mode == ConstructMode::Complete).then_some(true))?;
            }
            Ok((map_out(&map, fmt)?, 0))
        }
        Command::SylowType { p, k, target, verify } => {
            let target: CycleType = target.parse()?;
            let map = construct_sylow_type(*p, *k, &target)?;
            if *verify {
                self_check(&map, Some(&target), Some(true))?;
            }
            Ok((map_out(&map, fmt)?, 0))
        }
        Command::OneCycle { p, k, verify } => {
            let map = one_cycle_map(*p, *k)?;
            if *verify {
                let n = p
                    .checked_pow(*k as u32)
                    .ok_or(Error::Overflow("p^k"))?;
                self_check(&map, Some(&CycleType::cycle(n)), Some(*p != 2))?;
            }
            Ok((map_out(&map, fmt)?, 0))
        }
        Command::OneCyclePoly { field } => {
            let field = field.field()?;
            let poly = one_cycle_polynomial(&field)?;
            Ok((poly_out(&poly, fmt), 0))
        }
        Command::Verify { table, map, p } => {
            let (table, addition, structural) = match (table, map) {
                (Some(t), _) => {
                    let text = read_input(t)?;
                    let table = if text.trim_start().starts_with('{') {
                        MapTable::from_json(&text)?
                    } else {
                        MapTable::from_csv(&text)?
                    };
                    let addition = match p {
                        Some(p) => Addition::Digitwise { p: *p },
                        None => Addition::Cyclic,
                    };
                    (table, addition, None)
                }
                (None, Some(m)) => {
                    let map = CosetWiseAffineMap::from_json(&read_json(m)?)?;
                    let addition = Addition::Digitwise { p: map.splitting().p };
                    (map.tabulate()?, addition, Some(map))
                }
                (None, None) => return Err(Error::InvalidArgument("give --table or --map".into()).into()),
            };
            let report = analyze(&table, addition)?;
            if let Some(map) = structural {
                agree(&map, &report)?;
            }
            Ok((report_out(&report, fmt), 0))
        }
    }
}

/// Structural predicates against the oracle.
fn agree(map: &CosetWiseAffineMap, report: &Report) -> std::result::Result<(), Failure> {
    if map.is_permutation() != report.is_bijection {
        return Err(Failure::Verify("bijectivity disagrees with the oracle".into()));
    }
    if map.is_complete() != report.is_complete {
        return Err(Failure::Verify("completeness disagrees with the oracle".into()));
    }
    if map.is_permutation() && Some(map.cycle_type()?) != report.cycle_type {
        return Err(Failure::Verify("cycle type disagrees with the oracle".into()));
    }
    Ok(())
}

fn self_check(
    map: &CosetWiseAffineMap,
    expected: Option<&CycleType>,
    complete: Option<bool>,
) -> std::result::Result<(), Failure> {
    let report = analyze(&map.tabulate()?, Addition::Digitwise { p: map.splitting().p })?;
    agree(map, &report)?;
    if let Some(ct) = expected {
        if report.cycle_type.as_ref() != Some(ct) {
            let got = report.cycle_type.map_or("none".to_string(), |c| c.to_string());
            return Err(Failure::Verify(format!("expected cycle type {ct}, oracle found {got}")));
        }
    }
    if let Some(c) = complete {
        if report.is_complete != c {
            return Err(Failure::Verify(format!("expected complete = {c}, oracle found {}", report.is_complete)));
        }
    }
    Ok(())
}

fn cycle_type_out(ct: &CycleType, fmt: Format) -> String {
    match fmt {
        Format::Text => line(ct),
        Format::Json => json_line(&serde_json::to_value(ct).expect("serializable")),
    }
}

fn cycle_type_set_out<'a>(set: impl Iterator<Item = &'a CycleType>, fmt: Format) -> String {
    match fmt {
        Format::Text => set.map(line).collect(),
        Format::Json => json_line(&serde_json::to_value(set.collect::<Vec<_>>()).expect("serializable")),
    }
}

fn poly_out(poly: &Poly, fmt: Format) -> String {
    match fmt {
        Format::Text => line(poly.to_text("x")),
        Format::Json => json_line(&poly_to_json(poly)),
    }
}

fn report_out(r: &Report, fmt: Format) -> String {
    match fmt {
        Format::Json => json_line(&serde_json::to_value(r).expect("serializable")),
        Format::Text => {
            let ct = r.cycle_type.as_ref().map_or("none".to_string(), |c| c.to_string());
            format!(
                "bijection: {}\ncomplete: {}\northomorphism: {}\ncycle type: {ct}\nfixed points: {}\n",
                r.is_bijection, r.is_complete, r.is_orthomorphism, r.fixed_points
            )
        }
    }
}

fn fmt_vector(v: &Vector) -> String {
    let parts: Vec<String> = v.data().iter().map(|&a| v.field().format_elem(a)).collect();
    format!("({})", parts.join(" "))
}

fn fmt_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = m.row_vectors().iter().map(fmt_vector).collect();
    format!("[{}]", rows.join(" "))
}

fn map_out(map: &CosetWiseAffineMap, fmt: Format) -> Result<String> {
    if fmt == Format::Json {
        return Ok(json_line(&map.to_json()));
    }
    let s = map.splitting();
    let mut text = format!("p={} d={} t={}\n", s.p, s.d, s.t);
    if map.is_permutation() {
        text += &format!("cycle type: {}\n", map.cycle_type()?);
    }
    text += &format!("complete: {}\n", map.is_complete());
    let field = map.field();
    for (i, c) in map.cosets().iter().enumerate() {
        let u = crate::oracle::index_to_vector(field, s.t, i);
        text += &format!(
            "u={} alpha={} omega={} nu={}\n",
            fmt_vector(&u),
            fmt_matrix(&c.alpha),
            fmt_vector(&c.omega),
            fmt_vector(&c.nu)
        );
    }
    Ok(text)
}
