//! Command-line front end. Every command is a thin shell over the library.
//!
//! Exit codes: 0 success, 1 an identity or membership check came out false
//! (or the β list is not factorizable), 2 usage or input errors, 3 the
//! certificate search ran out of budget.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, ProverError};
use crate::export::{from_json, render_system, render_tree, Format};
use crate::ideal::{contains, enumerate_members, ideal_genfun_vec, IdealFile, SpanOneIdeal};
use crate::multisum::{eval_h, rec_children, shift_beta, verify_recurrence_numeric, Beta, MultisumProfile};
use crate::partition::{oracle_genfun, Partition, Predicate};
use crate::prover::{
    assemble_system, check_certificate, FactorizationCheck, FactorizationSystem, HCache, ProofTree, SystemSpec,
    DEFAULT_MAX_EXPANSIONS,
};
use crate::qdiff::{check_system, f_from_g, solve, QDiffSystem, SystemFile};
use crate::series::{Monomial, Series};

pub const DEFAULT_CLI_Q_MAX: u32 = 25;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "linked-ideals", version, about = "Linked partition ideals and q-multisum certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Orders {
    /// Truncation order in q.
    #[arg(long = "qmax", default_value_t = DEFAULT_CLI_Q_MAX)]
    pub q_max: u32,
    /// Truncation order in x (defaults to --qmax).
    #[arg(long = "xmax")]
    pub x_max: Option<u32>,
}

impl Orders {
    fn x(&self) -> u32 {
        self.x_max.unwrap_or(self.q_max)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Dot,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dot => Format::Dot,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Brute-force generating function of a partition predicate.
    Oracle {
        #[command(subcommand)]
        predicate: OraclePredicate,
        #[arg(long = "qmax", default_value_t = DEFAULT_CLI_Q_MAX, global = true)]
        q_max: u32,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Operations on an ideal description file.
    Ideal {
        #[command(subcommand)]
        op: IdealOp,
    },
    /// Solve or check a q-difference system.
    Qdiff {
        #[command(subcommand)]
        op: QdiffOp,
    },
    /// Evaluate and manipulate q-multisums H(β).
    Multisum {
        #[command(subcommand)]
        op: MultisumOp,
    },
    /// Derive certificates and the (U, V) pair for a system file.
    Prove {
        system: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_EXPANSIONS)]
        max_expansions: usize,
        /// Write the assembled system (or DOT with --format dot) here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Numerically verify F(x) = U.V.F(xq^S) for a system file.
    Verify {
        system: PathBuf,
        #[command(flatten)]
        orders: Orders,
        #[arg(long, default_value_t = DEFAULT_MAX_EXPANSIONS)]
        max_expansions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a certificate or assembled system as DOT or JSON.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OraclePredicate {
    /// Difference at least d at distance k.
    Gap {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Gap 3 at distance 2 with the divisibility condition on close pairs.
    KrI1,
    Always,
    Never,
}

#[derive(Debug, Subcommand)]
pub enum IdealOp {
    /// Per-letter generating functions G_k and their sum.
    Genfun {
        ideal: PathBuf,
        #[command(flatten)]
        orders: Orders,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List members up to size --qmax with their S-tail letter.
    Members {
        ideal: PathBuf,
        #[arg(long = "qmax", default_value_t = DEFAULT_CLI_Q_MAX)]
        q_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership test; prints the witnessing chain.
    Contains { ideal: PathBuf, partition: String },
}

#[derive(Debug, Subcommand)]
pub enum QdiffOp {
    /// Solve the system of an ideal file or a standalone system file.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        orders: Orders,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the solution satisfies the system and, for an ideal file,
    /// equals A times the per-letter generating functions.
    Check {
        input: PathBuf,
        #[command(flatten)]
        orders: Orders,
    },
}

#[derive(Debug, Subcommand)]
pub enum MultisumOp {
    Eval {
        profile: PathBuf,
        /// Comma-separated, e.g. --beta 1,3
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[command(flatten)]
        orders: Orders,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Children of H(β) in coordinate --coord (1-based).
    Rec {
        profile: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        coord: usize,
    },
    /// β + Sγ.
    Shift {
        profile: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long = "S")]
        shift: u32,
    },
    /// Numerically check the recurrence (all coordinates unless --coord).
    Check {
        profile: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        coord: Option<usize>,
        #[command(flatten)]
        orders: Orders,
    },
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Prover(ProverError::Exhausted { .. }) => EXIT_EXHAUSTED,
                Error::Prover(ProverError::NotFactorizable { .. }) => EXIT_FALSE,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    from_json(&read(path)?, &path.display().to_string())
}

fn load_ideal(path: &Path) -> Result<SpanOneIdeal, Error> {
    load::<IdealFile>(path)?.into_ideal()
}

fn parse_beta(text: &str) -> Result<Beta, Error> {
    text.split(',')
        .map(|t| {
            t.trim().parse::<i64>().map_err(|_| Error::Format {
                path: "--beta".into(),
                message: format!("`{t}` is not an integer"),
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Beta)
}

/// Writes `text` to `path`, or to `out` when no path is given.
fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Plain-text lines followed by a JSON block.
fn report(lines: &[String], data: Value) -> String {
    let mut s = lines.join("\n");
    s.push_str("\n\n");
    s.push_str(&serde_json::to_string_pretty(&data).expect("json value"));
    s.push('\n');
    s
}

fn series_json(s: &Series) -> Value {
    json!({
        "x_max": s.x_max(),
        "q_max": s.q_max(),
        "terms": s.terms().map(|(m, n, c)| json!([m, n, c.to_string()])).collect::<Vec<_>>(),
    })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Error> {
    match command {
        Command::Oracle {
            predicate,
            q_max,
            out: path,
        } => {
            let pred = match predicate {
                OraclePredicate::Gap { d, k } => Predicate::Gap { d, k: k as usize },
                OraclePredicate::KrI1 => Predicate::KrI1,
                OraclePredicate::Always => Predicate::Always,
                OraclePredicate::Never => Predicate::Never,
            };
            let s = oracle_genfun(|p| pred.test(p), q_max);
            emit(out, path.as_deref(), &format!("{s}\n"))?;
            Ok(EXIT_OK)
        }
        Command::Ideal { op } => ideal_cmd(op, out),
        Command::Qdiff { op } => qdiff_cmd(op, out),
        Command::Multisum { op } => multisum_cmd(op, out),
        Command::Prove {
            system,
            max_expansions,
            out: path,
            format,
        } => {
            let spec: SystemSpec = load(&system)?;
            let sys = assemble_system(&spec.profile, spec.shift, &spec.betas, max_expansions)?;
            out.write_all(prove_report(&sys).as_bytes())?;
            if let Some(p) = path {
                std::fs::write(p, render_system(&sys, format.into()))?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            system,
            orders,
            max_expansions,
            out: path,
        } => {
            let spec: SystemSpec = load(&system)?;
            let (text, ok) = verify_report(&spec, orders.x(), orders.q_max, max_expansions)?;
            emit(out, path.as_deref(), &text)?;
            Ok(if ok { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Export {
            input,
            format,
            out: path,
        } => {
            let text = read(&input)?;
            let name = input.display().to_string();
            let value: Value = from_json(&text, &name)?;
            let rendered = if value.get("certificates").is_some() {
                render_system(&from_json::<FactorizationSystem>(&text, &name)?, format.into())
            } else {
                let tree: ProofTree = from_json(&text, &name)?;
                let mut r = render_tree(&tree, format.into());
                if !r.ends_with('\n') {
                    r.push('\n');
                }
                r
            };
            emit(out, path.as_deref(), &rendered)?;
            Ok(EXIT_OK)
        }
    }
}

fn ideal_cmd(op: IdealOp, out: &mut dyn Write) -> Result<i32, Error> {
    match op {
        IdealOp::Genfun { ideal, orders, out: path } => {
            let ideal = load_ideal(&ideal)?;
            let g = ideal_genfun_vec(&ideal, orders.x(), orders.q_max);
            let total = g[1..].iter().fold(g[0].clone(), |acc, s| &acc + s);
            let mut lines: Vec<String> = g.iter().enumerate().map(|(k, s)| format!("G_{} = {s}", k + 1)).collect();
            lines.push(format!("G = {total}"));
            let data = json!({
                "per_letter": g.iter().map(series_json).collect::<Vec<_>>(),
                "total": series_json(&total),
            });
            emit(out, path.as_deref(), &report(&lines, data))?;
            Ok(EXIT_OK)
        }
        IdealOp::Members { ideal, q_max, out: path } => {
            let ideal = load_ideal(&ideal)?;
            let mut m = enumerate_members(&ideal, q_max).members;
            m.sort_by(|(a, _), (b, _)| (a.size(), a.parts()).cmp(&(b.size(), b.parts())));
            let mut text = String::new();
            for (p, tail) in &m {
                text.push_str(&format!("{p}\t{}\n", tail + 1));
            }
            emit(out, path.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        IdealOp::Contains { ideal, partition } => {
            let ideal = load_ideal(&ideal)?;
            let lambda: Partition = partition.parse()?;
            match contains(&ideal, &lambda) {
                Some(chain) => {
                    let letters: Vec<String> = chain.iter().map(|&i| (i + 1).to_string()).collect();
                    writeln!(out, "member: chain {}", letters.join(" "))?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(out, "not a member")?;
                    Ok(EXIT_FALSE)
                }
            }
        }
    }
}

/// The system, plus the ideal it came from when the file describes one.
fn load_qdiff(path: &Path) -> Result<(QDiffSystem, Option<SpanOneIdeal>), Error> {
    let text = read(path)?;
    let name = path.display().to_string();
    let value: Value = from_json(&text, &name)?;
    if value.get("pi").is_some() {
        let ideal = from_json::<IdealFile>(&text, &name)?.into_ideal()?;
        Ok((QDiffSystem::from_ideal(&ideal)?, Some(ideal)))
    } else {
        Ok((QDiffSystem::from_file(from_json::<SystemFile>(&text, &name)?)?, None))
    }
}

fn qdiff_cmd(op: QdiffOp, out: &mut dyn Write) -> Result<i32, Error> {
    match op {
        QdiffOp::Solve { input, orders, out: path } => {
            let (sys, _) = load_qdiff(&input)?;
            let f = solve(&sys, orders.x(), orders.q_max);
            let lines: Vec<String> = f.iter().enumerate().map(|(k, s)| format!("F_{} = {s}", k + 1)).collect();
            let data = json!({ "F": f.iter().map(series_json).collect::<Vec<_>>() });
            emit(out, path.as_deref(), &report(&lines, data))?;
            Ok(EXIT_OK)
        }
        QdiffOp::Check { input, orders } => {
            let (sys, src) = load_qdiff(&input)?;
            let (x, q) = (orders.x(), orders.q_max);
            let f = solve(&sys, x, q);
            let satisfies = check_system(&f, &sys);
            let mut lines = vec![format!("F = A.W.F(xq^{}) to x^{x} q^{q}: {}", sys.shift(), verdict(satisfies))];
            let mut data = json!({ "x_max": x, "q_max": q, "satisfies_system": satisfies });
            let mut ok = satisfies;
            if let Some(ideal) = src {
                let g = ideal_genfun_vec(&ideal, x, q);
                let agree = f_from_g(sys.adjacency(), &g) == f;
                lines.push(format!("F = A.G from chain walks: {}", verdict(agree)));
                data["matches_walks"] = json!(agree);
                ok &= agree;
            }
            out.write_all(report(&lines, data).as_bytes())?;
            Ok(if ok { EXIT_OK } else { EXIT_FALSE })
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn coordinate(c: usize, rank: usize) -> Result<usize, Error> {
    if c == 0 || c > rank {
        return Err(Error::Format {
            path: "--coord".into(),
            message: format!("coordinate {c} is out of range 1..={rank}"),
        });
    }
    Ok(c - 1)
}

fn multisum_cmd(op: MultisumOp, out: &mut dyn Write) -> Result<i32, Error> {
    match op {
        MultisumOp::Eval {
            profile,
            beta,
            orders,
            out: path,
        } => {
            let p: MultisumProfile = load(&profile)?;
            let s = eval_h(&p, &parse_beta(&beta)?, orders.x(), orders.q_max)?;
            emit(out, path.as_deref(), &format!("{s}\n"))?;
            Ok(EXIT_OK)
        }
        MultisumOp::Rec { profile, beta, coord } => {
            let p: MultisumProfile = load(&profile)?;
            let beta = parse_beta(&beta)?;
            let rec = rec_children(&p, &beta, coordinate(coord, p.rank())?)?;
            writeln!(out, "H{beta} = H{} + {}*H{}", rec.left, rec.weight, rec.right)?;
            Ok(EXIT_OK)
        }
        MultisumOp::Shift { profile, beta, shift } => {
            let p: MultisumProfile = load(&profile)?;
            writeln!(out, "{}", shift_beta(&p, &parse_beta(&beta)?, shift)?)?;
            Ok(EXIT_OK)
        }
        MultisumOp::Check {
            profile,
            beta,
            coord,
            orders,
        } => {
            let p: MultisumProfile = load(&profile)?;
            let beta = parse_beta(&beta)?;
            let coords = match coord {
                Some(c) => vec![coordinate(c, p.rank())?],
                None => (0..p.rank()).collect(),
            };
            let mut ok = true;
            for r in coords {
                let good = verify_recurrence_numeric(&p, &beta, r, orders.x(), orders.q_max)?;
                writeln!(out, "coordinate {}: {}", r + 1, verdict(good))?;
                ok &= good;
            }
            Ok(if ok { EXIT_OK } else { EXIT_FALSE })
        }
    }
}

fn matrix_lines(u: &[Vec<u8>]) -> Vec<String> {
    u.iter()
        .map(|row| row.iter().map(u8::to_string).collect::<Vec<_>>().join(" "))
        .collect()
}

fn row_identity(k: usize, u_row: &[u8], v: &[Monomial], shift: u32) -> String {
    let terms: Vec<String> = u_row
        .iter()
        .zip(v)
        .enumerate()
        .filter(|(_, (&u, _))| u != 0)
        .map(|(j, (_, m))| {
            if *m == Monomial::ONE {
                format!("F_{}(xq^{shift})", j + 1)
            } else {
                format!("{m}*F_{}(xq^{shift})", j + 1)
            }
        })
        .collect();
    format!("F_{}(x) = {}", k + 1, terms.join(" + "))
}

/// Human-readable summary of an assembled system with the system as JSON.
pub fn prove_report(sys: &FactorizationSystem) -> String {
    let mut lines = vec![format!("S = {}", sys.shift)];
    let betas: Vec<String> = sys.betas.iter().map(Beta::to_string).collect();
    lines.push(format!("betas = {}", betas.join(" ")));
    let v: Vec<String> = sys.v.iter().map(Monomial::to_string).collect();
    lines.push(format!("V = diag({})", v.join(", ")));
    lines.push("U =".into());
    lines.extend(matrix_lines(&sys.u).into_iter().map(|l| format!("  {l}")));
    for t in &sys.certificates {
        lines.push(format!("certificate H{}: {} expansions", t.beta, t.expansions()));
    }
    for k in 0..sys.betas.len() {
        lines.push(row_identity(k, &sys.u[k], &sys.v, sys.shift));
    }
    report(&lines, serde_json::to_value(sys).expect("system serializes"))
}

/// Checks every row identity numerically; when the file carries no `U`/`V`
/// they are derived first and each certificate is checked as well.
pub fn verify_report(
    spec: &SystemSpec,
    x_max: u32,
    q_max: u32,
    max_expansions: usize,
) -> Result<(String, bool), Error> {
    let (u, v, certificates) = match (&spec.u, &spec.v) {
        (Some(u), Some(v)) => (u.clone(), v.clone(), Vec::new()),
        (None, None) => {
            let sys = assemble_system(&spec.profile, spec.shift, &spec.betas, max_expansions)?;
            (sys.u, sys.v, sys.certificates)
        }
        _ => {
            return Err(Error::Format {
                path: "system".into(),
                message: "`U` and `V` must be given together".into(),
            })
        }
    };
    let k = spec.betas.len();
    if u.len() != k || u.iter().any(|r| r.len() != k) || v.len() != k {
        return Err(Error::Format {
            path: "system".into(),
            message: format!("`U` must be {k}x{k} and `V` must have {k} entries"),
        });
    }
    let check = FactorizationCheck::new(&spec.profile, spec.shift, &spec.betas, x_max, q_max)?;
    let failing = check.failing_rows(&u, &v);
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    for row in 0..k {
        let ok = !failing.contains(&row);
        lines.push(format!(
            "{} [x^{x_max} q^{q_max}]: {}",
            row_identity(row, &u[row], &v, spec.shift),
            verdict(ok)
        ));
        rows.push(json!({ "row": row + 1, "beta": spec.betas[row], "ok": ok }));
    }
    let mut ok = failing.is_empty();
    let mut certs = Vec::new();
    if !certificates.is_empty() {
        let mut cache = HCache::new(&spec.profile, x_max, q_max);
        for t in &certificates {
            let c = check_certificate(&mut cache, t)?;
            lines.push(format!(
                "certificate H{}: {} nodes checked, telescoped {}: {}",
                t.beta,
                c.nodes_checked,
                verdict(c.telescoped_ok),
                verdict(c.passed())
            ));
            certs.push(json!({ "root": t.beta, "nodes_checked": c.nodes_checked, "ok": c.passed() }));
            ok &= c.passed();
        }
    }
    lines.push(format!("result: {}", if ok { "verified" } else { "FAILED" }));
    let data = json!({
        "x_max": x_max,
        "q_max": q_max,
        "rows": rows,
        "certificates": certs,
        "verified": ok,
    });
    Ok((report(&lines, data), ok))
}
