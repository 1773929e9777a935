//! `metabelian`: classify, explore and inspect the groups `Z[1/N] x| Z^k`.
//!
//! Exit status: 0 on success or an equivalence verdict, 1 when two groups are
//! not quasi-isometric, 2 on usage or parse errors, 3 when a resource cap is
//! exceeded.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use metabelian::classify::{qi_gamma_s, ClassificationVerdict, Witness};
use metabelian::explore::{bfs_ball_with, qi_compare_with, Limits, DEFAULT_ADDITIVE_BUDGET};
use metabelian::group::{evaluate_word, format_word, parse_word, ElementRepr};
use metabelian::tree::{branching_sequence, height, subtree_levels, HeightValue};
use metabelian::{Error, GroupElement, GroupSpec};
use serde::Serialize;

/// Rough per-element footprint used to turn `--cap-mem` into an element cap.
const BYTES_PER_ELEMENT: u64 = 512;
/// Rough per-vertex footprint of a rendered subtree.
const BYTES_PER_VERTEX: u64 = 256;
const DEFAULT_TREE_VERTICES: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "metabelian", version, about = "Metabelian groups Z[1/N] x| Z^k and their tree models")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Memory budget in MiB for ball exploration and tree rendering.
    #[arg(long = "cap-mem", global = true, value_name = "MIB")]
    cap_mem: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two groups are quasi-isometric.
    Classify {
        /// Comma-separated factors such as `4,9`, or `gamma:n`.
        left: String,
        right: String,
    },
    /// Render the subtree of T^n below its base vertex.
    Tree {
        n: u64,
        #[arg(long, default_value_t = 2)]
        depth: u32,
    },
    /// Evaluate a word (or a JSON element) and describe the result.
    Elem {
        spec: String,
        /// A word like `a1^-1 b a1`, or `{"q":"1/2","v":[0]}`.
        word: String,
    },
    /// Sphere and ball sizes of the Cayley graph.
    Ball {
        spec: String,
        #[arg(long = "r")]
        r: u32,
    },
    /// Fit quasi-isometry constants between word and model distance on B(r).
    Qifit {
        spec: String,
        #[arg(long = "r")]
        r: u32,
        /// Additive budget C that the fitted K must respect.
        #[arg(long, default_value_t = DEFAULT_ADDITIVE_BUDGET)]
        budget: f64,
        /// Include every sampled pair in the output.
        #[arg(long)]
        pairs: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
            Format::Text => "text",
        }
    }
}

enum Failure {
    Usage(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded(_) => Failure::Cap(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

type Outcome = Result<Output, Failure>;

fn pick(requested: Option<Format>, allowed: &[Format], command: &str) -> Result<Format, Failure> {
    match requested {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => {
            let names: Vec<&str> = allowed.iter().map(|a| a.name()).collect();
            Err(Failure::Usage(format!(
                "{command} does not support --format {}; choose one of {}",
                f.name(),
                names.join(", ")
            )))
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn limits(spec: &GroupSpec, cap_mem: Option<u64>) -> Limits {
    let base = Limits::for_spec(spec);
    match cap_mem {
        Some(mib) => base.with_max_elements((mib * 1024 * 1024 / BYTES_PER_ELEMENT) as usize),
        None => base,
    }
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    left: &'a [u64],
    right: &'a [u64],
    #[serde(flatten)]
    verdict: &'a ClassificationVerdict,
}

fn describe(left: &GroupSpec, right: &GroupSpec, verdict: &ClassificationVerdict) -> String {
    let mut out = String::new();
    let relation = if verdict.equivalent { "quasi-isometric" } else { "not quasi-isometric" };
    let _ = writeln!(out, "{left} and {right} are {relation}");
    match &verdict.witness {
        Witness::RankMismatch { left: k, right: l } => {
            let _ = writeln!(out, "ranks differ: {k} factors against {l}");
        }
        Witness::PrimeSupports { left: p, right: q } => {
            let _ = writeln!(out, "prime supports: {p:?} and {q:?}");
        }
        Witness::PrimitiveRoots { left: lr, right: rr, pairs } => {
            let show = |s: &GroupSpec, r: &[metabelian::ring::PrimitiveRoot]| {
                s.factors()
                    .iter()
                    .zip(r)
                    .map(|(n, r)| format!("{n} = {}^{}", r.root, r.exponent))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let _ = writeln!(out, "left roots:  {}", show(left, lr));
            let _ = writeln!(out, "right roots: {}", show(right, rr));
            for p in pairs {
                let _ = writeln!(
                    out,
                    "  {} <-> {} (common root {})",
                    p.left, p.right, p.root
                );
            }
            if !verdict.equivalent {
                let _ = writeln!(out, "no pairing matches every factor with a rational power of its partner");
            }
        }
    }
    out
}

fn classify(left: &str, right: &str, format: Option<Format>) -> Outcome {
    let format = pick(format, &[Format::Text, Format::Json], "classify")?;
    let s1 = GroupSpec::parse(left)?;
    let s2 = GroupSpec::parse(right)?;
    let verdict = qi_gamma_s(&s1, &s2)?;
    let text = match format {
        Format::Json => json(&ClassifyReport {
            left: s1.factors(),
            right: s2.factors(),
            verdict: &verdict,
        })?,
        _ => describe(&s1, &s2, &verdict),
    };
    Ok(Output {
        text,
        code: if verdict.equivalent { 0 } else { 1 },
    })
}

#[derive(Serialize)]
struct TreeLevel {
    level: i64,
    vertices: Vec<String>,
}

#[derive(Serialize)]
struct TreeReport {
    n: u64,
    depth: u32,
    branching: Vec<(String, u64)>,
    levels: Vec<TreeLevel>,
}

fn tree(n: u64, depth: u32, format: Option<Format>, cap_mem: Option<u64>) -> Outcome {
    let format = pick(format, &[Format::Dot, Format::Json, Format::Text], "tree")?;
    let t = branching_sequence(n)?;
    let cap = cap_mem.map_or(DEFAULT_TREE_VERTICES, |mib| mib * 1024 * 1024 / BYTES_PER_VERTEX);
    let (mut total, mut width) = (1u64, 1u64);
    for level in 0..depth {
        width = width.saturating_mul(t.branching_at(level as i64));
        total = total.saturating_add(width);
        if total > cap {
            return Err(Failure::Cap(format!(
                "the subtree of T^{n} to depth {depth} has more than {cap} vertices"
            )));
        }
    }
    let root = t.base_vertex();
    let text = match format {
        Format::Dot => metabelian::tree::subtree_dot(&root, depth),
        Format::Json => json(&TreeReport {
            n,
            depth,
            branching: t.crossings().iter().map(|c| (c.phase.to_string(), c.factor)).collect(),
            levels: subtree_levels(&root, depth)
                .iter()
                .enumerate()
                .map(|(l, vs)| TreeLevel {
                    level: l as i64,
                    vertices: vs.iter().map(|v| v.coset().to_string()).collect(),
                })
                .collect(),
        })?,
        _ => {
            let mut out = format!("{t}\n");
            for (l, vs) in subtree_levels(&root, depth).iter().enumerate() {
                let _ = writeln!(out, "level {l}: {} vertices", vs.len());
            }
            out
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct ElemReport {
    spec: Vec<u64>,
    element: ElementRepr,
    normal_form: String,
    matrix: Option<[[String; 2]; 2]>,
    heights: HeightValue,
    expansion: String,
    similarity_factors: Vec<String>,
}

fn read_element(spec: &Arc<GroupSpec>, input: &str) -> Result<GroupElement, Failure> {
    if input.trim_start().starts_with('{') {
        let repr: ElementRepr = serde_json::from_str(input)?;
        return Ok(GroupElement::from_repr(spec, &repr)?);
    }
    Ok(evaluate_word(spec, &parse_word(spec, input)?)?)
}

fn elem(spec: &str, word: &str, format: Option<Format>) -> Outcome {
    let format = pick(format, &[Format::Json, Format::Text], "elem")?;
    let spec = GroupSpec::parse(spec)?;
    let g = read_element(&spec, word)?;
    let report = ElemReport {
        spec: spec.factors().to_vec(),
        element: g.to_repr(),
        normal_form: format_word(&g.normal_form().to_word()),
        matrix: g.to_matrix().ok().map(|m| m.rows()),
        heights: height(&g),
        expansion: g.expansion().to_string(),
        similarity_factors: (0..spec.rank())
            .map(|i| g.similarity_factor(i).map(|x| x.to_string()))
            .collect::<Result<_, _>>()?,
    };
    let text = match format {
        Format::Json => json(&report)?,
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "group        {spec}");
            let _ = writeln!(out, "element      q = {}, v = {:?}", g.q(), g.v());
            let _ = writeln!(out, "normal form  {}", report.normal_form);
            if let Some(m) = &report.matrix {
                let _ = writeln!(out, "matrix       [[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1]);
            }
            let _ = writeln!(out, "heights      {:?} (total {})", report.heights.per_tree, report.heights.total);
            let _ = writeln!(out, "expansion    {}", report.expansion);
            let _ = writeln!(out, "similarity   {}", report.similarity_factors.join(", "));
            out
        }
    };
    Ok(Output::ok(text))
}

fn ball(spec: &str, r: u32, format: Option<Format>, cap_mem: Option<u64>) -> Outcome {
    let format = pick(format, &[Format::Csv, Format::Json, Format::Text], "ball")?;
    let spec = GroupSpec::parse(spec)?;
    let table = bfs_ball_with(&spec, r, &limits(&spec, cap_mem))?.table();
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => json(&table)?,
        _ => {
            let mut out = format!("{spec}, generators {}\n", table.generators);
            for (i, (s, b)) in table.spheres.iter().zip(&table.balls).enumerate() {
                let _ = writeln!(out, "|S({i})| = {s}, |B({i})| = {b}");
            }
            out
        }
    };
    Ok(Output::ok(text))
}

fn qifit(spec: &str, r: u32, budget: f64, pairs: bool, format: Option<Format>, cap_mem: Option<u64>) -> Outcome {
    let format = pick(format, &[Format::Json, Format::Csv, Format::Text], "qifit")?;
    if !(budget.is_finite() && budget >= 0.0) {
        return Err(Failure::Usage(format!("--budget must be a nonnegative number, got {budget}")));
    }
    let spec = GroupSpec::parse(spec)?;
    let mut report = qi_compare_with(&spec, r, budget, &limits(&spec, cap_mem))?;
    if !pairs {
        report.pairs.clear();
    }
    let text = match format {
        Format::Json => json(&report)?,
        Format::Csv if pairs => {
            let mut out = String::from("i,j,word_distance,model_distance\n");
            for p in &report.pairs {
                let _ = writeln!(out, "{},{},{},{}", p.pair[0], p.pair[1], p.word_distance, p.model_distance);
            }
            out
        }
        Format::Csv => format!(
            "radius,ball_size,pair_count,k,c,budget\n{},{},{},{},{},{}\n",
            report.radius, report.ball_size, report.pair_count, report.fit.k, report.fit.c, budget
        ),
        _ => format!(
            "{spec}, B({r}) with {} elements, {} pairs\nK = {:.6}\nC = {:.6}\n",
            report.ball_size, report.pair_count, report.fit.k, report.fit.c
        ),
    };
    Ok(Output::ok(text))
}

fn run(cli: Cli) -> Outcome {
    let (format, cap_mem) = (cli.format, cli.cap_mem);
    match cli.command {
        Command::Classify { left, right } => classify(&left, &right, format),
        Command::Tree { n, depth } => tree(n, depth, format, cap_mem),
        Command::Elem { spec, word } => elem(&spec, &word, format),
        Command::Ball { spec, r } => ball(&spec, r, format, cap_mem),
        Command::Qifit { spec, r, budget, pairs } => qifit(&spec, r, budget, pairs, format, cap_mem),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(output) => {
            let written = match &out {
                Some(path) => fs::write(path, &output.text),
                None => io::stdout().write_all(output.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(output.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
