//! Batch front end: functional reports, axiom/property verification suites,
//! and convergence tables, with machine-readable output.
//!
//! All randomness flows from the single `--seed` flag, so identical
//! configurations produce byte-identical output.

mod suites;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

use entmon::functionals::{
    estimate_upper, limit_sequence, limit_shannon_value, state_digest, FunctionalReport,
};
use entmon::gmean::GMeanTree;
use entmon::multilinear::{Bipartition, MultipartiteState, SpaceSpec};
use entmon::observables::FamilySpec;
use entmon::Error as CoreError;

const DEFAULT_SEED: u64 = 20240915;

#[derive(Parser)]
#[command(name = "entmon", version, about = "Entanglement monotones from symmetric-power observables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate functional reports for a state.
    Compute(ComputeArgs),
    /// Run the verification suites; exits nonzero if any check fails.
    Verify(VerifyArgs),
    /// Emit the finite-copy convergence table for a state.
    Convergence(ComputeArgs),
}

#[derive(Args, Clone)]
struct ComputeArgs {
    /// State: a JSON file path, or inline `ghz:LEVEL,K`, `unit:R,K`, `w:K`,
    /// `random:D1xD2x...` (seeded by --seed).
    #[arg(long)]
    state: String,
    /// Comma-separated orders in (0,1), or the literal `limit1`.
    #[arg(long, default_value = "0.5")]
    alpha: String,
    /// Bipartitions: `elementary`, `all`, or a comma list like `1|23,2|13`.
    #[arg(long, default_value = "elementary")]
    bipartitions: String,
    /// Weights over the bipartitions (`uniform` or a comma list), or a path
    /// to a weight-tree JSON file.
    #[arg(long, default_value = "uniform")]
    theta: String,
    /// Tree shape policy when --theta gives flat weights.
    #[arg(long, value_enum, default_value = "balanced")]
    tree_shape: TreeShape,
    /// Largest number of copies n in the sequence.
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    /// Suites to run: `all` or a comma list of
    /// partitions,schurweyl,gmean,observables,semiring.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Local dimensions for the bipartite observable checks, e.g. `2x2`.
    #[arg(long, default_value = "2x2")]
    dims: String,
    /// Order parameter for the observable checks.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Copy counts (m, n) for the observable axioms.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Inject a known defect to exercise the failure paths.
    #[arg(long, value_enum, default_value = "none")]
    inject_fault: Fault,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeShape {
    Balanced,
    LeftComb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fault {
    None,
    EntropySign,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => cmd_compute(&args),
        Command::Verify(args) => suites::cmd_verify(&suites::VerifyConfig {
            suites: args.suite.clone(),
            dims: args.dims.clone(),
            alpha: args.alpha,
            m: args.m,
            n: args.n,
            tol: args.tol,
            seed: args.seed,
            fault: args.inject_fault == Fault::EntropySign,
            json: matches!(args.format, Format::Json),
        })
        .and_then(|(text, all_pass)| {
            emit(&args.out, &text)?;
            Ok(if all_pass { 0 } else { 1 })
        }),
        Command::Convergence(args) => cmd_convergence(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::CapExceeded { .. } => 3,
        _ => 2,
    }
}

fn emit(out: &Option<String>, text: &str) -> Result<(), CoreError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CoreError::InvalidInput(format!("cannot write {path}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CoreError::InvalidInput(format!("cannot write stdout: {e}")))
        }
    }
}

/// 12 significant digits, '.' decimal, no locale.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

// ---- state parsing ------------------------------------------------------

#[derive(Deserialize)]
struct StateFile {
    name: Option<String>,
    params: Option<serde_json::Map<String, serde_json::Value>>,
    seed: Option<u64>,
    dims: Option<Vec<usize>>,
    amplitudes: Option<Vec<(f64, f64)>>,
}

fn parse_state(text: &str, seed: u64) -> Result<MultipartiteState, CoreError> {
    if std::path::Path::new(text).exists() {
        let raw = fs::read_to_string(text)
            .map_err(|e| CoreError::InvalidInput(format!("cannot read {text}: {e}")))?;
        let file: StateFile = serde_json::from_str(&raw)
            .map_err(|e| CoreError::InvalidInput(format!("bad state file {text}: {e}")))?;
        return state_from_file(file, seed);
    }
    let (name, rest) = text
        .split_once(':')
        .ok_or_else(|| CoreError::InvalidInput(format!("unrecognized state '{text}'")))?;
    let ints = |s: &str| -> Result<Vec<usize>, CoreError> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| CoreError::InvalidInput(format!("bad integer '{p}' in '{text}'")))
            })
            .collect()
    };
    match name {
        "ghz" => {
            let v = ints(rest)?;
            if v.len() != 2 {
                return Err(CoreError::InvalidInput("ghz takes LEVEL,K".into()));
            }
            MultipartiteState::ghz(v[0], v[1])
        }
        "unit" => {
            let v = ints(rest)?;
            if v.len() != 2 {
                return Err(CoreError::InvalidInput("unit takes R,K".into()));
            }
            MultipartiteState::unit_tensor(v[0], v[1])
        }
        "w" => {
            let v = ints(rest)?;
            if v.len() != 1 {
                return Err(CoreError::InvalidInput("w takes K".into()));
            }
            MultipartiteState::w_state(v[0])
        }
        "random" => {
            let dims: Vec<usize> = rest
                .split('x')
                .map(|p| {
                    p.trim().parse::<usize>().map_err(|_| {
                        CoreError::InvalidInput(format!("bad dimension '{p}' in '{text}'"))
                    })
                })
                .collect::<Result<_, _>>()?;
            MultipartiteState::random(&dims, seed)
        }
        _ => Err(CoreError::InvalidInput(format!("unknown state kind '{name}'"))),
    }
}

fn state_from_file(file: StateFile, cli_seed: u64) -> Result<MultipartiteState, CoreError> {
    if let (Some(dims), Some(amps)) = (&file.dims, &file.amplitudes) {
        let amplitudes: Vec<Complex64> =
            amps.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        return MultipartiteState::new(SpaceSpec::new(dims.clone())?, amplitudes);
    }
    let name = file
        .name
        .as_deref()
        .ok_or_else(|| CoreError::InvalidInput("state file needs `name` or `dims`+`amplitudes`".into()))?;
    let params = file.params.unwrap_or_default();
    let get = |key: &str| -> Result<usize, CoreError> {
        params
            .get(key)
            .and_then(|v| v.as_u64())
            .map(|v| v as usize)
            .ok_or_else(|| CoreError::InvalidInput(format!("missing parameter `{key}`")))
    };
    match name {
        "ghz" => MultipartiteState::ghz(get("level")?, get("k")?),
        "unit" => MultipartiteState::unit_tensor(get("r")?, get("k")?),
        "w" => MultipartiteState::w_state(get("k")?),
        "random" => {
            let dims: Vec<usize> = params
                .get("dims")
                .and_then(|v| v.as_array())
                .map(|a| a.iter().filter_map(|x| x.as_u64()).map(|x| x as usize).collect())
                .ok_or_else(|| CoreError::InvalidInput("random needs `dims`".into()))?;
            MultipartiteState::random(&dims, file.seed.unwrap_or(cli_seed))
        }
        _ => Err(CoreError::InvalidInput(format!("unknown state name '{name}'"))),
    }
}

// ---- spec parsing -------------------------------------------------------

#[derive(Deserialize)]
#[serde(untagged)]
enum TreeNode {
    Leaf { leaf: String },
    Node {
        t: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

fn parse_bipartitions(text: &str, parts: usize) -> Result<Vec<Bipartition>, CoreError> {
    match text {
        "elementary" => {
            let mut out: Vec<Bipartition> = Vec::new();
            for j in 0..parts {
                let cut = Bipartition::elementary(j, parts)?;
                if !out.contains(&cut) {
                    out.push(cut);
                }
            }
            Ok(out)
        }
        "all" => {
            let mut out = Vec::new();
            for mask in 0..(1u32 << (parts - 1)) {
                let side: Vec<usize> = std::iter::once(0)
                    .chain((1..parts).filter(|j| mask & (1 << (j - 1)) != 0))
                    .collect();
                if side.len() < parts {
                    out.push(Bipartition::new(side, parts)?);
                }
            }
            Ok(out)
        }
        list => list.split(',').map(|b| Bipartition::parse(b.trim(), parts)).collect(),
    }
}

/// Builds the family spec from the CLI flags. A tree file fixes both the
/// bipartitions (its leaves) and the nesting; otherwise flat weights are
/// arranged by the requested shape policy.
fn parse_family(
    args: &ComputeArgs,
    parts: usize,
    alpha: f64,
) -> Result<(FamilySpec, Vec<(Bipartition, f64)>), CoreError> {
    if std::path::Path::new(&args.theta).exists() {
        let raw = fs::read_to_string(&args.theta)
            .map_err(|e| CoreError::InvalidInput(format!("cannot read {}: {e}", args.theta)))?;
        let node: TreeNode = serde_json::from_str(&raw)
            .map_err(|e| CoreError::InvalidInput(format!("bad tree file: {e}")))?;
        let mut leaves = Vec::new();
        let tree = tree_from_node(&node, parts, &mut leaves)?;
        let spec = gmean_spec(leaves.clone(), tree.clone(), alpha)?;
        let theta = tree.effective_weights();
        let pairs = leaves
            .into_iter()
            .zip(theta.weights().iter().copied())
            .collect();
        return Ok((spec, pairs));
    }
    let cuts = parse_bipartitions(&args.bipartitions, parts)?;
    let weights: Vec<f64> = if args.theta == "uniform" {
        vec![1.0 / cuts.len() as f64; cuts.len()]
    } else {
        args.theta
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<f64>()
                    .map_err(|_| CoreError::InvalidInput(format!("bad weight '{w}'")))
            })
            .collect::<Result<_, _>>()?
    };
    if weights.len() != cuts.len() {
        return Err(CoreError::InvalidInput(format!(
            "{} weights for {} bipartitions",
            weights.len(),
            cuts.len()
        )));
    }
    let tree = match args.tree_shape {
        TreeShape::Balanced => GMeanTree::balanced(&weights)?,
        TreeShape::LeftComb => GMeanTree::left_comb(&weights)?,
    };
    let pairs: Vec<(Bipartition, f64)> = cuts.iter().cloned().zip(weights.iter().copied()).collect();
    let spec = gmean_spec(cuts, tree, alpha)?;
    Ok((spec, pairs))
}

fn gmean_spec(
    leaves: Vec<Bipartition>,
    tree: GMeanTree,
    alpha: f64,
) -> Result<FamilySpec, CoreError> {
    if leaves.len() == 1 {
        return Ok(FamilySpec::bipartite(leaves.into_iter().next().unwrap()));
    }
    let children = leaves.into_iter().map(FamilySpec::bipartite).collect();
    FamilySpec::gmean(children, tree, alpha)
}

fn tree_from_node(
    node: &TreeNode,
    parts: usize,
    leaves: &mut Vec<Bipartition>,
) -> Result<GMeanTree, CoreError> {
    match node {
        TreeNode::Leaf { leaf } => {
            let cut = Bipartition::parse(leaf, parts)?;
            leaves.push(cut);
            Ok(GMeanTree::Leaf(leaves.len() - 1))
        }
        TreeNode::Node { t, left, right } => Ok(GMeanTree::Node {
            left: Box::new(tree_from_node(left, parts, leaves)?),
            right: Box::new(tree_from_node(right, parts, leaves)?),
            weight: *t,
        }),
    }
}

fn parse_alphas(text: &str) -> Result<(Vec<f64>, bool), CoreError> {
    if text.trim() == "limit1" {
        return Ok((Vec::new(), true));
    }
    let alphas: Vec<f64> = text
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| CoreError::InvalidInput(format!("bad alpha '{a}'")))
        })
        .collect::<Result<_, _>>()?;
    for &a in &alphas {
        if !(0.0 < a && a < 1.0) {
            return Err(CoreError::OutOfRange(format!("alpha must be in (0,1), got {a}")));
        }
    }
    Ok((alphas, false))
}

// ---- compute ------------------------------------------------------------

fn cmd_compute(args: &ComputeArgs) -> Result<u8, CoreError> {
    let psi = parse_state(&args.state, args.seed)?;
    let parts = psi.space().parts();
    let (alphas, limit_mode) = parse_alphas(&args.alpha)?;

    if limit_mode {
        let (spec, theta) = parse_family(args, parts, 0.5)?;
        let closed = limit_shannon_value(&psi.normalized()?, &theta)?;
        let sequence = limit_sequence(&psi, &spec, args.n_max)?;
        let body = serde_json::json!({
            "state_digest": state_digest(&psi),
            "mode": "limit1",
            "theta": theta.iter().map(|(b, w)| (b.display(), w)).collect::<Vec<_>>(),
            "sequence": sequence,
            "closed_shannon": closed,
        });
        emit(&args.out, &format!("{}\n", serde_json::to_string_pretty(&body).unwrap()))?;
        return Ok(0);
    }

    let mut reports = Vec::new();
    for &alpha in &alphas {
        let (spec, _) = parse_family(args, parts, alpha)?;
        reports.push(estimate_upper(&psi, &spec, alpha, args.n_max)?);
    }
    let text = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&reports).unwrap()),
        Format::Csv => reports_csv(&reports),
        Format::Pretty => reports_pretty(&reports),
    };
    emit(&args.out, &text)?;
    Ok(0)
}

fn reports_csv(reports: &[FunctionalReport]) -> String {
    let mut out = String::from("alpha,n,e_n,e_lo,e_hi,closed_lower,closed_upper,gap\n");
    for r in reports {
        for &(n, e) in &r.sequence {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                sig12(r.alpha),
                n,
                sig12(e),
                sig12(r.e_interval.0),
                sig12(r.e_interval.1),
                r.closed_lower.map(sig12).unwrap_or_default(),
                sig12(r.closed_upper),
                sig12(r.closed_upper - e),
            ));
        }
    }
    out
}

fn reports_pretty(reports: &[FunctionalReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "spec {} alpha={} state={}\n",
            r.spec, r.alpha, &r.state_digest[..12]
        ));
        for &(n, e) in &r.sequence {
            out.push_str(&format!("  n={n}: e_n = {e:.9}\n"));
        }
        out.push_str(&format!(
            "  E in [{:.9}, {:.9}]  F in [{:.9}, {:.9}]\n",
            r.e_interval.0, r.e_interval.1, r.f_interval.0, r.f_interval.1
        ));
        if let Some(lo) = r.closed_lower {
            out.push_str(&format!("  closed bounds: lower {lo:.9}, upper {:.9}\n", r.closed_upper));
        } else {
            out.push_str(&format!("  closed upper bound: {:.9}\n", r.closed_upper));
        }
        for v in &r.violations {
            out.push_str(&format!("  VIOLATION: {v}\n"));
        }
    }
    out
}

// ---- convergence --------------------------------------------------------

fn cmd_convergence(args: &ComputeArgs) -> Result<u8, CoreError> {
    let psi = parse_state(&args.state, args.seed)?;
    let parts = psi.space().parts();
    let (alphas, limit_mode) = parse_alphas(&args.alpha)?;
    if limit_mode {
        return Err(CoreError::InvalidInput(
            "convergence tables need explicit alpha values".into(),
        ));
    }
    let mut rows = Vec::new();
    for &alpha in &alphas {
        let (spec, _) = parse_family(args, parts, alpha)?;
        let report = estimate_upper(&psi, &spec, alpha, args.n_max)?;
        for &(n, e) in &report.sequence {
            rows.push((alpha, n, e, report.closed_lower, report.closed_upper));
        }
    }
    let text = match args.format {
        Format::Json => {
            let body: Vec<_> = rows
                .iter()
                .map(|&(alpha, n, e, lo, hi)| {
                    serde_json::json!({
                        "alpha": alpha,
                        "n": n,
                        "e_n": e,
                        "closed_lower": lo,
                        "closed_upper": hi,
                        "gap": hi - e,
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&body).unwrap())
        }
        Format::Csv | Format::Pretty => {
            let mut out = String::from("alpha,n,e_n,closed_lower,closed_upper,gap\n");
            for &(alpha, n, e, lo, hi) in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    sig12(alpha),
                    n,
                    sig12(e),
                    lo.map(sig12).unwrap_or_default(),
                    sig12(hi),
                    sig12(hi - e),
                ));
            }
            out
        }
    };
    emit(&args.out, &text)?;
    Ok(0)
}
