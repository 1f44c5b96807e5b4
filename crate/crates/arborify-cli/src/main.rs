//! Batch entry point: parse, arborify, shuffle, evaluate and verify.
//!
//! Exit codes: 0 all requested checks pass, 1 check failure, 2 usage error,
//! 3 numeric warning escalated by `--strict`.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use arborify::arborify::{arborify_forest, arborify_cp};
use arborify::checks::{run_all, run_check, CheckOpts, CheckReport, CHECK_NAMES};
use arborify::dsl;
use arborify::eval::{eval_tree, eval_wordpoly, EtaMode, EvalParams, Weight};
use arborify::pairing::Model;
use arborify::word::{shuffle_poly, WordPoly};

#[derive(Parser)]
#[command(name = "arborify", version, about = "decorated-tree / word-algebra verification engine")]
struct Cli {
    /// machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,
    /// escalate numeric warnings to exit code 3
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum ModelArg {
    Nls,
    Wave,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Nls => Model::Nls,
            ModelArg::Wave => Model::Wave,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Via {
    Recursive,
    Coproduct,
    Both,
}

#[derive(Args)]
struct InputArgs {
    /// input file (DSL); defaults to stdin
    file: Option<PathBuf>,
    /// inline expression
    #[arg(short = 'e', long = "expr", allow_hyphen_values = true)]
    expr: Option<String>,
    /// input is a word polynomial rather than a tree polynomial
    #[arg(long)]
    words: bool,
    /// admit merged boundary letters of arity 6 and 8
    #[arg(long)]
    allow_wide_letters: bool,
}

impl InputArgs {
    fn text(&self) -> Result<String> {
        if let Some(e) = &self.expr {
            return Ok(e.clone());
        }
        match &self.file {
            Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {p:?}")),
            None => {
                let mut buf = String::new();
                std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
                Ok(buf)
            }
        }
    }
}

#[derive(Args, Clone)]
struct EvalArgs {
    /// final time
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// ambient dimension
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// NLS lattice scale
    #[arg(long = "L", default_value_t = 1.0)]
    l: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// wave cutoff
    #[arg(long = "N", default_value_t = 3)]
    n: u32,
    /// Gauss–Legendre points per nesting level
    #[arg(long, default_value_t = 64)]
    quad: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// weight function for NLS
    #[arg(long, value_enum, default_value_t = WeightArg::Gaussian)]
    weight: WeightArg,
    /// use k² = |2πk/L|² in the Schrödinger phases
    #[arg(long = "phase-2pi")]
    phase_two_pi: bool,
    /// treat unpaired leaves deterministically with η ≡ 1
    #[arg(long)]
    eta_one: bool,
    /// re-run the quadrature at half order and report the disagreement
    #[arg(long)]
    check: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum WeightArg {
    Gaussian,
    Rational,
}

impl EvalArgs {
    fn params(&self) -> EvalParams {
        EvalParams {
            t: self.t,
            dim: self.dim,
            lattice_l: self.l,
            mu: self.mu,
            cutoff_n: self.n,
            quad_order: self.quad,
            seed: self.seed,
            weight: match self.weight {
                WeightArg::Gaussian => Weight::Gaussian,
                WeightArg::Rational => Weight::Rational,
            },
            phase_two_pi: self.phase_two_pi,
            quad_check: self.check,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a tree or word file and print its canonical form
    Parse {
        #[command(flatten)]
        input: InputArgs,
        /// model for word inputs
        #[arg(long, value_enum, default_value_t = ModelArg::Nls)]
        model: ModelArg,
    },
    /// Arborify a tree polynomial into words
    Arborify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = Via::Recursive)]
        via: Via,
    },
    /// Shuffle two word expressions
    Shuffle {
        /// first word expression
        #[arg(short = 'e', long = "expr", num_args = 1, allow_hyphen_values = true)]
        exprs: Vec<String>,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        allow_wide_letters: bool,
    },
    /// Evaluate a tree (with its pairing) or a word polynomial
    Eval {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Run named verification suites
    Verify {
        /// one of: all, theorem-nls, theorem-wave, coherence, shuffle, wick,
        /// covariance, family1, family2, family3, ibp, frak-c, dsl-io
        check: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        quad: usize,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        t: Option<f64>,
        /// directory with the golden DSL corpus (dsl-io)
        #[arg(long)]
        golden_dir: Option<PathBuf>,
    },
    /// Render a tree or word as DOT
    Render {
        #[command(flatten)]
        input: InputArgs,
        /// model for word inputs
        #[arg(long, value_enum, default_value_t = ModelArg::Nls)]
        model: ModelArg,
        /// emit DOT (the only supported renderer)
        #[arg(long)]
        dot: bool,
        /// output file; defaults to stdout
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    command: Vec<String>,
    seed: Option<u64>,
    checks: Vec<CheckLine>,
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    detail: String,
}

const REPORT_SCHEMA: &str = "arborify-report/v1";

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("ARBORIFY_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            // deterministic results do not depend on the pool size; this only
            // caps parallelism
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Parse { input, model } => cmd_parse(cli, input, (*model).into()),
        Command::Arborify { input, model, via } => cmd_arborify(cli, input, (*model).into(), *via),
        Command::Shuffle {
            exprs,
            model,
            allow_wide_letters,
        } => cmd_shuffle(cli, exprs, (*model).into(), *allow_wide_letters),
        Command::Eval { input, model, eval } => cmd_eval(cli, input, (*model).into(), eval),
        Command::Verify {
            check,
            trials,
            tol,
            seed,
            quad,
            n,
            t,
            golden_dir,
        } => cmd_verify(cli, check, *trials, *tol, *seed, *quad, *n, *t, golden_dir.clone()),
        Command::Render {
            input,
            model,
            dot,
            out,
        } => cmd_render(input, (*model).into(), *dot, out.clone()),
    }
}

fn parse_tree_input(input: &InputArgs) -> Result<dsl::ParsedTree> {
    let text = input.text()?;
    dsl::parse_tree(&text).map_err(|e| anyhow!("{e}"))
}

fn parse_word_input(input: &InputArgs, model: Model) -> Result<WordPoly> {
    let text = input.text()?;
    Ok(dsl::parse_word(&text, model, input.allow_wide_letters)
        .map_err(|e| anyhow!("{e}"))?
        .poly)
}

fn cmd_parse(cli: &Cli, input: &InputArgs, model: Model) -> Result<ExitCode> {
    if input.words {
        let poly = parse_word_input(input, model)?;
        if cli.json {
            println!("{}", arborify::json::wordpoly_to_json(&poly, model));
        } else {
            println!("{}", dsl::print_word_poly(&poly));
        }
    } else {
        let parsed = parse_tree_input(input)?;
        if cli.json {
            println!("{}", arborify::json::treepoly_to_json(&parsed.poly));
        } else {
            println!("{}", dsl::print_tree_poly(&parsed.poly, Some(&parsed.pairing)));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn arborify_parsed(parsed: &dsl::ParsedTree, model: Model, coproduct: bool) -> Result<WordPoly> {
    let mut out = WordPoly::zero();
    let single = parsed.poly.len() == 1;
    for (forest, coeff) in parsed.poly.terms() {
        let pairing = if single {
            parsed.pairing.clone()
        } else {
            if !parsed.pairing.is_empty() {
                bail!("pairings require a single-term expression");
            }
            Default::default()
        };
        let words = if coproduct {
            if forest.trees().len() != 1 {
                bail!("the coproduct route expects a single tree per term");
            }
            arborify_cp(&forest.trees()[0], &pairing, model).map_err(|e| anyhow!("{e}"))?
        } else {
            arborify_forest(forest.trees(), &pairing, model).map_err(|e| anyhow!("{e}"))?
        };
        out = out.add(&words.scale(coeff)).map_err(|e| anyhow!("{e}"))?;
    }
    Ok(out)
}

fn cmd_arborify(cli: &Cli, input: &InputArgs, model: Model, via: Via) -> Result<ExitCode> {
    let parsed = parse_tree_input(input)?;
    let emit = |poly: &WordPoly| {
        if cli.json {
            println!("{}", arborify::json::wordpoly_to_json(poly, model));
        } else {
            println!("{}", dsl::print_word_poly(poly));
        }
    };
    match via {
        Via::Recursive => emit(&arborify_parsed(&parsed, model, false)?),
        Via::Coproduct => emit(&arborify_parsed(&parsed, model, true)?),
        Via::Both => {
            let a = arborify_parsed(&parsed, model, false)?;
            let b = arborify_parsed(&parsed, model, true)?;
            emit(&a);
            emit(&b);
            if a != b {
                eprintln!("recursive and coproduct routes disagree");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_shuffle(cli: &Cli, exprs: &[String], model: Model, wide: bool) -> Result<ExitCode> {
    if exprs.len() != 2 {
        bail!("shuffle needs exactly two -e expressions");
    }
    let parse = |t: &str| -> Result<WordPoly> {
        Ok(dsl::parse_word(t, model, wide).map_err(|e| anyhow!("{e}"))?.poly)
    };
    let a = parse(&exprs[0])?;
    let b = parse(&exprs[1])?;
    let out = shuffle_poly(&a, &b).map_err(|e| anyhow!("{e}"))?;
    if cli.json {
        println!("{}", arborify::json::wordpoly_to_json(&out, model));
    } else {
        println!("{}", dsl::print_word_poly(&out));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EvalReport {
    schema: &'static str,
    command: Vec<String>,
    value_re: f64,
    value_im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    quad_disagreement: Option<f64>,
    mu_shape_warning: bool,
}

fn cmd_eval(cli: &Cli, input: &InputArgs, model: Model, eval: &EvalArgs) -> Result<ExitCode> {
    let mut params = eval.params();
    if cli.strict {
        params.quad_check = true;
    }
    let mode = if eval.eta_one {
        EtaMode::EtaOne
    } else {
        EtaMode::Paired
    };
    let out = if input.words {
        let poly = parse_word_input(input, model)?;
        eval_wordpoly(&poly, &params, mode).map_err(|e| anyhow!("{e}"))?
    } else {
        let parsed = parse_tree_input(input)?;
        if parsed.poly.len() != 1 {
            bail!("eval expects a single-term tree expression");
        }
        let (forest, coeff) = parsed.poly.terms().next().expect("one term");
        let tree = forest
            .trees()
            .iter()
            .fold(arborify::DecoratedTree::unit(), |acc, t| acc.product(t));
        let mut out = eval_tree(&tree, &parsed.pairing, &params, model, mode)
            .map_err(|e| anyhow!("{e}"))?;
        out.value *= coeff.to_complex(params.mu);
        out
    };
    if cli.json {
        let report = EvalReport {
            schema: REPORT_SCHEMA,
            command: std::env::args().collect(),
            value_re: out.value.re,
            value_im: out.value.im,
            quad_disagreement: out.quad_disagreement,
            mu_shape_warning: out.mu_shape_warning,
        };
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("value = {} + {}i", out.value.re, out.value.im);
        if let Some(d) = out.quad_disagreement {
            println!("quadrature self-check disagreement = {d:.3e}");
        }
        if out.mu_shape_warning {
            println!("warning: word is not shaped like an arborification image; μ^(2n-2) applied literally");
        }
    }
    let warned = out.mu_shape_warning
        || out.quad_disagreement.is_some_and(|d| d > 1e-9);
    if cli.strict && warned {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    cli: &Cli,
    check: &str,
    trials: Option<usize>,
    tol: Option<f64>,
    seed: u64,
    quad: usize,
    n: Option<u32>,
    t: Option<f64>,
    golden_dir: Option<PathBuf>,
) -> Result<ExitCode> {
    let opts = CheckOpts {
        seed,
        trials,
        tol,
        quad_order: quad,
        cutoff_n: n,
        t,
        golden_dir,
    };
    let reports: Vec<CheckReport> = if check == "all" {
        run_all(&opts)
    } else if CHECK_NAMES.contains(&check) {
        vec![run_check(check, &opts)]
    } else {
        bail!(
            "unknown check {check:?}; expected one of all, {}",
            CHECK_NAMES.join(", ")
        );
    };
    let all_passed = reports.iter().all(|r| r.passed);
    if cli.json {
        let report = Report {
            schema: REPORT_SCHEMA,
            command: std::env::args().collect(),
            seed: Some(seed),
            checks: reports
                .iter()
                .map(|r| CheckLine {
                    name: r.name.clone(),
                    status: if r.passed { "pass" } else { "fail" }.into(),
                    residual: r.residual,
                    detail: r.detail.clone(),
                })
                .collect(),
        };
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for r in &reports {
            println!(
                "[{}] {:<12} {} ({:.2}s)",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail,
                r.seconds
            );
        }
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_render(input: &InputArgs, model: Model, dot: bool, out: Option<PathBuf>) -> Result<ExitCode> {
    if !dot {
        bail!("only --dot rendering is supported");
    }
    let rendered = if input.words {
        let poly = parse_word_input(input, model)?;
        let mut buf = String::new();
        for (w, _) in poly.terms() {
            buf.push_str(&arborify::dot::word_to_dot(w));
        }
        buf
    } else {
        let parsed = parse_tree_input(input)?;
        let mut buf = String::new();
        for (forest, _) in parsed.poly.terms() {
            let tree = forest
                .trees()
                .iter()
                .fold(arborify::DecoratedTree::unit(), |acc, t| acc.product(t));
            buf.push_str(&arborify::dot::tree_to_dot(&tree, &parsed.pairing));
        }
        buf
    };
    match out {
        Some(p) => std::fs::write(&p, rendered).with_context(|| format!("writing {p:?}"))?,
        None => print!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}
