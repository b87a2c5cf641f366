//! `kcplan`: plans, rewrites and translations for K^c planning problems.
//!
//! Exit status: 0 if a plan was found (or the text was written), 1 if there
//! is no plan, no admissible plan or no secure plan, 2 on usage, parse,
//! validation, grounding or well-definedness errors.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kcplan::background::evaluate_background;
use kcplan::grounder::{ground, GroundDomain, GroundOptions};
use kcplan::planner::{Enumerate, PlanDisplay, PlanOptions, PlanVerdict, Planner};
use kcplan::rewriter::{
    rewrite_beta, rewrite_delta, rewrite_gamma, Factor, RewriteOptions, RewriteResult,
};
use kcplan::syntax::{parse_program, ParseError, Program};
use kcplan::translator::{translate_lpw, translate_minimize};

#[derive(Parser, Debug)]
#[command(
    name = "kcplan",
    version,
    about = "Optimal and secure planning with action costs"
)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    plan: PlanArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a rewritten problem whose optimal plans are shortest plans.
    Rewrite(RewriteArgs),
    /// Emit a logic program whose optimal answer sets are optimal plans.
    Translate(TranslateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Optimistic,
    Secure,
}

#[derive(Args, Debug)]
struct Common {
    /// Background and plan files, read in order.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Upper bound for `#int` and background arithmetic.
    #[arg(short = 'N', long = "int-bound", default_value_t = 0)]
    int_bound: i64,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[command(flatten)]
    common: Option<Common>,
    /// Plan length, overriding the one in the query.
    #[arg(long)]
    planlength: Option<usize>,
    /// Print all plans with cost at most this bound instead of optimal ones.
    #[arg(long)]
    costbound: Option<i64>,
    #[arg(long, value_enum, default_value_t = Mode::Optimistic)]
    mode: Mode,
    /// Print every plan instead of the first.
    #[arg(long)]
    all: bool,
    /// Try plan lengths 0, 1, ... up to this one and stop at the first with a plan.
    #[arg(long, value_name = "L_MAX")]
    deepen: Option<usize>,
    /// Ask before checking security and before looking for further plans.
    #[arg(long)]
    confirm: bool,
}

#[derive(Args, Debug)]
#[group(id = "kind", required = true, multiple = false)]
struct Kind {
    /// Shortest plans, for problems without costs.
    #[arg(long)]
    beta: bool,
    /// Cheapest among the shortest plans.
    #[arg(long)]
    gamma: bool,
    /// Shortest among the cheapest plans.
    #[arg(long)]
    delta: bool,
}

#[derive(Args, Debug)]
struct RewriteArgs {
    #[command(flatten)]
    kind: Kind,
    #[command(flatten)]
    common: Common,
    /// Largest plan length considered.
    #[arg(long)]
    horizon: usize,
    /// Priority factor for --delta; defaults to the safe factor.
    #[arg(long)]
    factor: Option<i64>,
    /// Accept a --factor below the safe factor with a warning.
    #[arg(long, requires = "factor")]
    trust_factor: bool,
    /// Rename `gr` and `finish` if the problem already uses them.
    #[arg(long)]
    rename: bool,
    /// Solve the rewritten problem and decode its optimal plan.
    #[arg(long)]
    solve: bool,
    /// Write the text here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "variant", required = true, multiple = false)]
struct Variant {
    /// Costs as weak constraints.
    #[arg(long)]
    weak: bool,
    /// Costs as one minimize statement.
    #[arg(long)]
    minimize: bool,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    #[command(flatten)]
    variant: Variant,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    planlength: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Outcome of a run that did not fail.
enum Found {
    Yes,
    No,
}

fn load(c: &Common) -> Result<Program> {
    let mut texts = Vec::new();
    for f in &c.files {
        texts.push(
            std::fs::read_to_string(f).with_context(|| format!("cannot read {}", f.display()))?,
        );
    }
    parse_program(&texts).map_err(|e| match e {
        ParseError::Syntax {
            input,
            line,
            col,
            message,
        } => {
            anyhow!("{}:{line}:{col}: {message}", c.files[input].display())
        }
        e => e.into(),
    })
}

fn plan_length(p: &Program, over: Option<usize>) -> Result<usize> {
    over.or(p.query.as_ref().and_then(|q| q.plan_length))
        .ok_or_else(|| anyhow!("no plan length: give one in the query or with --planlength"))
}

fn domain(p: &Program, n: i64, l: usize) -> Result<GroundDomain> {
    let m = evaluate_background(&p.background, n)?;
    Ok(ground(p, &m, l, GroundOptions::default())?)
}

fn ask(question: &str) -> Result<bool> {
    std::io::stdout().flush()?;
    eprint!("{question} (y/n) ");
    std::io::stderr().flush()?;
    let mut line = String::new();
    std::io::stdin().lock().read_line(&mut line)?;
    Ok(line.trim().eq_ignore_ascii_case("y"))
}

fn print_plans(gd: &GroundDomain, plans: &[PlanVerdict]) {
    for v in plans {
        println!("{}", PlanDisplay { gd, plan: &v.plan });
    }
}

/// Plans of one length; `None` if there is none under the options.
fn plans_at(gd: &GroundDomain, l: usize, a: &PlanArgs) -> Result<Option<Vec<PlanVerdict>>> {
    let mut pl = Planner::new(gd, l, PlanOptions::default())?;
    let enumerate = if a.all {
        Enumerate::All
    } else {
        Enumerate::First
    };
    let plans = match (a.mode, a.costbound) {
        (Mode::Optimistic, Some(c)) => pl.plans(Some(c), enumerate),
        (Mode::Optimistic, None) => match pl.optimal_cost() {
            Some(c) => pl.plans(Some(c), enumerate),
            None => Vec::new(),
        },
        (Mode::Secure, Some(c)) => pl.secure_plans(Some(c), enumerate)?,
        (Mode::Secure, None) => match pl.optimal_secure_cost()? {
            Some(c) => pl.secure_plans(Some(c), enumerate)?,
            None => Vec::new(),
        },
    };
    if plans.is_empty() {
        return Ok(None);
    }
    if !a.confirm || a.all {
        return Ok(Some(plans));
    }
    // Interactive: show the first plan, then the rest on request.
    let first = plans[0].clone();
    print_plans(gd, std::slice::from_ref(&first));
    if a.mode == Mode::Optimistic && ask("Check the plan for security?")? {
        let secure = pl.is_secure(&first.plan.steps)?;
        eprintln!("The plan is {}secure.", if secure { "" } else { "not " });
    }
    let mut rest = Vec::new();
    if ask("Look for further plans?")? {
        let bound = a.costbound.or(Some(first.plan.cost));
        rest = match a.mode {
            Mode::Optimistic => pl.plans(bound, Enumerate::All),
            Mode::Secure => pl.secure_plans(bound, Enumerate::All)?,
        };
        rest.retain(|v| v.plan != first.plan);
    }
    Ok(Some(rest))
}

fn run_plan(a: &PlanArgs) -> Result<Found> {
    let Some(common) = &a.common else {
        bail!("no input files");
    };
    let p = load(common)?;
    let lengths: Vec<usize> = match a.deepen {
        Some(max) => (0..=max).collect(),
        None => vec![plan_length(&p, a.planlength)?],
    };
    for &l in &lengths {
        let gd = domain(&p, common.int_bound, l)?;
        if let Some(plans) = plans_at(&gd, l, a)? {
            if a.deepen.is_some() {
                eprintln!("plan length {l}");
            }
            print_plans(&gd, &plans);
            return Ok(Found::Yes);
        }
    }
    let what = match (a.mode, a.costbound) {
        (Mode::Secure, _) => "no secure plan",
        (_, Some(_)) => "no admissible plan",
        _ => "no plan",
    };
    match a.deepen {
        Some(max) => eprintln!("{what} up to length {max}"),
        None => eprintln!("{what}"),
    }
    Ok(Found::No)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_rewrite(a: &RewriteArgs) -> Result<Found> {
    let p = load(&a.common)?;
    let opts = RewriteOptions {
        int_bound: a.common.int_bound,
        rename_on_clash: a.rename,
    };
    let r: RewriteResult = if a.kind.beta {
        rewrite_beta(&p, a.horizon, &opts)?
    } else if a.kind.gamma {
        rewrite_gamma(&p, a.horizon, &opts)?
    } else {
        let factor = match (a.factor, a.trust_factor) {
            (None, _) => Factor::Safe,
            (Some(f), false) => Factor::Checked(f),
            (Some(f), true) => Factor::Trusted(f),
        };
        rewrite_delta(&p, a.horizon, factor, &opts)?
    };
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    if r.required_int_bound > a.common.int_bound {
        eprintln!(
            "note: run the result with -N {} or more",
            r.required_int_bound
        );
    }
    let text = r.program.to_string();
    if !a.solve {
        emit(&text, &a.output)?;
        return Ok(Found::Yes);
    }
    if a.output.is_some() {
        emit(&text, &a.output)?;
    }
    let n = a.common.int_bound.max(r.required_int_bound);
    let gd = domain(&r.program, n, r.horizon)?;
    let mut pl = Planner::new(&gd, r.horizon, PlanOptions::default())?;
    let Some(c) = pl.optimal_cost() else {
        eprintln!("no plan within {} steps", a.horizon);
        return Ok(Found::No);
    };
    let plans = pl.plans(Some(c), Enumerate::First);
    print_plans(&gd, &plans);
    if let Some(d) = r.decode_plan(&gd, &plans[0].plan) {
        println!("DECODED: {} steps, original cost {}", d.steps, d.cost);
    }
    Ok(Found::Yes)
}

fn run_translate(a: &TranslateArgs) -> Result<Found> {
    let p = load(&a.common)?;
    let l = plan_length(&p, a.planlength)?;
    let lp = if a.variant.weak {
        translate_lpw(&p, l)?
    } else {
        translate_minimize(&p, l)?
    };
    emit(&lp.to_string(), &a.output)?;
    Ok(Found::Yes)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Some(Command::Rewrite(a)) => run_rewrite(a),
        Some(Command::Translate(a)) => run_translate(a),
        None => run_plan(&cli.plan),
    };
    match result {
        Ok(Found::Yes) => ExitCode::SUCCESS,
        Ok(Found::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
