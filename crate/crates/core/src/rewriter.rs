//! Program transformations that trade plan length against plan cost.
//!
//! All three add a fluent `gr` ("goal reached") and an action `finish` that
//! costs `time`, so optimal plans of the result end with `{finish}` at the
//! earliest affordable step followed by empty steps:
//! - shortest plans: `finish` is the only cost,
//! - shortest among the cheapest: every other cost is multiplied by `i + 1`,
//! - cheapest among the shortest: the cost of `finish` is multiplied by a
//!   factor above the total of all other costs.

use std::collections::HashSet;

use thiserror::Error;

use crate::background::{evaluate_background, BackgroundError};
use crate::grounder::{ground, GroundDomain, GroundError, GroundOptions};
use crate::planner::Plan;
use crate::syntax::{
    ActionDecl, ArithOp, Atom, BodyLit, Builtin, CausationRule, ClassicalLit, ExecCondition,
    FluentDecl, Lit, Program, Query, Statement, Term,
};

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("the program already declares `{0}`")]
    Clash(String),
    #[error("shortest-plan rewriting expects no action costs, but `{0}` has a costs part")]
    HasCosts(String),
    #[error("the program has no goal")]
    NoQuery,
    #[error("priority factor {given} is not above the sum of all action costs; the safe factor is {safe}")]
    FactorTooLow { given: i64, safe: i64 },
    #[error(transparent)]
    Background(#[from] BackgroundError),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

/// How the priority factor of the cheapest-among-shortest rewriting is
/// chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// One more than the sum of all action costs at all steps.
    Safe,
    /// A user value, rejected if it is below the safe factor.
    Checked(i64),
    /// A user value known to be sufficient for the domain, for instance
    /// because only some actions can occur together. Accepted with a
    /// warning if it is below the safe factor.
    Trusted(i64),
}

#[derive(Clone, Debug, Default)]
pub struct RewriteOptions {
    /// The integer bound the result is meant to run with.
    pub int_bound: i64,
    /// Rename `gr` and `finish` on a clash instead of failing.
    pub rename_on_clash: bool,
}

/// How to read an optimal cost of the rewritten problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decode {
    Shortest,
    /// Every original cost was multiplied by `factor`.
    ShortestCheapest {
        factor: i64,
    },
    /// The cost of `finish` at time `t` is `t * factor`.
    CheapestShortest {
        factor: i64,
    },
}

/// The length and the original cost of a plan of the rewritten problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub steps: usize,
    pub cost: i64,
}

impl Decode {
    /// `cost` is the optimal cost and `finish_time` the step at which
    /// `finish` occurs.
    pub fn decode(&self, cost: i64, finish_time: usize) -> Decoded {
        let t = finish_time as i64;
        let cost = match *self {
            Decode::Shortest => 0,
            Decode::ShortestCheapest { factor } => (cost - t) / factor,
            Decode::CheapestShortest { factor } => cost - t * factor,
        };
        Decoded {
            steps: finish_time - 1,
            cost,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RewriteResult {
    pub program: Program,
    /// The plan length of the new query, `i + 1`.
    pub horizon: usize,
    pub decode: Decode,
    pub gr: String,
    pub finish: String,
    /// The least integer bound under which every product introduced by the
    /// rewriting, and the given bound, fit.
    pub required_int_bound: i64,
    pub warnings: Vec<String>,
}

impl RewriteResult {
    /// The step (from 1) at which `finish` occurs in a plan of the result.
    pub fn finish_time(&self, gd: &GroundDomain, plan: &Plan) -> Option<usize> {
        let finish = gd.action_id(&gd.atom(&self.finish)?)?;
        plan.steps
            .iter()
            .position(|a| a.contains(finish))
            .map(|j| j + 1)
    }

    /// Decodes an optimal plan of the result.
    pub fn decode_plan(&self, gd: &GroundDomain, plan: &Plan) -> Option<Decoded> {
        self.finish_time(gd, plan)
            .map(|t| self.decode.decode(plan.cost, t))
    }
}

/// Shortest plans reaching the goal within `i` steps.
pub fn rewrite_beta(
    p: &Program,
    i: usize,
    opts: &RewriteOptions,
) -> Result<RewriteResult, RewriteError> {
    if let Some(d) = p.actions.iter().find(|d| d.cost.is_some()) {
        return Err(RewriteError::HasCosts(d.name.clone()));
    }
    beta(p, i, opts)
}

/// Shortest plans among the cheapest ones within `i` steps.
pub fn rewrite_gamma(
    p: &Program,
    i: usize,
    opts: &RewriteOptions,
) -> Result<RewriteResult, RewriteError> {
    let factor = i as i64 + 1;
    let max_cost = cost_summary(p, i, opts)?.max;
    let mut r = beta(p, i, opts)?;
    let n = p.actions.len();
    for d in &mut r.program.actions[..n] {
        if let Some(c) = d.cost.take() {
            let v = fresh_var(d);
            d.cost = Some(Term::Var(v.clone()));
            d.cost_where.insert(
                0,
                Lit::Builtin(Builtin::Arith {
                    result: Term::Var(v),
                    op: ArithOp::Mul,
                    lhs: Term::Int(factor),
                    rhs: c,
                }),
            );
        }
    }
    r.decode = Decode::ShortestCheapest { factor };
    r.required_int_bound = opts.int_bound.max(factor * max_cost);
    Ok(r)
}

/// Cheapest plans among the shortest ones within `i` steps.
pub fn rewrite_delta(
    p: &Program,
    i: usize,
    factor: Factor,
    opts: &RewriteOptions,
) -> Result<RewriteResult, RewriteError> {
    let summary = cost_summary(p, i, opts)?;
    let safe = summary.total + 1;
    let mut warnings = Vec::new();
    let f = match factor {
        Factor::Safe => safe,
        Factor::Checked(f) if f < safe => {
            return Err(RewriteError::FactorTooLow { given: f, safe })
        }
        Factor::Checked(f) => f,
        Factor::Trusted(f) => {
            if f < safe {
                warnings.push(format!(
                    "priority factor {f} is below the safe factor {safe}; plans are cheapest among the shortest only if no plan can spend {f} or more"
                ));
            }
            f
        }
    };
    let mut r = beta(p, i, opts)?;
    let v = "C".to_string();
    let fin = r.program.actions.last_mut().unwrap();
    fin.cost = Some(Term::Var(v.clone()));
    fin.cost_where = vec![Lit::Builtin(Builtin::Arith {
        result: Term::Var(v),
        op: ArithOp::Mul,
        lhs: Term::Time,
        rhs: Term::Int(f),
    })];
    r.decode = Decode::CheapestShortest { factor: f };
    r.required_int_bound = opts.int_bound.max((i as i64 + 1) * f).max(summary.max);
    r.warnings = warnings;
    Ok(r)
}

struct CostSummary {
    max: i64,
    total: i64,
}

/// The largest cost and the sum of all costs of legal action instances at
/// steps `1..=i+1` of the original program.
fn cost_summary(p: &Program, i: usize, opts: &RewriteOptions) -> Result<CostSummary, RewriteError> {
    let m = evaluate_background(&p.background, opts.int_bound)?;
    let gd = ground(p, &m, i + 1, GroundOptions::default())?;
    let mut s = CostSummary { max: 0, total: 0 };
    for a in 0..gd.num_actions() as u32 {
        for t in 1..=i + 1 {
            let c = gd.action_cost(a, t).unwrap_or(0);
            s.max = s.max.max(c);
            s.total += c;
        }
    }
    Ok(s)
}

fn fresh_var(d: &ActionDecl) -> String {
    let mut used: HashSet<String> = d.params.iter().cloned().collect();
    let terms = d
        .requires
        .iter()
        .chain(&d.cost_where)
        .flat_map(|l| l.terms())
        .chain(d.cost.as_ref());
    for t in terms {
        if let Term::Var(v) = t {
            used.insert(v.clone());
        }
    }
    std::iter::once("C".to_string())
        .chain((1..).map(|k| format!("C{k}")))
        .find(|v| !used.contains(v))
        .unwrap()
}

/// Picks a name for `base` that no fluent, action or background predicate
/// uses.
fn fresh_name(p: &Program, base: &str, rename: bool) -> Result<String, RewriteError> {
    let taken = |n: &str| {
        p.fluents.iter().any(|d| d.name == n)
            || p.actions.iter().any(|d| d.name == n)
            || p.background.iter().any(|r| r.head.atom.pred == n)
    };
    if !taken(base) {
        return Ok(base.to_string());
    }
    if !rename {
        return Err(RewriteError::Clash(base.to_string()));
    }
    Ok((0..)
        .map(|k| format!("kc{k}_{base}"))
        .find(|n| !taken(n))
        .unwrap())
}

fn not_gr(gr: &str) -> BodyLit {
    BodyLit::not(Lit::Classical(ClassicalLit::pos(Atom::new(gr, Vec::new()))))
}

fn beta(p: &Program, i: usize, opts: &RewriteOptions) -> Result<RewriteResult, RewriteError> {
    let q = p.query.as_ref().ok_or(RewriteError::NoQuery)?;
    let gr = fresh_name(p, "gr", opts.rename_on_clash)?;
    let finish = fresh_name(p, "finish", opts.rename_on_clash)?;
    let gr_atom = Atom::new(gr.clone(), Vec::new());
    let finish_atom = Atom::new(finish.clone(), Vec::new());
    let finish_lit = |a: Atom| BodyLit::pos(Lit::Classical(ClassicalLit::pos(a)));

    let mut out = p.clone();
    out.fluents.push(FluentDecl {
        name: gr.clone(),
        params: Vec::new(),
        requires: Vec::new(),
    });
    out.actions.push(ActionDecl {
        name: finish.clone(),
        params: Vec::new(),
        requires: Vec::new(),
        cost: Some(Term::Time),
        cost_where: Vec::new(),
    });
    for s in &mut out.always {
        match s {
            Statement::Caused(CausationRule { post, .. })
            | Statement::Inertial { post, .. }
            | Statement::Default { post, .. }
            | Statement::Total { post, .. }
            | Statement::Forbidden { post, .. } => post.push(not_gr(&gr)),
            Statement::Executable(e) => e.pre.push(not_gr(&gr)),
            Statement::Nonexecutable { .. } => {}
        }
    }
    let mut goal: Vec<BodyLit> = q
        .goal_pos
        .iter()
        .map(|l| BodyLit::pos(Lit::Classical(l.clone())))
        .collect();
    goal.extend(
        q.goal_neg
            .iter()
            .map(|l| BodyLit::not(Lit::Classical(l.clone()))),
    );
    goal.push(not_gr(&gr));
    out.always.push(Statement::Executable(ExecCondition {
        action: finish_atom.clone(),
        pre: goal,
    }));
    out.always.push(Statement::Caused(CausationRule {
        head: Some(ClassicalLit::pos(gr_atom.clone())),
        post: Vec::new(),
        pre: vec![finish_lit(finish_atom.clone())],
    }));
    out.always.push(Statement::Caused(CausationRule {
        head: Some(ClassicalLit::pos(gr_atom.clone())),
        post: Vec::new(),
        pre: vec![finish_lit(gr_atom.clone())],
    }));
    for d in &p.actions {
        out.always.push(Statement::Nonexecutable {
            action: d.atom(),
            pre: vec![finish_lit(finish_atom.clone())],
        });
    }
    out.query = Some(Query {
        goal_pos: vec![ClassicalLit::pos(gr_atom)],
        goal_neg: Vec::new(),
        plan_length: Some(i + 1),
    });
    Ok(RewriteResult {
        program: out,
        horizon: i + 1,
        decode: Decode::Shortest,
        gr,
        finish,
        required_int_bound: opts.int_bound,
        warnings: Vec::new(),
    })
}
