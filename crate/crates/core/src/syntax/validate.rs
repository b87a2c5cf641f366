//! Static validation: safety of rules and declarations, and absence of
//! positive cyclic dependencies among actions.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// The offending rule or declaration, printed.
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.rule, self.message)
    }
}

fn diag(rule: &impl fmt::Display, message: String) -> Diagnostic {
    Diagnostic {
        rule: rule.to_string(),
        message,
    }
}

fn vars_of<'a>(terms: impl IntoIterator<Item = &'a Term>, out: &mut BTreeSet<String>) {
    for t in terms {
        if let Some(v) = t.var_name() {
            out.insert(v.to_string());
        }
    }
}

/// Closes `bound` under the binding built-ins among `lits`: `#int(X)`,
/// `R = A op B` with both operands bound, and `X = Y` with one side bound.
pub(crate) fn close_bindings<'a>(
    lits: impl Iterator<Item = &'a Lit> + Clone,
    bound: &mut BTreeSet<String>,
) {
    let is_bound = |t: &Term, b: &BTreeSet<String>| match t.var_name() {
        Some(v) => b.contains(v),
        None => !matches!(t, Term::Anon),
    };
    loop {
        let before = bound.len();
        for l in lits.clone() {
            let Lit::Builtin(b) = l else { continue };
            match b {
                Builtin::Int(t) => vars_of([t], bound),
                Builtin::Arith {
                    result, lhs, rhs, ..
                } => {
                    if is_bound(lhs, bound) && is_bound(rhs, bound) {
                        vars_of([result], bound);
                    }
                }
                Builtin::Cmp(CmpOp::Eq, a, b) => {
                    if is_bound(a, bound) || is_bound(b, bound) {
                        vars_of([a, b], bound);
                    }
                }
                Builtin::Cmp(..) => {}
            }
        }
        if bound.len() == before {
            return;
        }
    }
}

fn has_anon_builtin(lits: &[&Lit]) -> bool {
    lits.iter()
        .any(|l| matches!(l, Lit::Builtin(b) if b.terms().iter().any(|t| **t == Term::Anon)))
}

struct RuleView<'a> {
    head: Option<ClassicalLit>,
    body: Vec<&'a BodyLit>,
}

impl Program {
    fn is_type_lit(&self, l: &Lit) -> bool {
        !self.is_dynamic_lit(l)
    }
}

fn check_rule(p: &Program, r: &RuleView<'_>, shown: &impl fmt::Display, out: &mut Vec<Diagnostic>) {
    // Variables of default-negated type literals must occur elsewhere.
    let mut elsewhere = BTreeSet::new();
    if let Some(h) = &r.head {
        vars_of(&h.atom.args, &mut elsewhere);
    }
    for b in &r.body {
        if !(b.naf && p.is_type_lit(&b.lit)) {
            vars_of(b.lit.terms(), &mut elsewhere);
        }
    }
    let mut unsafe_vars = BTreeSet::new();
    for b in &r.body {
        if b.naf && p.is_type_lit(&b.lit) {
            for v in b.vars() {
                if !elsewhere.contains(v) {
                    unsafe_vars.insert(v.to_string());
                }
            }
        }
    }
    for v in &unsafe_vars {
        out.push(diag(
            shown,
            format!("variable {v} occurs only in default-negated type literals"),
        ));
    }
    // Every variable must be bindable: fluent and action literals are typed
    // by their declarations, positive type atoms by the background.
    let mut bound = BTreeSet::new();
    if let Some(h) = &r.head {
        vars_of(&h.atom.args, &mut bound);
    }
    for b in &r.body {
        match &b.lit {
            Lit::Classical(c) if p.is_dynamic_lit(&b.lit) || !b.naf => {
                vars_of(&c.atom.args, &mut bound)
            }
            _ => {}
        }
    }
    close_bindings(r.body.iter().filter(|b| !b.naf).map(|b| &b.lit), &mut bound);
    let mut all = BTreeSet::new();
    for b in &r.body {
        vars_of(b.lit.terms(), &mut all);
    }
    for v in all.difference(&bound) {
        if !unsafe_vars.contains(v) {
            out.push(diag(shown, format!("variable {v} cannot be bound")));
        }
    }
    let lits: Vec<&Lit> = r.body.iter().map(|b| &b.lit).collect();
    if has_anon_builtin(&lits) {
        out.push(diag(shown, "`_` inside a built-in".into()));
    }
}

fn check_background(r: &DatalogRule, out: &mut Vec<Diagnostic>) {
    let mut bound = BTreeSet::new();
    for b in &r.body {
        if let (false, Lit::Classical(c)) = (b.naf, &b.lit) {
            vars_of(&c.atom.args, &mut bound);
        }
    }
    close_bindings(r.body.iter().filter(|b| !b.naf).map(|b| &b.lit), &mut bound);
    let mut need = BTreeSet::new();
    vars_of(&r.head.atom.args, &mut need);
    for b in &r.body {
        vars_of(b.lit.terms(), &mut need);
    }
    for v in need.difference(&bound) {
        out.push(diag(
            r,
            format!("variable {v} is not bound by a positive body atom"),
        ));
    }
    if r.head.atom.args.contains(&Term::Anon) {
        out.push(diag(r, "`_` in a rule head".into()));
    }
    let lits: Vec<&Lit> = r.body.iter().map(|b| &b.lit).collect();
    if has_anon_builtin(&lits) {
        out.push(diag(r, "`_` inside a built-in".into()));
    }
}

/// Checks typing parts: every parameter occurs in `requires`, and every
/// variable is bound by positive type atoms or built-ins.
fn check_typing(
    shown: &impl fmt::Display,
    params: &[String],
    requires: &[Lit],
    extra: &[Lit],
    out: &mut Vec<Diagnostic>,
) {
    let mut req_vars = BTreeSet::new();
    for l in requires {
        vars_of(l.terms(), &mut req_vars);
    }
    for x in params {
        if !req_vars.contains(x) {
            out.push(diag(
                shown,
                format!("parameter {x} does not occur in the requires part"),
            ));
        }
    }
    let lits: Vec<&Lit> = requires.iter().chain(extra).collect();
    let mut bound = BTreeSet::new();
    for l in &lits {
        if let Lit::Classical(c) = l {
            vars_of(&c.atom.args, &mut bound);
        }
    }
    bound.insert(TIME.to_string());
    close_bindings(lits.iter().copied(), &mut bound);
    let mut all = BTreeSet::new();
    for l in &lits {
        vars_of(l.terms(), &mut all);
    }
    for v in all.difference(&bound) {
        out.push(diag(shown, format!("variable {v} cannot be bound")));
    }
    if has_anon_builtin(&lits) {
        out.push(diag(shown, "`_` inside a built-in".into()));
    }
}

fn check_action_cycles(p: &Program, out: &mut Vec<Diagnostic>) {
    let mut g = DiGraph::<&str, ()>::new();
    let idx: HashMap<&str, _> = p
        .actions
        .iter()
        .map(|a| (a.name.as_str(), g.add_node(&a.name)))
        .collect();
    let mut witness = HashMap::new();
    for st in &p.always {
        let Statement::Executable(e) = st else {
            continue;
        };
        for b in &e.pre {
            if let (false, Lit::Classical(c)) = (b.naf, &b.lit) {
                if let (Some(&from), Some(&to)) = (
                    idx.get(e.action.pred.as_str()),
                    idx.get(c.atom.pred.as_str()),
                ) {
                    g.update_edge(from, to, ());
                    witness.entry(from).or_insert(st);
                }
            }
        }
    }
    for scc in tarjan_scc(&g) {
        let cyclic = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        if cyclic {
            let mut names: Vec<&str> = scc.iter().map(|n| g[*n]).collect();
            names.sort();
            let shown = scc
                .iter()
                .filter_map(|n| witness.get(n))
                .map(|s| s.to_string())
                .min()
                .unwrap_or_default();
            out.push(Diagnostic {
                rule: shown,
                message: format!(
                    "positive cyclic dependency among actions {}",
                    names.join(", ")
                ),
            });
        }
    }
}

/// Returns every safety and acyclicity violation; empty for a legal program.
/// Macros should be expanded first.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for r in &p.background {
        check_background(r, &mut out);
    }
    for d in &p.fluents {
        check_typing(d, &d.params, &d.requires, &[], &mut out);
    }
    for d in &p.actions {
        check_typing(d, &d.params, &d.requires, &d.cost_where, &mut out);
        if let Some(Term::Var(c)) = &d.cost {
            let typed = d
                .requires
                .iter()
                .chain(&d.cost_where)
                .any(|l| l.terms().iter().any(|t| t.var_name() == Some(c)));
            if !typed {
                out.push(diag(
                    d,
                    format!("cost variable {c} occurs in neither the requires nor the where part"),
                ));
            }
        }
        if let Some(Term::Anon) = &d.cost {
            out.push(diag(d, "`_` as cost".into()));
        }
    }
    for st in p.initially.iter().chain(&p.always) {
        let view = match st {
            Statement::Caused(r) => RuleView {
                head: r.head.clone(),
                body: r.post.iter().chain(&r.pre).collect(),
            },
            Statement::Executable(e) => RuleView {
                head: Some(ClassicalLit::pos(e.action.clone())),
                body: e.pre.iter().collect(),
            },
            // Macros are validated through their expansion.
            _ => match super::expand_macros(&Program {
                always: vec![st.clone()],
                ..Program::default()
            }) {
                Ok(q) => {
                    for s in &q.always {
                        if let Statement::Caused(r) = s {
                            let v = RuleView {
                                head: r.head.clone(),
                                body: r.post.iter().chain(&r.pre).collect(),
                            };
                            check_rule(p, &v, st, &mut out);
                        }
                    }
                    continue;
                }
                Err(e) => {
                    out.push(diag(st, e.to_string()));
                    continue;
                }
            },
        };
        check_rule(p, &view, st, &mut out);
    }
    check_action_cycles(p, &mut out);
    out
}
