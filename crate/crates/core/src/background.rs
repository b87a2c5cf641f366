//! Evaluation of the background knowledge to its unique model.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::engine::{
    compile_args, compile_builtin, instantiate, join, ArithMode, CLit, CTerm, Database, Db, Pred,
    SymbolOrder, Tuple, Value, VarMap,
};
use crate::syntax::{parse_program, ClassicalLit, DatalogRule, Lit, Program};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub negative: bool,
    pub pred: String,
    pub args: Vec<Value>,
}

impl GroundAtom {
    pub fn new(pred: &str, args: Vec<Value>) -> GroundAtom {
        GroundAtom {
            negative: false,
            pred: pred.to_string(),
            args,
        }
    }

    /// Converts a ground classical literal; `None` if it has variables.
    pub fn from_lit(l: &ClassicalLit, order: &SymbolOrder) -> Option<GroundAtom> {
        Some(GroundAtom {
            negative: l.negative,
            pred: l.atom.pred.clone(),
            args: l
                .atom
                .args
                .iter()
                .map(|t| order.value(t))
                .collect::<Option<_>>()?,
        })
    }
}

/// Parses a ground literal such as `-across(joe)`; `None` if the text is
/// not a ground classical literal.
pub fn parse_ground_atom(text: &str, order: &SymbolOrder) -> Option<GroundAtom> {
    let p = parse_program(&[format!("{}.", text.trim())]).ok()?;
    match p.background.as_slice() {
        [r] if r.body.is_empty() => GroundAtom::from_lit(&r.head, order),
        _ => None,
    }
}

/// Ranks the constants of background rules by first occurrence.
pub fn background_order(rules: &[DatalogRule]) -> SymbolOrder {
    let p = Program {
        background: rules.to_vec(),
        ..Program::default()
    };
    SymbolOrder::new(p.constants())
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackgroundError {
    #[error("the background has no total well-founded model; undefined: {}", .0.join(", "))]
    NotTotal(Vec<String>),
    #[error("the background derives both `{0}` and its strong negation")]
    Inconsistent(String),
    #[error("unsafe background rule `{rule}`: variable {var} is not bound")]
    Unsafe { rule: String, var: String },
    #[error("`{0}` is not ground")]
    NonGround(String),
}

/// The model M of the background, with the `#int` bound N.
#[derive(Clone, Debug)]
pub struct BackgroundModel {
    db: Database,
    int_bound: i64,
    order: Arc<SymbolOrder>,
}

struct CompiledRule {
    source: String,
    head: usize,
    head_args: Vec<CTerm>,
    body: Vec<CLit>,
    nvars: usize,
    vars: VarMap,
}

fn compile(
    rules: &[DatalogRule],
    db: &mut Database,
    order: &Arc<SymbolOrder>,
) -> Vec<CompiledRule> {
    rules
        .iter()
        .map(|r| {
            let mut vars = VarMap::new(order);
            let head = db.id(&Pred::new(&r.head.atom.pred, r.head.negative));
            let head_args = compile_args(&r.head.atom.args, &mut vars);
            let body = r
                .body
                .iter()
                .map(|b| match &b.lit {
                    Lit::Classical(c) => {
                        let pred = db.id(&Pred::new(&c.atom.pred, c.negative));
                        let args = compile_args(&c.atom.args, &mut vars);
                        if b.naf {
                            CLit::Absent { pred, args }
                        } else {
                            CLit::Scan { pred, args }
                        }
                    }
                    Lit::Builtin(bi) => compile_builtin(bi, b.naf, &mut vars),
                })
                .collect();
            CompiledRule {
                source: r.to_string(),
                head,
                head_args,
                body,
                nvars: vars.len(),
                vars,
            }
        })
        .collect()
}

fn mode(int_bound: i64) -> ArithMode {
    ArithMode {
        int_bound,
        bounded: true,
    }
}

fn unsafe_rule(r: &CompiledRule, var: String) -> BackgroundError {
    let var = var
        .strip_prefix('#')
        .and_then(|i| i.parse::<usize>().ok())
        .map(|i| r.vars.name(i).to_string())
        .unwrap_or(var);
    BackgroundError::Unsafe {
        rule: r.source.clone(),
        var,
    }
}

/// Least model of `rules` on top of `db`, reading default negation from `neg`
/// (or from the model under construction when `neg` is `None`).
fn least_model(
    rules: &[&CompiledRule],
    db: &mut Database,
    neg: Option<&Database>,
    int_bound: i64,
) -> Result<(), BackgroundError> {
    loop {
        let mut new: Vec<(usize, Tuple)> = Vec::new();
        for r in rules {
            let mut missing = None;
            let negdb: &dyn Db = match neg {
                Some(n) => n,
                None => db,
            };
            join(&r.body, r.nvars, db, negdb, mode(int_bound), &mut |b| {
                match instantiate(&r.head_args, b) {
                    Some(t) => {
                        if !db.contains(r.head, &t) {
                            new.push((r.head, t));
                        }
                    }
                    None => {
                        missing = r.head_args.iter().find_map(|a| match a {
                            CTerm::Var(i) if b[*i].is_none() => Some(r.vars.name(*i).to_string()),
                            CTerm::Anon => Some("_".into()),
                            _ => None,
                        });
                        return ControlFlow::Break(());
                    }
                }
                ControlFlow::Continue(())
            })
            .map_err(|e| unsafe_rule(r, e.0))?;
            if let Some(v) = missing {
                return Err(unsafe_rule(r, v));
            }
        }
        let mut changed = false;
        for (p, t) in new {
            changed |= db.insert(p, t);
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Evaluates a stratified background by strata; `Ok(None)` if the rules
/// are not stratified.
pub fn evaluate_stratified(
    rules: &[DatalogRule],
    int_bound: i64,
) -> Result<Option<BackgroundModel>, BackgroundError> {
    let mut db = Database::default();
    let order = Arc::new(background_order(rules));
    let compiled = compile(rules, &mut db, &order);
    let mut g = DiGraph::<usize, bool>::new();
    let nodes: Vec<_> = (0..db.num_preds()).map(|i| g.add_node(i)).collect();
    for r in &compiled {
        for l in &r.body {
            match l {
                CLit::Scan { pred, .. } => {
                    g.add_edge(nodes[r.head], nodes[*pred], false);
                }
                CLit::Absent { pred, .. } => {
                    g.add_edge(nodes[r.head], nodes[*pred], true);
                }
                _ => {}
            }
        }
    }
    let sccs = tarjan_scc(&g);
    let mut scc_of = vec![0; db.num_preds()];
    for (k, scc) in sccs.iter().enumerate() {
        for n in scc {
            scc_of[g[*n]] = k;
        }
    }
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).unwrap();
        if g[e] && scc_of[g[a]] == scc_of[g[b]] {
            return Ok(None);
        }
    }
    // Tarjan's order lists dependencies before their dependents.
    for scc in &sccs {
        let members: BTreeSet<usize> = scc.iter().map(|n| g[*n]).collect();
        let stratum: Vec<&CompiledRule> = compiled
            .iter()
            .filter(|r| members.contains(&r.head))
            .collect();
        if !stratum.is_empty() {
            least_model(&stratum, &mut db, None, int_bound)?;
        }
    }
    let m = BackgroundModel {
        db,
        int_bound,
        order,
    };
    m.check_consistent()?;
    Ok(Some(m))
}

/// Evaluates the well-founded model by the alternating fixpoint and
/// requires it to be total.
pub fn evaluate_wellfounded(
    rules: &[DatalogRule],
    int_bound: i64,
) -> Result<BackgroundModel, BackgroundError> {
    let mut base = Database::default();
    let order = Arc::new(background_order(rules));
    let compiled = compile(rules, &mut base, &order);
    let all: Vec<&CompiledRule> = compiled.iter().collect();
    let gamma = |neg: &Database| -> Result<Database, BackgroundError> {
        let mut db = base.empty_like();
        least_model(&all, &mut db, Some(neg), int_bound)?;
        Ok(db)
    };
    let mut under = base.empty_like();
    let over = loop {
        let over = gamma(&under)?;
        let next = gamma(&over)?;
        if next.total_tuples() == under.total_tuples() {
            break over;
        }
        under = next;
    };
    if over.total_tuples() != under.total_tuples() {
        let mut undefined = Vec::new();
        for p in 0..over.num_preds() {
            for t in over.rel(p).tuples() {
                if !under.contains(p, t) {
                    let pr = over.pred(p);
                    undefined.push(
                        GroundAtom {
                            negative: pr.negative,
                            pred: pr.name.clone(),
                            args: t.clone(),
                        }
                        .to_string(),
                    );
                }
            }
        }
        undefined.sort();
        undefined.truncate(10);
        return Err(BackgroundError::NotTotal(undefined));
    }
    let m = BackgroundModel {
        db: under,
        int_bound,
        order,
    };
    m.check_consistent()?;
    Ok(m)
}

/// Computes the model M of the background: by strata when possible,
/// otherwise as the total well-founded model.
pub fn evaluate_background(
    rules: &[DatalogRule],
    int_bound: i64,
) -> Result<BackgroundModel, BackgroundError> {
    match evaluate_stratified(rules, int_bound)? {
        Some(m) => Ok(m),
        None => evaluate_wellfounded(rules, int_bound),
    }
}

impl BackgroundModel {
    pub fn int_bound(&self) -> i64 {
        self.int_bound
    }

    pub(crate) fn db(&self) -> &Database {
        &self.db
    }

    /// Ranks of the constants of the background.
    pub fn symbols(&self) -> &Arc<SymbolOrder> {
        &self.order
    }

    /// Parses a ground atom such as `walk(joe,1)` against the model's symbols.
    pub fn atom(&self, text: &str) -> Option<GroundAtom> {
        parse_ground_atom(text, &self.order)
    }

    fn check_consistent(&self) -> Result<(), BackgroundError> {
        for p in 0..self.db.num_preds() {
            let pr = self.db.pred(p);
            if pr.negative {
                continue;
            }
            if let Some(q) = self.db.lookup(&Pred::new(&pr.name, true)) {
                if let Some(t) = self
                    .db
                    .rel(p)
                    .tuples()
                    .iter()
                    .find(|t| self.db.contains(q, t))
                {
                    return Err(BackgroundError::Inconsistent(
                        GroundAtom::new(&pr.name, t.clone()).to_string(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Membership of a ground classical atom in M.
    pub fn holds(&self, a: &GroundAtom) -> bool {
        self.db
            .lookup(&Pred::new(&a.pred, a.negative))
            .is_some_and(|p| self.db.contains(p, &a.args))
    }

    /// Truth of a ground type literal, built-ins included (arithmetic
    /// within the bound N).
    pub fn holds_lit(&self, l: &Lit) -> Result<bool, BackgroundError> {
        match l {
            Lit::Classical(c) => {
                let a = GroundAtom::from_lit(c, &self.order)
                    .ok_or_else(|| BackgroundError::NonGround(l.to_string()))?;
                Ok(self.holds(&a))
            }
            Lit::Builtin(b) => {
                if b.terms().iter().any(|t| t.is_var()) {
                    return Err(BackgroundError::NonGround(l.to_string()));
                }
                let lit = compile_builtin(b, false, &mut VarMap::new(&self.order));
                let mut found = false;
                join(
                    &[lit],
                    0,
                    &self.db,
                    &self.db,
                    mode(self.int_bound),
                    &mut |_| {
                        found = true;
                        ControlFlow::Break(())
                    },
                )
                .map_err(|_| BackgroundError::NonGround(l.to_string()))?;
                Ok(found)
            }
        }
    }

    /// All atoms of M in sorted order (built-ins excluded).
    pub fn atoms(&self) -> Vec<GroundAtom> {
        let mut out = Vec::new();
        for p in 0..self.db.num_preds() {
            let pr = self.db.pred(p);
            for t in self.db.rel(p).tuples() {
                out.push(GroundAtom {
                    negative: pr.negative,
                    pred: pr.name.clone(),
                    args: t.clone(),
                });
            }
        }
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.db.total_tuples()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn model(src: &str, n: i64) -> BackgroundModel {
        let p = parse_program(&[src]).unwrap();
        evaluate_background(&p.background, n).unwrap()
    }

    fn lit(s: &str) -> Lit {
        let p = parse_program(&[format!("h :- {s}.")]).unwrap();
        p.background[0].body[0].lit.clone()
    }

    const WALK: &str = "walk(joe, 1). walk(jack, 2). walk(william, 5). walk(averell, 10).
        max(A, B, A) :- walk(_, A), walk(_, B), A >= B.
        max(A, B, B) :- walk(_, A), walk(_, B), B > A.";

    #[test]
    fn max_rules() {
        let m = model(WALK, 0);
        assert!(m.holds(&m.atom("max(2,10,10)").unwrap()));
        assert!(m.holds(&m.atom("max(10,2,10)").unwrap()));
        assert!(!m.holds(&m.atom("max(2,10,2)").unwrap()));
        assert_eq!(m.atoms().iter().filter(|a| a.pred == "max").count(), 16);
    }

    const TSP_COSTS: &str = "conn(stp, eis, 2). conn(eis, vie, 1).
        conn(B, A, C) :- conn(A, B, C).
        cost(A,B,W,C) :- conn(A,B,C), #int(W), 0 < W, W <= 7, not ecost(A,B,W).
        ecost(A,B,W) :- conn(A,B,C), cost(A,B,W,C1), C != C1.
        cost(stp,eis,2,10).
        weekday(1,1).
        weekday(D,W) :- D = D1 + 1, W = W1 + 1, weekday(D1,W1), W1 < 7.
        weekday(D,1) :- D = D1 + 1, weekday(D1,7).";

    #[test]
    fn exceptions_override_default_costs() {
        let p = parse_program(&[TSP_COSTS]).unwrap();
        assert!(evaluate_stratified(&p.background, 10).unwrap().is_none());
        let m = evaluate_background(&p.background, 10).unwrap();
        assert!(m.holds(&m.atom("cost(stp,eis,2,10)").unwrap()));
        assert!(m.holds(&m.atom("cost(stp,eis,1,2)").unwrap()));
        assert!(!m.holds(&m.atom("cost(stp,eis,2,2)").unwrap()));
        assert!(m.holds(&m.atom("cost(eis,stp,2,2)").unwrap()));
        assert!(m.holds(&m.atom("weekday(2,2)").unwrap()));
        assert!(m.holds(&m.atom("weekday(8,1)").unwrap()));
        assert!(m.holds(&m.atom("weekday(10,3)").unwrap()));
        assert!(!m.holds(&m.atom("weekday(11,4)").unwrap()));
    }

    #[test]
    fn builtins_and_bound() {
        let m = model("", 4);
        assert!(m.is_empty());
        assert!(m.holds_lit(&lit("3 = 1 + 2")).unwrap());
        assert!(!m.holds_lit(&lit("4 = 1 + 2")).unwrap());
        assert!(m.holds_lit(&lit("#int(4)")).unwrap());
        assert!(!m.holds_lit(&lit("#int(5)")).unwrap());
        assert!(m.holds_lit(&lit("a < b")).unwrap());
        assert!(m.holds_lit(&lit("9 < a")).unwrap());
        assert!(m.holds_lit(&lit("X < 1")).is_err());
    }

    #[test]
    fn non_total_model_is_rejected() {
        let p = parse_program(&["p :- not q. q :- not p."]).unwrap();
        assert!(matches!(
            evaluate_background(&p.background, 0),
            Err(BackgroundError::NotTotal(_))
        ));
        let p = parse_program(&["p :- not p."]).unwrap();
        assert!(evaluate_background(&p.background, 0).is_err());
    }

    #[test]
    fn strong_negation_consistency() {
        let p = parse_program(&["a(1). -a(X) :- a(X)."]).unwrap();
        assert!(matches!(
            evaluate_background(&p.background, 0),
            Err(BackgroundError::Inconsistent(_))
        ));
        let m = model("a(1). b(2). -a(X) :- b(X).", 0);
        assert!(m.holds(&m.atom("-a(2)").unwrap()));
    }

    #[test]
    fn stratified_and_wellfounded_agree() {
        for src in [
            WALK,
            "p(1). p(2). q(X) :- p(X), not r(X). r(2).",
            "e(1,2). e(2,3). t(X,Y) :- e(X,Y). t(X,Z) :- t(X,Y), e(Y,Z).",
        ] {
            let p = parse_program(&[src]).unwrap();
            let s = evaluate_stratified(&p.background, 3).unwrap().unwrap();
            let w = evaluate_wellfounded(&p.background, 3).unwrap();
            assert_eq!(s.atoms(), w.atoms());
        }
    }

    #[test]
    fn unsafe_rule_is_reported() {
        let p = parse_program(&["p(X) :- not q(X). q(1)."]).unwrap();
        assert!(matches!(
            evaluate_background(&p.background, 0),
            Err(BackgroundError::Unsafe { .. })
        ));
    }
}
