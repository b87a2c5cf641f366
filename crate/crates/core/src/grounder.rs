//! Typed instantiation of a planning domain: legal fluent and action
//! instances, ground rules and executability conditions, and the per-step
//! action cost table.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::background::{parse_ground_atom, BackgroundError, BackgroundModel, GroundAtom};
use crate::engine::{
    compile_args, compile_builtin, instantiate, join, join_from, ArithMode, CLit, CTerm, Database,
    Pred, SymbolOrder, Value, VarMap,
};
use crate::syntax::{
    expand_macros, validate, ActionDecl, Atom, BodyLit, ClassicalLit, Diagnostic, Lit, ParseError,
    Program, Statement, SymbolKind, Term, TIME,
};

pub type FluentId = u32;
pub type ActionId = u32;

/// A ground fluent literal, packed as `2 * fluent + negative`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FLit(pub u32);

impl FLit {
    pub fn new(fluent: FluentId, negative: bool) -> FLit {
        FLit(fluent * 2 + negative as u32)
    }

    pub fn fluent(self) -> FluentId {
        self.0 / 2
    }

    pub fn negative(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn complement(self) -> FLit {
        FLit(self.0 ^ 1)
    }
}

/// A ground causation rule. `head == None` stands for `false`. Type
/// literals are already evaluated against the background model.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroundRule {
    pub head: Option<FLit>,
    pub post_pos: Vec<FLit>,
    pub post_neg: Vec<FLit>,
    pub pre_pos: Vec<FLit>,
    pub pre_neg: Vec<FLit>,
    pub act_pos: Vec<ActionId>,
    pub act_neg: Vec<ActionId>,
}

impl GroundRule {
    pub fn is_static(&self) -> bool {
        self.pre_pos.is_empty()
            && self.pre_neg.is_empty()
            && self.act_pos.is_empty()
            && self.act_neg.is_empty()
    }

    fn normalize(&mut self) {
        for v in [
            &mut self.post_pos,
            &mut self.post_neg,
            &mut self.pre_pos,
            &mut self.pre_neg,
        ] {
            v.sort();
            v.dedup();
        }
        for v in [&mut self.act_pos, &mut self.act_neg] {
            v.sort();
            v.dedup();
        }
    }
}

/// A ground executability condition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundExec {
    pub action: ActionId,
    pub pre_pos: Vec<FLit>,
    pub pre_neg: Vec<FLit>,
    pub act_pos: Vec<ActionId>,
    pub act_neg: Vec<ActionId>,
}

/// The cost of an action instance at one time point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CostCell {
    /// No witness substitution yields a defined cost.
    Undefined,
    Unique(i64),
    /// Witness substitutions disagree; the values in ascending order.
    Conflict(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum CostRow {
    Constant(CostCell),
    /// Indexed by time point minus one.
    PerTime(Vec<CostCell>),
}

/// Costs of all legal action instances for the time points `1..=horizon`.
#[derive(Clone, Debug)]
pub struct CostTable {
    rows: Vec<CostRow>,
    horizon: usize,
}

impl CostTable {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn cell(&self, a: ActionId, time: usize) -> &CostCell {
        static UNDEFINED: CostCell = CostCell::Undefined;
        match &self.rows[a as usize] {
            CostRow::Constant(c) => c,
            CostRow::PerTime(v) => time
                .checked_sub(1)
                .and_then(|i| v.get(i))
                .unwrap_or(&UNDEFINED),
        }
    }

    pub fn is_time_dependent(&self, a: ActionId) -> bool {
        matches!(self.rows[a as usize], CostRow::PerTime(_))
    }
}

#[derive(Clone, Debug)]
pub struct GroundGoal {
    pub pos: Vec<FLit>,
    pub neg: Vec<FLit>,
    /// A positive goal literal is not a legal fluent instance, so no state
    /// can satisfy the goal.
    pub unsatisfiable: bool,
}

#[derive(Debug, Error)]
pub enum GroundError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("invalid program:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Background(#[from] BackgroundError),
    #[error("grounding exceeds the cap of {cap} ground rules")]
    TooLarge { cap: usize },
    #[error("unsafe {context}: variable {var} cannot be bound")]
    Unsafe { context: String, var: String },
    #[error("the program has no goal query")]
    NoQuery,
}

#[derive(Clone, Copy, Debug)]
pub struct GroundOptions {
    /// Upper bound on the number of ground rules and conditions.
    pub instance_cap: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions {
            instance_cap: 1_000_000,
        }
    }
}

/// A ground planning domain.
#[derive(Clone, Debug)]
pub struct GroundDomain {
    pub background: BackgroundModel,
    pub fluents: Vec<GroundAtom>,
    pub actions: Vec<GroundAtom>,
    fluent_ids: HashMap<GroundAtom, FluentId>,
    action_ids: HashMap<GroundAtom, ActionId>,
    /// Rules of the `initially` section.
    pub initial_rules: Vec<GroundRule>,
    /// Rules of the `always` section, including the constraints that
    /// `noConcurrency` stands for.
    pub rules: Vec<GroundRule>,
    pub execs: Vec<GroundExec>,
    pub no_concurrency: bool,
    pub costs: CostTable,
    pub goal: GroundGoal,
    pub plan_length: usize,
    /// Whether any action declaration has a costs part.
    pub has_costs: bool,
    pub symbols: Arc<SymbolOrder>,
}

impl GroundDomain {
    /// Parses a ground literal against the domain's symbols.
    pub fn atom(&self, text: &str) -> Option<GroundAtom> {
        parse_ground_atom(text, &self.symbols)
    }

    pub fn fluent_id(&self, a: &GroundAtom) -> Option<FluentId> {
        self.fluent_ids.get(a).copied()
    }

    pub fn action_id(&self, a: &GroundAtom) -> Option<ActionId> {
        self.action_ids.get(a).copied()
    }

    /// Looks up a ground fluent literal.
    pub fn flit(&self, a: &GroundAtom) -> Option<FLit> {
        let pos = GroundAtom {
            negative: false,
            ..a.clone()
        };
        self.fluent_id(&pos).map(|f| FLit::new(f, a.negative))
    }

    pub fn fluent_name(&self, l: FLit) -> String {
        let a = &self.fluents[l.fluent() as usize];
        if l.negative() {
            format!("-{a}")
        } else {
            a.to_string()
        }
    }

    pub fn action_name(&self, a: ActionId) -> String {
        self.actions[a as usize].to_string()
    }

    pub fn num_fluents(&self) -> usize {
        self.fluents.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    /// `cost_i(a)` for a well-defined instance; `None` if undefined or
    /// ambiguous at `time`.
    pub fn action_cost(&self, a: ActionId, time: usize) -> Option<i64> {
        match self.costs.cell(a, time) {
            CostCell::Unique(c) => Some(*c),
            _ => None,
        }
    }

    /// Number of ground rules and executability conditions.
    pub fn rules_count(&self) -> usize {
        self.rules.len() + self.initial_rules.len() + self.execs.len()
    }
}

const FLUENT_REL: &str = "@fluent:";
const ACTION_REL: &str = "@action:";

/// Grounds `p` for plan length `plan_length`.
pub fn ground(
    p: &Program,
    m: &BackgroundModel,
    plan_length: usize,
    opts: GroundOptions,
) -> Result<GroundDomain, GroundError> {
    let p = expand_macros(p)?;
    let diags = validate(&p);
    if !diags.is_empty() {
        return Err(GroundError::Invalid(diags));
    }
    let symbols = Arc::new(SymbolOrder::new(p.constants()));
    let mut g = Grounder::new(&p, m, opts, symbols.clone());
    let (fluents, fluent_ids) = g.legal_instances(SymbolKind::Fluent)?;
    let (actions, action_ids) = g.legal_instances(SymbolKind::Action)?;
    let mut gd = GroundDomain {
        background: m.clone(),
        fluents,
        actions,
        fluent_ids,
        action_ids,
        initial_rules: Vec::new(),
        rules: Vec::new(),
        execs: Vec::new(),
        no_concurrency: p.no_concurrency,
        costs: CostTable {
            rows: Vec::new(),
            horizon: plan_length,
        },
        goal: GroundGoal {
            pos: Vec::new(),
            neg: Vec::new(),
            unsatisfiable: false,
        },
        plan_length,
        has_costs: p.actions.iter().any(|a| a.has_costs()),
        symbols: symbols.clone(),
    };
    g.register(&gd);
    for (section, initially) in [(&p.initially, true), (&p.always, false)] {
        for st in section {
            g.statement(st, initially, &mut gd)?;
        }
    }
    if p.no_concurrency {
        let n = gd.actions.len() as ActionId;
        let pairs = (n as usize) * (n as usize).saturating_sub(1) / 2;
        if gd.rules_count() + pairs > opts.instance_cap {
            return Err(GroundError::TooLarge {
                cap: opts.instance_cap,
            });
        }
        for a in 0..n {
            for b in a + 1..n {
                gd.rules.push(GroundRule {
                    act_pos: vec![a, b],
                    ..GroundRule::default()
                });
            }
        }
    }
    gd.costs = cost_table(&p, m, &gd, plan_length)?;
    if let Some(q) = &p.query {
        for (lits, negated) in [(&q.goal_pos, false), (&q.goal_neg, true)] {
            for l in lits {
                let a = GroundAtom::from_lit(l, &symbols).expect("goal literals are ground");
                match gd.flit(&a) {
                    Some(fl) if negated => gd.goal.neg.push(fl),
                    Some(fl) => gd.goal.pos.push(fl),
                    None if !negated => gd.goal.unsatisfiable = true,
                    None => {}
                }
            }
        }
    } else {
        return Err(GroundError::NoQuery);
    }
    Ok(gd)
}

struct Grounder<'a> {
    prog: &'a Program,
    db: Database,
    mode: ArithMode,
    cap: usize,
    seen_rules: HashSet<GroundRule>,
    seen_execs: HashSet<GroundExec>,
    fluent_rel: HashMap<String, usize>,
    action_rel: HashMap<String, usize>,
    fluent_lookup: HashMap<String, HashMap<Vec<Value>, FluentId>>,
    action_lookup: HashMap<String, HashMap<Vec<Value>, ActionId>>,
    anon: usize,
    symbols: Arc<SymbolOrder>,
}

/// Where a compiled dynamic literal of a rule goes after instantiation.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Head,
    PostPos,
    PostNeg,
    PrePos,
    PreNeg,
    ActPos,
    ActNeg,
    ExecAction,
}

struct DynLit {
    slot: Slot,
    pred: String,
    negative: bool,
    args: Vec<CTerm>,
}

impl<'a> Grounder<'a> {
    fn new(
        prog: &'a Program,
        m: &BackgroundModel,
        opts: GroundOptions,
        symbols: Arc<SymbolOrder>,
    ) -> Self {
        Grounder {
            prog,
            db: m.db().clone(),
            mode: ArithMode {
                int_bound: m.int_bound(),
                bounded: true,
            },
            cap: opts.instance_cap,
            seen_rules: HashSet::new(),
            seen_execs: HashSet::new(),
            fluent_rel: HashMap::new(),
            action_rel: HashMap::new(),
            fluent_lookup: HashMap::new(),
            action_lookup: HashMap::new(),
            anon: 0,
            symbols,
        }
    }

    fn type_lit(&mut self, l: &Lit, naf: bool, vars: &mut VarMap) -> CLit {
        match l {
            Lit::Classical(c) => {
                let pred = self.db.id(&Pred::new(&c.atom.pred, c.negative));
                let args = compile_args(&c.atom.args, vars);
                if naf {
                    CLit::Absent { pred, args }
                } else {
                    CLit::Scan { pred, args }
                }
            }
            Lit::Builtin(b) => compile_builtin(b, naf, vars),
        }
    }

    fn legal_instances(
        &mut self,
        kind: SymbolKind,
    ) -> Result<(Vec<GroundAtom>, HashMap<GroundAtom, u32>), GroundError> {
        let decls: Vec<(String, Vec<String>, Vec<Lit>)> = match kind {
            SymbolKind::Fluent => self
                .prog
                .fluents
                .iter()
                .map(|d| (d.name.clone(), d.params.clone(), d.requires.clone()))
                .collect(),
            _ => self
                .prog
                .actions
                .iter()
                .map(|d| (d.name.clone(), d.params.clone(), d.requires.clone()))
                .collect(),
        };
        let mut out = BTreeSet::new();
        for (name, params, requires) in decls {
            let mut vars = VarMap::new(&self.symbols);
            let heads: Vec<usize> = params.iter().map(|x| vars.index(x)).collect();
            let lits: Vec<CLit> = requires
                .iter()
                .map(|l| self.type_lit(l, false, &mut vars))
                .collect();
            let mut err = None;
            join(&lits, vars.len(), &self.db, &self.db, self.mode, &mut |b| {
                match heads
                    .iter()
                    .map(|i| b[*i].clone())
                    .collect::<Option<Vec<_>>>()
                {
                    Some(args) => {
                        out.insert(GroundAtom::new(&name, args));
                    }
                    None => err = Some(name.clone()),
                }
                ControlFlow::Continue(())
            })
            .map_err(|e| GroundError::Unsafe {
                context: format!("declaration of {name}"),
                var: e.0,
            })?;
            if let Some(name) = err {
                return Err(GroundError::Unsafe {
                    context: format!("declaration of {name}"),
                    var: "a parameter".into(),
                });
            }
        }
        let list: Vec<GroundAtom> = out.into_iter().collect();
        let ids = list
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i as u32))
            .collect();
        Ok((list, ids))
    }

    /// Adds relations holding the legal instances, so joins can type
    /// fluent and action literals.
    fn register(&mut self, gd: &GroundDomain) {
        for (list, rels, lookup, prefix) in [
            (
                &gd.fluents,
                &mut self.fluent_rel,
                &mut self.fluent_lookup,
                FLUENT_REL,
            ),
            (
                &gd.actions,
                &mut self.action_rel,
                &mut self.action_lookup,
                ACTION_REL,
            ),
        ] {
            for (i, a) in list.iter().enumerate() {
                let id = *rels.entry(a.pred.clone()).or_insert_with(|| {
                    self.db
                        .id(&Pred::new(&format!("{prefix}{}", a.pred), false))
                });
                self.db.insert(id, a.args.clone());
                lookup
                    .entry(a.pred.clone())
                    .or_default()
                    .insert(a.args.clone(), i as u32);
            }
        }
        // Declared symbols without legal instances still need a relation.
        for d in &self.prog.fluents {
            self.fluent_rel.entry(d.name.clone()).or_insert_with(|| {
                self.db
                    .id(&Pred::new(&format!("{FLUENT_REL}{}", d.name), false))
            });
        }
        for d in &self.prog.actions {
            self.action_rel.entry(d.name.clone()).or_insert_with(|| {
                self.db
                    .id(&Pred::new(&format!("{ACTION_REL}{}", d.name), false))
            });
        }
    }

    fn fresh_anon(&mut self, args: &[Term]) -> Vec<Term> {
        args.iter()
            .map(|t| match t {
                Term::Anon => {
                    self.anon += 1;
                    Term::Var(format!("_anon{}", self.anon))
                }
                t => t.clone(),
            })
            .collect()
    }

    fn dyn_lit(
        &mut self,
        c: &ClassicalLit,
        slot: Slot,
        vars: &mut VarMap,
        lits: &mut Vec<CLit>,
        dyns: &mut Vec<DynLit>,
    ) {
        let kind = self.prog.kind_of(&c.atom.pred);
        let args = self.fresh_anon(&c.atom.args);
        let cargs = compile_args(&args, vars);
        let rel = match kind {
            SymbolKind::Fluent => self.fluent_rel[&c.atom.pred],
            _ => self.action_rel[&c.atom.pred],
        };
        lits.push(CLit::Scan {
            pred: rel,
            args: cargs.clone(),
        });
        let slot = match (kind, slot) {
            (SymbolKind::Action, Slot::PrePos) => Slot::ActPos,
            (SymbolKind::Action, Slot::PreNeg) => Slot::ActNeg,
            (_, s) => s,
        };
        dyns.push(DynLit {
            slot,
            pred: c.atom.pred.clone(),
            negative: c.negative,
            args: cargs,
        });
    }

    fn body(
        &mut self,
        body: &[BodyLit],
        pre: bool,
        vars: &mut VarMap,
        lits: &mut Vec<CLit>,
        dyns: &mut Vec<DynLit>,
    ) {
        for b in body {
            match &b.lit {
                Lit::Classical(c) if self.prog.kind_of(&c.atom.pred) != SymbolKind::Type => {
                    let slot = match (pre, b.naf) {
                        (false, false) => Slot::PostPos,
                        (false, true) => Slot::PostNeg,
                        (true, false) => Slot::PrePos,
                        (true, true) => Slot::PreNeg,
                    };
                    self.dyn_lit(c, slot, vars, lits, dyns);
                }
                l => {
                    let cl = self.type_lit(l, b.naf, vars);
                    lits.push(cl);
                }
            }
        }
    }

    fn statement(
        &mut self,
        st: &Statement,
        initially: bool,
        gd: &mut GroundDomain,
    ) -> Result<(), GroundError> {
        let mut vars = VarMap::new(&self.symbols);
        let mut lits = Vec::new();
        let mut dyns = Vec::new();
        match st {
            Statement::Caused(r) => {
                if let Some(h) = &r.head {
                    self.dyn_lit(h, Slot::Head, &mut vars, &mut lits, &mut dyns);
                }
                self.body(&r.post, false, &mut vars, &mut lits, &mut dyns);
                self.body(&r.pre, true, &mut vars, &mut lits, &mut dyns);
            }
            Statement::Executable(e) => {
                let c = ClassicalLit::pos(Atom::new(e.action.pred.clone(), e.action.args.clone()));
                self.dyn_lit(&c, Slot::ExecAction, &mut vars, &mut lits, &mut dyns);
                self.body(&e.pre, true, &mut vars, &mut lits, &mut dyns);
            }
            _ => unreachable!("macros are expanded before grounding"),
        }
        let mut rules = Vec::new();
        let mut execs = Vec::new();
        let mut unbound = None;
        let lookup = (&self.fluent_lookup, &self.action_lookup);
        join(&lits, vars.len(), &self.db, &self.db, self.mode, &mut |b| {
            let mut rule = GroundRule::default();
            let mut exec_action = None;
            for d in &dyns {
                let Some(t) = instantiate(&d.args, b) else {
                    unbound = Some(d.pred.clone());
                    return ControlFlow::Break(());
                };
                match d.slot {
                    Slot::ActPos | Slot::ActNeg | Slot::ExecAction => {
                        let id = lookup.1[&d.pred][&t];
                        match d.slot {
                            Slot::ActPos => rule.act_pos.push(id),
                            Slot::ActNeg => rule.act_neg.push(id),
                            _ => exec_action = Some(id),
                        }
                    }
                    _ => {
                        let l = FLit::new(lookup.0[&d.pred][&t], d.negative);
                        match d.slot {
                            Slot::Head => rule.head = Some(l),
                            Slot::PostPos => rule.post_pos.push(l),
                            Slot::PostNeg => rule.post_neg.push(l),
                            Slot::PrePos => rule.pre_pos.push(l),
                            _ => rule.pre_neg.push(l),
                        }
                    }
                }
            }
            rule.normalize();
            match exec_action {
                Some(action) => execs.push(GroundExec {
                    action,
                    pre_pos: rule.pre_pos,
                    pre_neg: rule.pre_neg,
                    act_pos: rule.act_pos,
                    act_neg: rule.act_neg,
                }),
                None => rules.push(rule),
            }
            if rules.len() + execs.len() > self.cap {
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })
        .map_err(|e| GroundError::Unsafe {
            context: format!("statement `{st}`"),
            var: e.0,
        })?;
        if let Some(pred) = unbound {
            return Err(GroundError::Unsafe {
                context: format!("statement `{st}`"),
                var: format!("in {pred}"),
            });
        }
        for r in rules {
            if self.seen_rules.insert(r.clone()) {
                if initially {
                    gd.initial_rules.push(r);
                } else {
                    gd.rules.push(r);
                }
            }
        }
        for e in execs {
            if self.seen_execs.insert(e.clone()) {
                gd.execs.push(e);
            }
        }
        if gd.rules_count() > self.cap {
            return Err(GroundError::TooLarge { cap: self.cap });
        }
        // Initially and always rules are kept apart even when equal.
        if initially {
            self.seen_rules.clear();
        }
        Ok(())
    }
}

fn val(v: &Value) -> i64 {
    match v {
        Value::Int(i) => *i,
        Value::Sym(_) => 0,
    }
}

/// Evaluates the cost witnesses of one action instance. Returns the set of
/// values per queried time point.
struct CostEval {
    requires: Vec<CLit>,
    where_part: Vec<CLit>,
    params: Vec<usize>,
    time: Option<usize>,
    cost: CTerm,
    nvars: usize,
}

impl CostEval {
    fn new(d: &ActionDecl, db: &mut Database, symbols: &Arc<SymbolOrder>) -> CostEval {
        let mut vars = VarMap::new(symbols);
        let params = d.params.iter().map(|x| vars.index(x)).collect();
        let compile = |l: &Lit, vars: &mut VarMap, db: &mut Database| match l {
            Lit::Classical(c) => CLit::Scan {
                pred: db.id(&Pred::new(&c.atom.pred, c.negative)),
                args: compile_args(&c.atom.args, vars),
            },
            Lit::Builtin(b) => compile_builtin(b, false, vars),
        };
        let requires = d
            .requires
            .iter()
            .map(|l| compile(l, &mut vars, db))
            .collect();
        let where_part = d
            .cost_where
            .iter()
            .map(|l| compile(l, &mut vars, db))
            .collect();
        let cost = match &d.cost {
            Some(t) => crate::engine::compile_term(t, &mut vars),
            None => CTerm::Const(Value::Int(0)),
        };
        let time = d.mentions_time().then(|| vars.index(TIME));
        CostEval {
            requires,
            where_part,
            params,
            time,
            cost,
            nvars: vars.len(),
        }
    }

    fn cell(
        &self,
        db: &Database,
        int_bound: i64,
        args: &[Value],
        time: Option<i64>,
    ) -> Result<CostCell, GroundError> {
        let mut start = vec![None; self.nvars];
        for (i, v) in self.params.iter().zip(args) {
            start[*i] = Some(v.clone());
        }
        if let (Some(ti), Some(t)) = (self.time, time) {
            start[ti] = Some(Value::Int(t));
        }
        let bounded = ArithMode {
            int_bound,
            bounded: true,
        };
        let unbounded = ArithMode {
            int_bound,
            bounded: false,
        };
        let mut witnesses = Vec::new();
        join_from(&self.requires, start, db, db, bounded, &mut |b| {
            witnesses.push(b.to_vec());
            ControlFlow::Continue(())
        })
        .map_err(|e| GroundError::Unsafe {
            context: "requires part".into(),
            var: e.0,
        })?;
        let mut values = BTreeSet::new();
        for w in witnesses {
            join_from(&self.where_part, w, db, db, unbounded, &mut |b| {
                if let Some(v) = instantiate(std::slice::from_ref(&self.cost), b) {
                    values.insert(val(&v[0]));
                }
                ControlFlow::Continue(())
            })
            .map_err(|e| GroundError::Unsafe {
                context: "costs part".into(),
                var: e.0,
            })?;
        }
        Ok(match values.len() {
            0 => CostCell::Undefined,
            1 => CostCell::Unique(*values.iter().next().unwrap()),
            _ => CostCell::Conflict(values.into_iter().collect()),
        })
    }
}

fn cost_table(
    p: &Program,
    m: &BackgroundModel,
    gd: &GroundDomain,
    horizon: usize,
) -> Result<CostTable, GroundError> {
    let mut db = m.db().clone();
    let mut evals: HashMap<&str, CostEval> = HashMap::new();
    for d in &p.actions {
        if d.has_costs() {
            evals.insert(&d.name, CostEval::new(d, &mut db, &gd.symbols));
        }
    }
    let mut rows = Vec::with_capacity(gd.actions.len());
    for a in &gd.actions {
        let row = match evals.get(a.pred.as_str()) {
            None => CostRow::Constant(CostCell::Unique(0)),
            Some(e) if e.time.is_none() => {
                CostRow::Constant(e.cell(&db, m.int_bound(), &a.args, None)?)
            }
            Some(e) => CostRow::PerTime(
                (1..=horizon)
                    .map(|i| e.cell(&db, m.int_bound(), &a.args, Some(i as i64)))
                    .collect::<Result<_, _>>()?,
            ),
        };
        rows.push(row);
    }
    Ok(CostTable { rows, horizon })
}

/// A violation of well-definedness for one instance and time point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostDiagnostic {
    pub action: String,
    pub time: usize,
    pub cell: CostCell,
}

impl fmt::Display for CostDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.cell {
            CostCell::Undefined => write!(
                f,
                "{} at time {}: no witness with a defined cost (the int bound may be too low)",
                self.action, self.time
            ),
            CostCell::Conflict(v) => write!(
                f,
                "{} at time {}: conflicting costs {}",
                self.action,
                self.time,
                v.iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" and ")
            ),
            CostCell::Unique(_) => write!(f, "{} at time {}: well-defined", self.action, self.time),
        }
    }
}

/// Checks that every legal action instance has a unique cost at every time
/// point `1..=horizon`. Time-independent instances are reported once, at
/// time 1.
pub fn check_well_defined(gd: &GroundDomain, horizon: usize) -> Vec<CostDiagnostic> {
    let mut out = Vec::new();
    for a in 0..gd.actions.len() as ActionId {
        let times = if gd.costs.is_time_dependent(a) {
            horizon
        } else {
            horizon.min(1)
        };
        for i in 1..=times {
            let cell = if i > gd.costs.horizon() && gd.costs.is_time_dependent(a) {
                CostCell::Undefined
            } else {
                gd.costs.cell(a, i).clone()
            };
            if !matches!(cell, CostCell::Unique(_)) {
                out.push(CostDiagnostic {
                    action: gd.action_name(a),
                    time: i,
                    cell,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::evaluate_background;
    use crate::syntax::parse_program;

    fn domain(src: &str, l: usize, n: i64) -> GroundDomain {
        let p = parse_program(&[src]).unwrap();
        let m = evaluate_background(&p.background, n).unwrap();
        ground(&p, &m, l, GroundOptions::default()).unwrap()
    }

    const BRIDGE: &str = include_str!("../../../fixtures/bridge/bridge_costs.bk");
    const BRIDGE_PLAN: &str = include_str!("../../../fixtures/bridge/bridge_costs.plan");

    fn bridge() -> GroundDomain {
        domain(&format!("{BRIDGE}\n{BRIDGE_PLAN}"), 7, 0)
    }

    #[test]
    fn bridge_instances() {
        let gd = bridge();
        let count = |name: &str| gd.actions.iter().filter(|a| a.pred == name).count();
        assert_eq!(count("cross"), 4);
        assert_eq!(count("crossTogether"), 6);
        assert_eq!(count("takeLamp"), 4);
        assert_eq!(gd.fluents.iter().filter(|a| a.pred == "across").count(), 4);
        assert_eq!(gd.fluents.len(), 4 + 16 + 4);
        let mut sorted = gd.actions.clone();
        sorted.sort();
        assert_eq!(sorted, gd.actions);
    }

    #[test]
    fn bridge_costs() {
        let gd = bridge();
        let a = gd
            .action_id(&gd.atom("crossTogether(joe,averell)").unwrap())
            .unwrap();
        assert_eq!(gd.action_cost(a, 3), Some(10));
        let t = gd
            .action_id(&gd.atom("takeLamp(william)").unwrap())
            .unwrap();
        assert_eq!(gd.action_cost(t, 1), Some(0));
        assert!(check_well_defined(&gd, 7).is_empty());
    }

    #[test]
    fn typed_instantiation_filters_rules() {
        let gd = bridge();
        // Every literal refers to a legal instance by construction; check
        // that type literals were evaluated away: `X != Y` filters the
        // lamp-passing rule to 4 * 3 instances.
        let lamp_rules = gd
            .rules
            .iter()
            .filter(|r| {
                r.head.is_some_and(|h| {
                    h.negative() && gd.fluents[h.fluent() as usize].pred == "hasLamp"
                }) && !r.act_pos.is_empty()
            })
            .count();
        assert_eq!(lamp_rules, 12);
        // noConcurrency: one constraint per unordered pair of 14 actions.
        let pairs = gd
            .rules
            .iter()
            .filter(|r| r.head.is_none() && r.act_pos.len() == 2)
            .count();
        assert_eq!(pairs, 14 * 13 / 2);
    }

    #[test]
    fn time_dependent_costs() {
        let gd = domain(
            "actions: finish costs time.\nfluents: f.\ngoal: f ? (4)",
            4,
            0,
        );
        let f = gd.action_id(&gd.atom("finish").unwrap()).unwrap();
        assert_eq!(gd.action_cost(f, 4), Some(4));
        assert_eq!(gd.action_cost(f, 1), Some(1));
    }

    #[test]
    fn symbolic_cost_is_zero() {
        let gd = domain("actions: a costs high.\nfluents: f.\ngoal: f ? (1)", 1, 0);
        assert_eq!(gd.action_cost(0, 1), Some(0));
    }

    #[test]
    fn conflicting_costs_are_diagnosed() {
        let gd = domain("q(1). r(1,2). r(1,3).\nactions: a(X) requires q(X) costs C where r(X,C).\nfluents: f.\ngoal: f ? (1)", 1, 0);
        let d = check_well_defined(&gd, 1);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].cell, CostCell::Conflict(vec![2, 3]));
    }

    #[test]
    fn missing_witness_is_diagnosed() {
        let gd = domain("q(1). r(2,5).\nactions: a(X) requires q(X) costs C where r(X,C).\nfluents: f.\ngoal: f ? (1)", 1, 0);
        let d = check_well_defined(&gd, 1);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].cell, CostCell::Undefined);
    }

    #[test]
    fn weekday_costs() {
        let src = format!(
            "{}\n{}\n{}\n{}",
            include_str!("../../../fixtures/tsp/tsp.bk"),
            include_str!("../../../fixtures/tsp/weekdays.bk"),
            include_str!("../../../fixtures/tsp/exc.bk"),
            include_str!("../../../fixtures/tsp/tsp_weekdays.plan")
        );
        let gd = domain(&src, 9, 10);
        let a = gd.action_id(&gd.atom("travel(stp,eis)").unwrap()).unwrap();
        assert_eq!(gd.action_cost(a, 2), Some(10));
        assert_eq!(gd.action_cost(a, 1), Some(2));
        assert_eq!(gd.action_cost(a, 9), Some(10));
        let b = gd.action_id(&gd.atom("travel(eis,stp)").unwrap()).unwrap();
        assert_eq!(gd.action_cost(b, 2), Some(2));
        assert!(check_well_defined(&gd, 9).is_empty());
        // With the default bound the weekday rules stop at day 0.
        let gd0 = domain(&src, 9, 0);
        assert!(!check_well_defined(&gd0, 9).is_empty());
    }
}
