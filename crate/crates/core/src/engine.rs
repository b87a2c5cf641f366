//! A small Datalog join engine shared by background evaluation, grounding,
//! cost evaluation and the translator's weak-constraint evaluation.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::syntax::{ArithOp, Builtin, CmpOp, Term, TIME};

/// A symbolic constant. Symbols compare by rank, the position of their
/// first occurrence in the program; unranked symbols come last, by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym {
    rank: u32,
    name: Arc<str>,
}

impl Sym {
    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Ranks of the symbolic constants of a program.
#[derive(Clone, Debug, Default)]
pub struct SymbolOrder {
    ranks: HashMap<Arc<str>, u32>,
}

impl SymbolOrder {
    pub fn new<'a>(names: impl IntoIterator<Item = &'a str>) -> SymbolOrder {
        let mut o = SymbolOrder::default();
        for n in names {
            if !o.ranks.contains_key(n) {
                let r = o.ranks.len() as u32;
                o.ranks.insert(Arc::from(n), r);
            }
        }
        o
    }

    pub fn sym(&self, name: &str) -> Value {
        match self.ranks.get_key_value(name) {
            Some((k, r)) => Value::Sym(Sym {
                rank: *r,
                name: k.clone(),
            }),
            None => Value::sym(name),
        }
    }

    pub fn value(&self, t: &Term) -> Option<Value> {
        match t {
            Term::Int(i) => Some(Value::Int(*i)),
            Term::Sym(s) => Some(self.sym(s)),
            _ => None,
        }
    }
}

/// A ground term. Integers sort before symbols and compare numerically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Sym(Sym),
}

impl Value {
    /// An unranked symbol.
    pub fn sym(s: &str) -> Value {
        Value::Sym(Sym {
            rank: u32::MAX,
            name: Arc::from(s),
        })
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Sym(_) => None,
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Value::Int(i) => Term::Int(*i),
            Value::Sym(s) => Term::Sym(s.name().to_string()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => f.write_str(s.name()),
        }
    }
}

pub type Tuple = Vec<Value>;

/// A predicate with its strong-negation flag, e.g. `-across`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pred {
    pub negative: bool,
    pub name: String,
}

impl Pred {
    pub fn new(name: &str, negative: bool) -> Pred {
        Pred {
            negative,
            name: name.to_string(),
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Relation {
    tuples: Vec<Tuple>,
    set: HashSet<Tuple>,
}

impl Relation {
    pub fn insert(&mut self, t: Tuple) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        self.set.insert(t.clone());
        self.tuples.push(t);
        true
    }

    pub fn contains(&self, t: &[Value]) -> bool {
        self.set.contains(t)
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Relations indexed by predicate id.
#[derive(Clone, Debug, Default)]
pub struct Database {
    ids: HashMap<Pred, usize>,
    preds: Vec<Pred>,
    rels: Vec<Relation>,
}

impl Database {
    pub fn id(&mut self, p: &Pred) -> usize {
        if let Some(&i) = self.ids.get(p) {
            return i;
        }
        let i = self.preds.len();
        self.ids.insert(p.clone(), i);
        self.preds.push(p.clone());
        self.rels.push(Relation::default());
        i
    }

    pub fn lookup(&self, p: &Pred) -> Option<usize> {
        self.ids.get(p).copied()
    }

    pub fn pred(&self, id: usize) -> &Pred {
        &self.preds[id]
    }

    pub fn num_preds(&self) -> usize {
        self.preds.len()
    }

    pub fn rel(&self, id: usize) -> &Relation {
        &self.rels[id]
    }

    pub fn rel_mut(&mut self, id: usize) -> &mut Relation {
        &mut self.rels[id]
    }

    pub fn insert(&mut self, id: usize, t: Tuple) -> bool {
        self.rels[id].insert(t)
    }

    /// A database with the same predicate ids and no tuples.
    pub fn empty_like(&self) -> Database {
        Database {
            ids: self.ids.clone(),
            preds: self.preds.clone(),
            rels: vec![Relation::default(); self.preds.len()],
        }
    }

    pub fn total_tuples(&self) -> usize {
        self.rels.iter().map(|r| r.len()).sum()
    }
}

/// Read access used by joins: positive literals scan, negated ones test.
pub trait Db {
    fn scan(&self, pred: usize) -> &[Tuple];
    fn contains(&self, pred: usize, t: &[Value]) -> bool;
}

impl Db for Database {
    fn scan(&self, pred: usize) -> &[Tuple] {
        self.rels.get(pred).map(|r| r.tuples()).unwrap_or(&[])
    }

    fn contains(&self, pred: usize, t: &[Value]) -> bool {
        self.rels.get(pred).is_some_and(|r| r.contains(t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CTerm {
    Var(usize),
    Const(Value),
    Anon,
}

/// A compiled body literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CLit {
    /// Binds variables against the tuples of a relation.
    Scan {
        pred: usize,
        args: Vec<CTerm>,
    },
    /// Holds if no tuple of the relation matches; `_` is existential.
    Absent {
        pred: usize,
        args: Vec<CTerm>,
    },
    Cmp(CmpOp, CTerm, CTerm),
    Arith {
        result: CTerm,
        op: ArithOp,
        lhs: CTerm,
        rhs: CTerm,
    },
    Int(CTerm),
    /// Negation of a comparison or arithmetic built-in; needs all variables bound.
    NotBuiltin(Box<CLit>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArithMode {
    /// Upper bound N of `#int`.
    pub int_bound: i64,
    /// Whether arithmetic results outside `0..=N` make the built-in false.
    pub bounded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundVariable(pub String);

/// Maps variable names of one rule to dense indices.
#[derive(Clone, Debug, Default)]
pub struct VarMap {
    names: Vec<String>,
    order: Arc<SymbolOrder>,
}

impl VarMap {
    pub fn new(order: &Arc<SymbolOrder>) -> VarMap {
        VarMap {
            names: Vec::new(),
            order: order.clone(),
        }
    }

    pub fn index(&mut self, name: &str) -> usize {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
}

pub fn compile_term(t: &Term, vars: &mut VarMap) -> CTerm {
    match t {
        Term::Var(v) => CTerm::Var(vars.index(v)),
        Term::Time => CTerm::Var(vars.index(TIME)),
        Term::Anon => CTerm::Anon,
        Term::Sym(_) | Term::Int(_) => CTerm::Const(vars.order.value(t).unwrap()),
    }
}

pub fn compile_args(args: &[Term], vars: &mut VarMap) -> Vec<CTerm> {
    args.iter().map(|t| compile_term(t, vars)).collect()
}

pub fn compile_builtin(b: &Builtin, naf: bool, vars: &mut VarMap) -> CLit {
    let lit = match b {
        Builtin::Cmp(op, x, y) => CLit::Cmp(*op, compile_term(x, vars), compile_term(y, vars)),
        Builtin::Arith {
            result,
            op,
            lhs,
            rhs,
        } => CLit::Arith {
            result: compile_term(result, vars),
            op: *op,
            lhs: compile_term(lhs, vars),
            rhs: compile_term(rhs, vars),
        },
        Builtin::Int(t) => CLit::Int(compile_term(t, vars)),
    };
    if naf {
        CLit::NotBuiltin(Box::new(lit))
    } else {
        lit
    }
}

type Binding = Vec<Option<Value>>;

fn value<'a>(t: &'a CTerm, b: &'a Binding) -> Option<&'a Value> {
    match t {
        CTerm::Var(i) => b[*i].as_ref(),
        CTerm::Const(v) => Some(v),
        CTerm::Anon => None,
    }
}

fn is_bound(t: &CTerm, b: &Binding) -> bool {
    match t {
        CTerm::Var(i) => b[*i].is_some(),
        CTerm::Const(_) => true,
        CTerm::Anon => false,
    }
}

pub fn eval_arith(op: ArithOp, x: i64, y: i64, mode: ArithMode) -> Option<i64> {
    let r = match op {
        ArithOp::Add => x.checked_add(y)?,
        ArithOp::Mul => x.checked_mul(y)?,
    };
    if mode.bounded && !(0..=mode.int_bound).contains(&r) {
        return None;
    }
    Some(r)
}

pub fn eval_cmp(op: CmpOp, x: &Value, y: &Value) -> bool {
    match op {
        CmpOp::Lt => x < y,
        CmpOp::Le => x <= y,
        CmpOp::Gt => x > y,
        CmpOp::Ge => x >= y,
        CmpOp::Eq => x == y,
        CmpOp::Ne => x != y,
    }
}

/// Evaluates a ground built-in.
fn ground_builtin(l: &CLit, b: &Binding, mode: ArithMode) -> Option<bool> {
    Some(match l {
        CLit::Cmp(op, x, y) => eval_cmp(*op, value(x, b)?, value(y, b)?),
        CLit::Arith {
            result,
            op,
            lhs,
            rhs,
        } => {
            let (Some(x), Some(y)) = (value(lhs, b)?.as_int(), value(rhs, b)?.as_int()) else {
                return Some(false);
            };
            let r = value(result, b)?;
            eval_arith(*op, x, y, mode).is_some_and(|v| Value::Int(v) == *r)
        }
        CLit::Int(t) => value(t, b)?
            .as_int()
            .is_some_and(|i| (0..=mode.int_bound).contains(&i)),
        _ => return None,
    })
}

fn matches(args: &[CTerm], t: &[Value], b: &Binding) -> bool {
    args.iter().zip(t).all(|(a, v)| match a {
        CTerm::Var(i) => b[*i].as_ref().is_none_or(|x| x == v),
        CTerm::Const(c) => c == v,
        CTerm::Anon => true,
    })
}

struct Join<'a> {
    lits: &'a [CLit],
    pos: &'a dyn Db,
    neg: &'a dyn Db,
    mode: ArithMode,
    used: Vec<bool>,
    binding: Binding,
}

enum Step {
    Filter(usize),
    Bind(usize),
}

impl Join<'_> {
    /// Picks the next literal: ground filters first, then the cheapest
    /// binding literal.
    fn choose(&self) -> Result<Option<Step>, UnboundVariable> {
        let b = &self.binding;
        let mut best: Option<(usize, usize)> = None;
        let mut stuck = None;
        for (i, l) in self.lits.iter().enumerate() {
            if self.used[i] {
                continue;
            }
            let cost = match l {
                CLit::Scan { pred, args } => {
                    if args.iter().all(|a| is_bound(a, b) || *a == CTerm::Anon)
                        && args.iter().all(|a| *a != CTerm::Anon)
                    {
                        return Ok(Some(Step::Filter(i)));
                    }
                    let n = self.pos.scan(*pred).len();
                    let bound = args.iter().filter(|a| is_bound(a, b)).count();
                    n / (1 + 4 * bound) + 1
                }
                CLit::Absent { args, .. } => {
                    if args.iter().all(|a| is_bound(a, b) || *a == CTerm::Anon) {
                        return Ok(Some(Step::Filter(i)));
                    }
                    stuck = Some(i);
                    continue;
                }
                CLit::Cmp(op, x, y) => match (is_bound(x, b), is_bound(y, b)) {
                    (true, true) => return Ok(Some(Step::Filter(i))),
                    (true, false) | (false, true) if *op == CmpOp::Eq => 1,
                    _ => {
                        stuck = Some(i);
                        continue;
                    }
                },
                CLit::Arith {
                    result, lhs, rhs, ..
                } => match (is_bound(lhs, b), is_bound(rhs, b)) {
                    (true, true) if is_bound(result, b) => return Ok(Some(Step::Filter(i))),
                    (true, true) => 1,
                    _ => {
                        stuck = Some(i);
                        continue;
                    }
                },
                CLit::Int(t) => {
                    if is_bound(t, b) {
                        return Ok(Some(Step::Filter(i)));
                    }
                    self.mode.int_bound.max(0) as usize + 1
                }
                CLit::NotBuiltin(inner) => {
                    if builtin_terms(inner).iter().all(|t| is_bound(t, b)) {
                        return Ok(Some(Step::Filter(i)));
                    }
                    stuck = Some(i);
                    continue;
                }
            };
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((i, cost));
            }
        }
        match (best, stuck) {
            (Some((i, _)), _) => Ok(Some(Step::Bind(i))),
            (None, Some(i)) => Err(UnboundVariable(self.unbound_in(&self.lits[i]))),
            (None, None) => Ok(None),
        }
    }

    fn unbound_in(&self, l: &CLit) -> String {
        let terms: Vec<&CTerm> = match l {
            CLit::Scan { args, .. } | CLit::Absent { args, .. } => args.iter().collect(),
            CLit::NotBuiltin(inner) => builtin_terms(inner),
            other => builtin_terms(other),
        };
        terms
            .iter()
            .find_map(|t| match t {
                CTerm::Var(i) if self.binding[*i].is_none() => Some(format!("#{i}")),
                CTerm::Anon => Some("_".into()),
                _ => None,
            })
            .unwrap_or_default()
    }

    fn filter(&self, l: &CLit) -> bool {
        let b = &self.binding;
        match l {
            CLit::Scan { pred, args } => {
                let t: Vec<Value> = args.iter().map(|a| value(a, b).unwrap().clone()).collect();
                self.pos.contains(*pred, &t)
            }
            CLit::Absent { pred, args } => {
                if args.iter().all(|a| is_bound(a, b)) {
                    let t: Vec<Value> = args.iter().map(|a| value(a, b).unwrap().clone()).collect();
                    !self.neg.contains(*pred, &t)
                } else {
                    !self.neg.scan(*pred).iter().any(|t| matches(args, t, b))
                }
            }
            CLit::NotBuiltin(inner) => ground_builtin(inner, b, self.mode) == Some(false),
            other => ground_builtin(other, b, self.mode) == Some(true),
        }
    }

    fn bind_term(&mut self, t: &CTerm, v: Value, newly: &mut Vec<usize>) -> bool {
        match t {
            CTerm::Var(i) => match &self.binding[*i] {
                Some(x) => *x == v,
                None => {
                    self.binding[*i] = Some(v);
                    newly.push(*i);
                    true
                }
            },
            CTerm::Const(c) => *c == v,
            CTerm::Anon => true,
        }
    }

    fn undo(&mut self, newly: &mut Vec<usize>) {
        for i in newly.drain(..) {
            self.binding[i] = None;
        }
    }

    fn run(
        &mut self,
        f: &mut dyn FnMut(&Binding) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>, UnboundVariable> {
        let step = match self.choose()? {
            None => return Ok(f(&self.binding)),
            Some(s) => s,
        };
        let i = match step {
            Step::Filter(i) => {
                if !self.filter(&self.lits[i]) {
                    return Ok(ControlFlow::Continue(()));
                }
                self.used[i] = true;
                let r = self.run(f);
                self.used[i] = false;
                return r;
            }
            Step::Bind(i) => i,
        };
        self.used[i] = true;
        let lits = self.lits;
        let mut newly = Vec::new();
        let mut out = Ok(ControlFlow::Continue(()));
        match &lits[i] {
            CLit::Scan { pred, args } => {
                let pos = self.pos;
                for t in pos.scan(*pred) {
                    if !matches(args, t, &self.binding) {
                        continue;
                    }
                    let mut ok = true;
                    for (a, v) in args.iter().zip(t) {
                        ok &= self.bind_term(a, v.clone(), &mut newly);
                    }
                    if ok {
                        out = self.run(f);
                    }
                    self.undo(&mut newly);
                    if !matches!(out, Ok(ControlFlow::Continue(()))) {
                        break;
                    }
                }
            }
            CLit::Cmp(_, x, y) => {
                let (from, to) = if is_bound(x, &self.binding) {
                    (x, y)
                } else {
                    (y, x)
                };
                let v = value(from, &self.binding).unwrap().clone();
                if self.bind_term(to, v, &mut newly) {
                    out = self.run(f);
                }
                self.undo(&mut newly);
            }
            CLit::Arith {
                result,
                op,
                lhs,
                rhs,
            } => {
                let x = value(lhs, &self.binding).unwrap().as_int();
                let y = value(rhs, &self.binding).unwrap().as_int();
                if let (Some(x), Some(y)) = (x, y) {
                    if let Some(r) = eval_arith(*op, x, y, self.mode) {
                        if self.bind_term(result, Value::Int(r), &mut newly) {
                            out = self.run(f);
                        }
                        self.undo(&mut newly);
                    }
                }
            }
            CLit::Int(t) => {
                for k in 0..=self.mode.int_bound {
                    if self.bind_term(t, Value::Int(k), &mut newly) {
                        out = self.run(f);
                    }
                    self.undo(&mut newly);
                    if !matches!(out, Ok(ControlFlow::Continue(()))) {
                        break;
                    }
                }
            }
            CLit::Absent { .. } | CLit::NotBuiltin(_) => {
                unreachable!("filters are never chosen to bind")
            }
        }
        self.used[i] = false;
        out
    }
}

fn builtin_terms(l: &CLit) -> Vec<&CTerm> {
    match l {
        CLit::Cmp(_, x, y) => vec![x, y],
        CLit::Arith {
            result, lhs, rhs, ..
        } => vec![result, lhs, rhs],
        CLit::Int(t) => vec![t],
        _ => Vec::new(),
    }
}

/// Enumerates every binding of `nvars` variables satisfying all `lits`.
/// Positive literals read `pos`, default-negated ones read `neg`.
/// Variables the body does not bind stay `None`.
pub fn join(
    lits: &[CLit],
    nvars: usize,
    pos: &dyn Db,
    neg: &dyn Db,
    mode: ArithMode,
    f: &mut dyn FnMut(&[Option<Value>]) -> ControlFlow<()>,
) -> Result<(), UnboundVariable> {
    join_from(lits, vec![None; nvars], pos, neg, mode, f)
}

/// As [`join`], starting from a partial binding.
pub fn join_from(
    lits: &[CLit],
    binding: Vec<Option<Value>>,
    pos: &dyn Db,
    neg: &dyn Db,
    mode: ArithMode,
    f: &mut dyn FnMut(&[Option<Value>]) -> ControlFlow<()>,
) -> Result<(), UnboundVariable> {
    let mut j = Join {
        lits,
        pos,
        neg,
        mode,
        used: vec![false; lits.len()],
        binding,
    };
    j.run(&mut |b| f(b)).map(|_| ())
}

/// Instantiates compiled arguments under a complete binding.
pub fn instantiate(args: &[CTerm], b: &[Option<Value>]) -> Option<Tuple> {
    args.iter()
        .map(|a| match a {
            CTerm::Var(i) => b[*i].clone(),
            CTerm::Const(c) => Some(c.clone()),
            CTerm::Anon => None,
        })
        .collect()
}
