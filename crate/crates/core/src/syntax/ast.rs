//! Abstract syntax of K^c programs and their background knowledge.

use std::collections::BTreeSet;
use std::fmt;

/// Name of the distinguished variable that refers to the current plan step
/// inside action cost expressions.
pub const TIME: &str = "time";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// `_`, a fresh variable at every occurrence.
    Anon,
    Sym(String),
    Int(i64),
    /// The reserved `time` variable of cost declarations.
    Time,
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Anon | Term::Time)
    }

    pub fn var_name(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Time => Some(TIME),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }
}

/// An atom or its strong negation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassicalLit {
    pub negative: bool,
    pub atom: Atom,
}

impl ClassicalLit {
    pub fn pos(atom: Atom) -> Self {
        ClassicalLit {
            negative: false,
            atom,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        ClassicalLit {
            negative: true,
            atom,
        }
    }

    pub fn complement(&self) -> Self {
        ClassicalLit {
            negative: !self.negative,
            atom: self.atom.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Cmp(CmpOp, Term, Term),
    /// `result = lhs op rhs`
    Arith {
        result: Term,
        op: ArithOp,
        lhs: Term,
        rhs: Term,
    },
    /// `#int(X)`: the integers `0..=N` for the configured bound `N`.
    Int(Term),
}

impl Builtin {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Builtin::Cmp(_, a, b) => vec![a, b],
            Builtin::Arith {
                result, lhs, rhs, ..
            } => vec![result, lhs, rhs],
            Builtin::Int(t) => vec![t],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lit {
    Classical(ClassicalLit),
    Builtin(Builtin),
}

impl Lit {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Lit::Classical(c) => c.atom.args.iter().collect(),
            Lit::Builtin(b) => b.terms(),
        }
    }

    pub fn classical(&self) -> Option<&ClassicalLit> {
        match self {
            Lit::Classical(c) => Some(c),
            Lit::Builtin(_) => None,
        }
    }
}

/// A body literal, optionally under default negation (`not`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BodyLit {
    pub naf: bool,
    pub lit: Lit,
}

impl BodyLit {
    pub fn pos(lit: Lit) -> Self {
        BodyLit { naf: false, lit }
    }

    pub fn not(lit: Lit) -> Self {
        BodyLit { naf: true, lit }
    }

    pub fn classical(c: ClassicalLit) -> Self {
        BodyLit::pos(Lit::Classical(c))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.lit.terms().into_iter().filter_map(|t| t.var_name())
    }
}

/// A rule of the background knowledge: `head :- body.`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DatalogRule {
    pub head: ClassicalLit,
    pub body: Vec<BodyLit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FluentDecl {
    pub name: String,
    pub params: Vec<String>,
    pub requires: Vec<Lit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionDecl {
    pub name: String,
    pub params: Vec<String>,
    pub requires: Vec<Lit>,
    /// `None` when the declaration has no costs part.
    pub cost: Option<Term>,
    pub cost_where: Vec<Lit>,
}

impl ActionDecl {
    pub fn atom(&self) -> Atom {
        Atom::new(
            self.name.clone(),
            self.params.iter().cloned().map(Term::Var).collect(),
        )
    }

    pub fn has_costs(&self) -> bool {
        self.cost.is_some()
    }

    /// Whether the cost term or the where-part refers to `time`.
    pub fn mentions_time(&self) -> bool {
        self.cost == Some(Term::Time)
            || self
                .cost_where
                .iter()
                .any(|l| l.terms().iter().any(|t| **t == Term::Time))
    }

    /// All variable names of the declaration, including `time` when used.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.params.iter().cloned().collect();
        for lit in self.requires.iter().chain(&self.cost_where) {
            for t in lit.terms() {
                if let Some(v) = t.var_name() {
                    out.insert(v.to_string());
                }
            }
        }
        if let Some(t) = &self.cost {
            if let Some(v) = t.var_name() {
                out.insert(v.to_string());
            }
        }
        out
    }
}

impl FluentDecl {
    pub fn atom(&self) -> Atom {
        Atom::new(
            self.name.clone(),
            self.params.iter().cloned().map(Term::Var).collect(),
        )
    }
}

/// `caused head if post after pre.` with `head == None` standing for `false`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CausationRule {
    pub head: Option<ClassicalLit>,
    pub post: Vec<BodyLit>,
    pub pre: Vec<BodyLit>,
}

impl CausationRule {
    pub fn is_static(&self) -> bool {
        self.pre.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExecCondition {
    pub action: Atom,
    pub pre: Vec<BodyLit>,
}

/// A statement of the `initially:` or `always:` section, before macro expansion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statement {
    Caused(CausationRule),
    Executable(ExecCondition),
    Nonexecutable {
        action: Atom,
        pre: Vec<BodyLit>,
    },
    Inertial {
        lit: ClassicalLit,
        post: Vec<BodyLit>,
        pre: Vec<BodyLit>,
    },
    Default {
        lit: ClassicalLit,
        post: Vec<BodyLit>,
        pre: Vec<BodyLit>,
    },
    Total {
        lit: ClassicalLit,
        post: Vec<BodyLit>,
        pre: Vec<BodyLit>,
    },
    Forbidden {
        post: Vec<BodyLit>,
        pre: Vec<BodyLit>,
    },
}

impl Statement {
    pub fn is_macro(&self) -> bool {
        !matches!(self, Statement::Caused(_) | Statement::Executable(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub goal_pos: Vec<ClassicalLit>,
    pub goal_neg: Vec<ClassicalLit>,
    /// `None` when the query leaves the length symbolic, as in `? (l)`.
    pub plan_length: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub background: Vec<DatalogRule>,
    pub fluents: Vec<FluentDecl>,
    pub actions: Vec<ActionDecl>,
    pub initially: Vec<Statement>,
    pub always: Vec<Statement>,
    pub no_concurrency: bool,
    pub query: Option<Query>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Fluent,
    Action,
    Type,
}

impl Program {
    pub fn fluent_decl(&self, name: &str) -> Option<&FluentDecl> {
        self.fluents.iter().find(|d| d.name == name)
    }

    pub fn action_decl(&self, name: &str) -> Option<&ActionDecl> {
        self.actions.iter().find(|d| d.name == name)
    }

    /// Classifies a predicate name: declared fluents and actions, everything
    /// else belongs to the background.
    pub fn kind_of(&self, pred: &str) -> SymbolKind {
        if self.fluent_decl(pred).is_some() {
            SymbolKind::Fluent
        } else if self.action_decl(pred).is_some() {
            SymbolKind::Action
        } else {
            SymbolKind::Type
        }
    }

    pub fn is_dynamic_lit(&self, lit: &Lit) -> bool {
        match lit {
            Lit::Classical(c) => self.kind_of(&c.atom.pred) != SymbolKind::Type,
            Lit::Builtin(_) => false,
        }
    }

    /// Every declared or defined predicate name.
    pub fn symbols(&self) -> BTreeSet<(SymbolKind, String)> {
        let mut out = BTreeSet::new();
        for f in &self.fluents {
            out.insert((SymbolKind::Fluent, f.name.clone()));
        }
        for a in &self.actions {
            out.insert((SymbolKind::Action, a.name.clone()));
        }
        for r in &self.background {
            out.insert((SymbolKind::Type, r.head.atom.pred.clone()));
        }
        out
    }

    /// Symbolic constants in order of first occurrence, background first.
    pub fn constants(&self) -> Vec<&str> {
        fn terms<'a>(ts: Vec<&'a Term>, out: &mut Vec<&'a str>) {
            for t in ts {
                if let Term::Sym(s) = t {
                    out.push(s.as_str());
                }
            }
        }
        fn lits(b: &[BodyLit]) -> Vec<&Term> {
            b.iter().flat_map(|l| l.lit.terms()).collect()
        }
        let mut out = Vec::new();
        for r in &self.background {
            terms(r.head.atom.args.iter().collect(), &mut out);
            terms(lits(&r.body), &mut out);
        }
        for d in &self.fluents {
            terms(
                d.requires.iter().flat_map(|l| l.terms()).collect(),
                &mut out,
            );
        }
        for d in &self.actions {
            terms(
                d.requires.iter().flat_map(|l| l.terms()).collect(),
                &mut out,
            );
            terms(d.cost.iter().collect(), &mut out);
            terms(
                d.cost_where.iter().flat_map(|l| l.terms()).collect(),
                &mut out,
            );
        }
        for st in self.initially.iter().chain(&self.always) {
            let (head, post, pre): (Option<&Atom>, &[BodyLit], &[BodyLit]) = match st {
                Statement::Caused(r) => (r.head.as_ref().map(|h| &h.atom), &r.post, &r.pre),
                Statement::Executable(e) => (Some(&e.action), &[], &e.pre),
                Statement::Nonexecutable { action, pre } => (Some(action), &[], pre),
                Statement::Inertial { lit, post, pre }
                | Statement::Default { lit, post, pre }
                | Statement::Total { lit, post, pre } => (Some(&lit.atom), post, pre),
                Statement::Forbidden { post, pre } => (None, post, pre),
            };
            if let Some(a) = head {
                terms(a.args.iter().collect(), &mut out);
            }
            terms(lits(post), &mut out);
            terms(lits(pre), &mut out);
        }
        if let Some(q) = &self.query {
            for l in q.goal_pos.iter().chain(&q.goal_neg) {
                terms(l.atom.args.iter().collect(), &mut out);
            }
        }
        out
    }

    /// The program with every cost part removed.
    pub fn without_costs(&self) -> Program {
        let mut p = self.clone();
        for a in &mut p.actions {
            a.cost = None;
            a.cost_where.clear();
        }
        p
    }
}

impl PartialOrd for SymbolKind {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SymbolKind {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Fluent => "fluent",
            SymbolKind::Action => "action",
            SymbolKind::Type => "type",
        })
    }
}
