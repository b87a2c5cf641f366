//! Translation of planning problems into disjunctive logic programs whose
//! optimal answer sets are the optimal plans.
//!
//! Fluent and action literals get the time point as last argument, every
//! rule is guarded by the type information of its fluents and actions, and
//! each costed action derives a cost atom that one weak constraint charges.
//! The minimize-style variant replaces disjunction by unstratified negation
//! and the weak constraints by one `minimize` directive.

pub mod image;
pub mod lp;

use std::collections::HashSet;

use thiserror::Error;

use crate::syntax::{
    expand_macros, validate, ArithOp, Atom, BodyLit, Builtin, CausationRule, ClassicalLit, CmpOp,
    Diagnostic, ExecCondition, Lit, ParseError, Program, Statement, Term,
};

pub use image::{image_of, trajectory_of_image, weak_cost_of_image, ImageError, TrajectoryImage};
pub use lp::{parse_lp, LpProgram, LpRule, Minimize, WeakConstraint};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("invalid program:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("the program has no goal")]
    NoQuery,
}

fn var(v: &str) -> Term {
    Term::Var(v.to_string())
}

fn pos(a: Atom) -> BodyLit {
    BodyLit::pos(Lit::Classical(ClassicalLit::pos(a)))
}

fn builtin_terms_mut(b: &mut Builtin) -> Vec<&mut Term> {
    match b {
        Builtin::Cmp(_, x, y) => vec![x, y],
        Builtin::Arith {
            result, lhs, rhs, ..
        } => vec![result, lhs, rhs],
        Builtin::Int(t) => vec![t],
    }
}

fn lit_terms_mut(l: &mut Lit) -> Vec<&mut Term> {
    match l {
        Lit::Classical(c) => c.atom.args.iter_mut().collect(),
        Lit::Builtin(b) => builtin_terms_mut(b),
    }
}

fn collect_vars<'a>(lits: impl IntoIterator<Item = &'a Lit>, out: &mut HashSet<String>) {
    for l in lits {
        for t in l.terms() {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        }
    }
}

/// `base`, or `base` with a numeric suffix, avoiding `used`.
fn fresh(base: &str, used: &HashSet<String>) -> String {
    std::iter::once(base.to_string())
        .chain((1..).map(|k| format!("{base}_{k}")))
        .find(|v| !used.contains(v))
        .unwrap()
}

/// Where a rule is placed in time.
#[derive(Clone, Copy)]
enum Stamp<'a> {
    /// Static rule over every time point.
    Static { now: &'a str },
    /// Dynamic rule between consecutive time points.
    Dynamic { before: &'a str, now: &'a str },
    /// A fixed time point: the initial state or the goal.
    At(usize),
}

struct Translator<'a> {
    p: &'a Program,
    /// Every name the program uses as a predicate.
    preds: HashSet<String>,
}

impl<'a> Translator<'a> {
    fn new(p: &'a Program) -> Translator<'a> {
        let mut preds: HashSet<String> = p.fluents.iter().map(|d| d.name.clone()).collect();
        preds.extend(p.actions.iter().map(|d| d.name.clone()));
        preds.extend(p.background.iter().map(|r| r.head.atom.pred.clone()));
        for r in &p.background {
            for b in &r.body {
                if let Lit::Classical(c) = &b.lit {
                    preds.insert(c.atom.pred.clone());
                }
            }
        }
        for n in ["time", "next"] {
            preds.insert(n.to_string());
        }
        Translator { p, preds }
    }

    fn fresh_pred(&mut self, base: &str) -> String {
        let n = fresh(base, &self.preds);
        self.preds.insert(n.clone());
        n
    }

    fn is_dynamic(&self, pred: &str) -> bool {
        self.p.fluent_decl(pred).is_some() || self.p.action_decl(pred).is_some()
    }

    /// The type literals of a fluent or action literal: its `requires`
    /// part with parameters replaced by the arguments. Other variables get
    /// fresh names.
    fn types_of(&self, a: &Atom, used: &mut HashSet<String>) -> Vec<Lit> {
        let (params, requires) = match (self.p.fluent_decl(&a.pred), self.p.action_decl(&a.pred)) {
            (Some(d), _) => (&d.params, &d.requires),
            (_, Some(d)) => (&d.params, &d.requires),
            _ => return Vec::new(),
        };
        let mut local: Vec<(String, String)> = Vec::new();
        requires
            .iter()
            .map(|l| {
                let mut l = l.clone();
                for t in lit_terms_mut(&mut l) {
                    if let Term::Var(v) = t {
                        if let Some(i) = params.iter().position(|x| x == v) {
                            *t = a.args[i].clone();
                        } else {
                            let name = match local.iter().find(|(o, _)| o == v) {
                                Some((_, n)) => n.clone(),
                                None => {
                                    let n = fresh(v, used);
                                    used.insert(n.clone());
                                    local.push((v.clone(), n.clone()));
                                    n
                                }
                            };
                            *t = Term::Var(name);
                        }
                    }
                }
                l
            })
            .collect()
    }

    fn stamp_atom(&self, a: &Atom, t: &Term) -> Atom {
        let mut a = a.clone();
        if self.is_dynamic(&a.pred) {
            a.args.push(t.clone());
        }
        a
    }

    fn stamp_body(&self, lits: &[BodyLit], t: &Term, out: &mut Vec<BodyLit>) {
        for b in lits {
            let mut b = b.clone();
            if let Lit::Classical(c) = &mut b.lit {
                c.atom = self.stamp_atom(&c.atom, t);
            }
            out.push(b);
        }
    }

    /// Type literals for the fluents and actions among `atoms`, without
    /// duplicates.
    fn typing<'b>(
        &self,
        atoms: impl IntoIterator<Item = &'b Atom>,
        used: &mut HashSet<String>,
    ) -> Vec<BodyLit> {
        let mut out: Vec<BodyLit> = Vec::new();
        for a in atoms {
            for l in self.types_of(a, used) {
                let b = BodyLit::pos(l);
                if !out.contains(&b) {
                    out.push(b);
                }
            }
        }
        out
    }

    fn statement_vars(st: &Statement) -> HashSet<String> {
        let mut used = HashSet::new();
        match st {
            Statement::Caused(r) => {
                collect_vars(
                    r.head
                        .iter()
                        .map(|h| Lit::Classical(h.clone()))
                        .collect::<Vec<_>>()
                        .iter(),
                    &mut used,
                );
                collect_vars(r.post.iter().chain(&r.pre).map(|b| &b.lit), &mut used);
            }
            Statement::Executable(e) => {
                collect_vars(
                    [Lit::Classical(ClassicalLit::pos(e.action.clone()))].iter(),
                    &mut used,
                );
                collect_vars(e.pre.iter().map(|b| &b.lit), &mut used);
            }
            _ => {}
        }
        used
    }

    fn causation(&self, r: &CausationRule, initially: bool) -> LpRule {
        let mut used = Self::statement_vars(&Statement::Caused(r.clone()));
        let t0 = fresh("T0", &used);
        used.insert(t0.clone());
        let t1 = fresh("T1", &used);
        used.insert(t1.clone());
        let stamp = if initially {
            Stamp::At(0)
        } else if r.pre.is_empty() {
            Stamp::Static { now: &t1 }
        } else {
            Stamp::Dynamic {
                before: &t0,
                now: &t1,
            }
        };
        let (now, before) = match stamp {
            Stamp::At(k) => (Term::Int(k as i64), Term::Int(k as i64)),
            Stamp::Static { now } => (var(now), var(now)),
            Stamp::Dynamic { before, now } => (var(now), var(before)),
        };
        let head: Vec<ClassicalLit> = r
            .head
            .iter()
            .map(|h| ClassicalLit {
                negative: h.negative,
                atom: self.stamp_atom(&h.atom, &now),
            })
            .collect();
        let mut body = Vec::new();
        self.stamp_body(&r.post, &now, &mut body);
        self.stamp_body(&r.pre, &before, &mut body);
        let atoms: Vec<&Atom> = r
            .head
            .iter()
            .map(|h| &h.atom)
            .chain(r.post.iter().chain(&r.pre).filter_map(|b| match &b.lit {
                Lit::Classical(c) if self.is_dynamic(&c.atom.pred) => Some(&c.atom),
                _ => None,
            }))
            .collect();
        body.extend(self.typing(atoms, &mut used));
        match stamp {
            Stamp::At(_) => {}
            Stamp::Static { now } => body.push(pos(Atom::new("time", vec![var(now)]))),
            Stamp::Dynamic { before, now } => {
                body.push(pos(Atom::new("next", vec![var(before), var(now)])))
            }
        }
        LpRule { head, body }
    }

    /// The guess whether the action happens, its positive and negative
    /// literal, and the shared body.
    fn guess(&self, e: &ExecCondition) -> (ClassicalLit, ClassicalLit, Vec<BodyLit>) {
        let mut used = Self::statement_vars(&Statement::Executable(e.clone()));
        let t0 = fresh("T0", &used);
        used.insert(t0.clone());
        let t1 = fresh("T1", &used);
        used.insert(t1.clone());
        let a = ClassicalLit::pos(self.stamp_atom(&e.action, &var(&t0)));
        let na = ClassicalLit {
            negative: true,
            atom: a.atom.clone(),
        };
        let mut body = Vec::new();
        self.stamp_body(&e.pre, &var(&t0), &mut body);
        let atoms: Vec<&Atom> = std::iter::once(&e.action)
            .chain(e.pre.iter().filter_map(|b| match &b.lit {
                Lit::Classical(c) if self.is_dynamic(&c.atom.pred) => Some(&c.atom),
                _ => None,
            }))
            .collect();
        body.extend(self.typing(atoms, &mut used));
        body.push(pos(Atom::new("next", vec![var(&t0), var(&t1)])));
        (a, na, body)
    }

    /// Pairs of distinct action instances at one time point.
    fn no_concurrency(&self) -> Vec<LpRule> {
        let mut out = Vec::new();
        let acts = &self.p.actions;
        for (i, d) in acts.iter().enumerate() {
            for e in &acts[i..] {
                let xs: Vec<Term> = (1..=d.params.len())
                    .map(|k| var(&format!("X{k}")))
                    .collect();
                let ys: Vec<Term> = (1..=e.params.len())
                    .map(|k| var(&format!("Y{k}")))
                    .collect();
                let a = Atom::new(d.name.clone(), xs.clone());
                let b = Atom::new(e.name.clone(), ys.clone());
                let mut used: HashSet<String> = HashSet::new();
                for t in xs.iter().chain(&ys) {
                    if let Term::Var(v) = t {
                        used.insert(v.clone());
                    }
                }
                used.insert("T".into());
                let mut body = vec![
                    pos(self.stamp_atom(&a, &var("T"))),
                    pos(self.stamp_atom(&b, &var("T"))),
                ];
                body.extend(self.typing([&a, &b], &mut used));
                if d.name != e.name {
                    out.push(LpRule {
                        head: Vec::new(),
                        body,
                    });
                } else {
                    // Distinct instances differ in some argument.
                    for (x, y) in xs.iter().zip(&ys) {
                        let mut b = body.clone();
                        b.push(BodyLit::pos(Lit::Builtin(Builtin::Cmp(
                            CmpOp::Ne,
                            x.clone(),
                            y.clone(),
                        ))));
                        out.push(LpRule {
                            head: Vec::new(),
                            body: b,
                        });
                    }
                }
            }
        }
        out
    }

    /// Rules shared by both variants: background, time points, causation
    /// rules, initial state, goal and concurrency. The action guesses come
    /// from `guess_rules`.
    fn common(
        &mut self,
        l: usize,
        guess_rules: impl Fn(ClassicalLit, ClassicalLit, Vec<BodyLit>) -> Vec<LpRule>,
    ) -> Result<Vec<LpRule>, TranslateError> {
        let q = self.p.query.as_ref().ok_or(TranslateError::NoQuery)?;
        let mut rules: Vec<LpRule> = self
            .p
            .background
            .iter()
            .map(|r| LpRule {
                head: vec![r.head.clone()],
                body: r.body.clone(),
            })
            .collect();
        for t in 0..=l {
            rules.push(LpRule {
                head: vec![ClassicalLit::pos(Atom::new(
                    "time",
                    vec![Term::Int(t as i64)],
                ))],
                body: Vec::new(),
            });
        }
        for t in 0..l {
            rules.push(LpRule {
                head: vec![ClassicalLit::pos(Atom::new(
                    "next",
                    vec![Term::Int(t as i64), Term::Int(t as i64 + 1)],
                ))],
                body: Vec::new(),
            });
        }
        for st in &self.p.always {
            match st {
                Statement::Caused(r) => rules.push(self.causation(r, false)),
                Statement::Executable(e) => {
                    let (a, na, body) = self.guess(e);
                    rules.extend(guess_rules(a, na, body));
                }
                _ => unreachable!("macros are expanded"),
            }
        }
        for st in &self.p.initially {
            if let Statement::Caused(r) = st {
                rules.push(self.causation(r, true));
            }
        }
        if self.p.no_concurrency {
            rules.extend(self.no_concurrency());
        }
        let goal = self.fresh_pred("goal_reached");
        let at = Term::Int(l as i64);
        let mut body = Vec::new();
        for g in &q.goal_pos {
            body.push(BodyLit::pos(Lit::Classical(ClassicalLit {
                negative: g.negative,
                atom: self.stamp_atom(&g.atom, &at),
            })));
        }
        for g in &q.goal_neg {
            body.push(BodyLit::not(Lit::Classical(ClassicalLit {
                negative: g.negative,
                atom: self.stamp_atom(&g.atom, &at),
            })));
        }
        rules.push(LpRule {
            head: vec![ClassicalLit::pos(Atom::new(goal.clone(), Vec::new()))],
            body,
        });
        rules.push(LpRule {
            head: Vec::new(),
            body: vec![BodyLit::not(Lit::Classical(ClassicalLit::pos(Atom::new(
                goal,
                Vec::new(),
            ))))],
        });
        Ok(rules)
    }
}

/// The cost rule parts of one costed action: the time variable `T`, the
/// cost term with `time` replaced, the where-part with `time` replaced, and
/// the `U = T + 1` literal if `time` occurs.
struct CostParts {
    t: String,
    cost: Term,
    body: Vec<BodyLit>,
}

fn cost_parts(d: &crate::syntax::ActionDecl) -> CostParts {
    let mut used: HashSet<String> = d.params.iter().cloned().collect();
    collect_vars(d.requires.iter().chain(&d.cost_where), &mut used);
    if let Some(Term::Var(v)) = &d.cost {
        used.insert(v.clone());
    }
    let t = fresh("T", &used);
    used.insert(t.clone());
    let u = fresh("U", &used);
    let mut uses_time = false;
    let mut theta = |x: &mut Term| {
        if *x == Term::Time {
            *x = var(&u);
            uses_time = true;
        }
    };
    let mut cost = match d.cost.clone().unwrap() {
        // Non-integer constants cost 0.
        Term::Sym(_) => Term::Int(0),
        c => c,
    };
    theta(&mut cost);
    let mut body: Vec<BodyLit> = d.requires.iter().map(|l| BodyLit::pos(l.clone())).collect();
    for l in &d.cost_where {
        let mut l = l.clone();
        for x in lit_terms_mut(&mut l) {
            theta(x);
        }
        body.push(BodyLit::pos(l));
    }
    if uses_time {
        body.push(BodyLit::pos(Lit::Builtin(Builtin::Arith {
            result: var(&u),
            op: ArithOp::Add,
            lhs: var(&t),
            rhs: Term::Int(1),
        })));
    }
    CostParts { t, cost, body }
}

fn prepare(p: &Program) -> Result<Program, TranslateError> {
    let q = expand_macros(p)?;
    let diags = validate(&q);
    if !diags.is_empty() {
        return Err(TranslateError::Invalid(diags));
    }
    Ok(q)
}

fn params(d: &crate::syntax::ActionDecl) -> Vec<Term> {
    d.params.iter().map(|v| var(v)).collect()
}

/// The program with weak constraints for plan length `l`.
pub fn translate_lpw(p: &Program, l: usize) -> Result<LpProgram, TranslateError> {
    let p = prepare(p)?;
    let mut tr = Translator::new(&p);
    let mut rules = tr.common(l, |a, na, body| {
        vec![LpRule {
            head: vec![a, na],
            body,
        }]
    })?;
    let mut weak = Vec::new();
    for d in p.actions.iter().filter(|d| d.cost.is_some()) {
        let name = tr.fresh_pred(&format!("cost_{}", d.name));
        let c = cost_parts(d);
        let mut args = params(d);
        args.push(var(&c.t));
        let mut head_args = args.clone();
        head_args.push(c.cost.clone());
        let mut body = vec![pos(Atom::new(d.name.clone(), args))];
        body.extend(c.body);
        let head = Atom::new(name, head_args);
        rules.push(LpRule {
            head: vec![ClassicalLit::pos(head.clone())],
            body,
        });
        weak.push(WeakConstraint {
            body: vec![pos(head)],
            weight: c.cost,
        });
    }
    Ok(LpProgram {
        rules,
        weak,
        minimize: None,
    })
}

/// The variant with a `minimize` directive: action names become an
/// argument of shared `cost` and `occurs` predicates, padded with `0` to
/// the largest action arity.
pub fn translate_minimize(p: &Program, l: usize) -> Result<LpProgram, TranslateError> {
    let p = prepare(p)?;
    let mut tr = Translator::new(&p);
    let mut rules = tr.common(l, |a, na, body| {
        let mut b1 = body.clone();
        b1.push(BodyLit::not(Lit::Classical(na.clone())));
        let mut b2 = body;
        b2.push(BodyLit::not(Lit::Classical(a.clone())));
        vec![
            LpRule {
                head: vec![a],
                body: b1,
            },
            LpRule {
                head: vec![na],
                body: b2,
            },
        ]
    })?;
    let arity = p.actions.iter().map(|d| d.params.len()).max().unwrap_or(0);
    let costed: Vec<_> = p.actions.iter().filter(|d| d.cost.is_some()).collect();
    if costed.is_empty() {
        return Ok(LpProgram {
            rules,
            weak: Vec::new(),
            minimize: Some(None),
        });
    }
    let cost = tr.fresh_pred("cost");
    let occurs = tr.fresh_pred("occurs");
    for d in costed {
        let c = cost_parts(d);
        let mut args = vec![Term::Sym(d.name.clone())];
        args.extend(params(d));
        args.extend(std::iter::repeat_n(Term::Int(0), arity - d.params.len()));
        args.push(var(&c.t));
        let mut cost_args = args.clone();
        cost_args.push(c.cost);
        let mut body = c.body;
        // The step variable needs a domain of its own here.
        body.push(pos(Atom::new("time", vec![var(&c.t)])));
        rules.push(LpRule {
            head: vec![ClassicalLit::pos(Atom::new(cost.clone(), cost_args))],
            body,
        });
        let mut own = params(d);
        own.push(var(&c.t));
        let mut body = vec![pos(Atom::new(d.name.clone(), own))];
        body.extend(d.requires.iter().map(|l| BodyLit::pos(l.clone())));
        rules.push(LpRule {
            head: vec![ClassicalLit::pos(Atom::new(occurs.clone(), args))],
            body,
        });
    }
    let mut xs = vec![var("A")];
    xs.extend((1..=arity).map(|k| var(&format!("X{k}"))));
    xs.push(var("T"));
    let mut cs = xs.clone();
    cs.push(var("C"));
    Ok(LpProgram {
        rules,
        weak: Vec::new(),
        minimize: Some(Some(Minimize {
            occurs: Atom::new(occurs, xs),
            cost: Atom::new(cost, cs),
            weight: var("C"),
        })),
    })
}
