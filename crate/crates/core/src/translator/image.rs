//! Images of trajectories as sets of time-stamped literals, and the cost
//! the weak constraints of a translation charge for them.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::background::{BackgroundModel, GroundAtom};
use crate::engine::{
    compile_args, compile_builtin, instantiate, join, ArithMode, CLit, CTerm, Database, Pred,
    SymbolOrder, Value, VarMap,
};
use crate::grounder::{FLit, GroundDomain};
use crate::planner::Trajectory;
use crate::syntax::{Atom, BodyLit, ClassicalLit, Lit, Term};
use crate::transition::{ActionSet, State};

use super::lp::LpProgram;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("weight `{0}` is not an integer")]
    NonInteger(String),
    #[error("variable `{0}` is not bound in `{1}`")]
    Unsafe(String, String),
    #[error("`{0}` is not a time-stamped fluent or action literal of the domain")]
    Foreign(String),
}

/// A set of ground literals `f(t, j)` for fluent literals of state `j` and
/// `a(t, j - 1)` for actions of step `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrajectoryImage {
    pub literals: Vec<ClassicalLit>,
}

fn stamped(a: &GroundAtom, negative: bool, t: usize) -> ClassicalLit {
    let mut args: Vec<Term> = a.args.iter().map(Value::to_term).collect();
    args.push(Term::Int(t as i64));
    ClassicalLit {
        negative,
        atom: Atom::new(a.pred.clone(), args),
    }
}

pub fn image_of(gd: &GroundDomain, t: &Trajectory) -> TrajectoryImage {
    let mut literals = Vec::new();
    let states = std::iter::once(&t.initial).chain(t.transitions.iter().map(|x| &x.to));
    for (j, s) in states.enumerate() {
        for l in s.iter() {
            literals.push(stamped(&gd.fluents[l.fluent() as usize], l.negative(), j));
        }
    }
    for (j, x) in t.transitions.iter().enumerate() {
        for &a in &x.actions.0 {
            literals.push(stamped(&gd.actions[a as usize], false, j));
        }
    }
    TrajectoryImage { literals }
}

/// Recovers the states `s_0..s_l` and action sets `A_1..A_l` of an image.
pub fn trajectory_of_image(
    gd: &GroundDomain,
    image: &TrajectoryImage,
    l: usize,
) -> Result<(Vec<State>, Vec<ActionSet>), ImageError> {
    let mut states = vec![State::empty(gd.num_fluents()); l + 1];
    let mut actions = vec![Vec::new(); l];
    for lit in &image.literals {
        let foreign = || ImageError::Foreign(lit.to_string());
        let mut atom = lit.atom.clone();
        let j = match atom.args.pop() {
            Some(Term::Int(j)) if j >= 0 => j as usize,
            _ => return Err(foreign()),
        };
        let g = GroundAtom::from_lit(&ClassicalLit::pos(atom), &gd.symbols).ok_or_else(foreign)?;
        if let Some(f) = gd.fluent_id(&g) {
            states
                .get_mut(j)
                .ok_or_else(foreign)?
                .insert(FLit::new(f, lit.negative));
        } else if let (Some(a), false) = (gd.action_id(&g), lit.negative) {
            actions.get_mut(j).ok_or_else(foreign)?.push(a);
        } else {
            return Err(foreign());
        }
    }
    Ok((states, actions.into_iter().map(ActionSet::new).collect()))
}

struct Compiled {
    head: Option<(usize, Vec<CTerm>)>,
    body: Vec<CLit>,
    vars: VarMap,
    source: String,
}

fn compile(
    head: Option<&ClassicalLit>,
    body: &[BodyLit],
    db: &mut Database,
    order: &Arc<SymbolOrder>,
    source: String,
) -> Compiled {
    let mut vars = VarMap::new(order);
    let head = head.map(|h| {
        (
            db.id(&Pred::new(&h.atom.pred, h.negative)),
            compile_args(&h.atom.args, &mut vars),
        )
    });
    let body = body
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
    Compiled {
        head,
        body,
        vars,
        source,
    }
}

fn unsafe_var(c: &Compiled, v: String) -> ImageError {
    let name = v
        .strip_prefix('#')
        .and_then(|i| i.parse::<usize>().ok())
        .map(|i| c.vars.name(i).to_string())
        .unwrap_or(v);
    ImageError::Unsafe(name, c.source.clone())
}

fn body_preds(body: &[BodyLit]) -> impl Iterator<Item = (&str, bool)> {
    body.iter().filter_map(|b| match &b.lit {
        Lit::Classical(c) => Some((c.atom.pred.as_str(), c.negative)),
        Lit::Builtin(_) => None,
    })
}

/// The sum of violation values of all weak constraints of `lp` against the
/// image, the background model `m`, and the atoms the rules of `lp` derive
/// from them. Only rules that the weak constraints depend on are evaluated,
/// and the image and `m` are taken as complete for their predicates.
pub fn weak_cost_of_image(
    lp: &LpProgram,
    image: &TrajectoryImage,
    m: &BackgroundModel,
) -> Result<i64, ImageError> {
    let order = m.symbols().clone();
    let mut db = Database::default();
    let mut base: HashSet<(String, bool)> = HashSet::new();
    let mut facts: Vec<GroundAtom> = m.atoms();
    for l in &image.literals {
        facts.push(
            GroundAtom::from_lit(l, &order).ok_or_else(|| ImageError::Foreign(l.to_string()))?,
        );
    }
    for r in lp
        .rules
        .iter()
        .filter(|r| r.body.is_empty() && r.head.len() == 1)
    {
        if let Some(g) = GroundAtom::from_lit(&r.head[0], &order) {
            facts.push(g);
        }
    }
    for g in facts {
        base.insert((g.pred.clone(), g.negative));
        let id = db.id(&Pred::new(&g.pred, g.negative));
        db.insert(id, g.args);
    }

    // Rules that the weak constraints depend on, above the base relations.
    let mut needed: Vec<(String, bool)> = Vec::new();
    for w in &lp.weak {
        needed.extend(body_preds(&w.body).map(|(p, n)| (p.to_string(), n)));
    }
    let mut seen: HashSet<(String, bool)> = HashSet::new();
    let mut rules = Vec::new();
    while let Some(p) = needed.pop() {
        if base.contains(&p) || !seen.insert(p.clone()) {
            continue;
        }
        for r in &lp.rules {
            if r.head.len() == 1
                && r.head[0].atom.pred == p.0
                && r.head[0].negative == p.1
                && !r.body.is_empty()
            {
                needed.extend(body_preds(&r.body).map(|(q, n)| (q.to_string(), n)));
                rules.push(compile(
                    Some(&r.head[0]),
                    &r.body,
                    &mut db,
                    &order,
                    r.to_string(),
                ));
            }
        }
    }

    let mode = ArithMode {
        int_bound: m.int_bound(),
        bounded: false,
    };
    loop {
        let mut new = Vec::new();
        for c in &rules {
            let (head, args) = c.head.as_ref().unwrap();
            join(&c.body, c.vars.len(), &db, &db, mode, &mut |b| {
                if let Some(t) = instantiate(args, b) {
                    if !db.rel(*head).contains(&t) {
                        new.push((*head, t));
                    }
                }
                ControlFlow::Continue(())
            })
            .map_err(|e| unsafe_var(c, e.0))?;
        }
        if new.is_empty() {
            break;
        }
        for (p, t) in new {
            db.insert(p, t);
        }
    }

    let mut total = 0;
    for w in &lp.weak {
        let c = compile(None, &w.body, &mut db, &order, w.to_string());
        let mut vars = c.vars.clone();
        let weight = compile_args(std::slice::from_ref(&w.weight), &mut vars).remove(0);
        let mut seen: HashSet<Vec<Option<Value>>> = HashSet::new();
        let mut err = None;
        join(&c.body, vars.len(), &db, &db, mode, &mut |b| {
            if seen.insert(b.to_vec()) {
                let v = match &weight {
                    CTerm::Var(i) => b[*i].clone(),
                    CTerm::Const(v) => Some(v.clone()),
                    CTerm::Anon => None,
                };
                match v.as_ref().and_then(Value::as_int) {
                    Some(x) => total += x,
                    None => {
                        err = Some(ImageError::NonInteger(format!("{}", w.weight)));
                        return ControlFlow::Break(());
                    }
                }
            }
            ControlFlow::Continue(())
        })
        .map_err(|e| unsafe_var(&c, e.0))?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(total)
}
