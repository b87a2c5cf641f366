//! Checks that run right after parsing: arities, symbol kinds, and the
//! placement of fluent, action and type literals.

use std::collections::{BTreeSet, HashMap};

use super::ast::*;
use super::ParseError;

struct Checker<'a> {
    prog: &'a Program,
    arity: HashMap<&'a str, usize>,
    defined_types: BTreeSet<&'a str>,
}

pub(super) fn check(prog: &Program) -> Result<(), ParseError> {
    let mut c = Checker {
        prog,
        arity: HashMap::new(),
        defined_types: prog
            .background
            .iter()
            .map(|r| r.head.atom.pred.as_str())
            .collect(),
    };
    c.declarations()?;
    for r in &prog.background {
        c.atom(&r.head.atom)?;
        for b in &r.body {
            c.lit(&b.lit)?;
            if let Lit::Classical(l) = &b.lit {
                if prog.kind_of(&l.atom.pred) != SymbolKind::Type {
                    return Err(misplaced("fluent or action literal in background", r));
                }
            }
        }
    }
    for st in &prog.initially {
        c.statement(st, true)?;
    }
    for st in &prog.always {
        c.statement(st, false)?;
    }
    if let Some(q) = &prog.query {
        for g in q.goal_pos.iter().chain(&q.goal_neg) {
            c.atom(&g.atom)?;
            if prog.kind_of(&g.atom.pred) != SymbolKind::Fluent {
                return Err(misplaced("goal literal is not a fluent", q));
            }
        }
    }
    Ok(())
}

fn misplaced(message: &str, context: &impl std::fmt::Display) -> ParseError {
    ParseError::Misplaced {
        message: message.into(),
        context: context.to_string(),
    }
}

impl<'a> Checker<'a> {
    fn atom(&mut self, a: &'a Atom) -> Result<(), ParseError> {
        match self.arity.get(a.pred.as_str()) {
            Some(&n) if n != a.arity() => Err(ParseError::ArityClash {
                pred: a.pred.clone(),
                first: n,
                second: a.arity(),
            }),
            Some(_) => Ok(()),
            None => {
                self.arity.insert(&a.pred, a.arity());
                Ok(())
            }
        }
    }

    fn lit(&mut self, l: &'a Lit) -> Result<(), ParseError> {
        match l {
            Lit::Classical(c) => self.atom(&c.atom),
            Lit::Builtin(_) => Ok(()),
        }
    }

    fn declarations(&mut self) -> Result<(), ParseError> {
        let prog = self.prog;
        let mut seen: HashMap<&str, SymbolKind> = HashMap::new();
        let decls = prog
            .fluents
            .iter()
            .map(|d| {
                (
                    SymbolKind::Fluent,
                    &d.name,
                    d.params.len(),
                    &d.requires,
                    None,
                )
            })
            .chain(prog.actions.iter().map(|d| {
                (
                    SymbolKind::Action,
                    &d.name,
                    d.params.len(),
                    &d.requires,
                    Some(&d.cost_where),
                )
            }));
        for (kind, name, arity, requires, cost_where) in decls {
            if let Some(&first) = seen.get(name.as_str()) {
                if first == kind {
                    return Err(ParseError::Misplaced {
                        message: "duplicate declaration".into(),
                        context: name.clone(),
                    });
                }
                return Err(ParseError::KindClash {
                    name: name.clone(),
                    first,
                    second: kind,
                });
            }
            if self.defined_types.contains(name.as_str()) {
                return Err(ParseError::KindClash {
                    name: name.clone(),
                    first: SymbolKind::Type,
                    second: kind,
                });
            }
            seen.insert(name, kind);
            self.arity.insert(name, arity);
            for l in requires.iter().chain(cost_where.into_iter().flatten()) {
                self.type_lit(l, name)?;
            }
        }
        Ok(())
    }

    /// A literal that must be a background type or a built-in.
    fn type_lit(&mut self, l: &'a Lit, context: &str) -> Result<(), ParseError> {
        self.lit(l)?;
        if let Lit::Classical(c) = l {
            if self.prog.kind_of(&c.atom.pred) != SymbolKind::Type {
                return Err(ParseError::Misplaced {
                    message: format!("`{}` is not a type", c.atom.pred),
                    context: context.into(),
                });
            }
            self.defined(c, context)?;
        }
        Ok(())
    }

    fn defined(&self, c: &ClassicalLit, context: &str) -> Result<(), ParseError> {
        if self.prog.kind_of(&c.atom.pred) == SymbolKind::Type
            && !self.defined_types.contains(c.atom.pred.as_str())
        {
            return Err(ParseError::Undeclared {
                pred: c.atom.pred.clone(),
                context: context.into(),
            });
        }
        Ok(())
    }

    /// Checks a body. Action literals are allowed only when `actions` holds.
    fn body(&mut self, body: &'a [BodyLit], actions: bool, ctx: &str) -> Result<(), ParseError> {
        for b in body {
            self.lit(&b.lit)?;
            if let Lit::Classical(c) = &b.lit {
                self.defined(c, ctx)?;
                if self.prog.kind_of(&c.atom.pred) == SymbolKind::Action {
                    if !actions {
                        return Err(misplaced("action literal in an if-part", &ctx));
                    }
                    if c.negative {
                        return Err(misplaced("strongly negated action", &ctx));
                    }
                }
            }
        }
        Ok(())
    }

    fn fluent_lit(&mut self, l: &'a ClassicalLit, ctx: &str) -> Result<(), ParseError> {
        self.atom(&l.atom)?;
        if self.prog.kind_of(&l.atom.pred) != SymbolKind::Fluent {
            return Err(ParseError::Undeclared {
                pred: l.atom.pred.clone(),
                context: ctx.into(),
            });
        }
        Ok(())
    }

    fn action_atom(&mut self, a: &'a Atom, ctx: &str) -> Result<(), ParseError> {
        self.atom(a)?;
        if self.prog.kind_of(&a.pred) != SymbolKind::Action {
            return Err(ParseError::Undeclared {
                pred: a.pred.clone(),
                context: ctx.into(),
            });
        }
        Ok(())
    }

    fn statement(&mut self, st: &'a Statement, initially: bool) -> Result<(), ParseError> {
        let ctx = st.to_string();
        let no_after = |pre: &[BodyLit]| {
            if initially && !pre.is_empty() {
                Err(misplaced("after-part in the initially section", &ctx))
            } else {
                Ok(())
            }
        };
        match st {
            Statement::Caused(r) => {
                if let Some(h) = &r.head {
                    self.fluent_lit(h, &ctx)?;
                }
                no_after(&r.pre)?;
                self.body(&r.post, false, &ctx)?;
                self.body(&r.pre, true, &ctx)?;
            }
            Statement::Inertial { lit, post, pre }
            | Statement::Default { lit, post, pre }
            | Statement::Total { lit, post, pre } => {
                self.fluent_lit(lit, &ctx)?;
                no_after(pre)?;
                self.body(post, false, &ctx)?;
                self.body(pre, true, &ctx)?;
            }
            Statement::Forbidden { post, pre } => {
                no_after(pre)?;
                self.body(post, false, &ctx)?;
                self.body(pre, true, &ctx)?;
            }
            Statement::Executable(ExecCondition { action, pre })
            | Statement::Nonexecutable { action, pre } => {
                if initially {
                    return Err(misplaced(
                        "executability statement in the initially section",
                        &ctx,
                    ));
                }
                self.action_atom(action, &ctx)?;
                self.body(pre, true, &ctx)?;
            }
        }
        Ok(())
    }
}
