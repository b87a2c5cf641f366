//! Canonical text form of programs. The output re-parses to an equal `Program`.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;

fn join<T: Display>(f: &mut Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Anon => f.write_str("_"),
            Term::Sym(s) => f.write_str(s),
            Term::Int(i) => write!(f, "{i}"),
            Term::Time => f.write_str(TIME),
        }
    }
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_char('(')?;
            join(f, &self.args, ",")?;
            f.write_char(')')?;
        }
        Ok(())
    }
}

impl Display for ClassicalLit {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_char('-')?;
        }
        write!(f, "{}", self.atom)
    }
}

impl Display for Builtin {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Builtin::Arith {
                result,
                op,
                lhs,
                rhs,
            } => write!(f, "{result} = {lhs} {} {rhs}", op.symbol()),
            Builtin::Int(t) => write!(f, "#int({t})"),
        }
    }
}

impl Display for Lit {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Classical(c) => write!(f, "{c}"),
            Lit::Builtin(b) => write!(f, "{b}"),
        }
    }
}

impl Display for BodyLit {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.naf {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.lit)
    }
}

impl Display for DatalogRule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            join(f, &self.body, ", ")?;
        }
        f.write_char('.')
    }
}

fn decl_head(f: &mut Formatter<'_>, name: &str, params: &[String]) -> fmt::Result {
    f.write_str(name)?;
    if !params.is_empty() {
        write!(f, "({})", params.join(","))?;
    }
    Ok(())
}

impl Display for FluentDecl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        decl_head(f, &self.name, &self.params)?;
        if !self.requires.is_empty() {
            f.write_str(" requires ")?;
            join(f, &self.requires, ", ")?;
        }
        f.write_char('.')
    }
}

impl Display for ActionDecl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        decl_head(f, &self.name, &self.params)?;
        if !self.requires.is_empty() {
            f.write_str(" requires ")?;
            join(f, &self.requires, ", ")?;
        }
        if let Some(c) = &self.cost {
            write!(f, " costs {c}")?;
            if !self.cost_where.is_empty() {
                f.write_str(" where ")?;
                join(f, &self.cost_where, ", ")?;
            }
        }
        f.write_char('.')
    }
}

fn if_after(f: &mut Formatter<'_>, post: &[BodyLit], pre: &[BodyLit]) -> fmt::Result {
    if !post.is_empty() {
        f.write_str(" if ")?;
        join(f, post, ", ")?;
    }
    if !pre.is_empty() {
        f.write_str(" after ")?;
        join(f, pre, ", ")?;
    }
    Ok(())
}

impl Display for CausationRule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("caused ")?;
        match &self.head {
            Some(h) => write!(f, "{h}")?,
            None => f.write_str("false")?,
        }
        if_after(f, &self.post, &self.pre)?;
        f.write_char('.')
    }
}

impl Display for ExecCondition {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "executable {}", self.action)?;
        if !self.pre.is_empty() {
            f.write_str(" if ")?;
            join(f, &self.pre, ", ")?;
        }
        f.write_char('.')
    }
}

impl Display for Statement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Caused(r) => write!(f, "{r}"),
            Statement::Executable(e) => write!(f, "{e}"),
            Statement::Nonexecutable { action, pre } => {
                write!(f, "nonexecutable {action}")?;
                if !pre.is_empty() {
                    f.write_str(" if ")?;
                    join(f, pre, ", ")?;
                }
                f.write_char('.')
            }
            Statement::Inertial { lit, post, pre } => {
                write!(f, "inertial {lit}")?;
                if_after(f, post, pre)?;
                f.write_char('.')
            }
            Statement::Default { lit, post, pre } => {
                write!(f, "default {lit}")?;
                if_after(f, post, pre)?;
                f.write_char('.')
            }
            Statement::Total { lit, post, pre } => {
                write!(f, "total {lit}")?;
                if_after(f, post, pre)?;
                f.write_char('.')
            }
            Statement::Forbidden { post, pre } => {
                f.write_str("forbidden")?;
                if !post.is_empty() {
                    f.write_char(' ')?;
                    join(f, post, ", ")?;
                }
                if !pre.is_empty() {
                    f.write_str(" after ")?;
                    join(f, pre, ", ")?;
                }
                f.write_char('.')
            }
        }
    }
}

impl Display for Query {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for g in &self.goal_pos {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{g}")?;
        }
        for g in &self.goal_neg {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "not {g}")?;
        }
        match self.plan_length {
            Some(l) => write!(f, " ? ({l})"),
            None => f.write_str(" ? (l)"),
        }
    }
}

fn section<T: Display>(f: &mut Formatter<'_>, name: &str, items: &[T]) -> fmt::Result {
    if items.is_empty() {
        return Ok(());
    }
    writeln!(f, "{name}:")?;
    for it in items {
        writeln!(f, "    {it}")?;
    }
    writeln!(f)
}

impl Display for Program {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for r in &self.background {
            writeln!(f, "{r}")?;
        }
        if !self.background.is_empty() {
            writeln!(f)?;
        }
        section(f, "fluents", &self.fluents)?;
        section(f, "actions", &self.actions)?;
        section(f, "initially", &self.initially)?;
        section(f, "always", &self.always)?;
        if self.no_concurrency {
            writeln!(f, "noConcurrency.")?;
            writeln!(f)?;
        }
        if let Some(q) = &self.query {
            writeln!(f, "goal: {q}")?;
        }
        Ok(())
    }
}

impl Program {
    /// Renders only the background rules, in the form of a `.bk` file.
    pub fn background_text(&self) -> String {
        let mut s = String::new();
        for r in &self.background {
            let _ = writeln!(s, "{r}");
        }
        s
    }

    /// Renders everything except the background, in the form of a `.plan` file.
    pub fn plan_text(&self) -> String {
        let mut p = self.clone();
        p.background.clear();
        p.to_string()
    }
}
