//! Disjunctive logic programs with weak constraints: rules, printer and a
//! reader for the printed form.

use std::fmt::{self, Display, Formatter};

use crate::syntax::lexer::Tok;
use crate::syntax::parser::Cursor;
use crate::syntax::{Atom, BodyLit, ClassicalLit, ParseError, Term};

/// `h1 v ... v hn :- body.`; a strong constraint when the head is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRule {
    pub head: Vec<ClassicalLit>,
    pub body: Vec<BodyLit>,
}

/// `:~ body. [weight:]`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakConstraint {
    pub body: Vec<BodyLit>,
    pub weight: Term,
}

/// `minimize[occurs : cost = weight].`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimize {
    pub occurs: Atom,
    pub cost: Atom,
    pub weight: Term,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LpProgram {
    pub rules: Vec<LpRule>,
    pub weak: Vec<WeakConstraint>,
    /// Present in the minimize-style variant; `None` inside means an empty
    /// set.
    pub minimize: Option<Option<Minimize>>,
}

fn join<T: Display>(f: &mut Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl Display for LpRule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        join(f, &self.head, " v ")?;
        if !self.body.is_empty() {
            f.write_str(if self.head.is_empty() { ":- " } else { " :- " })?;
            join(f, &self.body, ", ")?;
        }
        f.write_str(".")
    }
}

impl Display for WeakConstraint {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(":~ ")?;
        join(f, &self.body, ", ")?;
        write!(f, ". [{}:]", self.weight)
    }
}

impl Display for Minimize {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "minimize[{} : {} = {}].",
            self.occurs, self.cost, self.weight
        )
    }
}

impl Display for LpProgram {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        for w in &self.weak {
            writeln!(f, "{w}")?;
        }
        match &self.minimize {
            Some(Some(m)) => writeln!(f, "{m}"),
            Some(None) => writeln!(f, "minimize[]."),
            None => Ok(()),
        }
    }
}

/// Reads the printed form of a program back.
pub fn parse_lp(text: &str) -> Result<LpProgram, ParseError> {
    let mut c = Cursor::new(text, 0)?;
    let mut p = LpProgram::default();
    while !c.at_end() {
        if c.eat(&Tok::ColonTilde) {
            let body = c.body()?;
            c.expect(Tok::Dot, "`.`")?;
            c.expect(Tok::LBracket, "`[`")?;
            let weight = c.term()?;
            c.expect(Tok::Colon, "`:`")?;
            c.expect(Tok::RBracket, "`]`")?;
            p.weak.push(WeakConstraint { body, weight });
        } else if c.is_keyword("minimize") && c.peek_at(1) == Some(&Tok::LBracket) {
            c.bump();
            c.bump();
            let m = if c.eat(&Tok::RBracket) {
                None
            } else {
                let occurs = c.atom()?;
                c.expect(Tok::Colon, "`:`")?;
                let cost = c.atom()?;
                c.expect(Tok::Eq, "`=`")?;
                let weight = c.term()?;
                c.expect(Tok::RBracket, "`]`")?;
                Some(Minimize {
                    occurs,
                    cost,
                    weight,
                })
            };
            c.expect(Tok::Dot, "`.`")?;
            p.minimize = Some(m);
        } else {
            let mut head = Vec::new();
            if c.peek() != Some(&Tok::ColonDash) {
                head.push(c.classical()?);
                while c.eat_keyword("v") {
                    head.push(c.classical()?);
                }
            }
            let body = if c.eat(&Tok::ColonDash) {
                c.body()?
            } else {
                Vec::new()
            };
            c.expect(Tok::Dot, "`.`")?;
            p.rules.push(LpRule { head, body });
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "time(0).\n\
                    cross(X,T0) v -cross(X,T0) :- hasLamp(X,T0), person(X), next(T0,T1).\n\
                    :- not goal_reached.\n\
                    cost_finish(T,U) :- finish(T), U = T + 1.\n\
                    :~ cost_cross(X,T,WX). [WX:]\n\
                    minimize[occurs(A,X1,T) : cost(A,X1,T,C) = C].\n";
        let p = parse_lp(text).unwrap();
        assert_eq!(p.rules.len(), 4);
        assert_eq!(p.rules[1].head.len(), 2);
        assert!(p.rules[2].head.is_empty());
        assert_eq!(p.weak.len(), 1);
        assert_eq!(p.to_string(), text);
        assert_eq!(
            parse_lp("minimize[].\n").unwrap().to_string(),
            "minimize[].\n"
        );
    }
}
