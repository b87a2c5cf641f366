//! Expansion of `inertial`, `default`, `total`, `forbidden` and
//! `nonexecutable` into plain causation rules. `noConcurrency` stays a flag
//! because it ranges over legal action instances; the grounder expands it.

use super::ast::*;
use super::ParseError;

fn not_lit(l: &ClassicalLit) -> BodyLit {
    BodyLit::not(Lit::Classical(l.clone()))
}

fn caused(head: Option<ClassicalLit>, post: Vec<BodyLit>, pre: Vec<BodyLit>) -> Statement {
    Statement::Caused(CausationRule { head, post, pre })
}

fn expand_one(st: &Statement, out: &mut Vec<Statement>) -> Result<(), ParseError> {
    match st {
        Statement::Caused(_) | Statement::Executable(_) => out.push(st.clone()),
        Statement::Inertial { lit, post, pre } => {
            let mut p = vec![not_lit(&lit.complement())];
            p.extend(post.iter().cloned());
            let mut a = vec![BodyLit::classical(lit.clone())];
            a.extend(pre.iter().cloned());
            out.push(caused(Some(lit.clone()), p, a));
        }
        Statement::Default { lit, post, pre } => {
            let mut p = vec![not_lit(&lit.complement())];
            p.extend(post.iter().cloned());
            out.push(caused(Some(lit.clone()), p, pre.clone()));
        }
        Statement::Total { lit, post, pre } => {
            if lit.negative {
                return Err(ParseError::TotalOnNegative {
                    lit: lit.to_string(),
                });
            }
            for l in [lit.clone(), lit.complement()] {
                let mut p = vec![not_lit(&l.complement())];
                p.extend(post.iter().cloned());
                out.push(caused(Some(l), p, pre.clone()));
            }
        }
        Statement::Forbidden { post, pre } => out.push(caused(None, post.clone(), pre.clone())),
        Statement::Nonexecutable { action, pre } => {
            let mut a = vec![BodyLit::classical(ClassicalLit::pos(action.clone()))];
            a.extend(pre.iter().cloned());
            out.push(caused(None, Vec::new(), a));
        }
    }
    Ok(())
}

/// Replaces every macro by its definition. Idempotent.
pub fn expand_macros(p: &Program) -> Result<Program, ParseError> {
    let mut q = p.clone();
    for (src, dst) in [(&p.initially, &mut q.initially), (&p.always, &mut q.always)] {
        dst.clear();
        for st in src {
            expand_one(st, dst)?;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn expand(src: &str) -> String {
        let p = parse_program(&[src]).unwrap();
        let q = expand_macros(&p).unwrap();
        q.always
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    const DECLS: &str = "person(joe). person(jack).\n\
        differentSides(X,Y) :- person(X), person(Y).\n\
        fluents: across(X) requires person(X). hasLamp(X) requires person(X). f.\n\
        actions: takeLamp(X) requires person(X).\n";

    #[test]
    fn inertial() {
        let src = format!("{DECLS} always: inertial across(X).");
        assert_eq!(
            expand(&src),
            "caused across(X) if not -across(X) after across(X)."
        );
    }

    #[test]
    fn nonexecutable() {
        let src = format!(
            "{DECLS} always: nonexecutable takeLamp(X) if hasLamp(Y), differentSides(X,Y)."
        );
        assert_eq!(
            expand(&src),
            "caused false after takeLamp(X), hasLamp(Y), differentSides(X,Y)."
        );
    }

    #[test]
    fn default_and_total() {
        assert_eq!(
            expand(&format!("{DECLS} always: default f.")),
            "caused f if not -f."
        );
        assert_eq!(
            expand(&format!("{DECLS} always: total f.")),
            "caused f if not -f. caused -f if not f."
        );
    }

    #[test]
    fn total_on_negative_literal_is_rejected() {
        let p = parse_program(&[format!("{DECLS} always: total -f.")]).unwrap();
        assert!(matches!(
            expand_macros(&p),
            Err(ParseError::TotalOnNegative { .. })
        ));
    }

    #[test]
    fn forbidden_keeps_both_parts() {
        assert_eq!(
            expand(&format!("{DECLS} always: forbidden f after takeLamp(joe).")),
            "caused false if f after takeLamp(joe)."
        );
    }
}
