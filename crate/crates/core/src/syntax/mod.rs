//! Surface syntax of K^c: lexer, parser, printer, macro expansion and
//! static validation.

pub mod ast;
mod check;
pub(crate) mod lexer;
pub mod macros;
pub(crate) mod parser;
mod printer;
pub mod validate;

use thiserror::Error;

pub use ast::*;
pub use macros::expand_macros;
pub use validate::{validate, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input {input}, line {line}, column {col}: {message}")]
    Syntax {
        /// Index of the text blob in the list given to the parser.
        input: usize,
        line: usize,
        col: usize,
        message: String,
    },
    #[error("`{pred}` is used with arity {first} and with arity {second}")]
    ArityClash {
        pred: String,
        first: usize,
        second: usize,
    },
    #[error("`{name}` is declared both as {first} and as {second}")]
    KindClash {
        name: String,
        first: SymbolKind,
        second: SymbolKind,
    },
    #[error("undeclared predicate `{pred}` in `{context}`")]
    Undeclared { pred: String, context: String },
    #[error("{message} in `{context}`")]
    Misplaced { message: String, context: String },
    #[error("`total` needs a positive fluent literal, found `{lit}`")]
    TotalOnNegative { lit: String },
}

/// Parses and checks a problem given as background and plan sources.
/// Each text starts out in the background section, so a `.bk` file and a
/// `.plan` file can be passed separately or concatenated.
pub fn parse_program<S: AsRef<str>>(texts: &[S]) -> Result<Program, ParseError> {
    let mut prog = Program::default();
    for (i, t) in texts.iter().enumerate() {
        let p = parser::parse_source(t.as_ref(), i)?;
        prog.background.extend(p.background);
        prog.fluents.extend(p.fluents);
        prog.actions.extend(p.actions);
        prog.initially.extend(p.initially);
        prog.always.extend(p.always);
        prog.no_concurrency |= p.no_concurrency;
        if let Some(q) = p.query {
            if prog.query.is_some() {
                return Err(ParseError::Misplaced {
                    message: "second goal query".into(),
                    context: q.to_string(),
                });
            }
            prog.query = Some(q);
        }
    }
    check::check(&prog)?;
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DECLS: &str =
        "q(1).\nfluents: f. g(X) requires q(X). gr.\nactions: a. b(X) requires q(X).\n";

    fn parse(body: &str) -> Result<Program, ParseError> {
        parse_program(&[format!("{DECLS}{body}")])
    }

    #[test]
    fn goal_with_fixed_length() {
        let p = parse("goal: gr? (7)").unwrap();
        let q = p.query.unwrap();
        assert_eq!(q.goal_pos, vec![ClassicalLit::pos(Atom::new("gr", vec![]))]);
        assert_eq!(q.plan_length, Some(7));
    }

    #[test]
    fn cost_declaration() {
        let p = parse_program(&["person(joe). walk(joe,1).\nactions: cross(X) requires person(X) costs WX where walk(X,WX)."]).unwrap();
        let d = &p.actions[0];
        assert_eq!(d.params, vec!["X".to_string()]);
        assert_eq!(d.cost, Some(Term::Var("WX".into())));
        assert_eq!(d.cost_where.len(), 1);
    }

    #[test]
    fn time_is_a_variable_only_in_cost_parts() {
        let p = parse_program(&["actions: finish costs time."]).unwrap();
        assert_eq!(p.actions[0].cost, Some(Term::Time));
        assert!(p.actions[0].mentions_time());
    }

    #[test]
    fn empty_always_section() {
        let p = parse("always:\ngoal: f ? (1)").unwrap();
        assert!(p.always.is_empty());
    }

    #[test]
    fn both_negation_glyphs() {
        let a = parse("initially: -f.").unwrap();
        let b = parse("initially: ¬f.").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_integers_are_rejected() {
        assert!(matches!(
            parse("initially: g(-1)."),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn syntax_error_position() {
        match parse("always: caused f if g(X) after") {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn arity_clash() {
        assert!(matches!(
            parse("always: caused g(1,2)."),
            Err(ParseError::ArityClash { .. })
        ));
    }

    #[test]
    fn undeclared_fluent() {
        assert!(matches!(
            parse("always: caused h."),
            Err(ParseError::Undeclared { .. })
        ));
        assert!(matches!(
            parse("always: caused f if h."),
            Err(ParseError::Undeclared { .. })
        ));
    }

    #[test]
    fn action_and_fluent_names_are_disjoint() {
        let r = parse_program(&["fluents: f.\nactions: f."]);
        assert!(matches!(r, Err(ParseError::KindClash { .. })));
    }

    #[test]
    fn actions_only_in_after_parts() {
        assert!(parse("always: caused f if a.").is_err());
        assert!(parse("always: caused f after a.").is_ok());
        assert!(parse("always: caused f after -a.").is_err());
    }

    #[test]
    fn multiple_executability_statements() {
        let p = parse("always: executable a if f. executable a if g(1).").unwrap();
        assert_eq!(p.always.len(), 2);
    }
}
