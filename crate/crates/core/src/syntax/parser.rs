use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Token cursor shared by the K^c parser and the logic-program reader.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    source: usize,
    /// Inside action declarations `time` denotes the step variable.
    pub time_is_var: bool,
}

impl Cursor {
    pub fn new(src: &str, source: usize) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: tokenize(src, source)?,
            pos: 0,
            source,
            time_is_var: false,
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        ParseError::Syntax {
            input: self.source,
            line,
            col,
            message: message.into(),
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.describe())))
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(w)) if w == kw)
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Ident(w)) | Some(Tok::Var(w)) => format!("`{w}`"),
            Some(Tok::Int(i)) => format!("`{i}`"),
            Some(t) => format!("{t:?}"),
        }
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Some(Tok::Var(v)) => Ok(Term::Var(v)),
            Some(Tok::Anon) => Ok(Term::Anon),
            Some(Tok::Int(i)) => Ok(Term::Int(i)),
            Some(Tok::Ident(w)) if w == TIME && self.time_is_var => Ok(Term::Time),
            Some(Tok::Ident(w)) => Ok(Term::Sym(w)),
            Some(Tok::Minus) if matches!(self.peek(), Some(Tok::Int(_))) => {
                self.pos -= 1;
                Err(self.error("negative integer literals are not allowed"))
            }
            _ => {
                self.pos -= 1;
                Err(self.error(format!("expected a term, found {}", self.describe())))
            }
        }
    }

    pub fn atom(&mut self) -> Result<Atom, ParseError> {
        let pred = match self.bump() {
            Some(Tok::Ident(w)) => w,
            _ => {
                self.pos -= 1;
                return Err(self.error(format!("expected a predicate, found {}", self.describe())));
            }
        };
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(Atom { pred, args })
    }

    pub fn classical(&mut self) -> Result<ClassicalLit, ParseError> {
        let negative = self.eat(&Tok::Minus);
        if negative && matches!(self.peek(), Some(Tok::Int(_))) {
            return Err(self.error("negative integer literals are not allowed"));
        }
        Ok(ClassicalLit {
            negative,
            atom: self.atom()?,
        })
    }

    fn cmp_op(tok: Option<&Tok>) -> Option<CmpOp> {
        Some(match tok? {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            _ => return None,
        })
    }

    fn builtin_rest(&mut self, lhs: Term) -> Result<Builtin, ParseError> {
        let op = Self::cmp_op(self.peek()).ok_or_else(|| {
            self.error(format!("expected a comparison, found {}", self.describe()))
        })?;
        self.pos += 1;
        let rhs = self.term()?;
        if op == CmpOp::Eq {
            let arith = match self.peek() {
                Some(Tok::Plus) => Some(ArithOp::Add),
                Some(Tok::Star) => Some(ArithOp::Mul),
                _ => None,
            };
            if let Some(aop) = arith {
                self.pos += 1;
                let rhs2 = self.term()?;
                return Ok(Builtin::Arith {
                    result: lhs,
                    op: aop,
                    lhs: rhs,
                    rhs: rhs2,
                });
            }
        }
        Ok(Builtin::Cmp(op, lhs, rhs))
    }

    pub fn lit(&mut self) -> Result<Lit, ParseError> {
        match self.peek() {
            Some(Tok::HashInt) => {
                self.pos += 1;
                self.expect(Tok::LParen, "`(`")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Lit::Builtin(Builtin::Int(t)))
            }
            Some(Tok::Minus) => Ok(Lit::Classical(self.classical()?)),
            Some(Tok::Ident(_)) => {
                let is_term = matches!(self.peek_at(1), Some(t) if Self::cmp_op(Some(t)).is_some());
                if is_term {
                    let t = self.term()?;
                    Ok(Lit::Builtin(self.builtin_rest(t)?))
                } else {
                    Ok(Lit::Classical(self.classical()?))
                }
            }
            Some(Tok::Var(_)) | Some(Tok::Int(_)) | Some(Tok::Anon) => {
                let t = self.term()?;
                Ok(Lit::Builtin(self.builtin_rest(t)?))
            }
            _ => Err(self.error(format!("expected a literal, found {}", self.describe()))),
        }
    }

    pub fn body_lit(&mut self) -> Result<BodyLit, ParseError> {
        let naf = self.is_keyword("not")
            && !matches!(
                self.peek_at(1),
                Some(Tok::LParen) | Some(Tok::Comma) | Some(Tok::Dot)
            );
        if naf {
            self.pos += 1;
        }
        Ok(BodyLit {
            naf,
            lit: self.lit()?,
        })
    }

    pub fn body(&mut self) -> Result<Vec<BodyLit>, ParseError> {
        let mut out = vec![self.body_lit()?];
        while self.eat(&Tok::Comma) {
            out.push(self.body_lit()?);
        }
        Ok(out)
    }

    fn type_lits(&mut self) -> Result<Vec<Lit>, ParseError> {
        let mut out = vec![self.lit()?];
        while self.eat(&Tok::Comma) {
            out.push(self.lit()?);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Background,
    Fluents,
    Actions,
    Initially,
    Always,
}

const SECTIONS: [&str; 5] = ["fluents", "actions", "initially", "always", "goal"];

/// Parses one source text (a `.bk` or `.plan` file, or both concatenated)
/// without cross-checking declarations.
pub fn parse_source(src: &str, source: usize) -> Result<Program, ParseError> {
    let mut c = Cursor::new(src, source)?;
    let mut p = Program::default();
    let mut section = Section::Background;
    while !c.at_end() {
        if let Some(Tok::Ident(w)) = c.peek() {
            if SECTIONS.contains(&w.as_str()) && c.peek_at(1) == Some(&Tok::Colon) {
                let w = w.clone();
                c.pos += 2;
                section = match w.as_str() {
                    "fluents" => Section::Fluents,
                    "actions" => Section::Actions,
                    "initially" => Section::Initially,
                    "always" => Section::Always,
                    _ => {
                        if p.query.is_some() {
                            return Err(c.error("more than one goal query"));
                        }
                        p.query = Some(query(&mut c)?);
                        continue;
                    }
                };
                continue;
            }
            if w == "noConcurrency" && c.peek_at(1) == Some(&Tok::Dot) {
                c.pos += 2;
                p.no_concurrency = true;
                continue;
            }
        }
        match section {
            Section::Background => p.background.push(datalog_rule(&mut c)?),
            Section::Fluents => p.fluents.push(fluent_decl(&mut c)?),
            Section::Actions => p.actions.push(action_decl(&mut c)?),
            Section::Initially => p.initially.push(statement(&mut c)?),
            Section::Always => p.always.push(statement(&mut c)?),
        }
    }
    Ok(p)
}

fn datalog_rule(c: &mut Cursor) -> Result<DatalogRule, ParseError> {
    let head = c.classical()?;
    let body = if c.eat(&Tok::ColonDash) {
        c.body()?
    } else {
        Vec::new()
    };
    c.expect(Tok::Dot, "`.` after rule")?;
    Ok(DatalogRule { head, body })
}

fn decl_head(c: &mut Cursor) -> Result<(String, Vec<String>), ParseError> {
    let name = match c.bump() {
        Some(Tok::Ident(w)) => w,
        _ => {
            c.pos -= 1;
            return Err(c.error(format!("expected a declaration, found {}", c.describe())));
        }
    };
    let mut params = Vec::new();
    if c.eat(&Tok::LParen) {
        loop {
            match c.bump() {
                Some(Tok::Var(v)) => params.push(v),
                _ => {
                    c.pos -= 1;
                    return Err(c.error("declaration parameters must be variables"));
                }
            }
            if !c.eat(&Tok::Comma) {
                break;
            }
        }
        c.expect(Tok::RParen, "`)`")?;
    }
    Ok((name, params))
}

fn fluent_decl(c: &mut Cursor) -> Result<FluentDecl, ParseError> {
    let (name, params) = decl_head(c)?;
    let requires = if c.eat_keyword("requires") {
        c.type_lits()?
    } else {
        Vec::new()
    };
    c.expect(Tok::Dot, "`.` after fluent declaration")?;
    Ok(FluentDecl {
        name,
        params,
        requires,
    })
}

fn action_decl(c: &mut Cursor) -> Result<ActionDecl, ParseError> {
    let (name, params) = decl_head(c)?;
    let requires = if c.eat_keyword("requires") {
        c.type_lits()?
    } else {
        Vec::new()
    };
    c.time_is_var = true;
    let res = (|| {
        let mut cost = None;
        let mut cost_where = Vec::new();
        if c.eat_keyword("costs") {
            cost = Some(c.term()?);
            if c.eat_keyword("where") {
                cost_where = c.type_lits()?;
            }
        }
        Ok((cost, cost_where))
    })();
    c.time_is_var = false;
    let (cost, cost_where) = res?;
    c.expect(Tok::Dot, "`.` after action declaration")?;
    Ok(ActionDecl {
        name,
        params,
        requires,
        cost,
        cost_where,
    })
}

fn if_after(c: &mut Cursor) -> Result<(Vec<BodyLit>, Vec<BodyLit>), ParseError> {
    let post = if c.eat_keyword("if") {
        c.body()?
    } else {
        Vec::new()
    };
    let pre = if c.eat_keyword("after") {
        c.body()?
    } else {
        Vec::new()
    };
    c.expect(Tok::Dot, "`.`")?;
    Ok((post, pre))
}

fn statement(c: &mut Cursor) -> Result<Statement, ParseError> {
    let kw = match c.peek() {
        Some(Tok::Ident(w)) => w.clone(),
        _ => String::new(),
    };
    // A keyword followed by `(` or `.` is an atom with that name.
    let keyword_position = !matches!(
        c.peek_at(1),
        Some(Tok::LParen) | Some(Tok::Dot) | Some(Tok::Comma)
    );
    if keyword_position {
        match kw.as_str() {
            "caused" => {
                c.pos += 1;
                let head = if c.eat_keyword("false") {
                    None
                } else {
                    Some(c.classical()?)
                };
                let (post, pre) = if_after(c)?;
                return Ok(Statement::Caused(CausationRule { head, post, pre }));
            }
            "executable" | "nonexecutable" => {
                c.pos += 1;
                let action = c.atom()?;
                let mut pre = if c.eat_keyword("if") {
                    c.body()?
                } else {
                    Vec::new()
                };
                // `after` is accepted as a synonym of `if` here.
                if c.eat_keyword("after") {
                    pre.extend(c.body()?);
                }
                c.expect(Tok::Dot, "`.`")?;
                return Ok(if kw == "executable" {
                    Statement::Executable(ExecCondition { action, pre })
                } else {
                    Statement::Nonexecutable { action, pre }
                });
            }
            "inertial" | "default" | "total" => {
                c.pos += 1;
                let lit = c.classical()?;
                let (post, pre) = if_after(c)?;
                return Ok(match kw.as_str() {
                    "inertial" => Statement::Inertial { lit, post, pre },
                    "default" => Statement::Default { lit, post, pre },
                    _ => Statement::Total { lit, post, pre },
                });
            }
            "forbidden" => {
                c.pos += 1;
                let post = if c.is_keyword("after") || c.peek() == Some(&Tok::Dot) {
                    Vec::new()
                } else {
                    c.body()?
                };
                let pre = if c.eat_keyword("after") {
                    c.body()?
                } else {
                    Vec::new()
                };
                c.expect(Tok::Dot, "`.`")?;
                return Ok(Statement::Forbidden { post, pre });
            }
            _ => {}
        }
    }
    // `caused` may be omitted.
    let head = if c.is_keyword("false") && c.peek_at(1) != Some(&Tok::LParen) {
        c.pos += 1;
        None
    } else {
        Some(c.classical()?)
    };
    let (post, pre) = if_after(c)?;
    Ok(Statement::Caused(CausationRule { head, post, pre }))
}

fn query(c: &mut Cursor) -> Result<Query, ParseError> {
    let mut goal_pos = Vec::new();
    let mut goal_neg = Vec::new();
    if c.peek() != Some(&Tok::Question) {
        loop {
            let bl = c.body_lit()?;
            let lit = match bl.lit {
                Lit::Classical(l) => l,
                Lit::Builtin(_) => return Err(c.error("goal literals must be fluent literals")),
            };
            if !lit.atom.is_ground() {
                return Err(c.error(format!("goal literal `{lit}` is not ground")));
            }
            if bl.naf {
                goal_neg.push(lit);
            } else {
                goal_pos.push(lit);
            }
            if !c.eat(&Tok::Comma) {
                break;
            }
        }
    }
    c.expect(Tok::Question, "`?` ending the goal")?;
    c.expect(Tok::LParen, "`(`")?;
    let plan_length = match c.bump() {
        Some(Tok::Int(i)) => Some(i as usize),
        Some(Tok::Ident(_)) | Some(Tok::Var(_)) => None,
        _ => {
            c.pos -= 1;
            return Err(c.error("expected the plan length"));
        }
    };
    c.expect(Tok::RParen, "`)`")?;
    c.eat(&Tok::Dot);
    Ok(Query {
        goal_pos,
        goal_neg,
        plan_length,
    })
}
