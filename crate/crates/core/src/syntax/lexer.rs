use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Anon,
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    ColonDash,
    ColonTilde,
    Question,
    Minus,
    Plus,
    Star,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    HashInt,
    Pipe,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(src: &str, source: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| ParseError::Syntax {
        input: source,
        line,
        col,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '?' => Tok::Question,
            '-' | '¬' => Tok::Minus,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '|' => Tok::Pipe,
            '=' => {
                if chars.get(i + 1) == Some(&'=') {
                    adv = 2;
                }
                Tok::Eq
            }
            ':' => match chars.get(i + 1) {
                Some('-') => {
                    adv = 2;
                    Tok::ColonDash
                }
                Some('~') => {
                    adv = 2;
                    Tok::ColonTilde
                }
                _ => Tok::Colon,
            },
            '<' => match chars.get(i + 1) {
                Some('=') => {
                    adv = 2;
                    Tok::Le
                }
                Some('>') => {
                    adv = 2;
                    Tok::Ne
                }
                _ => Tok::Lt,
            },
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    adv = 2;
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            '!' => {
                if chars.get(i + 1) == Some(&'=') {
                    adv = 2;
                    Tok::Ne
                } else {
                    return Err(err(tl, tc, "expected `!=`".into()));
                }
            }
            '#' => {
                let word: String = chars[i + 1..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                    .collect();
                if word == "int" {
                    adv = 4;
                    Tok::HashInt
                } else {
                    return Err(err(tl, tc, format!("unknown built-in `#{word}`")));
                }
            }
            c if c.is_ascii_digit() => {
                let digits: String = chars[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_digit())
                    .collect();
                adv = digits.len();
                let v = digits
                    .parse::<i64>()
                    .map_err(|_| err(tl, tc, format!("integer `{digits}` out of range")))?;
                Tok::Int(v)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let word: String = chars[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                    .collect();
                adv = word.chars().count();
                if word == "_" {
                    Tok::Anon
                } else if word.starts_with(|c: char| c.is_ascii_uppercase() || c == '_') {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                }
            }
            other => return Err(err(tl, tc, format!("unexpected character `{other}`"))),
        };
        out.push(Token {
            tok,
            line: tl,
            col: tc,
        });
        i += adv;
        col += adv;
    }
    Ok(out)
}
