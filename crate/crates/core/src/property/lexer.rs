use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Unsigned literal; the parser applies a preceding minus.
    Int(u64),
    Always,     // A[]
    Eventually, // E<>
    /// A path quantifier outside the supported fragment.
    Unsupported(&'static str),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Plus,
    Minus,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Bang,
    AndAnd,
    OrOr,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(v) => return write!(f, "`{v}`"),
            Tok::Always => "`A[]`",
            Tok::Eventually => "`E<>`",
            Tok::Unsupported(s) => return write!(f, "`{s}`"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Eq => "`==`",
            Tok::Ne => "`!=`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::Bang => "`!`",
            Tok::AndAnd => "`&&`",
            Tok::OrOr => "`||`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

/// 1-based position of a token's first character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub col: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let at = |i: usize| chars.get(i).copied();
    while let Some(c) = at(i) {
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let starts = |s: &str| s.chars().enumerate().all(|(k, ch)| at(i + k) == Some(ch));
        let quantifiers: [(&str, Tok); 5] = [
            ("A[]", Tok::Always),
            ("E<>", Tok::Eventually),
            ("A<>", Tok::Unsupported("A<>")),
            ("E[]", Tok::Unsupported("E[]")),
            ("-->", Tok::Unsupported("-->")),
        ];
        if let Some((s, tok)) = quantifiers.iter().find(|(s, _)| starts(s)) {
            // `A[]` only counts as a quantifier when not part of a longer name.
            let prev_ident = i > 0 && chars[i - 1].is_alphanumeric() || i > 0 && chars[i - 1] == '_';
            if !prev_ident || s.starts_with('-') {
                out.push((tok.clone(), pos));
                i += s.len();
                col += s.len();
                continue;
            }
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while at(i).is_some_and(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(word), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while at(i).is_some_and(|ch| ch.is_ascii_digit()) {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            let v = digits.parse::<u64>().map_err(|_| ParseError {
                line: pos.line,
                col: pos.col,
                message: format!("integer literal `{digits}` is too large"),
                expected: Vec::new(),
            })?;
            out.push((Tok::Int(v), pos));
            continue;
        }
        let two = [
            ("==", Tok::Eq),
            ("!=", Tok::Ne),
            ("<=", Tok::Le),
            (">=", Tok::Ge),
            ("&&", Tok::AndAnd),
            ("||", Tok::OrOr),
        ];
        if let Some((s, tok)) = two.iter().find(|(s, _)| starts(s)) {
            out.push((tok.clone(), pos));
            i += s.len();
            col += s.len();
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '!' => Tok::Bang,
            other => {
                return Err(ParseError {
                    line,
                    col,
                    message: format!("unexpected character `{other}`"),
                    expected: Vec::new(),
                })
            }
        };
        out.push((tok, pos));
        i += 1;
        col += 1;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}
