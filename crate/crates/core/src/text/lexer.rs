use std::fmt;

use super::{SourceSpan, TextError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    DownVar(String),
    UpVar(String),
    LParen,
    RParen,
    ChoiceOpen,
    ChoiceClose,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Le,
    Comma,
    Colon,
    Semi,
    Pipe,
    OrOr,
    AndAnd,
    Arrow,
    Bang,
    Dot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::DownVar(s) => write!(f, "`${s}`"),
            Tok::UpVar(s) => write!(f, "`^{s}`"),
            Tok::Eof => f.write_str("end of input"),
            other => write!(f, "`{}`", other.text()),
        }
    }
}

impl Tok {
    pub(crate) fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::ChoiceOpen => "(:",
            Tok::ChoiceClose => ":)",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Pipe => "|",
            Tok::OrOr => "||",
            Tok::AndAnd => "&&",
            Tok::Arrow => "->",
            Tok::Bang => "!",
            Tok::Dot => ".",
            Tok::Ident(_) => "identifier",
            Tok::DownVar(_) => "$variable",
            Tok::UpVar(_) => "^variable",
            Tok::Eof => "end of input",
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn lex(src: &str, file: Option<&str>) -> Result<Vec<(Tok, SourceSpan)>, TextError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let span_at = |start: usize, end: usize, line: usize, col: usize| SourceSpan { line, column: col, start, end };
    let offset = |i: usize| bytes.get(i).map_or(src.len(), |(o, _)| *o);
    while i < bytes.len() {
        let c = bytes[i].1;
        let next = bytes.get(i + 1).map(|(_, c)| *c);
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
        if c == '/' && next == Some('/') {
            while i < bytes.len() && bytes[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let (tok, len) = match (c, next) {
            ('(', Some(':')) => (Tok::ChoiceOpen, 2),
            (':', Some(')')) => (Tok::ChoiceClose, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            (';', _) => (Tok::Semi, 1),
            ('|', _) => (Tok::Pipe, 1),
            ('!', _) => (Tok::Bang, 1),
            ('.', _) => (Tok::Dot, 1),
            _ if is_ident_start(c) || c == '$' || c == '^' => {
                let sigil = (c == '$' || c == '^') as usize;
                let mut j = i + sigil;
                while j < bytes.len() && is_ident_char(bytes[j].1) {
                    j += 1;
                }
                if j == i + sigil || (sigil == 1 && !is_ident_start(bytes[i + 1].1)) {
                    return Err(TextError::Lex {
                        file: file.map(str::to_string),
                        span: span_at(offset(i), offset(i + 1), line, col),
                        message: format!("`{c}` must be followed by a variable name"),
                    });
                }
                let name: String = bytes[i + sigil..j].iter().map(|(_, c)| c).collect();
                let tok = match c {
                    '$' => Tok::DownVar(name),
                    '^' => Tok::UpVar(name),
                    _ => Tok::Ident(name),
                };
                (tok, j - i)
            }
            _ => {
                return Err(TextError::Lex {
                    file: file.map(str::to_string),
                    span: span_at(offset(i), offset(i + 1), line, col),
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, span_at(offset(start), offset(start + len), line, col)));
        i += len;
        col += len;
    }
    out.push((Tok::Eof, span_at(src.len(), src.len(), line, col)));
    Ok(out)
}
