use std::fmt;

/// Byte range in the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }

    /// 1-based line and column of the start.
    pub fn line_col(self, src: &str) -> (usize, usize) {
        let before = &src[..self.start.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    ColonEq,
    FatArrow,
    Arrow,
    Comma,
    Bar,
    Dot,
    At,
    Underscore,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::ColonEq => f.write_str("`:=`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::At => f.write_str("`@`"),
            Tok::Underscore => f.write_str("`_`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct SyntaxError {
    pub message: String,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, SyntaxError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let single = |t: Tok, len: usize| (t, Span { start: i, end: i + len });
        let rest = &src[i..];
        if rest.starts_with("(*") {
            let mut depth = 0usize;
            let mut j = i;
            loop {
                let r = &src[j..];
                if r.is_empty() {
                    return Err(SyntaxError {
                        message: "unterminated comment".into(),
                        span: Span { start: i, end: j },
                    });
                }
                if r.starts_with("(*") {
                    depth += 1;
                    j += 2;
                } else if r.starts_with("*)") {
                    depth -= 1;
                    j += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    j += r.chars().next().map_or(1, char::len_utf8);
                }
            }
            while it.peek().is_some_and(|&(k, _)| k < j) {
                it.next();
            }
            continue;
        }
        let (tok, len) = if rest.starts_with(":=") {
            (Tok::ColonEq, 2)
        } else if rest.starts_with("=>") {
            (Tok::FatArrow, 2)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if c == '→' {
            (Tok::Arrow, c.len_utf8())
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ':' => (Tok::Colon, 1),
                ',' => (Tok::Comma, 1),
                '|' => (Tok::Bar, 1),
                '.' => (Tok::Dot, 1),
                '@' => (Tok::At, 1),
                c if c.is_ascii_digit() => {
                    let len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
                    let n = rest[..len].parse().map_err(|_| SyntaxError {
                        message: "number too large".into(),
                        span: Span { start: i, end: i + len },
                    })?;
                    (Tok::Num(n), len)
                }
                c if is_ident_start(c) => {
                    let len = rest.find(|ch: char| !is_ident_char(ch)).unwrap_or(rest.len());
                    let word = &rest[..len];
                    if word == "_" {
                        (Tok::Underscore, 1)
                    } else {
                        (Tok::Ident(word.to_string()), len)
                    }
                }
                _ => {
                    return Err(SyntaxError {
                        message: format!("unexpected character `{c}`"),
                        span: Span { start: i, end: i + c.len_utf8() },
                    })
                }
            }
        };
        let (tok, span) = single(tok, len);
        out.push((tok, span));
        while it.peek().is_some_and(|&(k, _)| k < i + len) {
            it.next();
        }
    }
    out.push((Tok::Eof, Span { start: src.len(), end: src.len() }));
    Ok(out)
}
