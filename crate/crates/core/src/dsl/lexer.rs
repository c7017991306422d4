use super::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Prime,
    DotDot,
    AndAnd,
    OrOr,
    Bang,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Question,
    Implies,
    Assign,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Prime => "'",
            Tok::DotDot => "..",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Question => "?",
            Tok::Implies => "=>",
            Tok::Assign => "=",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Maps byte offsets to 1-based line/column pairs.
pub(crate) struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    pub fn span(&self, text: &str, start: usize, end: usize) -> SourceSpan {
        let line = self.starts.partition_point(|&s| s <= start) - 1;
        let col = |off: usize| text[self.starts[line]..off].chars().count() + 1;
        SourceSpan {
            file: None,
            start,
            end,
            line: line + 1,
            col_start: col(start),
            col_end: col(end.max(start).min(self.line_end(text, line))),
        }
    }

    fn line_end(&self, text: &str, line: usize) -> usize {
        self.starts.get(line + 1).map(|s| s - 1).unwrap_or(text.len())
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let index = LineIndex::new(text);
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            match text[start..i].parse::<i64>() {
                Ok(v) => Tok::Int(v),
                Err(_) => {
                    return Err(Diagnostic::error("integer literal out of range", index.span(text, start, i)));
                }
            }
        } else {
            let two = bytes.get(i + 1).copied();
            let (tok, len) = match (c, two) {
                (b'&', Some(b'&')) => (Tok::AndAnd, 2),
                (b'|', Some(b'|')) => (Tok::OrOr, 2),
                (b'=', Some(b'=')) => (Tok::EqEq, 2),
                (b'=', Some(b'>')) => (Tok::Implies, 2),
                (b'!', Some(b'=')) => (Tok::NotEq, 2),
                (b'<', Some(b'=')) => (Tok::Le, 2),
                (b'>', Some(b'=')) => (Tok::Ge, 2),
                (b'.', Some(b'.')) => (Tok::DotDot, 2),
                (b'{', _) => (Tok::LBrace, 1),
                (b'}', _) => (Tok::RBrace, 1),
                (b'(', _) => (Tok::LParen, 1),
                (b')', _) => (Tok::RParen, 1),
                (b';', _) => (Tok::Semi, 1),
                (b':', _) => (Tok::Colon, 1),
                (b',', _) => (Tok::Comma, 1),
                (b'\'', _) => (Tok::Prime, 1),
                (b'!', _) => (Tok::Bang, 1),
                (b'<', _) => (Tok::Lt, 1),
                (b'>', _) => (Tok::Gt, 1),
                (b'+', _) => (Tok::Plus, 1),
                (b'-', _) => (Tok::Minus, 1),
                (b'?', _) => (Tok::Question, 1),
                (b'=', _) => (Tok::Assign, 1),
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    let end = i + ch.len_utf8();
                    return Err(Diagnostic::error(
                        format!("unexpected character `{ch}`"),
                        index.span(text, start, end),
                    ));
                }
            };
            i += len;
            tok
        };
        out.push(Token { tok, span: index.span(text, start, i) });
    }
    out.push(Token { tok: Tok::Eof, span: index.span(text, text.len(), text.len()) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_comments() {
        let toks = lex("a<=b // comment\n x' => 0..2").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Le,
                Tok::Ident("b".into()),
                Tok::Ident("x".into()),
                Tok::Prime,
                Tok::Implies,
                Tok::Int(0),
                Tok::DotDot,
                Tok::Int(2),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn spans_track_lines() {
        let toks = lex("a\n  bc").unwrap();
        assert_eq!(toks[1].span.line, 2);
        assert_eq!(toks[1].span.col_start, 3);
        assert_eq!(toks[1].span.col_end, 5);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = lex("a # b").unwrap_err();
        assert_eq!(err.span.col_start, 3);
    }
}
