use num_bigint::BigInt;

use super::ParseError;
use crate::model::Span;

pub const KEYWORDS: &[&str] = &[
    "roles", "type", "protocol", "entry", "msg", "dep", "send", "read", "rec", "call", "then",
    "end", "by", "where", "val", "literal", "next", "and", "or", "true", "false", "Int", "Bool",
    "Str",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Str(String),
    Comma,
    Colon,
    Semi,
    Pipe,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Lt,
    Le,
    Gt,
    EqEq,
    Ne,
    Assign,
    Plus,
    Minus,
    Star,
    Arrow,
    FatArrow,
    Underscore,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) if is_keyword(s) => format!("keyword `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Pipe => "|",
            Tok::Dot => ".",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Assign => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::Underscore => "_",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Comment {
    /// Text after `--`, trailing whitespace removed.
    pub text: String,
    pub start: usize,
}

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
    pub errors: Vec<ParseError>,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: usize, line: u32, col: u32) -> Span {
        Span::new(start, self.pos, line, col)
    }
}

pub fn lex(src: &str) -> Lexed {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut comments = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = cur.peek() {
        let (start, line, col) = (cur.pos, cur.line, cur.col);
        if c.is_whitespace() || c == '\u{feff}' {
            cur.bump();
            continue;
        }
        if c == '-' && cur.peek2() == Some('-') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            let text = src[start + 2..cur.pos].trim_end().to_string();
            comments.push(Comment { text, start });
            continue;
        }
        let tok = if c.is_ascii_alphabetic() {
            while cur
                .peek()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                cur.bump();
            }
            Tok::Ident(src[start..cur.pos].to_string())
        } else if c.is_ascii_digit() {
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            Tok::Int(src[start..cur.pos].parse().expect("digits"))
        } else if c == '"' {
            match lex_string(&mut cur) {
                Ok(s) => Tok::Str(s),
                Err(msg) => {
                    errors.push(ParseError::new(cur.span_from(start, line, col), msg));
                    continue;
                }
            }
        } else {
            cur.bump();
            let next = cur.peek();
            let two = |cur: &mut Cursor, t: Tok| {
                cur.bump();
                t
            };
            match (c, next) {
                ('-', Some('>')) => two(&mut cur, Tok::Arrow),
                ('=', Some('>')) => two(&mut cur, Tok::FatArrow),
                ('=', Some('=')) => two(&mut cur, Tok::EqEq),
                ('!', Some('=')) => two(&mut cur, Tok::Ne),
                ('<', Some('=')) => two(&mut cur, Tok::Le),
                (',', _) => Tok::Comma,
                (':', _) => Tok::Colon,
                (';', _) => Tok::Semi,
                ('|', _) => Tok::Pipe,
                ('.', _) => Tok::Dot,
                ('(', _) => Tok::LParen,
                (')', _) => Tok::RParen,
                ('[', _) => Tok::LBracket,
                (']', _) => Tok::RBracket,
                ('{', _) => Tok::LBrace,
                ('}', _) => Tok::RBrace,
                ('<', _) => Tok::Lt,
                ('>', _) => Tok::Gt,
                ('=', _) => Tok::Assign,
                ('+', _) => Tok::Plus,
                ('-', _) => Tok::Minus,
                ('*', _) => Tok::Star,
                ('_', _) => Tok::Underscore,
                _ => {
                    errors.push(ParseError::new(
                        cur.span_from(start, line, col),
                        format!("unexpected character `{c}`"),
                    ));
                    continue;
                }
            }
        };
        tokens.push(Token {
            tok,
            span: cur.span_from(start, line, col),
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span::new(cur.pos, cur.pos, cur.line, cur.col),
    });
    Lexed {
        tokens,
        comments,
        errors,
    }
}

fn lex_string(cur: &mut Cursor) -> Result<String, String> {
    cur.bump();
    let mut out = String::new();
    loop {
        match cur.bump() {
            None | Some('\n') => return Err("unterminated string literal".to_string()),
            Some('"') => return Ok(out),
            Some('\\') => match cur.bump() {
                Some('"') => out.push('"'),
                Some('\\') => out.push('\\'),
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => return Err(format!("unknown escape `\\{other}`")),
                None => return Err("unterminated string literal".to_string()),
            },
            Some(c) => out.push(c),
        }
    }
}

/// Renders `s` as a string literal accepted by [`lex`].
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn projection_is_three_tokens() {
        assert_eq!(
            toks("m1.2"),
            [
                Tok::Ident("m1".into()),
                Tok::Dot,
                Tok::Int(2.into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_are_collected_separately() {
        let lexed = lex("end -- bye\n-- solo\n");
        assert_eq!(lexed.tokens.len(), 2);
        let texts: Vec<_> = lexed.comments.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(texts, [" bye", " solo"]);
    }

    #[test]
    fn operators() {
        assert_eq!(
            toks("-> => == != <= < = -"),
            [
                Tok::Arrow,
                Tok::FatArrow,
                Tok::EqEq,
                Tok::Ne,
                Tok::Le,
                Tok::Lt,
                Tok::Assign,
                Tok::Minus,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn string_escapes_round_trip() {
        let s = "a \"quoted\" \\ path\nnext\tcol";
        assert_eq!(toks(&quote(s)), [Tok::Str(s.to_string()), Tok::Eof]);
    }

    #[test]
    fn positions_are_one_based() {
        let lexed = lex("roles\n  Alice");
        let alice = &lexed.tokens[1];
        assert_eq!((alice.span.line, alice.span.col), (2, 3));
    }

    #[test]
    fn bad_input_is_reported() {
        let lexed = lex("\"open\n@");
        assert_eq!(lexed.errors.len(), 2);
        assert_eq!(lexed.errors[1].span.line, 2);
    }

    #[test]
    fn crlf_is_whitespace() {
        assert_eq!(toks("end\r\n"), [Tok::Ident("end".into()), Tok::Eof]);
    }
}
