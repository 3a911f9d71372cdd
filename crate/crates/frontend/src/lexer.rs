use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Coh,
    Def,
    Normalize,
    AssertEq,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Colon,
    Define,
    Bar,
    Equals,
    Arrow,
    Star,
    Comma,
    Eof,
}

impl Tok {
    /// How the token is written in an expected-set.
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Coh => "`coh`".into(),
            Tok::Def => "`def`".into(),
            Tok::Normalize => "`normalize`".into(),
            Tok::AssertEq => "`asserteq`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Define => "`:=`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Star => "`*`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub found: char,
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '-' || c == '.'
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let next = chars.get(i + 1).copied();
        let mut width = 1;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '|' => Some(Tok::Bar),
            '*' | '⋆' => Some(Tok::Star),
            ',' => Some(Tok::Comma),
            '→' | '⇒' => Some(Tok::Arrow),
            ':' if next == Some('=') => {
                width = 2;
                Some(Tok::Define)
            }
            ':' => Some(Tok::Colon),
            '-' | '=' if next == Some('>') => {
                width = 2;
                Some(Tok::Arrow)
            }
            '=' => Some(Tok::Equals),
            c if ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len() && ident_continue(chars[j]) {
                    // `f->g` lexes as f, ->, g.
                    if chars[j] == '-' && chars.get(j + 1) == Some(&'>') {
                        break;
                    }
                    j += 1;
                }
                width = j - i;
                let word: String = chars[i..j].iter().collect();
                Some(match word.as_str() {
                    "coh" => Tok::Coh,
                    "def" => Tok::Def,
                    "normalize" => Tok::Normalize,
                    "asserteq" => Tok::AssertEq,
                    _ => Tok::Ident(word),
                })
            }
            other => return Err(LexError { pos, found: other }),
        };
        if let Some(tok) = tok {
            out.push(Token { tok, pos });
        }
        i += width;
        col += width;
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_hyphenated_names() {
        assert_eq!(
            toks("unitor-l f->g => h # gone"),
            vec![
                Tok::Ident("unitor-l".into()),
                Tok::Ident("f".into()),
                Tok::Arrow,
                Tok::Ident("g".into()),
                Tok::Arrow,
                Tok::Ident("h".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions() {
        let ts = lex("coh\n  x := y").unwrap();
        assert_eq!(ts[1].pos, Pos { line: 2, col: 3 });
        assert_eq!(ts[2].tok, Tok::Define);
        assert_eq!(ts[3].pos, Pos { line: 2, col: 8 });
        assert!(lex("x ; y").is_err());
    }
}
