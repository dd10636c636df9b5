use super::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

pub const KEYWORDS: &[&str] = &[
    "type", "let", "in", "unin", "mu", "forall", "fold", "map", "fork", "join", "fst", "snd", "inl", "inr", "tt",
    "absurd",
];

// longest first so that `=>` wins over `=`
const SYMBOLS: &[&str] = &[
    "/\\", "=>", "->", "\\", ".", ":", "(", ")", "[", "]", "{", "}", ",", ";", "=", "*", "+", "@", "|",
];

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let pos = Pos { line, col };
        if is_ident_start(c) {
            let start = i;
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let word: String = chars[start..j].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, pos });
            advance(&mut i, &mut line, &mut col, j - start);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[start..j].iter().collect();
            let n = digits.parse::<u64>().map_err(|_| ParseError {
                kind: ParseErrorKind::Lex,
                message: format!("integer literal `{digits}` is too large"),
                pos,
            })?;
            out.push(Token { tok: Tok::Int(n), pos });
            advance(&mut i, &mut line, &mut col, j - start);
            continue;
        }
        let sym = SYMBOLS.iter().find(|s| {
            let s: Vec<char> = s.chars().collect();
            chars[i..].starts_with(&s)
        });
        match sym {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), pos });
                advance(&mut i, &mut line, &mut col, s.chars().count());
            }
            None => {
                return Err(ParseError {
                    kind: ParseErrorKind::Lex,
                    message: format!("unexpected character `{c}`"),
                    pos,
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
