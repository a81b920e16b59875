//! Lexical analysis.

use std::fmt;

use thiserror::Error;

/// Reserved words. Builtin names such as `print` are ordinary identifiers.
pub const KEYWORDS: &[&str] = &[
    "concept", "reference", "object", "in", "this", "super", "sub", "new", "static", "return",
    "if", "else", "null", "true", "false", "void", "double", "boolean", "String", "Root",
];

const PUNCT2: &[&str] = &["==", "!=", "<=", ">=", "&&", "||"];
const PUNCT1: &str = "{}();,.:=+-*/<>!";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Number,
    Str,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Raw source text; string literals keep their quotes.
    pub text: String,
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punct, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unexpected character {found:?}")]
pub struct LexError {
    pub line: u32,
    pub column: u32,
    pub found: char,
}

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn second(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }
}

/// Splits source text into tokens, discarding whitespace and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor { chars: source.chars().peekable(), line: 1, column: 1 };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.second() == Some('/') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        if c == '/' && cur.second() == Some('*') {
            cur.bump();
            cur.bump();
            loop {
                match cur.bump() {
                    Some('*') if cur.peek() == Some('/') => {
                        cur.bump();
                        break;
                    }
                    Some(_) => {}
                    None => return Err(LexError { line, column, found: '/' }),
                }
            }
            continue;
        }
        let (kind, text) = if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                text.push(c);
                cur.bump();
            }
            let kind = if is_keyword(&text) { TokenKind::Keyword } else { TokenKind::Identifier };
            (kind, text)
        } else if c.is_ascii_digit() {
            let mut text = String::new();
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                text.push(c);
                cur.bump();
            }
            if cur.peek() == Some('.') && cur.second().is_some_and(|c| c.is_ascii_digit()) {
                text.push('.');
                cur.bump();
                while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                    text.push(c);
                    cur.bump();
                }
            }
            (TokenKind::Number, text)
        } else if c == '"' {
            let mut text = String::from('"');
            cur.bump();
            loop {
                match cur.bump() {
                    Some('"') => break,
                    Some('\n') | None => return Err(LexError { line, column, found: '"' }),
                    Some(c) => text.push(c),
                }
            }
            text.push('"');
            (TokenKind::Str, text)
        } else {
            let two: String = [Some(c), cur.second()].into_iter().flatten().collect();
            if PUNCT2.contains(&two.as_str()) {
                cur.bump();
                cur.bump();
                (TokenKind::Punct, two)
            } else if PUNCT1.contains(c) {
                cur.bump();
                (TokenKind::Punct, c.to_string())
            } else {
                return Err(LexError { line, column, found: c });
            }
        };
        tokens.push(Token { kind, text, line, column });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn concept_header() {
        assert_eq!(
            kinds("concept Account"),
            vec![(TokenKind::Keyword, "concept".into()), (TokenKind::Identifier, "Account".into())]
        );
    }

    #[test]
    fn empty_source() {
        assert!(tokenize("").unwrap().is_empty());
    }

    #[test]
    fn illegal_character() {
        assert_eq!(tokenize("@"), Err(LexError { line: 1, column: 1, found: '@' }));
        assert_eq!(tokenize("a\n  #").unwrap_err(), LexError { line: 2, column: 3, found: '#' });
    }

    #[test]
    fn comments_are_dropped() {
        assert_eq!(kinds("x // y z\n/* w */ q").len(), 2);
    }

    #[test]
    fn numbers_and_members() {
        let toks = kinds("10.0 a.b 3.x");
        let texts: Vec<_> = toks.iter().map(|t| t.1.as_str()).collect();
        assert_eq!(texts, ["10.0", "a", ".", "b", "3", ".", "x"]);
    }

    #[test]
    fn string_literal_keeps_quotes() {
        let toks = tokenize("print(\"=> A: enter\")").unwrap();
        assert_eq!(toks[2].kind, TokenKind::Str);
        assert_eq!(toks[2].text, "\"=> A: enter\"");
    }

    #[test]
    fn unterminated_string() {
        assert_eq!(tokenize("  \"abc").unwrap_err().column, 3);
    }

    #[test]
    fn positions_point_into_source() {
        let src = "concept A in B\n  reference { double x; }";
        let lines: Vec<&str> = src.lines().collect();
        for t in tokenize(src).unwrap() {
            let line = lines[t.line as usize - 1];
            let rest: String = line.chars().skip(t.column as usize - 1).collect();
            assert!(rest.starts_with(&t.text), "{t:?}");
        }
    }

    #[test]
    fn two_char_operators() {
        let texts: Vec<_> = kinds("a<=b==c&&d").into_iter().map(|t| t.1).collect();
        assert_eq!(texts, ["a", "<=", "b", "==", "c", "&&", "d"]);
    }
}
