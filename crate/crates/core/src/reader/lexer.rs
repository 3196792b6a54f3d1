use crate::error::{Pos, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    /// Alphanumeric or quoted name.
    Atom,
    Variable,
    Integer,
    Decimal,
    /// One of `( ) [ ] { } , |`.
    Punct,
    /// Run of symbol characters such as `#\=` or `:-`, plus the solo
    /// atoms `!` and `;`.
    Symbol,
    /// Clause terminator `.`.
    End,
    EndOfInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source slice; for quoted atoms, the unescaped name.
    pub text: String,
    pub pos: Pos,
    /// Whitespace or a comment precedes this token.
    pub layout_before: bool,
    /// Comments consumed immediately before this token.
    pub comments: Vec<String>,
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$".contains(c)
}

pub(crate) fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.i).copied()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn err(&self, pos: Pos, message: impl Into<String>) -> SyntaxError {
        SyntaxError::Lex {
            pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and comments; returns (layout seen, comments).
    fn skip_layout(&mut self) -> Result<(bool, Vec<String>), SyntaxError> {
        let mut layout = false;
        let mut comments = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    layout = true;
                    self.bump();
                }
                Some('%') => {
                    layout = true;
                    self.bump();
                    let mut text = String::new();
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        text.push(c);
                        self.bump();
                    }
                    comments.push(text.trim().to_owned());
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    layout = true;
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    let mut text = String::new();
                    loop {
                        match self.peek() {
                            None => return Err(self.err(start, "unterminated block comment")),
                            Some('*') if self.peek_at(1) == Some('/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(c) => {
                                text.push(c);
                                self.bump();
                            }
                        }
                    }
                    comments.push(text.trim().to_owned());
                }
                _ => return Ok((layout, comments)),
            }
        }
    }

    fn read_escape(&mut self, start: Pos) -> Result<char, SyntaxError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('\\') => Ok('\\'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some('`') => Ok('`'),
            Some(c) => Err(self.err(start, format!("unsupported escape \\{c}"))),
            None => Err(self.err(start, "unterminated escape")),
        }
    }

    fn quoted(&mut self, quote: char) -> Result<String, SyntaxError> {
        let start = self.pos();
        self.bump();
        let mut text = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(start, "unterminated quoted text")),
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        text.push(quote);
                    } else {
                        return Ok(text);
                    }
                }
                Some('\\') => {
                    if self.peek() == Some('\n') {
                        self.bump();
                    } else {
                        text.push(self.read_escape(start)?);
                    }
                }
                Some(c) => text.push(c),
            }
        }
    }

    fn number(&mut self) -> Result<(TokenKind, String), SyntaxError> {
        let start = self.pos();
        let mut text = String::new();
        // 0'c character code
        if self.peek() == Some('0') && self.peek_at(1) == Some('\'') {
            if let Some(c) = self.peek_at(2) {
                self.bump();
                self.bump();
                self.bump();
                let code = if c == '\\' {
                    self.read_escape(start)?
                } else if c == '\'' && self.peek() == Some('\'') {
                    self.bump();
                    '\''
                } else {
                    c
                };
                return Ok((TokenKind::Integer, (code as u32).to_string()));
            }
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || (c == '_' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
                if c != '_' {
                    text.push(c);
                }
                self.bump();
            } else {
                break;
            }
        }
        let mut kind = TokenKind::Integer;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            kind = TokenKind::Decimal;
            text.push('.');
            self.bump();
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                kind = TokenKind::Decimal;
                text.push('e');
                self.bump();
                if sign {
                    text.push(self.bump().unwrap());
                }
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() {
                        text.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
        }
        Ok((kind, text))
    }
}

/// Splits source text into tokens. The list always ends with an
/// `EndOfInput` token, which carries any trailing comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        i: 0,
        line: 1,
        col: 1,
        _src: source,
    };
    let mut out = Vec::new();
    loop {
        let (layout, comments) = lx.skip_layout()?;
        let pos = lx.pos();
        let layout_before = layout || out.is_empty();
        let Some(c) = lx.peek() else {
            out.push(Token {
                kind: TokenKind::EndOfInput,
                text: String::new(),
                pos,
                layout_before,
                comments,
            });
            return Ok(out);
        };
        let (kind, text) = if c.is_ascii_digit() {
            lx.number()?
        } else if c == '_' || c.is_uppercase() {
            let mut text = String::new();
            while let Some(c) = lx.peek().filter(|c| is_alnum(*c)) {
                text.push(c);
                lx.bump();
            }
            (TokenKind::Variable, text)
        } else if c.is_alphabetic() {
            let mut text = String::new();
            while let Some(c) = lx.peek().filter(|c| is_alnum(*c)) {
                text.push(c);
                lx.bump();
            }
            (TokenKind::Atom, text)
        } else if c == '\'' || c == '"' || c == '`' {
            (TokenKind::Atom, lx.quoted(c)?)
        } else if "()[]{},|".contains(c) {
            lx.bump();
            if c == '|' && lx.peek() == Some('|') {
                lx.bump();
                (TokenKind::Symbol, "||".to_owned())
            } else {
                (TokenKind::Punct, c.to_string())
            }
        } else if c == '!' || c == ';' {
            lx.bump();
            (TokenKind::Symbol, c.to_string())
        } else if is_symbol_char(c) {
            let mut text = String::new();
            while let Some(c) = lx.peek().filter(|c| is_symbol_char(*c)) {
                text.push(c);
                lx.bump();
            }
            let ends_clause = text == "." && lx.peek().is_none_or(|n| n.is_whitespace() || n == '%');
            if ends_clause {
                (TokenKind::End, text)
            } else {
                (TokenKind::Symbol, text)
            }
        } else {
            return Err(lx.err(pos, format!("illegal character {c:?}")));
        };
        out.push(Token {
            kind,
            text,
            pos,
            layout_before,
            comments,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn table_one_line() {
        use TokenKind::*;
        let toks = kinds("Digit1 mod 2 #\\= 0,");
        let expect = vec![
            (Variable, "Digit1".to_owned()),
            (Atom, "mod".to_owned()),
            (Integer, "2".to_owned()),
            (Symbol, "#\\=".to_owned()),
            (Integer, "0".to_owned()),
            (Punct, ",".to_owned()),
            (EndOfInput, String::new()),
        ];
        assert_eq!(toks, expect);
    }

    #[test]
    fn empty_input() {
        assert_eq!(kinds(""), vec![(TokenKind::EndOfInput, String::new())]);
    }

    #[test]
    fn comment_attaches_to_next_token() {
        let toks = tokenize("% note\nfoo.").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Atom);
        assert_eq!(toks[0].text, "foo");
        assert_eq!(toks[0].comments, vec!["note".to_owned()]);
        assert_eq!(toks[1].kind, TokenKind::End);
        assert_eq!(toks[2].kind, TokenKind::EndOfInput);
    }

    #[test]
    fn block_comment_and_errors() {
        let toks = tokenize("/* a\nb */ x").unwrap();
        assert_eq!(toks[0].comments, vec!["a\nb".to_owned()]);
        let err = tokenize("foo /* never closed").unwrap_err();
        assert!(matches!(
            err,
            SyntaxError::Lex {
                pos: Pos { line: 1, col: 5 },
                ..
            }
        ));
        assert!(matches!(tokenize("a ¤ b"), Err(SyntaxError::Lex { .. })));
    }

    #[test]
    fn numbers_and_end() {
        use TokenKind::*;
        assert_eq!(
            kinds("X = 3.5e2. Y = 3."),
            vec![
                (Variable, "X".into()),
                (Symbol, "=".into()),
                (Decimal, "3.5e2".into()),
                (End, ".".into()),
                (Variable, "Y".into()),
                (Symbol, "=".into()),
                (Integer, "3".into()),
                (End, ".".into()),
                (EndOfInput, "".into()),
            ]
        );
        assert_eq!(kinds("0'a")[0], (Integer, "97".into()));
    }

    #[test]
    fn quoted_atoms_and_layout_flag() {
        let toks = tokenize("'it''s' f(x) g (y)").unwrap();
        assert_eq!(toks[0].text, "it's");
        assert!(!toks[2].layout_before); // '(' right after f
        assert!(toks[6].layout_before); // '(' after "g "
    }
}
