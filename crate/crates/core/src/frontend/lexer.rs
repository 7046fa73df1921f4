use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    CoName(String),
    Zero,
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const SYMBOLS: &[&str] = &[
    "\\\\", "[[", "]]", "<<", ">>", "\\", ".", "+", "|", "{", "}", "[", "]", "<", ">", "/", "(", ")", ",", ";", "=",
    "&", "-", ":", "!", "~",
];

/// Splits source text into tokens. `weak_brackets` enables the `[[`, `]]`,
/// `<<`, `>>` tokens used by formula files.
pub fn lex(src: &str, weak_brackets: bool) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let ident_at = |j: usize| {
            let mut k = j;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            k
        };
        if c.is_ascii_alphabetic() || c == '_' {
            let end = ident_at(i);
            let word: String = chars[i..end].iter().collect();
            col += end - i;
            i = end;
            out.push(Token { tok: Tok::Ident(word), line: start_line, column: start_col });
            continue;
        }
        if c == '\'' {
            let end = ident_at(i + 1);
            if end == i + 1 || chars[i + 1].is_ascii_digit() {
                return Err(ParseError::new(line, col, "expected a name after `'`"));
            }
            let word: String = chars[i + 1..end].iter().collect();
            col += end - i;
            i = end;
            out.push(Token { tok: Tok::CoName(word), line: start_line, column: start_col });
            continue;
        }
        if c.is_ascii_digit() {
            let end = ident_at(i);
            let word: String = chars[i..end].iter().collect();
            if word != "0" {
                return Err(ParseError::new(line, col, format!("unexpected `{word}`")));
            }
            col += 1;
            i += 1;
            out.push(Token { tok: Tok::Zero, line: start_line, column: start_col });
            continue;
        }
        let sym = SYMBOLS.iter().find(|s| {
            let n = s.chars().count();
            if n == 2 && ["[[", "]]", "<<", ">>"].contains(s) && !weak_brackets {
                return false;
            }
            i + n <= chars.len() && chars[i..i + n].iter().copied().eq(s.chars())
        });
        match sym {
            Some(s) => {
                let n = s.chars().count();
                i += n;
                col += n;
                out.push(Token { tok: Tok::Sym(s), line: start_line, column: start_col });
            }
            None => return Err(ParseError::new(line, col, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// Cursor over a token vector shared by the parsers.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    /// Tokens in `from..to` followed by an end-of-input marker.
    pub fn slice(&self, from: usize, to: usize) -> Vec<Token> {
        let mut out = self.toks[from..to].to_vec();
        let end = self.toks[to].clone();
        out.push(Token { tok: Tok::Eof, ..end });
        out
    }

    pub fn here(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        let t = self.here();
        ParseError::new(t.line, t.column, msg)
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", describe(self.peek()))))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected a name, found {}", describe(&other)))),
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }
}

pub fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::CoName(s) => format!("`'{s}`"),
        Tok::Zero => "`0`".to_string(),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}
