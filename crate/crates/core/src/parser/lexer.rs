//! Tokenizer for the `.dsr` format.

use super::{ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Decimal (`12.5`) or fraction (`5/6`) literal without sign.
    Number(String),
    /// Number followed by `%`.
    Percent(String),
    Str(String),
    /// `?X`
    Var(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{}'", s),
            Tok::Number(s) => format!("number {}", s),
            Tok::Percent(s) => format!("percentage {}%", s),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Var(v) => format!("variable ?{}", v),
            Tok::Sym(s) => format!("'{}'", s),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

const SYMBOLS: [&str; 21] = [
    ":=", ":<", "::", "<=", ">=", "->", ":", ";", ",", ".", "(", ")", "[", "]", "{", "}", "<", ">", "-", "=", "∨",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens, ending with `Eof`.
pub fn tokenize(text: &str) -> Result<Vec<Token>, Vec<ParseDiagnostic>> {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let span_at = |offset: usize, line: usize, col: usize| SourceSpan { file: None, line, column: col, offset };
    while i < chars.len() {
        let (offset, c) = chars[i];
        let start_line = line;
        let start_col = col;
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1).map(|x| x.1) == Some('/') {
            while i < chars.len() && chars[i].1 != '\n' {
                advance(1, &mut i, &mut col);
            }
            continue;
        }
        let span = span_at(offset, start_line, start_col);
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j].1) {
                j += 1;
            }
            let word: String = chars[i..j].iter().map(|x| x.1).collect();
            advance(j - i, &mut i, &mut col);
            tokens.push(Token { tok: Tok::Ident(word), span });
            continue;
        }
        if c == '?' {
            let mut j = i + 1;
            while j < chars.len() && is_ident_char(chars[j].1) {
                j += 1;
            }
            if j == i + 1 {
                errors.push(ParseDiagnostic::error(span, "expected a variable name after '?'", None));
                advance(1, &mut i, &mut col);
                continue;
            }
            let word: String = chars[i + 1..j].iter().map(|x| x.1).collect();
            advance(j - i, &mut i, &mut col);
            tokens.push(Token { tok: Tok::Var(word), span });
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let is_digit_at = |k: usize| chars.get(k).is_some_and(|x| x.1.is_ascii_digit());
            if matches!(chars.get(j).map(|x| x.1), Some('.') | Some('/')) && is_digit_at(j + 1) {
                j += 1;
                while is_digit_at(j) {
                    j += 1;
                }
            }
            let number: String = chars[i..j].iter().map(|x| x.1).collect();
            if chars.get(j).map(|x| x.1) == Some('%') {
                advance(j + 1 - i, &mut i, &mut col);
                tokens.push(Token { tok: Tok::Percent(number), span });
            } else {
                advance(j - i, &mut i, &mut col);
                tokens.push(Token { tok: Tok::Number(number), span });
            }
            continue;
        }
        if c == '"' {
            let mut j = i + 1;
            let mut value = String::new();
            let mut closed = false;
            while j < chars.len() {
                match chars[j].1 {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' if j + 1 < chars.len() => {
                        value.push(match chars[j + 1].1 {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                        j += 2;
                    }
                    '\n' => break,
                    other => {
                        value.push(other);
                        j += 1;
                    }
                }
            }
            if !closed {
                errors.push(ParseDiagnostic::error(span, "unterminated string literal", None));
                advance(j - i, &mut i, &mut col);
                continue;
            }
            advance(j + 1 - i, &mut i, &mut col);
            tokens.push(Token { tok: Tok::Str(value), span });
            continue;
        }
        let rest = &text[offset..];
        if let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            advance(sym.chars().count(), &mut i, &mut col);
            tokens.push(Token { tok: Tok::Sym(sym), span });
            continue;
        }
        errors.push(ParseDiagnostic::error(span, &format!("unexpected character '{}'", c), None));
        advance(1, &mut i, &mut col);
    }
    let end = SourceSpan { file: None, line, column: col, offset: text.len() };
    tokens.push(Token { tok: Tok::Eof, span: end });
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}
