use crate::feature::is_atom_char;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Bare word: identifiers and unquoted atoms.
    Word(String),
    Quoted(String),
    Var(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Arrow,
    ScopeArrow,
    Gt,
    Lt,
    Slashes,
    Dot,
}

#[derive(Clone, Debug)]
pub(crate) struct Lexeme {
    pub tok: Tok,
    /// 1-based character column.
    pub column: usize,
    pub length: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct LexError {
    pub column: usize,
    pub length: usize,
    pub message: String,
}

/// Splits one line into lexemes, stopping at a `#` comment.
pub(crate) fn lex_line(line: &str) -> Result<Vec<Lexeme>, LexError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let simple = |tok: Tok, len: usize| Lexeme { tok, column: start + 1, length: len };
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '#' => break,
            '(' => out.push(simple(Tok::LParen, 1)),
            ')' => out.push(simple(Tok::RParen, 1)),
            '[' => out.push(simple(Tok::LBracket, 1)),
            ']' => out.push(simple(Tok::RBracket, 1)),
            ',' => out.push(simple(Tok::Comma, 1)),
            ':' => out.push(simple(Tok::Colon, 1)),
            '<' => out.push(simple(Tok::Lt, 1)),
            '.' => out.push(simple(Tok::Dot, 1)),
            '>' => out.push(simple(Tok::Gt, 1)),
            '=' | '~' if chars.get(i + 1) == Some(&'>') => {
                let tok = if c == '=' { Tok::Arrow } else { Tok::ScopeArrow };
                out.push(simple(tok, 2));
                i += 2;
                continue;
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                out.push(simple(Tok::Slashes, 2));
                i += 2;
                continue;
            }
            '\'' => {
                let mut text = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None => {
                            return Err(LexError {
                                column: start + 1,
                                length: chars.len() - start,
                                message: "unterminated quoted string".into(),
                            })
                        }
                        Some('\'') => break,
                        Some('\\') => {
                            let escaped = match chars.get(j + 1) {
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                Some('\\') => '\\',
                                Some('\'') => '\'',
                                _ => {
                                    return Err(LexError {
                                        column: j + 1,
                                        length: if j + 1 < chars.len() { 2 } else { 1 },
                                        message: "invalid escape sequence".into(),
                                    })
                                }
                            };
                            text.push(escaped);
                            j += 2;
                        }
                        Some(&ch) => {
                            text.push(ch);
                            j += 1;
                        }
                    }
                }
                out.push(Lexeme { tok: Tok::Quoted(text), column: start + 1, length: j + 1 - start });
                i = j + 1;
                continue;
            }
            '$' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '-') {
                    j += 1;
                }
                let name: String = chars[i + 1..j].iter().collect();
                if !crate::feature::is_identifier(&name) {
                    return Err(LexError {
                        column: start + 1,
                        length: j - start,
                        message: "expected a variable name after `$`".into(),
                    });
                }
                out.push(Lexeme { tok: Tok::Var(name), column: start + 1, length: j - start });
                i = j;
                continue;
            }
            c if is_atom_char(c) => {
                let mut j = i;
                while j < chars.len() && is_atom_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                out.push(Lexeme { tok: Tok::Word(word), column: start + 1, length: j - start });
                i = j;
                continue;
            }
            other => {
                return Err(LexError {
                    column: start + 1,
                    length: 1,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}
