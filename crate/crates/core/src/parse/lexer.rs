use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase identifier.
    Ident(String),
    /// Lowercase identifier immediately followed by `_[`; the name excludes
    /// the underscore.
    ShapedIdent(String),
    Var(String),
    Number(String),
    Null(u32),
    LParen,
    RParen,
    RBracket,
    Comma,
    Dot,
    Bar,
    Question,
    Arrow,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            })
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            ']' => push(&mut out, Tok::RBracket),
            ',' => push(&mut out, Tok::Comma),
            '.' => push(&mut out, Tok::Dot),
            '|' => push(&mut out, Tok::Bar),
            '?' => push(&mut out, Tok::Question),
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(&mut out, Tok::Arrow);
                i += 2;
                col += 2;
                continue;
            }
            '_' if chars.get(i + 1) == Some(&':') && chars.get(i + 2) == Some(&'n') => {
                let start = i + 3;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[start..j].iter().collect();
                let id = digits
                    .parse::<u32>()
                    .map_err(|_| ParseError::new(tl, tc, "malformed null, expected _:n<digits>"))?;
                push(&mut out, Tok::Null(id));
                col += j - i;
                i = j;
                continue;
            }
            c if c.is_ascii_alphanumeric() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = if c.is_ascii_digit() {
                    if !word.chars().all(|d| d.is_ascii_digit()) {
                        return Err(ParseError::new(tl, tc, format!("malformed number '{word}'")));
                    }
                    Tok::Number(word)
                } else if c.is_ascii_uppercase() {
                    Tok::Var(word)
                } else if word.ends_with('_') && chars.get(j) == Some(&'[') {
                    j += 1;
                    Tok::ShapedIdent(word[..word.len() - 1].to_string())
                } else {
                    Tok::Ident(word)
                };
                push(&mut out, tok);
                col += j - i;
                i = j;
                continue;
            }
            other => return Err(ParseError::new(tl, tc, format!("unexpected character '{other}'"))),
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}
