use std::fmt;

use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Slash,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    DotDot,
    Semi,
    Colon,
    Eq,
    Caret,
    Plus,
    Minus,
    Tilde,
    Amp,
    Bar,
    ChoiceAmp,
    ChoiceBar,
    Arrow,
    Bang,
    Question,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Int(n) => return write!(f, "integer `{n}`"),
            Tok::Slash => "`/`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::DotDot => "`..`",
            Tok::Semi => "`;`",
            Tok::Colon => "`:`",
            Tok::Eq => "`=`",
            Tok::Caret => "`^`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::ChoiceAmp => "`#&`",
            Tok::ChoiceBar => "`#|`",
            Tok::Arrow => "`->`",
            Tok::Bang => "`!`",
            Tok::Question => "`?`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub found: char,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let push = |tok: Tok, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: start_line,
                col: start_col,
            })
        };
        let peek = chars.get(i + 1).copied();
        let width = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => 1,
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                push(Tok::Int(text.parse().expect("digits")), &mut out);
                col += (i - start) as u32;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '$' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(Tok::Ident(chars[start..i].iter().collect()), &mut out);
                col += (i - start) as u32;
                continue;
            }
            '.' if peek == Some('.') => {
                push(Tok::DotDot, &mut out);
                2
            }
            '#' if peek == Some('&') => {
                push(Tok::ChoiceAmp, &mut out);
                2
            }
            '#' if peek == Some('|') => {
                push(Tok::ChoiceBar, &mut out);
                2
            }
            '-' if peek == Some('>') => {
                push(Tok::Arrow, &mut out);
                2
            }
            _ => {
                let tok = match c {
                    '/' => Tok::Slash,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    '=' => Tok::Eq,
                    '^' => Tok::Caret,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '~' => Tok::Tilde,
                    '&' => Tok::Amp,
                    '|' => Tok::Bar,
                    '!' => Tok::Bang,
                    '?' => Tok::Question,
                    other => {
                        return Err(LexError {
                            line,
                            col,
                            found: other,
                        })
                    }
                };
                push(tok, &mut out);
                1
            }
        };
        i += width;
        col += width as u32;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
