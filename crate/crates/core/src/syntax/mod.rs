//! Concrete syntax for `.lp` programs.
//!
//! ```text
//! program   := { stmt ("." | ";") }
//! stmt      := loc "=" formula deps?
//!            | loc "=" "for" IDENT "in" INT ".." (INT | "inf") ":" loc "=" formula deps?
//! deps      := "^" "{" dep { "," dep } "}"       dep := "IND" | "GIND" | loc
//! loc       := "/" IDENT [ "[" index "]" ]       index := INT | IDENT [ ("+" | "-") INT ]
//! formula   := junction [ "->" formula ]
//! junction  := levels `#|` < `#&` < `|` < `&`, each n-ary
//! unary     := "~" unary | ("!" | "?" | "all" | "exi") IDENT {"," IDENT} "." unary
//!            | "tt" | "ff" | "(" formula ")" | IDENT [ "(" term {"," term} ")" ]
//! term      := primary { "+" primary }          primary := INT | IDENT | "(" term ")"
//! ```
//!
//! A statement ending in `;` is sequenced before the statement after it.
//! `%` starts a line comment. Rendering goes through `Display` and always
//! parses back to the same structure.

mod lexer;
mod parser;
mod render;

pub use parser::{
    parse_atom, parse_formula, parse_location, parse_program, parse_term, ParseError,
};
