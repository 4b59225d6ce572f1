//! Parse a program, print its canonical rendering, and parse that again.

use lpcode::syntax::{parse_formula, parse_program};

fn main() {
    let src = include_str!("../programs/fib.lp");
    let p = parse_program(src).expect("fib.lp parses");
    let rendered = p.to_string();
    print!("{rendered}");
    assert_eq!(parse_program(&rendered).unwrap(), p);

    // Quantifier bodies are unary: the second formula needs parentheses.
    for f in ["?n. path(1,n) & path(n,4)", "?n. (path(1,n) & path(n,4))"] {
        let parsed = parse_formula(f).unwrap();
        println!("{f:<32} => {parsed}  free: {:?}", parsed.free_vars());
    }
}
