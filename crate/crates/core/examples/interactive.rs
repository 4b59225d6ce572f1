//! Moves typed on stdin: `echo 7 | cargo run --example interactive`.

use std::io;

use lpcode::exec::{run_query, ExecConfig, Interactive};
use lpcode::program::Location;
use lpcode::syntax::parse_program;

fn main() {
    let p = parse_program(include_str!("../programs/triangle.lp")).unwrap();
    let mut moves = Interactive::new(io::stdin().lock(), io::stdout());
    let (_, r) = run_query(&p, &Location::new("q"), &mut moves, &ExecConfig::default());
    match r {
        Ok(o) => println!(
            "\n{:?}: {}",
            o.status,
            o.binding.map(|b| b.1.to_string()).unwrap_or_default()
        ),
        Err(e) => println!("\n{e}"),
    }
}
