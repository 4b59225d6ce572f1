//! Run the Fibonacci program: `cargo run --example fibonacci -- 12`.

use lpcode::exec::{run_query, ExecConfig, MoveScript};
use lpcode::program::{Location, Residual};
use lpcode::syntax::parse_program;

fn main() {
    let n: u64 = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("a natural number"))
        .unwrap_or(4);
    let p = parse_program(include_str!("../programs/fib.lp")).unwrap();
    let (store, r) = run_query(
        &p,
        &Location::new("query"),
        &mut MoveScript::new(vec![n]),
        &ExecConfig::default(),
    );
    let outcome = r.expect("runs");
    println!("status {:?}", outcome.status);
    for (key, b) in store.iter() {
        println!("{key:<12} = {}", b.formula);
    }
    for (name, residual) in store.residuals() {
        match residual {
            Residual::Loop(lp) => println!("{name} continues from {}", lp.lower),
            Residual::Exhausted => println!("{name} is exhausted"),
        }
    }
    println!("prover calls: {}", store.prover_calls());
}
