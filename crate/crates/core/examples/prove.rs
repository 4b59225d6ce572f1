//! Backward chaining on a small knowledgebase, with the derivation printed.

use lpcode::program::Location;
use lpcode::prover::{derive, Goal, KnowledgeBase, SearchLimits};
use lpcode::syntax::parse_formula;
use lpcode::trace::derivation_sexpr;

fn main() {
    let mut kb = KnowledgeBase::new();
    for (loc, f) in [
        ("a", "fib(2,1)"),
        ("b", "fib(3,2)"),
        ("r", "all x, y, z. (fib(x,y) & fib(x+1,z) -> fib(x+2,y+z))"),
    ] {
        kb.push(Location::new(loc), parse_formula(f).unwrap());
    }
    let goal = Goal::from_formula(&parse_formula("?w. fib(4,w)").unwrap()).unwrap();
    let proof = derive(&goal, &kb, SearchLimits::default()).expect("derivable");
    println!("witness   {}", proof.subst);
    println!("evolves   {}", goal.evolve(&proof));
    println!("steps     {}", proof.steps);
    println!("derivation {}", derivation_sexpr(&proof.derivation));

    let no = Goal::from_formula(&parse_formula("fib(4,4)").unwrap()).unwrap();
    println!(
        "fib(4,4): {:?}",
        derive(&no, &kb, SearchLimits::default()).unwrap_err()
    );
}
