//! `#|` picks the first lemma candidate that follows from the knowledge.

use lpcode::exec::{run_query, ExecConfig, MoveScript};
use lpcode::program::Location;
use lpcode::prover::{select_lemma, Goal, KnowledgeBase, SearchLimits};
use lpcode::syntax::{parse_formula, parse_program};
use lpcode::trace::derivation_sexpr;

fn main() {
    let p = parse_program(include_str!("../programs/lemmas.lp")).unwrap();
    let (store, r) = run_query(
        &p,
        &Location::new("l"),
        &mut MoveScript::default(),
        &ExecConfig::default(),
    );
    let (key, f) = r.unwrap().binding.unwrap();
    println!("{key} = {f}");
    println!("{}", derivation_sexpr(&store.get(&key).unwrap().derivation));

    // The same selection by hand, over fib facts.
    let mut kb = KnowledgeBase::new();
    for (i, f) in [
        "fib(1,1)",
        "fib(2,1)",
        "all x, y, z. (fib(x,y) & fib(x+1,z) -> fib(x+2,y+z))",
    ]
    .iter()
    .enumerate()
    {
        kb.push(
            Location::indexed("r", i as u64 + 1),
            parse_formula(f).unwrap(),
        );
    }
    let cands: Vec<Goal> = ["fib(5,4)", "?y. fib(5,y)"]
        .iter()
        .map(|c| Goal::from_formula(&parse_formula(c).unwrap()).unwrap())
        .collect();
    let proof = select_lemma(&cands, &kb, SearchLimits::default()).unwrap();
    println!(
        "picked candidate {:?}: {}",
        proof.pick,
        cands[1].evolve(&proof)
    );
}
