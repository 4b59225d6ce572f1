//! One store across several queries: only new work reaches the prover.

use lpcode::exec::{execute, AgentStore, ExecConfig, MoveScript};
use lpcode::program::Location;
use lpcode::syntax::parse_program;

fn main() {
    let p = parse_program(include_str!("../programs/fib.lp")).unwrap();
    let q = Location::new("query");
    let mut store = AgentStore::new();
    for n in [8, 10, 10, 3] {
        let before = store.prover_calls() as usize;
        let o = execute(
            &mut store,
            &p,
            &q,
            &mut MoveScript::new(vec![n]),
            &ExecConfig::default(),
        )
        .unwrap();
        let new: Vec<String> = store.call_log()[before..]
            .iter()
            .map(|k| k.to_string())
            .collect();
        println!(
            "{:<16} prover calls: {:?}",
            o.binding.unwrap().1.to_string(),
            new
        );
    }
}
