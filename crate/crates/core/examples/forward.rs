//! Sequencing with `;`: executing /z runs /x and /y first.

use lpcode::exec::{run_query, ExecConfig, MoveScript};
use lpcode::program::{dependency_order, Location};
use lpcode::syntax::parse_program;

fn main() {
    let p = parse_program(include_str!("../programs/forward.lp")).unwrap();
    let z = Location::new("z");
    let order = dependency_order(&p, &z).unwrap();
    println!(
        "order: {}",
        order
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    let (store, r) = run_query(&p, &z, &mut MoveScript::default(), &ExecConfig::default());
    assert!(r.unwrap().is_success());
    for (key, b) in store.iter() {
        println!("{key} = {}", b.formula);
    }
}
