//! Emit a trace, verify it, then show that a tampered copy is rejected.

use lpcode::exec::{emit_trace, run_query, ExecConfig, MoveScript};
use lpcode::program::Location;
use lpcode::syntax::parse_program;
use lpcode::trace::Trace;
use lpcode::wf::verify_trace;

fn main() {
    let p = parse_program(include_str!("../programs/fib.lp")).unwrap();
    let (store, r) = run_query(
        &p,
        &Location::new("query"),
        &mut MoveScript::new(vec![5]),
        &ExecConfig::default(),
    );
    let key = r.unwrap().key().cloned().unwrap();
    let text = emit_trace(&store, &p, &key).unwrap().render();
    print!("{text}");

    let t = Trace::parse(&text).unwrap();
    println!("verify: {:?}", verify_trace(&t, &p));

    let bad = Trace::parse(&text.replace("((x 2) (y 1) (z 2))", "((x 2) (y 2) (z 2))")).unwrap();
    match verify_trace(&bad, &p) {
        Ok(_) => println!("tampered trace accepted?"),
        Err(r) => println!("tampered: {r}"),
    }
}
