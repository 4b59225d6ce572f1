//! IND and GIND schemes: validation, static verdicts, and a run that
//! dispatches move n to the loop instance at n.

use lpcode::exec::{run_query, ExecConfig, MoveScript};
use lpcode::program::{validate_induction, Location};
use lpcode::prover::SearchLimits;
use lpcode::syntax::parse_program;
use lpcode::wf::statement_verdicts;

fn main() {
    for (file, src, query, n) in [
        (
            "triangle.lp",
            include_str!("../programs/triangle.lp"),
            "q",
            10,
        ),
        ("fib.lp", include_str!("../programs/fib.lp"), "query", 20),
    ] {
        let p = parse_program(src).unwrap();
        println!("== {file}");
        for (_, a) in p
            .assignments()
            .filter(|(_, a)| !a.induction_tags().is_empty())
        {
            let s = validate_induction(a, &p).unwrap();
            println!(
                "{} : {:?} order {} bases {:?} step {}",
                a.target, s.kind, s.order, s.bases, s.step
            );
        }
        for (i, v) in statement_verdicts(&p, SearchLimits::default()) {
            println!("  statement {i}: {v:?}");
        }
        let (_, r) = run_query(
            &p,
            &Location::new(query),
            &mut MoveScript::new(vec![n]),
            &ExecConfig::default(),
        );
        let (key, f) = r.unwrap().binding.unwrap();
        println!("  {key} = {f}");
    }
}
