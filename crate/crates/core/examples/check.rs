//! Well-formedness diagnostics for a few small programs.

use lpcode::prover::SearchLimits;
use lpcode::syntax::parse_program;
use lpcode::wf::check_program;

fn main() {
    let cases = [
        include_str!("../programs/consequence.lp"),
        "/x = p(0,1).\n/x = p(0,5).",
        "/y = ?w. p(0,w) ^ {/w}.",
        "/x = p ^ {/y}.\n/y = p ^ {/x}.",
        "/x = p(0,5).\n/y = ?w. p(0,w) ^ {/x}.\n/z = p(0,5) ^ {/y}.",
    ];
    for src in cases {
        let p = parse_program(src).unwrap();
        println!("--\n{}", src.trim());
        for d in check_program(&p, SearchLimits::default()) {
            println!("  {d}");
        }
    }
}
