mod common;

use common::*;
use lpcode::exec::{
    emit_trace, execute, run_query, AgentKey, AgentStore, ExecConfig, ExecError, MoveScript, Status,
};
use lpcode::program::{Location, Residual};
use lpcode::syntax::parse_formula;

fn key(s: &str) -> AgentKey {
    s.parse().unwrap()
}

fn run(src: &str, target: &str, moves: Vec<u64>) -> (AgentStore, lpcode::exec::Outcome) {
    let (s, r) = run_query(
        &program(src),
        &loc(target),
        &mut MoveScript::new(moves),
        &ExecConfig::default(),
    );
    (s, r.unwrap())
}

fn keys(s: &AgentStore) -> Vec<String> {
    s.iter().map(|(k, _)| k.to_string()).collect()
}

#[test]
fn fib_four_golden_store() {
    let (s, o) = run(FIB, "/query", vec![4]);
    assert_eq!(o.status, Status::Success);
    assert_eq!(o.binding.unwrap().1, parse_formula("fib(4,3)").unwrap());
    assert_eq!(
        keys(&s),
        ["/a[1]", "/a[2]", "/a[3]", "/a[4]", "/fib@4", "/query@4", "/r[1]", "/r[2]", "/r[3]"]
    );
    let expect = [
        ("/a[3]", "fib(3,2)"),
        ("/a[4]", "fib(4,3)"),
        ("/fib@4", "fib(4,3)"),
    ];
    for (k, f) in expect {
        assert_eq!(s.get(&key(k)).unwrap().formula.to_string(), f);
    }
    assert_eq!(
        s.get(&key("/a[4]")).unwrap().deps,
        [key("/a[3]"), key("/a[2]"), key("/r[3]")]
    );
    assert_eq!(s.get(&key("/fib@4")).unwrap().deps, [key("/a[4]")]);
    assert_eq!(s.get(&key("/query@4")).unwrap().moves, [4]);
    match s.residual(&loc("/istep")) {
        Some(Residual::Loop(l)) => assert_eq!(l.lower, 5),
        other => panic!("{other:?}"),
    }
    // Axioms do not reach the prover.
    assert_eq!(s.prover_calls(), 6);
}

#[test]
fn base_case_unfolds_nothing() {
    let (s, o) = run(FIB, "/query", vec![1]);
    assert_eq!(o.binding.unwrap().1.to_string(), "fib(1,1)");
    assert!(s.residual(&loc("/istep")).is_none());
    assert!(!s.contains(&key("/a[3]")));
}

#[test]
fn fib_ten() {
    let (_, o) = run(FIB, "/query", vec![10]);
    assert_eq!(o.binding.unwrap().1.to_string(), "fib(10,55)");
}

#[test]
fn fib_matches_oracle() {
    for n in 1..=40u32 {
        let (_, o) = run(FIB, "/query", vec![n as u64]);
        assert_eq!(
            o.binding.unwrap().1.to_string(),
            format!("fib({n},{})", fib_oracle(n))
        );
    }
}

#[test]
fn forward_runs_dependencies_first() {
    let (s, o) = run(FORWARD, "/z", vec![]);
    assert_eq!(o.binding.unwrap().1.to_string(), "p(0,1)");
    assert_eq!(s.get(&key("/y")).unwrap().formula.to_string(), "p(0,1)");
    let order: Vec<String> = s.call_log().iter().map(|k| k.to_string()).collect();
    assert_eq!(order, ["/y", "/z"]);
}

#[test]
fn lemma_candidate_is_chosen() {
    let (_, o) = run(LEMMAS, "/l", vec![]);
    assert_eq!(o.binding.unwrap().1.to_string(), "path(1,2) & path(2,4)");
}

#[test]
fn triangle_hundred() {
    let (_, o) = run(TRIANGLE, "/q", vec![100]);
    assert_eq!(o.binding.unwrap().1.to_string(), "tri(100,5050)");
}

#[test]
fn memoized_queries_only_do_new_work() {
    let p = program(FIB);
    let q = loc("/query");
    let cfg = ExecConfig::default();
    let mut store = AgentStore::new();
    let calls = |store: &mut AgentStore, n: u64| {
        let before = store.prover_calls() as usize;
        let o = execute(store, &p, &q, &mut MoveScript::new(vec![n]), &cfg).unwrap();
        assert!(o.is_success());
        store.call_log()[before..]
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(calls(&mut store, 8).len(), 10);
    assert_eq!(
        calls(&mut store, 10),
        ["/a[9]", "/a[10]", "/fib@10", "/query@10"]
    );
    assert!(calls(&mut store, 10).is_empty());
    assert!(calls(&mut store, 10).is_empty());
    assert_eq!(calls(&mut store, 3), ["/fib@3", "/query@3"]);
}

#[test]
fn store_is_write_once() {
    let (mut s, _) = run(FORWARD, "/z", vec![]);
    let b = s.get(&key("/x")).unwrap().clone();
    let err = s.insert(key("/x"), b).unwrap_err();
    assert_eq!(err.0, key("/x"));
}

#[test]
fn bindings_are_ground_and_choice_free() {
    let (s, _) = run(FIB, "/query", vec![12]);
    for (k, b) in s.iter() {
        if k.loc.name == "r" {
            continue;
        }
        let text = b.formula.to_string();
        assert!(!text.contains('?') && !text.contains('!'), "{k} = {text}");
        assert!(!text.contains('+'), "{k} = {text}");
    }
}

#[test]
fn missing_move_is_reported() {
    let (_, r) = run_query(
        &program(FIB),
        &loc("/query"),
        &mut MoveScript::new(vec![]),
        &ExecConfig::default(),
    );
    assert!(matches!(r, Err(ExecError::MoveUnderflow { ref var, .. }) if var == "x"));
}

#[test]
fn unknown_location() {
    let (_, r) = run_query(
        &program(""),
        &loc("/x"),
        &mut MoveScript::new(vec![]),
        &ExecConfig::default(),
    );
    assert_eq!(r, Err(ExecError::UnknownLocation(Location::new("x"))));
}

#[test]
fn non_consequence_is_a_violation() {
    let (s, o) = run(CONSEQUENCE, "/z", vec![]);
    assert_eq!(o.status, Status::WellFormednessViolation);
    assert_eq!(o.failed_at, Some(key("/z")));
    assert!(!s.contains(&key("/z")));
    // The sibling that does follow still runs.
    let (_, o) = run(CONSEQUENCE, "/y", vec![]);
    assert_eq!(o.binding.unwrap().1.to_string(), "p(0,1)");
}

#[test]
fn move_zero_has_no_instance() {
    let (_, o) = run(FIB, "/query", vec![0]);
    assert_eq!(o.status, Status::Failure);
}

#[test]
fn unfold_cap_is_a_limit() {
    let cfg = ExecConfig {
        max_unfold: 5,
        ..ExecConfig::default()
    };
    let (_, r) = run_query(
        &program(FIB),
        &loc("/query"),
        &mut MoveScript::new(vec![9]),
        &cfg,
    );
    assert_eq!(r.unwrap().status, Status::LimitExhausted);
    let (_, r) = run_query(
        &program(FIB),
        &loc("/query"),
        &mut MoveScript::new(vec![5]),
        &cfg,
    );
    assert!(r.unwrap().is_success());
}

const FINITE: &str = "/r[1] = tri(1,1).
/r[2] = all x, s. (tri(x,s) -> tri(x+1,s+x+1)).
/a[1] = ?s. tri(1,s) ^ {/r[1]}.
/l = for i in 2..5 : /a[i] = ?s. tri(i,s) ^ {/a[i-1], /r[2]}.
/top = ?s. tri(6,s) ^ {/a[5], /r[2]}.
";

const UNFOLDED: &str = "/r[1] = tri(1,1).
/r[2] = all x, s. (tri(x,s) -> tri(x+1,s+x+1)).
/a[1] = ?s. tri(1,s) ^ {/r[1]}.
/a[2] = ?s. tri(2,s) ^ {/a[1], /r[2]}.
/a[3] = ?s. tri(3,s) ^ {/a[2], /r[2]}.
/a[4] = ?s. tri(4,s) ^ {/a[3], /r[2]}.
/a[5] = ?s. tri(5,s) ^ {/a[4], /r[2]}.
/top = ?s. tri(6,s) ^ {/a[5], /r[2]}.
";

#[test]
fn unfolding_commutes_with_execution() {
    let (looped, o1) = run(FINITE, "/top", vec![]);
    let (flat, o2) = run(UNFOLDED, "/top", vec![]);
    assert_eq!(o1.binding, o2.binding);
    assert_eq!(o1.binding.unwrap().1.to_string(), "tri(6,21)");
    let strip = |s: &AgentStore| -> Vec<(String, String, String)> {
        s.iter()
            .map(|(k, b)| {
                (
                    k.to_string(),
                    b.formula.to_string(),
                    format!("{:?}", b.derivation),
                )
            })
            .collect()
    };
    assert_eq!(strip(&looped), strip(&flat));
    assert_eq!(looped.residual(&loc("/l")), Some(&Residual::Exhausted));
}

#[test]
fn replay_is_byte_identical() {
    let p = program(FIB);
    let render = || {
        let (s, r) = run_query(
            &p,
            &loc("/query"),
            &mut MoveScript::new(vec![15]),
            &ExecConfig::default(),
        );
        let k = r.unwrap().binding.unwrap().0;
        emit_trace(&s, &p, &k).unwrap().render()
    };
    let first = render();
    for _ in 0..5 {
        assert_eq!(render(), first);
    }
}
