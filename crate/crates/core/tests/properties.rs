mod common;

use std::collections::BTreeSet;

use lpcode::formula::{
    alpha_eq, eval_term, substitute, Atom, Formula, Junction, Quantifier, Substitution, Term,
};
use lpcode::program::{
    dependency_order, unfold_loop, Assignment, Dep, ForLoop, IndexExpr, LocRef, Location, Program,
    Residual, Span, Statement, Upper,
};
use lpcode::prover::{derive, Derivation, Goal, KnowledgeBase, SearchLimits};
use lpcode::syntax::{parse_formula, parse_program};
use lpcode::wf::{check_structural, Code};
use num_bigint::BigInt;
use proptest::prelude::*;

const VARS: &[&str] = &["x", "y", "z", "w"];
const PREDS: &[&str] = &["p", "q", "fib"];

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0u32..100).prop_map(Term::int),
        proptest::sample::select(VARS).prop_map(Term::var),
    ];
    leaf.prop_recursive(3, 8, 2, |inner| {
        (inner.clone(), inner).prop_map(|(a, b)| Term::sum(a, b))
    })
}

fn atom() -> impl Strategy<Value = Atom> {
    (
        proptest::sample::select(PREDS),
        proptest::collection::vec(term(), 0..3),
    )
        .prop_map(|(p, args)| Atom::new(p, args))
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::Truth),
        Just(Formula::Falsity),
        atom().prop_map(Formula::Atomic),
        atom().prop_map(Formula::Atomic),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let junction = proptest::sample::select(vec![
            Junction::ParAnd,
            Junction::ParOr,
            Junction::ChoiceAnd,
            Junction::ChoiceOr,
        ]);
        let quant = proptest::sample::select(vec![
            Quantifier::ChoiceAll,
            Quantifier::ChoiceExists,
            Quantifier::BlindAll,
            Quantifier::BlindExists,
        ]);
        prop_oneof![
            inner.clone().prop_map(Formula::negate),
            (junction, proptest::collection::vec(inner.clone(), 2..4))
                .prop_map(|(j, xs)| Formula::Junction(j, xs)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (quant, proptest::sample::select(VARS), inner)
                .prop_map(|(q, v, b)| Formula::quant(q, v, b)),
        ]
    })
}

fn ground_term() -> impl Strategy<Value = Term> {
    let leaf = any::<u64>().prop_map(Term::int);
    leaf.prop_recursive(6, 64, 2, |inner| {
        (inner.clone(), inner).prop_map(|(a, b)| Term::sum(a, b))
    })
}

fn naive_eval(t: &Term) -> BigInt {
    match t {
        Term::Int(n) => n.clone(),
        Term::Sum(a, b) => naive_eval(a) + naive_eval(b),
        Term::Var(_) => unreachable!("ground"),
    }
}

fn subst() -> impl Strategy<Value = Substitution> {
    proptest::collection::btree_map(proptest::sample::select(VARS), term(), 0..3).prop_map(|m| {
        m.into_iter()
            .map(|(v, t)| (v.to_string(), t))
            .collect::<Substitution>()
    })
}

fn loc_ref() -> impl Strategy<Value = LocRef> {
    prop_oneof![
        proptest::sample::select(vec!["x", "y", "r", "q"]).prop_map(LocRef::plain),
        (proptest::sample::select(vec!["a", "r"]), 0u64..6)
            .prop_map(|(n, k)| LocRef::at(n, IndexExpr::Lit(k))),
    ]
}

fn deps() -> impl Strategy<Value = Vec<Dep>> {
    (
        proptest::collection::vec(loc_ref().prop_map(Dep::Loc), 0..3),
        0u8..3,
    )
        .prop_map(|(mut ds, tag)| {
            match tag {
                1 => ds.insert(0, Dep::Ind),
                2 => ds.insert(0, Dep::Gind),
                _ => {}
            }
            ds
        })
}

fn statement() -> impl Strategy<Value = Statement> {
    let assign = (loc_ref(), formula(), deps()).prop_map(|(target, f, deps)| {
        Statement::Assign(Assignment {
            target,
            formula: f.with_distinct_binders(&[]),
            deps,
            span: Span::default(),
        })
    });
    let body_dep = prop_oneof![
        (1i64..3).prop_map(|k| LocRef::at("a", IndexExpr::var("i", -k))),
        loc_ref(),
    ];
    let lp = (
        0u64..4,
        proptest::option::of(0u64..5),
        formula(),
        proptest::collection::vec(body_dep, 0..3),
    )
        .prop_map(|(lower, span, f, ds)| {
            Statement::Loop(ForLoop {
                name: Location::new("istep"),
                index_var: "i".into(),
                lower,
                upper: span.map_or(Upper::Infinite, |n| Upper::Finite(lower + n)),
                body: Assignment {
                    target: LocRef::at("a", IndexExpr::var("i", 0)),
                    formula: f.with_distinct_binders(&["i".to_string()]),
                    deps: ds.into_iter().map(Dep::Loc).collect(),
                    span: Span::default(),
                },
                span: Span::default(),
            })
        });
    prop_oneof![3 => assign, 1 => lp]
}

fn arb_program() -> impl Strategy<Value = Program> {
    proptest::collection::vec((statement(), any::<bool>()), 0..5).prop_map(|ss| {
        let n = ss.len();
        let mut p = Program::default();
        for (i, (s, chained)) in ss.into_iter().enumerate() {
            p.push(s, chained && i + 1 < n);
        }
        p
    })
}

fn fib_kb() -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    kb.push(
        Location::indexed("r", 1),
        parse_formula("fib(1,1)").unwrap(),
    );
    kb.push(
        Location::indexed("r", 2),
        parse_formula("fib(2,1)").unwrap(),
    );
    kb.push(
        Location::indexed("r", 3),
        parse_formula("all x, y, z. (fib(x,y) & fib(x+1,z) -> fib(x+2,y+z))").unwrap(),
    );
    kb
}

fn sum_free(d: &Derivation) -> bool {
    let flat = |a: &Atom| a.args.iter().all(|t| matches!(t, Term::Int(_)));
    match d {
        Derivation::Fact { atom, .. } => flat(atom),
        Derivation::Rule {
            premises,
            conclusion,
            subst,
            ..
        } => {
            flat(conclusion)
                && subst.iter().all(|(_, t)| matches!(t, Term::Int(_)))
                && premises.iter().all(sum_free)
        }
        Derivation::Pick { sub, .. } => sum_free(sub),
        Derivation::And(xs) => xs.iter().all(sum_free),
        Derivation::Truth | Derivation::Axiom { .. } => true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_parse_round_trip(p in arb_program()) {
        let text = p.to_string();
        let back = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, p, "{}", text);
    }

    #[test]
    fn formula_round_trip(f in formula()) {
        let f = f.with_distinct_binders(&[]);
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn substitution_composes(f in formula(), s in subst(), t in subst()) {
        let f = f.with_distinct_binders(&[]);
        let twice = substitute(&substitute(&f, &s), &t);
        let once = substitute(&f, &s.then(&t));
        prop_assert!(alpha_eq(&twice, &once), "{} vs {}", twice, once);
    }

    #[test]
    fn substituting_ground_terms_is_idempotent(f in formula(), vals in proptest::collection::vec(0u32..9, 4)) {
        let s: Substitution = VARS.iter().zip(vals).map(|(v, n)| (v.to_string(), Term::int(n))).collect();
        prop_assert!(s.is_idempotent());
        let once = substitute(&f, &s);
        prop_assert_eq!(substitute(&once, &s), once);
    }

    #[test]
    fn instantiate_is_substitution(lower in 0u64..5, off in 0u64..20) {
        let p = common::program(common::FIB);
        let lp = p.loops().next().unwrap().1.clone();
        let lp = ForLoop { lower: lower + 2, ..lp };
        let i = lp.lower + off;
        let inst = lp.instance(i).unwrap();
        let expect = substitute(&lp.body.formula, &Substitution::singleton("i", Term::int(i)));
        prop_assert_eq!(inst.formula, expect);
        prop_assert_eq!(inst.target.concrete(), Some(Location::indexed("a", i)));
    }

    #[test]
    fn unfold_concatenates(lower in 0u64..5, k in 0u64..10, more in 1u64..10, bound in proptest::option::of(0u64..30)) {
        let p = common::program(common::TRIANGLE);
        let lp = p.loops().next().unwrap().1.clone();
        let lp = ForLoop {
            lower: lower + 1,
            upper: bound.map_or(Upper::Infinite, |b| Upper::Finite(lower + 1 + b)),
            ..lp
        };
        let k = lp.lower + k;
        let k2 = k + more;
        prop_assume!(lp.covers(k2));
        let (first, residual) = unfold_loop(&lp, k).unwrap();
        prop_assert_eq!(first.len() as u64, k - lp.lower + 1);
        let Residual::Loop(rest) = residual else { return Err(TestCaseError::fail("exhausted early")) };
        prop_assert_eq!(rest.lower, k + 1);
        let (second, _) = unfold_loop(&rest, k2).unwrap();
        let (all, _) = unfold_loop(&lp, k2).unwrap();
        let joined: Vec<_> = first.into_iter().chain(second).collect();
        prop_assert_eq!(joined, all);
    }

    #[test]
    fn dependency_order_is_topological(n in 1u64..40) {
        let p = common::program(common::FIB);
        let order = dependency_order(&p, &Location::indexed("a", n)).unwrap();
        let set: BTreeSet<_> = order.iter().collect();
        prop_assert_eq!(set.len(), order.len());
        prop_assert_eq!(order.last(), Some(&Location::indexed("a", n)));
        for (i, l) in order.iter().enumerate() {
            let a = p.assignment_at(l).unwrap();
            for d in a.dep_locations().filter_map(|r| r.concrete()) {
                if d.name == "istep" { continue }
                let j = order.iter().position(|x| *x == d).unwrap();
                prop_assert!(j < i, "{} before {}", d, l);
            }
        }
    }

    #[test]
    fn derive_is_deterministic_and_monotone(n in 1u64..15, depth in 1u32..40, steps in 1u64..3000, extra in 0u32..20, extra_steps in 0u64..5000) {
        let kb = fib_kb();
        let goal = Goal::from_formula(&parse_formula(&format!("?y. fib({n},y)")).unwrap()).unwrap();
        let small = SearchLimits::new(depth, steps).unwrap();
        let big = SearchLimits::new(depth + extra, steps + extra_steps).unwrap();
        let a = derive(&goal, &kb, small);
        prop_assert_eq!(&a, &derive(&goal, &kb, small));
        if let Ok(pa) = a {
            let pb = derive(&goal, &kb, big).unwrap();
            prop_assert_eq!(pa.subst, pb.subst);
            prop_assert_eq!(pa.derivation, pb.derivation);
        }
    }

    #[test]
    fn derivations_carry_no_sums(n in 1u64..12) {
        let goal = Goal::from_formula(&parse_formula(&format!("?y. fib({n},y)")).unwrap()).unwrap();
        let proof = derive(&goal, &fib_kb(), SearchLimits::default()).unwrap();
        prop_assert!(sum_free(&proof.derivation));
        prop_assert!(proof.subst.is_idempotent());
    }

    #[test]
    fn arity_clash_is_reported(a in 0usize..3, b in 0usize..3) {
        prop_assume!(a != b);
        let args = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        let atom = |n: usize| if n == 0 { "p".to_string() } else { format!("p({})", args(n)) };
        let src = format!("/x = {}.\n/y = {} ^ {{/x}}.", atom(a), atom(b));
        let ds = check_structural(&parse_program(&src).unwrap());
        prop_assert!(ds.iter().any(|d| d.code == Code::ArityClash));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eval_matches_naive_oracle(t in ground_term()) {
        prop_assert_eq!(eval_term(&t).unwrap(), naive_eval(&t));
    }
}
