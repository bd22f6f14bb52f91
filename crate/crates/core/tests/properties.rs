use otconv::replication::{dominates, VectorClock};
use otconv::select::coherent_strategies;
use otconv::simulator::{run_all_orders, run_scenario, Event, Mode, Scenario};
use otconv::verify::{enumerate_operations, OperationDomain};
use otconv::{apply, transform_along, Algorithm, Document, OpKind, Operation, Transform};
use proptest::prelude::*;

fn catalog() -> Vec<Box<dyn Transform>> {
    let mut v: Vec<Box<dyn Transform>> = Algorithm::PUBLISHED.iter().map(|a| Box::new(*a) as Box<dyn Transform>).collect();
    v.extend(coherent_strategies().into_iter().map(|s| Box::new(s) as Box<dyn Transform>));
    v
}

#[test]
fn nop_laws_over_default_domain() {
    let dom = OperationDomain::default();
    let all = catalog();
    assert_eq!(all.len(), 11);
    for it in &all {
        for op in enumerate_operations(&dom, it) {
            assert_eq!(it.transform(&op, &Operation::Nop), Ok(op.clone()), "{}", it.name());
            assert_eq!(it.transform(&Operation::Nop, &op), Ok(Operation::Nop), "{}", it.name());
        }
    }
}

#[test]
fn transforms_shift_by_at_most_one_and_keep_kind() {
    let dom = OperationDomain::new(3, "abc", 1).unwrap();
    for it in catalog() {
        let ops = enumerate_operations(&dom, &it);
        for a in &ops {
            for b in &ops {
                let Ok(t) = it.transform(a, b) else { continue };
                if t.is_nop() {
                    continue;
                }
                assert_eq!(t.kind(), a.kind(), "{} {a} {b}", it.name());
                assert_eq!(t.symbol(), a.symbol());
                assert!((t.position().unwrap() - a.position().unwrap()).abs() <= 1, "{} {a} {b} -> {t}", it.name());
            }
        }
    }
}

fn doc_strategy() -> impl Strategy<Value = Document> {
    proptest::collection::vec(prop::char::range('a', 'e'), 0..8).prop_map(Document::new)
}

fn op_strategy() -> impl Strategy<Value = Operation> {
    prop_oneof![
        (-1i64..9).prop_map(Operation::del),
        ((-1i64..9), prop::char::range('a', 'e')).prop_map(|(p, c)| Operation::ins(p, c)),
        Just(Operation::Nop),
    ]
}

proptest! {
    #[test]
    fn apply_respects_bounds(doc in doc_strategy(), op in op_strategy()) {
        let len = doc.len() as i64;
        match (&op, apply(&op, &doc)) {
            (Operation::Nop, r) => prop_assert_eq!(r, Ok(doc.clone())),
            (Operation::Ins { pos, ch, .. }, Ok(d)) => {
                prop_assert!(*pos >= 0 && *pos <= len);
                prop_assert_eq!(d.len(), doc.len() + 1);
                prop_assert_eq!(d.get(*pos), Some(*ch));
            }
            (Operation::Del { pos }, Ok(d)) => {
                prop_assert!(*pos >= 0 && *pos < len);
                prop_assert_eq!(d.len(), doc.len() - 1);
            }
            (Operation::Ins { pos, .. }, Err(_)) => prop_assert!(*pos < 0 || *pos > len),
            (Operation::Del { pos }, Err(_)) => prop_assert!(*pos < 0 || *pos >= len),
        }
    }

    #[test]
    fn insert_then_delete_restores(doc in doc_strategy(), p in 0usize..9, c in prop::char::range('a', 'e')) {
        let p = p.min(doc.len()) as i64;
        let d = apply(&Operation::ins(p, c), &doc).unwrap();
        prop_assert_eq!(apply(&Operation::del(p), &d).unwrap(), doc);
    }

    #[test]
    fn transform_along_concatenates(
        op in op_strategy(),
        s1 in proptest::collection::vec(op_strategy(), 0..4),
        s2 in proptest::collection::vec(op_strategy(), 0..4),
        pick in 0usize..11,
    ) {
        let all = catalog();
        let it = &all[pick];
        let family = it.family();
        let fresh = |o: &Operation| family.fresh(o, 1);
        let (op, s1, s2): (Operation, Vec<_>, Vec<_>) =
            (fresh(&op), s1.iter().map(|o| family.fresh(o, 2)).collect(), s2.iter().map(|o| family.fresh(o, 3)).collect());
        let whole: Vec<Operation> = s1.iter().chain(&s2).cloned().collect();
        let direct = transform_along(it, &op, &whole);
        let staged = transform_along(it, &op, &s1).and_then(|mid| transform_along(it, &mid, &s2));
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn kind_is_preserved(a in op_strategy(), b in op_strategy()) {
        for it in [Algorithm::Sun, Algorithm::Identity] {
            let t = it.transform(&a, &b).unwrap();
            prop_assert!(t.kind() == a.kind() || t.kind() == OpKind::Nop);
        }
    }

    #[test]
    fn dominates_is_a_partial_order(
        a in proptest::collection::vec(0u32..3, 3),
        b in proptest::collection::vec(0u32..3, 3),
        c in proptest::collection::vec(0u32..3, 3),
    ) {
        let (a, b, c) = (VectorClock::from_entries(a), VectorClock::from_entries(b), VectorClock::from_entries(c));
        prop_assert!(dominates(&a, &a).unwrap());
        if dominates(&a, &b).unwrap() && dominates(&b, &a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if dominates(&a, &b).unwrap() && dominates(&b, &c).unwrap() {
            prop_assert!(dominates(&a, &c).unwrap());
        }
    }
}

/// A random session: each op is generated at a random site with positions
/// chosen valid for that site at script time, then delivered in a random
/// order that ends with full delivery.
fn session_strategy() -> impl Strategy<Value = Scenario> {
    let sites = 2usize..4;
    (sites, proptest::collection::vec((0usize..4, 0u8..3, 0i64..6, 0usize..4), 1..6), any::<u64>()).prop_map(
        |(sites, gens, seed)| {
            let mut events = Vec::new();
            let mut generated = Vec::new();
            for (site, kind, pos, lag) in gens {
                let site = site % sites;
                // positions kept small; generation may still fail, which the run records
                let op = match kind {
                    0 => Operation::del(pos % 3),
                    1 => Operation::ins(pos % 4, 'x'),
                    _ => Operation::ins(pos % 2, 'y'),
                };
                events.push(Event::Generate { site, op });
                generated.push((events.len() - 1, site));
                // deliver a few earlier ops eagerly
                let mut k = seed as usize + lag;
                for (g, origin) in generated.clone() {
                    k = k.wrapping_mul(31).wrapping_add(7);
                    let target = k % sites;
                    if target != origin && !events.iter().any(|e| *e == Event::Deliver { site: target, generate: g }) && k % 2 == 0 {
                        events.push(Event::Deliver { site: target, generate: g });
                    }
                }
            }
            for (g, origin) in generated {
                for s in 0..sites {
                    if s != origin && !events.iter().any(|e| *e == Event::Deliver { site: s, generate: g }) {
                        events.push(Event::Deliver { site: s, generate: g });
                    }
                }
            }
            Scenario { name: "random".into(), sites, initial: "abcd".into(), it: "ressel".into(), events, mode: Mode::Scripted }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_sessions_keep_causality(sc in session_strategy()) {
        prop_assert!(sc.validate().is_ok());
        let out = run_scenario(&sc, &Algorithm::Ressel).unwrap();
        prop_assert_eq!(&out, &run_scenario(&sc, &Algorithm::Ressel).unwrap());
        for s in &out.sites {
            prop_assert!(s.respects_causality());
            prop_assert!(s.clock_sound());
        }
        if let Ok(all) = run_all_orders(&sc, &Algorithm::Ressel) {
            for o in &all {
                for s in &o.sites {
                    prop_assert!(s.respects_causality());
                    prop_assert!(s.clock_sound());
                }
            }
        }
    }
}
