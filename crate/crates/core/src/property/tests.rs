use super::*;
use crate::automata::CmpOp;
use crate::models::{build_system, Protocol, ScenarioConfig};
use crate::semantics::Network;

const HALF_OPEN_QUERY: &str = "A[] forall (i:ids) ( Legit_Client(i).cur_state == ESTABLISHED imply exists (j: int[0,(RESOURCES-1)])( Server.tcb[j].peer == i and Server.tcb[j].cur_state == ESTABLISHED ) )";
const HOGGING_QUERY: &str = "E<> exists (i:ids) ( forall (j: int[0,(RESOURCES-1)])( Server.tcb[j].peer == i and  Server.tcb[j].cur_state != CLOSED ) )";

fn net(protocol: Protocol, legit: usize, illegit: usize, resources: usize) -> Network {
    let cfg = ScenarioConfig::new(protocol, legit, illegit, resources, 2, 1);
    Network::new(&build_system(&cfg).unwrap()).unwrap()
}

#[test]
fn half_open_query_has_forall_imply_exists_shape() {
    let ast = parse_property(HALF_OPEN_QUERY).unwrap();
    assert_eq!(ast.quantifier, PathQuantifier::Invariant);
    let Pred::Quant { kind: Quantifier::Forall, range: RangeSpec::Named(r), body, .. } = &ast.pred else {
        panic!("expected forall, got {:?}", ast.pred)
    };
    assert_eq!(r.as_str(), "ids");
    let Pred::Imply(lhs, rhs) = &**body else { panic!("expected imply") };
    assert!(matches!(**lhs, Pred::Cmp(CmpOp::Eq, Term::Access(_), Term::Name(_))));
    let Pred::Quant { kind: Quantifier::Exists, range: RangeSpec::Int(lo, hi), body, .. } = &**rhs else {
        panic!("expected exists")
    };
    assert_eq!(*lo, Term::Int(0));
    assert_eq!(*hi, Term::name("RESOURCES").minus(Term::Int(1)));
    assert!(matches!(**body, Pred::And(..)));
}

#[test]
fn hogging_query_has_exists_forall_and_shape() {
    let ast = parse_property(HOGGING_QUERY).unwrap();
    assert_eq!(ast.quantifier, PathQuantifier::Reach);
    let Pred::Quant { kind: Quantifier::Exists, body, .. } = &ast.pred else { panic!() };
    let Pred::Quant { kind: Quantifier::Forall, body, .. } = &**body else { panic!() };
    let Pred::And(_, rhs) = &**body else { panic!() };
    assert!(matches!(**rhs, Pred::Cmp(CmpOp::Ne, _, _)));
}

#[test]
fn reference_queries_round_trip() {
    for text in [HALF_OPEN_QUERY, HOGGING_QUERY] {
        let ast = parse_property(text).unwrap();
        let printed = print_property(&ast);
        assert_eq!(parse_property(&printed).unwrap(), ast, "{printed}");
    }
}

#[test]
fn minimal_property_prints_verbatim() {
    assert_eq!(print_property(&parse_property("E<> true").unwrap()), "E<> true");
    assert_eq!(print_property(&parse_property("A[]  (x ==   1)").unwrap()), "A[] x == 1");
}

#[test]
fn nested_path_quantifier_is_rejected() {
    let err = parse_property("A[] E<> true").unwrap_err();
    assert_eq!((err.line, err.col), (1, 5));
    assert!(err.message.contains("nested"), "{err}");
}

#[test]
fn unsupported_path_quantifiers() {
    for q in ["A<> true", "E[] true"] {
        let err = parse_property(q).unwrap_err();
        assert!(err.message.contains("unsupported"), "{err}");
        assert_eq!(err.expected, vec!["`A[]`", "`E<>`"]);
    }
    assert!(parse_property("x --> y").is_err());
    assert!(parse_property("forall (i: ids) true").unwrap_err().message.contains("unexpected"));
}

#[test]
fn errors_carry_positions_and_expectations() {
    let err = parse_property("A[] forall (i ids) true").unwrap_err();
    assert_eq!((err.line, err.col), (1, 15));
    assert_eq!(err.expected, vec!["`:`"]);

    let err = parse_property("E<> x ==\n  ").unwrap_err();
    assert_eq!((err.line, err.col), (2, 3));
    assert!(!err.expected.is_empty());

    let err = parse_property("E<> a == b == c").unwrap_err();
    assert!(err.message.contains("chain"));

    let err = parse_property("E<> 1 + 2").unwrap_err();
    assert!(err.message.contains("predicate"));

    let err = parse_property("E<> x # 1").unwrap_err();
    assert_eq!((err.line, err.col), (1, 7));

    let err = parse_property("E<> not 3 and true").unwrap_err();
    assert!(err.message.contains("predicate"));

    assert!(parse_property("E<> x == 99999999999999999999").is_err());
    assert!(parse_property("E<> forall (and: ids) true").unwrap_err().message.contains("keyword"));
}

#[test]
fn operator_aliases_and_precedence() {
    let a = parse_property("E<> !(x == 1) && y == 2 || z == 3").unwrap();
    let b = parse_property("E<> ((not x == 1) and y == 2) or z == 3").unwrap();
    assert_eq!(a, b);
    let c = parse_property("E<> a == 1 imply b == 1 imply c == 1").unwrap();
    let d = parse_property("E<> a == 1 imply (b == 1 imply c == 1)").unwrap();
    assert_eq!(c, d);
    let e = parse_property("E<> x == -1 - 2").unwrap();
    assert_eq!(e.pred, Pred::Cmp(CmpOp::Eq, Term::name("x"), Term::Int(-1).minus(Term::Int(2))));
}

#[test]
fn quantifier_body_extends_right() {
    let a = parse_property("E<> exists (i: ids) x == i or y == i").unwrap();
    let Pred::Quant { body, .. } = a.pred else { panic!() };
    assert!(matches!(*body, Pred::Or(..)));
}

#[test]
fn location_tests_parse_and_print() {
    let ast = parse_property("E<> Server.S2 and Legit_Client(0).LC1").unwrap();
    assert_eq!(print_property(&ast), "E<> Server.S2 and Legit_Client(0).LC1");
    assert!(matches!(ast.pred, Pred::And(ref l, _) if matches!(**l, Pred::At(..))));
}

fn count(p: &GroundPredicate) -> (usize, usize) {
    match p {
        GroundPredicate::All(v) => (v.len(), 0),
        GroundPredicate::Any(v) => (0, v.len()),
        _ => (0, 0),
    }
}

#[test]
fn half_open_query_expands_to_two_implications_of_three_way_disjunctions() {
    let n = net(Protocol::Tcp, 2, 1, 3);
    let e = elaborate(&parse_property(HALF_OPEN_QUERY).unwrap(), &n, IdsScope::LegitOnly).unwrap();
    let GroundPredicate::All(items) = &e.predicate else { panic!("{:?}", e.predicate) };
    assert_eq!(items.len(), 2);
    for item in items {
        let GroundPredicate::Imply(_, rhs) = item else { panic!() };
        assert_eq!(count(rhs), (0, 3));
    }
}

#[test]
fn ids_scope_selects_the_id_set() {
    let n = net(Protocol::Tcp, 1, 1, 2);
    let ast = parse_property(HOGGING_QUERY).unwrap();
    let all = elaborate(&ast, &n, IdsScope::All).unwrap();
    let legit = elaborate(&ast, &n, IdsScope::LegitOnly).unwrap();
    assert_eq!(count(&all.predicate), (0, 2));
    assert_eq!(
        legit.predicate,
        GroundPredicate::Any(vec![match all.predicate {
            GroundPredicate::Any(ref v) => v[0].clone(),
            _ => unreachable!(),
        }])
    );
    // Legit_Client(1) does not exist when `ids` covers the attacker.
    assert_eq!(
        elaborate(&parse_property(HALF_OPEN_QUERY).unwrap(), &n, IdsScope::All),
        Err(ElabError::UnknownProcess("Legit_Client(1)".into()))
    );
}

#[test]
fn empty_ranges_fold_to_constants() {
    let n = net(Protocol::Tcp, 1, 1, 2);
    let f = elaborate(&parse_property("A[] forall (i: int[1,0]) false").unwrap(), &n, IdsScope::All).unwrap();
    assert_eq!(f.predicate, GroundPredicate::Bool(true));
    let e = elaborate(&parse_property("E<> exists (i: int[1,0]) true").unwrap(), &n, IdsScope::All).unwrap();
    assert_eq!(e.predicate, GroundPredicate::Bool(false));
}

#[test]
fn elaboration_rejects_unknown_names() {
    let n = net(Protocol::Tcp, 1, 1, 2);
    let err = |t: &str| elaborate(&parse_property(t).unwrap(), &n, IdsScope::All).unwrap_err();
    assert_eq!(err("E<> Server.tcb[5].peer == 0"), ElabError::UnknownVariable("Server.tcb[5].peer".into()));
    assert!(matches!(err("E<> nowhere == 1"), ElabError::UnknownName(_)));
    assert!(matches!(err("E<> Client.x == 1"), ElabError::UnknownProcess(_)));
    assert!(matches!(err("E<> exists (i: nope) true"), ElabError::UnknownRange(_)));
    assert!(matches!(err("E<> Legit_Client(0).timer == 1"), ElabError::ClockInQuery(_)));
    assert!(matches!(err("E<> Server.S9"), ElabError::UnknownName(_)));
}

#[test]
fn ground_predicates_read_state_slots() {
    let n = net(Protocol::Tcp, 1, 1, 2);
    let e = elaborate(
        &parse_property("E<> Server.S1 and tcb[1].cur_state == LISTEN and last_sender == NONE").unwrap(),
        &n,
        IdsScope::All,
    )
    .unwrap();
    let s0 = n.initial_state();
    assert!(!e.is_target(&s0));
    let (_, s1) = n.successors(&s0).unwrap().remove(0);
    assert!(e.is_target(&s1));
    let inv = elaborate(&parse_property("A[] Server.S0").unwrap(), &n, IdsScope::All).unwrap();
    assert!(!inv.is_target(&s0));
    assert!(inv.is_target(&s1));
}

#[test]
fn query_files_split_into_named_blocks() {
    let text = "-- desk queries\nname: half_open\nscope: legit\nA[] forall (i:ids) (\n  Legit_Client(i).cur_state == ESTABLISHED imply true)\n\n-- second\nname: hog\nE<> true\n";
    let qs = parse_query_file(text).unwrap();
    assert_eq!(qs.len(), 2);
    assert_eq!(qs[0].name, "half_open");
    assert_eq!(qs[0].scope, IdsScope::LegitOnly);
    assert_eq!(qs[0].text, "A[] forall (i:ids) ( Legit_Client(i).cur_state == ESTABLISHED imply true)");
    assert_eq!(qs[1].scope, IdsScope::All);
    assert_eq!(qs[1].ast.quantifier, PathQuantifier::Reach);
}

#[test]
fn query_file_errors() {
    assert_eq!(parse_query_file("E<> true"), Err(QueryFileError::MissingName { line: 1 }));
    assert!(matches!(parse_query_file("name: a\nname: a\nE<> true"), Err(QueryFileError::Duplicate { .. })));
    assert!(matches!(parse_query_file("name: a\n-- nothing\n"), Err(QueryFileError::Empty { .. })));
    assert!(matches!(parse_query_file("name: a b\nE<> true"), Err(QueryFileError::BadName { .. })));
    assert!(matches!(parse_query_file("name: a\nscope: some\nE<> true"), Err(QueryFileError::BadScope { .. })));
    match parse_query_file("-- c\nname: bad\n\nE<> x ==") {
        Err(QueryFileError::Parse { name, error }) => {
            assert_eq!(name, "bad");
            assert_eq!(error.line, 4);
        }
        other => panic!("{other:?}"),
    }
}
