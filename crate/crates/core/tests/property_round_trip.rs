//! Printing then parsing a property yields the same AST.

use handshake_core::property::{parse_property, print_property};
use handshake_testkit::random_ast;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const HALF_OPEN_QUERY: &str = "A[] forall (i:ids) ( Legit_Client(i).cur_state == ESTABLISHED imply exists (j: int[0,(RESOURCES-1)])( Server.tcb[j].peer == i and Server.tcb[j].cur_state == ESTABLISHED ) )";
const HOGGING_QUERY: &str = "E<> exists (i:ids) ( forall (j: int[0,(RESOURCES-1)])( Server.tcb[j].peer == i and  Server.tcb[j].cur_state != CLOSED ) )";

#[test]
fn reference_queries_round_trip_verbatim() {
    for text in [HALF_OPEN_QUERY, HOGGING_QUERY] {
        let ast = parse_property(text).unwrap();
        let printed = print_property(&ast);
        assert_eq!(parse_property(&printed).unwrap(), ast);
        // Printing is a fixpoint after one pass.
        assert_eq!(print_property(&parse_property(&printed).unwrap()), printed);
    }
}

#[test]
fn generated_asts_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let ast = random_ast(&mut rng);
        let printed = print_property(&ast);
        let back = parse_property(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_eq!(back, ast, "{printed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn print_parse_is_identity(seed in any::<u64>()) {
        let ast = random_ast(&mut ChaCha8Rng::seed_from_u64(seed));
        let printed = print_property(&ast);
        let back = parse_property(&printed);
        prop_assert_eq!(back, Ok(ast), "{}", printed);
    }

    #[test]
    fn parser_never_panics(text in "[ -~]{0,60}") {
        let _ = parse_property(&text);
    }
}
