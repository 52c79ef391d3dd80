use boolrule::formula::{atleast_to_cnf, negation_dual, parse, truth_table_equivalent, Operator, RuleNode};
use boolrule::{Predicate, Rule};
use proptest::prelude::*;

type Oracle = fn(usize, usize) -> bool;

fn lits(n: usize) -> Vec<RuleNode> {
    (0..n).map(RuleNode::literal).collect()
}

fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

#[test]
fn counting_operators_match_popcount() {
    for n in 2..=4 {
        for k in 0..=n {
            let cases: [(Operator, Oracle); 3] = [
                (Operator::AtLeast(k), |c, k| c >= k),
                (Operator::AtMost(k), |c, k| c <= k),
                (Operator::Choose(k), |c, k| c == k),
            ];
            for (op, oracle) in cases {
                let node = RuleNode::op(op, lits(n));
                for a in all_assignments(n) {
                    let count = a.iter().filter(|&&b| b).count();
                    assert_eq!(node.evaluate(&a).unwrap(), oracle(count, k), "{op} n={n} {a:?}");
                    assert_eq!(node.clone().negated().evaluate(&a).unwrap(), !oracle(count, k));
                }
            }
        }
        let and = RuleNode::op(Operator::And, lits(n));
        let or = RuleNode::op(Operator::Or, lits(n));
        for a in all_assignments(n) {
            assert_eq!(and.evaluate(&a).unwrap(), a.iter().all(|&b| b));
            assert_eq!(or.evaluate(&a).unwrap(), a.iter().any(|&b| b));
        }
    }
}

#[test]
fn duality_identities() {
    for n in 2..=4 {
        let and = RuleNode::op(Operator::And, lits(n));
        let or = RuleNode::op(Operator::Or, lits(n));
        assert!(truth_table_equivalent(&and, &RuleNode::op(Operator::AtLeast(n), lits(n)), n));
        assert!(truth_table_equivalent(&or, &RuleNode::op(Operator::AtLeast(1), lits(n)), n));
        for k in 0..=n {
            let at_least = RuleNode::op(Operator::AtLeast(k), lits(n));
            let at_most = RuleNode::op(Operator::AtMost(k), lits(n));
            if k >= 1 {
                let below = RuleNode::op(Operator::AtMost(k - 1), lits(n));
                assert!(truth_table_equivalent(&at_least.clone().negated(), &below, n), "n={n} k={k}");
            }
            let both = RuleNode::op(Operator::And, vec![at_least, at_most]);
            let choose = RuleNode::op(Operator::Choose(k), lits(n));
            assert!(truth_table_equivalent(&choose, &both, n), "n={n} k={k}");
        }
    }
}

#[test]
fn equivalence_examples() {
    let xor = RuleNode::op(
        Operator::Or,
        vec![
            RuleNode::op(Operator::And, vec![RuleNode::literal(0), RuleNode::not_literal(1)]),
            RuleNode::op(Operator::And, vec![RuleNode::not_literal(0), RuleNode::literal(1)]),
        ],
    );
    assert!(truth_table_equivalent(&RuleNode::op(Operator::Choose(1), lits(2)), &xor, 2));
    let two = RuleNode::op(Operator::AtLeast(2), lits(3));
    assert!(!truth_table_equivalent(&two, &RuleNode::op(Operator::AtMost(2), lits(3)), 3));
}

#[test]
fn cnf_encoding_is_equivalent() {
    for n in 1..=8 {
        for k in 1..=n {
            let cnf = atleast_to_cnf(k, n).unwrap();
            // a single-child operator is not a valid tree, so compare against popcount directly
            for a in all_assignments(n) {
                let count = a.iter().filter(|&&b| b).count();
                assert_eq!(cnf.evaluate(&a), count >= k, "k={k} n={n} {a:?}");
            }
            if n >= 2 {
                assert!(truth_table_equivalent(&RuleNode::op(Operator::AtLeast(k), lits(n)), &cnf, n));
            }
        }
    }
}

fn predicate_table() -> Vec<Predicate> {
    vec![
        Predicate::greater_than("duration", 550.0),
        Predicate::greater_than("pdays", 100.0),
        Predicate::greater_than("euribor3m", 1.25),
        Predicate::greater_than("cons.price.idx", -0.5),
        Predicate::equals("month", "mar"),
        Predicate::equals("job", "blue-collar"),
        Predicate::equals("poutcome", "OTHER"),
    ]
}

fn node_strategy(predicates: usize) -> impl Strategy<Value = RuleNode> {
    let leaf = (0..predicates, any::<bool>()).prop_map(|(p, neg)| RuleNode::Literal { predicate: p, negated: neg });
    leaf.prop_recursive(3, 64, 5, |inner| {
        (prop::collection::vec(inner, 2..=5), 0usize..5, any::<usize>(), any::<bool>()).prop_map(
            |(children, kind, k, negated)| {
                let k = k % (children.len() + 1);
                let op = [Operator::And, Operator::Or, Operator::AtLeast(k), Operator::AtMost(k), Operator::Choose(k)]
                    [kind];
                RuleNode::Operator { op, children, negated }
            },
        )
    })
}

proptest! {
    #[test]
    fn parse_round_trip(root in node_strategy(7)) {
        let rule = Rule::new(root, predicate_table()).unwrap();
        prop_assert!(rule.depth() <= 4);
        let text = rule.to_text();
        let back = parse(&text).unwrap();
        prop_assert!(back.structurally_eq(&rule), "{} vs {}", text, back.to_text());
        prop_assert_eq!(back.to_text(), text);
        prop_assert!(back.predicates.len() <= rule.predicates.len());
    }

    #[test]
    fn negation_dual_preserves_complexity_and_meaning(root in node_strategy(4)) {
        let dual = negation_dual(&root);
        prop_assert_eq!(dual.complexity(), root.complexity());
        prop_assert!(truth_table_equivalent(&root, &dual, 4));
    }
}
