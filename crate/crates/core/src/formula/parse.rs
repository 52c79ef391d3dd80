//! Rule text grammar.
//!
//! ```text
//! node     := '~' node | operator '(' node (',' node)* ')' | literal
//! operator := 'And' | 'Or' | 'AtLeast' K | 'AtMost' K | 'Choose' K
//! literal  := name '>' number | name '<=' number | name '<' number | name '=' category
//!           | name
//! ```
//!
//! A bare `name` is shorthand for `name>0.5`, i.e. a 0/1 indicator feature.
//!
//! `name<=v` is stored as the negation of `name>v`, so only `>` predicates
//! appear in parsed tables. `name<v` is read as `name<=v` with a warning.

use std::collections::HashMap;
use std::fmt;

use crate::formula::{Comparator, Operator, Predicate, PredicateValue, Rule, RuleNode};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseWarning {
    pub position: usize,
    pub message: String,
}

pub fn parse(text: &str) -> Result<Rule> {
    let (rule, warnings) = parse_with_warnings(text)?;
    for w in warnings {
        log::warn!("rule text position {}: {}", w.position, w.message);
    }
    Ok(rule)
}

pub fn parse_with_warnings(text: &str) -> Result<(Rule, Vec<ParseWarning>)> {
    let mut parser = Parser { src: text, pos: 0, predicates: Vec::new(), index: HashMap::new(), warnings: Vec::new() };
    let root = parser.node()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    root.validate(parser.predicates.len(), None)?;
    Ok((Rule { root, predicates: parser.predicates, score: None }, parser.warnings))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    predicates: Vec<Predicate>,
    index: HashMap<Predicate, usize>,
    warnings: Vec<ParseWarning>,
}

const DELIMITERS: &[char] = &['(', ')', ',', '~', '<', '>', '='];

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    fn node(&mut self) -> Result<RuleNode> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('~') => {
                self.pos += 1;
                Ok(self.node()?.negated())
            }
            Some(_) => {
                let start = self.pos;
                let word = self.word();
                let after = self.pos;
                self.skip_ws();
                if self.peek() == Some('(') {
                    let op = operator_from_name(word.trim())
                        .ok_or_else(|| Error::Syntax { position: start, message: format!("unknown operator `{}`", word.trim()) })?;
                    self.pos += 1;
                    self.operator(op)
                } else {
                    self.pos = after;
                    self.literal(start, word.trim())
                }
            }
        }
    }

    fn word(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest.find(DELIMITERS).unwrap_or(rest.len());
        let word = &self.src[self.pos..self.pos + len];
        self.pos += len;
        word
    }

    fn operator(&mut self, op: Operator) -> Result<RuleNode> {
        let mut children = vec![self.node()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    children.push(self.node()?);
                }
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("expected `,` or `)`")),
            }
        }
        if let Some(k) = op.k() {
            if k > children.len() {
                return Err(Error::Validation(format!("{op}: k={k} exceeds arity {}", children.len())));
            }
        }
        if children.len() < 2 {
            return Err(Error::Validation(format!("{op} needs at least 2 children, got {}", children.len())));
        }
        Ok(RuleNode::op(op, children))
    }

    fn literal(&mut self, start: usize, name: &str) -> Result<RuleNode> {
        if name.is_empty() {
            return Err(Error::Syntax { position: start, message: "expected a feature name".into() });
        }
        let name = name.to_string();
        let rest = self.rest();
        let (comparator, negated, len) = if rest.starts_with("<=") {
            (Comparator::GreaterThan, true, 2)
        } else if rest.starts_with(">=") {
            return Err(self.error("`>=` is not supported; use `>` or `<=`"));
        } else if rest.starts_with('<') {
            self.warnings.push(ParseWarning {
                position: self.pos,
                message: format!("`{name}<` read as `{name}<=`"),
            });
            (Comparator::GreaterThan, true, 1)
        } else if rest.starts_with('>') {
            (Comparator::GreaterThan, false, 1)
        } else if rest.starts_with('=') {
            (Comparator::Equals, false, 1)
        } else if rest.is_empty() || rest.starts_with([',', ')']) {
            let predicate = Predicate::greater_than(name, 0.5);
            return Ok(RuleNode::literal(self.intern(predicate)));
        } else {
            return Err(self.error(format!("expected a comparator after `{name}`")));
        };
        self.pos += len;
        let value_start = self.pos;
        let rest = self.rest();
        let value_len = rest.find([',', ')']).unwrap_or(rest.len());
        let raw = rest[..value_len].trim();
        self.pos += value_len;
        if raw.is_empty() {
            return Err(Error::Syntax { position: value_start, message: "expected a value".into() });
        }
        let value = match comparator {
            Comparator::Equals => PredicateValue::Category(raw.to_string()),
            _ => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => PredicateValue::Number(v),
                _ => return Err(Error::Syntax { position: value_start, message: format!("`{raw}` is not a number") }),
            },
        };
        let predicate = Predicate { feature: name, comparator, value };
        Ok(RuleNode::Literal { predicate: self.intern(predicate), negated })
    }

    fn intern(&mut self, predicate: Predicate) -> usize {
        match self.index.get(&predicate) {
            Some(&i) => i,
            None => {
                self.predicates.push(predicate.clone());
                self.index.insert(predicate, self.predicates.len() - 1);
                self.predicates.len() - 1
            }
        }
    }
}

fn operator_from_name(name: &str) -> Option<Operator> {
    match name {
        "And" => return Some(Operator::And),
        "Or" => return Some(Operator::Or),
        _ => {}
    }
    let (prefix, ctor): (&str, fn(usize) -> Operator) = if name.starts_with("AtLeast") {
        ("AtLeast", Operator::AtLeast)
    } else if name.starts_with("AtMost") {
        ("AtMost", Operator::AtMost)
    } else if name.starts_with("Choose") {
        ("Choose", Operator::Choose)
    } else {
        return None;
    };
    let digits = &name[prefix.len()..];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(ctor)
}

pub(super) fn write_node(f: &mut fmt::Formatter<'_>, node: &RuleNode, predicates: &[Predicate]) -> fmt::Result {
    match node {
        RuleNode::Literal { predicate, negated } => match predicates.get(*predicate) {
            None => write!(f, "{}?{predicate}", if *negated { "~" } else { "" }),
            Some(p) => write_literal(f, p, *negated),
        },
        RuleNode::Operator { op, children, negated } => {
            if *negated {
                f.write_str("~")?;
            }
            write!(f, "{op}(")?;
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_node(f, child, predicates)?;
            }
            f.write_str(")")
        }
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, p: &Predicate, negated: bool) -> fmt::Result {
    match (p.comparator, negated) {
        (Comparator::GreaterThan, true) => write!(f, "{}<={}", p.feature, p.value),
        (_, true) => write!(f, "~{p}"),
        (_, false) => write!(f, "{p}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_cluster_zero_rule() {
        let (rule, warnings) =
            parse_with_warnings("Or(month=mar, duration>550, pdays<100, nr.employed<=5076, month=apr)").unwrap();
        assert_eq!(rule.complexity(), 5);
        assert_eq!(rule.root.children().len(), 5);
        assert_eq!(warnings.len(), 1);
        assert_eq!(rule.to_string(), "Or(month=mar, duration>550, pdays<=100, nr.employed<=5076, month=apr)");
    }

    #[test]
    fn at_least_three_of_five() {
        let rule = parse("AtLeast3(f0, f1, f2, f3, f4)").unwrap();
        assert!(matches!(rule.root, RuleNode::Operator { op: Operator::AtLeast(3), .. }));
        assert_eq!(rule.complexity(), 5);
        assert_eq!(rule.predicates[4], Predicate::greater_than("f4", 0.5));
        assert_eq!(rule.to_string(), "AtLeast3(f0>0.5, f1>0.5, f2>0.5, f3>0.5, f4>0.5)");
    }

    #[test]
    fn k_exceeding_arity_is_rejected() {
        assert!(matches!(parse("Choose2(a)"), Err(Error::Validation(_))));
        assert!(matches!(parse("AtLeast4(a=x, b=y, c=z)"), Err(Error::Validation(_))));
    }

    #[test]
    fn negation_rewrites() {
        let rule = parse("~duration<=550").unwrap();
        assert_eq!(rule.to_string(), "duration>550");
        let rule = parse("duration<=550").unwrap();
        assert_eq!(rule.predicates, vec![Predicate::greater_than("duration", 550.0)]);
        assert_eq!(rule.to_string(), "duration<=550");
        assert_eq!(parse("~month=mar").unwrap().to_string(), "~month=mar");
        assert_eq!(parse("~~month=mar").unwrap().to_string(), "month=mar");
    }

    #[test]
    fn single_literal_round_trip() {
        assert_eq!(parse("duration>400").unwrap().to_string(), "duration>400");
        assert_eq!(parse("  duration > 400 ").unwrap().to_string(), "duration>400");
    }

    #[test]
    fn categories_with_punctuation() {
        let rule = parse("Or(job=admin., education=basic.4y, job=blue-collar)").unwrap();
        assert_eq!(rule.to_string(), "Or(job=admin., education=basic.4y, job=blue-collar)");
    }

    #[test]
    fn predicate_table_is_deduplicated() {
        let rule = parse("Or(And(a>1, b=x), a>1, ~b=x, a<=1)").unwrap();
        assert_eq!(rule.predicates.len(), 2);
        assert_eq!(rule.complexity(), 5);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("Or(a>1, b>2") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 11),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("Xor(a>1, b>2)"), Err(Error::Syntax { position: 0, .. })));
        assert!(matches!(parse("a>abc"), Err(Error::Syntax { position: 2, .. })));
        assert!(matches!(parse("a>=3"), Err(Error::Syntax { .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse("Or(a>1, b>2) c"), Err(Error::Syntax { .. })));
    }
}
