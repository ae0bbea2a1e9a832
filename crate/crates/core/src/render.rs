//! Minimal-parenthesis printing in the same concrete syntax `parse` accepts.

use alloc::string::String;
use core::fmt::{self, Write};

use crate::formula::Formula;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Iff = 1,
    Implies,
    Or,
    And,
    Unary,
}

fn prec(f: &Formula) -> Prec {
    match f {
        Formula::Iff(..) => Prec::Iff,
        Formula::Implies(..) => Prec::Implies,
        Formula::Or(..) => Prec::Or,
        Formula::And(..) => Prec::And,
        _ => Prec::Unary,
    }
}

fn right_assoc(p: Prec) -> bool {
    matches!(p, Prec::Iff | Prec::Implies)
}

fn write_operand(out: &mut fmt::Formatter<'_>, f: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

fn write_binary(
    out: &mut fmt::Formatter<'_>,
    op: &str,
    p: Prec,
    lhs: &Formula,
    rhs: &Formula,
) -> fmt::Result {
    let (lp, rp) = (prec(lhs), prec(rhs));
    write_operand(out, lhs, lp < p || (lp == p && right_assoc(p)))?;
    write!(out, " {op} ")?;
    write_operand(out, rhs, rp < p || (rp == p && !right_assoc(p)))
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => out.write_str("true"),
            Formula::Bottom => out.write_str("false"),
            Formula::Atom(p) => out.write_str(p),
            Formula::Not(a) => {
                out.write_char('~')?;
                write_operand(out, a, prec(a) < Prec::Unary)
            }
            Formula::And(a, b) => write_binary(out, "&", Prec::And, a, b),
            Formula::Or(a, b) => write_binary(out, "|", Prec::Or, a, b),
            Formula::Implies(a, b) => write_binary(out, "->", Prec::Implies, a, b),
            Formula::Iff(a, b) => write_binary(out, "<->", Prec::Iff, a, b),
            Formula::Brings(g, a) => {
                write!(out, "E{g} ")?;
                write_operand(out, a, prec(a) < Prec::Unary)
            }
            Formula::Attempts(g, a) => {
                write!(out, "A{g} ")?;
                write_operand(out, a, prec(a) < Prec::Unary)
            }
            Formula::Assists(c1, c2, a) => {
                write!(out, "H{c1}>{c2} ")?;
                write_operand(out, a, prec(a) < Prec::Unary)
            }
        }
    }
}

/// Renders a formula as canonical text.
pub fn render(f: &Formula) -> String {
    alloc::format!("{f}")
}

/// Multi-line indented tree dump, one node per line.
pub fn render_tree(f: &Formula) -> String {
    fn go(f: &Formula, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        let label = match f {
            Formula::Top => String::from("Top"),
            Formula::Bottom => String::from("Bottom"),
            Formula::Atom(p) => alloc::format!("Atom {p}"),
            Formula::Not(_) => String::from("Not"),
            Formula::And(..) => String::from("And"),
            Formula::Or(..) => String::from("Or"),
            Formula::Implies(..) => String::from("Implies"),
            Formula::Iff(..) => String::from("Iff"),
            Formula::Brings(g, _) => alloc::format!("Brings {g}"),
            Formula::Attempts(g, _) => alloc::format!("Attempts {g}"),
            Formula::Assists(c1, c2, _) => alloc::format!("Assists {c1} > {c2}"),
        };
        out.push_str(&label);
        out.push('\n');
        for c in f.children() {
            go(c, depth + 1, out);
        }
    }
    let mut out = String::new();
    go(f, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Group;
    use crate::parse;

    fn atom(s: &str) -> Formula {
        Formula::Atom(s.into())
    }

    fn g(names: &[&str]) -> Group {
        Group::from_names(names.iter().copied()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(render(&Formula::brings(g(&["1"]), atom("p"))), "E{1} p");
        assert_eq!(render(&Formula::and(atom("p"), atom("q"))), "p & q");
        assert_eq!(
            render(&Formula::assists(
                g(&["1"]),
                g(&["2"]),
                Formula::implies(atom("p"), atom("q"))
            )),
            "H{1}>{2} (p -> q)"
        );
    }

    #[test]
    fn associativity() {
        for text in [
            "p & q & r",
            "p & (q & r)",
            "p -> q -> r",
            "(p -> q) -> r",
            "p <-> q <-> r",
            "(p <-> q) <-> r",
            "~~p",
            "~(p | q)",
            "E{1,2} ~A{3} (p | q)",
            "H{Lucy}>{Charlie} k & ~E{Lucy} k",
        ] {
            assert_eq!(render(&parse(text).unwrap()), text);
        }
    }

    #[test]
    fn tree_dump() {
        let t = render_tree(&parse("E{1} (p & q)").unwrap());
        assert_eq!(t, "Brings {1}\n  And\n    Atom p\n    Atom q\n");
    }
}
