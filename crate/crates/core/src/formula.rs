//! Syntax of the group agency language: agents, groups and formulas.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("empty identifier")]
    Empty,
    #[error("invalid character {1:?} in identifier {0:?}")]
    BadChar(String, char),
    #[error("{0:?} is a reserved word")]
    Reserved(String),
    #[error("a group must have at least one member")]
    EmptyGroup,
}

pub(crate) const RESERVED: [&str; 5] = ["true", "false", "E", "A", "H"];

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn check_ident(name: &str) -> Result<(), NameError> {
    if name.is_empty() {
        return Err(NameError::Empty);
    }
    if let Some(c) = name.chars().find(|c| !is_ident_char(*c)) {
        return Err(NameError::BadChar(name.to_string(), c));
    }
    if RESERVED.contains(&name) {
        return Err(NameError::Reserved(name.to_string()));
    }
    Ok(())
}

/// An individual agent identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent(String);

impl Agent {
    pub fn new(name: impl Into<String>) -> Result<Self, NameError> {
        let name = name.into();
        check_ident(&name)?;
        Ok(Agent(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A nonempty finite set of agents.
///
/// Groups are ordered by cardinality first and then lexicographically by
/// their sorted members, which is the vertex order used when enumerating
/// cohesion networks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Group(BTreeSet<Agent>);

impl Group {
    pub fn new(members: impl IntoIterator<Item = Agent>) -> Result<Self, NameError> {
        let set: BTreeSet<Agent> = members.into_iter().collect();
        if set.is_empty() {
            return Err(NameError::EmptyGroup);
        }
        Ok(Group(set))
    }

    pub fn singleton(agent: Agent) -> Self {
        let mut set = BTreeSet::new();
        set.insert(agent);
        Group(set)
    }

    /// Builds a group from agent names, e.g. `Group::from_names(["1", "2"])`.
    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self, NameError> {
        let agents = names
            .into_iter()
            .map(Agent::new)
            .collect::<Result<Vec<_>, _>>()?;
        Group::new(agents)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Groups are never empty; provided for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// A singleton coalition carries no cohesiveness of its own.
    pub fn is_degenerate(&self) -> bool {
        self.0.len() == 1
    }

    /// The single member of a degenerate group.
    pub fn as_singleton(&self) -> Option<&Agent> {
        if self.is_degenerate() {
            self.0.iter().next()
        } else {
            None
        }
    }

    pub fn members(&self) -> impl ExactSizeIterator<Item = &Agent> + Clone {
        self.0.iter()
    }

    pub fn contains(&self, agent: &Agent) -> bool {
        self.0.contains(agent)
    }

    pub fn is_subset(&self, other: &Group) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Group) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn as_set(&self) -> &BTreeSet<Agent> {
        &self.0
    }

    /// The members not in `other`, or `None` if nothing remains.
    pub fn difference(&self, other: &Group) -> Option<Group> {
        let rest: BTreeSet<Agent> = self.0.difference(&other.0).cloned().collect();
        if rest.is_empty() {
            None
        } else {
            Some(Group(rest))
        }
    }

    /// Comma-joined sorted member names, as used for class file keys.
    pub fn key(&self) -> String {
        let names: Vec<&str> = self.0.iter().map(Agent::as_str).collect();
        names.join(",")
    }
}

impl Ord for Group {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().cmp(other.0.iter()))
    }
}

impl PartialOrd for Group {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// A formula of the language with group agency (`E`), group attempt (`A`)
/// and successful assistance (`H`) modalities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// `E_G φ`: the group brings about `φ`.
    Brings(Group, Box<Formula>),
    /// `A_G φ`: the group tries to bring about `φ`.
    Attempts(Group, Box<Formula>),
    /// `H_{C1→C2} φ`: `C1` successfully assists `C2` in achieving `φ`.
    Assists(Group, Group, Box<Formula>),
}

impl Formula {
    /// Atom constructor that validates the name.
    pub fn atom(name: impl Into<String>) -> Result<Formula, NameError> {
        let name = name.into();
        check_ident(&name)?;
        Ok(Formula::Atom(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn brings(g: Group, f: Formula) -> Formula {
        Formula::Brings(g, Box::new(f))
    }

    pub fn attempts(g: Group, f: Formula) -> Formula {
        Formula::Attempts(g, Box::new(f))
    }

    pub fn assists(c1: Group, c2: Group, f: Formula) -> Formula {
        Formula::Assists(c1, c2, Box::new(f))
    }

    /// Left-nested conjunction; `Top` for an empty sequence.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `Bottom` for an empty sequence.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => Vec::new(),
            Formula::Not(a)
            | Formula::Brings(_, a)
            | Formula::Attempts(_, a)
            | Formula::Assists(_, _, a) => alloc::vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => alloc::vec![a, b],
        }
    }

    pub fn is_modal(&self) -> bool {
        matches!(
            self,
            Formula::Brings(..) | Formula::Attempts(..) | Formula::Assists(..)
        )
    }

    /// All subformulas, including `self`.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = alloc::vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    /// Nesting depth of modal operators.
    pub fn modal_depth(&self) -> usize {
        let below = self
            .children()
            .into_iter()
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        if self.is_modal() {
            below + 1
        } else {
            below
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    /// Every agent mentioned in a modality.
    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Brings(g, _) | Formula::Attempts(g, _) => out.extend(g.members().cloned()),
            Formula::Assists(c1, c2, _) => {
                out.extend(c1.members().cloned());
                out.extend(c2.members().cloned());
            }
            _ => {}
        });
        out
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Every group occurring in a modality, without duplicates.
    pub fn groups(&self) -> BTreeSet<Group> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Brings(g, _) | Formula::Attempts(g, _) => {
                out.insert(g.clone());
            }
            Formula::Assists(c1, c2, _) => {
                out.insert(c1.clone());
                out.insert(c2.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Formula)>(&self, visitor: &mut F) {
        visitor(self);
        for c in self.children() {
            c.visit(visitor);
        }
    }
}
