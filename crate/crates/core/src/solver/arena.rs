//! Hash-consed formula nodes for a single solver query.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::formula::{Agent, Formula};

pub(crate) type Id = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Kind {
    Agency,
    Attempt,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Node {
    Top,
    Atom(usize),
    Not(Id),
    And(Id, Id),
    Or(Id, Id),
    Implies(Id, Id),
    Iff(Id, Id),
    Modal(Kind, usize, Id),
}

#[derive(Debug, Default)]
pub(crate) struct Arena {
    nodes: Vec<Node>,
    index: BTreeMap<Node, Id>,
    pub atoms: Vec<String>,
    pub agents: Vec<Agent>,
}

impl Arena {
    pub fn node(&self, id: Id) -> &Node {
        &self.nodes[id]
    }

    pub fn find(&self, node: &Node) -> Option<Id> {
        self.index.get(node).copied()
    }

    pub fn intern(&mut self, node: Node) -> Id {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn symbol<T: Ord + Clone>(table: &mut Vec<T>, item: &T) -> usize {
        match table.iter().position(|x| x == item) {
            Some(i) => i,
            None => {
                table.push(item.clone());
                table.len() - 1
            }
        }
    }

    /// Registers atoms and agents ahead of time so that every model built
    /// during the query shares one symbol table.
    pub fn register(&mut self, f: &Formula) {
        for p in f.atoms() {
            Self::symbol(&mut self.atoms, &p);
        }
        for a in f.agents() {
            Self::symbol(&mut self.agents, &a);
        }
    }

    /// Interns an individual-agent formula. Callers check the fragment.
    pub fn add(&mut self, f: &Formula) -> Id {
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Bottom => {
                let top = self.intern(Node::Top);
                Node::Not(top)
            }
            Formula::Atom(p) => Node::Atom(Self::symbol(&mut self.atoms, p)),
            Formula::Not(a) => Node::Not(self.add(a)),
            Formula::And(a, b) => Node::And(self.add(a), self.add(b)),
            Formula::Or(a, b) => Node::Or(self.add(a), self.add(b)),
            Formula::Implies(a, b) => Node::Implies(self.add(a), self.add(b)),
            Formula::Iff(a, b) => Node::Iff(self.add(a), self.add(b)),
            Formula::Brings(g, a) | Formula::Attempts(g, a) => {
                let agent = g.as_singleton().expect("individual modality");
                let agent = Self::symbol(&mut self.agents, agent);
                let kind = if matches!(f, Formula::Brings(..)) {
                    Kind::Agency
                } else {
                    Kind::Attempt
                };
                Node::Modal(kind, agent, self.add(a))
            }
            Formula::Assists(..) => unreachable!("assistance is eliminated before solving"),
        };
        self.intern(node)
    }

    pub fn not(&mut self, a: Id) -> Id {
        self.intern(Node::Not(a))
    }

    pub fn differ(&mut self, a: Id, b: Id) -> Id {
        let iff = self.intern(Node::Iff(a, b));
        self.not(iff)
    }

    /// Every modal node reachable from `root`, bodies included, by id.
    pub fn modal_closure(&self, root: Id) -> Vec<Id> {
        let mut seen = alloc::collections::BTreeSet::new();
        let mut stack = alloc::vec![root];
        let mut out = Vec::new();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            match *self.node(id) {
                Node::Top | Node::Atom(_) => {}
                Node::Not(a) => stack.push(a),
                Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Modal(_, _, a) => {
                    out.push(id);
                    stack.push(a);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Atom symbols reachable from `root`.
    pub fn atom_closure(&self, root: Id) -> Vec<usize> {
        let mut seen = alloc::collections::BTreeSet::new();
        let mut atoms = alloc::collections::BTreeSet::new();
        let mut stack = alloc::vec![root];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            match *self.node(id) {
                Node::Top => {}
                Node::Atom(s) => {
                    atoms.insert(s);
                }
                Node::Not(a) | Node::Modal(_, _, a) => stack.push(a),
                Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        atoms.into_iter().collect()
    }
}
