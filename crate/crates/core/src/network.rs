//! Cohesion networks: a directed graph over strict nonempty subgroups of a
//! carrier group, whose edges name the pro-social behaviours the group may
//! rely on.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::formula::{Agent, Group};

/// A directed edge `C1 ⇒ C2`: `C1` has a pro-social behaviour towards `C2`.
pub type Edge = (Group, Group);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CohesionNetwork {
    pub carrier: Group,
    pub vertices: BTreeSet<Group>,
    pub edges: BTreeSet<Edge>,
}

/// A broken admissibility constraint. The numbering follows the five
/// constraints defining admissible networks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// 1: a vertex mentions an agent outside the carrier.
    VertexOutsideCarrier(Group),
    /// 2: an edge endpoint is not a vertex.
    EdgeEndpointNotVertex(Edge),
    /// 3: the carrier itself is a vertex.
    CarrierIsVertex,
    /// 4: the empty coalition is a vertex. Unrepresentable with [`Group`],
    /// kept so that constraint numbers stay aligned.
    EmptyVertex,
    /// 5: some agent of the carrier occurs in no edge.
    Uncovered(Agent),
    /// Irreflexivity, enforced unless self-edges are explicitly allowed.
    SelfEdge(Group),
}

impl Violation {
    /// Constraint number, `0` for the irreflexivity requirement.
    pub fn constraint(&self) -> u8 {
        match self {
            Violation::VertexOutsideCarrier(_) => 1,
            Violation::EdgeEndpointNotVertex(_) => 2,
            Violation::CarrierIsVertex => 3,
            Violation::EmptyVertex => 4,
            Violation::Uncovered(_) => 5,
            Violation::SelfEdge(_) => 0,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VertexOutsideCarrier(g) => {
                write!(f, "constraint 1: vertex {g} is not a subset of the carrier")
            }
            Violation::EdgeEndpointNotVertex((a, b)) => {
                write!(
                    f,
                    "constraint 2: edge {a} => {b} has an endpoint outside the vertices"
                )
            }
            Violation::CarrierIsVertex => f.write_str("constraint 3: the carrier is a vertex"),
            Violation::EmptyVertex => f.write_str("constraint 4: the empty coalition is a vertex"),
            Violation::Uncovered(a) => write!(f, "constraint 5: agent {a} occurs in no edge"),
            Violation::SelfEdge(g) => write!(f, "self-edge on {g}"),
        }
    }
}

impl CohesionNetwork {
    /// A network whose vertices are exactly the edge endpoints.
    pub fn from_edges(carrier: Group, edges: impl IntoIterator<Item = Edge>) -> Self {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        let vertices = endpoints(&edges);
        CohesionNetwork {
            carrier,
            vertices,
            edges,
        }
    }

    /// Agents occurring in some edge endpoint.
    pub fn covered(&self) -> BTreeSet<Agent> {
        covered_agents(self.edges.iter())
    }

    /// Checks membership in the class of all admissible networks.
    pub fn check_c0(&self, allow_self_edges: bool) -> Vec<Violation> {
        let mut out = Vec::new();
        for v in &self.vertices {
            if !v.is_subset(&self.carrier) {
                out.push(Violation::VertexOutsideCarrier(v.clone()));
            }
        }
        for e in &self.edges {
            if !self.vertices.contains(&e.0) || !self.vertices.contains(&e.1) {
                out.push(Violation::EdgeEndpointNotVertex(e.clone()));
            }
        }
        if self.vertices.contains(&self.carrier) {
            out.push(Violation::CarrierIsVertex);
        }
        let covered = self.covered();
        for a in self.carrier.members() {
            if !covered.contains(a) {
                out.push(Violation::Uncovered(a.clone()));
            }
        }
        if !allow_self_edges {
            for (a, b) in &self.edges {
                if a == b {
                    out.push(Violation::SelfEdge(a.clone()));
                }
            }
        }
        out
    }

    /// Drops isolated vertices. Idempotent.
    pub fn canonicalize(&self) -> Self {
        CohesionNetwork {
            carrier: self.carrier.clone(),
            vertices: endpoints(&self.edges),
            edges: self.edges.clone(),
        }
    }
}

impl fmt::Display for CohesionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a} => {b}")?;
        }
        f.write_str("]")
    }
}

pub(crate) fn endpoints(edges: &BTreeSet<Edge>) -> BTreeSet<Group> {
    edges
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect()
}

pub(crate) fn covered_agents<'a>(edges: impl Iterator<Item = &'a Edge>) -> BTreeSet<Agent> {
    let mut out = BTreeSet::new();
    for (a, b) in edges {
        out.extend(a.members().cloned());
        out.extend(b.members().cloned());
    }
    out
}

/// Nonempty strict subsets of `g`, ordered by size then lexicographically.
pub fn strict_subgroups(g: &Group) -> Vec<Group> {
    let members: Vec<&Agent> = g.members().collect();
    let n = members.len();
    let mut out = Vec::new();
    if n >= usize::BITS as usize {
        return out;
    }
    for mask in 1usize..(1 << n) - 1 {
        let picked = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| members[i].clone());
        out.push(Group::new(picked).expect("nonempty mask"));
    }
    out.sort();
    out
}
