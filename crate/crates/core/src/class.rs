//! Classes of cohesion networks and their enumeration.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::formula::{Agent, Group};
use crate::network::{covered_agents, strict_subgroups, CohesionNetwork, Edge};

/// Default largest carrier for which an edge universe is enumerated.
pub const DEFAULT_ENUMERATION_BOUND: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("group {0} is degenerate; only groups with two or more agents have networks")]
    Degenerate(Group),
    #[error("group {group} has {size} agents, above the enumeration bound {bound}")]
    BoundExceeded {
        group: Group,
        size: usize,
        bound: usize,
    },
    #[error("class is not edge-monotone: {0}")]
    NonMonotone(String),
    #[error("explicit network {network} for {group} is not admissible: {reason}")]
    Inadmissible {
        group: Group,
        network: String,
        reason: String,
    },
}

/// A restriction applied on top of a base class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Filter {
    /// Edge endpoints share no agent.
    DisjointEndpoints,
    /// Every edge starts at a single agent.
    SingletonBenefactors,
    /// Every edge ends at a single agent.
    SingletonBeneficiaries,
    /// At most this many edges per network.
    MaxEdges(usize),
}

impl Filter {
    fn admits_edge(&self, (from, to): &Edge) -> bool {
        match self {
            Filter::DisjointEndpoints => from.is_disjoint(to),
            Filter::SingletonBenefactors => from.is_degenerate(),
            Filter::SingletonBeneficiaries => to.is_degenerate(),
            Filter::MaxEdges(_) => true,
        }
    }

    fn admits(&self, net: &CohesionNetwork) -> bool {
        match self {
            Filter::MaxEdges(n) => net.edges.len() <= *n,
            _ => net.edges.iter().all(|e| self.admits_edge(e)),
        }
    }

    /// Parses the textual form used in class files and on the command line.
    pub fn parse(text: &str) -> Option<Filter> {
        match text {
            "disjoint-endpoints" => Some(Filter::DisjointEndpoints),
            "singleton-benefactors" => Some(Filter::SingletonBenefactors),
            "singleton-beneficiaries" => Some(Filter::SingletonBeneficiaries),
            _ => text
                .strip_prefix("max-edges:")
                .or_else(|| text.strip_prefix("max-edges="))
                .and_then(|n| n.parse().ok())
                .map(Filter::MaxEdges),
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::DisjointEndpoints => f.write_str("disjoint-endpoints"),
            Filter::SingletonBenefactors => f.write_str("singleton-benefactors"),
            Filter::SingletonBeneficiaries => f.write_str("singleton-beneficiaries"),
            Filter::MaxEdges(n) => write!(f, "max-edges:{n}"),
        }
    }
}

/// Knobs shared by every enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    /// Largest carrier whose edge universe may be walked.
    pub bound: usize,
    /// Admit edges `C ⇒ C`.
    pub allow_self_edges: bool,
    /// Enumerate every admissible vertex set instead of just the edge
    /// endpoints.
    pub literal_vertices: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            bound: DEFAULT_ENUMERATION_BOUND,
            allow_self_edges: false,
            literal_vertices: false,
        }
    }
}

/// A per-group selection of admissible networks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetworkClass {
    /// Every admissible network.
    C0,
    /// One network per group: each agent helps the rest of the group.
    AllHelpRest,
    Filtered {
        base: Box<NetworkClass>,
        filters: Vec<Filter>,
    },
    /// Networks listed group by group; unlisted groups have none.
    Explicit(BTreeMap<Group, Vec<CohesionNetwork>>),
}

impl NetworkClass {
    pub fn builtin(name: &str) -> Option<NetworkClass> {
        match name {
            "c0" => Some(NetworkClass::C0),
            "all-help-rest" => Some(NetworkClass::AllHelpRest),
            _ => None,
        }
    }

    pub fn filtered(self, filters: impl IntoIterator<Item = Filter>) -> NetworkClass {
        let filters: Vec<Filter> = filters.into_iter().collect();
        if filters.is_empty() {
            return self;
        }
        match self {
            NetworkClass::Filtered {
                base,
                filters: mut f,
            } => {
                f.extend(filters);
                NetworkClass::Filtered { base, filters: f }
            }
            base => NetworkClass::Filtered {
                base: Box::new(base),
                filters,
            },
        }
    }

    /// The unfiltered class at the bottom of any filter stack.
    pub fn root(&self) -> &NetworkClass {
        match self {
            NetworkClass::Filtered { base, .. } => base.root(),
            other => other,
        }
    }

    /// All filters along the stack, outermost last.
    pub fn all_filters(&self) -> Vec<Filter> {
        match self {
            NetworkClass::Filtered { base, filters } => {
                let mut out = base.all_filters();
                out.extend(filters.iter().copied());
                out
            }
            _ => Vec::new(),
        }
    }

    /// Structural edge-monotonicity: `c0` under any filters is closed under
    /// coverage-preserving edge deletion. The singleton class `all-help-rest`
    /// has a single (hence minimal) member per group. Explicit classes need
    /// [`NetworkClass::check_monotone`].
    pub fn is_structurally_monotone(&self) -> bool {
        matches!(self.root(), NetworkClass::C0 | NetworkClass::AllHelpRest)
    }

    /// Enumerates the networks of this class for `group`.
    pub fn members(&self, group: &Group, opts: &EnumOptions) -> Result<Members, NetworkError> {
        if group.is_degenerate() {
            return Err(NetworkError::Degenerate(group.clone()));
        }
        let filters = self.all_filters();
        match self.root() {
            NetworkClass::C0 => {
                let universe = EdgeUniverse::new(group, &filters, opts)?;
                Ok(Members(MembersInner::Universe(UniverseIter::new(
                    universe, &filters, opts,
                ))))
            }
            root => {
                let base = listed_members(root, group, opts)?;
                let kept: Vec<CohesionNetwork> = base
                    .into_iter()
                    .filter(|n| filters.iter().all(|f| f.admits(n)))
                    .collect();
                Ok(Members(MembersInner::List(kept.into_iter())))
            }
        }
    }

    /// Networks whose edge sets are ⊆-minimal among the members.
    ///
    /// For `c0`-based classes these are the minimal edge covers of the
    /// carrier inside the filtered edge universe, found without walking all
    /// edge subsets.
    pub fn minimal_members(
        &self,
        group: &Group,
        opts: &EnumOptions,
    ) -> Result<Vec<CohesionNetwork>, NetworkError> {
        if group.is_degenerate() {
            return Err(NetworkError::Degenerate(group.clone()));
        }
        let filters = self.all_filters();
        match self.root() {
            NetworkClass::C0 => {
                let universe = EdgeUniverse::new(group, &filters, opts)?;
                let max_edges = max_edges(&filters);
                Ok(minimal_covers(&universe, max_edges)
                    .into_iter()
                    .map(|edges| universe.network(&edges))
                    .collect())
            }
            root => {
                let members: Vec<CohesionNetwork> = self.members(group, opts)?.collect();
                if matches!(root, NetworkClass::Explicit(_)) {
                    check_monotone_list(group, &members)?;
                }
                Ok(minimal_by_inclusion(members))
            }
        }
    }

    /// Exhaustive edge-monotonicity check for `group`.
    pub fn check_monotone(&self, group: &Group, opts: &EnumOptions) -> Result<(), NetworkError> {
        if matches!(self.root(), NetworkClass::C0) {
            return Ok(());
        }
        let members: Vec<CohesionNetwork> = self.members(group, opts)?.collect();
        check_monotone_list(group, &members)
    }
}

fn max_edges(filters: &[Filter]) -> Option<usize> {
    filters
        .iter()
        .filter_map(|f| match f {
            Filter::MaxEdges(n) => Some(*n),
            _ => None,
        })
        .min()
}

fn listed_members(
    root: &NetworkClass,
    group: &Group,
    opts: &EnumOptions,
) -> Result<Vec<CohesionNetwork>, NetworkError> {
    match root {
        NetworkClass::AllHelpRest => {
            let edges = group.members().map(|a| {
                let me = Group::singleton(a.clone());
                let rest = group.difference(&me).expect("non-degenerate group");
                (me, rest)
            });
            Ok(alloc::vec![CohesionNetwork::from_edges(
                group.clone(),
                edges
            )])
        }
        NetworkClass::Explicit(map) => {
            let listed = map.get(group).cloned().unwrap_or_default();
            let mut out = Vec::with_capacity(listed.len());
            for net in listed {
                let net = if opts.literal_vertices {
                    net
                } else {
                    net.canonicalize()
                };
                let violations = net.check_c0(opts.allow_self_edges);
                if let Some(v) = violations.first() {
                    return Err(NetworkError::Inadmissible {
                        group: group.clone(),
                        network: alloc::format!("{net}"),
                        reason: alloc::format!("{v}"),
                    });
                }
                if net.carrier != *group {
                    return Err(NetworkError::Inadmissible {
                        group: group.clone(),
                        network: alloc::format!("{net}"),
                        reason: alloc::format!("carrier is {}", net.carrier),
                    });
                }
                if !out.contains(&net) {
                    out.push(net);
                }
            }
            Ok(out)
        }
        NetworkClass::C0 | NetworkClass::Filtered { .. } => unreachable!("not a listed root"),
    }
}

fn check_monotone_list(group: &Group, members: &[CohesionNetwork]) -> Result<(), NetworkError> {
    let edge_sets: BTreeSet<&BTreeSet<Edge>> = members.iter().map(|n| &n.edges).collect();
    for net in members {
        for e in &net.edges {
            let mut smaller = net.edges.clone();
            smaller.remove(e);
            let covered = covered_agents(smaller.iter());
            if group.members().all(|a| covered.contains(a)) && !edge_sets.contains(&smaller) {
                return Err(NetworkError::NonMonotone(alloc::format!(
                    "removing {} => {} from {net} keeps {group} covered but leaves the class",
                    e.0,
                    e.1
                )));
            }
        }
    }
    Ok(())
}

fn minimal_by_inclusion(members: Vec<CohesionNetwork>) -> Vec<CohesionNetwork> {
    let mut out: Vec<CohesionNetwork> = Vec::new();
    for (i, n) in members.iter().enumerate() {
        let dominated = members.iter().enumerate().any(|(j, m)| {
            j != i && m.edges.is_subset(&n.edges) && (m.edges.len() < n.edges.len() || j < i)
        });
        if !dominated {
            out.push(n.clone());
        }
    }
    out
}

/// The ordered candidate edges for a carrier after per-edge filters.
#[derive(Debug, Clone)]
pub(crate) struct EdgeUniverse {
    carrier: Group,
    vertices: Vec<Group>,
    edges: Vec<Edge>,
    /// Agents covered by each edge, as a bitmask over the carrier.
    cover: Vec<u64>,
    full: u64,
}

impl EdgeUniverse {
    fn new(group: &Group, filters: &[Filter], opts: &EnumOptions) -> Result<Self, NetworkError> {
        if group.len() > opts.bound || group.len() > 16 {
            return Err(NetworkError::BoundExceeded {
                group: group.clone(),
                size: group.len(),
                bound: opts.bound.min(16),
            });
        }
        let agents: Vec<&Agent> = group.members().collect();
        let mask_of = |g: &Group| -> u64 {
            agents
                .iter()
                .enumerate()
                .filter(|(_, a)| g.contains(a))
                .fold(0, |m, (i, _)| m | 1 << i)
        };
        let vertices = strict_subgroups(group);
        let mut edges = Vec::new();
        for a in &vertices {
            for b in &vertices {
                if a == b && !opts.allow_self_edges {
                    continue;
                }
                let e = (a.clone(), b.clone());
                if filters.iter().all(|f| f.admits_edge(&e)) {
                    edges.push(e);
                }
            }
        }
        let cover = edges.iter().map(|(a, b)| mask_of(a) | mask_of(b)).collect();
        Ok(EdgeUniverse {
            carrier: group.clone(),
            vertices,
            edges,
            cover,
            full: (1u64 << agents.len()) - 1,
        })
    }

    fn network(&self, picked: &[usize]) -> CohesionNetwork {
        CohesionNetwork::from_edges(
            self.carrier.clone(),
            picked.iter().map(|&i| self.edges[i].clone()),
        )
    }
}

/// Lazy sequence of class members.
pub struct Members(MembersInner);

enum MembersInner {
    Universe(UniverseIter),
    List(alloc::vec::IntoIter<CohesionNetwork>),
}

impl Iterator for Members {
    type Item = CohesionNetwork;

    fn next(&mut self) -> Option<CohesionNetwork> {
        match &mut self.0 {
            MembersInner::Universe(it) => it.next(),
            MembersInner::List(it) => it.next(),
        }
    }
}

/// Walks edge subsets in increasing bitmask order.
struct UniverseIter {
    universe: EdgeUniverse,
    /// Little-endian multi-word counter over the edge universe.
    mask: Vec<u64>,
    done: bool,
    max_edges: Option<usize>,
    literal_vertices: bool,
    pending: Vec<CohesionNetwork>,
}

impl UniverseIter {
    fn new(universe: EdgeUniverse, filters: &[Filter], opts: &EnumOptions) -> Self {
        let words = universe.edges.len().div_ceil(64).max(1);
        UniverseIter {
            done: universe.edges.is_empty(),
            universe,
            mask: alloc::vec![0; words],
            max_edges: max_edges(filters),
            literal_vertices: opts.literal_vertices,
            pending: Vec::new(),
        }
    }

    /// Increments the counter; false once it wraps past the last subset.
    fn step(&mut self) -> bool {
        self.add_at(0);
        self.in_range()
    }

    /// Adds the lowest set bit to the counter, which is the smallest jump that
    /// can lower its population count.
    fn skip_dense(&mut self) -> bool {
        let Some(w) = self.mask.iter().position(|w| *w != 0) else {
            return self.in_range();
        };
        let low = self.mask[w] & self.mask[w].wrapping_neg();
        let (v, carry) = self.mask[w].overflowing_add(low);
        self.mask[w] = v;
        if carry {
            self.add_at(w + 1);
        }
        self.in_range()
    }

    fn add_at(&mut self, from: usize) {
        for w in from..self.mask.len() {
            let (v, carry) = self.mask[w].overflowing_add(1);
            self.mask[w] = v;
            if !carry {
                return;
            }
        }
    }

    fn in_range(&self) -> bool {
        let n = self.universe.edges.len();
        let last = self.mask.len() - 1;
        let top_bits = n - 64 * last;
        let overflow = if top_bits >= 64 {
            self.mask.iter().all(|w| *w == 0)
        } else {
            self.mask[last] >> top_bits != 0
        };
        !overflow
    }

    fn picked(&self) -> Vec<usize> {
        (0..self.universe.edges.len())
            .filter(|i| self.mask[i / 64] >> (i % 64) & 1 == 1)
            .collect()
    }

    fn literal_variants(&self, net: CohesionNetwork) -> Vec<CohesionNetwork> {
        let extra: Vec<&Group> = self
            .universe
            .vertices
            .iter()
            .filter(|v| !net.vertices.contains(v))
            .collect();
        let mut out = Vec::new();
        for m in 0u64..(1 << extra.len()) {
            let mut n = net.clone();
            for (i, v) in extra.iter().enumerate() {
                if m >> i & 1 == 1 {
                    n.vertices.insert((*v).clone());
                }
            }
            out.push(n);
        }
        out.reverse();
        out
    }
}

impl Iterator for UniverseIter {
    type Item = CohesionNetwork;

    fn next(&mut self) -> Option<CohesionNetwork> {
        if let Some(n) = self.pending.pop() {
            return Some(n);
        }
        while !self.done {
            if !self.step() {
                self.done = true;
                break;
            }
            if let Some(m) = self.max_edges {
                let mut ok = true;
                while self
                    .mask
                    .iter()
                    .map(|w| w.count_ones() as usize)
                    .sum::<usize>()
                    > m
                {
                    if !self.skip_dense() {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    self.done = true;
                    break;
                }
            }
            let picked = self.picked();
            let covered = picked.iter().fold(0, |m, &i| m | self.universe.cover[i]);
            if covered != self.universe.full {
                continue;
            }
            let net = self.universe.network(&picked);
            if self.literal_vertices {
                self.pending = self.literal_variants(net);
                return self.pending.pop();
            }
            return Some(net);
        }
        None
    }
}

/// Minimal edge covers of the carrier, in increasing bitmask order.
fn minimal_covers(universe: &EdgeUniverse, max_edges: Option<usize>) -> Vec<Vec<usize>> {
    fn irredundant(universe: &EdgeUniverse, chosen: &[usize]) -> bool {
        chosen.iter().enumerate().all(|(k, &e)| {
            let others = chosen
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .fold(0, |m, (_, &i)| m | universe.cover[i]);
            universe.cover[e] & !others != 0
        })
    }

    fn go(
        universe: &EdgeUniverse,
        limit: usize,
        chosen: &mut Vec<usize>,
        covered: u64,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let uncovered = universe.full & !covered;
        if uncovered == 0 {
            let mut key = chosen.clone();
            key.sort_unstable();
            out.insert(key);
            return;
        }
        if chosen.len() == limit {
            return;
        }
        let agent = uncovered.trailing_zeros();
        for e in 0..universe.edges.len() {
            if universe.cover[e] >> agent & 1 == 0 || chosen.contains(&e) {
                continue;
            }
            chosen.push(e);
            if irredundant(universe, chosen) {
                go(universe, limit, chosen, covered | universe.cover[e], out);
            }
            chosen.pop();
        }
    }

    let n = universe.carrier.len();
    let limit = max_edges.map_or(n, |m| m.min(n));
    let mut found = BTreeSet::new();
    go(universe, limit, &mut Vec::new(), 0, &mut found);
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    // bitmask order: compare highest edge index first
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(names: &[&str]) -> Group {
        Group::from_names(names.iter().copied()).unwrap()
    }

    fn edge_keys(n: &CohesionNetwork) -> Vec<(String, String)> {
        n.edges.iter().map(|(a, b)| (a.key(), b.key())).collect()
    }

    #[test]
    fn two_agent_c0_has_three_networks() {
        let nets: Vec<_> = NetworkClass::C0
            .members(&g(&["1", "2"]), &EnumOptions::default())
            .unwrap()
            .collect();
        let keys: Vec<_> = nets.iter().map(edge_keys).collect();
        let s = |a: &str| String::from(a);
        assert_eq!(
            keys,
            [
                alloc::vec![(s("1"), s("2"))],
                alloc::vec![(s("2"), s("1"))],
                alloc::vec![(s("1"), s("2")), (s("2"), s("1"))],
            ]
        );
        for n in &nets {
            assert!(n.check_c0(false).is_empty());
        }
    }

    #[test]
    fn degenerate_and_bound_errors() {
        let opts = EnumOptions::default();
        assert!(matches!(
            NetworkClass::C0.members(&g(&["1"]), &opts),
            Err(NetworkError::Degenerate(_))
        ));
        let five = g(&["1", "2", "3", "4", "5"]);
        assert!(matches!(
            NetworkClass::C0.members(&five, &opts),
            Err(NetworkError::BoundExceeded { bound: 4, .. })
        ));
        // a singleton class has no edge universe to bound
        assert_eq!(
            NetworkClass::AllHelpRest
                .members(&five, &opts)
                .unwrap()
                .count(),
            1
        );
    }

    #[test]
    fn all_help_rest_is_the_piano_fabric() {
        let nets: Vec<_> = NetworkClass::AllHelpRest
            .members(&g(&["1", "2", "3"]), &EnumOptions::default())
            .unwrap()
            .collect();
        assert_eq!(nets.len(), 1);
        let s = |a: &str| String::from(a);
        assert_eq!(
            edge_keys(&nets[0]),
            [(s("1"), s("2,3")), (s("2"), s("1,3")), (s("3"), s("1,2"))]
        );
    }

    #[test]
    fn self_edges_and_literal_vertices() {
        let pair = g(&["1", "2"]);
        let opts = EnumOptions {
            allow_self_edges: true,
            ..Default::default()
        };
        // edges {1}=>{1}, {1}=>{2}, {2}=>{1}, {2}=>{2}: covering subsets
        let n = NetworkClass::C0.members(&pair, &opts).unwrap().count();
        assert_eq!(n, 16 - 1 - 2);
        let literal = EnumOptions {
            literal_vertices: true,
            ..Default::default()
        };
        assert_eq!(
            NetworkClass::C0.members(&pair, &literal).unwrap().count(),
            3
        );
        let triple = g(&["1", "2", "3"]);
        let limited = NetworkClass::C0.filtered([Filter::MaxEdges(1)]);
        let plain = limited
            .members(&triple, &EnumOptions::default())
            .unwrap()
            .count();
        let raw = limited.members(&triple, &literal).unwrap().count();
        assert!(raw > plain);
    }

    #[test]
    fn minimal_members_two_agents() {
        let mins = NetworkClass::C0
            .minimal_members(&g(&["1", "2"]), &EnumOptions::default())
            .unwrap();
        assert_eq!(mins.len(), 2);
        assert!(mins.iter().all(|n| n.edges.len() == 1));
    }

    #[test]
    fn explicit_monotonicity() {
        let pair = g(&["1", "2"]);
        let both = CohesionNetwork::from_edges(
            pair.clone(),
            [(g(&["1"]), g(&["2"])), (g(&["2"]), g(&["1"]))],
        );
        let one = CohesionNetwork::from_edges(pair.clone(), [(g(&["1"]), g(&["2"]))]);
        let mut map = BTreeMap::new();
        map.insert(pair.clone(), alloc::vec![both.clone()]);
        let class = NetworkClass::Explicit(map.clone());
        let opts = EnumOptions::default();
        assert!(matches!(
            class.minimal_members(&pair, &opts),
            Err(NetworkError::NonMonotone(_))
        ));
        map.insert(
            pair.clone(),
            alloc::vec![
                both,
                one.clone(),
                CohesionNetwork::from_edges(pair.clone(), [(g(&["2"]), g(&["1"]))])
            ],
        );
        let class = NetworkClass::Explicit(map);
        assert_eq!(class.minimal_members(&pair, &opts).unwrap().len(), 2);
    }

    #[test]
    fn explicit_rejects_inadmissible() {
        let pair = g(&["1", "2"]);
        let bad = CohesionNetwork::from_edges(pair.clone(), [(g(&["1"]), g(&["1"]))]);
        let mut map = BTreeMap::new();
        map.insert(pair.clone(), alloc::vec![bad]);
        let err = NetworkClass::Explicit(map)
            .members(&pair, &EnumOptions::default())
            .err()
            .unwrap();
        assert!(matches!(err, NetworkError::Inadmissible { .. }));
    }

    #[test]
    fn filter_text() {
        for f in [
            Filter::DisjointEndpoints,
            Filter::SingletonBenefactors,
            Filter::SingletonBeneficiaries,
            Filter::MaxEdges(2),
        ] {
            assert_eq!(Filter::parse(&alloc::format!("{f}")), Some(f));
        }
        assert_eq!(Filter::parse("bogus"), None);
    }
}
