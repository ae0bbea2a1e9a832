//! Finite neighborhood models for the individual-agent fragment.
//!
//! `E{i} φ` holds at `w` iff the truth set of `φ` is one of `w`'s
//! `E`-neighborhoods for `i`, and likewise for `A{i}`. Validated models
//! satisfy the T-condition (every `E`-neighborhood of `w` contains `w`) and
//! the no-unit condition (the full world set is never an `E`-neighborhood).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{Agent, Formula};
use crate::reduction::is_biat;

/// Largest world count accepted by [`random_model`]; every subset of the
/// worlds is a candidate neighborhood.
pub const MAX_RANDOM_WORLDS: usize = 12;

/// A set of worlds, as a bitset over world indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldSet(Vec<u64>);

impl WorldSet {
    pub fn empty(n_worlds: usize) -> Self {
        WorldSet(alloc::vec![0; n_worlds.div_ceil(64)])
    }

    pub fn full(n_worlds: usize) -> Self {
        let mut s = Self::empty(n_worlds);
        for w in 0..n_worlds {
            s.insert(w);
        }
        s
    }

    pub fn from_indices(n_worlds: usize, worlds: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n_worlds);
        for w in worlds {
            s.insert(w);
        }
        s
    }

    pub fn insert(&mut self, w: usize) {
        self.0[w / 64] |= 1 << (w % 64);
    }

    pub fn contains(&self, w: usize) -> bool {
        self.0
            .get(w / 64)
            .is_some_and(|word| word >> (w % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, word)| {
            (0..64)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| i * 64 + b)
        })
    }

    pub fn complement(&self, n_worlds: usize) -> Self {
        let mut out = Self::empty(n_worlds);
        for w in 0..n_worlds {
            if !self.contains(w) {
                out.insert(w);
            }
        }
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        WorldSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        WorldSet(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    /// Number of worlds this set was sized for, rounded up to a word.
    fn capacity(&self) -> usize {
        self.0.len() * 64
    }
}

/// Per-world neighborhood families for one agent.
pub type Neighborhoods = Vec<BTreeSet<WorldSet>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodModel {
    pub worlds: Vec<String>,
    pub valuation: BTreeMap<String, WorldSet>,
    /// Agency neighborhoods, indexed by world.
    pub agency: BTreeMap<Agent, Neighborhoods>,
    /// Attempt neighborhoods, indexed by world.
    pub attempt: BTreeMap<Agent, Neighborhoods>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown world {0}")]
    UnknownWorld(String),
    #[error("unknown agent {0}")]
    UnknownAgent(String),
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("formula is outside the individual-agent fragment: {0}")]
    NotBiat(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameViolation {
    /// An `E`-neighborhood of `world` does not contain `world`.
    T {
        agent: Agent,
        world: String,
        neighborhood: Vec<String>,
    },
    /// The full world set is an `E`-neighborhood.
    NoUnit { agent: Agent, world: String },
    /// Shape errors: duplicate names, wrong arities, out-of-range worlds.
    Malformed(String),
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameViolation::T {
                agent,
                world,
                neighborhood,
            } => write!(
                f,
                "T-condition: E-neighborhood {{{}}} of agent {agent} at {world} misses {world}",
                neighborhood.join(",")
            ),
            FrameViolation::NoUnit { agent, world } => write!(
                f,
                "no-unit condition: the full world set is an E-neighborhood of agent {agent} at {world}"
            ),
            FrameViolation::Malformed(msg) => write!(f, "malformed model: {msg}"),
        }
    }
}

impl NeighborhoodModel {
    /// A model over `worlds` with empty valuation and no agents.
    pub fn new(worlds: Vec<String>) -> Self {
        NeighborhoodModel {
            worlds,
            valuation: BTreeMap::new(),
            agency: BTreeMap::new(),
            attempt: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn set_names(&self, set: &WorldSet) -> Vec<String> {
        set.iter().map(|w| self.worlds[w].clone()).collect()
    }

    /// Registers an agent with empty neighborhoods everywhere.
    pub fn add_agent(&mut self, agent: Agent) {
        let n = self.worlds.len();
        self.agency
            .entry(agent.clone())
            .or_insert_with(|| alloc::vec![BTreeSet::new(); n]);
        self.attempt
            .entry(agent)
            .or_insert_with(|| alloc::vec![BTreeSet::new(); n]);
    }

    /// Frame violations; empty iff the model is well formed and satisfies the
    /// T and no-unit conditions.
    pub fn validate(&self) -> Vec<FrameViolation> {
        let n = self.worlds.len();
        let mut out = Vec::new();
        if n == 0 {
            out.push(FrameViolation::Malformed("no worlds".to_string()));
            return out;
        }
        let names: BTreeSet<&String> = self.worlds.iter().collect();
        if names.len() != n {
            out.push(FrameViolation::Malformed(
                "duplicate world names".to_string(),
            ));
        }
        let in_range = |s: &WorldSet| s.iter().all(|w| w < n) && s.capacity() >= n;
        for (atom, set) in &self.valuation {
            if !in_range(set) {
                out.push(FrameViolation::Malformed(alloc::format!(
                    "valuation of {atom} mentions unknown worlds"
                )));
            }
        }
        let full = WorldSet::full(n);
        for (kind, map) in [("E", &self.agency), ("A", &self.attempt)] {
            for (agent, per_world) in map {
                if per_world.len() != n {
                    out.push(FrameViolation::Malformed(alloc::format!(
                        "{kind}-neighborhoods of agent {agent} cover {} worlds, expected {n}",
                        per_world.len()
                    )));
                    continue;
                }
                for (w, family) in per_world.iter().enumerate() {
                    for x in family {
                        if !in_range(x) {
                            out.push(FrameViolation::Malformed(alloc::format!(
                                "{kind}-neighborhood of agent {agent} at {} mentions unknown worlds",
                                self.worlds[w]
                            )));
                            continue;
                        }
                        if kind == "E" && !x.contains(w) {
                            out.push(FrameViolation::T {
                                agent: agent.clone(),
                                world: self.worlds[w].clone(),
                                neighborhood: self.set_names(x),
                            });
                        }
                    }
                    if kind == "E" && family.contains(&full) {
                        out.push(FrameViolation::NoUnit {
                            agent: agent.clone(),
                            world: self.worlds[w].clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// The worlds where `f` holds.
    pub fn truth_set(&self, f: &Formula) -> Result<WorldSet, ModelError> {
        if !is_biat(f) {
            return Err(ModelError::NotBiat(alloc::format!("{f}")));
        }
        self.eval(f)
    }

    /// Whether `f` holds at world `w`.
    pub fn check(&self, w: usize, f: &Formula) -> Result<bool, ModelError> {
        if w >= self.worlds.len() {
            return Err(ModelError::UnknownWorld(alloc::format!("#{w}")));
        }
        Ok(self.truth_set(f)?.contains(w))
    }

    /// Like [`NeighborhoodModel::check`], addressing the world by name.
    pub fn check_named(&self, world: &str, f: &Formula) -> Result<bool, ModelError> {
        let w = self
            .world_index(world)
            .ok_or_else(|| ModelError::UnknownWorld(world.to_string()))?;
        self.check(w, f)
    }

    fn eval(&self, f: &Formula) -> Result<WorldSet, ModelError> {
        let n = self.worlds.len();
        Ok(match f {
            Formula::Top => WorldSet::full(n),
            Formula::Bottom => WorldSet::empty(n),
            Formula::Atom(p) => self
                .valuation
                .get(p)
                .cloned()
                .ok_or_else(|| ModelError::UnknownAtom(p.clone()))?,
            Formula::Not(a) => self.eval(a)?.complement(n),
            Formula::And(a, b) => self.eval(a)?.intersection(&self.eval(b)?),
            Formula::Or(a, b) => self.eval(a)?.union(&self.eval(b)?),
            Formula::Implies(a, b) => self.eval(a)?.complement(n).union(&self.eval(b)?),
            Formula::Iff(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                WorldSet::from_indices(n, (0..n).filter(|&w| x.contains(w) == y.contains(w)))
            }
            Formula::Brings(g, a) | Formula::Attempts(g, a) => {
                let agent = g.as_singleton().expect("checked by is_biat");
                let map = if matches!(f, Formula::Brings(..)) {
                    &self.agency
                } else {
                    &self.attempt
                };
                let per_world = map
                    .get(agent)
                    .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))?;
                let body = self.eval(a)?;
                WorldSet::from_indices(
                    n,
                    (0..n).filter(|&w| per_world.get(w).is_some_and(|fam| fam.contains(&body))),
                )
            }
            Formula::Assists(..) => return Err(ModelError::NotBiat(alloc::format!("{f}"))),
        })
    }
}

/// Seeded random model that always passes [`NeighborhoodModel::validate`].
///
/// Each candidate subset of worlds becomes a neighborhood with probability
/// `density`; candidates breaking the T or no-unit condition are dropped
/// for `E`.
pub fn random_model(
    seed: u64,
    n_worlds: usize,
    atoms: &[String],
    agents: &[Agent],
    density: f64,
) -> Result<NeighborhoodModel, ModelError> {
    if n_worlds == 0 || n_worlds > MAX_RANDOM_WORLDS {
        return Err(ModelError::Parameter(alloc::format!(
            "world count must be within 1..={MAX_RANDOM_WORLDS}, got {n_worlds}"
        )));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(ModelError::Parameter(alloc::format!(
            "density must be within [0, 1], got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worlds: Vec<String> = (0..n_worlds).map(|i| alloc::format!("w{i}")).collect();
    let mut model = NeighborhoodModel::new(worlds);
    for atom in atoms {
        let set = WorldSet::from_indices(n_worlds, (0..n_worlds).filter(|_| rng.random_bool(0.5)));
        model.valuation.insert(atom.clone(), set);
    }
    let subsets: Vec<WorldSet> = (0u32..1 << n_worlds)
        .map(|m| WorldSet::from_indices(n_worlds, (0..n_worlds).filter(|i| m >> i & 1 == 1)))
        .collect();
    let full = WorldSet::full(n_worlds);
    for agent in agents {
        let mut agency = Vec::with_capacity(n_worlds);
        let mut attempt = Vec::with_capacity(n_worlds);
        for w in 0..n_worlds {
            let mut e = BTreeSet::new();
            let mut a = BTreeSet::new();
            for x in &subsets {
                if rng.random_bool(density) && x.contains(w) && *x != full {
                    e.insert(x.clone());
                }
                if rng.random_bool(density) {
                    a.insert(x.clone());
                }
            }
            agency.push(e);
            attempt.push(a);
        }
        model.agency.insert(agent.clone(), agency);
        model.attempt.insert(agent.clone(), attempt);
    }
    Ok(model)
}
