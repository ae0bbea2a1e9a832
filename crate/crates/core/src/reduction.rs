//! Elimination of group modalities.
//!
//! Group agency is unfolded into disjunctions over the networks of a class
//! of conjunctions of successful assistance, assistance into individual
//! agency and attempts, and group attempts into individual attempts. All
//! other constructors are translated homomorphically. Endpoints of network
//! edges are strict subgroups of the carrier, so the recursion terminates.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::class::{EnumOptions, NetworkClass, NetworkError};
use crate::formula::{Formula, Group};
use crate::network::CohesionNetwork;

/// Limits on the size of an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionBudget {
    pub max_output_nodes: usize,
    pub max_disjuncts_per_group: usize,
}

impl Default for ExpansionBudget {
    fn default() -> Self {
        ExpansionBudget {
            max_output_nodes: 1_000_000,
            max_disjuncts_per_group: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("expansion exceeds {limit} nodes (reached {reached} while expanding)")]
    OutputBudget { limit: usize, reached: usize },
    #[error("group {group} has more than {limit} networks in this class")]
    DisjunctBudget { group: Group, limit: usize },
    #[error("budget values must be positive")]
    InvalidBudget,
}

/// True iff `f` has no assistance and every modality is individual.
pub fn is_biat(f: &Formula) -> bool {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => true,
        Formula::Not(a) => is_biat(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            is_biat(a) && is_biat(b)
        }
        Formula::Brings(g, a) | Formula::Attempts(g, a) => g.is_degenerate() && is_biat(a),
        Formula::Assists(..) => false,
    }
}

/// Rewrites `f` into the individual-agent fragment relative to `class`.
pub fn expand(
    f: &Formula,
    class: &NetworkClass,
    budget: &ExpansionBudget,
    opts: &EnumOptions,
) -> Result<Formula, ExpandError> {
    Expander::new(class, budget, opts, false)?.run(f)
}

/// Same as [`expand`], with group agency ranging over the ⊆-minimal networks
/// of the class only. Equivalent to [`expand`] because a conjunction over a
/// larger edge set entails the conjunction over any of its subsets.
pub fn expand_minimal(
    f: &Formula,
    class: &NetworkClass,
    budget: &ExpansionBudget,
    opts: &EnumOptions,
) -> Result<Formula, ExpandError> {
    Expander::new(class, budget, opts, true)?.run(f)
}

/// The group attempt rule: a group tries iff each member tries.
fn group_attempt(group: &Group, body: &Formula) -> (Formula, usize) {
    let parts = group
        .members()
        .map(|a| Formula::attempts(Group::singleton(a.clone()), body.clone()));
    let f = Formula::conjunction(parts);
    let size = f.size();
    (f, size)
}

struct Expander<'a> {
    class: &'a NetworkClass,
    budget: &'a ExpansionBudget,
    opts: &'a EnumOptions,
    minimal: bool,
    memo: BTreeMap<Formula, (Formula, usize)>,
    networks: BTreeMap<Group, Vec<CohesionNetwork>>,
}

impl<'a> Expander<'a> {
    fn new(
        class: &'a NetworkClass,
        budget: &'a ExpansionBudget,
        opts: &'a EnumOptions,
        minimal: bool,
    ) -> Result<Self, ExpandError> {
        if budget.max_output_nodes == 0 || budget.max_disjuncts_per_group == 0 {
            return Err(ExpandError::InvalidBudget);
        }
        Ok(Expander {
            class,
            budget,
            opts,
            minimal,
            memo: BTreeMap::new(),
            networks: BTreeMap::new(),
        })
    }

    fn run(mut self, f: &Formula) -> Result<Formula, ExpandError> {
        let (out, _) = self.go(f)?;
        debug_assert!(is_biat(&out));
        Ok(out)
    }

    fn charge(&self, size: usize) -> Result<(), ExpandError> {
        if size > self.budget.max_output_nodes {
            Err(ExpandError::OutputBudget {
                limit: self.budget.max_output_nodes,
                reached: size,
            })
        } else {
            Ok(())
        }
    }

    fn networks(&mut self, g: &Group) -> Result<Vec<CohesionNetwork>, ExpandError> {
        if let Some(nets) = self.networks.get(g) {
            return Ok(nets.clone());
        }
        let limit = self.budget.max_disjuncts_per_group;
        let nets: Vec<CohesionNetwork> = if self.minimal {
            self.class.minimal_members(g, self.opts)?
        } else {
            self.class.members(g, self.opts)?.take(limit + 1).collect()
        };
        if nets.len() > limit {
            return Err(ExpandError::DisjunctBudget {
                group: g.clone(),
                limit,
            });
        }
        self.networks.insert(g.clone(), nets.clone());
        Ok(nets)
    }

    fn go(&mut self, f: &Formula) -> Result<(Formula, usize), ExpandError> {
        if let Some(hit) = self.memo.get(f) {
            return Ok(hit.clone());
        }
        let out = match f {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => (f.clone(), 1),
            Formula::Not(a) => {
                let (a, n) = self.go(a)?;
                (Formula::not(a), n + 1)
            }
            Formula::And(a, b) => self.binary(a, b, Formula::and)?,
            Formula::Or(a, b) => self.binary(a, b, Formula::or)?,
            Formula::Implies(a, b) => self.binary(a, b, Formula::implies)?,
            Formula::Iff(a, b) => self.binary(a, b, Formula::iff)?,
            Formula::Brings(g, a) if g.is_degenerate() => {
                let (a, n) = self.go(a)?;
                (Formula::brings(g.clone(), a), n + 1)
            }
            Formula::Attempts(g, a) if g.is_degenerate() => {
                let (a, n) = self.go(a)?;
                (Formula::attempts(g.clone(), a), n + 1)
            }
            Formula::Attempts(g, a) => {
                let (body, _) = self.go(a)?;
                group_attempt(g, &body)
            }
            Formula::Assists(c1, c2, a) => {
                let body: Formula = (**a).clone();
                let tries = Formula::attempts(c2.clone(), body.clone());
                let unfolded = Formula::and(
                    Formula::brings(c1.clone(), Formula::implies(tries.clone(), body)),
                    tries,
                );
                self.go(&unfolded)?
            }
            Formula::Brings(g, a) => self.group_agency(g, a)?,
        };
        self.charge(out.1)?;
        self.memo.insert(f.clone(), out.clone());
        Ok(out)
    }

    fn binary(
        &mut self,
        a: &Formula,
        b: &Formula,
        make: fn(Formula, Formula) -> Formula,
    ) -> Result<(Formula, usize), ExpandError> {
        let (a, m) = self.go(a)?;
        let (b, n) = self.go(b)?;
        Ok((make(a, b), m + n + 1))
    }

    fn group_agency(&mut self, g: &Group, body: &Formula) -> Result<(Formula, usize), ExpandError> {
        let nets = self.networks(g)?;
        let mut disjuncts: Vec<(Formula, usize)> = Vec::new();
        let mut total = 0usize;
        for net in &nets {
            let mut conjuncts: Vec<(String, Formula, usize)> = Vec::new();
            for (c1, c2) in &net.edges {
                let help = Formula::assists(c1.clone(), c2.clone(), body.clone());
                let (h, n) = self.go(&help)?;
                conjuncts.push((alloc::format!("{h}"), h, n));
            }
            conjuncts.sort_by(|x, y| x.0.cmp(&y.0));
            conjuncts.dedup_by(|x, y| x.1 == y.1);
            let size = conjuncts.iter().map(|c| c.2).sum::<usize>() + conjuncts.len() - 1;
            let conj = Formula::conjunction(conjuncts.into_iter().map(|c| c.1));
            if disjuncts.iter().any(|(d, _)| *d == conj) {
                continue;
            }
            total += size;
            self.charge(total + disjuncts.len())?;
            disjuncts.push((conj, size));
        }
        let size = if disjuncts.is_empty() {
            1
        } else {
            total + disjuncts.len() - 1
        };
        Ok((
            Formula::disjunction(disjuncts.into_iter().map(|d| d.0)),
            size,
        ))
    }
}
