//! Satisfiability for the individual-agent fragment.
//!
//! `E{i}` obeys success (`E{i} φ -> φ`), no-tautology (`~E{i} true`) and
//! closure under logical equivalence; `A{i}` only the latter. The reference
//! semantics are neighborhood models with the T and no-unit conditions on
//! agency neighborhoods.
//!
//! A goal is satisfiable iff some assignment to the atoms and modal atoms of
//! its closure makes it true such that:
//!
//! * `E{i} ψ` true implies `ψ` true and `~ψ` satisfiable,
//! * `E{i} ψ` true and `E{i} χ` false implies `ψ` and `χ` are not
//!   equivalent (`~(ψ <-> χ)` satisfiable), and likewise for `A{i}`.
//!
//! Bodies have strictly smaller modal depth than their modal atom, so the
//! recursion terminates. Equivalence between bodies is decided first, which
//! turns the remaining search into plain propositional satisfiability over
//! one variable per equivalence class of modal atoms.
//!
//! Witness models are assembled from the designated labeling and the
//! witness models of the recursive calls it relies on, then re-checked
//! with [`NeighborhoodModel::check`].

mod arena;
mod dpll;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::class::{EnumOptions, NetworkClass};
use crate::formula::Formula;
use crate::model::{NeighborhoodModel, WorldSet};
use crate::reduction::{expand, expand_minimal, is_biat, ExpandError, ExpansionBudget};

use arena::{Arena, Id, Kind, Node};
use dpll::{neg, negate, pos, Cnf, Lit};

/// Cooperative cancellation, polled during search.
pub trait Interrupt {
    fn interrupted(&self) -> bool;
}

/// Never interrupts.
pub struct NoInterrupt;

impl Interrupt for NoInterrupt {
    fn interrupted(&self) -> bool {
        false
    }
}

impl<F: Fn() -> bool> Interrupt for F {
    fn interrupted(&self) -> bool {
        self()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    /// Distinct satisfiability subproblems solved.
    pub subproblems: u64,
    pub memo_hits: u64,
    pub decisions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("formula is outside the individual-agent fragment: {0}")]
    NotBiat(String),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error("search interrupted after {} subproblems and {} decisions", .0.subproblems, .0.decisions)]
    Interrupted(SolverStats),
    #[error("witness failed re-validation: {0}")]
    Unsound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable,
    Unsatisfiable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub verdict: Verdict,
    /// A model and the index of a world satisfying the goal; present iff
    /// satisfiable.
    pub witness: Option<(NeighborhoodModel, usize)>,
    pub stats: SolverStats,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.verdict == Verdict::Satisfiable
    }
}

/// Decides satisfiability of an individual-agent formula.
pub fn sat(f: &Formula, interrupt: &dyn Interrupt) -> Result<SatResult, SolveError> {
    if !is_biat(f) {
        return Err(SolveError::NotBiat(alloc::format!("{f}")));
    }
    let mut solver = Solver::new(interrupt);
    solver.arena.register(f);
    let goal = solver.arena.add(f);
    let found = solver.solve(goal)?;
    let stats = solver.stats;
    let Some(found) = found else {
        return Ok(SatResult {
            verdict: Verdict::Unsatisfiable,
            witness: None,
            stats,
        });
    };
    let model = solver.export(&found);
    let violations = model.validate();
    if let Some(v) = violations.first() {
        return Err(SolveError::Unsound(alloc::format!("{v}")));
    }
    match model.check(0, f) {
        Ok(true) => {}
        Ok(false) => {
            return Err(SolveError::Unsound(alloc::format!(
                "goal is false at the designated world of its witness: {f}"
            )))
        }
        Err(e) => return Err(SolveError::Unsound(alloc::format!("{e}"))),
    }
    Ok(SatResult {
        verdict: Verdict::Satisfiable,
        witness: Some((model, 0)),
        stats,
    })
}

/// A logic of cohesive group agency: a class of networks together with the
/// expansion settings used to reduce formulas to the individual fragment.
#[derive(Debug, Clone)]
pub struct Logic {
    pub class: NetworkClass,
    pub budget: ExpansionBudget,
    pub enumeration: EnumOptions,
    /// Range group agency over minimal networks only.
    pub minimal: bool,
}

impl Logic {
    pub fn new(class: NetworkClass) -> Self {
        Logic {
            class,
            budget: ExpansionBudget::default(),
            enumeration: EnumOptions::default(),
            minimal: false,
        }
    }

    pub fn minimal(mut self, minimal: bool) -> Self {
        self.minimal = minimal;
        self
    }

    pub fn expand(&self, f: &Formula) -> Result<Formula, ExpandError> {
        if self.minimal {
            expand_minimal(f, &self.class, &self.budget, &self.enumeration)
        } else {
            expand(f, &self.class, &self.budget, &self.enumeration)
        }
    }

    /// Satisfiability of a full-language formula.
    pub fn sat(&self, f: &Formula, interrupt: &dyn Interrupt) -> Result<SatResult, SolveError> {
        sat(&self.expand(f)?, interrupt)
    }

    pub fn valid(&self, f: &Formula, interrupt: &dyn Interrupt) -> Result<bool, SolveError> {
        Ok(!self.sat(&Formula::not(f.clone()), interrupt)?.is_sat())
    }

    pub fn equivalent(
        &self,
        f: &Formula,
        g: &Formula,
        interrupt: &dyn Interrupt,
    ) -> Result<bool, SolveError> {
        self.valid(&Formula::iff(f.clone(), g.clone()), interrupt)
    }

    /// A model of the expanded negation of `f`, absent iff `f` is valid.
    pub fn countermodel(
        &self,
        f: &Formula,
        interrupt: &dyn Interrupt,
    ) -> Result<Option<(NeighborhoodModel, usize)>, SolveError> {
        Ok(self.sat(&Formula::not(f.clone()), interrupt)?.witness)
    }
}

/// Internal model over the arena's symbol tables.
#[derive(Debug)]
struct Witness {
    worlds: usize,
    valuation: Vec<WorldSet>,
    /// `[kind][agent][world]`
    nbhd: [Vec<Vec<BTreeSet<WorldSet>>>; 2],
}

fn kind_index(k: Kind) -> usize {
    match k {
        Kind::Agency => 0,
        Kind::Attempt => 1,
    }
}

impl Witness {
    fn eval(&self, arena: &Arena, id: Id, cache: &mut BTreeMap<Id, WorldSet>) -> WorldSet {
        if let Some(s) = cache.get(&id) {
            return s.clone();
        }
        let n = self.worlds;
        let out = match *arena.node(id) {
            Node::Top => WorldSet::full(n),
            Node::Atom(s) => self.valuation[s].clone(),
            Node::Not(a) => self.eval(arena, a, cache).complement(n),
            Node::And(a, b) => {
                let x = self.eval(arena, a, cache);
                x.intersection(&self.eval(arena, b, cache))
            }
            Node::Or(a, b) => {
                let x = self.eval(arena, a, cache);
                x.union(&self.eval(arena, b, cache))
            }
            Node::Implies(a, b) => {
                let x = self.eval(arena, a, cache).complement(n);
                x.union(&self.eval(arena, b, cache))
            }
            Node::Iff(a, b) => {
                let x = self.eval(arena, a, cache);
                let y = self.eval(arena, b, cache);
                WorldSet::from_indices(n, (0..n).filter(|&w| x.contains(w) == y.contains(w)))
            }
            Node::Modal(kind, agent, a) => {
                let body = self.eval(arena, a, cache);
                let per_world = &self.nbhd[kind_index(kind)][agent];
                WorldSet::from_indices(n, (0..n).filter(|&w| per_world[w].contains(&body)))
            }
        };
        cache.insert(id, out.clone());
        out
    }
}

/// What a satisfying labeling needs from other worlds: a world where the
/// node holds.
type Demand = Id;

struct Solver<'a> {
    arena: Arena,
    memo: BTreeMap<Id, Option<Rc<Witness>>>,
    interrupt: &'a dyn Interrupt,
    stats: SolverStats,
}

impl<'a> Solver<'a> {
    fn new(interrupt: &'a dyn Interrupt) -> Self {
        Solver {
            arena: Arena::default(),
            memo: BTreeMap::new(),
            interrupt,
            stats: SolverStats::default(),
        }
    }

    fn interrupted(&self) -> SolveError {
        SolveError::Interrupted(self.stats)
    }

    fn solve(&mut self, goal: Id) -> Result<Option<Rc<Witness>>, SolveError> {
        if let Some(hit) = self.memo.get(&goal) {
            self.stats.memo_hits += 1;
            return Ok(hit.clone());
        }
        if self.interrupt.interrupted() {
            return Err(self.interrupted());
        }
        self.stats.subproblems += 1;
        let found = self.solve_fresh(goal)?.map(Rc::new);
        self.memo.insert(goal, found.clone());
        Ok(found)
    }

    fn solve_fresh(&mut self, goal: Id) -> Result<Option<Witness>, SolveError> {
        let modals = self.arena.modal_closure(goal);
        let atoms = self.arena.atom_closure(goal);

        // Partition modal atoms of each (kind, agent) into equivalence
        // classes of their bodies.
        let mut class_of: BTreeMap<Id, usize> = BTreeMap::new();
        let mut reps: Vec<Id> = Vec::new();
        let mut buckets: BTreeMap<(Kind, usize), Vec<usize>> = BTreeMap::new();
        for &m in &modals {
            let Node::Modal(kind, agent, body) = *self.arena.node(m) else {
                unreachable!()
            };
            let bucket = buckets.entry((kind, agent)).or_default().clone();
            let mut found = None;
            for c in bucket {
                let rep_body = self.body(reps[c]);
                let differ = self.arena.differ(body, rep_body);
                if self.solve(differ)?.is_none() {
                    found = Some(c);
                    break;
                }
            }
            let c = match found {
                Some(c) => c,
                None => {
                    reps.push(m);
                    buckets
                        .entry((kind, agent))
                        .or_default()
                        .push(reps.len() - 1);
                    reps.len() - 1
                }
            };
            class_of.insert(m, c);
        }

        // Agency towards a valid body is impossible.
        let mut forced_false = BTreeSet::new();
        for (c, &rep) in reps.iter().enumerate() {
            if let Node::Modal(Kind::Agency, _, body) = *self.arena.node(rep) {
                let refute = self.arena.not(body);
                if self.solve(refute)?.is_none() {
                    forced_false.insert(c);
                }
            }
        }

        // Variables: atoms first, then one per class.
        let mut cnf = Cnf::default();
        let atom_var: BTreeMap<usize, usize> = atoms.iter().map(|&s| (s, cnf.new_var())).collect();
        let class_var: Vec<usize> = (0..reps.len()).map(|_| cnf.new_var()).collect();
        let order: Vec<usize> = (0..cnf.n_vars).collect();
        let mut enc = Encoder {
            arena: &self.arena,
            atom_var: &atom_var,
            class_var: &class_var,
            class_of: &class_of,
            lits: BTreeMap::new(),
            top: None,
        };
        let g = enc.lit(goal, &mut cnf);
        cnf.add(alloc::vec![g]);
        for &m in &modals {
            let Node::Modal(Kind::Agency, _, body) = *self.arena.node(m) else {
                continue;
            };
            let e = enc.lit(m, &mut cnf);
            let b = enc.lit(body, &mut cnf);
            cnf.add(alloc::vec![negate(e), b]);
        }
        for &c in &forced_false {
            cnf.add(alloc::vec![neg(class_var[c])]);
        }
        let model = dpll::solve(&cnf, &order, self.interrupt, &mut self.stats.decisions)
            .map_err(|_| self.interrupted())?;
        let Some(assignment) = model else {
            return Ok(None);
        };
        let holds = |l: Lit| assignment[(l >> 1) as usize] != (l & 1 == 1);
        let root = self.root_values(goal, &|id| match *self.arena.node(id) {
            Node::Atom(s) => holds(pos(atom_var[&s])),
            Node::Modal(..) => holds(pos(class_var[class_of[&id]])),
            _ => unreachable!("only leaves are looked up"),
        });

        // Demands, in a fixed order: refutations of true agency bodies, then
        // distinguishing worlds for each true/false pair of classes.
        let mut demands: Vec<Demand> = Vec::new();
        for (c, &rep) in reps.iter().enumerate() {
            if let Node::Modal(Kind::Agency, _, body) = *self.arena.node(rep) {
                if holds(pos(class_var[c])) {
                    demands.push(self.arena.not(body));
                }
            }
        }
        for classes in buckets.values() {
            for &t in classes.iter().filter(|&&c| holds(pos(class_var[c]))) {
                for &f in classes.iter().filter(|&&c| !holds(pos(class_var[c]))) {
                    let (bt, bf) = (self.body(reps[t]), self.body(reps[f]));
                    demands.push(self.arena.differ(bt, bf));
                }
            }
        }

        let mut components: Vec<Rc<Witness>> = Vec::new();
        for d in demands {
            let already = components
                .iter()
                .any(|w| !w.eval(&self.arena, d, &mut BTreeMap::new()).is_empty());
            if already {
                continue;
            }
            let w = self
                .solve(d)?
                .expect("demand was established satisfiable while building classes");
            components.push(w);
        }

        Ok(Some(self.assemble(&modals, &root, &components)))
    }

    fn body(&self, modal: Id) -> Id {
        match *self.arena.node(modal) {
            Node::Modal(_, _, b) => b,
            _ => unreachable!("not a modal node"),
        }
    }

    /// Glues the designated world to the component models.
    ///
    /// Component worlds keep their truth values on the closure: their
    /// neighborhoods are the lifted truth sets of exactly those bodies whose
    /// component truth set was a neighborhood there.
    fn assemble(
        &self,
        modals: &[Id],
        root: &BTreeMap<Id, bool>,
        components: &[Rc<Witness>],
    ) -> Witness {
        let n = 1 + components.iter().map(|c| c.worlds).sum::<usize>();
        let offsets: Vec<usize> = components
            .iter()
            .scan(1, |acc, c| {
                let o = *acc;
                *acc += c.worlds;
                Some(o)
            })
            .collect();
        let mut caches: Vec<BTreeMap<Id, WorldSet>> =
            alloc::vec![BTreeMap::new(); components.len()];
        let lift = |id: Id, at_root: bool, caches: &mut Vec<BTreeMap<Id, WorldSet>>| {
            let mut s = WorldSet::empty(n);
            if at_root {
                s.insert(0);
            }
            for (k, comp) in components.iter().enumerate() {
                for w in comp.eval(&self.arena, id, &mut caches[k]).iter() {
                    s.insert(offsets[k] + w);
                }
            }
            s
        };

        let n_atoms = self.arena.atoms.len();
        let n_agents = self.arena.agents.len();
        let mut valuation = alloc::vec![WorldSet::empty(n); n_atoms];
        for (s, set) in valuation.iter_mut().enumerate() {
            if self
                .arena
                .find(&Node::Atom(s))
                .is_some_and(|id| root.get(&id) == Some(&true))
            {
                set.insert(0);
            }
            for (k, comp) in components.iter().enumerate() {
                for w in comp.valuation[s].iter() {
                    set.insert(offsets[k] + w);
                }
            }
        }

        let mut nbhd: [Vec<Vec<BTreeSet<WorldSet>>>; 2] = [
            alloc::vec![alloc::vec![BTreeSet::new(); n]; n_agents],
            alloc::vec![alloc::vec![BTreeSet::new(); n]; n_agents],
        ];
        for &m in modals {
            let Node::Modal(kind, agent, body) = *self.arena.node(m) else {
                unreachable!()
            };
            let ki = kind_index(kind);
            let lifted = lift(body, root[&body], &mut caches);
            if root[&m] {
                nbhd[ki][agent][0].insert(lifted.clone());
            }
            for (k, comp) in components.iter().enumerate() {
                let local = comp.eval(&self.arena, body, &mut caches[k]);
                for w in 0..comp.worlds {
                    if comp.nbhd[ki][agent][w].contains(&local) {
                        nbhd[ki][agent][offsets[k] + w].insert(lifted.clone());
                    }
                }
            }
        }
        Witness {
            worlds: n,
            valuation,
            nbhd,
        }
    }

    /// Truth values at the designated world of every node reachable from
    /// `goal`, given the values of atoms and modal atoms.
    fn root_values(&self, goal: Id, leaf: &dyn Fn(Id) -> bool) -> BTreeMap<Id, bool> {
        let mut reach = BTreeSet::new();
        let mut stack = alloc::vec![goal];
        while let Some(id) = stack.pop() {
            if !reach.insert(id) {
                continue;
            }
            match *self.arena.node(id) {
                Node::Top | Node::Atom(_) => {}
                Node::Not(a) | Node::Modal(_, _, a) => stack.push(a),
                Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        // children are interned before their parents
        let mut out: BTreeMap<Id, bool> = BTreeMap::new();
        for id in reach {
            let v = match *self.arena.node(id) {
                Node::Top => true,
                Node::Atom(_) | Node::Modal(..) => leaf(id),
                Node::Not(a) => !out[&a],
                Node::And(a, b) => out[&a] && out[&b],
                Node::Or(a, b) => out[&a] || out[&b],
                Node::Implies(a, b) => !out[&a] || out[&b],
                Node::Iff(a, b) => out[&a] == out[&b],
            };
            out.insert(id, v);
        }
        out
    }

    fn export(&self, w: &Witness) -> NeighborhoodModel {
        let worlds: Vec<String> = (0..w.worlds).map(|i| alloc::format!("w{i}")).collect();
        let mut model = NeighborhoodModel::new(worlds);
        for (s, name) in self.arena.atoms.iter().enumerate() {
            model.valuation.insert(name.clone(), w.valuation[s].clone());
        }
        for (i, agent) in self.arena.agents.iter().enumerate() {
            model.agency.insert(agent.clone(), w.nbhd[0][i].clone());
            model.attempt.insert(agent.clone(), w.nbhd[1][i].clone());
        }
        model
    }
}

/// Tseitin encoding of the propositional skeleton of a closure.
struct Encoder<'e> {
    arena: &'e Arena,
    atom_var: &'e BTreeMap<usize, usize>,
    class_var: &'e [usize],
    class_of: &'e BTreeMap<Id, usize>,
    lits: BTreeMap<Id, Lit>,
    top: Option<usize>,
}

impl Encoder<'_> {
    fn lit(&mut self, id: Id, cnf: &mut Cnf) -> Lit {
        if let Some(&l) = self.lits.get(&id) {
            return l;
        }
        let l = match *self.arena.node(id) {
            Node::Top => {
                let v = *self.top.get_or_insert_with(|| {
                    let v = cnf.new_var();
                    cnf.add(alloc::vec![pos(v)]);
                    v
                });
                pos(v)
            }
            Node::Atom(s) => pos(self.atom_var[&s]),
            Node::Modal(..) => pos(self.class_var[self.class_of[&id]]),
            Node::Not(a) => negate(self.lit(a, cnf)),
            Node::And(a, b) => {
                let (x, y) = (self.lit(a, cnf), self.lit(b, cnf));
                let v = pos(cnf.new_var());
                cnf.add(alloc::vec![negate(v), x]);
                cnf.add(alloc::vec![negate(v), y]);
                cnf.add(alloc::vec![v, negate(x), negate(y)]);
                v
            }
            Node::Or(a, b) => {
                let (x, y) = (self.lit(a, cnf), self.lit(b, cnf));
                let v = pos(cnf.new_var());
                cnf.add(alloc::vec![negate(v), x, y]);
                cnf.add(alloc::vec![v, negate(x)]);
                cnf.add(alloc::vec![v, negate(y)]);
                v
            }
            Node::Implies(a, b) => {
                let (x, y) = (self.lit(a, cnf), self.lit(b, cnf));
                let v = pos(cnf.new_var());
                cnf.add(alloc::vec![negate(v), negate(x), y]);
                cnf.add(alloc::vec![v, x]);
                cnf.add(alloc::vec![v, negate(y)]);
                v
            }
            Node::Iff(a, b) => {
                let (x, y) = (self.lit(a, cnf), self.lit(b, cnf));
                let v = pos(cnf.new_var());
                cnf.add(alloc::vec![negate(v), negate(x), y]);
                cnf.add(alloc::vec![negate(v), x, negate(y)]);
                cnf.add(alloc::vec![v, x, y]);
                cnf.add(alloc::vec![v, negate(x), negate(y)]);
                v
            }
        };
        self.lits.insert(id, l);
        l
    }
}
