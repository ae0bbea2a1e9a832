//! A small CDCL solver: two watched literals, first-UIP clause learning and
//! backjumping. Decisions follow a caller-supplied variable order and try
//! `false` first, so models are reproducible.

use alloc::vec::Vec;

use super::Interrupt;

/// `var << 1 | negated`
pub(crate) type Lit = u32;

pub(crate) fn pos(var: usize) -> Lit {
    (var as Lit) << 1
}

pub(crate) fn neg(var: usize) -> Lit {
    pos(var) | 1
}

pub(crate) fn negate(l: Lit) -> Lit {
    l ^ 1
}

fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

#[derive(Debug, Default)]
pub(crate) struct Cnf {
    pub n_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    trivially_unsat: bool,
}

impl Cnf {
    pub fn new_var(&mut self) -> usize {
        self.n_vars += 1;
        self.n_vars - 1
    }

    pub fn add(&mut self, mut clause: Vec<Lit>) {
        clause.sort_unstable();
        clause.dedup();
        if clause.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return;
        }
        if clause.is_empty() {
            self.trivially_unsat = true;
        }
        self.clauses.push(clause);
    }
}

pub(crate) struct Interrupted;

struct State {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    level: Vec<usize>,
    /// Clause that implied each variable; `None` for decisions and top-level
    /// units.
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    /// Trail length at the start of each decision level.
    levels: Vec<usize>,
    head: usize,
}

impl State {
    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[var(l)].map(|v| v != (l & 1 == 1))
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) -> bool {
        match self.lit_value(l) {
            Some(v) => v,
            None => {
                self.value[var(l)] = Some(l & 1 == 0);
                self.level[var(l)] = self.levels.len();
                self.reason[var(l)] = reason;
                self.trail.push(l);
                true
            }
        }
    }

    /// Watches the first two literals of a clause of length two or more.
    fn attach(&mut self, ci: usize) {
        let c = &self.clauses[ci];
        self.watches[c[0] as usize].push(ci);
        self.watches[c[1] as usize].push(ci);
    }

    /// Unit propagation; the conflicting clause, if any. The implied literal
    /// of a reason clause sits at position 0.
    fn propagate(&mut self) -> Option<usize> {
        while self.head < self.trail.len() {
            let falsified = negate(self.trail[self.head]);
            self.head += 1;
            let watching = core::mem::take(&mut self.watches[falsified as usize]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut conflict = None;
            let mut iter = watching.into_iter();
            for ci in iter.by_ref() {
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_value = self.value[var(other)].map(|v| v != (other & 1 == 1));
                if other_value == Some(true) {
                    keep.push(ci);
                    continue;
                }
                let replacement = (2..clause.len()).find(|&k| {
                    let l = clause[k];
                    self.value[var(l)].map(|v| v != (l & 1 == 1)) != Some(false)
                });
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    let new_watch = clause[1];
                    self.watches[new_watch as usize].push(ci);
                    continue;
                }
                keep.push(ci);
                if other_value == Some(false) {
                    conflict = Some(ci);
                    break;
                }
                self.enqueue(other, Some(ci));
            }
            keep.extend(iter);
            self.watches[falsified as usize] = keep;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP learning: the learned clause, asserting literal first, and
    /// the level to jump back to.
    fn analyze(&self, conflict: usize) -> (Vec<Lit>, usize) {
        let current = self.levels.len();
        let mut seen = alloc::vec![false; self.value.len()];
        let mut learnt: Vec<Lit> = alloc::vec![0];
        let mut pending = 0usize;
        let mut clause = conflict;
        let mut resolved: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            for &q in &self.clauses[clause] {
                let v = var(q);
                if resolved.is_some_and(|p| var(p) == v) || seen[v] || self.level[v] == 0 {
                    continue;
                }
                seen[v] = true;
                if self.level[v] == current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                idx -= 1;
                if seen[var(self.trail[idx])] {
                    break;
                }
            }
            let p = self.trail[idx];
            seen[var(p)] = false;
            pending -= 1;
            resolved = Some(p);
            if pending == 0 {
                break;
            }
            clause = self.reason[var(p)].expect("implied literal has a reason");
        }
        learnt[0] = negate(resolved.expect("conflict at a decision level"));
        let mut back = 0;
        if learnt.len() > 1 {
            let (k, lvl) = learnt[1..]
                .iter()
                .enumerate()
                .map(|(k, &l)| (k + 1, self.level[var(l)]))
                .max_by_key(|&(_, lvl)| lvl)
                .expect("nonempty");
            learnt.swap(1, k);
            back = lvl;
        }
        (learnt, back)
    }

    fn backjump(&mut self, level: usize) {
        if self.levels.len() <= level {
            return;
        }
        let len = self.levels[level];
        while self.trail.len() > len {
            let l = self.trail.pop().expect("nonempty trail");
            self.value[var(l)] = None;
            self.reason[var(l)] = None;
        }
        self.levels.truncate(level);
        self.head = len;
    }
}

/// Finds a model, deciding variables in `order` first and any remaining
/// variables by index. Conflicts are analysed into learned clauses with
/// non-chronological backjumping.
pub(crate) fn solve(
    cnf: &Cnf,
    order: &[usize],
    interrupt: &dyn Interrupt,
    decisions: &mut u64,
) -> Result<Option<Vec<bool>>, Interrupted> {
    if cnf.trivially_unsat {
        return Ok(None);
    }
    let n = cnf.n_vars;
    let mut st = State {
        clauses: Vec::with_capacity(cnf.clauses.len()),
        watches: alloc::vec![Vec::new(); 2 * n],
        value: alloc::vec![None; n],
        level: alloc::vec![0; n],
        reason: alloc::vec![None; n],
        trail: Vec::new(),
        levels: Vec::new(),
        head: 0,
    };
    for c in &cnf.clauses {
        if c.len() == 1 {
            if !st.enqueue(c[0], None) {
                return Ok(None);
            }
        } else {
            st.clauses.push(c.clone());
            st.attach(st.clauses.len() - 1);
        }
    }
    if st.propagate().is_some() {
        return Ok(None);
    }
    let mut in_order = alloc::vec![false; n];
    let mut decision_order = Vec::with_capacity(n);
    for &v in order {
        if !in_order[v] {
            in_order[v] = true;
            decision_order.push(v);
        }
    }
    decision_order.extend((0..n).filter(|&v| !in_order[v]));
    let mut conflicts = 0u64;
    loop {
        if let Some(conflict) = st.propagate() {
            if st.levels.is_empty() {
                return Ok(None);
            }
            conflicts += 1;
            if conflicts.is_multiple_of(1024) && interrupt.interrupted() {
                return Err(Interrupted);
            }
            let (learnt, back) = st.analyze(conflict);
            st.backjump(back);
            let asserting = learnt[0];
            if learnt.len() == 1 {
                st.enqueue(asserting, None);
            } else {
                st.clauses.push(learnt);
                let ci = st.clauses.len() - 1;
                st.attach(ci);
                st.enqueue(asserting, Some(ci));
            }
            continue;
        }
        let Some(&v) = decision_order.iter().find(|&&v| st.value[v].is_none()) else {
            return Ok(Some(st.value.iter().map(|x| x.unwrap_or(false)).collect()));
        };
        *decisions += 1;
        if decisions.is_multiple_of(1024) && interrupt.interrupted() {
            return Err(Interrupted);
        }
        st.levels.push(st.trail.len());
        st.enqueue(neg(v), None);
    }
}
