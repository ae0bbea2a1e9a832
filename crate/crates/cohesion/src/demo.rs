//! The piano and peanuts examples, as solver-checked equivalences.

use cohesion_core::{parse, Interrupt, Logic, NetworkClass, SolveError};

/// One claim of a demo.
#[derive(Debug, Clone, Copy)]
pub struct Claim {
    pub label: &'static str,
    pub formula: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub struct Demo {
    pub name: &'static str,
    pub class: &'static str,
    pub summary: &'static str,
    pub claims: &'static [Claim],
}

pub const PIANO: Demo = Demo {
    name: "piano",
    class: "all-help-rest",
    summary: "three people lift a piano; each helps the other two",
    claims: &[
        Claim {
            label: "group agency is mutual assistance",
            formula: "E{1,2,3} p <-> H{1}>{2,3} p & H{2}>{1,3} p & H{3}>{1,2} p",
        },
        Claim {
            label: "group agency in individual terms",
            formula: "E{1,2,3} p <-> E{1} (A{2} p & A{3} p -> p) & E{2} (A{1} p & A{3} p -> p) \
                      & E{3} (A{1} p & A{2} p -> p) & A{1} p & A{2} p & A{3} p",
        },
    ],
};

pub const PEANUTS: Demo = Demo {
    name: "peanuts",
    class: "c0",
    summary: "Lucy holds the ball; Charlie never kicks it",
    claims: &[
        Claim {
            label: "joint kicking is one of the three networks",
            formula: "E{Charlie,Lucy} k <-> H{Charlie}>{Lucy} k | H{Lucy}>{Charlie} k \
                      | H{Charlie}>{Lucy} k & H{Lucy}>{Charlie} k",
        },
        Claim {
            label: "failure means neither helps the other",
            formula: "~E{Charlie,Lucy} k <-> ~H{Charlie}>{Lucy} k & ~H{Lucy}>{Charlie} k",
        },
        Claim {
            label: "Lucy does not help Charlie",
            formula: "~H{Lucy}>{Charlie} k <-> ~E{Lucy} (A{Charlie} k -> k) | ~A{Charlie} k",
        },
        Claim {
            label: "Charlie does not help Lucy",
            formula: "~H{Charlie}>{Lucy} k <-> ~E{Charlie} (A{Lucy} k -> k) | ~A{Lucy} k",
        },
        Claim {
            label: "if Lucy does not try, Charlie cannot help her",
            formula: "~A{Lucy} k -> ~H{Charlie}>{Lucy} k",
        },
    ],
};

pub const DEMOS: [Demo; 2] = [PIANO, PEANUTS];

pub fn find(name: &str) -> Option<Demo> {
    DEMOS.into_iter().find(|d| d.name == name)
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub claim: Claim,
    pub expansion: String,
    pub valid: bool,
}

impl Demo {
    pub fn logic(&self) -> Logic {
        Logic::new(NetworkClass::builtin(self.class).expect("demo classes are builtin"))
    }

    pub fn run(&self, interrupt: &dyn Interrupt) -> Result<Vec<Outcome>, SolveError> {
        let logic = self.logic();
        self.claims
            .iter()
            .map(|claim| {
                let f = parse(claim.formula).expect("demo formulas parse");
                let expansion = logic.expand(&f)?.to_string();
                let valid = logic.valid(&f, interrupt)?;
                Ok(Outcome {
                    claim: *claim,
                    expansion,
                    valid,
                })
            })
            .collect()
    }
}
