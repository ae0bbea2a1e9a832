//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::cell::Cell;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cohesion::deadline::{Deadline, DEFAULT_TIMEOUT};
use cohesion::demo::{PEANUTS, PIANO};
use cohesion_core::{
    expand, expand_minimal, is_biat, parse, random_model, sat, Agent, EnumOptions, ExpandError,
    ExpansionBudget, Filter, Formula, Group, Logic, NeighborhoodModel, NetworkClass, SatResult,
    SolveError,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

thread_local! {
    static INTERRUPTED: Cell<bool> = const { Cell::new(false) };
}

fn f(text: &str) -> Formula {
    parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn g(names: &[&str]) -> Group {
    Group::from_names(names.iter().copied()).unwrap()
}

fn deadline() -> Deadline {
    Deadline::after(DEFAULT_TIMEOUT)
}

fn note<T>(r: Result<T, SolveError>) -> Result<T, String> {
    r.map_err(|e| {
        if matches!(e, SolveError::Interrupted(_)) {
            INTERRUPTED.with(|c| c.set(true));
        }
        e.to_string()
    })
}

fn valid(logic: &Logic, formula: &Formula) -> Result<bool, String> {
    note(logic.valid(formula, &deadline()))
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail}; {}", secs(took)))
    } else {
        Err(format!(
            "{detail}; took {} (limit {})",
            secs(took),
            secs(limit)
        ))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_cohesion"))
        .args(["--json", "networks", "--agents", "1,2", "--class", "c0"])
        .output()
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    if !out.status.success() {
        return Err(format!("exit {:?}", out.status.code()));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let expected = serde_json::json!([
        [[["1"], ["2"]]],
        [[["2"], ["1"]]],
        [[["1"], ["2"]], [["2"], ["1"]]],
    ]);
    let edges: Vec<&serde_json::Value> = v["networks"]
        .as_array()
        .ok_or("no network list")?
        .iter()
        .map(|n| &n["edges"])
        .collect();
    if v["count"] != 3 || serde_json::json!(edges) != expected {
        return Err(format!("got {}", v["networks"]));
    }
    if took > Duration::from_secs(1) {
        return Err(format!("took {}", secs(took)));
    }
    Ok(format!("3 networks in the expected order; {}", secs(took)))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let logic = Logic::new(NetworkClass::AllHelpRest);
    let displayed = f("E{1} (A{2} p & A{3} p -> p) & E{2} (A{1} p & A{3} p -> p) \
                       & E{3} (A{1} p & A{2} p -> p) & A{1} p & A{2} p & A{3} p");
    let expanded = logic.expand(&f("E{1,2,3} p")).map_err(|e| e.to_string())?;
    if !note(logic.equivalent(&expanded, &displayed, &deadline()))? {
        return Err("expansion is not equivalent to the displayed formula".into());
    }
    for claim in PIANO.claims {
        if !valid(&logic, &f(claim.formula))? {
            return Err(format!("{} fails", claim.label));
        }
    }
    within(start, Duration::from_secs(10), "equivalent".into())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let logic = PEANUTS.logic();
    let goal = f("~E{Charlie,Lucy} k <-> ~H{Charlie}>{Lucy} k & ~H{Lucy}>{Charlie} k");
    if !valid(&logic, &goal)? {
        return Err("not valid under c0".into());
    }
    within(start, Duration::from_secs(10), "valid under c0".into())
}

fn check_witness(res: &SatResult, goal: &Formula) -> Result<(), String> {
    let (model, w) = res
        .witness
        .as_ref()
        .ok_or("satisfiable without a witness")?;
    if let Some(v) = model.validate().first() {
        return Err(format!("witness invalid: {v}"));
    }
    match model.check(*w, goal) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("witness does not satisfy {goal}")),
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_4() -> Outcome {
    let logic = Logic::new(NetworkClass::C0);
    let goal = logic
        .expand(&f("H{1}>{2} p & ~E{1} p & ~E{2} p"))
        .map_err(|e| e.to_string())?;
    let res = note(sat(&goal, &deadline()))?;
    if !res.is_sat() {
        return Err("reported unsatisfiable".into());
    }
    check_witness(&res, &goal)?;
    let worlds = res.witness.as_ref().map_or(0, |(m, _)| m.len());
    Ok(format!(
        "satisfiable, witness with {worlds} worlds checks true"
    ))
}

const POOL: [&str; 5] = ["p", "q", "p & q", "p -> q", "~p"];

/// Pairs of equivalent bodies for the congruence rules.
const EQUIVALENT_PAIRS: [(&str, &str); 5] = [
    ("p", "~~p"),
    ("p & q", "q & p"),
    ("p -> q", "~p | q"),
    ("~p", "p -> false"),
    ("p | q", "~(~p & ~q)"),
];

fn subgroups(agents: &[&str]) -> Vec<Group> {
    let n = agents.len();
    (1u32..1 << n)
        .map(|m| {
            g(&(0..n)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| agents[i])
                .collect::<Vec<_>>())
        })
        .collect()
}

/// Instances of every axiom schema for the given agents and class.
fn axiom_instances(agents: &[&str], class: &NetworkClass) -> Vec<(&'static str, Formula)> {
    let groups = subgroups(agents);
    let opts = EnumOptions::default();
    let mut out = Vec::new();
    let singles: Vec<Group> = groups
        .iter()
        .filter(|x| x.is_degenerate())
        .cloned()
        .collect();
    for body in POOL {
        let b = f(body);
        for i in &singles {
            out.push((
                "success",
                Formula::implies(Formula::brings(i.clone(), b.clone()), b.clone()),
            ));
        }
        for c1 in &groups {
            for c2 in &groups {
                let help = Formula::assists(c1.clone(), c2.clone(), b.clone());
                let a2 = Formula::attempts(c2.clone(), b.clone());
                let rhs = Formula::and(
                    Formula::brings(c1.clone(), Formula::implies(a2.clone(), b.clone())),
                    a2,
                );
                out.push(("help", Formula::iff(help, rhs)));
            }
        }
        for grp in groups.iter().filter(|x| !x.is_degenerate()) {
            let nets: Vec<_> = class.members(grp, &opts).unwrap().collect();
            let rhs = Formula::disjunction(nets.iter().map(|n| {
                Formula::conjunction(
                    n.edges
                        .iter()
                        .map(|(a, c)| Formula::assists(a.clone(), c.clone(), b.clone())),
                )
            }));
            out.push((
                "cohagen",
                Formula::iff(Formula::brings(grp.clone(), b.clone()), rhs),
            ));
            let each = Formula::conjunction(
                grp.members()
                    .map(|a| Formula::attempts(Group::singleton(a.clone()), b.clone())),
            );
            out.push((
                "attind",
                Formula::iff(Formula::attempts(grp.clone(), b.clone()), each),
            ));
        }
        // classical tautologies over modal atoms
        for (x, y) in [
            (&groups[0], &groups[groups.len() - 1]),
            (&groups[1], &groups[0]),
        ] {
            let ex = Formula::brings(x.clone(), b.clone());
            let ay = Formula::attempts(y.clone(), b.clone());
            out.push(("prop", Formula::or(ex.clone(), Formula::not(ex.clone()))));
            out.push((
                "prop",
                Formula::implies(
                    Formula::implies(ex.clone(), ay.clone()),
                    Formula::implies(Formula::not(ay.clone()), Formula::not(ex.clone())),
                ),
            ));
            out.push(("prop", Formula::implies(Formula::and(ex, ay.clone()), ay)));
        }
    }
    for i in &singles {
        out.push((
            "notaut",
            Formula::not(Formula::brings(i.clone(), Formula::Top)),
        ));
    }
    for (a, b) in EQUIVALENT_PAIRS {
        let (a, b) = (f(a), f(b));
        for i in &singles {
            out.push((
                "ree",
                Formula::iff(
                    Formula::brings(i.clone(), a.clone()),
                    Formula::brings(i.clone(), b.clone()),
                ),
            ));
            out.push((
                "rea",
                Formula::iff(
                    Formula::attempts(i.clone(), a.clone()),
                    Formula::attempts(i.clone(), b.clone()),
                ),
            ));
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for (agents, class) in [
        (&["1", "2"][..], NetworkClass::C0),
        (&["1", "2", "3"][..], NetworkClass::AllHelpRest),
    ] {
        let logic = Logic::new(class.clone());
        for (a, b) in EQUIVALENT_PAIRS {
            if !valid(&logic, &Formula::iff(f(a), f(b)))? {
                return Err(format!("premise {a} <-> {b} is not valid"));
            }
        }
        for (schema, inst) in axiom_instances(agents, &class) {
            if !valid(&logic, &inst)? {
                return Err(format!("{schema} instance not valid: {inst}"));
            }
            total += 1;
        }
    }
    within(
        start,
        Duration::from_secs(120),
        format!("{total} instances valid"),
    )
}

fn criterion_6() -> Outcome {
    for (group, class) in [
        ("{1,2}", NetworkClass::C0),
        ("{1,2,3}", NetworkClass::AllHelpRest),
    ] {
        let logic = Logic::new(class);
        if !valid(&logic, &f(&format!("E{group} p -> p")))? {
            return Err(format!("success fails for {group}"));
        }
        let top = logic
            .expand(&f(&format!("E{group} true")))
            .map_err(|e| e.to_string())?;
        if note(sat(&top, &deadline()))?.is_sat() {
            return Err(format!("E{group} true is satisfiable"));
        }
    }
    Ok("success and notaut hold for {1,2} under c0 and {1,2,3} under all-help-rest".into())
}

fn criterion_7() -> Outcome {
    let c0 = Logic::new(NetworkClass::C0);
    let e12 = f("E{1,2} p");
    let plain = c0.expand(&e12).map_err(|e| e.to_string())?;
    let min = c0
        .clone()
        .minimal(true)
        .expand(&e12)
        .map_err(|e| e.to_string())?;
    if !note(c0.equivalent(&plain, &min, &deadline()))? {
        return Err("c0 over {1,2} differs".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut extras: Vec<Vec<Filter>> = vec![
        vec![],
        vec![Filter::SingletonBeneficiaries],
        vec![Filter::MaxEdges(2)],
        vec![Filter::MaxEdges(3)],
        vec![Filter::MaxEdges(4)],
        vec![Filter::SingletonBeneficiaries, Filter::MaxEdges(3)],
    ];
    extras.shuffle(&mut rng);
    let mut checked = Vec::new();
    for extra in extras {
        let mut filters = vec![Filter::SingletonBenefactors, Filter::DisjointEndpoints];
        filters.extend(extra);
        let class = NetworkClass::C0.filtered(filters.clone());
        let body = POOL[rng.random_range(0..POOL.len())];
        let goal = f(&format!("E{{1,2,3}} ({body})"));
        let logic = Logic::new(class);
        let plain = logic.expand(&goal).map_err(|e| e.to_string())?;
        let min = logic
            .clone()
            .minimal(true)
            .expand(&goal)
            .map_err(|e| e.to_string())?;
        if !note(logic.equivalent(&plain, &min, &deadline()))? {
            return Err(format!("differs under {filters:?} for {body}"));
        }
        checked.push(filters.len());
    }
    Ok(format!(
        "c0 over {{1,2}} and {} filtered 3-agent classes",
        checked.len()
    ))
}

fn agents2() -> Vec<Agent> {
    vec![Agent::new("1").unwrap(), Agent::new("2").unwrap()]
}

fn criterion_8() -> Outcome {
    let class = NetworkClass::C0;
    let budget = ExpansionBudget::default();
    let opts = EnumOptions::default();
    let instances: Vec<(&str, Formula)> = axiom_instances(&["1", "2"], &class)
        .into_iter()
        .map(|(s, x)| (s, expand(&x, &class, &budget, &opts).unwrap()))
        .collect();
    let atoms = ["p".to_string(), "q".to_string()];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checks = 0usize;
    for seed in 0..200u64 {
        let n = 1 + (seed as usize % 4);
        let density = rng.random_range(0.1..0.7);
        let m = random_model(seed, n, &atoms, &agents2(), density).map_err(|e| e.to_string())?;
        if let Some(v) = m.validate().first() {
            return Err(format!("seed {seed}: {v}"));
        }
        for (schema, inst) in &instances {
            for w in 0..m.len() {
                if !m.check(w, inst).map_err(|e| e.to_string())? {
                    return Err(format!(
                        "seed {seed}, world {w}: {schema} instance {inst} fails"
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(format!(
        "{checks} instance checks over 200 models, no violations"
    ))
}

fn random_biat(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let leaf = |rng: &mut ChaCha8Rng| match rng.random_range(0..10) {
        0 => Formula::Top,
        1..=5 => Formula::atom("p").unwrap(),
        _ => Formula::atom("q").unwrap(),
    };
    if rng.random_range(0..4) == 0 {
        return leaf(rng);
    }
    match rng.random_range(0..7) {
        0 => Formula::not(random_biat(rng, depth)),
        1 | 2 => Formula::and(random_biat(rng, depth), random_biat(rng, depth)),
        3 => Formula::or(random_biat(rng, depth), random_biat(rng, depth)),
        4 => Formula::implies(random_biat(rng, depth), random_biat(rng, depth)),
        5 if depth > 0 => {
            let i = Group::singleton(agents2()[rng.random_range(0..2)].clone());
            Formula::brings(i, random_biat(rng, depth - 1))
        }
        6 if depth > 0 => {
            let i = Group::singleton(agents2()[rng.random_range(0..2)].clone());
            Formula::attempts(i, random_biat(rng, depth - 1))
        }
        _ => leaf(rng),
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let atoms = ["p".to_string(), "q".to_string()];
    let models: Vec<NeighborhoodModel> = (0..100u64)
        .map(|seed| {
            random_model(
                1000 + seed,
                1 + (seed as usize % 4),
                &atoms,
                &agents2(),
                0.4,
            )
            .unwrap()
        })
        .collect();
    let (mut sats, mut unsats) = (0, 0);
    let mut n = 0;
    while n < 100 {
        let mut goal = random_biat(&mut rng, 2);
        // bias towards contradictions so both verdicts are exercised
        if n % 3 == 0 {
            let other = random_biat(&mut rng, 2);
            goal = Formula::and(goal.clone(), Formula::not(Formula::or(goal, other)));
        }
        if goal.modal_depth() > 2 || !is_biat(&goal) {
            continue;
        }
        n += 1;
        let res = note(sat(&goal, &deadline()))?;
        if res.is_sat() {
            sats += 1;
            check_witness(&res, &goal)?;
        } else {
            unsats += 1;
            for (k, m) in models.iter().enumerate() {
                for w in 0..m.len() {
                    if m.check(w, &goal).map_err(|e| e.to_string())? {
                        return Err(format!("{goal} is unsat but holds in model {k} at {w}"));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{sats} satisfiable with checked witnesses, {unsats} unsatisfiable survive 100 models"
    ))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let budget = ExpansionBudget::default();
    let opts = EnumOptions::default();
    let triple = f("E{1,2,3} p");
    match expand(&triple, &NetworkClass::C0, &budget, &opts) {
        Err(ExpandError::DisjunctBudget { .. } | ExpandError::OutputBudget { .. }) => {}
        other => return Err(format!("plain c0 expansion of E{{1,2,3}} p: {other:?}")),
    }
    let logic = Logic::new(NetworkClass::C0).minimal(true);
    for text in [
        "E{1,2,3} p -> p",
        "~E{1,2,3} true",
        "E{1,2,3} E{1,2} p -> p",
        "E{1,2,3} p -> A{1} p | A{2} p | A{3} p",
    ] {
        let goal = f(text);
        let out =
            expand_minimal(&goal, &NetworkClass::C0, &budget, &opts).map_err(|e| e.to_string())?;
        if !is_biat(&out) {
            return Err(format!("{text} expands outside the fragment"));
        }
        if !valid(&logic, &goal)? {
            return Err(format!("{text} is not valid"));
        }
    }
    if INTERRUPTED.with(Cell::get) {
        return Err("some query hit its time limit".into());
    }
    within(
        start,
        DEFAULT_TIMEOUT,
        "|G| = 3 under c0 terminates; plain expansion stops at its budget".into(),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("two-agent network count", criterion_1),
        ("piano reproduction", criterion_2),
        ("peanuts reproduction", criterion_3),
        ("assistance consistency", criterion_4),
        ("axiom suite", criterion_5),
        ("generalized success and notaut", criterion_6),
        ("absorption equivalence", criterion_7),
        ("soundness sampling", criterion_8),
        ("solver and checker agreement", criterion_9),
        ("termination", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
