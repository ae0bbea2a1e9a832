//! Independent brute-force cross-checks of enumeration and decision results.

use std::collections::BTreeSet;

use cohesion_core::{
    parse, sat, CohesionNetwork, EnumOptions, Filter, Group, Logic, NeighborhoodModel,
    NetworkClass, NoInterrupt, WorldSet,
};

fn g(names: &[&str]) -> Group {
    Group::from_names(names.iter().copied()).unwrap()
}

/// Every nonempty strict subset of `agents`, as sorted name lists.
fn subsets(agents: &[&str]) -> Vec<Vec<String>> {
    let n = agents.len();
    (1u32..(1 << n) - 1)
        .map(|m| {
            (0..n)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| agents[i].to_string())
                .collect()
        })
        .collect()
}

type RawEdge = (Vec<String>, Vec<String>);

/// Counts covering edge subsets of `universe`, and the ⊆-minimal ones.
fn brute_count(agents: &[&str], universe: &[RawEdge]) -> (usize, usize) {
    let all: BTreeSet<String> = agents.iter().map(|s| s.to_string()).collect();
    let covers = |m: u64| {
        let mut seen = BTreeSet::new();
        for (i, (a, b)) in universe.iter().enumerate() {
            if m >> i & 1 == 1 {
                seen.extend(a.iter().cloned());
                seen.extend(b.iter().cloned());
            }
        }
        seen == all
    };
    let members: Vec<u64> = (1u64..1 << universe.len()).filter(|&m| covers(m)).collect();
    let minimal = members
        .iter()
        .filter(|&&m| !members.iter().any(|&o| o != m && o & m == o))
        .count();
    (members.len(), minimal)
}

fn universe(agents: &[&str], keep: impl Fn(&[String], &[String]) -> bool) -> Vec<RawEdge> {
    let subs = subsets(agents);
    let mut out = Vec::new();
    for a in &subs {
        for b in &subs {
            if a != b && keep(a, b) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

fn disjoint(a: &[String], b: &[String]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

fn library_counts(class: &NetworkClass, group: &Group) -> (usize, usize) {
    let opts = EnumOptions::default();
    let members: Vec<CohesionNetwork> = class.members(group, &opts).unwrap().collect();
    for n in &members {
        assert!(n.check_c0(false).is_empty(), "{n}");
    }
    let mins = class.minimal_members(group, &opts).unwrap();
    (members.len(), mins.len())
}

#[test]
fn two_agent_count_matches_brute_force() {
    let u = universe(&["1", "2"], |_, _| true);
    assert_eq!(brute_count(&["1", "2"], &u), (3, 2));
    assert_eq!(library_counts(&NetworkClass::C0, &g(&["1", "2"])), (3, 2));
}

#[test]
fn filtered_three_agent_counts_match_brute_force() {
    let agents = ["1", "2", "3"];
    let group = g(&agents);
    let u = universe(&agents, |a, b| a.len() == 1 && disjoint(a, b));
    assert_eq!(u.len(), 9);
    let expected = brute_count(&agents, &u);
    let class =
        NetworkClass::C0.filtered([Filter::SingletonBenefactors, Filter::DisjointEndpoints]);
    assert_eq!(library_counts(&class, &group), expected);

    let u = universe(&agents, |a, b| a.len() == 1 && b.len() == 1);
    let class =
        NetworkClass::C0.filtered([Filter::SingletonBenefactors, Filter::SingletonBeneficiaries]);
    assert_eq!(library_counts(&class, &group), brute_count(&agents, &u));
}

#[test]
fn unfiltered_three_agent_minimal_count() {
    // 30 edges: the full subset walk is too large, minimal covers are not
    let agents = ["1", "2", "3"];
    let u = universe(&agents, |_, _| true);
    assert_eq!(u.len(), 30);
    let all: BTreeSet<String> = agents.iter().map(|s| s.to_string()).collect();
    let cover = |edges: &[&RawEdge]| {
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            seen.extend(a.iter().cloned());
            seen.extend(b.iter().cloned());
        }
        seen == all
    };
    // a minimal cover of three agents uses at most three edges
    let mut picks: Vec<Vec<usize>> = Vec::new();
    for i in 0..u.len() {
        picks.push(vec![i]);
        for j in i + 1..u.len() {
            picks.push(vec![i, j]);
            for k in j + 1..u.len() {
                picks.push(vec![i, j, k]);
            }
        }
    }
    let minimal = picks
        .iter()
        .filter(|pick| {
            let edges: Vec<&RawEdge> = pick.iter().map(|&i| &u[i]).collect();
            cover(&edges)
                && (0..edges.len()).all(|d| {
                    let rest: Vec<&RawEdge> = edges
                        .iter()
                        .enumerate()
                        .filter(|(x, _)| *x != d)
                        .map(|(_, e)| *e)
                        .collect();
                    !cover(&rest)
                })
        })
        .count();
    let mins = NetworkClass::C0
        .minimal_members(&g(&agents), &EnumOptions::default())
        .unwrap();
    assert_eq!(mins.len(), minimal);
    assert!(mins.iter().all(|n| n.edges.len() <= 3));
}

/// Every model over at most `max_worlds` worlds for one agent and one atom,
/// with `E` neighborhoods restricted to the frame conditions.
fn all_small_models(max_worlds: usize, agents: &[&str]) -> Vec<NeighborhoodModel> {
    let mut out = Vec::new();
    for n in 1..=max_worlds {
        let subsets: Vec<WorldSet> = (0u32..1 << n)
            .map(|m| WorldSet::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1)))
            .collect();
        let full = WorldSet::full(n);
        // per world, admissible E families are subsets of the sets holding it
        let e_options: Vec<Vec<BTreeSet<WorldSet>>> = (0..n)
            .map(|w| {
                let cands: Vec<&WorldSet> = subsets
                    .iter()
                    .filter(|x| x.contains(w) && **x != full)
                    .collect();
                (0u32..1 << cands.len())
                    .map(|m| {
                        (0..cands.len())
                            .filter(|i| m >> i & 1 == 1)
                            .map(|i| cands[i].clone())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut combos: Vec<Vec<Vec<BTreeSet<WorldSet>>>> = vec![Vec::new()];
        for _agent in agents {
            let mut next = Vec::new();
            for c in &combos {
                let mut per_world: Vec<Vec<BTreeSet<WorldSet>>> = vec![Vec::new()];
                for opts in &e_options {
                    per_world = per_world
                        .iter()
                        .flat_map(|pw| {
                            opts.iter().map(move |o| {
                                let mut v = pw.clone();
                                v.push(o.clone());
                                v
                            })
                        })
                        .collect();
                }
                for pw in per_world {
                    let mut c2 = c.clone();
                    c2.push(pw);
                    next.push(c2);
                }
            }
            combos = next;
        }
        for val in 0u32..1 << n {
            for c in &combos {
                let worlds = (0..n).map(|i| format!("w{i}")).collect();
                let mut m = NeighborhoodModel::new(worlds);
                m.valuation.insert(
                    "p".into(),
                    WorldSet::from_indices(n, (0..n).filter(|i| val >> i & 1 == 1)),
                );
                for (agent, pw) in agents.iter().zip(c) {
                    let a = cohesion_core::Agent::new(*agent).unwrap();
                    m.add_agent(a.clone());
                    m.agency.insert(a, pw.clone());
                }
                out.push(m);
            }
        }
    }
    out
}

#[test]
fn agency_transfer_countermodel_exists_in_small_models() {
    let f = parse("E{1} p & ~E{2} p").unwrap();
    let models = all_small_models(2, &["1", "2"]);
    let brute = models
        .iter()
        .any(|m| m.validate().is_empty() && (0..m.len()).any(|w| m.check(w, &f).unwrap()));
    assert!(brute);
    assert!(sat(&f, &NoInterrupt).unwrap().is_sat());
}

#[test]
fn single_agent_verdicts_agree_with_exhaustive_models() {
    let models = all_small_models(3, &["1"]);
    let cases = [
        "E{1} p & ~p",
        "E{1} p & ~E{1} ~~p",
        "E{1} p & E{1} ~p",
        "E{1} p & ~E{1} E{1} p",
        "E{1} (p | ~p)",
        "E{1} p & E{1} (p & p)",
        "~E{1} p & E{1} E{1} p",
        "E{1} ~E{1} p & p",
    ];
    for text in cases {
        let f = parse(text).unwrap();
        let res = sat(&f, &NoInterrupt).unwrap();
        let brute = models
            .iter()
            .any(|m| (0..m.len()).any(|w| m.check(w, &f).unwrap()));
        if let Some((m, w)) = &res.witness {
            assert!(m.validate().is_empty());
            assert!(m.check(*w, &f).unwrap(), "{text}");
        }
        // witnesses may need more than three worlds, but unsat must hold on
        // every small model
        if !res.is_sat() {
            assert!(!brute, "{text} satisfied by a small model");
        }
        if brute {
            assert!(res.is_sat(), "{text}");
        }
    }
}

#[test]
fn two_agent_expansions_are_equivalent_to_minimal_ones() {
    let logic = Logic::new(NetworkClass::C0);
    let minimal = Logic::new(NetworkClass::C0).minimal(true);
    for text in [
        "E{1,2} p",
        "E{1,2} (p -> q)",
        "~E{1,2} ~p",
        "E{1,2} A{1,2} p",
    ] {
        let f = parse(text).unwrap();
        let a = logic.expand(&f).unwrap();
        let b = minimal.expand(&f).unwrap();
        assert!(logic.equivalent(&a, &b, &NoInterrupt).unwrap(), "{text}");
    }
}
