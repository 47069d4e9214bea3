//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles here evaluate formulas with their own interpreter and
//! plan by brute force, so they share no code with the solver paths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reconcile_core::belief::{
    abduce, diff, revise, update_pma, AbductionFailure, AbductionProblem,
};
use reconcile_core::encoder::{encode_bounded, extract_plan, validity_query};
use reconcile_core::error::Error;
use reconcile_core::logic::{
    count_models_up_to, dpll_sat, entails_skeptical, enumerate_models, is_consistent,
    parse_formula, satisfy, to_cnf, Atom, Formula, KbEntry, KnowledgeBase, Limits, Mode, Model,
    SatResult, Signature,
};
use reconcile_core::planning::{
    bfs_optimal_plan, is_valid_plan, plan_trace_model, Action, Plan, PlanningProblem,
};
use reconcile_core::reconcile::{
    check_plan_optimality, find_explanation, restore_consistency_by_trace, update_kb, GammaPolicy,
    SearchOptions,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// ---------------------------------------------------------------- oracles

fn eval(f: &Formula, world: &BTreeSet<Atom>) -> bool {
    match f {
        Formula::Const(b) => *b,
        Formula::Atom(a) => world.contains(a),
        Formula::Not(g) => !eval(g, world),
        Formula::And(gs) => gs.iter().all(|g| eval(g, world)),
        Formula::Or(gs) => gs.iter().any(|g| eval(g, world)),
        Formula::Implies(a, b) => !eval(a, world) || eval(b, world),
        Formula::Iff(a, b) => eval(a, world) == eval(b, world),
    }
}

fn worlds(sig: &[Atom]) -> Vec<BTreeSet<Atom>> {
    (0u64..1 << sig.len())
        .map(|bits| {
            sig.iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

fn tt_models<'a>(
    sig: &[Atom],
    fs: impl IntoIterator<Item = &'a Formula>,
) -> BTreeSet<BTreeSet<Atom>> {
    let fs: Vec<&Formula> = fs.into_iter().collect();
    worlds(sig)
        .into_iter()
        .filter(|w| fs.iter().all(|f| eval(f, w)))
        .collect()
}

fn atoms(names: &[&str]) -> Vec<Atom> {
    names.iter().map(|n| Atom::new(n).unwrap()).collect()
}

fn world(names: &[&str]) -> BTreeSet<Atom> {
    atoms(names).into_iter().collect()
}

fn f(text: &str) -> Formula {
    parse_formula(text).unwrap()
}

fn model_set(models: &[Model]) -> BTreeSet<BTreeSet<Atom>> {
    models.iter().map(|m| m.true_atoms().clone()).collect()
}

fn load_kb(name: &str) -> KnowledgeBase {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    KnowledgeBase::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn load_problem(name: &str) -> PlanningProblem {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    PlanningProblem::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Shortest plan length by breadth-first search over action sequences
/// (no duplicate detection), bounded by `max_len`.
fn brute_force_shortest(p: &PlanningProblem, max_len: usize) -> Option<usize> {
    let goal = p.goal();
    let mut frontier: VecDeque<(BTreeSet<String>, usize)> = VecDeque::from([(p.init().clone(), 0)]);
    while let Some((state, len)) = frontier.pop_front() {
        if goal.is_subset(&state) {
            return Some(len);
        }
        if len == max_len {
            continue;
        }
        for a in p.actions() {
            if a.pre.is_subset(&state) {
                let next: BTreeSet<String> =
                    state.difference(&a.del).chain(&a.add).cloned().collect();
                frontier.push_back((next, len + 1));
            }
        }
    }
    None
}

fn sequences(names: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s: &Vec<String>| {
                names.iter().map(move |n| {
                    let mut t = s.clone();
                    t.push(n.clone());
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

// ---------------------------------------------------------------- problem family

fn subsets(fluents: &[&str]) -> Vec<Vec<String>> {
    (0u32..1 << fluents.len())
        .map(|bits| {
            fluents
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, f)| f.to_string())
                .collect()
        })
        .collect()
}

/// Every (pre, add, del) with disjoint add and del.
fn templates(fluents: &[&str]) -> Vec<(Vec<String>, Vec<String>, Vec<String>)> {
    let mut out = Vec::new();
    for pre in subsets(fluents) {
        for code in 0..3u32.pow(fluents.len() as u32) {
            let (mut add, mut del) = (Vec::new(), Vec::new());
            let mut c = code;
            for fl in fluents {
                match c % 3 {
                    1 => add.push(fl.to_string()),
                    2 => del.push(fl.to_string()),
                    _ => {}
                }
                c /= 3;
            }
            out.push((pre.clone(), add, del));
        }
    }
    out
}

fn build(
    fluents: &[&str],
    acts: &[&(Vec<String>, Vec<String>, Vec<String>)],
    init: Vec<String>,
    goal: Vec<String>,
) -> PlanningProblem {
    let actions = acts
        .iter()
        .enumerate()
        .map(|(i, (pre, add, del))| {
            Action::new(
                &format!("a{i}"),
                pre.iter().map(String::as_str),
                add.iter().map(String::as_str),
                del.iter().map(String::as_str),
            )
        })
        .collect();
    PlanningProblem::new(fluents.iter().copied(), actions, init, goal).unwrap()
}

/// Exhaustive over one or two fluents with up to two actions (up to three
/// for a single fluent), every init and goal; plus a seeded sample with three
/// or four fluents and up to three actions.
fn family() -> Vec<PlanningProblem> {
    let mut out = Vec::new();
    for (fluents, max_actions) in [(&["p"][..], 3usize), (&["p", "q"][..], 2)] {
        let ts = templates(fluents);
        let states = subsets(fluents);
        for k in 0..=max_actions {
            let mut multisets: Vec<Vec<usize>> = vec![Vec::new()];
            for _ in 0..k {
                multisets = multisets
                    .into_iter()
                    .flat_map(|m| {
                        let start = m.last().copied().unwrap_or(0);
                        (start..ts.len()).map(move |i| {
                            let mut n = m.clone();
                            n.push(i);
                            n
                        })
                    })
                    .collect();
            }
            for m in &multisets {
                let acts: Vec<_> = m.iter().map(|&i| &ts[i]).collect();
                for init in &states {
                    for goal in &states {
                        out.push(build(fluents, &acts, init.clone(), goal.clone()));
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pool = ["p", "q", "r", "s"];
    for _ in 0..400 {
        let fluents = &pool[..rng.random_range(3..=4)];
        let ts = templates(fluents);
        let k = rng.random_range(0..=3);
        let acts: Vec<_> = (0..k).map(|_| &ts[rng.random_range(0..ts.len())]).collect();
        let states = subsets(fluents);
        let init = states[rng.random_range(0..states.len())].clone();
        let goal = states[rng.random_range(0..states.len())].clone();
        out.push(build(fluents, &acts, init, goal));
    }
    out
}

const MAX_HORIZON: usize = 4;

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Outcome {
    let kb_h = load_kb("problem1_kb_h.json");
    let eps = load_kb("problem1_epsilon.json");
    let limits = Limits::default();
    let expected_h = BTreeSet::from([world(&["P_0", "E_1", "A_0"]), world(&["P_0", "E_1"])]);
    let expected_e: BTreeSet<_> = listed_j().into_iter().collect();
    let got_h = model_set(&enumerate_models(&kb_h, &limits).map_err(|e| e.to_string())?);
    let got_e = model_set(&enumerate_models(&eps, &limits).map_err(|e| e.to_string())?);
    ensure!(got_h == expected_h, "KB_h models {got_h:?}");
    ensure!(got_e == expected_e, "epsilon models {got_e:?}");
    Ok(format!("{} and {} models", got_h.len(), got_e.len()))
}

fn listed_j() -> Vec<BTreeSet<Atom>> {
    vec![
        world(&["A_0", "E_1", "P_0"]),
        world(&["A_0", "E_1"]),
        world(&["A_0", "E_1", "E_0", "P_0"]),
        world(&["A_0", "E_1", "E_0"]),
        world(&["E_1", "E_0", "P_0"]),
        world(&["E_1", "E_0"]),
        world(&["E_0", "P_0"]),
        world(&["E_0"]),
        world(&["P_0"]),
        world(&[]),
    ]
}

fn criterion_2() -> Outcome {
    let kb_h = load_kb("problem1_kb_h.json");
    let eps = load_kb("problem1_epsilon.json");
    let sig: Signature = atoms(&["P_0", "E_0", "E_1", "A_0"]).into_iter().collect();
    let model = |w: &BTreeSet<Atom>| Model::new(sig.clone(), w.iter().cloned()).unwrap();
    let i2 = model(&world(&["P_0", "E_1"]));
    let table: [&[&str]; 10] = [
        &["A_0"],
        &["A_0", "P_0"],
        &["A_0", "E_0"],
        &["A_0", "E_0", "P_0"],
        &["E_0"],
        &["P_0", "E_0"],
        &["E_0", "E_1"],
        &["E_0", "E_1", "P_0"],
        &["E_1"],
        &["P_0", "E_1"],
    ];
    for (k, (j, expected)) in listed_j().iter().zip(table).enumerate() {
        let d = diff(&i2, &model(j)).map_err(|e| e.to_string())?;
        ensure!(d.atoms == world(expected), "Diff(I_2, J_{}) = {d}", k + 1);
    }
    let r = update_pma(&kb_h, &eps.conjunction(), &Limits::default()).map_err(|e| e.to_string())?;
    let j = listed_j();
    let selected = BTreeSet::from([j[0].clone(), j[4].clone(), j[8].clone()]);
    ensure!(
        model_set(&r.models) == selected,
        "selected {:?}",
        model_set(&r.models)
    );
    let displayed =
        f("(A_0 & E_1 & P_0 & !E_0) | (E_1 & E_0 & P_0 & !A_0) | (P_0 & !E_1 & !A_0 & !E_0)");
    let order: Vec<Atom> = sig.iter().cloned().collect();
    ensure!(
        tt_models(&order, r.kb.formulas()) == tt_models(&order, [&displayed]),
        "result differs from the displayed disjunction"
    );
    Ok("10 differences, selection {J_1, J_5, J_9}".into())
}

fn criterion_3() -> Outcome {
    let kb_h = load_kb("problem1_kb_h.json");
    let kb_a = load_kb("problem1_kb_a.json");
    let eps = load_kb("problem1_epsilon.json");
    let order: Vec<Atom> = kb_h.signature().iter().cloned().collect();
    let union = tt_models(&order, kb_h.formulas().chain(eps.formulas()));
    let revised =
        revise(&kb_h, &eps.conjunction(), &Limits::default()).map_err(|e| e.to_string())?;
    ensure!(
        tt_models(&order, revised.kb.formulas()) == union,
        "revision differs from KB_h ∪ ε"
    );
    let opts = SearchOptions::default();
    let ours =
        update_kb(&kb_h, eps.entries(), &GammaPolicy::None, &opts).map_err(|e| e.to_string())?;
    ensure!(ours.removed.is_empty(), "update removed {:?}", ours.removed);
    ensure!(
        tt_models(&order, ours.updated.formulas()) == union,
        "update differs from KB_h ∪ ε"
    );
    let problem = load_problem("problem1.json");
    let trace = plan_trace_model(&problem, &Plan::new(["A"]), 1).map_err(|e| e.to_string())?;
    let traced = restore_consistency_by_trace(&kb_h, eps.entries(), &trace, &kb_a)
        .map_err(|e| e.to_string())?;
    ensure!(
        traced.removed.is_empty(),
        "trace restoration removed {:?}",
        traced.removed
    );
    ensure!(
        tt_models(&order, traced.updated.formulas()) == union,
        "trace restoration differs"
    );
    Ok(format!("models: {}, nothing removed", union.len()))
}

fn criterion_4() -> Outcome {
    let kb = load_kb("example1_kb.json");
    let order = atoms(&["a", "b"]);
    let limits = Limits::default();
    let upd = update_pma(&kb, &f("a"), &limits).map_err(|e| e.to_string())?;
    let rev = revise(&kb, &f("a"), &limits).map_err(|e| e.to_string())?;
    ensure!(
        tt_models(&order, upd.kb.formulas()) == tt_models(&order, [&f("a")]),
        "update is not {{a}}"
    );
    ensure!(
        tt_models(&order, rev.kb.formulas()) == tt_models(&order, [&f("a & !b")]),
        "revision is not {{a & !b}}"
    );
    Ok("update {a}, revision {a & !b}".into())
}

fn criterion_5() -> Outcome {
    let kb_h = load_kb("problem2_kb_h.json");
    let kb_a = load_kb("problem2_kb_a.json");
    let eps = load_kb("problem2_epsilon.json");
    ensure!(!is_consistent(&kb_h), "KB_h is consistent");
    let limits = Limits::default();
    let phi = eps.conjunction();
    ensure!(
        matches!(revise(&kb_h, &phi, &limits), Err(Error::Inconsistent(_))),
        "revision did not refuse"
    );
    ensure!(
        matches!(
            update_pma(&kb_h, &phi, &limits),
            Err(Error::Inconsistent(_))
        ),
        "pma update did not refuse"
    );
    let abduction = abduce(&AbductionProblem::with_all_atoms(kb_h.clone(), f("G_1")))
        .map_err(|e| e.to_string())?;
    ensure!(
        abduction.failure == Some(AbductionFailure::InconsistentKb)
            && abduction.explanations.is_empty(),
        "abduction did not refuse"
    );

    let problem = load_problem("problem2.json");
    let trace = plan_trace_model(&problem, &Plan::new(["A"]), 1).map_err(|e| e.to_string())?;
    let r = restore_consistency_by_trace(&kb_h, eps.entries(), &trace, &kb_a)
        .map_err(|e| e.to_string())?;
    let removed: Vec<&Formula> = r.removed.iter().map(|e| &e.formula).collect();
    ensure!(
        removed == vec![&f("!G_0 & G_1 -> B_0")],
        "removed {removed:?}"
    );
    let listed: Vec<Formula> = [
        "P_0",
        "!E_0",
        "!G_0",
        "G_1",
        "A_0 -> P_0",
        "A_0 -> G_1",
        "B_0 -> E_0",
        "B_0 -> G_1",
        "!G_0 & G_1 -> A_0 | B_0",
        "!A_0 | !B_0",
    ]
    .into_iter()
    .map(f)
    .collect();
    let order: Vec<Atom> = kb_h.signature().iter().cloned().collect();
    let expected = tt_models(&order, &listed);
    ensure!(
        r.updated.len() == 10,
        "updated KB has {} formulas",
        r.updated.len()
    );
    ensure!(
        tt_models(&order, r.updated.formulas()) == expected,
        "trace result differs from the listed KB"
    );
    let mc = update_kb(
        &kb_h,
        eps.entries(),
        &GammaPolicy::MinCard,
        &SearchOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure!(
        tt_models(&order, mc.updated.formulas()) == expected,
        "min-card result differs"
    );
    Ok(format!("models: {}, frame axiom replaced", expected.len()))
}

fn criterion_6(family: &[PlanningProblem]) -> Outcome {
    let mut checked = 0;
    let mut sat = 0;
    for p in family {
        let shortest = brute_force_shortest(p, MAX_HORIZON);
        for n in 0..=MAX_HORIZON {
            let enc = encode_bounded(p, n, true).map_err(|e| e.to_string())?;
            let expected = shortest.is_some_and(|s| s <= n);
            let model = satisfy(enc.kb().signature(), enc.kb().formulas());
            ensure!(
                model.is_some() == expected,
                "horizon {n}: encoding disagrees on {:?}",
                p.to_json_value()
            );
            if let Some(m) = model {
                let plan = extract_plan(&enc, &m).map_err(|e| e.to_string())?;
                ensure!(
                    is_valid_plan(p, &plan),
                    "extracted {plan:?} invalid for {:?}",
                    p.to_json_value()
                );
                sat += 1;
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{} problems, {checked} encodings, {sat} satisfiable",
        family.len()
    ))
}

fn criterion_7(family: &[PlanningProblem]) -> Outcome {
    let mut checked = 0;
    let mut optimal = 0;
    for p in family {
        let names: Vec<String> = p.actions().iter().map(|a| a.name.clone()).collect();
        let best = bfs_optimal_plan(p).map(|pl| pl.len());
        let mut encodings = BTreeMap::new();
        for seq in sequences(&names, 3) {
            let plan = Plan::new(seq);
            let n = plan.len();
            let enc = match encodings.entry(n) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(encode_bounded(p, n, true).map_err(|e| e.to_string())?)
                }
            };
            let got = check_plan_optimality(enc.kb(), enc, &plan).map_err(|e| e.to_string())?;
            let expected = best == Some(n) && is_valid_plan(p, &plan);
            ensure!(
                got == expected,
                "{plan:?} on {:?}: got {got}",
                p.to_json_value()
            );
            optimal += usize::from(got);
            checked += 1;
        }
    }
    Ok(format!("{checked} candidate plans, {optimal} optimal"))
}

fn random_formula(rng: &mut ChaCha8Rng, pool: &[Atom], depth: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.3) {
        return if rng.random_bool(0.05) {
            Formula::Const(rng.random_bool(0.5))
        } else {
            Formula::Atom(pool[rng.random_range(0..pool.len())].clone())
        };
    }
    let choice = rng.random_range(0..5);
    let mut sub = || random_formula(rng, pool, depth - 1);
    match choice {
        0 => Formula::Not(Box::new(sub())),
        1 => Formula::And(vec![sub(), sub()]),
        2 => Formula::Or(vec![sub(), sub()]),
        3 => Formula::Implies(Box::new(sub()), Box::new(sub())),
        _ => Formula::Iff(Box::new(sub()), Box::new(sub())),
    }
}

/// Cheapest `|ε|` by truth tables: `ε ⊆ kb_a` by size, `γ` the first
/// consistency-restoring subset of `kb_h ∖ ε` by size then label order.
fn oracle_cost(
    order: &[Atom],
    kb_a: &[(String, Formula)],
    kb_h: &[(String, Formula)],
    phi: &Formula,
) -> usize {
    let mut eps_masks: Vec<u32> = (0..1u32 << kb_a.len()).collect();
    eps_masks.sort_by_key(|m| m.count_ones());
    for m in eps_masks {
        let eps: Vec<&Formula> = (0..kb_a.len())
            .filter(|i| m >> i & 1 == 1)
            .map(|i| &kb_a[i].1)
            .collect();
        let mut rest: Vec<&(String, Formula)> =
            kb_h.iter().filter(|(_, g)| !eps.contains(&g)).collect();
        rest.sort_by(|a, b| a.0.cmp(&b.0));
        let mut gammas: Vec<Vec<usize>> = (0..1u32 << rest.len())
            .map(|g| (0..rest.len()).filter(|i| g >> i & 1 == 1).collect())
            .collect();
        gammas.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        for g in gammas {
            let kept: Vec<&Formula> = rest
                .iter()
                .enumerate()
                .filter(|(i, _)| !g.contains(i))
                .map(|(_, e)| &e.1)
                .chain(eps.iter().copied())
                .collect();
            let models = tt_models(order, kept.iter().copied());
            if models.is_empty() {
                continue;
            }
            if models.iter().all(|w| eval(phi, w)) {
                return m.count_ones() as usize;
            }
            break;
        }
    }
    unreachable!("ε = KB_a always works")
}

fn criterion_8() -> Outcome {
    let opts = SearchOptions::default();
    let kb_a = load_kb("problem1_kb_a.json");
    let kb_h = load_kb("problem1_kb_h.json");
    let phi = f("A_0");
    let e = find_explanation(
        &kb_a,
        &kb_h,
        &phi,
        Mode::Skeptical,
        &GammaPolicy::MinCard,
        &opts,
    )
    .map_err(|e| e.to_string())?
    .ok_or("no explanation for the worked example")?;
    let pairs = |kb: &KnowledgeBase| -> Vec<(String, Formula)> {
        kb.entries()
            .iter()
            .map(|e| (e.label.clone(), e.formula.clone()))
            .collect()
    };
    let order: Vec<Atom> = kb_h.signature().iter().cloned().collect();
    ensure!(
        e.cost as usize == oracle_cost(&order, &pairs(&kb_a), &pairs(&kb_h), &phi),
        "worked example cost {}",
        e.cost
    );
    ensure!(
        is_consistent(e.updated()) && entails_skeptical(e.updated(), &phi),
        "worked example update"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pool = atoms(&["x0", "x1", "x2", "x3"]);
    let sig: Signature = pool.iter().cloned().collect();
    let mut done = 0;
    let mut costs = Vec::new();
    while done < 50 {
        let na = rng.random_range(1..=10);
        let nh = rng.random_range(0..=6);
        let a: Vec<(String, Formula)> = (0..na)
            .map(|i| (format!("a{i}"), random_formula(&mut rng, &pool, 2)))
            .collect();
        let h: Vec<(String, Formula)> = (0..nh)
            .map(|i| (format!("h{i}"), random_formula(&mut rng, &pool, 2)))
            .collect();
        let phi = random_formula(&mut rng, &pool, 2);
        let a_models = tt_models(&pool, a.iter().map(|p| &p.1));
        let h_models = tt_models(&pool, h.iter().map(|p| &p.1));
        let a_entails = !a_models.is_empty() && a_models.iter().all(|w| eval(&phi, w));
        let h_entails = !h_models.is_empty() && h_models.iter().all(|w| eval(&phi, w));
        if !a_entails || h_entails {
            continue;
        }
        let mk = |v: &[(String, Formula)]| {
            KnowledgeBase::new(
                sig.clone(),
                v.iter()
                    .map(|(l, g)| KbEntry::new(l.clone(), g.clone()))
                    .collect(),
            )
            .unwrap()
        };
        let (kb_a, kb_h) = (mk(&a), mk(&h));
        let e = find_explanation(
            &kb_a,
            &kb_h,
            &phi,
            Mode::Skeptical,
            &GammaPolicy::MinCard,
            &opts,
        )
        .map_err(|e| e.to_string())?
        .ok_or_else(|| format!("no explanation for pair {done}"))?;
        let updated = e.updated();
        let models = tt_models(&pool, updated.formulas());
        ensure!(!models.is_empty(), "pair {done}: updated KB inconsistent");
        ensure!(
            models.iter().all(|w| eval(&phi, w)),
            "pair {done}: updated KB does not entail φ"
        );
        ensure!(
            e.epsilon.iter().all(|x| kb_a.entries().contains(x)),
            "pair {done}: ε not from KB_a"
        );
        let best = oracle_cost(&pool, &a, &h, &phi);
        ensure!(
            e.cost as usize == best,
            "pair {done}: cost {} but oracle finds {best}",
            e.cost
        );
        costs.push(best);
        done += 1;
    }
    Ok(format!(
        "worked example cost {}, 50 random pairs, max cost {}",
        e.cost,
        costs.iter().max().unwrap()
    ))
}

fn criterion_9(family: &[PlanningProblem]) -> Outcome {
    let mut checked = 0;
    for p in family {
        let Some(plan) = bfs_optimal_plan(p) else {
            continue;
        };
        let n = plan.len();
        let enc = encode_bounded(p, n, true).map_err(|e| e.to_string())?;
        let q = validity_query(&enc, &plan).map_err(|e| e.to_string())?;
        let sig = enc.kb().signature();
        let count = count_models_up_to(sig, enc.kb().formulas().chain([&q]), 1);
        ensure!(
            count == 1,
            "{count} models for {plan:?} on {:?}",
            p.to_json_value()
        );
        let model = satisfy(sig, enc.kb().formulas().chain([&q])).unwrap();
        let trace = plan_trace_model(p, &plan, n).map_err(|e| e.to_string())?;
        ensure!(model == trace, "model is not the trace of {plan:?}");
        checked += 1;
    }
    Ok(format!("{checked} solvable problems"))
}

fn dpll_agrees(f: &Formula, order: &[Atom], sig: &Signature, full: bool) -> Result<(), String> {
    let expected = tt_models(order, [f]);
    match dpll_sat(&to_cnf(f), sig) {
        SatResult::Sat(m) => {
            ensure!(
                !expected.is_empty() && eval(f, m.true_atoms()),
                "bad model for {f}"
            );
        }
        SatResult::Unsat => ensure!(expected.is_empty(), "{f} reported unsatisfiable"),
    }
    if full {
        let kb = KnowledgeBase::new(sig.clone(), vec![KbEntry::new("f", f.clone())]).unwrap();
        let got = model_set(&enumerate_models(&kb, &Limits::default()).map_err(|e| e.to_string())?);
        ensure!(got == expected, "models of {f} differ");
    } else {
        let count = count_models_up_to(sig, [f], 1 << order.len());
        ensure!(
            count == expected.len(),
            "{f}: {count} models, expected {}",
            expected.len()
        );
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let mut checked = 0usize;
    // every Boolean function over up to four atoms, as DNF and as CNF
    for n in 0..=4usize {
        let order: Vec<Atom> = (0..n)
            .map(|i| Atom::new(format!("x{i}")).unwrap())
            .collect();
        let sig: Signature = order.iter().cloned().collect();
        let rows = 1usize << n;
        let lits = |row: usize, positive_when_set: bool| -> Vec<Formula> {
            order
                .iter()
                .enumerate()
                .map(|(i, a)| Formula::lit(a.clone(), (row >> i & 1 == 1) == positive_when_set))
                .collect()
        };
        for table in 0u64..1 << rows {
            let dnf = Formula::Or(
                (0..rows)
                    .filter(|r| table >> r & 1 == 1)
                    .map(|r| Formula::And(lits(r, true)))
                    .collect(),
            );
            let cnf = Formula::And(
                (0..rows)
                    .filter(|r| table >> r & 1 == 0)
                    .map(|r| Formula::Or(lits(r, false)))
                    .collect(),
            );
            for g in [&dnf, &cnf] {
                ensure!(
                    tt_models(&order, [g]).len() == table.count_ones() as usize,
                    "table {table:b} misbuilt"
                );
                dpll_agrees(g, &order, &sig, n <= 3)?;
                checked += 1;
            }
        }
    }
    // every syntax tree of depth at most two over two atoms
    let order = atoms(&["x0", "x1"]);
    let sig: Signature = order.iter().cloned().collect();
    let leaves: Vec<Formula> = order
        .iter()
        .map(|a| Formula::Atom(a.clone()))
        .chain([Formula::Const(true), Formula::Const(false)])
        .collect();
    let grow = |below: &[Formula]| -> Vec<Formula> {
        let mut out = below.to_vec();
        for a in below {
            out.push(Formula::Not(Box::new(a.clone())));
            for b in below {
                out.push(Formula::And(vec![a.clone(), b.clone()]));
                out.push(Formula::Or(vec![a.clone(), b.clone()]));
                out.push(Formula::Implies(Box::new(a.clone()), Box::new(b.clone())));
                out.push(Formula::Iff(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
        out
    };
    for g in grow(&grow(&leaves)) {
        dpll_agrees(&g, &order, &sig, true)?;
        checked += 1;
    }
    // random formulas over up to ten atoms
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let n = rng.random_range(1..=10);
        let order: Vec<Atom> = (0..n)
            .map(|i| Atom::new(format!("x{i}")).unwrap())
            .collect();
        let sig: Signature = order.iter().cloned().collect();
        let g = random_formula(&mut rng, &order, 6);
        dpll_agrees(&g, &order, &sig, false)?;
        checked += 1;
    }
    Ok(format!("{checked} formulas"))
}

fn main() {
    let family = family();
    let criteria: Vec<Criterion> = vec![
        ("first worked example models", Box::new(criterion_1)),
        (
            "pma update on the first worked example",
            Box::new(criterion_2),
        ),
        (
            "revision and update coincide without conflict",
            Box::new(criterion_3),
        ),
        ("xor example", Box::new(criterion_4)),
        ("inconsistent human knowledge base", Box::new(criterion_5)),
        (
            "encoder agrees with brute force",
            Box::new(|| criterion_6(&family)),
        ),
        (
            "optimality query agrees with breadth-first search",
            Box::new(|| criterion_7(&family)),
        ),
        (
            "explanations are correct and cheapest",
            Box::new(criterion_8),
        ),
        (
            "pinned plan has a single model",
            Box::new(|| criterion_9(&family)),
        ),
        ("DPLL agrees with truth tables", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({why}; {secs:.2}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
