//! The acceptance suite: ten checks with fixed corpora, oracles and time budgets.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::algebra::{self, check_identities, identities, zigzag, OperationTable};
use crate::corpus;
use crate::gadget::{build_d, build_q, count_formula, path_hom_exists, GadgetDigraph};
use crate::lifting::{
    in_diagonal_component, lift_general_auto, lift_wnu, verify_identities, verify_polymorphism,
    EpsilonOrder,
};
use crate::reductions::{
    backward_reduce, forward_translate, stage_3b, Answer, ReductionOutcome, Stage3A,
};
use crate::solver::{HomInstance, Solver};
use crate::structures::{
    collapse_to_single_relation, power, tuple_at, Relation, RelationalStructure,
};

/// The worked Stage-3A output (nine generalised hyperedges, three equalities).
pub const WORKED_EXAMPLE_STAGE3A: &str = include_str!("../data/worked_example_stage3a.json");

const SEARCH_BOUND: usize = 1 << 22;

/// Number, title and time budget of each criterion.
pub const CRITERIA: [(u8, &str, u64); 10] = [
    (1, "gadget vertex and edge counts", 10),
    (2, "path homomorphisms between Q_I and Q_J", 30),
    (3, "forward translation preserves answers", 120),
    (4, "backward reduction preserves answers", 120),
    (5, "stage 3B on the worked example", 1),
    (6, "lifted WNU on D(2-cycle)", 60),
    (7, "cores and endomorphism counts", 300),
    (8, "zigzag polymorphisms", 30),
    (9, "general lift on D(2-cycle)", 120),
    (10, "diagonal component of D(A)^2", 10),
];

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    /// The check itself succeeded.
    pub correct: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.correct && self.elapsed <= self.budget
    }

    /// The report line without timings, identical across runs with one seed.
    pub fn summary(&self) -> String {
        let over = if self.correct && !self.passed() {
            " [over budget]"
        } else {
            ""
        };
        format!(
            "{} criterion {:>2} {}: {}{}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            over
        )
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({:.2}s of {}s)",
            self.summary(),
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

/// Runs one criterion; `seed` drives every random corpus.
pub fn run_criterion(id: u8, seed: u64) -> CriterionReport {
    let &(_, title, budget) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .unwrap_or_else(|| panic!("no criterion {id}"));
    let solver = Solver::default();
    let start = Instant::now();
    let result = match id {
        1 => counts(seed),
        2 => path_homomorphisms(&solver),
        3 => forward_equivalence(seed, &solver),
        4 => backward_equivalence(seed, &solver),
        5 => worked_example(),
        6 => wnu_lift(&solver),
        7 => cores(&solver),
        8 => zigzag_algebra(&solver),
        9 => general_lift(&solver),
        10 => diagonal(),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed();
    let (correct, detail) = match result {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    CriterionReport {
        id,
        title,
        correct,
        detail,
        elapsed,
        budget: Duration::from_secs(budget),
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.0, seed)).collect()
}

type Outcome = Result<String, String>;

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

pub fn two_cycle() -> RelationalStructure {
    RelationalStructure::from_names(&["0", "1"], &[("E", &[&["0", "1"], &["1", "0"]])])
        .expect("valid structure")
}

pub fn one_element() -> RelationalStructure {
    RelationalStructure::from_names(&["a"], &[("R", &[&["a"]])]).expect("valid structure")
}

/// The 4-ary template over `{0,1}` whose gadget has 78 vertices and 80 edges.
pub fn example7() -> RelationalStructure {
    RelationalStructure::from_names(
        &["0", "1"],
        &[(
            "R",
            &[
                &["0", "0", "0", "1"],
                &["0", "1", "1", "1"],
                &["1", "0", "1", "1"],
                &["1", "1", "0", "1"],
            ],
        )],
    )
    .expect("valid structure")
}

fn counts(seed: u64) -> Outcome {
    let mut rng = corpus::rng(seed);
    for i in 0..200 {
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=4);
        let a = corpus::random_template(&mut rng, n, k, 8);
        let d = build_d(&a).map_err(err)?;
        let r = a.relations()[0].len();
        let built = (d.vertex_count(), d.digraph().edge_count());
        if built != count_formula(n, r, k) {
            return Err(format!(
                "template {i} (|A|={n}, |R|={r}, k={k}): built {built:?}, formula {:?}",
                count_formula(n, r, k)
            ));
        }
    }
    let d = build_d(&example7()).map_err(err)?;
    let built = (d.vertex_count(), d.digraph().edge_count());
    if built != (78, 80) {
        return Err(format!(
            "worked template: built {built:?}, expected (78, 80)"
        ));
    }
    Ok("200 random templates match the formula; worked template (78, 80)".into())
}

fn subsets(k: usize) -> Vec<Vec<usize>> {
    (0..1usize << k)
        .map(|mask| (1..=k).filter(|&i| mask >> (i - 1) & 1 == 1).collect())
        .collect()
}

fn path_homomorphisms(solver: &Solver) -> Outcome {
    let mut pairs = 0;
    for k in 1..=4 {
        for i in subsets(k) {
            for j in subsets(k) {
                let (qi, qj) = (build_q(k, &i), build_q(k, &j));
                let expected = i.iter().all(|x| j.contains(x));
                let direct = path_hom_exists(&qi, &qj).is_some();
                let source = qi
                    .to_digraph(|p| p.to_string())
                    .to_structure()
                    .map_err(err)?;
                let target = qj
                    .to_digraph(|p| p.to_string())
                    .to_structure()
                    .map_err(err)?;
                let mut inst = HomInstance::new(&source, &target).map_err(err)?;
                inst.pin(qi.initial(), qj.initial()).map_err(err)?;
                inst.pin(qi.terminal(), qj.terminal()).map_err(err)?;
                let generic = solver.exists(&inst).map_err(err)?;
                if direct != expected || generic != expected {
                    return Err(format!(
                        "k={k}, I={i:?}, J={j:?}: inclusion {expected}, path check {direct}, solver {generic}"
                    ));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs agree with inclusion"))
}

fn brute_force_hom(x: &RelationalStructure, a: &RelationalStructure) -> bool {
    let total = power(a.size(), x.size());
    (0..total as usize).any(|i| x.is_homomorphism(a, &tuple_at(i, a.size(), x.size())))
}

fn forward_equivalence(seed: u64, solver: &Solver) -> Outcome {
    let mut rng = corpus::rng(seed.wrapping_add(3));
    let mut yes = 0;
    for i in 0..100 {
        // One-element templates answer YES to everything; redraw them.
        let a = loop {
            let a = corpus::random_multi_template(&mut rng, 3, 2, 2, 3);
            if a.size() > 1 {
                break a;
            }
        };
        let x = corpus::random_instance(&mut rng, &a, 4, 3);
        let direct = solver.solve(&x, &a).map_err(err)?.is_some();
        let brute = brute_force_hom(&x, &a);
        let d = build_d(&collapse_to_single_relation(&a).structure).map_err(err)?;
        let g = forward_translate(&x, &a).map_err(err)?;
        let source = g.to_structure().map_err(err)?;
        let translated = solver
            .solve(&source, &d.to_structure())
            .map_err(err)?
            .is_some();
        if direct != brute || direct != translated {
            return Err(format!(
                "pair {i}: solver {direct}, brute force {brute}, translated {translated}"
            ));
        }
        yes += usize::from(direct);
    }
    Ok(format!("100 pairs agree ({yes} YES, {} NO)", 100 - yes))
}

fn backward_equivalence(seed: u64, solver: &Solver) -> Outcome {
    let mut rng = corpus::rng(seed.wrapping_add(4));
    let n = rng.gen_range(2..=4);
    let templates = [two_cycle(), corpus::random_template(&mut rng, 3, 2, n)];
    let gadgets: Vec<GadgetDigraph> = templates
        .iter()
        .map(|a| build_d(a).map_err(err))
        .collect::<Result<_, _>>()?;
    let targets: Vec<RelationalStructure> = gadgets.iter().map(|d| d.to_structure()).collect();
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..100 {
        let t = i % 2;
        let d = &gadgets[t];
        let g = match (i / 2) % 5 {
            0 => corpus::planted_digraph(&mut rng, d, 20, 0),
            1 => corpus::planted_digraph(&mut rng, d, 20, 2),
            2 => corpus::path_system_digraph(&mut rng, d.k(), 20, 0),
            3 => corpus::path_system_digraph(&mut rng, d.k(), 20, 2),
            _ => {
                let height = rng.gen_range(1..=d.height());
                corpus::random_balanced_digraph(&mut rng, 20, height, 0.2)
            }
        };
        let direct = solver
            .solve(&g.to_structure().map_err(err)?, &targets[t])
            .map_err(err)?
            .is_some();
        let outcome = backward_reduce(&g, d, solver).map_err(err)?;
        let (reduced, kind) = match &outcome {
            ReductionOutcome::Definite { answer, .. } => (*answer == Answer::Yes, "definite"),
            ReductionOutcome::Reduced { instance, .. } => (
                solver
                    .solve(instance, &templates[t])
                    .map_err(err)?
                    .is_some(),
                "reduced",
            ),
        };
        if reduced != direct {
            return Err(format!(
                "digraph {i} over template {t}: direct {direct}, reduction {reduced} ({kind})"
            ));
        }
        let answer = if direct { "YES" } else { "NO" };
        *tally.entry(format!("{kind} {answer}")).or_default() += 1;
    }
    let summary: Vec<String> = tally.iter().map(|(k, v)| format!("{v} {k}")).collect();
    Ok(format!("100 digraphs agree ({})", summary.join(", ")))
}

fn worked_example() -> Outcome {
    let stage = Stage3A::from_json(WORKED_EXAMPLE_STAGE3A).map_err(err)?;
    let b = stage_3b(&stage, Some(2), "E").map_err(err)?;
    let wanted: [&[&str]; 2] = [&["b2", "b4", "b5", "b6", "x1", "x4"], &["b3", "x2"]];
    let has = |class: &[&str]| b.classes.iter().any(|c| c == class);
    if b.classes.len() != 12 || !wanted.iter().all(|c| has(c)) {
        return Err(format!("classes {:?}", b.classes));
    }
    Ok(format!(
        "12 classes including {{b2,b4,b5,b6,x1,x4}} and {{b3,x2}}; {} distinct hyperedges",
        b.instance.relations()[0].len()
    ))
}

fn wnu_lift(solver: &Solver) -> Outcome {
    let a = two_cycle();
    let d = build_d(&a).map_err(err)?;
    let omega = algebra::find_wnu(&a, 3, solver, SEARCH_BOUND)
        .map_err(err)?
        .ok_or("no ternary WNU on the 2-cycle")?;
    let w = lift_wnu(&d, &omega).map_err(err)?;
    let ops = BTreeMap::from([("w".to_string(), &w)]);
    check_identities(&ops, &identities::wnu(3), d.vertex_count()).map_err(err)?;
    let check = verify_polymorphism(&d, &w, u64::MAX, 0);
    if !check.passed() {
        return Err(check.to_string());
    }
    Ok(format!("idempotent WNU on 24 vertices; {check}"))
}

fn all_small_templates() -> Vec<RelationalStructure> {
    let mut out = Vec::new();
    for n in 1..=2usize {
        for k in 1..=2usize {
            let total = n.pow(k as u32);
            for mask in 1..1usize << total {
                let tuples = (0..total)
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| tuple_at(i, n, k))
                    .collect::<Vec<_>>();
                let relation = Relation::new("R", k, tuples).expect("in range");
                let elements = (0..n).map(|i| i.to_string()).collect();
                out.push(RelationalStructure::new(elements, vec![relation]).expect("valid"));
            }
        }
    }
    out
}

fn cores(solver: &Solver) -> Outcome {
    let mut templates = all_small_templates();
    templates.push(two_cycle());
    templates.push(example7());
    let mut cores = 0;
    for (i, a) in templates.iter().enumerate() {
        let d = build_d(a).map_err(err)?.to_structure();
        let core_a = algebra::is_core(a, solver).map_err(err)?;
        let core_d = algebra::is_core(&d, solver).map_err(err)?;
        let ends_a = algebra::endomorphisms(a, solver).map_err(err)?.len();
        let ends_d = algebra::endomorphisms(&d, solver).map_err(err)?.len();
        if core_a != core_d || ends_a != ends_d {
            return Err(format!(
                "template {i}: core {core_a} vs {core_d}, endomorphisms {ends_a} vs {ends_d}"
            ));
        }
        cores += usize::from(core_a);
    }
    Ok(format!(
        "{} templates agree ({cores} cores)",
        templates.len()
    ))
}

fn zigzag_algebra(solver: &Solver) -> Outcome {
    let z = zigzag::zigzag();
    let builtins = zigzag::zigzag_builtins();
    let pick = |names: &[(&str, &str)]| -> BTreeMap<String, OperationTable> {
        names
            .iter()
            .map(|&(symbol, name)| (symbol.to_string(), builtins[name].clone()))
            .collect()
    };
    check_identities(&pick(&[("m", "median")]), &identities::majority(), 4).map_err(err)?;
    check_identities(
        &pick(&[("p1", "p1"), ("p2", "p2")]),
        &identities::three_permutability(),
        4,
    )
    .map_err(err)?;
    let maltsev = algebra::find_interpretations(&z, &identities::maltsev(), solver, SEARCH_BOUND)
        .map_err(err)?;
    if maltsev.is_some() {
        return Err("indicator search found a Maltsev polymorphism".into());
    }
    Ok("median is a majority; p1, p2 witness 3-permutability; no Maltsev polymorphism".into())
}

fn general_lift(solver: &Solver) -> Outcome {
    let a = two_cycle();
    let d = build_d(&a).map_err(err)?;
    let mut parts = Vec::new();
    let mut ok = true;

    let majority = identities::majority();
    match lift_general_auto(&d, &majority, solver, SEARCH_BOUND, EpsilonOrder::default()) {
        Ok(ops) => {
            let ids = verify_identities(&d, &ops, &majority);
            let check = verify_polymorphism(&d, &ops["m"], u64::MAX, 0);
            ok &= ids.is_ok() && check.passed();
            parts.push(match ids {
                Ok(()) => format!("majority: identities hold, {check}"),
                Err(e) => format!("majority: {e}"),
            });
        }
        Err(e) => {
            ok = false;
            parts.push(format!("majority: {e}"));
        }
    }

    let tsi = identities::binary_tsi();
    match algebra::find_interpretations(&a, &tsi, solver, SEARCH_BOUND).map_err(err)? {
        None => {
            ok = false;
            parts.push("TSI: the 2-cycle has no binary TSI polymorphism to lift".into());
        }
        Some(_) => {
            match lift_general_auto(&d, &tsi, solver, SEARCH_BOUND, EpsilonOrder::default()) {
                Ok(ops) => {
                    let ids = verify_identities(&d, &ops, &tsi);
                    let check = verify_polymorphism(&d, &ops["f"], u64::MAX, 0);
                    ok &= ids.is_ok() && check.passed();
                    parts.push(format!("TSI: {check}"));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("TSI: {e}"));
                }
            }
        }
    }

    match lift_general_auto(
        &d,
        &identities::maltsev(),
        solver,
        SEARCH_BOUND,
        EpsilonOrder::default(),
    ) {
        Err(e) => parts.push(format!("Maltsev rejected ({e})")),
        Ok(_) => {
            ok = false;
            parts.push("Maltsev accepted".into());
        }
    }
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Vertices of `D(A)^2` reachable from the diagonal, by breadth-first search.
fn diagonal_by_search(d: &GadgetDigraph) -> Vec<bool> {
    let g = d.digraph();
    let n = g.vertex_count();
    let mut seen = vec![false; n * n];
    let mut queue: VecDeque<(usize, usize)> = (0..n).map(|v| (v, v)).collect();
    for v in 0..n {
        seen[v * n + v] = true;
    }
    while let Some((x, y)) = queue.pop_front() {
        let forward = g
            .successors(x)
            .iter()
            .flat_map(|&a| g.successors(y).iter().map(move |&b| (a, b)));
        let backward = g
            .predecessors(x)
            .iter()
            .flat_map(|&a| g.predecessors(y).iter().map(move |&b| (a, b)));
        for (a, b) in forward.chain(backward).collect::<Vec<_>>() {
            if !seen[a * n + b] {
                seen[a * n + b] = true;
                queue.push_back((a, b));
            }
        }
    }
    seen
}

fn diagonal() -> Outcome {
    let (mut inside, mut total) = (0, 0);
    for a in [two_cycle(), one_element()] {
        let d = build_d(&a).map_err(err)?;
        let n = d.vertex_count();
        total += n * n;
        let seen = diagonal_by_search(&d);
        for x in 0..n {
            for y in 0..n {
                if in_diagonal_component(&d, &[x, y]) != seen[x * n + y] {
                    return Err(format!(
                        "disagreement at ({x}, {y}) over {} elements",
                        a.size()
                    ));
                }
                inside += usize::from(seen[x * n + y]);
            }
        }
    }
    Ok(format!(
        "{total} pairs agree ({inside} in the diagonal component)"
    ))
}
