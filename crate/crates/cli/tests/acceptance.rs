//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use warden_core::agents::{BasicPrisoner, WorstCaseSearch};
use warden_core::cache::{read_cache, to_bytes, write_cache};
use warden_core::oracle::{bounded_minimax, exhaustive_remoteness, value_iteration};
use warden_core::sequences::{enumerate_all, fkm, greedy_granddaddy};
use warden_core::verify::{check_uniform, uniform_shapes, UniformReport};
use warden_core::{decode, rotation_dominates, solve, GoalSpec, Position, RemotenessTable};

type Outcome = Result<String, String>;

fn ensure(ok: bool, reason: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(reason())
    }
}

fn within(budget: Duration, started: Instant) -> Result<(), String> {
    let took = started.elapsed();
    ensure(took < budget, || format!("took {took:.2?}, budget {budget:?}"))
}

fn warden(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_warden"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run warden: {e}"))?;
    if !out.status.success() {
        return Err(format!("warden {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn pos(text: &str) -> Position {
    Position::parse(text).expect("literal position")
}

const THREE_DICE_ORDER: [&str; 28] = [
    "222", "220", "200", "000", "001", "010", "100", "002", "020", "201", "011", "110", "101", "012",
    "120", "202", "021", "210", "102", "022", "221", "211", "111", "112", "121", "212", "122", "222",
];

fn golden_chain() -> Outcome {
    let started = Instant::now();
    let table = solve(&GoalSpec::uniform(3, 3).unwrap()).map_err(|e| e.to_string())?;
    let chain = table.build_chain().map_err(|e| e.to_string())?.render_with_goal();
    ensure(chain == "(222)000100201101202102211121222", || format!("chain {chain}"))?;
    let mut order = vec![String::new(); 28];
    for idx in 0..table.values().len() {
        let p = table.position_at(idx);
        order[table.remoteness(&p).unwrap().unwrap() as usize] = p.render(3);
    }
    order[27] = table.position_at(26).render(3);
    ensure(table.goal_as_start() == Some(27), || "goal as start is not 27".into())?;
    ensure(order == THREE_DICE_ORDER, || format!("order {order:?}"))?;
    within(Duration::from_secs(1), started)?;
    Ok(format!("{chain}, 28-entry order matches"))
}

fn golden_sequence() -> Outcome {
    let started = Instant::now();
    let expected = "0000100110101111\n";
    for method in ["game", "greedy", "fkm"] {
        let out = warden(&["generate", "--m", "2", "--n", "4", "--method", method])?;
        ensure(out == expected, || format!("{method} printed {out:?}"))?;
    }
    within(Duration::from_secs(1), started)?;
    Ok("game = greedy = fkm = 0000100110101111".into())
}

fn reports() -> Result<(Vec<UniformReport>, Duration), String> {
    let started = Instant::now();
    let reports = uniform_shapes(4096)
        .into_iter()
        .map(|(m, n)| check_uniform(m, n).map_err(|e| format!("uniform({m},{n}): {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((reports, started.elapsed()))
}

fn over_reports(reports: &[UniformReport], check: impl Fn(&UniformReport) -> bool) -> Result<(), String> {
    let failed: Vec<_> = reports.iter().filter(|r| !check(r)).map(|r| (r.m, r.n)).collect();
    ensure(failed.is_empty(), || format!("failed for {failed:?}"))
}

fn oracle_equivalence(reports: &[UniformReport], took: Duration) -> Outcome {
    over_reports(reports, |r| r.oracle_equivalence)?;
    ensure(took < Duration::from_secs(30), || format!("took {took:.2?}, budget 30s"))?;
    // the headline shapes, spelled out
    for (m, n) in [(16, 3), (2, 12)] {
        let chain = solve(&GoalSpec::uniform(m, n).unwrap()).unwrap().build_chain().unwrap();
        ensure(chain.digits == greedy_granddaddy(m, n).unwrap().digits, || format!("greedy ({m},{n})"))?;
        ensure(chain.digits == fkm(m, n).unwrap().digits, || format!("fkm ({m},{n})"))?;
    }
    Ok(format!("{} shapes with m^n <= 4096 in {took:.2?}", reports.len()))
}

fn minimality() -> Outcome {
    let mut detail = Vec::new();
    for (n, count) in [(4, 16), (3, 2)] {
        let all = enumerate_all(2, n).map_err(|e| e.to_string())?;
        ensure(all.len() == count, || format!("(2,{n}) enumerated {}", all.len()))?;
        let chain = solve(&GoalSpec::uniform(2, n).unwrap()).unwrap().build_chain().unwrap();
        let least = all.iter().map(|s| &s.digits).min().unwrap();
        ensure(&chain.digits == least, || format!("(2,{n}) game chain is not the minimum"))?;
        detail.push(format!("(2,{n}): {count} sequences"));
    }
    Ok(format!("{}, game chain is least", detail.join(", ")))
}

fn single_chain(reports: &[UniformReport]) -> Outcome {
    over_reports(reports, |r| r.single_chain)?;
    Ok(format!("{} shapes, top remoteness m^n at (m-1)^n", reports.len()))
}

fn monotonicity(reports: &[UniformReport]) -> Outcome {
    over_reports(reports, |r| r.monotone)?;
    let table = solve(&GoalSpec::uniform(3, 3).unwrap()).unwrap();
    let r: Vec<u32> = ["220", "221", "222"]
        .iter()
        .map(|p| table.remoteness_from_start(&pos(p)).unwrap().unwrap())
        .collect();
    ensure(r[0] < r[1] && r[1] < r[2], || format!("r(220), r(221), r(222) = {r:?}"))?;
    Ok(format!("{} shapes; r(220) < r(221) < r(222) = {r:?}", reports.len()))
}

fn goal_word_goldens() -> Outcome {
    let expected = [
        ("321", "(321)00010110200211120121220221300301310311320321"),
        ("132", "(132)00010020110120210220300310321112122130131132"),
        ("213", "(213)00010020030110120131021031112113202203212213"),
    ];
    let mut windows = Vec::new();
    for (goal, loop_text) in expected {
        let out = warden(&["chain", "--goal", goal])?;
        ensure(out.trim_end() == loop_text, || format!("goal {goal}: {out:?}"))?;
        let chain = solve(&GoalSpec::word(pos(goal).into_digits()).unwrap()).unwrap().build_chain().unwrap();
        windows.push(chain.windows().into_iter().collect::<BTreeSet<_>>());
    }
    ensure(windows[0] == windows[1] && windows[1] == windows[2], || "window sets differ".into())?;
    Ok(format!("three loops match, {} shared windows", windows[0].len()))
}

fn winnable_iff_rotation_dominates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0usize;
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let goal: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let spec = GoalSpec::word(goal.clone()).unwrap();
        let table = solve(&spec).unwrap();
        for idx in 0..table.values().len() {
            let p = table.position_at(idx);
            let winnable = table.remoteness(&p).unwrap().is_some();
            let dominated = rotation_dominates(&p, &goal).unwrap();
            ensure(winnable == dominated, || format!("goal {goal:?}, position {p}"))?;
            checked += 1;
        }
    }
    let table = solve(&GoalSpec::word(vec![3, 1, 4]).unwrap()).unwrap();
    ensure(table.remoteness(&pos("042")).unwrap().is_some(), || "042 should be winnable".into())?;
    ensure(table.remoteness(&pos("402")).unwrap().is_none(), || "402 should not be winnable".into())?;
    Ok(format!("50 goals, {checked} positions; 042 winnable, 402 not"))
}

fn basic_strategy_bound() -> Outcome {
    let spec = GoalSpec::uniform(2, 5).unwrap();
    let start = pos("01110");
    let policy = BasicPrisoner::new(&spec).unwrap();
    let worst = WorstCaseSearch::new(&spec, 1 << 20).longest(&start, policy).map_err(|e| e.to_string())?;
    let r = solve(&spec).unwrap().remoteness(&start).unwrap().unwrap();
    ensure(worst <= 75, || format!("worst case from 01110 is {worst}"))?;
    ensure(r < worst, || format!("optimal {r} is not below basic worst case {worst}"))?;
    let mut starts = 0usize;
    for (m, n) in uniform_shapes(256) {
        let spec = GoalSpec::uniform(m, n).unwrap();
        let bound = n as u32 * m.pow(n as u32);
        let mut search = WorstCaseSearch::new(&spec, 1 << 22);
        for idx in 0..m.pow(n as u32) as u64 {
            let start = decode(idx, m, n).unwrap();
            let worst = search
                .longest(&start, BasicPrisoner::new(&spec).unwrap())
                .map_err(|e| format!("uniform({m},{n}) from {start}: {e}"))?;
            ensure(worst <= bound, || format!("uniform({m},{n}) from {start}: {worst} > {bound}"))?;
            starts += 1;
        }
    }
    Ok(format!("01110: basic worst {worst} <= 75, optimal {r}; {starts} starts within n*m^n"))
}

fn compare(table: &RemotenessTable, oracle: &[Option<u32>]) -> bool {
    table.values().iter().map(|&v| (v != u32::MAX).then_some(v)).eq(oracle.iter().copied())
}

fn small_instance_oracle() -> Outcome {
    let mut specs: Vec<GoalSpec> =
        uniform_shapes(512).into_iter().map(|(m, n)| GoalSpec::uniform(m, n).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let n = rng.gen_range(1..=3);
        specs.push(GoalSpec::word((0..n).map(|_| rng.gen_range(0..=5)).collect()).unwrap());
    }
    let mut multi = 0;
    while multi < 5 {
        let alphabet = rng.gen_range(2..=6);
        let n = rng.gen_range(1..=3);
        let goals: BTreeSet<Vec<u32>> = (0..rng.gen_range(1..=4))
            .map(|_| (0..n).map(|_| rng.gen_range(0..alphabet)).collect())
            .collect();
        let limit = rng.gen_bool(0.5).then(|| rng.gen_range(1..=12));
        specs.push(GoalSpec::multi(alphabet, n, goals, limit).unwrap());
        multi += 1;
    }
    let mut searched = 0usize;
    for spec in &specs {
        let table = solve(spec).map_err(|e| e.to_string())?;
        let oracle = exhaustive_remoteness(spec, 512).map_err(|e| e.to_string())?;
        ensure(compare(&table, &oracle), || format!("{spec:?}: backward induction differs"))?;
        let states = table.values().len();
        if states <= 64 {
            let iterated = value_iteration(spec, 512).unwrap();
            ensure(compare(&table, &iterated), || format!("{spec:?}: value iteration differs"))?;
            let depth = oracle.iter().flatten().max().copied().unwrap_or(0) + 1;
            for idx in 0..states {
                let p = table.position_at(idx);
                let minimax = bounded_minimax(spec, &p, depth).unwrap();
                ensure(minimax == oracle[idx], || format!("{spec:?}: minimax differs at {p}"))?;
                searched += 1;
            }
        }
        if let GoalSpec::Multi { limit: Some(limit), .. } = spec {
            for idx in 0..states {
                let p = table.position_at(idx);
                let bounded = table.bounded_win(&p).unwrap();
                ensure(bounded.moves == bounded_minimax(spec, &p, *limit).unwrap(), || {
                    format!("{spec:?}: bounded answer differs at {p}")
                })?;
            }
        }
    }
    Ok(format!("{} specs (5 goal sets), {searched} positions by depth search", specs.len()))
}

fn prime_puzzle() -> Outcome {
    let started = Instant::now();
    let runs = (0..3).map(|_| warden(&["puzzle", "prime"])).collect::<Result<Vec<_>, _>>()?;
    within(Duration::from_secs(1), started)?;
    ensure(runs.iter().all(|r| *r == runs[0]), || "outputs differ between runs".into())?;
    let spec = GoalSpec::prime_puzzle();
    let table = solve(&spec).unwrap();
    let bounded = table.bounded_win(&pos("88")).unwrap();
    let searched = bounded_minimax(&spec, &pos("88"), 19).unwrap();
    ensure(bounded.moves == searched, || format!("table {:?}, search {searched:?}", bounded.moves))?;
    let verdict = match searched {
        Some(moves) => format!("verdict winnable\nmoves {moves}\n"),
        None => "verdict not winnable\n".into(),
    };
    ensure(runs[0].contains(&verdict), || format!("printed {:?}", runs[0]))?;
    let first = runs[0].lines().find(|l| l.starts_with("first move")).unwrap_or("no first move");
    Ok(format!("{} ({first}), stable over 3 runs", verdict.trim().replace('\n', ", ")))
}

fn cache_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for spec in [GoalSpec::uniform(3, 3).unwrap(), GoalSpec::word(vec![3, 1, 4]).unwrap(), GoalSpec::prime_puzzle()] {
        let table = solve(&spec).unwrap();
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        write_cache(&table, &a).map_err(|e| e.to_string())?;
        write_cache(&solve(&spec).unwrap(), &b).map_err(|e| e.to_string())?;
        let back = read_cache(&a).map_err(|e| e.to_string())?;
        ensure(back == table, || format!("{spec:?}: table changed"))?;
        let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        ensure(x == y && x == to_bytes(&back).unwrap(), || format!("{spec:?}: bytes differ"))?;
    }
    Ok("3 specs: identical tables, byte-identical files".into())
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name, f: &dyn Fn() -> Outcome| {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".into()));
        match &outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(reason) => println!("FAIL {name}: {reason}"),
        }
        results.push((name, outcome));
    };
    run("golden_chain", &golden_chain);
    run("golden_sequence", &golden_sequence);
    let shared = Arc::new(reports());
    let with_reports = |f: fn(&[UniformReport], Duration) -> Outcome| {
        let shared = shared.clone();
        move || match shared.as_ref() {
            Ok((reports, took)) => f(reports, *took),
            Err(e) => Err(e.clone()),
        }
    };
    run("oracle_equivalence", &with_reports(oracle_equivalence));
    run("minimality", &minimality);
    run("single_chain", &with_reports(|r, _| single_chain(r)));
    run("monotonicity", &with_reports(|r, _| monotonicity(r)));
    run("goal_word_goldens", &goal_word_goldens);
    run("winnable_iff_rotation_dominates", &winnable_iff_rotation_dominates);
    run("basic_strategy_bound", &basic_strategy_bound);
    run("small_instance_oracle", &small_instance_oracle);
    run("prime_puzzle", &prime_puzzle);
    run("cache_round_trip", &cache_round_trip);
    let failed = results.iter().filter(|(_, o)| o.is_err()).count();
    println!("acceptance: {}/{} passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
