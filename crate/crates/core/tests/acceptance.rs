//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;

use common::*;
use tidy_core::bt::trees::*;
use tidy_core::bt::{build_tidy_tree, BehaviorTree, Blackboard, Node, TickStatus};
use tidy_core::episode::{EpisodeSetup, TerminalReason};
use tidy_core::fixtures::{self, OBJECTS};
use tidy_core::nav::{path_cost, plan_point_goal, NavError};
use tidy_core::preference::*;
use tidy_core::sim::{ActionOutcome, Containment, FailReason, PlaceMode, WorldState};
use tidy_core::vocab::{ObjectClass, ReceptacleClass, RoomId, UserId};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn gradient_correctness() -> Check {
    let start = Instant::now();
    let mut rng = rng(101);
    let mut worst: f64 = 0.0;
    for m in 0..20 {
        let dim = [1, 4, 16][m % 3];
        let users = rng.random_range(2..=30);
        let items = rng.random_range(2..=50);
        let lambda = rng.random_range(0.0..0.1);
        let (model, corpus) = random_problem(&mut rng, users, items, dim, lambda);
        let g = gradient(&model, &corpus).map_err(|e| e.to_string())?;
        let analytic: Vec<f64> = g.user.iter().chain(&g.item).copied().collect();
        let numeric = numeric_gradient(&model, &corpus, 1e-5);
        worst = worst.max(max_relative_error(&analytic, &numeric));
    }
    ensure(worst < 1e-4, || format!("max relative error {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("20 models, max relative error {worst:.2e}, {:?}", start.elapsed()))
}

fn low_rank_recovery() -> Check {
    let start = Instant::now();
    let (train_set, held_out) = low_rank_split(7, 50, 60, 4, 0.3);
    let hyper = Hyperparameters {
        dim: 4,
        lambda: 1e-4,
        ..Hyperparameters::default()
    };
    let model = train(&train_set, &hyper).map_err(|e| e.to_string())?;
    let err = rmse(&model, &held_out).map_err(|e| e.to_string())?;
    ensure(err < 0.1, || format!("held-out RMSE {err:.4}"))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("held-out RMSE {err:.4} on {} ratings, {:?}", held_out.len(), start.elapsed()))
}

fn ranking_oracle() -> Check {
    let mut rng = rng(202);
    let mut queries = 0;
    for c in 0..100 {
        let n_items = rng.random_range(1..=500);
        let n_users = rng.random_range(1..=6);
        let dim = rng.random_range(1..=8);
        let (mut model, _) = random_problem(&mut rng, n_users, n_items, dim, 0.0);
        if c % 4 == 0 {
            // Coarse factors force score ties.
            let coarse = |x: &mut f64| *x = (*x * 2.0).round() / 2.0;
            model.user_factors_mut().iter_mut().for_each(coarse);
            model.item_factors_mut().iter_mut().for_each(coarse);
        }
        let objects: Vec<ObjectClass> = {
            let mut o: Vec<ObjectClass> = model.items().values().iter().map(|i| i.object_class.clone()).collect();
            o.dedup();
            o
        };
        for u in 0..n_users {
            let user = model.users().value(u).clone();
            for object in &objects {
                let oracle = brute_force_ranking(&model, u, object.as_str());
                for k in [1, 5, 10] {
                    let top: Vec<usize> = top_placements(&model, &user, object, k)
                        .map_err(|e| e.to_string())?
                        .iter()
                        .map(|r| r.index)
                        .collect();
                    let want = &oracle[..k.min(oracle.len())];
                    ensure(top == want, || format!("corpus {c}, {user} {object} k={k}: {top:?} vs {want:?}"))?;
                    for &i in &oracle {
                        let it = model.items().value(i);
                        let got = is_misplaced(&model, &user, object, (&it.room, it.receptacle_class), k)
                            .map_err(|e| e.to_string())?;
                        ensure(got != want.contains(&i), || format!("corpus {c}: is_misplaced({it}) wrong at k={k}"))?;
                    }
                    queries += 1;
                }
            }
        }
    }
    Ok(format!("100 corpora, {queries} top-k queries agree with full sort"))
}

fn reference_ratings_fidelity() -> Check {
    let prefs = fixtures::preferences();
    let mut rows = 0;
    for (object, u1, u2) in fixtures::REFERENCE_PLACEMENTS {
        for (user, expected) in [("U1", u1), ("U2", u2)] {
            let (user, obj) = (UserId::new(user), ObjectClass::new(object));
            let rooms = user_room_ranking(&prefs.factors, &user, &obj).map_err(|e| e.to_string())?;
            let want_rooms: Vec<RoomId> = expected.iter().map(|(r, _)| RoomId::new(*r)).collect();
            ensure(rooms == want_rooms, || format!("{user} {object}: rooms {rooms:?}"))?;
            for (room, pair) in expected {
                let recs = receptacle_candidates(&prefs.factors, &user, &obj, &RoomId::new(room))
                    .map_err(|e| e.to_string())?;
                ensure(recs[..2] == pair, || format!("{user} {object} {room}: {recs:?} vs {pair:?}"))?;
            }
            rows += 1;
        }
    }
    ensure(rows == 2 * OBJECTS.len(), || "missing rows".into())?;
    Ok(format!("{rows} object/user rows reproduced (room order and receptacle pairs)"))
}

fn planner_optimality() -> Check {
    let mut plans = 0;
    let mut unreachable = 0;
    for seed in 0..50 {
        let cm = random_costmap(seed, 32, 32, 0.2, seed % 2 == 1);
        let mut rng = rng(1000 + seed);
        for _ in 0..4 {
            let (s, g) = (random_free_cell(&mut rng, &cm), random_free_cell(&mut rng, &cm));
            let oracle = dijkstra_oracle(&cm, s, g, true);
            match (plan_point_goal(&cm, s, g), oracle) {
                (Ok(p), Some(best)) => {
                    ensure((p.total_cost - best).abs() < 1e-9, || {
                        format!("seed {seed} {s}->{g}: cost {} vs oracle {best}", p.total_cost)
                    })?;
                    ensure(p.cells.iter().all(|c| !cm.is_lethal(*c)), || format!("seed {seed}: lethal cell on path"))?;
                    let walked = path_cost(&cm, s, &p.cells).unwrap_or(f64::NAN);
                    ensure((walked - best).abs() < 1e-9, || format!("seed {seed}: path does not realise its cost"))?;
                    plans += 1;
                }
                (Err(NavError::NoPathExists { .. }), None) => unreachable += 1,
                (got, want) => return Err(format!("seed {seed} {s}->{g}: {got:?} vs oracle {want:?}")),
            }
        }
    }
    Ok(format!("50 grids: {plans} optimal lethal-free paths, {unreachable} agreed unreachable"))
}

fn bt_semantics() -> Check {
    let mut rng = rng(303);
    let mut cases = 0;
    // Reference equivalence over several ticks: covers short-circuit and
    // memory-resume; a second library run checks determinism.
    for case in 0..600 {
        let tree = random_tree(&mut rng, 4, 5);
        let scripts = random_scripts(&mut rng, 5);
        let run_lib = || {
            let mut t = BehaviorTree::new(tree.clone()).unwrap();
            let mut host = ScriptedHost::new(scripts.clone());
            let mut bb = Blackboard::new();
            let statuses: Vec<TickStatus> = (0..12).map(|_| t.tick(&mut bb, &mut host).unwrap()).collect();
            (statuses, host.calls)
        };
        let lib = run_lib();
        ensure(lib == run_lib(), || format!("case {case}: nondeterministic"))?;
        let mut reference = RefTree::from_node(&tree);
        let mut host = ScriptedHost::new(scripts.clone());
        let statuses: Vec<TickStatus> = (0..12).map(|_| reference.tick(&mut host)).collect();
        ensure(lib == (statuses, host.calls), || format!("case {case}: differs from reference"))?;
        cases += 1;
    }
    // Sequence short-circuit and memory-resume on flat sequences.
    for case in 0..200 {
        let n = rng.random_range(1..=6);
        let scripts = random_scripts(&mut rng, n);
        let leaves: Vec<Node> = (0..n).map(|i| Node::action(&format!("a{i}"))).collect();
        let mut t = BehaviorTree::new(Node::sequence(leaves)).unwrap();
        let mut host = ScriptedHost::new(scripts);
        let mut bb = Blackboard::new();
        for _ in 0..20 {
            let before = host.calls.len();
            let status = t.tick(&mut bb, &mut host).unwrap();
            let idx: Vec<usize> = host.calls[before..].iter().map(|c| c[1..].parse().unwrap()).collect();
            ensure(idx.windows(2).all(|w| w[1] == w[0] + 1), || format!("case {case}: skipped or revisited a child"))?;
            if status == TickStatus::Running {
                continue;
            }
            break;
        }
        cases += 1;
    }
    // Retry bound: the child finishes at most n times per activation.
    for case in 0..200 {
        let n = rng.random_range(1..=4);
        let scripts = random_scripts(&mut rng, 1);
        let mut t = BehaviorTree::new(Node::retry(n, Node::action("a0"))).unwrap();
        let mut host = ScriptedHost::new(scripts.clone());
        let mut bb = Blackboard::new();
        let mut finished = 0;
        let mut status = TickStatus::Running;
        for _ in 0..50 {
            let before = host.calls.len();
            status = t.tick(&mut bb, &mut host).unwrap();
            let script = &scripts["a0"];
            finished += (before..host.calls.len())
                .filter(|i| script[i % script.len()] != TickStatus::Running)
                .count() as u32;
            if status != TickStatus::Running {
                break;
            }
        }
        ensure(finished <= n, || format!("case {case}: child finished {finished} times under Retry({n})"))?;
        if status == TickStatus::Failure {
            ensure(finished == n, || format!("case {case}: failed after {finished} of {n} attempts"))?;
        }
        cases += 1;
    }
    // Building trees never calls leaves.
    let scripts: BTreeMap<String, Vec<TickStatus>> =
        TIDY_LEAVES.iter().map(|n| (n.to_string(), vec![TickStatus::Success])).collect();
    let host = ScriptedHost::new(scripts);
    build_tidy_tree(&host).map_err(|e| e.to_string())?;
    ensure(host.calls.is_empty(), || "tree construction invoked a leaf".into())?;
    cases += 1;
    ensure(cases >= 1000, || format!("only {cases} cases"))?;
    Ok(format!("{cases} randomized cases"))
}

fn final_receptacle(world: &WorldState, class: &str) -> Option<(RoomId, ReceptacleClass)> {
    let o = world.objects.iter().find(|o| o.class.as_str() == class)?;
    let r = &world.receptacles[o.location.receptacle()?];
    Some((r.room.clone(), r.class))
}

fn long_horizon_episode() -> Check {
    let setup = EpisodeSetup::bundled("two_objects").map_err(|e| e.to_string())?;
    let start = Instant::now();
    let first = tidy_core::episode::run_setup(&setup).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let second = tidy_core::episode::run_setup(&setup).map_err(|e| e.to_string())?;
    let s = &first.log.summary;
    ensure(s.terminal_reason == TerminalReason::AllPlaced, || format!("ended with {:?}", s.terminal_reason))?;
    ensure(s.objects_rearranged == 2, || format!("{} objects rearranged", s.objects_rearranged))?;
    let mug = final_receptacle(&first.world, "mug");
    let mustard = final_receptacle(&first.world, "mustard_bottle");
    ensure(mug == Some((RoomId::new("livingroom"), ReceptacleClass::Table)), || format!("mug at {mug:?}"))?;
    ensure(mustard == Some((RoomId::new("kitchen"), ReceptacleClass::Counter)), || {
        format!("mustard at {mustard:?}")
    })?;
    ensure(s.total_ticks <= setup.scenario.max_ticks, || "tick budget exceeded".into())?;
    within(elapsed, Duration::from_secs(2))?;
    let (a, b) = (first.log.to_jsonl(), second.log.to_jsonl());
    ensure(a == b, || "logs differ between runs".into())?;
    Ok(format!(
        "mug -> livingroom/table, mustard_bottle -> kitchen/counter in {} ticks, {elapsed:?}, {} identical log bytes",
        s.total_ticks,
        a.len()
    ))
}

fn drawer_episode() -> Check {
    let setup = EpisodeSetup::bundled("drawer").map_err(|e| e.to_string())?;
    let result = tidy_core::episode::run_setup(&setup).map_err(|e| e.to_string())?;
    let done: Vec<&str> = result
        .log
        .events
        .iter()
        .filter(|e| e.status == Some(TickStatus::Success))
        .filter_map(|e| e.behavior.as_deref())
        .collect();
    let want = [APPROACH_DRAWER, SET_DOWN_TEMPORARY, OPEN_DRAWER, RE_PICK_OBJECT, PLACE_INSIDE];
    let mut it = done.iter();
    ensure(want.iter().all(|w| it.any(|d| d == w)), || format!("leaf order {done:?}"))?;
    let cube = result.world.objects.iter().find(|o| o.class.as_str() == "rubiks_cube").unwrap();
    ensure(matches!(cube.location, Containment::Inside(_)), || format!("cube ended {:?}", cube.location))?;

    // Placing inside the closed drawer without opening it.
    let mut sim = setup.scenario.build_sim(setup.map.clone()).map_err(|e| e.to_string())?;
    let drawer = sim
        .state
        .find_receptacle(&RoomId::new("livingroom"), ReceptacleClass::Drawer)
        .unwrap()
        .clone();
    sim.state.objects[0].location = Containment::Held;
    sim.state.robot.held = Some(0);
    sim.state.robot.pose = tidy_core::geometry::GridPose::at(drawer.position.offset(0, 1));
    let before = sim.state.clone();
    let outcome = sim.place(drawer.id, PlaceMode::Inside).map_err(|e| e.to_string())?;
    ensure(outcome == ActionOutcome::Failed(FailReason::ContainerClosed), || format!("got {outcome:?}"))?;
    ensure(sim.state == before, || "failed place changed the world".into())?;
    Ok(format!("{} in order; closed-drawer place -> ContainerClosed", want.join(" -> ")))
}

fn user_divergence() -> Check {
    let mut got = Vec::new();
    for name in ["divergence_u1", "divergence_u2"] {
        let setup = EpisodeSetup::bundled(name).map_err(|e| e.to_string())?;
        let r = tidy_core::episode::run_setup(&setup).map_err(|e| e.to_string())?;
        got.push(final_receptacle(&r.world, "mug"));
    }
    let want = [
        Some((RoomId::new("kitchen"), ReceptacleClass::Counter)),
        Some((RoomId::new("livingroom"), ReceptacleClass::Table)),
    ];
    ensure(got == want, || format!("mug ended at {got:?}"))?;
    Ok("U1 mug -> kitchen/counter, U2 mug -> livingroom/table".into())
}

fn place_attempts(log: &tidy_core::episode::EpisodeLog) -> Vec<TickStatus> {
    log.events
        .iter()
        .filter(|e| e.is_completed_leaf(PLACE))
        .filter_map(|e| e.status)
        .collect()
}

fn retry_behavior() -> Check {
    let first = EpisodeSetup::bundled("retry_first").map_err(|e| e.to_string())?;
    let r = tidy_core::episode::run_setup(&first).map_err(|e| e.to_string())?;
    let attempts = place_attempts(&r.log);
    ensure(attempts == [TickStatus::Failure, TickStatus::Success], || format!("first-only: {attempts:?}"))?;
    ensure(r.log.summary.successes == 1 && r.log.summary.failures == 0, || {
        format!("first-only summary {:?}", r.log.summary)
    })?;

    let all = EpisodeSetup::bundled("retry_all").map_err(|e| e.to_string())?;
    let r = tidy_core::episode::run_setup(&all).map_err(|e| e.to_string())?;
    let attempts = place_attempts(&r.log);
    let spec = &all.scenario.objects[0];
    let candidates = all
        .preferences
        .placement_candidates(&all.scenario.user, &spec.class, all.scenario.room_choice)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|c| !(c.room == spec.room && c.receptacle_class == spec.receptacle))
        .count();
    ensure(attempts.iter().all(|s| *s == TickStatus::Failure), || "an attempt succeeded".into())?;
    ensure(attempts.len() == candidates, || format!("{} attempts for {candidates} candidates", attempts.len()))?;
    ensure(r.log.summary.failures == 1, || format!("all-fail summary {:?}", r.log.summary))?;
    Ok(format!("first-only: 2 attempts then Success; all-fail: root Failure after {candidates}/{candidates} attempts"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("gradient correctness", gradient_correctness),
        ("low-rank recovery", low_rank_recovery),
        ("ranking oracle", ranking_oracle),
        ("reference ratings fidelity", reference_ratings_fidelity),
        ("planner optimality", planner_optimality),
        ("behavior tree semantics", bt_semantics),
        ("long-horizon episode", long_horizon_episode),
        ("drawer episode", drawer_episode),
        ("user divergence", user_divergence),
        ("retry behavior", retry_behavior),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
