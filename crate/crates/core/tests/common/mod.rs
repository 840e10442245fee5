//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tidy_core::bt::{BehaviorHost, Blackboard, BtError, Node, NodeKind, TickStatus};
use tidy_core::geometry::Cell;
use tidy_core::nav::{Costmap, LETHAL};
use tidy_core::preference::{loss, FactorModel, PlacementItem, RatingEntry, RatingsCorpus, Vocab};
use tidy_core::vocab::{ObjectClass, ReceptacleClass, RoomId, UserId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- preference

/// `n` distinct items spread over objects `o0, o1, …`, each object having
/// up to 30 (room, receptacle) placements.
pub fn items(n: usize, per_object: usize) -> Vocab<PlacementItem> {
    let per_object = per_object.clamp(1, 30);
    Vocab::from_values((0..n).map(|i| {
        let j = i % per_object;
        PlacementItem::new(
            ObjectClass::new(format!("o{}", i / per_object)),
            RoomId::new(format!("r{}", j / 6)),
            ReceptacleClass::ALL[j % 6],
        )
    }))
}

pub fn users(n: usize) -> Vocab<UserId> {
    Vocab::from_values((0..n).map(|u| UserId::new(format!("u{u}"))))
}

/// A model with uniform random factors and a random sparse corpus over the
/// same vocabulary.
pub fn random_problem(
    rng: &mut ChaCha8Rng,
    n_users: usize,
    n_items: usize,
    dim: usize,
    lambda: f64,
) -> (FactorModel, RatingsCorpus) {
    let (uv, iv) = (users(n_users), items(n_items, 12));
    let mut model = FactorModel::zeros(uv.clone(), iv.clone(), dim, lambda).unwrap();
    for x in model.user_factors_mut() {
        *x = rng.random_range(-1.0..1.0);
    }
    for x in model.item_factors_mut() {
        *x = rng.random_range(-1.0..1.0);
    }
    let mut entries = Vec::new();
    for u in 0..n_users {
        for i in 0..n_items {
            if rng.random_bool(0.3) {
                entries.push(RatingEntry {
                    user: u,
                    item: i,
                    rating: rng.random_range(0.0..1.0),
                    weight: rng.random_range(0.5..2.0),
                });
            }
        }
    }
    if entries.is_empty() {
        entries.push(RatingEntry {
            user: 0,
            item: 0,
            rating: 0.5,
            weight: 1.0,
        });
    }
    let corpus = RatingsCorpus::from_parts(uv, iv, entries, (0.0, 1.0)).unwrap();
    (model, corpus)
}

/// Central finite differences of the loss for every parameter, user
/// factors first.
pub fn numeric_gradient(model: &FactorModel, corpus: &RatingsCorpus, h: f64) -> Vec<f64> {
    fn param(m: &mut FactorModel, p: usize) -> &mut f64 {
        let nu = m.user_factors().len();
        if p < nu {
            &mut m.user_factors_mut()[p]
        } else {
            &mut m.item_factors_mut()[p - nu]
        }
    }
    let mut m = model.clone();
    let n = m.user_factors().len() + m.item_factors().len();
    (0..n)
        .map(|p| {
            let orig = *param(&mut m, p);
            *param(&mut m, p) = orig + h;
            let up = loss(&m, corpus).unwrap();
            *param(&mut m, p) = orig - h;
            let down = loss(&m, corpus).unwrap();
            *param(&mut m, p) = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Largest relative error between two gradients, with an absolute floor so
/// entries that are both near zero do not blow up.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
        .fold(0.0, f64::max)
}

/// Every placement index of `object` sorted best first by a full sort.
pub fn brute_force_ranking(model: &FactorModel, user: usize, object: &str) -> Vec<usize> {
    let mut ids: Vec<(f64, usize)> = model
        .items()
        .values()
        .iter()
        .enumerate()
        .filter(|(_, it)| it.object_class.as_str() == object)
        .map(|(i, _)| {
            let s: f64 = model
                .user_vector(user)
                .iter()
                .zip(model.item_vector(i))
                .map(|(a, b)| a * b)
                .sum();
            (s, i)
        })
        .collect();
    ids.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    ids.into_iter().map(|(_, i)| i).collect()
}

/// Rank-`rank` ratings `r = a_u · b_i` rescaled into [0, 1], with a random
/// train/held-out split. Returns (train, held-out).
pub fn low_rank_split(
    seed: u64,
    n_users: usize,
    n_items: usize,
    rank: usize,
    observed: f64,
) -> (RatingsCorpus, RatingsCorpus) {
    let mut rng = rng(seed);
    let a: Vec<Vec<f64>> = (0..n_users)
        .map(|_| (0..rank).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let b: Vec<Vec<f64>> = (0..n_items)
        .map(|_| (0..rank).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let raw = |u: usize, i: usize| a[u].iter().zip(&b[i]).map(|(x, y)| x * y).sum::<f64>() / rank as f64;
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for u in 0..n_users {
        for i in 0..n_items {
            let e = RatingEntry {
                user: u,
                item: i,
                rating: raw(u, i),
                weight: 1.0,
            };
            if rng.random_bool(observed) {
                train.push(e);
            } else {
                test.push(e);
            }
        }
    }
    let (uv, iv) = (users(n_users), items(n_items, 30));
    (
        RatingsCorpus::from_parts(uv.clone(), iv.clone(), train, (0.0, 1.0)).unwrap(),
        RatingsCorpus::from_parts(uv, iv, test, (0.0, 1.0)).unwrap(),
    )
}

// ---------------------------------------------------------------------- nav

/// `w × h` costmap with roughly `density` lethal cells and random traversal
/// costs in [1, 10] elsewhere.
pub fn random_costmap(seed: u64, w: usize, h: usize, density: f64, varied: bool) -> Costmap {
    let mut rng = rng(seed);
    let mut cm = Costmap::uniform(w, h, 1.0);
    for y in 0..h as i32 {
        for x in 0..w as i32 {
            let c = Cell::new(x, y);
            if rng.random_bool(density) {
                cm.set_cost(c, LETHAL);
            } else if varied {
                cm.set_cost(c, f64::from(rng.random_range(1..=10u8)));
            }
        }
    }
    cm
}

pub fn random_free_cell(rng: &mut ChaCha8Rng, cm: &Costmap) -> Cell {
    loop {
        let c = Cell::new(
            rng.random_range(0..cm.width() as i32),
            rng.random_range(0..cm.height() as i32),
        );
        if !cm.is_lethal(c) {
            return c;
        }
    }
}

/// Cost of moving between 8-neighbours: the entered cell's cost, times √2
/// on diagonals; diagonals may not squeeze past a lethal orthogonal cell.
fn oracle_step(cm: &Costmap, a: Cell, b: Cell) -> Option<f64> {
    let lethal = |c: Cell| !cm.in_bounds(c) || cm.cost(c).is_infinite();
    if lethal(b) {
        return None;
    }
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    if dx != 0 && dy != 0 {
        if lethal(Cell::new(a.x + dx, a.y)) || lethal(Cell::new(a.x, a.y + dy)) {
            return None;
        }
        return Some(cm.cost(b) * 2f64.sqrt());
    }
    Some(cm.cost(b))
}

/// Quadratic-time Dijkstra without a heap. `None` when unreachable.
pub fn dijkstra_oracle(cm: &Costmap, start: Cell, goal: Cell, diagonal: bool) -> Option<f64> {
    let (w, h) = (cm.width(), cm.height());
    let idx = |c: Cell| c.y as usize * w + c.x as usize;
    let mut dist = vec![f64::INFINITY; w * h];
    let mut done = vec![false; w * h];
    dist[idx(start)] = 0.0;
    loop {
        let mut best = None;
        for i in 0..w * h {
            if !done[i] && dist[i].is_finite() && best.is_none_or(|b: usize| dist[i] < dist[b]) {
                best = Some(i);
            }
        }
        let i = best?;
        let here = Cell::new((i % w) as i32, (i / w) as i32);
        if here == goal {
            return Some(dist[i]);
        }
        done[i] = true;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if (dx == 0 && dy == 0) || (!diagonal && dx != 0 && dy != 0) {
                    continue;
                }
                let next = Cell::new(here.x + dx, here.y + dy);
                if !cm.in_bounds(next) {
                    continue;
                }
                if let Some(s) = oracle_step(cm, here, next) {
                    let j = idx(next);
                    if dist[i] + s < dist[j] {
                        dist[j] = dist[i] + s;
                    }
                }
            }
        }
    }
}

// ----------------------------------------------------------------------- bt

/// Leaves that replay a scripted status list (cycling) and record every
/// invocation.
#[derive(Default)]
pub struct ScriptedHost {
    pub scripts: BTreeMap<String, Vec<TickStatus>>,
    pub cursor: BTreeMap<String, usize>,
    pub calls: Vec<String>,
}

impl ScriptedHost {
    pub fn new(scripts: BTreeMap<String, Vec<TickStatus>>) -> Self {
        ScriptedHost {
            scripts,
            ..Default::default()
        }
    }

    fn next(&mut self, name: &str) -> TickStatus {
        let script = &self.scripts[name];
        let c = self.cursor.entry(name.to_string()).or_insert(0);
        let s = script[*c % script.len()];
        *c += 1;
        self.calls.push(name.to_string());
        s
    }
}

impl BehaviorHost for ScriptedHost {
    fn has_behavior(&self, name: &str) -> bool {
        self.scripts.contains_key(name)
    }

    fn action(&mut self, name: &str, _bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        Ok(self.next(name))
    }

    fn condition(&mut self, name: &str, _bb: &Blackboard) -> Result<bool, BtError> {
        Ok(self.next(name) == TickStatus::Success)
    }
}

/// Random tree over Sequence, Fallback, Retry and Inverter with action
/// leaves `a0..a{leaves}`.
pub fn random_tree(rng: &mut ChaCha8Rng, depth: u32, leaves: usize) -> Node {
    if depth == 0 || rng.random_bool(0.3) {
        return Node::action(&format!("a{}", rng.random_range(0..leaves)));
    }
    match rng.random_range(0..4) {
        0 | 1 => {
            let n = rng.random_range(1..=4);
            let kids = (0..n).map(|_| random_tree(rng, depth - 1, leaves)).collect();
            if rng.random_bool(0.5) {
                Node::sequence(kids)
            } else {
                Node::fallback(kids)
            }
        }
        2 => Node::retry(rng.random_range(1..=3), random_tree(rng, depth - 1, leaves)),
        _ => Node::inverter(random_tree(rng, depth - 1, leaves)),
    }
}

pub fn random_scripts(rng: &mut ChaCha8Rng, leaves: usize) -> BTreeMap<String, Vec<TickStatus>> {
    (0..leaves)
        .map(|i| {
            let len = rng.random_range(1..=5);
            let s = (0..len)
                .map(|_| match rng.random_range(0..10) {
                    0..=3 => TickStatus::Success,
                    4..=7 => TickStatus::Failure,
                    _ => TickStatus::Running,
                })
                .collect();
            (format!("a{i}"), s)
        })
        .collect()
}

/// Straightforward re-statement of the tick semantics, kept separate from
/// the library: control nodes resume at the child that was running, Retry
/// re-ticks a failed child immediately until its budget is spent.
pub struct RefTree {
    kind: NodeKind,
    children: Vec<RefTree>,
    index: usize,
    attempts: u32,
}

impl RefTree {
    pub fn from_node(n: &Node) -> RefTree {
        RefTree {
            kind: n.kind().clone(),
            children: n.children().iter().map(RefTree::from_node).collect(),
            index: 0,
            attempts: 0,
        }
    }

    pub fn tick(&mut self, host: &mut ScriptedHost) -> TickStatus {
        use TickStatus::*;
        match self.kind.clone() {
            NodeKind::Action(name) => host.next(&name),
            NodeKind::Sequence | NodeKind::Fallback => {
                let seq = self.kind == NodeKind::Sequence;
                let (cont, stop) = if seq { (Success, Failure) } else { (Failure, Success) };
                for i in self.index..self.children.len() {
                    let s = self.children[i].tick(host);
                    if s == Running {
                        self.index = i;
                        return Running;
                    }
                    if s != cont {
                        self.index = 0;
                        return stop;
                    }
                }
                self.index = 0;
                cont
            }
            NodeKind::Inverter => match self.children[0].tick(host) {
                Success => Failure,
                Failure => Success,
                Running => Running,
            },
            NodeKind::Retry(n) => loop {
                match self.children[0].tick(host) {
                    Running => return Running,
                    Success => {
                        self.attempts = 0;
                        return Success;
                    }
                    Failure => {
                        self.attempts += 1;
                        if self.attempts >= n {
                            self.attempts = 0;
                            return Failure;
                        }
                    }
                }
            },
            other => panic!("reference interpreter does not model {other:?}"),
        }
    }
}
