//! A* point-goal planning over a [`Costmap`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::costmap::Costmap;
use super::NavError;
use crate::geometry::{Cell, GridPose, Heading};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

/// Expansion order. Orthogonal moves first, then diagonals.
const NEIGHBORS: [(i32, i32); 8] = [(1, 0), (0, -1), (-1, 0), (0, 1), (1, -1), (-1, -1), (-1, 1), (1, 1)];

impl Connectivity {
    pub fn moves(self) -> &'static [(i32, i32)] {
        match self {
            Connectivity::Four => &NEIGHBORS[..4],
            Connectivity::Eight => &NEIGHBORS[..],
        }
    }
}

/// Cells visited after the start, in order. Empty when start == goal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Path {
    pub cells: Vec<Cell>,
    pub total_cost: f64,
}

impl Path {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn end(&self) -> Option<Cell> {
        self.cells.last().copied()
    }

    /// Poses along the path, each facing the direction of the step into it.
    pub fn poses(&self, start: Cell) -> Vec<GridPose> {
        let mut prev = start;
        self.cells
            .iter()
            .map(|&c| {
                let heading = Heading::of_step(prev, c).unwrap_or_default();
                prev = c;
                GridPose::new(c.x, c.y, heading)
            })
            .collect()
    }
}

/// Cost of stepping from `from` into `to`, or `None` if the move is not
/// allowed. Diagonal moves cost √2 times the entered cell and may not cut
/// the corner of a lethal cell.
pub fn step_cost(costmap: &Costmap, from: Cell, to: Cell) -> Option<f64> {
    let c = costmap.cost(to);
    if c.is_infinite() {
        return None;
    }
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    if dx != 0 && dy != 0 {
        if costmap.is_lethal(from.offset(dx, 0)) || costmap.is_lethal(from.offset(0, dy)) {
            return None;
        }
        Some(c * std::f64::consts::SQRT_2)
    } else {
        Some(c)
    }
}

fn heuristic(a: Cell, b: Cell, conn: Connectivity) -> f64 {
    let dx = f64::from((a.x - b.x).abs());
    let dy = f64::from((a.y - b.y).abs());
    match conn {
        Connectivity::Four => dx + dy,
        Connectivity::Eight => {
            let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
            hi + (std::f64::consts::SQRT_2 - 1.0) * lo
        }
    }
}

struct Open {
    f: f64,
    seq: u64,
    idx: usize,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    // Min-heap on (f, seq).
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then(other.seq.cmp(&self.seq))
    }
}

/// 8-connected minimum-cost path.
pub fn plan_point_goal(costmap: &Costmap, start: Cell, goal: Cell) -> Result<Path, NavError> {
    plan_with(costmap, start, goal, Connectivity::Eight)
}

pub fn plan_with(costmap: &Costmap, start: Cell, goal: Cell, conn: Connectivity) -> Result<Path, NavError> {
    if costmap.is_lethal(start) {
        return Err(NavError::StartUntraversable(start));
    }
    if costmap.is_lethal(goal) {
        return Err(NavError::GoalUntraversable(goal));
    }
    if start == goal {
        return Ok(Path::default());
    }
    let w = costmap.width();
    let idx = |c: Cell| c.y as usize * w + c.x as usize;
    let cell = |i: usize| Cell::new((i % w) as i32, (i / w) as i32);
    let n = w * costmap.height();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;

    g[idx(start)] = 0.0;
    heap.push(Open {
        f: heuristic(start, goal, conn),
        seq,
        idx: idx(start),
    });
    while let Some(Open { idx: i, .. }) = heap.pop() {
        if closed[i] {
            continue;
        }
        closed[i] = true;
        let here = cell(i);
        if here == goal {
            let mut cells = Vec::new();
            let mut j = i;
            while j != idx(start) {
                cells.push(cell(j));
                j = parent[j];
            }
            cells.reverse();
            return Ok(Path {
                cells,
                total_cost: g[i],
            });
        }
        for &(dx, dy) in conn.moves() {
            let next = here.offset(dx, dy);
            let Some(step) = step_cost(costmap, here, next) else {
                continue;
            };
            let j = idx(next);
            let cand = g[i] + step;
            if !closed[j] && cand < g[j] {
                g[j] = cand;
                parent[j] = i;
                seq += 1;
                heap.push(Open {
                    f: cand + heuristic(next, goal, conn),
                    seq,
                    idx: j,
                });
            }
        }
    }
    Err(NavError::NoPathExists { from: start, to: goal })
}

/// Sum of step costs along `path` from `start`, or `None` if any step is
/// not a legal move.
pub fn path_cost(costmap: &Costmap, start: Cell, path: &[Cell]) -> Option<f64> {
    let mut prev = start;
    let mut total = 0.0;
    for &c in path {
        if !prev.is_adjacent8(c) {
            return None;
        }
        total += step_cost(costmap, prev, c)?;
        prev = c;
    }
    Some(total)
}
