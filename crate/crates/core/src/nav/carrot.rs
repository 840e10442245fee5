//! Approaching goals that may themselves be untraversable.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::costmap::Costmap;
use super::planner::{plan_point_goal, step_cost, Connectivity, Path};
use super::NavError;
use crate::geometry::Cell;

pub const DEFAULT_FALLBACK_RADIUS: f64 = 3.0;

/// Cells on the discrete segment from `a` to `b`, both ends included.
pub fn bresenham(a: Cell, b: Cell) -> Vec<Cell> {
    let (dx, dy) = ((b.x - a.x).abs(), -(b.y - a.y).abs());
    let (sx, sy) = ((b.x - a.x).signum(), (b.y - a.y).signum());
    let mut err = dx + dy;
    let mut c = a;
    let mut out = vec![c];
    while c != b {
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            c.x += sx;
        }
        if e2 <= dx {
            err += dx;
            c.y += sy;
        }
        out.push(c);
    }
    out
}

/// Last traversable cell on the segment before the first lethal one, or
/// the goal if the whole segment is clear.
pub fn carrot_point(costmap: &Costmap, start: Cell, goal: Cell) -> Cell {
    let mut last = start;
    for c in bresenham(start, goal).into_iter().skip(1) {
        if costmap.is_lethal(c) {
            break;
        }
        last = c;
    }
    last
}

/// Walks toward `goal` along the straight segment and plans to the carrot
/// point. If the segment is blocked right away, or the carrot cannot be
/// reached, approaches the closest reachable cell within
/// [`DEFAULT_FALLBACK_RADIUS`] of the goal instead.
pub fn carrot_plan(costmap: &Costmap, start: Cell, goal: Cell) -> Result<Path, NavError> {
    carrot_plan_with(costmap, start, goal, DEFAULT_FALLBACK_RADIUS)
}

pub fn carrot_plan_with(costmap: &Costmap, start: Cell, goal: Cell, radius: f64) -> Result<Path, NavError> {
    if costmap.is_lethal(start) {
        return Err(NavError::StartUntraversable(start));
    }
    if start == goal {
        return Ok(Path::default());
    }
    let carrot = carrot_point(costmap, start, goal);
    if carrot != start {
        if let Ok(p) = plan_point_goal(costmap, start, carrot) {
            return Ok(p);
        }
    }
    approach_plan(costmap, start, goal, radius)
}

/// Plans to the traversable cell nearest `goal` (Euclidean) within
/// `radius` that is reachable from `start`. Ties go to the cheaper path,
/// then to row-major order.
pub fn approach_plan(costmap: &Costmap, start: Cell, goal: Cell, radius: f64) -> Result<Path, NavError> {
    if costmap.is_lethal(start) {
        return Err(NavError::StartUntraversable(start));
    }
    let dist = distance_field(costmap, start);
    let w = costmap.width();
    let mut best: Option<(f64, f64, Cell)> = None;
    for c in costmap.cells() {
        let g = dist[c.y as usize * w + c.x as usize];
        let d = c.distance(goal);
        if !g.is_finite() || d > radius + 1e-9 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bd, bg, bc)) => d
                .total_cmp(&bd)
                .then(g.total_cmp(&bg))
                .then((c.y, c.x).cmp(&(bc.y, bc.x)))
                .is_lt(),
        };
        if better {
            best = Some((d, g, c));
        }
    }
    match best {
        Some((_, _, target)) => plan_point_goal(costmap, start, target),
        None => Err(NavError::NoApproachExists { goal, radius }),
    }
}

struct Entry(f64, usize);

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Single-source path costs from `start` (infinite where unreachable).
pub fn distance_field(costmap: &Costmap, start: Cell) -> Vec<f64> {
    let w = costmap.width();
    let mut dist = vec![f64::INFINITY; w * costmap.height()];
    if costmap.is_lethal(start) {
        return dist;
    }
    let si = start.y as usize * w + start.x as usize;
    dist[si] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, si)]);
    while let Some(Entry(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        let here = Cell::new((i % w) as i32, (i / w) as i32);
        for &(dx, dy) in Connectivity::Eight.moves() {
            let next = here.offset(dx, dy);
            if let Some(s) = step_cost(costmap, here, next) {
                let j = next.y as usize * w + next.x as usize;
                if d + s < dist[j] {
                    dist[j] = d + s;
                    heap.push(Entry(d + s, j));
                }
            }
        }
    }
    dist
}
