//! Traversal costs derived from the occupancy grid.

use std::collections::VecDeque;

use crate::geometry::Cell;
use crate::semantic_map::{CellState, SemanticMap};

/// Cost of an untraversable cell.
pub const LETHAL: f64 = f64::INFINITY;
/// Cost of an unobstructed cell.
pub const BASE_COST: f64 = 1.0;
/// Cost just outside the lethal band; decays linearly to [`BASE_COST`].
pub const PEAK_COST: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Costmap {
    width: usize,
    height: usize,
    resolution: f64,
    cost: Vec<f64>,
}

impl Costmap {
    /// A map with every cell at `cost`.
    pub fn uniform(width: usize, height: usize, cost: f64) -> Self {
        Costmap {
            width,
            height,
            resolution: 1.0,
            cost: vec![cost; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as usize) < self.width && (c.y as usize) < self.height
    }

    fn idx(&self, c: Cell) -> usize {
        c.y as usize * self.width + c.x as usize
    }

    /// Out-of-bounds cells are lethal.
    pub fn cost(&self, c: Cell) -> f64 {
        if self.in_bounds(c) {
            self.cost[self.idx(c)]
        } else {
            LETHAL
        }
    }

    pub fn is_lethal(&self, c: Cell) -> bool {
        self.cost(c).is_infinite()
    }

    pub fn set_cost(&mut self, c: Cell, cost: f64) {
        if self.in_bounds(c) {
            let i = self.idx(c);
            self.cost[i] = cost;
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Cell::new(x as i32, y as i32)))
    }
}

/// Builds a costmap from `map`.
///
/// With `d` the chessboard distance to the nearest occupied or unknown cell:
/// cells with `d ≤ radius` are lethal; for `radius < d ≤ 2·radius + 1` the
/// cost falls linearly from [`PEAK_COST`] to [`BASE_COST`]; everything else
/// costs [`BASE_COST`].
pub fn inflate(map: &SemanticMap, radius_cells: u32) -> Costmap {
    let (w, h) = (map.width(), map.height());
    let mut dist = vec![u32::MAX; w * h];
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let c = Cell::new(x as i32, y as i32);
            if map.cell(c) != CellState::Free {
                dist[y * w + x] = 0;
                queue.push_back(c);
            }
        }
    }
    while let Some(c) = queue.pop_front() {
        let d = dist[c.y as usize * w + c.x as usize];
        for dy in -1..=1 {
            for dx in -1..=1 {
                let n = c.offset(dx, dy);
                if n.x < 0 || n.y < 0 || n.x as usize >= w || n.y as usize >= h {
                    continue;
                }
                let i = n.y as usize * w + n.x as usize;
                if dist[i] == u32::MAX {
                    dist[i] = d + 1;
                    queue.push_back(n);
                }
            }
        }
    }
    let r = radius_cells;
    let cost = dist
        .into_iter()
        .map(|d| {
            if d <= r {
                LETHAL
            } else if r > 0 && d <= 2 * r + 1 {
                BASE_COST + (PEAK_COST - BASE_COST) * f64::from(2 * r + 1 - d) / f64::from(r)
            } else {
                BASE_COST
            }
        })
        .collect();
    Costmap {
        width: w,
        height: h,
        resolution: map.resolution(),
        cost,
    }
}
