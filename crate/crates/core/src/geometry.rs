//! Grid coordinates and headings shared by the map, planners and simulator.
//!
//! The grid uses screen orientation: `x` grows to the east (right), `y` grows
//! to the south (down), so row 0 of a map file is the northern edge.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A cell coordinate. Signed so that out-of-bounds observations can be
/// represented and rejected explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Cell {
        Cell::new(self.x + dx, self.y + dy)
    }

    /// Euclidean distance between cell centers.
    pub fn distance(self, other: Cell) -> f64 {
        let dx = f64::from(self.x - other.x);
        let dy = f64::from(self.y - other.y);
        dx.hypot(dy)
    }

    /// Chessboard distance; reach and inflation are measured with it.
    pub fn chebyshev(self, other: Cell) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn is_adjacent8(self, other: Cell) -> bool {
        self != other && self.chebyshev(other) == 1
    }

    pub fn is_adjacent4(self, other: Cell) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl FromStr for Cell {
    type Err = String;

    /// Parses `X,Y`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
        let x = x.trim().parse().map_err(|_| format!("bad x coordinate in {s:?}"))?;
        let y = y.trim().parse().map_err(|_| format!("bad y coordinate in {s:?}"))?;
        Ok(Cell::new(x, y))
    }
}

/// One of the eight compass directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Heading {
    #[default]
    E,
    NE,
    N,
    NW,
    W,
    SW,
    S,
    SE,
}

impl Heading {
    pub const ALL: [Heading; 8] = [
        Heading::E,
        Heading::NE,
        Heading::N,
        Heading::NW,
        Heading::W,
        Heading::SW,
        Heading::S,
        Heading::SE,
    ];

    /// Unit cell step in this direction.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Heading::E => (1, 0),
            Heading::NE => (1, -1),
            Heading::N => (0, -1),
            Heading::NW => (-1, -1),
            Heading::W => (-1, 0),
            Heading::SW => (-1, 1),
            Heading::S => (0, 1),
            Heading::SE => (1, 1),
        }
    }

    /// Angle in degrees, counter-clockwise from east.
    pub fn degrees(self) -> f64 {
        match self {
            Heading::E => 0.0,
            Heading::NE => 45.0,
            Heading::N => 90.0,
            Heading::NW => 135.0,
            Heading::W => 180.0,
            Heading::SW => 225.0,
            Heading::S => 270.0,
            Heading::SE => 315.0,
        }
    }

    /// Direction of a single step, if `from` and `to` are 8-adjacent.
    pub fn of_step(from: Cell, to: Cell) -> Option<Heading> {
        let d = (to.x - from.x, to.y - from.y);
        Heading::ALL.into_iter().find(|h| h.delta() == d)
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Heading {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Heading::ALL
            .into_iter()
            .find(|h| h.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown heading {s:?}"))
    }
}

/// A cell plus the direction the robot faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPose {
    pub x: i32,
    pub y: i32,
    pub heading: Heading,
}

impl GridPose {
    pub fn new(x: i32, y: i32, heading: Heading) -> Self {
        GridPose { x, y, heading }
    }

    pub fn at(cell: Cell) -> Self {
        GridPose::new(cell.x, cell.y, Heading::default())
    }

    pub fn cell(&self) -> Cell {
        Cell::new(self.x, self.y)
    }
}

impl fmt::Display for GridPose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.heading)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heading_of_step_matches_delta() {
        let origin = Cell::new(3, 3);
        for h in Heading::ALL {
            let (dx, dy) = h.delta();
            assert_eq!(Heading::of_step(origin, origin.offset(dx, dy)), Some(h));
        }
        assert_eq!(Heading::of_step(origin, origin.offset(2, 0)), None);
    }

    #[test]
    fn cell_parsing() {
        assert_eq!("4, 5".parse::<Cell>().unwrap(), Cell::new(4, 5));
        assert!("4".parse::<Cell>().is_err());
        assert!("a,1".parse::<Cell>().is_err());
    }
}
