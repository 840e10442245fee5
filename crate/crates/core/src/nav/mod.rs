//! Two-stage navigation: global point-goal planning over an inflated
//! costmap, and a carrot approach for goals inside obstacles.
//!
//! Executing a path against the simulated robot lives in
//! [`crate::sim::Sim::path_follow`].

pub mod carrot;
pub mod costmap;
pub mod planner;

use thiserror::Error;

use crate::geometry::Cell;

pub use carrot::{approach_plan, bresenham, carrot_plan, carrot_plan_with, carrot_point, distance_field};
pub use costmap::{inflate, Costmap, BASE_COST, LETHAL, PEAK_COST};
pub use planner::{path_cost, plan_point_goal, plan_with, step_cost, Connectivity, Path};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NavError {
    #[error("start {0} is not traversable")]
    StartUntraversable(Cell),
    #[error("goal {0} is not traversable")]
    GoalUntraversable(Cell),
    #[error("no path from {from} to {to}")]
    NoPathExists { from: Cell, to: Cell },
    #[error("no reachable cell within {radius} of {goal}")]
    NoApproachExists { goal: Cell, radius: f64 },
}
