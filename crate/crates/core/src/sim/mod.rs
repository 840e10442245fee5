//! Discrete-time apartment simulator: truth state, a range-limited
//! detector, and precondition-checked manipulation primitives.
//!
//! Every primitive is transactional: a `Failed` outcome leaves the world
//! exactly as it was. Randomness (detector dropout, injected faults) comes
//! from one seeded stream and is only drawn when the relevant probability
//! is positive.

pub mod scenario;
pub mod world;

use thiserror::Error;

pub use scenario::{parse_scenario, ObjectSpec, PreferenceSource, Scenario, ScenarioError, DEFAULT_MAX_TICKS};
pub use world::{
    ActionOutcome, Containment, DetectorConfig, Detection, FailReason, FaultConfig, NavOutcome, ObjectId,
    ObjectInstance, PlaceMode, Receptacle, ReceptacleId, RobotState, Sim, StepEvent, WorldState,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("unknown object id {0}")]
    UnknownObject(usize),
    #[error("unknown receptacle id {0}")]
    UnknownReceptacle(usize),
    #[error("no temporary location in the current room")]
    NoTempLocation,
}
