//! World state and the primitives that change it.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::{Cell, GridPose, Heading};
use crate::nav::{approach_plan, carrot_plan, inflate, Costmap, Path};
use crate::semantic_map::{CellState, ReceptacleObservation, SemanticMap};
use crate::vocab::{ObjectClass, ReceptacleClass, RoomId};

pub type ObjectId = usize;
pub type ReceptacleId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Receptacle {
    pub id: ReceptacleId,
    pub class: ReceptacleClass,
    pub room: RoomId,
    pub position: Cell,
    pub openable: bool,
    pub open: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceMode {
    On,
    Inside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Containment {
    On(ReceptacleId),
    Inside(ReceptacleId),
    Held,
    /// Fell out of the gripper onto the floor.
    Dropped(Cell),
}

impl Containment {
    pub fn receptacle(self) -> Option<ReceptacleId> {
        match self {
            Containment::On(r) | Containment::Inside(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: ObjectId,
    pub class: ObjectClass,
    pub location: Containment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Euclidean range in cells.
    pub range: f64,
    /// Field of view in degrees, centred on the robot heading.
    pub fov_deg: f64,
    /// Per-detection dropout probability.
    pub p_miss: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            range: 8.0,
            fov_deg: 360.0,
            p_miss: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FaultConfig {
    pub pickup_fail: f64,
    pub place_fail: f64,
    pub open_fail: f64,
    /// Per-step probability of dropping a held object while moving.
    pub drop: f64,
    /// The first N place attempts that pass their preconditions fail.
    pub place_fail_first: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub pose: GridPose,
    pub held: Option<ObjectId>,
    pub reach: i32,
    pub sensor: DetectorConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailReason {
    HandOccupied,
    NothingHeld,
    OutOfReach,
    ContainerClosed,
    NotOpenable,
    InjectedFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionOutcome {
    Succeeded,
    Failed(FailReason),
}

impl ActionOutcome {
    pub fn is_success(self) -> bool {
        self == ActionOutcome::Succeeded
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Detection {
    Object {
        id: ObjectId,
        class: ObjectClass,
        position: Cell,
        room: Option<RoomId>,
        receptacle: Option<ReceptacleId>,
        receptacle_class: Option<ReceptacleClass>,
    },
    Receptacle {
        id: ReceptacleId,
        class: ReceptacleClass,
        position: Cell,
        openable: bool,
    },
}

/// What a call to [`Sim::step`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepEvent {
    Idle,
    Moved(Cell),
    /// The next queued cell is no longer free; the queue was cleared.
    Blocked(Cell),
    /// The held object fell at the given cell.
    Dropped(ObjectId, Cell),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NavOutcome {
    Arrived,
    Blocked(Cell),
    Dropped(ObjectId),
}

/// The simulated truth plus the robot's own map.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    /// Ground-truth occupancy; receptacle cells are occupied.
    pub truth: SemanticMap,
    /// The robot's map: same grid, receptacles registered as seen.
    pub belief: SemanticMap,
    pub receptacles: Vec<Receptacle>,
    pub objects: Vec<ObjectInstance>,
    pub robot: RobotState,
    pub tick: u64,
    pub seed: u64,
    pub motion: VecDeque<Cell>,
}

impl WorldState {
    /// A world over `map`. Static receptacle records become the truth
    /// receptacles; the robot's map starts with an empty registry.
    pub fn new(map: SemanticMap, robot: GridPose, seed: u64) -> Self {
        let receptacles = map
            .receptacles()
            .iter()
            .enumerate()
            .map(|(id, r)| Receptacle {
                id,
                class: r.receptacle_class,
                room: r.room.clone(),
                position: r.position,
                openable: r.openable,
                open: false,
            })
            .collect();
        let mut belief = map.clone();
        belief.clear_receptacles();
        WorldState {
            truth: map,
            belief,
            receptacles,
            objects: Vec::new(),
            robot: RobotState {
                pose: robot,
                held: None,
                reach: 1,
                sensor: DetectorConfig::default(),
            },
            tick: 0,
            seed,
            motion: VecDeque::new(),
        }
    }

    pub fn add_object(&mut self, class: ObjectClass, location: Containment) -> ObjectId {
        let id = self.objects.len();
        self.objects.push(ObjectInstance { id, class, location });
        id
    }

    pub fn object(&self, id: ObjectId) -> Result<&ObjectInstance, SimError> {
        self.objects.get(id).ok_or(SimError::UnknownObject(id))
    }

    pub fn receptacle(&self, id: ReceptacleId) -> Result<&Receptacle, SimError> {
        self.receptacles.get(id).ok_or(SimError::UnknownReceptacle(id))
    }

    /// First receptacle of `class` in `room`, by id.
    pub fn find_receptacle(&self, room: &RoomId, class: ReceptacleClass) -> Option<&Receptacle> {
        self.receptacles.iter().find(|r| r.room == *room && r.class == class)
    }

    pub fn receptacle_at(&self, position: Cell) -> Option<&Receptacle> {
        self.receptacles.iter().find(|r| r.position == position)
    }

    /// Cell an object occupies; held objects travel with the robot.
    pub fn object_position(&self, id: ObjectId) -> Result<Cell, SimError> {
        Ok(match self.object(id)?.location {
            Containment::On(r) | Containment::Inside(r) => self.receptacle(r)?.position,
            Containment::Held => self.robot.pose.cell(),
            Containment::Dropped(c) => c,
        })
    }

    pub fn robot_cell(&self) -> Cell {
        self.robot.pose.cell()
    }

    pub fn robot_room(&self) -> Option<&RoomId> {
        self.truth.room_at(self.robot_cell())
    }

    pub fn in_reach(&self, c: Cell) -> bool {
        self.robot_cell().chebyshev(c) <= self.robot.reach
    }
}

/// The world plus its seeded random stream.
#[derive(Debug, Clone)]
pub struct Sim {
    pub state: WorldState,
    pub faults: FaultConfig,
    pub inflate_radius: u32,
    rng: ChaCha8Rng,
    place_attempts: u32,
}

impl Sim {
    pub fn new(state: WorldState, faults: FaultConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(state.seed);
        Sim {
            state,
            faults,
            inflate_radius: 0,
            rng,
            place_attempts: 0,
        }
    }

    fn draw(&mut self, p: f64) -> bool {
        p > 0.0 && self.rng.random_bool(p.min(1.0))
    }

    /// Costmap of the robot's current map.
    pub fn costmap(&self) -> Costmap {
        inflate(&self.state.belief, self.inflate_radius)
    }

    /// Number of place calls that reached the failure-injection stage.
    pub fn place_attempts(&self) -> u32 {
        self.place_attempts
    }

    pub fn pickup(&mut self, object: ObjectId) -> Result<ActionOutcome, SimError> {
        let obj = self.state.object(object)?;
        let loc = obj.location;
        if self.state.robot.held.is_some() {
            return Ok(ActionOutcome::Failed(FailReason::HandOccupied));
        }
        if let Containment::Inside(r) = loc {
            if !self.state.receptacle(r)?.open {
                return Ok(ActionOutcome::Failed(FailReason::ContainerClosed));
            }
        }
        if !self.state.in_reach(self.state.object_position(object)?) {
            return Ok(ActionOutcome::Failed(FailReason::OutOfReach));
        }
        if self.draw(self.faults.pickup_fail) {
            return Ok(ActionOutcome::Failed(FailReason::InjectedFailure));
        }
        self.state.objects[object].location = Containment::Held;
        self.state.robot.held = Some(object);
        Ok(ActionOutcome::Succeeded)
    }

    pub fn place(&mut self, receptacle: ReceptacleId, mode: PlaceMode) -> Result<ActionOutcome, SimError> {
        let rec = self.state.receptacle(receptacle)?;
        let Some(held) = self.state.robot.held else {
            return Ok(ActionOutcome::Failed(FailReason::NothingHeld));
        };
        if !self.state.in_reach(rec.position) {
            return Ok(ActionOutcome::Failed(FailReason::OutOfReach));
        }
        if mode == PlaceMode::Inside {
            if !rec.openable {
                return Ok(ActionOutcome::Failed(FailReason::NotOpenable));
            }
            if !rec.open {
                return Ok(ActionOutcome::Failed(FailReason::ContainerClosed));
            }
        }
        self.place_attempts += 1;
        if self.place_attempts <= self.faults.place_fail_first || self.draw(self.faults.place_fail) {
            return Ok(ActionOutcome::Failed(FailReason::InjectedFailure));
        }
        self.state.objects[held].location = match mode {
            PlaceMode::On => Containment::On(receptacle),
            PlaceMode::Inside => Containment::Inside(receptacle),
        };
        self.state.robot.held = None;
        Ok(ActionOutcome::Succeeded)
    }

    pub fn open_receptacle(&mut self, receptacle: ReceptacleId) -> Result<ActionOutcome, SimError> {
        let rec = self.state.receptacle(receptacle)?;
        if !rec.openable {
            return Ok(ActionOutcome::Failed(FailReason::NotOpenable));
        }
        if !self.state.in_reach(rec.position) {
            return Ok(ActionOutcome::Failed(FailReason::OutOfReach));
        }
        if self.state.robot.held.is_some() {
            return Ok(ActionOutcome::Failed(FailReason::HandOccupied));
        }
        if rec.open {
            return Ok(ActionOutcome::Succeeded);
        }
        if self.draw(self.faults.open_fail) {
            return Ok(ActionOutcome::Failed(FailReason::InjectedFailure));
        }
        self.state.receptacles[receptacle].open = true;
        Ok(ActionOutcome::Succeeded)
    }

    /// Plans an approach that ends within reach of `target`: carrot first,
    /// then the nearest reachable cell around it.
    pub fn plan_approach(&self, target: Cell) -> Option<Path> {
        let cm = self.costmap();
        let start = self.state.robot_cell();
        let reach = self.state.robot.reach;
        let ends_in_reach = |p: &Path| p.end().unwrap_or(start).chebyshev(target) <= reach;
        if let Ok(p) = carrot_plan(&cm, start, target) {
            if ends_in_reach(&p) {
                return Some(p);
            }
        }
        approach_plan(&cm, start, target, f64::from(reach))
            .ok()
            .filter(ends_in_reach)
    }

    /// Nearest flat, non-openable receptacle in the robot's room that the
    /// robot can get within reach of. Ties go to the lower id.
    pub fn find_temp_location(&self) -> Result<ReceptacleId, SimError> {
        let here = self.state.robot_cell();
        let room = self.state.robot_room().cloned().ok_or(SimError::NoTempLocation)?;
        let mut options: Vec<(f64, ReceptacleId)> = self
            .state
            .receptacles
            .iter()
            .filter(|r| r.room == room && r.class.is_flat() && !r.openable)
            .filter(|r| self.plan_approach(r.position).is_some())
            .map(|r| (here.distance(r.position), r.id))
            .collect();
        options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        options.first().map(|o| o.1).ok_or(SimError::NoTempLocation)
    }

    /// Detections within range and field of view. Receptacle detections are
    /// folded into the robot's map.
    pub fn scan(&mut self, cfg: &DetectorConfig) -> Vec<Detection> {
        let pose = self.state.robot.pose;
        let here = pose.cell();
        let visible = |c: Cell| {
            let d = here.distance(c);
            if d > cfg.range + 1e-9 {
                return false;
            }
            if cfg.fov_deg >= 360.0 || c == here {
                return true;
            }
            let bearing = f64::from(here.y - c.y).atan2(f64::from(c.x - here.x)).to_degrees();
            let mut off = (bearing - pose.heading.degrees()).rem_euclid(360.0);
            if off > 180.0 {
                off = 360.0 - off;
            }
            off <= cfg.fov_deg / 2.0 + 1e-9
        };

        let mut seen = Vec::new();
        for r in &self.state.receptacles {
            if visible(r.position) {
                seen.push(Detection::Receptacle {
                    id: r.id,
                    class: r.class,
                    position: r.position,
                    openable: r.openable,
                });
            }
        }
        for o in &self.state.objects {
            let (rec, pos) = match o.location {
                Containment::Held => continue,
                Containment::Dropped(c) => (None, c),
                Containment::On(r) => (Some(&self.state.receptacles[r]), self.state.receptacles[r].position),
                Containment::Inside(r) => {
                    let rec = &self.state.receptacles[r];
                    if !rec.open {
                        continue;
                    }
                    (Some(rec), rec.position)
                }
            };
            if visible(pos) {
                seen.push(Detection::Object {
                    id: o.id,
                    class: o.class.clone(),
                    position: pos,
                    room: self.state.truth.room_at(pos).cloned(),
                    receptacle: rec.map(|r| r.id),
                    receptacle_class: rec.map(|r| r.class),
                });
            }
        }

        let mut out = Vec::with_capacity(seen.len());
        for d in seen {
            if !self.draw(cfg.p_miss) {
                out.push(d);
            }
        }
        for d in &out {
            if let Detection::Receptacle {
                class,
                position,
                openable,
                ..
            } = d
            {
                let _ = self.state.belief.register_receptacle(&ReceptacleObservation {
                    receptacle_class: *class,
                    position: *position,
                    openable: *openable,
                    tick: self.state.tick,
                });
            }
        }
        out
    }

    /// Replaces any queued motion with `path`.
    pub fn set_motion(&mut self, path: &Path) {
        self.state.motion = path.cells.iter().copied().collect();
    }

    pub fn is_moving(&self) -> bool {
        !self.state.motion.is_empty()
    }

    /// Advances the clock one tick and the robot at most one cell.
    pub fn step(&mut self) -> StepEvent {
        self.state.tick += 1;
        let Some(&next) = self.state.motion.front() else {
            return StepEvent::Idle;
        };
        if self.state.belief.cell(next) != CellState::Free || self.state.truth.cell(next) != CellState::Free {
            self.state.motion.clear();
            return StepEvent::Blocked(next);
        }
        self.state.motion.pop_front();
        let here = self.state.robot_cell();
        let heading = Heading::of_step(here, next).unwrap_or(self.state.robot.pose.heading);
        self.state.robot.pose = GridPose::new(next.x, next.y, heading);
        if let Some(held) = self.state.robot.held {
            if self.draw(self.faults.drop) {
                self.state.objects[held].location = Containment::Dropped(next);
                self.state.robot.held = None;
                self.state.motion.clear();
                return StepEvent::Dropped(held, next);
            }
        }
        StepEvent::Moved(next)
    }

    /// Queues `path` and steps until it is done or interrupted.
    pub fn path_follow(&mut self, path: &Path) -> NavOutcome {
        self.set_motion(path);
        while self.is_moving() {
            match self.step() {
                StepEvent::Blocked(c) => return NavOutcome::Blocked(c),
                StepEvent::Dropped(o, _) => return NavOutcome::Dropped(o),
                _ => {}
            }
        }
        NavOutcome::Arrived
    }
}
