//! Leaf behaviors of the tidy and drawer trees, bound to a simulated world.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bt::trees::*;
use crate::bt::{BehaviorHost, BehaviorTree, Blackboard, BtError, TickStatus};
use crate::geometry::Cell;
use crate::nav::plan_point_goal;
use crate::preference::{is_misplaced, placement_rank, PlacementItem, Preferences, RoomChoice};
use crate::sim::{ActionOutcome, Detection, DetectorConfig, ObjectId, PlaceMode, ReceptacleId, Sim};
use crate::vocab::{ObjectClass, ReceptacleClass, RoomId, UserId};

pub(crate) const TARGET_OBJECT_KEY: &str = "target_object";
pub(crate) const CURRENT_TARGET_KEY: &str = "current_target";
pub(crate) const TARGET_RECEPTACLE_KEY: &str = "target_receptacle";
pub(crate) const HELD_KEY: &str = "held_object";
pub(crate) const TEMP_KEY: &str = "temp_location";

/// Where an object was last seen resting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sighting {
    pub id: ObjectId,
    pub class: ObjectClass,
    pub room: RoomId,
    pub receptacle: ReceptacleClass,
    pub receptacle_id: ReceptacleId,
    pub position: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct TargetReceptacle {
    id: ReceptacleId,
    class: ReceptacleClass,
    room: RoomId,
    position: Cell,
    openable: bool,
}

/// Something that happened inside a tree tick, in call order.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Record {
    Leaf {
        name: String,
        status: TickStatus,
        diagnostic: Option<String>,
        delta: BTreeMap<String, Value>,
    },
    Scan(Vec<Detection>),
}

/// Motion the host has queued on behalf of one leaf.
#[derive(Debug, Clone, Copy, PartialEq)]
struct NavTask {
    owner: &'static str,
    target: Cell,
    exact: bool,
}

pub(crate) struct TidyHost<'p> {
    pub sim: Sim,
    prefs: &'p Preferences,
    user: UserId,
    k: usize,
    room_choice: RoomChoice,
    pub known: BTreeMap<ObjectId, Sighting>,
    pub records: Vec<Record>,
    nav: Option<NavTask>,
    drawer: Option<BehaviorTree>,
}

fn fail(msg: impl Into<String>) -> BtError {
    BtError::Behavior(msg.into())
}

fn leaf_name(name: &str) -> Option<&'static str> {
    TIDY_LEAVES.iter().chain(DRAWER_LEAVES.iter()).copied().find(|n| *n == name)
}

impl<'p> TidyHost<'p> {
    pub fn new(sim: Sim, prefs: &'p Preferences, user: UserId, k: usize, room_choice: RoomChoice) -> Self {
        TidyHost {
            sim,
            prefs,
            user,
            k,
            room_choice,
            known: BTreeMap::new(),
            records: Vec::new(),
            nav: None,
            drawer: None,
        }
    }

    /// Runs the detector and remembers where objects were seen.
    pub fn scan(&mut self, cfg: &DetectorConfig) -> Vec<Detection> {
        let dets = self.sim.scan(cfg);
        for d in &dets {
            if let Detection::Object {
                id,
                class,
                position,
                room: Some(room),
                receptacle: Some(rid),
                receptacle_class: Some(rc),
            } = d
            {
                self.known.insert(
                    *id,
                    Sighting {
                        id: *id,
                        class: class.clone(),
                        room: room.clone(),
                        receptacle: *rc,
                        receptacle_id: *rid,
                        position: *position,
                    },
                );
            }
        }
        dets
    }

    fn remember_placement(&mut self, object: ObjectId, receptacle: ReceptacleId) -> Result<(), BtError> {
        let class = self.sim.state.object(object).map_err(|e| fail(e.to_string()))?.class.clone();
        let rec = self.sim.state.receptacle(receptacle).map_err(|e| fail(e.to_string()))?;
        self.known.insert(
            object,
            Sighting {
                id: object,
                class,
                room: rec.room.clone(),
                receptacle: rec.class,
                receptacle_id: rec.id,
                position: rec.position,
            },
        );
        Ok(())
    }

    /// Known objects that are not where the user wants them, worst placed
    /// first, ties by id.
    pub fn misplaced(&self) -> Result<Vec<&Sighting>, BtError> {
        let model = &self.prefs.factors;
        let mut out = Vec::new();
        for s in self.known.values() {
            if self.sim.state.robot.held == Some(s.id) {
                continue;
            }
            let here = (&s.room, s.receptacle);
            if is_misplaced(model, &self.user, &s.class, here, self.k).map_err(|e| fail(e.to_string()))? {
                let rank = placement_rank(model, &self.user, &s.class, here).map_err(|e| fail(e.to_string()))?;
                out.push((rank.unwrap_or(usize::MAX), s));
            }
        }
        out.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.id.cmp(&b.1.id)));
        Ok(out.into_iter().map(|(_, s)| s).collect())
    }

    /// Drives toward `target` on behalf of `owner`. `None` once the robot is
    /// there (exactly, or within reach); `Some(Running)` while moving.
    fn go(&mut self, owner: &'static str, target: Cell, exact: bool) -> Result<Option<TickStatus>, BtError> {
        let arrived = |h: &Self| {
            if exact {
                h.sim.state.robot_cell() == target
            } else {
                h.sim.state.in_reach(target)
            }
        };
        let task = NavTask { owner, target, exact };
        if self.nav == Some(task) {
            if self.sim.is_moving() {
                return Ok(Some(TickStatus::Running));
            }
            self.nav = None;
            return if arrived(self) {
                Ok(None)
            } else {
                Err(fail(format!("could not reach {target}")))
            };
        }
        self.nav = None;
        self.sim.set_motion(&Default::default());
        if arrived(self) {
            return Ok(None);
        }
        let path = if exact {
            plan_point_goal(&self.sim.costmap(), self.sim.state.robot_cell(), target).map_err(|e| fail(e.to_string()))?
        } else {
            self.sim
                .plan_approach(target)
                .ok_or_else(|| fail(format!("no approach to {target}")))?
        };
        self.sim.set_motion(&path);
        self.nav = Some(task);
        Ok(Some(TickStatus::Running))
    }

    fn held(&self) -> Result<ObjectId, BtError> {
        self.sim.state.robot.held.ok_or_else(|| fail("hand is empty"))
    }

    fn outcome(outcome: ActionOutcome, what: &str) -> Result<(), BtError> {
        match outcome {
            ActionOutcome::Succeeded => Ok(()),
            ActionOutcome::Failed(r) => Err(fail(format!("{what} failed: {r:?}"))),
        }
    }

    fn sim_err(e: crate::sim::SimError) -> BtError {
        fail(e.to_string())
    }

    fn identify_misplaced(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let target = self.misplaced()?.first().map(|s| (*s).clone());
        let target = target.ok_or_else(|| fail("no misplaced object known"))?;
        bb.set(TARGET_OBJECT_KEY, &target);
        Ok(TickStatus::Success)
    }

    fn placement_candidates(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let target: Sighting = bb.get(TARGET_OBJECT_KEY)?;
        let candidates: Vec<PlacementItem> = self
            .prefs
            .placement_candidates(&self.user, &target.class, self.room_choice)
            .map_err(|e| fail(e.to_string()))?
            .into_iter()
            .filter(|c| !(c.room == target.room && c.receptacle_class == target.receptacle))
            .collect();
        if candidates.is_empty() {
            return Err(fail(format!("no placement candidates for {}", target.class)));
        }
        bb.set(CANDIDATES_KEY, &candidates);
        Ok(TickStatus::Success)
    }

    fn pickup(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let target: Sighting = bb.get(TARGET_OBJECT_KEY)?;
        if self.sim.state.robot.held == Some(target.id) {
            return Ok(TickStatus::Success);
        }
        if let Some(s) = self.go(PICKUP, target.position, false)? {
            return Ok(s);
        }
        Self::outcome(self.sim.pickup(target.id).map_err(Self::sim_err)?, "pickup")?;
        bb.set(HELD_KEY, target.id);
        Ok(TickStatus::Success)
    }

    fn current_candidate(bb: &Blackboard) -> Result<PlacementItem, BtError> {
        let list: Vec<PlacementItem> = bb.get(CANDIDATES_KEY)?;
        let cursor: usize = bb.get(CURSOR_KEY)?;
        list.get(cursor)
            .cloned()
            .ok_or_else(|| fail(format!("candidate cursor {cursor} out of range")))
    }

    fn room_navigator(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let cand = Self::current_candidate(bb)?;
        if self.nav.is_none_or(|n| n.owner != ROOM_NAVIGATOR) {
            bb.set(CURRENT_TARGET_KEY, &cand);
        }
        let center = self
            .sim
            .state
            .belief
            .room_center(&cand.room)
            .map_err(|e| fail(e.to_string()))?
            .cell();
        Ok(self.go(ROOM_NAVIGATOR, center, true)?.unwrap_or(TickStatus::Success))
    }

    fn receptacle_navigator(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let active = self.nav.is_some_and(|n| n.owner == RECEPTACLE_NAVIGATOR);
        let target: TargetReceptacle = if active {
            bb.get(TARGET_RECEPTACLE_KEY)?
        } else {
            let cand = Self::current_candidate(bb)?;
            let sweep = DetectorConfig {
                fov_deg: 360.0,
                ..self.sim.state.robot.sensor
            };
            let dets = self.scan(&sweep);
            self.records.push(Record::Scan(dets));
            let here = self.sim.state.robot_cell();
            let belief = &self.sim.state.belief;
            let found = belief
                .receptacles_in_room(&cand.room)
                .map_err(|e| fail(e.to_string()))?
                .into_iter()
                .filter(|r| r.receptacle_class == cand.receptacle_class)
                .min_by(|a, b| here.distance(a.position).total_cmp(&here.distance(b.position)))
                .map(|r| r.position)
                .ok_or_else(|| fail(format!("no {} found in {}", cand.receptacle_class, cand.room)))?;
            let rec = self
                .sim
                .state
                .receptacle_at(found)
                .ok_or_else(|| fail(format!("nothing at {found}")))?;
            let t = TargetReceptacle {
                id: rec.id,
                class: rec.class,
                room: rec.room.clone(),
                position: rec.position,
                openable: rec.openable,
            };
            bb.set(TARGET_RECEPTACLE_KEY, &t);
            t
        };
        Ok(self
            .go(RECEPTACLE_NAVIGATOR, target.position, false)?
            .unwrap_or(TickStatus::Success))
    }

    fn place(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let target: TargetReceptacle = bb.get(TARGET_RECEPTACLE_KEY)?;
        if target.openable {
            let mut tree = match self.drawer.take() {
                Some(t) => t,
                None => build_drawer_place_tree(self)?,
            };
            let status = tree.tick(bb, self);
            tree.take_trace();
            if !matches!(status, Ok(TickStatus::Running)) {
                tree.reset();
            }
            self.drawer = Some(tree);
            return status;
        }
        let held = self.held()?;
        if let Some(s) = self.go(PLACE, target.position, false)? {
            return Ok(s);
        }
        Self::outcome(self.sim.place(target.id, PlaceMode::On).map_err(Self::sim_err)?, "place")?;
        self.remember_placement(held, target.id)?;
        bb.remove(HELD_KEY);
        Ok(TickStatus::Success)
    }

    fn approach_drawer(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let target: TargetReceptacle = bb.get(TARGET_RECEPTACLE_KEY)?;
        if let Some(s) = self.go(APPROACH_DRAWER, target.position, false)? {
            return Ok(s);
        }
        let open = self.sim.state.receptacle(target.id).map_err(Self::sim_err)?.open;
        bb.set(DRAWER_OPEN_KEY, open);
        Ok(TickStatus::Success)
    }

    fn find_temp_location(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let id = self.sim.find_temp_location().map_err(Self::sim_err)?;
        bb.set(TEMP_KEY, id);
        Ok(TickStatus::Success)
    }

    fn set_down_temporary(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let temp: ReceptacleId = bb.get(TEMP_KEY)?;
        let held = self.held()?;
        let pos = self.sim.state.receptacle(temp).map_err(Self::sim_err)?.position;
        if let Some(s) = self.go(SET_DOWN_TEMPORARY, pos, false)? {
            return Ok(s);
        }
        Self::outcome(self.sim.place(temp, PlaceMode::On).map_err(Self::sim_err)?, "set down")?;
        self.remember_placement(held, temp)?;
        Ok(TickStatus::Success)
    }

    fn open_drawer(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let target: TargetReceptacle = bb.get(TARGET_RECEPTACLE_KEY)?;
        if let Some(s) = self.go(OPEN_DRAWER, target.position, false)? {
            return Ok(s);
        }
        Self::outcome(self.sim.open_receptacle(target.id).map_err(Self::sim_err)?, "open")?;
        bb.set(DRAWER_OPEN_KEY, true);
        Ok(TickStatus::Success)
    }

    fn re_pick(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let object: ObjectId = bb.get(HELD_KEY)?;
        let temp: ReceptacleId = bb.get(TEMP_KEY)?;
        let pos = self.sim.state.receptacle(temp).map_err(Self::sim_err)?.position;
        if let Some(s) = self.go(RE_PICK_OBJECT, pos, false)? {
            return Ok(s);
        }
        Self::outcome(self.sim.pickup(object).map_err(Self::sim_err)?, "pickup")?;
        Ok(TickStatus::Success)
    }

    fn place_inside(&mut self, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let target: TargetReceptacle = bb.get(TARGET_RECEPTACLE_KEY)?;
        let held = self.held()?;
        if let Some(s) = self.go(PLACE_INSIDE, target.position, false)? {
            return Ok(s);
        }
        Self::outcome(
            self.sim.place(target.id, PlaceMode::Inside).map_err(Self::sim_err)?,
            "place inside",
        )?;
        self.remember_placement(held, target.id)?;
        bb.remove(HELD_KEY);
        Ok(TickStatus::Success)
    }

    fn dispatch(&mut self, name: &'static str, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        match name {
            IDENTIFY_MISPLACED => self.identify_misplaced(bb),
            PLACEMENT_CANDIDATES => self.placement_candidates(bb),
            PICKUP => self.pickup(bb),
            ROOM_NAVIGATOR => self.room_navigator(bb),
            RECEPTACLE_NAVIGATOR => self.receptacle_navigator(bb),
            PLACE => self.place(bb),
            APPROACH_DRAWER => self.approach_drawer(bb),
            FIND_TEMP_LOCATION => self.find_temp_location(bb),
            SET_DOWN_TEMPORARY => self.set_down_temporary(bb),
            OPEN_DRAWER => self.open_drawer(bb),
            RE_PICK_OBJECT => self.re_pick(bb),
            PLACE_INSIDE => self.place_inside(bb),
            other => Err(BtError::UnboundLeaf(other.into())),
        }
    }

    /// Forgets any in-flight motion; used between tree activations.
    pub fn halt(&mut self) {
        self.nav = None;
        self.sim.set_motion(&Default::default());
        if let Some(t) = self.drawer.as_mut() {
            t.reset();
        }
    }
}

impl BehaviorHost for TidyHost<'_> {
    fn has_behavior(&self, name: &str) -> bool {
        leaf_name(name).is_some()
    }

    fn action(&mut self, name: &str, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        let name = leaf_name(name).ok_or_else(|| BtError::UnboundLeaf(name.into()))?;
        let result = self.dispatch(name, bb);
        let (status, diagnostic) = match &result {
            Ok(s) => (*s, None),
            Err(BtError::UnboundLeaf(_)) => return result,
            Err(e) => (TickStatus::Failure, Some(e.to_string())),
        };
        if status != TickStatus::Running && self.nav.is_some_and(|n| n.owner == name) {
            self.nav = None;
        }
        self.records.push(Record::Leaf {
            name: name.into(),
            status,
            diagnostic,
            delta: bb.take_delta(),
        });
        result
    }

    fn condition(&mut self, name: &str, _bb: &Blackboard) -> Result<bool, BtError> {
        Err(BtError::UnboundLeaf(name.into()))
    }
}
