//! Scenario files: which map, which user, where things start.
//!
//! ```text
//! # comments start with '#'
//! map apartment.map
//! model preferences.model          # or: corpus preferences.csv
//! user U1
//! k 2
//! room_choice user            # or: kb (default)
//! robot 3 4 E
//! object mug at office/table
//! object rubiks_cube at livingroom/drawer inside
//! open livingroom/drawer
//! fail place_first 1
//! fail place_prob 0.0
//! fail pickup_prob 0.0
//! fail open_prob 0.0
//! fail drop_prob 0.0
//! detector 8 360 0.0          # range, fov degrees, miss probability
//! reach 1
//! inflate 0
//! seed 7
//! max_ticks 3000
//! ```
//!
//! `at <room>/<class>` resolves to the lowest-id receptacle of that class in
//! that room. Paths are relative to the scenario file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::world::{Containment, DetectorConfig, FaultConfig, Sim, WorldState};
use crate::geometry::{GridPose, Heading};
use crate::preference::{RoomChoice, DEFAULT_TOP_K};
use crate::semantic_map::SemanticMap;
use crate::vocab::{ObjectClass, ReceptacleClass, RoomId, UserId};

pub const DEFAULT_MAX_TICKS: u64 = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("scenario line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("scenario is missing `{0}`")]
    Missing(&'static str),
    #[error("no {class} in room {room}")]
    NoSuchReceptacle { room: RoomId, class: ReceptacleClass },
    #[error("robot start {0} is not a free cell")]
    BadRobotStart(GridPose),
    #[error("{0} cannot hold objects inside")]
    NotOpenable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreferenceSource {
    Model(String),
    Corpus(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub class: ObjectClass,
    pub room: RoomId,
    pub receptacle: ReceptacleClass,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub map: String,
    pub preferences: PreferenceSource,
    pub user: UserId,
    pub k: usize,
    pub room_choice: RoomChoice,
    pub robot: GridPose,
    pub objects: Vec<ObjectSpec>,
    pub open: Vec<(RoomId, ReceptacleClass)>,
    pub faults: FaultConfig,
    pub detector: DetectorConfig,
    pub reach: i32,
    pub inflate: u32,
    pub seed: u64,
    pub max_ticks: u64,
}

fn perr(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(tok: Option<&&str>, line: usize, what: &str) -> Result<T, ScenarioError> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| perr(line, format!("invalid {what} {tok:?}")))
}

fn prob(tok: Option<&&str>, line: usize, what: &str) -> Result<f64, ScenarioError> {
    let p: f64 = num(tok, line, what)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(perr(line, format!("{what} must be in [0, 1]")));
    }
    Ok(p)
}

fn location(tok: Option<&&str>, line: usize) -> Result<(RoomId, ReceptacleClass), ScenarioError> {
    let tok = tok.ok_or_else(|| perr(line, "missing <room>/<receptacle>"))?;
    let (room, class) = tok
        .split_once('/')
        .ok_or_else(|| perr(line, format!("expected <room>/<receptacle>, got {tok:?}")))?;
    let class = class
        .parse()
        .map_err(|e: crate::vocab::UnknownReceptacleClass| perr(line, e.to_string()))?;
    Ok((RoomId::new(room), class))
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut map = None;
    let mut prefs = None;
    let mut user = None;
    let mut robot = None;
    let mut sc = Scenario {
        map: String::new(),
        preferences: PreferenceSource::Model(String::new()),
        user: UserId::new(""),
        k: DEFAULT_TOP_K,
        room_choice: RoomChoice::default(),
        robot: GridPose::new(0, 0, Heading::default()),
        objects: Vec::new(),
        open: Vec::new(),
        faults: FaultConfig::default(),
        detector: DetectorConfig::default(),
        reach: 1,
        inflate: 0,
        seed: 0,
        max_ticks: DEFAULT_MAX_TICKS,
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let arg = |n: usize| toks.get(n);
        match toks[0] {
            "map" => map = Some(num::<String>(arg(1), line, "map path")?),
            "model" => prefs = Some(PreferenceSource::Model(num(arg(1), line, "model path")?)),
            "corpus" => prefs = Some(PreferenceSource::Corpus(num(arg(1), line, "corpus path")?)),
            "user" => user = Some(UserId::new(num::<String>(arg(1), line, "user")?)),
            "k" => {
                sc.k = num(arg(1), line, "k")?;
                if sc.k == 0 {
                    return Err(perr(line, "k must be at least 1"));
                }
            }
            "room_choice" => {
                sc.room_choice = num::<String>(arg(1), line, "room choice")?
                    .parse()
                    .map_err(|e: String| perr(line, e))?
            }
            "robot" => {
                let heading = match arg(3) {
                    Some(h) => h.parse().map_err(|e: String| perr(line, e))?,
                    None => Heading::default(),
                };
                robot = Some(GridPose::new(num(arg(1), line, "x")?, num(arg(2), line, "y")?, heading));
            }
            "object" => {
                if arg(2) != Some(&"at") {
                    return Err(perr(line, "expected `object <class> at <room>/<receptacle> [on|inside]`"));
                }
                let class = ObjectClass::new(num::<String>(arg(1), line, "object class")?);
                let (room, receptacle) = location(arg(3), line)?;
                let inside = match arg(4) {
                    None | Some(&"on") => false,
                    Some(&"inside") => true,
                    Some(t) => return Err(perr(line, format!("unknown placement mode {t:?}"))),
                };
                sc.objects.push(ObjectSpec {
                    class,
                    room,
                    receptacle,
                    inside,
                });
            }
            "open" => sc.open.push(location(arg(1), line)?),
            "fail" => match arg(1).copied() {
                Some("place_first") => sc.faults.place_fail_first = num(arg(2), line, "count")?,
                Some("place_prob") => sc.faults.place_fail = prob(arg(2), line, "probability")?,
                Some("pickup_prob") => sc.faults.pickup_fail = prob(arg(2), line, "probability")?,
                Some("open_prob") => sc.faults.open_fail = prob(arg(2), line, "probability")?,
                Some("drop_prob") => sc.faults.drop = prob(arg(2), line, "probability")?,
                other => return Err(perr(line, format!("unknown failure kind {other:?}"))),
            },
            "detector" => {
                sc.detector = DetectorConfig {
                    range: num(arg(1), line, "range")?,
                    fov_deg: num(arg(2), line, "fov")?,
                    p_miss: prob(arg(3), line, "miss probability")?,
                }
            }
            "reach" => {
                sc.reach = num(arg(1), line, "reach")?;
                if sc.reach < 1 {
                    return Err(perr(line, "reach must be at least 1"));
                }
            }
            "inflate" => sc.inflate = num(arg(1), line, "inflation radius")?,
            "seed" => sc.seed = num(arg(1), line, "seed")?,
            "max_ticks" => {
                sc.max_ticks = num(arg(1), line, "max_ticks")?;
                if sc.max_ticks == 0 {
                    return Err(perr(line, "max_ticks must be at least 1"));
                }
            }
            other => return Err(perr(line, format!("unknown directive {other:?}"))),
        }
    }
    sc.map = map.ok_or(ScenarioError::Missing("map"))?;
    sc.preferences = prefs.ok_or(ScenarioError::Missing("model or corpus"))?;
    sc.user = user.ok_or(ScenarioError::Missing("user"))?;
    sc.robot = robot.ok_or(ScenarioError::Missing("robot"))?;
    Ok(sc)
}

impl Scenario {
    /// Places the robot and objects on `map`.
    pub fn build_sim(&self, map: SemanticMap) -> Result<Sim, ScenarioError> {
        if map.cell(self.robot.cell()) != crate::semantic_map::CellState::Free {
            return Err(ScenarioError::BadRobotStart(self.robot));
        }
        let mut w = WorldState::new(map, self.robot, self.seed);
        w.robot.reach = self.reach;
        w.robot.sensor = self.detector;
        for (room, class) in &self.open {
            let id = w
                .find_receptacle(room, *class)
                .ok_or_else(|| ScenarioError::NoSuchReceptacle {
                    room: room.clone(),
                    class: *class,
                })?
                .id;
            if !w.receptacles[id].openable {
                return Err(ScenarioError::NotOpenable(format!("{room}/{class}")));
            }
            w.receptacles[id].open = true;
        }
        for o in &self.objects {
            let rec = w
                .find_receptacle(&o.room, o.receptacle)
                .ok_or_else(|| ScenarioError::NoSuchReceptacle {
                    room: o.room.clone(),
                    class: o.receptacle,
                })?;
            let loc = if o.inside {
                if !rec.openable {
                    return Err(ScenarioError::NotOpenable(format!("{}/{}", o.room, o.receptacle)));
                }
                Containment::Inside(rec.id)
            } else {
                Containment::On(rec.id)
            };
            w.add_object(o.class.clone(), loc);
        }
        let mut sim = Sim::new(w, self.faults);
        sim.inflate_radius = self.inflate;
        Ok(sim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantic_map::load_map;

    const TEXT: &str = "map m.map\nmodel m.model\nuser U1\nk 2\nroom_choice user\nrobot 1 1 N\n\
object mug at office/table\nobject cube at office/drawer inside  # tucked away\nopen office/drawer\n\
fail place_first 1\ndetector 5 180 0.1\nseed 9\nmax_ticks 100\n";

    #[test]
    fn parses_all_directives() {
        let s = parse_scenario(TEXT).unwrap();
        assert_eq!(s.user, UserId::new("U1"));
        assert_eq!(s.k, 2);
        assert_eq!(s.room_choice, RoomChoice::User);
        assert_eq!(s.robot, GridPose::new(1, 1, Heading::N));
        assert_eq!(s.objects.len(), 2);
        assert!(s.objects[1].inside);
        assert_eq!(s.faults.place_fail_first, 1);
        assert_eq!(s.detector.fov_deg, 180.0);
        assert_eq!(s.max_ticks, 100);
        assert_eq!(s.preferences, PreferenceSource::Model("m.model".into()));
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(
            parse_scenario("map a\nmodel b\nuser u\nrobot 0 0\nobject mug on office/table\n"),
            Err(ScenarioError::Parse { line: 5, .. })
        ));
        assert!(matches!(
            parse_scenario("map a\nuser u\nrobot 0 0\n"),
            Err(ScenarioError::Missing(_))
        ));
        assert!(matches!(
            parse_scenario("fail place_prob 2\n"),
            Err(ScenarioError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn builds_world() {
        let map = load_map(
            "width 4\nheight 3\ngrid\n....\n....\n....\nroom office 0 0 3 2\n\
receptacle table 0 0\nreceptacle drawer 3 0 openable\n",
        )
        .unwrap();
        let sim = parse_scenario(TEXT).unwrap().build_sim(map.clone()).unwrap();
        assert_eq!(sim.state.objects.len(), 2);
        assert!(sim.state.receptacles[1].open);
        assert_eq!(sim.state.objects[1].location, Containment::Inside(1));

        let bad = parse_scenario("map a\nmodel b\nuser u\nrobot 1 1\nobject mug at office/sink\n").unwrap();
        assert!(matches!(bad.build_sim(map), Err(ScenarioError::NoSuchReceptacle { .. })));
    }
}
