//! Closed-loop tidy-up episodes: scan, pick the worst-placed object, run the
//! tidy tree until it finishes, repeat.

mod host;
pub mod log;

use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

pub use host::Sighting;
pub use log::{EpisodeLog, Event, EventKind, Summary, TerminalReason};

use crate::bt::{build_tidy_tree, Blackboard, BtError, TickStatus};
use crate::fixtures;
use crate::geometry::GridPose;
use crate::preference::{
    ingest_corpus, read_model, CorpusError, Hyperparameters, ModelError, ModelFileError, Preferences, RoomChoice,
};
use crate::semantic_map::{load_map, MapError, SemanticMap};
use crate::sim::{parse_scenario, Detection, PreferenceSource, Scenario, ScenarioError, StepEvent, WorldState};
use crate::vocab::UserId;
use host::{Record, TidyHost};

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("invalid episode configuration: {0}")]
    Config(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    ModelFile(#[from] ModelFileError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tree(#[from] BtError),
}

/// What to run, with optional overrides of the scenario's own settings.
#[derive(Debug, Clone, Default)]
pub struct EpisodeConfig {
    pub scenario: PathBuf,
    /// Model or corpus file used instead of the one the scenario names.
    pub preferences: Option<PathBuf>,
    pub user: Option<UserId>,
    pub k: Option<usize>,
    pub max_ticks: Option<u64>,
    pub seed: Option<u64>,
}

/// A scenario with its map and preferences resolved.
#[derive(Debug, Clone)]
pub struct EpisodeSetup {
    pub scenario: Scenario,
    pub map: SemanticMap,
    pub preferences: Preferences,
}

fn preferences_from(source: &PreferenceSource, text: &str) -> Result<Preferences, EpisodeError> {
    Ok(match source {
        PreferenceSource::Model(_) => read_model(text)?,
        PreferenceSource::Corpus(_) => Preferences::from_corpus(&ingest_corpus(text)?, &Hyperparameters::default())?,
    })
}

fn read(path: &Path) -> Result<String, EpisodeError> {
    std::fs::read_to_string(path).map_err(|source| EpisodeError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl EpisodeSetup {
    /// Builds a setup from scenario text, resolving file names with `open`.
    pub fn from_text(
        text: &str,
        mut open: impl FnMut(&str) -> Result<String, EpisodeError>,
    ) -> Result<Self, EpisodeError> {
        let scenario = parse_scenario(text)?;
        let map = load_map(&open(&scenario.map)?)?;
        let pref_path = match &scenario.preferences {
            PreferenceSource::Model(p) | PreferenceSource::Corpus(p) => p.clone(),
        };
        let preferences = preferences_from(&scenario.preferences, &open(&pref_path)?)?;
        let setup = EpisodeSetup {
            scenario,
            map,
            preferences,
        };
        setup.validate()?;
        Ok(setup)
    }

    /// One of the bundled scenarios, resolved against the bundled files.
    pub fn bundled(name: &str) -> Result<Self, EpisodeError> {
        let text = fixtures::scenario(name).ok_or_else(|| EpisodeError::Config(format!("no bundled scenario {name:?}")))?;
        Self::from_text(text, |file| match file {
            "apartment.map" => Ok(fixtures::APARTMENT_MAP.to_string()),
            "preferences.model" => Ok(fixtures::MODEL.to_string()),
            "preferences.csv" => Ok(fixtures::CORPUS_CSV.to_string()),
            other => Err(EpisodeError::Config(format!("no bundled file {other:?}"))),
        })
    }

    /// Loads a scenario file and applies the overrides in `cfg`.
    pub fn load(cfg: &EpisodeConfig) -> Result<Self, EpisodeError> {
        let text = read(&cfg.scenario)?;
        let dir = cfg.scenario.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut scenario = parse_scenario(&text)?;
        let map = load_map(&read(&dir.join(&scenario.map))?)?;
        let preferences = match &cfg.preferences {
            Some(p) => {
                let source = if p.extension().is_some_and(|e| e == "csv") {
                    PreferenceSource::Corpus(p.display().to_string())
                } else {
                    PreferenceSource::Model(p.display().to_string())
                };
                preferences_from(&source, &read(p)?)?
            }
            None => {
                let p = match &scenario.preferences {
                    PreferenceSource::Model(p) | PreferenceSource::Corpus(p) => dir.join(p),
                };
                preferences_from(&scenario.preferences, &read(&p)?)?
            }
        };
        if let Some(u) = &cfg.user {
            scenario.user = u.clone();
        }
        if let Some(k) = cfg.k {
            scenario.k = k;
        }
        if let Some(t) = cfg.max_ticks {
            scenario.max_ticks = t;
        }
        if let Some(s) = cfg.seed {
            scenario.seed = s;
        }
        let setup = EpisodeSetup {
            scenario,
            map,
            preferences,
        };
        setup.validate()?;
        Ok(setup)
    }

    fn validate(&self) -> Result<(), EpisodeError> {
        let sc = &self.scenario;
        let model = &self.preferences.factors;
        if model.user_index(&sc.user).is_err() {
            return Err(EpisodeError::Config(format!("user {} is not in the model", sc.user)));
        }
        if sc.k == 0 {
            return Err(EpisodeError::Config("k must be at least 1".into()));
        }
        if sc.max_ticks == 0 {
            return Err(EpisodeError::Config("max_ticks must be at least 1".into()));
        }
        for o in &sc.objects {
            if !model.items().values().iter().any(|it| it.object_class == o.class) {
                return Err(EpisodeError::Config(format!("object {} is not in the model", o.class)));
            }
        }
        if sc.room_choice == RoomChoice::Kb {
            for o in &sc.objects {
                self.preferences.kb.target_room(&o.class)?;
            }
        }
        Ok(())
    }

    pub fn run(&self) -> Result<EpisodeLog, EpisodeError> {
        Ok(run_setup(self)?.log)
    }
}

/// Loads and runs the episode described by `cfg`.
pub fn run_episode(cfg: &EpisodeConfig) -> Result<EpisodeLog, EpisodeError> {
    EpisodeSetup::load(cfg)?.run()
}

fn scan_detail(dets: &[Detection]) -> serde_json::Value {
    let objects: Vec<usize> = dets
        .iter()
        .filter_map(|d| match d {
            Detection::Object { id, .. } => Some(*id),
            _ => None,
        })
        .collect();
    let receptacles = dets.len() - objects.len();
    json!({ "objects": objects, "receptacles": receptacles })
}

struct Recorder {
    events: Vec<Event>,
}

impl Recorder {
    fn push(&mut self, tick: u64, kind: EventKind, pose: GridPose) -> &mut Event {
        self.events.push(Event::new(tick, kind, pose));
        self.events.last_mut().expect("just pushed")
    }

    fn scan(&mut self, tick: u64, pose: GridPose, dets: &[Detection]) {
        self.push(tick, EventKind::Scan, pose).detail = Some(scan_detail(dets));
    }

    fn drain(&mut self, tick: u64, pose: GridPose, records: Vec<Record>) {
        for r in records {
            match r {
                Record::Leaf {
                    name,
                    status,
                    diagnostic,
                    delta,
                } => {
                    let e = self.push(tick, EventKind::Leaf, pose);
                    e.behavior = Some(name);
                    e.status = Some(status);
                    e.bb_delta = delta;
                    e.detail = diagnostic.map(|d| json!({ "diagnostic": d }));
                }
                Record::Scan(dets) => self.scan(tick, pose, &dets),
            }
        }
    }
}

/// A finished episode: its log and the world it left behind.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub log: EpisodeLog,
    pub world: WorldState,
}

/// Runs one episode to completion. Deterministic for a given setup.
pub fn run_setup(setup: &EpisodeSetup) -> Result<EpisodeResult, EpisodeError> {
    let sc = &setup.scenario;
    let sim = sc.build_sim(setup.map.clone())?;
    let mut host = TidyHost::new(sim, &setup.preferences, sc.user.clone(), sc.k, sc.room_choice);
    let mut tree = build_tidy_tree(&host)?;
    let mut rec = Recorder { events: Vec::new() };
    let detector = sc.detector;

    let reason = 'episode: loop {
        let pose = host.sim.state.robot.pose;
        let dets = host.scan(&detector);
        rec.scan(host.sim.state.tick, pose, &dets);
        if host.misplaced()?.is_empty() {
            break TerminalReason::AllPlaced;
        }

        tree.reset();
        host.halt();
        let mut bb = Blackboard::new();
        let status = loop {
            if host.sim.state.tick >= sc.max_ticks {
                break 'episode TerminalReason::TickBudgetExhausted;
            }
            let tick = host.sim.state.tick;
            let status = tree.tick(&mut bb, &mut host)?;
            tree.take_trace();
            let records = std::mem::take(&mut host.records);
            rec.drain(tick, host.sim.state.robot.pose, records);
            let rest = bb.take_delta();
            if !rest.is_empty() {
                if let Some(e) = rec.events.iter_mut().rev().find(|e| e.kind == EventKind::Leaf) {
                    e.bb_delta.extend(rest);
                }
            }

            match host.sim.step() {
                StepEvent::Idle => {}
                StepEvent::Moved(_) => {
                    rec.push(host.sim.state.tick, EventKind::Move, host.sim.state.robot.pose);
                }
                StepEvent::Blocked(c) => {
                    let e = rec.push(host.sim.state.tick, EventKind::Move, host.sim.state.robot.pose);
                    e.status = Some(TickStatus::Failure);
                    e.detail = Some(json!({ "blocked": c }));
                }
                StepEvent::Dropped(obj, c) => {
                    rec.push(host.sim.state.tick, EventKind::Move, host.sim.state.robot.pose);
                    let e = rec.push(host.sim.state.tick, EventKind::Drop, host.sim.state.robot.pose);
                    e.detail = Some(json!({ "object": obj, "cell": c }));
                    break 'episode TerminalReason::UnrecoverableFailure;
                }
            }
            if status != TickStatus::Running {
                break status;
            }
        };
        let e = rec.push(host.sim.state.tick, EventKind::Activation, host.sim.state.robot.pose);
        e.behavior = Some("tidy".into());
        e.status = Some(status);
        if status == TickStatus::Failure && host.sim.state.robot.held.is_some() {
            break TerminalReason::UnrecoverableFailure;
        }
    };

    let total_ticks = host.sim.state.tick;
    let summary = Summary::from_events(&rec.events, total_ticks, reason);
    tracing::debug!(?summary, "episode finished");
    Ok(EpisodeResult {
        log: EpisodeLog {
            events: rec.events,
            summary,
        },
        world: host.sim.state,
    })
}
