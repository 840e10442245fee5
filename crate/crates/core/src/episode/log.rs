//! Episode event stream and summary, written as line-delimited JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bt::trees::PLACE;
use crate::bt::TickStatus;
use crate::geometry::{Cell, GridPose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    /// A behavior-tree leaf returned.
    Leaf,
    /// The robot advanced one cell, or was blocked.
    Move,
    /// A detector sweep.
    Scan,
    /// One run of the tidy tree finished.
    Activation,
    /// The held object fell.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub behavior: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<TickStatus>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bb_delta: BTreeMap<String, Value>,
    pub pose: GridPose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl Event {
    pub fn new(tick: u64, kind: EventKind, pose: GridPose) -> Self {
        Event {
            tick,
            kind,
            behavior: None,
            status: None,
            bb_delta: BTreeMap::new(),
            pose,
            detail: None,
        }
    }

    pub fn is_leaf(&self, behavior: &str) -> bool {
        self.kind == EventKind::Leaf && self.behavior.as_deref() == Some(behavior)
    }

    /// Leaf event that ended (not Running).
    pub fn is_completed_leaf(&self, behavior: &str) -> bool {
        self.is_leaf(behavior) && matches!(self.status, Some(TickStatus::Success | TickStatus::Failure))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalReason {
    AllPlaced,
    UnrecoverableFailure,
    TickBudgetExhausted,
}

impl TerminalReason {
    /// Process exit code for the `run` command.
    pub fn exit_code(self) -> i32 {
        match self {
            TerminalReason::AllPlaced => 0,
            TerminalReason::UnrecoverableFailure => 2,
            TerminalReason::TickBudgetExhausted => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    /// Successful placements of a tidied object.
    pub objects_rearranged: u32,
    /// Tidy-tree runs that ended in Success.
    pub successes: u32,
    /// Tidy-tree runs that ended in Failure.
    pub failures: u32,
    pub total_path_cells: u32,
    pub total_ticks: u64,
    pub terminal_reason: TerminalReason,
}

impl Summary {
    /// Recomputes the counters from an event stream.
    pub fn from_events(events: &[Event], total_ticks: u64, terminal_reason: TerminalReason) -> Summary {
        let count = |f: &dyn Fn(&Event) -> bool| events.iter().filter(|e| f(e)).count() as u32;
        let activation = |s: TickStatus| move |e: &Event| e.kind == EventKind::Activation && e.status == Some(s);
        Summary {
            objects_rearranged: count(&|e| e.is_leaf(PLACE) && e.status == Some(TickStatus::Success)),
            successes: count(&activation(TickStatus::Success)),
            failures: count(&activation(TickStatus::Failure)),
            total_path_cells: count(&|e| e.kind == EventKind::Move && e.status.is_none()),
            total_ticks,
            terminal_reason,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub events: Vec<Event>,
    pub summary: Summary,
}

#[derive(Serialize, Deserialize)]
struct SummaryLine {
    summary: Summary,
}

impl EpisodeLog {
    /// One JSON object per event, then a `{"summary": …}` line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        let s = SummaryLine {
            summary: self.summary.clone(),
        };
        out.push_str(&serde_json::to_string(&s).expect("summary serializes"));
        out.push('\n');
        out
    }

    pub fn from_jsonl(text: &str) -> Result<EpisodeLog, String> {
        let mut events = Vec::new();
        let mut summary = None;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            if summary.is_some() {
                return Err(format!("line {}: event after summary", i + 1));
            }
            if line.starts_with("{\"summary\"") {
                let s: SummaryLine = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
                summary = Some(s.summary);
            } else {
                events.push(serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?);
            }
        }
        Ok(EpisodeLog {
            events,
            summary: summary.ok_or("log has no summary line")?,
        })
    }

    /// Robot cells visited by move events, in order.
    pub fn trajectory(&self) -> Vec<Cell> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Move && e.status.is_none())
            .map(|e| e.pose.cell())
            .collect()
    }

    /// Names of leaf behaviors that completed, in order.
    pub fn completed_leaves(&self) -> Vec<&str> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Leaf && e.status != Some(TickStatus::Running))
            .filter_map(|e| e.behavior.as_deref())
            .collect()
    }
}
