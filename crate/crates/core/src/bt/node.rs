//! Tree nodes, the tick loop, and the host interface leaves call into.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Blackboard, BtError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TickStatus {
    Success,
    Failure,
    Running,
}

impl std::fmt::Display for TickStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TickStatus::Success => "Success",
            TickStatus::Failure => "Failure",
            TickStatus::Running => "Running",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Sequence,
    Fallback,
    /// Re-ticks its child on Failure, up to `n` attempts per activation.
    Retry(u32),
    Inverter,
    /// Retry whose budget is the length of the list stored at `list_key`.
    /// The cursor at `cursor_key` is reset to 0 on activation and advanced
    /// before each re-attempt.
    RetryCandidates { list_key: String, cursor_key: String },
    Action(String),
    Condition(String),
    /// Succeeds when the boolean at the key is true.
    Flag(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Memory {
    index: usize,
    attempts: u32,
    budget: u32,
    active: bool,
}

/// A tree node. Control nodes keep their resume state between ticks.
#[derive(Debug, Clone)]
pub struct Node {
    kind: NodeKind,
    children: Vec<Node>,
    memory: Memory,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.children == other.children
    }
}

impl Node {
    pub fn sequence(children: Vec<Node>) -> Node {
        Node::with(NodeKind::Sequence, children)
    }

    pub fn fallback(children: Vec<Node>) -> Node {
        Node::with(NodeKind::Fallback, children)
    }

    pub fn retry(n: u32, child: Node) -> Node {
        Node::with(NodeKind::Retry(n), vec![child])
    }

    pub fn inverter(child: Node) -> Node {
        Node::with(NodeKind::Inverter, vec![child])
    }

    pub fn retry_candidates(list_key: &str, cursor_key: &str, child: Node) -> Node {
        Node::with(
            NodeKind::RetryCandidates {
                list_key: list_key.to_string(),
                cursor_key: cursor_key.to_string(),
            },
            vec![child],
        )
    }

    pub fn action(name: &str) -> Node {
        Node::with(NodeKind::Action(name.to_string()), Vec::new())
    }

    pub fn condition(name: &str) -> Node {
        Node::with(NodeKind::Condition(name.to_string()), Vec::new())
    }

    pub fn flag(key: &str) -> Node {
        Node::with(NodeKind::Flag(key.to_string()), Vec::new())
    }

    pub fn with(kind: NodeKind, children: Vec<Node>) -> Node {
        Node {
            kind,
            children,
            memory: Memory::default(),
        }
    }

    pub(crate) fn push_child(&mut self, child: Node) {
        self.children.push(child);
    }

    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }

    pub fn children(&self) -> &[Node] {
        &self.children
    }

    /// Checks arity and parameters of this node and all descendants.
    pub fn validate(&self) -> Result<(), BtError> {
        let n = self.children.len();
        let bad = |msg: String| Err(BtError::MalformedTree(msg));
        match &self.kind {
            NodeKind::Sequence | NodeKind::Fallback if n == 0 => return bad(format!("{:?} has no children", self.kind)),
            NodeKind::Retry(0) => return bad("retry budget must be at least 1".into()),
            NodeKind::Retry(_) | NodeKind::Inverter | NodeKind::RetryCandidates { .. } if n != 1 => {
                return bad(format!("{:?} needs exactly one child, has {n}", self.kind))
            }
            NodeKind::Action(s) | NodeKind::Condition(s) | NodeKind::Flag(s) if n != 0 || s.is_empty() => {
                return bad(format!("leaf {:?} must be named and childless", self.kind))
            }
            _ => {}
        }
        self.children.iter().try_for_each(Node::validate)
    }

    /// Names of all action and condition leaves, in depth-first order.
    pub fn leaf_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.kind {
            NodeKind::Action(s) | NodeKind::Condition(s) => out.push(s),
            _ => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Clears resume state here and below.
    pub fn reset(&mut self) {
        self.memory = Memory::default();
        self.children.iter_mut().for_each(Node::reset);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafKind {
    Action,
    Condition,
    Flag,
    Decorator,
}

/// One leaf invocation (or decorator diagnostic) during a tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub name: String,
    pub kind: LeafKind,
    pub status: TickStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Provides the behaviors that leaves are bound to.
pub trait BehaviorHost {
    fn has_behavior(&self, name: &str) -> bool;
    fn action(&mut self, name: &str, bb: &mut Blackboard) -> Result<TickStatus, BtError>;
    fn condition(&mut self, name: &str, bb: &Blackboard) -> Result<bool, BtError>;
}

type ActionFn<'a> = Box<dyn FnMut(&mut Blackboard) -> Result<TickStatus, BtError> + 'a>;
type ConditionFn<'a> = Box<dyn FnMut(&Blackboard) -> Result<bool, BtError> + 'a>;

/// Closure-backed [`BehaviorHost`].
#[derive(Default)]
pub struct Bindings<'a> {
    actions: BTreeMap<String, ActionFn<'a>>,
    conditions: BTreeMap<String, ConditionFn<'a>>,
}

impl<'a> Bindings<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn action(mut self, name: &str, f: impl FnMut(&mut Blackboard) -> Result<TickStatus, BtError> + 'a) -> Self {
        self.actions.insert(name.to_string(), Box::new(f));
        self
    }

    pub fn condition(mut self, name: &str, f: impl FnMut(&Blackboard) -> Result<bool, BtError> + 'a) -> Self {
        self.conditions.insert(name.to_string(), Box::new(f));
        self
    }
}

impl BehaviorHost for Bindings<'_> {
    fn has_behavior(&self, name: &str) -> bool {
        self.actions.contains_key(name) || self.conditions.contains_key(name)
    }

    fn action(&mut self, name: &str, bb: &mut Blackboard) -> Result<TickStatus, BtError> {
        match self.actions.get_mut(name) {
            Some(f) => f(bb),
            None => Err(BtError::UnboundLeaf(name.to_string())),
        }
    }

    fn condition(&mut self, name: &str, bb: &Blackboard) -> Result<bool, BtError> {
        match self.conditions.get_mut(name) {
            Some(f) => f(bb),
            None => Err(BtError::UnboundLeaf(name.to_string())),
        }
    }
}

/// A validated tree with its invocation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorTree {
    root: Node,
    trace: Vec<TraceEvent>,
}

impl BehaviorTree {
    pub fn new(root: Node) -> Result<Self, BtError> {
        root.validate()?;
        Ok(BehaviorTree { root, trace: Vec::new() })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Every leaf must have a binding in `host`.
    pub fn check_bindings(&self, host: &dyn BehaviorHost) -> Result<(), BtError> {
        match self.root.leaf_names().into_iter().find(|n| !host.has_behavior(n)) {
            Some(n) => Err(BtError::MissingBinding(n.to_string())),
            None => Ok(()),
        }
    }

    pub fn tick(&mut self, bb: &mut Blackboard, host: &mut dyn BehaviorHost) -> Result<TickStatus, BtError> {
        tick_node(&mut self.root, bb, host, &mut self.trace)
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        std::mem::take(&mut self.trace)
    }

    pub fn reset(&mut self) {
        self.root.reset();
    }
}

fn leaf_event(trace: &mut Vec<TraceEvent>, name: &str, kind: LeafKind, status: TickStatus, diag: Option<String>) {
    trace.push(TraceEvent {
        name: name.to_string(),
        kind,
        status,
        diagnostic: diag,
    });
}

fn tick_node(
    node: &mut Node,
    bb: &mut Blackboard,
    host: &mut dyn BehaviorHost,
    trace: &mut Vec<TraceEvent>,
) -> Result<TickStatus, BtError> {
    match &node.kind {
        NodeKind::Action(name) => {
            if !host.has_behavior(name) {
                return Err(BtError::UnboundLeaf(name.clone()));
            }
            let (status, diag) = match host.action(name, bb) {
                Ok(s) => (s, None),
                Err(e @ BtError::UnboundLeaf(_)) => return Err(e),
                Err(e) => (TickStatus::Failure, Some(e.to_string())),
            };
            leaf_event(trace, name, LeafKind::Action, status, diag);
            Ok(status)
        }
        NodeKind::Condition(name) => {
            if !host.has_behavior(name) {
                return Err(BtError::UnboundLeaf(name.clone()));
            }
            let (status, diag) = match host.condition(name, bb) {
                Ok(true) => (TickStatus::Success, None),
                Ok(false) => (TickStatus::Failure, None),
                Err(e @ BtError::UnboundLeaf(_)) => return Err(e),
                Err(e) => (TickStatus::Failure, Some(e.to_string())),
            };
            leaf_event(trace, name, LeafKind::Condition, status, diag);
            Ok(status)
        }
        NodeKind::Flag(key) => {
            let (status, diag) = match bb.get::<bool>(key) {
                Ok(true) => (TickStatus::Success, None),
                Ok(false) => (TickStatus::Failure, None),
                Err(e) => (TickStatus::Failure, Some(e.to_string())),
            };
            leaf_event(trace, key, LeafKind::Flag, status, diag);
            Ok(status)
        }
        NodeKind::Sequence | NodeKind::Fallback => {
            let (pass, stop) = if node.kind == NodeKind::Sequence {
                (TickStatus::Success, TickStatus::Failure)
            } else {
                (TickStatus::Failure, TickStatus::Success)
            };
            while node.memory.index < node.children.len() {
                let i = node.memory.index;
                match tick_node(&mut node.children[i], bb, host, trace)? {
                    TickStatus::Running => return Ok(TickStatus::Running),
                    s if s == pass => node.memory.index += 1,
                    _ => {
                        node.memory.index = 0;
                        return Ok(stop);
                    }
                }
            }
            node.memory.index = 0;
            Ok(pass)
        }
        NodeKind::Inverter => Ok(match tick_node(&mut node.children[0], bb, host, trace)? {
            TickStatus::Success => TickStatus::Failure,
            TickStatus::Failure => TickStatus::Success,
            TickStatus::Running => TickStatus::Running,
        }),
        NodeKind::Retry(n) => {
            let n = *n;
            loop {
                match tick_node(&mut node.children[0], bb, host, trace)? {
                    TickStatus::Running => return Ok(TickStatus::Running),
                    TickStatus::Success => {
                        node.memory = Memory::default();
                        return Ok(TickStatus::Success);
                    }
                    TickStatus::Failure => {
                        node.memory.attempts += 1;
                        if node.memory.attempts >= n {
                            node.memory = Memory::default();
                            return Ok(TickStatus::Failure);
                        }
                    }
                }
            }
        }
        NodeKind::RetryCandidates { list_key, cursor_key } => {
            if !node.memory.active {
                let budget = match bb.get_value(list_key) {
                    Ok(serde_json::Value::Array(a)) => a.len() as u32,
                    Ok(_) => {
                        let msg = format!("blackboard key {list_key:?} is not a list");
                        leaf_event(trace, "retry-candidates", LeafKind::Decorator, TickStatus::Failure, Some(msg));
                        return Ok(TickStatus::Failure);
                    }
                    Err(e) => {
                        let msg = e.to_string();
                        leaf_event(trace, "retry-candidates", LeafKind::Decorator, TickStatus::Failure, Some(msg));
                        return Ok(TickStatus::Failure);
                    }
                };
                if budget == 0 {
                    return Ok(TickStatus::Failure);
                }
                bb.set(cursor_key, 0usize);
                node.memory = Memory {
                    budget,
                    active: true,
                    ..Memory::default()
                };
            }
            loop {
                match tick_node(&mut node.children[0], bb, host, trace)? {
                    TickStatus::Running => return Ok(TickStatus::Running),
                    TickStatus::Success => {
                        node.memory = Memory::default();
                        return Ok(TickStatus::Success);
                    }
                    TickStatus::Failure => {
                        node.memory.attempts += 1;
                        if node.memory.attempts >= node.memory.budget {
                            node.memory = Memory::default();
                            return Ok(TickStatus::Failure);
                        }
                        bb.set(cursor_key, node.memory.attempts as usize);
                    }
                }
            }
        }
    }
}
