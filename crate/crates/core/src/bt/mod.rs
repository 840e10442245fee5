//! Behavior-tree runtime: memory-full control nodes, retry decorators, a
//! JSON blackboard, and the tidy-up trees built from them.

pub mod blackboard;
pub mod node;
pub mod text;
pub mod trees;

use thiserror::Error;

pub use blackboard::Blackboard;
pub use node::{BehaviorHost, BehaviorTree, Bindings, LeafKind, Node, NodeKind, TickStatus, TraceEvent};
pub use text::{parse_tree, tree_to_text};
pub use trees::{build_drawer_place_tree, build_tidy_tree, drawer_place_tree, tidy_tree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BtError {
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("leaf {0:?} has no binding")]
    UnboundLeaf(String),
    #[error("missing binding for {0:?}")]
    MissingBinding(String),
    #[error("blackboard key {0:?} is missing")]
    BlackboardKeyMissing(String),
    #[error("blackboard key {key:?} has the wrong type: {message}")]
    BlackboardType { key: String, message: String },
    #[error("tree text line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Behavior(String),
}
