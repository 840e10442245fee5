//! Indented text form of a tree.
//!
//! One node per line, two spaces of indentation per depth level:
//!
//! ```text
//! sequence
//!   action IdentifyMisplaced
//!   retry-candidates placement_candidates candidate_cursor
//!     fallback
//!       flag drawer_open
//!       inverter
//!         condition HandEmpty
//!   retry 3
//!     action PlaceBehavior
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use super::node::{Node, NodeKind};
use super::BtError;

fn perr(line: usize, message: impl Into<String>) -> BtError {
    BtError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_kind(line: usize, body: &str) -> Result<NodeKind, BtError> {
    let toks: Vec<&str> = body.split_whitespace().collect();
    Ok(match toks.as_slice() {
        ["sequence"] => NodeKind::Sequence,
        ["fallback"] => NodeKind::Fallback,
        ["inverter"] => NodeKind::Inverter,
        ["retry", n] => NodeKind::Retry(n.parse().map_err(|_| perr(line, format!("bad retry count {n:?}")))?),
        ["retry-candidates", list, cursor] => NodeKind::RetryCandidates {
            list_key: list.to_string(),
            cursor_key: cursor.to_string(),
        },
        ["action", name] => NodeKind::Action(name.to_string()),
        ["condition", name] => NodeKind::Condition(name.to_string()),
        ["flag", key] => NodeKind::Flag(key.to_string()),
        _ => return Err(perr(line, format!("unrecognized node {body:?}"))),
    })
}

/// Parses and validates a tree.
pub fn parse_tree(text: &str) -> Result<Node, BtError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim_start_matches(' ');
        if body.trim().is_empty() || body.starts_with('#') {
            continue;
        }
        let indent = raw.len() - body.len();
        if indent % 2 != 0 || body.starts_with('\t') {
            return Err(perr(line, "indentation must be a multiple of two spaces"));
        }
        rows.push((line, indent / 2, parse_kind(line, body)?));
    }
    if rows.is_empty() {
        return Err(perr(1, "empty tree"));
    }
    if rows[0].1 != 0 {
        return Err(perr(rows[0].0, "root must not be indented"));
    }

    // Stack of (depth, node under construction).
    let mut stack: Vec<(usize, Node)> = Vec::new();
    let mut root = None;
    for (line, depth, kind) in rows {
        while stack.last().is_some_and(|(d, _)| *d >= depth) {
            let (_, done) = stack.pop().expect("non-empty");
            attach(&mut stack, &mut root, done);
        }
        match stack.last() {
            Some((d, _)) if depth != d + 1 => return Err(perr(line, "indentation skips a level")),
            None if root.is_some() => return Err(perr(line, "more than one root node")),
            _ => {}
        }
        stack.push((depth, Node::with(kind, Vec::new())));
    }
    while let Some((_, done)) = stack.pop() {
        attach(&mut stack, &mut root, done);
    }
    let root = root.expect("at least one row");
    root.validate()?;
    Ok(root)
}

fn attach(stack: &mut [(usize, Node)], root: &mut Option<Node>, done: Node) {
    match stack.last_mut() {
        Some((_, parent)) => parent.push_child(done),
        None => *root = Some(done),
    }
}

pub fn tree_to_text(node: &Node) -> String {
    let mut out = String::new();
    write_node(node, 0, &mut out);
    out
}

fn write_node(node: &Node, depth: usize, out: &mut String) {
    out.push_str(&"  ".repeat(depth));
    match node.kind() {
        NodeKind::Sequence => out.push_str("sequence"),
        NodeKind::Fallback => out.push_str("fallback"),
        NodeKind::Inverter => out.push_str("inverter"),
        NodeKind::Retry(n) => out.push_str(&format!("retry {n}")),
        NodeKind::RetryCandidates { list_key, cursor_key } => {
            out.push_str(&format!("retry-candidates {list_key} {cursor_key}"))
        }
        NodeKind::Action(n) => out.push_str(&format!("action {n}")),
        NodeKind::Condition(n) => out.push_str(&format!("condition {n}")),
        NodeKind::Flag(k) => out.push_str(&format!("flag {k}")),
    }
    out.push('\n');
    for c in node.children() {
        write_node(c, depth + 1, out);
    }
}
