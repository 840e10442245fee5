//! The canonical tidy-up tree and the drawer placement subtree.

use super::node::{BehaviorHost, BehaviorTree, Node};
use super::BtError;

pub const IDENTIFY_MISPLACED: &str = "IdentifyMisplaced";
pub const PLACEMENT_CANDIDATES: &str = "PlacementCandidates";
pub const PICKUP: &str = "PickupBehavior";
pub const ROOM_NAVIGATOR: &str = "RoomNavigator";
pub const RECEPTACLE_NAVIGATOR: &str = "ReceptacleNavigator";
pub const PLACE: &str = "PlaceBehavior";

pub const APPROACH_DRAWER: &str = "ApproachDrawer";
pub const FIND_TEMP_LOCATION: &str = "FindTempLocation";
pub const SET_DOWN_TEMPORARY: &str = "SetDownTemporary";
pub const OPEN_DRAWER: &str = "OpenDrawer";
pub const RE_PICK_OBJECT: &str = "RePickObject";
pub const PLACE_INSIDE: &str = "PlaceInside";

/// Blackboard key holding the candidate placement list.
pub const CANDIDATES_KEY: &str = "placement_candidates";
/// Blackboard key holding the index of the candidate being attempted.
pub const CURSOR_KEY: &str = "candidate_cursor";
/// Blackboard flag set when the target drawer is already open.
pub const DRAWER_OPEN_KEY: &str = "drawer_open";

pub const TIDY_LEAVES: [&str; 6] = [
    IDENTIFY_MISPLACED,
    PLACEMENT_CANDIDATES,
    PICKUP,
    ROOM_NAVIGATOR,
    RECEPTACLE_NAVIGATOR,
    PLACE,
];

pub const DRAWER_LEAVES: [&str; 6] = [
    APPROACH_DRAWER,
    FIND_TEMP_LOCATION,
    SET_DOWN_TEMPORARY,
    OPEN_DRAWER,
    RE_PICK_OBJECT,
    PLACE_INSIDE,
];

/// `Sequence[IdentifyMisplaced, PlacementCandidates, PickupBehavior,
/// RetryCandidates(Sequence[RoomNavigator, ReceptacleNavigator, PlaceBehavior])]`
pub fn tidy_tree() -> Node {
    Node::sequence(vec![
        Node::action(IDENTIFY_MISPLACED),
        Node::action(PLACEMENT_CANDIDATES),
        Node::action(PICKUP),
        Node::retry_candidates(
            CANDIDATES_KEY,
            CURSOR_KEY,
            Node::sequence(vec![
                Node::action(ROOM_NAVIGATOR),
                Node::action(RECEPTACLE_NAVIGATOR),
                Node::action(PLACE),
            ]),
        ),
    ])
}

/// `Sequence[ApproachDrawer, Fallback[drawer_open?, Sequence[FindTempLocation,
/// SetDownTemporary, OpenDrawer, RePickObject]], PlaceInside]`
pub fn drawer_place_tree() -> Node {
    Node::sequence(vec![
        Node::action(APPROACH_DRAWER),
        Node::fallback(vec![
            Node::flag(DRAWER_OPEN_KEY),
            Node::sequence(vec![
                Node::action(FIND_TEMP_LOCATION),
                Node::action(SET_DOWN_TEMPORARY),
                Node::action(OPEN_DRAWER),
                Node::action(RE_PICK_OBJECT),
            ]),
        ]),
        Node::action(PLACE_INSIDE),
    ])
}

fn bound(root: Node, leaves: &[&str], host: &dyn BehaviorHost) -> Result<BehaviorTree, BtError> {
    if let Some(missing) = leaves.iter().find(|l| !host.has_behavior(l)) {
        return Err(BtError::MissingBinding(missing.to_string()));
    }
    BehaviorTree::new(root)
}

pub fn build_tidy_tree(host: &dyn BehaviorHost) -> Result<BehaviorTree, BtError> {
    bound(tidy_tree(), &TIDY_LEAVES, host)
}

pub fn build_drawer_place_tree(host: &dyn BehaviorHost) -> Result<BehaviorTree, BtError> {
    bound(drawer_place_tree(), &DRAWER_LEAVES, host)
}
