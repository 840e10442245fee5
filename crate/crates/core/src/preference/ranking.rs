//! Placement ranking on top of a fitted [`FactorModel`].
//!
//! Every query ranks the items that share an object class. Order is by
//! predicted score, descending, with ties going to the lower item index.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::corpus::PlacementItem;
use super::model::{FactorModel, ModelError};
use crate::vocab::{ObjectClass, ReceptacleClass, RoomId, UserId};

/// Default misplacement cut-off.
pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedItem {
    pub index: usize,
    pub item: PlacementItem,
    pub score: f64,
}

/// Numeric order on finite scores; unlike `total_cmp`, -0.0 equals 0.0 so
/// such ties fall through to the index.
pub(crate) fn score_order(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Heap entry ordered so that the *worst* ranked item is at the top.
struct Worst {
    score: f64,
    index: usize,
}

impl PartialEq for Worst {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Worst {}

impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Worst {
    fn cmp(&self, other: &Self) -> Ordering {
        // Lower score is worse; at equal score the higher index is worse.
        score_order(other.score, self.score).then(self.index.cmp(&other.index))
    }
}

fn object_items(model: &FactorModel, object: &ObjectClass) -> Result<Vec<usize>, ModelError> {
    let ids: Vec<usize> = model
        .items()
        .values()
        .iter()
        .enumerate()
        .filter(|(_, it)| it.object_class == *object)
        .map(|(i, _)| i)
        .collect();
    if ids.is_empty() {
        return Err(ModelError::UnknownObject(object.to_string()));
    }
    Ok(ids)
}

/// The `k` highest-scoring placements of `object` for `user`.
pub fn top_placements(
    model: &FactorModel,
    user: &UserId,
    object: &ObjectClass,
    k: usize,
) -> Result<Vec<RankedItem>, ModelError> {
    let u = model.user_index(user)?;
    let ids = object_items(model, object)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut heap: BinaryHeap<Worst> = BinaryHeap::with_capacity(k + 1);
    for i in ids {
        let cand = Worst {
            score: model.score(u, i),
            index: i,
        };
        if heap.len() < k {
            heap.push(cand);
        } else if let Some(worst) = heap.peek() {
            if cand < *worst {
                heap.pop();
                heap.push(cand);
            }
        }
    }
    Ok(heap
        .into_sorted_vec()
        .into_iter()
        .map(|w| RankedItem {
            index: w.index,
            item: model.items().value(w.index).clone(),
            score: w.score,
        })
        .collect())
}

/// Full ranking of every placement of `object`, best first.
pub fn rank_all(model: &FactorModel, user: &UserId, object: &ObjectClass) -> Result<Vec<RankedItem>, ModelError> {
    let n = object_items(model, object)?.len();
    top_placements(model, user, object, n)
}

fn check_location(model: &FactorModel, room: &RoomId, receptacle: ReceptacleClass) -> Result<(), ModelError> {
    let items = model.items().values();
    if !items.iter().any(|it| it.room == *room) {
        return Err(ModelError::UnknownRoom(room.to_string()));
    }
    if !items.iter().any(|it| it.receptacle_class == receptacle) {
        return Err(ModelError::UnknownReceptacle(receptacle.to_string()));
    }
    Ok(())
}

/// True when `(room, receptacle)` is not among the top `k` placements.
///
/// A location that is not an item of the object at all is misplaced.
pub fn is_misplaced(
    model: &FactorModel,
    user: &UserId,
    object: &ObjectClass,
    current: (&RoomId, ReceptacleClass),
    k: usize,
) -> Result<bool, ModelError> {
    check_location(model, current.0, current.1)?;
    let top = top_placements(model, user, object, k)?;
    Ok(!top
        .iter()
        .any(|r| r.item.room == *current.0 && r.item.receptacle_class == current.1))
}

/// 1-based rank of the current location in the full ranking, or `None` when
/// the location is not an item of the object.
pub fn placement_rank(
    model: &FactorModel,
    user: &UserId,
    object: &ObjectClass,
    current: (&RoomId, ReceptacleClass),
) -> Result<Option<usize>, ModelError> {
    check_location(model, current.0, current.1)?;
    let all = rank_all(model, user, object)?;
    Ok(all
        .iter()
        .position(|r| r.item.room == *current.0 && r.item.receptacle_class == current.1)
        .map(|p| p + 1))
}

/// Receptacles in `room` that hold `object`, best first for `user`.
pub fn receptacle_candidates(
    model: &FactorModel,
    user: &UserId,
    object: &ObjectClass,
    room: &RoomId,
) -> Result<Vec<ReceptacleClass>, ModelError> {
    let all = rank_all(model, user, object)?;
    if !model.items().values().iter().any(|it| it.room == *room) {
        return Err(ModelError::UnknownRoom(room.to_string()));
    }
    Ok(all
        .into_iter()
        .filter(|r| r.item.room == *room)
        .map(|r| r.item.receptacle_class)
        .collect())
}

/// Rooms ordered by the user's best-scoring placement of `object` in each.
/// Equal scores fall back to room name.
pub fn user_room_ranking(model: &FactorModel, user: &UserId, object: &ObjectClass) -> Result<Vec<RoomId>, ModelError> {
    let all = rank_all(model, user, object)?;
    let mut best: Vec<(RoomId, f64)> = Vec::new();
    for r in all {
        if !best.iter().any(|(room, _)| *room == r.item.room) {
            best.push((r.item.room.clone(), r.score));
        }
    }
    best.sort_by(|a, b| score_order(b.1, a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(best.into_iter().map(|(room, _)| room).collect())
}
