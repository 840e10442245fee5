//! Aggregate object→room knowledge base.
//!
//! Each corpus entry contributes `rating − scale_min` to its object's room,
//! so the score is a rating-weighted count of how often users put the
//! object in that room.

use std::collections::BTreeMap;

use super::corpus::RatingsCorpus;
use super::model::ModelError;
use crate::vocab::{ObjectClass, RoomId};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommonSenseKb {
    room_scores: BTreeMap<ObjectClass, BTreeMap<RoomId, f64>>,
}

impl CommonSenseKb {
    pub fn from_corpus(corpus: &RatingsCorpus) -> Self {
        let (min, _) = corpus.scale();
        let mut kb = CommonSenseKb::default();
        for e in corpus.entries() {
            let item = corpus.items().value(e.item);
            kb.add(item.object_class.clone(), item.room.clone(), e.rating - min);
        }
        kb
    }

    /// Adds `score` (clamped at zero) to an object's room entry.
    pub fn add(&mut self, object: ObjectClass, room: RoomId, score: f64) {
        *self
            .room_scores
            .entry(object)
            .or_default()
            .entry(room)
            .or_insert(0.0) += score.max(0.0);
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectClass> {
        self.room_scores.keys()
    }

    pub fn room_scores(&self, object: &ObjectClass) -> Option<&BTreeMap<RoomId, f64>> {
        self.room_scores.get(object)
    }

    /// Rooms for `object`, highest score first, ties by room name.
    pub fn target_room(&self, object: &ObjectClass) -> Result<Vec<RoomId>, ModelError> {
        let scores = self
            .room_scores
            .get(object)
            .ok_or_else(|| ModelError::UnknownObject(object.to_string()))?;
        let mut rooms: Vec<(&RoomId, f64)> = scores.iter().map(|(r, s)| (r, *s)).collect();
        rooms.sort_by(|a, b| super::ranking::score_order(b.1, a.1).then_with(|| a.0.cmp(b.0)));
        Ok(rooms.into_iter().map(|(r, _)| r.clone()).collect())
    }
}

/// Free-function form of [`CommonSenseKb::target_room`].
pub fn target_room(kb: &CommonSenseKb, object: &ObjectClass) -> Result<Vec<RoomId>, ModelError> {
    kb.target_room(object)
}
