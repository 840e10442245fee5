//! User placement preferences: a latent-factor model over
//! `(object, room, receptacle)` items plus an aggregate room knowledge base.

pub mod corpus;
pub mod kb;
pub mod model;
pub mod model_file;
pub mod ranking;

pub use corpus::{ingest_corpus, rank_to_rating, CorpusError, PlacementItem, RatingEntry, RatingsCorpus, Vocab};
pub use kb::{target_room, CommonSenseKb};
pub use model::{
    gradient, loss, predict_rating, rmse, train, train_with_history, FactorGradient, FactorModel, Hyperparameters,
    ModelError, TrainReport,
};
pub use model_file::{read_model, write_model, ModelFileError};
pub use ranking::{
    is_misplaced, placement_rank, rank_all, receptacle_candidates, top_placements, user_room_ranking, RankedItem,
    DEFAULT_TOP_K,
};

use crate::vocab::{ObjectClass, RoomId, UserId};

/// How the target room for a misplaced object is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoomChoice {
    /// Rooms ranked by the aggregate knowledge base; receptacles per user.
    #[default]
    Kb,
    /// Rooms ranked by the user's own best placement in each room.
    User,
}

impl std::str::FromStr for RoomChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kb" => Ok(RoomChoice::Kb),
            "user" => Ok(RoomChoice::User),
            other => Err(format!("room choice must be `kb` or `user`, got {other:?}")),
        }
    }
}

/// A fitted model together with the knowledge base derived from its corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Preferences {
    pub factors: FactorModel,
    pub kb: CommonSenseKb,
}

impl Preferences {
    pub fn from_corpus(corpus: &RatingsCorpus, hyper: &Hyperparameters) -> Result<Self, ModelError> {
        Ok(Preferences {
            factors: train(corpus, hyper)?,
            kb: CommonSenseKb::from_corpus(corpus),
        })
    }

    /// Target rooms for `object`, best first.
    pub fn rooms_for(&self, user: &UserId, object: &ObjectClass, choice: RoomChoice) -> Result<Vec<RoomId>, ModelError> {
        match choice {
            RoomChoice::Kb => self.kb.target_room(object),
            RoomChoice::User => user_room_ranking(&self.factors, user, object),
        }
    }

    /// `(room, receptacle)` placements to try, rooms in rank order and
    /// receptacles in user order within each room.
    pub fn placement_candidates(
        &self,
        user: &UserId,
        object: &ObjectClass,
        choice: RoomChoice,
    ) -> Result<Vec<PlacementItem>, ModelError> {
        let mut out = Vec::new();
        for room in self.rooms_for(user, object, choice)? {
            for rec in receptacle_candidates(&self.factors, user, object, &room)? {
                out.push(PlacementItem {
                    object_class: object.clone(),
                    room: room.clone(),
                    receptacle_class: rec,
                });
            }
        }
        Ok(out)
    }
}
