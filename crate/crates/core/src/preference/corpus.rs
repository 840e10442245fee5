//! Sparse ratings corpus and its CSV reader.
//!
//! Header row: `user,object,room,receptacle,kind,value[,weight][,rank_total]`.
//! `kind` is `rating` (value is the score) or `rank` (value is a 1-based
//! rank out of `rank_total`). Ranks map linearly onto the rating scale so
//! that rank 1 lands on the maximum and rank `rank_total` on the minimum.
//!
//! The scale defaults to `[0, 1]` and can be changed with a leading
//! `# scale MIN MAX` line.

use std::collections::HashMap;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab::{ObjectClass, ReceptacleClass, RoomId, UserId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("corpus parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate rating for user {user} and item {item}")]
    DuplicateRating {
        line: usize,
        user: String,
        item: String,
    },
    #[error("line {line}: rating {value} outside scale [{min}, {max}]")]
    RatingOutOfScale {
        line: usize,
        value: f64,
        min: f64,
        max: f64,
    },
}

/// An object's placement on a receptacle in a room; the unit users rate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlacementItem {
    pub object_class: ObjectClass,
    pub room: RoomId,
    pub receptacle_class: ReceptacleClass,
}

impl PlacementItem {
    pub fn new(object: impl Into<ObjectClass>, room: impl Into<RoomId>, receptacle: ReceptacleClass) -> Self {
        PlacementItem {
            object_class: object.into(),
            room: room.into(),
            receptacle_class: receptacle,
        }
    }
}

impl std::fmt::Display for PlacementItem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{}/{}", self.object_class, self.room, self.receptacle_class)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingEntry {
    pub user: usize,
    pub item: usize,
    pub rating: f64,
    pub weight: f64,
}

/// Insertion-ordered bidirectional index.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocab<T: Eq + Hash + Clone> {
    values: Vec<T>,
    index: HashMap<T, usize>,
}

impl<T: Eq + Hash + Clone> Default for Vocab<T> {
    fn default() -> Self {
        Vocab {
            values: Vec::new(),
            index: HashMap::new(),
        }
    }
}

impl<T: Eq + Hash + Clone> Vocab<T> {
    pub fn from_values(values: impl IntoIterator<Item = T>) -> Self {
        let mut v = Vocab::default();
        for x in values {
            v.intern(x);
        }
        v
    }

    pub fn intern(&mut self, value: T) -> usize {
        if let Some(&i) = self.index.get(&value) {
            return i;
        }
        self.values.push(value.clone());
        self.index.insert(value, self.values.len() - 1);
        self.values.len() - 1
    }

    pub fn get(&self, value: &T) -> Option<usize> {
        self.index.get(value).copied()
    }

    pub fn value(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Maps rank `rank` (1-based) of `total` onto `[min, max]`, rank 1 → max.
pub fn rank_to_rating(rank: usize, total: usize, min: f64, max: f64) -> f64 {
    if total <= 1 {
        return max;
    }
    max - (rank as f64 - 1.0) * (max - min) / (total as f64 - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatingsCorpus {
    entries: Vec<RatingEntry>,
    users: Vocab<UserId>,
    items: Vocab<PlacementItem>,
    scale: (f64, f64),
}

impl RatingsCorpus {
    /// Builds a corpus from in-memory entries. Vocabularies are taken as
    /// given; entries must reference valid indices and be unique per pair.
    pub fn from_parts(
        users: Vocab<UserId>,
        items: Vocab<PlacementItem>,
        entries: Vec<RatingEntry>,
        scale: (f64, f64),
    ) -> Result<Self, CorpusError> {
        let mut seen = std::collections::HashSet::new();
        for (n, e) in entries.iter().enumerate() {
            let line = n + 1;
            if e.user >= users.len() || e.item >= items.len() {
                return Err(CorpusError::Parse {
                    line,
                    message: "entry index outside vocabulary".into(),
                });
            }
            if !seen.insert((e.user, e.item)) {
                return Err(CorpusError::DuplicateRating {
                    line,
                    user: users.value(e.user).to_string(),
                    item: items.value(e.item).to_string(),
                });
            }
            if !(scale.0..=scale.1).contains(&e.rating) {
                return Err(CorpusError::RatingOutOfScale {
                    line,
                    value: e.rating,
                    min: scale.0,
                    max: scale.1,
                });
            }
            if !(e.weight >= 0.0 && e.weight.is_finite()) {
                return Err(CorpusError::Parse {
                    line,
                    message: format!("weight {} must be a finite nonnegative number", e.weight),
                });
            }
        }
        Ok(RatingsCorpus {
            entries,
            users,
            items,
            scale,
        })
    }

    pub fn entries(&self) -> &[RatingEntry] {
        &self.entries
    }

    pub fn users(&self) -> &Vocab<UserId> {
        &self.users
    }

    pub fn items(&self) -> &Vocab<PlacementItem> {
        &self.items
    }

    pub fn scale(&self) -> (f64, f64) {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same vocabularies, different entries. Used for train/holdout splits.
    pub fn with_entries(&self, entries: Vec<RatingEntry>) -> RatingsCorpus {
        RatingsCorpus {
            entries,
            users: self.users.clone(),
            items: self.items.clone(),
            scale: self.scale,
        }
    }

    /// Seeded random split into `(train, held_out)` with roughly `fraction`
    /// of the entries held out. Entry order is preserved within each part.
    pub fn split_holdout(&self, fraction: f64, seed: u64) -> (RatingsCorpus, RatingsCorpus) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fraction = fraction.clamp(0.0, 1.0);
        let (held, train): (Vec<RatingEntry>, Vec<RatingEntry>) =
            self.entries.iter().partition(|_| rng.random_bool(fraction));
        (self.with_entries(train), self.with_entries(held))
    }
}

fn parse_scale_directive(text: &str) -> Result<Option<(f64, f64)>, CorpusError> {
    let Some(first) = text.lines().next() else {
        return Ok(None);
    };
    let Some(rest) = first.trim().strip_prefix('#') else {
        return Ok(None);
    };
    let toks: Vec<&str> = rest.split_whitespace().collect();
    match toks.as_slice() {
        ["scale", lo, hi] => {
            let bad = || CorpusError::Parse {
                line: 1,
                message: format!("invalid scale directive {first:?}"),
            };
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(bad());
            }
            Ok(Some((lo, hi)))
        }
        _ => Ok(None),
    }
}

/// Reads a corpus CSV.
pub fn ingest_corpus(text: &str) -> Result<RatingsCorpus, CorpusError> {
    let scale = parse_scale_directive(text)?.unwrap_or((0.0, 1.0));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = ["user", "object", "room", "receptacle", "kind", "value"];
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(required) {
        *slot = col(name).ok_or_else(|| CorpusError::Parse {
            line: 1,
            message: format!("missing column {name:?}"),
        })?;
    }
    let weight_col = col("weight");
    let total_col = col("rank_total");

    let mut users = Vocab::default();
    let mut items = Vocab::default();
    let mut entries = Vec::new();
    let mut seen = HashMap::new();

    for rec in reader.records() {
        let rec = rec.map_err(|e| CorpusError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| CorpusError::Parse { line, message };
        let field = |i: usize| rec.get(i).unwrap_or("");
        let opt_field = |c: Option<usize>| c.map(field).filter(|s| !s.is_empty());

        let [u, o, r, c, k, v] = idx.map(field);
        if u.is_empty() || o.is_empty() || r.is_empty() {
            return Err(err("user, object and room must be non-empty".into()));
        }
        let receptacle: ReceptacleClass = c.parse().map_err(|e: crate::vocab::UnknownReceptacleClass| err(e.to_string()))?;
        let rating = match k {
            "rating" => v.parse::<f64>().map_err(|_| err(format!("invalid rating {v:?}")))?,
            "rank" => {
                let rank: usize = v.parse().map_err(|_| err(format!("invalid rank {v:?}")))?;
                let total: usize = opt_field(total_col)
                    .ok_or_else(|| err("rank row without rank_total".into()))?
                    .parse()
                    .map_err(|_| err("invalid rank_total".into()))?;
                if rank == 0 || rank > total {
                    return Err(err(format!("rank {rank} outside 1..={total}")));
                }
                rank_to_rating(rank, total, scale.0, scale.1)
            }
            other => return Err(err(format!("unknown kind {other:?}"))),
        };
        if !rating.is_finite() || !(scale.0..=scale.1).contains(&rating) {
            return Err(CorpusError::RatingOutOfScale {
                line,
                value: rating,
                min: scale.0,
                max: scale.1,
            });
        }
        let weight = match opt_field(weight_col) {
            None => 1.0,
            Some(w) => {
                let w: f64 = w.parse().map_err(|_| err(format!("invalid weight {w:?}")))?;
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(err(format!("weight {w} must be a finite nonnegative number")));
                }
                w
            }
        };

        let user = users.intern(UserId::new(u));
        let item = items.intern(PlacementItem::new(o, r, receptacle));
        if let Some(_prev) = seen.insert((user, item), line) {
            return Err(CorpusError::DuplicateRating {
                line,
                user: u.to_string(),
                item: items.value(item).to_string(),
            });
        }
        entries.push(RatingEntry {
            user,
            item,
            rating,
            weight,
        });
    }

    Ok(RatingsCorpus {
        entries,
        users,
        items,
        scale,
    })
}
