//! Bundled apartment, preference corpus, trained model and scenarios.
//!
//! The corpus is generated deterministically by [`generate_corpus`]: three
//! reference users with fully ranked placements plus background users that
//! are noisy, partially observed copies of them. The shipped model is the
//! result of training on it with default hyperparameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::preference::{read_model, Preferences};
use crate::vocab::ReceptacleClass::{self, Counter, Drawer, Shelf, Sink, Sofa, Table};

pub const APARTMENT_MAP: &str = include_str!("../fixtures/apartment.map");
pub const CORPUS_CSV: &str = include_str!("../fixtures/preferences.csv");
pub const MODEL: &str = include_str!("../fixtures/preferences.model");

/// `(file name, contents)` of every bundled scenario.
pub const SCENARIOS: [(&str, &str); 7] = [
    ("two_objects.scenario", include_str!("../fixtures/two_objects.scenario")),
    ("divergence_u1.scenario", include_str!("../fixtures/divergence_u1.scenario")),
    ("divergence_u2.scenario", include_str!("../fixtures/divergence_u2.scenario")),
    ("drawer.scenario", include_str!("../fixtures/drawer.scenario")),
    ("retry_first.scenario", include_str!("../fixtures/retry_first.scenario")),
    ("retry_all.scenario", include_str!("../fixtures/retry_all.scenario")),
    ("none_misplaced.scenario", include_str!("../fixtures/none_misplaced.scenario")),
];

pub fn scenario(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".scenario").unwrap_or(name);
    SCENARIOS
        .iter()
        .find(|(n, _)| n.strip_suffix(".scenario") == Some(name))
        .map(|(_, t)| *t)
}

/// Receptacle classes present in each apartment room.
pub const ROOM_RECEPTACLES: [(&str, &[ReceptacleClass]); 3] = [
    ("office", &[Shelf, Table, Drawer]),
    ("kitchen", &[Counter, Table, Drawer, Shelf, Sink]),
    ("livingroom", &[Drawer, Table, Sofa, Shelf]),
];

/// Three rooms in preference order, each with its two best receptacles.
pub type Preferred = [(&'static str, [ReceptacleClass; 2]); 3];

pub const OBJECTS: [&str; 8] = [
    "rubiks_cube",
    "mustard_bottle",
    "marker",
    "cracker_box",
    "bleach_cleanser",
    "gelatin_box",
    "potted_meat_can",
    "mug",
];

/// Preferred placements of the two reference users, per object.
pub const REFERENCE_PLACEMENTS: [(&str, Preferred, Preferred); 8] = [
    (
        "rubiks_cube",
        [("office", [Shelf, Table]), ("kitchen", [Counter, Table]), ("livingroom", [Drawer, Table])],
        [("livingroom", [Drawer, Table]), ("office", [Table, Drawer]), ("kitchen", [Drawer, Table])],
    ),
    (
        "mustard_bottle",
        [("kitchen", [Drawer, Counter]), ("livingroom", [Table, Sofa]), ("office", [Table, Drawer])],
        [("kitchen", [Shelf, Counter]), ("livingroom", [Table, Drawer]), ("office", [Drawer, Table])],
    ),
    (
        "marker",
        [("livingroom", [Drawer, Shelf]), ("office", [Table, Drawer]), ("kitchen", [Drawer, Table])],
        [("office", [Table, Drawer]), ("kitchen", [Table, Drawer]), ("livingroom", [Table, Shelf])],
    ),
    (
        "cracker_box",
        [("kitchen", [Drawer, Table]), ("livingroom", [Drawer, Table]), ("office", [Drawer, Shelf])],
        [("office", [Shelf, Drawer]), ("kitchen", [Drawer, Table]), ("livingroom", [Drawer, Sofa])],
    ),
    (
        "bleach_cleanser",
        [("livingroom", [Drawer, Table]), ("office", [Shelf, Table]), ("kitchen", [Shelf, Drawer])],
        [("office", [Shelf, Table]), ("kitchen", [Drawer, Table]), ("livingroom", [Table, Drawer])],
    ),
    (
        "gelatin_box",
        [("office", [Table, Shelf]), ("kitchen", [Drawer, Counter]), ("livingroom", [Drawer, Table])],
        [("livingroom", [Table, Drawer]), ("office", [Table, Shelf]), ("kitchen", [Drawer, Counter])],
    ),
    (
        "potted_meat_can",
        [("kitchen", [Counter, Shelf]), ("livingroom", [Drawer, Table]), ("office", [Drawer, Table])],
        [("office", [Drawer, Table]), ("kitchen", [Counter, Shelf]), ("livingroom", [Drawer, Table])],
    ),
    (
        "mug",
        [("kitchen", [Counter, Sink]), ("livingroom", [Shelf, Sofa]), ("office", [Drawer, Table])],
        [("livingroom", [Table, Shelf]), ("office", [Drawer, Table]), ("kitchen", [Sink, Drawer])],
    ),
];

/// U3 agrees with U2 except for where the mustard bottle goes.
const U3_MUSTARD: Preferred = [("kitchen", [Counter, Shelf]), ("livingroom", [Table, Drawer]), ("office", [Drawer, Table])];

pub const REFERENCE_USERS: [&str; 3] = ["U1", "U2", "U3"];
const BACKGROUND_USERS: usize = 9;
const GENERATOR_SEED: u64 = 17;
const BACKGROUND_SWAPS: usize = 3;
const BACKGROUND_OBSERVED: f64 = 0.6;

/// Preferred placements of a reference user for an object.
pub fn preferred(user: &str, object: &str) -> Option<Preferred> {
    let row = REFERENCE_PLACEMENTS.iter().find(|r| r.0 == object)?;
    match user {
        "U1" => Some(row.1),
        "U2" => Some(row.2),
        "U3" if object == "mustard_bottle" => Some(U3_MUSTARD),
        "U3" => Some(row.2),
        _ => None,
    }
}

/// All twelve placements of an object, best first: the six preferred ones,
/// then the rest grouped by room in preference order.
pub fn full_ranking(pref: &Preferred) -> Vec<(&'static str, ReceptacleClass)> {
    let mut out: Vec<(&'static str, ReceptacleClass)> =
        pref.iter().flat_map(|(room, recs)| recs.iter().map(move |r| (*room, *r))).collect();
    for (room, _) in pref {
        let all = ROOM_RECEPTACLES
            .iter()
            .find(|(r, _)| r == room)
            .map(|(_, c)| *c)
            .unwrap_or_default();
        for rec in all {
            if !out.contains(&(*room, *rec)) {
                out.push((*room, *rec));
            }
        }
    }
    out
}

/// Builds the bundled corpus CSV.
pub fn generate_corpus() -> String {
    let mut out = String::from("# scale 0 1\nuser,object,room,receptacle,kind,value,rank_total\n");
    let mut row = |user: &str, object: &str, rank: usize, total: usize, room: &str, rec: ReceptacleClass| {
        out.push_str(&format!("{user},{object},{room},{rec},rank,{rank},{total}\n"));
    };
    for user in REFERENCE_USERS {
        for object in OBJECTS {
            let ranking = full_ranking(&preferred(user, object).expect("reference user"));
            for (i, (room, rec)) in ranking.iter().enumerate() {
                row(user, object, i + 1, ranking.len(), room, *rec);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(GENERATOR_SEED);
    for b in 0..BACKGROUND_USERS {
        let user = format!("B{:02}", b + 1);
        let base = REFERENCE_USERS[b % REFERENCE_USERS.len()];
        for object in OBJECTS {
            let mut ranking = full_ranking(&preferred(base, object).expect("reference user"));
            for _ in 0..BACKGROUND_SWAPS {
                let i = rng.random_range(0..ranking.len() - 1);
                ranking.swap(i, i + 1);
            }
            let observed: Vec<usize> =
                (0..ranking.len()).filter(|_| rng.random_bool(BACKGROUND_OBSERVED)).collect();
            for i in observed {
                let (room, rec) = ranking[i];
                row(&user, object, i + 1, ranking.len(), room, rec);
            }
        }
    }
    out
}

/// The bundled trained model.
pub fn preferences() -> Preferences {
    read_model(MODEL).expect("bundled model parses")
}
