//! Identifier newtypes for rooms, objects, users and receptacle classes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }
    };
}

string_id!(
    /// Room label, e.g. `kitchen`.
    RoomId
);
string_id!(
    /// Object category, e.g. `mustard_bottle`.
    ObjectClass
);
string_id!(
    /// Identity of a user whose placement preferences were rated.
    UserId
);

/// Surface or container category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReceptacleClass {
    Table,
    Counter,
    Shelf,
    Drawer,
    Sink,
    Sofa,
}

impl ReceptacleClass {
    pub const ALL: [ReceptacleClass; 6] = [
        ReceptacleClass::Table,
        ReceptacleClass::Counter,
        ReceptacleClass::Shelf,
        ReceptacleClass::Drawer,
        ReceptacleClass::Sink,
        ReceptacleClass::Sofa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReceptacleClass::Table => "table",
            ReceptacleClass::Counter => "counter",
            ReceptacleClass::Shelf => "shelf",
            ReceptacleClass::Drawer => "drawer",
            ReceptacleClass::Sink => "sink",
            ReceptacleClass::Sofa => "sofa",
        }
    }

    /// Classes that may carry the `openable` flag.
    pub fn can_open(self) -> bool {
        matches!(self, ReceptacleClass::Drawer)
    }

    /// Flat surfaces usable as a temporary set-down spot.
    pub fn is_flat(self) -> bool {
        matches!(
            self,
            ReceptacleClass::Table | ReceptacleClass::Counter | ReceptacleClass::Shelf
        )
    }

    /// Single-character glyph used by map renders.
    pub fn glyph(self) -> char {
        match self {
            ReceptacleClass::Table => 't',
            ReceptacleClass::Counter => 'c',
            ReceptacleClass::Shelf => 's',
            ReceptacleClass::Drawer => 'd',
            ReceptacleClass::Sink => 'k',
            ReceptacleClass::Sofa => 'o',
        }
    }
}

impl fmt::Display for ReceptacleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown receptacle class {0:?}")]
pub struct UnknownReceptacleClass(pub String);

impl FromStr for ReceptacleClass {
    type Err = UnknownReceptacleClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        ReceptacleClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| UnknownReceptacleClass(t.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn receptacle_names_round_trip() {
        for c in ReceptacleClass::ALL {
            assert_eq!(c.name().parse::<ReceptacleClass>().unwrap(), c);
        }
        assert!("bathtub".parse::<ReceptacleClass>().is_err());
    }

    #[test]
    fn only_drawers_open() {
        let openable: Vec<_> = ReceptacleClass::ALL.into_iter().filter(|c| c.can_open()).collect();
        assert_eq!(openable, vec![ReceptacleClass::Drawer]);
    }
}
