pub mod bt;
pub mod episode;
pub mod fixtures;
pub mod geometry;
pub mod nav;
pub mod preference;
pub mod semantic_map;
pub mod sim;
pub mod vocab;
