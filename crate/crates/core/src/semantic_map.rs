//! Occupancy grid with room annotations and a registry of receptacles
//! discovered while the robot moves around.
//!
//! # Map file format
//!
//! UTF-8 text, one directive per line. Blank lines and lines starting with
//! `//` are ignored outside the grid block.
//!
//! ```text
//! width 5
//! height 3
//! resolution 0.05
//! grid
//! #####
//! #..?#
//! #####
//! room office 0 0 4 2
//! receptacle drawer 3 1 openable
//! ```
//!
//! * `grid` is followed by exactly `height` rows of `width` glyphs:
//!   `.` free, `#` occupied, `?` unknown.
//! * `room <name> x0 y0 x1 y1` labels an inclusive rectangle. Later lines
//!   overwrite earlier ones where they overlap.
//! * `receptacle <class> x y [openable]` adds a static record. The cell is
//!   marked occupied and must carry a room label.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Cell, GridPose, Heading};
use crate::vocab::{ReceptacleClass, RoomId};

/// Same-class detections closer than this (chessboard metric) are merged
/// into one registry record.
pub const MERGE_RADIUS: i32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("inconsistent dimensions: {0}")]
    InconsistentDimensions(String),
    #[error("line {line}: cell ({x},{y}) has no room label")]
    UnknownRoomLabel { line: usize, x: i32, y: i32 },
    #[error("unknown room {0:?}")]
    UnknownRoom(RoomId),
    #[error("room {0:?} has no free cell")]
    RoomHasNoFreeCell(RoomId),
    #[error("cell {0} is outside the map")]
    OutOfBounds(Cell),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
}

impl CellState {
    fn glyph(self) -> char {
        match self {
            CellState::Free => '.',
            CellState::Occupied => '#',
            CellState::Unknown => '?',
        }
    }

    fn from_glyph(c: char) -> Option<Self> {
        match c {
            '.' => Some(CellState::Free),
            '#' => Some(CellState::Occupied),
            '?' => Some(CellState::Unknown),
            _ => None,
        }
    }
}

/// Inclusive axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Rect {
    pub fn contains(&self, c: Cell) -> bool {
        (self.x0..=self.x1).contains(&c.x) && (self.y0..=self.y1).contains(&c.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceptacleRecord {
    pub receptacle_class: ReceptacleClass,
    pub room: RoomId,
    pub position: Cell,
    pub openable: bool,
    pub last_observed_tick: u64,
}

/// A receptacle sighting to fold into the registry.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceptacleObservation {
    pub receptacle_class: ReceptacleClass,
    pub position: Cell,
    pub openable: bool,
    pub tick: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticMap {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<CellState>,
    room_labels: Vec<Option<usize>>,
    /// Room table, in order of first declaration.
    rooms: Vec<RoomId>,
    /// Label rectangles as declared, kept for serialization.
    label_rects: Vec<(usize, Rect)>,
    receptacles: Vec<ReceptacleRecord>,
}

impl SemanticMap {
    /// An unlabeled map with every cell set to `fill`.
    pub fn new(width: usize, height: usize, resolution: f64, fill: CellState) -> Self {
        SemanticMap {
            width,
            height,
            resolution,
            cells: vec![fill; width * height],
            room_labels: vec![None; width * height],
            rooms: Vec::new(),
            label_rects: Vec::new(),
            receptacles: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn rooms(&self) -> &[RoomId] {
        &self.rooms
    }

    pub fn receptacles(&self) -> &[ReceptacleRecord] {
        &self.receptacles
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as usize) < self.width && (c.y as usize) < self.height
    }

    fn index(&self, c: Cell) -> Option<usize> {
        self.in_bounds(c)
            .then(|| c.y as usize * self.width + c.x as usize)
    }

    /// Out-of-bounds cells read as `Unknown`.
    pub fn cell(&self, c: Cell) -> CellState {
        self.index(c).map_or(CellState::Unknown, |i| self.cells[i])
    }

    pub fn set_cell(&mut self, c: Cell, state: CellState) -> Result<(), MapError> {
        let i = self.index(c).ok_or(MapError::OutOfBounds(c))?;
        self.cells[i] = state;
        Ok(())
    }

    pub fn room_at(&self, c: Cell) -> Option<&RoomId> {
        self.index(c)
            .and_then(|i| self.room_labels[i])
            .map(|r| &self.rooms[r])
    }

    /// Labels `rect` with `room`, adding the room to the table if new.
    pub fn label_room(&mut self, room: RoomId, rect: Rect) -> Result<(), MapError> {
        for corner in [Cell::new(rect.x0, rect.y0), Cell::new(rect.x1, rect.y1)] {
            if !self.in_bounds(corner) {
                return Err(MapError::OutOfBounds(corner));
            }
        }
        let idx = match self.rooms.iter().position(|r| *r == room) {
            Some(i) => i,
            None => {
                self.rooms.push(room);
                self.rooms.len() - 1
            }
        };
        for y in rect.y0..=rect.y1 {
            for x in rect.x0..=rect.x1 {
                let i = y as usize * self.width + x as usize;
                self.room_labels[i] = Some(idx);
            }
        }
        self.label_rects.push((idx, rect));
        Ok(())
    }

    /// All cells carrying `room`'s label, row-major.
    pub fn room_cells(&self, room: &RoomId) -> Result<Vec<Cell>, MapError> {
        let idx = self
            .rooms
            .iter()
            .position(|r| r == room)
            .ok_or_else(|| MapError::UnknownRoom(room.clone()))?;
        Ok((0..self.cells.len())
            .filter(|&i| self.room_labels[i] == Some(idx))
            .map(|i| Cell::new((i % self.width) as i32, (i / self.width) as i32))
            .collect())
    }

    /// The labeled cell nearest the room centroid, restricted to free cells.
    ///
    /// Ties go to the first cell in row-major order.
    pub fn room_center(&self, room: &RoomId) -> Result<GridPose, MapError> {
        let cells = self.room_cells(room)?;
        let n = cells.len() as f64;
        let cx = cells.iter().map(|c| f64::from(c.x)).sum::<f64>() / n;
        let cy = cells.iter().map(|c| f64::from(c.y)).sum::<f64>() / n;
        let d2 = |c: &Cell| (f64::from(c.x) - cx).powi(2) + (f64::from(c.y) - cy).powi(2);

        let mut best: Option<(f64, Cell)> = None;
        for c in cells.iter().filter(|c| self.cell(**c) == CellState::Free) {
            let d = d2(c);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, *c));
            }
        }
        best.map(|(_, c)| GridPose::new(c.x, c.y, Heading::default()))
            .ok_or_else(|| MapError::RoomHasNoFreeCell(room.clone()))
    }

    /// Folds a detection into the registry and returns the record index.
    ///
    /// The nearest same-class record within [`MERGE_RADIUS`] is moved to the
    /// observed position, unless that would bring it within the radius of
    /// another same-class record, in which case it only refreshes. With no
    /// record nearby a new one is appended. The registry never shrinks, and
    /// the receptacle's cell becomes occupied.
    pub fn register_receptacle(&mut self, obs: &ReceptacleObservation) -> Result<usize, MapError> {
        let pos = obs.position;
        let i = self.index(pos).ok_or(MapError::OutOfBounds(pos))?;
        let room = self
            .room_at(pos)
            .cloned()
            .ok_or(MapError::UnknownRoomLabel {
                line: 0,
                x: pos.x,
                y: pos.y,
            })?;
        self.cells[i] = CellState::Occupied;

        let nearest = self
            .receptacles
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                r.receptacle_class == obs.receptacle_class && r.position.chebyshev(pos) <= MERGE_RADIUS
            })
            .min_by_key(|(j, r)| (r.position.chebyshev(pos), *j))
            .map(|(j, _)| j);

        match nearest {
            Some(j) => {
                // Moving onto the new position must not crowd another
                // same-class record; if it would, keep the old position.
                let crowded = self.receptacles.iter().enumerate().any(|(k, r)| {
                    k != j && r.receptacle_class == obs.receptacle_class && r.position.chebyshev(pos) <= MERGE_RADIUS
                });
                let rec = &mut self.receptacles[j];
                if !crowded {
                    rec.position = pos;
                    rec.room = room;
                }
                rec.openable |= obs.openable;
                rec.last_observed_tick = rec.last_observed_tick.max(obs.tick);
                Ok(j)
            }
            None => {
                self.receptacles.push(ReceptacleRecord {
                    receptacle_class: obs.receptacle_class,
                    room,
                    position: pos,
                    openable: obs.openable,
                    last_observed_tick: obs.tick,
                });
                Ok(self.receptacles.len() - 1)
            }
        }
    }

    /// Drops every registry record, leaving the occupancy grid untouched.
    pub fn clear_receptacles(&mut self) {
        self.receptacles.clear();
    }

    pub fn receptacles_in_room(&self, room: &RoomId) -> Result<Vec<&ReceptacleRecord>, MapError> {
        if !self.rooms.contains(room) {
            return Err(MapError::UnknownRoom(room.clone()));
        }
        Ok(self.receptacles.iter().filter(|r| r.room == *room).collect())
    }

    /// Writes the map back out in the file format.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "width {}", self.width);
        let _ = writeln!(out, "height {}", self.height);
        let _ = writeln!(out, "resolution {}", self.resolution);
        out.push_str("grid\n");
        for row in self.cells.chunks(self.width.max(1)) {
            out.extend(row.iter().map(|c| c.glyph()));
            out.push('\n');
        }
        for (room, r) in &self.label_rects {
            let _ = writeln!(out, "room {} {} {} {} {}", self.rooms[*room], r.x0, r.y0, r.x1, r.y1);
        }
        for rec in &self.receptacles {
            let _ = write!(
                out,
                "receptacle {} {} {}",
                rec.receptacle_class, rec.position.x, rec.position.y
            );
            out.push_str(if rec.openable { " openable\n" } else { "\n" });
        }
        out
    }

    /// Text rendering; `overlay` cells are drawn as `*` on top of everything.
    pub fn render(&self, overlay: Option<&[Cell]>) -> String {
        let mut grid: Vec<char> = self.cells.iter().map(|c| c.glyph()).collect();
        for rec in &self.receptacles {
            if let Some(i) = self.index(rec.position) {
                let g = rec.receptacle_class.glyph();
                grid[i] = if rec.openable { g.to_ascii_uppercase() } else { g };
            }
        }
        for c in overlay.unwrap_or_default() {
            if let Some(i) = self.index(*c) {
                grid[i] = '*';
            }
        }
        let mut out = String::with_capacity(grid.len() + self.height);
        for row in grid.chunks(self.width.max(1)) {
            out.extend(row);
            out.push('\n');
        }
        out
    }

    /// Binary PPM (P6) rendering with `scale`×`scale` pixels per cell.
    pub fn render_ppm(&self, overlay: Option<&[Cell]>, scale: usize) -> Vec<u8> {
        let scale = scale.max(1);
        let text = self.render(overlay);
        let rows: Vec<Vec<char>> = text.lines().map(|l| l.chars().collect()).collect();
        let (w, h) = (self.width * scale, self.height * scale);
        let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
        for py in 0..h {
            for px in 0..w {
                let ch = rows[py / scale][px / scale];
                let rgb: [u8; 3] = match ch {
                    '.' => [240, 240, 240],
                    '#' => [30, 30, 30],
                    '?' => [128, 128, 128],
                    '*' => [220, 40, 40],
                    _ => [40, 90, 200],
                };
                out.extend_from_slice(&rgb);
            }
        }
        out
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> MapError {
    MapError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, MapError> {
    let tok = tok.ok_or_else(|| parse_err(line, 1, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, 1, format!("invalid {what} {tok:?}")))
}

/// Parses a map file. Nothing is returned on error.
pub fn load_map(text: &str) -> Result<SemanticMap, MapError> {
    let mut width: Option<usize> = None;
    let mut height: Option<usize> = None;
    let mut resolution = 0.05;
    let mut map: Option<SemanticMap> = None;

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((ln, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or_default();
        match key {
            "width" => width = Some(parse_num(toks.next(), ln, "width")?),
            "height" => height = Some(parse_num(toks.next(), ln, "height")?),
            "resolution" => {
                resolution = parse_num(toks.next(), ln, "resolution")?;
                if !(resolution > 0.0 && f64::is_finite(resolution)) {
                    return Err(parse_err(ln, 1, "resolution must be positive"));
                }
            }
            "grid" => {
                let (w, h) = match (width, height) {
                    (Some(w), Some(h)) if w > 0 && h > 0 => (w, h),
                    _ => return Err(parse_err(ln, 1, "grid before positive width and height")),
                };
                if map.is_some() {
                    return Err(parse_err(ln, 1, "duplicate grid block"));
                }
                let mut m = SemanticMap::new(w, h, resolution, CellState::Unknown);
                for y in 0..h {
                    let (rl, row) = lines.next().ok_or_else(|| {
                        MapError::InconsistentDimensions(format!("grid has {y} rows, expected {h}"))
                    })?;
                    let row = row.trim_end();
                    let glyphs: Vec<char> = row.chars().collect();
                    if glyphs.len() != w {
                        return Err(MapError::InconsistentDimensions(format!(
                            "line {rl}: row has {} cells, expected {w}",
                            glyphs.len()
                        )));
                    }
                    for (x, g) in glyphs.into_iter().enumerate() {
                        let state = CellState::from_glyph(g)
                            .ok_or_else(|| parse_err(rl, x + 1, format!("invalid glyph {g:?}")))?;
                        m.cells[y * w + x] = state;
                    }
                }
                map = Some(m);
            }
            "room" => {
                let m = map
                    .as_mut()
                    .ok_or_else(|| parse_err(ln, 1, "room before grid"))?;
                let name = toks
                    .next()
                    .ok_or_else(|| parse_err(ln, 6, "missing room name"))?;
                let mut coord = |what| parse_num::<i32>(toks.next(), ln, what);
                let rect = Rect {
                    x0: coord("x0")?,
                    y0: coord("y0")?,
                    x1: coord("x1")?,
                    y1: coord("y1")?,
                };
                if rect.x0 > rect.x1 || rect.y0 > rect.y1 {
                    return Err(parse_err(ln, 1, "room rectangle corners out of order"));
                }
                m.label_room(RoomId::new(name), rect).map_err(|e| match e {
                    MapError::OutOfBounds(c) => MapError::InconsistentDimensions(format!(
                        "line {ln}: room rectangle corner {c} outside the grid"
                    )),
                    other => other,
                })?;
            }
            "receptacle" => {
                let m = map
                    .as_mut()
                    .ok_or_else(|| parse_err(ln, 1, "receptacle before grid"))?;
                let class_tok = toks
                    .next()
                    .ok_or_else(|| parse_err(ln, 12, "missing receptacle class"))?;
                let class: ReceptacleClass = class_tok
                    .parse()
                    .map_err(|e: crate::vocab::UnknownReceptacleClass| parse_err(ln, 12, e.to_string()))?;
                let x = parse_num::<i32>(toks.next(), ln, "x")?;
                let y = parse_num::<i32>(toks.next(), ln, "y")?;
                let openable = match toks.next() {
                    None => false,
                    Some("openable") => true,
                    Some(t) => return Err(parse_err(ln, 1, format!("unexpected token {t:?}"))),
                };
                if openable && !class.can_open() {
                    return Err(parse_err(ln, 1, format!("{class} cannot be openable")));
                }
                let pos = Cell::new(x, y);
                if !m.in_bounds(pos) {
                    return Err(MapError::InconsistentDimensions(format!(
                        "line {ln}: receptacle at {pos} outside the grid"
                    )));
                }
                if m.room_at(pos).is_none() {
                    return Err(MapError::UnknownRoomLabel { line: ln, x, y });
                }
                let before = m.receptacles.len();
                m.register_receptacle(&ReceptacleObservation {
                    receptacle_class: class,
                    position: pos,
                    openable,
                    tick: 0,
                })?;
                if m.receptacles.len() == before {
                    return Err(parse_err(
                        ln,
                        1,
                        format!("{class} at {pos} is within the merge radius of another {class}"),
                    ));
                }
            }
            other => return Err(parse_err(ln, 1, format!("unknown directive {other:?}"))),
        }
        if toks.next().is_some() && key != "receptacle" {
            return Err(parse_err(ln, 1, "trailing tokens"));
        }
    }
    map.ok_or_else(|| parse_err(text.lines().count().max(1), 1, "missing grid block"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_map(w: usize, h: usize, room: &str) -> SemanticMap {
        let mut text = format!("width {w}\nheight {h}\ngrid\n");
        for _ in 0..h {
            text.push_str(&".".repeat(w));
            text.push('\n');
        }
        text.push_str(&format!("room {room} 0 0 {} {}\n", w - 1, h - 1));
        load_map(&text).unwrap()
    }

    #[test]
    fn three_by_three_office() {
        let m = free_map(3, 3, "office");
        assert_eq!(m.cells.iter().filter(|c| **c == CellState::Free).count(), 9);
        let c = m.room_center(&"office".into()).unwrap();
        assert_eq!((c.x, c.y), (1, 1));
    }

    #[test]
    fn short_row_is_inconsistent() {
        let err = load_map("width 3\nheight 2\ngrid\n...\n..\n").unwrap_err();
        assert!(matches!(err, MapError::InconsistentDimensions(_)), "{err:?}");
    }

    #[test]
    fn bad_glyph_reports_position() {
        let err = load_map("width 3\nheight 1\ngrid\n.x.\n").unwrap_err();
        assert_eq!(
            err,
            MapError::Parse {
                line: 4,
                column: 2,
                message: "invalid glyph 'x'".into()
            }
        );
    }

    #[test]
    fn receptacle_outside_rooms_is_rejected() {
        let err = load_map("width 3\nheight 1\ngrid\n...\nroom a 0 0 0 0\nreceptacle table 2 0\n").unwrap_err();
        assert_eq!(err, MapError::UnknownRoomLabel { line: 6, x: 2, y: 0 });
    }

    #[test]
    fn openable_only_for_drawers() {
        let err = load_map("width 3\nheight 1\ngrid\n...\nroom a 0 0 2 0\nreceptacle table 2 0 openable\n")
            .unwrap_err();
        assert!(matches!(err, MapError::Parse { .. }));
    }

    #[test]
    fn center_of_full_kitchen() {
        let m = free_map(5, 5, "kitchen");
        let c = m.room_center(&"kitchen".into()).unwrap();
        assert_eq!((c.x, c.y), (2, 2));
    }

    #[test]
    fn center_of_unknown_room() {
        let m = free_map(5, 5, "kitchen");
        assert_eq!(
            m.room_center(&"garage".into()),
            Err(MapError::UnknownRoom("garage".into()))
        );
    }

    #[test]
    fn center_of_l_shaped_room_avoids_occupied_centroid() {
        // L-shape: column x=0..1 over y=0..4 plus row y=3..4 over x=0..4.
        // Centroid lands on (1,3), which is occupied.
        let text = "width 5\nheight 5\ngrid\n..###\n..###\n..###\n.#...\n.....\n\
                    room hall 0 0 1 4\nroom hall 2 3 4 4\n";
        let m = load_map(text).unwrap();
        let room: RoomId = "hall".into();
        let c = m.room_center(&room).unwrap();

        // Brute force: nearest free labeled cell to the centroid.
        let cells = m.room_cells(&room).unwrap();
        let n = cells.len() as f64;
        let cx = cells.iter().map(|c| c.x as f64).sum::<f64>() / n;
        let cy = cells.iter().map(|c| c.y as f64).sum::<f64>() / n;
        assert_eq!(m.cell(Cell::new(cx.round() as i32, cy.round() as i32)), CellState::Occupied);
        let best = cells
            .iter()
            .filter(|c| m.cell(**c) == CellState::Free)
            .map(|c| ((c.x as f64 - cx).hypot(c.y as f64 - cy), *c))
            .fold(None::<(f64, Cell)>, |acc, (d, c)| match acc {
                Some((bd, _)) if bd <= d => acc,
                _ => Some((d, c)),
            })
            .unwrap()
            .1;
        assert_eq!(c.cell(), best);
        assert_eq!(m.cell(c.cell()), CellState::Free);
    }

    #[test]
    fn room_without_free_cells() {
        let m = load_map("width 2\nheight 1\ngrid\n#.\nroom box 0 0 0 0\n").unwrap();
        assert_eq!(
            m.room_center(&"box".into()),
            Err(MapError::RoomHasNoFreeCell("box".into()))
        );
    }

    fn obs(class: ReceptacleClass, x: i32, y: i32, tick: u64) -> ReceptacleObservation {
        ReceptacleObservation {
            receptacle_class: class,
            position: Cell::new(x, y),
            openable: false,
            tick,
        }
    }

    #[test]
    fn register_new_then_merge() {
        let mut m = free_map(8, 8, "office");
        m.register_receptacle(&obs(ReceptacleClass::Table, 4, 4, 1)).unwrap();
        assert_eq!(m.receptacles().len(), 1);
        m.register_receptacle(&obs(ReceptacleClass::Table, 4, 5, 2)).unwrap();
        assert_eq!(m.receptacles().len(), 1);
        assert_eq!(m.receptacles()[0].position, Cell::new(4, 5));
        assert_eq!(m.receptacles()[0].last_observed_tick, 2);
        assert_eq!(m.receptacles()[0].room, RoomId::from("office"));
        // Different class at the same spot is a separate record.
        m.register_receptacle(&obs(ReceptacleClass::Shelf, 4, 4, 3)).unwrap();
        assert_eq!(m.receptacles().len(), 2);
    }

    #[test]
    fn register_out_of_bounds() {
        let mut m = free_map(4, 4, "office");
        assert_eq!(
            m.register_receptacle(&obs(ReceptacleClass::Table, -1, 0, 0)),
            Err(MapError::OutOfBounds(Cell::new(-1, 0)))
        );
        assert!(m.receptacles().is_empty());
    }

    #[test]
    fn receptacles_by_room() {
        let text = "width 4\nheight 1\ngrid\n....\nroom a 0 0 1 0\nroom b 2 0 3 0\nreceptacle table 0 0\n";
        let m = load_map(text).unwrap();
        assert_eq!(m.receptacles_in_room(&"a".into()).unwrap().len(), 1);
        assert!(m.receptacles_in_room(&"b".into()).unwrap().is_empty());
        assert_eq!(
            m.receptacles_in_room(&"c".into()).unwrap_err(),
            MapError::UnknownRoom("c".into())
        );
    }

    #[test]
    fn render_glyphs() {
        let mut m = free_map(2, 2, "a");
        assert_eq!(m.render(None), "..\n..\n");
        assert_eq!(
            m.render(Some(&[Cell::new(0, 0), Cell::new(1, 0)])),
            "**\n..\n"
        );
        m.set_cell(Cell::new(1, 1), CellState::Occupied).unwrap();
        assert_eq!(m.render(None), "..\n.#\n");
    }

    #[test]
    fn ppm_header_and_size() {
        let m = free_map(3, 2, "a");
        let img = m.render_ppm(None, 2);
        let header = b"P6\n6 4\n255\n";
        assert!(img.starts_with(header));
        assert_eq!(img.len(), header.len() + 6 * 4 * 3);
    }
}
