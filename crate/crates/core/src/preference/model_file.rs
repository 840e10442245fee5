//! Text serialization of a trained model and its room knowledge base.
//!
//! ```text
//! TIDY-FACTORS 1
//! dim <d>
//! lambda <λ>
//! scale <min> <max>
//! users <n>
//! user <id> <f_1> … <f_d>          (n lines, row order = user index)
//! items <m>
//! item <object> <room> <receptacle> <f_1> … <f_d>   (m lines)
//! kb <k>
//! kb <object> <room> <score>        (k lines)
//! end
//! ```
//!
//! Tokens are separated by single spaces and lines end with `\n`. Floats
//! use Rust's shortest round-trip decimal form, so write → read restores
//! every factor bit for bit. Identifiers may not contain whitespace.

use std::fmt::Write as _;

use thiserror::Error;

use super::corpus::{PlacementItem, Vocab};
use super::kb::CommonSenseKb;
use super::model::FactorModel;
use super::Preferences;
use crate::vocab::{ReceptacleClass, UserId};

pub const MAGIC: &str = "TIDY-FACTORS";
pub const VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelFileError {
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("identifier {0:?} contains whitespace")]
    BadIdentifier(String),
}

fn check_ident(s: &str) -> Result<&str, ModelFileError> {
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(ModelFileError::BadIdentifier(s.to_string()));
    }
    Ok(s)
}

pub fn write_model(prefs: &Preferences) -> Result<String, ModelFileError> {
    let m = &prefs.factors;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "dim {}", m.dim());
    let _ = writeln!(out, "lambda {}", m.lambda());
    let _ = writeln!(out, "scale {} {}", m.scale().0, m.scale().1);
    let _ = writeln!(out, "users {}", m.users().len());
    for (u, id) in m.users().values().iter().enumerate() {
        let _ = write!(out, "user {}", check_ident(id.as_str())?);
        for x in m.user_vector(u) {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "items {}", m.items().len());
    for (i, it) in m.items().values().iter().enumerate() {
        let _ = write!(
            out,
            "item {} {} {}",
            check_ident(it.object_class.as_str())?,
            check_ident(it.room.as_str())?,
            it.receptacle_class
        );
        for x in m.item_vector(i) {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    let rows: Vec<_> = prefs
        .kb
        .objects()
        .flat_map(|o| {
            prefs
                .kb
                .room_scores(o)
                .into_iter()
                .flatten()
                .map(move |(r, s)| (o, r, *s))
        })
        .collect();
    let _ = writeln!(out, "kb {}", rows.len());
    for (o, r, s) in rows {
        let _ = writeln!(out, "kb {} {} {s}", check_ident(o.as_str())?, check_ident(r.as_str())?);
    }
    out.push_str("end\n");
    Ok(out)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, Vec<&'a str>), ModelFileError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok((i + 1, l.split(' ').collect()))
            }
            None => Err(ModelFileError::Format {
                line: self.last + 1,
                message: "unexpected end of file".into(),
            }),
        }
    }
}

fn fmt_err(line: usize, message: impl Into<String>) -> ModelFileError {
    ModelFileError::Format {
        line,
        message: message.into(),
    }
}

fn keyed<T: std::str::FromStr>(toks: &[&str], key: &str, line: usize) -> Result<T, ModelFileError> {
    match toks {
        [k, v] if *k == key => v.parse().map_err(|_| fmt_err(line, format!("invalid {key} value"))),
        _ => Err(fmt_err(line, format!("expected `{key} <value>`"))),
    }
}

fn floats(toks: &[&str], line: usize) -> Result<Vec<f64>, ModelFileError> {
    toks.iter()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| fmt_err(line, format!("invalid factor {t:?}")))
        })
        .collect()
}

pub fn read_model(text: &str) -> Result<Preferences, ModelFileError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (ln, head) = lines.next()?;
    if head != [MAGIC, &VERSION.to_string()] {
        return Err(fmt_err(ln, format!("expected header `{MAGIC} {VERSION}`")));
    }
    let (ln, t) = lines.next()?;
    let dim: usize = keyed(&t, "dim", ln)?;
    let (ln, t) = lines.next()?;
    let lambda: f64 = keyed(&t, "lambda", ln)?;
    let (ln, t) = lines.next()?;
    let scale = match t.as_slice() {
        ["scale", a, b] => (
            a.parse().map_err(|_| fmt_err(ln, "invalid scale"))?,
            b.parse().map_err(|_| fmt_err(ln, "invalid scale"))?,
        ),
        _ => return Err(fmt_err(ln, "expected `scale <min> <max>`")),
    };

    let (ln, t) = lines.next()?;
    let n_users: usize = keyed(&t, "users", ln)?;
    let mut users = Vocab::default();
    let mut user_factors = Vec::with_capacity(n_users * dim);
    for _ in 0..n_users {
        let (ln, t) = lines.next()?;
        if t.len() != 2 + dim || t[0] != "user" {
            return Err(fmt_err(ln, format!("expected `user <id>` and {dim} factors")));
        }
        if users.get(&UserId::new(t[1])).is_some() {
            return Err(fmt_err(ln, format!("duplicate user {}", t[1])));
        }
        users.intern(UserId::new(t[1]));
        user_factors.extend(floats(&t[2..], ln)?);
    }

    let (ln, t) = lines.next()?;
    let n_items: usize = keyed(&t, "items", ln)?;
    let mut items = Vocab::default();
    let mut item_factors = Vec::with_capacity(n_items * dim);
    for _ in 0..n_items {
        let (ln, t) = lines.next()?;
        if t.len() != 4 + dim || t[0] != "item" {
            return Err(fmt_err(ln, format!("expected `item <object> <room> <receptacle>` and {dim} factors")));
        }
        let rec: ReceptacleClass = t[3].parse().map_err(|e: crate::vocab::UnknownReceptacleClass| fmt_err(ln, e.to_string()))?;
        let item = PlacementItem::new(t[1], t[2], rec);
        if items.get(&item).is_some() {
            return Err(fmt_err(ln, format!("duplicate item {item}")));
        }
        items.intern(item);
        item_factors.extend(floats(&t[4..], ln)?);
    }

    let (ln, t) = lines.next()?;
    let n_kb: usize = keyed(&t, "kb", ln)?;
    let mut kb = CommonSenseKb::default();
    for _ in 0..n_kb {
        let (ln, t) = lines.next()?;
        match t.as_slice() {
            ["kb", o, r, s] => {
                let s: f64 = s.parse().map_err(|_| fmt_err(ln, "invalid kb score"))?;
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(fmt_err(ln, "kb score must be finite and nonnegative"));
                }
                kb.add((*o).into(), (*r).into(), s);
            }
            _ => return Err(fmt_err(ln, "expected `kb <object> <room> <score>`")),
        }
    }
    let (ln, t) = lines.next()?;
    if t != ["end"] {
        return Err(fmt_err(ln, "expected `end`"));
    }

    let factors = FactorModel::from_raw(dim, lambda, scale, users, items, user_factors, item_factors)
        .map_err(|e| fmt_err(ln, e.to_string()))?;
    Ok(Preferences { factors, kb })
}
