//! Keyed message store shared by the behaviors of one tree.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use super::BtError;

/// JSON-valued key/value store. Reading an absent key is an error, never a
/// default. Writes are tracked so callers can log per-tick deltas.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Blackboard {
    entries: BTreeMap<String, Value>,
    dirty: BTreeSet<String>,
}

impl Blackboard {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get_value(&self, key: &str) -> Result<&Value, BtError> {
        self.entries
            .get(key)
            .ok_or_else(|| BtError::BlackboardKeyMissing(key.to_string()))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<T, BtError> {
        let v = self.get_value(key)?;
        T::deserialize(v).map_err(|e| BtError::BlackboardType {
            key: key.to_string(),
            message: e.to_string(),
        })
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("blackboard values serialize to JSON");
        self.entries.insert(key.to_string(), v);
        self.dirty.insert(key.to_string());
    }

    pub fn remove(&mut self, key: &str) -> Option<Value> {
        let old = self.entries.remove(key);
        if old.is_some() {
            self.dirty.insert(key.to_string());
        }
        old
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Keys written or removed since the last call, with their current
    /// values (`null` for removed keys).
    pub fn take_delta(&mut self) -> BTreeMap<String, Value> {
        std::mem::take(&mut self.dirty)
            .into_iter()
            .map(|k| {
                let v = self.entries.get(&k).cloned().unwrap_or(Value::Null);
                (k, v)
            })
            .collect()
    }
}
