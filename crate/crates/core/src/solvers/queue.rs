use std::collections::BTreeMap;

/// Worklist keyed by variable priority. Priorities are injective, so the
/// map from priority to variable gives set semantics: inserting a variable
/// that is already queued does nothing.
#[derive(Debug, Clone)]
pub struct PrioQueue<V> {
    entries: BTreeMap<i64, V>,
}

impl<V> Default for PrioQueue<V> {
    fn default() -> Self {
        PrioQueue {
            entries: BTreeMap::new(),
        }
    }
}

impl<V> PrioQueue<V> {
    pub fn insert(&mut self, prio: i64, v: V) {
        self.entries.entry(prio).or_insert(v);
    }

    pub fn min_prio(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn extract_min(&mut self) -> Option<V> {
        self.entries.pop_first().map(|(_, v)| v)
    }

    /// Removes and returns the minimum if its priority is at most `n`.
    pub fn extract_min_upto(&mut self, n: i64) -> Option<V> {
        match self.min_prio() {
            Some(p) if p <= n => self.extract_min(),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &V> {
        self.entries.values()
    }
}
