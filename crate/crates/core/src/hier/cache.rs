use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use crate::hier::ComponentDecomposition;
use crate::model::ModelKind;

/// Definition-level decompositions keyed by analysis kind and definition
/// name. Shared between threads; readers never block each other.
#[derive(Debug, Default)]
pub struct DecompositionCache {
    map: RwLock<HashMap<(ModelKind, String), Arc<ComponentDecomposition>>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl DecompositionCache {
    pub fn new() -> Self {
        DecompositionCache::default()
    }

    pub fn get(&self, kind: ModelKind, def_name: &str) -> Option<Arc<ComponentDecomposition>> {
        let found = self
            .map
            .read()
            .expect("cache lock poisoned")
            .get(&(kind, def_name.to_string()))
            .cloned();
        let counter = if found.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Insert unless present; returns the stored entry.
    pub fn insert(&self, d: ComponentDecomposition) -> Arc<ComponentDecomposition> {
        let key = (d.kind, d.def_name.clone());
        let mut map = self.map.write().expect("cache lock poisoned");
        map.entry(key).or_insert_with(|| Arc::new(d)).clone()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn clear(&self) {
        self.map.write().expect("cache lock poisoned").clear();
    }
}
