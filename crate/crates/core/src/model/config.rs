use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use super::{BaseObjectId, ModelError, Primitive, RmwEvent, TxnId, Value};

/// Values of all base objects plus the TM-private state of every
/// transaction. The private state is opaque to the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration<S = ()> {
    memory: BTreeMap<BaseObjectId, Value>,
    private: BTreeMap<TxnId, S>,
}

impl<S> Default for Configuration<S> {
    fn default() -> Self {
        Configuration {
            memory: BTreeMap::new(),
            private: BTreeMap::new(),
        }
    }
}

impl<S> Configuration<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Initial configuration assigning each listed base object its value.
    pub fn with_bases(bases: impl IntoIterator<Item = (BaseObjectId, Value)>) -> Self {
        Configuration {
            memory: bases.into_iter().collect(),
            private: BTreeMap::new(),
        }
    }

    /// Declares `base` with initial value `init`; no-op if already declared.
    pub fn declare(&mut self, base: BaseObjectId, init: Value) {
        self.memory.entry(base).or_insert(init);
    }

    pub fn contains(&self, base: &BaseObjectId) -> bool {
        self.memory.contains_key(base)
    }

    pub fn value(&self, base: &BaseObjectId) -> Option<Value> {
        self.memory.get(base).copied()
    }

    pub fn memory(&self) -> &BTreeMap<BaseObjectId, Value> {
        &self.memory
    }

    pub fn private(&self, txn: TxnId) -> Option<&S> {
        self.private.get(&txn)
    }

    pub fn private_mut(&mut self, txn: TxnId) -> Option<&mut S> {
        self.private.get_mut(&txn)
    }

    pub fn set_private(&mut self, txn: TxnId, state: S) {
        self.private.insert(txn, state);
    }

    pub fn private_states(&self) -> impl Iterator<Item = (TxnId, &S)> {
        self.private.iter().map(|(k, s)| (*k, s))
    }

    /// The base-object part of the configuration.
    pub fn memory_only(&self) -> Configuration<()> {
        Configuration {
            memory: self.memory.clone(),
            private: BTreeMap::new(),
        }
    }
}

/// Applies `prim` to `base` on behalf of `txn`: the state becomes `g(s)` and
/// the returned event carries `h(s)`.
pub fn apply_primitive<S>(
    config: &mut Configuration<S>,
    base: &BaseObjectId,
    prim: Primitive,
    txn: TxnId,
) -> Result<RmwEvent, ModelError> {
    let state = config
        .memory
        .get_mut(base)
        .ok_or_else(|| ModelError::UnknownBaseObject(base.clone()))?;
    let response = prim.respond(*state);
    *state = prim.update(*state);
    Ok(RmwEvent {
        txn,
        base: base.clone(),
        prim,
        response,
    })
}

static NEXT_STORE: AtomicU64 = AtomicU64::new(1);

/// Handle returned by [`SnapshotStore::snapshot`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SnapshotToken {
    store: u64,
    generation: u64,
    index: usize,
}

/// Holds configuration snapshots. Tokens become stale when the store is
/// cleared or when presented to a different store.
#[derive(Debug)]
pub struct SnapshotStore<S> {
    id: u64,
    generation: u64,
    saved: Vec<Configuration<S>>,
}

impl<S: Clone> Default for SnapshotStore<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Clone> SnapshotStore<S> {
    pub fn new() -> Self {
        SnapshotStore {
            id: NEXT_STORE.fetch_add(1, Ordering::Relaxed),
            generation: 0,
            saved: Vec::new(),
        }
    }

    pub fn snapshot(&mut self, config: &Configuration<S>) -> SnapshotToken {
        self.saved.push(config.clone());
        SnapshotToken {
            store: self.id,
            generation: self.generation,
            index: self.saved.len() - 1,
        }
    }

    pub fn restore(&self, token: SnapshotToken) -> Result<Configuration<S>, ModelError> {
        if token.store != self.id || token.generation != self.generation {
            return Err(ModelError::StaleSnapshot);
        }
        self.saved
            .get(token.index)
            .cloned()
            .ok_or(ModelError::StaleSnapshot)
    }

    /// Drops every snapshot; outstanding tokens become stale.
    pub fn clear(&mut self) {
        self.saved.clear();
        self.generation += 1;
    }
}
