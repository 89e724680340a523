use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{History, OpResponse, TObjectId, TOp, TxnId, Value, INITIAL_VALUE};

use super::completion::{committed_projection, enumerate_completions, Completion};

/// Search limits for [`check_strict_serializability`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBound {
    /// Histories with more transactions are not searched.
    pub max_txns: usize,
    /// Total candidate orders (complete or pruned) examined across all
    /// completions before giving up.
    pub max_orders: u64,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound {
            max_txns: 10,
            max_orders: 1_000_000,
        }
    }
}

/// A serialization `S` together with the completion it serializes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub order: Vec<TxnId>,
    pub completion: Completion,
    /// `S`: the committed transactions' events laid out t-sequentially.
    pub serialization: History,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SerializationVerdict {
    Serializable(Box<Witness>),
    NotSerializable {
        completions: u64,
        orders: u64,
    },
    BoundExceeded {
        txns: usize,
        completions: u64,
        orders: u64,
    },
}

impl SerializationVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            SerializationVerdict::Serializable(_) => "serializable",
            SerializationVerdict::NotSerializable { .. } => "not-serializable",
            SerializationVerdict::BoundExceeded { .. } => "bound-exceeded",
        }
    }

    pub fn is_serializable(&self) -> bool {
        matches!(self, SerializationVerdict::Serializable(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SerializationVerdict::Serializable(w) => Some(w),
            _ => None,
        }
    }

    /// `VERDICT ...` followed by `WITNESS ...` or `EXHAUSTED ...`.
    pub fn render(&self) -> String {
        let mut out = format!("VERDICT {}\n", self.name());
        match self {
            SerializationVerdict::Serializable(w) => {
                let order: Vec<String> = w.order.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "WITNESS {}", order.join(" "));
            }
            SerializationVerdict::NotSerializable {
                completions,
                orders,
            }
            | SerializationVerdict::BoundExceeded {
                completions,
                orders,
                ..
            } => {
                let _ = writeln!(out, "EXHAUSTED completions={completions} orders={orders}");
            }
        }
        out
    }
}

/// Two histories are equivalent when they have the same transactions and
/// identical per-transaction projections.
pub fn equivalent(a: &History, b: &History) -> bool {
    let ta = a.txns();
    ta == b.txns() && ta.iter().all(|&k| a.project(k) == b.project(k))
}

#[derive(Clone, Copy)]
enum Access {
    Read(TObjectId, Value),
    Write(TObjectId, Value),
}

struct Search<'a> {
    txns: &'a [TxnId],
    accesses: &'a [Vec<Access>],
    preds: &'a [u64],
    orders: u64,
    budget: u64,
    exceeded: bool,
}

impl Search<'_> {
    /// Applies transaction `t` to `state` if all its reads are legal.
    fn apply(
        &self,
        t: usize,
        state: &BTreeMap<TObjectId, Value>,
    ) -> Option<BTreeMap<TObjectId, Value>> {
        let mut local: BTreeMap<TObjectId, Value> = BTreeMap::new();
        for a in &self.accesses[t] {
            match *a {
                Access::Write(x, v) => {
                    local.insert(x, v);
                }
                Access::Read(x, got) => {
                    let expected = local
                        .get(&x)
                        .or_else(|| state.get(&x))
                        .copied()
                        .unwrap_or(INITIAL_VALUE);
                    if got != expected {
                        return None;
                    }
                }
            }
        }
        let mut next = state.clone();
        next.extend(local);
        Some(next)
    }

    /// Depth-first search over linear extensions of the real-time order, in
    /// lexicographic order of transaction ids.
    fn dfs(
        &mut self,
        order: &mut Vec<usize>,
        used: u64,
        state: &BTreeMap<TObjectId, Value>,
    ) -> bool {
        if order.len() == self.txns.len() {
            self.orders += 1;
            return true;
        }
        for t in 0..self.txns.len() {
            if used & (1 << t) != 0 || self.preds[t] & !used != 0 {
                continue;
            }
            if self.orders >= self.budget {
                self.exceeded = true;
                return false;
            }
            match self.apply(t, state) {
                None => self.orders += 1,
                Some(next) => {
                    order.push(t);
                    if self.dfs(order, used | (1 << t), &next) {
                        return true;
                    }
                    order.pop();
                    if self.exceeded {
                        return false;
                    }
                }
            }
        }
        false
    }
}

/// Searches every completion of `h` and every order of its committed
/// transactions that extends the real-time order of `h` for a legal
/// t-sequential history equivalent to the committed projection.
pub fn check_strict_serializability(h: &History, bound: &SearchBound) -> SerializationVerdict {
    let n_txns = h.txns().len();
    if n_txns > bound.max_txns || n_txns > 64 {
        return SerializationVerdict::BoundExceeded {
            txns: n_txns,
            completions: 0,
            orders: 0,
        };
    }
    let h_recs = h.records();
    let mut completions = 0u64;
    let mut orders = 0u64;
    for completion in enumerate_completions(h) {
        completions += 1;
        let cseq = committed_projection(&completion.history).expect("completions are t-complete");
        let txns: Vec<TxnId> = cseq.txns().into_iter().collect();
        let accesses: Vec<Vec<Access>> = txns
            .iter()
            .map(|&k| {
                cseq.project(k)
                    .into_iter()
                    .filter_map(|e| match (e.op, e.response) {
                        (TOp::Write(x, v), None) => Some(Access::Write(x, v)),
                        (TOp::Read(x), Some(OpResponse::Value(v))) => Some(Access::Read(x, v)),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        let preds: Vec<u64> = txns
            .iter()
            .map(|t| {
                txns.iter().enumerate().fold(0u64, |m, (i, u)| {
                    if h_recs[u].precedes(&h_recs[t]) {
                        m | (1 << i)
                    } else {
                        m
                    }
                })
            })
            .collect();
        let mut search = Search {
            txns: &txns,
            accesses: &accesses,
            preds: &preds,
            orders,
            budget: bound.max_orders,
            exceeded: false,
        };
        let mut order = Vec::new();
        let found = search.dfs(&mut order, 0, &BTreeMap::new());
        orders = search.orders;
        if found {
            let order: Vec<TxnId> = order.into_iter().map(|i| txns[i]).collect();
            let serialization = History::new(
                order
                    .iter()
                    .flat_map(|&k| completion.history.project(k))
                    .collect(),
            )
            .expect("serialization is well-formed");
            return SerializationVerdict::Serializable(Box::new(Witness {
                order,
                completion,
                serialization,
            }));
        }
        if search.exceeded {
            return SerializationVerdict::BoundExceeded {
                txns: n_txns,
                completions,
                orders,
            };
        }
    }
    SerializationVerdict::NotSerializable {
        completions,
        orders,
    }
}
