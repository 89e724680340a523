//! Helpers shared by the integration tests: a brute-force serializability
//! oracle, a random history generator and a clause-by-clause RAW/AWAR
//! reference.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tmlab::model::{
    BaseObjectId, Event, History, OpResponse, Primitive, RmwEvent, TObjectId, TOp, TOpEvent, TxnId,
    Value, INITIAL_VALUE,
};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// A fresh scratch directory under the cargo target dir.
pub fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

struct Txn {
    first: usize,
    /// Index of the terminal response, if any.
    last: Option<usize>,
    /// Completed non-terminal operations in order.
    ops: Vec<(TOp, OpResponse)>,
    committed: bool,
    commit_pending: bool,
}

fn summarize(h: &History) -> BTreeMap<TxnId, Txn> {
    let mut txns: BTreeMap<TxnId, Txn> = BTreeMap::new();
    for (i, e) in h.events().iter().enumerate() {
        let t = txns.entry(e.txn).or_insert(Txn {
            first: i,
            last: None,
            ops: Vec::new(),
            committed: false,
            commit_pending: false,
        });
        match (e.op, e.response) {
            (TOp::TryCommit, None) => t.commit_pending = true,
            (_, None) => {}
            (_, Some(OpResponse::Commit)) => {
                t.committed = true;
                t.commit_pending = false;
                t.last = Some(i);
            }
            (_, Some(OpResponse::Abort)) => {
                t.commit_pending = false;
                t.last = Some(i);
            }
            (op, Some(r)) => t.ops.push((op, r)),
        }
    }
    txns
}

fn legal(order: &[TxnId], txns: &BTreeMap<TxnId, Txn>) -> bool {
    let mut state: BTreeMap<TObjectId, Value> = BTreeMap::new();
    for t in order {
        let mut local = state.clone();
        for &(op, r) in &txns[t].ops {
            match op {
                TOp::Read(x) => {
                    if r != OpResponse::Value(*local.get(&x).unwrap_or(&INITIAL_VALUE)) {
                        return false;
                    }
                }
                TOp::Write(x, v) => {
                    local.insert(x, v);
                }
                TOp::TryCommit => {}
            }
        }
        state = local;
    }
    true
}

fn permutations(items: &mut Vec<TxnId>, k: usize, visit: &mut dyn FnMut(&[TxnId]) -> bool) -> bool {
    if k == items.len() {
        return visit(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        if permutations(items, k + 1, visit) {
            return true;
        }
        items.swap(k, i);
    }
    false
}

/// Strict serializability by exhaustion: every choice for commit-pending
/// transactions, every permutation of the committed ones, no pruning.
pub fn oracle_serializable(h: &History) -> bool {
    let txns = summarize(h);
    let pending: Vec<TxnId> = txns
        .iter()
        .filter(|(_, t)| t.commit_pending)
        .map(|(&k, _)| k)
        .collect();
    for mask in 0u32..(1 << pending.len()) {
        let mut chosen: Vec<TxnId> = txns
            .iter()
            .filter(|(k, t)| {
                t.committed
                    || pending
                        .iter()
                        .position(|p| p == *k)
                        .is_some_and(|b| mask >> b & 1 == 1)
            })
            .map(|(&k, _)| k)
            .collect();
        let precedes = |a: TxnId, b: TxnId| txns[&a].last.is_some_and(|l| l < txns[&b].first);
        let found = permutations(&mut chosen, 0, &mut |order| {
            let respects = order
                .iter()
                .enumerate()
                .all(|(i, &a)| order[..i].iter().all(|&b| !precedes(a, b)));
            respects && legal(order, &txns)
        });
        if found {
            return true;
        }
    }
    false
}

/// A well-formed random history: each transaction is a short script whose
/// responses are drawn at random, and the scripts are interleaved event by
/// event. The last operation may be left pending.
pub fn random_history(
    rng: &mut StdRng,
    max_txns: u32,
    max_objects: u32,
    max_values: i64,
) -> History {
    let n = rng.random_range(1..=max_txns);
    let mut scripts: Vec<Vec<TOpEvent>> = Vec::new();
    for k in 0..n {
        let t = TxnId(k);
        let mut evs = Vec::new();
        let len = rng.random_range(0..=3);
        let mut ended = false;
        for _ in 0..len {
            let x = TObjectId(rng.random_range(1..=max_objects));
            let op = if rng.random_bool(0.5) {
                TOp::Read(x)
            } else {
                TOp::Write(x, rng.random_range(1..=max_values))
            };
            let r = match op {
                TOp::Read(_) if rng.random_bool(0.1) => OpResponse::Abort,
                TOp::Read(_) => OpResponse::Value(rng.random_range(0..=max_values)),
                _ if rng.random_bool(0.05) => OpResponse::Abort,
                _ => OpResponse::Ok,
            };
            evs.push(TOpEvent::invoke(t, op));
            evs.push(TOpEvent::respond(t, op, r));
            if r == OpResponse::Abort {
                ended = true;
                break;
            }
        }
        if !ended && rng.random_bool(0.8) {
            evs.push(TOpEvent::invoke(t, TOp::TryCommit));
            if rng.random_bool(0.85) {
                let r = if rng.random_bool(0.8) {
                    OpResponse::Commit
                } else {
                    OpResponse::Abort
                };
                evs.push(TOpEvent::respond(t, TOp::TryCommit, r));
            }
        }
        if evs.is_empty() {
            evs.push(TOpEvent::invoke(t, TOp::Read(TObjectId(1))));
        }
        scripts.push(evs);
    }
    let mut cursors = vec![0; scripts.len()];
    let mut events = Vec::new();
    loop {
        let open: Vec<usize> = (0..scripts.len())
            .filter(|&i| cursors[i] < scripts[i].len())
            .collect();
        if open.is_empty() {
            break;
        }
        let i = open[rng.random_range(0..open.len())];
        events.push(scripts[i][cursors[i]]);
        cursors[i] += 1;
    }
    History::new(events).expect("generated history is well formed")
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// RAW pairs straight from the definition: `i < j`, event `i` writes `b`,
/// event `j` reads `b' != b`, and no event strictly between writes `b'`.
/// Only `txn`'s base-object events are considered. For each `j` the
/// latest qualifying `i` is kept.
pub fn reference_raw(events: &[Event], txn: TxnId) -> Vec<(usize, usize)> {
    let mine = |k: usize| events[k].as_rmw().filter(|r| r.txn == txn);
    let writes = |k: usize| mine(k).is_some_and(|r| !r.is_trivial());
    let mut out = Vec::new();
    for j in 0..events.len() {
        let Some(rj) = mine(j).filter(|r| r.prim.reads_base()) else {
            continue;
        };
        let best = (0..j)
            .filter(|&i| {
                let clause1 = writes(i);
                let clause2 = clause1 && mine(i).unwrap().base != rj.base;
                let clause3 = (i + 1..j).all(|k| !(writes(k) && mine(k).unwrap().base == rj.base));
                clause1 && clause2 && clause3
            })
            .max();
        if let Some(i) = best {
            out.push((i, j));
        }
    }
    out
}

/// AWAR indices: nontrivial primitives that also read their base object.
pub fn reference_awar(events: &[Event], txn: TxnId) -> Vec<usize> {
    (0..events.len())
        .filter(|&i| {
            events[i]
                .as_rmw()
                .is_some_and(|r| r.txn == txn && !r.is_trivial() && r.prim.reads_base())
        })
        .collect()
}

/// Random background writers, then two scripts over disjoint halves of
/// the objects. Every script ends with tryC.
pub fn random_fragments(rng: &mut StdRng) -> tmlab::harness::scenarios::FragmentsSetup {
    let objects = rng.random_range(2..=6u32);
    let cut = rng.random_range(1..objects);
    let script = |rng: &mut StdRng, lo: u32, hi: u32, writes_only: bool| -> Vec<TOp> {
        let mut ops: Vec<TOp> = (0..rng.random_range(1..=4))
            .map(|_| {
                let x = TObjectId(rng.random_range(lo..=hi));
                if writes_only || rng.random_bool(0.5) {
                    TOp::Write(x, rng.random_range(1..=9))
                } else {
                    TOp::Read(x)
                }
            })
            .collect();
        ops.push(TOp::TryCommit);
        ops
    };
    let background = (0..rng.random_range(0..=2))
        .map(|_| script(rng, 1, objects, true))
        .collect();
    tmlab::harness::scenarios::FragmentsSetup {
        background,
        rho1: script(rng, 1, cut, false),
        rho2: script(rng, cut + 1, objects, false),
    }
}

pub const ALL_TMS: [tmlab::tms::TmKind; 3] = tmlab::tms::TmKind::ALL;

pub fn prim() -> impl Strategy<Value = Primitive> {
    prop_oneof![
        3 => Just(Primitive::Read),
        3 => (0i64..3).prop_map(Primitive::Write),
        1 => (0i64..2, 0i64..2).prop_map(|(expected, new)| Primitive::Cas { expected, new }),
        1 => Just(Primitive::FetchInc),
        1 => (-1i64..2).prop_map(Primitive::FetchAdd),
    ]
}

pub fn rmw(txn: u32, base: u32, prim: Primitive) -> Event {
    Event::Rmw(RmwEvent {
        txn: TxnId(txn),
        base: BaseObjectId::new(format!("b{base}")),
        prim,
        response: 0,
    })
}

/// Base-object events of T0 over at most three bases, so blockers and
/// same-base pairs are frequent.
pub fn own_events() -> impl Strategy<Value = Vec<Event>> {
    prop::collection::vec((0u32..3, prim()).prop_map(|(b, p)| rmw(0, b, p)), 0..14)
}

pub fn foreign_event() -> impl Strategy<Value = Event> {
    prop_oneof![
        (1u32..3, 0u32..3, prim()).prop_map(|(t, b, p)| rmw(t, b, p)),
        Just(Event::TOp(TOpEvent::invoke(
            TxnId(0),
            TOp::Read(TObjectId(1))
        ))),
        Just(Event::TOp(TOpEvent::invoke(TxnId(1), TOp::TryCommit))),
    ]
}

/// Inserts foreign events at the given slots; returns the merged sequence
/// and where each original event ended up.
pub fn interleave(own: &[Event], foreign: &[(usize, Event)]) -> (Vec<Event>, Vec<usize>) {
    let mut out = Vec::new();
    let mut at = Vec::new();
    for (k, e) in own.iter().enumerate() {
        out.extend(
            foreign
                .iter()
                .filter(|(s, _)| *s == k)
                .map(|(_, f)| f.clone()),
        );
        at.push(out.len());
        out.push(e.clone());
    }
    out.extend(
        foreign
            .iter()
            .filter(|(s, _)| *s >= own.len())
            .map(|(_, f)| f.clone()),
    );
    (out, at)
}
