use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::harness::AnnotatedRun;
use crate::model::{BaseObjectId, Event, Execution, TObjectId, TxnId, TxnRecord};

use super::AnalysisError;

/// Events `i < j` of different transactions on `base`, at least one
/// nontrivial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contention {
    pub i: usize,
    pub j: usize,
    pub base: BaseObjectId,
}

pub fn contentions(events: &[Event]) -> Vec<Contention> {
    let mut by_base: BTreeMap<&BaseObjectId, Vec<(usize, TxnId, bool)>> = BTreeMap::new();
    for (i, e) in events.iter().enumerate() {
        if let Some(r) = e.as_rmw() {
            by_base
                .entry(&r.base)
                .or_default()
                .push((i, r.txn, r.is_trivial()));
        }
    }
    let mut out = Vec::new();
    for (base, evs) in by_base {
        for (a, &(i, ti, triv_i)) in evs.iter().enumerate() {
            for &(j, tj, triv_j) in &evs[a + 1..] {
                if ti != tj && !(triv_i && triv_j) {
                    out.push(Contention {
                        i,
                        j,
                        base: base.clone(),
                    });
                }
            }
        }
    }
    out.sort_by_key(|c| (c.i, c.j));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictDapViolation {
    pub t1: TxnId,
    pub t2: TxnId,
    pub base: BaseObjectId,
    pub i: usize,
    pub j: usize,
}

/// Contentions between transactions whose data sets are disjoint.
pub fn check_strict_dap(exec: &Execution) -> Vec<StrictDapViolation> {
    let events = exec.events();
    let recs = exec.records();
    contentions(events)
        .into_iter()
        .filter_map(|c| {
            let t1 = events[c.i].txn();
            let t2 = events[c.j].txn();
            recs[&t1]
                .dset()
                .is_disjoint(&recs[&t2].dset())
                .then_some(StrictDapViolation {
                    t1,
                    t2,
                    base: c.base,
                    i: c.i,
                    j: c.j,
                })
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConflictGraph {
    pub vertices: BTreeSet<TObjectId>,
    pub edges: BTreeSet<(TObjectId, TObjectId)>,
}

impl ConflictGraph {
    fn neighbours(&self, x: TObjectId) -> impl Iterator<Item = TObjectId> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == x {
                Some(b)
            } else if b == x {
                Some(a)
            } else {
                None
            }
        })
    }
}

fn concurrent(a: &TxnRecord, b: &TxnRecord) -> bool {
    !a.precedes(b) && !b.precedes(a)
}

fn record(recs: &BTreeMap<TxnId, TxnRecord>, t: TxnId) -> Result<&TxnRecord, AnalysisError> {
    recs.get(&t).ok_or(AnalysisError::UnknownTxn(t))
}

/// The graph over the data sets of `t1`, `t2` and every transaction
/// concurrent with either, with an edge between two t-objects accessed by
/// the same such transaction.
pub fn conflict_graph(
    exec: &Execution,
    t1: TxnId,
    t2: TxnId,
) -> Result<ConflictGraph, AnalysisError> {
    graph_from_records(&exec.records(), t1, t2)
}

fn graph_from_records(
    recs: &BTreeMap<TxnId, TxnRecord>,
    t1: TxnId,
    t2: TxnId,
) -> Result<ConflictGraph, AnalysisError> {
    let r1 = record(recs, t1)?;
    let r2 = record(recs, t2)?;
    let mut g = ConflictGraph::default();
    for rec in recs.values() {
        let in_tau = rec.id == t1 || rec.id == t2 || concurrent(rec, r1) || concurrent(rec, r2);
        if !in_tau {
            continue;
        }
        let dset: Vec<TObjectId> = rec.dset().into_iter().collect();
        g.vertices.extend(dset.iter().copied());
        for (a, &x) in dset.iter().enumerate() {
            for &y in &dset[a + 1..] {
                g.edges.insert((x, y));
            }
        }
    }
    Ok(g)
}

/// No path in the conflict graph joins a t-object of `t1` to one of `t2`.
/// A shared t-object is a path of length zero.
pub fn disjoint_access(exec: &Execution, t1: TxnId, t2: TxnId) -> Result<bool, AnalysisError> {
    disjoint_in(&exec.records(), t1, t2)
}

fn disjoint_in(
    recs: &BTreeMap<TxnId, TxnRecord>,
    t1: TxnId,
    t2: TxnId,
) -> Result<bool, AnalysisError> {
    let g = graph_from_records(recs, t1, t2)?;
    let target = recs[&t2].dset();
    let mut seen: BTreeSet<TObjectId> = recs[&t1].dset();
    let mut queue: VecDeque<TObjectId> = seen.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        if target.contains(&x) {
            return Ok(false);
        }
        for y in g.neighbours(x) {
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakDapViolation {
    pub prefix: usize,
    pub t1: TxnId,
    pub t2: TxnId,
    pub base: BaseObjectId,
}

/// Prefixes after which two disjoint-access transactions are poised to
/// apply contending events on the same base object.
pub fn check_weak_dap(run: &AnnotatedRun) -> Result<Vec<WeakDapViolation>, AnalysisError> {
    let poised = run
        .poised
        .as_ref()
        .ok_or(AnalysisError::NoPoisedAnnotations)?;
    let mut by_prefix: BTreeMap<usize, Vec<_>> = BTreeMap::new();
    for p in poised {
        by_prefix.entry(p.prefix).or_default().push(p);
    }
    let mut out = Vec::new();
    for (prefix, entries) in by_prefix {
        let mut candidates = BTreeSet::new();
        for (a, p) in entries.iter().enumerate() {
            for q in &entries[a + 1..] {
                if p.txn != q.txn
                    && p.base == q.base
                    && !(p.prim.is_trivial() && q.prim.is_trivial())
                {
                    let (t1, t2) = if p.txn < q.txn {
                        (p.txn, q.txn)
                    } else {
                        (q.txn, p.txn)
                    };
                    candidates.insert((t1, t2, p.base.clone()));
                }
            }
        }
        if candidates.is_empty() {
            continue;
        }
        let recs = run.execution.prefix(prefix).records();
        for (t1, t2, base) in candidates {
            let (Some(r1), Some(r2)) = (recs.get(&t1), recs.get(&t2)) else {
                continue;
            };
            if r1.dset().is_disjoint(&r2.dset()) && disjoint_in(&recs, t1, t2)? {
                out.push(WeakDapViolation {
                    prefix,
                    t1,
                    t2,
                    base,
                });
            }
        }
    }
    Ok(out)
}
