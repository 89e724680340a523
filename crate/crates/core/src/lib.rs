//! A deterministic laboratory for transactional-memory executions.
//!
//! TM implementations are modelled as step machines over shared base
//! objects. A scripted scheduler drives them through adversarial schedules,
//! and the resulting executions are checked for strict serializability,
//! invisible reads, disjoint-access parallelism and expensive
//! synchronization patterns (RAW/AWAR).

pub mod analysis;
pub mod cli;
pub mod harness;
pub mod model;
pub mod serializability;
pub mod tms;
