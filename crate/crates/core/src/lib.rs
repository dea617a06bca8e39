//! Round-based NDN retrieval of weather radar data.
//!
//! Radars publish files under names that encode a round number and a
//! sequence number within the round, so a merge-site consumer can compute
//! the next name without a directory listing. The crate contains the naming
//! scheme, packet model, an NDN forwarder, the producer and consumer state
//! machines, a deterministic discrete-event network simulator, mosaic
//! collection policies, and an experiment runner.

pub mod forwarder;
pub mod mosaic;
pub mod names;
pub mod packets;
pub mod protocol;
pub mod runner;
pub mod simnet;
pub mod time;
