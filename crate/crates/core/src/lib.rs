//! Simulation and modeling library for an 868 MHz OOK wake-up-radio module.
//!
//! The crate covers the chip-level wake-up call codec ([`mls_codec`]), the
//! measured power tables and transaction cost model ([`airtime_energy`]),
//! the link budget and delivery model ([`link_model`]), a discrete-event
//! simulator of the module's state machines and host protocol
//! ([`device_sim`]), and battery lifetime projection ([`lifetime`]).
//!
//! Each capability has a runnable program under `examples/`:
//!
//! ```bash
//! cargo run --example transaction_energy
//! ```

pub mod airtime_energy;
pub mod cli;

pub mod config;
pub mod device_sim;

pub mod lifetime;
pub mod link_model;
pub mod mls_codec;
pub mod time;

pub use airtime_energy::{AuxOp, CostReport, PowerModel, TransactionReport};
pub use config::{ConfigError, ModelData};
pub use link_model::LinkParams;
pub use mls_codec::{ChipStream, DataRate, MlsCode, RadioConfig, WucFrame};
pub use time::SimTime;
