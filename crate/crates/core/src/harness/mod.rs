//! Simulation harness behind the `stsk` binary.

pub mod campaign;
pub mod config;
pub mod report;

pub use campaign::{
    build_codebook, build_dms, default_gain_entries, run_capacity_campaign, run_gain_table, run_ser_campaign,
    run_verify, with_threads, CapacityPoint, GainEntry, GainRow, SerPoint, VerifyReport,
};
pub use config::{DetectorSpec, DmFamilySpec, SimConfig, SubsetSpec};
