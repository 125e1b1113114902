//! Defragmentation of module layouts on column-reconfigurable devices.
//!
//! The device is a one-dimensional array of typed slots. Modules occupy
//! contiguous slot ranges whose resource pattern must match the device, and
//! may be relocated by jumping into free space. The crate provides:
//!
//! - the layout model and legality rules ([`layout`], [`device`], [`format`]),
//! - the LeftRightShift, greedy and tabu strategies ([`strategies`]),
//! - seeded and adversarial instance generators ([`instances`]),
//! - an exact BFS oracle for small instances ([`oracle`]),
//! - a makespan simulator for module request sequences ([`sim`]),
//! - batch experiment drivers used by the CLI ([`experiments`]).

pub mod cli;
pub mod device;
pub mod experiments;

pub mod format;
pub mod instances;
pub mod layout;
pub mod oracle;
pub mod sim;

pub mod strategies;

pub use device::{Device, DeviceError, SlotType};
pub use layout::{FreeInterval, Layout, LayoutError, ModuleId, ModuleSpec, Move, MoveError};
pub use strategies::{Strategy, StrategyReport};
