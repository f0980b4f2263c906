//! Agents, delays, influence functions and initial histories.

pub mod delay;
pub mod function;
pub mod history;
pub mod influence;
pub mod scenario;

pub use delay::{DelaySpec, DelayValue};
pub use function::ScalarFn;
pub use history::{HistoryFn, InitialHistory};
pub use influence::{GeneralInfluence, Influence, InfluenceSpec, RadialInfluence};
pub use scenario::Scenario;
