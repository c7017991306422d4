//! Bundled example models and property suites.

/// Cruise controller with three state variables and five exclusive inputs.
pub const CRUISE_MODEL: &str = include_str!("../fixtures/cruise.rsys");

/// Four properties, one per bold transition of the cruise state machine.
pub const CRUISE_PROPS: &str = include_str!("../fixtures/cruise1.props");

/// Two properties whose shortest abstract path needs one repair step.
pub const CRUISE_BROKEN_PROPS: &str = include_str!("../fixtures/broken.props");

/// Nine properties with multi-state triggers.
pub const CRUISE2_PROPS: &str = include_str!("../fixtures/cruise2.props");

/// Initial and final state set used with the cruise model.
pub const CRUISE_INIT: &str = "mode == OFF && speed == 0 && !enable";
