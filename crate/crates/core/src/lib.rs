//! Residential nanogrid simulation (battery, converters, priority dispatch,
//! net-metering bills) and heat-pump test-data reduction (COP, energy
//! balance, weather normalisation, Welch's t-test, polynomial fits).

pub mod analysis;
pub mod battery;
pub mod billing;
pub mod converters;
pub mod dispatch;
pub mod error;
pub mod io;
pub mod pvsolar;

pub use error::{Error, Result};
