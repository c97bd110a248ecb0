//! Example user applications.
//!
//! Both are written only against the contracts of `vmc-core`; which transport engine runs
//! them is decided by whoever calls `init_mc`/`run_mc`.

pub mod example01;
pub mod gun;
pub mod hits;
pub mod layeredcal;

use thiserror::Error;
use vmc_core::Application;

pub use example01::Example01;
pub use gun::GunConfig;
pub use hits::{write_csv, Hit, CSV_HEADER};
pub use layeredcal::{LayerConfig, LayeredCal};

/// An application that records hits.
pub trait ScoringApp: Application + Send {
    fn hits(&self) -> &[Hit];

    fn take_hits(&mut self) -> Vec<Hit>;
}

pub const APP_NAMES: [&str; 2] = ["example01", "layeredcal"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown app: {0}")]
pub struct UnknownApp(pub String);

/// Instantiates an example application by name. `seed` drives any randomness the
/// application itself has (LayeredCal's beam).
pub fn make_app(name: &str, seed: u64) -> Result<Box<dyn ScoringApp>, UnknownApp> {
    match name {
        "example01" => Ok(Box::new(Example01::default())),
        "layeredcal" => Ok(Box::new(LayeredCal::new(LayerConfig::default(), seed))),
        other => Err(UnknownApp(other.to_string())),
    }
}
