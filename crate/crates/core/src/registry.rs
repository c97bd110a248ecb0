//! Run-time engine selection by name.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::config::EngineConfig;
use crate::engine::TransportEngine;
use crate::error::{McError, McResult};
use crate::lifecycle::MonteCarlo;
use crate::particles::ParticleDb;

pub type EngineFactory = Box<dyn Fn(&EngineConfig) -> Box<dyn TransportEngine> + Send + Sync>;

/// Named engine factories plus the particle table handed to every engine created.
pub struct EngineRegistry {
    factories: BTreeMap<String, EngineFactory>,
    particles: Arc<ParticleDb>,
}

impl Default for EngineRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for EngineRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EngineRegistry")
            .field("engines", &self.names().collect::<Vec<_>>())
            .finish()
    }
}

impl EngineRegistry {
    /// Empty registry using the built-in particle table.
    pub fn new() -> Self {
        Self::with_particles(Arc::new(ParticleDb::builtin()))
    }

    pub fn with_particles(particles: Arc<ParticleDb>) -> Self {
        Self {
            factories: BTreeMap::new(),
            particles,
        }
    }

    pub fn particles(&self) -> &Arc<ParticleDb> {
        &self.particles
    }

    pub fn register<F>(&mut self, name: &str, factory: F) -> McResult<()>
    where
        F: Fn(&EngineConfig) -> Box<dyn TransportEngine> + Send + Sync + 'static,
    {
        if name.is_empty() {
            return Err(McError::Config("engine name must not be empty".into()));
        }
        if self.factories.contains_key(name) {
            return Err(McError::DuplicateEngineName(name.to_string()));
        }
        self.factories.insert(name.to_string(), Box::new(factory));
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    /// Registered names in sorted order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    /// Instantiates the engine named in `cfg`, ready for `init_mc`.
    pub fn create(&self, cfg: &EngineConfig) -> McResult<MonteCarlo> {
        let factory = self
            .factories
            .get(&cfg.engine_name)
            .ok_or_else(|| McError::UnknownEngine(cfg.engine_name.clone()))?;
        Ok(MonteCarlo::new(factory(cfg), cfg.clone(), self.particles.clone()))
    }
}
