//! Two transport engines built on one stepping kernel.
//!
//! * `linear`: straight tracks with constant dE/dx per medium.
//! * `scatter`: the same, plus Highland multiple scattering and decay in flight through
//!   an external [`Decayer`] (the built-in two-body table unless one is installed).
//!
//! With multiple scattering and decay switched off the scatter engine runs exactly the
//! linear engine's code path and reproduces its steps bit for bit.

pub mod kernel;
pub mod physics;

use std::sync::Arc;

use vmc_core::{
    Decayer, EngineConfig, EngineRegistry, Geometry, McResult, ParticleDb, StackEntry, TrackSession, TransportEngine,
    TwoBodyDecayer,
};

pub use kernel::StepKernel;
pub use physics::PhysicsParams;

pub const LINEAR: &str = "linear";
pub const SCATTER: &str = "scatter";

/// Continuous energy loss only. The `mscat` and `decay` flags are ignored.
pub struct LinearEngine {
    kernel: StepKernel,
}

impl LinearEngine {
    pub const DEFAULTS: PhysicsParams = PhysicsParams {
        loss: true,
        mscat: false,
        decay: false,
        cut_override: None,
    };

    pub fn new(cfg: &EngineConfig) -> Self {
        let mut params = PhysicsParams::from_config(cfg, Self::DEFAULTS);
        params.mscat = false;
        params.decay = false;
        Self {
            kernel: StepKernel::new(params, cfg.seed),
        }
    }

    pub fn params(&self) -> &PhysicsParams {
        self.kernel.params()
    }
}

impl TransportEngine for LinearEngine {
    fn name(&self) -> &str {
        LINEAR
    }

    fn transport_track(&mut self, track: &StackEntry, session: &mut TrackSession<'_>) -> McResult<()> {
        self.kernel.transport(track, session)
    }
}

/// Energy loss, multiple scattering and decay in flight, each switchable.
pub struct ScatterEngine {
    kernel: StepKernel,
}

impl ScatterEngine {
    pub const DEFAULTS: PhysicsParams = PhysicsParams {
        loss: true,
        mscat: true,
        decay: true,
        cut_override: None,
    };

    pub fn new(cfg: &EngineConfig) -> Self {
        Self {
            kernel: StepKernel::new(PhysicsParams::from_config(cfg, Self::DEFAULTS), cfg.seed),
        }
    }

    pub fn params(&self) -> &PhysicsParams {
        self.kernel.params()
    }
}

impl TransportEngine for ScatterEngine {
    fn name(&self) -> &str {
        SCATTER
    }

    fn initialize(&mut self, _geometry: Arc<Geometry>, particles: Arc<ParticleDb>) -> McResult<()> {
        if self.kernel.params().decay && !self.kernel.has_decayer() {
            self.kernel.set_decayer(Arc::new(TwoBodyDecayer::builtin(particles)));
        }
        Ok(())
    }

    fn set_external_decayer(&mut self, decayer: Arc<dyn Decayer>) {
        self.kernel.set_decayer(decayer);
    }

    fn transport_track(&mut self, track: &StackEntry, session: &mut TrackSession<'_>) -> McResult<()> {
        self.kernel.transport(track, session)
    }
}

/// Adds `linear` and `scatter` to `registry`.
pub fn register_builtin(registry: &mut EngineRegistry) -> McResult<()> {
    registry.register(LINEAR, |cfg| Box::new(LinearEngine::new(cfg)))?;
    registry.register(SCATTER, |cfg| Box::new(ScatterEngine::new(cfg)))?;
    Ok(())
}

/// A registry holding both engines and the built-in particle table.
pub fn default_registry() -> EngineRegistry {
    let mut registry = EngineRegistry::new();
    register_builtin(&mut registry).expect("fresh registry has no name clashes");
    registry
}
