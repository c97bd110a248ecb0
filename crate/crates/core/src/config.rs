//! Engine configuration and its JSON form.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{McError, McResult};

/// Seed applied when a configuration does not name one.
pub const DEFAULT_SEED: u64 = 1;

/// Physics switches an engine understands.
pub const PHYSICS_FLAGS: [&str; 3] = ["loss", "mscat", "decay"];

/// Everything needed to instantiate an engine.
///
/// Physics flags absent from the map fall back to the engine's own defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub engine_name: String,
    pub seed: u64,
    pub physics_flags: BTreeMap<String, bool>,
    /// Replaces every medium's energy cut, GeV.
    pub energy_cut_override: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    engine: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    physics: BTreeMap<String, bool>,
    #[serde(default)]
    cut_gev: Option<f64>,
}

/// A configuration file as read, before defaults and command-line values are merged in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub engine: Option<String>,
    pub seed: Option<u64>,
    pub physics: BTreeMap<String, bool>,
    pub cut_gev: Option<f64>,
}

impl PartialConfig {
    pub fn from_json_str(text: &str) -> McResult<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| McError::Config(e.to_string()))?;
        let cfg = Self {
            engine: file.engine,
            seed: file.seed,
            physics: file.physics,
            cut_gev: file.cut_gev,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> McResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| McError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    fn check(&self) -> McResult<()> {
        if let Some(key) = self.physics.keys().find(|k| !PHYSICS_FLAGS.contains(&k.as_str())) {
            return Err(McError::Config(format!("unknown physics flag {key:?}")));
        }
        if let Some(cut) = self.cut_gev {
            if !(cut.is_finite() && cut >= 0.0) {
                return Err(McError::Config(format!("cut_gev must be >= 0, got {cut}")));
            }
        }
        Ok(())
    }

    /// `self` with every value set in `over` replacing its own.
    pub fn overlay(mut self, over: PartialConfig) -> McResult<Self> {
        if over.engine.is_some() {
            self.engine = over.engine;
        }
        if over.seed.is_some() {
            self.seed = over.seed;
        }
        if over.cut_gev.is_some() {
            self.cut_gev = over.cut_gev;
        }
        self.physics.extend(over.physics);
        self.check()?;
        Ok(self)
    }

    /// Fills in defaults. The engine name is mandatory.
    pub fn resolve(self) -> McResult<EngineConfig> {
        self.check()?;
        let engine_name = self
            .engine
            .ok_or_else(|| McError::Config("no engine selected".into()))?;
        Ok(EngineConfig {
            engine_name,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            physics_flags: self.physics,
            energy_cut_override: self.cut_gev,
        })
    }
}

impl EngineConfig {
    pub fn new(engine_name: impl Into<String>) -> Self {
        Self {
            engine_name: engine_name.into(),
            seed: DEFAULT_SEED,
            physics_flags: BTreeMap::new(),
            energy_cut_override: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_flag(mut self, flag: &str, on: bool) -> Self {
        self.physics_flags.insert(flag.to_string(), on);
        self
    }

    pub fn with_cut(mut self, cut_gev: f64) -> Self {
        self.energy_cut_override = Some(cut_gev);
        self
    }

    pub fn from_json_str(text: &str) -> McResult<Self> {
        PartialConfig::from_json_str(text)?.resolve()
    }

    pub fn from_path(path: impl AsRef<Path>) -> McResult<Self> {
        PartialConfig::from_path(path)?.resolve()
    }

    pub fn to_json(&self) -> String {
        let file = ConfigFile {
            engine: Some(self.engine_name.clone()),
            seed: Some(self.seed),
            physics: self.physics_flags.clone(),
            cut_gev: self.energy_cut_override,
        };
        serde_json::to_string(&file).expect("config serializes")
    }

    /// Value of a physics flag, or `default` when the configuration leaves it unset.
    pub fn flag(&self, name: &str, default: bool) -> bool {
        self.physics_flags.get(name).copied().unwrap_or(default)
    }
}
