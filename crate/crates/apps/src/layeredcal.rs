//! A sampling calorimeter assembled from separate detector, beam and scoring components.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use vmc_core::{Application, McContext, McError, McResult, VolumeId};

use crate::gun::push_primary;
use crate::hits::Hit;
use crate::ScoringApp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerConfig {
    pub layers: u32,
    /// Absorber thickness, cm.
    pub absorber: f64,
    /// Gap thickness, cm.
    pub gap: f64,
}

impl Default for LayerConfig {
    fn default() -> Self {
        Self {
            layers: 10,
            absorber: 0.5,
            gap: 0.5,
        }
    }
}

impl LayerConfig {
    /// Length of the layer stack along z, cm.
    pub fn stack_length(&self) -> f64 {
        f64::from(self.layers) * (self.absorber + self.gap)
    }
}

/// Transverse half-size of the layers, cm.
pub const LAYER_HALF_WIDTH: f64 = 20.0;
const WORLD_HALF_WIDTH: f64 = 50.0;
const WORLD_MARGIN: f64 = 10.0;

/// Builds the layer stack: absorbers `ABSO` and sensitive gaps `GAP `, copy numbers
/// 1..=n, centred on the origin along z.
#[derive(Debug, Clone)]
pub struct Detector {
    pub config: LayerConfig,
    gap_id: Option<VolumeId>,
}

impl Detector {
    pub fn new(config: LayerConfig) -> Self {
        Self { config, gap_id: None }
    }

    pub fn construct(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        let c = self.config;
        mc.material(1, "AIR", 1.205e-3, 30390.0, 2.2e-6)?;
        mc.material(2, "FE", 7.87, 1.757, 0.0114)?;
        mc.material(3, "SCIN", 1.032, 42.4, 0.00205)?;
        mc.medium(1, "AIR_MED", 1, 0.001, 10.0)?;
        mc.medium(2, "FE_MED", 2, 0.001, 0.1)?;
        mc.medium(3, "SCIN_MED", 3, 0.001, 0.1)?;

        let half_z = c.stack_length() / 2.0 + WORLD_MARGIN;
        mc.gsvolu("WRLD", "BOX", 1, &[WORLD_HALF_WIDTH, WORLD_HALF_WIDTH, half_z], 3)?;
        if c.layers == 0 {
            return Ok(());
        }
        mc.gsvolu(
            "ABSO",
            "BOX",
            2,
            &[LAYER_HALF_WIDTH, LAYER_HALF_WIDTH, c.absorber / 2.0],
            3,
        )?;
        mc.gsvolu("GAP", "BOX", 3, &[LAYER_HALF_WIDTH, LAYER_HALF_WIDTH, c.gap / 2.0], 3)?;

        let z0 = -c.stack_length() / 2.0;
        let pitch = c.absorber + c.gap;
        // absorbers first: a later placement owns a shared face, so gaps keep theirs
        for i in 0..c.layers {
            let z = z0 + f64::from(i) * pitch + c.absorber / 2.0;
            mc.gspos("ABSO", i + 1, "WRLD", 0.0, 0.0, z, 0, "ONLY")?;
        }
        for i in 0..c.layers {
            let z = z0 + f64::from(i) * pitch + c.absorber + c.gap / 2.0;
            mc.gspos("GAP", i + 1, "WRLD", 0.0, 0.0, z, 0, "ONLY")?;
        }
        Ok(())
    }

    pub fn init(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        self.gap_id = if self.config.layers > 0 {
            Some(mc.vol_id("GAP")?)
        } else {
            None
        };
        Ok(())
    }

    pub fn is_sensitive(&self, id: VolumeId) -> bool {
        self.gap_id == Some(id)
    }
}

/// Proton beam along +z with a Gaussian spot and a flat energy spread.
#[derive(Debug, Clone)]
pub struct Beam {
    pub pdg: i32,
    /// Kinetic energy range, GeV.
    pub energy: (f64, f64),
    /// Spot width in x and y, cm.
    pub sigma: f64,
    /// z of the vertex, cm.
    pub z: f64,
    pub per_event: u32,
    rng: ChaCha8Rng,
}

impl Beam {
    pub fn new(seed: u64, z: f64) -> Self {
        Self {
            pdg: 2212,
            energy: (0.02, 0.08),
            sigma: 1.0,
            z,
            per_event: 1,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn generate(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        let spot = Normal::new(0.0, self.sigma).map_err(|e| McError::Application(e.to_string()))?;
        for _ in 0..self.per_event {
            let x = spot.sample(&mut self.rng);
            let y = spot.sample(&mut self.rng);
            let t = self.rng.random_range(self.energy.0..=self.energy.1);
            push_primary(mc, self.pdg, t, &Vector3::z(), &Vector3::new(x, y, self.z))?;
        }
        Ok(())
    }
}

/// Collects hits in sensitive volumes.
#[derive(Debug, Clone, Default)]
pub struct Scorer {
    hits: Vec<Hit>,
}

impl Scorer {
    pub fn score(&mut self, detector: &Detector, mc: &McContext<'_>) -> McResult<()> {
        let (id, _) = mc.current_vol_id()?;
        if !detector.is_sensitive(id) {
            return Ok(());
        }
        if let Some(hit) = Hit::from_step(mc)? {
            self.hits.push(hit);
        }
        Ok(())
    }
}

pub struct LayeredCal {
    pub detector: Detector,
    pub beam: Beam,
    pub scorer: Scorer,
}

impl LayeredCal {
    pub fn new(config: LayerConfig, seed: u64) -> Self {
        let z = -config.stack_length() / 2.0 - WORLD_MARGIN / 2.0;
        Self {
            detector: Detector::new(config),
            beam: Beam::new(seed, z),
            scorer: Scorer::default(),
        }
    }
}

impl Application for LayeredCal {
    fn construct_geometry(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        self.detector.construct(mc)
    }

    fn init_geometry(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        self.detector.init(mc)
    }

    fn generate_primaries(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        self.beam.generate(mc)
    }

    fn stepping(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        self.scorer.score(&self.detector, mc)
    }
}

impl ScoringApp for LayeredCal {
    fn hits(&self) -> &[Hit] {
        &self.scorer.hits
    }

    fn take_hits(&mut self) -> Vec<Hit> {
        std::mem::take(&mut self.scorer.hits)
    }
}
