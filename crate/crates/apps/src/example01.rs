//! A tracker tube in an experimental hall, scored in the tube.

use nalgebra::Vector3;
use vmc_core::{Application, McContext, McError, McResult, VolumeId};

use crate::gun::GunConfig;
use crate::hits::Hit;
use crate::ScoringApp;

pub const ID_AL: i32 = 1;
pub const ID_AIR: i32 = 2;

/// Hall half-lengths, cm.
pub const HALL: [f64; 3] = [200.0, 100.0, 100.0];

pub struct Example01 {
    gun: GunConfig,
    sensitive_volume_id: Option<VolumeId>,
    hits: Vec<Hit>,
}

impl Example01 {
    pub fn new(gun: GunConfig) -> Self {
        Self {
            gun,
            sensitive_volume_id: None,
            hits: Vec::new(),
        }
    }

    /// One 1 GeV proton per event from the hall centre towards the tube.
    pub fn default_gun() -> GunConfig {
        GunConfig::new(2212, 1.0, -Vector3::x(), Vector3::zeros(), 1).expect("valid gun")
    }

    pub fn gun(&self) -> &GunConfig {
        &self.gun
    }

    pub fn sensitive_volume_id(&self) -> Option<VolumeId> {
        self.sensitive_volume_id
    }
}

impl Default for Example01 {
    fn default() -> Self {
        Self::new(Self::default_gun())
    }
}

impl Application for Example01 {
    fn construct_geometry(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        mc.material(1, "AL", 2.70, 8.9, 0.004)?;
        mc.material(2, "AIR", 1.205e-3, 30390.0, 2.2e-6)?;
        mc.medium(ID_AL, "AL_MED", 1, 0.001, 1.0)?;
        mc.medium(ID_AIR, "AIR_MED", 2, 0.001, 10.0)?;

        mc.gsvolu("EXPH", "BOX", ID_AIR, &HALL, 3)?;

        // Create tracker tube volume
        let tracker_tube = [0.0, 60.0, 50.0];
        mc.gsvolu("TRTU", "TUBE", ID_AL, &tracker_tube, 3)?;

        // Place tracker tube volume
        let (pos_x, pos_y, pos_z) = (-100.0, 0.0, 0.0);
        mc.gspos("TRTU", 1, "EXPH", pos_x, pos_y, pos_z, 0, "ONLY")?;
        Ok(())
    }

    fn init_geometry(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        self.sensitive_volume_id = Some(mc.vol_id("TRTU")?);
        Ok(())
    }

    fn generate_primaries(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        self.gun.fire(mc)
    }

    fn stepping(&mut self, mc: &mut McContext<'_>) -> McResult<()> {
        let (id, _copy) = mc.current_vol_id()?;
        let sensitive = self
            .sensitive_volume_id
            .ok_or_else(|| McError::Application("stepping before init_geometry".into()))?;
        if id != sensitive {
            return Ok(());
        }
        if let Some(hit) = Hit::from_step(mc)? {
            self.hits.push(hit);
        }
        Ok(())
    }
}

impl ScoringApp for Example01 {
    fn hits(&self) -> &[Hit] {
        &self.hits
    }

    fn take_hits(&mut self) -> Vec<Hit> {
        std::mem::take(&mut self.hits)
    }
}
