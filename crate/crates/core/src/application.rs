//! The user-application contract and the facade user code talks to.

use nalgebra::Vector3;

use crate::error::{McError, McResult};
use crate::geometry::{Geometry, GeometryBuilder, GeometryError, VolumeId};
use crate::kinematics::FourMomentum;
use crate::particles::{ParticleDb, ParticleDef};
use crate::stack::{McStack, StackEntry, TrackId};
use crate::step::StepState;

/// User actions at each stage of a run. Only `construct_geometry`, `generate_primaries` and
/// `stepping` are mandatory.
///
/// Every callback receives an [`McContext`], the only route from user code to the engine:
/// geometry calls while constructing, the stack while generating primaries, and the step
/// accessors while stepping. The first callback error aborts the run.
pub trait Application {
    fn construct_geometry(&mut self, mc: &mut McContext<'_>) -> McResult<()>;

    fn init_geometry(&mut self, _mc: &mut McContext<'_>) -> McResult<()> {
        Ok(())
    }

    fn generate_primaries(&mut self, mc: &mut McContext<'_>) -> McResult<()>;

    fn begin_event(&mut self, _mc: &mut McContext<'_>) -> McResult<()> {
        Ok(())
    }

    fn begin_primary(&mut self, _mc: &mut McContext<'_>) -> McResult<()> {
        Ok(())
    }

    fn pre_track(&mut self, _mc: &mut McContext<'_>) -> McResult<()> {
        Ok(())
    }

    fn stepping(&mut self, mc: &mut McContext<'_>) -> McResult<()>;

    fn post_track(&mut self, _mc: &mut McContext<'_>) -> McResult<()> {
        Ok(())
    }

    fn finish_primary(&mut self, _mc: &mut McContext<'_>) -> McResult<()> {
        Ok(())
    }

    fn finish_event(&mut self, _mc: &mut McContext<'_>) -> McResult<()> {
        Ok(())
    }
}

pub(crate) enum GeometryAccess<'a> {
    Building(&'a mut GeometryBuilder),
    Closed(&'a Geometry),
}

/// The engine as seen from inside a callback.
pub struct McContext<'a> {
    geometry: GeometryAccess<'a>,
    particles: &'a ParticleDb,
    stack: &'a mut dyn McStack,
    step: Option<&'a StepState>,
    event: u64,
}

impl<'a> McContext<'a> {
    pub(crate) fn new(
        geometry: GeometryAccess<'a>,
        particles: &'a ParticleDb,
        stack: &'a mut dyn McStack,
        step: Option<&'a StepState>,
        event: u64,
    ) -> Self {
        Self {
            geometry,
            particles,
            stack,
            step,
            event,
        }
    }

    fn builder(&mut self) -> McResult<&mut GeometryBuilder> {
        match &mut self.geometry {
            GeometryAccess::Building(b) => Ok(b),
            GeometryAccess::Closed(_) => Err(GeometryError::GeometryClosed.into()),
        }
    }

    pub fn material(
        &mut self,
        id: i32,
        name: &str,
        density: f64,
        radiation_length: f64,
        dedx_ref: f64,
    ) -> McResult<()> {
        Ok(self
            .builder()?
            .define_material(id, name, density, radiation_length, dedx_ref)?)
    }

    pub fn medium(&mut self, id: i32, name: &str, material_id: i32, energy_cut: f64, max_step: f64) -> McResult<()> {
        Ok(self
            .builder()?
            .define_medium(id, name, material_id, energy_cut, max_step)?)
    }

    pub fn gsvolu(
        &mut self,
        name: &str,
        shape: &str,
        medium_id: i32,
        params: &[f64],
        nparams: usize,
    ) -> McResult<VolumeId> {
        Ok(self.builder()?.gsvolu(name, shape, medium_id, params, nparams)?)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn gspos(
        &mut self,
        name: &str,
        copy: u32,
        mother: &str,
        x: f64,
        y: f64,
        z: f64,
        rot_id: i32,
        flag: &str,
    ) -> McResult<()> {
        Ok(self.builder()?.gspos(name, copy, mother, x, y, z, rot_id, flag)?)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn gsrotm(
        &mut self,
        id: i32,
        theta1: f64,
        phi1: f64,
        theta2: f64,
        phi2: f64,
        theta3: f64,
        phi3: f64,
    ) -> McResult<()> {
        Ok(self.builder()?.gsrotm(id, theta1, phi1, theta2, phi2, theta3, phi3)?)
    }

    pub fn gsbool(&mut self, volume: &str, many: &str) -> McResult<()> {
        Ok(self.builder()?.gsbool(volume, many)?)
    }

    /// Numeric id of a defined volume, available both while building and after closing.
    pub fn vol_id(&self, name: &str) -> McResult<VolumeId> {
        let id = match &self.geometry {
            GeometryAccess::Building(b) => b.volume_id(name)?,
            GeometryAccess::Closed(g) => g.volume_id(name)?,
        };
        Ok(id)
    }

    /// The closed geometry; `None` while it is still being constructed.
    pub fn geometry(&self) -> Option<&Geometry> {
        match &self.geometry {
            GeometryAccess::Building(_) => None,
            GeometryAccess::Closed(g) => Some(g),
        }
    }

    pub fn particle(&self, pdg: i32) -> McResult<&ParticleDef> {
        Ok(self.particles.lookup(pdg)?)
    }

    pub fn stack(&mut self) -> &mut dyn McStack {
        &mut *self.stack
    }

    /// 1-based number of the current event; 0 outside events.
    pub fn event_number(&self) -> u64 {
        self.event
    }

    pub fn current_track_id(&self) -> McResult<TrackId> {
        Ok(self.stack.current_track()?)
    }

    pub fn current_track(&self) -> McResult<&StackEntry> {
        let id = self.stack.current_track()?;
        self.stack.track(id).ok_or(McError::StackUnderflow)
    }

    fn step(&self) -> McResult<&StepState> {
        self.step.ok_or(McError::OutsideStepping)
    }

    /// Full step snapshot.
    pub fn step_state(&self) -> McResult<&StepState> {
        self.step()
    }

    /// `(volume id, copy number)` of the volume the step was taken in.
    pub fn current_vol_id(&self) -> McResult<(VolumeId, u32)> {
        let s = self.step()?;
        Ok((s.path.volume_id(), s.path.copy()))
    }

    pub fn track_position(&self) -> McResult<Vector3<f64>> {
        Ok(self.step()?.position)
    }

    pub fn track_time(&self) -> McResult<f64> {
        Ok(self.step()?.time)
    }

    pub fn track_momentum(&self) -> McResult<FourMomentum> {
        Ok(self.step()?.momentum)
    }

    /// Energy deposited on this step, GeV.
    pub fn edep(&self) -> McResult<f64> {
        Ok(self.step()?.edep)
    }

    pub fn track_step(&self) -> McResult<f64> {
        Ok(self.step()?.step_length)
    }

    pub fn track_charge(&self) -> McResult<f64> {
        Ok(self.step()?.charge)
    }

    pub fn track_pid(&self) -> McResult<i32> {
        Ok(self.step()?.pdg)
    }

    pub fn is_track_entering(&self) -> McResult<bool> {
        Ok(self.step()?.entering)
    }

    pub fn is_track_exiting(&self) -> McResult<bool> {
        Ok(self.step()?.exiting)
    }

    pub fn is_track_stopped(&self) -> McResult<bool> {
        Ok(self.step()?.stopped)
    }
}
