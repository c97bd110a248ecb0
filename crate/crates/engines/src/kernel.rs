//! The stepping loop shared by every engine in this crate.

use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vmc_core::geometry::GeometryError;
use vmc_core::{
    Decayer, FourMomentum, McError, McResult, StackEntry, StepState, TrackSession, TrackStatus, VolumePath,
    SPEED_OF_LIGHT_CM_S,
};

use crate::physics::{self, PhysicsParams};

/// How far past a boundary the next volume is probed, cm.
pub const BOUNDARY_PUSH: f64 = 1e-9;

/// Steps after which a track is declared runaway.
pub const MAX_STEPS_PER_TRACK: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Limit {
    Boundary,
    MaxStep,
    Decay,
}

/// Stepping state machine plus the engine's random stream.
///
/// The generator is ChaCha8 seeded with `seed_from_u64(seed)`; one stream serves the whole
/// run, so results depend only on the seed and the order of tracks.
pub struct StepKernel {
    params: PhysicsParams,
    rng: ChaCha8Rng,
    decayer: Option<Arc<dyn Decayer>>,
}

impl StepKernel {
    pub fn new(params: PhysicsParams, seed: u64) -> Self {
        Self {
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            decayer: None,
        }
    }

    pub fn params(&self) -> &PhysicsParams {
        &self.params
    }

    pub fn set_decayer(&mut self, decayer: Arc<dyn Decayer>) {
        self.decayer = Some(decayer);
    }

    pub fn has_decayer(&self) -> bool {
        self.decayer.is_some()
    }

    fn nav(track: &StackEntry, e: GeometryError) -> McError {
        McError::Navigation {
            track: track.track_id,
            source: e,
        }
    }

    /// Lab decay length for this track, when decays apply to it.
    fn sample_decay_length(&mut self, pdg: i32, mass: f64, p: f64, ctau: f64) -> Option<f64> {
        if !self.params.decay || !ctau.is_finite() || mass <= 0.0 {
            return None;
        }
        let decayer = self.decayer.as_ref()?;
        if !decayer.has_channels(pdg) {
            return None;
        }
        // u in (0, 1]
        let u = 1.0 - self.rng.random::<f64>();
        Some(physics::decay_length(ctau, p / mass, u))
    }

    /// Transports one track, reporting every step through `session`.
    ///
    /// A track that starts outside the world produces no steps.
    pub fn transport(&mut self, track: &StackEntry, session: &mut TrackSession<'_>) -> McResult<()> {
        let geometry = session.geometry();
        let def = session.particles().lookup(track.pdg)?;
        let (mass, charge) = (def.mass, def.charge());

        let mut pos = track.position;
        let mut time = track.time;
        let mut e = track.momentum.e;
        let mut p = track.momentum.p();
        let mut dir = if p > 0.0 { track.momentum.p3() / p } else { Vector3::z() };

        let mut path = match geometry.locate(&pos) {
            Ok(path) => path,
            Err(GeometryError::OutsideWorld) => return Ok(()),
            Err(err) => return Err(Self::nav(track, err)),
        };
        let mut decay_left = self.sample_decay_length(track.pdg, mass, p, def.ctau());
        let mut entering = true;

        for _ in 0..MAX_STEPS_PER_TRACK {
            let volume = path.volume_id();
            let medium = geometry.medium_of(volume);
            let material = geometry.material_of(volume);

            let (mut step, mut limit) = if p > 0.0 {
                let boundary = geometry
                    .distance_to_boundary(&path, &pos, &dir)
                    .map_err(|err| Self::nav(track, err))?;
                if boundary <= medium.max_step {
                    (boundary, Limit::Boundary)
                } else {
                    (medium.max_step, Limit::MaxStep)
                }
            } else {
                (0.0, Limit::MaxStep)
            };
            if let Some(left) = decay_left {
                if left < step || p == 0.0 {
                    step = left.min(step);
                    limit = Limit::Decay;
                }
            }

            let kinetic = e - mass;
            let beta = if e > 0.0 { p / e } else { 0.0 };
            let (p_pre, dir_pre) = (p, dir);

            pos += dir * step;
            if beta > 0.0 {
                time += step / (beta * SPEED_OF_LIGHT_CM_S);
            }
            if let Some(left) = &mut decay_left {
                *left -= step;
            }

            let mut edep = 0.0;
            let mut stopped = false;
            if charge != 0.0 && self.params.loss {
                let cut = self.params.cut(medium.energy_cut);
                (edep, stopped) = physics::continuous_loss(kinetic, material.dedx(), step, cut);
                if stopped {
                    e = mass;
                    p = 0.0;
                } else {
                    e -= edep;
                    p = (e * e - mass * mass).max(0.0).sqrt();
                }
            } else if p == 0.0 && limit != Limit::Decay {
                // at rest with nothing to do
                stopped = true;
            }

            if charge != 0.0 && self.params.mscat && step > 0.0 && !stopped {
                let theta0 = physics::highland_theta0(beta, p_pre, charge, step / material.radiation_length);
                dir = physics::sample_deflection(&mut self.rng, &dir_pre, theta0).0;
            }

            let mut exiting = false;
            let mut status = TrackStatus::Alive;
            let mut next_path: Option<VolumePath> = None;
            if stopped {
                status = TrackStatus::Stopped;
            } else if limit == Limit::Decay {
                status = TrackStatus::Decayed;
            } else if limit == Limit::Boundary {
                exiting = true;
                match geometry.locate(&(pos + dir * BOUNDARY_PUSH)) {
                    Ok(found) if found == path && step == 0.0 => {
                        // no progress: step through the surface
                        pos += dir * BOUNDARY_PUSH;
                        step += BOUNDARY_PUSH;
                        exiting = false;
                    }
                    Ok(found) => next_path = Some(found),
                    Err(GeometryError::OutsideWorld) => status = TrackStatus::LeftWorld,
                    Err(err) => return Err(Self::nav(track, err)),
                }
            }

            let momentum = FourMomentum::from_parts(dir * p, e);
            if status == TrackStatus::Decayed {
                let decayer = self.decayer.clone().expect("decay length implies a decayer");
                for product in decayer.decay(track.pdg, momentum, pos, time, &mut self.rng)? {
                    session.push_secondary(product.pdg, product.momentum, product.position, product.time)?;
                }
            }

            let state = StepState {
                track_id: track.track_id,
                pdg: track.pdg,
                charge,
                path: path.clone(),
                position: pos,
                time,
                momentum,
                step_length: step,
                edep,
                entering,
                exiting,
                stopped,
                status,
            };
            session.stepping(&state)?;
            if status != TrackStatus::Alive {
                return Ok(());
            }
            entering = false;
            if let Some(found) = next_path {
                if found != path {
                    entering = true;
                    path = found;
                }
            }
        }
        Err(McError::StepLimit {
            track: track.track_id,
            limit: MAX_STEPS_PER_TRACK,
        })
    }
}
