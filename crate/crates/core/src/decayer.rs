//! The external-decayer contract and a table-driven two-body implementation.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, RngCore};
use serde::Deserialize;
use thiserror::Error;

use crate::kinematics::FourMomentum;
use crate::particles::ParticleDb;
use crate::stack::MASS_SHELL_TOLERANCE;

const BUILTIN: &str = include_str!("../data/decays.json");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecayError {
    #[error("no decay channels for PDG {0}")]
    NoChannels(i32),
    #[error("parent PDG {pdg} is off mass shell (m² residual {residual:e} GeV²)")]
    OffMassShell { pdg: i32, residual: f64 },
    #[error("invalid decay table: {0}")]
    InvalidTable(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayChannel {
    pub parent: i32,
    pub products: [i32; 2],
    #[serde(rename = "br")]
    pub branching: f64,
}

/// A particle produced by a decay, ready to be pushed onto the stack.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProduct {
    pub pdg: i32,
    pub momentum: FourMomentum,
    pub position: Vector3<f64>,
    pub time: f64,
}

/// Turns an unstable parent into its decay products.
///
/// Implementations hold no per-call state; randomness comes from the caller's generator.
pub trait Decayer: Send + Sync {
    fn has_channels(&self, pdg: i32) -> bool;

    fn decay(
        &self,
        pdg: i32,
        momentum: FourMomentum,
        position: Vector3<f64>,
        time: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<DecayProduct>, DecayError>;
}

/// Two-body decays from a channel table: isotropic in the parent rest frame, then boosted.
#[derive(Debug, Clone)]
pub struct TwoBodyDecayer {
    particles: Arc<ParticleDb>,
    channels: BTreeMap<i32, Vec<DecayChannel>>,
}

impl TwoBodyDecayer {
    pub fn builtin(particles: Arc<ParticleDb>) -> Self {
        Self::from_json_str(BUILTIN, particles).expect("built-in decay table is valid")
    }

    pub fn from_path(path: impl AsRef<Path>, particles: Arc<ParticleDb>) -> Result<Self, DecayError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| DecayError::InvalidTable(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text, particles)
    }

    pub fn from_json_str(text: &str, particles: Arc<ParticleDb>) -> Result<Self, DecayError> {
        let list: Vec<DecayChannel> =
            serde_json::from_str(text).map_err(|e| DecayError::InvalidTable(e.to_string()))?;
        Self::from_channels(list, particles)
    }

    pub fn from_channels(list: Vec<DecayChannel>, particles: Arc<ParticleDb>) -> Result<Self, DecayError> {
        let mass = |pdg: i32| {
            particles
                .lookup(pdg)
                .map(|d| d.mass)
                .map_err(|e| DecayError::InvalidTable(e.to_string()))
        };
        let mut channels: BTreeMap<i32, Vec<DecayChannel>> = BTreeMap::new();
        for ch in list {
            if !(0.0..=1.0).contains(&ch.branching) {
                return Err(DecayError::InvalidTable(format!(
                    "{}: branching {} outside [0, 1]",
                    ch.parent, ch.branching
                )));
            }
            let (m, m1, m2) = (mass(ch.parent)?, mass(ch.products[0])?, mass(ch.products[1])?);
            if m1 + m2 > m {
                return Err(DecayError::InvalidTable(format!(
                    "{} -> {:?} is kinematically closed",
                    ch.parent, ch.products
                )));
            }
            channels.entry(ch.parent).or_default().push(ch);
        }
        for (parent, list) in &channels {
            let total: f64 = list.iter().map(|c| c.branching).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(DecayError::InvalidTable(format!(
                    "branching fractions of {parent} sum to {total}"
                )));
            }
        }
        Ok(Self { particles, channels })
    }

    pub fn channels(&self, pdg: i32) -> &[DecayChannel] {
        self.channels.get(&pdg).map(Vec::as_slice).unwrap_or(&[])
    }

    fn pick(list: &[DecayChannel], u: f64) -> &DecayChannel {
        let mut acc = 0.0;
        for ch in list {
            acc += ch.branching;
            if u < acc {
                return ch;
            }
        }
        list.iter()
            .rev()
            .find(|c| c.branching > 0.0)
            .unwrap_or(&list[list.len() - 1])
    }
}

/// Momentum of either product in the rest frame of a parent of mass `m`.
pub fn two_body_momentum(m: f64, m1: f64, m2: f64) -> f64 {
    let a = m * m - (m1 + m2) * (m1 + m2);
    let b = m * m - (m1 - m2) * (m1 - m2);
    (a * b).max(0.0).sqrt() / (2.0 * m)
}

impl Decayer for TwoBodyDecayer {
    fn has_channels(&self, pdg: i32) -> bool {
        self.channels.contains_key(&pdg)
    }

    fn decay(
        &self,
        pdg: i32,
        momentum: FourMomentum,
        position: Vector3<f64>,
        time: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<DecayProduct>, DecayError> {
        let list = self.channels.get(&pdg).ok_or(DecayError::NoChannels(pdg))?;
        let table_mass = self
            .particles
            .lookup(pdg)
            .map_err(|e| DecayError::InvalidTable(e.to_string()))?
            .mass;
        let residual = momentum.mass2() - table_mass * table_mass;
        if residual.abs() > MASS_SHELL_TOLERANCE || momentum.e <= 0.0 {
            return Err(DecayError::OffMassShell { pdg, residual });
        }
        // kinematics use the invariant mass of the supplied four-momentum so the products
        // add back to it exactly
        let m = momentum.mass();

        let channel = Self::pick(list, rng.random::<f64>());
        let [pdg1, pdg2] = channel.products;
        let m1 = self
            .particles
            .lookup(pdg1)
            .map_err(|e| DecayError::InvalidTable(e.to_string()))?
            .mass;
        let m2 = self
            .particles
            .lookup(pdg2)
            .map_err(|e| DecayError::InvalidTable(e.to_string()))?
            .mass;
        let pstar = two_body_momentum(m, m1, m2);

        let cos_theta = 2.0 * rng.random::<f64>() - 1.0;
        let phi = 2.0 * PI * rng.random::<f64>();
        let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        let dir = Vector3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta);

        let rest1 = FourMomentum::from_parts(dir * pstar, (pstar * pstar + m1 * m1).sqrt());
        let beta = momentum.p3() / momentum.e;
        let lab1 = rest1.boosted(&beta);
        let lab2 = momentum - lab1;

        Ok(vec![
            DecayProduct {
                pdg: pdg1,
                momentum: lab1,
                position,
                time,
            },
            DecayProduct {
                pdg: pdg2,
                momentum: lab2,
                position,
                time,
            },
        ])
    }
}
