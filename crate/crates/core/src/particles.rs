//! Static particle properties keyed by PDG code.
//!
//! The table is loaded from a JSON fixture (`data/particles.json` is built in); no particle
//! constant lives anywhere else in the code.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

/// Speed of light in cm/s.
pub const SPEED_OF_LIGHT_CM_S: f64 = 2.997_924_58e10;

const BUILTIN: &str = include_str!("../data/particles.json");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParticleError {
    #[error("unknown PDG code {0}")]
    UnknownPdg(i32),
    #[error("invalid particle table: {0}")]
    InvalidTable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleDef {
    pub pdg: i32,
    pub name: String,
    /// Electric charge in units of e/3.
    pub charge_thirds: i32,
    /// GeV
    pub mass: f64,
    /// Mean proper lifetime in seconds; `f64::INFINITY` for stable particles.
    pub lifetime: f64,
}

impl ParticleDef {
    /// Charge in units of e.
    pub fn charge(&self) -> f64 {
        f64::from(self.charge_thirds) / 3.0
    }

    pub fn is_stable(&self) -> bool {
        self.lifetime.is_infinite()
    }

    /// Mean proper decay length cτ in cm.
    pub fn ctau(&self) -> f64 {
        SPEED_OF_LIGHT_CM_S * self.lifetime
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    pdg: i32,
    name: String,
    charge_thirds: i32,
    mass_gev: f64,
    lifetime_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleDb {
    defs: BTreeMap<i32, ParticleDef>,
}

impl ParticleDb {
    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN).expect("built-in particle table is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ParticleError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ParticleError::InvalidTable(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ParticleError> {
        let records: Vec<Record> =
            serde_json::from_str(text).map_err(|e| ParticleError::InvalidTable(e.to_string()))?;
        let mut defs = BTreeMap::new();
        for r in records {
            if !(r.mass_gev.is_finite() && r.mass_gev >= 0.0) {
                return Err(ParticleError::InvalidTable(format!("{}: mass {}", r.pdg, r.mass_gev)));
            }
            let lifetime = match r.lifetime_s {
                None => f64::INFINITY,
                Some(t) if t > 0.0 => t,
                Some(t) => return Err(ParticleError::InvalidTable(format!("{}: lifetime {t}", r.pdg))),
            };
            let def = ParticleDef {
                pdg: r.pdg,
                name: r.name,
                charge_thirds: r.charge_thirds,
                mass: r.mass_gev,
                lifetime,
            };
            if defs.insert(r.pdg, def).is_some() {
                return Err(ParticleError::InvalidTable(format!("duplicate PDG code {}", r.pdg)));
            }
        }
        for def in defs.values() {
            if let Some(anti) = defs.get(&-def.pdg) {
                if anti.mass != def.mass || anti.lifetime != def.lifetime || anti.charge_thirds != -def.charge_thirds {
                    return Err(ParticleError::InvalidTable(format!(
                        "{} and {} are not charge conjugates",
                        def.pdg, anti.pdg
                    )));
                }
            }
        }
        Ok(Self { defs })
    }

    pub fn lookup(&self, pdg: i32) -> Result<&ParticleDef, ParticleError> {
        self.defs.get(&pdg).ok_or(ParticleError::UnknownPdg(pdg))
    }

    pub fn iter(&self) -> impl Iterator<Item = &ParticleDef> {
        self.defs.values()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn photon_is_massless_neutral_and_stable() {
        let db = ParticleDb::builtin();
        let g = db.lookup(22).unwrap();
        assert_eq!(g.mass, 0.0);
        assert_eq!(g.charge(), 0.0);
        assert!(g.is_stable());
    }

    #[test]
    fn minimum_set_present() {
        let db = ParticleDb::builtin();
        for pdg in [22, 11, -11, 13, -13, 211, -211, 111, 321, -321, 2212, -2212, 2112] {
            assert!(db.lookup(pdg).is_ok(), "missing {pdg}");
        }
        assert_eq!(db.lookup(999), Err(ParticleError::UnknownPdg(999)));
    }

    #[test]
    fn charge_conjugates_agree() {
        let db = ParticleDb::builtin();
        assert_eq!(db.lookup(-211).unwrap().charge(), -db.lookup(211).unwrap().charge());
        for def in db.iter() {
            if let Ok(anti) = db.lookup(-def.pdg) {
                assert_eq!(anti.mass, def.mass);
                assert_eq!(anti.charge_thirds, -def.charge_thirds);
            }
        }
    }

    #[test]
    fn proton_fixture_is_self_consistent() {
        let db = ParticleDb::builtin();
        let p = db.lookup(2212).unwrap();
        let pbar = db.lookup(-2212).unwrap();
        assert_eq!(p.charge_thirds, 3);
        assert!(p.mass > 0.9 && p.mass < 1.0);
        assert_eq!(p.mass, pbar.mass);
        assert!(p.is_stable());
    }

    #[test]
    fn load_is_idempotent() {
        assert_eq!(ParticleDb::builtin(), ParticleDb::builtin());
    }

    #[test]
    fn inconsistent_conjugates_rejected() {
        let text = r#"[
            {"pdg": 211, "name": "pi+", "charge_thirds": 3, "mass_gev": 0.1396, "lifetime_s": 2.6e-8},
            {"pdg": -211, "name": "pi-", "charge_thirds": -3, "mass_gev": 0.1397, "lifetime_s": 2.6e-8}
        ]"#;
        assert!(matches!(
            ParticleDb::from_json_str(text),
            Err(ParticleError::InvalidTable(_))
        ));
        let bad_life = r#"[{"pdg": 1, "name": "x", "charge_thirds": 0, "mass_gev": 1.0, "lifetime_s": 0.0}]"#;
        assert!(ParticleDb::from_json_str(bad_life).is_err());
    }
}
