//! Scoring output: hits and their CSV form.

use std::io::{self, Write};

use nalgebra::Vector3;
use vmc_core::{Geometry, McContext, McResult, TrackId, VolumeId};

pub const CSV_HEADER: &str = "event,track,volume,copy,x_cm,y_cm,z_cm,edep_gev";

/// One energy deposit recorded in a sensitive volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Hit {
    pub event: u64,
    pub track: TrackId,
    pub volume: VolumeId,
    pub copy: u32,
    /// Post-step position, cm.
    pub position: Vector3<f64>,
    /// GeV, always positive.
    pub edep: f64,
}

impl Hit {
    /// Builds a hit from the current step if it deposited energy.
    pub fn from_step(mc: &McContext<'_>) -> McResult<Option<Hit>> {
        let edep = mc.edep()?;
        if edep <= 0.0 {
            return Ok(None);
        }
        let (volume, copy) = mc.current_vol_id()?;
        Ok(Some(Hit {
            event: mc.event_number(),
            track: mc.step_state()?.track_id,
            volume,
            copy,
            position: mc.track_position()?,
            edep,
        }))
    }

    /// Whether `locate` puts the hit in its recorded volume and copy, allowing the
    /// position to sit up to `tol` cm off a bounding surface.
    pub fn is_consistent(&self, geometry: &Geometry, tol: f64) -> bool {
        let matches = |p: Vector3<f64>| {
            geometry
                .locate(&p)
                .map(|path| path.volume_id() == self.volume && path.copy() == self.copy)
                .unwrap_or(false)
        };
        if matches(self.position) {
            return true;
        }
        (0..3).any(|axis| {
            [-tol, tol].iter().any(|&delta| {
                let mut p = self.position;
                p[axis] += delta;
                matches(p)
            })
        })
    }
}

/// Writes hits with [`CSV_HEADER`], one row per hit, in the given order.
pub fn write_csv<W: Write>(mut out: W, hits: &[Hit]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for h in hits {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            h.event, h.track, h.volume, h.copy, h.position.x, h.position.y, h.position.z, h.edep
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let hits = vec![Hit {
            event: 1,
            track: 0,
            volume: VolumeId(2),
            copy: 1,
            position: Vector3::new(-40.0, 0.0, 0.5),
            edep: 0.004,
        }];
        let mut buf = Vec::new();
        write_csv(&mut buf, &hits).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "event,track,volume,copy,x_cm,y_cm,z_cm,edep_gev\n1,0,2,1,-40,0,0.5,0.004\n"
        );
    }
}
