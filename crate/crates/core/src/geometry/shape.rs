use std::fmt;

use nalgebra::Vector3;

use super::GeometryError;

/// Points this close to a surface, measured along a ray, count as on it.
pub const SURFACE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Box,
    Tube,
}

impl ShapeKind {
    pub fn parse(kind: &str) -> Option<Self> {
        match kind.trim() {
            "BOX" => Some(ShapeKind::Box),
            "TUBE" => Some(ShapeKind::Tube),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Box => "BOX",
            ShapeKind::Tube => "TUBE",
        }
    }

    pub fn n_params(self) -> usize {
        3
    }
}

/// A solid in its own local frame, centred on the origin.
///
/// Lengths are in cm. A `Tube` is a (possibly hollow) cylinder along the local z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Box { dx: f64, dy: f64, dz: f64 },
    Tube { rmin: f64, rmax: f64, dz: f64 },
}

impl Shape {
    pub fn new(kind: ShapeKind, params: &[f64]) -> Result<Self, GeometryError> {
        if params.len() != kind.n_params() {
            return Err(GeometryError::BadShapeParams(format!(
                "{} takes {} parameters, got {}",
                kind.as_str(),
                kind.n_params(),
                params.len()
            )));
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::BadShapeParams(format!(
                "{} parameters must be finite: {params:?}",
                kind.as_str()
            )));
        }
        match kind {
            ShapeKind::Box => {
                let (dx, dy, dz) = (params[0], params[1], params[2]);
                if dx <= 0.0 || dy <= 0.0 || dz <= 0.0 {
                    return Err(GeometryError::BadShapeParams(format!(
                        "BOX half-lengths must be positive: ({dx}, {dy}, {dz})"
                    )));
                }
                Ok(Shape::Box { dx, dy, dz })
            }
            ShapeKind::Tube => {
                let (rmin, rmax, dz) = (params[0], params[1], params[2]);
                if rmin < 0.0 || rmin >= rmax || dz <= 0.0 {
                    return Err(GeometryError::BadShapeParams(format!(
                        "TUBE needs 0 <= rmin < rmax and dz > 0: ({rmin}, {rmax}, {dz})"
                    )));
                }
                Ok(Shape::Tube { rmin, rmax, dz })
            }
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            Shape::Box { .. } => ShapeKind::Box,
            Shape::Tube { .. } => ShapeKind::Tube,
        }
    }

    pub fn params(&self) -> [f64; 3] {
        match *self {
            Shape::Box { dx, dy, dz } => [dx, dy, dz],
            Shape::Tube { rmin, rmax, dz } => [rmin, rmax, dz],
        }
    }

    /// Half-extents of the local axis-aligned bounding box.
    pub fn half_extent(&self) -> Vector3<f64> {
        match *self {
            Shape::Box { dx, dy, dz } => Vector3::new(dx, dy, dz),
            Shape::Tube { rmax, dz, .. } => Vector3::new(rmax, rmax, dz),
        }
    }

    /// Closed containment: surface points are inside.
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        self.contains_within(p, 0.0)
    }

    /// Containment with every surface pushed outwards by `tol` cm.
    pub fn contains_within(&self, p: &Vector3<f64>, tol: f64) -> bool {
        match *self {
            Shape::Box { dx, dy, dz } => p.x.abs() <= dx + tol && p.y.abs() <= dy + tol && p.z.abs() <= dz + tol,
            Shape::Tube { rmin, rmax, dz } => {
                if p.z.abs() > dz + tol {
                    return false;
                }
                let r = p.x.hypot(p.y);
                r <= rmax + tol && r >= rmin - tol
            }
        }
    }

    /// Parameter ranges `t` along `p + t·d` for which the ray is inside the solid.
    pub fn ray_segments(&self, p: &Vector3<f64>, d: &Vector3<f64>) -> Segments {
        let mut out = Segments::default();
        match *self {
            Shape::Box { dx, dy, dz } => {
                let seg = slab(p.x, d.x, dx)
                    .and_then(|s| intersect(s, slab(p.y, d.y, dy)?))
                    .and_then(|s| intersect(s, slab(p.z, d.z, dz)?));
                if let Some(s) = seg {
                    out.push(s);
                }
            }
            Shape::Tube { rmin, rmax, dz } => {
                let Some(outer) = slab(p.z, d.z, dz).and_then(|z| intersect(z, disc(p.x, p.y, d.x, d.y, rmax)?)) else {
                    return out;
                };
                let hole = if rmin > 0.0 {
                    disc(p.x, p.y, d.x, d.y, rmin)
                } else {
                    None
                };
                match hole {
                    None => out.push(outer),
                    Some((h0, h1)) => {
                        if outer.0 <= outer.1.min(h0) {
                            out.push((outer.0, outer.1.min(h0)));
                        }
                        if outer.0.max(h1) <= outer.1 {
                            out.push((outer.0.max(h1), outer.1));
                        }
                    }
                }
            }
        }
        out
    }

    /// Distance along `d` at which a ray starting inside the solid leaves it.
    pub fn exit_distance(&self, p: &Vector3<f64>, d: &Vector3<f64>) -> f64 {
        self.ray_segments(p, d)
            .iter()
            .filter(|&(lo, hi)| lo <= SURFACE_TOLERANCE && hi >= -SURFACE_TOLERANCE)
            .map(|(_, hi)| hi)
            .fold(0.0, f64::max)
    }

    /// Smallest strictly positive distance at which the ray enters the solid.
    pub fn entry_distance(&self, p: &Vector3<f64>, d: &Vector3<f64>) -> Option<f64> {
        self.ray_segments(p, d)
            .iter()
            .filter(|&(lo, hi)| lo > 0.0 && hi > lo)
            .map(|(lo, _)| lo)
            .reduce(f64::min)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.params();
        write!(f, "{}({a},{b},{c})", self.kind().as_str())
    }
}

/// At most two disjoint, increasing ray segments (a hollow tube can split a ray in two).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Segments {
    len: usize,
    items: [(f64, f64); 2],
}

impl Segments {
    fn push(&mut self, seg: (f64, f64)) {
        self.items[self.len] = seg;
        self.len += 1;
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.items[..self.len].iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo <= hi).then_some((lo, hi))
}

/// Range of `t` with `|p + t·d| <= half`.
fn slab(p: f64, d: f64, half: f64) -> Option<(f64, f64)> {
    if d == 0.0 {
        return (p.abs() <= half).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let t1 = (-half - p) / d;
    let t2 = (half - p) / d;
    Some((t1.min(t2), t1.max(t2)))
}

/// Range of `t` for which the transverse projection lies within radius `r`.
fn disc(px: f64, py: f64, dx: f64, dy: f64, r: f64) -> Option<(f64, f64)> {
    let a = dx * dx + dy * dy;
    let c = px * px + py * py - r * r;
    if a == 0.0 {
        return (c <= 0.0).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let b = px * dx + py * dy;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // q = -(b + sign(b)·sqrt(disc)) avoids cancellation in the smaller root
    let q = if b >= 0.0 { -(b + sq) } else { -(b - sq) };
    if q == 0.0 {
        return Some((0.0, 0.0));
    }
    let t1 = q / a;
    let t2 = c / q;
    Some((t1.min(t2), t1.max(t2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    #[test]
    fn rejects_inverted_tube_radii() {
        assert!(matches!(
            Shape::new(ShapeKind::Tube, &[60.0, 0.0, 50.0]),
            Err(GeometryError::BadShapeParams(_))
        ));
        assert!(Shape::new(ShapeKind::Tube, &[0.0, 60.0, 50.0]).is_ok());
        assert!(Shape::new(ShapeKind::Box, &[1.0, 0.0, 1.0]).is_err());
        assert!(Shape::new(ShapeKind::Box, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn tube_exit_distances_from_centre() {
        let tube = Shape::new(ShapeKind::Tube, &[0.0, 60.0, 50.0]).unwrap();
        assert_eq!(tube.exit_distance(&v(0.0, 0.0, 0.0), &v(1.0, 0.0, 0.0)), 60.0);
        assert_eq!(tube.exit_distance(&v(0.0, 0.0, 0.0), &v(0.0, 0.0, 1.0)), 50.0);
        assert_eq!(tube.exit_distance(&v(30.0, 0.0, 0.0), &v(1.0, 0.0, 0.0)), 30.0);
    }

    #[test]
    fn off_axis_chord_matches_quadratic() {
        // (30 + t)^2 + 20^2 = 60^2  =>  t = sqrt(3200) - 30
        let tube = Shape::new(ShapeKind::Tube, &[0.0, 60.0, 50.0]).unwrap();
        let t = tube.exit_distance(&v(30.0, 20.0, 0.0), &v(1.0, 0.0, 0.0));
        assert!((t - (3200f64.sqrt() - 30.0)).abs() < 1e-12);
    }

    #[test]
    fn hollow_tube_splits_a_ray() {
        let tube = Shape::new(ShapeKind::Tube, &[10.0, 20.0, 5.0]).unwrap();
        let segs: Vec<_> = tube
            .ray_segments(&v(-30.0, 0.0, 0.0), &v(1.0, 0.0, 0.0))
            .iter()
            .collect();
        assert_eq!(segs, vec![(10.0, 20.0), (40.0, 50.0)]);
        assert_eq!(tube.entry_distance(&v(0.0, 0.0, 0.0), &v(1.0, 0.0, 0.0)), Some(10.0));
        assert!(!tube.contains(&v(0.0, 0.0, 0.0)));
        assert!(tube.contains(&v(10.0, 0.0, 0.0)));
    }

    #[test]
    fn box_entry_and_miss() {
        let b = Shape::new(ShapeKind::Box, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(b.entry_distance(&v(-5.0, 0.0, 0.0), &v(1.0, 0.0, 0.0)), Some(4.0));
        assert_eq!(b.entry_distance(&v(-5.0, 5.0, 0.0), &v(1.0, 0.0, 0.0)), None);
        // leaving through a face: no positive entry
        assert_eq!(b.entry_distance(&v(1.0, 0.0, 0.0), &v(1.0, 0.0, 0.0)), None);
    }

    #[test]
    fn display_uses_shortest_numbers() {
        let tube = Shape::new(ShapeKind::Tube, &[0.0, 60.0, 50.0]).unwrap();
        assert_eq!(tube.to_string(), "TUBE(0,60,50)");
    }
}
