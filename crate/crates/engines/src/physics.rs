//! The minimal physics shared by both engines: continuous energy loss, Highland multiple
//! scattering and exponential decay lengths.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use vmc_core::EngineConfig;

/// GeV
pub const HIGHLAND_SCALE: f64 = 0.0136;
pub const HIGHLAND_LOG_COEFF: f64 = 0.038;

/// Which processes an engine applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub loss: bool,
    pub mscat: bool,
    pub decay: bool,
    /// GeV; replaces the medium cut when set.
    pub cut_override: Option<f64>,
}

impl PhysicsParams {
    /// Flags set in `cfg` win over `defaults`.
    pub fn from_config(cfg: &EngineConfig, defaults: PhysicsParams) -> Self {
        Self {
            loss: cfg.flag("loss", defaults.loss),
            mscat: cfg.flag("mscat", defaults.mscat),
            decay: cfg.flag("decay", defaults.decay),
            cut_override: cfg.energy_cut_override.or(defaults.cut_override),
        }
    }

    pub fn cut(&self, medium_cut: f64) -> f64 {
        self.cut_override.unwrap_or(medium_cut)
    }
}

/// Energy lost over `step` cm at `dedx` GeV/cm by a track with kinetic energy `kinetic`.
///
/// Returns `(edep, stopped)`. When the remaining kinetic energy would fall below `cut`
/// the whole of `kinetic` is deposited and the track stops.
pub fn continuous_loss(kinetic: f64, dedx: f64, step: f64, cut: f64) -> (f64, bool) {
    let edep = dedx * step;
    if kinetic - edep < cut {
        (kinetic.max(0.0), true)
    } else {
        (edep, false)
    }
}

/// Highland width of the projected scattering angle, radians.
///
/// `x_over_x0` is the step length in radiation lengths. Very thin steps, where the
/// logarithmic correction turns the formula negative, give zero.
pub fn highland_theta0(beta: f64, p: f64, charge: f64, x_over_x0: f64) -> f64 {
    if x_over_x0 <= 0.0 || p <= 0.0 || beta <= 0.0 {
        return 0.0;
    }
    let theta0 =
        HIGHLAND_SCALE / (beta * p) * charge.abs() * x_over_x0.sqrt() * (1.0 + HIGHLAND_LOG_COEFF * x_over_x0.ln());
    theta0.max(0.0)
}

/// Turns unit vector `dir` by polar angle `theta` at azimuth `phi` about itself.
pub fn deflect(dir: &Vector3<f64>, theta: f64, phi: f64) -> Vector3<f64> {
    // any unit vector orthogonal to dir
    let helper = if dir.x.abs() < 0.6 { Vector3::x() } else { Vector3::y() };
    let u = dir.cross(&helper).normalize();
    let v = dir.cross(&u);
    let out = dir * theta.cos() + (u * phi.cos() + v * phi.sin()) * theta.sin();
    out.normalize()
}

/// Draws a Gaussian polar deflection of width `theta0` with uniform azimuth.
///
/// Returns the new direction and the sampled polar angle.
pub fn sample_deflection<R: Rng + ?Sized>(rng: &mut R, dir: &Vector3<f64>, theta0: f64) -> (Vector3<f64>, f64) {
    if theta0 <= 0.0 {
        return (*dir, 0.0);
    }
    let theta = Normal::new(0.0, theta0).expect("finite positive width").sample(rng);
    let phi = 2.0 * PI * rng.random::<f64>();
    (deflect(dir, theta, phi), theta)
}

/// Lab-frame decay length `-cτ·βγ·ln(u)` for `u` in (0, 1].
pub fn decay_length(ctau: f64, beta_gamma: f64, u: f64) -> f64 {
    -ctau * beta_gamma * u.ln()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn loss_examples() {
        assert_eq!(continuous_loss(1.0, 0.002, 1.0, 0.001), (0.002, false));
        assert_eq!(continuous_loss(0.0015, 0.002, 1.0, 0.001), (0.0015, true));
    }

    #[test]
    fn highland_reference_point() {
        // 0.0136 * 0.1 * (1 + 0.038 ln 0.01), evaluated independently
        let expected = 0.0136 * 0.1 * (1.0 - 0.038 * 4.605170185988091);
        let got = highland_theta0(1.0, 1.0, 1.0, 0.01);
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 1.122e-3).abs() < 1e-6);
        assert_eq!(highland_theta0(1.0, 1.0, 0.0, 0.01), 0.0);
        assert_eq!(highland_theta0(1.0, 1.0, 1.0, 1e-15), 0.0);
    }

    #[test]
    fn decay_length_is_exponential_in_u() {
        assert_eq!(decay_length(2.0, 3.0, 1.0), 0.0);
        assert!((decay_length(2.0, 3.0, (-1.0f64).exp()) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn zero_width_leaves_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = Vector3::new(0.0, 0.6, 0.8);
        assert_eq!(sample_deflection(&mut rng, &d, 0.0).0, d);
    }

    proptest! {
        #[test]
        fn deflection_keeps_unit_length_and_angle(
            x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64,
            theta in 0.0..3.0f64, phi in 0.0..std::f64::consts::TAU,
        ) {
            let d = Vector3::new(x, y, z);
            prop_assume!(d.norm() > 1e-3);
            let d = d.normalize();
            let out = deflect(&d, theta, phi);
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
            prop_assert!((out.dot(&d).clamp(-1.0, 1.0).acos() - theta).abs() < 1e-6);
        }

        #[test]
        fn loss_never_exceeds_kinetic(t in 0.0..2.0f64, dedx in 0.0..0.1f64, step in 0.0..10.0f64, cut in 0.0..0.01f64) {
            let (edep, stopped) = continuous_loss(t, dedx, step, cut);
            prop_assert!(edep >= 0.0 && edep <= t + 1e-15);
            if !stopped {
                prop_assert!(t - edep >= cut);
            }
        }
    }
}
