//! Shared-autonomy arbitration: mix an operator pose with an autonomy
//! reference pose in SE(3).

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pose::Pose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArbitrationMode {
    Fixed,
    Sigmoid,
}

/// `α = σ(p (‖x_h − x_r‖ / s + b))` in sigmoid mode, `fixed_alpha` otherwise.
/// The sign of `p` selects the direction: with `p < 0` autonomy fades as
/// operator and reference disagree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArbitrationParams {
    pub p: f64,
    pub s: f64,
    pub b: f64,
    pub mode: ArbitrationMode,
    pub fixed_alpha: f64,
}

impl Default for ArbitrationParams {
    fn default() -> Self {
        Self {
            p: -4.0,
            s: 0.2,
            b: 0.0,
            mode: ArbitrationMode::Sigmoid,
            fixed_alpha: 0.5,
        }
    }
}

impl ArbitrationParams {
    pub fn fixed(alpha: f64) -> Self {
        Self {
            mode: ArbitrationMode::Fixed,
            fixed_alpha: alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0) {
            return Err(Error::invalid("arbitration.s", "scale must be positive"));
        }
        if !(0.0..=1.0).contains(&self.fixed_alpha) {
            return Err(Error::invalid("arbitration.fixed_alpha", "must lie in [0, 1]"));
        }
        if !(self.p.is_finite() && self.b.is_finite()) {
            return Err(Error::invalid("arbitration", "slope and bias must be finite"));
        }
        Ok(())
    }
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn arbitration_weight(x_h: &Vector3<f64>, x_r: &Vector3<f64>, params: &ArbitrationParams) -> f64 {
    match params.mode {
        ArbitrationMode::Fixed => params.fixed_alpha,
        ArbitrationMode::Sigmoid => {
            let d = (x_h - x_r).norm();
            logistic(params.p * (d / params.s + params.b))
        }
    }
}

/// Operator and autonomy poses for one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendInput {
    pub human: Pose,
    pub reference: Pose,
}

const SLERP_LINEAR_ANGLE: f64 = 1e-6;

/// Spherical interpolation from `a` to `b`, assuming `⟨a, b⟩ ≥ 0`.
fn slerp_same_hemisphere(a: &Quaternion<f64>, b: &Quaternion<f64>, t: f64) -> UnitQuaternion<f64> {
    let dot = a.dot(b).clamp(-1.0, 1.0);
    let theta = dot.acos();
    let q = if theta < SLERP_LINEAR_ANGLE {
        a * (1.0 - t) + b * t
    } else {
        let sin = theta.sin();
        a * (((1.0 - t) * theta).sin() / sin) + b * ((t * theta).sin() / sin)
    };
    UnitQuaternion::from_quaternion(q)
}

/// Linear position blend and SLERP orientation blend. The reference
/// quaternion is sign-flipped into the operator's hemisphere first so the
/// interpolation takes the short way round.
pub fn blend_pose(input: &BlendInput, alpha: f64) -> Pose {
    let alpha = alpha.clamp(0.0, 1.0);
    let qh = input.human.orientation.into_inner();
    let mut qr = input.reference.orientation.into_inner();
    if qh.dot(&qr) < 0.0 {
        qr = -qr;
    }
    if alpha == 0.0 {
        return input.human;
    }
    if alpha == 1.0 {
        return Pose::new(input.reference.position, UnitQuaternion::new_unchecked(qr));
    }
    let position = input.human.position * (1.0 - alpha) + input.reference.position * alpha;
    Pose::new(position, slerp_same_hemisphere(&qh, &qr, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn neutral_weight_at_agreement() {
        let x = Vector3::new(0.1, 0.2, 0.3);
        let p = ArbitrationParams {
            p: 1.0,
            b: 0.0,
            ..Default::default()
        };
        assert_eq!(arbitration_weight(&x, &x, &p), 0.5);
    }

    #[test]
    fn bias_cancels_unit_disagreement() {
        let p = ArbitrationParams {
            p: 1.0,
            s: 0.3,
            b: -1.0,
            ..Default::default()
        };
        let a = arbitration_weight(&Vector3::zeros(), &Vector3::new(0.0, 0.3, 0.0), &p);
        assert!((a - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fixed_mode_ignores_positions() {
        let p = ArbitrationParams::fixed(0.8);
        assert_eq!(arbitration_weight(&Vector3::zeros(), &Vector3::x(), &p), 0.8);
    }

    #[test]
    fn invalid_params() {
        let mut p = ArbitrationParams::default();
        p.s = 0.0;
        assert!(p.validate().is_err());
        let p = ArbitrationParams::fixed(1.5);
        assert!(p.validate().is_err());
    }

    #[test]
    fn geodesic_midpoint() {
        let input = BlendInput {
            human: Pose::from_translation(0.0, 0.0, 0.0),
            reference: Pose::new(
                Vector3::new(1.0, 2.0, 0.0),
                UnitQuaternion::from_axis_angle(&Vector3::z_axis(), FRAC_PI_2),
            ),
        };
        let out = blend_pose(&input, 0.5);
        let expected = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), FRAC_PI_4);
        assert!(out.orientation.angle_to(&expected) < 1e-12);
        assert!((out.position - Vector3::new(0.5, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn endpoints_are_exact() {
        let input = BlendInput {
            human: Pose::from_wxyz([0.1, 0.2, 0.3], [0.9, 0.1, 0.3, 0.2]),
            reference: Pose::from_wxyz([1.0, -1.0, 0.5], [-0.2, 0.7, 0.1, 0.4]),
        };
        assert_eq!(blend_pose(&input, 0.0), input.human);
        let one = blend_pose(&input, 1.0);
        assert_eq!(one.position, input.reference.position);
        let (got, want) = (one.orientation.into_inner(), input.reference.orientation.into_inner());
        assert!(got == want || got == -want);
    }

    #[test]
    fn antipodal_reference_is_same_rotation() {
        let qh = UnitQuaternion::from_euler_angles(0.3, -0.2, 1.0);
        let qr = UnitQuaternion::new_unchecked(-qh.into_inner());
        let input = BlendInput {
            human: Pose::new(Vector3::zeros(), qh),
            reference: Pose::new(Vector3::zeros(), qr),
        };
        for k in 0..=10 {
            let out = blend_pose(&input, k as f64 / 10.0);
            assert!(out.orientation.angle_to(&qh) < 1e-7);
        }
    }
}
