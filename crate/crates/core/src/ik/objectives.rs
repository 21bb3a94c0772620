//! Objective terms shared by all three solver kinds, plus the proximity
//! penalty used by the soft-constraint baseline.

use nalgebra::DVector;

use super::{ObjectiveWeights, PenaltyParams, SolverState};
use crate::error::Result;
use crate::geometry::{
    capsule_signed_distance, distance_gradient, self_distance_gradient, Capsule,
};
use crate::pose::Pose;
use crate::robot::{forward_kinematics, JointVector, Kinematics, RobotModel};

/// Value and gradient of one objective term.
pub type Term = (f64, DVector<f64>);

pub(crate) fn tracking_term(fk: &Kinematics, target: &Pose, weights: &ObjectiveWeights) -> Term {
    let jac = fk.jacobian();
    let ee = fk.ee_pose();
    let dp = ee.position - target.position;
    let e_rot = ee.orientation_error(target);
    let value = weights.w_track_pos * dp.norm_squared() + weights.w_track_ori * e_rot.norm_squared();
    // d‖log(q_t q_ee⁻¹)‖²/dω = −2e for a world-frame rotation ω of the ee
    let lin = jac.fixed_rows::<3>(0);
    let ang = jac.fixed_rows::<3>(3);
    let grad = lin.tr_mul(&dp) * (2.0 * weights.w_track_pos) - ang.tr_mul(&e_rot) * (2.0 * weights.w_track_ori);
    (value, grad)
}

/// `w_p‖x_ee − x_target‖² + w_o‖log(q_target · q_ee⁻¹)‖²`.
pub fn tracking_objective(
    q: &JointVector,
    target: &Pose,
    model: &RobotModel,
    weights: &ObjectiveWeights,
) -> Result<Term> {
    let fk = forward_kinematics(model, q)?;
    Ok(tracking_term(&fk, target, weights))
}

pub(crate) fn smoothness_term(
    fk: &Kinematics,
    state: &SolverState,
    q: &JointVector,
    weights: &ObjectiveWeights,
) -> Term {
    let [q1, q2, q3] = state.history();
    let dt = state.dt;
    let vel = (q - q1) / dt;
    let acc = (q - q1 * 2.0 + q2) / (dt * dt);
    let jerk = (q - q1 * 3.0 + q2 * 3.0 - q3) / (dt * dt * dt);
    let dx = (fk.ee_position() - state.last_ee.position) / dt;
    let value = weights.w_vel * vel.norm_squared()
        + weights.w_acc * acc.norm_squared()
        + weights.w_jerk * jerk.norm_squared()
        + weights.w_cart_vel * dx.norm_squared();
    let lin = fk.jacobian().fixed_rows::<3>(0).into_owned();
    let grad = vel * (2.0 * weights.w_vel / dt)
        + acc * (2.0 * weights.w_acc / (dt * dt))
        + jerk * (2.0 * weights.w_jerk / (dt * dt * dt))
        + lin.tr_mul(&dx) * (2.0 * weights.w_cart_vel / dt);
    (value, grad)
}

/// Joint velocity/acceleration/jerk and Cartesian velocity regularizers,
/// from backward differences over the state's history.
pub fn smoothness_objective(
    state: &SolverState,
    q_candidate: &JointVector,
    model: &RobotModel,
    weights: &ObjectiveWeights,
) -> Result<Term> {
    let fk = forward_kinematics(model, q_candidate)?;
    Ok(smoothness_term(&fk, state, q_candidate, weights))
}

/// `(φ² + δ)⁻¹` and its derivative with respect to φ.
fn inverse_square_barrier(phi: f64, delta: f64) -> (f64, f64) {
    let denom = phi * phi + delta;
    (1.0 / denom, -2.0 * phi / (denom * denom))
}

pub(crate) fn self_collision_term(
    fk: &Kinematics,
    model: &RobotModel,
    capsules: &[Capsule],
    weights: &ObjectiveWeights,
) -> Term {
    let mut value = 0.0;
    let mut grad = DVector::zeros(model.dof());
    if weights.w_selfcol == 0.0 {
        return (value, grad);
    }
    for (a, b) in model.self_collision_pairs() {
        let w = capsule_signed_distance(&capsules[a], &capsules[b]);
        let (v, dv) = inverse_square_barrier(w.phi, weights.self_collision_delta);
        value += v;
        grad += self_distance_gradient(model, fk, a, b, &w) * dv;
    }
    (weights.w_selfcol * value, grad * weights.w_selfcol)
}

/// `w_selfcol · Σ (φ_pair² + δ_self)⁻¹` over non-adjacent collider pairs.
pub fn self_collision_objective(
    q: &JointVector,
    model: &RobotModel,
    weights: &ObjectiveWeights,
) -> Result<Term> {
    let fk = forward_kinematics(model, q)?;
    let caps = fk.link_capsules(model);
    Ok(self_collision_term(&fk, model, &caps, weights))
}

pub(crate) fn penalty_term(
    fk: &Kinematics,
    model: &RobotModel,
    capsules: &[Capsule],
    obstacles: &[Capsule],
    params: &PenaltyParams,
) -> Term {
    let mut value = 0.0;
    let mut grad = DVector::zeros(model.dof());
    let w_safe = params.w_safe();
    for (l, link) in capsules.iter().enumerate() {
        for (o, obs) in obstacles.iter().enumerate() {
            let mut w = capsule_signed_distance(link, obs);
            w.pair = (l, o);
            let (v, dv) = inverse_square_barrier(w.phi, params.delta);
            value += w_safe * v;
            grad += distance_gradient(model, fk, &w, None).gradient * (w_safe * dv);
        }
    }
    (params.w_col * value, grad * params.w_col)
}

/// Proximity penalty `w_col · Σ_ℓ Σ_o w_safe / (φ_ℓo² + δ)` over every
/// link–obstacle pair.
pub fn penalty_objective(
    q: &JointVector,
    obstacles: &[Capsule],
    model: &RobotModel,
    params: &PenaltyParams,
) -> Result<Term> {
    let fk = forward_kinematics(model, q)?;
    let caps = fk.link_capsules(model);
    Ok(penalty_term(&fk, model, &caps, obstacles, params))
}
