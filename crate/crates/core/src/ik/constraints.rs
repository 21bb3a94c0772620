//! Inequality constraints: manipulability and the aggregated discrete-time
//! barrier condition.

use nalgebra::{DVector, Vector3, SVD};

use super::{CbfParams, ManipulabilityParams, SolverState};
use crate::error::Result;
use crate::geometry::{distance_gradient, min_robot_obstacle_distance, Capsule, DistanceWitness};
use crate::robot::{forward_kinematics, JointVector, Kinematics, RobotModel};

/// Extended class-K function `γh + βh³`.
pub fn class_k(h: f64, params: &CbfParams) -> f64 {
    params.gamma * h + params.beta * h * h * h
}

/// Temperature-scaled log-sum-exp `(1/T) log Σ exp(T xᵢ)` and its softmax
/// weights. Shifted by the max term so it never overflows.
pub fn log_sum_exp(terms: &[f64], temperature: f64) -> (f64, Vec<f64>) {
    assert!(!terms.is_empty(), "log-sum-exp of no terms");
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = terms.iter().map(|&x| (temperature * (x - max)).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let value = max + sum.ln() / temperature;
    (value, exps.into_iter().map(|e| e / sum).collect())
}

/// Manipulability constraint value `c_m` (≤ 0 feasible) and gradient.
#[derive(Debug, Clone)]
pub struct ManipulabilityValue {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// The gradient came from finite differences (near-singular Jacobian).
    pub finite_difference: bool,
}

fn manipulability_value(fk: &Kinematics, params: &ManipulabilityParams) -> (f64, f64, f64, [f64; 2]) {
    let jac = fk.jacobian();
    // nalgebra's SVD does not terminate on non-finite input
    if !jac.iter().all(|x| x.is_finite()) {
        return (f64::NAN, f64::NAN, f64::NAN, [0.0; 2]);
    }
    let sv = jac.singular_values();
    let sigma_min = sv.min();
    let sigma_max = sv.max();
    let floor = params.sigma_min_threshold - sigma_min;
    let cond = sigma_max / sigma_min.max(1e-300) - params.condition_number_cap;
    let (value, w) = log_sum_exp(&[floor, cond], 1.0 / params.smoothing);
    (value, sigma_min, sigma_max, [w[0], w[1]])
}

pub(crate) fn manipulability_term(
    model: &RobotModel,
    q: &JointVector,
    fk: &Kinematics,
    params: &ManipulabilityParams,
) -> ManipulabilityValue {
    let (value, sigma_min, sigma_max, weights) = manipulability_value(fk, params);
    let n = model.dof();
    if !value.is_finite() {
        return ManipulabilityValue {
            value,
            gradient: DVector::from_element(n, f64::NAN),
            sigma_min,
            sigma_max,
            finite_difference: false,
        };
    }
    if sigma_min < 1e-12 {
        let h = 1e-6;
        let mut gradient = DVector::zeros(n);
        for j in 0..n {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[j] += h;
            qm[j] -= h;
            let fp = forward_kinematics(model, &qp).expect("dimension checked");
            let fm = forward_kinematics(model, &qm).expect("dimension checked");
            gradient[j] = (manipulability_value(&fp, params).0 - manipulability_value(&fm, params).0) / (2.0 * h);
        }
        return ManipulabilityValue {
            value,
            gradient,
            sigma_min,
            sigma_max,
            finite_difference: true,
        };
    }

    // dσ_k = u_kᵀ dJ v_k
    let svd = SVD::new(fk.jacobian(), true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested Vᵀ");
    let (mut k_min, mut k_max) = (0, 0);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s < svd.singular_values[k_min] {
            k_min = k;
        }
        if s > svd.singular_values[k_max] {
            k_max = k;
        }
    }
    let u_min = u.column(k_min);
    let v_min = v_t.row(k_min).transpose();
    let u_max = u.column(k_max);
    let v_max = v_t.row(k_max).transpose();
    let mut gradient = DVector::zeros(n);
    for (j, dj) in fk.jacobian_derivatives().iter().enumerate() {
        let d_min = u_min.dot(&(dj * &v_min));
        let d_max = u_max.dot(&(dj * &v_max));
        let d_floor = -d_min;
        let d_cond = (d_max * sigma_min - sigma_max * d_min) / (sigma_min * sigma_min);
        gradient[j] = weights[0] * d_floor + weights[1] * d_cond;
    }
    ManipulabilityValue {
        value,
        gradient,
        sigma_min,
        sigma_max,
        finite_difference: false,
    }
}

/// Smoothed `max(σ_floor − σ_min, σ_max/σ_min − cap)`.
pub fn manipulability_constraint(
    q: &JointVector,
    model: &RobotModel,
    params: &ManipulabilityParams,
) -> Result<ManipulabilityValue> {
    let fk = forward_kinematics(model, q)?;
    Ok(manipulability_term(model, q, &fk, params))
}

/// Barrier values and gradients frozen at the previous configuration, one
/// per obstacle. The aggregated condition is affine in each term.
#[derive(Debug, Clone)]
pub struct BarrierLinearization {
    pub q_prev: JointVector,
    /// `h_o = φ_o − ε`.
    pub h: Vec<f64>,
    /// `∇h_o` at `q_prev`.
    pub grad_h: Vec<DVector<f64>>,
    pub witnesses: Vec<DistanceWitness>,
    /// Contact normals used, for reuse on the next tick.
    pub normals: Vec<Vector3<f64>>,
    pub degenerate: Vec<bool>,
}

impl BarrierLinearization {
    /// `−∇h_oᵀΔθ − K(h_o)` for each obstacle.
    pub fn terms(&self, q_candidate: &JointVector, params: &CbfParams) -> Vec<f64> {
        let dq = q_candidate - &self.q_prev;
        self.h
            .iter()
            .zip(&self.grad_h)
            .map(|(&h, g)| -g.dot(&dq) - class_k(h, params))
            .collect()
    }

    /// Aggregated constraint `c_CBF` and its gradient in `q_candidate`.
    pub fn evaluate(&self, q_candidate: &JointVector, params: &CbfParams) -> (f64, DVector<f64>) {
        let terms = self.terms(q_candidate, params);
        let (value, weights) = log_sum_exp(&terms, params.temperature);
        let mut grad = DVector::zeros(q_candidate.len());
        for (w, g) in weights.iter().zip(&self.grad_h) {
            grad -= g * *w;
        }
        (value, grad)
    }

    /// Index of the largest term at `q_candidate`.
    pub fn dominant(&self, q_candidate: &JointVector, params: &CbfParams) -> usize {
        let terms = self.terms(q_candidate, params);
        let mut best = 0;
        for (i, &t) in terms.iter().enumerate() {
            if t > terms[best] {
                best = i;
            }
        }
        best
    }
}

/// Linearizes each per-obstacle barrier at `q_prev`. `None` when there are no
/// obstacles (the constraint is then absent).
pub fn linearize_barriers(
    model: &RobotModel,
    q_prev: &JointVector,
    obstacles: &[Capsule],
    params: &CbfParams,
    fallback_normals: &[Option<Vector3<f64>>],
) -> Result<Option<BarrierLinearization>> {
    let fk = forward_kinematics(model, q_prev)?;
    let links = fk.link_capsules(model);
    let Some(report) = min_robot_obstacle_distance(&links, obstacles) else {
        return Ok(None);
    };
    let mut lin = BarrierLinearization {
        q_prev: q_prev.clone(),
        h: Vec::with_capacity(obstacles.len()),
        grad_h: Vec::with_capacity(obstacles.len()),
        witnesses: report.per_obstacle.clone(),
        normals: Vec::with_capacity(obstacles.len()),
        degenerate: Vec::with_capacity(obstacles.len()),
    };
    for (o, w) in report.per_obstacle.iter().enumerate() {
        let fallback = fallback_normals.get(o).copied().flatten();
        let g = distance_gradient(model, &fk, w, fallback);
        lin.h.push(w.phi - params.epsilon);
        lin.grad_h.push(g.gradient);
        lin.normals.push(g.normal);
        lin.degenerate.push(g.degenerate);
    }
    Ok(Some(lin))
}

/// `c_CBF(q) = (1/T) log Σ_o exp(T[−∇h_oᵀΔθ − K(h_o)])` with `h_o` and
/// `∇h_o` evaluated at the state's previous configuration. `None` when
/// there are no obstacles.
pub fn cbf_constraint(
    q_candidate: &JointVector,
    state: &SolverState,
    obstacles: &[Capsule],
    model: &RobotModel,
    params: &CbfParams,
) -> Result<Option<(f64, DVector<f64>)>> {
    model.check_dim(q_candidate)?;
    let lin = linearize_barriers(model, state.q(), obstacles, params, &state.contact_normals)?;
    Ok(lin.map(|l| l.evaluate(q_candidate, params)))
}
