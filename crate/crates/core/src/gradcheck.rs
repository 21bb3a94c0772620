//! Central-difference checks of every analytic gradient on random
//! instances of an arm.

use std::fmt;

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{distance_gradient, min_robot_obstacle_distance, Capsule};
use crate::ik::{
    linearize_barriers, manipulability_constraint, penalty_objective, self_collision_objective,
    smoothness_objective, tracking_objective, CbfParams, IkParams, SolverState,
};
use crate::pose::quat_log;
use crate::robot::{forward_kinematics, geometric_jacobian, link_capsules_world, JointVector, RobotModel};

/// Finite-difference step.
pub const STEP: f64 = 1e-6;
/// Largest accepted relative error.
pub const TOLERANCE: f64 = 1e-4;

/// Outcome for one gradient over a batch of random instances.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub name: &'static str,
    pub checked: usize,
    /// Instances dropped because a witness switch sits within one step.
    pub skipped: usize,
    pub max_relative_error: f64,
}

impl GradientCheck {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.max_relative_error < TOLERANCE
    }
}

impl fmt::Display for GradientCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {:>4} checked {:>4} skipped  max rel err {:.2e}  {}",
            self.name,
            self.checked,
            self.skipped,
            self.max_relative_error,
            if self.passed() { "ok" } else { "FAIL" }
        )
    }
}

fn central_difference(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |j, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

fn relative_error(analytic: &DVector<f64>, numeric: &DVector<f64>) -> f64 {
    (analytic - numeric).norm() / numeric.norm().max(1e-6)
}

/// A difference quotient that changes with the step size straddles a kink.
fn kinked(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>) -> bool {
    let coarse = central_difference(&f, x, STEP);
    let fine = central_difference(&f, x, STEP * 0.1);
    relative_error(&coarse, &fine) > 1e-6
}

fn random_q(model: &RobotModel, rng: &mut impl Rng) -> JointVector {
    JointVector::from_fn(model.dof(), |i, _| {
        let j = &model.joints[i];
        let margin = 0.05 * (j.limit_upper - j.limit_lower);
        rng.random_range(j.limit_lower + margin..j.limit_upper - margin)
    })
}

fn random_obstacle(rng: &mut impl Rng) -> Capsule {
    let c = Vector3::new(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7), rng.random_range(0.0..1.1));
    let d = Vector3::from_fn(|_, _| rng.random_range(-0.2..0.2));
    Capsule::new(c - d, c + d, rng.random_range(0.02..0.08))
}

struct Tally {
    name: &'static str,
    checked: usize,
    skipped: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, checked: 0, skipped: 0, worst: 0.0 }
    }

    fn record(&mut self, err: f64) {
        self.checked += 1;
        self.worst = self.worst.max(err);
    }

    fn finish(self) -> GradientCheck {
        GradientCheck {
            name: self.name,
            checked: self.checked,
            skipped: self.skipped,
            max_relative_error: self.worst,
        }
    }
}

/// Checks each gradient on `instances` random non-degenerate instances.
pub fn check_gradients(model: &RobotModel, instances: usize, seed: u64) -> Result<Vec<GradientCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = IkParams::default();
    let w = params.weights;
    let max_draws = instances * 50;
    let mut out = Vec::new();

    let mut t = Tally::new("fk_jacobian");
    for _ in 0..instances {
        let q = random_q(model, &mut rng);
        let jac = geometric_jacobian(model, &q)?;
        let ee0 = forward_kinematics(model, &q)?.ee_pose();
        let mut numeric = jac.clone();
        for j in 0..model.dof() {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[j] += STEP;
            qm[j] -= STEP;
            let ep = forward_kinematics(model, &qp)?.ee_pose();
            let em = forward_kinematics(model, &qm)?.ee_pose();
            let lin = (ep.position - em.position) / (2.0 * STEP);
            let ang = (quat_log(&(ep.orientation * ee0.orientation.inverse()))
                - quat_log(&(em.orientation * ee0.orientation.inverse())))
                / (2.0 * STEP);
            numeric.fixed_view_mut::<3, 1>(0, j).copy_from(&lin);
            numeric.fixed_view_mut::<3, 1>(3, j).copy_from(&ang);
        }
        t.record((&jac - &numeric).norm() / numeric.norm().max(1e-6));
    }
    out.push(t.finish());

    let mut t = Tally::new("distance");
    let phi = |q: &DVector<f64>, o: &Capsule| -> (f64, usize) {
        let caps = link_capsules_world(model, q).expect("dimension checked");
        let r = min_robot_obstacle_distance(&caps, std::slice::from_ref(o)).expect("one obstacle");
        (r.global.phi, r.global.pair.0)
    };
    for _ in 0..max_draws {
        if t.checked == instances {
            break;
        }
        let q = random_q(model, &mut rng);
        let o = random_obstacle(&mut rng);
        let fk = forward_kinematics(model, &q)?;
        let report = min_robot_obstacle_distance(&fk.link_capsules(model), std::slice::from_ref(&o))
            .expect("one obstacle");
        let pair = report.global.pair.0;
        let switches = (0..q.len()).any(|j| {
            [STEP, -STEP].iter().any(|&s| {
                let mut qs = q.clone();
                qs[j] += s;
                phi(&qs, &o).1 != pair
            })
        });
        if switches || report.global.is_degenerate() || kinked(|x| phi(x, &o).0, &q) {
            t.skipped += 1;
            continue;
        }
        let g = distance_gradient(model, &fk, &report.global, None);
        t.record(relative_error(&g.gradient, &central_difference(|x| phi(x, &o).0, &q, STEP)));
    }
    out.push(t.finish());

    let mut t = Tally::new("tracking");
    for _ in 0..instances {
        let q = random_q(model, &mut rng);
        let target = forward_kinematics(model, &random_q(model, &mut rng))?.ee_pose();
        let (_, g) = tracking_objective(&q, &target, model, &w)?;
        let f = |x: &DVector<f64>| tracking_objective(x, &target, model, &w).map(|v| v.0).unwrap_or(f64::NAN);
        t.record(relative_error(&g, &central_difference(f, &q, STEP)));
    }
    out.push(t.finish());

    let mut t = Tally::new("smoothness");
    for _ in 0..instances {
        let history = [random_q(model, &mut rng), random_q(model, &mut rng), random_q(model, &mut rng)];
        let state = SolverState::from_history(model, history, 1.0 / 90.0)?;
        let q = random_q(model, &mut rng);
        let (_, g) = smoothness_objective(&state, &q, model, &w)?;
        let f = |x: &DVector<f64>| smoothness_objective(&state, x, model, &w).map(|v| v.0).unwrap_or(f64::NAN);
        t.record(relative_error(&g, &central_difference(f, &q, STEP)));
    }
    out.push(t.finish());

    let mut t = Tally::new("self_collision");
    for _ in 0..max_draws {
        if t.checked == instances {
            break;
        }
        let q = random_q(model, &mut rng);
        let f = |x: &DVector<f64>| self_collision_objective(x, model, &w).map(|v| v.0).unwrap_or(f64::NAN);
        if kinked(f, &q) {
            t.skipped += 1;
            continue;
        }
        let (_, g) = self_collision_objective(&q, model, &w)?;
        t.record(relative_error(&g, &central_difference(f, &q, STEP)));
    }
    out.push(t.finish());

    let mut t = Tally::new("penalty");
    for _ in 0..max_draws {
        if t.checked == instances {
            break;
        }
        let q = random_q(model, &mut rng);
        let obstacles: Vec<Capsule> = (0..3).map(|_| random_obstacle(&mut rng)).collect();
        let f = |x: &DVector<f64>| penalty_objective(x, &obstacles, model, &params.penalty).map(|v| v.0).unwrap_or(f64::NAN);
        if kinked(f, &q) {
            t.skipped += 1;
            continue;
        }
        let (_, g) = penalty_objective(&q, &obstacles, model, &params.penalty)?;
        t.record(relative_error(&g, &central_difference(f, &q, STEP)));
    }
    out.push(t.finish());

    let mut t = Tally::new("cbf");
    let cbf = CbfParams::default();
    for _ in 0..instances {
        let q_prev = random_q(model, &mut rng);
        let obstacles: Vec<Capsule> = (0..4).map(|_| random_obstacle(&mut rng)).collect();
        let lin = linearize_barriers(model, &q_prev, &obstacles, &cbf, &[])?.expect("obstacles present");
        let q = &q_prev + random_q(model, &mut rng) * 0.05;
        let (_, g) = lin.evaluate(&q, &cbf);
        t.record(relative_error(&g, &central_difference(|x| lin.evaluate(x, &cbf).0, &q, STEP)));
    }
    out.push(t.finish());

    let mut t = Tally::new("manipulability");
    for _ in 0..max_draws {
        if t.checked == instances {
            break;
        }
        let q = random_q(model, &mut rng);
        let c = manipulability_constraint(&q, model, &params.manipulability)?;
        if c.finite_difference {
            t.skipped += 1;
            continue;
        }
        let f = |x: &DVector<f64>| {
            manipulability_constraint(x, model, &params.manipulability).map(|v| v.value).unwrap_or(f64::NAN)
        };
        t.record(relative_error(&c.gradient, &central_difference(f, &q, STEP)));
    }
    out.push(t.finish());

    Ok(out)
}
