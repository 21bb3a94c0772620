//! Thirty control ticks of each solver toward a target behind a ball. N
//! moves straight through it, P is pushed back by the penalty, B keeps the
//! linearized barrier condition.

use nalgebra::Vector3;
use safe_ik::geometry::Capsule;
use safe_ik::harness::{clearances, settle_configuration, top_grip, DEFAULT_DT};
use safe_ik::ik::{solve_step, IkParams, SolverKind, SolverState};
use safe_ik::pose::Pose;
use safe_ik::robot::RobotModel;

fn main() -> safe_ik::Result<()> {
    let model = RobotModel::bundled_arm7();
    let params = IkParams::default();
    let start = Pose::new(Vector3::new(0.5, -0.2, 0.3), top_grip());
    let q0 = settle_configuration(&model, &start, &params)?;
    let ball = Capsule::sphere(Vector3::new(0.5, -0.05, 0.3), 0.03);
    let (phi0, _) = clearances(&model, &q0, &[ball])?;
    println!("start clearance {:+.4} m", phi0.unwrap_or(f64::NAN));
    let target = Pose::new(Vector3::new(0.5, 0.1, 0.3), top_grip());

    for kind in [SolverKind::N, SolverKind::P, SolverKind::B] {
        let mut state = SolverState::new(&model, q0.clone(), DEFAULT_DT)?;
        println!("solver {kind}");
        for tick in 0..30 {
            let d = solve_step(kind, &mut state, &target, &[ball], &model, &params)?;
            if tick % 5 == 4 {
                println!(
                    "  tick {:>2}  status {:<10} iters {:>2}  phi_min {:+.4}  {:.2} ms{}",
                    tick + 1,
                    d.status.as_str(),
                    d.iterations,
                    d.phi_min.unwrap_or(f64::NAN),
                    d.step_time.as_secs_f64() * 1e3,
                    d.barrier.map(|b| format!("  barrier margin {:+.2e}", b.dominant_margin)).unwrap_or_default()
                );
            }
        }
    }
    Ok(())
}
