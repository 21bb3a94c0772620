//! The SQP optimizer on the Rosenbrock function restricted to the unit
//! disk, plus box bounds.

use nalgebra::DVector;
use safe_ik::sqp::{minimize, NlpProblem, SolveOptions};

fn main() {
    let problem = NlpProblem::new(2, |x: &DVector<f64>| {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = DVector::from_vec(vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)]);
        (f, g)
    })
    .with_inequality(|x: &DVector<f64>| (x.norm_squared() - 1.0, 2.0 * x))
    .with_bounds(DVector::from_element(2, -1.5), DVector::from_element(2, 1.5));

    let opts = SolveOptions {
        max_iterations: 200,
        ..SolveOptions::default()
    };
    let result = minimize(&problem, &DVector::from_vec(vec![-1.2, 1.0]), &opts);
    println!("status      {}", result.status.as_str());
    println!("x*          [{:.6}, {:.6}]", result.x_star[0], result.x_star[1]);
    println!("f*          {:.6e}", result.f_star);
    println!("iterations  {}", result.iterations);
    println!("kkt         {:.2e}", result.kkt_residual);
    println!("violation   {:.2e}", result.max_constraint_violation);
    println!("multiplier  {:.4}", result.multipliers[0]);
}
