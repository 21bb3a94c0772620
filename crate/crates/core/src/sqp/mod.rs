//! Sequential quadratic programming for inequality- and bound-constrained
//! nonlinear programs.
//!
//! Each iteration solves a QP built from a damped-BFGS model of the
//! Lagrangian Hessian and the linearized constraints, then backtracks on an
//! L1 merit function. Infeasible subproblems are retried with a single
//! elastic slack so the solver degrades gracefully instead of failing.

mod qp;

pub use qp::{solve_qp, Bounds, QpSolution, QpStatus};

use std::time::{Duration, Instant};

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// A scalar function returning its value and gradient.
pub type Callable<'a> = Box<dyn Fn(&DVector<f64>) -> (f64, DVector<f64>) + 'a>;

/// `min f(x)  s.t.  c_k(x) ≤ 0,  lower ≤ x ≤ upper`.
pub struct NlpProblem<'a> {
    pub dim: usize,
    pub objective: Callable<'a>,
    pub inequalities: Vec<Callable<'a>>,
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl<'a> NlpProblem<'a> {
    pub fn new(dim: usize, objective: impl Fn(&DVector<f64>) -> (f64, DVector<f64>) + 'a) -> Self {
        Self {
            dim,
            objective: Box::new(objective),
            inequalities: Vec::new(),
            lower: DVector::from_element(dim, f64::NEG_INFINITY),
            upper: DVector::from_element(dim, f64::INFINITY),
        }
    }

    pub fn with_bounds(mut self, lower: DVector<f64>, upper: DVector<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn with_inequality(
        mut self,
        c: impl Fn(&DVector<f64>) -> (f64, DVector<f64>) + 'a,
    ) -> Self {
        self.inequalities.push(Box::new(c));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("problem.dim", "must be at least 1"));
        }
        if self.lower.len() != self.dim || self.upper.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.lower.len().min(self.upper.len()),
            });
        }
        if self.lower.iter().zip(self.upper.iter()).any(|(l, u)| !(l <= u)) {
            return Err(Error::invalid("problem.bounds", "lower bound exceeds upper bound"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub constraint_tolerance: f64,
    pub objective_tolerance: f64,
    pub step_tolerance: f64,
    pub time_budget: Option<Duration>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            constraint_tolerance: 1e-6,
            objective_tolerance: 1e-8,
            step_tolerance: 1e-14,
            time_budget: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("constraint_tolerance", self.constraint_tolerance),
            ("objective_tolerance", self.objective_tolerance),
            ("step_tolerance", self.step_tolerance),
        ] {
            if !(v > 0.0) {
                return Err(Error::invalid(name, "tolerance must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    TimeBudget,
    InfeasibleQp,
    /// Steps shrank below `step_tolerance` before the KKT test passed.
    Stalled,
    /// A callable returned NaN or infinity.
    NonFinite,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iter",
            SolveStatus::TimeBudget => "time_budget",
            SolveStatus::InfeasibleQp => "infeasible_qp",
            SolveStatus::Stalled => "stalled",
            SolveStatus::NonFinite => "non_finite",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_star: DVector<f64>,
    pub f_star: f64,
    pub status: SolveStatus,
    pub kkt_residual: f64,
    /// Recomputed at `x_star`.
    pub max_constraint_violation: f64,
    pub iterations: usize,
    pub multipliers: DVector<f64>,
    /// `x0` lay outside the bounds and was clamped.
    pub start_clamped: bool,
    /// Times the Hessian model lost positive definiteness and was reset.
    pub hessian_resets: usize,
    /// At least one subproblem needed the elastic relaxation.
    pub used_elastic: bool,
}

struct Eval {
    f: f64,
    grad: DVector<f64>,
    c: DVector<f64>,
    jac: DMatrix<f64>,
}

impl Eval {
    fn finite(&self) -> bool {
        self.f.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.c.iter().all(|v| v.is_finite())
            && self.jac.iter().all(|v| v.is_finite())
    }

    fn violation(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |acc, &v| acc.max(v))
    }

    fn l1_violation(&self) -> f64 {
        self.c.iter().map(|v| v.max(0.0)).sum()
    }
}

fn evaluate(problem: &NlpProblem<'_>, x: &DVector<f64>) -> Eval {
    let (f, grad) = (problem.objective)(x);
    let m = problem.inequalities.len();
    let mut c = DVector::zeros(m);
    let mut jac = DMatrix::zeros(m, problem.dim);
    for (k, ineq) in problem.inequalities.iter().enumerate() {
        let (v, g) = ineq(x);
        c[k] = v;
        jac.set_row(k, &g.transpose());
    }
    Eval { f, grad, c, jac }
}

fn clamp_into(x: &mut DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>) -> bool {
    let mut clamped = false;
    for i in 0..x.len() {
        let v = x[i].clamp(lower[i], upper[i]);
        if v != x[i] {
            clamped = true;
            x[i] = v;
        }
    }
    clamped
}

struct Step {
    d: DVector<f64>,
    lambda: DVector<f64>,
    upper: DVector<f64>,
    lower: DVector<f64>,
    elastic: bool,
}

/// An SQP solver instance. Keeps its Hessian approximation between calls so
/// that a sequence of closely related problems (one per control tick) can
/// warm start.
#[derive(Debug, Clone, Default)]
pub struct SqpSolver {
    hessian: Option<DMatrix<f64>>,
}

impl SqpSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        self.hessian = None;
    }

    pub fn hessian(&self) -> Option<&DMatrix<f64>> {
        self.hessian.as_ref()
    }

    fn subproblem(
        b: &DMatrix<f64>,
        eval: &Eval,
        bounds: &Bounds,
    ) -> Option<Step> {
        let qp = solve_qp(b, &eval.grad, &eval.jac, &eval.c, bounds);
        if qp.status == QpStatus::Optimal {
            return Some(Step {
                d: qp.d,
                lambda: qp.duals,
                upper: qp.upper_duals,
                lower: qp.lower_duals,
                elastic: false,
            });
        }
        // elastic relaxation: c + ∇c d ≤ s, s ≥ 0, penalized in the objective
        let n = eval.grad.len();
        let m = eval.c.len();
        let weight = 1e4 * eval.grad.amax().max(1.0);
        let mut h = DMatrix::zeros(n + 1, n + 1);
        h.view_mut((0, 0), (n, n)).copy_from(b);
        h[(n, n)] = 1.0;
        let mut g = DVector::zeros(n + 1);
        g.rows_mut(0, n).copy_from(&eval.grad);
        g[n] = weight;
        let mut a = DMatrix::zeros(m, n + 1);
        a.view_mut((0, 0), (m, n)).copy_from(&eval.jac);
        a.column_mut(n).fill(-1.0);
        let mut lower = DVector::zeros(n + 1);
        let mut upper = DVector::from_element(n + 1, f64::INFINITY);
        lower.rows_mut(0, n).copy_from(&bounds.lower);
        upper.rows_mut(0, n).copy_from(&bounds.upper);
        let qp = solve_qp(&h, &g, &a, &eval.c, &Bounds { lower, upper });
        if qp.status != QpStatus::Optimal {
            return None;
        }
        Some(Step {
            d: qp.d.rows(0, n).into_owned(),
            lambda: qp.duals,
            upper: qp.upper_duals.rows(0, n).into_owned(),
            lower: qp.lower_duals.rows(0, n).into_owned(),
            elastic: true,
        })
    }

    pub fn minimize(
        &mut self,
        problem: &NlpProblem<'_>,
        x0: &DVector<f64>,
        opts: &SolveOptions,
    ) -> SolveResult {
        let start = Instant::now();
        let n = problem.dim;
        let mut x = x0.clone();
        let start_clamped = clamp_into(&mut x, &problem.lower, &problem.upper);
        let mut b = self
            .hessian
            .take()
            .filter(|h| h.shape() == (n, n))
            .unwrap_or_else(|| DMatrix::identity(n, n));
        let mut hessian_resets = 0;
        let mut used_elastic = false;
        let mut rho = 0.0_f64;
        let mut lambda = DVector::zeros(problem.inequalities.len());
        let mut iterations = 0;
        let mut kkt = f64::INFINITY;

        let mut eval = evaluate(problem, &x);
        let status = 'solve: {
            if !eval.finite() {
                break 'solve SolveStatus::NonFinite;
            }
            loop {
                if Cholesky::new(b.clone()).is_none() {
                    b = DMatrix::identity(n, n);
                    hessian_resets += 1;
                }
                let bounds = Bounds {
                    lower: &problem.lower - &x,
                    upper: &problem.upper - &x,
                };
                let Some(step) = Self::subproblem(&b, &eval, &bounds) else {
                    break 'solve SolveStatus::InfeasibleQp;
                };
                used_elastic |= step.elastic;
                lambda = step.lambda.clone();

                kkt = kkt_residual(&eval, &step, &x, problem);
                if kkt < opts.objective_tolerance && eval.violation() < opts.constraint_tolerance {
                    break 'solve SolveStatus::Converged;
                }
                if iterations >= opts.max_iterations {
                    break 'solve SolveStatus::MaxIterations;
                }
                if opts.time_budget.is_some_and(|t| start.elapsed() >= t) {
                    break 'solve SolveStatus::TimeBudget;
                }

                // L1 merit with Armijo backtracking
                let needed = step.lambda.iter().fold(0.0_f64, |a, &l| a.max(l));
                if rho < 1.1 * needed {
                    rho = 2.0 * needed;
                }
                let merit0 = eval.f + rho * eval.l1_violation();
                let lin_viol: f64 = (&eval.c + &eval.jac * &step.d).iter().map(|v| v.max(0.0)).sum();
                let slope = eval.grad.dot(&step.d) + rho * (lin_viol - eval.l1_violation());

                let mut alpha = 1.0;
                let mut accepted = None;
                for _ in 0..40 {
                    let mut x_try = &x + &step.d * alpha;
                    clamp_into(&mut x_try, &problem.lower, &problem.upper);
                    let e_try = evaluate(problem, &x_try);
                    if e_try.finite() {
                        let merit = e_try.f + rho * e_try.l1_violation();
                        let armijo = merit0 + 1e-4 * alpha * slope.min(0.0);
                        if merit <= armijo || (slope >= 0.0 && merit <= merit0) {
                            accepted = Some((x_try, e_try));
                            break;
                        }
                        let denom = 2.0 * (merit - merit0 - slope * alpha);
                        let interp = if slope < 0.0 && denom > 0.0 {
                            -slope * alpha * alpha / denom
                        } else {
                            0.5 * alpha
                        };
                        alpha = interp.clamp(0.1 * alpha, 0.5 * alpha);
                    } else {
                        alpha *= 0.5;
                    }
                    if alpha * step.d.amax() < opts.step_tolerance {
                        break;
                    }
                }
                let Some((x_new, e_new)) = accepted else {
                    if b != DMatrix::identity(n, n) {
                        // stale curvature: retry from a fresh model
                        b = DMatrix::identity(n, n);
                        hessian_resets += 1;
                        continue;
                    }
                    break 'solve SolveStatus::Stalled;
                };

                // damped BFGS on the Lagrangian
                let s = &x_new - &x;
                let y = (&e_new.grad + e_new.jac.tr_mul(&lambda)) - (&eval.grad + eval.jac.tr_mul(&lambda));
                damped_bfgs_update(&mut b, &s, &y);

                let tiny_step = s.amax() < opts.step_tolerance;
                x = x_new;
                eval = e_new;
                iterations += 1;
                if tiny_step && eval.violation() >= opts.constraint_tolerance {
                    break 'solve SolveStatus::Stalled;
                }
            }
        };

        self.hessian = Some(b);
        let bound_violation = (0..n)
            .map(|i| (problem.lower[i] - x[i]).max(x[i] - problem.upper[i]).max(0.0))
            .fold(0.0_f64, f64::max);
        SolveResult {
            f_star: eval.f,
            max_constraint_violation: eval.violation().max(0.0).max(bound_violation),
            x_star: x,
            status,
            kkt_residual: kkt,
            iterations,
            multipliers: lambda,
            start_clamped,
            hessian_resets,
            used_elastic,
        }
    }
}

fn kkt_residual(eval: &Eval, step: &Step, x: &DVector<f64>, problem: &NlpProblem<'_>) -> f64 {
    let stationarity = &eval.grad + eval.jac.tr_mul(&step.lambda) + &step.upper - &step.lower;
    let mut r = stationarity.amax();
    for k in 0..eval.c.len() {
        r = r.max((step.lambda[k] * eval.c[k]).abs());
    }
    for i in 0..x.len() {
        if problem.upper[i].is_finite() {
            r = r.max((step.upper[i] * (x[i] - problem.upper[i])).abs());
        }
        if problem.lower[i].is_finite() {
            r = r.max((step.lower[i] * (problem.lower[i] - x[i])).abs());
        }
    }
    r
}

/// Powell-damped BFGS update; keeps `b` positive definite.
pub fn damped_bfgs_update(b: &mut DMatrix<f64>, s: &DVector<f64>, y: &DVector<f64>) {
    let bs = &*b * s;
    let sbs = s.dot(&bs);
    if !(sbs > 1e-300) {
        return;
    }
    let sy = s.dot(y);
    let y = if sy < 0.2 * sbs {
        let theta = 0.8 * sbs / (sbs - sy);
        y * theta + &bs * (1.0 - theta)
    } else {
        y.clone()
    };
    let sy = s.dot(&y);
    if !(sy > 0.0) {
        return;
    }
    *b += &y * y.transpose() / sy - &bs * bs.transpose() / sbs;
    // symmetrize against round-off drift
    let bt = b.transpose();
    *b = (&*b + bt) * 0.5;
}

/// Solves `problem` from `x0` with a fresh solver instance.
pub fn minimize(problem: &NlpProblem<'_>, x0: &DVector<f64>, opts: &SolveOptions) -> SolveResult {
    SqpSolver::new().minimize(problem, x0, opts)
}
