//! Acceptance report: one pass/fail line per criterion. Runs without the
//! libtest harness so the report is always printed; exits nonzero if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use nalgebra::{DVector, Vector3};
use rand::Rng;
use rayon::prelude::*;
use safe_ik::geometry::{capsule_signed_distance, Capsule};
use safe_ik::harness::*;
use safe_ik::ik::{
    linearize_barriers, log_sum_exp, penalty_objective, self_collision_objective, smoothness_objective,
    solve_step, tracking_objective, CbfParams, IkParams, ObjectiveWeights, PenaltyParams, SolverKind,
    SolverState,
};
use safe_ik::robot::{forward_kinematics, geometric_jacobian, link_capsules_world, RobotModel};
use safe_ik::sqp::{minimize, NlpProblem, SolveOptions, SolveStatus};
use safe_ik::teleop::{parse_script, replay, SessionConfig};

const SEEDS: u64 = 10;
const H: f64 = 1e-6;

#[derive(PartialEq)]
enum Verdict {
    Pass,
    /// Outside the target but inside the reporting band.
    Report,
    Fail,
}

struct Line {
    id: u32,
    name: &'static str,
    verdict: Verdict,
    detail: String,
}

fn line(id: u32, name: &'static str, pass: bool, detail: String) -> Line {
    Line {
        id,
        name,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        detail,
    }
}

struct Batch {
    table: ComparisonTable,
    logs: Vec<RolloutLog>,
    scenes: Vec<(Scene, ReferenceTrajectory)>,
    elapsed: Duration,
}

fn run_batch(kind: SceneKind) -> Batch {
    let arm = RobotModel::bundled_arm7();
    let started = Instant::now();
    let scenes: Vec<_> = (0..SEEDS).map(|s| make_scene(kind, s).unwrap()).collect();
    let (table, logs) = compare_scenes_logged(&SolverKind::ALL, &arm, &scenes, &RolloutOptions::default()).unwrap();
    Batch {
        table,
        logs,
        scenes,
        elapsed: started.elapsed(),
    }
}

fn mean(table: &ComparisonTable, kind: SolverKind, metric: &str) -> f64 {
    table.mean(kind, metric).unwrap()
}

fn truncated(batch: &Batch) -> usize {
    batch.table.runs.iter().filter(|r| r.truncated.is_some()).count()
}

fn criterion_1(dynamic: &Batch) -> Line {
    let t = &dynamic.table;
    let (n, p, b) = (
        mean(t, SolverKind::N, "violation_time_pct"),
        mean(t, SolverKind::P, "violation_time_pct"),
        mean(t, SolverKind::B, "violation_time_pct"),
    );
    let secs = dynamic.elapsed.as_secs_f64();
    line(
        1,
        "safety ordering, dynamic scene",
        b < p && p < n && b <= 5.0 && secs <= 300.0 && truncated(dynamic) == 0,
        format!("violation % N {n:.2}, P {p:.2}, B {b:.2} (B ≤ 5); {secs:.1} s for {SEEDS} seeds"),
    )
}

fn criterion_2(shelf: &Batch) -> Line {
    let t = &shelf.table;
    let (n, b) = (mean(t, SolverKind::N, "violation_time_pct"), mean(t, SolverKind::B, "violation_time_pct"));
    let clear = |kind| -> Vec<f64> { t.runs_of(kind).map(|r| r.metrics.min_clearance.unwrap()).collect() };
    let (cn, cb) = (clear(SolverKind::N), clear(SolverKind::B));
    let dominated = cn.iter().zip(&cb).all(|(n, b)| b > n);
    let worst_gap = cn.iter().zip(&cb).map(|(n, b)| b - n).fold(f64::INFINITY, f64::min);
    line(
        2,
        "safety ordering, shelf scene",
        b <= 2.0 && n >= 10.0 && dominated && truncated(shelf) == 0,
        format!("violation % N {n:.2} (≥ 10), B {b:.2} (≤ 2); min clearance B − N ≥ {worst_gap:+.4} m on every seed"),
    )
}

fn criterion_3(dynamic: &Batch, shelf: &Batch) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, batch) in [("dynamic", dynamic), ("shelf", shelf)] {
        let n = mean(&batch.table, SolverKind::N, "pos_err_mean");
        let b = mean(&batch.table, SolverKind::B, "pos_err_mean");
        ok &= b <= 3.0 * n && b <= n + 0.05;
        parts.push(format!("{name}: N {n:.4} m, B {b:.4} m ({:.2}×)", b / n));
    }
    line(3, "tracking preserved", ok, parts.join("; "))
}

fn criterion_4() -> Line {
    let arm = RobotModel::bundled_arm7();
    let opts = RolloutOptions::default();
    let mut ok = true;
    let mut ticks = 0;
    for kind in [SceneKind::Dynamic, SceneKind::Shelf] {
        let (scene, traj) = make_scene(kind, 0).unwrap();
        let empty = scene.without_obstacles();
        let n = run_rollout(SolverKind::N, &arm, &empty, &traj, &opts).unwrap();
        let b = run_rollout(SolverKind::B, &arm, &empty, &traj, &opts).unwrap();
        ok &= n.records.len() == b.records.len()
            && n.records.iter().zip(&b.records).all(|(x, y)| x.q == y.q && x.ee == y.ee)
            && rollout_csv(&n, false) == rollout_csv(&b, false);
        ticks += n.records.len();
    }
    line(4, "constraint-vacuity equivalence", ok, format!("{ticks} ticks compared bit for bit"))
}

/// Minimum signed distance from the arm to one obstacle and the index of
/// the closest link.
fn obstacle_phi(arm: &RobotModel, q: &DVector<f64>, obstacle: &Capsule) -> (f64, usize) {
    link_capsules_world(arm, q)
        .unwrap()
        .iter()
        .enumerate()
        .map(|(i, c)| (capsule_signed_distance(c, obstacle).phi, i))
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
}

/// Central differences at two step sizes disagree: a kink is within reach.
fn kinked(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>) -> bool {
    relative_error(&fd_gradient(&f, x, H), &fd_gradient(&f, x, H * 0.1)) > 1e-6
}

fn criterion_5() -> Line {
    let arm = RobotModel::bundled_arm7();
    let w = ObjectiveWeights::default();
    let mut rng = rng(500);
    let mut worst: Vec<(&str, f64, usize)> = Vec::new();
    let mut record = |name, errors: Vec<f64>, skipped: usize| {
        worst.push((name, errors.iter().copied().fold(0.0, f64::max), skipped))
    };

    // FK Jacobian: every column of the 6×n geometric Jacobian
    let errors = (0..100)
        .map(|_| {
            let q = random_q(&arm, &mut rng);
            let jac = geometric_jacobian(&arm, &q).unwrap();
            let ee = |x: &DVector<f64>| forward_kinematics(&arm, x).unwrap().ee_pose();
            let mut err: f64 = 0.0;
            for j in 0..arm.dof() {
                let mut qp = q.clone();
                let mut qm = q.clone();
                qp[j] += H;
                qm[j] -= H;
                let (a, b) = (ee(&qp), ee(&qm));
                let v = (a.position - b.position) / (2.0 * H);
                let omega = (a.orientation * b.orientation.inverse()).scaled_axis() / (2.0 * H);
                let num = DVector::from_iterator(6, v.iter().chain(omega.iter()).copied());
                err = err.max(relative_error(&DVector::from_iterator(6, jac.column(j).iter().copied()), &num));
            }
            err
        })
        .collect();
    record("fk_jacobian", errors, 0);

    let mut errors = Vec::new();
    let mut skipped = 0;
    while errors.len() < 100 {
        let q = random_q(&arm, &mut rng);
        let obstacle = random_obstacle(&mut rng);
        let f = |x: &DVector<f64>| obstacle_phi(&arm, x, &obstacle).0;
        let fk = forward_kinematics(&arm, &q).unwrap();
        let link = obstacle_phi(&arm, &q, &obstacle).1;
        let caps = fk.link_capsules(&arm);
        let witness = capsule_signed_distance(&caps[link], &obstacle);
        if kinked(f, &q) || witness.is_degenerate() {
            skipped += 1;
            continue;
        }
        let report = safe_ik::geometry::min_robot_obstacle_distance(&caps, std::slice::from_ref(&obstacle)).unwrap();
        let g = safe_ik::geometry::distance_gradient(&arm, &fk, &report.global, None);
        errors.push(relative_error(&g.gradient, &fd_gradient(f, &q, H)));
    }
    record("distance", errors, skipped);

    let errors = (0..100)
        .map(|_| {
            let q = random_q(&arm, &mut rng);
            let target = forward_kinematics(&arm, &random_q(&arm, &mut rng)).unwrap().ee_pose();
            let f = |x: &DVector<f64>| tracking_objective(x, &target, &arm, &w).unwrap().0;
            relative_error(&tracking_objective(&q, &target, &arm, &w).unwrap().1, &fd_gradient(f, &q, H))
        })
        .collect();
    record("tracking", errors, 0);

    let errors = (0..100)
        .map(|_| {
            let history = [random_q(&arm, &mut rng), random_q(&arm, &mut rng), random_q(&arm, &mut rng)];
            let state = SolverState::from_history(&arm, history, DEFAULT_DT).unwrap();
            let q = random_q(&arm, &mut rng);
            let f = |x: &DVector<f64>| smoothness_objective(&state, x, &arm, &w).unwrap().0;
            relative_error(&smoothness_objective(&state, &q, &arm, &w).unwrap().1, &fd_gradient(f, &q, H))
        })
        .collect();
    record("smoothness", errors, 0);

    let mut errors = Vec::new();
    let mut skipped = 0;
    while errors.len() < 100 {
        let q = random_q(&arm, &mut rng);
        let f = |x: &DVector<f64>| self_collision_objective(x, &arm, &w).unwrap().0;
        if kinked(f, &q) {
            skipped += 1;
            continue;
        }
        errors.push(relative_error(&self_collision_objective(&q, &arm, &w).unwrap().1, &fd_gradient(f, &q, H)));
    }
    record("self_collision", errors, skipped);

    let p = PenaltyParams::default();
    let mut errors = Vec::new();
    let mut skipped = 0;
    while errors.len() < 100 {
        let q = random_q(&arm, &mut rng);
        let obstacles: Vec<Capsule> = (0..3).map(|_| random_obstacle(&mut rng)).collect();
        let f = |x: &DVector<f64>| penalty_objective(x, &obstacles, &arm, &p).unwrap().0;
        if kinked(f, &q) {
            skipped += 1;
            continue;
        }
        errors.push(relative_error(&penalty_objective(&q, &obstacles, &arm, &p).unwrap().1, &fd_gradient(f, &q, H)));
    }
    record("penalty", errors, skipped);

    let cbf = CbfParams::default();
    let errors = (0..100)
        .map(|_| {
            let q_prev = random_q(&arm, &mut rng);
            let obstacles: Vec<Capsule> = (0..4).map(|_| random_obstacle(&mut rng)).collect();
            let lin = linearize_barriers(&arm, &q_prev, &obstacles, &cbf, &[]).unwrap().unwrap();
            let q = &q_prev + DVector::from_fn(arm.dof(), |_, _| rng.random_range(-0.05..0.05));
            let f = |x: &DVector<f64>| lin.evaluate(x, &cbf).0;
            relative_error(&lin.evaluate(&q, &cbf).1, &fd_gradient(f, &q, H))
        })
        .collect();
    record("cbf", errors, 0);

    let ok = worst.iter().all(|(_, e, _)| *e < 1e-4);
    let detail = worst
        .iter()
        .map(|(n, e, s)| if *s > 0 { format!("{n} {e:.1e} ({s} kinks skipped)") } else { format!("{n} {e:.1e}") })
        .collect::<Vec<_>>()
        .join(", ");
    line(5, "gradient suite", ok, format!("max relative error: {detail}"))
}

fn criterion_6() -> Line {
    let mut rng = rng(600);
    let pairs: Vec<(Capsule, Capsule)> = (0..1000).map(|_| (random_capsule(&mut rng), random_capsule(&mut rng))).collect();
    let worst = pairs
        .par_iter()
        .map(|(a, b)| {
            let (_, fine) = grid_oracle(a, b, 2001);
            let oracle = fine - a.radius - b.radius;
            (capsule_signed_distance(a, b).phi - oracle).abs()
        })
        .reduce(|| 0.0, f64::max);
    line(6, "geometry oracle", worst <= 1e-6, format!("1000 pairs, max |φ − oracle| = {worst:.1e}"))
}

fn criterion_7() -> Line {
    let arm = RobotModel::bundled_arm7();
    let cbf = CbfParams::default();
    let mut rng = rng(700);
    let mut sets: Vec<(Vec<f64>, f64)> = Vec::new();
    for _ in 0..500 {
        let n = rng.random_range(1..=12);
        let scale = [1e-3, 1.0, 1e3][rng.random_range(0..3)];
        let terms = (0..n).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
        sets.push((terms, [1.0, 10.0, 100.0, 1000.0][rng.random_range(0..4)]));
    }
    // terms of the barrier aggregate as the solver builds them
    let mut robot_sets = 0;
    while robot_sets < 500 {
        let q_prev = random_q(&arm, &mut rng);
        let obstacles: Vec<Capsule> = (0..rng.random_range(1..=10)).map(|_| random_obstacle(&mut rng)).collect();
        let lin = linearize_barriers(&arm, &q_prev, &obstacles, &cbf, &[]).unwrap().unwrap();
        let q = &q_prev + DVector::from_fn(arm.dof(), |_, _| rng.random_range(-0.05..0.05));
        let terms = lin.terms(&q, &cbf);
        let (c, _) = lin.evaluate(&q, &cbf);
        let (v, _) = log_sum_exp(&terms, cbf.temperature);
        if c != v {
            return line(7, "log-sum-exp bounds", false, format!("aggregate {c} differs from log-sum-exp {v}"));
        }
        sets.push((terms, cbf.temperature));
        robot_sets += 1;
    }
    let mut violations = 0;
    for (terms, t) in &sets {
        let (v, _) = log_sum_exp(terms, *t);
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max <= v && v <= max + (terms.len() as f64).ln() / t) {
            violations += 1;
        }
    }
    line(
        7,
        "log-sum-exp bounds",
        violations == 0,
        format!("{} term sets ({robot_sets} from barrier linearizations), {violations} outside [max, max + ln|O|/T]", sets.len()),
    )
}

fn criterion_8() -> Line {
    let opts = SolveOptions {
        max_iterations: 500,
        ..SolveOptions::default()
    };
    let mut notes = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, problem: &NlpProblem<'_>, x0: &[f64], expect: &[f64], tol: f64| {
        let res = minimize(problem, &DVector::from_row_slice(x0), &opts);
        let feasible = problem.inequalities.iter().all(|c| c(&res.x_star).0 <= 1e-6)
            && (0..problem.dim).all(|i| res.x_star[i] >= problem.lower[i] - 1e-12 && res.x_star[i] <= problem.upper[i] + 1e-12);
        let err = res.x_star.iter().zip(expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let pass = res.status == SolveStatus::Converged && feasible && err <= tol;
        ok &= pass;
        if !pass {
            notes.push(format!("{name} from {x0:?}: {} err {err:.1e}", res.status.as_str()));
        }
        err
    };
    let bounds = || (DVector::from_element(2, -2.0), DVector::from_element(2, 2.0));

    let target = [0.3, -1.1];
    let quad = NlpProblem::new(2, |x| {
        let r = x - DVector::from_row_slice(&target);
        (r.norm_squared(), r * 2.0)
    })
    .with_bounds(bounds().0, bounds().1);
    let mut e_quad: f64 = 0.0;
    for x0 in [[-2.0, 2.0], [1.9, -1.9], [0.0, 0.0]] {
        e_quad = e_quad.max(check("quadratic", &quad, &x0, &target, 1e-8));
    }

    let rosen = NlpProblem::new(2, |x| {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        (f, DVector::from_vec(vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)]))
    })
    .with_bounds(bounds().0, bounds().1);
    let mut e_rosen: f64 = 0.0;
    for x0 in [[-1.2, 1.0], [0.0, 0.0], [1.8, -1.5], [-2.0, -2.0]] {
        e_rosen = e_rosen.max(check("rosenbrock", &rosen, &x0, &[1.0, 1.0], 1e-5));
    }

    // x₁ + x₂ over the unit disk; the optimum (−√2/2, −√2/2) has an
    // active constraint with a positive multiplier
    let disk = NlpProblem::new(2, |x| (x[0] + x[1], DVector::from_element(2, 1.0)))
        .with_bounds(bounds().0, bounds().1)
        .with_inequality(|x| (x.norm_squared() - 1.0, x * 2.0));
    let s = -std::f64::consts::FRAC_1_SQRT_2;
    let mut e_disk: f64 = 0.0;
    for x0 in [[-1.5, -0.5], [-0.1, -1.9], [0.3, 0.2], [1.9, 1.9]] {
        e_disk = e_disk.max(check("disk", &disk, &x0, &[s, s], 1e-5));
    }

    let mut detail = format!("max |x − x*|: quadratic {e_quad:.1e} (1e-8), rosenbrock {e_rosen:.1e} (1e-5), disk {e_disk:.1e} (1e-5)");
    if !notes.is_empty() {
        detail.push_str(&format!("; {}", notes.join("; ")));
    }
    line(8, "SQP regression", ok, detail)
}

fn criterion_9(batches: &[&Batch]) -> Line {
    let arm = RobotModel::bundled_arm7();
    let cbf = IkParams::default().cbf;
    let k = |h: f64| cbf.gamma * h + cbf.beta * h * h * h;
    let jobs: Vec<(&RolloutLog, &Scene)> = batches
        .iter()
        .flat_map(|b| {
            b.logs
                .iter()
                .filter(|l| l.kind == SolverKind::B)
                .map(move |l| (l, &b.scenes.iter().find(|(s, _)| s.seed == l.seed).unwrap().0))
        })
        .collect();
    let results: Vec<(usize, usize, usize, f64, f64)> = jobs
        .par_iter()
        .map(|&(log, scene)| {
            let (mut steps, mut skipped, mut rejected) = (0, 0, 0);
            let (mut worst_oracle, mut worst_reported) = (f64::INFINITY, f64::INFINITY);
            for (i, r) in log.records.iter().enumerate() {
                if !r.accepted {
                    rejected += 1;
                    continue;
                }
                let q_prev = if i == 0 { &log.initial_q } else { &log.records[i - 1].q };
                let dq = &r.q - q_prev;
                let obstacles = scene.obstacles_at(r.t);
                let mut margin = f64::INFINITY;
                let mut kink = false;
                for o in &obstacles {
                    let f = |x: &DVector<f64>| obstacle_phi(&arm, x, o).0;
                    let h = f(q_prev) - cbf.epsilon;
                    if dq.amax() > 0.0 && kinked(f, q_prev) {
                        kink = true;
                        break;
                    }
                    let grad = fd_gradient(f, q_prev, H);
                    margin = margin.min(grad.dot(&dq) + k(h));
                }
                if let Some(b) = &r.barrier {
                    worst_reported = worst_reported.min(b.dominant_margin);
                }
                if kink {
                    skipped += 1;
                    continue;
                }
                steps += 1;
                worst_oracle = worst_oracle.min(margin);
            }
            (steps, skipped, rejected, worst_oracle, worst_reported)
        })
        .collect();
    let steps: usize = results.iter().map(|r| r.0).sum();
    let skipped: usize = results.iter().map(|r| r.1).sum();
    let rejected: usize = results.iter().map(|r| r.2).sum();
    let oracle = results.iter().map(|r| r.3).fold(f64::INFINITY, f64::min);
    let reported = results.iter().map(|r| r.4).fold(f64::INFINITY, f64::min);
    line(
        9,
        "discrete barrier step property",
        oracle >= -1e-6 && reported >= -1e-6,
        format!(
            "{steps} accepted B steps, min ∇hᵀΔθ + K(h) = {oracle:.1e} (finite-difference oracle), {reported:.1e} (solver); {skipped} steps near a witness switch skipped, {rejected} held"
        ),
    )
}

fn criterion_10() -> Line {
    let arm = RobotModel::bundled_arm7();
    let params = IkParams::default();
    let (mut scene, traj) = make_scene(SceneKind::Clutter, 0).unwrap();
    // four more movers to reach ten obstacles
    for (i, (c, axis)) in [
        (Vector3::new(0.30, 0.30, 0.55), Vector3::x()),
        (Vector3::new(0.30, -0.30, 0.55), Vector3::y()),
        (Vector3::new(0.65, 0.0, 0.70), Vector3::z()),
        (Vector3::new(0.0, 0.45, 0.40), Vector3::x()),
    ]
    .into_iter()
    .enumerate()
    {
        let motion = MotionProfile::new(axis, 0.05, 16.0, i as f64, DEFAULT_SPEED_CAP).unwrap();
        scene.obstacles.push(SceneObstacle {
            base: Capsule::new(c, c + Vector3::new(0.0, 0.0, 0.1), 0.04),
            motion: Some(motion),
        });
    }
    assert_eq!(scene.obstacles.len(), 10);
    let t0 = traj.start_time();
    let q0 = settle_configuration(&arm, &traj.sample(t0), &params).unwrap();
    let mut state = SolverState::new(&arm, q0, DEFAULT_DT).unwrap();
    let ticks = tick_count(30.0, DEFAULT_DT);
    let mut times = Vec::with_capacity(ticks);
    for tick in 0..ticks {
        let t = (tick + 1) as f64 * DEFAULT_DT;
        let obstacles = scene.obstacles_at(t);
        let target = traj.sample(t0 + t.min(traj.duration()));
        let started = Instant::now();
        solve_step(SolverKind::B, &mut state, &target, &obstacles, &arm, &params).unwrap();
        times.push(started.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(f64::total_cmp);
    let median = times[times.len() / 2];
    let p95 = times[times.len() * 95 / 100];
    Line {
        id: 10,
        name: "performance target",
        verdict: if median <= 15.0 {
            Verdict::Pass
        } else if median <= 25.0 {
            Verdict::Report
        } else {
            Verdict::Fail
        },
        detail: format!("B, 7 DoF, 10 obstacles, {ticks} ticks: median {median:.3} ms (≤ 15), p95 {p95:.3} ms"),
    }
}

fn criterion_11() -> Line {
    let arm = RobotModel::bundled_arm7();
    let run = || batch_compare(&SolverKind::ALL, &arm, SceneKind::Dynamic, &[0, 1, 2], &RolloutOptions::default()).unwrap();
    let (a, b) = (run(), run());
    let batch_same = a.summary_csv() == b.summary_csv() && a.table_csv() == b.table_csv();

    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let script = parse_script(&std::fs::read_to_string(format!("{dir}/teleop_script.jsonl")).unwrap()).unwrap();
    let golden = std::fs::read_to_string(format!("{dir}/teleop_golden.jsonl")).unwrap();
    let replay_once = || replay(arm.clone(), SessionConfig::default(), &script, 70).unwrap().join("\n") + "\n";
    let (r1, r2) = (replay_once(), replay_once());
    let frames = golden.lines().count();
    line(
        11,
        "determinism",
        batch_same && r1 == r2 && r1 == golden,
        format!(
            "batch CSV {} across two runs; teleop replay {} ({frames} frames, golden {})",
            if batch_same { "identical" } else { "differs" },
            if r1 == r2 { "repeatable" } else { "differs" },
            if r1 == golden { "matched" } else { "mismatch" }
        ),
    )
}

fn main() {
    // `cargo test -- --list` and filters from the libtest CLI are not
    // meaningful here; list mode prints nothing
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let dynamic = run_batch(SceneKind::Dynamic);
    let shelf = run_batch(SceneKind::Shelf);
    let lines = vec![
        criterion_1(&dynamic),
        criterion_2(&shelf),
        criterion_3(&dynamic, &shelf),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(&[&dynamic, &shelf]),
        criterion_10(),
        criterion_11(),
    ];
    println!("\nacceptance");
    for l in &lines {
        let tag = match l.verdict {
            Verdict::Pass => "PASS",
            Verdict::Report => "REPORT",
            Verdict::Fail => "FAIL",
        };
        println!("{tag:<6} {:>2}. {}: {}", l.id, l.name, l.detail);
    }
    let failed = lines.iter().filter(|l| l.verdict == Verdict::Fail).count();
    println!("{} of {} criteria failed\n", failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
