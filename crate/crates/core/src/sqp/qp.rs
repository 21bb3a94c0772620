//! Dense strictly convex QP solver (dual active-set, Goldfarb–Idnani style).
//!
//! Solves `min ½dᵀHd + gᵀd  s.t.  Ad + b ≤ 0,  lower ≤ d ≤ upper`.
//! The method starts from the unconstrained minimizer and adds violated
//! constraints one at a time while keeping the multipliers dual feasible, so
//! it needs no feasible starting point and detects infeasibility.

use nalgebra::{Cholesky, DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    Infeasible,
    /// `H` is not positive definite.
    NotConvex,
    MaxIterations,
}

/// Box bounds on the QP variable; infinite entries are ignored.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl Bounds {
    pub fn unbounded(n: usize) -> Self {
        Self {
            lower: DVector::from_element(n, f64::NEG_INFINITY),
            upper: DVector::from_element(n, f64::INFINITY),
        }
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub d: DVector<f64>,
    /// Multipliers of the general constraints `Ad + b ≤ 0`.
    pub duals: DVector<f64>,
    /// Multipliers of `d ≤ upper` and `lower ≤ d`.
    pub upper_duals: DVector<f64>,
    pub lower_duals: DVector<f64>,
    pub status: QpStatus,
    pub iterations: usize,
    /// Max of stationarity, primal violation and complementarity.
    pub kkt_residual: f64,
}

/// One inequality `rowᵀd + offset ≤ 0`, normalized to a unit row.
struct Row {
    normal: DVector<f64>,
    offset: f64,
    scale: f64,
    origin: RowOrigin,
}

#[derive(Clone, Copy)]
enum RowOrigin {
    General(usize),
    Upper(usize),
    Lower(usize),
}

const FEAS_TOL: f64 = 1e-11;

pub fn solve_qp(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    bounds: &Bounds,
) -> QpSolution {
    let n = g.len();
    let m = b.len();
    assert_eq!(h.shape(), (n, n), "H must be n×n");
    assert_eq!(a.shape(), (m, n), "A must be m×n");

    let mut rows = Vec::with_capacity(m + 2 * n);
    for i in 0..m {
        let r = a.row(i).transpose();
        let scale = r.norm();
        if scale == 0.0 {
            // constant constraint b ≤ 0; infeasible if violated
            if b[i] > FEAS_TOL {
                return failed(n, m, QpStatus::Infeasible);
            }
            continue;
        }
        rows.push(Row {
            normal: r / scale,
            offset: b[i] / scale,
            scale,
            origin: RowOrigin::General(i),
        });
    }
    for i in 0..n {
        if bounds.upper[i].is_finite() {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            rows.push(Row {
                normal: e,
                offset: -bounds.upper[i],
                scale: 1.0,
                origin: RowOrigin::Upper(i),
            });
        }
        if bounds.lower[i].is_finite() {
            let mut e = DVector::zeros(n);
            e[i] = -1.0;
            rows.push(Row {
                normal: e,
                offset: bounds.lower[i],
                scale: 1.0,
                origin: RowOrigin::Lower(i),
            });
        }
    }

    let Some(chol) = Cholesky::new(h.clone()) else {
        return failed(n, m, QpStatus::NotConvex);
    };

    let mut x = -chol.solve(g);
    let mut active: Vec<usize> = Vec::new();
    let mut mult: Vec<f64> = Vec::new();
    let max_iter = 50 + 10 * (n + rows.len());
    let mut iterations = 0;
    let mut status = QpStatus::Optimal;

    'outer: loop {
        // most violated inactive constraint
        let mut pick: Option<(usize, f64)> = None;
        for (i, row) in rows.iter().enumerate() {
            if active.contains(&i) {
                continue;
            }
            let v = row.normal.dot(&x) + row.offset;
            if v > FEAS_TOL && pick.is_none_or(|(_, best)| v > best) {
                pick = Some((i, v));
            }
        }
        let Some((p, _)) = pick else { break };
        let mut u_p = 0.0;

        loop {
            iterations += 1;
            if iterations > max_iter {
                status = QpStatus::MaxIterations;
                break 'outer;
            }
            let a_p = &rows[p].normal;
            let hinv_ap = chol.solve(a_p);
            // dual direction r = (NᵀH⁻¹N)⁻¹ NᵀH⁻¹a_p and primal direction
            // z = −H⁻¹(a_p − N r)
            let (z, r) = if active.is_empty() {
                (-hinv_ap.clone(), DVector::zeros(0))
            } else {
                let k = active.len();
                let nmat = DMatrix::from_fn(n, k, |i, j| rows[active[j]].normal[i]);
                let hinv_n = chol.solve(&nmat);
                let s = nmat.tr_mul(&hinv_n);
                let rhs = nmat.tr_mul(&hinv_ap);
                let r = match Cholesky::new(s.clone()) {
                    Some(c) => c.solve(&rhs),
                    None => match s.lu().solve(&rhs) {
                        Some(r) => r,
                        None => {
                            status = QpStatus::MaxIterations;
                            break 'outer;
                        }
                    },
                };
                let z = -(&hinv_ap - &hinv_n * &r);
                (z, r)
            };

            // largest dual step keeping active multipliers nonnegative
            let mut t1 = f64::INFINITY;
            let mut block = None;
            for (j, &rj) in r.iter().enumerate() {
                if rj > 1e-14 {
                    let t = mult[j] / rj;
                    if t < t1 {
                        t1 = t;
                        block = Some(j);
                    }
                }
            }

            let z_curv = -a_p.dot(&z); // = zᵀHz
            let degenerate = z.norm() <= 1e-12 * hinv_ap.norm().max(1e-300) || z_curv <= 0.0;
            if degenerate {
                let Some(j) = block else {
                    status = QpStatus::Infeasible;
                    break 'outer;
                };
                for (mj, rj) in mult.iter_mut().zip(r.iter()) {
                    *mj -= t1 * rj;
                }
                u_p += t1;
                active.remove(j);
                mult.remove(j);
                continue;
            }

            let viol = a_p.dot(&x) + rows[p].offset;
            let t2 = viol / z_curv;
            let t = t1.min(t2);
            x += &z * t;
            for (mj, rj) in mult.iter_mut().zip(r.iter()) {
                *mj -= t * rj;
            }
            u_p += t;
            if t2 <= t1 {
                active.push(p);
                mult.push(u_p);
                break;
            }
            let j = block.expect("finite partial step has a blocking constraint");
            active.remove(j);
            mult.remove(j);
        }
    }

    let mut duals = DVector::zeros(m);
    let mut upper_duals = DVector::zeros(n);
    let mut lower_duals = DVector::zeros(n);
    for (&i, &u) in active.iter().zip(&mult) {
        let u = u.max(0.0);
        match rows[i].origin {
            RowOrigin::General(k) => duals[k] = u / rows[i].scale,
            RowOrigin::Upper(k) => upper_duals[k] = u,
            RowOrigin::Lower(k) => lower_duals[k] = u,
        }
    }

    let stationarity = h * &x + g + a.tr_mul(&duals) + &upper_duals - &lower_duals;
    let mut kkt = stationarity.amax();
    for i in 0..m {
        let c = a.row(i).dot(&x.transpose()) + b[i];
        kkt = kkt.max(c.max(0.0)).max((duals[i] * c).abs());
    }
    for i in 0..n {
        if bounds.upper[i].is_finite() {
            let c = x[i] - bounds.upper[i];
            kkt = kkt.max(c.max(0.0)).max((upper_duals[i] * c).abs());
        }
        if bounds.lower[i].is_finite() {
            let c = bounds.lower[i] - x[i];
            kkt = kkt.max(c.max(0.0)).max((lower_duals[i] * c).abs());
        }
    }

    QpSolution {
        d: x,
        duals,
        upper_duals,
        lower_duals,
        status,
        iterations,
        kkt_residual: kkt,
    }
}

fn failed(n: usize, m: usize, status: QpStatus) -> QpSolution {
    QpSolution {
        d: DVector::zeros(n),
        duals: DVector::zeros(m),
        upper_duals: DVector::zeros(n),
        lower_duals: DVector::zeros(n),
        status,
        iterations: 0,
        kkt_residual: f64::INFINITY,
    }
}
