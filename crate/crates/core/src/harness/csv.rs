use std::fmt::Write;

use super::rollout::RolloutLog;

/// Per-tick CSV of a rollout. Columns, in order:
/// `tick, t, q_0…q_{n−1}, ee_x, ee_y, ee_z, ee_qw, ee_qx, ee_qy, ee_qz,
/// target_x … target_qz, alpha, phi_min, phi_0…phi_{m−1}, status, accepted`,
/// then `step_ms` when `with_timing` is set. Wall time is opt-in so that
/// default output is reproducible byte for byte.
pub fn rollout_csv(log: &RolloutLog, with_timing: bool) -> String {
    let dof = log.initial_q.len();
    let obstacles = log.records.first().map_or(0, |r| r.phi.len());
    let mut cols = vec!["tick".to_string(), "t".to_string()];
    cols.extend((0..dof).map(|i| format!("q_{i}")));
    for prefix in ["ee", "target"] {
        for s in ["x", "y", "z", "qw", "qx", "qy", "qz"] {
            cols.push(format!("{prefix}_{s}"));
        }
    }
    cols.push("alpha".into());
    cols.push("phi_min".into());
    cols.extend((0..obstacles).map(|i| format!("phi_{i}")));
    cols.push("status".into());
    cols.push("accepted".into());
    if with_timing {
        cols.push("step_ms".into());
    }
    let mut out = cols.join(",");
    out.push('\n');
    for r in &log.records {
        let _ = write!(out, "{},{}", r.tick, r.t);
        for v in r.q.iter() {
            let _ = write!(out, ",{v}");
        }
        for pose in [&r.ee, &r.target] {
            let p = pose.position;
            let [w, x, y, z] = pose.wxyz();
            let _ = write!(out, ",{},{},{},{w},{x},{y},{z}", p.x, p.y, p.z);
        }
        let _ = write!(out, ",{},", r.alpha);
        if let Some(phi) = r.phi_min {
            let _ = write!(out, "{phi}");
        }
        for v in &r.phi {
            let _ = write!(out, ",{v}");
        }
        let _ = write!(out, ",{},{}", r.status.as_str(), r.accepted as u8);
        if with_timing {
            let _ = write!(out, ",{}", r.step_time * 1e3);
        }
        out.push('\n');
    }
    out
}
