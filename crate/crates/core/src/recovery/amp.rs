use super::{check_dims, median_abs, norm, residual, Operator, Recovery, SolverConfig, SparseSolver, ThresholdRule};
use crate::error::Result;

/// Approximate message passing with soft thresholding.
pub struct Amp;

impl SparseSolver for Amp {
    fn name(&self) -> &'static str {
        "amp"
    }

    fn recover(&self, y: &[f64], op: &Operator, cfg: &SolverConfig) -> Result<Recovery> {
        amp_recover(y, op, cfg)
    }
}

fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

pub fn amp_recover(y: &[f64], op: &Operator, cfg: &SolverConfig) -> Result<Recovery> {
    cfg.validate()?;
    check_dims(y, op)?;
    let (m, n) = (op.rows(), op.cols());
    let b: Vec<f64> = y.iter().map(|v| v / op.scale()).collect();
    let b_norm = norm(&b);
    if b_norm == 0.0 {
        return Ok(Recovery::zero(n));
    }

    let mut x = vec![0.0; n];
    let mut z = b.clone();
    let mut r = vec![0.0; m];
    let mut pseudo = vec![0.0; n];
    let mut best = (1.0, x.clone());
    let mut since_best = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        iterations += 1;
        let theta = match cfg.threshold {
            ThresholdRule::Median { tau } => tau * median_abs(&z) / 0.6745,
            ThresholdRule::ResidualNorm { tau } => tau * norm(&z) / (m as f64).sqrt(),
        };
        op.adjoint(&z, &mut pseudo);
        let mut active = 0usize;
        for (xi, &p) in x.iter_mut().zip(&pseudo) {
            *xi = soft(*xi + p, theta);
            active += usize::from(*xi != 0.0);
        }
        let onsager = active as f64 / m as f64;
        let rel = residual(op, &b, &x, &mut r) / b_norm;
        if !rel.is_finite() {
            break;
        }
        for (zi, ri) in z.iter_mut().zip(&r) {
            *zi = ri + onsager * *zi;
        }
        if rel < best.0 * (1.0 - 1e-9) {
            best = (rel, x.clone());
            since_best = 0;
        } else {
            since_best += 1;
        }
        if rel <= cfg.tolerance {
            converged = true;
            break;
        }
        if since_best >= cfg.stall_iterations {
            break;
        }
    }
    log::debug!("amp: {iterations} iterations, residual {:.3e}", best.0);
    Ok(Recovery {
        x: best.1,
        residual: best.0,
        iterations,
        converged,
    })
}
