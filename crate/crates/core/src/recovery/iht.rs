use super::{check_dims, norm, residual, Operator, Recovery, SolverConfig, SparseSolver};
use crate::error::{ensure, Result};

/// Normalised iterative hard thresholding with an adaptive step.
pub struct Niht;

impl SparseSolver for Niht {
    fn name(&self) -> &'static str {
        "iht"
    }

    fn recover(&self, y: &[f64], op: &Operator, cfg: &SolverConfig) -> Result<Recovery> {
        let k = cfg.sparsity.unwrap_or(op.rows() / 4).max(1);
        iht_recover(y, op, k, cfg)
    }
}

const KAPPA: f64 = 2.0;
const C: f64 = 0.01;

/// Keep the `k` largest magnitudes, ties broken by lower index.
fn top_k(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

fn hard_threshold(v: &[f64], k: usize) -> (Vec<f64>, Vec<usize>) {
    let support = top_k(v, k);
    let mut out = vec![0.0; v.len()];
    for &i in &support {
        out[i] = v[i];
    }
    (out, support)
}

pub fn iht_recover(y: &[f64], op: &Operator, k: usize, cfg: &SolverConfig) -> Result<Recovery> {
    cfg.validate()?;
    check_dims(y, op)?;
    let (m, n) = (op.rows(), op.cols());
    ensure!(k <= n, "sparse_recovery", "sparsity {k} exceeds N={n}");
    let b: Vec<f64> = y.iter().map(|v| v / op.scale()).collect();
    let b_norm = norm(&b);
    if b_norm == 0.0 || k == 0 {
        return Ok(Recovery::zero(n));
    }

    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut g = vec![0.0; n];
    let mut ag = vec![0.0; m];
    let mut support = Vec::new();
    let mut best = (1.0, x.clone());
    let mut since_best = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        iterations += 1;
        op.adjoint(&r, &mut g);
        if support.is_empty() {
            support = top_k(&g, k);
        }
        let mut g_s = vec![0.0; n];
        for &i in &support {
            g_s[i] = g[i];
        }
        op.apply(&g_s, &mut ag);
        let denom = norm(&ag).powi(2);
        if denom == 0.0 {
            break;
        }
        let mut mu = norm(&g_s).powi(2) / denom;
        let (mut next, mut next_support);
        loop {
            let step: Vec<f64> = x.iter().zip(&g).map(|(a, d)| a + mu * d).collect();
            (next, next_support) = hard_threshold(&step, k);
            if next_support == support {
                break;
            }
            let diff: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
            op.apply(&diff, &mut ag);
            let omega = (1.0 - C) * norm(&diff).powi(2) / norm(&ag).powi(2).max(f64::MIN_POSITIVE);
            if mu <= omega {
                break;
            }
            mu /= KAPPA * (1.0 - C);
        }
        x = next;
        support = next_support;
        let rel = residual(op, &b, &x, &mut r) / b_norm;
        if !rel.is_finite() {
            break;
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
    log::debug!("iht: {iterations} iterations, residual {:.3e}", best.0);
    Ok(Recovery {
        x: best.1,
        residual: best.0,
        iterations,
        converged,
    })
}
