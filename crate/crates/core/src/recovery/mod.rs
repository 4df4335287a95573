//! Sparse recovery from Bernoulli measurements.
//!
//! Solvers work with the column-normalised operator `A = Φ/√M`, so a
//! measurement `y = Φx` is solved as `A x = y/√M`.

mod amp;
mod iht;

use std::collections::BTreeMap;

use crate::cs::PhiMatrix;
use crate::error::{ensure, Result};

pub use amp::{amp_recover, Amp};
pub use iht::{iht_recover, Niht};

const MODULE: &str = "sparse_recovery";

/// Dense `A = Φ/√M`, row-major.
#[derive(Debug, Clone)]
pub struct Operator {
    m: usize,
    n: usize,
    scale: f64,
    a: Vec<f64>,
}

impl Operator {
    pub fn from_phi(phi: &PhiMatrix) -> Self {
        let scale = (phi.rows() as f64).sqrt();
        Operator {
            m: phi.rows(),
            n: phi.cols(),
            scale,
            a: phi.dense(1.0 / scale),
        }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// `√M`, the factor between `Φ` and `A`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.a.chunks_exact(self.n)) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn adjoint(&self, z: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (&zi, row) in z.iter().zip(self.a.chunks_exact(self.n)) {
            if zi != 0.0 {
                for (o, a) in out.iter_mut().zip(row) {
                    *o += a * zi;
                }
            }
        }
    }
}

/// How AMP picks its soft threshold each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// `θ = τ · median(|z|) / 0.6745`.
    Median { tau: f64 },
    /// `θ = τ · ‖z‖ / √M`.
    ResidualNorm { tau: f64 },
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule::Median { tau: 1.3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub solver: String,
    pub max_iterations: usize,
    /// Stop when `‖y - Ax‖ / ‖y‖` falls to this.
    pub tolerance: f64,
    pub threshold: ThresholdRule,
    /// Sparsity for hard-thresholding solvers; `None` means `M/4`.
    pub sparsity: Option<usize>,
    /// Iterations without improvement before giving up.
    pub stall_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            solver: "amp".into(),
            max_iterations: 500,
            tolerance: 1e-7,
            threshold: ThresholdRule::default(),
            sparsity: None,
            stall_iterations: 60,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.max_iterations >= 1, MODULE, "max_iterations must be at least 1");
        ensure!(
            self.tolerance.is_finite() && self.tolerance >= 0.0,
            MODULE,
            "tolerance must be a non-negative number, got {}",
            self.tolerance
        );
        let tau = match self.threshold {
            ThresholdRule::Median { tau } | ThresholdRule::ResidualNorm { tau } => tau,
        };
        ensure!(tau.is_finite() && tau > 0.0, MODULE, "threshold multiplier must be positive, got {tau}");
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub x: Vec<f64>,
    /// Relative residual `‖y - Φx‖ / ‖y‖` of the returned estimate.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Recovery {
    fn zero(n: usize) -> Self {
        Recovery {
            x: vec![0.0; n],
            residual: 0.0,
            iterations: 1,
            converged: true,
        }
    }
}

pub trait SparseSolver: Send + Sync {
    fn name(&self) -> &'static str;
    /// Recover `x` from `y = Φx`.
    fn recover(&self, y: &[f64], op: &Operator, cfg: &SolverConfig) -> Result<Recovery>;
}

pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Box<dyn SparseSolver>>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = SolverRegistry {
            solvers: BTreeMap::new(),
        };
        r.register(Box::new(Amp));
        r.register(Box::new(Niht));
        r
    }
}

impl SolverRegistry {
    pub fn register(&mut self, solver: Box<dyn SparseSolver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn get(&self, name: &str) -> Result<&dyn SparseSolver> {
        self.solvers.get(name).map(|s| s.as_ref()).ok_or_else(|| {
            crate::Error::validation(
                MODULE,
                format!("unknown solver '{name}', expected one of {:?}", self.names()),
            )
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }
}

fn check_dims(y: &[f64], op: &Operator) -> Result<()> {
    ensure!(
        y.len() == op.rows(),
        MODULE,
        "measurement length {} does not match M={}",
        y.len(),
        op.rows()
    );
    ensure!(y.iter().all(|v| v.is_finite()), MODULE, "measurements contain non-finite values");
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Residual `b - A x` into `r`, returning its norm.
fn residual(op: &Operator, b: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    norm(r)
}

fn median_abs(v: &[f64]) -> f64 {
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let mid = a.len() / 2;
    let (_, m, _) = a.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}
