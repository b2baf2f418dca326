//! Equality-constrained SQP: Newton steps on the KKT system with inertia
//! correction, an `l1` merit function with Armijo backtracking, and a
//! second-order correction against the Maratos effect.

use serde::{Deserialize, Serialize};

pub(crate) trait KktFactor {
    /// Solves `[[H, J^T], [J, 0]] [d; y] = [rx; rc]`.
    fn solve(&self, rx: &[f64], rc: &[f64]) -> (Vec<f64>, Vec<f64>);
}

pub(crate) trait Nlp {
    type Factor: KktFactor;
    fn n_constraints(&self) -> usize;
    fn objective(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn constraints(&self, x: &[f64]) -> Vec<f64>;
    /// `J(x)^T mu`.
    fn jacobian_transpose_times(&self, x: &[f64], mu: &[f64]) -> Vec<f64>;
    /// Factorizes the KKT matrix with `H = hess_x L(x, mu) + tau I` where
    /// `L = f - mu^T c`. Returns the factor and the number of negative
    /// eigenvalues, or `None` if the matrix is numerically singular.
    fn factorize(&self, x: &[f64], mu: &[f64], tau: f64) -> Option<(Self::Factor, usize)>;
    /// Scale for the first nonzero regularization.
    fn hessian_scale(&self, x: &[f64]) -> f64;
    /// Largest admissible step fraction along `d` (keeps e.g. lengths positive).
    fn max_step(&self, _x: &[f64], _d: &[f64]) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SqpOptions {
    pub max_iters: usize,
    pub max_backtracks: usize,
    pub penalty_growth: f64,
    /// Converged once a full step is shorter than this (infinity norm).
    pub step_tol: f64,
    /// ... and the constraint violation is below this.
    pub feas_tol: f64,
}

/// One SQP iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelemetryRecord {
    pub start: usize,
    pub iteration: usize,
    pub merit: f64,
    pub penalty: f64,
    pub objective: f64,
    pub violation: f64,
    pub stationarity: f64,
    pub step: f64,
    pub regularization: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SqpOutcome {
    pub x: Vec<f64>,
    pub converged: bool,
    pub telemetry: Vec<TelemetryRecord>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(x, d)| x + a * d).collect()
}

const ARMIJO: f64 = 1e-4;
const MAX_REGULARIZATIONS: usize = 60;

pub(crate) fn solve<P: Nlp>(problem: &P, x0: Vec<f64>, opts: &SqpOptions, start: usize) -> SqpOutcome {
    let m = problem.n_constraints();
    let mut x = x0;
    let mut mu = vec![0.0; m];
    let mut nu: f64 = 1.0;
    let mut tau_last: f64 = 0.0;
    let mut telemetry = Vec::new();
    let mut converged = false;

    for it in 0..opts.max_iters {
        let f = problem.objective(&x);
        let g = problem.gradient(&x);
        let c = problem.constraints(&x);
        let viol = inf_norm(&c);
        let jt_mu = problem.jacobian_transpose_times(&x, &mu);
        let stationarity = inf_norm(&g.iter().zip(&jt_mu).map(|(a, b)| a - b).collect::<Vec<_>>());

        // Inertia-corrected factorization.
        let scale = problem.hessian_scale(&x).max(1e-300);
        let mut tau = 0.0;
        let mut factor = None;
        for attempt in 0..MAX_REGULARIZATIONS {
            if let Some((fac, neg)) = problem.factorize(&x, &mu, tau) {
                if neg == m {
                    factor = Some(fac);
                    break;
                }
            }
            tau = if attempt == 0 {
                if tau_last > 0.0 {
                    (tau_last / 3.0).max(1e-12 * scale)
                } else {
                    1e-8 * scale
                }
            } else {
                10.0 * tau
            };
        }
        let Some(factor) = factor else {
            break;
        };
        tau_last = tau;

        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let neg_c: Vec<f64> = c.iter().map(|v| -v).collect();
        let (d, y) = factor.solve(&neg_g, &neg_c);
        if d.iter().chain(&y).any(|v| !v.is_finite()) {
            break;
        }
        let mu_new: Vec<f64> = y.iter().map(|v| -v).collect();
        let step = inf_norm(&d);

        let need = 1.1 * inf_norm(&mu_new) + 1e-8;
        if nu < need {
            nu = need.max(nu * opts.penalty_growth);
        }
        let merit = |x: &[f64]| problem.objective(x) + nu * l1(&problem.constraints(x));
        let phi0 = f + nu * l1(&c);
        telemetry.push(TelemetryRecord {
            start,
            iteration: it,
            merit: phi0,
            penalty: nu,
            objective: f,
            violation: viol,
            stationarity,
            step,
            regularization: tau,
        });

        if step <= opts.step_tol && viol <= opts.feas_tol {
            converged = true;
            x = axpy(&x, 1.0, &d);
            break;
        }

        let slope = g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() - nu * l1(&c);
        let alpha_max = problem.max_step(&x, &d).min(1.0);
        let mut alpha = alpha_max;
        let mut accepted = None;
        for bt in 0..opts.max_backtracks.max(1) {
            let trial = axpy(&x, alpha, &d);
            let phi = merit(&trial);
            // Allow roundoff-level increases once the step is tiny.
            let slack = 1e-14 * phi0.abs().max(1.0);
            if phi.is_finite() && phi <= phi0 + ARMIJO * alpha * slope.min(0.0) + slack {
                accepted = Some((trial, alpha));
                break;
            }
            if bt == 0 && alpha == 1.0 {
                // Second-order correction: restore the linearized constraints at x + d.
                let c_trial = problem.constraints(&trial);
                let neg_ct: Vec<f64> = c_trial.iter().map(|v| -v).collect();
                let (dc, _) = factor.solve(&vec![0.0; x.len()], &neg_ct);
                let soc = axpy(&trial, 1.0, &dc);
                let phi_soc = merit(&soc);
                if phi_soc.is_finite() && phi_soc <= phi0 + ARMIJO * slope.min(0.0) + slack {
                    accepted = Some((soc, 1.0));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((x_next, a)) = accepted else {
            break;
        };
        let _ = a;
        mu = mu_new;
        x = x_next;
    }

    SqpOutcome {
        x,
        converged,
        telemetry,
    }
}
