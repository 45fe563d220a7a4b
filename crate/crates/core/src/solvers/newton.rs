use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{CriticalPoint, PointKind, SolverConfig};
use crate::error::Result;
use crate::functional::{check_point, gradient_vec, jacobian, residual_vec, ProblemParams};
use crate::operators::{BiharmonicForm, VertexFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewtonStatus {
    /// Residual reached `min(tol, 1e-12)`.
    Converged,
    /// No damped step decreased the residual (rounding floor).
    Stagnated,
    /// Every decreasing step would leave the trust region.
    TrustLimited,
    /// Singular Jacobian; the input is returned unchanged.
    Singular,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub point: CriticalPoint,
    pub status: NewtonStatus,
}

/// Damped Newton on the first variation, with the residual `‖r‖_{H'}` as
/// merit function. Iterates never leave the `H`-ball of radius ten times the
/// initial residual around the starting point.
pub fn newton_refine(
    form: &BiharmonicForm,
    params: &ProblemParams,
    u: &VertexFunction,
    kind: PointKind,
    cfg: &SolverConfig,
) -> Result<Refinement> {
    check_point(form, params, u.as_vector())?;
    let target = cfg.tol.min(1e-12);
    let start = u.as_vector().clone();
    let mut x = start.clone();
    let mut res = residual_vec(form, params, &x);
    let radius = 10.0 * res;
    let mut iterations = 0;
    let mut status = NewtonStatus::Converged;

    while res > target {
        if iterations == cfg.newton_max {
            status = NewtonStatus::MaxIterations;
            break;
        }
        let r = gradient_vec(form, params, &x);
        let step = match jacobian(form, params, &x).lu().solve(&r) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => {
                return Ok(Refinement {
                    point: CriticalPoint::evaluate(form, params, start, kind, 0),
                    status: NewtonStatus::Singular,
                })
            }
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        let mut trust_blocked = false;
        for _ in 0..40 {
            let trial: DVector<f64> = &x - &step * alpha;
            if form.h_norm(&(&trial - &start)) > radius {
                trust_blocked = true;
                alpha *= 0.5;
                continue;
            }
            let trial_res = residual_vec(form, params, &trial);
            if trial_res < res {
                x = trial;
                res = trial_res;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;
        if !accepted {
            status = if trust_blocked {
                NewtonStatus::TrustLimited
            } else {
                NewtonStatus::Stagnated
            };
            break;
        }
    }
    Ok(Refinement {
        point: CriticalPoint::evaluate(form, params, x, kind, iterations),
        status,
    })
}
