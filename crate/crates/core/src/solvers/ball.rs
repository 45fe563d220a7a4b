use nalgebra::DVector;

use super::newton::newton_refine;
use super::{CriticalPoint, PointKind, SolverConfig};
use crate::error::{Error, Result};
use crate::functional::{check_point, energy_vec, gradient_vec, ProblemParams};
use crate::operators::{BiharmonicForm, VertexFunction};

/// Number of points in the radial scan `t ↦ J_ε(t u*)` on `(0, r_ε]`.
pub const RADIAL_SCAN: usize = 16;

/// Minimizes the energy on the ball `‖u‖_H ≤ 2r_ε`.
///
/// Starts from the best point of a radial scan along `u*`, runs projected
/// gradient descent in the `H` geometry (step along `−B⁻¹r`, radial
/// projection onto the ball, Armijo backtracking), and polishes the result
/// with Newton when that keeps it inside the ball without raising the
/// energy.
pub fn minimize_in_ball(
    form: &BiharmonicForm,
    params: &ProblemParams,
    direction: &VertexFunction,
    cfg: &SolverConfig,
) -> Result<CriticalPoint> {
    const STAGE: &str = "minimize_in_ball";
    check_point(form, params, direction.as_vector())?;
    if params.eps() == 0.0 {
        return Ok(CriticalPoint::evaluate(
            form,
            params,
            DVector::zeros(form.n()),
            PointKind::LocalMin,
            0,
        ));
    }
    let r_eps = params.r_eps();
    let radius = 2.0 * r_eps;

    let dir = direction.as_vector();
    let (mut u, mut e) = (1..=RADIAL_SCAN)
        .map(|k| {
            let v = dir * (k as f64 * r_eps / RADIAL_SCAN as f64);
            let e = energy_vec(form, params, &v);
            (v, e)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("scan is nonempty");

    let mut step = cfg.descent_step;
    let mut iterations = 0;
    loop {
        let r = gradient_vec(form, params, &u);
        let g = form.solve(&r);
        let res = r.dot(&g).max(0.0).sqrt();
        if res <= cfg.tol {
            break;
        }
        if iterations == cfg.max_iter {
            return Err(Error::solver(
                STAGE,
                format!("residual {res:.3e} above tol after {iterations} iterations"),
            ));
        }
        iterations += 1;

        let mut s = (2.0 * step).min(cfg.descent_step);
        let accepted = loop {
            let mut trial = &u - &g * s;
            let norm = form.h_norm(&trial);
            if norm > radius {
                trial *= radius / norm;
            }
            let te = energy_vec(form, params, &trial);
            if te <= e + cfg.armijo_c1 * r.dot(&(&trial - &u)) {
                break Some((trial, te));
            }
            s *= cfg.backtrack;
            if s < 1e-16 {
                break None;
            }
        };
        match accepted {
            Some((trial, te)) => {
                u = trial;
                e = te;
                step = s;
            }
            None => {
                return Err(Error::solver(
                    STAGE,
                    format!("line search stalled at residual {res:.3e} (constrained minimizer on the ball boundary?)"),
                ))
            }
        }
    }

    let descended = CriticalPoint::evaluate(form, params, u, PointKind::LocalMin, iterations);
    let polished = newton_refine(form, params, &descended.u, PointKind::LocalMin, cfg)?.point;
    let slack = 1e-14 * (1.0 + descended.energy.abs());
    if polished.residual <= descended.residual
        && polished.norm_h <= radius
        && polished.energy <= descended.energy + slack
    {
        Ok(CriticalPoint {
            iterations: iterations + polished.iterations,
            ..polished
        })
    } else {
        Ok(descended)
    }
}
