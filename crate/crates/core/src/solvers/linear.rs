use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};

use super::{CriticalPoint, PointKind};
use crate::error::{Error, Result};
use crate::functional::{energy_linear, ProblemParams};
use crate::operators::{check_len, BiharmonicForm, VertexFunction};
use crate::spectrum::lambda1_pair;

/// Solves `(B − λM) ū = M f`, the weak form of `Δ²u = λu + f`. The
/// solution is the global minimizer of the linear energy `J_f`.
pub fn solve_linear(
    form: &BiharmonicForm,
    lambda: f64,
    f: &VertexFunction,
) -> Result<CriticalPoint> {
    check_len(form.n(), f.len())?;
    let mut a = form.matrix().clone();
    for i in 0..form.n() {
        a[(i, i)] -= lambda * form.mu_interior()[i];
    }
    let chol = Cholesky::new(a.clone()).ok_or_else(|| {
        Error::InvalidParams(format!(
            "λ = {lambda} ≥ λ₁: B − λM is not positive definite"
        ))
    })?;
    let rhs = form.mass(f.as_vector());
    let u = chol.solve(&rhs);
    let residual = form.dual_norm(&(&a * &u - &rhs));
    let u = VertexFunction::from(u);
    Ok(CriticalPoint {
        energy: energy_linear(form, lambda, f, &u)?,
        norm_h: form.h_norm(u.as_vector()),
        u,
        residual,
        kind: PointKind::LinearAux,
        iterations: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSource {
    /// `ū / ‖ū‖_H` from the auxiliary linear problem.
    LinearAux,
    /// `f = 0`: the first eigenfunction is used instead.
    Eigenfunction,
}

#[derive(Debug, Clone)]
pub struct DescentDirection {
    /// Unit `H`-norm direction `u*`.
    pub u: VertexFunction,
    pub source: DirectionSource,
}

/// Direction `u*` along which the energy initially decreases: the
/// normalized auxiliary solution, so `d/dt J_ε(t u*)|₀ = −ε∫f u* dμ < 0`.
pub fn descent_start(form: &BiharmonicForm, params: &ProblemParams) -> Result<DescentDirection> {
    check_len(form.n(), params.f().len())?;
    if params.f().is_zero() {
        let eig = lambda1_pair(form)?;
        let norm = form.h_norm(&eig.vector);
        return Ok(DescentDirection {
            u: (eig.vector / norm).into(),
            source: DirectionSource::Eigenfunction,
        });
    }
    let aux = solve_linear(form, params.lambda(), params.f())?;
    Ok(DescentDirection {
        u: aux.u.scaled(1.0 / aux.norm_h),
        source: DirectionSource::LinearAux,
    })
}
