//! Solvers producing the two weak solutions: the small-norm local
//! minimizer `u₀` and the mountain-pass point `u_c`.

mod ball;
mod linear;
mod mountain;
mod newton;

pub use ball::{minimize_in_ball, RADIAL_SCAN};
pub use linear::{descent_start, solve_linear, DescentDirection, DirectionSource};
pub use mountain::{find_endpoint, mountain_pass, straight_path_max, MountainPass};
pub use newton::{newton_refine, NewtonStatus, Refinement};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::functional::{
    a_priori_bound, critical_point_identity_gap, energy_vec, residual_vec, ProblemParams,
};
use crate::operators::{BiharmonicForm, VertexFunction};
use crate::spectrum::{compute_constants, ConstantsReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Residual tolerance in the `H'` norm.
    pub tol: f64,
    pub max_iter: usize,
    pub path_nodes: usize,
    pub descent_step: f64,
    pub armijo_c1: f64,
    pub backtrack: f64,
    pub seed: u64,
    pub newton_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            max_iter: 100_000,
            path_nodes: 64,
            descent_step: 1.0,
            armijo_c1: 1e-4,
            backtrack: 0.5,
            seed: 0,
            newton_max: 50,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tol = {} must be positive",
                self.tol
            )));
        }
        if self.path_nodes < 8 {
            return Err(Error::InvalidParams(format!(
                "path_nodes = {} must be at least 8",
                self.path_nodes
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParams("max_iter must be at least 1".into()));
        }
        if !(self.descent_step > 0.0) || !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidParams(
                "invalid line-search parameters".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    LocalMin,
    MountainPass,
    LinearAux,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub u: VertexFunction,
    pub energy: f64,
    pub norm_h: f64,
    /// `H'` norm of the first variation.
    pub residual: f64,
    pub kind: PointKind,
    pub iterations: usize,
}

impl CriticalPoint {
    pub(crate) fn evaluate(
        form: &BiharmonicForm,
        params: &ProblemParams,
        u: DVector<f64>,
        kind: PointKind,
        iterations: usize,
    ) -> Self {
        CriticalPoint {
            energy: energy_vec(form, params, &u),
            norm_h: form.h_norm(&u),
            residual: residual_vec(form, params, &u),
            u: u.into(),
            kind,
            iterations,
        }
    }

    pub fn is_certified(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// Conjunction of the post-conditions of the two-solution pipeline,
/// recomputed from the raw solution vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// `0 < ε ≤ ε̂₁` and `f ≠ 0`.
    pub in_regime: bool,
    pub local_min: bool,
    pub mountain_pass: bool,
    /// `J(u_c) − J(u₀) > δ_ε`.
    pub distinct: bool,
    pub certified: bool,
    /// `ε = 0`: `u₀ = 0` is the trivial solution.
    pub trivial_local_min: bool,
}

/// Per-solution checks, shared by the pipeline and by report verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointChecks {
    pub energy: f64,
    pub norm_h: f64,
    pub residual: f64,
    pub identity_gap: f64,
    pub a_priori_lhs: f64,
    pub a_priori_rhs: f64,
    pub critical: bool,
    pub identity_ok: bool,
    pub a_priori_ok: bool,
}

impl PointChecks {
    pub fn compute(
        form: &BiharmonicForm,
        params: &ProblemParams,
        f_dual_norm: f64,
        u: &VertexFunction,
        tol: f64,
    ) -> Result<Self> {
        let v = u.as_vector();
        let energy = energy_vec(form, params, v);
        let norm_h = form.h_norm(v);
        let residual = residual_vec(form, params, v);
        let identity_gap = critical_point_identity_gap(form, params, u)?;
        let a_priori_lhs = params.tau() * norm_h * norm_h;
        let a_priori_rhs = a_priori_bound(params, energy, f_dual_norm, norm_h);
        let slack = tol * (1.0 + norm_h) * (1.0 + norm_h);
        Ok(PointChecks {
            energy,
            norm_h,
            residual,
            identity_gap,
            a_priori_lhs,
            a_priori_rhs,
            critical: residual <= tol,
            identity_ok: identity_gap <= tol * (1.0 + energy.abs()),
            a_priori_ok: a_priori_lhs <= a_priori_rhs + slack,
        })
    }

    fn valid(&self) -> bool {
        self.critical && self.identity_ok && self.a_priori_ok
    }
}

pub fn in_regime(params: &ProblemParams, constants: &ConstantsReport) -> bool {
    params.eps() > 0.0
        && !params.f().is_zero()
        && constants.eps1_hat.is_some_and(|e1| params.eps() <= e1)
}

/// Recomputes every certificate flag from `u₀` and `u_c`.
pub fn certify(
    form: &BiharmonicForm,
    params: &ProblemParams,
    constants: &ConstantsReport,
    u0: &VertexFunction,
    uc: &VertexFunction,
    tol: f64,
) -> Result<(Certificate, PointChecks, PointChecks)> {
    let c0 = PointChecks::compute(form, params, constants.f_dual_norm, u0, tol)?;
    let cc = PointChecks::compute(form, params, constants.f_dual_norm, uc, tol)?;
    let delta = params.delta_eps();
    let local_min = c0.valid() && c0.energy < 0.0 && c0.norm_h < params.r_eps();
    let mountain_pass = cc.valid() && cc.energy > 0.0 && cc.energy >= delta;
    let distinct = cc.energy - c0.energy > delta;
    let in_regime = in_regime(params, constants);
    let certificate = Certificate {
        in_regime,
        local_min,
        mountain_pass,
        distinct,
        certified: in_regime && local_min && mountain_pass && distinct,
        trivial_local_min: params.eps() == 0.0 && u0.is_zero(),
    };
    Ok((certificate, c0, cc))
}

#[derive(Debug, Clone)]
pub struct TwoSolutions {
    pub local_min: CriticalPoint,
    pub mountain_pass: CriticalPoint,
    pub constants: ConstantsReport,
    pub direction_source: DirectionSource,
    pub c_est: f64,
    pub straight_path_max: f64,
    pub restarts: usize,
    pub certificate: Certificate,
}

/// Computes the constants, then runs [`two_solutions_with_constants`].
pub fn two_solutions(
    form: &BiharmonicForm,
    params: &ProblemParams,
    cfg: &SolverConfig,
    exec: Execution,
) -> Result<TwoSolutions> {
    let constants = compute_constants(
        form,
        params.lambda(),
        params.p(),
        params.f(),
        cfg.seed,
        exec,
    )?;
    two_solutions_with_constants(form, params, &constants, cfg)
}

/// `descent_start → minimize_in_ball → find_endpoint → mountain_pass`,
/// each output Newton-polished, followed by certification.
pub fn two_solutions_with_constants(
    form: &BiharmonicForm,
    params: &ProblemParams,
    constants: &ConstantsReport,
    cfg: &SolverConfig,
) -> Result<TwoSolutions> {
    cfg.validate()?;
    let direction = descent_start(form, params)?;
    let local_min = minimize_in_ball(form, params, &direction.u, cfg)?;
    let endpoint = find_endpoint(form, params, &direction.u)?;
    let mp = mountain_pass(form, params, &endpoint, params.delta_eps(), cfg)?;
    let (certificate, _, _) = certify(form, params, constants, &local_min.u, &mp.point.u, cfg.tol)?;
    Ok(TwoSolutions {
        local_min,
        mountain_pass: mp.point,
        constants: constants.clone(),
        direction_source: direction.source,
        c_est: mp.c_est,
        straight_path_max: mp.straight_path_max,
        restarts: mp.restarts,
        certificate,
    })
}
