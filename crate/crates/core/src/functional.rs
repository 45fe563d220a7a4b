//! The energy `J_ε`, its first variation, and the weak-solution checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operators::{check_len, BiharmonicForm, VertexFunction};

/// Problem data `(λ, p, ε, f)`, validated against `λ₁(Ω)` of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    lambda: f64,
    p: f64,
    eps: f64,
    f: VertexFunction,
    lambda1: f64,
}

impl ProblemParams {
    pub fn new(lambda: f64, p: f64, eps: f64, f: VertexFunction, lambda1: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < lambda1) {
            return Err(Error::InvalidParams(format!(
                "λ = {lambda} must lie in (0, λ₁) = (0, {lambda1})"
            )));
        }
        if !(p > 2.0) || !p.is_finite() {
            return Err(Error::InvalidParams(format!("p = {p} must exceed 2")));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParams(format!(
                "ε = {eps} must be finite and ≥ 0"
            )));
        }
        if !f.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(ProblemParams {
            lambda,
            p,
            eps,
            f,
            lambda1,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn f(&self) -> &VertexFunction {
        &self.f
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// `τ = (λ₁ − λ)/λ₁ ∈ (0, 1)`
    pub fn tau(&self) -> f64 {
        (self.lambda1 - self.lambda) / self.lambda1
    }

    /// `r_ε = √ε`
    pub fn r_eps(&self) -> f64 {
        self.eps.sqrt()
    }

    /// `δ_ε = τε/4`
    pub fn delta_eps(&self) -> f64 {
        0.25 * self.tau() * self.eps
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        ProblemParams::new(self.lambda, self.p, eps, self.f.clone(), self.lambda1)
    }
}

/// `|u|^{p−2} u`, continuous at 0.
fn power_term(v: f64, p: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.abs().powf(p - 2.0) * v
    }
}

pub(crate) fn check_point(
    form: &BiharmonicForm,
    params: &ProblemParams,
    u: &DVector<f64>,
) -> Result<()> {
    check_len(form.n(), u.len())?;
    check_len(form.n(), params.f.len())?;
    if u.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `∫_Ω |u|^p dμ`
pub fn lp_integral(form: &BiharmonicForm, u: &DVector<f64>, p: f64) -> f64 {
    form.mu_interior()
        .iter()
        .zip(u.iter())
        .map(|(m, v)| m * v.abs().powf(p))
        .sum()
}

pub(crate) fn energy_vec(form: &BiharmonicForm, params: &ProblemParams, u: &DVector<f64>) -> f64 {
    let (lambda, p, eps) = (params.lambda, params.p, params.eps);
    0.5 * form.quadratic(u)
        - 0.5 * lambda * form.l2_inner(u, u)
        - lp_integral(form, u, p) / p
        - eps * form.l2_inner(params.f.as_vector(), u)
}

pub(crate) fn gradient_vec(
    form: &BiharmonicForm,
    params: &ProblemParams,
    u: &DVector<f64>,
) -> DVector<f64> {
    let mu = form.mu_interior();
    let f = params.f.as_vector();
    let mut r = form.apply(u);
    for i in 0..u.len() {
        r[i] -= mu[i] * (params.lambda * u[i] + power_term(u[i], params.p) + params.eps * f[i]);
    }
    r
}

/// `J_ε(u) = ½uᵀBu − (λ/2)∫u² − (1/p)∫|u|^p − ε∫fu`.
pub fn energy(form: &BiharmonicForm, params: &ProblemParams, u: &VertexFunction) -> Result<f64> {
    check_point(form, params, u.as_vector())?;
    Ok(energy_vec(form, params, u.as_vector()))
}

/// First variation `r = Bu − λM u − M(|u|^{p−2}u) − εM f`; `r_x` is the
/// derivative of the energy in the direction of the indicator of `x`.
pub fn gradient(
    form: &BiharmonicForm,
    params: &ProblemParams,
    u: &VertexFunction,
) -> Result<VertexFunction> {
    check_point(form, params, u.as_vector())?;
    Ok(gradient_vec(form, params, u.as_vector()).into())
}

/// Jacobian of the first variation:
/// `B − λM − (p−1) M diag(|u|^{p−2})`.
pub fn jacobian(form: &BiharmonicForm, params: &ProblemParams, u: &DVector<f64>) -> DMatrix<f64> {
    let mut jac = form.matrix().clone();
    let mu = form.mu_interior();
    for i in 0..u.len() {
        let curvature = if u[i] == 0.0 {
            0.0
        } else {
            (params.p - 1.0) * u[i].abs().powf(params.p - 2.0)
        };
        jac[(i, i)] -= mu[i] * (params.lambda + curvature);
    }
    jac
}

/// `J_f(u) = ½uᵀBu − (λ/2)∫u² − ∫fu` (the auxiliary linear energy).
pub fn energy_linear(
    form: &BiharmonicForm,
    lambda: f64,
    f: &VertexFunction,
    u: &VertexFunction,
) -> Result<f64> {
    check_len(form.n(), u.len())?;
    check_len(form.n(), f.len())?;
    let u = u.as_vector();
    Ok(0.5 * form.quadratic(u)
        - 0.5 * lambda * form.l2_inner(u, u)
        - form.l2_inner(f.as_vector(), u))
}

/// `H'` norm of the first variation, `√(rᵀB⁻¹r)`.
pub fn residual_norm(
    form: &BiharmonicForm,
    params: &ProblemParams,
    u: &VertexFunction,
) -> Result<f64> {
    check_point(form, params, u.as_vector())?;
    Ok(form.dual_norm(&gradient_vec(form, params, u.as_vector())))
}

pub(crate) fn residual_vec(form: &BiharmonicForm, params: &ProblemParams, u: &DVector<f64>) -> f64 {
    form.dual_norm(&gradient_vec(form, params, u))
}

/// `|J_ε(u) − ((½ − 1/p)∫|u|^p − (ε/2)∫fu)|`, zero at every critical point.
pub fn critical_point_identity_gap(
    form: &BiharmonicForm,
    params: &ProblemParams,
    u: &VertexFunction,
) -> Result<f64> {
    check_point(form, params, u.as_vector())?;
    let u = u.as_vector();
    let p = params.p;
    let rhs = (0.5 - 1.0 / p) * lp_integral(form, u, p)
        - 0.5 * params.eps * form.l2_inner(params.f.as_vector(), u);
    Ok((energy_vec(form, params, u) - rhs).abs())
}

/// Right-hand side of the a priori estimate at a critical point:
/// `2p J/(p−2) + ((2p−2)ε/(p−2)) ‖f‖_{H'} ‖u‖_H`, to be compared with `τ‖u‖²_H`.
pub fn a_priori_bound(params: &ProblemParams, energy: f64, f_dual_norm: f64, norm_h: f64) -> f64 {
    let p = params.p;
    2.0 * p * energy / (p - 2.0) + (2.0 * p - 2.0) * params.eps / (p - 2.0) * f_dual_norm * norm_h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{p3_domain, p5_domain};
    use crate::operators::assemble_form;
    use approx::assert_relative_eq;

    fn p3() -> BiharmonicForm {
        let (g, d) = p3_domain();
        assemble_form(&g, &d).unwrap()
    }

    fn params(lambda: f64, p: f64, eps: f64, f: f64) -> ProblemParams {
        ProblemParams::new(lambda, p, eps, VertexFunction::constant(1, f), 6.0).unwrap()
    }

    #[test]
    fn param_validation() {
        let f = VertexFunction::constant(1, 1.0);
        assert!(ProblemParams::new(6.0, 4.0, 0.1, f.clone(), 6.0).is_err());
        assert!(ProblemParams::new(0.0, 4.0, 0.1, f.clone(), 6.0).is_err());
        assert!(ProblemParams::new(1.0, 2.0, 0.1, f.clone(), 6.0).is_err());
        assert!(ProblemParams::new(1.0, 4.0, -0.1, f.clone(), 6.0).is_err());
        assert!(ProblemParams::new(1.0, 4.0, 0.0, f, 6.0).is_ok());
        let p = params(3.0, 4.0, 0.1, 1.0);
        assert_eq!(p.tau(), 0.5);
        assert_eq!(p.delta_eps(), 0.0125);
    }

    #[test]
    fn energy_hand_values() {
        let form = p3();
        let prm = params(1.0, 4.0, 0.1, 1.0);
        assert_eq!(energy(&form, &prm, &VertexFunction::zeros(1)).unwrap(), 0.0);
        let u = VertexFunction::constant(1, 1.0);
        assert_relative_eq!(energy(&form, &prm, &u).unwrap(), 2.15, max_relative = 1e-15);
        assert_relative_eq!(
            gradient(&form, &prm, &u).unwrap().values()[0],
            3.9,
            max_relative = 1e-15
        );

        let even = params(1.0, 3.5, 0.0, 1.0);
        let v = VertexFunction::constant(1, 0.7);
        assert_eq!(
            energy(&form, &even, &v).unwrap(),
            energy(&form, &even, &v.scaled(-1.0)).unwrap()
        );
        let zero_grad = gradient(&form, &even, &VertexFunction::zeros(1)).unwrap();
        assert!(zero_grad.is_zero());
    }

    #[test]
    fn energy_rejects_bad_input() {
        let form = p3();
        let prm = params(1.0, 4.0, 0.1, 1.0);
        assert!(matches!(
            energy(&form, &prm, &VertexFunction::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            gradient(&form, &prm, &VertexFunction::new(vec![f64::NAN])),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn linear_energy_scalar_minimum() {
        let form = p3();
        let f = VertexFunction::constant(1, 1.0);
        assert_eq!(
            energy_linear(&form, 1.0, &f, &VertexFunction::zeros(1)).unwrap(),
            0.0
        );
        let at_min = energy_linear(&form, 1.0, &f, &VertexFunction::constant(1, 0.2)).unwrap();
        assert_relative_eq!(at_min, -0.1, max_relative = 1e-15);
        for t in [-1.0, 0.0, 0.1, 0.19, 0.21, 3.0] {
            let v = energy_linear(&form, 1.0, &f, &VertexFunction::constant(1, t)).unwrap();
            assert_relative_eq!(v, 2.5 * t * t - t, max_relative = 1e-14, epsilon = 1e-15);
            assert!(v >= at_min);
        }
    }

    #[test]
    fn residual_at_zero() {
        let form = p3();
        let zero = VertexFunction::zeros(1);
        assert_eq!(
            residual_norm(&form, &params(1.0, 4.0, 0.0, 1.0), &zero).unwrap(),
            0.0
        );
        let r = residual_norm(&form, &params(1.0, 4.0, 0.25, 1.0), &zero).unwrap();
        assert_relative_eq!(r, 0.25 / 6f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn identity_gap_vanishes_at_zero() {
        let form = p3();
        let gap = critical_point_identity_gap(
            &form,
            &params(1.0, 4.0, 0.0, 1.0),
            &VertexFunction::zeros(1),
        );
        assert_eq!(gap.unwrap(), 0.0);
        let gap = critical_point_identity_gap(
            &form,
            &params(1.0, 4.0, 0.1, 1.0),
            &VertexFunction::constant(1, 1.0),
        );
        assert!(gap.unwrap() > 0.0);
    }

    #[test]
    fn jacobian_matches_gradient_differences() {
        let (g, d) = p5_domain();
        let form = assemble_form(&g, &d).unwrap();
        let prm = ProblemParams::new(
            0.3,
            3.5,
            0.05,
            VertexFunction::new(vec![1.0, -0.5, 0.2]),
            0.82,
        )
        .unwrap();
        let u = DVector::from_vec(vec![0.4, -0.9, 1.3]);
        let jac = jacobian(&form, &prm, &u);
        let h = 1e-6;
        for j in 0..3 {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let col = (gradient_vec(&form, &prm, &up) - gradient_vec(&form, &prm, &dn)) / (2.0 * h);
            for i in 0..3 {
                assert_relative_eq!(col[i], jac[(i, j)], max_relative = 1e-7, epsilon = 1e-8);
            }
        }
    }
}
