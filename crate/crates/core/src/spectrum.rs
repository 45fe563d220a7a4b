//! Spectral and embedding constants of a biharmonic form.
//!
//! Everything the two-solution threshold needs: `λ₁(Ω)`, the gap fraction
//! `τ`, bounds on the embedding constant `C` in `‖u‖_{L^q} ≤ C‖u‖_H`, the dual
//! norm `‖f‖_{H'}` and the forcing threshold `ε̂₁`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::operators::{check_len, BiharmonicForm, VertexFunction};

/// Smallest generalized eigenpair of `B u = λ M_int u`.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalized so that `∫_Ω u² dμ = 1`, with nonnegative coordinate sum.
    pub vector: DVector<f64>,
}

/// `λ₁(Ω) = min uᵀBu / ∫_Ω u² dμ` over nonzero interior functions.
pub fn lambda1(form: &BiharmonicForm) -> Result<f64> {
    lambda1_pair(form).map(|e| e.value)
}

/// Symmetric reduction `S = M^{-1/2} B M^{-1/2}`, dense eigensolve, then a
/// few inverse-iteration steps to polish the Rayleigh quotient.
pub fn lambda1_pair(form: &BiharmonicForm) -> Result<Eigenpair> {
    let n = form.n();
    let scale: DVector<f64> = form.mu_interior().map(|m| 1.0 / m.sqrt());
    let b = form.matrix();
    let s = DMatrix::from_fn(n, n, |i, j| b[(i, j)] * (scale[i] * scale[j]));
    let eig = SymmetricEigen::new(s);
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty domain");
    let mut u = eig.eigenvectors.column(k).component_mul(&scale);
    for _ in 0..3 {
        u = form.solve(&form.mass(&u));
        let norm = form.l2_inner(&u, &u).sqrt();
        u /= norm;
    }
    let value = form.quadratic(&u) / form.l2_inner(&u, &u);
    if !(value > 0.0) {
        return Err(Error::NotPositiveDefinite("λ₁ is not positive"));
    }
    if u.sum() < 0.0 {
        u = -u;
    }
    Ok(Eigenpair { value, vector: u })
}

/// `‖f‖_{H'} = sup_{u≠0} ∫_Ω f u dμ / ‖u‖_H = √((M f)ᵀ B⁻¹ (M f))`.
pub fn dual_norm_f(form: &BiharmonicForm, f: &VertexFunction) -> Result<f64> {
    check_len(form.n(), f.len())?;
    Ok(form.dual_norm(&form.mass(f.as_vector())))
}

/// `‖u‖_{L^q(Ω)} = (Σ μ |u|^q)^{1/q}`.
pub fn lq_norm(form: &BiharmonicForm, u: &DVector<f64>, q: f64) -> f64 {
    form.mu_interior()
        .iter()
        .zip(u.iter())
        .map(|(m, v)| m * v.abs().powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

/// Two-sided estimate of the embedding constant at exponent `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingBounds {
    /// Best ratio `‖u‖_q / ‖u‖_H` found by multi-start ascent.
    pub lower: f64,
    /// Certified: `‖u‖_q ≤ upper · ‖u‖_H` for every `u`.
    pub upper: f64,
}

/// Random starts used by [`embedding_constant`], on top of the structured
/// starts (eigenfunction and sup-norm extremals).
pub const EMBEDDING_STARTS: usize = 32;

/// Sup-norm embedding constant `max_x √(e_xᵀ B⁻¹ e_x)` and the maximizing
/// interior position.
pub fn sup_embedding_constant(form: &BiharmonicForm) -> (f64, usize) {
    let inv = form.inverse();
    let (k, v) = inv
        .diagonal()
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty domain");
    (v.max(0.0).sqrt(), k)
}

/// Bounds on the best constant `C_q` with `‖u‖_{L^q} ≤ C_q ‖u‖_H`.
///
/// The upper bound is `1/√λ₁` for `q = 2` and `C_∞ · μ(Ω)^{1/q}` otherwise.
/// The lower bound maximizes `‖u‖_q^q` on the unit `H`-sphere by projected
/// ascent `u ← B⁻¹∇φ(u) / ‖B⁻¹∇φ(u)‖_H`, which is monotone because the
/// objective is convex for `q ≥ 1`.
pub fn embedding_constant(
    form: &BiharmonicForm,
    q: f64,
    seed: u64,
    exec: Execution,
) -> Result<EmbeddingBounds> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidParams(format!(
            "embedding exponent q = {q} must be ≥ 1"
        )));
    }
    let n = form.n();
    let eig = lambda1_pair(form)?;
    let (c_inf, argmax) = sup_embedding_constant(form);
    let upper = if q == 2.0 {
        1.0 / eig.value.sqrt()
    } else {
        c_inf * form.mu_interior().sum().powf(1.0 / q)
    };

    let mut starts: Vec<DVector<f64>> = vec![
        eig.vector.clone(),
        form.solve(&DVector::from_fn(
            n,
            |i, _| if i == argmax { 1.0 } else { 0.0 },
        )),
    ];
    starts.extend((0..EMBEDDING_STARTS).map(|s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
        DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng))
    }));

    let ratios = exec.map_slice(&starts, |u0| ascend_lq(form, u0, q));
    let lower = ratios.into_iter().fold(0.0, f64::max).min(upper);
    Ok(EmbeddingBounds { lower, upper })
}

fn ascend_lq(form: &BiharmonicForm, start: &DVector<f64>, q: f64) -> f64 {
    let normalize = |v: DVector<f64>| {
        let h = form.h_norm(&v);
        if h > 0.0 {
            Some(v / h)
        } else {
            None
        }
    };
    let Some(mut u) = normalize(start.clone()) else {
        return 0.0;
    };
    let mut best = lq_norm(form, &u, q);
    for _ in 0..1000 {
        let grad = DVector::from_fn(form.n(), |i, _| {
            let v = u[i];
            form.mu_interior()[i] * v.abs().powf(q - 1.0) * v.signum()
        });
        let Some(next) = normalize(form.solve(&grad)) else {
            break;
        };
        let value = lq_norm(form, &next, q);
        if value <= best * (1.0 + 1e-15) {
            best = best.max(value);
            break;
        }
        best = value;
        u = next;
    }
    best
}

/// Inputs of the forcing threshold, with `g(ε)` as a method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub tau: f64,
    pub p: f64,
    /// Constant `K` multiplying `‖u‖_H^p` in the lower energy estimate;
    /// `K = C_p^p` for the certified embedding bound `C_p`.
    pub chain_constant: f64,
    pub f_dual_norm: f64,
}

impl Threshold {
    /// `g(ε) = (τ/2)√ε − 2^{p−2} K ε^{(p−1)/2} − ε‖f‖_{H'} − (τ/4)√ε`.
    pub fn margin(&self, eps: f64) -> f64 {
        let root = eps.sqrt();
        0.5 * self.tau * root
            - 2f64.powf(self.p - 2.0) * self.chain_constant * eps.powf(0.5 * (self.p - 1.0))
            - eps * self.f_dual_norm
            - 0.25 * self.tau * root
    }

    /// `g(ε)/√ε`, strictly decreasing in `ε` for `p > 2`.
    pub fn scaled_margin(&self, eps: f64) -> f64 {
        0.25 * self.tau
            - 2f64.powf(self.p - 2.0) * self.chain_constant * eps.powf(0.5 * (self.p - 2.0))
            - self.f_dual_norm * eps.sqrt()
    }
}

/// Largest `ε̂₁` with `g(ε) ≥ 0` on `(0, ε̂₁]`, by bisection on the sign
/// change of `g(ε)/√ε` to relative width `1e-10`. The returned value is the
/// left end of the final bracket, so `g(ε̂₁) ≥ 0`.
pub fn epsilon1_hat(t: &Threshold) -> Result<f64> {
    if !(t.p > 2.0) {
        return Err(Error::InvalidParams(format!("p = {} must exceed 2", t.p)));
    }
    if !(t.tau > 0.0) {
        return Err(Error::InvalidParams(format!(
            "τ = {} is not positive (λ ≥ λ₁)",
            t.tau
        )));
    }
    let mut lo = 1e-16;
    while t.scaled_margin(lo) <= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::InvalidParams("forcing threshold underflows".into()));
        }
    }
    let mut hi = 1.0;
    while t.scaled_margin(hi) >= 0.0 {
        hi *= 2.0;
    }
    if hi > 1.0 {
        lo = lo.max(0.5 * hi);
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if t.scaled_margin(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// All constants used by the threshold and by certification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub lambda: f64,
    pub lambda1: f64,
    pub tau: f64,
    pub p: f64,
    pub embedding: EmbeddingBounds,
    pub chain_constant: f64,
    pub f_dual_norm: f64,
    /// `None` when `τ ≤ 0`.
    pub eps1_hat: Option<f64>,
}

impl ConstantsReport {
    /// `r_ε = √ε`
    pub fn r_eps(eps: f64) -> f64 {
        eps.sqrt()
    }

    /// `δ_ε = τε/4`
    pub fn delta_eps(&self, eps: f64) -> f64 {
        0.25 * self.tau * eps
    }

    pub fn threshold(&self) -> Threshold {
        Threshold {
            tau: self.tau,
            p: self.p,
            chain_constant: self.chain_constant,
            f_dual_norm: self.f_dual_norm,
        }
    }
}

/// Computes every constant for `(λ, p, f)`. A `λ` outside `(0, λ₁)` still
/// yields a report, with `eps1_hat = None`.
pub fn compute_constants(
    form: &BiharmonicForm,
    lambda: f64,
    p: f64,
    f: &VertexFunction,
    seed: u64,
    exec: Execution,
) -> Result<ConstantsReport> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::InvalidParams(format!("p = {p} must exceed 2")));
    }
    let lambda1 = lambda1(form)?;
    let tau = (lambda1 - lambda) / lambda1;
    let embedding = embedding_constant(form, p, seed, exec)?;
    let chain_constant = embedding.upper.powf(p);
    let f_dual_norm = dual_norm_f(form, f)?;
    let eps1_hat = if tau > 0.0 && lambda > 0.0 {
        Some(epsilon1_hat(&Threshold {
            tau,
            p,
            chain_constant,
            f_dual_norm,
        })?)
    } else {
        None
    };
    Ok(ConstantsReport {
        lambda,
        lambda1,
        tau,
        p,
        embedding,
        chain_constant,
        f_dual_norm,
        eps1_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{p3_domain, p5_domain, star3_domain};
    use crate::operators::assemble_form;
    use approx::assert_relative_eq;

    fn form_of((g, d): (crate::WeightedGraph, crate::Domain)) -> BiharmonicForm {
        assemble_form(&g, &d).unwrap()
    }

    #[test]
    fn lambda1_hand_values() {
        assert_relative_eq!(
            lambda1(&form_of(p3_domain())).unwrap(),
            6.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            lambda1(&form_of(star3_domain())).unwrap(),
            12.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn lambda1_p5_matches_characteristic_polynomial() {
        // B = [[6,-4,1],[-4,6,-4],[1,-4,6]]: by symmetry the eigenvectors split
        // into antisymmetric (1,0,-1) with eigenvalue 5 and symmetric (a,b,a)
        // with (7-x)(6-x) = 32, i.e. x = (13 ± √129)/2.
        let expected = (13.0 - 129f64.sqrt()) / 2.0;
        assert_relative_eq!(
            lambda1(&form_of(p5_domain())).unwrap(),
            expected,
            max_relative = 1e-13
        );
    }

    #[test]
    fn dual_norm_hand_values() {
        let form = form_of(p3_domain());
        let one = VertexFunction::constant(1, 1.0);
        assert_relative_eq!(
            dual_norm_f(&form, &one).unwrap(),
            (1.0f64 / 6.0).sqrt(),
            max_relative = 1e-15
        );
        assert_eq!(dual_norm_f(&form, &VertexFunction::zeros(1)).unwrap(), 0.0);
        let form = form_of(p5_domain());
        let f = VertexFunction::new(vec![0.3, -1.0, 2.0]);
        let a = dual_norm_f(&form, &f).unwrap();
        let b = dual_norm_f(&form, &f.scaled(2.0)).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-14);
    }

    #[test]
    fn embedding_on_single_vertex() {
        let form = form_of(p3_domain());
        let inv = 1.0 / 6f64.sqrt();
        for q in [2.0, 4.0] {
            let e = embedding_constant(&form, q, 0, Execution::Sequential).unwrap();
            assert_relative_eq!(e.lower, inv, max_relative = 1e-14);
            assert_relative_eq!(e.upper, inv, max_relative = 1e-14);
        }
        assert!(embedding_constant(&form, 0.5, 0, Execution::Sequential).is_err());
    }

    #[test]
    fn embedding_is_deterministic_across_modes() {
        let form = form_of(p5_domain());
        let a = embedding_constant(&form, 3.0, 11, Execution::Sequential).unwrap();
        let b = embedding_constant(&form, 3.0, 11, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.lower <= a.upper && a.lower > 0.0);
    }

    #[test]
    fn threshold_rejects_bad_inputs() {
        let t = Threshold {
            tau: 0.5,
            p: 2.0,
            chain_constant: 1.0,
            f_dual_norm: 1.0,
        };
        assert!(epsilon1_hat(&t).is_err());
        let t = Threshold {
            tau: 0.0,
            p: 4.0,
            chain_constant: 1.0,
            f_dual_norm: 1.0,
        };
        assert!(epsilon1_hat(&t).is_err());
    }

    #[test]
    fn threshold_margin_sign() {
        let t = Threshold {
            tau: 0.5,
            p: 4.0,
            chain_constant: 1.0 / 36.0,
            f_dual_norm: (1.0f64 / 6.0).sqrt(),
        };
        let e = epsilon1_hat(&t).unwrap();
        assert!(e > 0.0);
        assert!(t.margin(e) >= 0.0);
        assert!(t.margin(e * 1.01) < 0.0);
        let doubled = Threshold {
            f_dual_norm: 2.0 * t.f_dual_norm,
            ..t
        };
        assert!(epsilon1_hat(&doubled).unwrap() < e);
    }
}
