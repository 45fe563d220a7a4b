//! Discrete calculus on a domain: the μ-Laplacian, the gradient form,
//! integrals, Sobolev-type norms and the assembled biharmonic form.
//!
//! Functions are stored on the interior `Ω` only and are extended by zero to
//! the rest of the graph (Dirichlet condition on `∂Ω`, zero outside
//! `Ω ∪ ∂Ω`).

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::graph::{Domain, WeightedGraph};

/// Real values on the interior, indexed by the domain's interior positions.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction(DVector<f64>);

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Self {
        VertexFunction(DVector::from_vec(values))
    }

    pub fn zeros(n: usize) -> Self {
        VertexFunction(DVector::zeros(n))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        VertexFunction(DVector::from_element(n, c))
    }

    /// Indicator of the interior vertex at position `i`.
    pub fn indicator(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        VertexFunction(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, t: f64) -> Self {
        VertexFunction(&self.0 * t)
    }

    /// Value at a graph vertex under the zero extension.
    fn extended(&self, d: &Domain, graph_index: usize) -> f64 {
        d.interior_index(graph_index).map_or(0.0, |i| self.0[i])
    }
}

impl From<DVector<f64>> for VertexFunction {
    fn from(v: DVector<f64>) -> Self {
        VertexFunction(v)
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn effective_vertex(g: &WeightedGraph, d: &Domain, u: &VertexFunction, x: &str) -> Result<usize> {
    check_len(d.n(), u.len())?;
    let i = g
        .index_of(x)
        .ok_or_else(|| Error::UnknownVertex(x.into()))?;
    d.effective_index(i)
        .ok_or_else(|| Error::OutsideDomain(x.into()))?;
    Ok(i)
}

/// `Δu(x) = (1/μ(x)) Σ_{y∼x} ω_xy (u(y) − u(x))` for `x ∈ Ω ∪ ∂Ω`.
pub fn laplacian_at(g: &WeightedGraph, d: &Domain, u: &VertexFunction, x: &str) -> Result<f64> {
    let i = effective_vertex(g, d, u, x)?;
    let ux = u.extended(d, i);
    let sum: f64 = g
        .neighbors(i)
        .iter()
        .map(|&(j, w)| w * (u.extended(d, j) - ux))
        .sum();
    Ok(sum / g.measure(i))
}

/// `Γ(u, v)(x) = (1/(2μ(x))) Σ_{y∼x} ω_xy (u(y) − u(x))(v(y) − v(x))`.
pub fn gradient_form_at(
    g: &WeightedGraph,
    d: &Domain,
    u: &VertexFunction,
    v: &VertexFunction,
    x: &str,
) -> Result<f64> {
    let i = effective_vertex(g, d, u, x)?;
    check_len(d.n(), v.len())?;
    let (ux, vx) = (u.extended(d, i), v.extended(d, i));
    let sum: f64 = g
        .neighbors(i)
        .iter()
        .map(|&(j, w)| w * (u.extended(d, j) - ux) * (v.extended(d, j) - vx))
        .sum();
    Ok(sum / (2.0 * g.measure(i)))
}

/// `|∇u|(x) = √Γ(u)(x)`.
pub fn grad_norm_at(g: &WeightedGraph, d: &Domain, u: &VertexFunction, x: &str) -> Result<f64> {
    Ok(gradient_form_at(g, d, u, u, x)?.max(0.0).sqrt())
}

/// `Σ_{x ∈ region} μ(x) value(x)`, with `values` aligned to `region`.
pub fn integral<S: AsRef<str>>(g: &WeightedGraph, region: &[S], values: &[f64]) -> Result<f64> {
    check_len(region.len(), values.len())?;
    region.iter().zip(values).try_fold(0.0, |acc, (id, &v)| {
        let id = id.as_ref();
        let i = g
            .index_of(id)
            .ok_or_else(|| Error::UnknownVertex(id.into()))?;
        Ok(acc + g.measure(i) * v)
    })
}

/// The Dirichlet biharmonic form on a domain.
///
/// `laplacian` maps interior values (length `n`) to Laplacian values on
/// `Ω ∪ ∂Ω` (length `m`) and is stored row-sparse. The dense matrix
/// `B = Lᵀ M_eff L` satisfies `uᵀBu = ∫_{Ω∪∂Ω} |Δũ|² dμ` and is assembled
/// from its upper triangle so it is exactly symmetric.
#[derive(Debug, Clone)]
pub struct BiharmonicForm {
    laplacian: Vec<Vec<(usize, f64)>>,
    mu_int: DVector<f64>,
    mu_eff: DVector<f64>,
    b: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

/// Assembles `L`, `M_int`, `M_eff` and `B`. Fails only if `B` is not
/// positive definite, which cannot happen on a valid [`Domain`].
pub fn assemble_form(g: &WeightedGraph, d: &Domain) -> Result<BiharmonicForm> {
    let (n, m) = (d.n(), d.m());
    let mut laplacian = Vec::with_capacity(m);
    let mut mu_eff = DVector::zeros(m);
    for k in 0..m {
        let x = d.effective_vertex(k);
        let mu = g.measure(x);
        mu_eff[k] = mu;
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut degree = 0.0;
        for &(y, w) in g.neighbors(x) {
            degree += w;
            if let Some(j) = d.interior_index(y) {
                row.push((j, w / mu));
            }
        }
        if let Some(i) = d.interior_index(x) {
            row.push((i, -degree / mu));
        }
        row.sort_by_key(|&(j, _)| j);
        laplacian.push(row);
    }
    let mu_int = mu_eff.rows(0, n).into_owned();

    let mut b = DMatrix::zeros(n, n);
    for (k, row) in laplacian.iter().enumerate() {
        let mu = mu_eff[k];
        for (a, &(i, li)) in row.iter().enumerate() {
            for &(j, lj) in &row[a..] {
                b[(i, j)] += mu * li * lj;
            }
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            b[(i, j)] = b[(j, i)];
        }
    }
    let chol = Cholesky::new(b.clone()).ok_or(Error::NotPositiveDefinite("biharmonic form B"))?;
    Ok(BiharmonicForm {
        laplacian,
        mu_int,
        mu_eff,
        b,
        chol,
    })
}

impl BiharmonicForm {
    /// Interior dimension `n = |Ω|`.
    pub fn n(&self) -> usize {
        self.mu_int.len()
    }

    /// Effective dimension `m = |Ω ∪ ∂Ω|`.
    pub fn m(&self) -> usize {
        self.mu_eff.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn mu_interior(&self) -> &DVector<f64> {
        &self.mu_int
    }

    pub fn mu_effective(&self) -> &DVector<f64> {
        &self.mu_eff
    }

    /// Row-sparse Laplacian: entry `k` lists `(interior column, coefficient)`.
    pub fn laplacian_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.laplacian
    }

    /// `Lu`: the Laplacian of the zero extension on `Ω ∪ ∂Ω`.
    pub fn apply_laplacian(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.laplacian
                .iter()
                .map(|row| row.iter().map(|&(j, c)| c * u[j]).sum::<f64>()),
        )
    }

    pub fn apply(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.b * u
    }

    /// `uᵀBv`
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.b * v))
    }

    /// `uᵀBu`
    pub fn quadratic(&self, u: &DVector<f64>) -> f64 {
        self.inner(u, u)
    }

    /// `‖u‖_H` without the dimension check.
    pub fn h_norm(&self, u: &DVector<f64>) -> f64 {
        self.quadratic(u).max(0.0).sqrt()
    }

    /// `M_int u`
    pub fn mass(&self, u: &DVector<f64>) -> DVector<f64> {
        self.mu_int.component_mul(u)
    }

    /// `∫_Ω u v dμ`
    pub fn l2_inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.mu_int
            .iter()
            .zip(u.iter().zip(v.iter()))
            .map(|(m, (a, b))| m * a * b)
            .sum()
    }

    /// `B⁻¹ rhs`
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }

    /// `√(rᵀ B⁻¹ r)`: the `H'` norm of the functional `v ↦ r·v`.
    pub fn dual_norm(&self, covector: &DVector<f64>) -> f64 {
        covector.dot(&self.solve(covector)).max(0.0).sqrt()
    }

    pub(crate) fn inverse(&self) -> DMatrix<f64> {
        self.chol.inverse()
    }
}

/// `‖u‖_H = (uᵀBu)^{1/2}`.
pub fn norm_h(form: &BiharmonicForm, u: &VertexFunction) -> Result<f64> {
    check_len(form.n(), u.len())?;
    Ok(form.h_norm(u.as_vector()))
}

/// `Σ_{Ω∪∂Ω} μ |∇ũ|²`
fn gradient_energy(g: &WeightedGraph, d: &Domain, u: &VertexFunction) -> f64 {
    (0..d.m())
        .map(|k| {
            let x = d.effective_vertex(k);
            let ux = u.extended(d, x);
            let s: f64 = g
                .neighbors(x)
                .iter()
                .map(|&(y, w)| {
                    let diff = u.extended(d, y) - ux;
                    w * diff * diff
                })
                .sum();
            0.5 * s
        })
        .sum()
}

fn interior_l2(g: &WeightedGraph, d: &Domain, u: &VertexFunction) -> f64 {
    (0..d.n())
        .map(|i| g.measure(d.effective_vertex(i)) * u.values()[i].powi(2))
        .sum()
}

/// `(∫_{Ω∪∂Ω} (|Δũ|² + |∇ũ|²) dμ + ∫_Ω u² dμ)^{1/2}`.
pub fn norm_w22(g: &WeightedGraph, d: &Domain, u: &VertexFunction) -> Result<f64> {
    check_len(d.n(), u.len())?;
    let lap: f64 = (0..d.m())
        .map(|k| {
            let x = d.effective_vertex(k);
            let s: f64 = g
                .neighbors(x)
                .iter()
                .map(|&(y, w)| w * (u.extended(d, y) - u.extended(d, x)))
                .sum();
            s * s / g.measure(x)
        })
        .sum();
    Ok((lap + gradient_energy(g, d, u) + interior_l2(g, d, u)).sqrt())
}

/// `(∫_{Ω∪∂Ω} |∇ũ|² dμ + ∫_Ω u² dμ)^{1/2}`.
pub fn norm_w012(g: &WeightedGraph, d: &Domain, u: &VertexFunction) -> Result<f64> {
    check_len(d.n(), u.len())?;
    Ok((gradient_energy(g, d, u) + interior_l2(g, d, u)).sqrt())
}
