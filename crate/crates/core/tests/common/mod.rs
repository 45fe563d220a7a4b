//! Independent dense oracles shared by the integration tests.
//!
//! Nothing here calls into the library's assembly, energy or solvers; only
//! the graph accessors are used, so agreement with the library is a real
//! cross-check.

#![allow(dead_code)]

use biharm::{Domain, WeightedGraph};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// `L` maps interior values to `Δũ` on `Ω ∪ ∂Ω`; `B = Lᵀ diag(μ_eff) L`.
pub struct Dense {
    pub b: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
    pub mu: DVector<f64>,
    pub mu_eff: DVector<f64>,
}

pub fn dense_form(g: &WeightedGraph, d: &Domain) -> Dense {
    let interior: Vec<usize> = d
        .interior()
        .iter()
        .map(|id| g.index_of(id).unwrap())
        .collect();
    let effective: Vec<usize> = interior
        .iter()
        .copied()
        .chain(d.boundary().iter().map(|id| g.index_of(id).unwrap()))
        .collect();
    let slot = |v: usize| interior.iter().position(|&i| i == v);
    let (n, m) = (interior.len(), effective.len());
    let mut l = DMatrix::zeros(m, n);
    for (row, &x) in effective.iter().enumerate() {
        let mx = g.measure(x);
        for &(y, w) in g.neighbors(x) {
            if let Some(j) = slot(y) {
                l[(row, j)] += w / mx;
            }
            if let Some(i) = slot(x) {
                l[(row, i)] -= w / mx;
            }
        }
    }
    let mu_eff = DVector::from_iterator(m, effective.iter().map(|&v| g.measure(v)));
    let mu = DVector::from_iterator(n, interior.iter().map(|&v| g.measure(v)));
    let b = l.transpose() * DMatrix::from_diagonal(&mu_eff) * &l;
    Dense {
        b,
        laplacian: l,
        mu,
        mu_eff,
    }
}

/// Smallest generalized eigenvalue of `B v = λ M v` via `M^{-1/2} B M^{-1/2}`.
pub fn lambda1(dense: &Dense) -> f64 {
    let s = dense.mu.map(|m| 1.0 / m.sqrt());
    let n = dense.mu.len();
    let mut a = dense.b.clone();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= s[i] * s[j];
        }
    }
    a.symmetric_eigen().eigenvalues.min()
}

pub struct Instance {
    pub dense: Dense,
    pub lambda: f64,
    pub p: f64,
    pub eps: f64,
    pub f: DVector<f64>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.mu().len()
    }

    fn mu(&self) -> &DVector<f64> {
        &self.dense.mu
    }

    pub fn h_norm(&self, u: &DVector<f64>) -> f64 {
        (u.dot(&(&self.dense.b * u))).max(0.0).sqrt()
    }

    pub fn energy(&self, u: &DVector<f64>) -> f64 {
        let mu = self.mu();
        let mut e = 0.5 * u.dot(&(&self.dense.b * u));
        for i in 0..u.len() {
            e -= mu[i]
                * (0.5 * self.lambda * u[i] * u[i]
                    + u[i].abs().powf(self.p) / self.p
                    + self.eps * self.f[i] * u[i]);
        }
        e
    }

    pub fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        let mu = self.mu();
        let mut r = &self.dense.b * u;
        for i in 0..u.len() {
            let nl = u[i].abs().powf(self.p - 2.0) * u[i];
            r[i] -= mu[i] * (self.lambda * u[i] + nl + self.eps * self.f[i]);
        }
        r
    }

    pub fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mu = self.mu();
        let mut j = self.dense.b.clone();
        for i in 0..u.len() {
            j[(i, i)] -= mu[i] * (self.lambda + (self.p - 1.0) * u[i].abs().powf(self.p - 2.0));
        }
        j
    }

    /// Every critical point satisfies `|u|_∞ ≤ R`. From the identity
    /// `uᵀBu − λ∫u² − ∫|u|^p − ε∫fu = 0`, `uᵀBu ≤ ρ|u|²₂ ≤ ρ n |u|²_∞` with
    /// `ρ` the largest absolute row sum of `B`, and `∫|u|^p ≥ μ_min |u|^p_∞`.
    pub fn box_radius(&self) -> f64 {
        let n = self.n();
        let rho = (0..n)
            .map(|i| (0..n).map(|j| self.dense.b[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mu_min = self.mu().min();
        let forcing: f64 = (0..n).map(|i| self.mu()[i] * self.f[i].abs()).sum::<f64>() * self.eps;
        let exceeds = |s: f64| mu_min * s.powf(self.p) > rho * n as f64 * s * s + forcing * s;
        let mut s = 1.0;
        while !exceeds(s) {
            s *= 2.0;
        }
        s
    }

    /// Damped Newton on `r(u) = 0` with `‖r‖₂` as merit.
    pub fn newton(&self, start: &DVector<f64>) -> Option<DVector<f64>> {
        let mut u = start.clone();
        let mut r = self.gradient(&u);
        let scale = 1.0 + self.dense.b.norm();
        for _ in 0..200 {
            let norm = r.norm();
            if norm <= 1e-13 * scale * (1.0 + u.amax()) {
                return Some(u);
            }
            let step = self.jacobian(&u).lu().solve(&(-&r))?;
            let mut alpha = 1.0;
            loop {
                let trial = &u + &step * alpha;
                let tr = self.gradient(&trial);
                if tr.norm() <= (1.0 - 1e-4 * alpha) * norm {
                    u = trial;
                    r = tr;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-10 {
                    return None;
                }
            }
        }
        None
    }

    /// Runs Newton from every start in parallel and clusters the roots
    /// (sup-distance below `1e-7`), ordered by energy.
    pub fn critical_points(&self, starts: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let radius = self.box_radius();
        let roots: Vec<DVector<f64>> = starts
            .par_iter()
            .filter_map(|s| self.newton(s))
            .filter(|u| u.amax() <= 1.5 * radius)
            .collect();
        let mut clusters: Vec<DVector<f64>> = Vec::new();
        for u in roots {
            if !clusters.iter().any(|c| (c - &u).amax() < 1e-7) {
                clusters.push(u);
            }
        }
        clusters.sort_by(|a, b| self.energy(a).total_cmp(&self.energy(b)));
        clusters
    }
}

/// `per_axis^n` tensor grid on `[−R, R]^n` whose axis points are `±R·ρ^k`,
/// geometrically spaced down to `R·1e-8`, so critical points at very
/// different scales all have nearby starts.
pub fn grid_starts(n: usize, per_axis: usize, radius: f64) -> Vec<DVector<f64>> {
    let half = per_axis / 2;
    let ratio = 1e-8f64.powf(1.0 / (half - 1) as f64);
    let axis: Vec<f64> = (0..half)
        .map(|k| radius * ratio.powi(k as i32))
        .flat_map(|m| [m, -m])
        .collect();
    let total = axis.len().pow(n as u32);
    (0..total)
        .map(|mut k| {
            DVector::from_fn(n, |_, _| {
                let c = k % axis.len();
                k /= axis.len();
                axis[c]
            })
        })
        .collect()
}

/// Positive root of `5t − t³ = c` below `√(5/3)`.
pub fn scalar_small_root(c: f64) -> f64 {
    bisect(|t| 5.0 * t - t * t * t - c, 0.0, (5.0f64 / 3.0).sqrt())
}

/// Positive root of `5t − t³ = c` above `√(5/3)`.
pub fn scalar_large_root(c: f64) -> f64 {
    bisect(
        |t| 5.0 * t - t * t * t - c,
        (5.0f64 / 3.0).sqrt(),
        5f64.sqrt(),
    )
}

/// Bisection on a sign change; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
