//! Path-deformation mountain-pass algorithm.
//!
//! A polygonal path from `0` to a negative-energy endpoint is deformed by
//! repeatedly locating its highest point, pushing that point downhill in
//! the `H` geometry, and re-spacing the nearby nodes by `H` arc length.
//! The maximizer converges to a saddle; Newton finishes the job.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::newton::newton_refine;
use super::{CriticalPoint, PointKind, SolverConfig};
use crate::error::{Error, Result};
use crate::functional::{check_point, energy_vec, gradient_vec, ProblemParams};
use crate::operators::{BiharmonicForm, VertexFunction};

/// Doublings allowed in [`find_endpoint`].
pub const MAX_DOUBLINGS: usize = 200;
/// Sweeps without residual improvement before the path is perturbed.
pub const STAGNATION_SWEEPS: usize = 500;
pub const MAX_RESTARTS: usize = 4;
/// Nodes re-spaced on each side of the maximizer after a deformation step.
const RESPACE_WINDOW: usize = 4;
/// Residual below which the maximizer is handed to Newton.
const NEWTON_GATE: f64 = 1e-3;

/// `ũ = t u*` with `t` doubled from 1 until `J_ε(ũ) < 0` and `‖ũ‖_H > 2r_ε`.
pub fn find_endpoint(
    form: &BiharmonicForm,
    params: &ProblemParams,
    direction: &VertexFunction,
) -> Result<VertexFunction> {
    check_point(form, params, direction.as_vector())?;
    let dir = direction.as_vector();
    let floor = 2.0 * params.r_eps();
    let mut t = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        let u = dir * t;
        if energy_vec(form, params, &u) < 0.0 && form.h_norm(&u) > floor {
            return Ok(u.into());
        }
        t *= 2.0;
    }
    Err(Error::solver(
        "find_endpoint",
        format!("energy along the ray stayed nonnegative after {MAX_DOUBLINGS} doublings"),
    ))
}

#[derive(Debug, Clone)]
pub struct MountainPass {
    pub point: CriticalPoint,
    /// Maximum node energy along the final path, which passes through the
    /// returned point. An upper estimate of the minimax value.
    pub c_est: f64,
    /// Maximum energy along the initial straight segment `[0, ũ]`.
    pub straight_path_max: f64,
    pub restarts: usize,
}

struct Path<'a> {
    form: &'a BiharmonicForm,
    params: &'a ProblemParams,
    nodes: Vec<DVector<f64>>,
    energies: Vec<f64>,
}

impl<'a> Path<'a> {
    fn new(form: &'a BiharmonicForm, params: &'a ProblemParams, nodes: Vec<DVector<f64>>) -> Self {
        let energies = nodes.iter().map(|z| energy_vec(form, params, z)).collect();
        Path {
            form,
            params,
            nodes,
            energies,
        }
    }

    fn straight(
        form: &'a BiharmonicForm,
        params: &'a ProblemParams,
        end: &DVector<f64>,
        count: usize,
    ) -> Self {
        let last = (count - 1) as f64;
        let nodes = (0..count).map(|k| end * (k as f64 / last)).collect();
        Path::new(form, params, nodes)
    }

    fn perturbed(
        form: &'a BiharmonicForm,
        params: &'a ProblemParams,
        end: &DVector<f64>,
        count: usize,
        amplitude: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = DVector::from_fn(form.n(), |_, _| StandardNormal.sample(&mut rng));
        let xi = match form.h_norm(&xi) {
            h if h > 0.0 => xi / h,
            _ => xi,
        };
        let last = (count - 1) as f64;
        let nodes = (0..count)
            .map(|k| {
                let t = k as f64 / last;
                end * t + &xi * (amplitude * (std::f64::consts::PI * t).sin())
            })
            .collect();
        Path::new(form, params, nodes)
    }

    fn set(&mut self, k: usize, z: DVector<f64>) {
        self.energies[k] = energy_vec(self.form, self.params, &z);
        self.nodes[k] = z;
    }

    fn argmax_interior(&self) -> usize {
        (1..self.nodes.len() - 1)
            .max_by(|&a, &b| self.energies[a].total_cmp(&self.energies[b]))
            .expect("path has interior nodes")
    }

    fn max_energy(&self) -> f64 {
        self.energies
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Maximizer of the energy on the two segments adjacent to node `k`.
    fn local_maximizer(&self, k: usize) -> (DVector<f64>, f64) {
        let left = segment_max(self.form, self.params, &self.nodes[k - 1], &self.nodes[k]);
        let right = segment_max(self.form, self.params, &self.nodes[k], &self.nodes[k + 1]);
        if left.1 >= right.1 {
            left
        } else {
            right
        }
    }

    /// Re-spaces nodes strictly between `lo` and `hi` at equal `H` arc
    /// length along the current polyline.
    fn respace(&mut self, lo: usize, hi: usize) {
        if hi <= lo + 1 {
            return;
        }
        let old: Vec<DVector<f64>> = self.nodes[lo..=hi].to_vec();
        let mut cum = vec![0.0];
        for w in old.windows(2) {
            let len = self.form.h_norm(&(&w[1] - &w[0]));
            cum.push(cum.last().unwrap() + len);
        }
        let total = *cum.last().unwrap();
        if total == 0.0 {
            return;
        }
        let segments = hi - lo;
        let mut seg = 0;
        for j in 1..segments {
            let target = total * j as f64 / segments as f64;
            while seg + 1 < segments && cum[seg + 1] < target {
                seg += 1;
            }
            let span = cum[seg + 1] - cum[seg];
            let s = if span > 0.0 {
                (target - cum[seg]) / span
            } else {
                0.0
            };
            let z = &old[seg] + (&old[seg + 1] - &old[seg]) * s.clamp(0.0, 1.0);
            self.set(lo + j, z);
        }
    }
}

/// Golden-section maximization of `s ↦ J_ε(a + s(b − a))` on `[0, 1]`,
/// compared against both endpoints.
fn segment_max(
    form: &BiharmonicForm,
    params: &ProblemParams,
    a: &DVector<f64>,
    b: &DVector<f64>,
) -> (DVector<f64>, f64) {
    let diff = b - a;
    let at = |s: f64| {
        let z = a + &diff * s;
        let e = energy_vec(form, params, &z);
        (z, e)
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = at(x1).1;
    let mut f2 = at(x2).1;
    for _ in 0..80 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = at(x1).1;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = at(x2).1;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    [at(0.5 * (lo + hi)), at(0.0), at(1.0)]
        .into_iter()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("three candidates")
}

/// Maximum energy along the straight segment `[0, end]`, sampled at
/// `count` nodes and refined on the segments around the best node.
pub fn straight_path_max(
    form: &BiharmonicForm,
    params: &ProblemParams,
    end: &VertexFunction,
    count: usize,
) -> f64 {
    let path = Path::straight(form, params, end.as_vector(), count.max(3));
    let k = path.argmax_interior();
    path.local_maximizer(k).1.max(path.max_energy())
}

/// Among converged candidates, the lowest energy that clears `floor`
/// (closest to the minimax value from above).
fn select_candidate(
    candidates: Vec<(CriticalPoint, Path<'_>)>,
    floor: f64,
) -> Option<(CriticalPoint, Path<'_>)> {
    candidates
        .into_iter()
        .filter(|(cp, _)| cp.energy >= floor)
        .min_by(|a, b| a.0.energy.total_cmp(&b.0.energy))
}

/// Mountain-pass critical point between `0` and `endpoint`.
///
/// `floor` is the energy level the critical point must clear (the annulus
/// bound `δ_ε` in the guaranteed regime); candidates below it are discarded
/// and the path is restarted.
pub fn mountain_pass(
    form: &BiharmonicForm,
    params: &ProblemParams,
    endpoint: &VertexFunction,
    floor: f64,
    cfg: &SolverConfig,
) -> Result<MountainPass> {
    const STAGE: &str = "mountain_pass";
    check_point(form, params, endpoint.as_vector())?;
    let end = endpoint.as_vector();
    let count = cfg.path_nodes;
    let straight_max = straight_path_max(form, params, endpoint, count);

    let mut candidates = Vec::new();
    let mut restarts = 0;
    let mut path = Path::straight(form, params, end, count);
    let mut sweeps = 0;

    'restart: loop {
        let mut best_res = f64::INFINITY;
        let mut since_improvement = 0;
        let mut gate = NEWTON_GATE;
        let mut step = cfg.descent_step;

        loop {
            if sweeps == cfg.max_iter {
                break 'restart;
            }
            sweeps += 1;

            let k = path.argmax_interior();
            let (z, ez) = path.local_maximizer(k);
            if ez > path.energies[k] {
                path.set(k, z);
            }
            let z = path.nodes[k].clone();
            let r = gradient_vec(form, params, &z);
            let g = form.solve(&r);
            let res = r.dot(&g).max(0.0).sqrt();

            if res <= gate || res <= cfg.tol {
                let refined = newton_refine(
                    form,
                    params,
                    &z.clone().into(),
                    PointKind::MountainPass,
                    cfg,
                )?
                .point;
                let point = if res <= cfg.tol && refined.residual > res {
                    CriticalPoint::evaluate(form, params, z.clone(), PointKind::MountainPass, 0)
                } else {
                    refined
                };
                if point.residual <= cfg.tol {
                    let point = CriticalPoint {
                        iterations: sweeps + point.iterations,
                        ..point
                    };
                    path.set(k, point.u.as_vector().clone());
                    let accepted = point.energy >= floor;
                    candidates.push((point, path));
                    if accepted {
                        break 'restart;
                    }
                    if restarts == MAX_RESTARTS {
                        break 'restart;
                    }
                    restarts += 1;
                    path = perturbed_path(form, params, end, count, restarts, cfg.seed);
                    continue 'restart;
                }
                gate = res * 0.1;
            }

            if res < best_res * (1.0 - 1e-12) {
                best_res = res;
                since_improvement = 0;
            } else {
                since_improvement += 1;
            }
            if since_improvement >= STAGNATION_SWEEPS {
                if restarts == MAX_RESTARTS {
                    break 'restart;
                }
                restarts += 1;
                path = perturbed_path(form, params, end, count, restarts, cfg.seed);
                continue 'restart;
            }

            let ez = path.energies[k];
            let mut s = (2.0 * step).min(cfg.descent_step);
            let moved = loop {
                let trial = &z - &g * s;
                let te = energy_vec(form, params, &trial);
                if te <= ez - cfg.armijo_c1 * s * res * res {
                    break Some(trial);
                }
                s *= cfg.backtrack;
                if s < 1e-16 {
                    break None;
                }
            };
            if let Some(trial) = moved {
                step = s;
                path.set(k, trial);
                let last = count - 1;
                path.respace(k.saturating_sub(RESPACE_WINDOW), k);
                path.respace(k, (k + RESPACE_WINDOW).min(last));
            }
        }
    }

    match select_candidate(candidates, floor) {
        Some((point, path)) => Ok(MountainPass {
            c_est: path.max_energy(),
            point,
            straight_path_max: straight_max,
            restarts,
        }),
        None => Err(Error::solver(
            STAGE,
            format!("no critical point with energy ≥ {floor:.3e} after {sweeps} sweeps and {restarts} restarts"),
        )),
    }
}

fn perturbed_path<'a>(
    form: &'a BiharmonicForm,
    params: &'a ProblemParams,
    end: &DVector<f64>,
    count: usize,
    restart: usize,
    seed: u64,
) -> Path<'a> {
    let amplitude = 0.25 * restart as f64 * form.h_norm(end);
    Path::perturbed(
        form,
        params,
        end,
        count,
        amplitude,
        seed.wrapping_add(restart as u64),
    )
}
