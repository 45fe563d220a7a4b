//! Small graph fixtures: paths, stars and seeded random connected graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{boundary_of, Domain, WeightedGraph};

/// Vertex ids `v00, v01, ...` sort in creation order.
fn vertex_id(i: usize) -> String {
    format!("v{i:02}")
}

/// Path `a–b–c–…` on the first `len` lowercase letters with unit data.
pub fn path_graph(len: usize) -> WeightedGraph {
    assert!((2..=26).contains(&len));
    let ids: Vec<String> = (0..len)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let verts = ids.iter().map(|s| (s.clone(), 1.0)).collect();
    let edges = ids
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone(), 1.0))
        .collect();
    WeightedGraph::new(verts, edges).expect("path graph is valid")
}

/// Star with center `x` and leaves `y1..yd`, unit data.
pub fn star_graph(leaves: usize) -> WeightedGraph {
    let mut verts = vec![("x".to_string(), 1.0)];
    let mut edges = Vec::new();
    for k in 1..=leaves {
        verts.push((format!("y{k}"), 1.0));
        edges.push(("x".to_string(), format!("y{k}"), 1.0));
    }
    WeightedGraph::new(verts, edges).expect("star graph is valid")
}

/// `P₃` with interior `{b}`.
pub fn p3_domain() -> (WeightedGraph, Domain) {
    let g = path_graph(3);
    let d = boundary_of(&g, &["b"]).unwrap();
    (g, d)
}

/// `P₅` with interior `{b, c, d}`.
pub fn p5_domain() -> (WeightedGraph, Domain) {
    let g = path_graph(5);
    let d = boundary_of(&g, &["b", "c", "d"]).unwrap();
    (g, d)
}

/// Star with three leaves and interior `{x}`.
pub fn star3_domain() -> (WeightedGraph, Domain) {
    let g = star_graph(3);
    let d = boundary_of(&g, &["x"]).unwrap();
    (g, d)
}

/// Parameters for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct RandomGraphSpec {
    pub vertices: usize,
    pub interior: usize,
    /// Extra edges beyond the random spanning tree, as a fraction of `vertices`.
    pub extra_edge_ratio: f64,
    pub measure: (f64, f64),
    pub weight: (f64, f64),
}

impl Default for RandomGraphSpec {
    fn default() -> Self {
        RandomGraphSpec {
            vertices: 12,
            interior: 6,
            extra_edge_ratio: 0.5,
            measure: (0.5, 2.0),
            weight: (0.1, 3.0),
        }
    }
}

/// Random connected graph (random spanning tree plus extra edges) with a
/// random interior of the requested size. `interior < vertices` guarantees
/// a nonempty boundary because the graph is connected.
pub fn random_instance(spec: RandomGraphSpec, seed: u64) -> (WeightedGraph, Domain) {
    assert!(spec.interior >= 1 && spec.interior < spec.vertices);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.vertices;
    let verts: Vec<(String, f64)> = (0..n)
        .map(|i| {
            (
                vertex_id(i),
                rng.random_range(spec.measure.0..=spec.measure.1),
            )
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs = std::collections::BTreeSet::new();
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        let (a, b) = (order[k], parent);
        pairs.insert((a.min(b), a.max(b)));
    }
    let extra = (spec.extra_edge_ratio * n as f64).round() as usize;
    let max_edges = n * (n - 1) / 2;
    let target = (pairs.len() + extra).min(max_edges);
    while pairs.len() < target {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let w = rng.random_range(spec.weight.0..=spec.weight.1);
            (vertex_id(a), vertex_id(b), w)
        })
        .collect();
    let g = WeightedGraph::new(verts, edges).expect("random graph is valid");

    let mut ids: Vec<String> = g.ids().to_vec();
    ids.shuffle(&mut rng);
    ids.truncate(spec.interior);
    let d = boundary_of(&g, &ids).expect("interior smaller than a connected graph has a boundary");
    (g, d)
}
