//! Weighted graphs, interior domains and their vertex boundaries.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};

/// A connected, undirected graph with positive edge weights `ω` and a
/// positive vertex measure `μ`.
///
/// Vertices are stored in lexicographic order of their ids, so two graphs
/// built from the same data index identically.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    ids: Vec<String>,
    measure: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    edges: Vec<(usize, usize, f64)>,
    index: HashMap<String, usize>,
}

impl WeightedGraph {
    /// Builds and validates a graph. Invariants are checked in a fixed
    /// order and the first violation is returned.
    pub fn new<S, T>(vertices: Vec<(S, f64)>, edges: Vec<(T, T, f64)>) -> Result<Self>
    where
        S: Into<String>,
        T: AsRef<str>,
    {
        let mut verts: Vec<(String, f64)> = vertices
            .into_iter()
            .map(|(id, mu)| (id.into(), mu))
            .collect();
        if verts.is_empty() {
            return Err(ValidationError::EmptyGraph.into());
        }
        verts.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in verts.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(ValidationError::DuplicateVertex(pair[0].0.clone()).into());
            }
        }
        for (id, mu) in &verts {
            if !(mu.is_finite() && *mu > 0.0) {
                return Err(ValidationError::NonpositiveMeasure(id.clone()).into());
            }
        }

        let index: HashMap<String, usize> = verts
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (id.clone(), i))
            .collect();
        let (ids, measure): (Vec<String>, Vec<f64>) = verts.into_iter().unzip();

        let mut adjacency = vec![Vec::new(); ids.len()];
        let mut stored = Vec::with_capacity(edges.len());
        let mut seen = BTreeSet::new();
        for (a, b, w) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            if !(w.is_finite() && w > 0.0) {
                return Err(ValidationError::NonpositiveWeight(a.into(), b.into()).into());
            }
            let ia = *index
                .get(a)
                .ok_or_else(|| ValidationError::UnknownEndpoint(a.into()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| ValidationError::UnknownEndpoint(b.into()))?;
            if ia == ib {
                return Err(ValidationError::SelfLoop(a.into()).into());
            }
            if !seen.insert((ia.min(ib), ia.max(ib))) {
                return Err(ValidationError::DuplicateEdge(a.into(), b.into()).into());
            }
            adjacency[ia].push((ib, w));
            adjacency[ib].push((ia, w));
            stored.push((ia.min(ib), ia.max(ib), w));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_by_key(|&(j, _)| j);
        }
        stored.sort_by_key(|&(i, j, _)| (i, j));

        let graph = WeightedGraph {
            ids,
            measure,
            adjacency,
            edges: stored,
            index,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn check_connected(&self) -> Result<()> {
        let mut visited = vec![false; self.len()];
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if !visited[y] {
                    visited[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match visited.iter().position(|v| !v) {
            None => Ok(()),
            Some(i) => {
                Err(ValidationError::Disconnected(self.ids[i].clone(), self.ids[0].clone()).into())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn measure(&self, i: usize) -> f64 {
        self.measure[i]
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Undirected edges as `(i, j, ω)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn measure_range(&self) -> (f64, f64) {
        min_max(self.measure.iter().copied())
    }

    pub fn weight_range(&self) -> (f64, f64) {
        min_max(self.edges.iter().map(|e| e.2))
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Interior set `Ω`, its boundary `∂Ω`, and the effective indexing of
/// `Ω ∪ ∂Ω` (interior first, then boundary, each sorted by id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    interior: Vec<String>,
    boundary: Vec<String>,
    effective: Vec<usize>,
    slot: Vec<Option<usize>>,
}

impl Domain {
    pub fn interior(&self) -> &[String] {
        &self.interior
    }

    pub fn boundary(&self) -> &[String] {
        &self.boundary
    }

    /// `|Ω|`
    pub fn n(&self) -> usize {
        self.interior.len()
    }

    /// `|Ω ∪ ∂Ω|`
    pub fn m(&self) -> usize {
        self.effective.len()
    }

    /// Graph index of the effective vertex at position `k`.
    pub fn effective_vertex(&self, k: usize) -> usize {
        self.effective[k]
    }

    /// Effective position of a graph vertex, if it lies in `Ω ∪ ∂Ω`.
    pub fn effective_index(&self, graph_index: usize) -> Option<usize> {
        self.slot[graph_index]
    }

    /// Interior position of a graph vertex, if it lies in `Ω`.
    pub fn interior_index(&self, graph_index: usize) -> Option<usize> {
        self.slot[graph_index].filter(|&k| k < self.interior.len())
    }

    /// Effective map as `(vertex-id, position)` pairs.
    pub fn effective_index_map(&self, g: &WeightedGraph) -> Vec<(String, usize)> {
        self.effective
            .iter()
            .enumerate()
            .map(|(k, &v)| (g.id(v).to_string(), k))
            .collect()
    }
}

/// Computes `∂Ω = { y ∉ Ω : ∃ x ∈ Ω, xy ∈ E }` and indexes `Ω ∪ ∂Ω`.
pub fn boundary_of<S: AsRef<str>>(g: &WeightedGraph, interior: &[S]) -> Result<Domain> {
    let mut inner = BTreeSet::new();
    for id in interior {
        let id = id.as_ref();
        let i = g
            .index_of(id)
            .ok_or_else(|| ValidationError::UnknownInteriorVertex(id.into()))?;
        inner.insert(i);
    }
    if inner.is_empty() {
        return Err(ValidationError::EmptyInterior.into());
    }
    let mut outer = BTreeSet::new();
    for &x in &inner {
        for &(y, _) in g.neighbors(x) {
            if !inner.contains(&y) {
                outer.insert(y);
            }
        }
    }
    if outer.is_empty() {
        return Err(ValidationError::EmptyBoundary.into());
    }

    // Graph indices follow lexicographic id order, so BTreeSet order is id order.
    let effective: Vec<usize> = inner.iter().chain(outer.iter()).copied().collect();
    let mut slot = vec![None; g.len()];
    for (k, &v) in effective.iter().enumerate() {
        slot[v] = Some(k);
    }
    Ok(Domain {
        interior: inner.iter().map(|&i| g.id(i).to_string()).collect(),
        boundary: outer.iter().map(|&i| g.id(i).to_string()).collect(),
        effective,
        slot,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: String,
    mu: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    u: String,
    v: String,
    w: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFileRecord {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    interior: Vec<String>,
}

/// Contents of a JSON graph file: the validated graph plus the declared
/// interior (not yet checked against the boundary invariants).
#[derive(Debug, Clone)]
pub struct GraphFile {
    pub graph: WeightedGraph,
    pub interior: Vec<String>,
}

impl GraphFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let record: GraphFileRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let graph = WeightedGraph::new(
            record.vertices.into_iter().map(|v| (v.id, v.mu)).collect(),
            record.edges.into_iter().map(|e| (e.u, e.v, e.w)).collect(),
        )?;
        Ok(GraphFile {
            graph,
            interior: record.interior,
        })
    }

    pub fn domain(&self) -> Result<Domain> {
        boundary_of(&self.graph, &self.interior)
    }

    pub fn to_json(g: &WeightedGraph, interior: &[String]) -> String {
        let record = GraphFileRecord {
            vertices: (0..g.len())
                .map(|i| VertexRecord {
                    id: g.id(i).to_string(),
                    mu: g.measure(i),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|&(i, j, w)| EdgeRecord {
                    u: g.id(i).to_string(),
                    v: g.id(j).to_string(),
                    w,
                })
                .collect(),
            interior: interior.to_vec(),
        };
        serde_json::to_string_pretty(&record).expect("graph record serializes")
    }
}

/// Reads and validates a graph file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    GraphFile::read(path).map(|f| f.graph)
}
