//! Edge-paths, geodesics, and reduction by corner moves and cancellations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ComplexError, CubeComplex, VertexId};

/// A sequence of vertices, consecutive ones adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgePath {
    vertices: Vec<VertexId>,
}

impl EdgePath {
    /// Checks every step against the complex.
    pub fn new(complex: &CubeComplex, vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::EmptyPath);
        }
        for &v in &vertices {
            complex.check_vertex(v)?;
        }
        for w in vertices.windows(2) {
            if !complex.is_edge(w[0], w[1]) {
                return Err(ComplexError::NotAnEdge(w[0], w[1]));
            }
        }
        Ok(Self { vertices })
    }

    pub(crate) fn from_trusted(vertices: Vec<VertexId>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    pub fn steps(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn is_geodesic(&self, complex: &CubeComplex) -> bool {
        complex.d(self.start(), self.end()) == self.len()
    }

    pub fn into_vertices(self) -> Vec<VertexId> {
        self.vertices
    }
}

/// One rewriting step of [`CubeComplex::reduce_path`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum PathMove {
    /// `u, v, w` at `position - 1 ..= position + 1` becomes `u, v', w`, where
    /// `{u, v, v', w}` is a square.
    CornerMove {
        position: usize,
        replaced: VertexId,
        with: VertexId,
    },
    /// `v, v', v` at `position - 1 ..= position + 1` becomes `v`.
    Cancellation { position: usize },
}

/// Result of enumerating geodesics with a cap.
#[derive(Debug, Clone)]
pub struct GeodesicEnumeration {
    pub paths: Vec<EdgePath>,
    /// Total number of geodesics, saturating.
    pub total: u128,
    pub truncated: bool,
}

impl CubeComplex {
    /// The geodesic that always steps to the smallest-id neighbour closer to `y`.
    pub fn some_geodesic(&self, x: VertexId, y: VertexId) -> Result<EdgePath, ComplexError> {
        let d = self.distance(x, y)?;
        let mut path = Vec::with_capacity(d + 1);
        let mut cur = x;
        path.push(cur);
        while cur != y {
            let target = self.d(cur, y) - 1;
            cur = *self.adjacency[cur]
                .iter()
                .find(|&&u| self.d(u, y) == target)
                .expect("connected vertices have a neighbour one step closer");
            path.push(cur);
        }
        Ok(EdgePath::from_trusted(path))
    }

    /// A uniformly random next step at each vertex; not uniform over geodesics.
    pub fn random_geodesic(&self, x: VertexId, y: VertexId, rng: &mut impl Rng) -> Result<EdgePath, ComplexError> {
        self.distance(x, y)?;
        let mut path = vec![x];
        let mut cur = x;
        while cur != y {
            let target = self.d(cur, y) - 1;
            let options: Vec<VertexId> = self.adjacency[cur]
                .iter()
                .copied()
                .filter(|&u| self.d(u, y) == target)
                .collect();
            cur = options[rng.gen_range(0..options.len())];
            path.push(cur);
        }
        Ok(EdgePath::from_trusted(path))
    }

    /// Number of geodesics from `x` to `y`, saturating at `u128::MAX`.
    pub fn count_geodesics(&self, x: VertexId, y: VertexId) -> Result<u128, ComplexError> {
        let d = self.distance(x, y)?;
        let mut layers: Vec<Vec<VertexId>> = vec![Vec::new(); d + 1];
        for v in 0..self.n_vertices {
            if self.d(x, v) + self.d(v, y) == d {
                layers[self.d(x, v)].push(v);
            }
        }
        let mut count = vec![0u128; self.n_vertices];
        count[x] = 1;
        for layer in layers.iter().skip(1) {
            for &v in layer {
                let dv = self.d(x, v);
                count[v] = self.adjacency[v]
                    .iter()
                    .filter(|&&u| self.d(x, u) + 1 == dv && self.d(u, y) == self.d(v, y) + 1)
                    .fold(0u128, |acc, &u| acc.saturating_add(count[u]));
            }
        }
        Ok(count[y])
    }

    /// All geodesics from `x` to `y` in lexicographic order, stopping after `cap`.
    pub fn all_geodesics(&self, x: VertexId, y: VertexId, cap: usize) -> Result<GeodesicEnumeration, ComplexError> {
        let total = self.count_geodesics(x, y)?;
        let mut paths = Vec::new();
        let mut stack = vec![x];
        self.extend_geodesics(y, &mut stack, &mut paths, cap);
        Ok(GeodesicEnumeration {
            truncated: (paths.len() as u128) < total,
            paths,
            total,
        })
    }

    fn extend_geodesics(&self, y: VertexId, stack: &mut Vec<VertexId>, out: &mut Vec<EdgePath>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        let cur = *stack.last().unwrap();
        if cur == y {
            out.push(EdgePath::from_trusted(stack.clone()));
            return;
        }
        let target = self.d(cur, y) - 1;
        for &u in &self.adjacency[cur] {
            if self.d(u, y) == target {
                stack.push(u);
                self.extend_geodesics(y, stack, out, cap);
                stack.pop();
            }
        }
    }

    /// Vertices reachable from `x` along steps that shorten the distance to `y`:
    /// the vertices lying on some geodesic, found by graph search.
    pub fn geodesic_vertices(&self, x: VertexId, y: VertexId) -> Vec<VertexId> {
        let mut on = vec![false; self.n_vertices];
        on[x] = true;
        let mut frontier = vec![x];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                let du = self.d(u, y);
                for &v in &self.adjacency[u] {
                    if !on[v] && self.d(v, y) + 1 == du {
                        on[v] = true;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        (0..self.n_vertices).filter(|&v| on[v]).collect()
    }

    /// Paths reachable from `path` by one corner move.
    pub fn corner_move_neighbors(&self, path: &EdgePath) -> Vec<EdgePath> {
        let vs = path.vertices();
        let mut out = Vec::new();
        for i in 1..vs.len().saturating_sub(1) {
            let (u, v, w) = (vs[i - 1], vs[i], vs[i + 1]);
            if u == w {
                continue;
            }
            for &alt in &self.adjacency[u] {
                if alt != v && self.is_edge(alt, w) && self.is_cube(&[u, v, alt, w]) {
                    let mut next = vs.to_vec();
                    next[i] = alt;
                    out.push(EdgePath::from_trusted(next));
                }
            }
        }
        out
    }

    /// Rewrites an edge-path into a geodesic with the same endpoints using
    /// corner moves and simple cancellations, returning the trace.
    ///
    /// Each round takes the shortest non-geodesic window `v_s .. v_t`. Its
    /// first and last edges cross the same hyperplane; a window of length two
    /// is a cancellation, and a longer one gets a corner move at `s + 1` that
    /// shortens the window by one.
    pub fn reduce_path(&self, path: &EdgePath) -> Result<(EdgePath, Vec<PathMove>), ComplexError> {
        let mut vs = path.vertices().to_vec();
        let mut trace = Vec::new();
        loop {
            let Some((s, t)) = self.shortest_non_geodesic_window(&vs) else {
                return Ok((EdgePath::from_trusted(vs), trace));
            };
            if t - s == 2 {
                trace.push(PathMove::Cancellation { position: s + 1 });
                vs.drain(s + 1..s + 3);
                continue;
            }
            let (u, v, w) = (vs[s], vs[s + 1], vs[s + 2]);
            let alt = self.adjacency[u]
                .iter()
                .copied()
                .find(|&a| a != v && self.is_edge(a, w) && self.is_cube(&[u, v, a, w]))
                .ok_or_else(|| ComplexError::ReductionStalled {
                    path: vs.clone(),
                    position: s + 1,
                })?;
            trace.push(PathMove::CornerMove {
                position: s + 1,
                replaced: v,
                with: alt,
            });
            vs[s + 1] = alt;
        }
    }

    fn shortest_non_geodesic_window(&self, vs: &[VertexId]) -> Option<(usize, usize)> {
        let n = vs.len();
        for len in 2..n {
            for s in 0..(n - len) {
                if self.d(vs[s], vs[s + len]) < len {
                    return Some((s, s + len));
                }
            }
        }
        None
    }

    /// Applies a move trace to a path, checking each move is legal.
    pub fn replay_moves(&self, path: &EdgePath, moves: &[PathMove]) -> Result<EdgePath, ComplexError> {
        let mut vs = path.vertices().to_vec();
        for (index, m) in moves.iter().enumerate() {
            let bad = |reason: String| ComplexError::BadMove { index, reason };
            match *m {
                PathMove::Cancellation { position } => {
                    if position == 0 || position + 1 >= vs.len() {
                        return Err(bad(format!("position {position} out of range")));
                    }
                    if vs[position - 1] != vs[position + 1] {
                        return Err(bad("not of the form v, v', v".into()));
                    }
                    vs.drain(position..position + 2);
                }
                PathMove::CornerMove {
                    position,
                    replaced,
                    with,
                } => {
                    if position == 0 || position + 1 >= vs.len() {
                        return Err(bad(format!("position {position} out of range")));
                    }
                    if vs[position] != replaced {
                        return Err(bad(format!("expected {replaced} at {position}, found {}", vs[position])));
                    }
                    let (u, w) = (vs[position - 1], vs[position + 1]);
                    if !self.is_cube(&[u, replaced, with, w]) {
                        return Err(bad("the four vertices are not a square".into()));
                    }
                    vs[position] = with;
                }
            }
        }
        Ok(EdgePath::from_trusted(vs))
    }
}
