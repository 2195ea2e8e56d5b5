//! Finite cube complexes: the cube list, its derived 1-skeleton, and the
//! edge-path metric.
//!
//! A complex is a vertex count together with a family of cubes, each cube a
//! sorted vertex set of size `2^dim`. The 1-skeleton is derived from the
//! two-element cubes and never stored independently of them.

mod io;
mod paths;
mod validate;

pub use io::{ComplexFile, LoadReport};
pub use paths::{EdgePath, GeodesicEnumeration, PathMove};
pub use validate::{ValidationOptions, ValidationReport, Violation};

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

/// Dense vertex index, `0..n_vertices`.
pub type VertexId = usize;

/// Index into [`CubeComplex::cubes`].
pub type CubeId = usize;

const UNREACHABLE: u16 = u16::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("vertex {vertex} out of range for a complex with {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },
    #[error("cube {cube:?} has {len} vertices, which is not a power of two")]
    NotPowerOfTwo { cube: Vec<usize>, len: usize },
    #[error("cube {cube:?} lists a vertex more than once")]
    RepeatedVertex { cube: Vec<usize> },
    #[error("vertices {x} and {y} lie in different components (sizes {size_x} and {size_y})")]
    Disconnected {
        x: VertexId,
        y: VertexId,
        size_x: usize,
        size_y: usize,
    },
    #[error("complex has {n} vertices; distance tables cap at {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("{0} -> {1} is not an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("edge-path is empty")]
    EmptyPath,
    #[error("path reduction stalled at {path:?}: no square realises the corner move at position {position}")]
    ReductionStalled { path: Vec<VertexId>, position: usize },
    #[error("move {index} in the trace does not apply: {reason}")]
    BadMove { index: usize, reason: String },
}

/// A cube of the complex, stored as its sorted vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    vertices: Vec<VertexId>,
    dim: usize,
}

impl Cube {
    /// Builds a cube from any ordering of its vertices.
    pub fn new(mut vertices: Vec<VertexId>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        let dim = vertices.len().trailing_zeros() as usize;
        Self { vertices, dim }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// A finite cube complex.
///
/// Immutable once built. All-pairs distances are computed at construction so
/// every read is a table lookup and the structure can be shared across threads.
#[derive(Debug, Clone)]
pub struct CubeComplex {
    n_vertices: usize,
    cubes: Vec<Cube>,
    index: HashMap<Vec<VertexId>, CubeId>,
    adjacency: Vec<Vec<VertexId>>,
    cubes_at: Vec<Vec<CubeId>>,
    dim: usize,
    dist: Vec<u16>,
    component: Vec<usize>,
    component_sizes: Vec<usize>,
}

/// Largest vertex count for which the all-pairs distance table is built.
pub const MAX_TABLE_VERTICES: usize = 8192;

impl CubeComplex {
    /// Builds a complex from exactly the given cubes, with no face completion.
    ///
    /// The result may violate the cube-complex axioms; [`CubeComplex::validate`]
    /// reports which.
    pub fn from_cubes_exact(
        n_vertices: usize,
        cubes: impl IntoIterator<Item = Vec<VertexId>>,
    ) -> Result<Self, ComplexError> {
        if n_vertices > MAX_TABLE_VERTICES {
            return Err(ComplexError::TooLarge {
                n: n_vertices,
                cap: MAX_TABLE_VERTICES,
            });
        }
        let mut list: Vec<Cube> = Vec::new();
        for raw in cubes {
            check_cube_shape(n_vertices, &raw)?;
            list.push(Cube::new(raw));
        }
        list.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
        list.dedup();
        Ok(Self::assemble(n_vertices, list))
    }

    /// Builds a complex from a cube list, adding every singleton and every
    /// face of every listed cube.
    ///
    /// Faces of a listed cube are read off the listed edges when those edges
    /// already form a hypercube on its vertex set. Otherwise the list order is
    /// taken as binary coordinates: position `i` of a cube's vertex list is the
    /// corner whose coordinates are the bits of `i`.
    pub fn from_cubes(
        n_vertices: usize,
        cubes: impl IntoIterator<Item = Vec<VertexId>>,
    ) -> Result<(Self, LoadReport), ComplexError> {
        if n_vertices > MAX_TABLE_VERTICES {
            return Err(ComplexError::TooLarge {
                n: n_vertices,
                cap: MAX_TABLE_VERTICES,
            });
        }
        let raw: Vec<Vec<VertexId>> = cubes.into_iter().collect();
        for c in &raw {
            check_cube_shape(n_vertices, c)?;
        }
        let mut explicit_adj: Vec<Vec<VertexId>> = vec![Vec::new(); n_vertices];
        for c in raw.iter().filter(|c| c.len() == 2) {
            explicit_adj[c[0]].push(c[1]);
            explicit_adj[c[1]].push(c[0]);
        }
        let mut seen: std::collections::HashSet<Vec<VertexId>> = Default::default();
        let mut given = 0usize;
        for c in &raw {
            let mut s = c.clone();
            s.sort_unstable();
            if seen.insert(s) {
                given += 1;
            }
        }
        let mut all = seen.clone();
        for v in 0..n_vertices {
            all.insert(vec![v]);
        }
        let mut inferred_from_edges = 0usize;
        for c in raw.iter().filter(|c| c.len() >= 4) {
            let coords = match hypercube_coordinates(c, |u, v| explicit_adj[u].contains(&v)) {
                Some(coords) => {
                    inferred_from_edges += 1;
                    coords
                }
                None => c.iter().enumerate().map(|(i, &v)| (v, i)).collect(),
            };
            for face in faces_from_coordinates(&coords) {
                all.insert(face);
            }
        }
        for c in raw.iter().filter(|c| c.len() == 2) {
            all.insert(vec![c[0]]);
            all.insert(vec![c[1]]);
        }
        let mut list: Vec<Cube> = all.into_iter().map(Cube::new).collect();
        list.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
        let report = LoadReport {
            cubes_given: given,
            cubes_total: list.len(),
            faces_added: list.len() - given,
            cubes_oriented_by_edges: inferred_from_edges,
        };
        Ok((Self::assemble(n_vertices, list), report))
    }

    fn assemble(n_vertices: usize, cubes: Vec<Cube>) -> Self {
        let mut index = HashMap::with_capacity(cubes.len());
        let mut adjacency = vec![Vec::new(); n_vertices];
        let mut cubes_at = vec![Vec::new(); n_vertices];
        let mut dim = 0;
        for (id, c) in cubes.iter().enumerate() {
            index.insert(c.vertices.clone(), id);
            dim = dim.max(c.dim);
            if c.len() == 2 {
                let (a, b) = (c.vertices[0], c.vertices[1]);
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
            for &v in &c.vertices {
                cubes_at[v].push(id);
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let mut complex = Self {
            n_vertices,
            cubes,
            index,
            adjacency,
            cubes_at,
            dim,
            dist: Vec::new(),
            component: Vec::new(),
            component_sizes: Vec::new(),
        };
        complex.compute_distances();
        complex
    }

    fn compute_distances(&mut self) {
        let n = self.n_vertices;
        let mut dist = vec![UNREACHABLE; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let du = row[u];
                for &v in &self.adjacency[u] {
                    if row[v] == UNREACHABLE {
                        row[v] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for s in 0..n {
            if component[s] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            let mut size = 0;
            for v in 0..n {
                if dist[s * n + v] != UNREACHABLE {
                    component[v] = c;
                    size += 1;
                }
            }
            sizes.push(size);
        }
        self.dist = dist;
        self.component = component;
        self.component_sizes = sizes;
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    /// Maximum cube dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn is_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Looks up a cube by its vertex set, in any order.
    pub fn cube_id(&self, vertices: &[VertexId]) -> Option<CubeId> {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.index.get(&key).copied()
    }

    pub fn is_cube(&self, vertices: &[VertexId]) -> bool {
        self.cube_id(vertices).is_some()
    }

    pub fn cube(&self, id: CubeId) -> &Cube {
        &self.cubes[id]
    }

    /// Ids of the cubes containing `v`.
    pub fn cubes_containing(&self, v: VertexId) -> &[CubeId] {
        &self.cubes_at[v]
    }

    pub fn is_connected(&self) -> bool {
        self.component_sizes.len() <= 1
    }

    /// Edge-path distance.
    pub fn distance(&self, x: VertexId, y: VertexId) -> Result<usize, ComplexError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let d = self.dist[x * self.n_vertices + y];
        if d == UNREACHABLE {
            return Err(ComplexError::Disconnected {
                x,
                y,
                size_x: self.component_sizes[self.component[x]],
                size_y: self.component_sizes[self.component[y]],
            });
        }
        Ok(d as usize)
    }

    /// Distance lookup for vertices already known to be valid and connected.
    #[inline]
    pub fn d(&self, x: VertexId, y: VertexId) -> usize {
        self.dist[x * self.n_vertices + y] as usize
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<(), ComplexError> {
        if v >= self.n_vertices {
            return Err(ComplexError::VertexOutOfRange {
                vertex: v,
                n_vertices: self.n_vertices,
            });
        }
        Ok(())
    }

    /// Vertices `v` with `d(x, v) + d(v, y) = d(x, y)`.
    pub fn interval_by_distance(&self, x: VertexId, y: VertexId) -> Vec<VertexId> {
        let dxy = self.d(x, y);
        (0..self.n_vertices)
            .filter(|&v| self.d(x, v) + self.d(v, y) == dxy)
            .collect()
    }

    /// Vertices within `radius` of `center`.
    pub fn ball(&self, center: VertexId, radius: usize) -> Vec<VertexId> {
        (0..self.n_vertices)
            .filter(|&v| self.d(center, v) <= radius)
            .collect()
    }
}

fn check_cube_shape(n_vertices: usize, cube: &[VertexId]) -> Result<(), ComplexError> {
    if let Some(&v) = cube.iter().find(|&&v| v >= n_vertices) {
        return Err(ComplexError::VertexOutOfRange {
            vertex: v,
            n_vertices,
        });
    }
    if cube.is_empty() || !cube.len().is_power_of_two() {
        return Err(ComplexError::NotPowerOfTwo {
            cube: cube.to_vec(),
            len: cube.len(),
        });
    }
    let mut sorted = cube.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ComplexError::RepeatedVertex {
            cube: cube.to_vec(),
        });
    }
    Ok(())
}

/// Recovers binary coordinates for `vertices` from an adjacency predicate,
/// returning `None` unless the induced graph is exactly the hypercube graph.
///
/// Coordinates are relative to the first vertex: bit `i` of a vertex's code is
/// set when it is closer to the `i`-th neighbor of the base than to the base.
pub(crate) fn hypercube_coordinates(
    vertices: &[VertexId],
    adjacent: impl Fn(VertexId, VertexId) -> bool,
) -> Option<Vec<(VertexId, usize)>> {
    let m = vertices.len();
    if !m.is_power_of_two() {
        return None;
    }
    let dim = m.trailing_zeros() as usize;
    if dim == 0 {
        return Some(vec![(vertices[0], 0)]);
    }
    let local_adj: Vec<Vec<usize>> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| j != i && adjacent(vertices[i], vertices[j]))
                .collect()
        })
        .collect();
    if local_adj.iter().any(|nb| nb.len() != dim) {
        return None;
    }
    // BFS distances inside the induced subgraph.
    let mut dist = vec![vec![usize::MAX; m]; m];
    for s in 0..m {
        dist[s][s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &local_adj[u] {
                if dist[s][v] == usize::MAX {
                    dist[s][v] = dist[s][u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    let base = 0;
    let dirs = &local_adj[base];
    let mut codes = vec![0usize; m];
    for (u, code) in codes.iter_mut().enumerate() {
        if dist[base][u] == usize::MAX {
            return None;
        }
        for (bit, &nb) in dirs.iter().enumerate() {
            if dist[nb][u] < dist[base][u] {
                *code |= 1 << bit;
            }
        }
    }
    let mut seen = vec![false; m];
    for &c in &codes {
        if c >= m || seen[c] {
            return None;
        }
        seen[c] = true;
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let hamming_one = (codes[i] ^ codes[j]).count_ones() == 1;
            if hamming_one != local_adj[i].contains(&j) {
                return None;
            }
        }
    }
    Some(vertices.iter().copied().zip(codes).collect())
}

/// All faces of a cube given by `(vertex, binary code)` pairs.
pub(crate) fn faces_from_coordinates(coords: &[(VertexId, usize)]) -> Vec<Vec<VertexId>> {
    let m = coords.len();
    let dim = m.trailing_zeros() as usize;
    let full = m - 1;
    let mut by_code = vec![0; m];
    for &(v, c) in coords {
        by_code[c] = v;
    }
    let mut faces = Vec::new();
    // A face fixes the coordinates outside `free` to the bits of `base`.
    for free in 0..=full {
        let fixed = full & !free;
        let mut base = fixed;
        loop {
            let mut face = Vec::with_capacity(1 << (free.count_ones() as usize));
            let mut sub = free;
            loop {
                face.push(by_code[base | sub]);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
            face.sort_unstable();
            faces.push(face);
            if base == 0 {
                break;
            }
            base = (base - 1) & fixed;
        }
    }
    debug_assert_eq!(faces.len(), 3usize.pow(dim as u32));
    faces
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_complex(n: usize) -> CubeComplex {
        CubeComplex::from_cubes(n + 1, (0..n).map(|i| vec![i, i + 1]))
            .unwrap()
            .0
    }

    #[test]
    fn segment_distances() {
        let c = path_complex(5);
        assert_eq!(c.distance(0, 5).unwrap(), 5);
        assert_eq!(c.distance(3, 3).unwrap(), 0);
        assert_eq!(c.dim(), 1);
    }

    #[test]
    fn disconnected_distance_names_components() {
        let c = CubeComplex::from_cubes(3, vec![vec![0, 1]]).unwrap().0;
        let err = c.distance(0, 2).unwrap_err();
        assert_eq!(
            err,
            ComplexError::Disconnected {
                x: 0,
                y: 2,
                size_x: 2,
                size_y: 1
            }
        );
    }

    #[test]
    fn square_faces_from_listing_order() {
        // Binary order 00, 10, 01, 11.
        let (c, report) = CubeComplex::from_cubes(4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(c.cubes().len(), 9);
        assert!(c.is_edge(0, 1) && c.is_edge(0, 2) && c.is_edge(1, 3) && c.is_edge(2, 3));
        assert!(!c.is_edge(0, 3));
        assert_eq!(report.faces_added, 8);
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn square_faces_from_listed_edges() {
        // Cyclic order 0-1-2-3-0 given through explicit edges.
        let cubes = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0], vec![0, 1, 2, 3]];
        let (c, report) = CubeComplex::from_cubes(4, cubes).unwrap();
        assert!(c.is_edge(1, 2) && c.is_edge(0, 3));
        assert!(!c.is_edge(0, 2));
        assert_eq!(report.cubes_oriented_by_edges, 1);
        assert_eq!(c.cubes().len(), 9);
    }

    #[test]
    fn three_cube_face_count() {
        let (c, _) = CubeComplex::from_cubes(8, vec![(0..8).collect()]).unwrap();
        assert_eq!(c.cubes().len(), 27);
        assert_eq!(c.n_edges(), 12);
        assert_eq!(c.distance(0, 7).unwrap(), 3);
    }

    #[test]
    fn rejects_bad_cubes() {
        assert!(matches!(
            CubeComplex::from_cubes(3, vec![vec![0, 1, 2]]),
            Err(ComplexError::NotPowerOfTwo { .. })
        ));
        assert!(matches!(
            CubeComplex::from_cubes(3, vec![vec![0, 5]]),
            Err(ComplexError::VertexOutOfRange { vertex: 5, .. })
        ));
        assert!(matches!(
            CubeComplex::from_cubes(3, vec![vec![1, 1]]),
            Err(ComplexError::RepeatedVertex { .. })
        ));
    }

    #[test]
    fn grid_corner_distance_matches_bfs() {
        // 3x4 grid: vertex (i, j) = 5 * i + j, i in 0..=3, j in 0..=4.
        let idx = |i: usize, j: usize| 5 * i + j;
        let mut cubes = Vec::new();
        for i in 0..=3 {
            for j in 0..=4 {
                if i < 3 {
                    cubes.push(vec![idx(i, j), idx(i + 1, j)]);
                }
                if j < 4 {
                    cubes.push(vec![idx(i, j), idx(i, j + 1)]);
                }
                if i < 3 && j < 4 {
                    cubes.push(vec![idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)]);
                }
            }
        }
        let (c, _) = CubeComplex::from_cubes(20, cubes).unwrap();
        assert_eq!(c.distance(idx(0, 0), idx(3, 4)).unwrap(), 7);
    }
}
