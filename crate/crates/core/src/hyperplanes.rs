//! Hyperplanes as classes of edges under the square relation, their
//! half-spaces, crossing and parallelism, and cube paths built from them.
//!
//! Each hyperplane carries a global orientation: `H+` is the side holding the
//! smallest vertex adjacent to `H`. Operators that need an orientation relative
//! to a particular vertex (the cocycle, interval decomposition) derive it from
//! the sign vectors instead of relying on this one.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits;
use crate::complex::{ComplexError, Cube, CubeComplex, EdgePath, VertexId};

pub type HyperplaneId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HyperplaneError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("hyperplane {hyperplane} leaves {components} components after its edges are removed")]
    NotTwoSided { hyperplane: HyperplaneId, components: usize },
    #[error("edge {edge:?} of hyperplane {hyperplane} joins vertices on the same side")]
    EdgeNotSeparating {
        hyperplane: HyperplaneId,
        edge: (VertexId, VertexId),
    },
    #[error("hyperplane {hyperplane} crosses itself at vertex {vertex}")]
    SelfCrossing { hyperplane: HyperplaneId, vertex: VertexId },
    #[error("vertex {vertex} is not adjacent to hyperplane {hyperplane}")]
    NotAdjacent { hyperplane: HyperplaneId, vertex: VertexId },
    #[error("hyperplane {hyperplane} does not separate {x} from {y}")]
    NotSeparating {
        hyperplane: HyperplaneId,
        x: VertexId,
        y: VertexId,
    },
    #[error("no hyperplane {0}")]
    Unknown(HyperplaneId),
    #[error("a hyperplane compared with itself ({0})")]
    SameHyperplane(HyperplaneId),
    #[error("hyperplanes {0} and {1} intersect")]
    Intersecting(HyperplaneId, HyperplaneId),
    #[error("crossing test disagrees for {h} and {k}: square scan says {by_square}, quadrants say {by_quadrants}")]
    CrossingMismatch {
        h: HyperplaneId,
        k: HyperplaneId,
        by_square: bool,
        by_quadrants: bool,
    },
    #[error("reflecting {vertex} across {hyperplanes:?} does not close up to a cube: {reason}")]
    NoSpanningCube {
        vertex: VertexId,
        hyperplanes: Vec<HyperplaneId>,
        reason: String,
    },
}

/// Which half-space of a hyperplane a vertex lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// A hyperplane with its global orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedHyperplane {
    pub id: HyperplaneId,
    /// Edges as `(plus end, minus end)`, sorted.
    pub edges: Vec<(VertexId, VertexId)>,
    pub plus_size: usize,
    pub minus_size: usize,
}

impl OrientedHyperplane {
    /// Vertices of `H+` adjacent to `H`.
    pub fn boundary_plus(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.edges.iter().map(|e| e.0)
    }

    pub fn boundary_minus(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.edges.iter().map(|e| e.1)
    }
}

/// 𝔥(x, y): the hyperplanes with `x` and `y` on opposite sides, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorSet {
    pub x: VertexId,
    pub y: VertexId,
    pub hyperplanes: Vec<HyperplaneId>,
}

impl SeparatorSet {
    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn contains(&self, h: HyperplaneId) -> bool {
        self.hyperplanes.binary_search(&h).is_ok()
    }
}

/// A cube of dimension `|hs|` at a vertex in which all of `hs` meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningCube {
    pub cube: Cube,
    /// The corner opposite the base vertex.
    pub diagonal: VertexId,
}

/// One cube of a normal cube path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalCube {
    pub cube: Vec<VertexId>,
    pub entry: VertexId,
    pub exit: VertexId,
    pub hyperplanes: Vec<HyperplaneId>,
}

/// All hyperplanes of a complex with per-vertex sign vectors.
#[derive(Debug, Clone)]
pub struct HyperplaneSystem {
    hyperplanes: Vec<OrientedHyperplane>,
    words: usize,
    /// Row `v`, bit `h` set iff `v` lies in `H-`.
    signs: Vec<u64>,
    /// Per vertex: `(hyperplane, opposite vertex)` for each incident edge, sorted.
    crossings: Vec<Vec<(HyperplaneId, VertexId)>>,
    /// Per hyperplane: the hyperplanes it crosses in some square, sorted.
    crossing_partners: Vec<Vec<HyperplaneId>>,
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
    }
}

impl HyperplaneSystem {
    /// Computes the hyperplanes and checks each splits the vertices into
    /// exactly two classes with no self-crossing.
    pub fn compute(complex: &CubeComplex) -> Result<Self, HyperplaneError> {
        let n = complex.n_vertices();
        let edges: Vec<(VertexId, VertexId)> = complex.edges().collect();
        let edge_id: HashMap<(VertexId, VertexId), usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let key = |a: VertexId, b: VertexId| if a < b { (a, b) } else { (b, a) };

        let mut dsu = DisjointSet::new(edges.len());
        let squares: Vec<&Cube> = complex.cubes().iter().filter(|c| c.dim() == 2).collect();
        let mut square_edges = Vec::with_capacity(squares.len());
        for sq in &squares {
            let vs = sq.vertices();
            let mut local = Vec::with_capacity(4);
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if let Some(&e) = edge_id.get(&key(vs[i], vs[j])) {
                        local.push((vs[i], vs[j], e));
                    }
                }
            }
            // Pair each edge with the edge on the complementary two vertices.
            let mut pairs = Vec::new();
            for (i, &(a, b, e)) in local.iter().enumerate() {
                for &(c, d, f) in &local[i + 1..] {
                    if a != c && a != d && b != c && b != d {
                        dsu.union(e, f);
                        pairs.push((e, f));
                    }
                }
            }
            square_edges.push(pairs);
        }

        let mut class_index: HashMap<usize, HyperplaneId> = HashMap::new();
        let mut edge_class = vec![0; edges.len()];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for e in 0..edges.len() {
            let root = dsu.find(e);
            let h = *class_index.entry(root).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            edge_class[e] = h;
            members[h].push(e);
        }
        let n_h = members.len();
        let words = n_h.div_ceil(64).max(1);

        let mut crossings: Vec<Vec<(HyperplaneId, VertexId)>> = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            crossings[u].push((edge_class[e], v));
            crossings[v].push((edge_class[e], u));
        }
        for (v, list) in crossings.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(HyperplaneError::SelfCrossing {
                    hyperplane: w[0].0,
                    vertex: v,
                });
            }
        }

        let adj_class: Vec<Vec<HyperplaneId>> = (0..n)
            .map(|u| {
                complex
                    .neighbors(u)
                    .iter()
                    .map(|&v| edge_class[edge_id[&key(u, v)]])
                    .collect()
            })
            .collect();

        let mut signs = vec![0u64; n * words];
        let mut hyperplanes = Vec::with_capacity(n_h);
        let mut label = vec![usize::MAX; n];
        let mut stack = Vec::new();
        for (h, es) in members.iter().enumerate() {
            label.iter_mut().for_each(|l| *l = usize::MAX);
            let mut components = 0;
            for s in 0..n {
                if label[s] != usize::MAX {
                    continue;
                }
                label[s] = components;
                stack.push(s);
                while let Some(u) = stack.pop() {
                    for (i, &v) in complex.neighbors(u).iter().enumerate() {
                        if adj_class[u][i] != h && label[v] == usize::MAX {
                            label[v] = components;
                            stack.push(v);
                        }
                    }
                }
                components += 1;
            }
            if components != 2 {
                return Err(HyperplaneError::NotTwoSided {
                    hyperplane: h,
                    components,
                });
            }
            let smallest = es
                .iter()
                .map(|&e| edges[e].0.min(edges[e].1))
                .min()
                .expect("hyperplanes are nonempty");
            let plus_label = label[smallest];
            let mut oriented = Vec::with_capacity(es.len());
            for &e in es {
                let (u, v) = edges[e];
                if label[u] == label[v] {
                    return Err(HyperplaneError::EdgeNotSeparating {
                        hyperplane: h,
                        edge: (u, v),
                    });
                }
                oriented.push(if label[u] == plus_label { (u, v) } else { (v, u) });
            }
            oriented.sort_unstable();
            let mut minus_size = 0;
            for v in 0..n {
                if label[v] != plus_label {
                    bits::set(&mut signs[v * words..(v + 1) * words], h);
                    minus_size += 1;
                }
            }
            hyperplanes.push(OrientedHyperplane {
                id: h,
                edges: oriented,
                plus_size: n - minus_size,
                minus_size,
            });
        }

        let mut crossing_partners = vec![Vec::new(); n_h];
        for pairs in &square_edges {
            if let [(e1, _), (e2, _)] = pairs[..] {
                let (h, k) = (edge_class[e1], edge_class[e2]);
                if h != k {
                    crossing_partners[h].push(k);
                    crossing_partners[k].push(h);
                }
            }
        }
        for list in &mut crossing_partners {
            list.sort_unstable();
            list.dedup();
        }

        Ok(Self {
            hyperplanes,
            words,
            signs,
            crossings,
            crossing_partners,
        })
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn hyperplanes(&self) -> &[OrientedHyperplane] {
        &self.hyperplanes
    }

    pub fn get(&self, h: HyperplaneId) -> Result<&OrientedHyperplane, HyperplaneError> {
        self.hyperplanes.get(h).ok_or(HyperplaneError::Unknown(h))
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }

    /// Sign vector of `v`: bit `h` set iff `v ∈ H-`.
    pub(crate) fn sign_row(&self, v: VertexId) -> &[u64] {
        &self.signs[v * self.words..(v + 1) * self.words]
    }

    pub fn side(&self, v: VertexId, h: HyperplaneId) -> Side {
        if bits::get(self.sign_row(v), h) {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    #[inline]
    pub fn separates(&self, h: HyperplaneId, x: VertexId, y: VertexId) -> bool {
        bits::get(self.sign_row(x), h) != bits::get(self.sign_row(y), h)
    }

    /// `(hyperplane, opposite vertex)` for every edge at `v`, sorted by hyperplane.
    pub fn crossings_at(&self, v: VertexId) -> &[(HyperplaneId, VertexId)] {
        &self.crossings[v]
    }

    pub fn is_adjacent(&self, h: HyperplaneId, v: VertexId) -> bool {
        self.opposite_of(h, v).is_some()
    }

    /// The vertex across `h` from `v`, if `v` is adjacent to `h`.
    #[inline]
    pub fn opposite_of(&self, h: HyperplaneId, v: VertexId) -> Option<VertexId> {
        let list = &self.crossings[v];
        list.binary_search_by_key(&h, |e| e.0).ok().map(|i| list[i].1)
    }

    pub fn opposite(&self, h: HyperplaneId, v: VertexId) -> Result<VertexId, HyperplaneError> {
        self.get(h)?;
        if v >= self.crossings.len() {
            return Err(ComplexError::VertexOutOfRange {
                vertex: v,
                n_vertices: self.crossings.len(),
            }
            .into());
        }
        self.opposite_of(h, v)
            .ok_or(HyperplaneError::NotAdjacent { hyperplane: h, vertex: v })
    }

    pub fn hyperplane_of_edge(&self, u: VertexId, v: VertexId) -> Result<HyperplaneId, HyperplaneError> {
        self.crossings
            .get(u)
            .and_then(|list| list.iter().find(|e| e.1 == v))
            .map(|e| e.0)
            .ok_or(ComplexError::NotAnEdge(u, v).into())
    }

    pub fn separators(&self, x: VertexId, y: VertexId) -> SeparatorSet {
        let (a, b) = (self.sign_row(x), self.sign_row(y));
        let diff: Vec<u64> = a.iter().zip(b).map(|(p, q)| p ^ q).collect();
        SeparatorSet {
            x,
            y,
            hyperplanes: bits::ones(&diff).collect(),
        }
    }

    /// `|𝔥(x, y)|`.
    pub fn separator_count(&self, x: VertexId, y: VertexId) -> usize {
        bits::xor_count(self.sign_row(x), self.sign_row(y))
    }

    /// `𝔥(a, b) ⊆ 𝔥(x, y)`.
    pub fn separators_within(&self, a: VertexId, b: VertexId, x: VertexId, y: VertexId) -> bool {
        let (ra, rb, rx, ry) = (self.sign_row(a), self.sign_row(b), self.sign_row(x), self.sign_row(y));
        (0..self.words).all(|w| (ra[w] ^ rb[w]) & !(rx[w] ^ ry[w]) == 0)
    }

    /// Hyperplanes of 𝔥(x, y) adjacent to `x`, sorted.
    pub fn adjacent_separators(&self, x: VertexId, y: VertexId) -> Vec<HyperplaneId> {
        self.crossings[x]
            .iter()
            .filter(|(h, _)| self.separates(*h, x, y))
            .map(|e| e.0)
            .collect()
    }

    /// Crossing by square scan: some square has `h` on one pair of opposite
    /// edges and `k` on the other.
    pub fn crosses(&self, h: HyperplaneId, k: HyperplaneId) -> bool {
        self.crossing_partners[h].binary_search(&k).is_ok()
    }

    /// Crossing by the quadrant test: all four of `H± ∩ K±` are nonempty.
    pub fn crosses_by_quadrants(&self, h: HyperplaneId, k: HyperplaneId) -> bool {
        self.quadrant_counts(h, k).iter().all(|&c| c > 0)
    }

    /// Sizes of `H+∩K+, H+∩K-, H-∩K+, H-∩K-`.
    pub fn quadrant_counts(&self, h: HyperplaneId, k: HyperplaneId) -> [usize; 4] {
        let mut counts = [0; 4];
        for v in 0..self.crossings.len() {
            let row = self.sign_row(v);
            let q = (bits::get(row, h) as usize) << 1 | bits::get(row, k) as usize;
            counts[q] += 1;
        }
        counts
    }

    /// Whether `h` and `k` intersect, computed both ways; disagreement is an error.
    pub fn intersects(&self, h: HyperplaneId, k: HyperplaneId) -> Result<bool, HyperplaneError> {
        self.get(h)?;
        self.get(k)?;
        if h == k {
            return Err(HyperplaneError::SameHyperplane(h));
        }
        let by_square = self.crosses(h, k);
        let by_quadrants = self.crosses_by_quadrants(h, k);
        if by_square != by_quadrants {
            return Err(HyperplaneError::CrossingMismatch {
                h,
                k,
                by_square,
                by_quadrants,
            });
        }
        Ok(by_square)
    }

    /// Number of nonempty quadrants cut out by two parallel hyperplanes.
    pub fn parallel_component_count(&self, h: HyperplaneId, k: HyperplaneId) -> Result<usize, HyperplaneError> {
        if self.intersects(h, k)? {
            return Err(HyperplaneError::Intersecting(h, k));
        }
        Ok(self.quadrant_counts(h, k).iter().filter(|&&c| c > 0).count())
    }

    /// Vertices of the half-space of `h` on side `side`.
    pub fn half_space(&self, h: HyperplaneId, side: Side) -> Vec<VertexId> {
        (0..self.crossings.len()).filter(|&v| self.side(v, h) == side).collect()
    }

    /// The cube at `x` spanned by `hs`, each adjacent to `x` and separating it
    /// from `y`, together with the corner diagonally opposite `x`.
    pub fn spanning_cube(
        &self,
        complex: &CubeComplex,
        x: VertexId,
        hs: &[HyperplaneId],
        y: VertexId,
    ) -> Result<SpanningCube, HyperplaneError> {
        for &h in hs {
            self.get(h)?;
            if !self.separates(h, x, y) {
                return Err(HyperplaneError::NotSeparating { hyperplane: h, x, y });
            }
            if !self.is_adjacent(h, x) {
                return Err(HyperplaneError::NotAdjacent { hyperplane: h, vertex: x });
            }
        }
        let mut corners = vec![x];
        for &h in hs {
            let mut next = corners.clone();
            for &u in &corners {
                match self.opposite_of(h, u) {
                    Some(o) => next.push(o),
                    None => {
                        return Err(HyperplaneError::NoSpanningCube {
                            vertex: x,
                            hyperplanes: hs.to_vec(),
                            reason: format!("corner {u} is not adjacent to hyperplane {h}"),
                        })
                    }
                }
            }
            corners = next;
        }
        let diagonal = *corners.last().unwrap();
        let cube = Cube::new(corners);
        if cube.len() != 1 << hs.len() || !complex.is_cube(cube.vertices()) {
            return Err(HyperplaneError::NoSpanningCube {
                vertex: x,
                hyperplanes: hs.to_vec(),
                reason: format!("{:?} is not a cube of the complex", cube.vertices()),
            });
        }
        Ok(SpanningCube { cube, diagonal })
    }

    /// A geodesic from `x` to `y` crossing the separators adjacent to `x`
    /// first, through the diagonal of their spanning cube.
    pub fn fronted_geodesic(&self, complex: &CubeComplex, x: VertexId, y: VertexId) -> Result<EdgePath, HyperplaneError> {
        complex.distance(x, y)?;
        let front = self.adjacent_separators(x, y);
        let span = self.spanning_cube(complex, x, &front, y)?;
        let mut path = vec![x];
        let mut cur = x;
        for &h in &front {
            cur = self.opposite_of(h, cur).expect("spanning cube corners are adjacent");
            path.push(cur);
        }
        debug_assert_eq!(cur, span.diagonal);
        let rest = complex.some_geodesic(span.diagonal, y)?;
        path.extend_from_slice(&rest.vertices()[1..]);
        Ok(EdgePath::new(complex, path)?)
    }

    /// Greedy cube path: at each vertex, cross every adjacent hyperplane that
    /// still separates it from `y` through their spanning cube.
    pub fn normal_cube_path(&self, complex: &CubeComplex, x: VertexId, y: VertexId) -> Result<Vec<NormalCube>, HyperplaneError> {
        complex.distance(x, y)?;
        let mut out = Vec::new();
        let mut cur = x;
        while cur != y {
            let hs = self.adjacent_separators(cur, y);
            let span = self.spanning_cube(complex, cur, &hs, y)?;
            out.push(NormalCube {
                cube: span.cube.vertices().to_vec(),
                entry: cur,
                exit: span.diagonal,
                hyperplanes: hs,
            });
            cur = span.diagonal;
        }
        Ok(out)
    }

    pub fn report(&self) -> Vec<HyperplaneSummary> {
        self.hyperplanes
            .iter()
            .map(|h| HyperplaneSummary {
                id: h.id,
                edges: h.edges.clone(),
                plus_size: h.plus_size,
                minus_size: h.minus_size,
                boundary_plus: h.edges.len(),
                boundary_minus: h.edges.len(),
            })
            .collect()
    }
}

/// Per-hyperplane entry of the JSON hyperplane report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneSummary {
    pub id: HyperplaneId,
    pub edges: Vec<(VertexId, VertexId)>,
    pub plus_size: usize,
    pub minus_size: usize,
    pub boundary_plus: usize,
    pub boundary_minus: usize,
}
