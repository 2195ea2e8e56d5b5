//! Cube-complex axioms and the combinatorial CAT(0) test.
//!
//! A complex is accepted when (a) singletons are cubes and cubes are closed
//! under pairwise intersection, (b) every cube induces a hypercube graph whose
//! faces are all cubes, (c) the 1-skeleton is a median graph, and (d) every
//! induced 4-cycle is a square of the complex. (c) and (d) together are the
//! median-graph characterisation of CAT(0) cube complexes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{faces_from_coordinates, hypercube_coordinates, CubeComplex, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Complexes up to this many vertices get the exhaustive median test.
    pub exhaustive_median_cap: usize,
    /// Number of random triples tested above the cap.
    pub median_samples: usize,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            exhaustive_median_cap: 500,
            median_samples: 20_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingSingleton { vertex: VertexId },
    IntersectionNotCube {
        first: Vec<VertexId>,
        second: Vec<VertexId>,
        intersection: Vec<VertexId>,
    },
    NotHypercube { cube: Vec<VertexId> },
    MissingFace { cube: Vec<VertexId>, face: Vec<VertexId> },
    Disconnected { components: usize, sizes: Vec<usize> },
    MedianCount { triple: [VertexId; 3], medians: Vec<VertexId> },
    UnfilledFourCycle { cycle: [VertexId; 4] },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MissingSingleton { vertex } => write!(f, "singleton {{{vertex}}} is not a cube"),
            Violation::IntersectionNotCube {
                first,
                second,
                intersection,
            } => write!(
                f,
                "cubes {first:?} and {second:?} meet in {intersection:?}, which is not a cube"
            ),
            Violation::NotHypercube { cube } => {
                write!(f, "cube {cube:?} does not induce a hypercube graph")
            }
            Violation::MissingFace { cube, face } => {
                write!(f, "face {face:?} of cube {cube:?} is missing")
            }
            Violation::Disconnected { components, sizes } => {
                write!(f, "1-skeleton has {components} components of sizes {sizes:?}")
            }
            Violation::MedianCount { triple, medians } => write!(
                f,
                "triple {triple:?} has {} medians {medians:?}",
                medians.len()
            ),
            Violation::UnfilledFourCycle { cycle } => {
                write!(f, "induced 4-cycle {cycle:?} is not a square")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_vertices: usize,
    pub n_cubes: usize,
    pub dim: usize,
    pub closure_ok: bool,
    pub cube_shapes_ok: bool,
    pub connected: bool,
    pub median_ok: bool,
    /// `false` when triples were sampled rather than enumerated.
    pub median_exhaustive: bool,
    pub median_triples_checked: u64,
    pub median_seed: Option<u64>,
    pub squares_ok: bool,
    /// The first violated condition, in the order (a) to (d).
    pub violation: Option<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

impl CubeComplex {
    pub fn validate(&self, options: &ValidationOptions) -> ValidationReport {
        let closure = self.check_closure();
        let shapes = self.check_cube_shapes();
        let connected = if self.is_connected() {
            None
        } else {
            Some(Violation::Disconnected {
                components: self.component_sizes.len(),
                sizes: self.component_sizes.clone(),
            })
        };
        let (median, exhaustive, checked) = if connected.is_none() {
            self.check_medians(options)
        } else {
            (None, false, 0)
        };
        let squares = self.check_four_cycles();
        let report = ValidationReport {
            n_vertices: self.n_vertices,
            n_cubes: self.cubes.len(),
            dim: self.dim,
            closure_ok: closure.is_none(),
            cube_shapes_ok: shapes.is_none(),
            connected: connected.is_none(),
            median_ok: median.is_none() && connected.is_none(),
            median_exhaustive: exhaustive,
            median_triples_checked: checked,
            median_seed: (!exhaustive && connected.is_none()).then_some(options.seed),
            squares_ok: squares.is_none(),
            violation: None,
        };
        ValidationReport {
            violation: closure.or(shapes).or(connected).or(median).or(squares),
            ..report
        }
    }

    fn check_closure(&self) -> Option<Violation> {
        for v in 0..self.n_vertices {
            if !self.index.contains_key(&vec![v]) {
                return Some(Violation::MissingSingleton { vertex: v });
            }
        }
        for v in 0..self.n_vertices {
            let at = &self.cubes_at[v];
            for (i, &a) in at.iter().enumerate() {
                for &b in &at[i + 1..] {
                    let meet = sorted_intersection(self.cubes[a].vertices(), self.cubes[b].vertices());
                    if !self.index.contains_key(&meet) {
                        return Some(Violation::IntersectionNotCube {
                            first: self.cubes[a].vertices().to_vec(),
                            second: self.cubes[b].vertices().to_vec(),
                            intersection: meet,
                        });
                    }
                }
            }
        }
        None
    }

    fn check_cube_shapes(&self) -> Option<Violation> {
        for c in self.cubes.iter().filter(|c| c.dim() >= 1) {
            let Some(coords) = hypercube_coordinates(c.vertices(), |u, v| self.is_edge(u, v)) else {
                return Some(Violation::NotHypercube {
                    cube: c.vertices().to_vec(),
                });
            };
            for face in faces_from_coordinates(&coords) {
                if !self.index.contains_key(&face) {
                    return Some(Violation::MissingFace {
                        cube: c.vertices().to_vec(),
                        face,
                    });
                }
            }
        }
        None
    }

    /// Median test; returns (violation, exhaustive, triples checked).
    fn check_medians(&self, options: &ValidationOptions) -> (Option<Violation>, bool, u64) {
        let n = self.n_vertices;
        if n <= options.exhaustive_median_cap {
            return (self.exhaustive_medians(), true, binomial3(n));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let triples: Vec<[VertexId; 3]> = (0..options.median_samples)
            .map(|_| [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)])
            .collect();
        let bad = triples.par_iter().find_map_first(|&t| {
            let medians = self.medians(t[0], t[1], t[2]);
            (medians.len() != 1).then_some(Violation::MedianCount { triple: t, medians })
        });
        (bad, false, options.median_samples as u64)
    }

    fn exhaustive_medians(&self) -> Option<Violation> {
        let n = self.n_vertices;
        let words = n.div_ceil(64);
        let intervals: Vec<u64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|x| {
                let mut rows = vec![0u64; n * words];
                for y in 0..n {
                    let dxy = self.d(x, y);
                    let row = &mut rows[y * words..(y + 1) * words];
                    for v in 0..n {
                        if self.d(x, v) + self.d(v, y) == dxy {
                            row[v / 64] |= 1 << (v % 64);
                        }
                    }
                }
                rows
            })
            .collect();
        let at = |x: usize, y: usize| &intervals[(x * n + y) * words..(x * n + y + 1) * words];
        (0..n).into_par_iter().find_map_first(|x| {
            for y in (x + 1)..n {
                let ixy = at(x, y);
                for z in (y + 1)..n {
                    let iyz = at(y, z);
                    let ixz = at(x, z);
                    let count: u32 = (0..words)
                        .map(|w| (ixy[w] & iyz[w] & ixz[w]).count_ones())
                        .sum();
                    if count != 1 {
                        return Some(Violation::MedianCount {
                            triple: [x, y, z],
                            medians: self.medians(x, y, z),
                        });
                    }
                }
            }
            None
        })
    }

    /// Vertices lying on geodesics between each pair of `x`, `y`, `z`.
    pub fn medians(&self, x: VertexId, y: VertexId, z: VertexId) -> Vec<VertexId> {
        let (dxy, dyz, dxz) = (self.d(x, y), self.d(y, z), self.d(x, z));
        (0..self.n_vertices)
            .filter(|&m| {
                self.d(x, m) + self.d(m, y) == dxy
                    && self.d(y, m) + self.d(m, z) == dyz
                    && self.d(x, m) + self.d(m, z) == dxz
            })
            .collect()
    }

    fn check_four_cycles(&self) -> Option<Violation> {
        for b in 0..self.n_vertices {
            let nb = &self.adjacency[b];
            for (i, &a) in nb.iter().enumerate() {
                for &c in &nb[i + 1..] {
                    if self.is_edge(a, c) {
                        continue;
                    }
                    for &d in &self.adjacency[a] {
                        if d == b || self.is_edge(d, b) || !self.is_edge(d, c) {
                            continue;
                        }
                        if !self.is_cube(&[a, b, c, d]) {
                            return Some(Violation::UnfilledFourCycle {
                                cycle: [a, b, c, d],
                            });
                        }
                    }
                }
            }
        }
        None
    }
}

fn sorted_intersection(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn binomial3(n: usize) -> u64 {
    let n = n as u64;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> ValidationOptions {
        ValidationOptions::default()
    }

    #[test]
    fn single_edge_is_valid() {
        let (c, _) = CubeComplex::from_cubes(2, vec![vec![0, 1]]).unwrap();
        let r = c.validate(&opts());
        assert!(r.is_valid(), "{:?}", r.violation);
        assert_eq!(r.dim, 1);
    }

    #[test]
    fn full_square_is_valid() {
        let (c, _) = CubeComplex::from_cubes(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let r = c.validate(&opts());
        assert!(r.is_valid());
        assert_eq!(r.dim, 2);
        assert_eq!(r.median_triples_checked, 4);
    }

    #[test]
    fn unfilled_four_cycle_is_rejected_with_the_cycle() {
        let (c, _) =
            CubeComplex::from_cubes(4, vec![vec![0, 1], vec![1, 3], vec![3, 2], vec![2, 0]]).unwrap();
        let r = c.validate(&opts());
        // The bare 4-cycle is a median graph; it fails only the square test.
        assert!(r.median_ok);
        match r.violation {
            Some(Violation::UnfilledFourCycle { cycle }) => {
                let mut s = cycle.to_vec();
                s.sort();
                assert_eq!(s, vec![0, 1, 2, 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn square_without_all_edges_is_not_a_hypercube() {
        let cubes = vec![
            vec![0],
            vec![1],
            vec![2],
            vec![3],
            vec![0, 1],
            vec![0, 2],
            vec![1, 3],
            vec![0, 1, 2, 3],
        ];
        let c = CubeComplex::from_cubes_exact(4, cubes).unwrap();
        let r = c.validate(&opts());
        assert!(matches!(r.violation, Some(Violation::NotHypercube { .. })), "{:?}", r.violation);
    }

    #[test]
    fn missing_face_is_reported() {
        let (full, _) = CubeComplex::from_cubes(8, vec![(0..8).collect()]).unwrap();
        let dropped = vec![0, 1, 2, 3];
        let cubes = full
            .cubes()
            .iter()
            .map(|c| c.vertices().to_vec())
            .filter(|c| *c != dropped);
        let c = CubeComplex::from_cubes_exact(8, cubes).unwrap();
        let r = c.validate(&opts());
        assert_eq!(
            r.violation,
            Some(Violation::MissingFace {
                cube: (0..8).collect(),
                face: dropped
            })
        );
    }

    #[test]
    fn missing_singleton_is_reported() {
        let c = CubeComplex::from_cubes_exact(2, vec![vec![0, 1], vec![0]]).unwrap();
        let r = c.validate(&opts());
        assert_eq!(r.violation, Some(Violation::MissingSingleton { vertex: 1 }));
    }

    #[test]
    fn theta_graph_has_two_medians() {
        // K_{2,3}: 0 and 1 both joined to 2, 3, 4.
        let cubes = vec![vec![0, 2], vec![0, 3], vec![0, 4], vec![1, 2], vec![1, 3], vec![1, 4]];
        let (c, _) = CubeComplex::from_cubes(5, cubes).unwrap();
        let r = c.validate(&opts());
        match r.violation {
            Some(Violation::MedianCount { medians, .. }) => assert_eq!(medians.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_squares_glued_on_a_diagonal_fail_closure() {
        // Squares 0-1-3-2 and 0-4-3-5 share the diagonal pair {0, 3}.
        let (c, _) = CubeComplex::from_cubes(6, vec![vec![0, 1, 2, 3], vec![0, 4, 5, 3]]).unwrap();
        let r = c.validate(&opts());
        assert!(matches!(r.violation, Some(Violation::IntersectionNotCube { .. })));
    }

    #[test]
    fn disconnected_complex_is_rejected() {
        let (c, _) = CubeComplex::from_cubes(3, vec![vec![0, 1]]).unwrap();
        let r = c.validate(&opts());
        assert!(matches!(r.violation, Some(Violation::Disconnected { components: 2, .. })));
    }

    #[test]
    fn sampled_median_test_records_seed() {
        let (c, _) = CubeComplex::from_cubes(30, (0..29).map(|i| vec![i, i + 1])).unwrap();
        let o = ValidationOptions {
            exhaustive_median_cap: 10,
            median_samples: 500,
            seed: 99,
        };
        let r = c.validate(&o);
        assert!(r.is_valid());
        assert!(!r.median_exhaustive);
        assert_eq!(r.median_seed, Some(99));
        assert_eq!(r.median_triples_checked, 500);
    }
}
