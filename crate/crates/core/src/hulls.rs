//! Convex hulls as intersections of half-spaces, interval-ball counts, and
//! the splitting of an interval along a hyperplane adjacent to one endpoint.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits;
use crate::cat0::Cat0Complex;
use crate::complex::{ComplexError, Cube, VertexId};
use crate::hyperplanes::{HyperplaneError, HyperplaneId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HullError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Hyperplane(#[from] HyperplaneError),
    #[error("convex hull of the empty set")]
    EmptyGenerators,
    #[error("vertex {vertex} is not a corner of cube {cube:?}")]
    NotInCube { vertex: VertexId, cube: Vec<VertexId> },
    #[error("{cube:?} is not a cube of the complex")]
    UnknownCube { cube: Vec<VertexId> },
}

/// 𝔠(S) for a generating set `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexHull {
    pub generators: Vec<VertexId>,
    /// Sorted.
    pub members: Vec<VertexId>,
}

impl ConvexHull {
    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset_of(&self, other: &ConvexHull) -> bool {
        self.members.iter().all(|&v| other.contains(v))
    }
}

/// B(center, radius) in the edge-path metric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: VertexId,
    pub radius: usize,
    pub members: Vec<VertexId>,
}

/// The split of 𝔠(x, y) along a hyperplane `H` adjacent to `x`, with the
/// outcome of each property checked on it. `H+` here is the side of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDecomposition {
    pub x: VertexId,
    pub y: VertexId,
    pub hyperplane: HyperplaneId,
    pub x_op: VertexId,
    /// Member of 𝔠(x, y) on the side of `x` farthest from `x`, smallest id on ties.
    pub v: VertexId,
    pub near: ConvexHull,
    pub far: ConvexHull,
    pub interval_size: usize,
    /// 𝔠(x, y) ⊆ 𝔠(x, v) ∪ 𝔠(x^op, y).
    pub forward_inclusion: bool,
    /// Union equals 𝔠(x, y).
    pub equality: bool,
    pub disjoint: bool,
    /// Every vertex of 𝔠(x, y) on the side of `x` is adjacent to `H`.
    pub thin: bool,
    /// Every hyperplane of 𝔥(v, y) adjacent to `v` is `H`.
    pub adjacent_separator_is_h: bool,
    /// No hyperplane of 𝔥(v, y) other than `H` crosses `H`.
    pub far_separators_parallel: bool,
}

impl IntervalDecomposition {
    pub fn all_hold(&self) -> bool {
        self.forward_inclusion
            && self.equality
            && self.disjoint
            && self.thin
            && self.adjacent_separator_is_h
            && self.far_separators_parallel
    }
}

/// One row of the interval-ball audit CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalAuditRow {
    pub family: String,
    pub n: usize,
    pub x: VertexId,
    pub y: VertexId,
    pub k: usize,
    pub count: usize,
    pub bound: u128,
    pub pass: bool,
}

/// `(k+1)^d`, saturating.
pub fn interval_ball_bound(k: usize, dim: usize) -> u128 {
    (k as u128 + 1).saturating_pow(dim as u32)
}

impl Cat0Complex {
    /// Intersection of all half-spaces containing `s`.
    pub fn convex_hull(&self, s: &[VertexId]) -> Result<ConvexHull, HullError> {
        let first = *s.first().ok_or(HullError::EmptyGenerators)?;
        for &v in s {
            self.complex().check_vertex(v)?;
        }
        let hs = self.hyperplanes();
        let words = hs.words();
        let base = hs.sign_row(first);
        // Bits of hyperplanes on which every generator agrees with `first`.
        let mut fixed = vec![u64::MAX; words];
        for &g in s {
            let row = hs.sign_row(g);
            for w in 0..words {
                fixed[w] &= !(row[w] ^ base[w]);
            }
        }
        let inside = |v: VertexId| {
            let row = hs.sign_row(v);
            (0..words).all(|w| (row[w] ^ base[w]) & fixed[w] == 0)
        };
        // Half-space intersections are connected, so search outward from `first`.
        let mut seen = vec![false; self.n_vertices()];
        seen[first] = true;
        let mut members = vec![first];
        let mut i = 0;
        while i < members.len() {
            for &u in self.complex().neighbors(members[i]) {
                if !seen[u] && inside(u) {
                    seen[u] = true;
                    members.push(u);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        let mut generators = s.to_vec();
        generators.sort_unstable();
        generators.dedup();
        Ok(ConvexHull { generators, members })
    }

    /// 𝔠(x, y).
    pub fn interval(&self, x: VertexId, y: VertexId) -> Result<ConvexHull, HullError> {
        self.convex_hull(&[x, y])
    }

    /// Membership in 𝔠(x, y) by `𝔥(x, v) ⊆ 𝔥(x, y)`.
    #[inline]
    pub fn in_interval(&self, v: VertexId, x: VertexId, y: VertexId) -> bool {
        self.hyperplanes().separators_within(x, v, x, y)
    }

    pub fn ball(&self, center: VertexId, radius: usize) -> Result<Ball, HullError> {
        self.complex().check_vertex(center)?;
        Ok(Ball {
            center,
            radius,
            members: self.complex().ball(center, radius),
        })
    }

    /// #(𝔠(x, y) ∩ B(y, k)).
    pub fn interval_ball_count(&self, x: VertexId, y: VertexId, k: usize) -> Result<usize, HullError> {
        let profile = self.interval_ball_profile(x, y)?;
        Ok(profile[k.min(profile.len() - 1)])
    }

    /// Entry `k` is #(𝔠(x, y) ∩ B(y, k)) for `k = 0..=d(x, y)`; larger
    /// radii give the whole interval.
    pub fn interval_ball_profile(&self, x: VertexId, y: VertexId) -> Result<Vec<usize>, HullError> {
        let d = self.complex().distance(x, y)?;
        let mut hist = vec![0usize; d + 1];
        for v in self.interval(x, y)?.members {
            hist[self.complex().d(y, v)] += 1;
        }
        for k in 1..=d {
            hist[k] += hist[k - 1];
        }
        Ok(hist)
    }

    /// Audit rows for every `k = 0..=d(x, y)`.
    pub fn interval_audit(&self, family: &str, x: VertexId, y: VertexId) -> Result<Vec<IntervalAuditRow>, HullError> {
        let dim = self.dim();
        Ok(self
            .interval_ball_profile(x, y)?
            .into_iter()
            .enumerate()
            .map(|(k, count)| {
                let bound = interval_ball_bound(k, dim);
                IntervalAuditRow {
                    family: family.to_string(),
                    n: self.n_vertices(),
                    x,
                    y,
                    k,
                    count,
                    bound,
                    pass: count as u128 <= bound,
                }
            })
            .collect())
    }

    /// The corner `c` of `cube` with 𝔥(y, c) the hyperplanes separating `b`
    /// from `y` but not `x` from `y`, so that 𝔠(x, y, b) ⊆ 𝔠(x, c).
    pub fn cube_absorb(&self, x: VertexId, y: VertexId, b: VertexId, cube: &Cube) -> Result<VertexId, HullError> {
        self.complex().check_vertex(x)?;
        if !self.complex().is_cube(cube.vertices()) {
            return Err(HullError::UnknownCube {
                cube: cube.vertices().to_vec(),
            });
        }
        for v in [y, b] {
            if !cube.contains(v) {
                return Err(HullError::NotInCube {
                    vertex: v,
                    cube: cube.vertices().to_vec(),
                });
            }
        }
        let hs = self.hyperplanes();
        let wanted: Vec<HyperplaneId> = hs
            .separators(b, y)
            .hyperplanes
            .into_iter()
            .filter(|&h| !hs.separates(h, x, y))
            .collect();
        let mut c = y;
        for &h in &wanted {
            c = hs.opposite_of(h, c).ok_or(HullError::NotInCube {
                vertex: c,
                cube: cube.vertices().to_vec(),
            })?;
        }
        debug_assert!(cube.contains(c));
        Ok(c)
    }

    /// Splits 𝔠(x, y) along `h`, which must separate `x` from `y` and be
    /// adjacent to `x`.
    pub fn decompose_interval(&self, x: VertexId, y: VertexId, h: HyperplaneId) -> Result<IntervalDecomposition, HullError> {
        let complex = self.complex();
        let hs = self.hyperplanes();
        complex.distance(x, y)?;
        hs.get(h)?;
        if !hs.separates(h, x, y) {
            return Err(HyperplaneError::NotSeparating { hyperplane: h, x, y }.into());
        }
        let x_op = hs.opposite(h, x)?;
        let whole = self.interval(x, y)?;
        let on_x_side = |u: VertexId| !hs.separates(h, x, u);

        let v = whole
            .members
            .iter()
            .copied()
            .filter(|&u| on_x_side(u))
            .max_by(|&a, &b| complex.d(x, a).cmp(&complex.d(x, b)).then(b.cmp(&a)))
            .expect("x lies in its own interval");
        let near = self.interval(x, v)?;
        let far = self.interval(x_op, y)?;

        let forward_inclusion = whole.members.iter().all(|&u| near.contains(u) || far.contains(u));
        let equality = forward_inclusion && near.is_subset_of(&whole) && far.is_subset_of(&whole);
        let disjoint = near.members.iter().all(|&u| !far.contains(u));
        let thin = whole
            .members
            .iter()
            .filter(|&&u| on_x_side(u))
            .all(|&u| hs.is_adjacent(h, u));
        let adjacent_separator_is_h = hs.adjacent_separators(v, y).iter().all(|&k| k == h);
        let far_separators_parallel = hs
            .separators(v, y)
            .hyperplanes
            .iter()
            .all(|&k| k == h || !hs.crosses(h, k));

        Ok(IntervalDecomposition {
            x,
            y,
            hyperplane: h,
            x_op,
            v,
            interval_size: whole.len(),
            near,
            far,
            forward_inclusion,
            equality,
            disjoint,
            thin,
            adjacent_separator_is_h,
            far_separators_parallel,
        })
    }
}

/// Hyperplanes in 𝔥(x, y) ∖ 𝔥(a, b) that are not in 𝔥(a, x) △ 𝔥(b, y);
/// always empty in a CAT(0) complex.
pub fn symmetric_difference_violations(
    space: &Cat0Complex,
    x: VertexId,
    y: VertexId,
    a: VertexId,
    b: VertexId,
) -> Vec<HyperplaneId> {
    let hs = space.hyperplanes();
    let (rx, ry, ra, rb) = (hs.sign_row(x), hs.sign_row(y), hs.sign_row(a), hs.sign_row(b));
    let bad: Vec<u64> = (0..hs.words())
        .map(|w| {
            let lhs = (rx[w] ^ ry[w]) & !(ra[w] ^ rb[w]);
            let rhs = (ra[w] ^ rx[w]) ^ (rb[w] ^ ry[w]);
            lhs & !rhs
        })
        .collect();
    bits::ones(&bad).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::CubeComplex;

    fn grid(m: usize, n: usize) -> Cat0Complex {
        let idx = |i: usize, j: usize| (n + 1) * i + j;
        let mut cubes = Vec::new();
        for i in 0..m {
            for j in 0..n {
                cubes.push(vec![idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)]);
            }
        }
        Cat0Complex::new(CubeComplex::from_cubes((m + 1) * (n + 1), cubes).unwrap().0).unwrap()
    }

    fn segment(n: usize) -> Cat0Complex {
        Cat0Complex::new(CubeComplex::from_cubes(n + 1, (0..n).map(|i| vec![i, i + 1])).unwrap().0).unwrap()
    }

    #[test]
    fn hull_examples() {
        let g = grid(2, 3);
        assert_eq!(g.convex_hull(&[5]).unwrap().members, vec![5]);
        assert_eq!(g.interval(0, 11).unwrap().len(), 12);
        let sq = grid(1, 1);
        assert_eq!(sq.interval(0, 3).unwrap().members, vec![0, 1, 2, 3]);
        assert_eq!(g.convex_hull(&[]), Err(HullError::EmptyGenerators));
    }

    #[test]
    fn interval_matches_union_of_geodesics() {
        let g = grid(2, 3);
        for x in 0..12 {
            for y in 0..12 {
                let geo = g.complex().all_geodesics(x, y, 10_000).unwrap();
                let mut union: Vec<_> = geo.paths.iter().flat_map(|p| p.vertices().to_vec()).collect();
                union.sort();
                union.dedup();
                assert_eq!(g.interval(x, y).unwrap().members, union, "{x} {y}");
            }
        }
    }

    #[test]
    fn interval_ball_examples() {
        let s = segment(5);
        for k in 0..7 {
            assert_eq!(s.interval_ball_count(1, 4, k).unwrap(), (k + 1).min(4));
        }
        let sq = grid(1, 1);
        assert_eq!(sq.interval_ball_count(0, 3, 1).unwrap(), 3);
        let g = grid(3, 3);
        let count = g.interval_ball_count(0, 15, 2).unwrap();
        let brute = (0..16)
            .filter(|&v| g.complex().d(0, v) + g.complex().d(v, 15) == 6 && g.complex().d(15, v) <= 2)
            .count();
        assert_eq!(count, brute);
        assert!(count <= 9);
    }

    #[test]
    fn cube_absorb_examples() {
        let g = grid(2, 2);
        let sq = Cube::new(vec![4, 5, 7, 8]);
        assert_eq!(g.cube_absorb(0, 4, 4, &sq).unwrap(), 4);
        for y in [4, 5, 7, 8] {
            for b in [4, 5, 7, 8] {
                for x in 0..9 {
                    let c = g.cube_absorb(x, y, b, &sq).unwrap();
                    let target = g.interval(x, c).unwrap();
                    let hull = g.convex_hull(&[x, y, b]).unwrap();
                    assert!(hull.is_subset_of(&target), "x={x} y={y} b={b} c={c}");
                }
            }
        }
        assert!(matches!(g.cube_absorb(0, 0, 4, &sq), Err(HullError::NotInCube { vertex: 0, .. })));
    }

    #[test]
    fn decompose_segment_and_square() {
        let s = segment(4);
        let d = s.decompose_interval(0, 4, s.hyperplanes().hyperplane_of_edge(0, 1).unwrap()).unwrap();
        assert_eq!(d.v, 0);
        assert_eq!(d.near.members, vec![0]);
        assert_eq!(d.far.members, vec![1, 2, 3, 4]);
        assert!(d.all_hold());

        let sq = grid(1, 1);
        for h in 0..2 {
            let d = sq.decompose_interval(0, 3, h).unwrap();
            assert_eq!((d.near.len(), d.far.len()), (2, 2));
            assert_eq!(sq.hyperplanes().opposite(h, 0).unwrap(), d.x_op);
            assert!(d.all_hold());
        }
    }

    #[test]
    fn decompose_grid_exhaustive() {
        let g = grid(2, 3);
        for x in 0..12 {
            for y in 0..12 {
                for h in g.hyperplanes().adjacent_separators(x, y) {
                    let d = g.decompose_interval(x, y, h).unwrap();
                    assert!(d.all_hold(), "{d:?}");
                    assert_eq!(d.near.len() + d.far.len(), d.interval_size);
                }
            }
        }
    }

    #[test]
    fn decompose_rejects_bad_hyperplane() {
        let s = segment(3);
        let far = s.hyperplanes().hyperplane_of_edge(2, 3).unwrap();
        assert!(matches!(
            s.decompose_interval(0, 3, far),
            Err(HullError::Hyperplane(HyperplaneError::NotAdjacent { .. }))
        ));
        assert!(matches!(
            s.decompose_interval(0, 1, far),
            Err(HullError::Hyperplane(HyperplaneError::NotSeparating { .. }))
        ));
    }

    #[test]
    fn symmetric_difference_holds_on_grid() {
        let g = grid(2, 2);
        for x in 0..9 {
            for y in 0..9 {
                for a in 0..9 {
                    for b in 0..9 {
                        assert!(symmetric_difference_violations(&g, x, y, a, b).is_empty());
                    }
                }
            }
        }
    }
}
