//! The operator-valued cocycle `c_z(x, y)` on `ℓ²` of the vertices.
//!
//! For an edge `{s, t}` crossing `H`, `c_z(s, t)` acts on each pair
//! `(δ_p, δ_m)` with `p` on the side of `s` and `m = p^op` by the block
//! `[[w, z], [-z, w]]` and fixes every `δ_v` with `v` not adjacent to `H`.
//! Along a path the factors are multiplied left to right.

mod action;
mod norm;
mod operator;
mod point;
mod poly;
mod predict;
mod scalar;

pub use action::{cocycle_equivariance, ActionError, Automorphism, EquivarianceReport, GroupAction};
pub use norm::{norm_bound, operator_norm, NormBound, NormError, NormEstimate, PowerIterationConfig};
pub use operator::{Column, SparseOperator};
pub use point::{distinct_parameters, standard_parameters, Branch, CirclePoint, PointError, PythagoreanParameter};
pub use poly::{SignedMonomial, ZWPolynomial};
pub use predict::{
    k_decomposition, predict_coefficient, GeodesicOrder, KComponent, KDecomposition, Prediction, ZeroReason,
};
pub use scalar::{BaseRational, Magnitude, Scalar};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cat0::Cat0Complex;
use crate::complex::{ComplexError, EdgePath, VertexId};
use crate::hyperplanes::{HyperplaneError, HyperplaneId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CocycleError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Hyperplane(#[from] HyperplaneError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("cocycle along {first:?} and {second:?} differ at entry ({a}, {b})")]
    PathDependence {
        first: Vec<VertexId>,
        second: Vec<VertexId>,
        a: VertexId,
        b: VertexId,
    },
}

/// Growable sparse vector over a dense scratch array.
struct Scratch<T> {
    val: Vec<T>,
    present: Vec<bool>,
    stamp: Vec<u32>,
    idx: Vec<VertexId>,
    epoch: u32,
}

impl<T: Scalar> Scratch<T> {
    fn new(n: usize) -> Self {
        Self {
            val: vec![T::zero(); n],
            present: vec![false; n],
            stamp: vec![0; n],
            idx: Vec::new(),
            epoch: 0,
        }
    }

    fn load(&mut self, column: &[(VertexId, T)]) {
        for (v, x) in column {
            self.present[*v] = true;
            self.val[*v] = x.clone();
            self.idx.push(*v);
        }
    }

    fn drain(&mut self) -> Column<T> {
        let mut out = Vec::with_capacity(self.idx.len());
        for &v in &self.idx {
            self.present[v] = false;
            let x = std::mem::replace(&mut self.val[v], T::zero());
            if !x.is_zero() {
                out.push((v, x));
            }
        }
        self.idx.clear();
        out.sort_unstable_by_key(|e| e.0);
        out
    }
}

/// One factor `c_z(s, t)`, flattened for the column sweep.
struct Step {
    hyperplane: HyperplaneId,
    source: VertexId,
}

fn steps_of(space: &Cat0Complex, path: &[VertexId]) -> Result<Vec<Step>, CocycleError> {
    let hs = space.hyperplanes();
    path.windows(2)
        .map(|e| {
            Ok(Step {
                hyperplane: hs.hyperplane_of_edge(e[0], e[1])?,
                source: e[0],
            })
        })
        .collect()
}

/// Applies `c_z(s, t)` to the vector held in `scratch`.
fn apply_step<T: Scalar>(space: &Cat0Complex, step: &Step, point: &CirclePoint<T>, minus_z: &T, scratch: &mut Scratch<T>) {
    let hs = space.hyperplanes();
    let h = step.hyperplane;
    scratch.epoch += 1;
    let epoch = scratch.epoch;
    let len = scratch.idx.len();
    for t in 0..len {
        let u = scratch.idx[t];
        if scratch.stamp[u] == epoch {
            continue;
        }
        let Some(o) = hs.opposite_of(h, u) else { continue };
        scratch.stamp[u] = epoch;
        scratch.stamp[o] = epoch;
        if !scratch.present[o] {
            scratch.present[o] = true;
            scratch.val[o] = T::zero();
            scratch.idx.push(o);
        }
        let (p, m) = if hs.separates(h, step.source, u) { (o, u) } else { (u, o) };
        let vp = &scratch.val[p];
        let vm = &scratch.val[m];
        let new_p = point.w.times(vp).plus(&point.z.times(vm));
        let new_m = point.w.times(vm).plus(&minus_z.times(vp));
        scratch.val[p] = new_p;
        scratch.val[m] = new_m;
    }
}

/// Vertices adjacent to at least one hyperplane crossed by the path.
fn path_support(space: &Cat0Complex, steps: &[Step]) -> Vec<VertexId> {
    let hs = space.hyperplanes();
    let mut hyperplanes: Vec<HyperplaneId> = steps.iter().map(|s| s.hyperplane).collect();
    hyperplanes.sort_unstable();
    hyperplanes.dedup();
    let mut out: Vec<VertexId> = hyperplanes
        .iter()
        .flat_map(|&h| hs.hyperplanes()[h].edges.iter().flat_map(|&(p, m)| [p, m]))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `c_z(v_0, v_1) ⋯ c_z(v_{n-1}, v_n) · start` for an arbitrary edge-path.
pub fn apply_path<T: Scalar>(
    space: &Cat0Complex,
    path: &[VertexId],
    point: &CirclePoint<T>,
    start: &SparseOperator<T>,
) -> Result<SparseOperator<T>, CocycleError> {
    for &v in path {
        space.complex().check_vertex(v)?;
    }
    let steps = steps_of(space, path)?;
    let n = space.n_vertices();
    let mut columns: Vec<VertexId> = path_support(space, &steps);
    columns.extend(start.stored_columns().iter().map(|c| c.0));
    columns.sort_unstable();
    columns.dedup();

    let minus_z = point.minus_z();
    let mut scratch = Scratch::new(n);
    let mut out = Vec::with_capacity(columns.len());
    for b in columns {
        scratch.load(&start.column(b));
        for step in steps.iter().rev() {
            apply_step(space, step, point, &minus_z, &mut scratch);
        }
        out.push((b, scratch.drain()));
    }
    Ok(SparseOperator::from_columns(n, out))
}

/// `c_z(x, y)` for an edge `{x, y}`.
pub fn elementary<T: Scalar>(space: &Cat0Complex, x: VertexId, y: VertexId, point: &CirclePoint<T>) -> Result<SparseOperator<T>, CocycleError> {
    apply_path(space, &[x, y], point, &SparseOperator::identity(space.n_vertices()))
}

/// The cocycle along an explicit edge-path.
pub fn cocycle_along<T: Scalar>(space: &Cat0Complex, path: &EdgePath, point: &CirclePoint<T>) -> Result<SparseOperator<T>, CocycleError> {
    apply_path(space, path.vertices(), point, &SparseOperator::identity(space.n_vertices()))
}

/// `c_z(x, y)` along the geodesic chosen by [`crate::complex::CubeComplex::some_geodesic`].
pub fn cocycle<T: Scalar>(space: &Cat0Complex, x: VertexId, y: VertexId, point: &CirclePoint<T>) -> Result<SparseOperator<T>, CocycleError> {
    let path = space.complex().some_geodesic(x, y)?;
    cocycle_along(space, &path, point)
}

/// Exact cocycle at a rational point, computed with `i128` numerators and
/// recomputed with big rationals if that overflows.
pub fn cocycle_exact(space: &Cat0Complex, path: &[VertexId], t: PythagoreanParameter) -> Result<ExactOperator, CocycleError> {
    let n = space.n_vertices();
    let fast = apply_path(space, path, &t.base_rational(), &SparseOperator::identity(n))?;
    if !fast.overflowed() {
        return Ok(ExactOperator::Base(fast));
    }
    Ok(ExactOperator::Big(apply_path(space, path, &t.big_rational(), &SparseOperator::identity(n))?))
}

/// An exact operator in whichever representation its computation fit in.
#[derive(Debug, Clone)]
pub enum ExactOperator {
    Base(SparseOperator<BaseRational>),
    Big(SparseOperator<BigRational>),
}

impl ExactOperator {
    pub fn to_big(&self) -> SparseOperator<BigRational> {
        match self {
            ExactOperator::Base(op) => op.map(|v| v.to_big_rational().expect("not overflowed")),
            ExactOperator::Big(op) => op.clone(),
        }
    }
}

/// How a symbolic entry was identified as a signed monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// The free-ring product is already `±z^k w^ℓ`.
    Direct,
    /// Equal to `±z^k w^ℓ` only after using `z² + w² = 1`.
    OnCircle,
    /// Not a signed monomial even on the circle.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicEntry {
    pub a: VertexId,
    pub b: VertexId,
    pub polynomial: ZWPolynomial,
    pub monomial: Option<SignedMonomial>,
    pub resolution: Resolution,
}

/// `c_z(x, y)` over `Z[z, w]` with each nonzero stored entry identified.
#[derive(Debug, Clone)]
pub struct SymbolicCocycle {
    pub x: VertexId,
    pub y: VertexId,
    pub path: Vec<VertexId>,
    pub operator: SparseOperator<ZWPolynomial>,
    pub entries: Vec<SymbolicEntry>,
}

impl SymbolicCocycle {
    pub fn fallback_count(&self) -> usize {
        self.entries.iter().filter(|e| e.resolution != Resolution::Direct).count()
    }

    pub fn monomial(&self, a: VertexId, b: VertexId) -> Option<SignedMonomial> {
        let stored = self.operator.stored_columns().binary_search_by_key(&b, |c| c.0).is_ok();
        if !stored {
            return (a == b).then(|| SignedMonomial::new(1, 0, 0));
        }
        self.entries
            .binary_search_by_key(&(b, a), |e| (e.b, e.a))
            .ok()
            .and_then(|i| self.entries[i].monomial)
    }
}

pub fn cocycle_symbolic(space: &Cat0Complex, x: VertexId, y: VertexId) -> Result<SymbolicCocycle, CocycleError> {
    let path = space.complex().some_geodesic(x, y)?;
    cocycle_symbolic_along(space, &path)
}

pub fn cocycle_symbolic_along(space: &Cat0Complex, path: &EdgePath) -> Result<SymbolicCocycle, CocycleError> {
    let operator = cocycle_along(space, path, &CirclePoint::symbolic())?;
    let d = path.len() as u32;
    let dim = space.dim() as u32;
    let mut entries: Vec<SymbolicEntry> = operator
        .stored_entries()
        .map(|(a, b, p)| {
            let (monomial, resolution) = match p.as_monomial() {
                Some(m) => (Some(m), Resolution::Direct),
                None => match identify_on_circle(p, d, dim) {
                    Some(m) => (Some(m), Resolution::OnCircle),
                    None => (None, Resolution::Unresolved),
                },
            };
            SymbolicEntry {
                a,
                b,
                polynomial: p.clone(),
                monomial,
                resolution,
            }
        })
        .collect();
    entries.sort_by_key(|e| (e.b, e.a));
    Ok(SymbolicCocycle {
        x: path.start(),
        y: path.end(),
        path: path.vertices().to_vec(),
        operator,
        entries,
    })
}

/// Finds `±z^k w^ℓ` equal to `p` on the circle, searching `k ≤ d`,
/// `ℓ ≤ 2·dim + d`, and confirms the match by exact evaluation at
/// `2·dim + d + 2` rational points.
fn identify_on_circle(p: &ZWPolynomial, d: u32, dim: u32) -> Option<SignedMonomial> {
    let reduced = p.reduce_circle();
    if reduced.is_zero() {
        return None;
    }
    let mut found = None;
    'search: for k in 0..=d {
        for ell in 0..=(2 * dim + d) {
            for sign in [1i8, -1] {
                let m = SignedMonomial::new(sign, k, ell);
                if m.to_polynomial().reduce_circle() == reduced {
                    found = Some(m);
                    break 'search;
                }
            }
        }
    }
    let m = found?;
    let points = distinct_parameters((2 * dim + d + 2) as usize);
    points
        .iter()
        .all(|t| {
            let pt = t.big_rational();
            p.eval_rational(&pt.z, &pt.w) == m.eval(&pt.z, &pt.w)
        })
        .then_some(m)
}

/// Outcome of comparing the cocycle along several paths with equal endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathIndependenceReport {
    pub x: VertexId,
    pub y: VertexId,
    pub geodesics_total: u128,
    pub geodesics_compared: usize,
    pub sampled: bool,
    pub detours_compared: usize,
    pub points: Vec<PythagoreanParameter>,
}

/// Compares the cocycle along all geodesics `x → y` (the first `cap` in
/// enumeration order when there are more) and along each geodesic with a
/// back-and-forth detour spliced in, exactly at the given rational points.
pub fn verify_path_independence(
    space: &Cat0Complex,
    x: VertexId,
    y: VertexId,
    cap: usize,
    points: &[PythagoreanParameter],
) -> Result<PathIndependenceReport, CocycleError> {
    let complex = space.complex();
    let geodesics = complex.all_geodesics(x, y, cap)?;
    let mut detours = 0;
    for t in points {
        let mut reference: Option<(Vec<VertexId>, SparseOperator<BigRational>)> = None;
        let mut check = |path: Vec<VertexId>, op: SparseOperator<BigRational>| -> Result<(), CocycleError> {
            match &reference {
                None => reference = Some((path, op)),
                Some((p0, r)) => {
                    if let Some((a, b)) = r.first_difference(&op) {
                        return Err(CocycleError::PathDependence {
                            first: p0.clone(),
                            second: path,
                            a,
                            b,
                        });
                    }
                }
            }
            Ok(())
        };
        for g in &geodesics.paths {
            let op = cocycle_exact(space, g.vertices(), *t)?.to_big();
            check(g.vertices().to_vec(), op)?;
            // splice v, v', v at the first vertex with a neighbour
            let vs = g.vertices();
            let pos = vs.len() / 2;
            if let Some(&nb) = complex.neighbors(vs[pos]).first() {
                let mut detour = vs[..=pos].to_vec();
                detour.push(nb);
                detour.extend_from_slice(&vs[pos..]);
                let op = cocycle_exact(space, &detour, *t)?.to_big();
                check(detour, op)?;
                detours += 1;
            }
        }
    }
    Ok(PathIndependenceReport {
        x,
        y,
        geodesics_total: geodesics.total,
        geodesics_compared: geodesics.paths.len(),
        sampled: geodesics.truncated,
        detours_compared: detours / points.len().max(1),
        points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests;
