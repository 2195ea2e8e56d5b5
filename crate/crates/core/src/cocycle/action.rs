//! Cube-preserving vertex permutations, the representations
//! `π_z(g) = c_z(x, g·x) π(g)`, and the equivariance identity.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::operator::SparseOperator;
use super::point::CirclePoint;
use super::scalar::Scalar;
use super::{cocycle, CocycleError};
use crate::cat0::Cat0Complex;
use crate::complex::{CubeComplex, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("permutation has length {len}, complex has {n_vertices} vertices")]
    WrongLength { len: usize, n_vertices: usize },
    #[error("map is not a bijection: {0} is hit twice")]
    NotBijective(VertexId),
    #[error("cube {cube:?} maps to {image:?}, which is not a cube")]
    CubeNotPreserved { cube: Vec<VertexId>, image: Vec<VertexId> },
}

/// A vertex permutation mapping cubes to cubes; `perm[v]` is `g·v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Automorphism {
    perm: Vec<VertexId>,
}

impl Automorphism {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    /// Checks bijectivity and that every cube's image is a cube.
    pub fn new(complex: &CubeComplex, perm: Vec<VertexId>) -> Result<Self, ActionError> {
        let n = complex.n_vertices();
        if perm.len() != n {
            return Err(ActionError::WrongLength {
                len: perm.len(),
                n_vertices: n,
            });
        }
        let mut seen = vec![false; n];
        for &g in &perm {
            if g >= n || seen[g] {
                return Err(ActionError::NotBijective(g));
            }
            seen[g] = true;
        }
        for cube in complex.cubes() {
            let image: Vec<VertexId> = cube.vertices().iter().map(|&v| perm[v]).collect();
            if !complex.is_cube(&image) {
                let mut image = image;
                image.sort_unstable();
                return Err(ActionError::CubeNotPreserved {
                    cube: cube.vertices().to_vec(),
                    image,
                });
            }
        }
        Ok(Self { perm })
    }

    /// Composition without re-checking; both inputs are already automorphisms.
    pub fn compose(&self, other: &Self) -> Self {
        // (g h)·v = g·(h·v)
        Self {
            perm: other.perm.iter().map(|&v| self.perm[v]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (v, &g) in self.perm.iter().enumerate() {
            inv[g] = v;
        }
        Self { perm: inv }
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.perm[v]
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(v, &g)| v == g)
    }
}

/// Generators of a group of automorphisms and the base vertex defining
/// `π_z` and the length `ℓ(g) = d(x, g·x)`.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub base: VertexId,
    pub generators: Vec<Automorphism>,
}

impl GroupAction {
    pub fn new(base: VertexId, generators: Vec<Automorphism>) -> Self {
        Self { base, generators }
    }

    pub fn length(&self, complex: &CubeComplex, g: &Automorphism) -> usize {
        complex.d(self.base, g.apply(self.base))
    }

    /// The generated group, breadth-first from the identity, stopping at `cap`.
    pub fn elements(&self, n: usize, cap: usize) -> (Vec<Automorphism>, bool) {
        let id = Automorphism::identity(n);
        let mut seen: HashSet<Automorphism> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &self.generators {
                let h = s.compose(&g);
                if seen.insert(h.clone()) {
                    if out.len() >= cap {
                        return (out, true);
                    }
                    out.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        (out, false)
    }

    /// `π_z(g) = c_z(x, g·x) π(g)` with `π(g) δ_v = δ_{g·v}`.
    pub fn representation<T: Scalar>(
        &self,
        space: &Cat0Complex,
        g: &Automorphism,
        point: &CirclePoint<T>,
    ) -> Result<SparseOperator<T>, CocycleError> {
        let c = cocycle(space, self.base, g.apply(self.base), point)?;
        Ok(c.then_permute(g.as_slice()))
    }
}

/// Result of checking `π(g) c(x, y) π(g)⁻¹ = c(g·x, g·y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub x: VertexId,
    pub y: VertexId,
    pub gx: VertexId,
    pub gy: VertexId,
    /// First differing entry, if any.
    pub mismatch: Option<(VertexId, VertexId)>,
}

impl EquivarianceReport {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

pub fn cocycle_equivariance<T: Scalar>(
    space: &Cat0Complex,
    g: &Automorphism,
    x: VertexId,
    y: VertexId,
    point: &CirclePoint<T>,
) -> Result<EquivarianceReport, CocycleError> {
    let lhs = cocycle(space, x, y, point)?.conjugate_by(g.as_slice());
    let (gx, gy) = (g.apply(x), g.apply(y));
    let rhs = cocycle(space, gx, gy, point)?;
    Ok(EquivarianceReport {
        x,
        y,
        gx,
        gy,
        mismatch: lhs.first_difference(&rhs),
    })
}
