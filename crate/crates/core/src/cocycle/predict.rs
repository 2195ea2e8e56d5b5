//! Closed-form matrix coefficients from a geodesic order, and the
//! decomposition of a symbolic cocycle by powers of `z`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly::SignedMonomial;
use super::SymbolicCocycle;
use crate::bits;
use crate::cat0::Cat0Complex;
use crate::complex::{EdgePath, VertexId};
use crate::hyperplanes::HyperplaneId;

/// The order in which a geodesic crosses 𝔥(x, y).
#[derive(Debug, Clone)]
pub struct GeodesicOrder {
    pub x: VertexId,
    pub y: VertexId,
    /// `H_1, …, H_n` in crossing order.
    pub hyperplanes: Vec<HyperplaneId>,
    /// Position of each hyperplane in the order, 1-based; 0 if absent.
    position: Vec<u32>,
}

impl GeodesicOrder {
    pub fn from_path(space: &Cat0Complex, path: &EdgePath) -> Result<Self, crate::hyperplanes::HyperplaneError> {
        let hs = space.hyperplanes();
        let hyperplanes = path
            .steps()
            .map(|(a, b)| hs.hyperplane_of_edge(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        let mut position = vec![0u32; hs.len()];
        for (i, &h) in hyperplanes.iter().enumerate() {
            position[h] = i as u32 + 1;
        }
        Ok(Self {
            x: path.start(),
            y: path.end(),
            hyperplanes,
            position,
        })
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn position(&self, h: HyperplaneId) -> Option<usize> {
        match self.position[h] {
            0 => None,
            p => Some(p as usize),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroReason {
    /// 𝔥(a, b) is not contained in 𝔥(x, y).
    SeparatorsNotContained,
    /// `a` lies outside 𝔠(x, y, b).
    OutsideHull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prediction {
    Zero { reason: ZeroReason },
    Monomial { monomial: SignedMonomial },
    /// Reflecting `a` along the restricted order reached `vertex`, which is
    /// not adjacent to `hyperplane`; the order on 𝔥(a, b) is not geodesic.
    NotGeodesic {
        step: usize,
        vertex: VertexId,
        hyperplane: HyperplaneId,
    },
}

impl Prediction {
    pub fn monomial(&self) -> Option<SignedMonomial> {
        match self {
            Prediction::Monomial { monomial } => Some(*monomial),
            _ => None,
        }
    }
}

/// Predicts `⟨c_z(x, y) δ_b, δ_a⟩` from the geodesic order `order` on 𝔥(x, y).
///
/// With 𝔥(a, b) = `{H_{n_1}, …, H_{n_p}}` (`n_1 < … < n_p`) and `a_j` the
/// reflection of `a_{j-1}` across `H_{n_j}`, the exponent of `w` is
/// `Σ ℓ_j` where `ℓ_j` counts the `H_k` with `n_j < k < n_{j+1}` adjacent to
/// `a_j`. Each crossing with `b` on the side of `x` contributes a sign `-1`.
pub fn predict_coefficient(space: &Cat0Complex, order: &GeodesicOrder, a: VertexId, b: VertexId) -> Prediction {
    let hs = space.hyperplanes();
    let (x, y) = (order.x, order.y);
    if !hs.separators_within(a, b, x, y) {
        return Prediction::Zero {
            reason: ZeroReason::SeparatorsNotContained,
        };
    }
    let (rx, ry, ra, rb) = (hs.sign_row(x), hs.sign_row(y), hs.sign_row(a), hs.sign_row(b));
    let outside = (0..hs.words()).any(|w| (ra[w] ^ rx[w]) & !((rx[w] ^ ry[w]) | (rx[w] ^ rb[w])) != 0);
    if outside {
        return Prediction::Zero {
            reason: ZeroReason::OutsideHull,
        };
    }

    let diff: Vec<u64> = ra.iter().zip(rb).map(|(p, q)| p ^ q).collect();
    let mut positions: Vec<usize> = bits::ones(&diff)
        .map(|h| order.position(h).expect("separators of (a, b) lie in the order"))
        .collect();
    positions.sort_unstable();
    let n = order.len();
    let p = positions.len();

    let adjacent_between = |v: VertexId, lo: usize, hi: usize| -> u32 {
        ((lo + 1)..hi)
            .filter(|&k| hs.is_adjacent(order.hyperplanes[k - 1], v))
            .count() as u32
    };

    let mut current = a;
    let mut ell = 0;
    let mut sign = 1i8;
    let mut lo = 0;
    for (j, &nj) in positions.iter().enumerate() {
        ell += adjacent_between(current, lo, nj);
        let h = order.hyperplanes[nj - 1];
        match hs.opposite_of(h, current) {
            Some(next) => current = next,
            None => {
                return Prediction::NotGeodesic {
                    step: j + 1,
                    vertex: current,
                    hyperplane: h,
                }
            }
        }
        if hs.separates(h, b, y) {
            sign = -sign;
        }
        lo = nj;
    }
    ell += adjacent_between(current, lo, n + 1);
    Prediction::Monomial {
        monomial: SignedMonomial::new(sign, p as u32, ell),
    }
}

/// Entries of `c^(k)`: the coefficient of `z^k`, each `±w^ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KComponent {
    pub k: u32,
    /// `(a, b, sign, ell)` sorted by `(b, a)`.
    pub entries: Vec<(VertexId, VertexId, i8, u32)>,
    /// Largest number of nonzero entries in a row.
    pub max_row: usize,
    /// Largest number of nonzero entries in a column.
    pub max_col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KDecomposition {
    pub x: VertexId,
    pub y: VertexId,
    pub distance: usize,
    /// Components with at least one entry, by increasing `k`. The implicit
    /// identity on unstored columns belongs to `k = 0`.
    pub components: Vec<KComponent>,
    /// Stored entries that are not signed monomials.
    pub unresolved: usize,
}

impl KDecomposition {
    pub fn component(&self, k: u32) -> Option<&KComponent> {
        self.components.iter().find(|c| c.k == k)
    }

    pub fn max_k(&self) -> u32 {
        self.components.iter().map(|c| c.k).max().unwrap_or(0)
    }
}

pub fn k_decomposition(sym: &SymbolicCocycle) -> KDecomposition {
    let n = sym.operator.dimension();
    let stored: Vec<VertexId> = sym.operator.stored_columns().iter().map(|c| c.0).collect();
    let mut by_k: BTreeMap<u32, Vec<(VertexId, VertexId, i8, u32)>> = BTreeMap::new();
    let mut unresolved = 0;
    for e in &sym.entries {
        match e.monomial {
            Some(m) => by_k.entry(m.k).or_default().push((e.a, e.b, m.sign, m.ell)),
            None => unresolved += 1,
        }
    }
    let identity_rows = n > stored.len();
    let components = by_k
        .into_iter()
        .map(|(k, entries)| {
            let mut rows: BTreeMap<VertexId, usize> = BTreeMap::new();
            let mut cols: BTreeMap<VertexId, usize> = BTreeMap::new();
            for &(a, b, _, _) in &entries {
                *rows.entry(a).or_default() += 1;
                *cols.entry(b).or_default() += 1;
            }
            if k == 0 {
                // Row a also meets the identity column a when column a is not stored.
                for (a, count) in rows.iter_mut() {
                    if stored.binary_search(a).is_err() {
                        *count += 1;
                    }
                }
            }
            let floor = usize::from(k == 0 && identity_rows);
            KComponent {
                k,
                max_row: rows.values().copied().max().unwrap_or(0).max(floor),
                max_col: cols.values().copied().max().unwrap_or(0).max(floor),
                entries,
            }
        })
        .collect();
    KDecomposition {
        x: sym.x,
        y: sym.y,
        distance: sym.path.len() - 1,
        components,
        unresolved,
    }
}
