//! Row producers for the norm scan, the interval audit and the coefficient table.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::algebra::norm_pairs;
use super::{SampleInfo, ZGrid};
use crate::cocycle::{
    cocycle, cocycle_symbolic, norm_bound, operator_norm, predict_coefficient, CirclePoint, CocycleError, GeodesicOrder,
    PowerIterationConfig, Prediction, Resolution,
};
use crate::complex::VertexId;
use crate::families::Family;
use crate::hulls::{HullError, IntervalAuditRow};

/// One row of the norm scan CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub family: String,
    pub x: VertexId,
    pub y: VertexId,
    pub z_re: f64,
    pub z_im: f64,
    pub norm: f64,
    pub bound: f64,
    pub tree_bound: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct NormScan {
    pub rows: Vec<NormRow>,
    pub sample: Option<SampleInfo>,
}

pub fn norm_scan(
    f: &Family,
    grid: &ZGrid,
    max_pairs: usize,
    seed: u64,
    power: &PowerIterationConfig,
    tolerance: f64,
) -> Result<NormScan, CocycleError> {
    let s = norm_pairs(f, max_pairs, seed);
    let zs = grid.points();
    let dim = f.space.dim();
    let name = f.name();
    let rows: Result<Vec<Vec<NormRow>>, CocycleError> = s
        .items
        .par_iter()
        .map(|&(x, y)| {
            let d = f.complex().d(x, y);
            zs.iter()
                .map(|&z: &Complex64| {
                    let pt = CirclePoint::float(z).expect("grid radius below one");
                    let est = operator_norm(&cocycle(&f.space, x, y, &pt)?, power)?;
                    let b = norm_bound(dim, d, z.norm())?;
                    Ok(NormRow {
                        family: name.clone(),
                        x,
                        y,
                        z_re: z.re,
                        z_im: z.im,
                        norm: est.norm,
                        bound: b.general,
                        tree_bound: b.tree,
                        pass: est.norm <= b.tightest() + tolerance,
                    })
                })
                .collect()
        })
        .collect();
    Ok(NormScan {
        rows: rows?.into_iter().flatten().collect(),
        sample: s.info,
    })
}

/// Interval-ball audit rows for every pair of a family, or a seeded sample.
pub fn interval_audit(f: &Family, max_pairs: usize, seed: u64) -> Result<(Vec<IntervalAuditRow>, Option<SampleInfo>), HullError> {
    let n = f.space.n_vertices();
    let s = super::sample_pairs(n, max_pairs, seed, "interval-audit");
    let name = f.name();
    let rows: Result<Vec<Vec<IntervalAuditRow>>, HullError> =
        s.items.par_iter().map(|&(x, y)| f.space.interval_audit(&name, x, y)).collect();
    Ok((rows?.into_iter().flatten().collect(), s.info))
}

/// One symbolic coefficient with its prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub a: VertexId,
    pub b: VertexId,
    pub polynomial: String,
    pub sign: Option<i8>,
    pub k: Option<u32>,
    pub ell: Option<u32>,
    pub resolution: Resolution,
    pub predicted: Prediction,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub family: String,
    pub x: VertexId,
    pub y: VertexId,
    pub distance: usize,
    pub path: Vec<VertexId>,
    /// Columns not listed act as the identity.
    pub entries: Vec<CoefficientRow>,
    pub all_agree: bool,
}

pub fn coefficient_table(f: &Family, x: VertexId, y: VertexId) -> Result<CoefficientTable, CocycleError> {
    let sym = cocycle_symbolic(&f.space, x, y)?;
    let path = f.complex().some_geodesic(x, y)?;
    let order = GeodesicOrder::from_path(&f.space, &path)?;
    let entries: Vec<CoefficientRow> = sym
        .entries
        .iter()
        .map(|e| {
            let predicted = predict_coefficient(&f.space, &order, e.a, e.b);
            CoefficientRow {
                a: e.a,
                b: e.b,
                polynomial: e.polynomial.to_string(),
                sign: e.monomial.map(|m| m.sign),
                k: e.monomial.map(|m| m.k),
                ell: e.monomial.map(|m| m.ell),
                resolution: e.resolution,
                agrees: e.monomial.is_some() && predicted.monomial() == e.monomial,
                predicted,
            }
        })
        .collect();
    Ok(CoefficientTable {
        family: f.name(),
        x,
        y,
        distance: path.len(),
        path: path.into_vertices(),
        all_agree: entries.iter().all(|r| r.agrees),
        entries,
    })
}
