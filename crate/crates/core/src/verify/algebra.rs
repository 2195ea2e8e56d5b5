//! Checks on the cocycle, its coefficients, norms and representations.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde_json::{json, Value};

use super::report::CheckRecord;
use super::{oops, sample_indices, sample_pairs, sample_triples, tally, tally_many, Check, Outcome, Sample, Stat, Tally, VerifyConfig};
use crate::cat0::Cat0Complex;
use crate::cocycle::{
    apply_path, cocycle, cocycle_equivariance, cocycle_exact, cocycle_symbolic_along, k_decomposition, norm_bound,
    operator_norm, predict_coefficient, verify_path_independence, Automorphism, CirclePoint, CocycleError,
    ExactOperator, GeodesicOrder, GroupAction, PythagoreanParameter, SignedMonomial, SparseOperator, ZWPolynomial,
};
use crate::complex::VertexId;
use crate::families::{automorphisms, generate, Budget, Family, FamilySpec};

pub(super) const SYMBOLIC_CHECKS: [Check; 6] = [
    Check::CornerCoefficient,
    Check::MonomialLaw,
    Check::SupportLaw,
    Check::FinitePropagation,
    Check::KVanishing,
    Check::Sparsity,
];

fn pair_json(p: &(VertexId, VertexId)) -> Value {
    json!({ "x": p.0, "y": p.1 })
}

fn z_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// `(k + d + 1)^d`, saturating.
pub fn sparsity_bound(k: u32, dim: usize) -> u128 {
    (k as u128 + dim as u128 + 1).saturating_pow(dim as u32)
}

/// One symbolic cocycle per pair feeds all six coefficient checks.
pub(super) fn symbolic_sweep(f: &Family, cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let space = &f.space;
    let (c, hs) = (space.complex(), space.hyperplanes());
    let n = c.n_vertices();
    let dim = space.dim();
    let tree = dim <= 1;
    let s = sample_pairs(n, cfg.max_pairs, cfg.seed, "cocycle.symbolic");
    let [corner, monomial, support, finite, kvan, sparse] = tally_many(&s.items, |&(x, y)| -> [Outcome; 6] {
        let computed = (|| -> Result<_, CocycleError> {
            let path = c.some_geodesic(x, y)?;
            let sym = cocycle_symbolic_along(space, &path)?;
            let order = GeodesicOrder::from_path(space, &path)?;
            Ok((path, sym, order))
        })();
        let (path, sym, order) = match computed {
            Ok(v) => v,
            Err(e) => return std::array::from_fn(|_| Err(oops(&e))),
        };
        let d = path.len();
        let op = &sym.operator;

        let want = SignedMonomial::new(1, d as u32, 0).to_polynomial();
        let got = op.entry(x, y);
        let corner = if got == want {
            Ok(Stat::default())
        } else {
            Err(json!({ "entry": got.to_string(), "expected": want.to_string() }))
        };

        let monomial = (|| -> Outcome {
            let mut st = Stat::default();
            for e in &sym.entries {
                let m = e.monomial.ok_or_else(|| {
                    json!({ "a": e.a, "b": e.b, "unresolved": e.polynomial.to_string() })
                })?;
                let pred = predict_coefficient(space, &order, e.a, e.b);
                let dab = c.d(e.a, e.b) as u32;
                if pred.monomial() != Some(m) || m.k != dab || m.ell as usize > 2 * dim {
                    return Err(json!({
                        "a": e.a, "b": e.b, "computed": m.to_string(),
                        "predicted": serde_json::to_value(pred).unwrap_or(Value::Null), "d_ab": dab,
                    }));
                }
                st.max = st.max.max(m.ell as f64);
                st.count += 1;
                st.flag += u64::from(e.resolution == crate::cocycle::Resolution::OnCircle);
            }
            // Columns left implicit carry the entry 1 on the diagonal.
            let stored: BTreeSet<VertexId> = op.stored_columns().iter().map(|c| c.0).collect();
            let one = Some(SignedMonomial::new(1, 0, 0));
            for b in (0..n).filter(|b| !stored.contains(b)) {
                let pred = predict_coefficient(space, &order, b, b);
                if pred.monomial() != one {
                    return Err(json!({ "a": b, "b": b, "computed": "1", "predicted": serde_json::to_value(pred).unwrap_or(Value::Null) }));
                }
                st.count += 1;
            }
            Ok(st)
        })();

        let support = (|| -> Outcome {
            let mut count = 0;
            for (b, col) in op.stored_columns() {
                let hull = space.convex_hull(&[x, y, *b]).map_err(oops)?;
                for (a, _) in col {
                    let nested = hs.separators_within(*a, *b, x, y);
                    if !nested || !hull.contains(*a) {
                        return Err(json!({ "a": a, "b": b, "separators_nested": nested, "in_hull": hull.contains(*a) }));
                    }
                    count += 1;
                }
            }
            Ok(Stat {
                count,
                ..Stat::default()
            })
        })();

        let finite = (|| -> Outcome {
            let mut worst = 0usize;
            for (a, b, _) in op.stored_entries() {
                let dab = c.d(a, b);
                if dab > d {
                    return Err(json!({ "a": a, "b": b, "d_ab": dab, "d_xy": d }));
                }
                worst = worst.max(dab);
            }
            Ok(Stat::max(worst as f64))
        })();

        let kd = k_decomposition(&sym);
        let kvan = if kd.max_k() as usize <= d && kd.unresolved == 0 {
            Ok(Stat {
                max: kd.components.len() as f64,
                count: 1,
                flag: u64::from(kd.component(d as u32).is_some()),
            })
        } else {
            Err(json!({ "max_k": kd.max_k(), "d_xy": d, "unresolved": kd.unresolved }))
        };

        let sparse = (|| -> Outcome {
            let mut worst: f64 = 0.0;
            for comp in &kd.components {
                let bound = if tree { 2 } else { sparsity_bound(comp.k, dim) };
                let m = comp.max_row.max(comp.max_col) as u128;
                if m > bound {
                    return Err(json!({ "k": comp.k, "max_row": comp.max_row, "max_col": comp.max_col, "bound": bound as u64 }));
                }
                worst = worst.max(m as f64 / bound as f64);
            }
            Ok(Stat::max(worst))
        })();

        [corner, monomial, support, finite, kvan, sparse]
    });
    let name = f.name();
    let describe = |i: usize| pair_json(&s.items[i]);
    let pairs = s.items.len() as u64;
    let top_nonzero = kvan.stat.flag;
    let (max_ell, entries, on_circle) = (monomial.stat.max, monomial.stat.count, monomial.stat.flag);
    let (support_entries, max_dab, sparse_ratio) = (support.stat.count, finite.stat.max, sparse.stat.max);
    vec![
        CheckRecord::from_tally(Check::CornerCoefficient, &name, corner, describe).with_sample(s.info.clone()),
        CheckRecord::from_tally(Check::MonomialLaw, &name, monomial, describe)
            .with_sample(s.info.clone())
            .with_metric("max_ell", max_ell)
            .with_metric("ell_bound", 2 * dim)
            .with_metric("entries", entries)
            .with_metric("resolved_on_circle", on_circle),
        CheckRecord::from_tally(Check::SupportLaw, &name, support, describe)
            .with_sample(s.info.clone())
            .with_metric("entries", support_entries),
        CheckRecord::from_tally(Check::FinitePropagation, &name, finite, describe)
            .with_sample(s.info.clone())
            .with_metric("max_d_ab", max_dab),
        CheckRecord::from_tally(Check::KVanishing, &name, kvan, describe)
            .with_sample(s.info.clone())
            .with_metric("pairs_with_nonzero_top_component", top_nonzero)
            .with_note(format!(
                "c^(k) vanishes for every k > d(x,y); the k = d(x,y) component is nonzero on {top_nonzero} of {pairs} pairs"
            )),
        CheckRecord::from_tally(Check::Sparsity, &name, sparse, describe)
            .with_sample(s.info)
            .with_metric("max_count_over_bound", sparse_ratio)
            .with_metric("tree_bound_used", tree),
    ]
}

fn exact_diff(a: &ExactOperator, b: &ExactOperator) -> Option<(VertexId, VertexId)> {
    match (a, b) {
        (ExactOperator::Base(p), ExactOperator::Base(q)) => p.first_difference(q),
        _ => a.to_big().first_difference(&b.to_big()),
    }
}

fn exact_is_identity(a: &ExactOperator) -> bool {
    match a {
        ExactOperator::Base(p) => p.is_identity(),
        ExactOperator::Big(p) => p.is_identity(),
    }
}

/// The cocycle along `path` applied to `start`, exactly.
fn exact_then(space: &Cat0Complex, path: &[VertexId], t: PythagoreanParameter, start: &ExactOperator) -> Result<ExactOperator, CocycleError> {
    if let ExactOperator::Base(s) = start {
        let r = apply_path(space, path, &t.base_rational(), s)?;
        if !r.overflowed() {
            return Ok(ExactOperator::Base(r));
        }
    }
    Ok(ExactOperator::Big(apply_path(space, path, &t.big_rational(), &start.to_big())?))
}

fn geodesic(space: &Cat0Complex, x: VertexId, y: VertexId) -> Result<Vec<VertexId>, CocycleError> {
    Ok(space.complex().some_geodesic(x, y)?.into_vertices())
}

pub(super) fn axioms(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let space = &f.space;
    let n = space.n_vertices();
    #[derive(Clone, Copy)]
    enum Case {
        Diagonal(VertexId),
        Inverse(VertexId, VertexId),
        Chain(VertexId, VertexId, VertexId),
    }
    let diag = sample_indices(n as u128, cfg.max_exact_pairs, cfg.seed, "cocycle.axioms.diagonal");
    let pairs = sample_pairs(n, cfg.max_exact_pairs, cfg.seed, "cocycle.axioms.inverse");
    let triples = sample_triples(n, cfg.max_exact_pairs, cfg.seed, "cocycle.axioms.chain");
    let mut cases: Vec<Case> = diag.items.iter().map(|&x| Case::Diagonal(x as usize)).collect();
    cases.extend(pairs.items.iter().map(|&(x, y)| Case::Inverse(x, y)));
    cases.extend(triples.items.iter().map(|&(v, x, y)| Case::Chain(v, x, y)));
    let points = &cfg.rational_points;
    let t = tally(&cases, |&case| {
        for &t in points {
            let bad = match case {
                Case::Diagonal(x) => {
                    let c = cocycle_exact(space, &[x], t).map_err(oops)?;
                    !exact_is_identity(&c)
                }
                Case::Inverse(x, y) => {
                    let cyx = cocycle_exact(space, &geodesic(space, y, x).map_err(oops)?, t).map_err(oops)?;
                    let prod = exact_then(space, &geodesic(space, x, y).map_err(oops)?, t, &cyx).map_err(oops)?;
                    !exact_is_identity(&prod)
                }
                Case::Chain(v, x, y) => {
                    let cxy = cocycle_exact(space, &geodesic(space, x, y).map_err(oops)?, t).map_err(oops)?;
                    let lhs = exact_then(space, &geodesic(space, v, x).map_err(oops)?, t, &cxy).map_err(oops)?;
                    let rhs = cocycle_exact(space, &geodesic(space, v, y).map_err(oops)?, t).map_err(oops)?;
                    exact_diff(&lhs, &rhs).is_some()
                }
            };
            if bad {
                return Err(json!({ "t": [t.p, t.q] }));
            }
        }
        Ok(Stat {
            count: points.len() as u64,
            ..Stat::default()
        })
    });
    let describe = |i: usize| match cases[i] {
        Case::Diagonal(x) => json!({ "identity": "c(x,x) = I", "x": x }),
        Case::Inverse(x, y) => json!({ "identity": "c(x,y)c(y,x) = I", "x": x, "y": y }),
        Case::Chain(v, x, y) => json!({ "identity": "c(v,x)c(x,y) = c(v,y)", "v": v, "x": x, "y": y }),
    };
    let sample = triples.info.clone().or(pairs.info.clone()).or(diag.info.clone());
    CheckRecord::from_tally(Check::Axioms, &f.name(), t, describe)
        .with_sample(sample)
        .with_metric("diagonal_cases", diag.items.len())
        .with_metric("inverse_cases", pairs.items.len())
        .with_metric("chain_cases", triples.items.len())
        .with_metric("rational_points", points.len())
        .with_note(if pairs.info.is_some() || triples.info.is_some() {
            "pairs and triples sampled beyond the exact cap"
        } else {
            "every vertex, pair and triple"
        })
}

pub(super) fn path_independence(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let space = &f.space;
    let s = sample_pairs(space.n_vertices(), cfg.max_path_pairs, cfg.seed, Check::PathIndependence.id());
    let t = tally(&s.items, |&(x, y)| {
        let r = verify_path_independence(space, x, y, cfg.geodesic_cap, &cfg.rational_points).map_err(oops)?;
        Ok(Stat {
            max: r.geodesics_compared as f64,
            count: (r.geodesics_compared + r.detours_compared) as u64,
            flag: u64::from(r.sampled),
        })
    });
    let (paths, capped) = (t.stat.count, t.stat.flag);
    CheckRecord::from_tally(Check::PathIndependence, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("paths_compared", paths)
        .with_metric("pairs_over_geodesic_cap", capped)
}

/// Nontrivial group elements, or a skipped record explaining why there are none.
fn group(f: &Family, cfg: &VerifyConfig, check: Check) -> Result<(Vec<Automorphism>, bool), CheckRecord> {
    let set = automorphisms(f).map_err(|e| CheckRecord::failed(check, &f.name(), oops(e)))?;
    if set.generators.is_empty() {
        let why = set.notice.unwrap_or_else(|| "no nontrivial automorphisms".into());
        return Err(CheckRecord::skipped(check, &f.name(), &why));
    }
    let action = GroupAction::new(0, set.generators);
    let (mut elements, truncated) = action.elements(f.space.n_vertices(), cfg.group_cap + 1);
    elements.retain(|g| !g.is_identity());
    elements.truncate(cfg.group_cap);
    Ok((elements, truncated))
}

pub(super) fn equivariance(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let (elements, truncated) = match group(f, cfg, Check::Equivariance) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let space = &f.space;
    let n = space.n_vertices() as u128;
    let s = sample_indices(elements.len() as u128 * n * n, cfg.max_exact_pairs, cfg.seed, Check::Equivariance.id());
    let decode = |i: u128| ((i / (n * n)) as usize, ((i / n) % n) as usize, (i % n) as usize);
    let t = tally(&s.items, |&i| {
        let (g, x, y) = decode(i);
        let g = &elements[g];
        for &t in &cfg.rational_points {
            let fast = cocycle_equivariance(space, g, x, y, &t.base_rational()).map_err(oops)?;
            if !fast.holds() {
                let exact = cocycle_equivariance(space, g, x, y, &t.big_rational()).map_err(oops)?;
                if let Some((a, b)) = exact.mismatch {
                    return Err(json!({ "t": [t.p, t.q], "gx": exact.gx, "gy": exact.gy, "entry": [a, b] }));
                }
            }
        }
        Ok(Stat::default())
    });
    CheckRecord::from_tally(Check::Equivariance, &f.name(), t, |i| {
        let (g, x, y) = decode(s.items[i]);
        json!({ "g": elements[g].as_slice(), "x": x, "y": y })
    })
    .with_sample(s.info)
    .with_metric("group_elements", elements.len())
    .with_metric("group_truncated", truncated)
}

pub(super) fn homomorphism(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let (elements, truncated) = match group(f, cfg, Check::Homomorphism) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let space = &f.space;
    let m = elements.len() as u128;
    let s = sample_indices(m * m, cfg.max_group_pairs, cfg.seed, Check::Homomorphism.id());
    let action = GroupAction::new(0, Vec::new());
    let points = cfg.float_grid();
    let t = tally(&s.items, |&i| {
        let (g, h) = (&elements[(i / m) as usize], &elements[(i % m) as usize]);
        let gh = g.compose(h);
        let mut worst: f64 = 0.0;
        for &z in &points {
            let pt = CirclePoint::float(z).map_err(oops)?;
            let lhs = action.representation(space, &gh, &pt).map_err(oops)?;
            let rhs = action
                .representation(space, g, &pt)
                .map_err(oops)?
                .mul(&action.representation(space, h, &pt).map_err(oops)?);
            let diff = lhs.max_abs_diff(&rhs);
            if diff > cfg.float_tolerance {
                return Err(json!({ "z": z_json(z), "max_abs_diff": diff }));
            }
            worst = worst.max(diff);
        }
        Ok(Stat::max(worst))
    });
    let worst = t.stat.max;
    CheckRecord::from_tally(Check::Homomorphism, &f.name(), t, |i| {
        let i = s.items[i];
        json!({ "g": elements[(i / m) as usize].as_slice(), "h": elements[(i % m) as usize].as_slice() })
    })
    .with_sample(s.info)
    .with_metric("max_abs_diff", worst)
    .with_metric("float_points", points.len())
    .with_metric("group_truncated", truncated)
}

pub(super) fn diagonal_coefficient(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let (elements, _) = match group(f, cfg, Check::DiagonalCoefficient) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let space = &f.space;
    let bases = sample_indices(space.n_vertices() as u128, 8, cfg.seed, "representation.bases");
    let items: Vec<(usize, VertexId)> = (0..elements.len())
        .flat_map(|g| bases.items.iter().map(move |&b| (g, b as VertexId)))
        .collect();
    let points = cfg.float_grid();
    let t = tally(&items, |&(g, base)| {
        let g = &elements[g];
        let action = GroupAction::new(base, Vec::new());
        let ell = action.length(space.complex(), g) as i32;
        let mut worst: f64 = 0.0;
        for &z in &points {
            let pt = CirclePoint::float(z).map_err(oops)?;
            let pi = action.representation(space, g, &pt).map_err(oops)?;
            let diff = (pi.entry(base, base) - z.powi(ell)).norm();
            if diff > cfg.float_tolerance {
                return Err(json!({ "z": z_json(z), "length": ell, "diff": diff }));
            }
            worst = worst.max(diff);
        }
        Ok(Stat::max(worst))
    });
    let worst = t.stat.max;
    CheckRecord::from_tally(Check::DiagonalCoefficient, &f.name(), t, |i| {
        let (g, base) = items[i];
        json!({ "g": elements[g].as_slice(), "base": base })
    })
    .with_sample(bases.info)
    .with_metric("max_abs_diff", worst)
}

pub(super) fn holomorphy(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let space = &f.space;
    let s = sample_pairs(space.n_vertices(), cfg.max_path_pairs, cfg.seed, Check::Holomorphy.id());
    let points: Vec<Complex64> = cfg.float_grid().into_iter().step_by(4).collect();
    let t = tally(&s.items, |&(x, y)| {
        let path = space.complex().some_geodesic(x, y).map_err(oops)?;
        let sym = cocycle_symbolic_along(space, &path).map_err(oops)?;
        let mut worst: f64 = 0.0;
        for &z in &points {
            let pt = CirclePoint::float(z).map_err(oops)?;
            let numeric = cocycle(space, x, y, &pt).map_err(oops)?;
            let evaluated: SparseOperator<Complex64> = sym.operator.map(|p: &ZWPolynomial| p.eval_complex(pt.z, pt.w));
            let diff = numeric.max_abs_diff(&evaluated);
            if diff > cfg.float_tolerance {
                return Err(json!({ "z": z_json(z), "max_abs_diff": diff }));
            }
            worst = worst.max(diff);
        }
        Ok(Stat::max(worst))
    });
    let worst = t.stat.max;
    CheckRecord::from_tally(Check::Holomorphy, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("max_abs_diff", worst)
}

pub(super) fn adjoint_symmetry(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let space = &f.space;
    let s = sample_pairs(space.n_vertices(), cfg.max_path_pairs, cfg.seed, Check::AdjointSymmetry.id());
    let points = cfg.float_grid();
    let t = tally(&s.items, |&(x, y)| {
        let mut worst: f64 = 0.0;
        for &z in &points {
            let lhs = cocycle(space, x, y, &CirclePoint::float(z).map_err(oops)?).map_err(oops)?;
            let rhs = cocycle(space, y, x, &CirclePoint::float(z.conj()).map_err(oops)?).map_err(oops)?;
            let diff = lhs.max_abs_diff(&rhs.adjoint());
            if diff > cfg.float_tolerance {
                return Err(json!({ "z": z_json(z), "max_abs_diff": diff }));
            }
            worst = worst.max(diff);
        }
        // real rational z: c(x,y) = c(y,x)^T exactly
        for &t in &cfg.rational_points {
            let pt = t.big_rational();
            let lhs = cocycle(space, x, y, &pt).map_err(oops)?;
            let rhs = cocycle(space, y, x, &pt).map_err(oops)?.transpose();
            if let Some((a, b)) = lhs.first_difference(&rhs) {
                return Err(json!({ "t": [t.p, t.q], "entry": [a, b] }));
            }
        }
        Ok(Stat::max(worst))
    });
    let worst = t.stat.max;
    CheckRecord::from_tally(Check::AdjointSymmetry, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("max_abs_diff", worst)
}

pub(super) fn unitarity(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let space = &f.space;
    let s = sample_pairs(space.n_vertices(), cfg.max_pairs, cfg.seed, Check::Unitarity.id());
    let zs = &cfg.real_z;
    let t = tally(&s.items, |&(x, y)| {
        let mut worst: f64 = 0.0;
        for &z in zs {
            let pt = CirclePoint::float(Complex64::new(z, 0.0)).map_err(oops)?;
            let defect = cocycle(space, x, y, &pt).map_err(oops)?.unitarity_defect();
            if defect > cfg.float_tolerance {
                return Err(json!({ "z": z, "defect": defect }));
            }
            worst = worst.max(defect);
        }
        Ok(Stat::max(worst))
    });
    let worst = t.stat.max;
    CheckRecord::from_tally(Check::Unitarity, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("max_defect", worst)
        .with_metric("real_z", zs.clone())
}

pub(super) fn norm_bound_check(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let space = &f.space;
    let dim = space.dim();
    let s = sample_pairs(space.n_vertices(), cfg.max_norm_pairs, cfg.seed, Check::NormBound.id());
    let zs = cfg.z_grid.points();
    let t = tally(&s.items, |&(x, y)| {
        let d = space.complex().d(x, y);
        let mut worst: f64 = 0.0;
        for &z in &zs {
            let pt = CirclePoint::float(z).map_err(oops)?;
            let op = cocycle(space, x, y, &pt).map_err(oops)?;
            let est = operator_norm(&op, &cfg.power).map_err(|e| json!({ "z": z_json(z), "error": e.to_string() }))?;
            let bound = norm_bound(dim, d, z.norm()).map_err(oops)?.general;
            if est.norm > bound + cfg.norm_tolerance {
                return Err(json!({ "z": z_json(z), "norm": est.norm, "bound": bound }));
            }
            worst = worst.max(est.norm / bound);
        }
        Ok(Stat {
            max: worst,
            count: zs.len() as u64,
            flag: 0,
        })
    });
    let (ratio, measured) = (t.stat.max, t.stat.count);
    CheckRecord::from_tally(Check::NormBound, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("max_norm_over_bound", ratio)
        .with_metric("norms_measured", measured)
        .with_metric("z_grid", cfg.z_grid.to_string())
}

/// Points `r e^{2πij/A}` for the tree radii.
fn tree_points(cfg: &VerifyConfig) -> Vec<Complex64> {
    cfg.tree_radii
        .iter()
        .flat_map(|&r| {
            (0..cfg.tree_angles).map(move |j| Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / cfg.tree_angles as f64))
        })
        .collect()
}

/// On a tree every `c_z(x, y)` is the segment cocycle of length `d(x, y)`
/// read along the path from `x` to `y`. Each pair is checked against that
/// form exactly, and the norm is measured once per length and point.
pub(super) fn tree_norm_bound(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let space = &f.space;
    if space.dim() > 1 {
        return CheckRecord::skipped(Check::TreeNormBound, &f.name(), "dimension above one");
    }
    let c = space.complex();
    let s = sample_pairs(c.n_vertices(), cfg.max_pairs, cfg.seed, Check::TreeNormBound.id());
    let max_d = s.items.iter().map(|&(x, y)| c.d(x, y)).max().unwrap_or(0);
    let segment = match generate(
        &FamilySpec::Segment(max_d),
        &Budget {
            max_vertices: max_d + 1,
            max_dim: 1,
        },
    ) {
        Ok(seg) => seg,
        Err(e) => return CheckRecord::failed(Check::TreeNormBound, &f.name(), oops(e)),
    };
    let canonical: Vec<Vec<(usize, usize, ZWPolynomial)>> = (0..=max_d)
        .map(|d| {
            cocycle(&segment.space, 0, d, &CirclePoint::symbolic())
                .map(|op| op.stored_entries().map(|(a, b, p)| (a, b, p.clone())).collect())
                .unwrap_or_default()
        })
        .collect();
    let shape = tally(&s.items, |&(x, y)| {
        let path = c.some_geodesic(x, y).map_err(oops)?;
        let mut pos = BTreeMap::new();
        for (i, &v) in path.vertices().iter().enumerate() {
            pos.insert(v, i);
        }
        let op = cocycle(space, x, y, &CirclePoint::symbolic()).map_err(oops)?;
        let mut relabelled = Vec::new();
        for (a, b, p) in op.stored_entries() {
            match (pos.get(&a), pos.get(&b)) {
                (Some(&i), Some(&j)) => relabelled.push((i, j, p.clone())),
                _ => return Err(json!({ "entry_off_path": [a, b] })),
            }
        }
        relabelled.sort_by_key(|e| (e.1, e.0));
        let mut want = canonical[path.len()].clone();
        want.sort_by_key(|e| (e.1, e.0));
        if relabelled == want {
            Ok(Stat::default())
        } else {
            Err(json!({ "differs_from_segment_of_length": path.len() }))
        }
    });
    let lengths: BTreeSet<usize> = s.items.iter().map(|&(x, y)| c.d(x, y)).collect();
    let zs = tree_points(cfg);
    let classes: Vec<(usize, Complex64)> = lengths.iter().flat_map(|&d| zs.iter().map(move |&z| (d, z))).collect();
    let norms = tally(&classes, |&(d, z)| {
        let pt = CirclePoint::float(z).map_err(oops)?;
        let op = cocycle(&segment.space, 0, d, &pt).map_err(oops)?;
        let est = operator_norm(&op, &cfg.power).map_err(oops)?;
        let bound = norm_bound(1, d, z.norm()).map_err(oops)?.tree.unwrap_or(f64::INFINITY);
        if est.norm > bound + cfg.norm_tolerance {
            return Err(json!({ "norm": est.norm, "bound": bound }));
        }
        Ok(Stat::max(est.norm / bound))
    });
    let ratio = norms.stat.max;
    let offset = s.items.len();
    let shifted = Tally {
        witness: norms.witness.map(|(i, w)| (i + offset, w)),
        ..norms
    };
    let merged = shape.merge(shifted);
    CheckRecord::from_tally(Check::TreeNormBound, &f.name(), merged, |i| {
        if i < offset {
            pair_json(&s.items[i])
        } else {
            let (d, z) = classes[i - offset];
            json!({ "length": d, "z": z_json(z) })
        }
    })
    .with_sample(s.info)
    .with_metric("max_norm_over_bound", ratio)
    .with_metric("lengths", lengths.len())
    .with_metric("z_points", zs.len())
    .with_note("each pair is matched exactly to the segment operator of its length; norms are measured once per length and z")
}

/// The pair sample used by [`super::scan`] for norm rows.
pub(super) fn norm_pairs(f: &Family, cap: usize, seed: u64) -> Sample<(VertexId, VertexId)> {
    sample_pairs(f.space.n_vertices(), cap, seed, "norm-scan")
}
