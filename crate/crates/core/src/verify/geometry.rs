//! Checks on the complex, its hyperplanes and its convex hulls.

use std::collections::{HashSet, VecDeque};

use serde_json::{json, Value};

use super::report::{CheckRecord, SampleInfo};
use super::{oops, sample_indices, sample_pairs, sample_quadruples, sample_triples, tally, Check, Sample, Stat, VerifyConfig};
use crate::complex::{LoadReport, ValidationReport, VertexId};
use crate::families::{generate, Budget, Family, FamilySpec};
use crate::hulls::{interval_ball_bound, symmetric_difference_violations};
use crate::hyperplanes::Side;

fn pair_json(p: &(VertexId, VertexId)) -> Value {
    json!({ "x": p.0, "y": p.1 })
}

/// Every pair on families within the audit size, a sample above it.
fn audit_pairs(f: &Family, cfg: &VerifyConfig, salt: &str) -> Sample<(VertexId, VertexId)> {
    let n = f.complex().n_vertices();
    let cap = if n <= cfg.audit_max_vertices { n * n } else { cfg.max_pairs };
    sample_pairs(n, cap, cfg.seed, salt)
}

pub(super) fn validate(f: &Family) -> CheckRecord {
    validation_record(&f.name(), &f.validation, &f.load)
}

pub(super) fn validation_record(name: &str, v: &ValidationReport, load: &LoadReport) -> CheckRecord {
    let mut r = CheckRecord::new(Check::Validate, name);
    r.instances = 1;
    if let Some(violation) = &v.violation {
        r.failures = 1;
        r.status = super::Status::Fail;
        r.witness = serde_json::to_value(violation).ok();
    } else {
        r.status = super::Status::Pass;
    }
    if !v.median_exhaustive {
        let n = v.n_vertices as u128;
        r.sample = Some(SampleInfo {
            seed: v.median_seed.unwrap_or_default(),
            stream: "median".into(),
            population: n * n * n,
            size: v.median_triples_checked as usize,
        });
    }
    r.with_metric("median_triples_checked", v.median_triples_checked)
        .with_metric("dim", v.dim)
        .with_metric("cubes", v.n_cubes)
        .with_metric("faces_added", load.faces_added)
}

pub(super) fn distance_separators(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let s = audit_pairs(f, cfg, Check::DistanceSeparators.id());
    let (c, hs) = (f.complex(), f.space.hyperplanes());
    let t = tally(&s.items, |&(x, y)| {
        let (d, h) = (c.d(x, y), hs.separator_count(x, y));
        if d == h {
            Ok(Stat::max(d as f64))
        } else {
            Err(json!({ "distance": d, "separators": h }))
        }
    });
    CheckRecord::from_tally(Check::DistanceSeparators, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
}

pub(super) fn interval_characterization(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let n = f.complex().n_vertices();
    let cap = if n <= cfg.triple_max_vertices { n * n } else { cfg.max_exact_pairs };
    let s = sample_pairs(n, cap, cfg.seed, Check::IntervalCharacterization.id());
    let c = f.complex();
    let t = tally(&s.items, |&(x, y)| {
        let mut on = vec![false; n];
        for v in c.geodesic_vertices(x, y) {
            on[v] = true;
        }
        let hull = f.space.convex_hull(&[x, y]).map_err(oops)?;
        let dxy = c.d(x, y);
        for v in 0..n {
            let additive = c.d(x, v) + c.d(v, y) == dxy;
            let nested = f.space.in_interval(v, x, y);
            let in_hull = hull.contains(v);
            if on[v] != additive || additive != nested || nested != in_hull {
                return Err(json!({
                    "v": v, "on_geodesic": on[v], "distance_additive": additive,
                    "separators_nested": nested, "in_hull": in_hull,
                }));
            }
        }
        Ok(Stat {
            count: n as u64,
            ..Stat::default()
        })
    });
    let triples = t.stat.count;
    CheckRecord::from_tally(Check::IntervalCharacterization, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("triples", triples)
}

pub(super) fn corner_moves(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let s = sample_pairs(f.complex().n_vertices(), cfg.max_path_pairs, cfg.seed, Check::CornerMoves.id());
    let c = f.complex();
    let t = tally(&s.items, |&(x, y)| {
        let all = c.all_geodesics(x, y, cfg.geodesic_cap).map_err(oops)?;
        if all.truncated {
            return Ok(Stat {
                flag: 1,
                ..Stat::default()
            });
        }
        let target: HashSet<Vec<VertexId>> = all.paths.iter().map(|p| p.vertices().to_vec()).collect();
        let mut seen: HashSet<Vec<VertexId>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(all.paths[0].vertices().to_vec());
        queue.push_back(all.paths[0].clone());
        while let Some(p) = queue.pop_front() {
            for q in c.corner_move_neighbors(&p) {
                if seen.insert(q.vertices().to_vec()) {
                    queue.push_back(q);
                }
            }
        }
        if seen == target {
            Ok(Stat {
                max: all.paths.len() as f64,
                count: all.paths.len() as u64,
                flag: 0,
            })
        } else {
            Err(json!({ "geodesics": target.len(), "reached": seen.len() }))
        }
    });
    let (geodesics, over_cap) = (t.stat.count, t.stat.flag);
    CheckRecord::from_tally(Check::CornerMoves, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("geodesics", geodesics)
        .with_metric("pairs_over_geodesic_cap", over_cap)
}

pub(super) fn unique_median(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let c = f.complex();
    let s = sample_triples(c.n_vertices(), cfg.max_tuples, cfg.seed, Check::UniqueMedian.id());
    let t = tally(&s.items, |&(x, y, z)| {
        let m = c.medians(x, y, z);
        if m.len() == 1 {
            Ok(Stat::default())
        } else {
            Err(json!({ "medians": m }))
        }
    });
    CheckRecord::from_tally(Check::UniqueMedian, &f.name(), t, |i| {
        let (x, y, z) = s.items[i];
        json!([x, y, z])
    })
    .with_sample(s.info)
}

pub(super) fn two_sided(f: &Family) -> CheckRecord {
    let hs = f.space.hyperplanes();
    let n = f.complex().n_vertices();
    let ids: Vec<usize> = (0..hs.len()).collect();
    let t = tally(&ids, |&h| {
        let edge = hs.hyperplanes()[h].edges[0];
        let mut side = vec![0u8; n];
        for (mark, start) in [(1u8, edge.0), (2u8, edge.1)] {
            let mut queue = VecDeque::from([start]);
            side[start] = mark;
            while let Some(v) = queue.pop_front() {
                for &(k, u) in hs.crossings_at(v) {
                    if k != h && side[u] == 0 {
                        side[u] = mark;
                        queue.push_back(u);
                    } else if k != h && side[u] != mark {
                        return Err(json!({ "hyperplane": h, "joined_at": [v, u] }));
                    }
                }
            }
        }
        let plus = hs.half_space(h, Side::Plus);
        let unreached = side.iter().filter(|&&m| m == 0).count();
        let plus_ok = plus.iter().all(|&v| side[v] == 1) && plus.len() == side.iter().filter(|&&m| m == 1).count();
        if unreached > 0 || !plus_ok {
            return Err(json!({ "hyperplane": h, "unreached": unreached, "plus_side_matches": plus_ok }));
        }
        Ok(Stat::max(hs.hyperplanes()[h].edges.len() as f64))
    });
    CheckRecord::from_tally(Check::TwoSided, &f.name(), t, |i| json!({ "hyperplane": ids[i] }))
        .with_metric("hyperplanes", hs.len())
}

pub(super) fn no_self_crossing(f: &Family) -> CheckRecord {
    let hs = f.space.hyperplanes();
    let vs: Vec<VertexId> = (0..f.complex().n_vertices()).collect();
    let t = tally(&vs, |&v| {
        let mut ids: Vec<usize> = hs.crossings_at(v).iter().map(|c| c.0).collect();
        ids.sort_unstable();
        match ids.windows(2).find(|w| w[0] == w[1]) {
            Some(w) => Err(json!({ "hyperplane": w[0] })),
            None => Ok(Stat::max(ids.len() as f64)),
        }
    });
    CheckRecord::from_tally(Check::NoSelfCrossing, &f.name(), t, |i| json!({ "vertex": vs[i] }))
}

pub(super) fn intersection_square(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let (c, hs) = (f.complex(), f.space.hyperplanes());
    let s = sample_indices(c.n_vertices() as u128, 500, cfg.seed, Check::IntersectionSquare.id());
    let t = tally(&s.items, |&v| {
        let v = v as VertexId;
        let mut count = 0;
        let cross = hs.crossings_at(v);
        for (i, &(h, u)) in cross.iter().enumerate() {
            for &(k, w) in &cross[i + 1..] {
                let meets = hs.intersects(h, k).map_err(oops)?;
                let square = hs
                    .opposite_of(k, u)
                    .is_some_and(|t| c.is_edge(w, t) && c.is_cube(&[v, u, w, t]));
                if meets != square {
                    return Err(json!({ "hyperplanes": [h, k], "intersect": meets, "square_at_vertex": square }));
                }
                count += 1;
            }
        }
        Ok(Stat {
            count,
            ..Stat::default()
        })
    });
    let pairs = t.stat.count;
    CheckRecord::from_tally(Check::IntersectionSquare, &f.name(), t, |i| json!({ "vertex": s.items[i] as u64 }))
        .with_sample(s.info)
        .with_metric("hyperplane_pairs", pairs)
}

pub(super) fn fronted_geodesic(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let (c, hs) = (f.complex(), f.space.hyperplanes());
    let s = sample_pairs(c.n_vertices(), cfg.max_exact_pairs, cfg.seed, Check::FrontedGeodesic.id());
    let t = tally(&s.items, |&(x, y)| {
        let path = hs.fronted_geodesic(c, x, y).map_err(oops)?;
        let front = hs.adjacent_separators(x, y);
        if path.len() != c.d(x, y) {
            return Err(json!({ "length": path.len(), "distance": c.d(x, y) }));
        }
        let mut first: Vec<usize> = path
            .steps()
            .take(front.len())
            .map(|(a, b)| hs.hyperplane_of_edge(a, b))
            .collect::<Result<_, _>>()
            .map_err(oops)?;
        first.sort_unstable();
        let mut want = front.clone();
        want.sort_unstable();
        if first != want {
            return Err(json!({ "path": path.vertices(), "adjacent": want, "first_crossed": first }));
        }
        Ok(Stat::max(front.len() as f64))
    });
    CheckRecord::from_tally(Check::FrontedGeodesic, &f.name(), t, |i| pair_json(&s.items[i])).with_sample(s.info)
}

pub(super) fn normal_cube_path(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let (c, hs) = (f.complex(), f.space.hyperplanes());
    let s = sample_pairs(c.n_vertices(), cfg.max_exact_pairs, cfg.seed, Check::NormalCubePath.id());
    let t = tally(&s.items, |&(x, y)| {
        let cubes = hs.normal_cube_path(c, x, y).map_err(oops)?;
        let mut union: Vec<usize> = Vec::new();
        let mut at = x;
        for nc in &cubes {
            let mut step = hs.separators(nc.entry, nc.exit).hyperplanes;
            let mut claimed = nc.hyperplanes.clone();
            claimed.sort_unstable();
            step.sort_unstable();
            if nc.entry != at || step != claimed || !c.is_cube(&nc.cube) {
                return Err(json!({ "cube": nc.cube, "entry": nc.entry, "expected_entry": at }));
            }
            union.extend_from_slice(&claimed);
            at = nc.exit;
        }
        let total = union.len();
        union.sort_unstable();
        union.dedup();
        if at != y || union.len() != total || union != hs.separators(x, y).hyperplanes {
            return Err(json!({ "end": at, "crossed": total, "distinct": union.len() }));
        }
        Ok(Stat::max(cubes.len() as f64))
    });
    CheckRecord::from_tally(Check::NormalCubePath, &f.name(), t, |i| pair_json(&s.items[i])).with_sample(s.info)
}

pub(super) fn interval_ball(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let s = audit_pairs(f, cfg, Check::IntervalBall.id());
    let dim = f.complex().dim();
    let t = tally(&s.items, |&(x, y)| {
        let profile = f.space.interval_ball_profile(x, y).map_err(oops)?;
        let mut worst: f64 = 0.0;
        for (k, &count) in profile.iter().enumerate() {
            let bound = interval_ball_bound(k, dim);
            if count as u128 > bound {
                return Err(json!({ "k": k, "count": count, "bound": bound as u64 }));
            }
            worst = worst.max(count as f64 / bound as f64);
        }
        Ok(Stat {
            max: worst,
            count: profile.len() as u64,
            flag: 0,
        })
    });
    let (ratio, radii) = (t.stat.max, t.stat.count);
    CheckRecord::from_tally(Check::IntervalBall, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("max_count_over_bound", ratio)
        .with_metric("radii_checked", radii)
        .with_note("radii k = 0..=d(x,y); larger k leave the count fixed and raise the bound")
}

pub(super) fn symmetric_difference(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let s = sample_quadruples(f.complex().n_vertices(), cfg.max_tuples, cfg.seed, Check::SymmetricDifference.id());
    let t = tally(&s.items, |&[x, y, a, b]| {
        let bad = symmetric_difference_violations(&f.space, x, y, a, b);
        if bad.is_empty() {
            Ok(Stat::default())
        } else {
            Err(json!({ "hyperplanes": bad }))
        }
    });
    CheckRecord::from_tally(Check::SymmetricDifference, &f.name(), t, |i| {
        let [x, y, a, b] = s.items[i];
        json!({ "x": x, "y": y, "a": a, "b": b })
    })
    .with_sample(s.info)
}

pub(super) fn decompose_interval(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let s = audit_pairs(f, cfg, Check::DecomposeInterval.id());
    let hs = f.space.hyperplanes();
    let t = tally(&s.items, |&(x, y)| {
        let mut count = 0;
        for h in hs.adjacent_separators(x, y) {
            let d = f.space.decompose_interval(x, y, h).map_err(oops)?;
            if !d.all_hold() {
                return Err(json!({
                    "hyperplane": h, "v": d.v, "forward_inclusion": d.forward_inclusion,
                    "equality": d.equality, "disjoint": d.disjoint, "thin": d.thin,
                    "adjacent_separator_is_h": d.adjacent_separator_is_h,
                    "far_separators_parallel": d.far_separators_parallel,
                }));
            }
            count += 1;
        }
        Ok(Stat {
            count,
            ..Stat::default()
        })
    });
    let decompositions = t.stat.count;
    CheckRecord::from_tally(Check::DecomposeInterval, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("decompositions", decompositions)
}

pub(super) fn convexity(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let c = f.complex();
    let s = sample_triples(c.n_vertices(), cfg.max_path_pairs, cfg.seed, Check::Convexity.id());
    let t = tally(&s.items, |&(a, b, d)| {
        let gens = [a, b, d];
        let hull = f.space.convex_hull(&gens).map_err(oops)?;
        let stride = (hull.members.len() / 16).max(1);
        let mut count = 0;
        for &p in &gens {
            for &q in hull.members.iter().step_by(stride) {
                if let Some(v) = c.geodesic_vertices(p, q).into_iter().find(|&v| !hull.contains(v)) {
                    return Err(json!({ "from": p, "to": q, "outside": v }));
                }
                count += 1;
            }
        }
        Ok(Stat {
            max: hull.len() as f64,
            count,
            flag: 0,
        })
    });
    CheckRecord::from_tally(Check::Convexity, &f.name(), t, |i| {
        let (a, b, d) = s.items[i];
        json!([a, b, d])
    })
    .with_sample(s.info)
}

pub(super) fn product_oracles(f: &Family, cfg: &VerifyConfig) -> CheckRecord {
    let FamilySpec::Product(a, b) = &f.spec else {
        return CheckRecord::skipped(Check::ProductOracles, &f.name(), "not a product");
    };
    let budget = Budget {
        max_vertices: f.complex().n_vertices(),
        max_dim: f.complex().dim(),
    };
    let (fa, fb) = match (generate(a, &budget), generate(b, &budget)) {
        (Ok(fa), Ok(fb)) => (fa, fb),
        (Err(e), _) | (_, Err(e)) => {
            let mut r = CheckRecord::new(Check::ProductOracles, &f.name());
            r.instances = 1;
            r.failures = 1;
            r.status = super::Status::Fail;
            r.witness = Some(oops(e));
            return r;
        }
    };
    let nb = fb.complex().n_vertices();
    let counts_add = f.space.hyperplanes().len() == fa.space.hyperplanes().len() + fb.space.hyperplanes().len()
        && f.complex().dim() == fa.complex().dim() + fb.complex().dim();
    let s = audit_pairs(f, cfg, Check::ProductOracles.id());
    let mut t = tally(&s.items, |&(x, y)| {
        let want = fa.complex().d(x / nb, y / nb) + fb.complex().d(x % nb, y % nb);
        let got = f.complex().d(x, y);
        if got == want {
            Ok(Stat::default())
        } else {
            Err(json!({ "distance": got, "factor_sum": want }))
        }
    });
    if !counts_add {
        t.failures += 1;
        t.witness = Some((0, json!({ "hyperplane_or_dimension_counts_do_not_add": true })));
    }
    CheckRecord::from_tally(Check::ProductOracles, &f.name(), t, |i| pair_json(&s.items[i]))
        .with_sample(s.info)
        .with_metric("hyperplanes", f.space.hyperplanes().len())
}
