use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use cubecocycle::cocycle::{
    cocycle, cocycle_symbolic_along, norm_bound, operator_norm, predict_coefficient, CirclePoint, GeodesicOrder,
    PowerIterationConfig, PythagoreanParameter, SparseOperator,
};
use cubecocycle::families::{generate, Budget, Family, FamilySpec};
use cubecocycle::verify::{run_checks, Check, VerifyConfig};

fn small_family() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        (2usize..40, 0u64..1000).prop_map(|(n, seed)| FamilySpec::RandomTree { n, seed }),
        (1usize..4, 1usize..4).prop_map(|(arity, depth)| FamilySpec::Tree { arity, depth }),
        prop::collection::vec(1usize..4, 1..4).prop_map(FamilySpec::Grid),
        ((2usize..7, 0u64..100), 1usize..4).prop_map(|((n, seed), m)| {
            FamilySpec::product(FamilySpec::RandomTree { n, seed }, FamilySpec::Segment(m))
        }),
    ]
}

fn build(spec: &FamilySpec) -> Family {
    generate(spec, &Budget::default()).unwrap()
}

fn rational_point() -> impl Strategy<Value = PythagoreanParameter> {
    (2i64..30).prop_flat_map(|q| (-(q - 1)..q).prop_map(move |p| PythagoreanParameter::new(p, q).unwrap()))
}

fn disc_point(r_max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r_max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn dense(op: &SparseOperator<Complex64>) -> DMatrix<Complex64> {
    let n = op.dimension();
    DMatrix::from_fn(n, n, |a, b| op.entry(a, b))
}

/// Vertices on the same side as the generators of every hyperplane they agree on.
fn brute_hull(f: &Family, s: &[usize]) -> Vec<usize> {
    let hs = f.space.hyperplanes();
    (0..f.space.n_vertices())
        .filter(|&v| (0..hs.len()).all(|h| s.iter().any(|&g| hs.separates(h, s[0], g)) || !hs.separates(h, s[0], v)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_counts_separators(spec in small_family(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let f = build(&spec);
        let n = f.space.n_vertices();
        let (x, y) = (a.index(n), b.index(n));
        prop_assert_eq!(f.complex().d(x, y), f.space.hyperplanes().separator_count(x, y));
    }

    #[test]
    fn interval_three_ways(spec in small_family(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let f = build(&spec);
        let n = f.space.n_vertices();
        let (x, y) = (a.index(n), b.index(n));
        let mut on_geodesic = f.complex().geodesic_vertices(x, y);
        on_geodesic.sort_unstable();
        let additive = f.complex().interval_by_distance(x, y);
        let nested: Vec<usize> = (0..n).filter(|&v| f.space.in_interval(v, x, y)).collect();
        prop_assert_eq!(&on_geodesic, &additive);
        prop_assert_eq!(&additive, &nested);
    }

    #[test]
    fn hull_is_half_space_intersection(spec in small_family(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        let f = build(&spec);
        let s: Vec<usize> = picks.iter().map(|i| i.index(f.space.n_vertices())).collect();
        prop_assert_eq!(f.space.convex_hull(&s).unwrap().members, brute_hull(&f, &s));
    }

    #[test]
    fn medians_are_unique(spec in small_family(), t in prop::array::uniform3(any::<prop::sample::Index>())) {
        let f = build(&spec);
        let n = f.space.n_vertices();
        prop_assert_eq!(f.complex().medians(t[0].index(n), t[1].index(n), t[2].index(n)).len(), 1);
    }

    #[test]
    fn exact_chain_rule(spec in small_family(), t in rational_point(), v in prop::array::uniform3(any::<prop::sample::Index>())) {
        let f = build(&spec);
        let n = f.space.n_vertices();
        let (a, x, y) = (v[0].index(n), v[1].index(n), v[2].index(n));
        let pt = t.big_rational();
        let lhs = cocycle(&f.space, a, x, &pt).unwrap().mul(&cocycle(&f.space, x, y, &pt).unwrap());
        let rhs = cocycle(&f.space, a, y, &pt).unwrap();
        prop_assert_eq!(lhs.first_difference(&rhs), None);
        let back = cocycle(&f.space, x, y, &pt).unwrap().mul(&cocycle(&f.space, y, x, &pt).unwrap());
        prop_assert!(back.is_identity());
    }

    #[test]
    fn predictions_match_symbolic_entries(spec in small_family(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let f = build(&spec);
        let n = f.space.n_vertices();
        let (x, y) = (a.index(n), b.index(n));
        let path = f.complex().some_geodesic(x, y).unwrap();
        let sym = cocycle_symbolic_along(&f.space, &path).unwrap();
        let order = GeodesicOrder::from_path(&f.space, &path).unwrap();
        for e in &sym.entries {
            let m = e.monomial.expect("entries are monomials");
            prop_assert_eq!(predict_coefficient(&f.space, &order, e.a, e.b).monomial(), Some(m));
            prop_assert_eq!(m.k as usize, f.complex().d(e.a, e.b));
            prop_assert!(m.ell as usize <= 2 * f.space.dim());
        }
    }

    #[test]
    fn real_points_are_unitary(spec in small_family(), z in -0.95f64..0.95, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let f = build(&spec);
        let n = f.space.n_vertices();
        let op = cocycle(&f.space, a.index(n), b.index(n), &CirclePoint::float(Complex64::new(z, 0.0)).unwrap()).unwrap();
        let m = dense(&op);
        let defect = max_abs(&(m.adjoint() * &m - DMatrix::identity(n, n)));
        prop_assert!(defect < 1e-10, "defect {defect}");
    }

    #[test]
    fn adjoint_symmetry(spec in small_family(), z in disc_point(0.95), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let f = build(&spec);
        let n = f.space.n_vertices();
        let (x, y) = (a.index(n), b.index(n));
        let lhs = dense(&cocycle(&f.space, x, y, &CirclePoint::float(z).unwrap()).unwrap());
        let rhs = dense(&cocycle(&f.space, y, x, &CirclePoint::float(z.conj()).unwrap()).unwrap()).adjoint();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn norms_respect_the_bounds(spec in small_family(), z in disc_point(0.95), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let f = build(&spec);
        let n = f.space.n_vertices();
        let (x, y) = (a.index(n), b.index(n));
        let op = cocycle(&f.space, x, y, &CirclePoint::float(z).unwrap()).unwrap();
        let est = operator_norm(&op, &PowerIterationConfig::default()).unwrap();
        let svd = dense(&op).singular_values().max();
        prop_assert!((est.norm - svd).abs() < 1e-7 * svd.max(1.0), "power {} svd {svd}", est.norm);
        let bound = norm_bound(f.space.dim(), f.complex().d(x, y), z.norm()).unwrap();
        prop_assert!(svd <= bound.general + 1e-9);
        if let Some(tree) = bound.tree {
            prop_assert!(svd <= tree + 1e-9);
        }
    }

    #[test]
    fn generation_is_deterministic(spec in small_family()) {
        let (a, b) = (build(&spec), build(&spec));
        prop_assert_eq!(a.complex().to_file(), b.complex().to_file());
        let round: FamilySpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(round, spec);
    }

    #[test]
    fn product_distances_add(l in (2usize..8, 0u64..50), r in 1usize..4, u in any::<prop::sample::Index>(), v in any::<prop::sample::Index>()) {
        let left = FamilySpec::RandomTree { n: l.0, seed: l.1 };
        let right = FamilySpec::Grid(vec![r, 1]);
        let (fl, fr) = (build(&left), build(&right));
        let p = build(&FamilySpec::product(left, right));
        let m = fr.space.n_vertices();
        let (x, y) = (u.index(p.space.n_vertices()), v.index(p.space.n_vertices()));
        prop_assert_eq!(p.complex().d(x, y), fl.complex().d(x / m, y / m) + fr.complex().d(x % m, y % m));
        prop_assert_eq!(p.space.hyperplanes().len(), fl.space.hyperplanes().len() + fr.space.hyperplanes().len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_deterministic(spec in small_family(), seed in 0u64..100) {
        let f = build(&spec);
        let cfg = VerifyConfig { seed, max_pairs: 50, max_exact_pairs: 20, max_path_pairs: 10, max_norm_pairs: 4, ..VerifyConfig::default() };
        let checks = [Check::MonomialLaw, Check::Axioms, Check::Convexity, Check::NormBound];
        prop_assert_eq!(run_checks(&f, &checks, &cfg), run_checks(&f, &checks, &cfg));
    }
}
