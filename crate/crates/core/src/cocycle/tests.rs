use num_complex::Complex64;

use super::*;
use crate::complex::CubeComplex;

fn space(n: usize, cubes: Vec<Vec<usize>>) -> Cat0Complex {
    Cat0Complex::new(CubeComplex::from_cubes(n, cubes).unwrap().0).unwrap()
}

fn segment(n: usize) -> Cat0Complex {
    space(n + 1, (0..n).map(|i| vec![i, i + 1]).collect())
}

fn grid(m: usize, n: usize) -> Cat0Complex {
    let idx = |i: usize, j: usize| (n + 1) * i + j;
    let mut cubes = Vec::new();
    for i in 0..m {
        for j in 0..n {
            cubes.push(vec![idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)]);
        }
    }
    space((m + 1) * (n + 1), cubes)
}

fn cube3() -> Cat0Complex {
    space(8, vec![(0..8).collect()])
}

fn mono(sign: i8, k: u32, ell: u32) -> ZWPolynomial {
    SignedMonomial::new(sign, k, ell).to_polynomial()
}

fn column(op: &SparseOperator<ZWPolynomial>, b: usize) -> Vec<(usize, String)> {
    op.column(b).into_iter().map(|(a, p)| (a, p.to_string())).collect()
}

#[test]
fn edge_at_zero_is_identity() {
    let s = segment(1);
    let pt = CirclePoint::float(Complex64::new(0.0, 0.0)).unwrap();
    assert!(elementary(&s, 0, 1, &pt).unwrap().is_identity());
}

#[test]
fn edge_is_the_rotation_block() {
    let s = segment(1);
    let e = elementary(&s, 0, 1, &CirclePoint::symbolic()).unwrap();
    assert_eq!(e.entry(0, 0), ZWPolynomial::w());
    assert_eq!(e.entry(0, 1), ZWPolynomial::z());
    assert_eq!(e.entry(1, 0), ZWPolynomial::z().negated());
    assert_eq!(e.entry(1, 1), ZWPolynomial::w());
    assert!(elementary(&segment(2), 0, 2, &CirclePoint::symbolic()).is_err());
}

#[test]
fn square_edge_has_two_blocks() {
    let sq = space(4, vec![vec![0, 1, 2, 3]]);
    let e = elementary(&sq, 0, 1, &CirclePoint::symbolic()).unwrap();
    assert_eq!(e.stored_columns().len(), 4);
    // pairs (0, 1) and (2, 3), with 0 and 2 on the side of 0
    assert_eq!(e.entry(1, 0), mono(-1, 1, 0));
    assert_eq!(e.entry(3, 2), mono(-1, 1, 0));
    assert_eq!(e.entry(2, 3), mono(1, 1, 0));
    assert!(e.entry(2, 0).is_zero());
}

#[test]
fn edge_times_reverse_is_identity() {
    let g = grid(2, 2);
    let pt = CirclePoint::symbolic();
    for (u, v) in g.complex().edges() {
        let p = elementary(&g, u, v, &pt).unwrap().mul(&elementary(&g, v, u, &pt).unwrap());
        let reduced = p.map(|x| x.reduce_circle());
        assert!(reduced.is_identity(), "{u} {v}");
    }
}

#[test]
fn segment_columns() {
    let s = segment(2);
    let c = cocycle(&s, 0, 2, &CirclePoint::symbolic()).unwrap();
    assert_eq!(column(&c, 2), vec![(0, "z^2".into()), (1, "z*w".into()), (2, "w".into())]);

    let s3 = segment(3);
    let c = cocycle(&s3, 0, 3, &CirclePoint::symbolic()).unwrap();
    assert_eq!(
        column(&c, 3),
        vec![(0, "z^3".into()), (1, "z^2*w".into()), (2, "z*w".into()), (3, "w".into())]
    );
    // interior columns: -z below, w^2 on the diagonal, then w^2 z^j, ending in w z^i
    assert_eq!(
        column(&c, 2),
        vec![(0, "z^2*w".into()), (1, "z*w^2".into()), (2, "w^2".into()), (3, "-z".into())]
    );
    assert_eq!(column(&c, 1), vec![(0, "z*w".into()), (1, "w^2".into()), (2, "-z".into())]);
    assert_eq!(column(&c, 0), vec![(0, "w".into()), (1, "-z".into())]);
}

/// Dense 4×4 oracle for the square with vertices 0..4 and edges
/// 0-1, 0-2, 1-3, 2-3.
fn square_dense(x: usize, y: usize, z: f64, w: f64) -> [[f64; 4]; 4] {
    let partner = |h_is_01: bool, v: usize| if h_is_01 { v ^ 1 } else { v ^ 2 };
    let horizontal = (x ^ y) == 1;
    let mut m = [[0.0; 4]; 4];
    for v in 0..4 {
        let o = partner(horizontal, v);
        let bit = if horizontal { 1 } else { 2 };
        let same_side_as_x = (v & bit) == (x & bit);
        m[v][v] = w;
        m[o][v] = if same_side_as_x { -z } else { z };
    }
    m
}

fn mat_mul(a: [[f64; 4]; 4], b: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

#[test]
fn square_diagonal_matches_dense_product() {
    let sq = space(4, vec![vec![0, 1, 2, 3]]);
    let (z, w) = (0.6, 0.8);
    let pt = PythagoreanParameter::new(1, 3).unwrap().complex();
    let c = cocycle(&sq, 0, 3, &pt).unwrap();
    for mid in [1, 2] {
        let oracle = mat_mul(square_dense(0, mid, z, w), square_dense(mid, 3, z, w));
        for a in 0..4 {
            for b in 0..4 {
                assert!((c.entry(a, b).re - oracle[a][b]).abs() < 1e-15, "{a} {b}");
            }
        }
    }
    let sym = cocycle(&sq, 0, 3, &CirclePoint::symbolic()).unwrap();
    assert_eq!(
        column(&sym, 3),
        vec![(0, "z^2".into()), (1, "z*w".into()), (2, "z*w".into()), (3, "w^2".into())]
    );
}

#[test]
fn cocycle_identities_hold_exactly() {
    let g = grid(2, 2);
    let n = g.n_vertices();
    for t in standard_parameters() {
        let pt = t.big_rational();
        for x in 0..n {
            assert!(cocycle(&g, x, x, &pt).unwrap().is_identity());
            for y in 0..n {
                let cxy = cocycle(&g, x, y, &pt).unwrap();
                let cyx = cocycle(&g, y, x, &pt).unwrap();
                assert!(cxy.mul(&cyx).is_identity());
                for v in [0, 4, 8] {
                    let lhs = cocycle(&g, v, x, &pt).unwrap().mul(&cxy);
                    assert_eq!(lhs, cocycle(&g, v, y, &pt).unwrap());
                }
            }
        }
    }
}

#[test]
fn base_rational_agrees_with_big_rational() {
    let g = grid(2, 3);
    for t in standard_parameters() {
        for (x, y) in [(0, 11), (3, 8), (5, 5)] {
            let path = g.complex().some_geodesic(x, y).unwrap();
            let fast = apply_path(&g, path.vertices(), &t.base_rational(), &SparseOperator::identity(12)).unwrap();
            let big = cocycle(&g, x, y, &t.big_rational()).unwrap();
            assert!(!fast.overflowed());
            assert_eq!(fast.map(|v| v.to_big_rational().unwrap()), big);
        }
    }
}

#[test]
fn transpose_is_the_reverse_cocycle() {
    let g = grid(2, 3);
    let pt = CirclePoint::symbolic();
    for (x, y) in [(0, 11), (2, 9), (4, 7)] {
        let c = cocycle(&g, x, y, &pt).unwrap();
        assert_eq!(c.transpose(), cocycle(&g, y, x, &pt).unwrap());
    }
}

#[test]
fn corner_coefficient_is_z_to_the_distance() {
    let g = grid(2, 3);
    let pt = CirclePoint::symbolic();
    for x in 0..12 {
        for y in 0..12 {
            let c = cocycle(&g, x, y, &pt).unwrap();
            let d = g.complex().d(x, y) as u32;
            assert_eq!(c.entry(x, y), mono(1, d, 0));
        }
    }
}

#[test]
fn path_independence_on_square_and_cube() {
    let sq = space(4, vec![vec![0, 1, 2, 3]]);
    let r = verify_path_independence(&sq, 0, 3, 100, &standard_parameters()).unwrap();
    assert_eq!(r.geodesics_compared, 2);
    let c = cube3();
    let r = verify_path_independence(&c, 0, 7, 100, &standard_parameters()[..2]).unwrap();
    assert_eq!(r.geodesics_compared, 6);
    assert!(r.detours_compared >= 6);
}

#[test]
fn predictions_match_symbolic_entries() {
    for s in [grid(2, 3), cube3(), segment(4)] {
        let n = s.n_vertices();
        for x in 0..n {
            for y in 0..n {
                let path = s.complex().some_geodesic(x, y).unwrap();
                let sym = cocycle_symbolic_along(&s, &path).unwrap();
                let order = GeodesicOrder::from_path(&s, &path).unwrap();
                for a in 0..n {
                    for b in 0..n {
                        let actual = sym.operator.entry(a, b);
                        let pred = predict_coefficient(&s, &order, a, b);
                        if !actual.is_zero() {
                            assert_eq!(pred.monomial().map(|m| m.to_polynomial()), Some(actual), "x={x} y={y} a={a} b={b}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn prediction_examples() {
    let s = segment(4);
    let order = GeodesicOrder::from_path(&s, &s.complex().some_geodesic(0, 4).unwrap()).unwrap();
    assert_eq!(predict_coefficient(&s, &order, 0, 4).monomial(), Some(SignedMonomial::new(1, 4, 0)));
    let sq = space(5, vec![vec![0, 1, 2, 3], vec![3, 4]]);
    let order = GeodesicOrder::from_path(&sq, &sq.complex().some_geodesic(0, 3).unwrap()).unwrap();
    // vertex 4 is adjacent to no separator of (0, 3)
    assert_eq!(predict_coefficient(&sq, &order, 4, 4).monomial(), Some(SignedMonomial::new(1, 0, 0)));
    let m = predict_coefficient(&sq, &order, 1, 3).monomial().unwrap();
    assert_eq!((m.k, m.ell), (1, 1));
    assert!(matches!(
        predict_coefficient(&sq, &order, 4, 0),
        Prediction::Zero { reason: ZeroReason::SeparatorsNotContained }
    ));
}

#[test]
fn k_decomposition_of_square_diagonal() {
    let sq = space(4, vec![vec![0, 1, 2, 3]]);
    let sym = cocycle_symbolic(&sq, 0, 3).unwrap();
    let kd = k_decomposition(&sym);
    let top = kd.component(2).unwrap();
    assert_eq!(top.entries, vec![(3, 0, 1, 0), (2, 1, -1, 0), (1, 2, -1, 0), (0, 3, 1, 0)]);
    assert_eq!((top.max_row, top.max_col), (1, 1));
    assert!(kd.component(3).is_none());
    for c in &kd.components {
        assert!(c.max_row <= (c.k as usize + 3).pow(2));
    }
}

#[test]
fn tree_components_have_at_most_two_entries_per_line() {
    let s = segment(6);
    for x in 0..7 {
        for y in 0..7 {
            let kd = k_decomposition(&cocycle_symbolic(&s, x, y).unwrap());
            for c in &kd.components {
                assert!(c.max_row <= 2 && c.max_col <= 2, "{x} {y} {c:?}");
            }
            assert_eq!(kd.max_k() as usize, kd.distance);
        }
    }
}

#[test]
fn real_points_are_unitary_and_norm_one() {
    let g = grid(2, 2);
    for z in [-0.75, 0.25, 0.5] {
        let pt = CirclePoint::float(Complex64::new(z, 0.0)).unwrap();
        let c = cocycle(&g, 0, 8, &pt).unwrap();
        assert!(c.unitarity_defect() < 1e-12);
        let est = operator_norm(&c, &PowerIterationConfig::default()).unwrap();
        assert!((est.norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn power_iteration_matches_svd() {
    let g = grid(2, 3);
    for (r, th) in [(0.5, 1.0), (0.9, 2.0), (0.3, -0.7)] {
        let pt = CirclePoint::polar(r, th).unwrap();
        for (x, y) in [(0, 11), (1, 10), (4, 7)] {
            let c = cocycle(&g, x, y, &pt).unwrap();
            let est = operator_norm(&c, &PowerIterationConfig::default()).unwrap();
            let (support, block) = c.dense_block();
            let m = support.len();
            let mat = nalgebra::DMatrix::from_column_slice(m, m, &block);
            let sigma = mat.singular_values().max().max(if m < 12 { 1.0 } else { 0.0 });
            assert!((est.norm - sigma).abs() <= 1e-8 * sigma, "{} vs {}", est.norm, sigma);
            let bound = norm_bound(2, g.complex().d(x, y), r).unwrap();
            assert!(est.norm <= bound.general);
        }
    }
}

#[test]
fn adjoint_symmetry() {
    let g = grid(2, 2);
    let pt = CirclePoint::polar(0.7, 0.9).unwrap();
    let conj_pt = CirclePoint::float(pt.z.conj()).unwrap();
    for (x, y) in [(0, 8), (1, 6)] {
        let lhs = cocycle(&g, x, y, &pt).unwrap();
        let rhs = cocycle(&g, y, x, &conj_pt).unwrap().adjoint();
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }
}

#[test]
fn hypercube_flip_representation() {
    let c = cube3();
    let complex = c.complex();
    // vertices of the listed cube are binary coordinates: flip bits 0 and 2
    let flip = Automorphism::new(complex, (0..8).map(|v| v ^ 0b101).collect()).unwrap();
    let action = GroupAction::new(0, vec![flip.clone()]);
    assert_eq!(action.length(complex, &flip), 2);
    let pt = CirclePoint::polar(0.6, 0.4).unwrap();
    let pi = action.representation(&c, &flip, &pt).unwrap();
    assert!((pi.entry(0, 0) - pt.z * pt.z).norm() < 1e-14);
    let id = Automorphism::identity(8);
    assert!(action.representation(&c, &id, &pt).unwrap().is_identity());
    for t in standard_parameters() {
        let r = cocycle_equivariance(&c, &flip, 0, 7, &t.big_rational()).unwrap();
        assert!(r.holds());
    }
}

#[test]
fn square_rotation_is_equivariant() {
    let sq = space(4, vec![vec![0, 1, 2, 3]]);
    // 0 -> 1 -> 3 -> 2 -> 0
    let rot = Automorphism::new(sq.complex(), vec![1, 3, 0, 2]).unwrap();
    let pt = PythagoreanParameter::new(2, 3).unwrap().big_rational();
    for x in 0..4 {
        for y in 0..4 {
            assert!(cocycle_equivariance(&sq, &rot, x, y, &pt).unwrap().holds());
        }
    }
    let bad = Automorphism::new(sq.complex(), vec![0, 3, 2, 1]);
    assert!(matches!(bad, Err(ActionError::CubeNotPreserved { .. })));
}

#[test]
fn homomorphism_at_float_points() {
    let c = cube3();
    let complex = c.complex();
    let g = Automorphism::new(complex, (0..8).map(|v| v ^ 1).collect()).unwrap();
    // swap coordinates 0 and 1
    let h = Automorphism::new(complex, (0..8).map(|v| (v & 4) | ((v & 1) << 1) | ((v & 2) >> 1)).collect()).unwrap();
    let action = GroupAction::new(0, vec![g.clone(), h.clone()]);
    assert_eq!(action.elements(8, 1000).0.len(), 8);
    let pt = CirclePoint::polar(0.8, 2.2).unwrap();
    let lhs = action.representation(&c, &g.compose(&h), &pt).unwrap();
    let rhs = action.representation(&c, &g, &pt).unwrap().mul(&action.representation(&c, &h, &pt).unwrap());
    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
}

#[test]
fn symbolic_entries_are_direct_monomials_on_small_complexes() {
    for s in [grid(2, 3), cube3()] {
        let n = s.n_vertices();
        for x in 0..n {
            for y in 0..n {
                let sym = cocycle_symbolic(&s, x, y).unwrap();
                assert_eq!(sym.fallback_count(), 0);
                assert_eq!(sym.monomial(x, y), Some(SignedMonomial::new(1, s.complex().d(x, y) as u32, 0)));
            }
        }
    }
    assert!(ZWPolynomial::one().is_one());
}
