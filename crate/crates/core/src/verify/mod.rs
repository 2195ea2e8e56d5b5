//! Property checks over generated families, with sampling, tallies and
//! JSON-ready records.

mod algebra;
mod geometry;
mod report;
pub mod scan;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cocycle::{standard_parameters, PowerIterationConfig, PythagoreanParameter};
use crate::cat0::Cat0Complex;
use crate::complex::{CubeComplex, LoadReport, ValidationOptions};
use crate::families::{Family, FamilySpec, Layout};
use crate::hyperplanes::HyperplaneSystem;

pub use report::{CheckRecord, Report, SampleInfo, Status, Summary, SCHEMA_VERSION};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("bad z-grid {0:?}: expected RxA@rmax, e.g. 4x8@0.9")]
    ZGridSyntax(String),
    #[error("z-grid needs at least one radius and one angle")]
    ZGridEmpty,
    #[error("max |z| = {0} must lie in [0, 1)")]
    Radius(String),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
}

/// `radial × angular` points `r e^{iθ}` with `r = r_max·i/(R−1)` and
/// `θ = 2πj/A`; the origin appears once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZGrid {
    pub radial: usize,
    pub angular: usize,
    pub r_max: f64,
}

impl ZGrid {
    pub fn new(radial: usize, angular: usize, r_max: f64) -> Result<Self, ConfigError> {
        if radial == 0 || angular == 0 {
            return Err(ConfigError::ZGridEmpty);
        }
        if !(0.0..1.0).contains(&r_max) {
            return Err(ConfigError::Radius(r_max.to_string()));
        }
        Ok(Self { radial, angular, r_max })
    }

    pub fn radii(&self) -> Vec<f64> {
        if self.radial == 1 {
            return vec![self.r_max];
        }
        (0..self.radial)
            .map(|i| self.r_max * i as f64 / (self.radial - 1) as f64)
            .collect()
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for r in self.radii() {
            if r == 0.0 {
                out.push(Complex64::new(0.0, 0.0));
                continue;
            }
            for j in 0..self.angular {
                let theta = std::f64::consts::TAU * j as f64 / self.angular as f64;
                out.push(Complex64::from_polar(r, theta));
            }
        }
        out
    }
}

impl Default for ZGrid {
    fn default() -> Self {
        Self {
            radial: 4,
            angular: 6,
            r_max: 0.95,
        }
    }
}

impl fmt::Display for ZGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}@{}", self.radial, self.angular, self.r_max)
    }
}

impl FromStr for ZGrid {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let syntax = || ConfigError::ZGridSyntax(s.to_string());
        let (counts, r) = s.split_once('@').ok_or_else(syntax)?;
        let (ra, an) = counts
            .split_once(['x', 'X', '×'])
            .ok_or_else(syntax)?;
        let radial = ra.trim().parse().map_err(|_| syntax())?;
        let angular = an.trim().parse().map_err(|_| syntax())?;
        let r_max: f64 = r.trim().parse().map_err(|_| syntax())?;
        ZGrid::new(radial, angular, r_max)
    }
}

/// Caps and sample points for a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Pairs per sweep before sampling starts.
    pub max_pairs: usize,
    /// Pairs for sweeps with exact operator products.
    pub max_exact_pairs: usize,
    /// Triples and 4-tuples before sampling starts.
    pub max_tuples: usize,
    /// Pairs per norm measurement sweep.
    pub max_norm_pairs: usize,
    /// Pairs for path comparisons and float identities.
    pub max_path_pairs: usize,
    /// Geodesics compared per pair.
    pub geodesic_cap: usize,
    /// Families up to this size get the interval audits on every pair.
    pub audit_max_vertices: usize,
    /// Families up to this size get the triple characterization on every triple.
    pub triple_max_vertices: usize,
    /// Group elements enumerated for representation checks.
    pub group_cap: usize,
    /// Pairs `(g, h)` for the homomorphism identity.
    pub max_group_pairs: usize,
    pub rational_points: Vec<PythagoreanParameter>,
    pub float_points: usize,
    pub float_radius: f64,
    pub float_tolerance: f64,
    pub z_grid: ZGrid,
    pub tree_radii: Vec<f64>,
    pub tree_angles: usize,
    pub real_z: Vec<f64>,
    pub norm_tolerance: f64,
    pub power: PowerIterationConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            max_pairs: 40_000,
            max_exact_pairs: 1_500,
            max_tuples: 20_000,
            max_norm_pairs: 48,
            max_path_pairs: 150,
            geodesic_cap: 24,
            audit_max_vertices: 2_000,
            triple_max_vertices: 200,
            group_cap: 64,
            max_group_pairs: 24,
            rational_points: standard_parameters(),
            float_points: 20,
            float_radius: 0.9,
            float_tolerance: 1e-10,
            z_grid: ZGrid::default(),
            tree_radii: (1..=9).map(|i| i as f64 / 10.0).collect(),
            tree_angles: 8,
            real_z: vec![-0.75, -0.5, -0.25, 0.25, 0.5, 0.75],
            norm_tolerance: 1e-9,
            power: PowerIterationConfig::default(),
        }
    }
}

impl VerifyConfig {
    /// `n` points with `|z| ≤ float_radius`, spread along a golden-angle spiral.
    pub fn float_grid(&self) -> Vec<Complex64> {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..self.float_points)
            .map(|i| {
                let r = self.float_radius * (i + 1) as f64 / self.float_points as f64;
                Complex64::from_polar(r, golden * i as f64)
            })
            .collect()
    }
}

/// Every property in the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Check {
    Validate,
    DistanceSeparators,
    IntervalCharacterization,
    CornerMoves,
    UniqueMedian,
    TwoSided,
    NoSelfCrossing,
    IntersectionSquare,
    FrontedGeodesic,
    NormalCubePath,
    IntervalBall,
    SymmetricDifference,
    DecomposeInterval,
    Convexity,
    ProductOracles,
    CornerCoefficient,
    MonomialLaw,
    SupportLaw,
    FinitePropagation,
    KVanishing,
    Sparsity,
    Axioms,
    PathIndependence,
    Equivariance,
    Homomorphism,
    DiagonalCoefficient,
    Holomorphy,
    AdjointSymmetry,
    Unitarity,
    NormBound,
    TreeNormBound,
}

impl Check {
    pub const ALL: [Check; 31] = [
        Check::Validate,
        Check::DistanceSeparators,
        Check::IntervalCharacterization,
        Check::CornerMoves,
        Check::UniqueMedian,
        Check::TwoSided,
        Check::NoSelfCrossing,
        Check::IntersectionSquare,
        Check::FrontedGeodesic,
        Check::NormalCubePath,
        Check::IntervalBall,
        Check::SymmetricDifference,
        Check::DecomposeInterval,
        Check::Convexity,
        Check::ProductOracles,
        Check::CornerCoefficient,
        Check::MonomialLaw,
        Check::SupportLaw,
        Check::FinitePropagation,
        Check::KVanishing,
        Check::Sparsity,
        Check::Axioms,
        Check::PathIndependence,
        Check::Equivariance,
        Check::Homomorphism,
        Check::DiagonalCoefficient,
        Check::Holomorphy,
        Check::AdjointSymmetry,
        Check::Unitarity,
        Check::NormBound,
        Check::TreeNormBound,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Check::Validate => "complex.validate",
            Check::DistanceSeparators => "complex.distance_separators",
            Check::IntervalCharacterization => "complex.interval_characterization",
            Check::CornerMoves => "complex.corner_moves",
            Check::UniqueMedian => "complex.unique_median",
            Check::TwoSided => "hyperplanes.two_sided",
            Check::NoSelfCrossing => "hyperplanes.no_self_crossing",
            Check::IntersectionSquare => "hyperplanes.intersection_square",
            Check::FrontedGeodesic => "hyperplanes.fronted_geodesic",
            Check::NormalCubePath => "hyperplanes.normal_cube_path",
            Check::IntervalBall => "hulls.interval_ball",
            Check::SymmetricDifference => "hulls.symmetric_difference",
            Check::DecomposeInterval => "hulls.decompose_interval",
            Check::Convexity => "hulls.convexity",
            Check::ProductOracles => "families.product_oracles",
            Check::CornerCoefficient => "cocycle.corner_coefficient",
            Check::MonomialLaw => "cocycle.monomial_law",
            Check::SupportLaw => "cocycle.support_law",
            Check::FinitePropagation => "cocycle.finite_propagation",
            Check::KVanishing => "cocycle.k_vanishing",
            Check::Sparsity => "cocycle.sparsity",
            Check::Axioms => "cocycle.axioms",
            Check::PathIndependence => "cocycle.path_independence",
            Check::Equivariance => "representation.equivariance",
            Check::Homomorphism => "representation.homomorphism",
            Check::DiagonalCoefficient => "representation.diagonal_coefficient",
            Check::Holomorphy => "cocycle.holomorphy",
            Check::AdjointSymmetry => "cocycle.adjoint_symmetry",
            Check::Unitarity => "cocycle.unitarity",
            Check::NormBound => "cocycle.norm_bound",
            Check::TreeNormBound => "cocycle.tree_norm_bound",
        }
    }

    /// The statement each check exercises.
    pub fn anchor(self) -> &'static str {
        match self {
            Check::Validate => "median-graph criterion with filled squares",
            Check::DistanceSeparators => "d(x,y) = #h(x,y)",
            Check::IntervalCharacterization => "geodesic interval = distance-additive set = separator-nested set",
            Check::CornerMoves => "geodesics with common endpoints are related by corner moves",
            Check::UniqueMedian => "every triple has a unique median",
            Check::TwoSided => "each hyperplane cuts the vertex set into exactly two sets",
            Check::NoSelfCrossing => "one edge of each adjacent hyperplane at every vertex",
            Check::IntersectionSquare => "intersecting hyperplanes adjacent to a vertex meet in a square there",
            Check::FrontedGeodesic => "geodesic crossing the adjacent separators first",
            Check::NormalCubePath => "normal cube path partitions h(x,y)",
            Check::IntervalBall => "#(c(x,y) ∩ B(y,k)) ≤ (k+1)^d",
            Check::SymmetricDifference => "h(x,y) \\ h(a,b) ⊆ h(a,x) △ h(b,y)",
            Check::DecomposeInterval => "c(x,y) = c(x,v) ⊔ c(x^op,y) with thin near side and lone adjacent separator at v",
            Check::Convexity => "convex hulls contain geodesics between members",
            Check::ProductOracles => "product distance and hyperplane counts add",
            Check::CornerCoefficient => "<c_z(x,y)δ_y, δ_x> = z^d(x,y)",
            Check::MonomialLaw => "c_ab = ± z^d(a,b) w^ℓ with ℓ ≤ 2 dim, predicted from a geodesic order",
            Check::SupportLaw => "c_ab ≠ 0 ⇒ h(a,b) ⊆ h(x,y) and a ∈ c(x,y,b)",
            Check::FinitePropagation => "c_ab = 0 when d(a,b) > d(x,y)",
            Check::KVanishing => "c^(k) = 0 for k > d(x,y)",
            Check::Sparsity => "rows and columns of c^(k) have ≤ (k+d+1)^d entries, ≤ 2 on trees",
            Check::Axioms => "c(x,x) = I, c(v,x)c(x,y) = c(v,y), c(x,y)c(y,x) = I",
            Check::PathIndependence => "the cocycle does not depend on the edge path",
            Check::Equivariance => "π(g) c(x,y) π(g)^-1 = c(gx,gy)",
            Check::Homomorphism => "π_z(gh) = π_z(g) π_z(h)",
            Check::DiagonalCoefficient => "<π_z(g)δ_x, δ_x> = z^d(x,gx)",
            Check::Holomorphy => "entries are polynomials in z and w on the principal branch",
            Check::AdjointSymmetry => "c_z(x,y) = c_conj(z)(y,x)*",
            Check::Unitarity => "c_z(x,y) is unitary for real z",
            Check::NormBound => "‖c_z(x,y)‖ ≤ 2^d Σ_k |z|^k (k+d+1)^d",
            Check::TreeNormBound => "‖c_z(x,y)‖ ≤ 4/(1-|z|) on trees",
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Check>, ConfigError> {
        s.split(',').map(|t| t.trim().parse()).collect()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Check {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Check::ALL
            .into_iter()
            .find(|c| c.id() == s || c.id().split('.').nth(1) == Some(s))
            .ok_or_else(|| ConfigError::UnknownCheck(s.to_string()))
    }
}

impl From<Check> for String {
    fn from(c: Check) -> String {
        c.id().to_string()
    }
}

impl TryFrom<String> for Check {
    type Error = ConfigError;
    fn try_from(s: String) -> Result<Self, ConfigError> {
        s.parse()
    }
}

/// Runs `checks` on `family`, in catalogue order.
pub fn run_checks(family: &Family, checks: &[Check], cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let mut selected: Vec<Check> = checks.to_vec();
    selected.sort();
    selected.dedup();
    let mut out = Vec::with_capacity(selected.len());
    let symbolic = algebra::SYMBOLIC_CHECKS;
    if selected.iter().any(|c| symbolic.contains(c)) {
        out.extend(
            algebra::symbolic_sweep(family, cfg)
                .into_iter()
                .filter(|r| selected.iter().any(|c| c.id() == r.check)),
        );
    }
    for &c in &selected {
        if symbolic.contains(&c) {
            continue;
        }
        out.push(match c {
            Check::Validate => geometry::validate(family),
            Check::DistanceSeparators => geometry::distance_separators(family, cfg),
            Check::IntervalCharacterization => geometry::interval_characterization(family, cfg),
            Check::CornerMoves => geometry::corner_moves(family, cfg),
            Check::UniqueMedian => geometry::unique_median(family, cfg),
            Check::TwoSided => geometry::two_sided(family),
            Check::NoSelfCrossing => geometry::no_self_crossing(family),
            Check::IntersectionSquare => geometry::intersection_square(family, cfg),
            Check::FrontedGeodesic => geometry::fronted_geodesic(family, cfg),
            Check::NormalCubePath => geometry::normal_cube_path(family, cfg),
            Check::IntervalBall => geometry::interval_ball(family, cfg),
            Check::SymmetricDifference => geometry::symmetric_difference(family, cfg),
            Check::DecomposeInterval => geometry::decompose_interval(family, cfg),
            Check::Convexity => geometry::convexity(family, cfg),
            Check::ProductOracles => geometry::product_oracles(family, cfg),
            Check::Axioms => algebra::axioms(family, cfg),
            Check::PathIndependence => algebra::path_independence(family, cfg),
            Check::Equivariance => algebra::equivariance(family, cfg),
            Check::Homomorphism => algebra::homomorphism(family, cfg),
            Check::DiagonalCoefficient => algebra::diagonal_coefficient(family, cfg),
            Check::Holomorphy => algebra::holomorphy(family, cfg),
            Check::AdjointSymmetry => algebra::adjoint_symmetry(family, cfg),
            Check::Unitarity => algebra::unitarity(family, cfg),
            Check::NormBound => algebra::norm_bound_check(family, cfg),
            Check::TreeNormBound => algebra::tree_norm_bound(family, cfg),
            _ => unreachable!("symbolic checks handled above"),
        });
    }
    let order = |id: &str| Check::ALL.iter().position(|c| c.id() == id);
    out.sort_by_key(|r| order(&r.check));
    out
}

/// `validate` and `two_sided` for a complex that need not be CAT(0).
pub fn validate_complex(spec: &FamilySpec, complex: CubeComplex, load: LoadReport, opts: &ValidationOptions) -> Vec<CheckRecord> {
    let name = spec.to_string();
    let report = complex.validate(opts);
    let validate = geometry::validation_record(&name, &report, &load);
    if !report.is_valid() {
        let two_sided = match HyperplaneSystem::compute(&complex) {
            Err(e) => CheckRecord::failed(Check::TwoSided, &name, oops(e)),
            Ok(_) => CheckRecord::skipped(Check::TwoSided, &name, "complex failed validation"),
        };
        return vec![validate, two_sided];
    }
    match Cat0Complex::assume_valid(complex) {
        Ok(space) => {
            let f = Family {
                spec: spec.clone(),
                space,
                layout: Layout::Opaque,
                load,
                validation: report,
            };
            vec![validate, geometry::two_sided(&f)]
        }
        Err(e) => vec![validate, CheckRecord::failed(Check::TwoSided, &name, oops(e))],
    }
}

/// The whole catalogue.
pub fn verify_family(family: &Family, cfg: &VerifyConfig) -> Vec<CheckRecord> {
    run_checks(family, &Check::ALL, cfg)
}

/// Either every item of a finite population or a seeded uniform sample of it.
#[derive(Debug, Clone)]
pub struct Sample<T> {
    pub items: Vec<T>,
    pub info: Option<SampleInfo>,
}

fn salted(seed: u64, salt: &str) -> u64 {
    // FNV-1a, so sampling streams differ between checks
    let mut h: u64 = 0xcbf29ce484222325;
    for b in salt.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    seed ^ h
}

/// Indices `0..population`, or `cap` of them chosen without replacement.
pub fn sample_indices(population: u128, cap: usize, seed: u64, salt: &str) -> Sample<u128> {
    if population <= cap as u128 {
        return Sample {
            items: (0..population).collect(),
            info: None,
        };
    }
    let stream = salted(seed, salt);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let mut items: Vec<u128> = if population <= usize::MAX as u128 {
        rand::seq::index::sample(&mut rng, population as usize, cap)
            .into_iter()
            .map(|i| i as u128)
            .collect()
    } else {
        use rand::Rng;
        (0..cap).map(|_| rng.gen_range(0..population)).collect()
    };
    items.sort_unstable();
    items.dedup();
    Sample {
        info: Some(SampleInfo {
            seed,
            stream: salt.to_string(),
            population,
            size: items.len(),
        }),
        items,
    }
}

/// Ordered pairs `(x, y)`.
pub fn sample_pairs(n: usize, cap: usize, seed: u64, salt: &str) -> Sample<(usize, usize)> {
    let s = sample_indices((n as u128) * (n as u128), cap, seed, salt);
    let n = n as u128;
    Sample {
        items: s.items.iter().map(|&i| ((i / n) as usize, (i % n) as usize)).collect(),
        info: s.info,
    }
}

/// Ordered triples.
pub fn sample_triples(n: usize, cap: usize, seed: u64, salt: &str) -> Sample<(usize, usize, usize)> {
    let nn = n as u128;
    let s = sample_indices(nn * nn * nn, cap, seed, salt);
    Sample {
        items: s
            .items
            .iter()
            .map(|&i| ((i / (nn * nn)) as usize, (i / nn % nn) as usize, (i % nn) as usize))
            .collect(),
        info: s.info,
    }
}

/// Ordered 4-tuples.
pub fn sample_quadruples(n: usize, cap: usize, seed: u64, salt: &str) -> Sample<[usize; 4]> {
    let nn = n as u128;
    let s = sample_indices(nn.pow(4), cap, seed, salt);
    Sample {
        items: s
            .items
            .iter()
            .map(|&i| {
                [
                    (i / nn.pow(3)) as usize,
                    (i / nn.pow(2) % nn) as usize,
                    (i / nn % nn) as usize,
                    (i % nn) as usize,
                ]
            })
            .collect(),
        info: s.info,
    }
}

/// Aggregate of one per-instance quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Stat {
    pub max: f64,
    pub count: u64,
    pub flag: u64,
}

impl Stat {
    pub fn max(max: f64) -> Self {
        Self { max, ..Self::default() }
    }

    fn merge(&mut self, o: &Stat) {
        self.max = self.max.max(o.max);
        self.count += o.count;
        self.flag += o.flag;
    }
}

/// `Ok` with a statistic, or `Err` with a witness.
pub(crate) type Outcome = Result<Stat, Value>;

pub(crate) fn oops(e: impl fmt::Display) -> Value {
    json!({ "error": e.to_string() })
}

/// Counts over instances; keeps the witness of the lowest failing index so
/// reports do not depend on scheduling.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tally {
    pub instances: u64,
    pub failures: u64,
    pub witness: Option<(usize, Value)>,
    pub stat: Stat,
}

impl Tally {
    fn add(&mut self, i: usize, o: Outcome) {
        self.instances += 1;
        match o {
            Ok(s) => self.stat.merge(&s),
            Err(w) => {
                self.failures += 1;
                if self.witness.as_ref().is_none_or(|(j, _)| i < *j) {
                    self.witness = Some((i, w));
                }
            }
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.instances += o.instances;
        self.failures += o.failures;
        self.stat.merge(&o.stat);
        if let Some((i, w)) = o.witness {
            if self.witness.as_ref().is_none_or(|(j, _)| i < *j) {
                self.witness = Some((i, w));
            }
        }
        self
    }
}

pub(crate) fn tally<T: Sync>(items: &[T], f: impl Fn(&T) -> Outcome + Sync) -> Tally {
    items
        .par_iter()
        .enumerate()
        .fold(Tally::default, |mut t, (i, it)| {
            t.add(i, f(it));
            t
        })
        .reduce(Tally::default, Tally::merge)
}

pub(crate) fn tally_many<T: Sync, const K: usize>(items: &[T], f: impl Fn(&T) -> [Outcome; K] + Sync) -> [Tally; K] {
    let empty = || std::array::from_fn::<Tally, K, _>(|_| Tally::default());
    items
        .par_iter()
        .enumerate()
        .fold(empty, |mut ts, (i, it)| {
            for (t, o) in ts.iter_mut().zip(f(it)) {
                t.add(i, o);
            }
            ts
        })
        .reduce(empty, |a, b| {
            let mut out = empty();
            for (k, (x, y)) in a.into_iter().zip(b).enumerate() {
                out[k] = x.merge(y);
            }
            out
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, Budget};

    #[test]
    fn z_grid_parsing_and_points() {
        let g: ZGrid = "3x4@0.9".parse().unwrap();
        assert_eq!(g.radii(), vec![0.0, 0.45, 0.9]);
        assert_eq!(g.points().len(), 9);
        assert_eq!("2×2@0.5".parse::<ZGrid>().unwrap().radial, 2);
        assert!("3x4@1.0".parse::<ZGrid>().is_err());
        assert!("3x4".parse::<ZGrid>().is_err());
        assert!("0x4@0.5".parse::<ZGrid>().is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_exhaustive_below_cap() {
        let all = sample_pairs(5, 100, 3, "t");
        assert_eq!(all.items.len(), 25);
        assert!(all.info.is_none());
        let a = sample_pairs(100, 50, 3, "t");
        let b = sample_pairs(100, 50, 3, "t");
        assert_eq!(a.items, b.items);
        assert_eq!(a.items.len(), 50);
        assert_ne!(a.items, sample_pairs(100, 50, 3, "u").items);
        let q = sample_quadruples(3, 1000, 0, "q");
        assert_eq!(q.items.len(), 81);
        assert_eq!(q.items[5], [0, 0, 1, 2]);
    }

    #[test]
    fn check_ids_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.id().parse::<Check>().unwrap(), c);
        }
        assert_eq!("monomial_law".parse::<Check>().unwrap(), Check::MonomialLaw);
        assert!("nope".parse::<Check>().is_err());
    }

    #[test]
    fn tally_keeps_lowest_witness() {
        let items: Vec<u64> = (0..100).collect();
        let t = tally(&items, |&i| if i % 7 == 3 { Err(json!(i)) } else { Ok(Stat::max(i as f64)) });
        assert_eq!(t.instances, 100);
        assert_eq!(t.failures, 14);
        assert_eq!(t.witness.unwrap().1, json!(3));
        assert_eq!(t.stat.max, 99.0);
    }

    #[test]
    fn square_passes_everything() {
        let f = generate(&"hypercube(2)".parse().unwrap(), &Budget::default()).unwrap();
        let records = verify_family(&f, &VerifyConfig::default());
        assert_eq!(records.len(), Check::ALL.len());
        for r in &records {
            assert_ne!(r.status, Status::Fail, "{r:?}");
        }
    }

    #[test]
    fn segment_suite() {
        let f = generate(&"segment(5)".parse().unwrap(), &Budget::default()).unwrap();
        let records = verify_family(&f, &VerifyConfig::default());
        for r in &records {
            assert_ne!(r.status, Status::Fail, "{r:?}");
        }
        let tree = records.iter().find(|r| r.check == "cocycle.tree_norm_bound").unwrap();
        assert_eq!(tree.status, Status::Pass);
    }
}
