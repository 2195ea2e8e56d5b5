//! Deterministic generators for test complexes and their automorphisms.
//!
//! Family strings accept a call form and a colon form:
//!
//! ```text
//! segment(4)          segment:4
//! tree(3,2)           tree:3,2           arity 3, depth 2
//! random_tree(50,7)   random_tree:50,7   50 vertices, seed 7
//! hypercube(3)        hypercube:3
//! grid(3,4)           grid:3x4           3 × 4 cells
//! product(A,B)        product:A*B        also plain A*B
//! json(path)          json:path
//! ```
//!
//! Random trees use the 64-bit linear congruential generator
//! `s ← s·6364136223846793005 + 1442695040888963407 (mod 2⁶⁴)` started at
//! `s = seed`. Vertex 0 is the root, and vertex `i ≥ 1` is attached to
//! parent `(s >> 33) mod i`, drawing a fresh `s` for each `i` in order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cat0::{Cat0Complex, Cat0Error};
use crate::cocycle::{ActionError, Automorphism};
use crate::complex::{ComplexError, ComplexFile, CubeComplex, LoadReport, ValidationOptions, ValidationReport, VertexId};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("cannot parse family {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("{spec} has {value} {what}, budget allows {cap}")]
    BudgetExceeded {
        spec: String,
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("reading {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cat0(#[from] Cat0Error),
    #[error(transparent)]
    Action(#[from] ActionError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FamilySpec {
    Segment(usize),
    Tree { arity: usize, depth: usize },
    RandomTree { n: usize, seed: u64 },
    Hypercube(usize),
    /// Cell counts along each axis.
    Grid(Vec<usize>),
    Product(Box<FamilySpec>, Box<FamilySpec>),
    FromJson(PathBuf),
}

impl FamilySpec {
    pub fn product(a: FamilySpec, b: FamilySpec) -> Self {
        FamilySpec::Product(Box::new(a), Box::new(b))
    }

    /// Vertex count, without building anything. `None` for files.
    pub fn vertex_count(&self) -> Option<usize> {
        match self {
            FamilySpec::Segment(n) => n.checked_add(1),
            FamilySpec::Tree { arity, depth } => tree_size(*arity, *depth),
            FamilySpec::RandomTree { n, .. } => Some(*n),
            FamilySpec::Hypercube(d) => 1usize.checked_shl(*d as u32).filter(|_| *d < 63),
            FamilySpec::Grid(dims) => dims.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n.checked_add(1)?)),
            FamilySpec::Product(a, b) => a.vertex_count()?.checked_mul(b.vertex_count()?),
            FamilySpec::FromJson(_) => None,
        }
    }

    /// Dimension, without building anything. `None` for files.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            FamilySpec::Segment(n) => Some(usize::from(*n > 0)),
            FamilySpec::Tree { arity, depth } => Some(usize::from(*arity > 0 && *depth > 0)),
            FamilySpec::RandomTree { n, .. } => Some(usize::from(*n > 1)),
            FamilySpec::Hypercube(d) => Some(*d),
            FamilySpec::Grid(dims) => Some(dims.iter().filter(|&&n| n > 0).count()),
            FamilySpec::Product(a, b) => Some(a.dimension()? + b.dimension()?),
            FamilySpec::FromJson(_) => None,
        }
    }

    pub fn is_tree(&self) -> bool {
        self.dimension().is_some_and(|d| d <= 1)
    }
}

fn tree_size(arity: usize, depth: usize) -> Option<usize> {
    let mut total = 1usize;
    let mut level = 1usize;
    for _ in 0..depth {
        level = level.checked_mul(arity)?;
        total = total.checked_add(level)?;
    }
    Some(total)
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Segment(n) => write!(f, "segment({n})"),
            FamilySpec::Tree { arity, depth } => write!(f, "tree({arity},{depth})"),
            FamilySpec::RandomTree { n, seed } => write!(f, "random_tree({n},{seed})"),
            FamilySpec::Hypercube(d) => write!(f, "hypercube({d})"),
            FamilySpec::Grid(dims) => {
                let dims: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                write!(f, "grid({})", dims.join(","))
            }
            FamilySpec::Product(a, b) => write!(f, "product({a},{b})"),
            FamilySpec::FromJson(p) => write!(f, "json({})", p.display()),
        }
    }
}

impl From<FamilySpec> for String {
    fn from(s: FamilySpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for FamilySpec {
    type Error = FamilyError;
    fn try_from(s: String) -> Result<Self, FamilyError> {
        s.parse()
    }
}

impl FromStr for FamilySpec {
    type Err = FamilyError;

    fn from_str(input: &str) -> Result<Self, FamilyError> {
        let fail = |reason: String| FamilyError::Parse {
            input: input.to_string(),
            reason,
        };
        parse_spec(input.trim()).map_err(fail)
    }
}

fn parse_spec(s: &str) -> Result<FamilySpec, String> {
    let colon_first = match (s.find(':'), s.find('(')) {
        (Some(c), Some(o)) => c < o,
        (Some(_), None) => true,
        _ => false,
    };
    if colon_first {
        let colon = s.find(':').unwrap_or_default();
        return parse_call(&s[..colon], &s[colon + 1..]);
    }
    // A top-level `*` is a product; it binds looser than everything else.
    if let Some(i) = top_level(s, '*') {
        return Ok(FamilySpec::product(parse_spec(s[..i].trim())?, parse_spec(s[i + 1..].trim())?));
    }
    match s.find('(') {
        Some(open) if s.ends_with(')') => parse_call(&s[..open], &s[open + 1..s.len() - 1]),
        Some(_) => Err("missing closing parenthesis".into()),
        None => parse_call(s, ""),
    }
}

fn parse_call(name: &str, args: &str) -> Result<FamilySpec, String> {
    let name = name.trim().to_ascii_lowercase();
    let args = args.trim();
    let ints = |sep: &[char]| -> Result<Vec<u64>, String> {
        if args.is_empty() {
            return Ok(Vec::new());
        }
        args.split(sep)
            .map(|a| a.trim().parse::<u64>().map_err(|e| format!("bad integer {a:?}: {e}")))
            .collect()
    };
    let exactly = |v: Vec<u64>, n: usize| -> Result<Vec<u64>, String> {
        if v.len() == n {
            Ok(v)
        } else {
            Err(format!("{name} takes {n} argument(s), got {}", v.len()))
        }
    };
    let to_usize = |v: u64| usize::try_from(v).map_err(|_| format!("{v} is too large"));
    match name.as_str() {
        "segment" | "path" => Ok(FamilySpec::Segment(to_usize(exactly(ints(&[','])?, 1)?[0])?)),
        "tree" => {
            let v = exactly(ints(&[','])?, 2)?;
            Ok(FamilySpec::Tree {
                arity: to_usize(v[0])?,
                depth: to_usize(v[1])?,
            })
        }
        "random_tree" => {
            let v = exactly(ints(&[','])?, 2)?;
            Ok(FamilySpec::RandomTree {
                n: to_usize(v[0])?,
                seed: v[1],
            })
        }
        "hypercube" | "cube" => Ok(FamilySpec::Hypercube(to_usize(exactly(ints(&[','])?, 1)?[0])?)),
        "grid" => {
            let v = ints(&[',', 'x', 'X', '×'])?;
            if v.is_empty() {
                return Err("grid needs at least one axis".into());
            }
            Ok(FamilySpec::Grid(v.into_iter().map(to_usize).collect::<Result<_, _>>()?))
        }
        "product" => {
            let i = top_level(args, ',')
                .or_else(|| top_level(args, '*'))
                .ok_or_else(|| "product needs two factors".to_string())?;
            Ok(FamilySpec::product(parse_spec(args[..i].trim())?, parse_spec(args[i + 1..].trim())?))
        }
        "json" | "from_json" | "file" => {
            if args.is_empty() {
                return Err("json needs a path".into());
            }
            Ok(FamilySpec::FromJson(PathBuf::from(args)))
        }
        "" => Err("empty family".into()),
        other => Err(format!("unknown family {other:?}")),
    }
}

/// First occurrence of `sep` outside parentheses.
fn top_level(s: &str, sep: char) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Limits checked before a family is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_vertices: usize,
    pub max_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_vertices: 4096,
            max_dim: 8,
        }
    }
}

/// How vertex ids relate to the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layout {
    /// Mixed radix: vertex `Σ cᵢ·strideᵢ` with `0 ≤ cᵢ ≤ dims[i]` and axis 0
    /// varying fastest.
    Grid { dims: Vec<usize> },
    /// `parent[0]` is `None`.
    Tree { parent: Vec<Option<VertexId>> },
    /// Vertex `(u, v)` is `u·right_size + v`.
    Product {
        left: Box<Layout>,
        right: Box<Layout>,
        right_size: usize,
    },
    Opaque,
}

/// A generated complex with its hyperplanes and the record of how it was made.
#[derive(Debug, Clone)]
pub struct Family {
    pub spec: FamilySpec,
    pub space: Cat0Complex,
    pub layout: Layout,
    pub load: LoadReport,
    pub validation: ValidationReport,
}

impl Family {
    pub fn name(&self) -> String {
        self.spec.to_string()
    }

    pub fn complex(&self) -> &CubeComplex {
        self.space.complex()
    }
}

/// Builds and validates the complex for `spec`.
pub fn generate(spec: &FamilySpec, budget: &Budget) -> Result<Family, FamilyError> {
    generate_with(spec, budget, &ValidationOptions::default())
}

pub fn generate_with(spec: &FamilySpec, budget: &Budget, options: &ValidationOptions) -> Result<Family, FamilyError> {
    let (complex, load, layout) = build_unvalidated(spec, budget)?;
    let (space, validation) = Cat0Complex::with_options(complex, options)?;
    Ok(Family {
        spec: spec.clone(),
        space,
        layout,
        load,
        validation,
    })
}

/// Builds the complex for `spec` within `budget` without the CAT(0) test.
pub fn build_unvalidated(spec: &FamilySpec, budget: &Budget) -> Result<(CubeComplex, LoadReport, Layout), FamilyError> {
    check_budget(spec, budget)?;
    let (complex, load, layout) = build(spec)?;
    if complex.n_vertices() > budget.max_vertices {
        return Err(over(spec, "vertices", complex.n_vertices(), budget.max_vertices));
    }
    if complex.dim() > budget.max_dim {
        return Err(over(spec, "dimensions", complex.dim(), budget.max_dim));
    }
    Ok((complex, load, layout))
}

fn over(spec: &FamilySpec, what: &'static str, value: usize, cap: usize) -> FamilyError {
    FamilyError::BudgetExceeded {
        spec: spec.to_string(),
        what,
        value,
        cap,
    }
}

fn check_budget(spec: &FamilySpec, budget: &Budget) -> Result<(), FamilyError> {
    if let FamilySpec::Product(a, b) = spec {
        check_budget(a, budget)?;
        check_budget(b, budget)?;
    }
    if matches!(spec, FamilySpec::FromJson(_)) {
        return Ok(());
    }
    match spec.vertex_count() {
        Some(n) if n <= budget.max_vertices => {}
        Some(n) => return Err(over(spec, "vertices", n, budget.max_vertices)),
        None => return Err(over(spec, "vertices", usize::MAX, budget.max_vertices)),
    }
    if let Some(d) = spec.dimension().filter(|&d| d > budget.max_dim) {
        return Err(over(spec, "dimensions", d, budget.max_dim));
    }
    Ok(())
}

fn build(spec: &FamilySpec) -> Result<(CubeComplex, LoadReport, Layout), FamilyError> {
    match spec {
        FamilySpec::Segment(n) => build_grid(&[*n]),
        FamilySpec::Hypercube(d) => build_grid(&vec![1; *d]),
        FamilySpec::Grid(dims) => build_grid(dims),
        FamilySpec::Tree { arity, depth } => build_tree(regular_tree_parents(*arity, *depth)),
        FamilySpec::RandomTree { n, seed } => build_tree(random_tree_parents(*n, *seed)),
        FamilySpec::Product(a, b) => {
            let (ca, _, la) = build(a)?;
            let (cb, _, lb) = build(b)?;
            let (c, load) = product_complex(&ca, &cb)?;
            let layout = Layout::Product {
                left: Box::new(la),
                right: Box::new(lb),
                right_size: cb.n_vertices(),
            };
            Ok((c, load, layout))
        }
        FamilySpec::FromJson(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| FamilyError::Io {
                path: path.clone(),
                source,
            })?;
            let file: ComplexFile = serde_json::from_str(&text).map_err(|source| FamilyError::Json {
                path: path.clone(),
                source,
            })?;
            let (c, load) = file.into_complex()?;
            Ok((c, load, Layout::Opaque))
        }
    }
}

fn build_grid(dims: &[usize]) -> Result<(CubeComplex, LoadReport, Layout), FamilyError> {
    let axes: Vec<usize> = (0..dims.len()).filter(|&i| dims[i] > 0).collect();
    let strides = grid_strides(dims);
    let n = strides.last().copied().unwrap_or(1) * dims.last().map_or(1, |d| d + 1);
    let mut cubes = Vec::new();
    // Every cell is an axis-aligned unit cube in the nondegenerate axes.
    let cells: Vec<usize> = dims.iter().map(|&d| d.max(1)).collect();
    let total_cells: usize = axes.iter().map(|&i| cells[i]).product();
    for cell in 0..total_cells {
        let mut rest = cell;
        let mut base = 0;
        for &i in &axes {
            base += (rest % cells[i]) * strides[i];
            rest /= cells[i];
        }
        let corners: Vec<VertexId> = (0..1usize << axes.len())
            .map(|bitsel| {
                axes.iter()
                    .enumerate()
                    .filter(|(j, _)| bitsel >> j & 1 == 1)
                    .map(|(_, &i)| strides[i])
                    .sum::<usize>()
                    + base
            })
            .collect();
        cubes.push(corners);
    }
    let (c, load) = CubeComplex::from_cubes(n, cubes)?;
    Ok((c, load, Layout::Grid { dims: dims.to_vec() }))
}

fn grid_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = Vec::with_capacity(dims.len());
    let mut s = 1;
    for &d in dims {
        strides.push(s);
        s *= d + 1;
    }
    strides
}

fn build_tree(parent: Vec<Option<VertexId>>) -> Result<(CubeComplex, LoadReport, Layout), FamilyError> {
    let n = parent.len();
    let edges = parent
        .iter()
        .enumerate()
        .filter_map(|(v, p)| p.map(|p| vec![p, v]))
        .collect::<Vec<_>>();
    let (c, load) = CubeComplex::from_cubes(n, edges)?;
    Ok((c, load, Layout::Tree { parent }))
}

/// Breadth-first numbering: the children of `v` are `a·v + 1 ..= a·v + a`.
pub fn regular_tree_parents(arity: usize, depth: usize) -> Vec<Option<VertexId>> {
    let n = tree_size(arity, depth).expect("size checked against the budget");
    (0..n).map(|v| (v > 0).then(|| (v - 1) / arity)).collect()
}

pub fn random_tree_parents(n: usize, seed: u64) -> Vec<Option<VertexId>> {
    let mut lcg = Lcg(seed);
    (0..n)
        .map(|i| (i > 0).then(|| (lcg.next_u64() >> 33) as usize % i))
        .collect()
}

/// The generator named in the module docs.
#[derive(Debug, Clone)]
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }
}

/// Vertices are pairs `(u, v) ↦ u·|B| + v`; cubes are products of maximal cubes.
pub fn product_complex(a: &CubeComplex, b: &CubeComplex) -> Result<(CubeComplex, LoadReport), ComplexError> {
    let nb = b.n_vertices();
    let fa = a.to_file_maximal();
    let fb = b.to_file_maximal();
    let mut cubes = Vec::with_capacity(fa.cubes.len() * fb.cubes.len());
    for ca in &fa.cubes {
        for cb in &fb.cubes {
            // Binary coordinates: A's bits low, B's bits high.
            let mut list = Vec::with_capacity(ca.len() * cb.len());
            for &v in cb {
                for &u in ca {
                    list.push(u * nb + v);
                }
            }
            cubes.push(list);
        }
    }
    CubeComplex::from_cubes(a.n_vertices() * nb, cubes)
}

/// Generators returned by [`automorphisms`], with a note when the family
/// has no supported symmetry search.
#[derive(Debug, Clone, Default)]
pub struct AutomorphismSet {
    pub generators: Vec<Automorphism>,
    pub notice: Option<String>,
}

/// Trees with at most this many vertices are searched exhaustively.
pub const EXHAUSTIVE_TREE_CAP: usize = 12;
/// Largest group listed element by element in the exhaustive search.
pub const EXHAUSTIVE_ELEMENT_CAP: usize = 10_000;

/// Cube-preserving permutations of the family, each verified.
pub fn automorphisms(family: &Family) -> Result<AutomorphismSet, FamilyError> {
    let complex = family.complex();
    let mut notice = None;
    let perms = match layout_automorphisms(complex, &family.layout) {
        Some(perms) => perms,
        None => {
            notice = Some(format!("no automorphism search for {}", family.spec));
            Vec::new()
        }
    };
    let mut seen = HashSet::new();
    let mut generators = Vec::new();
    for p in perms {
        let g = Automorphism::new(complex, p)?;
        if !g.is_identity() && seen.insert(g.clone()) {
            generators.push(g);
        }
    }
    Ok(AutomorphismSet { generators, notice })
}

fn layout_automorphisms(complex: &CubeComplex, layout: &Layout) -> Option<Vec<Vec<VertexId>>> {
    match layout {
        Layout::Grid { dims } => Some(grid_automorphisms(dims)),
        Layout::Tree { parent } => {
            if parent.len() <= EXHAUSTIVE_TREE_CAP {
                if let Some(all) = exhaustive_graph_automorphisms(complex, EXHAUSTIVE_ELEMENT_CAP) {
                    return Some(all);
                }
            }
            Some(tree_generators(complex))
        }
        Layout::Product {
            left,
            right,
            right_size,
        } => {
            let nb = *right_size;
            let na = complex.n_vertices() / nb;
            let (ca, cb) = factor_complexes(complex, na, nb);
            let ga = layout_automorphisms(&ca, left)?;
            let gb = layout_automorphisms(&cb, right)?;
            let mut out = Vec::new();
            for g in &ga {
                out.push((0..na * nb).map(|w| g[w / nb] * nb + w % nb).collect());
            }
            for h in &gb {
                out.push((0..na * nb).map(|w| (w / nb) * nb + h[w % nb]).collect());
            }
            if na == nb && left == right {
                out.push((0..na * nb).map(|w| (w % nb) * nb + w / nb).collect());
            }
            Some(out)
        }
        Layout::Opaque => {
            if complex.n_vertices() <= EXHAUSTIVE_TREE_CAP {
                exhaustive_graph_automorphisms(complex, EXHAUSTIVE_ELEMENT_CAP)
            } else {
                None
            }
        }
    }
}

/// The factors of a product recovered from its 1-skeleton: `(u, 0)` and
/// `(0, v)` slices.
fn factor_complexes(complex: &CubeComplex, na: usize, nb: usize) -> (CubeComplex, CubeComplex) {
    let mut ea = Vec::new();
    let mut eb = Vec::new();
    for (p, q) in complex.edges() {
        if p % nb == q % nb {
            if p % nb == 0 {
                ea.push(vec![p / nb, q / nb]);
            }
        } else if p / nb == 0 && q / nb == 0 {
            eb.push(vec![p, q]);
        }
    }
    let a = CubeComplex::from_cubes(na, ea).expect("slice of a valid product").0;
    let b = CubeComplex::from_cubes(nb, eb).expect("slice of a valid product").0;
    (a, b)
}

/// Axis reflections, and transpositions of axes with equal length.
fn grid_automorphisms(dims: &[usize]) -> Vec<Vec<VertexId>> {
    let strides = grid_strides(dims);
    let n: usize = dims.iter().map(|d| d + 1).product();
    let coords = |v: VertexId| -> Vec<usize> { (0..dims.len()).map(|i| v / strides[i] % (dims[i] + 1)).collect() };
    let index = |c: &[usize]| -> VertexId { c.iter().zip(&strides).map(|(a, s)| a * s).sum() };
    let mut out = Vec::new();
    for i in 0..dims.len() {
        if dims[i] == 0 {
            continue;
        }
        out.push(
            (0..n)
                .map(|v| {
                    let mut c = coords(v);
                    c[i] = dims[i] - c[i];
                    index(&c)
                })
                .collect(),
        );
    }
    for i in 0..dims.len() {
        for j in i + 1..dims.len() {
            if dims[i] == dims[j] && dims[i] > 0 {
                out.push(
                    (0..n)
                        .map(|v| {
                            let mut c = coords(v);
                            c.swap(i, j);
                            index(&c)
                        })
                        .collect(),
                );
            }
        }
    }
    out
}

/// Every automorphism of the 1-skeleton by backtracking, or `None` when the
/// group has more than `cap` elements.
pub fn exhaustive_graph_automorphisms(complex: &CubeComplex, cap: usize) -> Option<Vec<Vec<VertexId>>> {
    let n = complex.n_vertices();
    let degree: Vec<usize> = (0..n).map(|v| complex.neighbors(v).len()).collect();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut out = Vec::new();
    fn extend(
        v: usize,
        complex: &CubeComplex,
        degree: &[usize],
        image: &mut [usize],
        used: &mut [bool],
        out: &mut Vec<Vec<VertexId>>,
        cap: usize,
    ) -> bool {
        let n = image.len();
        if v == n {
            if out.len() >= cap {
                return false;
            }
            out.push(image.to_vec());
            return true;
        }
        for t in 0..n {
            if used[t] || degree[t] != degree[v] {
                continue;
            }
            let consistent = (0..v).all(|u| complex.is_edge(u, v) == complex.is_edge(image[u], t));
            if !consistent {
                continue;
            }
            image[v] = t;
            used[t] = true;
            let ok = extend(v + 1, complex, degree, image, used, out, cap);
            used[t] = false;
            image[v] = usize::MAX;
            if !ok {
                return false;
            }
        }
        true
    }
    extend(0, complex, &degree, &mut image, &mut used, &mut out, cap).then_some(out)
}

/// Generators of the automorphism group of a tree: swaps of isomorphic
/// sibling subtrees about the center, and the swap of the two halves when
/// the center is an edge with isomorphic sides.
pub fn tree_generators(complex: &CubeComplex) -> Vec<Vec<VertexId>> {
    let n = complex.n_vertices();
    if n <= 1 {
        return Vec::new();
    }
    let centers = tree_centers(complex);
    let rooted = RootedTree::new(complex, &centers);
    let mut out = Vec::new();
    for v in 0..n {
        let mut by_label: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for &c in &rooted.children[v] {
            by_label.entry(rooted.label[c]).or_default().push(c);
        }
        for group in by_label.values() {
            for pair in group.windows(2) {
                out.push(rooted.swap(pair[0], pair[1]));
            }
        }
    }
    if let [a, b] = centers[..] {
        if rooted.label[a] == rooted.label[b] {
            out.push(rooted.swap(a, b));
        }
    }
    out
}

fn tree_centers(complex: &CubeComplex) -> Vec<VertexId> {
    let n = complex.n_vertices();
    let mut degree: Vec<usize> = (0..n).map(|v| complex.neighbors(v).len()).collect();
    let mut layer: Vec<VertexId> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &u in complex.neighbors(leaf) {
                if degree[u] > 1 {
                    degree[u] -= 1;
                    if degree[u] == 1 {
                        next.push(u);
                    }
                }
            }
            degree[leaf] = 0;
        }
        layer = next;
    }
    let mut c = layer;
    c.sort_unstable();
    c
}

/// A tree rooted at one or two centers, with AHU isomorphism labels.
struct RootedTree {
    children: Vec<Vec<VertexId>>,
    label: Vec<usize>,
}

impl RootedTree {
    fn new(complex: &CubeComplex, roots: &[VertexId]) -> Self {
        let n = complex.n_vertices();
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        for &r in roots {
            parent[r] = r;
        }
        // The two centers, when there are two, are each other's non-parent.
        let mut stack: Vec<VertexId> = roots.to_vec();
        let mut children = vec![Vec::new(); n];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &u in complex.neighbors(v) {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    children[v].push(u);
                    stack.push(u);
                }
            }
        }
        let mut interned: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut label = vec![0; n];
        for &v in order.iter().rev() {
            let mut key: Vec<usize> = children[v].iter().map(|&c| label[c]).collect();
            key.sort_unstable();
            let next = interned.len();
            label[v] = *interned.entry(key).or_insert(next);
        }
        for c in children.iter_mut() {
            c.sort_by_key(|&u| (label[u], u));
        }
        Self { children, label }
    }

    /// Exchanges the subtrees at `a` and `b`, which have equal labels.
    fn swap(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        let mut perm: Vec<VertexId> = (0..self.label.len()).collect();
        let mut stack = vec![(a, b)];
        while let Some((u, v)) = stack.pop() {
            perm[u] = v;
            perm[v] = u;
            // Children are sorted by label, so equal positions have equal labels.
            for (&cu, &cv) in self.children[u].iter().zip(&self.children[v]) {
                stack.push((cu, cv));
            }
        }
        perm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::GroupAction;

    fn gen(s: &str) -> Family {
        generate(&s.parse().unwrap(), &Budget::default()).unwrap()
    }

    #[test]
    fn parses_both_forms() {
        let cases = [
            ("grid:3x4", FamilySpec::Grid(vec![3, 4])),
            ("grid(3,4)", FamilySpec::Grid(vec![3, 4])),
            ("tree(3,2)", FamilySpec::Tree { arity: 3, depth: 2 }),
            ("random_tree:50,7", FamilySpec::RandomTree { n: 50, seed: 7 }),
            ("hypercube:3", FamilySpec::Hypercube(3)),
            (
                "product:tree(3,2)*segment(4)",
                FamilySpec::product(FamilySpec::Tree { arity: 3, depth: 2 }, FamilySpec::Segment(4)),
            ),
        ];
        for (s, want) in cases {
            let got: FamilySpec = s.parse().unwrap();
            assert_eq!(got, want, "{s}");
            assert_eq!(got.to_string().parse::<FamilySpec>().unwrap(), want);
        }
        for bad in ["", "tree(3)", "grid:", "blob(1)", "segment(x)", "product(segment(1))"] {
            assert!(bad.parse::<FamilySpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn hypercube_two_is_a_square() {
        let f = gen("hypercube(2)");
        assert_eq!(f.complex().n_vertices(), 4);
        assert_eq!(f.complex().dim(), 2);
        assert_eq!(f.complex().cubes().iter().filter(|c| c.dim() == 2).count(), 1);
    }

    #[test]
    fn product_of_segments_is_a_grid() {
        let f = gen("product(segment(2),segment(3))");
        assert_eq!(f.complex().n_vertices(), 12);
        assert_eq!(f.complex().dim(), 2);
        assert_eq!(f.space.hyperplanes().len(), 5);
        let g = gen("grid:2x3");
        assert_eq!(g.complex().n_edges(), f.complex().n_edges());
    }

    #[test]
    fn random_tree_is_reproducible() {
        let a = gen("random_tree(50,7)");
        let b = gen("random_tree(50,7)");
        assert_eq!(a.layout, b.layout);
        assert_eq!(a.complex().n_vertices(), 50);
        assert_eq!(a.complex().dim(), 1);
        assert_eq!(a.complex().n_edges(), 49);
        assert_ne!(a.layout, gen("random_tree(50,8)").layout);
        // first draws from seed 7
        let mut lcg = Lcg(7);
        let s1 = lcg.next_u64();
        assert_eq!(s1, 7u64.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407));
    }

    #[test]
    fn budget_is_enforced() {
        let small = Budget {
            max_vertices: 100,
            max_dim: 3,
        };
        assert!(matches!(
            generate(&"grid:10x10".parse().unwrap(), &small),
            Err(FamilyError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            generate(&"hypercube(4)".parse().unwrap(), &small),
            Err(FamilyError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn hypercube_three_group_has_48_elements() {
        let f = gen("hypercube(3)");
        let set = automorphisms(&f).unwrap();
        let action = GroupAction::new(0, set.generators);
        let (elements, truncated) = action.elements(8, 1000);
        assert!(!truncated);
        assert_eq!(elements.len(), 48);
    }

    #[test]
    fn segment_has_its_reflection() {
        let f = gen("segment(4)");
        let set = automorphisms(&f).unwrap();
        assert_eq!(set.generators.len(), 1);
        assert_eq!(set.generators[0].as_slice(), &[4, 3, 2, 1, 0]);
    }

    #[test]
    fn grid_two_by_three_has_the_reflection_pair() {
        let f = gen("grid:2x3");
        let set = automorphisms(&f).unwrap();
        assert_eq!(set.generators.len(), 2);
        let all = exhaustive_graph_automorphisms(f.complex(), 100).unwrap();
        let (closure, _) = GroupAction::new(0, set.generators).elements(12, 100);
        assert_eq!(all.len(), 4);
        assert_eq!(closure.len(), 4);
    }

    #[test]
    fn tree_generators_match_exhaustive_search() {
        for s in ["tree(2,2)", "tree(3,1)", "random_tree(11,3)", "random_tree(12,5)"] {
            let f = gen(s);
            let exhaustive = exhaustive_graph_automorphisms(f.complex(), 100_000).unwrap();
            let gens: Vec<Automorphism> = tree_generators(f.complex())
                .into_iter()
                .map(|p| Automorphism::new(f.complex(), p).unwrap())
                .collect();
            let (closure, truncated) = GroupAction::new(0, gens).elements(f.complex().n_vertices(), 100_000);
            assert!(!truncated);
            assert_eq!(closure.len(), exhaustive.len(), "{s}");
        }
    }

    #[test]
    fn large_tree_uses_generators() {
        let f = gen("tree(2,4)");
        let set = automorphisms(&f).unwrap();
        // 2^15 elements, generated by one swap per internal vertex
        assert_eq!(set.generators.len(), 15);
        let (closure, truncated) = GroupAction::new(0, set.generators).elements(31, 40_000);
        assert!(!truncated);
        assert_eq!(closure.len(), 1 << 15);
    }

    #[test]
    fn product_generators_are_lifted() {
        let f = gen("product(tree(2,1),tree(2,1))");
        let set = automorphisms(&f).unwrap();
        let (closure, _) = GroupAction::new(0, set.generators).elements(9, 1000);
        let exhaustive = exhaustive_graph_automorphisms(f.complex(), 1000).unwrap();
        assert_eq!(closure.len(), exhaustive.len());
        assert_eq!(closure.len(), 8);
    }

    #[test]
    fn product_oracles() {
        let a = gen("tree(2,2)");
        let b = gen("segment(3)");
        let p = gen("product(tree(2,2),segment(3))");
        let nb = b.complex().n_vertices();
        assert_eq!(p.space.hyperplanes().len(), a.space.hyperplanes().len() + b.space.hyperplanes().len());
        assert_eq!(p.complex().dim(), 2);
        for x in 0..p.complex().n_vertices() {
            for y in 0..p.complex().n_vertices() {
                let want = a.complex().d(x / nb, y / nb) + b.complex().d(x % nb, y % nb);
                assert_eq!(p.complex().d(x, y), want);
            }
        }
    }

    #[test]
    fn json_family_round_trips() {
        let dir = std::env::temp_dir().join(format!("families-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("grid.json");
        let g = gen("grid:2x2");
        std::fs::write(&path, serde_json::to_string(&g.complex().to_file_maximal()).unwrap()).unwrap();
        let f = generate(&FamilySpec::FromJson(path.clone()), &Budget::default()).unwrap();
        assert_eq!(f.complex().n_edges(), g.complex().n_edges());
        let set = automorphisms(&f).unwrap();
        assert!(set.notice.is_none());
        assert_eq!(set.generators.len(), 7);
        std::fs::remove_dir_all(&dir).ok();
    }
}
