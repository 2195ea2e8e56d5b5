//! Spectral norms by power iteration, and the bounds they are tested against.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::operator::SparseOperator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("power iteration did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("|z| = {0} must lie in [0, 1)")]
    BadRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterationConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub fallback_seed: u64,
}

impl Default for PowerIterationConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100_000,
            fallback_seed: 0x6e6f726d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub norm: f64,
    pub iterations: usize,
    /// `‖Bv - λv‖ / λ` for `B = A*A` at the returned unit vector.
    pub residual: f64,
    /// Whether the all-ones start was abandoned for the seeded random one.
    pub restarted: bool,
}

/// `‖A‖` for an operator that is the identity off its support.
pub fn operator_norm(op: &SparseOperator<Complex64>, config: &PowerIterationConfig) -> Result<NormEstimate, NormError> {
    let (support, block) = op.dense_block();
    let m = support.len();
    let off_support = if m < op.dimension() { 1.0 } else { 0.0 };
    if m == 0 {
        return Ok(NormEstimate {
            norm: off_support,
            iterations: 0,
            residual: 0.0,
            restarted: false,
        });
    }
    let gram = gram_matrix(&block, m);
    // λ_max ≥ every diagonal entry of A*A, i.e. every squared column norm.
    let diag_max = (0..m).map(|i| gram[i * m + i].re).fold(0.0, f64::max);

    let ones = vec![Complex64::new(1.0, 0.0); m];
    let first = power_iterate(&gram, m, ones, config);
    let accept = |r: &Iteration| r.converged && r.lambda >= diag_max * (1.0 - 1e-12);
    let (result, restarted) = if accept(&first) {
        (first, false)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.fallback_seed);
        let start = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let second = power_iterate(&gram, m, start, config);
        let best = if second.lambda >= first.lambda { second } else { first };
        if !best.converged {
            return Err(NormError::NotConverged {
                iterations: best.iterations,
                residual: best.residual,
            });
        }
        (best, true)
    };
    Ok(NormEstimate {
        norm: result.lambda.max(0.0).sqrt().max(off_support),
        iterations: result.iterations,
        residual: result.residual,
        restarted,
    })
}

/// `A*A` for a dense column-major `m × m` block.
fn gram_matrix(a: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut g = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        let cj = &a[j * m..(j + 1) * m];
        for i in 0..=j {
            let ci = &a[i * m..(i + 1) * m];
            let s: Complex64 = ci.iter().zip(cj).map(|(p, q)| p.conj() * q).sum();
            g[j * m + i] = s;
            g[i * m + j] = s.conj();
        }
    }
    g
}

struct Iteration {
    lambda: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
}

fn power_iterate(b: &[Complex64], m: usize, mut v: Vec<Complex64>, config: &PowerIterationConfig) -> Iteration {
    normalize(&mut v);
    let mut bv = vec![Complex64::new(0.0, 0.0); m];
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=config.max_iterations {
        mat_vec(b, m, &v, &mut bv);
        let rayleigh: f64 = v.iter().zip(&bv).map(|(p, q)| (p.conj() * q).re).sum();
        let res: f64 = v
            .iter()
            .zip(&bv)
            .map(|(p, q)| (q - p * rayleigh).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let prev = lambda;
        lambda = rayleigh;
        if lambda <= 0.0 {
            // B is positive semidefinite, so this is the zero operator.
            return Iteration {
                lambda: 0.0,
                residual: 0.0,
                iterations: it,
                converged: true,
            };
        }
        residual = res / lambda;
        if residual <= config.tolerance.sqrt() && (lambda - prev).abs() <= config.tolerance * lambda {
            return Iteration {
                lambda,
                residual,
                iterations: it,
                converged: true,
            };
        }
        std::mem::swap(&mut v, &mut bv);
        normalize(&mut v);
    }
    Iteration {
        lambda,
        residual,
        iterations: config.max_iterations,
        converged: false,
    }
}

fn mat_vec(b: &[Complex64], m: usize, v: &[Complex64], out: &mut [Complex64]) {
    out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
    for (j, vj) in v.iter().enumerate() {
        if vj.re == 0.0 && vj.im == 0.0 {
            continue;
        }
        for (o, bij) in out.iter_mut().zip(&b[j * m..(j + 1) * m]) {
            *o += bij * vj;
        }
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Upper bounds for `‖c_z(x, y)‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    /// `2^d Σ_{k=0}^{d(x,y)} |z|^k (k+d+1)^d`.
    pub general: f64,
    /// `4 / (1 - |z|)`, for complexes of dimension at most one.
    pub tree: Option<f64>,
}

impl NormBound {
    pub fn tightest(&self) -> f64 {
        self.tree.map_or(self.general, |t| t.min(self.general))
    }
}

pub fn norm_bound(dim: usize, distance: usize, z_abs: f64) -> Result<NormBound, NormError> {
    if !(0.0..1.0).contains(&z_abs) {
        return Err(NormError::BadRadius(z_abs));
    }
    let d = dim as i32;
    let sum: f64 = (0..=distance)
        .map(|k| z_abs.powi(k as i32) * ((k + dim + 1) as f64).powi(d))
        .sum();
    Ok(NormBound {
        general: 2f64.powi(d) * sum,
        tree: (dim <= 1).then(|| 4.0 / (1.0 - z_abs)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, cols: Vec<(usize, Vec<(usize, Complex64)>)>) -> SparseOperator<Complex64> {
        SparseOperator::from_columns(n, cols)
    }

    #[test]
    fn identity_has_norm_one() {
        let est = operator_norm(&SparseOperator::identity(5), &PowerIterationConfig::default()).unwrap();
        assert_eq!(est.norm, 1.0);
    }

    #[test]
    fn two_by_two_block_matches_closed_form() {
        // [[w, z], [-z, w]] at z = 0.6i, w = sqrt(1.36)
        let z = Complex64::new(0.0, 0.6);
        let w = Complex64::new(1.36f64.sqrt(), 0.0);
        let a = op(2, vec![(0, vec![(0, w), (1, -z)]), (1, vec![(0, z), (1, w)])]);
        let est = operator_norm(&a, &PowerIterationConfig::default()).unwrap();
        // A*A = [[|w|^2+|z|^2, w̄z - z̄w], [.., ..]] has eigenvalues (|w| ± |z|)^2 here.
        let expected = w.norm() + z.norm();
        assert!((est.norm - expected).abs() < 1e-9, "{} vs {}", est.norm, expected);
    }

    #[test]
    fn small_block_inside_large_space_is_at_least_one() {
        let a = op(10, vec![(3, vec![(3, Complex64::new(0.5, 0.0))])]);
        let est = operator_norm(&a, &PowerIterationConfig::default()).unwrap();
        assert_eq!(est.norm, 1.0);
    }

    #[test]
    fn bounds() {
        let b = norm_bound(1, 5, 0.5).unwrap();
        assert_eq!(b.tree, Some(8.0));
        let b0 = norm_bound(2, 3, 0.0).unwrap();
        assert_eq!(b0.general, 4.0 * 9.0);
        assert!(norm_bound(2, 3, 1.0).is_err());
    }
}
