//! Discretized model of the time-averaged normal-ordered square: kernel
//! matrix on a midpoint time grid, eigenvalues of the weighted kernel, exact
//! trace cumulants, and seeded sampling of the generalized chi-square law
//! sum_i lambda_i (z_i^2 - 1), whose support is bounded below by
//! -sum_i lambda_i.

use crate::error::{Error, Result};
use crate::field2d;
use crate::stats;
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Midpoint grid on [0, T]: t_i = (i + 1/2) h with h = T / N, plus the
/// coincidence regulator epsilon used on the kernel diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub duration: f64,
    pub points: usize,
    pub epsilon: f64,
}

impl TimeGrid {
    /// Grid with the default regulator epsilon = h / 2, i.e. the diagonal
    /// stands in for the cell-averaged kernel.
    pub fn new(duration: f64, points: usize) -> Result<Self> {
        let h = duration / points as f64;
        Self::with_epsilon(duration, points, 0.5 * h)
    }

    pub fn with_epsilon(duration: f64, points: usize, epsilon: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid(
                "duration",
                format!("must be > 0, got {duration}"),
            ));
        }
        if points == 0 {
            return Err(Error::invalid("points", "need at least 1 grid point"));
        }
        let h = duration / points as f64;
        if !(epsilon > 0.0 && epsilon <= h) {
            return Err(Error::invalid(
                "epsilon",
                format!("must satisfy 0 < epsilon <= h = {h}, got {epsilon}"),
            ));
        }
        Ok(Self {
            duration,
            points,
            epsilon,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.duration / self.points as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }
}

/// Symmetric kernel matrix K_ij = -(1/2 pi) ln(mu |t_i - t_j|) with the
/// diagonal regulated at separation epsilon, and uniform quadrature weights
/// w_i = h / T = 1 / N.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    matrix: DMatrix<f64>,
    pub grid: TimeGrid,
    pub mu: f64,
}

impl KernelMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn size(&self) -> usize {
        self.grid.points
    }

    /// Uniform weight w_i = 1 / N.
    pub fn weight(&self) -> f64 {
        1.0 / self.grid.points as f64
    }

    /// sum_i w_i K_ii.
    pub fn weighted_trace(&self) -> f64 {
        self.matrix.trace() * self.weight()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Build the regulated kernel on the grid. Requires mu * epsilon < 1 so the
/// diagonal stays positive in the intended small-mass regime.
pub fn build_kernel(grid: &TimeGrid, mu: f64) -> Result<KernelMatrix> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::invalid("mu", format!("must be > 0, got {mu}")));
    }
    if mu * grid.epsilon >= 1.0 {
        return Err(Error::invalid(
            "epsilon",
            format!(
                "mu * epsilon = {} must be < 1 for a positive diagonal",
                mu * grid.epsilon
            ),
        ));
    }
    let n = grid.points;
    let h = grid.spacing();
    let diag = field2d::hadamard_log(0.0, grid.epsilon, mu)?;
    let mut matrix = DMatrix::zeros(n, n);
    for i in 0..n {
        matrix[(i, i)] = diag;
        for j in 0..i {
            let v = field2d::hadamard_log(0.0, (i - j) as f64 * h, mu)?;
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    Ok(KernelMatrix {
        matrix,
        grid: *grid,
        mu,
    })
}

/// Eigenvalues of the symmetrically weighted kernel W^{1/2} K W^{1/2} = K/N,
/// sorted descending, with small negatives clipped to zero.
#[derive(Debug, Clone)]
pub struct EigenModel {
    pub lambdas: Vec<f64>,
    pub clipped_count: usize,
    /// Total magnitude of the clipped negative eigenvalues.
    pub clipped_mass: f64,
    /// sum of the retained eigenvalues, in stored order; the sampler and
    /// [`lower_bound`] share this exact value.
    pub sum_lambda: f64,
}

/// Symmetric eigendecomposition of the weighted kernel. Eigenvalues in
/// [-tol * max|lambda|, 0) are clipped to zero and reported; anything more
/// negative is a hard error (the kernel is PSD in the continuum model, so a
/// large negative eigenvalue means the grid is too coarse or mu T too large).
pub fn eigen_lambdas(kernel: &KernelMatrix, tol: f64) -> Result<EigenModel> {
    let n = kernel.size();
    let weighted = kernel.matrix.clone() / n as f64;
    let eig = weighted.symmetric_eigen();
    let mut lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    lambdas.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());

    let max_abs = lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let floor = -tol * max_abs;
    let mut clipped_count = 0;
    let mut clipped_mass = 0.0;
    for l in lambdas.iter_mut() {
        if *l < 0.0 {
            if *l < floor {
                return Err(Error::NotPositiveSemidefinite {
                    min_lambda: *l,
                    tol,
                });
            }
            clipped_count += 1;
            clipped_mass += -*l;
            *l = 0.0;
        }
    }
    let sum_lambda = lambdas.iter().sum();
    Ok(EigenModel {
        lambdas,
        clipped_count,
        clipped_mass,
        sum_lambda,
    })
}

/// Cumulant of order `ell` of the discretized normal-ordered quadratic form:
/// kappa_ell = 2^{ell-1} (ell-1)! sum_i lambda_i^ell, the single-cycle Wick
/// weight times the trace power sum.
pub fn trace_cumulant(model: &EigenModel, ell: u32) -> Result<f64> {
    if !(2..=12).contains(&ell) {
        return Err(Error::invalid(
            "ell",
            format!("supported orders are 2..=12, got {ell}"),
        ));
    }
    let weight = crate::wick::cycle_weight(ell as usize) as f64;
    let power: f64 = model.lambdas.iter().map(|l| l.powi(ell as i32)).sum();
    Ok(weight * power)
}

/// Exact infimum of the discretized normal-ordered quadratic form.
pub fn lower_bound(model: &EigenModel) -> f64 {
    -model.sum_lambda
}

/// SplitMix64: the documented, portable 64-bit generator behind all
/// sampling. One additive Weyl step and two xor-shift multiplies per output.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in (0, 1]: 53 high bits, shifted so ln() never sees 0.
    pub fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// One Box-Muller pair of independent standard normals; consumes exactly
    /// two generator outputs.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_unit();
        let u2 = self.next_unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

/// Samples per independently seeded chunk; part of the reproducibility
/// contract together with the seed and the sample count.
pub const SAMPLE_CHUNK: usize = 4096;

/// Stream seed of chunk `chunk`: one SplitMix64 scramble of
/// seed ^ (chunk + 1) * GOLDEN_GAMMA, so parallel and serial runs agree.
pub fn chunk_seed(seed: u64, chunk: u64) -> u64 {
    SplitMix64::new(seed ^ chunk.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)).next_u64()
}

/// Seeded Monte Carlo draws of a linear or quadratic functional.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub seed: u64,
    pub values: Vec<f64>,
    /// Exact support infimum: -sum lambda for quadratic batches, -inf for
    /// linear ones.
    pub lower_bound: f64,
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    /// One-row summary CSV:
    /// `count,seed,mean,var,skewness,min,lower_bound,frac_negative`.
    pub fn summary_csv(&self) -> Result<String> {
        let est = stats::shape(&self.values)?;
        Ok(format!(
            "count,seed,mean,var,skewness,min,lower_bound,frac_negative\n{},{},{},{},{},{},{},{}\n",
            self.count(),
            self.seed,
            est.mean,
            est.variance,
            est.skewness,
            est.min,
            self.lower_bound,
            est.frac_below_zero
        ))
    }
}

fn sample_functional<F>(count: usize, seed: u64, draw: F) -> Vec<f64>
where
    F: Fn(&mut SplitMix64) -> f64 + Sync,
{
    let mut values = vec![0.0f64; count];
    values
        .par_chunks_mut(SAMPLE_CHUNK)
        .enumerate()
        .for_each(|(chunk, out)| {
            let mut rng = SplitMix64::new(chunk_seed(seed, chunk as u64));
            for v in out.iter_mut() {
                *v = draw(&mut rng);
            }
        });
    values
}

/// Draws of sum_i lambda_i (z_i^2 - 1) with independent standard normals,
/// one normal per stored eigenvalue in model order. Identical output for
/// identical (seed, count) regardless of thread count.
pub fn sample_quadratic(model: &EigenModel, count: usize, seed: u64) -> SampleBatch {
    let lambdas = &model.lambdas;
    let shift = model.sum_lambda;
    let values = sample_functional(count, seed, |rng| {
        let mut q = 0.0;
        let mut i = 0;
        while i + 1 < lambdas.len() {
            let (z1, z2) = rng.next_normal_pair();
            q += lambdas[i] * (z1 * z1) + lambdas[i + 1] * (z2 * z2);
            i += 2;
        }
        if i < lambdas.len() {
            let (z, _) = rng.next_normal_pair();
            q += lambdas[i] * (z * z);
        }
        q - shift
    });
    SampleBatch {
        seed,
        values,
        lower_bound: -shift,
    }
}

/// Draws of sum_i c_i z_i: exactly Gaussian with variance sum c_i^2.
pub fn sample_linear(coeffs: &[f64], count: usize, seed: u64) -> SampleBatch {
    let values = sample_functional(count, seed, |rng| {
        let mut s = 0.0;
        let mut i = 0;
        while i + 1 < coeffs.len() {
            let (z1, z2) = rng.next_normal_pair();
            s += coeffs[i] * z1 + coeffs[i + 1] * z2;
            i += 2;
        }
        if i < coeffs.len() {
            let (z, _) = rng.next_normal_pair();
            s += coeffs[i] * z;
        }
        s
    });
    SampleBatch {
        seed,
        values,
        lower_bound: f64::NEG_INFINITY,
    }
}
