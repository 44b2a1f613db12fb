//! Least-squares federated learning task.
//!
//! Each vehicle owns `ℓ_v(θ) = Σ (θᵀx − y)² + λ‖θ‖²` over its samples and
//! runs full-batch gradient descent with the fixed step `2 / (λ_1 + λ_n)`
//! taken from the extreme eigenvalues of its Hessian.

use alloc::vec::Vec;
use nalgebra::SymmetricEigen;
pub use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::math;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlError {
    #[error("invalid dataset: {0}")]
    InvalidDataset(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("degenerate task: normal equations are singular")]
    Degenerate,
}

/// Samples held by one vehicle: an `S × n` feature matrix and `S` responses.
#[derive(Debug, Clone, PartialEq)]
pub struct LsDataset {
    pub vehicle_id: u32,
    features: DMatrix<f64>,
    responses: DVector<f64>,
}

impl LsDataset {
    pub fn new(vehicle_id: u32, features: DMatrix<f64>, responses: DVector<f64>) -> Result<Self, FlError> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(FlError::InvalidDataset("need at least one sample and one feature"));
        }
        if features.nrows() != responses.len() {
            return Err(FlError::InvalidDataset("feature rows and responses differ in length"));
        }
        if features.iter().chain(responses.iter()).any(|v| !v.is_finite()) {
            return Err(FlError::InvalidDataset("non-finite entry"));
        }
        Ok(Self { vehicle_id, features, responses })
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn responses(&self) -> &DVector<f64> {
        &self.responses
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }
}

/// Per-vehicle quadratic task with precomputed Gram matrix and step size.
#[derive(Debug, Clone)]
pub struct LsTask {
    dataset: LsDataset,
    lambda: f64,
    gram: DMatrix<f64>,
    xty: DVector<f64>,
    yty: f64,
    eig_max: f64,
    eig_min: f64,
    alpha: f64,
}

impl LsTask {
    pub fn new(dataset: LsDataset, lambda: f64) -> Result<Self, FlError> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(FlError::InvalidParameter("lambda must be finite and non-negative"));
        }
        let x = dataset.features();
        let gram = x.transpose() * x;
        let xty = x.transpose() * dataset.responses();
        let yty = dataset.responses().dot(dataset.responses());
        let n = dataset.dim();
        let hessian = &gram * 2.0 + DMatrix::identity(n, n) * (2.0 * lambda);
        let eig = SymmetricEigen::new(hessian).eigenvalues;
        let eig_max = eig.max();
        let eig_min = eig.min().max(0.0);
        if !(eig_max > 0.0) {
            return Err(FlError::Degenerate);
        }
        Ok(Self { alpha: 2.0 / (eig_max + eig_min), dataset, lambda, gram, xty, yty, eig_max, eig_min })
    }

    pub fn dataset(&self) -> &LsDataset {
        &self.dataset
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn step_size(&self) -> f64 {
        self.alpha
    }

    /// Largest and smallest Hessian eigenvalues.
    pub fn hessian_extremes(&self) -> (f64, f64) {
        (self.eig_max, self.eig_min)
    }

    /// `λ_1 / λ_n`; infinite for a singular Hessian.
    pub fn condition_number(&self) -> f64 {
        if self.eig_min > 0.0 {
            self.eig_max / self.eig_min
        } else {
            f64::INFINITY
        }
    }

    pub fn loss(&self, theta: &DVector<f64>) -> f64 {
        let quad = theta.dot(&(&self.gram * theta)) - 2.0 * theta.dot(&self.xty) + self.yty;
        quad + self.lambda * theta.norm_squared()
    }

    pub fn gradient(&self, theta: &DVector<f64>) -> DVector<f64> {
        (&self.gram * theta - &self.xty) * 2.0 + theta * (2.0 * self.lambda)
    }

    pub fn grad_norm(&self, theta: &DVector<f64>) -> f64 {
        self.gradient(theta).norm()
    }

    /// `h` full gradient steps from `theta`.
    pub fn local_gd(&self, theta: &DVector<f64>, h: u32) -> DVector<f64> {
        let mut t = theta.clone();
        for _ in 0..h {
            let g = self.gradient(&t);
            t.axpy(-self.alpha, &g, 1.0);
        }
        t
    }
}

/// Server-side model.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalModel {
    pub theta: DVector<f64>,
    pub round: u32,
    pub size_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyConstants {
    pub c: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl Default for ProxyConstants {
    fn default() -> Self {
        Self { c: 200.0, rho1: 0.001, rho2: 1.0 }
    }
}

impl ProxyConstants {
    pub fn validate(&self) -> Result<(), FlError> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(FlError::InvalidParameter("C must be positive"));
        }
        if !(self.rho1 >= 0.0) || !(self.rho2 >= 0.0) || !self.rho1.is_finite() || !self.rho2.is_finite() {
            return Err(FlError::InvalidParameter("rho1 and rho2 must be non-negative"));
        }
        Ok(())
    }
}

/// Weighted mean of the received models, weights renormalized to sum to
/// one. `None` when nothing (or only zero weight) was received.
pub fn aggregate(models: &[(&DVector<f64>, f64)]) -> Option<DVector<f64>> {
    let total: f64 = models.iter().map(|(_, w)| *w).sum();
    let first = models.first()?;
    if !(total > 0.0) {
        return None;
    }
    let mut out = DVector::zeros(first.0.len());
    for (theta, w) in models {
        out.axpy(*w / total, theta, 1.0);
    }
    Some(out)
}

/// `grad_norm · (1 − 1/κ)^(H−1)`.
pub fn local_proxy(grad_norm: f64, kappa: f64, h: u32) -> f64 {
    let kappa = if kappa > 1.0 { kappa } else { 1.0 + 1e-12 };
    let e = h.saturating_sub(1);
    if e == 0 {
        return grad_norm;
    }
    grad_norm * math::pow(1.0 - 1.0 / kappa, e as f64)
}

/// `C/H + (1 + 1/M)·H`.
pub fn global_proxy(h: f64, m: usize, c: f64) -> f64 {
    c / h + (1.0 + 1.0 / m as f64) * h
}

/// Solves `(Σ XᵀX + λI) θ = Σ Xᵀy` over the pooled data.
pub fn closed_form_optimum(datasets: &[LsDataset], lambda: f64) -> Result<DVector<f64>, FlError> {
    let n = datasets.first().ok_or(FlError::InvalidDataset("no datasets"))?.dim();
    if datasets.iter().any(|d| d.dim() != n) {
        return Err(FlError::InvalidDataset("datasets differ in dimension"));
    }
    let mut a = DMatrix::identity(n, n) * lambda;
    let mut b = DVector::zeros(n);
    for d in datasets {
        a += d.features().transpose() * d.features();
        b += d.features().transpose() * d.responses();
    }
    a.cholesky().map(|c| c.solve(&b)).ok_or(FlError::Degenerate)
}

/// Output of [`gen_synthetic`].
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub datasets: Vec<LsDataset>,
    pub theta_star: DVector<f64>,
    /// Orthonormal basis; column `j` scales with `sigma[j]`.
    pub basis: DMatrix<f64>,
}

/// `n` values log-spaced from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (math::log10(lo), math::log10(hi));
    (0..n).map(|i| math::pow(10.0, a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

/// Noise-free linear data. Samples are `x = Σ_j z_j σ_j u_j` with i.i.d.
/// standard normal `z_j` and a random orthonormal basis `{u_j}`; the target
/// is `θ* = Σ_j c_j σ_j u_j` with standard normal `c_j`, and `y = xᵀθ*`.
/// Samples are split into contiguous blocks, one per vehicle, with vehicle
/// ids `0..n_vehicles`.
pub fn gen_synthetic(s_total: usize, sigma: &[f64], n_vehicles: usize, seed: u64) -> Result<SyntheticData, FlError> {
    let n = sigma.len();
    if n == 0 {
        return Err(FlError::InvalidParameter("spectrum must be non-empty"));
    }
    if sigma.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(FlError::InvalidParameter("spectrum entries must be positive"));
    }
    if n_vehicles == 0 || s_total < n_vehicles {
        return Err(FlError::InvalidParameter("need at least one sample per vehicle"));
    }
    let mut rng = stream_rng(seed, Stream::Dataset, 0);
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let basis = g.qr().q();
    let scaled = DMatrix::from_fn(n, n, |i, j| basis[(i, j)] * sigma[j]);
    let c = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let theta_star = &scaled * c;

    let z = DMatrix::from_fn(s_total, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let x = z * scaled.transpose();
    let y = &x * &theta_star;

    let mut datasets = Vec::with_capacity(n_vehicles);
    for v in 0..n_vehicles {
        let lo = v * s_total / n_vehicles;
        let hi = (v + 1) * s_total / n_vehicles;
        let xv = x.rows(lo, hi - lo).into_owned();
        let yv = y.rows(lo, hi - lo).into_owned();
        datasets.push(LsDataset::new(v as u32, xv, yv)?);
    }
    Ok(SyntheticData { datasets, theta_star, basis })
}
