//! One-layer linear self-attention and its closed-form optima.
//!
//! The network is
//!
//! ```text
//! f(E) = E + W_PV E (E^T W_KQ E) / N
//! ```
//!
//! and the prediction is the label slot of the query column. Only the
//! bottom block row of `W_PV` and the left block column of `W_KQ` reach the
//! prediction; writing `U = W_KQ_11` and `u = W_PV_22` (scalar for `K = 1`)
//! the population loss reduces, up to a constant, to
//!
//! ```text
//! l(U, u) = tr[ u^2/2 Gamma Lambda U Lambda U^T - u Lambda^2 U^T ]
//! Gamma   = (1 + 1/N) Lambda + tr(Lambda)/N I
//! ```
//!
//! minimised by `u U = Gamma^{-1}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, Error, Result};
use crate::gaussian::{CovarianceSpec, Prompt, PromptEmbedding};
use crate::linalg;
use crate::rng::{normal_matrix, Seed};

/// `(W_PV, W_KQ)`, both `(d+K) x (d+K)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsaParams {
    d: usize,
    k: usize,
    #[serde(with = "crate::fixture::row_major")]
    pv: DMatrix<f64>,
    #[serde(with = "crate::fixture::row_major")]
    kq: DMatrix<f64>,
}

impl LsaParams {
    pub fn new(d: usize, k: usize, pv: DMatrix<f64>, kq: DMatrix<f64>) -> Result<Self> {
        let de = d + k;
        if pv.shape() != (de, de) || kq.shape() != (de, de) {
            return Err(mismatch(format!(
                "parameters must be {de}x{de}, got {:?} and {:?}",
                pv.shape(),
                kq.shape()
            )));
        }
        Ok(Self { d, k, pv, kq })
    }

    pub fn zeros(d: usize, k: usize) -> Self {
        let de = d + k;
        Self {
            d,
            k,
            pv: DMatrix::zeros(de, de),
            kq: DMatrix::zeros(de, de),
        }
    }

    /// Parameters with only `W_KQ_11 = kq11` and `W_PV_22 = pv22` nonzero.
    pub fn from_reduced(kq11: &DMatrix<f64>, pv22: &DMatrix<f64>) -> Result<Self> {
        let d = kq11.nrows();
        let k = pv22.nrows();
        if !kq11.is_square() || !pv22.is_square() {
            return Err(mismatch("reduced blocks must be square"));
        }
        let mut p = Self::zeros(d, k);
        p.kq.view_mut((0, 0), (d, d)).copy_from(kq11);
        p.pv.view_mut((d, d), (k, k)).copy_from(pv22);
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pv(&self) -> &DMatrix<f64> {
        &self.pv
    }

    pub fn kq(&self) -> &DMatrix<f64> {
        &self.kq
    }

    /// `W_PV_21`, the `d x K` block whose transpose sits bottom-left.
    pub fn pv_21(&self) -> DMatrix<f64> {
        self.pv.view((self.d, 0), (self.k, self.d)).transpose()
    }

    pub fn pv_22(&self) -> DMatrix<f64> {
        self.pv
            .view((self.d, self.d), (self.k, self.k))
            .into_owned()
    }

    pub fn kq_11(&self) -> DMatrix<f64> {
        self.kq.view((0, 0), (self.d, self.d)).into_owned()
    }

    pub fn kq_21(&self) -> DMatrix<f64> {
        self.kq.view((self.d, 0), (self.k, self.d)).transpose()
    }
}

fn check_shapes(params: &LsaParams, e: &PromptEmbedding) -> Result<()> {
    if params.d != e.d() || params.k != e.k() {
        return Err(mismatch(format!(
            "parameters are for (d={}, K={}) but embedding is (d={}, K={})",
            params.d,
            params.k,
            e.d(),
            e.k()
        )));
    }
    Ok(())
}

/// Full forward pass; returns the query's label slot.
pub fn lsa_forward(params: &LsaParams, e: &PromptEmbedding, n: usize) -> Result<DVector<f64>> {
    check_shapes(params, e)?;
    if n == 0 {
        return Err(invalid("normaliser N must be positive"));
    }
    let em = e.matrix();
    let attn = em.transpose() * &params.kq * em;
    let f = em + &params.pv * em * attn / n as f64;
    let q = e.n();
    Ok(f.view((params.d, q), (params.k, 1)).column(0).into_owned())
}

/// Reduced block form
/// `(W_PV_21^T  W_PV_22) (E E^T / N) (W_KQ_11 ; W_KQ_21^T) x_q`.
pub fn lsa_forward_reduced(
    params: &LsaParams,
    e: &PromptEmbedding,
    n: usize,
) -> Result<DVector<f64>> {
    check_shapes(params, e)?;
    if n == 0 {
        return Err(invalid("normaliser N must be positive"));
    }
    let (d, k) = (params.d, params.k);
    let em = e.matrix();
    let left = params.pv.view((d, 0), (k, d + k));
    let right = params.kq.view((0, 0), (d + k, d));
    let gram = em * em.transpose() / n as f64;
    Ok(left * gram * right * e.query())
}

/// `Gamma = (1 + 1/N) Lambda + tr(Lambda)/N I` for prompts of length `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaMatrix {
    gamma: DMatrix<f64>,
    n: usize,
}

impl GammaMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        let inv = self
            .gamma
            .clone()
            .cholesky()
            .map(|c| c.inverse())
            .or_else(|| self.gamma.clone().try_inverse())
            .unwrap_or_else(|| {
                DMatrix::from_element(self.gamma.nrows(), self.gamma.ncols(), f64::NAN)
            });
        linalg::symmetrize(&inv)
    }

    pub fn sqrt(&self) -> DMatrix<f64> {
        linalg::psd_sqrt(&self.gamma)
    }
}

pub fn compute_gamma(cov: &CovarianceSpec, n: usize) -> Result<GammaMatrix> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let lam = cov.lambda();
    let d = lam.nrows();
    let nf = n as f64;
    let gamma = lam * (1.0 + 1.0 / nf) + DMatrix::identity(d, d) * (lam.trace() / nf);
    Ok(GammaMatrix {
        gamma: linalg::symmetrize(&gamma),
        n,
    })
}

/// The reparametrised point `(U, u)` together with the rank budget it was
/// produced under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReparamPoint {
    #[serde(with = "crate::fixture::row_major")]
    pub u_mat: DMatrix<f64>,
    pub u: f64,
    pub rank_budget: usize,
}

impl ReparamPoint {
    pub fn new(u_mat: DMatrix<f64>, u: f64) -> Self {
        let rank_budget = u_mat.nrows();
        Self {
            u_mat,
            u,
            rank_budget,
        }
    }

    /// The product `u U`, the only thing the loss depends on.
    pub fn product(&self) -> DMatrix<f64> {
        &self.u_mat * self.u
    }

    /// `(c U, u / c)`.
    pub fn rescaled(&self, c: f64) -> Self {
        Self {
            u_mat: &self.u_mat * c,
            u: self.u / c,
            rank_budget: self.rank_budget,
        }
    }
}

/// Closed-form optimum under a rank budget `r` on `U` (with `c = 1`).
///
/// For `r = d` this is `U = Gamma^{-1}`. Otherwise, with `Lambda = Q D Q^T`
/// (eigenvalues descending), `U = Q V Q^T` where
/// `v_i = N / ((N+1) lambda_i + tr(D))` for `i < r` and zero beyond.
pub fn optimal_params(
    cov: &CovarianceSpec,
    n: usize,
    k: usize,
    r: usize,
) -> Result<(LsaParams, ReparamPoint)> {
    let d = cov.d();
    if r > d {
        return Err(invalid(format!("rank budget {r} exceeds d={d}")));
    }
    if k == 0 {
        return Err(invalid("K must be positive"));
    }
    let u_mat = if r == d {
        compute_gamma(cov, n)?.inverse()
    } else {
        let v = optimal_rank_diagonal(cov, n, r)?;
        let (_, q) = linalg::sorted_eigen(cov.lambda());
        linalg::symmetrize(&(&q * DMatrix::from_diagonal(&v) * q.transpose()))
    };
    let params = LsaParams::from_reduced(&u_mat, &DMatrix::identity(k, k))?;
    Ok((
        params,
        ReparamPoint {
            u_mat,
            u: 1.0,
            rank_budget: r,
        },
    ))
}

/// Diagonal `v*` of the rank-`r` optimum in the eigenbasis of `Lambda`
/// (descending eigenvalue order).
pub fn optimal_rank_diagonal(cov: &CovarianceSpec, n: usize, r: usize) -> Result<DVector<f64>> {
    let d = cov.d();
    if r > d {
        return Err(invalid(format!("rank budget {r} exceeds d={d}")));
    }
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let (lams, _) = linalg::sorted_eigen(cov.lambda());
    let trace: f64 = lams.iter().sum();
    let nf = n as f64;
    Ok(DVector::from_fn(d, |i, _| {
        if i < r {
            nf / ((nf + 1.0) * lams[i] + trace)
        } else {
            0.0
        }
    }))
}

/// Refactored loss, its global minimum and the gap between them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossBreakdown {
    pub loss: f64,
    pub min_loss: f64,
    pub gap: f64,
}

/// Evaluates `l(U, u)`, `-1/2 tr(Lambda^2 Gamma^{-1})` and the gap
/// `1/2 || Gamma^{1/2} (u Lambda^{1/2} U Lambda^{1/2} - Lambda Gamma^{-1}) ||_F^2`
/// independently; `loss - min_loss == gap` up to rounding.
pub fn refactored_loss(
    point: &ReparamPoint,
    cov: &CovarianceSpec,
    n: usize,
) -> Result<LossBreakdown> {
    let d = cov.d();
    if point.u_mat.shape() != (d, d) {
        return Err(mismatch(format!(
            "U is {:?}, expected {d}x{d}",
            point.u_mat.shape()
        )));
    }
    let g = compute_gamma(cov, n)?;
    let lam = cov.lambda();
    let gamma = g.matrix();
    let gamma_inv = g.inverse();
    let um = &point.u_mat;
    let u = point.u;

    let lam2 = lam * lam;
    let quad = (gamma * lam * um * lam * um.transpose()).trace();
    let lin = (&lam2 * um.transpose()).trace();
    let loss = 0.5 * u * u * quad - u * lin;

    let min_loss = -0.5 * (&lam2 * &gamma_inv).trace();

    let lam_half = cov.sqrt();
    let inner = lam_half * um * lam_half * u - lam * &gamma_inv;
    let gap = 0.5 * (g.sqrt() * inner).norm_squared();

    Ok(LossBreakdown {
        loss,
        min_loss,
        gap,
    })
}

/// Gradient of the refactored loss: `(dl/dU, dl/du)`.
pub fn refactored_loss_gradient(
    point: &ReparamPoint,
    cov: &CovarianceSpec,
    n: usize,
) -> Result<(DMatrix<f64>, f64)> {
    let g = compute_gamma(cov, n)?;
    Ok(gradient_with(point, cov.lambda(), g.matrix()))
}

fn gradient_with(
    point: &ReparamPoint,
    lam: &DMatrix<f64>,
    gamma: &DMatrix<f64>,
) -> (DMatrix<f64>, f64) {
    let um = &point.u_mat;
    let u = point.u;
    let gl = gamma * lam;
    let gl_u_l = &gl * um * lam;
    let lam2 = lam * lam;
    // Gamma and Lambda commute, so d/dU tr[G L U L U^T] = 2 G L U L.
    let grad_mat = &gl_u_l * (u * u) - &lam2 * u;
    let grad_u = u * (gl_u_l * um.transpose()).trace() - (lam2 * um.transpose()).trace();
    (grad_mat, grad_u)
}

fn loss_with(point: &ReparamPoint, lam: &DMatrix<f64>, gamma: &DMatrix<f64>) -> f64 {
    let um = &point.u_mat;
    let quad = (gamma * lam * um * lam * um.transpose()).trace();
    let lin = (lam * lam * um.transpose()).trace();
    0.5 * point.u * point.u * quad - point.u * lin
}

/// `1/(2B) sum_tau || yhat_tau - y_tau ||^2` over a batch of prompts.
pub fn empirical_loss(params: &LsaParams, prompts: &[Prompt]) -> Result<f64> {
    if prompts.is_empty() {
        return Err(invalid("empirical loss needs at least one prompt"));
    }
    let mut total = 0.0;
    for p in prompts {
        let e = crate::gaussian::build_embedding(p)?;
        let yhat = lsa_forward(params, &e, p.n())?;
        total += (yhat - &p.truth).norm_squared();
    }
    Ok(total / (2.0 * prompts.len() as f64))
}

/// Settings for the gradient-descent cross-check of the closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PretrainConfig {
    /// Training prompts `B` (used when an empirical loss is reported).
    pub prompts: usize,
    /// Examples per prompt `N`.
    pub n: usize,
    pub steps: usize,
    /// Step size in units of `1 / (lambda_max(Gamma) lambda_max(Lambda))`.
    pub step_size: f64,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        Self {
            prompts: 1000,
            n: 20,
            steps: 5000,
            step_size: 0.1,
        }
    }
}

/// Steps between divergence checks.
const SWEEP: usize = 100;

/// Gradient descent on `l(U, u)` from a seeded random start.
pub fn fit_gradient_descent(
    config: &PretrainConfig,
    cov: &CovarianceSpec,
    seed: Seed,
) -> Result<ReparamPoint> {
    let d = cov.d();
    let mut rng = seed.stream(0);
    let u_mat = normal_matrix(&mut rng, d, d) * (0.3 / (d as f64).sqrt());
    let u = 1.0 + 0.1 * rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal);
    fit_gradient_descent_from(config, cov, ReparamPoint::new(u_mat, u))
}

/// Gradient descent from a caller-supplied start.
pub fn fit_gradient_descent_from(
    config: &PretrainConfig,
    cov: &CovarianceSpec,
    start: ReparamPoint,
) -> Result<ReparamPoint> {
    if config.steps == 0 || config.step_size.is_nan() || config.step_size <= 0.0 {
        return Err(invalid("step count and step size must be positive"));
    }
    if config.prompts == 0 {
        return Err(invalid("B must be at least 1"));
    }
    let d = cov.d();
    if start.u_mat.shape() != (d, d) {
        return Err(mismatch("start point does not match the covariance"));
    }
    let g = compute_gamma(cov, config.n)?;
    let lam = cov.lambda();
    let gamma = g.matrix();
    let curvature = (linalg::max_eigenvalue(gamma) * linalg::max_eigenvalue(lam)).max(1e-12);
    let eta = config.step_size / curvature;

    let mut point = start;
    let mut sweep_start = loss_with(&point, lam, gamma);
    for step in 1..=config.steps {
        let (gm, gu) = gradient_with(&point, lam, gamma);
        point.u_mat -= gm * eta;
        point.u -= gu * eta;
        if step % SWEEP == 0 || step == config.steps {
            let now = loss_with(&point, lam, gamma);
            if !now.is_finite() || now > sweep_start + 1e-12 * (1.0 + sweep_start.abs()) {
                return Err(Error::Diverged {
                    step,
                    before: sweep_start,
                    after: now,
                });
            }
            sweep_start = now;
        }
    }
    Ok(point)
}
