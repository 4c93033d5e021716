//! Synthetic Gaussian task model.
//!
//! Inputs are `x ~ N(0, Lambda)` in `R^d`, labels are `y = W x` in `R^K`,
//! one coordinate per simple task. Each simple task owns an active index
//! set of input coordinates; a task has *confined support* when its inputs
//! (and weights) are at most `delta` in magnitude outside that set.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{invalid, mismatch, Result};
use crate::linalg;
use crate::rng::{normal_matrix, normal_vector, truncated_unit_normal, Seed};

/// Input dimension, task count and the pairwise disjoint active sets.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpace {
    d: usize,
    active_sets: Vec<Vec<usize>>,
}

impl TaskSpace {
    pub fn new(d: usize, active_sets: Vec<Vec<usize>>) -> Result<Self> {
        if d == 0 {
            return Err(invalid("input dimension must be positive"));
        }
        if active_sets.is_empty() {
            return Err(invalid("at least one task is required"));
        }
        let mut seen = BTreeSet::new();
        for (k, set) in active_sets.iter().enumerate() {
            if set.is_empty() {
                return Err(invalid(format!("active set of task {k} is empty")));
            }
            for &i in set {
                if i >= d {
                    return Err(invalid(format!("task {k}: index {i} outside [0, {d})")));
                }
                if !seen.insert(i) {
                    return Err(invalid(format!(
                        "task {k}: index {i} shared with another task"
                    )));
                }
            }
        }
        Ok(Self { d, active_sets })
    }

    /// Two tasks on consecutive blocks: `0..d1` and `d1..d1+d2`.
    pub fn two_blocks(d1: usize, d2: usize) -> Result<Self> {
        Self::new(d1 + d2, vec![(0..d1).collect(), (d1..d1 + d2).collect()])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.active_sets.len()
    }

    pub fn active_set(&self, task: usize) -> &[usize] {
        &self.active_sets[task]
    }

    pub fn active_sets(&self) -> &[Vec<usize>] {
        &self.active_sets
    }

    /// Coordinates outside the task's active set, ascending.
    pub fn off_support(&self, task: usize) -> Vec<usize> {
        let active: BTreeSet<usize> = self.active_sets[task].iter().copied().collect();
        (0..self.d).filter(|i| !active.contains(i)).collect()
    }
}

/// Input covariance together with the structural bounds the theory assumes.
#[derive(Clone, Debug)]
pub struct CovarianceSpec {
    lambda: DMatrix<f64>,
    sqrt: DMatrix<f64>,
    epsilon: f64,
    spectral_bounds: (f64, f64),
}

impl CovarianceSpec {
    /// Validates symmetry and positive semidefiniteness. The spectral bounds
    /// default to `(||Lambda||, ||Lambda||)`.
    pub fn new(lambda: DMatrix<f64>, epsilon: f64) -> Result<Self> {
        if !lambda.is_square() || lambda.nrows() == 0 {
            return Err(mismatch(format!(
                "covariance must be square and non-empty, got {}x{}",
                lambda.nrows(),
                lambda.ncols()
            )));
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(invalid(format!(
                "epsilon must be nonnegative, got {epsilon}"
            )));
        }
        let scale = lambda.amax().max(1.0);
        if linalg::max_asymmetry(&lambda) > 1e-9 * scale {
            return Err(invalid("covariance is not symmetric"));
        }
        let lambda = linalg::symmetrize(&lambda);
        let min_eig = linalg::min_eigenvalue(&lambda);
        if min_eig < -1e-12 * scale {
            return Err(invalid(format!(
                "covariance is not positive semidefinite (smallest eigenvalue {min_eig:e})"
            )));
        }
        let norm = linalg::max_eigenvalue(&lambda).max(0.0);
        let sqrt = linalg::psd_sqrt(&lambda);
        Ok(Self {
            lambda,
            sqrt,
            epsilon,
            spectral_bounds: (norm, norm),
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(DMatrix::identity(d, d), 0.0).expect("identity is a covariance")
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(values)),
            0.0,
        )
    }

    /// `Q diag(spectrum) Q^T` with a random orthogonal `Q`.
    pub fn from_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> Result<Self> {
        if spectrum.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("spectrum must be finite and nonnegative"));
        }
        let q = linalg::random_orthogonal(rng, spectrum.len());
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum));
        Self::new(linalg::symmetrize(&(&q * d * q.transpose())), 0.0)
    }

    /// Random full-rank covariance with eigenvalues uniform on `[0.1, 3]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Self> {
        let spectrum: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..3.0)).collect();
        Self::from_spectrum(rng, &spectrum)
    }

    /// Declare `m <= ||Lambda|| <= M`.
    pub fn with_spectral_bounds(mut self, m: f64, big_m: f64) -> Result<Self> {
        let norm = self.spectral_norm();
        if !(m <= norm + 1e-12 && norm <= big_m + 1e-12) {
            return Err(invalid(format!(
                "spectral norm {norm} outside declared bounds [{m}, {big_m}]"
            )));
        }
        self.spectral_bounds = (m, big_m);
        Ok(self)
    }

    pub fn lambda(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    /// Symmetric square root used for sampling (eigenvalues below 1e-12
    /// clamped to zero).
    pub fn sqrt(&self) -> &DMatrix<f64> {
        &self.sqrt
    }

    pub fn d(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn spectral_bounds(&self) -> (f64, f64) {
        self.spectral_bounds
    }

    pub fn spectral_norm(&self) -> f64 {
        linalg::max_eigenvalue(&self.lambda).max(0.0)
    }

    pub fn trace(&self) -> f64 {
        self.lambda.trace()
    }

    /// Largest singular value of the cross block between two index sets.
    pub fn cross_block_norm(&self, rows: &[usize], cols: &[usize]) -> f64 {
        linalg::max_singular_value(&linalg::submatrix(&self.lambda, rows, cols))
    }

    /// Checks every pair of task blocks against `epsilon`.
    pub fn check_cross_blocks(&self, space: &TaskSpace) -> Result<()> {
        if space.d() != self.d() {
            return Err(mismatch(format!(
                "task space has d={} but covariance is {}x{}",
                space.d(),
                self.d(),
                self.d()
            )));
        }
        for k in 0..space.k() {
            for g in k + 1..space.k() {
                let s = self.cross_block_norm(space.active_set(k), space.active_set(g));
                if s > self.epsilon + 1e-12 {
                    return Err(invalid(format!(
                        "cross block ({k},{g}) has singular value {s} > epsilon {}",
                        self.epsilon
                    )));
                }
            }
        }
        Ok(())
    }

    /// Draw one input `x ~ N(0, Lambda)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        &self.sqrt * normal_vector(rng, self.d())
    }
}

/// Whether a collection of covariances shares one trace (within `tol`).
pub fn equal_traces(covs: &[&CovarianceSpec], tol: f64) -> bool {
    match covs.first() {
        None => true,
        Some(first) => covs
            .iter()
            .all(|c| (c.trace() - first.trace()).abs() <= tol),
    }
}

/// Build a two-block covariance
///
/// ```text
/// [ A    C ]    A = Q1 diag(s1) Q1^T,  B = Q2 diag(s2) Q2^T
/// [ C^T  B ]    sigma_max(C) = epsilon
/// ```
///
/// with random orthogonal `Q1`, `Q2` and a random cross block scaled to the
/// requested singular value bound.
pub fn make_block_covariance(
    d1: usize,
    d2: usize,
    block_spectra: (&[f64], &[f64]),
    epsilon: f64,
    seed: Seed,
) -> Result<CovarianceSpec> {
    let (s1, s2) = block_spectra;
    if d1 == 0 || d2 == 0 {
        return Err(invalid("block sizes must be positive"));
    }
    if s1.len() != d1 || s2.len() != d2 {
        return Err(mismatch(format!(
            "spectra lengths ({}, {}) do not match block sizes ({d1}, {d2})",
            s1.len(),
            s2.len()
        )));
    }
    if let Some(v) = s1.iter().chain(s2).find(|v| v.is_nan() || **v < 0.0) {
        return Err(invalid(format!("negative eigenvalue {v}")));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(invalid(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }

    let mut rng = seed.stream(0);
    let block = |rng: &mut _, spectrum: &[f64]| {
        let q = linalg::random_orthogonal(rng, spectrum.len());
        let diag = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum));
        linalg::symmetrize(&(&q * diag * q.transpose()))
    };
    let a = block(&mut rng, s1);
    let b = block(&mut rng, s2);
    let cross = if epsilon > 0.0 {
        let g = normal_matrix(&mut rng, d1, d2);
        let s = linalg::max_singular_value(&g);
        g * (epsilon / s)
    } else {
        DMatrix::zeros(d1, d2)
    };

    let d = d1 + d2;
    let mut lambda = DMatrix::zeros(d, d);
    lambda.view_mut((0, 0), (d1, d1)).copy_from(&a);
    lambda.view_mut((d1, d1), (d2, d2)).copy_from(&b);
    lambda.view_mut((0, d1), (d1, d2)).copy_from(&cross);
    lambda
        .view_mut((d1, 0), (d2, d1))
        .copy_from(&cross.transpose());

    let min_eig = linalg::min_eigenvalue(&lambda);
    if min_eig < -1e-12 {
        return Err(invalid(format!(
            "epsilon {epsilon} breaks positive semidefiniteness (smallest eigenvalue {min_eig:e})"
        )));
    }
    CovarianceSpec::new(lambda, epsilon)
}

/// Task weight matrix `W` (rows `w^(k)`) with its off-support bound.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskWeights {
    w: DMatrix<f64>,
    delta: f64,
}

impl TaskWeights {
    pub fn new(w: DMatrix<f64>, delta: f64) -> Result<Self> {
        if delta.is_nan() || delta < 0.0 {
            return Err(invalid(format!("delta must be nonnegative, got {delta}")));
        }
        Ok(Self { w, delta })
    }

    /// Rows i.i.d. `N(0, I_d)`.
    pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, k: usize, d: usize) -> Self {
        Self {
            w: normal_matrix(rng, k, d),
            delta: 0.0,
        }
    }

    /// Standard normal entries on each task's active set and `delta`-scaled
    /// truncated normal entries elsewhere.
    pub fn confined<R: Rng + ?Sized>(rng: &mut R, space: &TaskSpace, delta: f64) -> Result<Self> {
        if delta.is_nan() || delta < 0.0 {
            return Err(invalid(format!("delta must be nonnegative, got {delta}")));
        }
        let mut w = DMatrix::zeros(space.k(), space.d());
        for task in 0..space.k() {
            for &i in space.active_set(task) {
                w[(task, i)] = rng.sample(rand_distr::StandardNormal);
            }
            if delta > 0.0 {
                for i in space.off_support(task) {
                    w[(task, i)] = delta * truncated_unit_normal(rng);
                }
            }
        }
        Ok(Self { w, delta })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn k(&self) -> usize {
        self.w.nrows()
    }

    pub fn d(&self) -> usize {
        self.w.ncols()
    }

    pub fn row(&self, task: usize) -> DVector<f64> {
        self.w.row(task).transpose()
    }

    /// Whether row `task` stays within `delta` off its active set.
    pub fn is_confined(&self, space: &TaskSpace, task: usize) -> bool {
        space
            .off_support(task)
            .into_iter()
            .all(|i| self.w[(task, i)].abs() <= self.delta)
    }

    pub fn label(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.w * x
    }
}

/// One labelled example `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

/// `N` in-context examples, a query and its true label.
#[derive(Clone, Debug, PartialEq)]
pub struct Prompt {
    pub examples: Vec<Example>,
    pub query: DVector<f64>,
    pub truth: DVector<f64>,
}

impl Prompt {
    pub fn n(&self) -> usize {
        self.examples.len()
    }
}

/// Sample a prompt with `n` examples; inputs and query from `N(0, Lambda)`.
pub fn sample_prompt(
    cov: &CovarianceSpec,
    weights: &TaskWeights,
    n: usize,
    seed: Seed,
) -> Result<Prompt> {
    sample_prompt_with(&mut seed.stream(0), cov, weights, n)
}

pub fn sample_prompt_with<R: Rng + ?Sized>(
    rng: &mut R,
    cov: &CovarianceSpec,
    weights: &TaskWeights,
    n: usize,
) -> Result<Prompt> {
    if n == 0 {
        return Err(invalid("a prompt needs at least one example"));
    }
    if weights.d() != cov.d() {
        return Err(mismatch(format!(
            "weights have d={} but covariance has d={}",
            weights.d(),
            cov.d()
        )));
    }
    let examples = (0..n)
        .map(|_| {
            let x = cov.sample(rng);
            let y = weights.label(&x);
            Example { x, y }
        })
        .collect();
    let query = cov.sample(rng);
    let truth = weights.label(&query);
    Ok(Prompt {
        examples,
        query,
        truth,
    })
}

/// The `(d+K) x (N+1)` matrix whose columns are `(x_i; y_i)` and `(x_q; 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PromptEmbedding {
    e: DMatrix<f64>,
    d: usize,
    k: usize,
}

impl PromptEmbedding {
    pub fn from_parts(examples: &[Example], query: &DVector<f64>, k: usize) -> Result<Self> {
        let d = query.len();
        let n = examples.len();
        let mut e = DMatrix::zeros(d + k, n + 1);
        for (i, ex) in examples.iter().enumerate() {
            if ex.x.len() != d || ex.y.len() != k {
                return Err(mismatch(format!(
                    "example {i} has shape ({}, {}), expected ({d}, {k})",
                    ex.x.len(),
                    ex.y.len()
                )));
            }
            e.view_mut((0, i), (d, 1)).copy_from(&ex.x);
            e.view_mut((d, i), (k, 1)).copy_from(&ex.y);
        }
        e.view_mut((0, n), (d, 1)).copy_from(query);
        Ok(Self { e, d, k })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.e
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Embedding width `d + K`.
    pub fn d_e(&self) -> usize {
        self.d + self.k
    }

    pub fn n(&self) -> usize {
        self.e.ncols() - 1
    }

    pub fn example(&self, i: usize) -> Example {
        let col = self.e.column(i);
        Example {
            x: col.rows(0, self.d).into_owned(),
            y: col.rows(self.d, self.k).into_owned(),
        }
    }

    pub fn query(&self) -> DVector<f64> {
        self.e.column(self.n()).rows(0, self.d).into_owned()
    }
}

pub fn build_embedding(p: &Prompt) -> Result<PromptEmbedding> {
    PromptEmbedding::from_parts(&p.examples, &p.query, p.truth.len())
}

/// `n` examples of `task` with confined support: the active coordinates are
/// drawn from the active block of `Lambda`, every other coordinate is a
/// `delta`-scaled truncated normal. Labels are `W x` on the confined input.
pub fn make_confined_dataset(
    space: &TaskSpace,
    task: usize,
    cov: &CovarianceSpec,
    weights: &TaskWeights,
    delta: f64,
    n: usize,
    seed: Seed,
) -> Result<Vec<Example>> {
    let sampler = ConfinedSampler::new(space, task, cov, delta)?;
    if weights.d() != space.d() || weights.k() != space.k() {
        return Err(mismatch("weights do not match the task space"));
    }
    let mut rng = seed.stream(0);
    Ok((0..n).map(|_| sampler.example(&mut rng, weights)).collect())
}

/// Reusable sampler behind [`make_confined_dataset`].
#[derive(Clone, Debug)]
pub struct ConfinedSampler {
    d: usize,
    active: Vec<usize>,
    off: Vec<usize>,
    block_sqrt: DMatrix<f64>,
    delta: f64,
}

impl ConfinedSampler {
    pub fn new(space: &TaskSpace, task: usize, cov: &CovarianceSpec, delta: f64) -> Result<Self> {
        if task >= space.k() {
            return Err(invalid(format!(
                "task {task} out of range (K={})",
                space.k()
            )));
        }
        if delta.is_nan() || delta < 0.0 {
            return Err(invalid(format!("delta must be nonnegative, got {delta}")));
        }
        if space.d() != cov.d() {
            return Err(mismatch("task space and covariance disagree on d"));
        }
        let active = space.active_set(task).to_vec();
        if active.is_empty() {
            return Err(invalid(format!("task {task} has an empty active set")));
        }
        let block = linalg::submatrix(cov.lambda(), &active, &active);
        Ok(Self {
            d: space.d(),
            off: space.off_support(task),
            block_sqrt: linalg::psd_sqrt(&block),
            active,
            delta,
        })
    }

    pub fn input<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let mut x = DVector::zeros(self.d);
        let a = &self.block_sqrt * normal_vector(rng, self.active.len());
        for (j, &i) in self.active.iter().enumerate() {
            x[i] = a[j];
        }
        if self.delta > 0.0 {
            for &i in &self.off {
                x[i] = self.delta * truncated_unit_normal(rng);
            }
        }
        x
    }

    pub fn example<R: Rng + ?Sized>(&self, rng: &mut R, weights: &TaskWeights) -> Example {
        let x = self.input(rng);
        let y = weights.label(&x);
        Example { x, y }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_space() -> TaskSpace {
        TaskSpace::two_blocks(2, 2).unwrap()
    }

    #[test]
    fn task_space_rejects_overlap_and_empty_sets() {
        assert!(TaskSpace::new(4, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(TaskSpace::new(4, vec![vec![0, 1], vec![]]).is_err());
        assert!(TaskSpace::new(4, vec![vec![0, 4]]).is_err());
        let s = default_space();
        assert_eq!(s.off_support(0), vec![2, 3]);
    }

    #[test]
    fn block_covariance_identity_case() {
        let cov = make_block_covariance(2, 2, (&[1.0, 1.0], &[1.0, 1.0]), 0.0, Seed(5)).unwrap();
        assert!((cov.lambda() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn block_covariance_cross_block_bound() {
        let cov = make_block_covariance(2, 2, (&[1.0, 1.0], &[1.0, 1.0]), 0.1, Seed(9)).unwrap();
        // independent check: SVD of the assembled off-diagonal block
        let c = cov.lambda().view((0, 2), (2, 2)).into_owned();
        let s = c.svd(false, false).singular_values;
        assert!(s.max() <= 0.1 + 1e-12);
        assert!(s.max() > 0.1 - 1e-12);
        cov.check_cross_blocks(&default_space()).unwrap();
        assert_eq!(linalg::max_asymmetry(cov.lambda()), 0.0);
        assert!(linalg::min_eigenvalue(cov.lambda()) >= -1e-12);
    }

    #[test]
    fn block_covariance_rejects_bad_inputs() {
        assert!(make_block_covariance(2, 2, (&[1.0, -1.0], &[1.0, 1.0]), 0.0, Seed(0)).is_err());
        assert!(make_block_covariance(2, 2, (&[1.0, 1.0], &[1.0, 1.0]), 2.0, Seed(0)).is_err());
        assert!(make_block_covariance(2, 2, (&[1.0], &[1.0, 1.0]), 0.0, Seed(0)).is_err());
    }

    #[test]
    fn covariance_rejects_non_psd() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(CovarianceSpec::new(m, 0.0).is_err());
        let cov = CovarianceSpec::diagonal(&[2.0, 1.0]).unwrap();
        assert!(cov.clone().with_spectral_bounds(1.0, 3.0).is_ok());
        assert!(cov.with_spectral_bounds(2.5, 3.0).is_err());
    }

    #[test]
    fn equal_trace_check() {
        let a = CovarianceSpec::diagonal(&[2.0, 1.0]).unwrap();
        let b = CovarianceSpec::diagonal(&[1.5, 1.5]).unwrap();
        let c = CovarianceSpec::diagonal(&[1.0, 1.0]).unwrap();
        assert!(equal_traces(&[&a, &b], 1e-12));
        assert!(!equal_traces(&[&a, &c], 1e-12));
    }

    #[test]
    fn prompt_labels_are_exact() {
        let cov = CovarianceSpec::identity(2);
        let w = TaskWeights::new(DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), 0.0).unwrap();
        let p = sample_prompt(&cov, &w, 25, Seed(11)).unwrap();
        for ex in &p.examples {
            assert_eq!(ex.y[0], ex.x[0]);
        }
        let w = TaskWeights::gaussian(&mut Seed(1).stream(0), 3, 2);
        let p = sample_prompt(&cov, &w, 25, Seed(11)).unwrap();
        for ex in &p.examples {
            assert_eq!((w.matrix() * &ex.x - &ex.y).amax(), 0.0);
        }
    }

    #[test]
    fn prompt_sampling_is_deterministic() {
        let cov = CovarianceSpec::diagonal(&[2.0, 1.0]).unwrap();
        let w = TaskWeights::gaussian(&mut Seed(1).stream(0), 1, 2);
        let a = sample_prompt(&cov, &w, 10, Seed(3)).unwrap();
        let b = sample_prompt(&cov, &w, 10, Seed(3)).unwrap();
        assert_eq!(a, b);
        let c = sample_prompt(&cov, &w, 10, Seed(4)).unwrap();
        assert_ne!(a, c);
        assert!(sample_prompt(&cov, &w, 0, Seed(3)).is_err());
    }

    #[test]
    fn empirical_covariance_matches() {
        let cov = CovarianceSpec::diagonal(&[2.0, 1.0]).unwrap();
        let mut rng = Seed(2024).stream(0);
        let n = 100_000;
        let mut acc = DMatrix::<f64>::zeros(2, 2);
        for _ in 0..n {
            let x = cov.sample(&mut rng);
            acc += &x * x.transpose();
        }
        acc /= n as f64;
        let lam = cov.lambda();
        for i in 0..2 {
            for j in 0..2 {
                let scale = (lam[(i, i)] * lam[(j, j)]).sqrt();
                assert!(
                    (acc[(i, j)] - lam[(i, j)]).abs() <= 0.05 * scale,
                    "entry ({i},{j}): {} vs {}",
                    acc[(i, j)],
                    lam[(i, j)]
                );
            }
        }
    }

    #[test]
    fn embedding_layout() {
        let cov = CovarianceSpec::identity(2);
        let w = TaskWeights::gaussian(&mut Seed(1).stream(0), 1, 2);
        let p = sample_prompt(&cov, &w, 3, Seed(0)).unwrap();
        let e = build_embedding(&p).unwrap();
        assert_eq!(e.matrix().shape(), (3, 4));
        assert_eq!(e.matrix()[(2, 3)], 0.0);
        assert_eq!(e.d_e(), 3);
        for i in 0..3 {
            assert_eq!(e.example(i), p.examples[i]);
        }
        assert_eq!(e.query(), p.query);
    }

    #[test]
    fn embedding_rejects_mismatch() {
        let ex = Example {
            x: DVector::zeros(3),
            y: DVector::zeros(1),
        };
        assert!(PromptEmbedding::from_parts(&[ex], &DVector::zeros(2), 1).is_err());
    }

    #[test]
    fn confined_dataset_zero_delta() {
        let space = default_space();
        let cov = CovarianceSpec::identity(4);
        let w = TaskWeights::confined(&mut Seed(1).stream(0), &space, 0.0).unwrap();
        let sk = make_confined_dataset(&space, 0, &cov, &w, 0.0, 50, Seed(2)).unwrap();
        let sg = make_confined_dataset(&space, 1, &cov, &w, 0.0, 50, Seed(3)).unwrap();
        for ex in &sk {
            assert_eq!(ex.x[2], 0.0);
            assert_eq!(ex.x[3], 0.0);
            assert_eq!(ex.y[1], 0.0);
        }
        for ex in &sg {
            assert_eq!(ex.x[0], 0.0);
            assert_eq!(ex.x[1], 0.0);
            assert_eq!(ex.y[0], 0.0);
        }
    }

    #[test]
    fn confined_dataset_delta_bound() {
        let space = default_space();
        let cov = CovarianceSpec::identity(4);
        let w = TaskWeights::confined(&mut Seed(1).stream(0), &space, 0.01).unwrap();
        assert!(w.is_confined(&space, 0) && w.is_confined(&space, 1));
        let sk = make_confined_dataset(&space, 0, &cov, &w, 0.01, 1000, Seed(2)).unwrap();
        let worst = sk
            .iter()
            .flat_map(|ex| [ex.x[2].abs(), ex.x[3].abs()])
            .fold(0.0, f64::max);
        assert!(worst <= 0.01);
        assert!(worst > 0.0);
    }

    #[test]
    fn confined_dataset_rejects_bad_task() {
        let space = default_space();
        let cov = CovarianceSpec::identity(4);
        let w = TaskWeights::confined(&mut Seed(1).stream(0), &space, 0.0).unwrap();
        assert!(make_confined_dataset(&space, 2, &cov, &w, 0.0, 5, Seed(0)).is_err());
        assert!(make_confined_dataset(&space, 0, &cov, &w, -1.0, 5, Seed(0)).is_err());
    }
}
