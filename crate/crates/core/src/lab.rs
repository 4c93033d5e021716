//! Accuracy, the compositional-ability predicate and the Monte Carlo
//! experiments built on the closed-form LSA predictor.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, Result};
use crate::fixture::Fixture;
use crate::gaussian::{
    ConfinedSampler, CovarianceSpec, Example, PromptEmbedding, TaskSpace, TaskWeights,
};
use crate::linalg;
use crate::lsa::{compute_gamma, lsa_forward, optimal_params, optimal_rank_diagonal, LsaParams};
use crate::rng::{normal_vector, Seed};

/// Fraction of coordinates whose predicted sign matches the true sign.
///
/// A zero prediction never matches, so a coordinate the in-context set says
/// nothing about scores zero.
pub fn sign_accuracy(prediction: &DVector<f64>, truth: &DVector<f64>) -> f64 {
    assert_eq!(
        prediction.len(),
        truth.len(),
        "prediction and truth lengths differ"
    );
    if truth.is_empty() {
        return 0.0;
    }
    let hits = prediction
        .iter()
        .zip(truth.iter())
        .filter(|(p, t)| **p != 0.0 && p.signum() == t.signum() && **t != 0.0)
        .count();
    hits as f64 / truth.len() as f64
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

impl AccuracyEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self {
                mean: 0.0,
                std_err: 0.0,
                trials: 0,
            };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_err,
            trials: n,
        }
    }
}

/// Combined standard error of independent estimates.
pub fn combined_std_err(estimates: &[&AccuracyEstimate]) -> f64 {
    estimates
        .iter()
        .map(|e| e.std_err * e.std_err)
        .sum::<f64>()
        .sqrt()
}

/// `max(acc_k, acc_g) <= acc_union`.
pub fn check_compositional_ability(
    acc_k: &AccuracyEstimate,
    acc_g: &AccuracyEstimate,
    acc_union: &AccuracyEstimate,
) -> bool {
    acc_k.mean.max(acc_g.mean) <= acc_union.mean
}

/// Shared settings for the two-task experiments. Task `k` is index 0 of the
/// task space and task `g` is index 1.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub space: TaskSpace,
    pub cov: CovarianceSpec,
    /// Examples per simple task.
    pub n: usize,
    pub delta: f64,
    pub trials: usize,
    pub seed: Seed,
}

impl ExperimentConfig {
    /// `d = 4` split `2 + 2`, identity covariance, `N = 40`, `delta = 0`.
    pub fn desk_default(trials: usize, seed: Seed) -> Self {
        Self {
            space: TaskSpace::two_blocks(2, 2).expect("valid blocks"),
            cov: CovarianceSpec::identity(4),
            n: 40,
            delta: 0.0,
            trials,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.n == 0 {
            return Err(invalid("N must be at least 1"));
        }
        if self.space.k() != 2 {
            return Err(invalid(format!(
                "two tasks expected, got K={}",
                self.space.k()
            )));
        }
        if self.space.d() != self.cov.d() {
            return Err(mismatch("task space and covariance disagree on d"));
        }
        Ok(())
    }
}

/// Serialized experiment settings: a fixture plus the Monte Carlo sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDocument {
    #[serde(flatten)]
    pub fixture: Fixture,
    pub n: usize,
    pub trials: usize,
    /// Independent seeds to repeat the experiment over. Empty means the
    /// fixture seed alone.
    #[serde(default)]
    pub seeds: Vec<u64>,
}

impl ExperimentDocument {
    pub fn configs(&self) -> Result<Vec<ExperimentConfig>> {
        let space = self.fixture.task_space()?;
        let cov = self.fixture.covariance()?;
        let seeds = if self.seeds.is_empty() {
            vec![self.fixture.seed]
        } else {
            self.seeds.iter().map(|s| Seed(*s)).collect()
        };
        let configs: Vec<ExperimentConfig> = seeds
            .into_iter()
            .map(|seed| ExperimentConfig {
                space: space.clone(),
                cov: cov.clone(),
                n: self.n,
                delta: self.fixture.delta,
                trials: self.trials,
                seed,
            })
            .collect();
        for c in &configs {
            c.validate()?;
        }
        Ok(configs)
    }
}

/// One output row: `experiment, r_or_setting, mean, std_err, trials, seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub r_or_setting: String,
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
    pub seed: u64,
}

impl ResultRow {
    pub fn new(
        experiment: &str,
        setting: impl ToString,
        est: &AccuracyEstimate,
        seed: Seed,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            r_or_setting: setting.to_string(),
            mean: est.mean,
            std_err: est.std_err,
            trials: est.trials,
            seed: seed.0,
        }
    }
}

impl CompositionOutcome {
    pub fn rows(&self, experiment: &str, seed: Seed) -> Vec<ResultRow> {
        vec![
            ResultRow::new(experiment, "S_k", &self.single_k, seed),
            ResultRow::new(experiment, "S_g", &self.single_g, seed),
            ResultRow::new(experiment, "S_k+S_g", &self.union, seed),
        ]
    }
}

/// Accuracies with in-context sets `S_k`, `S_g` and their union.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionOutcome {
    pub single_k: AccuracyEstimate,
    pub single_g: AccuracyEstimate,
    pub union: AccuracyEstimate,
}

impl CompositionOutcome {
    /// `Acc(S_k) + Acc(S_g) <= Acc(S_k u S_g) + slack * combined SE`.
    pub fn sum_inequality_holds(&self, slack: f64) -> bool {
        let se = combined_std_err(&[&self.single_k, &self.single_g, &self.union]);
        self.single_k.mean + self.single_g.mean <= self.union.mean + slack * se
    }

    pub fn has_compositional_ability(&self) -> bool {
        check_compositional_ability(&self.single_k, &self.single_g, &self.union)
    }

    /// Largest pairwise gap, in units of the pair's combined standard error.
    pub fn max_pairwise_z(&self) -> f64 {
        let pairs = [
            (&self.single_k, &self.single_g),
            (&self.single_k, &self.union),
            (&self.single_g, &self.union),
        ];
        pairs
            .iter()
            .map(|(a, b)| {
                let se = combined_std_err(&[a, b]);
                let diff = (a.mean - b.mean).abs();
                if se == 0.0 {
                    if diff == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    diff / se
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Prediction of the optimal LSA for `examples` and `query`, normalised by
/// the number of in-context examples.
pub fn predict(
    params: &LsaParams,
    examples: &[Example],
    query: &DVector<f64>,
) -> Result<DVector<f64>> {
    let e = PromptEmbedding::from_parts(examples, query, params.k())?;
    lsa_forward(params, &e, examples.len().max(1))
}

struct ConfinedTrial {
    weights: TaskWeights,
    s_k: Vec<Example>,
    s_g: Vec<Example>,
    query: DVector<f64>,
}

fn confined_trial(
    config: &ExperimentConfig,
    samplers: &[ConfinedSampler; 2],
    trial: u64,
) -> Result<ConfinedTrial> {
    let mut rng = config.seed.stream(trial);
    let weights = TaskWeights::confined(&mut rng, &config.space, config.delta)?;
    let s_k = (0..config.n)
        .map(|_| samplers[0].example(&mut rng, &weights))
        .collect();
    let s_g = (0..config.n)
        .map(|_| samplers[1].example(&mut rng, &weights))
        .collect();
    let query = normal_vector(&mut rng, config.space.d());
    Ok(ConfinedTrial {
        weights,
        s_k,
        s_g,
        query,
    })
}

/// Confined-support experiment.
///
/// Per trial: confined task weights, `N` confined examples for each task, a
/// composite query `x_q ~ N(0, I_d)` labelled `W x_q`, then the optimal
/// predictor evaluated with `S_k`, `S_g` and `S_k u S_g` (all `2N`).
pub fn run_confined_experiment(config: &ExperimentConfig) -> Result<CompositionOutcome> {
    config.validate()?;
    let (params, _) = optimal_params(&config.cov, config.n, 2, config.cov.d())?;
    let samplers = [
        ConfinedSampler::new(&config.space, 0, &config.cov, config.delta)?,
        ConfinedSampler::new(&config.space, 1, &config.cov, config.delta)?,
    ];
    let rows: Vec<[f64; 3]> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial = confined_trial(config, &samplers, t)?;
            let truth = trial.weights.label(&trial.query);
            let union: Vec<Example> = trial.s_k.iter().chain(&trial.s_g).cloned().collect();
            Ok([
                sign_accuracy(&predict(&params, &trial.s_k, &trial.query)?, &truth),
                sign_accuracy(&predict(&params, &trial.s_g, &trial.query)?, &truth),
                sign_accuracy(&predict(&params, &union, &trial.query)?, &truth),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(outcome_from_rows(&rows))
}

fn outcome_from_rows(rows: &[[f64; 3]]) -> CompositionOutcome {
    let col =
        |j: usize| AccuracyEstimate::from_samples(&rows.iter().map(|r| r[j]).collect::<Vec<_>>());
    CompositionOutcome {
        single_k: col(0),
        single_g: col(1),
        union: col(2),
    }
}

/// Union-set prediction of one confined trial, before and after replacing
/// the inputs of every `S_g` example with fresh confined draws. Used to show
/// that coordinate `k` only sees `S_k`.
pub fn confined_union_perturbation(
    config: &ExperimentConfig,
    trial: u64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    config.validate()?;
    let (params, _) = optimal_params(&config.cov, config.n, 2, config.cov.d())?;
    let samplers = [
        ConfinedSampler::new(&config.space, 0, &config.cov, config.delta)?,
        ConfinedSampler::new(&config.space, 1, &config.cov, config.delta)?,
    ];
    let t = confined_trial(config, &samplers, trial)?;
    let union: Vec<Example> = t.s_k.iter().chain(&t.s_g).cloned().collect();
    let before = predict(&params, &union, &t.query)?;
    let mut rng = config.seed.derive(0x5eed).stream(trial);
    let fresh: Vec<Example> = (0..config.n)
        .map(|_| samplers[1].example(&mut rng, &t.weights))
        .collect();
    let union: Vec<Example> = t.s_k.iter().chain(&fresh).cloned().collect();
    let after = predict(&params, &union, &t.query)?;
    Ok((before, after))
}

/// Overlapping-support experiment.
///
/// Both tasks draw inputs over the full space from `Lambda`, with weights
/// `w^(1) = (w_a, 0)` and `w^(2) = (0, w_b)`. `S_k` and `S_g` hold `N`
/// examples each; the union holds `ceil(N/2)` from `k` and `floor(N/2)`
/// from `g`, so all three in-context sets have the same size.
pub fn run_overlap_experiment(config: &ExperimentConfig) -> Result<CompositionOutcome> {
    config.validate()?;
    let (params, _) = optimal_params(&config.cov, config.n, 2, config.cov.d())?;
    let n = config.n;
    let rows: Vec<[f64; 3]> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = config.seed.stream(t);
            let weights = TaskWeights::confined(&mut rng, &config.space, 0.0)?;
            let draw = |rng: &mut _| -> Vec<Example> {
                (0..n)
                    .map(|_| {
                        let x = config.cov.sample(rng);
                        let y = weights.label(&x);
                        Example { x, y }
                    })
                    .collect()
            };
            let s_k = draw(&mut rng);
            let s_g = draw(&mut rng);
            let query = normal_vector(&mut rng, config.space.d());
            let truth = weights.label(&query);
            let half = n.div_ceil(2);
            let union: Vec<Example> = s_k[..half]
                .iter()
                .chain(&s_g[..n - half])
                .cloned()
                .collect();
            Ok([
                sign_accuracy(&predict(&params, &s_k, &query)?, &truth),
                sign_accuracy(&predict(&params, &s_g, &query)?, &truth),
                sign_accuracy(&predict(&params, &union, &query)?, &truth),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(outcome_from_rows(&rows))
}

/// Predictions compared by the overlap parallelism check.
#[derive(Clone, Debug)]
pub struct OverlapPredictions {
    /// LSA prediction from the `N` task-`k` examples.
    pub single: DVector<f64>,
    /// LSA prediction from the balanced union of `2N` examples in which the
    /// task-`g` half repeats the task-`k` draws.
    pub union: DVector<f64>,
    /// The closed block expression
    /// `1/(2N) ( a_q^T G1^{-1} sum y_i^(j) a_i + b_q^T G2^{-1} sum y_i^(j) b_i )_j`
    /// evaluated directly from the sums.
    pub block_formula: DVector<f64>,
}

/// One fixed prompt of the overlap construction with `delta = 0`.
pub fn overlap_predictions(config: &ExperimentConfig, prompt: u64) -> Result<OverlapPredictions> {
    config.validate()?;
    let (params, _) = optimal_params(&config.cov, config.n, 2, config.cov.d())?;
    let mut rng = config.seed.derive(0x07e7).stream(prompt);
    let weights = TaskWeights::confined(&mut rng, &config.space, 0.0)?;
    let s_k: Vec<Example> = (0..config.n)
        .map(|_| {
            let x = config.cov.sample(&mut rng);
            let y = weights.label(&x);
            Example { x, y }
        })
        .collect();
    let query = normal_vector(&mut rng, config.space.d());
    let single = predict(&params, &s_k, &query)?;
    let union_set: Vec<Example> = s_k.iter().chain(&s_k).cloned().collect();
    let union = predict(&params, &union_set, &query)?;

    // Block form with the per-block Gamma inverses.
    let gamma = compute_gamma(&config.cov, config.n)?;
    let a = config.space.active_set(0).to_vec();
    let b = config.space.active_set(1).to_vec();
    let g1 = linalg::submatrix(gamma.matrix(), &a, &a);
    let g2 = linalg::submatrix(gamma.matrix(), &b, &b);
    let (g1i, g2i) = (
        g1.try_inverse()
            .ok_or_else(|| invalid("singular Gamma block"))?,
        g2.try_inverse()
            .ok_or_else(|| invalid("singular Gamma block"))?,
    );
    let pick = |v: &DVector<f64>, idx: &[usize]| {
        DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
    };
    let (aq, bq) = (pick(&query, &a), pick(&query, &b));
    let mut block_formula = DVector::zeros(2);
    for j in 0..2 {
        let mut sa = DVector::zeros(a.len());
        let mut sb = DVector::zeros(b.len());
        for ex in &s_k {
            sa += pick(&ex.x, &a) * ex.y[j];
            sb += pick(&ex.x, &b) * ex.y[j];
        }
        block_formula[j] = (aq.dot(&(&g1i * sa)) + bq.dot(&(&g2i * sb))) / (2 * config.n) as f64;
    }
    Ok(OverlapPredictions {
        single,
        union,
        block_formula,
    })
}

/// One point of the rank-scaling curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub r: usize,
    /// `sum_{i<=r} lambda_i v*_i` with `v*_i` from the rank-`r` optimum.
    pub bound: f64,
    /// `sum_{i<=r} N / (N + 1 + sum_{j<=r} lambda_j / lambda_i)`, the
    /// r-truncated variant; terms with `lambda_i = 0` contribute zero.
    pub truncated_bound: f64,
}

/// Accuracy upper bound as a function of the rank budget, `r = 0..=d`.
pub fn scaling_bound_curve(cov: &CovarianceSpec, n: usize) -> Result<Vec<ScalingPoint>> {
    let d = cov.d();
    let (lams, _) = linalg::sorted_eigen(cov.lambda());
    let nf = n as f64;
    (0..=d)
        .map(|r| {
            let v = optimal_rank_diagonal(cov, n, r)?;
            let bound = (0..r).map(|i| lams[i] * v[i]).sum();
            let partial: f64 = (0..r).map(|j| lams[j]).sum();
            let truncated_bound = (0..r)
                .map(|i| {
                    if lams[i] <= 0.0 {
                        0.0
                    } else {
                        nf / (nf + 1.0 + partial / lams[i])
                    }
                })
                .sum();
            Ok(ScalingPoint {
                r,
                bound,
                truncated_bound,
            })
        })
        .collect()
}

/// Monte Carlo `E<w_hat, w>` next to the analytic `tr(Gamma^{-1} Lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentEstimate {
    pub empirical_inner: f64,
    pub std_err: f64,
    pub analytic_trace: f64,
    pub trials: usize,
}

/// Draw `w ~ N(0, I)` and `N` inputs from `Lambda`, form
/// `w_hat = Gamma^{-1} (1/N) sum <w, x_i> x_i` and average `<w_hat, w>`.
pub fn estimate_alignment(
    cov: &CovarianceSpec,
    n: usize,
    trials: usize,
    seed: Seed,
) -> Result<AlignmentEstimate> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let gamma = compute_gamma(cov, n)?;
    let ginv = gamma.inverse();
    let analytic_trace = (&ginv * cov.lambda()).trace();
    let d = cov.d();
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.stream(t);
            let w = normal_vector(&mut rng, d);
            let mut acc = DVector::zeros(d);
            for _ in 0..n {
                let x = cov.sample(&mut rng);
                acc += &x * w.dot(&x);
            }
            let w_hat = &ginv * acc / n as f64;
            w_hat.dot(&w)
        })
        .collect();
    let est = AccuracyEstimate::from_samples(&samples);
    Ok(AlignmentEstimate {
        empirical_inner: est.mean,
        std_err: est.std_err,
        analytic_trace,
        trials,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(v: f64, tol: f64) -> Self {
        if v > tol {
            Sign::Pos
        } else if v < -tol {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }
}

/// One setting of the four-object case study.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseStudySetting {
    pub name: &'static str,
    pub prediction: DVector<f64>,
    pub signs: Vec<Sign>,
}

/// Colour (red/blue) and shape (circle/square) classification with
/// `x = (a, b)`, `W = [[1,-1,0,0],[0,0,1,-1]]`, `Lambda = I_4` and the query
/// "red circle" `(1,0,1,0)`, under three in-context sets.
pub fn run_case_study() -> Result<Vec<CaseStudySetting>> {
    let w = DMatrix::from_row_slice(2, 4, &[1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0]);
    let ex = |x: [f64; 4]| {
        let x = DVector::from_column_slice(&x);
        let y = &w * &x;
        Example { x, y }
    };
    let red = ex([1.0, 0.0, 0.0, 0.0]);
    let blue = ex([0.0, 1.0, 0.0, 0.0]);
    let circle = ex([0.0, 0.0, 1.0, 0.0]);
    let square = ex([0.0, 0.0, 0.0, 1.0]);
    let query = DVector::from_column_slice(&[1.0, 0.0, 1.0, 0.0]);

    let cov = CovarianceSpec::identity(4);
    let n = 2;
    let (params, _) = optimal_params(&cov, n, 2, 4)?;
    let settings: [(&'static str, Vec<Example>); 3] = [
        ("colour examples (red, blue)", vec![red.clone(), blue]),
        (
            "shape examples (square, circle)",
            vec![square, circle.clone()],
        ),
        ("mixed examples (red, circle)", vec![red, circle]),
    ];
    settings
        .into_iter()
        .map(|(name, examples)| {
            let prediction = predict(&params, &examples, &query)?;
            let signs = prediction.iter().map(|v| Sign::of(*v, 1e-12)).collect();
            Ok(CaseStudySetting {
                name,
                prediction,
                signs,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn sign_accuracy_hand_cases() {
        assert_eq!(sign_accuracy(&v(&[0.3, -2.0]), &v(&[1.0, -1.0])), 1.0);
        assert_eq!(sign_accuracy(&v(&[0.3, 2.0]), &v(&[1.0, -1.0])), 0.5);
        assert_eq!(sign_accuracy(&v(&[0.0, 1.0]), &v(&[1.0, 1.0])), 0.5);
    }

    #[test]
    fn ability_predicate_hand_cases() {
        let e = |m| AccuracyEstimate {
            mean: m,
            std_err: 0.0,
            trials: 1,
        };
        assert!(check_compositional_ability(&e(0.5), &e(0.5), &e(0.97)));
        assert!(check_compositional_ability(&e(0.5), &e(0.5), &e(0.5)));
        assert!(!check_compositional_ability(&e(0.6), &e(0.5), &e(0.55)));
    }

    #[test]
    fn estimate_statistics() {
        let e = AccuracyEstimate::from_samples(&[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(e.mean, 0.5);
        assert!((e.std_err - (1.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(AccuracyEstimate::from_samples(&[0.7]).std_err, 0.0);
    }

    #[test]
    fn confined_single_trial_is_reproducible() {
        let cfg = ExperimentConfig::desk_default(1, Seed(42));
        let a = run_confined_experiment(&cfg).unwrap();
        let b = run_confined_experiment(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn confined_single_task_caps_at_half() {
        let cfg = ExperimentConfig::desk_default(300, Seed(3));
        let out = run_confined_experiment(&cfg).unwrap();
        assert!(out.single_k.mean <= 0.5);
        assert!(out.single_g.mean <= 0.5);
    }

    #[test]
    fn union_coordinate_k_ignores_task_g_examples() {
        let cfg = ExperimentConfig::desk_default(1, Seed(8));
        for t in 0..20 {
            let (before, after) = confined_union_perturbation(&cfg, t).unwrap();
            assert!((before[0] - after[0]).abs() <= 1e-9);
        }
    }

    #[test]
    fn overlap_rejects_wrong_task_count() {
        let mut cfg = ExperimentConfig::desk_default(10, Seed(0));
        cfg.space = TaskSpace::new(4, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert!(run_overlap_experiment(&cfg).is_err());
        cfg.trials = 0;
        assert!(run_confined_experiment(&cfg).is_err());
    }

    #[test]
    fn document_expands_seeds() {
        let space = TaskSpace::two_blocks(2, 2).unwrap();
        let fixture = Fixture::from_parts(&space, &CovarianceSpec::identity(4), 0.0, Seed(1));
        let doc = ExperimentDocument {
            fixture,
            n: 40,
            trials: 5,
            seeds: vec![3, 4],
        };
        let json = serde_json::to_string(&doc).unwrap();
        let back: ExperimentDocument = serde_json::from_str(&json).unwrap();
        let configs = back.configs().unwrap();
        assert_eq!(configs.len(), 2);
        assert_eq!(configs[1].seed, Seed(4));
        let out = run_confined_experiment(&configs[0]).unwrap();
        let rows = out.rows("confined", configs[0].seed);
        assert_eq!(rows[2].r_or_setting, "S_k+S_g");
        assert_eq!(rows[0].trials, 5);
    }

    #[test]
    fn overlap_predictions_are_parallel() {
        let cfg = ExperimentConfig::desk_default(1, Seed(5));
        for p in 0..10 {
            let o = overlap_predictions(&cfg, p).unwrap();
            assert!(linalg::cosine(&o.single, &o.union) >= 1.0 - 1e-9);
            assert!(linalg::cosine(&o.single, &o.block_formula) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn scaling_curve_identity_value() {
        let curve = scaling_bound_curve(&CovarianceSpec::identity(4), 16).unwrap();
        assert_eq!(curve[0].bound, 0.0);
        assert!((curve[4].bound - 64.0 / 21.0).abs() < 1e-12);
        assert!(curve.windows(2).all(|w| w[1].bound >= w[0].bound));
    }

    #[test]
    fn alignment_identity_case() {
        let est = estimate_alignment(&CovarianceSpec::identity(2), 100, 10, Seed(0)).unwrap();
        assert!((est.analytic_trace - 200.0 / 103.0).abs() < 1e-12);
        let big = estimate_alignment(&CovarianceSpec::identity(3), 1_000_000, 1, Seed(0)).unwrap();
        assert!((big.analytic_trace - 3.0).abs() < 1e-4);
        assert!(estimate_alignment(&CovarianceSpec::identity(2), 10, 0, Seed(0)).is_err());
    }

    #[test]
    fn case_study_patterns() {
        let s = run_case_study().unwrap();
        assert_eq!(s[0].signs, vec![Sign::Pos, Sign::Zero]);
        assert_eq!(s[1].signs, vec![Sign::Zero, Sign::Pos]);
        assert_eq!(s[2].signs, vec![Sign::Pos, Sign::Pos]);
    }
}
