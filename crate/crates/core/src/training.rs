//! End-to-end train/evaluate loop: embed a dataset into statevectors,
//! minimize the cross-entropy of the variational classifier, and report
//! accuracies with mean +/- sample standard deviation over repeats.
//!
//! Everything here runs in `f64`: the experiment loop is concrete glue
//! over the generic geometric core.

use crate::data::{hflip, prepare, DataError, DataSource, DatasetSplit, PrepMode, Sample};
use crate::embeddings::{amplitude_embed, embed, EmbeddingConfig, EmbeddingError};
use crate::model::{build_ansatz, forward, AnsatzKind, AnsatzSpec, ModelError};
use crate::optimize::{cross_entropy, minimize, Method, OptimizeError};
use crate::projections::Alpha;
use crate::simulator::{init_state_real, QuantumState, SimulatorError};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum TrainingError {
    #[error("experiment needs at least one repeat seed")]
    NoSeeds,
    #[error("scale M must be positive for reverse embeddings, got {0}")]
    NonPositiveScale(f64),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

/// Which classical-to-quantum map feeds the circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmbeddingChoice {
    /// Normalize the 256 raw pixels and use them as amplitudes. Scale
    /// invariant by construction, so `scale_m` is ignored.
    Amplitude,
    /// Reverse projection of the surgered 255-vector divided by M.
    Reverse(Alpha<f64>),
}

impl EmbeddingChoice {
    pub fn name(&self) -> &'static str {
        match self {
            EmbeddingChoice::Amplitude => "amplitude",
            EmbeddingChoice::Reverse(_) => "reverse",
        }
    }

    /// Alpha column for reports: empty for amplitude, `-inf` for the
    /// orthographic limit.
    pub fn alpha_label(&self) -> String {
        match self {
            EmbeddingChoice::Amplitude => String::new(),
            EmbeddingChoice::Reverse(Alpha::NegInfinity) => "-inf".into(),
            EmbeddingChoice::Reverse(Alpha::Finite(a)) => format!("{a}"),
        }
    }
}

/// Full description of one experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub embedding: EmbeddingChoice,
    /// Pre-embedding divisor M. Ignored by the amplitude embedding.
    pub scale_m: f64,
    pub model_kind: AnsatzKind,
    pub qubits: usize,
    /// One seed per repeat; equal seeds give identical repeats.
    pub seeds: Vec<u64>,
    pub method: Method,
    pub budget: usize,
    pub source: DataSource,
    pub count: usize,
    pub test_fraction: f64,
}

impl ExperimentConfig {
    /// `repeats` seeds derived from a base seed.
    pub fn derived_seeds(base: u64, repeats: usize) -> Vec<u64> {
        (0..repeats as u64).map(|r| base.wrapping_add(r)).collect()
    }

    /// The pixel surgery is tied to the model: the equivariant circuit
    /// assumes the flip-symmetric preparation.
    pub fn prep_mode(&self) -> PrepMode {
        match self.model_kind {
            AnsatzKind::Equivariant => PrepMode::Equivariant,
            AnsatzKind::HardwareEfficient => PrepMode::NonEquivariant,
        }
    }

    fn validate(&self) -> Result<(), TrainingError> {
        if self.seeds.is_empty() {
            return Err(TrainingError::NoSeeds);
        }
        if matches!(self.embedding, EmbeddingChoice::Reverse(_)) && !(self.scale_m > 0.0) {
            return Err(TrainingError::NonPositiveScale(self.scale_m));
        }
        Ok(())
    }
}

/// Embed one sample into a statevector.
pub fn embed_sample(
    cfg: &ExperimentConfig,
    sample: &Sample,
) -> Result<QuantumState<f64>, TrainingError> {
    let coords = match cfg.embedding {
        EmbeddingChoice::Amplitude => amplitude_embed(&sample.image.pixels, 256)?.coords,
        EmbeddingChoice::Reverse(alpha) => {
            let ecfg = EmbeddingConfig::new(alpha, cfg.scale_m)?;
            embed(&ecfg, &sample.prepared.vector)?.coords
        }
    };
    Ok(init_state_real(&coords)?)
}

/// Embed every sample; deterministic, every state unit-norm.
pub fn embed_dataset(
    cfg: &ExperimentConfig,
    samples: &[Sample],
) -> Result<Vec<(QuantumState<f64>, u8)>, TrainingError> {
    samples
        .iter()
        .map(|s| Ok((embed_sample(cfg, s)?, s.prepared.label)))
        .collect()
}

/// Fraction of samples whose predicted label matches the truth.
pub fn evaluate(
    spec: &AnsatzSpec<f64>,
    params: &[f64],
    states: &[(QuantumState<f64>, u8)],
) -> Result<f64, TrainingError> {
    if states.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0usize;
    for (state, label) in states {
        if forward(spec, params, state)?.predicted_label == *label {
            correct += 1;
        }
    }
    Ok(correct as f64 / states.len() as f64)
}

/// One repeat's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatOutcome {
    pub seed: u64,
    pub best_params: Vec<f64>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    /// `(evaluation index, loss)` for every objective evaluation.
    pub loss_history: Vec<(usize, f64)>,
    pub final_loss: f64,
    /// Mean `|p(hflip(img)) - p(img)|` over the test set; recorded for
    /// the equivariant model as the measured invariance gap.
    pub flip_gap: Option<f64>,
}

/// Aggregate over repeats. Standard deviations use the sample (R-1)
/// denominator and are zero for a single repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub repeats: Vec<RepeatOutcome>,
    pub train_acc_mean: f64,
    pub train_acc_std: f64,
    pub test_acc_mean: f64,
    pub test_acc_std: f64,
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Train/evaluate the configured experiment once per seed.
pub fn train(cfg: &ExperimentConfig) -> Result<RunReport, TrainingError> {
    cfg.validate()?;
    let spec = build_ansatz::<f64>(cfg.model_kind, cfg.qubits)?;
    let mut repeats = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        repeats.push(run_repeat(cfg, &spec, seed)?);
    }
    let (train_acc_mean, train_acc_std) =
        mean_std(&repeats.iter().map(|r| r.train_accuracy).collect::<Vec<_>>());
    let (test_acc_mean, test_acc_std) =
        mean_std(&repeats.iter().map(|r| r.test_accuracy).collect::<Vec<_>>());
    Ok(RunReport { repeats, train_acc_mean, train_acc_std, test_acc_mean, test_acc_std })
}

fn run_repeat(
    cfg: &ExperimentConfig,
    spec: &AnsatzSpec<f64>,
    seed: u64,
) -> Result<RepeatOutcome, TrainingError> {
    let split = crate::data::build_dataset(
        &cfg.source,
        cfg.count,
        seed,
        seed.wrapping_add(1),
        cfg.test_fraction,
        cfg.prep_mode(),
    )?;
    train_on_split(cfg, spec, seed, &split)
}

/// The repeat body with an externally supplied split (used by tests that
/// need hand-built datasets).
pub fn train_on_split(
    cfg: &ExperimentConfig,
    spec: &AnsatzSpec<f64>,
    seed: u64,
    split: &DatasetSplit,
) -> Result<RepeatOutcome, TrainingError> {
    let train_states = embed_dataset(cfg, &split.train)?;
    let test_states = embed_dataset(cfg, &split.test)?;
    let labels: Vec<u8> = train_states.iter().map(|(_, l)| *l).collect();

    let mut init_rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let x0: Vec<f64> = (0..spec.param_count)
        .map(|_| init_rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();

    let mut fallible: Option<TrainingError> = None;
    let mut objective = |params: &[f64]| -> f64 {
        let mut probs = Vec::with_capacity(train_states.len());
        for (state, _) in &train_states {
            match forward(spec, params, state) {
                Ok(out) => probs.push(out.probability),
                Err(e) => {
                    fallible.get_or_insert(TrainingError::Model(e));
                    return f64::INFINITY;
                }
            }
        }
        cross_entropy(&probs, &labels).unwrap_or(f64::INFINITY)
    };
    let result = minimize(&mut objective, &x0, cfg.method, cfg.budget, seed)?;
    if let Some(e) = fallible {
        return Err(e);
    }

    let train_accuracy = evaluate(spec, &result.best_params, &train_states)?;
    let test_accuracy = evaluate(spec, &result.best_params, &test_states)?;
    let flip_gap = if cfg.model_kind == AnsatzKind::Equivariant {
        Some(flip_probability_gap(cfg, spec, &result.best_params, &split.test)?)
    } else {
        None
    };
    Ok(RepeatOutcome {
        seed,
        best_params: result.best_params,
        train_accuracy,
        test_accuracy,
        loss_history: result.history,
        final_loss: result.best_loss,
        flip_gap,
    })
}

/// Diagnostic: mean absolute difference between the class probability on
/// each sample and on its horizontal flip, pushed through the full
/// preparation + embedding + circuit pipeline.
pub fn flip_probability_gap(
    cfg: &ExperimentConfig,
    spec: &AnsatzSpec<f64>,
    params: &[f64],
    samples: &[Sample],
) -> Result<f64, TrainingError> {
    if samples.is_empty() {
        return Ok(0.0);
    }
    let mode = cfg.prep_mode();
    let mut total = 0.0;
    for sample in samples {
        let flipped_img = hflip(&sample.image);
        let flipped = Sample {
            prepared: prepare(&flipped_img, mode),
            image: flipped_img,
        };
        let p = forward(spec, params, &embed_sample(cfg, sample)?)?.probability;
        let pf = forward(spec, params, &embed_sample(cfg, &flipped)?)?.probability;
        total += (pf - p).abs();
    }
    Ok(total / samples.len() as f64)
}

/// The flip symmetry restricted to prepared 255-vectors, extended
/// trivially to the appended embedding coordinate: pixel `(x, y)` maps
/// to `(15 - x, y)`, except index 15 (whose mirror slot was removed by
/// the surgery) and index 255 (the appended coordinate) stay fixed.
///
/// This is the representation under which the reverse embeddings are
/// exactly equivariant; the circuit's own flip operator additionally
/// swaps indices 15 and 255.
pub fn strict_flip_permutation() -> [usize; 256] {
    let mut perm = [0usize; 256];
    for (i, p) in perm.iter_mut().enumerate().take(255) {
        let (x, y) = (i / 16, i % 16);
        let j = 16 * (15 - x) + y;
        *p = if j == 255 { i } else { j };
    }
    perm[255] = 255;
    perm
}

/// CSV of every repeat's loss history. Columns:
/// `embedding,alpha,M,model_kind,repeat,iteration,loss`.
pub fn loss_history_csv(cfg: &ExperimentConfig, report: &RunReport) -> String {
    let mut out = String::from("embedding,alpha,M,model_kind,repeat,iteration,loss\n");
    let kind = match cfg.model_kind {
        AnsatzKind::HardwareEfficient => "hardware_efficient",
        AnsatzKind::Equivariant => "equivariant",
    };
    for (r, rep) in report.repeats.iter().enumerate() {
        for &(iter, loss) in &rep.loss_history {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                cfg.embedding.name(),
                cfg.embedding.alpha_label(),
                cfg.scale_m,
                kind,
                r,
                iter,
                loss
            ));
        }
    }
    out
}
