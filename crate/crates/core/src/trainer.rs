//! One training run under the fixed regimen (Adam, lr 0.01, batch 80,
//! 500 epochs, MSE on standardized targets), plus prediction in Hz and
//! percentage-error evaluation.

use std::io::Write;
use std::path::Path;

use ndarray::Axis;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::datagen::{Dataset, DatasetRole, Encoded, PlateSample, Standardizer};
use crate::error::{Error, Result};
use crate::nn::{InjectionScheme, Network};
use crate::optim::{AdamConfig, AdamState};
use crate::seed::{derive_seed, rng};

pub const EPOCHS: usize = 500;
pub const BATCH_SIZE: usize = 80;
pub const VALIDATION_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: EPOCHS,
            batch_size: BATCH_SIZE,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn batches_per_epoch(&self, train_len: usize) -> usize {
        train_len.div_ceil(self.batch_size)
    }

    pub fn total_steps(&self, train_len: usize) -> usize {
        self.batches_per_epoch(train_len) * self.epochs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    /// Sample-weighted mean of the batch losses seen during each epoch.
    pub train_loss: Vec<f64>,
    /// Full validation MSE after each epoch.
    pub val_loss: Vec<f64>,
    pub network: Network,
    pub seed: u64,
    pub steps: u64,
}

impl TrainRecord {
    pub fn final_train_loss(&self) -> f64 {
        *self.train_loss.last().expect("at least one epoch")
    }

    pub fn final_val_loss(&self) -> f64 {
        *self.val_loss.last().expect("at least one epoch")
    }

    /// `epoch,train_loss,val_loss`, epochs numbered from 1. Losses are
    /// MSE in standardized-target units.
    pub fn write_loss_history(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "epoch,train_loss,val_loss")?;
        for (i, (t, v)) in self.train_loss.iter().zip(&self.val_loss).enumerate() {
            writeln!(w, "{},{t},{v}", i + 1)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Seeded 80/20 split of a training subset into fitting and monitoring parts.
pub fn split_validation(data: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    let n = data.len();
    let n_val = (n as f64 * VALIDATION_FRACTION).round() as usize;
    if n_val == 0 || n_val >= n {
        return Err(Error::invalid(format!(
            "{n} samples are too few for a validation split"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng(seed));
    let (val_idx, train_idx) = order.split_at_mut(n_val);
    val_idx.sort_unstable();
    train_idx.sort_unstable();
    let pick = |idx: &[usize], role| {
        Dataset::new(role, idx.iter().map(|&i| data.samples()[i].clone()).collect())
    };
    Ok((
        pick(train_idx, DatasetRole::Train)?,
        pick(val_idx, DatasetRole::Validation)?,
    ))
}

fn mse(net: &Network, data: &Encoded) -> Result<f64> {
    let pred = net.predict_batch(data.base.view(), data.physics.view())?;
    let r = pred - &data.target;
    Ok(r.dot(&r) / data.len() as f64)
}

/// Trains a fresh network. Each epoch reshuffles the fitting set, walks it
/// in mini-batches (last partial batch kept) taking one Adam step per batch,
/// then records the epoch's training loss and the validation loss.
pub fn train(
    train_set: &Encoded,
    validation_set: &Encoded,
    scheme: InjectionScheme,
    seed: u64,
    config: &TrainConfig,
) -> Result<TrainRecord> {
    if train_set.is_empty() || validation_set.is_empty() {
        return Err(Error::invalid("training and validation sets must be nonempty"));
    }
    let k = if scheme.is_empty() { 0 } else { train_set.physics.ncols() };
    let mut net = Network::init(scheme, k, derive_seed(seed, "init", 0))?;
    let mut adam = AdamState::new(&net, config.adam);
    let mut shuffle = rng(derive_seed(seed, "shuffle", 0));

    let n = train_set.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut train_loss = Vec::with_capacity(config.epochs);
    let mut val_loss = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle);
        let mut loss_sum = 0.0;
        for (batch, idx) in order.chunks(config.batch_size).enumerate() {
            let base = train_set.base.select(Axis(0), idx);
            let phys = train_set.physics.select(Axis(0), idx);
            let target = train_set.target.select(Axis(0), idx);
            let (loss, grads) =
                net.batch_loss_and_grads(base.view(), phys.view(), target.view())?;
            if !loss.is_finite() || !grads.is_finite() {
                return Err(Error::NonFinite {
                    what: "training loss",
                    epoch: epoch + 1,
                    batch: batch + 1,
                });
            }
            adam.step(&mut net, &grads)?;
            loss_sum += loss * idx.len() as f64;
        }
        let val = mse(&net, validation_set)?;
        if !val.is_finite() {
            return Err(Error::NonFinite {
                what: "validation loss",
                epoch: epoch + 1,
                batch: 0,
            });
        }
        train_loss.push(loss_sum / n as f64);
        val_loss.push(val);
    }

    Ok(TrainRecord {
        train_loss,
        val_loss,
        network: net,
        seed,
        steps: adam.timestep,
    })
}

/// Predicted natural frequency in Hz for one plate.
pub fn predict(network: &Network, sample: &PlateSample, standardizer: &Standardizer) -> Result<f64> {
    let base = standardizer.encode_base(sample);
    let physics = standardizer.encode_physics(sample);
    let (z, _) = network.forward(&base, &physics)?;
    Ok(standardizer.decode_target(z))
}

/// Batched [`predict`] over a dataset.
pub fn predict_dataset(network: &Network, data: &Dataset, standardizer: &Standardizer) -> Result<Vec<f64>> {
    let enc = standardizer.encode(data);
    let z = network.predict_batch(enc.base.view(), enc.physics.view())?;
    Ok(z.iter().map(|&v| standardizer.decode_target(v)).collect())
}

/// |actual − predicted| / actual × 100.
pub fn percent_error(actual: f64, predicted: f64) -> Result<f64> {
    if actual == 0.0 || !actual.is_finite() {
        return Err(Error::invalid(format!("actual frequency {actual} cannot anchor an error")));
    }
    Ok((actual - predicted).abs() / actual.abs() * 100.0)
}

/// Summary statistics of per-plate percentage errors. Standard deviation is
/// the population form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl ErrorSummary {
    pub fn from_errors(errors: &[f64]) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::invalid("no errors to summarize"));
        }
        let n = errors.len() as f64;
        let mean = errors.iter().sum::<f64>() / n;
        let std = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n).sqrt();
        let mut sorted = errors.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        } else {
            sorted[mid]
        };
        Ok(Self {
            mean,
            median,
            std,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            count: errors.len(),
        })
    }

    /// Compares predictions in Hz against a test set's targets.
    pub fn from_predictions(test_set: &Dataset, predictions: &[f64]) -> Result<Self> {
        if test_set.len() != predictions.len() {
            return Err(Error::Shape(format!(
                "{} predictions for {} samples",
                predictions.len(),
                test_set.len()
            )));
        }
        let errors = test_set
            .samples()
            .iter()
            .zip(predictions)
            .map(|(s, &p)| percent_error(s.natural_frequency, p))
            .collect::<Result<Vec<_>>>()?;
        Self::from_errors(&errors)
    }
}

pub fn evaluate(network: &Network, test_set: &Dataset, standardizer: &Standardizer) -> Result<ErrorSummary> {
    if test_set.is_empty() {
        return Err(Error::invalid("empty test set"));
    }
    let predictions = predict_dataset(network, test_set, standardizer)?;
    ErrorSummary::from_predictions(test_set, &predictions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{fit_standardizer, DataBundle};
    use crate::physics::{PhysicsFeature, PhysicsSet};

    fn short(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn step_counts() {
        let c = TrainConfig::default();
        assert_eq!(c.total_steps(24), 500);
        assert_eq!(c.total_steps(209), 1500);
        assert_eq!(c.total_steps(80), 500);
        assert_eq!(c.total_steps(81), 1000);
    }

    #[test]
    fn validation_split_sizes() {
        let bundle = DataBundle::generate(1);
        for (size, fit) in [(261, 209), (117, 94), (60, 48), (30, 24)] {
            let data = bundle.training_subset(size).unwrap();
            let (t, v) = split_validation(&data, 3).unwrap();
            assert_eq!((t.len(), v.len()), (fit, size - fit));
            assert!(v.samples().iter().all(|s| !t.contains(s)));
        }
    }

    #[test]
    fn records_steps_and_is_deterministic() {
        let bundle = DataBundle::generate(2);
        let data = bundle.training_subset(30).unwrap();
        let set = PhysicsSet::of(&[PhysicsFeature::FlexuralRigidity]);
        let st = fit_standardizer(&data, set).unwrap();
        let (t, v) = split_validation(&data, 5).unwrap();
        let (t, v) = (st.encode(&t), st.encode(&v));
        let scheme = InjectionScheme::of(&[2, 3, 4]).unwrap();
        let a = train(&t, &v, scheme, 11, &short(20)).unwrap();
        let b = train(&t, &v, scheme, 11, &short(20)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.steps, 20);
        assert_eq!(a.train_loss.len(), 20);
        assert!(a.train_loss.iter().chain(&a.val_loss).all(|l| l.is_finite() && *l >= 0.0));
        let c = train(&t, &v, scheme, 12, &short(20)).unwrap();
        assert_ne!(a.network, c.network);
    }

    #[test]
    fn training_reduces_loss() {
        let bundle = DataBundle::generate(4);
        let data = bundle.training_subset(117).unwrap();
        let st = fit_standardizer(&data, PhysicsSet::NONE).unwrap();
        let (t, v) = split_validation(&data, 5).unwrap();
        let rec = train(&st.encode(&t), &st.encode(&v), InjectionScheme::NONE, 1, &short(100)).unwrap();
        assert_eq!(rec.steps, 200);
        assert!(rec.final_train_loss() < 0.1 * rec.train_loss[0], "{:?}", &rec.train_loss[..3]);
    }

    #[test]
    fn predict_is_pure_and_matches_batch() {
        let bundle = DataBundle::generate(4);
        let data = bundle.training_subset(60).unwrap();
        let set = PhysicsSet::of(&[PhysicsFeature::Weight, PhysicsFeature::ShearModulus]);
        let st = fit_standardizer(&data, set).unwrap();
        let net = Network::init(InjectionScheme::of(&[5]).unwrap(), 2, 3).unwrap();
        let batch = predict_dataset(&net, &bundle.test2, &st).unwrap();
        for (s, b) in bundle.test2.samples().iter().zip(&batch) {
            let p1 = predict(&net, s, &st).unwrap();
            let p2 = predict(&net, s, &st).unwrap();
            assert_eq!(p1, p2);
            assert!((p1 - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn error_examples() {
        assert!((percent_error(100.0, 90.0).unwrap() - 10.0).abs() < 1e-12);
        assert!(percent_error(0.0, 1.0).is_err());
        let s = ErrorSummary::from_errors(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!((s.mean, s.median, s.std, s.min, s.max), (0.0, 0.0, 0.0, 0.0, 0.0));
        let errs = [3.0, 1.0, 4.0, 1.5, 9.0, 2.5];
        let s = ErrorSummary::from_errors(&errs).unwrap();
        assert!((s.mean - errs.iter().sum::<f64>() / 6.0).abs() < 1e-12);
        assert_eq!(s.median, 2.75);
        assert_eq!((s.min, s.max), (1.0, 9.0));
        assert!(ErrorSummary::from_errors(&[]).is_err());
    }

    #[test]
    fn evaluate_exact_predictions_is_zero() {
        let bundle = DataBundle::generate(4);
        let exact: Vec<f64> = bundle.test1.samples().iter().map(|s| s.natural_frequency).collect();
        let s = ErrorSummary::from_predictions(&bundle.test1, &exact).unwrap();
        assert_eq!(s.max, 0.0);
        assert!(ErrorSummary::from_predictions(&bundle.test1, &exact[1..]).is_err());
    }

    #[test]
    fn loss_history_csv() {
        let bundle = DataBundle::generate(6);
        let data = bundle.training_subset(30).unwrap();
        let st = fit_standardizer(&data, PhysicsSet::NONE).unwrap();
        let (t, v) = split_validation(&data, 1).unwrap();
        let rec = train(&st.encode(&t), &st.encode(&v), InjectionScheme::NONE, 2, &short(3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("loss.csv");
        rec.write_loss_history(&path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "epoch,train_loss,val_loss");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("3,"));
    }
}
