//! Experiment grid, seeded ensembles and result reporting.
//!
//! The nominal grid is 9 injection schemes × 7 physics sets × 4 training
//! sizes = 252 models. The baseline architecture is the same whatever
//! "scheme" it is paired with, and a physics set needs at least one
//! injection layer, so the distinct configurations are 1 baseline plus
//! 8 schemes × 6 physics sets = 49 per training size, 196 in total.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{fit_standardizer, DataBundle, Dataset, TRAIN_SIZES};
use crate::error::{Error, Result};
use crate::nn::InjectionScheme;
use crate::physics::PhysicsSet;
use crate::seed::derive_seed;
use crate::trainer::{predict_dataset, split_validation, train, ErrorSummary, TrainConfig};

pub const DEFAULT_ENSEMBLE: usize = 50;
pub const NOMINAL_MODEL_COUNT: usize = 9 * 7 * 4;
pub const CONFIGS_PER_SIZE: usize = 1 + 8 * 6;

pub const RESULTS_HEADER: &str = "config_id,scheme,physics,train_size,test_set,mean_err_pct,median_err_pct,std_err_pct,min_err_pct,max_err_pct";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub physics_set: PhysicsSet,
    pub scheme: InjectionScheme,
    pub train_size: usize,
    pub ensemble_size: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn new(
        physics_set: PhysicsSet,
        scheme: InjectionScheme,
        train_size: usize,
        ensemble_size: usize,
        master_seed: u64,
    ) -> Result<Self> {
        if physics_set.is_empty() != scheme.is_empty() {
            return Err(Error::invalid(format!(
                "physics set `{physics_set}` and layers `{scheme}` must be both empty or both nonempty"
            )));
        }
        if !InjectionScheme::studied().contains(&scheme) {
            return Err(Error::invalid(format!("layers `{scheme}` are not one of the nine studied schemes")));
        }
        if !TRAIN_SIZES.contains(&train_size) {
            return Err(Error::invalid(format!(
                "training size {train_size} is not one of {TRAIN_SIZES:?}"
            )));
        }
        if ensemble_size == 0 {
            return Err(Error::invalid("ensemble size must be at least 1"));
        }
        Ok(Self {
            physics_set,
            scheme,
            train_size,
            ensemble_size,
            master_seed,
        })
    }

    pub fn baseline(train_size: usize, ensemble_size: usize, master_seed: u64) -> Result<Self> {
        Self::new(PhysicsSet::NONE, InjectionScheme::NONE, train_size, ensemble_size, master_seed)
    }

    /// Sortable identifier, e.g. `n030-L2-4-D` or `n261-none-none`.
    pub fn id(&self) -> String {
        format!("n{:03}-{}-{}", self.train_size, self.scheme, self.physics_set)
    }

    pub fn is_baseline(&self) -> bool {
        self.scheme.is_empty()
    }

    pub fn replicate_seed(&self, replicate: usize) -> u64 {
        derive_seed(self.master_seed, &self.id(), replicate as u64)
    }
}

/// Optional restriction of the grid; `None` keeps every value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridFilter {
    pub train_size: Option<usize>,
    pub physics_set: Option<PhysicsSet>,
    pub scheme: Option<InjectionScheme>,
}

impl GridFilter {
    pub fn accepts(&self, c: &ExperimentConfig) -> bool {
        self.train_size.is_none_or(|n| n == c.train_size)
            && self.physics_set.is_none_or(|p| p == c.physics_set)
            && self.scheme.is_none_or(|s| s == c.scheme)
    }
}

/// The 196 distinct configurations, ordered by training size (largest
/// first), then scheme, then physics set in their tabulated order.
pub fn enumerate_grid(master_seed: u64, ensemble_size: usize) -> Vec<ExperimentConfig> {
    let mut out = Vec::with_capacity(CONFIGS_PER_SIZE * TRAIN_SIZES.len());
    for size in TRAIN_SIZES {
        for scheme in InjectionScheme::studied() {
            for physics in PhysicsSet::studied() {
                if let Ok(c) = ExperimentConfig::new(physics, scheme, size, ensemble_size, master_seed) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Running mean of the replicate predictions for one plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningTrace {
    pub label: String,
    pub actual_hz: f64,
    pub predictions_hz: Vec<f64>,
    pub running_mean_hz: Vec<f64>,
}

impl RunningTrace {
    fn new(label: String, actual_hz: f64, predictions_hz: Vec<f64>) -> Self {
        let running_mean_hz = predictions_hz
            .iter()
            .scan(0.0, |sum, p| {
                *sum += p;
                Some(*sum)
            })
            .enumerate()
            .map(|(i, s)| s / (i + 1) as f64)
            .collect();
        Self {
            label,
            actual_hz,
            predictions_hz,
            running_mean_hz,
        }
    }

    /// `replicates,prediction_hz,running_mean_hz`, counting from 1.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "replicates,prediction_hz,running_mean_hz")?;
        for (i, (p, m)) in self.predictions_hz.iter().zip(&self.running_mean_hz).enumerate() {
            writeln!(w, "{},{p},{m}", i + 1)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub config: ExperimentConfig,
    pub replicate_seeds: Vec<u64>,
    /// Equal-weight mean over replicates, one entry per plate.
    pub test1_predictions: Vec<f64>,
    pub test2_predictions: Vec<f64>,
    pub test1: ErrorSummary,
    pub test2: ErrorSummary,
    /// (final training loss, final validation loss) per replicate.
    pub final_losses: Vec<(f64, f64)>,
    pub trace: RunningTrace,
}

impl EnsembleResult {
    pub fn summary(&self) -> ConfigSummary {
        ConfigSummary {
            config_id: self.config.id(),
            scheme: self.config.scheme.label(),
            physics: self.config.physics_set.label(),
            train_size: self.config.train_size,
            ensemble_size: self.config.ensemble_size,
            master_seed: self.config.master_seed,
            replicate_seeds: self.replicate_seeds.clone(),
            test1: self.test1,
            test2: self.test2,
            final_train_loss: self.final_losses.iter().map(|l| l.0).collect(),
            final_val_loss: self.final_losses.iter().map(|l| l.1).collect(),
        }
    }

    /// Median over replicates of final validation loss / final training loss.
    pub fn median_loss_ratio(&self) -> f64 {
        median(self.final_losses.iter().map(|(t, v)| v / t).collect())
    }
}

pub fn median(mut values: Vec<f64>) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len().is_multiple_of(2) {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    }
}

/// The plate whose running average is traced: the 5.25 × 7.00 × 0.045 in
/// stainless-steel plate when it is in the test set, otherwise the first.
pub fn trace_index(test1: &Dataset) -> usize {
    test1
        .samples()
        .iter()
        .position(|s| {
            s.material_name == "Stainless Steel"
                && s.width == 5.25
                && s.length == 7.0
                && (s.thickness - 0.045).abs() < 1e-9
        })
        .unwrap_or(0)
}

struct Replicate {
    test1: Vec<f64>,
    test2: Vec<f64>,
    final_losses: (f64, f64),
}

/// Trains `ensemble_size` replicates of one configuration (in parallel on
/// the current rayon pool), averages their predictions with equal weight
/// and scores the averages on both test sets.
///
/// The standardizer is fitted on the configuration's training subset; each
/// replicate then carves its own seeded 80/20 monitoring split from it.
pub fn run_ensemble(config: &ExperimentConfig, data: &DataBundle, train_config: &TrainConfig) -> Result<EnsembleResult> {
    let subset = data.training_subset(config.train_size)?;
    let standardizer = fit_standardizer(&subset, config.physics_set)?;
    let seeds: Vec<u64> = (0..config.ensemble_size).map(|r| config.replicate_seed(r)).collect();

    let run_one = |seed: u64| -> Result<Replicate> {
        let (fit, val) = split_validation(&subset, derive_seed(seed, "validation", 0))?;
        let record = train(
            &standardizer.encode(&fit),
            &standardizer.encode(&val),
            config.scheme,
            seed,
            train_config,
        )?;
        Ok(Replicate {
            test1: predict_dataset(&record.network, &data.test1, &standardizer)?,
            test2: predict_dataset(&record.network, &data.test2, &standardizer)?,
            final_losses: (record.final_train_loss(), record.final_val_loss()),
        })
    };

    let replicates: Vec<Replicate> = seeds
        .par_iter()
        .enumerate()
        .map(|(r, &seed)| {
            run_one(seed).map_err(|e| Error::Replicate {
                config_id: config.id(),
                replicate: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let average = |pick: fn(&Replicate) -> &Vec<f64>, len: usize| -> Vec<f64> {
        let mut sum = vec![0.0; len];
        for rep in &replicates {
            for (s, p) in sum.iter_mut().zip(pick(rep)) {
                *s += p;
            }
        }
        sum.iter().map(|s| s / replicates.len() as f64).collect()
    };
    let test1_predictions = average(|r| &r.test1, data.test1.len());
    let test2_predictions = average(|r| &r.test2, data.test2.len());

    let ti = trace_index(&data.test1);
    let traced = &data.test1.samples()[ti];
    let trace = RunningTrace::new(
        format!(
            "{} {}x{}x{} in",
            traced.material_name, traced.width, traced.length, traced.thickness
        ),
        traced.natural_frequency,
        replicates.iter().map(|r| r.test1[ti]).collect(),
    );

    Ok(EnsembleResult {
        config: *config,
        replicate_seeds: seeds,
        test1: ErrorSummary::from_predictions(&data.test1, &test1_predictions)?,
        test2: ErrorSummary::from_predictions(&data.test2, &test2_predictions)?,
        test1_predictions,
        test2_predictions,
        final_losses: replicates.iter().map(|r| r.final_losses).collect(),
        trace,
    })
}

/// Serializable per-configuration outcome; what reports are built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub config_id: String,
    pub scheme: String,
    pub physics: String,
    pub train_size: usize,
    pub ensemble_size: usize,
    pub master_seed: u64,
    pub replicate_seeds: Vec<u64>,
    pub test1: ErrorSummary,
    pub test2: ErrorSummary,
    pub final_train_loss: Vec<f64>,
    pub final_val_loss: Vec<f64>,
}

impl ConfigSummary {
    pub fn test(&self, set: TestSet) -> &ErrorSummary {
        match set {
            TestSet::Test1 => &self.test1,
            TestSet::Test2 => &self.test2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestSet {
    Test1,
    Test2,
}

impl TestSet {
    pub const BOTH: [TestSet; 2] = [TestSet::Test1, TestSet::Test2];

    pub fn label(self) -> &'static str {
        match self {
            TestSet::Test1 => "test1",
            TestSet::Test2 => "test2",
        }
    }
}

/// Appends one summary as a JSON line and flushes, so completed configs
/// survive an interrupted grid run.
pub fn append_jsonl(path: &Path, summary: &ConfigSummary) -> Result<()> {
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    serde_json::to_writer(&mut f, summary)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<ConfigSummary>> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Report tables built from a set of summaries, sorted by config id.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summaries: Vec<ConfigSummary>,
}

impl Report {
    pub fn new(mut summaries: Vec<ConfigSummary>) -> Result<Self> {
        if summaries.is_empty() {
            return Err(Error::invalid("nothing to report"));
        }
        summaries.sort_by(|a, b| a.config_id.cmp(&b.config_id));
        for pair in summaries.windows(2) {
            if pair[0].config_id == pair[1].config_id {
                return Err(Error::DuplicateConfig(pair[0].config_id.clone()));
            }
        }
        Ok(Self { summaries })
    }

    /// Long-form table: one row per (config, test set).
    pub fn results_csv(&self) -> String {
        let mut out = String::from(RESULTS_HEADER);
        out.push('\n');
        for s in &self.summaries {
            for set in TestSet::BOTH {
                let e = s.test(set);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    s.config_id, s.scheme, s.physics, s.train_size, set.label(),
                    e.mean, e.median, e.std, e.min, e.max
                ));
            }
        }
        out
    }

    /// JSON object keyed by config id, plus grid metadata.
    pub fn summary_json(&self) -> Result<String> {
        let configs: BTreeMap<&str, &ConfigSummary> =
            self.summaries.iter().map(|s| (s.config_id.as_str(), s)).collect();
        let doc = serde_json::json!({
            "nominal_model_count": NOMINAL_MODEL_COUNT,
            "distinct_config_count": CONFIGS_PER_SIZE * TRAIN_SIZES.len(),
            "nominal_mapping": "each physics-free (scheme, none) cell of the nominal 9x7x4 grid is the baseline architecture; (none, physics) cells cannot inject and are not run",
            "reported_config_count": self.summaries.len(),
            "configs": configs,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn train_sizes(&self) -> Vec<usize> {
        let sizes: BTreeSet<usize> = self.summaries.iter().map(|s| s.train_size).collect();
        sizes.into_iter().rev().collect()
    }

    /// Mean error laid out as 9 scheme rows × 7 physics columns for one
    /// training size and test set. Cells that are not distinct configs, or
    /// were not run, are blank.
    pub fn pivot_csv(&self, train_size: usize, set: TestSet) -> String {
        let columns = PhysicsSet::studied();
        let mut out = String::from("scheme");
        for p in columns {
            out.push(',');
            out.push_str(&p.label());
        }
        out.push('\n');
        for scheme in InjectionScheme::studied() {
            out.push_str(&scheme.label());
            for physics in columns {
                out.push(',');
                let id = format!("n{train_size:03}-{scheme}-{physics}");
                if let Some(s) = self.summaries.iter().find(|s| s.config_id == id) {
                    out.push_str(&s.test(set).mean.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes `results.csv`, `summary.json` and `pivot_<test>_n<size>.csv`.
    /// Returns the file names.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<String>> {
        std::fs::create_dir_all(dir)?;
        let mut names = vec!["results.csv".to_string(), "summary.json".to_string()];
        std::fs::write(dir.join("results.csv"), self.results_csv())?;
        std::fs::write(dir.join("summary.json"), self.summary_json()?)?;
        for size in self.train_sizes() {
            for set in TestSet::BOTH {
                let name = format!("pivot_{}_n{size:03}.csv", set.label());
                std::fs::write(dir.join(&name), self.pivot_csv(size, set))?;
                names.push(name);
            }
        }
        Ok(names)
    }
}
