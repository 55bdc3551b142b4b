//! Plate datasets: the 500-plate training grid, its train/independent split,
//! nested scarce subsets, the out-of-domain PWB test set, feature
//! standardization and CSV serialization.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{
    apply_uncertainty, natural_frequency, Material, PhysicsFeature, PhysicsSet, PlateGeometry,
};
use crate::seed::{derive_seed, rng};

/// Planar (width, length) combinations of the training grid, in inches.
pub const PLANAR_SETS: [(f64, f64); 5] = [
    (2.000, 2.000),
    (1.875, 3.000),
    (5.250, 7.000),
    (6.000, 3.000),
    (10.500, 8.750),
];

pub const THICKNESS_MIN: f64 = 0.030;
pub const THICKNESS_STEP: f64 = 0.005;
pub const THICKNESS_COUNT: usize = 20;

pub const GRID_SIZE: usize = 500;
pub const TRAIN_POOL_SIZE: usize = 261;
pub const INDEPENDENT_SIZE: usize = 239;
pub const TRAIN_SIZES: [usize; 4] = [261, 117, 60, 30];

pub const TEST2_SIZE: usize = 101;
pub const TEST2_LENGTH: (f64, f64) = (2.040, 9.824);
pub const TEST2_WIDTH: (f64, f64) = (2.016, 9.843);
pub const TEST2_THICKNESS: (f64, f64) = (0.024, 0.216);

/// Number of base input features (t, w, l, ρ, E, ν).
pub const BASE_FEATURES: usize = 6;
pub const BASE_FEATURE_NAMES: [&str; BASE_FEATURES] =
    ["t_in", "w_in", "l_in", "rho_lb_in3", "E_ksi", "nu"];

pub const CSV_HEADER: [&str; 8] = [
    "material",
    "t_in",
    "w_in",
    "l_in",
    "rho_lb_in3",
    "E_ksi",
    "nu",
    "fn_hz",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateSample {
    pub material_name: String,
    pub thickness: f64,
    pub width: f64,
    pub length: f64,
    pub weight_density: f64,
    pub youngs_modulus: f64,
    pub poissons_ratio: f64,
    /// Target natural frequency in Hz.
    pub natural_frequency: f64,
}

impl PlateSample {
    pub fn from_parts(geometry: &PlateGeometry, material: &Material, natural_frequency: f64) -> Self {
        Self {
            material_name: material.name.clone(),
            thickness: geometry.thickness,
            width: geometry.width,
            length: geometry.length,
            weight_density: material.weight_density,
            youngs_modulus: material.youngs_modulus,
            poissons_ratio: material.poissons_ratio,
            natural_frequency,
        }
    }

    pub fn geometry(&self) -> PlateGeometry {
        PlateGeometry {
            thickness: self.thickness,
            width: self.width,
            length: self.length,
        }
    }

    pub fn material(&self) -> Material {
        Material {
            name: self.material_name.clone(),
            weight_density: self.weight_density,
            youngs_modulus: self.youngs_modulus,
            poissons_ratio: self.poissons_ratio,
        }
    }

    /// Base network inputs in CSV column order.
    pub fn base_features(&self) -> [f64; BASE_FEATURES] {
        [
            self.thickness,
            self.width,
            self.length,
            self.weight_density,
            self.youngs_modulus,
            self.poissons_ratio,
        ]
    }

    pub fn physics_feature(&self, feature: PhysicsFeature) -> f64 {
        feature.evaluate(&self.geometry(), &self.material())
    }

    /// Closed-form frequency for this plate, without measurement scatter.
    pub fn exact_frequency(&self) -> f64 {
        natural_frequency(&self.geometry(), &self.material())
    }

    fn key(&self) -> (String, u64, u64, u64) {
        (
            self.material_name.clone(),
            self.thickness.to_bits(),
            self.width.to_bits(),
            self.length.to_bits(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetRole {
    Grid,
    Train,
    Validation,
    Test1,
    Test2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    role: DatasetRole,
    samples: Vec<PlateSample>,
}

impl Dataset {
    /// Rejects duplicate (material, t, w, l) rows and non-positive targets.
    pub fn new(role: DatasetRole, samples: Vec<PlateSample>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(samples.len());
        for (i, s) in samples.iter().enumerate() {
            if !(s.natural_frequency > 0.0 && s.natural_frequency.is_finite()) {
                return Err(Error::invalid(format!(
                    "sample {i}: natural frequency must be positive, got {}",
                    s.natural_frequency
                )));
            }
            if !seen.insert(s.key()) {
                return Err(Error::invalid(format!(
                    "sample {i}: duplicate plate {} {}x{}x{}",
                    s.material_name, s.width, s.length, s.thickness
                )));
            }
        }
        Ok(Self { role, samples })
    }

    pub fn role(&self) -> DatasetRole {
        self.role
    }

    pub fn samples(&self) -> &[PlateSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn with_role(mut self, role: DatasetRole) -> Self {
        self.role = role;
        self
    }

    fn select(&self, role: DatasetRole, indices: &[usize]) -> Self {
        Self {
            role,
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }

    pub fn contains(&self, sample: &PlateSample) -> bool {
        let key = sample.key();
        self.samples.iter().any(|s| s.key() == key)
    }
}

/// One Eq.-1 style draw: Gaussian centred on 0.5 with σ = 1/6, clipped to [0, 1].
fn uncertainty_draw<R: Rng>(rng: &mut R) -> f64 {
    let normal: Normal<f64> = Normal::new(0.5, 1.0 / 6.0).expect("valid normal parameters");
    normal.sample(rng).clamp(0.0, 1.0)
}

/// The 5 materials × 5 planar sets × 20 thicknesses grid, ordered by material,
/// then planar set, then thickness. Every target carries ±1% scatter.
pub fn build_full_grid(master_seed: u64) -> Dataset {
    let mut noise = rng(derive_seed(master_seed, "grid-noise", 0));
    let mut samples = Vec::with_capacity(GRID_SIZE);
    for material in Material::training_set() {
        for &(width, length) in &PLANAR_SETS {
            for i in 0..THICKNESS_COUNT {
                // round to the 0.005 in grid so values print cleanly
                let thickness = ((THICKNESS_MIN + THICKNESS_STEP * i as f64) * 1000.0).round() / 1000.0;
                let geometry = PlateGeometry {
                    thickness,
                    width,
                    length,
                };
                let exact = natural_frequency(&geometry, &material);
                let adjusted = apply_uncertainty(exact, uncertainty_draw(&mut noise))
                    .expect("draw is clipped to [0, 1]");
                samples.push(PlateSample::from_parts(&geometry, &material, adjusted));
            }
        }
    }
    Dataset::new(DatasetRole::Grid, samples).expect("grid rows are unique")
}

/// Seeded uniform partition into the 261-plate training pool and the
/// 239-plate independent test set. Both keep the grid's row order.
pub fn split_train_independent(grid: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    if grid.len() != GRID_SIZE {
        return Err(Error::invalid(format!(
            "expected the {GRID_SIZE}-sample grid, got {} samples",
            grid.len()
        )));
    }
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.shuffle(&mut rng(seed));
    let (train, test) = order.split_at_mut(TRAIN_POOL_SIZE);
    train.sort_unstable();
    test.sort_unstable();
    Ok((
        grid.select(DatasetRole::Train, train),
        grid.select(DatasetRole::Test1, test),
    ))
}

/// Seeded subset of the training pool. For a fixed seed the subsets are
/// nested (30 ⊂ 60 ⊂ 117 ⊂ 261) because each is a prefix of one permutation.
pub fn nested_subset(pool: &Dataset, size: usize, seed: u64) -> Result<Dataset> {
    if pool.len() != TRAIN_POOL_SIZE {
        return Err(Error::invalid(format!(
            "expected the {TRAIN_POOL_SIZE}-sample training pool, got {}",
            pool.len()
        )));
    }
    if !TRAIN_SIZES.contains(&size) {
        return Err(Error::invalid(format!(
            "unsupported training size {size}; choose one of {TRAIN_SIZES:?}"
        )));
    }
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut rng(seed));
    let chosen = &mut order[..size];
    chosen.sort_unstable();
    Ok(pool.select(DatasetRole::Train, chosen))
}

/// 101 PWB plates with dimensions drawn uniformly within the out-of-domain
/// bounds. Targets are exact (no measurement scatter).
pub fn build_test2(seed: u64) -> Dataset {
    let mut r = rng(seed);
    let material = Material::pwb();
    let samples = (0..TEST2_SIZE)
        .map(|_| {
            let length = r.gen_range(TEST2_LENGTH.0..=TEST2_LENGTH.1);
            let width = r.gen_range(TEST2_WIDTH.0..=TEST2_WIDTH.1);
            let thickness = r.gen_range(TEST2_THICKNESS.0..=TEST2_THICKNESS.1);
            let geometry = PlateGeometry {
                thickness,
                width,
                length,
            };
            PlateSample::from_parts(&geometry, &material, natural_frequency(&geometry, &material))
        })
        .collect();
    Dataset::new(DatasetRole::Test2, samples).expect("continuous draws do not collide")
}

/// Everything an experiment needs, generated from one master seed.
#[derive(Debug, Clone)]
pub struct DataBundle {
    pub master_seed: u64,
    pub grid: Dataset,
    pub train_pool: Dataset,
    pub test1: Dataset,
    pub test2: Dataset,
}

impl DataBundle {
    pub fn generate(master_seed: u64) -> Self {
        let grid = build_full_grid(master_seed);
        let (train_pool, test1) =
            split_train_independent(&grid, derive_seed(master_seed, "split", 0))
                .expect("grid has the expected size");
        let test2 = build_test2(derive_seed(master_seed, "test2", 0));
        Self {
            master_seed,
            grid,
            train_pool,
            test1,
            test2,
        }
    }

    pub fn training_subset(&self, size: usize) -> Result<Dataset> {
        nested_subset(
            &self.train_pool,
            size,
            derive_seed(self.master_seed, "subset", 0),
        )
    }

    /// Writes grid, train pool, the scarce subsets and both test sets.
    /// Returns the written file names.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<String>> {
        std::fs::create_dir_all(dir)?;
        let mut files = vec![
            ("grid.csv".to_string(), self.grid.clone()),
            ("test1.csv".to_string(), self.test1.clone()),
            ("test2.csv".to_string(), self.test2.clone()),
        ];
        for size in TRAIN_SIZES {
            files.push((format!("train{size}.csv"), self.training_subset(size)?));
        }
        let mut names = Vec::new();
        for (name, data) in files {
            write_csv(&data, &dir.join(&name))?;
            names.push(name);
        }
        Ok(names)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub std: f64,
}

impl FeatureStats {
    fn fit(name: &str, values: impl Iterator<Item = f64> + Clone) -> Result<Self> {
        let n = values.clone().count();
        let mean = values.clone().sum::<f64>() / n as f64;
        let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        // relative threshold catches columns that are constant up to rounding
        if std.is_nan() || std <= 1e-12 * mean.abs().max(1e-300) {
            return Err(Error::ZeroVariance {
                feature: name.to_string(),
                count: n,
            });
        }
        Ok(Self { mean, std })
    }

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }

    pub fn invert(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Z-score statistics fitted on training samples only: population mean and
/// standard deviation for each base feature, each selected physics feature
/// and the target frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub physics_set: PhysicsSet,
    pub base: [FeatureStats; BASE_FEATURES],
    pub physics: Vec<FeatureStats>,
    pub target: FeatureStats,
}

/// Standardized model inputs for a dataset.
#[derive(Debug, Clone)]
pub struct Encoded {
    /// n × 6
    pub base: Array2<f64>,
    /// n × k
    pub physics: Array2<f64>,
    /// n
    pub target: Array1<f64>,
}

impl Encoded {
    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }
}

pub fn fit_standardizer(train: &Dataset, physics_set: PhysicsSet) -> Result<Standardizer> {
    if train.is_empty() {
        return Err(Error::invalid("cannot fit a standardizer on an empty dataset"));
    }
    let s = train.samples();
    let mut base = Vec::with_capacity(BASE_FEATURES);
    for (j, name) in BASE_FEATURE_NAMES.iter().enumerate() {
        base.push(FeatureStats::fit(name, s.iter().map(move |x| x.base_features()[j]))?);
    }
    let physics = physics_set
        .features()
        .map(|f| {
            let values: Vec<f64> = s.iter().map(|x| x.physics_feature(f)).collect();
            FeatureStats::fit(&f.symbol().to_string(), values.into_iter())
        })
        .collect::<Result<Vec<_>>>()?;
    let target = FeatureStats::fit("fn_hz", s.iter().map(|x| x.natural_frequency))?;
    Ok(Standardizer {
        physics_set,
        base: base.try_into().expect("six base features"),
        physics,
        target,
    })
}

impl Standardizer {
    pub fn physics_count(&self) -> usize {
        self.physics.len()
    }

    pub fn encode_base(&self, sample: &PlateSample) -> [f64; BASE_FEATURES] {
        let raw = sample.base_features();
        std::array::from_fn(|j| self.base[j].apply(raw[j]))
    }

    pub fn encode_physics(&self, sample: &PlateSample) -> Vec<f64> {
        self.physics_set
            .features()
            .zip(&self.physics)
            .map(|(f, stats)| stats.apply(sample.physics_feature(f)))
            .collect()
    }

    pub fn encode_target(&self, hz: f64) -> f64 {
        self.target.apply(hz)
    }

    pub fn decode_target(&self, z: f64) -> f64 {
        self.target.invert(z)
    }

    pub fn encode(&self, data: &Dataset) -> Encoded {
        let n = data.len();
        let k = self.physics_count();
        let mut base = Array2::zeros((n, BASE_FEATURES));
        let mut physics = Array2::zeros((n, k));
        let mut target = Array1::zeros(n);
        for (i, s) in data.samples().iter().enumerate() {
            for (j, v) in self.encode_base(s).into_iter().enumerate() {
                base[[i, j]] = v;
            }
            for (j, v) in self.encode_physics(s).into_iter().enumerate() {
                physics[[i, j]] = v;
            }
            target[i] = self.encode_target(s.natural_frequency);
        }
        Encoded {
            base,
            physics,
            target,
        }
    }
}

/// Writes the dataset with the fixed header and shortest round-trip decimal
/// formatting, LF line endings.
pub fn write_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        let to_io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(CSV_HEADER).map_err(to_io)?;
        for s in data.samples() {
            w.write_record([
                s.material_name.clone(),
                s.thickness.to_string(),
                s.width.to_string(),
                s.length.to_string(),
                s.weight_density.to_string(),
                s.youngs_modulus.to_string(),
                s.poissons_ratio.to_string(),
                s.natural_frequency.to_string(),
            ])
            .map_err(to_io)?;
        }
        w.flush()?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a file written by [`write_csv`]. Row numbers in errors are 1-based
/// file line numbers (the header is line 1).
pub fn read_csv(path: &Path, role: DatasetRole) -> Result<Dataset> {
    let csv_err = |row: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(1, e.to_string()))?;
    let header = reader.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
    let got: Vec<&str> = header.iter().collect();
    if got != CSV_HEADER {
        let missing: Vec<&str> = CSV_HEADER
            .iter()
            .copied()
            .filter(|c| !got.contains(c))
            .collect();
        let message = if missing.is_empty() {
            format!("header {got:?} does not match expected column order {CSV_HEADER:?}")
        } else {
            format!("missing columns {missing:?}")
        };
        return Err(csv_err(1, message));
    }
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_err(row, e.to_string()))?;
        if record.len() != CSV_HEADER.len() {
            return Err(csv_err(
                row,
                format!("expected {} fields, found {}", CSV_HEADER.len(), record.len()),
            ));
        }
        let num = |j: usize| -> Result<f64> {
            let field = &record[j];
            field.trim().parse::<f64>().map_err(|_| {
                csv_err(row, format!("column `{}`: `{field}` is not a number", CSV_HEADER[j]))
            })
        };
        samples.push(PlateSample {
            material_name: record[0].to_string(),
            thickness: num(1)?,
            width: num(2)?,
            length: num(3)?,
            weight_density: num(4)?,
            youngs_modulus: num(5)?,
            poissons_ratio: num(6)?,
            natural_frequency: num(7)?,
        });
    }
    Dataset::new(role, samples).map_err(|e| csv_err(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::PhysicsFeature::*;

    #[test]
    fn grid_shape() {
        let grid = build_full_grid(7);
        assert_eq!(grid.len(), 500);
        for m in Material::training_set() {
            for &(w, l) in &PLANAR_SETS {
                let n = grid
                    .samples()
                    .iter()
                    .filter(|s| s.material_name == m.name && s.width == w && s.length == l)
                    .count();
                assert_eq!(n, 20);
            }
        }
        let ts: Vec<f64> = grid.samples()[..20].iter().map(|s| s.thickness).collect();
        assert_eq!(ts[0], 0.030);
        assert_eq!(ts[19], 0.125);
    }

    #[test]
    fn grid_targets_within_one_percent_of_exact() {
        for s in build_full_grid(11).samples() {
            let ratio = s.natural_frequency / s.exact_frequency();
            assert!((0.99 - 1e-12..=1.01 + 1e-12).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn grid_noise_is_applied_and_seeded() {
        let a = build_full_grid(1);
        let b = build_full_grid(1);
        let c = build_full_grid(2);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let exact = a
            .samples()
            .iter()
            .filter(|s| s.natural_frequency == s.exact_frequency())
            .count();
        assert!(exact < 10);
    }

    #[test]
    fn split_partition() {
        let grid = build_full_grid(3);
        let (train, test) = split_train_independent(&grid, 99).unwrap();
        assert_eq!((train.len(), test.len()), (261, 239));
        for s in grid.samples() {
            assert!(train.contains(s) ^ test.contains(s));
        }
        let (again, _) = split_train_independent(&grid, 99).unwrap();
        assert_eq!(train, again);
        let (other, _) = split_train_independent(&grid, 100).unwrap();
        assert_ne!(train, other);
        assert!(split_train_independent(&test, 99).is_err());
    }

    #[test]
    fn subsets_are_nested() {
        let bundle = DataBundle::generate(5);
        let full = bundle.training_subset(261).unwrap();
        assert_eq!(full.samples(), bundle.train_pool.samples());
        let subsets: Vec<Dataset> = [117, 60, 30]
            .iter()
            .map(|&n| bundle.training_subset(n).unwrap())
            .collect();
        assert_eq!(subsets[0].len(), 117);
        for pair in subsets.windows(2) {
            assert!(pair[1].samples().iter().all(|s| pair[0].contains(s)));
        }
        assert!(subsets[0].samples().iter().all(|s| full.contains(s)));
        assert!(nested_subset(&bundle.train_pool, 100, 1).is_err());
        assert!(nested_subset(&subsets[0], 30, 1).is_err());
    }

    #[test]
    fn test2_within_bounds() {
        let t2 = build_test2(42);
        assert_eq!(t2.len(), 101);
        let pwb = Material::pwb();
        let grid = build_full_grid(42);
        for s in t2.samples() {
            assert!((TEST2_LENGTH.0..=TEST2_LENGTH.1).contains(&s.length));
            assert!((TEST2_WIDTH.0..=TEST2_WIDTH.1).contains(&s.width));
            assert!((TEST2_THICKNESS.0..=TEST2_THICKNESS.1).contains(&s.thickness));
            assert_eq!(s.material(), pwb);
            assert_eq!(s.natural_frequency, s.exact_frequency());
            assert!(!grid.contains(s));
        }
    }

    #[test]
    fn standardizer_zero_mean_unit_std() {
        let bundle = DataBundle::generate(9);
        let set = PhysicsSet::of(&[Weight, FlexuralRigidity, ShearModulus]);
        let st = fit_standardizer(&bundle.train_pool, set).unwrap();
        let enc = st.encode(&bundle.train_pool);
        let cols = enc
            .base
            .columns()
            .into_iter()
            .chain(enc.physics.columns())
            .map(|c| c.to_owned())
            .chain([enc.target.clone()]);
        for col in cols {
            let n = col.len() as f64;
            let mean = col.sum() / n;
            let std = (col.mapv(|v| (v - mean).powi(2)).sum() / n).sqrt();
            assert!(mean.abs() < 1e-9, "{mean}");
            assert!((std - 1.0).abs() < 1e-9, "{std}");
        }
    }

    #[test]
    fn standardizer_round_trip() {
        let bundle = DataBundle::generate(9);
        let st = fit_standardizer(&bundle.train_pool, PhysicsSet::of(&[FlexuralRigidity])).unwrap();
        for s in bundle.test1.samples() {
            let z = st.encode_base(s);
            for (j, raw) in s.base_features().iter().enumerate() {
                let back = st.base[j].invert(z[j]);
                assert!((back - raw).abs() <= 1e-9 * raw.abs());
            }
            let back = st.decode_target(st.encode_target(s.natural_frequency));
            assert!((back - s.natural_frequency).abs() <= 1e-9 * s.natural_frequency);
        }
    }

    #[test]
    fn standardizer_depends_on_subset() {
        let bundle = DataBundle::generate(9);
        let small = fit_standardizer(&bundle.training_subset(30).unwrap(), PhysicsSet::NONE).unwrap();
        let large = fit_standardizer(&bundle.train_pool, PhysicsSet::NONE).unwrap();
        assert_ne!(small.target.mean, large.target.mean);
        assert_ne!(small.base[0].mean, large.base[0].mean);
    }

    #[test]
    fn standardizer_rejects_constant_feature() {
        // Test set 2 is a single material, so density is constant.
        let err = fit_standardizer(&build_test2(1), PhysicsSet::NONE).unwrap_err();
        assert!(matches!(err, Error::ZeroVariance { ref feature, .. } if feature == "rho_lb_in3"), "{err}");
        let empty = Dataset::new(DatasetRole::Train, vec![]).unwrap();
        assert!(fit_standardizer(&empty, PhysicsSet::NONE).is_err());
    }

    #[test]
    fn dataset_rejects_duplicates() {
        let grid = build_full_grid(1);
        let mut rows = grid.samples()[..3].to_vec();
        rows.push(rows[0].clone());
        assert!(Dataset::new(DatasetRole::Train, rows).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.csv");
        let grid = build_full_grid(17);
        write_csv(&grid, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(text.lines().count(), 501);
        assert!(!text.contains('\r'));
        let back = read_csv(&path, DatasetRole::Grid).unwrap();
        assert_eq!(back, grid);
    }

    fn read_str(text: &str) -> Result<Dataset> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, text).unwrap();
        read_csv(&path, DatasetRole::Train)
    }

    #[test]
    fn csv_errors_carry_row_numbers() {
        let header = CSV_HEADER.join(",");
        let good = "Aluminum,0.03,2,2,0.097,9900,0.33,1400.5";
        let err = read_str(&format!("{header}\n{good}\nAluminum,0.04,2,2,0.097,abc,0.33,1\n")).unwrap_err();
        match err {
            Error::Csv { row, message, .. } => {
                assert_eq!(row, 3);
                assert!(message.contains("E_ksi"), "{message}");
            }
            other => panic!("unexpected {other}"),
        }
        let err = read_str(&format!("{header}\n{good}\nAluminum,0.04,2\n")).unwrap_err();
        assert!(matches!(err, Error::Csv { row: 3, .. }), "{err}");
        let err = read_str("material,t_in,w_in\nAl,1,2\n").unwrap_err();
        assert!(err.to_string().contains("missing columns"), "{err}");
    }
}
