//! Five-layer feedforward regressor with physics injection.
//!
//! Layers 1-4 are 40-wide ReLU transforms, layer 5 is the linear output.
//! Injecting physics into layer `j` concatenates the standardized physics
//! vector onto that layer's input before its affine transform, so layer 1
//! injection is plain input augmentation and layer 5 injection feeds the
//! physics straight to the output alongside the last hidden activation.

use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{concatenate, s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::BASE_FEATURES;
use crate::error::{Error, Result};
use crate::seed::rng;

pub const LAYER_COUNT: usize = 5;
pub const HIDDEN_WIDTH: usize = 40;

/// Set of layers (1..=5) that receive the physics vector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InjectionScheme(u8);

impl InjectionScheme {
    pub const NONE: InjectionScheme = InjectionScheme(0);

    /// Builds a scheme from 1-based layer numbers.
    pub fn of(layers: &[usize]) -> Result<Self> {
        let mut bits = 0u8;
        for &layer in layers {
            if !(1..=LAYER_COUNT).contains(&layer) {
                return Err(Error::invalid(format!(
                    "layer {layer} out of range 1..={LAYER_COUNT}"
                )));
            }
            bits |= 1 << (layer - 1);
        }
        Ok(InjectionScheme(bits))
    }

    /// The nine architectures studied: baseline, each single layer, and the
    /// multi-layer sets {1-4}, {2-4}, {2-5}.
    pub fn studied() -> [InjectionScheme; 9] {
        let of = |l: &[usize]| InjectionScheme::of(l).expect("static layers");
        [
            InjectionScheme::NONE,
            of(&[1]),
            of(&[2]),
            of(&[3]),
            of(&[4]),
            of(&[5]),
            of(&[1, 2, 3, 4]),
            of(&[2, 3, 4]),
            of(&[2, 3, 4, 5]),
        ]
    }

    pub fn contains(self, layer: usize) -> bool {
        (1..=LAYER_COUNT).contains(&layer) && self.0 & (1 << (layer - 1)) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn layers(self) -> Vec<usize> {
        (1..=LAYER_COUNT).filter(|&l| self.contains(l)).collect()
    }

    pub fn is_multi_layer(self) -> bool {
        self.0.count_ones() > 1
    }

    /// "none", "L3", "L2-4" for contiguous runs, otherwise "L1+3+5".
    pub fn label(self) -> String {
        let layers = self.layers();
        match layers.as_slice() {
            [] => "none".to_string(),
            [one] => format!("L{one}"),
            [first, .., last] if last - first + 1 == layers.len() => format!("L{first}-{last}"),
            _ => format!(
                "L{}",
                layers.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("+")
            ),
        }
    }

    /// Accepts "none", named labels ("L2-4", "2-4"), or comma lists ("2,3,4").
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t.eq_ignore_ascii_case("none") {
            return Ok(InjectionScheme::NONE);
        }
        let t = t.strip_prefix(['L', 'l']).unwrap_or(t);
        let bad = || Error::invalid(format!("cannot parse layer set `{text}`"));
        let mut layers = Vec::new();
        for part in t.split([',', '+']) {
            let part = part.trim();
            if let Some((a, b)) = part.split_once('-') {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                layers.extend(a..=b);
            } else {
                layers.push(part.parse().map_err(|_| bad())?);
            }
        }
        InjectionScheme::of(&layers)
    }
}

impl fmt::Display for InjectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Affine transform `y = W x + b` with `W` stored fan_out × fan_in.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    fn zeros(fan_out: usize, fan_in: usize) -> Self {
        Self {
            weights: Array2::zeros((fan_out, fan_in)),
            bias: Array1::zeros(fan_out),
        }
    }

    pub fn fan_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.nrows()
    }
}

/// Parameter-shaped container, used for gradients and optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| Layer::zeros(l.fan_out(), l.fan_in()))
                .collect(),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
    }

    pub fn is_finite(&self) -> bool {
        self.values().all(f64::is_finite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    scheme: InjectionScheme,
    physics_count: usize,
    pub layers: Vec<Layer>,
}

/// Activations kept from a forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input to each layer, physics columns included where injected.
    pub inputs: Vec<Array2<f64>>,
    /// Pre-activations of the four hidden layers.
    pub hidden_pre: Vec<Array2<f64>>,
    pub predictions: Array1<f64>,
}

/// Fan-in of every layer for a scheme and physics-vector length.
pub fn fan_ins(scheme: InjectionScheme, physics_count: usize) -> [usize; LAYER_COUNT] {
    std::array::from_fn(|j| {
        let base = if j == 0 { BASE_FEATURES } else { HIDDEN_WIDTH };
        base + if scheme.contains(j + 1) { physics_count } else { 0 }
    })
}

fn fan_outs() -> [usize; LAYER_COUNT] {
    std::array::from_fn(|j| if j + 1 == LAYER_COUNT { 1 } else { HIDDEN_WIDTH })
}

fn check_scheme(scheme: InjectionScheme, physics_count: usize) -> Result<()> {
    match (scheme.is_empty(), physics_count == 0) {
        (true, false) => Err(Error::invalid(format!(
            "{physics_count} physics features given but no injection layer"
        ))),
        (false, true) => Err(Error::invalid(format!(
            "scheme {scheme} injects physics but the physics set is empty"
        ))),
        _ => Ok(()),
    }
}

impl Network {
    /// He-uniform weights (bound √(6/fan_in)) drawn layer by layer in
    /// row-major order, zero biases.
    pub fn init(scheme: InjectionScheme, physics_count: usize, seed: u64) -> Result<Self> {
        check_scheme(scheme, physics_count)?;
        let mut r = rng(seed);
        let layers = fan_ins(scheme, physics_count)
            .into_iter()
            .zip(fan_outs())
            .map(|(fan_in, fan_out)| {
                let bound = (6.0 / fan_in as f64).sqrt();
                Layer {
                    weights: Array2::from_shape_simple_fn((fan_out, fan_in), || {
                        r.gen_range(-bound..bound)
                    }),
                    bias: Array1::zeros(fan_out),
                }
            })
            .collect();
        Ok(Self {
            scheme,
            physics_count,
            layers,
        })
    }

    /// Wraps explicit parameters, checking them against the architecture rule.
    pub fn from_layers(scheme: InjectionScheme, physics_count: usize, layers: Vec<Layer>) -> Result<Self> {
        check_scheme(scheme, physics_count)?;
        let net = Self {
            scheme,
            physics_count,
            layers,
        };
        net.check_shapes()?;
        Ok(net)
    }

    /// Same architecture with custom hidden width. Only used to build small
    /// instances for derivative checks and hand-worked examples.
    pub fn from_layers_unchecked(scheme: InjectionScheme, physics_count: usize, layers: Vec<Layer>) -> Self {
        Self {
            scheme,
            physics_count,
            layers,
        }
    }

    fn check_shapes(&self) -> Result<()> {
        if self.layers.len() != LAYER_COUNT {
            return Err(Error::Shape(format!(
                "expected {LAYER_COUNT} layers, got {}",
                self.layers.len()
            )));
        }
        let ins = fan_ins(self.scheme, self.physics_count);
        for (j, (layer, (fan_in, fan_out))) in self
            .layers
            .iter()
            .zip(ins.into_iter().zip(fan_outs()))
            .enumerate()
        {
            if layer.weights.dim() != (fan_out, fan_in) || layer.bias.len() != fan_out {
                return Err(Error::Shape(format!(
                    "layer {}: expected {fan_out}x{fan_in}, got {:?} with bias {}",
                    j + 1,
                    layer.weights.dim(),
                    layer.bias.len()
                )));
            }
        }
        Ok(())
    }

    pub fn scheme(&self) -> InjectionScheme {
        self.scheme
    }

    pub fn physics_count(&self) -> usize {
        self.physics_count
    }

    pub fn fan_ins(&self) -> Vec<usize> {
        self.layers.iter().map(Layer::fan_in).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn input_width(&self) -> usize {
        let first = &self.layers[0];
        first.fan_in() - if self.scheme.contains(1) { self.physics_count } else { 0 }
    }

    fn check_batch(&self, base: &ArrayView2<f64>, physics: &ArrayView2<f64>) -> Result<()> {
        let n = base.nrows();
        if base.ncols() != self.input_width() {
            return Err(Error::Shape(format!(
                "base input has {} columns, network expects {}",
                base.ncols(),
                self.input_width()
            )));
        }
        // the baseline never reads physics, so any width is accepted there
        if !self.scheme.is_empty() && (physics.ncols() != self.physics_count || physics.nrows() != n) {
            return Err(Error::Shape(format!(
                "physics input is {:?}, network expects {n}x{}",
                physics.dim(),
                self.physics_count
            )));
        }
        Ok(())
    }

    /// Batched forward pass over `n` rows. `physics` is `n × k`; with the
    /// baseline scheme it is never read.
    pub fn forward_batch(&self, base: ArrayView2<f64>, physics: ArrayView2<f64>) -> Result<ForwardCache> {
        self.check_batch(&base, &physics)?;
        let mut inputs = Vec::with_capacity(LAYER_COUNT);
        let mut hidden_pre = Vec::with_capacity(LAYER_COUNT - 1);
        let mut activation = base.to_owned();
        for (j, layer) in self.layers.iter().enumerate() {
            let input = if self.scheme.contains(j + 1) {
                concatenate![Axis(1), activation, physics]
            } else {
                activation
            };
            let mut pre = input.dot(&layer.weights.t());
            pre += &layer.bias;
            inputs.push(input);
            if j + 1 < LAYER_COUNT {
                activation = pre.mapv(|v| v.max(0.0));
                hidden_pre.push(pre);
            } else {
                activation = pre;
            }
        }
        let predictions = activation.column(0).to_owned();
        Ok(ForwardCache {
            inputs,
            hidden_pre,
            predictions,
        })
    }

    /// Predictions only.
    pub fn predict_batch(&self, base: ArrayView2<f64>, physics: ArrayView2<f64>) -> Result<Array1<f64>> {
        Ok(self.forward_batch(base, physics)?.predictions)
    }

    /// Single-sample forward pass.
    pub fn forward(&self, base: &[f64], physics: &[f64]) -> Result<(f64, ForwardCache)> {
        let b = ArrayView2::from_shape((1, base.len()), base).map_err(|e| Error::Shape(e.to_string()))?;
        let p = ArrayView2::from_shape((1, physics.len()), physics)
            .map_err(|e| Error::Shape(e.to_string()))?;
        let cache = self.forward_batch(b, p)?;
        Ok((cache.predictions[0], cache))
    }

    /// Mean squared error over the cached batch and its exact gradient.
    /// Physics columns are constants: their gradient is dropped at each
    /// injection point.
    pub fn backward(&self, cache: &ForwardCache, targets: ArrayView1<f64>) -> Result<(f64, Gradients)> {
        let n = cache.predictions.len();
        if targets.len() != n {
            return Err(Error::Shape(format!(
                "{} targets for a batch of {n}",
                targets.len()
            )));
        }
        let residual = &cache.predictions - &targets;
        let loss = residual.dot(&residual) / n as f64;
        // d(mean (p - y)^2)/dp
        let mut delta = (residual * (2.0 / n as f64)).insert_axis(Axis(1));
        let mut grads = Vec::with_capacity(LAYER_COUNT);
        for j in (0..LAYER_COUNT).rev() {
            let layer = &self.layers[j];
            let input = &cache.inputs[j];
            grads.push(Layer {
                weights: delta.t().dot(input),
                bias: delta.sum_axis(Axis(0)),
            });
            if j == 0 {
                break;
            }
            let injected = if self.scheme.contains(j + 1) { self.physics_count } else { 0 };
            let upstream = delta.dot(&layer.weights.slice(s![.., ..layer.fan_in() - injected]));
            let pre = &cache.hidden_pre[j - 1];
            delta = ndarray::Zip::from(&upstream)
                .and(pre)
                .map_collect(|&g, &h| if h > 0.0 { g } else { 0.0 });
        }
        grads.reverse();
        Ok((loss, Gradients { layers: grads }))
    }

    /// Mean loss and mean gradient over a nonempty batch.
    pub fn batch_loss_and_grads(
        &self,
        base: ArrayView2<f64>,
        physics: ArrayView2<f64>,
        targets: ArrayView1<f64>,
    ) -> Result<(f64, Gradients)> {
        if base.nrows() == 0 {
            return Err(Error::invalid("empty batch"));
        }
        let cache = self.forward_batch(base, physics)?;
        self.backward(&cache, targets)
    }

    /// Writes a plain-text checkpoint:
    ///
    /// ```text
    /// pgdnn-params 1
    /// scheme <label>
    /// physics <k>
    /// shapes <rows>x<cols> ... (one per layer)
    /// <layer 1 weights, one row per line>
    /// <layer 1 bias>
    /// ... repeated for layers 2-5
    /// ```
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "pgdnn-params 1")?;
        writeln!(w, "scheme {}", self.scheme)?;
        writeln!(w, "physics {}", self.physics_count)?;
        let shapes: Vec<String> = self
            .layers
            .iter()
            .map(|l| format!("{}x{}", l.fan_out(), l.fan_in()))
            .collect();
        writeln!(w, "shapes {}", shapes.join(" "))?;
        let join = |it: &mut dyn Iterator<Item = &f64>| {
            it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        };
        for layer in &self.layers {
            for row in layer.weights.rows() {
                writeln!(w, "{}", join(&mut row.iter()))?;
            }
            writeln!(w, "{}", join(&mut layer.bias.iter()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut lines = reader.lines();
        let mut line_no = 0usize;
        let mut next = || -> Result<String> {
            line_no += 1;
            let bad = Error::Csv {
                path: path.to_path_buf(),
                row: line_no,
                message: "unexpected end of checkpoint".into(),
            };
            lines.next().ok_or(bad)?.map_err(Error::from)
        };
        let err = |row: usize, message: String| Error::Csv {
            path: path.to_path_buf(),
            row,
            message,
        };
        if next()?.trim() != "pgdnn-params 1" {
            return Err(err(1, "not a pgdnn checkpoint".into()));
        }
        let scheme_line = next()?;
        let scheme = InjectionScheme::parse(
            scheme_line
                .strip_prefix("scheme ")
                .ok_or_else(|| err(2, "expected `scheme`".into()))?,
        )?;
        let physics_line = next()?;
        let physics_count: usize = physics_line
            .strip_prefix("physics ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| err(3, "expected `physics <k>`".into()))?;
        let shapes_line = next()?;
        let shapes = shapes_line
            .strip_prefix("shapes ")
            .ok_or_else(|| err(4, "expected `shapes`".into()))?
            .split_whitespace()
            .map(|s| {
                s.split_once('x')
                    .and_then(|(r, c)| Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)))
                    .ok_or_else(|| err(4, format!("bad shape `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut row = 4usize;
        let mut parse_row = |line: String, expected: usize| -> Result<Vec<f64>> {
            row += 1;
            let values = line
                .split_whitespace()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| err(row, e.to_string()))?;
            if values.len() != expected {
                return Err(err(row, format!("expected {expected} values, found {}", values.len())));
            }
            Ok(values)
        };
        let mut layers = Vec::with_capacity(shapes.len());
        for (rows, cols) in shapes {
            let mut flat = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                flat.extend(parse_row(next()?, cols)?);
            }
            let bias = parse_row(next()?, rows)?;
            layers.push(Layer {
                weights: Array2::from_shape_vec((rows, cols), flat).expect("row count checked"),
                bias: Array1::from(bias),
            });
        }
        Ok(Self {
            scheme,
            physics_count,
            layers,
        })
    }
}
