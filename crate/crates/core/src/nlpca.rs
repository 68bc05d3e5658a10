//! Nonlinear PCA with an autoassociative bottleneck network.
//!
//! The network has the sandglass shape `d → h → k → h → d` with `tanh` on
//! both hidden layers and identity activations on the bottleneck and output
//! layers. It is trained to reproduce its input; the `k` bottleneck
//! activations are the nonlinear components.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::embedding::{Embedding, Method, Provenance};
use crate::error::NlpcaError;
use crate::matrix::Matrix;

/// Header line of the parameter file format.
pub const PARAMS_MAGIC: &str = "nlpca-params";
pub const PARAMS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation value `a = f(z)`.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Identity => 1.0,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "tanh" => Some(Activation::Tanh),
            "identity" => Some(Activation::Identity),
            _ => None,
        }
    }
}

/// Activations of the four layers, in order.
pub const ACTIVATIONS: [Activation; 4] = [
    Activation::Tanh,
    Activation::Identity,
    Activation::Tanh,
    Activation::Identity,
];

/// Index of the bottleneck layer within [`AutoencoderNetwork::layers`].
const BOTTLENECK: usize = 1;

/// One affine layer: `out = f(W · in + b)`, `W` is out x in.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Matrix,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    fn inputs(&self) -> usize {
        self.weights.cols()
    }

    fn outputs(&self) -> usize {
        self.weights.rows()
    }

    fn forward_into(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .row_iter()
                .zip(&self.biases)
                .map(|(w, b)| self.activation.apply(crate::matrix::dot(w, input) + b)),
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderNetwork {
    layers: Vec<Layer>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainConfig {
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden_width: 8,
            learning_rate: 0.01,
            momentum: 0.9,
            epochs: 2000,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NlpcaError> {
        if self.hidden_width == 0 {
            return Err(NlpcaError::Config("hidden_width must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(NlpcaError::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(NlpcaError::Config(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainTrace {
    /// Loss of the initial network.
    pub initial_mse: f64,
    /// Loss after each epoch's update.
    pub mse_per_epoch: Vec<f64>,
    /// Last entry of `mse_per_epoch` (the initial loss when no epoch ran).
    pub final_mse: f64,
}

impl TrainTrace {
    pub fn min_mse(&self) -> f64 {
        self.mse_per_epoch
            .iter()
            .copied()
            .fold(self.initial_mse, f64::min)
    }
}

/// Parameter gradients laid out like the network: one weight matrix and
/// bias vector per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros_like(net: &AutoencoderNetwork) -> Self {
        Gradients {
            weights: net
                .layers
                .iter()
                .map(|l| Matrix::zeros(l.outputs(), l.inputs()))
                .collect(),
            biases: net.layers.iter().map(|l| vec![0.0; l.outputs()]).collect(),
        }
    }

    /// Flattened in the order of [`AutoencoderNetwork::parameters`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w.as_slice());
            out.extend_from_slice(b);
        }
        out
    }
}

impl AutoencoderNetwork {
    /// Seeded initialisation: weights uniform in `±1/√fan_in`, zero biases.
    pub fn new(d: usize, k: usize, config: &TrainConfig) -> Result<Self, NlpcaError> {
        config.validate()?;
        if !(1..=2).contains(&k) || d == 0 {
            return Err(NlpcaError::Architecture(vec![
                d,
                config.hidden_width,
                k,
                config.hidden_width,
                d,
            ]));
        }
        if k > d {
            return Err(NlpcaError::BottleneckTooWide { k, d });
        }
        let sizes = [d, config.hidden_width, k, config.hidden_width, d];
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let layers = (0..4)
            .map(|i| {
                let (fan_in, fan_out) = (sizes[i], sizes[i + 1]);
                let bound = 1.0 / (fan_in as f64).sqrt();
                let weights =
                    Matrix::from_fn(fan_out, fan_in, |_, _| rng.random_range(-bound..=bound));
                Layer {
                    weights,
                    biases: vec![0.0; fan_out],
                    activation: ACTIVATIONS[i],
                }
            })
            .collect();
        Ok(AutoencoderNetwork { layers })
    }

    /// Builds a network from explicit layers, checking the sandglass shape.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self, NlpcaError> {
        let shape_err = || NlpcaError::Architecture(layers.iter().map(|l| l.inputs()).collect());
        if layers.len() != 4 {
            return Err(shape_err());
        }
        for (i, l) in layers.iter().enumerate() {
            if l.biases.len() != l.outputs() || l.activation != ACTIVATIONS[i] {
                return Err(shape_err());
            }
            if i > 0 && layers[i - 1].outputs() != l.inputs() {
                return Err(shape_err());
            }
        }
        let net = AutoencoderNetwork { layers };
        let s = net.layer_sizes();
        if s[0] != s[4] || s[1] != s[3] || !(1..=2).contains(&s[2]) || s[2] > s[0] || s[1] == 0 {
            return Err(NlpcaError::Architecture(s.to_vec()));
        }
        Ok(net)
    }

    /// `[d, h, k, h, d]`.
    pub fn layer_sizes(&self) -> [usize; 5] {
        let l = &self.layers;
        [
            l[0].inputs(),
            l[0].outputs(),
            l[1].outputs(),
            l[2].outputs(),
            l[3].outputs(),
        ]
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn bottleneck_dim(&self) -> usize {
        self.layers[BOTTLENECK].outputs()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn n_parameters(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.biases.len())
            .sum()
    }

    /// All parameters, layer by layer: weights row-major, then biases.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_parameters());
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.biases);
        }
        out
    }

    /// Inverse of [`AutoencoderNetwork::parameters`].
    pub fn set_parameters(&mut self, params: &[f64]) {
        assert_eq!(
            params.len(),
            self.n_parameters(),
            "set_parameters: wrong length"
        );
        let mut rest = params;
        for l in &mut self.layers {
            let nw = l.weights.as_slice().len();
            l.weights.as_mut_slice().copy_from_slice(&rest[..nw]);
            rest = &rest[nw..];
            let nb = l.biases.len();
            l.biases.copy_from_slice(&rest[..nb]);
            rest = &rest[nb..];
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.is_finite() && l.biases.iter().all(|b| b.is_finite()))
    }

    fn check_input(&self, len: usize) -> Result<(), NlpcaError> {
        if len != self.input_dim() {
            return Err(NlpcaError::DimensionMismatch {
                expected: self.input_dim(),
                found: len,
            });
        }
        Ok(())
    }

    /// Activations of every layer for one sample; index 0 is the input.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(5);
        acts.push(x.to_vec());
        for l in &self.layers {
            let mut out = Vec::with_capacity(l.outputs());
            l.forward_into(acts.last().expect("input pushed"), &mut out);
            acts.push(out);
        }
        acts
    }

    /// Returns `(reconstruction, bottleneck)` for one sample.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>), NlpcaError> {
        self.check_input(x.len())?;
        let mut acts = self.activations(x);
        let reconstruction = acts.pop().expect("four layers");
        let bottleneck = acts.swap_remove(BOTTLENECK + 1);
        Ok((reconstruction, bottleneck))
    }

    /// Mean squared reconstruction error over all samples and coordinates,
    /// with its exact gradient.
    pub fn loss_gradient(&self, batch: &Matrix) -> Result<(f64, Gradients), NlpcaError> {
        if batch.rows() == 0 {
            return Err(NlpcaError::TooFewSamples { min: 1, found: 0 });
        }
        self.check_input(batch.cols())?;
        let scale = 1.0 / (batch.rows() * batch.cols()) as f64;
        let mut grads = Gradients::zeros_like(self);
        let mut sse = 0.0;
        for x in batch.row_iter() {
            let acts = self.activations(x);
            let out = &acts[4];
            // dL/d(output)
            let mut delta: Vec<f64> = out
                .iter()
                .zip(x)
                .map(|(o, t)| {
                    sse += (o - t) * (o - t);
                    2.0 * (o - t) * scale
                })
                .collect();
            for li in (0..4).rev() {
                let layer = &self.layers[li];
                let a_out = &acts[li + 1];
                for (dl, &a) in delta.iter_mut().zip(a_out) {
                    *dl *= layer.activation.derivative_from_output(a);
                }
                let a_in = &acts[li];
                let gw = &mut grads.weights[li];
                for (r, &dr) in delta.iter().enumerate() {
                    grads.biases[li][r] += dr;
                    for (g, &ai) in gw.row_mut(r).iter_mut().zip(a_in) {
                        *g += dr * ai;
                    }
                }
                if li > 0 {
                    let mut next = vec![0.0; layer.inputs()];
                    for (r, &dr) in delta.iter().enumerate() {
                        for (n, &w) in next.iter_mut().zip(layer.weights.row(r)) {
                            *n += w * dr;
                        }
                    }
                    delta = next;
                }
            }
        }
        Ok((sse * scale, grads))
    }

    /// Mean squared reconstruction error without gradients.
    pub fn mse(&self, data: &Matrix) -> Result<f64, NlpcaError> {
        self.check_input(data.cols())?;
        let mut sse = 0.0;
        for x in data.row_iter() {
            let acts = self.activations(x);
            sse += acts[4]
                .iter()
                .zip(x)
                .map(|(o, t)| (o - t) * (o - t))
                .sum::<f64>();
        }
        Ok(sse / (data.rows() * data.cols()) as f64)
    }

    /// Reconstructions of every row.
    pub fn reconstruct(&self, data: &Matrix) -> Result<Matrix, NlpcaError> {
        self.check_input(data.cols())?;
        let mut out = Matrix::zeros(data.rows(), data.cols());
        for (i, x) in data.row_iter().enumerate() {
            out.row_mut(i).copy_from_slice(&self.activations(x)[4]);
        }
        Ok(out)
    }

    /// Bottleneck activations, one row per sample.
    pub fn encode(&self, data: &Matrix) -> Result<Embedding, NlpcaError> {
        self.check_input(data.cols())?;
        Ok(Embedding {
            method: Method::Nlpca,
            coords: self.bottleneck(data),
            provenance: Provenance::Nlpca {
                initial_mse: None,
                final_mse: None,
                min_mse: None,
                epochs: 0,
            },
        })
    }

    /// Like [`AutoencoderNetwork::encode`], recording the training summary.
    pub fn encode_with_trace(
        &self,
        data: &Matrix,
        trace: &TrainTrace,
    ) -> Result<Embedding, NlpcaError> {
        let mut e = self.encode(data)?;
        e.provenance = Provenance::Nlpca {
            initial_mse: Some(trace.initial_mse),
            final_mse: Some(trace.final_mse),
            min_mse: Some(trace.min_mse()),
            epochs: trace.mse_per_epoch.len(),
        };
        Ok(e)
    }

    fn bottleneck(&self, data: &Matrix) -> Matrix {
        let k = self.bottleneck_dim();
        let mut out = Matrix::zeros(data.rows(), k);
        let mut h = Vec::new();
        let mut z = Vec::new();
        for (i, x) in data.row_iter().enumerate() {
            self.layers[0].forward_into(x, &mut h);
            self.layers[BOTTLENECK].forward_into(&h, &mut z);
            out.row_mut(i).copy_from_slice(&z);
        }
        out
    }

    /// Writes the versioned plain-text parameter format.
    pub fn to_params_string(&self) -> String {
        let mut s = String::new();
        let sizes = self.layer_sizes();
        writeln!(s, "{PARAMS_MAGIC} {PARAMS_VERSION}").unwrap();
        writeln!(
            s,
            "layers {}",
            sizes
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        )
        .unwrap();
        writeln!(
            s,
            "activations {}",
            self.layers
                .iter()
                .map(|l| l.activation.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        )
        .unwrap();
        for (i, l) in self.layers.iter().enumerate() {
            writeln!(s, "weights {} {} {}", i + 1, l.outputs(), l.inputs()).unwrap();
            for row in l.weights.row_iter() {
                writeln!(s, "{}", join_floats(row)).unwrap();
            }
            writeln!(s, "biases {} {}", i + 1, l.outputs()).unwrap();
            writeln!(s, "{}", join_floats(&l.biases)).unwrap();
        }
        s
    }

    pub fn from_params_str(text: &str) -> Result<Self, NlpcaError> {
        ParamReader::new(text).read()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NlpcaError> {
        fs::write(path, self.to_params_string())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NlpcaError> {
        Self::from_params_str(&fs::read_to_string(path)?)
    }
}

fn join_floats(v: &[f64]) -> String {
    // `{}` on f64 prints the shortest representation that round-trips
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

struct ParamReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> ParamReader<'a> {
    fn new(text: &'a str) -> Self {
        ParamReader {
            lines: text.lines().enumerate(),
        }
    }

    fn next_line(&mut self) -> Result<(usize, &'a str), NlpcaError> {
        loop {
            match self.lines.next() {
                None => {
                    return Err(NlpcaError::Format {
                        line: 0,
                        message: "unexpected end of file".into(),
                    })
                }
                Some((i, l)) => {
                    let l = l.trim();
                    if !l.is_empty() && !l.starts_with('#') {
                        return Ok((i + 1, l));
                    }
                }
            }
        }
    }

    fn keyword(&mut self, key: &str, n_args: usize) -> Result<(usize, Vec<&'a str>), NlpcaError> {
        let (line, text) = self.next_line()?;
        let mut parts = text.split_whitespace();
        if parts.next() != Some(key) {
            return Err(NlpcaError::Format {
                line,
                message: format!("expected `{key}`"),
            });
        }
        let args: Vec<&str> = parts.collect();
        if args.len() != n_args {
            return Err(NlpcaError::Format {
                line,
                message: format!("`{key}` takes {n_args} values, found {}", args.len()),
            });
        }
        Ok((line, args))
    }

    fn floats(&mut self, expected: usize) -> Result<Vec<f64>, NlpcaError> {
        let (line, text) = self.next_line()?;
        let vals = text
            .split_whitespace()
            .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| NlpcaError::Format {
                line,
                message: "expected finite decimal numbers".into(),
            })?;
        if vals.len() != expected {
            return Err(NlpcaError::Format {
                line,
                message: format!("expected {expected} values, found {}", vals.len()),
            });
        }
        Ok(vals)
    }

    fn read(mut self) -> Result<AutoencoderNetwork, NlpcaError> {
        let (line, magic) = self.next_line()?;
        if magic != format!("{PARAMS_MAGIC} {PARAMS_VERSION}") {
            return Err(NlpcaError::Format {
                line,
                message: format!("expected header `{PARAMS_MAGIC} {PARAMS_VERSION}`"),
            });
        }
        let (line, sizes) = self.keyword("layers", 5)?;
        let sizes = sizes
            .iter()
            .map(|s| s.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| NlpcaError::Format {
                line,
                message: "layer sizes must be integers".into(),
            })?;
        let (line, acts) = self.keyword("activations", 4)?;
        let acts = acts
            .iter()
            .map(|a| Activation::parse(a))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| NlpcaError::Format {
                line,
                message: "unknown activation".into(),
            })?;
        let mut layers = Vec::with_capacity(4);
        for i in 0..4 {
            let (rows, cols) = (sizes[i + 1], sizes[i]);
            let expect = [(i + 1).to_string(), rows.to_string(), cols.to_string()];
            let (line, args) = self.keyword("weights", 3)?;
            if args != expect {
                return Err(NlpcaError::Format {
                    line,
                    message: format!("expected `weights {}`", expect.join(" ")),
                });
            }
            let mut w = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                w.extend(self.floats(cols)?);
            }
            let (line, args) = self.keyword("biases", 2)?;
            if args != expect[..2] {
                return Err(NlpcaError::Format {
                    line,
                    message: format!("expected `biases {}`", expect[..2].join(" ")),
                });
            }
            let biases = self.floats(rows)?;
            layers.push(Layer {
                weights: Matrix::from_vec(rows, cols, w),
                biases,
                activation: acts[i],
            });
        }
        AutoencoderNetwork::from_layers(layers)
    }
}

/// Convenience wrapper for [`AutoencoderNetwork::new`].
pub fn init_network(
    d: usize,
    k: usize,
    config: &TrainConfig,
) -> Result<AutoencoderNetwork, NlpcaError> {
    AutoencoderNetwork::new(d, k, config)
}

/// Full-batch gradient descent with momentum for `config.epochs` epochs.
pub fn train(
    data: &Matrix,
    k: usize,
    config: &TrainConfig,
) -> Result<(AutoencoderNetwork, TrainTrace), NlpcaError> {
    if data.rows() < 2 {
        return Err(NlpcaError::TooFewSamples {
            min: 2,
            found: data.rows(),
        });
    }
    let mut net = AutoencoderNetwork::new(data.cols(), k, config)?;
    let trace = train_network(&mut net, data, config)?;
    Ok((net, trace))
}

/// Trains an existing network in place.
pub fn train_network(
    net: &mut AutoencoderNetwork,
    data: &Matrix,
    config: &TrainConfig,
) -> Result<TrainTrace, NlpcaError> {
    config.validate()?;
    let mut params = net.parameters();
    let mut velocity = vec![0.0; params.len()];
    let (mut loss, mut grads) = net.loss_gradient(data)?;
    if !loss.is_finite() {
        return Err(NlpcaError::Diverged { epoch: 0, loss });
    }
    let initial_mse = loss;
    let mut mse_per_epoch = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        for ((p, v), g) in params.iter_mut().zip(&mut velocity).zip(grads.flatten()) {
            *v = config.momentum * *v - config.learning_rate * g;
            *p += *v;
        }
        net.set_parameters(&params);
        if !net.is_finite() {
            return Err(NlpcaError::Diverged {
                epoch,
                loss: f64::NAN,
            });
        }
        (loss, grads) = net.loss_gradient(data)?;
        if !loss.is_finite() {
            return Err(NlpcaError::Diverged { epoch, loss });
        }
        mse_per_epoch.push(loss);
    }
    Ok(TrainTrace {
        initial_mse,
        final_mse: mse_per_epoch.last().copied().unwrap_or(initial_mse),
        mse_per_epoch,
    })
}
